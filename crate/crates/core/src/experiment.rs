//! End-to-end experiments: config in, corpus + models + analyses out.
//!
//! An experiment samples one corpus, trains one model per training seed,
//! verifies each configured relation against every model, and optionally
//! runs the corpus/geometry analyses. Configs load from TOML with a strict
//! schema (unknown keys are rejected). The preset batches reproduce the
//! standard demonstrations: the royalty analogy across corpus sizes, the
//! capital-of sum across sizes, the royalty analogy under increasingly
//! imbalanced sentence weights, and the single-sentence context-window
//! study at window 1, 2 and 3.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::analysis::{
    context_overlap, context_partition, nearest_neighbors, pairwise_angles, verify_relation,
    Metric, Neighbor, VerificationResult, VerifyOptions,
};
use crate::corpus::{sample_corpus, BaseSentence, CorpusSpec, SentenceDistribution};
use crate::emit::round_sig9;
use crate::error::{Error, Result};
use crate::relation::{parse_relation, Relation};
use crate::skipgram::{train, EmbeddingModel, TrainingConfig};

/// Default training seeds for preset batches: five fixed seeds, with
/// majority-style acceptance left to the caller.
pub const DEFAULT_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

const DEFAULT_CORPUS_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SentenceEntry {
    pub text: String,
    pub weight: f64,
}

/// Which optional analyses to run (on the corpus, and on the first seed's
/// model where a model is needed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisFlags {
    pub partition: bool,
    pub overlap: bool,
    pub angles: bool,
    pub neighbors: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub sentences: Vec<SentenceEntry>,
    pub num_sentences: usize,
    #[serde(default = "default_corpus_seed")]
    pub corpus_seed: u64,
    #[serde(default)]
    pub training: TrainingConfig,
    /// Training seeds; defaults to the single seed in `training.seed`.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    /// Relation DSL strings, e.g. `"germany + capital ~= berlin"`.
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub analyses: AnalysisFlags,
    /// Words for the angle matrix; defaults to the whole vocabulary.
    #[serde(default)]
    pub angle_words: Option<Vec<String>>,
}

fn default_corpus_seed() -> u64 {
    DEFAULT_CORPUS_SEED
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || "-_.".contains(c))
        {
            return Err(Error::InvalidConfig {
                field: "name".into(),
                message: format!(
                    "{:?} must be non-empty lowercase [a-z0-9-_.] (it names output files)",
                    self.name
                ),
            });
        }
        let distribution = self.distribution()?;
        CorpusSpec::new(distribution, self.num_sentences, self.corpus_seed)?;
        self.training.validate()?;
        if let Some(seeds) = &self.seeds {
            if seeds.is_empty() {
                return Err(Error::InvalidConfig {
                    field: "seeds".into(),
                    message: "must list at least one training seed when present".into(),
                });
            }
        }
        for text in &self.relations {
            parse_relation(text)?;
        }
        if let Some(words) = &self.angle_words {
            let vocabulary = self.vocabulary()?;
            for word in words {
                if vocabulary.id(word).is_none() {
                    return Err(Error::UnknownWord { word: word.clone() });
                }
            }
        }
        Ok(())
    }

    pub fn distribution(&self) -> Result<SentenceDistribution> {
        let entries = self
            .sentences
            .iter()
            .map(|e| Ok((BaseSentence::new(&e.text)?, e.weight)))
            .collect::<Result<Vec<_>>>()?;
        SentenceDistribution::new(entries)
    }

    fn vocabulary(&self) -> Result<crate::corpus::Vocabulary> {
        let sentences = self
            .sentences
            .iter()
            .map(|e| BaseSentence::new(&e.text))
            .collect::<Result<Vec<_>>>()?;
        Ok(crate::corpus::build_vocabulary(&sentences))
    }

    /// The training seeds this experiment will run.
    pub fn effective_seeds(&self) -> Vec<u64> {
        self.seeds
            .clone()
            .unwrap_or_else(|| vec![self.training.seed])
    }
}

/// Read and validate a config file.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Error::ConfigRead {
        path: display.clone(),
        message: e.to_string(),
    })?;
    let config: ExperimentConfig = toml::from_str(&text).map_err(|e| Error::ConfigParse {
        path: display.clone(),
        message: e.to_string(),
    })?;
    config
        .validate()
        .map_err(|e| e.in_experiment(&config.name))?;
    Ok(config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub id: u32,
    pub word: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordVector {
    pub word: String,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEmbedding {
    pub seed: u64,
    pub vectors: Vec<WordVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedVerification {
    pub seed: u64,
    pub result: VerificationResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    /// The relation as written in the config.
    pub source: String,
    /// Canonical normalized form.
    pub normalized: String,
    pub per_seed: Vec<SeedVerification>,
    /// Fraction of seeds whose model solved the relation.
    pub solved_fraction: f64,
}

/// Labeled square matrix (angles in degrees, or Jaccard overlaps).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledMatrix {
    pub words: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordNeighbors {
    pub word: String,
    /// Full ranking of every *other* vocabulary word, nearest first.
    pub ranking: Vec<Neighbor>,
}

/// Everything an experiment produced. All floats are rounded to nine
/// significant digits when the report is built, so emitting and re-parsing
/// the report reproduces it exactly. Wall-clock duration is kept in memory
/// for display but never serialized: artifact bytes depend only on the
/// config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub vocabulary: Vec<VocabEntry>,
    pub seeds: Vec<u64>,
    pub embeddings: Vec<SeedEmbedding>,
    pub relations: Vec<RelationReport>,
    pub partition: Option<Vec<Vec<String>>>,
    pub overlap: Option<LabeledMatrix>,
    pub angles: Option<LabeledMatrix>,
    pub neighbors: Option<Vec<WordNeighbors>>,
    #[serde(skip)]
    pub duration: Duration,
}

impl ExperimentReport {
    /// Copy with zeroed duration, for value comparisons across runs.
    pub fn timeless(&self) -> ExperimentReport {
        ExperimentReport {
            duration: Duration::default(),
            ..self.clone()
        }
    }
}

fn round_vec(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| round_sig9(x)).collect()
}

fn round_matrix(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    m.iter().map(|row| round_vec(row)).collect()
}

fn round_neighbors(ranking: &[Neighbor]) -> Vec<Neighbor> {
    ranking
        .iter()
        .map(|n| Neighbor {
            word: n.word.clone(),
            distance: round_sig9(n.distance),
        })
        .collect()
}

fn round_verification(v: &VerificationResult) -> VerificationResult {
    VerificationResult {
        residual_euclidean: round_sig9(v.residual_euclidean),
        residual_cosine: v.residual_cosine.map(round_sig9),
        rhs_rank: v.rhs_rank,
        neighbor_ranking: round_neighbors(&v.neighbor_ranking),
        solved: v.solved,
    }
}

/// Run one experiment end to end. Deterministic up to `duration`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment_inner(config).map_err(|e| e.in_experiment(&config.name))
}

fn run_experiment_inner(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();

    let spec = CorpusSpec::new(
        config.distribution()?,
        config.num_sentences,
        config.corpus_seed,
    )?;
    let corpus = sample_corpus(&spec);
    let seeds = config.effective_seeds();

    let parsed: Vec<Relation> = config
        .relations
        .iter()
        .map(|text| parse_relation(text))
        .collect::<Result<_>>()?;

    let mut models: Vec<EmbeddingModel> = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let training = TrainingConfig {
            seed,
            ..config.training.clone()
        };
        models.push(train(&corpus, &training)?);
    }

    let vocabulary: Vec<VocabEntry> = corpus
        .vocabulary
        .tokens()
        .iter()
        .enumerate()
        .map(|(id, word)| VocabEntry {
            id: id as u32,
            word: word.clone(),
            count: corpus.vocabulary.count(id as u32),
        })
        .collect();

    let embeddings: Vec<SeedEmbedding> = seeds
        .iter()
        .zip(&models)
        .map(|(&seed, model)| SeedEmbedding {
            seed,
            vectors: corpus
                .vocabulary
                .tokens()
                .iter()
                .enumerate()
                .map(|(id, word)| WordVector {
                    word: word.clone(),
                    vector: round_vec(&model.input[id]),
                })
                .collect(),
        })
        .collect();

    let options = VerifyOptions::default();
    let relations: Vec<RelationReport> = config
        .relations
        .iter()
        .zip(&parsed)
        .map(|(source, relation)| {
            let per_seed = seeds
                .iter()
                .zip(&models)
                .map(|(&seed, model)| {
                    Ok(SeedVerification {
                        seed,
                        result: round_verification(&verify_relation(model, relation, &options)?),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let solved = per_seed.iter().filter(|s| s.result.solved).count();
            Ok(RelationReport {
                source: source.clone(),
                normalized: relation.unparse(),
                solved_fraction: round_sig9(solved as f64 / seeds.len() as f64),
                per_seed,
            })
        })
        .collect::<Result<_>>()?;

    let first = &models[0];
    let window = config.training.window;

    let partition = if config.analyses.partition {
        Some(context_partition(&corpus, window)?)
    } else {
        None
    };

    let overlap = if config.analyses.overlap {
        Some(LabeledMatrix {
            words: corpus.vocabulary.tokens().to_vec(),
            values: round_matrix(&context_overlap(&corpus, window)?),
        })
    } else {
        None
    };

    let angles = if config.analyses.angles {
        let words = config
            .angle_words
            .clone()
            .unwrap_or_else(|| corpus.vocabulary.tokens().to_vec());
        Some(LabeledMatrix {
            values: round_matrix(&pairwise_angles(first, &words)?),
            words,
        })
    } else {
        None
    };

    let neighbors = if config.analyses.neighbors {
        Some(
            corpus
                .vocabulary
                .tokens()
                .iter()
                .map(|word| {
                    let query = first.vector(word)?.to_vec();
                    let ranking =
                        nearest_neighbors(first, &query, Metric::Euclidean, &[word.as_str()])?;
                    Ok(WordNeighbors {
                        word: word.clone(),
                        ranking: round_neighbors(&ranking),
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };

    Ok(ExperimentReport {
        config: config.clone(),
        vocabulary,
        seeds,
        embeddings,
        relations,
        partition,
        overlap,
        angles,
        neighbors,
        duration: start.elapsed(),
    })
}

/// The preset batches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Royalty analogy at corpus sizes 1k / 10k / 100k, balanced weights.
    Fig2,
    /// Capital-of sum at corpus sizes 1k / 10k / 100k.
    Fig3,
    /// Royalty analogy at 10k sentences with P(sentence I) in {0.002, 0.005, 0.01}.
    Fig4,
    /// One repeated sentence at windows 1 / 2 / 3 with the discrete analyses.
    Sec2b,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Preset> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "sec2b" => Ok(Preset::Sec2b),
            other => Err(Error::InvalidConfig {
                field: "preset".into(),
                message: format!("unknown preset {other:?}; expected fig2, fig3, fig4 or sec2b"),
            }),
        }
    }
}

pub const SENTENCE_KING: &str = "A king is a man.";
pub const SENTENCE_QUEEN: &str = "A queen is a woman.";
pub const SENTENCE_CAPITAL_OF: &str = "Berlin is the capital of Germany.";
pub const SENTENCE_HAS_CAPITAL: &str = "Germany has a capital.";
pub const SENTENCE_CAPITAL: &str = "Berlin is the capital.";

pub const ROYALTY_RELATION: &str = "king - man ~= queen - woman";
pub const CAPITAL_RELATION: &str = "germany + capital ~= berlin";

const PRESET_SIZES: [usize; 3] = [1_000, 10_000, 100_000];
const IMBALANCE_PROBS: [f64; 3] = [0.002, 0.005, 0.01];

fn entry(text: &str, weight: f64) -> SentenceEntry {
    SentenceEntry {
        text: text.to_string(),
        weight,
    }
}

/// Royalty mixture: sentence I with probability `p_king`, sentence II with
/// the rest.
pub fn royalty_config(name: &str, num_sentences: usize, p_king: f64) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        sentences: vec![
            entry(SENTENCE_KING, p_king),
            entry(SENTENCE_QUEEN, 1.0 - p_king),
        ],
        num_sentences,
        corpus_seed: DEFAULT_CORPUS_SEED,
        training: TrainingConfig::default(),
        seeds: Some(DEFAULT_SEEDS.to_vec()),
        relations: vec![ROYALTY_RELATION.to_string()],
        analyses: AnalysisFlags::default(),
        angle_words: None,
    }
}

/// Uniform mixture of the three capital sentences.
pub fn capital_config(name: &str, num_sentences: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        sentences: vec![
            entry(SENTENCE_CAPITAL_OF, 1.0),
            entry(SENTENCE_HAS_CAPITAL, 1.0),
            entry(SENTENCE_CAPITAL, 1.0),
        ],
        num_sentences,
        corpus_seed: DEFAULT_CORPUS_SEED,
        training: TrainingConfig::default(),
        seeds: Some(DEFAULT_SEEDS.to_vec()),
        relations: vec![CAPITAL_RELATION.to_string()],
        analyses: AnalysisFlags {
            neighbors: true,
            ..AnalysisFlags::default()
        },
        angle_words: None,
    }
}

/// 10,000 copies of the capital-of sentence, analyzed at the given window.
pub fn single_sentence_config(window: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: format!("single-sentence-n{window}"),
        sentences: vec![entry(SENTENCE_CAPITAL_OF, 1.0)],
        num_sentences: 10_000,
        corpus_seed: DEFAULT_CORPUS_SEED,
        training: TrainingConfig {
            window,
            ..TrainingConfig::default()
        },
        seeds: Some(DEFAULT_SEEDS.to_vec()),
        relations: vec![],
        analyses: AnalysisFlags {
            partition: true,
            overlap: true,
            angles: true,
            neighbors: true,
        },
        angle_words: Some(vec!["berlin".into(), "is".into(), "the".into()]),
    }
}

/// The experiment list for a preset, in emission order.
pub fn preset_configs(preset: Preset) -> Vec<ExperimentConfig> {
    match preset {
        Preset::Fig2 => PRESET_SIZES
            .iter()
            .map(|&n| royalty_config(&format!("royalty-{n}"), n, 0.5))
            .collect(),
        Preset::Fig3 => PRESET_SIZES
            .iter()
            .map(|&n| capital_config(&format!("capital-{n}"), n))
            .collect(),
        Preset::Fig4 => IMBALANCE_PROBS
            .iter()
            .map(|&p| royalty_config(&format!("royalty-p{p}"), 10_000, p))
            .collect(),
        Preset::Sec2b => (1..=3).map(single_sentence_config).collect(),
    }
}

/// Run every experiment of a preset.
pub fn replicate_figure(preset: Preset) -> Result<Vec<ExperimentReport>> {
    preset_configs(preset).iter().map(run_experiment).collect()
}
