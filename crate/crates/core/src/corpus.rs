//! Synthetic corpora sampled from a weighted set of base sentences.
//!
//! A corpus is a flat token-id stream: sampled sentences are concatenated with
//! no separator tokens, so context windows deliberately cross sentence
//! boundaries. Vocabulary ids come from the base-sentence list in
//! first-occurrence order, which makes them independent of the sampling seed.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Lowercase a raw sentence and split it into cleaned word tokens.
///
/// Splits on whitespace, strips leading/trailing non-alphanumeric characters
/// from each piece (so "man." becomes "man"), lowercases, and drops pieces
/// that end up empty. "A king is a man." -> [a, king, is, a, man].
pub fn tokenize(raw: &str) -> Vec<String> {
    raw.split_whitespace()
        .map(|piece| {
            piece
                .trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

/// One sentence of the generating distribution, kept with its token form.
///
/// Invariants: at least one token; every token is lowercase alphanumeric
/// (interior punctuation is rejected rather than silently kept).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseSentence {
    raw: String,
    tokens: Vec<String>,
}

impl BaseSentence {
    pub fn new(raw: &str) -> Result<Self> {
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            return Err(Error::EmptySentence { raw: raw.to_string() });
        }
        for token in &tokens {
            if !token.chars().all(|c| c.is_alphanumeric()) {
                return Err(Error::NonAlphanumericToken {
                    raw: raw.to_string(),
                    token: token.clone(),
                });
            }
        }
        Ok(BaseSentence {
            raw: raw.to_string(),
            tokens,
        })
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// Normalized categorical distribution over base sentences.
///
/// Weights are normalized to sum to 1 on construction, so (2, 2) and
/// (0.5, 0.5) denote the same distribution. Zero-weight entries are kept (they
/// still contribute their tokens to the vocabulary) but are never drawn.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceDistribution {
    sentences: Vec<BaseSentence>,
    weights: Vec<f64>,
}

impl SentenceDistribution {
    pub fn new(entries: Vec<(BaseSentence, f64)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        for (index, (_, w)) in entries.iter().enumerate() {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidWeight { index, value: *w });
            }
        }
        let total: f64 = entries.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            return Err(Error::NoPositiveWeight);
        }
        let (sentences, weights) = entries
            .into_iter()
            .map(|(s, w)| (s, w / total))
            .unzip();
        Ok(SentenceDistribution { sentences, weights })
    }

    /// Convenience constructor from raw strings.
    pub fn from_raw(entries: &[(&str, f64)]) -> Result<Self> {
        let parsed = entries
            .iter()
            .map(|(raw, w)| Ok((BaseSentence::new(raw)?, *w)))
            .collect::<Result<Vec<_>>>()?;
        SentenceDistribution::new(parsed)
    }

    pub fn sentences(&self) -> &[BaseSentence] {
        &self.sentences
    }

    /// Normalized weights, summing to 1.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Cumulative weights for inverse-CDF sampling. The final entry is forced
    /// to exactly 1.0 so a uniform draw in [0, 1) always lands in a bucket.
    fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut cum: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        if let Some(last) = cum.last_mut() {
            *last = 1.0;
        }
        cum
    }
}

/// Everything needed to sample a corpus deterministically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSpec {
    pub distribution: SentenceDistribution,
    pub num_sentences: usize,
    pub seed: u64,
}

impl CorpusSpec {
    pub fn new(distribution: SentenceDistribution, num_sentences: usize, seed: u64) -> Result<Self> {
        if num_sentences == 0 {
            return Err(Error::InvalidConfig {
                field: "num_sentences".into(),
                message: "must be at least 1".into(),
            });
        }
        Ok(CorpusSpec {
            distribution,
            num_sentences,
            seed,
        })
    }
}

/// Bijective token <-> id map with occurrence counts.
///
/// Ids are assigned in first-occurrence order over the concatenated
/// base-sentence token lists, not over the sampled corpus, so they do not
/// depend on the sampling seed. Counts are zero until a corpus is sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    counts: Vec<u64>,
}

impl Vocabulary {
    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn count(&self, id: u32) -> u64 {
        self.counts[id as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Build the vocabulary for a list of base sentences; counts start at zero.
pub fn build_vocabulary(sentences: &[BaseSentence]) -> Vocabulary {
    let mut tokens = Vec::new();
    let mut ids = HashMap::new();
    for sentence in sentences {
        for token in sentence.tokens() {
            if !ids.contains_key(token) {
                ids.insert(token.clone(), tokens.len() as u32);
                tokens.push(token.clone());
            }
        }
    }
    let counts = vec![0; tokens.len()];
    Vocabulary { tokens, ids, counts }
}

/// A sampled corpus: flat id stream plus its vocabulary and generating spec.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub tokens: Vec<u32>,
    pub vocabulary: Vocabulary,
    pub spec: CorpusSpec,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Draw `spec.num_sentences` sentences i.i.d. from the distribution and
/// concatenate their token ids. Same spec -> identical corpus, always.
pub fn sample_corpus(spec: &CorpusSpec) -> Corpus {
    let sentences = spec.distribution.sentences();
    let mut vocabulary = build_vocabulary(sentences);

    // Pre-resolve each sentence to ids so the sampling loop is a lookup.
    let sentence_ids: Vec<Vec<u32>> = sentences
        .iter()
        .map(|s| {
            s.tokens()
                .iter()
                .map(|t| vocabulary.id(t).expect("token registered during build"))
                .collect()
        })
        .collect();

    let cumulative = spec.distribution.cumulative();
    let mut rng = SplitMix64::new(spec.seed);
    let mut tokens = Vec::new();
    for _ in 0..spec.num_sentences {
        let u = rng.next_f64();
        // Inverse CDF: first bucket whose cumulative weight exceeds u.
        // Zero-weight entries have empty intervals and are never selected.
        let pick = cumulative
            .iter()
            .position(|&c| u < c)
            .expect("final cumulative weight is 1.0");
        for &id in &sentence_ids[pick] {
            vocabulary.counts[id as usize] += 1;
            tokens.push(id);
        }
    }

    Corpus {
        tokens,
        vocabulary,
        spec: spec.clone(),
    }
}
