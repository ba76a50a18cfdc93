//! Interrogating trained models and sampled corpora.
//!
//! Two families live here. The geometric side works on a model's input
//! vectors: evaluate signed word sums, rank nearest neighbors, verify parsed
//! relations, and measure pairwise angles. The discrete side works on the
//! corpus alone: each word's *context set* (the set of words ever seen within
//! the window around its occurrences) induces a partition of the vocabulary
//! and a Jaccard-overlap matrix — corpus-level ground truth for what the
//! embedding geometry should reflect.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::relation::{Relation, Rhs, Sign};
use crate::skipgram::EmbeddingModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Euclidean,
    Cosine,
}

/// One entry of a nearest-neighbor ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub word: String,
    pub distance: f64,
}

/// Sum the signed input vectors of the given terms.
pub fn evaluate_expression(model: &EmbeddingModel, terms: &[(Sign, String)]) -> Result<Vec<f64>> {
    let mut sum = vec![0.0; model.dim()];
    for (sign, word) in terms {
        let v = model.vector(word)?;
        let f = sign.factor();
        for (acc, x) in sum.iter_mut().zip(v) {
            *acc += f * x;
        }
    }
    Ok(sum)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const NORM_EPS: f64 = 1e-12;

/// Cosine similarity; `None` when either vector has (numerically) zero norm.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Option<f64> {
    let na = norm(a);
    let nb = norm(b);
    if na < NORM_EPS || nb < NORM_EPS {
        return None;
    }
    Some((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Rank the whole vocabulary (minus `excluded`) by distance from `query`,
/// ascending, ties broken lexicographically. Cosine uses 1 - similarity and
/// rejects zero-norm vectors by name.
pub fn nearest_neighbors(
    model: &EmbeddingModel,
    query: &[f64],
    metric: Metric,
    excluded: &[&str],
) -> Result<Vec<Neighbor>> {
    if query.len() != model.dim() {
        return Err(Error::InvalidConfig {
            field: "query".into(),
            message: format!(
                "query has {} components but the model dimension is {}",
                query.len(),
                model.dim()
            ),
        });
    }
    if metric == Metric::Cosine && norm(query) < NORM_EPS {
        return Err(Error::ZeroNorm { name: "query".into() });
    }
    let mut ranking = Vec::new();
    for (id, v) in model.input.iter().enumerate() {
        let word = model.vocabulary.token(id as u32);
        if excluded.contains(&word) {
            continue;
        }
        let distance = match metric {
            Metric::Euclidean => euclidean(query, v),
            Metric::Cosine => {
                let sim = cosine_similarity(query, v)
                    .ok_or_else(|| Error::ZeroNorm { name: word.to_string() })?;
                1.0 - sim
            }
        };
        ranking.push(Neighbor {
            word: word.to_string(),
            distance,
        });
    }
    ranking.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .expect("distances are finite")
            .then_with(|| a.word.cmp(&b.word))
    });
    Ok(ranking)
}

/// Tunables for [`verify_relation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// A zero-target relation counts as solved when the residual norm is at
    /// most this fraction of the mean input-vector norm.
    pub zero_residual_ratio: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            zero_residual_ratio: 0.2,
        }
    }
}

/// Outcome of checking one relation against one model.
///
/// `residual_cosine` is `None` when undefined (zero right side, or a
/// degenerate zero-length sum). `rhs_rank` is the right word's 1-based rank
/// among non-left words; `neighbor_ranking` additionally drops the right
/// word itself, so it lists only the bystanders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub residual_euclidean: f64,
    pub residual_cosine: Option<f64>,
    pub rhs_rank: Option<usize>,
    pub neighbor_ranking: Vec<Neighbor>,
    pub solved: bool,
}

/// Check a relation: for a word target, is it the rank-1 euclidean neighbor
/// of the left sum (left words excluded)? For a zero target, is the residual
/// norm small relative to the model's scale?
pub fn verify_relation(
    model: &EmbeddingModel,
    relation: &Relation,
    options: &VerifyOptions,
) -> Result<VerificationResult> {
    let sum = evaluate_expression(model, relation.lhs())?;
    let lhs_words: Vec<&str> = relation.lhs().iter().map(|(_, w)| w.as_str()).collect();
    let ranking = nearest_neighbors(model, &sum, Metric::Euclidean, &lhs_words)?;

    match relation.rhs() {
        Rhs::Word(target) => {
            let target_vec = model.vector(target)?;
            let rank = ranking
                .iter()
                .position(|n| &n.word == target)
                .map(|p| p + 1)
                .expect("target is not a left word, so it is in the ranking");
            Ok(VerificationResult {
                residual_euclidean: euclidean(&sum, target_vec),
                residual_cosine: cosine_similarity(&sum, target_vec),
                rhs_rank: Some(rank),
                neighbor_ranking: ranking
                    .into_iter()
                    .filter(|n| &n.word != target)
                    .collect(),
                solved: rank == 1,
            })
        }
        Rhs::Zero => {
            let residual = norm(&sum);
            let threshold = options.zero_residual_ratio * model.mean_input_norm();
            Ok(VerificationResult {
                residual_euclidean: residual,
                residual_cosine: None,
                rhs_rank: None,
                neighbor_ranking: ranking,
                solved: residual <= threshold,
            })
        }
    }
}

/// Pairwise angles in degrees between the input vectors of `words`.
/// Symmetric, zero diagonal, entries in [0, 180]; zero-norm vectors are
/// rejected by name.
pub fn pairwise_angles(model: &EmbeddingModel, words: &[String]) -> Result<Vec<Vec<f64>>> {
    let vectors: Vec<&[f64]> = words
        .iter()
        .map(|w| {
            let v = model.vector(w)?;
            if norm(v) < NORM_EPS {
                return Err(Error::ZeroNorm { name: w.clone() });
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let n = words.len();
    let mut matrix = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let cos = cosine_similarity(vectors[i], vectors[j]).expect("norms checked above");
            let angle = cos.acos().to_degrees();
            matrix[i][j] = angle;
            matrix[j][i] = angle;
        }
    }
    Ok(matrix)
}

/// A word together with its context set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContextProfile {
    pub word: String,
    /// Sorted union of all words observed within the window around any
    /// occurrence, the occurrence position itself excluded.
    pub context: Vec<String>,
}

/// Context set per vocabulary id: the union over all occurrences of the
/// words within `window` positions, truncated at the corpus ends. A word is
/// never its own context *position*, but another occurrence of the same word
/// inside the window does count.
pub fn context_sets(corpus: &Corpus, window: usize) -> Result<Vec<BTreeSet<u32>>> {
    if window == 0 {
        return Err(Error::InvalidConfig {
            field: "window".into(),
            message: "must be at least 1".into(),
        });
    }
    let mut sets = vec![BTreeSet::new(); corpus.vocabulary.len()];
    let tokens = &corpus.tokens;
    for (t, &center) in tokens.iter().enumerate() {
        let lo = t.saturating_sub(window);
        let hi = (t + window).min(tokens.len().saturating_sub(1));
        for j in lo..=hi {
            if j != t {
                sets[center as usize].insert(tokens[j]);
            }
        }
    }
    Ok(sets)
}

/// Context profiles for every vocabulary word, in id order.
pub fn context_profiles(corpus: &Corpus, window: usize) -> Result<Vec<ContextProfile>> {
    let sets = context_sets(corpus, window)?;
    Ok(sets
        .iter()
        .enumerate()
        .map(|(id, set)| {
            let mut context: Vec<String> = set
                .iter()
                .map(|&c| corpus.vocabulary.token(c).to_string())
                .collect();
            context.sort();
            ContextProfile {
                word: corpus.vocabulary.token(id as u32).to_string(),
                context,
            }
        })
        .collect())
}

/// Partition the vocabulary into groups with *identical* context sets.
/// Groups are ordered by their smallest member id; members are sorted
/// lexicographically.
pub fn context_partition(corpus: &Corpus, window: usize) -> Result<Vec<Vec<String>>> {
    let sets = context_sets(corpus, window)?;
    let mut groups: Vec<(u32, &BTreeSet<u32>, Vec<u32>)> = Vec::new();
    for (id, set) in sets.iter().enumerate() {
        let id = id as u32;
        match groups.iter_mut().find(|(_, s, _)| *s == set) {
            Some((_, _, members)) => members.push(id),
            None => groups.push((id, set, vec![id])),
        }
    }
    // First-encountered id is the smallest in its group, and groups were
    // created in id order, so they are already ordered correctly.
    Ok(groups
        .into_iter()
        .map(|(_, _, members)| {
            let mut words: Vec<String> = members
                .iter()
                .map(|&id| corpus.vocabulary.token(id).to_string())
                .collect();
            words.sort();
            words
        })
        .collect())
}

/// Jaccard overlap |A ∩ B| / |A ∪ B| between the context sets of every pair
/// of vocabulary words. Symmetric with unit diagonal. Errors if any word has
/// an empty context set (only possible for a one-token corpus).
pub fn context_overlap(corpus: &Corpus, window: usize) -> Result<Vec<Vec<f64>>> {
    let sets = context_sets(corpus, window)?;
    for (id, set) in sets.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::EmptyContext {
                word: corpus.vocabulary.token(id as u32).to_string(),
            });
        }
    }
    let n = sets.len();
    let mut matrix = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let intersection = sets[i].intersection(&sets[j]).count() as f64;
            let union = sets[i].union(&sets[j]).count() as f64;
            let jaccard = intersection / union;
            matrix[i][j] = jaccard;
            matrix[j][i] = jaccard;
        }
    }
    Ok(matrix)
}
