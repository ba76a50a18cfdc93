//! Shared fixtures for unit and integration tests.

use crate::corpus::{sample_corpus, Corpus, CorpusSpec, SentenceDistribution};

pub(crate) const SENTENCE_I: &str = "A king is a man.";
pub(crate) const SENTENCE_II: &str = "A queen is a woman.";
pub(crate) const SENTENCE_III: &str = "Berlin is the capital of Germany.";
pub(crate) const SENTENCE_IV: &str = "Germany has a capital.";
pub(crate) const SENTENCE_V: &str = "Berlin is the capital.";

/// Two-sentence mixture: sentence I with probability `p`, sentence II with 1-p.
pub(crate) fn royalty_distribution(p: f64) -> SentenceDistribution {
    SentenceDistribution::from_raw(&[(SENTENCE_I, p), (SENTENCE_II, 1.0 - p)]).unwrap()
}

/// Uniform mixture of the three capital sentences.
pub(crate) fn capital_distribution() -> SentenceDistribution {
    SentenceDistribution::from_raw(&[(SENTENCE_III, 1.0), (SENTENCE_IV, 1.0), (SENTENCE_V, 1.0)])
        .unwrap()
}

pub(crate) fn royalty_corpus(num_sentences: usize, seed: u64) -> Corpus {
    sample_corpus(&CorpusSpec::new(royalty_distribution(0.5), num_sentences, seed).unwrap())
}

pub(crate) fn capital_corpus(num_sentences: usize, seed: u64) -> Corpus {
    sample_corpus(&CorpusSpec::new(capital_distribution(), num_sentences, seed).unwrap())
}

/// `copies` repetitions of sentence III and nothing else.
pub(crate) fn single_sentence_corpus(copies: usize) -> Corpus {
    let d = SentenceDistribution::from_raw(&[(SENTENCE_III, 1.0)]).unwrap();
    sample_corpus(&CorpusSpec::new(d, copies, 1).unwrap())
}
