//! Corpus-level BLEU and BLEU*.
//!
//! Scores are fractions in `[0, 1]`. Zero higher-order precisions are
//! smoothed exponentially: the k-th zero-match order (k = 1, 2, ...) gets
//! precision `1 / (2^k * total_n)`, with `total_n` clamped to 1 when the
//! hypotheses contain no n-grams of that order. A zero unigram precision is
//! never smoothed, so a corpus without any unigram match scores 0.

use std::collections::HashMap;
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};

use super::tokenize::TokenSeq;
use crate::error::{Error, Result};

pub const DEFAULT_MAX_N: usize = 4;

/// Sufficient statistics for corpus BLEU. Corpus scores are computed by
/// summing per-segment statistics, which is what lets hybrid systems be
/// rescored without re-tokenizing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BleuStats {
    pub matches: Vec<u64>,
    pub totals: Vec<u64>,
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub fn zero(max_n: usize) -> Self {
        BleuStats {
            matches: vec![0; max_n],
            totals: vec![0; max_n],
            hyp_len: 0,
            ref_len: 0,
        }
    }

    pub fn max_n(&self) -> usize {
        self.matches.len()
    }

    pub fn for_pair(hyp: &TokenSeq, reference: &TokenSeq, max_n: usize) -> Self {
        let mut stats = BleuStats::zero(max_n);
        stats.hyp_len = hyp.len() as u64;
        stats.ref_len = reference.len() as u64;
        for n in 1..=max_n {
            let hyp_counts = ngram_counts(&hyp.tokens, n);
            let ref_counts = ngram_counts(&reference.tokens, n);
            stats.totals[n - 1] = hyp_counts.values().sum::<usize>() as u64;
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)) as u64)
                .sum();
        }
        stats
    }

    pub fn score(&self) -> Result<BleuScore> {
        if self.hyp_len == 0 {
            return Err(Error::ZeroLengthHypothesisCorpus);
        }
        let brevity_penalty = if self.hyp_len < self.ref_len {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        } else {
            1.0
        };
        let mut precisions = Vec::with_capacity(self.max_n());
        let mut smooth = 1.0;
        for (i, (&m, &t)) in self.matches.iter().zip(&self.totals).enumerate() {
            let p = if m > 0 {
                m as f64 / t as f64
            } else if i == 0 {
                0.0
            } else {
                smooth *= 2.0;
                1.0 / (smooth * t.max(1) as f64)
            };
            precisions.push(p);
        }
        let geo = if precisions.contains(&0.0) {
            0.0
        } else {
            (precisions.iter().map(|p| p.ln()).sum::<f64>() / precisions.len() as f64).exp()
        };
        let bleu = brevity_penalty * geo;
        Ok(BleuScore {
            precisions,
            brevity_penalty,
            bleu,
            bleu_star: bleu_star_of(bleu, brevity_penalty),
        })
    }
}

impl AddAssign<&BleuStats> for BleuStats {
    fn add_assign(&mut self, rhs: &BleuStats) {
        for (a, b) in self.matches.iter_mut().zip(&rhs.matches) {
            *a += b;
        }
        for (a, b) in self.totals.iter_mut().zip(&rhs.totals) {
            *a += b;
        }
        self.hyp_len += rhs.hyp_len;
        self.ref_len += rhs.ref_len;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuScore {
    pub precisions: Vec<f64>,
    pub brevity_penalty: f64,
    pub bleu: f64,
    pub bleu_star: f64,
}

fn bleu_star_of(bleu: f64, bp: f64) -> f64 {
    if bleu == 0.0 {
        0.0
    } else {
        bleu / bp
    }
}

/// BLEU with the brevity penalty divided back out.
pub fn bleu_star(score: &BleuScore) -> f64 {
    bleu_star_of(score.bleu, score.brevity_penalty)
}

pub(crate) fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Corpus BLEU over aligned hypothesis/reference lists (single reference).
pub fn corpus_bleu(hypotheses: &[TokenSeq], references: &[TokenSeq], max_n: usize) -> Result<BleuScore> {
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch {
            left: hypotheses.len(),
            right: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut stats = BleuStats::zero(max_n);
    for (h, r) in hypotheses.iter().zip(references) {
        stats += &BleuStats::for_pair(h, r, max_n);
    }
    stats.score()
}
