use serde::{Deserialize, Serialize};

use super::bleu::ngram_counts;
use super::tokenize::TokenSeq;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl RougeScore {
    /// Builds a score from an overlap count; a zero denominator yields 0.
    pub fn from_counts(overlap: usize, hyp_count: usize, ref_count: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(overlap, hyp_count);
        let recall = ratio(overlap, ref_count);
        RougeScore {
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
        }
    }
}

fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// ROUGE-N with clipped n-gram overlap.
pub fn rouge_n(hyp: &TokenSeq, reference: &TokenSeq, n: usize) -> RougeScore {
    assert!(n >= 1, "rouge_n requires n >= 1");
    let hyp_counts = ngram_counts(&hyp.tokens, n);
    let ref_counts = ngram_counts(&reference.tokens, n);
    let overlap = hyp_counts
        .iter()
        .map(|(g, &c)| c.min(ref_counts.get(g).copied().unwrap_or(0)))
        .sum();
    RougeScore::from_counts(
        overlap,
        hyp.len().saturating_sub(n - 1),
        reference.len().saturating_sub(n - 1),
    )
}

/// Length of the longest common subsequence, O(|a|·|b|) time and O(|b|) space.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// ROUGE-L from the longest common subsequence.
pub fn rouge_l(hyp: &TokenSeq, reference: &TokenSeq) -> RougeScore {
    let l = lcs_len(&hyp.tokens, &reference.tokens);
    RougeScore::from_counts(l, hyp.len(), reference.len())
}
