//! Similarity of a mutant to the original requirement, as the best local
//! alignment score of their slot-value sequences.

use serde::{Deserialize, Serialize};

use crate::hls::slot::ValueKey;
use crate::hls::Assignment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessParams {
    pub match_score: f64,
    pub mismatch: f64,
    pub gap: f64,
}

impl Default for FitnessParams {
    fn default() -> Self {
        FitnessParams { match_score: 3.0, mismatch: -3.0, gap: -2.0 }
    }
}

/// Smith-Waterman scoring matrix. Row `i` follows `a`, column `j` follows
/// `b`; row and column 0 are zero.
pub fn score_matrix(a: &[ValueKey], b: &[ValueKey], p: &FitnessParams) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let s = if a[i - 1] == b[j - 1] { p.match_score } else { p.mismatch };
            m[i][j] = (m[i - 1][j - 1] + s).max(m[i - 1][j] + p.gap).max(m[i][j - 1] + p.gap).max(0.0);
        }
    }
    m
}

/// Highest cell of the scoring matrix.
pub fn alignment_score(a: &[ValueKey], b: &[ValueKey], p: &FitnessParams) -> f64 {
    score_matrix(a, b, p).iter().flatten().copied().fold(0.0, f64::max)
}

pub fn fitness(orig: &Assignment, mutant: &Assignment, p: &FitnessParams) -> f64 {
    alignment_score(&orig.key(), &mutant.key(), p)
}
