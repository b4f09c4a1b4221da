//! Binary-relevance ranking metrics.
//!
//! All functions score one recommendation list against one relevant set and
//! return values in [0, 1]. `k` counts list positions (1-based ranks 1..=k).

use std::collections::BTreeSet;

use crate::error::{Error, Result};

fn hits_at_k(recommended: &[String], relevant: &BTreeSet<String>, k: usize) -> usize {
    recommended
        .iter()
        .take(k)
        .filter(|r| relevant.contains(*r))
        .count()
}

/// |hits@k| / |relevant|.
pub fn recall_at_k(recommended: &[String], relevant: &BTreeSet<String>, k: usize) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    hits_at_k(recommended, relevant, k) as f64 / relevant.len() as f64
}

/// |hits@k| / k. The denominator stays k even for shorter lists.
pub fn precision_at_k(recommended: &[String], relevant: &BTreeSet<String>, k: usize) -> f64 {
    debug_assert!(k >= 1);
    hits_at_k(recommended, relevant, k) as f64 / k as f64
}

/// Harmonic mean of precision@k and recall@k; 0 when both are 0.
pub fn f1_at_k(recommended: &[String], relevant: &BTreeSet<String>, k: usize) -> f64 {
    let p = precision_at_k(recommended, relevant, k);
    let r = recall_at_k(recommended, relevant, k);
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Reciprocal rank of the first hit within the top k, 0 if none.
pub fn mrr_at_k(recommended: &[String], relevant: &BTreeSet<String>, k: usize) -> f64 {
    recommended
        .iter()
        .take(k)
        .position(|r| relevant.contains(r))
        .map(|pos| 1.0 / (pos as f64 + 1.0))
        .unwrap_or(0.0)
}

/// Average precision at k: mean of precision@i over hit ranks i <= k,
/// normalized by min(|relevant|, k).
pub fn map_at_k(recommended: &[String], relevant: &BTreeSet<String>, k: usize) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, r) in recommended.iter().take(k).enumerate() {
        if relevant.contains(r) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / relevant.len().min(k) as f64
}

/// DCG/IDCG with binary gains: DCG = sum over hit ranks i of 1/log2(i + 1),
/// IDCG places all relevant items at the top ranks.
pub fn ndcg_at_k(recommended: &[String], relevant: &BTreeSet<String>, k: usize) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let dcg: f64 = recommended
        .iter()
        .take(k)
        .enumerate()
        .filter(|(_, r)| relevant.contains(*r))
        .map(|(i, _)| 1.0 / ((i + 2) as f64).log2())
        .sum();
    let idcg: f64 = (0..relevant.len().min(k))
        .map(|i| 1.0 / ((i + 2) as f64).log2())
        .sum();
    if idcg == 0.0 {
        0.0
    } else {
        dcg / idcg
    }
}

/// Fraction of users with a non-empty recommendation list.
pub fn coverage(nonempty_flags: &[bool]) -> Result<f64> {
    if nonempty_flags.is_empty() {
        return Err(Error::validation("coverage needs at least one test user"));
    }
    let covered = nonempty_flags.iter().filter(|c| **c).count();
    Ok(covered as f64 / nonempty_flags.len() as f64)
}
