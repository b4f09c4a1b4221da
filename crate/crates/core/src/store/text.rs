use std::collections::BTreeMap;

/// Splits text into index terms: lowercase, split on any non-alphanumeric
/// codepoint, drop tokens shorter than 2 characters. No stemming, no stopword
/// lists, so behavior is language-independent.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_owned)
        .collect()
}

/// Raw in-document term counts.
pub fn term_counts(text: &str) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for token in tokenize(text) {
        *counts.entry(token).or_insert(0) += 1;
    }
    counts
}

/// Smoothed inverse document frequency: ln((1 + N) / (1 + df)) + 1.
///
/// Never negative and defined for unseen terms (df = 0).
pub fn idf(n_docs: u64, df: u64) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// A sparse TF-IDF vector with its Euclidean norm computed once on build.
///
/// Weights are kept in term order so norms and dot products accumulate in a
/// fixed order and repeated runs produce bit-identical values.
#[derive(Debug, Clone, PartialEq)]
pub struct TermVector {
    weights: BTreeMap<String, f64>,
    norm: f64,
}

impl TermVector {
    pub fn new(weights: BTreeMap<String, f64>) -> Self {
        debug_assert!(weights.values().all(|w| *w >= 0.0));
        let norm = weights.values().map(|w| w * w).sum::<f64>().sqrt();
        TermVector { weights, norm }
    }

    pub fn empty() -> Self {
        TermVector {
            weights: BTreeMap::new(),
            norm: 0.0,
        }
    }

    /// tf-idf vector for raw term counts against corpus document frequencies.
    ///
    /// `df` must yield the number of corpus documents containing the term and
    /// `n_docs` the corpus size (empty documents included).
    pub fn from_counts<'a>(
        counts: &'a BTreeMap<String, u64>,
        n_docs: u64,
        df: impl Fn(&'a str) -> u64,
    ) -> Self {
        let weights = counts
            .iter()
            .map(|(term, tf)| (term.clone(), *tf as f64 * idf(n_docs, df(term))))
            .collect();
        TermVector::new(weights)
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    pub fn dot(&self, other: &TermVector) -> f64 {
        // Iterate the smaller map; lookups in the larger.
        let (small, large) = if self.weights.len() <= other.weights.len() {
            (&self.weights, &other.weights)
        } else {
            (&other.weights, &self.weights)
        };
        small
            .iter()
            .filter_map(|(term, w)| large.get(term).map(|v| w * v))
            .sum()
    }

    /// Cosine similarity in [0, 1]; 0 if either vector is empty.
    pub fn cosine(&self, other: &TermVector) -> f64 {
        if self.norm == 0.0 || other.norm == 0.0 {
            return 0.0;
        }
        let raw = self.dot(other) / (self.norm * other.norm);
        raw.clamp(0.0, 1.0)
    }

    /// Componentwise mean of vectors; the CBF user-profile centroid.
    pub fn centroid<'a>(vectors: impl Iterator<Item = &'a TermVector>) -> TermVector {
        let mut sums: BTreeMap<String, f64> = BTreeMap::new();
        let mut count = 0usize;
        for v in vectors {
            count += 1;
            for (term, w) in &v.weights {
                *sums.entry(term.clone()).or_insert(0.0) += w;
            }
        }
        if count == 0 {
            return TermVector::empty();
        }
        let inv = 1.0 / count as f64;
        TermVector::new(sums.into_iter().map(|(t, w)| (t, w * inv)).collect())
    }
}
