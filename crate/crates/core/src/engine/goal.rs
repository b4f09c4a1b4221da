//! Learning-goal re-ranking: a feature-boosting pass over a base list.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What the learner wants more of.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "term")]
pub enum GoalSpec {
    /// Boost resources with higher text complexity.
    Harder,
    /// Boost resources with lower text complexity.
    Easier,
    /// Boost resources matching a topic term.
    Topic(String),
}

impl FromStr for GoalSpec {
    type Err = Error;

    /// Accepts `harder`, `easier` or `topic:<term>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_lowercase().as_str() {
            "harder" => return Ok(GoalSpec::Harder),
            "easier" => return Ok(GoalSpec::Easier),
            _ => {}
        }
        if let Some(term) = s.strip_prefix("topic:") {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::validation("topic goal needs a non-empty term"));
            }
            return Ok(GoalSpec::Topic(term.to_owned()));
        }
        Err(Error::validation(format!(
            "unknown goal `{s}` (expected harder, easier or topic:<term>)"
        )))
    }
}

/// Min-max normalizes `scores` in place. All-equal inputs map to 1.0 so a
/// degenerate base list keeps its entries comparable.
pub(crate) fn minmax_normalize(scores: &mut [f64]) {
    let Some((&min, &max)) = scores
        .iter()
        .fold(None, |acc: Option<(&f64, &f64)>, s| match acc {
            None => Some((s, s)),
            Some((lo, hi)) => Some((if s < lo { s } else { lo }, if s > hi { s } else { hi })),
        })
    else {
        return;
    };
    let span = max - min;
    for s in scores.iter_mut() {
        *s = if span > 0.0 { (*s - min) / span } else { 1.0 };
    }
}

/// Blends min-max-normalized base scores with goal features:
/// `(1 - lambda) * minmax(base) + lambda * feature`.
///
/// Input and output share order and length; ranking happens at the caller.
pub(crate) fn blend_scores(base_scores: &[f64], features: &[f64], lambda: f64) -> Vec<f64> {
    debug_assert_eq!(base_scores.len(), features.len());
    let mut normalized = base_scores.to_vec();
    minmax_normalize(&mut normalized);
    normalized
        .iter()
        .zip(features)
        .map(|(b, f)| (1.0 - lambda) * b + lambda * f)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn goal_parsing() {
        assert_eq!("harder".parse::<GoalSpec>().unwrap(), GoalSpec::Harder);
        assert_eq!(" EASIER ".parse::<GoalSpec>().unwrap(), GoalSpec::Easier);
        assert_eq!(
            "topic:algebra".parse::<GoalSpec>().unwrap(),
            GoalSpec::Topic("algebra".to_owned())
        );
        assert!("topic:".parse::<GoalSpec>().is_err());
        assert!("fastest".parse::<GoalSpec>().is_err());
    }

    #[test]
    fn lambda_zero_is_monotone_in_base_score() {
        let base = [4.0, 3.0, 2.0, 1.0];
        let blended = blend_scores(&base, &[0.9, 0.1, 0.8, 0.2], 0.0);
        for w in blended.windows(2) {
            assert!(w[0] > w[1]);
        }
    }

    #[test]
    fn lambda_one_is_exactly_the_feature() {
        let blended = blend_scores(&[4.0, 3.0, 2.0], &[0.2, 0.9, 0.4], 1.0);
        assert_eq!(blended, vec![0.2, 0.9, 0.4]);
    }

    #[test]
    fn half_lambda_blend_on_four_candidates() {
        // minmax([4,3,2,1]) = [1, 2/3, 1/3, 0]; features [0.1, 0.2, 0.9, 1.0].
        // Expected: 0.5*norm + 0.5*feature.
        let blended = blend_scores(&[4.0, 3.0, 2.0, 1.0], &[0.1, 0.2, 0.9, 1.0], 0.5);
        let expected = [0.55, 0.5 * (2.0 / 3.0) + 0.1, 0.5 * (1.0 / 3.0) + 0.45, 0.5];
        for (b, e) in blended.iter().zip(expected) {
            assert!((b - e).abs() < 1e-9, "{b} vs {e}");
        }
        // Resulting order: candidate 2 (0.6167), 0 (0.55), 3 (0.5), 1 (0.4333).
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| blended[b].partial_cmp(&blended[a]).unwrap());
        assert_eq!(order, vec![2, 0, 3, 1]);
    }

    #[test]
    fn all_equal_base_scores_normalize_to_one() {
        let mut scores = [2.5, 2.5, 2.5];
        minmax_normalize(&mut scores);
        assert_eq!(scores, [1.0, 1.0, 1.0]);
    }
}
