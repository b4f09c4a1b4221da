//! Leave-recent-out chronological splitting.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::store::Interaction;

/// Outcome of a chronological split.
///
/// Every input user contributes at least one test item (the per-user test
/// share rounds up), so single-interaction users end up with an empty training
/// history. That is intentional: they are the cold-start population that CF
/// coverage loses.
#[derive(Debug, Clone)]
pub struct SplitResult {
    /// Training interactions, one per surviving (user, resource) pair.
    pub train: Vec<Interaction>,
    /// Held-out resources per user.
    pub test: BTreeMap<String, BTreeSet<String>>,
    /// Users with at least one held-out item, in id order.
    pub test_users: Vec<String>,
}

/// Splits per user: the most recent `ceil(test_fraction * m)` of the user's
/// `m` distinct resources go to test, the rest to train. Duplicate
/// (user, resource) pairs collapse to their latest occurrence first, so a pair
/// never lands on both sides.
pub fn chronological_split(
    interactions: &[Interaction],
    test_fraction: f64,
) -> Result<SplitResult> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::validation(format!(
            "test_fraction must be in (0, 1), got {test_fraction}"
        )));
    }

    // Collapse duplicates to the occurrence with the greatest timestamp
    // (later insertion wins ties), remembering insertion order for stable
    // recency sorting.
    type Collapsed = BTreeMap<String, (i64, usize, Interaction)>;
    let mut per_user: BTreeMap<String, Collapsed> = BTreeMap::new();
    for (seq, interaction) in interactions.iter().enumerate() {
        let user = per_user.entry(interaction.user_id.clone()).or_default();
        match user.get(&interaction.resource_id) {
            Some((ts, _, _)) if *ts > interaction.timestamp_ms => {}
            _ => {
                user.insert(
                    interaction.resource_id.clone(),
                    (interaction.timestamp_ms, seq, interaction.clone()),
                );
            }
        }
    }

    let mut train = Vec::new();
    let mut test: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (user_id, items) in per_user {
        let mut ordered: Vec<(i64, usize, Interaction)> = items.into_values().collect();
        ordered.sort_by_key(|(ts, seq, _)| (*ts, *seq));
        let m = ordered.len();
        // Guard against float error pushing exact products over the ceiling
        // (0.2 * 15 must give 3, not 4).
        let n_test = (((test_fraction * m as f64) - 1e-9).ceil() as usize).clamp(1, m);
        let split_at = m - n_test;
        let held_out: BTreeSet<String> = ordered[split_at..]
            .iter()
            .map(|(_, _, i)| i.resource_id.clone())
            .collect();
        test.insert(user_id, held_out);
        train.extend(ordered.into_iter().take(split_at).map(|(_, _, i)| i));
    }

    let test_users = test.keys().cloned().collect();
    Ok(SplitResult {
        train,
        test,
        test_users,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn click(u: &str, r: &str, ts: i64) -> Interaction {
        Interaction::click(u, r, ts)
    }

    #[test]
    fn eighty_twenty_split_of_ten() {
        let interactions: Vec<Interaction> =
            (0..10).map(|i| click("u", &format!("r{i}"), i)).collect();
        let split = chronological_split(&interactions, 0.2).unwrap();
        assert_eq!(split.test["u"].len(), 2);
        assert_eq!(split.train.len(), 8);
        assert!(split.test["u"].contains("r8"));
        assert!(split.test["u"].contains("r9"));
    }

    #[test]
    fn single_interaction_user_is_all_test() {
        let split = chronological_split(&[click("u", "r1", 5)], 0.2).unwrap();
        assert_eq!(split.test["u"].len(), 1);
        assert!(split.train.is_empty());
        assert_eq!(split.test_users, vec!["u".to_owned()]);
    }

    #[test]
    fn most_recent_goes_to_test() {
        let interactions = vec![click("u", "a", 1), click("u", "b", 2), click("u", "c", 3)];
        let split = chronological_split(&interactions, 0.2).unwrap();
        assert!(split.test["u"].contains("c"));
        let train_ids: Vec<&str> = split.train.iter().map(|i| i.resource_id.as_str()).collect();
        assert_eq!(train_ids, vec!["a", "b"]);
    }

    #[test]
    fn duplicates_collapse_to_latest_before_split() {
        // u touches r1 early and again last: r1 must be test-only.
        let interactions = vec![
            click("u", "r1", 1),
            click("u", "r2", 2),
            click("u", "r3", 3),
            click("u", "r1", 9),
        ];
        let split = chronological_split(&interactions, 0.34).unwrap();
        // m = 3 distinct, n_test = ceil(1.02) = 2 -> {r1, r3}.
        assert_eq!(split.test["u"].len(), 2);
        assert!(split.test["u"].contains("r1"));
        assert!(split.test["u"].contains("r3"));
        for i in &split.train {
            assert!(!split.test["u"].contains(&i.resource_id));
        }
    }

    #[test]
    fn exact_products_do_not_round_up() {
        let interactions: Vec<Interaction> =
            (0..15).map(|i| click("u", &format!("r{i}"), i)).collect();
        let split = chronological_split(&interactions, 0.2).unwrap();
        assert_eq!(split.test["u"].len(), 3);
    }

    #[test]
    fn fraction_bounds_validated() {
        assert!(chronological_split(&[], 0.0).is_err());
        assert!(chronological_split(&[], 1.0).is_err());
        assert!(chronological_split(&[], -0.1).is_err());
        assert!(chronological_split(&[], 0.5).is_ok());
    }
}
