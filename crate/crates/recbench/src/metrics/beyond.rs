//! Coverage, novelty, and popularity-exposure measures. All of them run over
//! every evaluable user, whether or not that user has held-out truth.
//!
//! The item split used by the exposure measures is the train fold's short
//! head (top fifth of the catalog by interaction count) versus the long tail
//! (everything else).

use crate::metrics::EvalContext;
use crate::{Error, Result};

/// Number of distinct items that appear in at least one list.
pub fn item_coverage(ctx: &EvalContext) -> f64 {
    let mut seen = vec![false; ctx.train().n_items()];
    for (_, list) in ctx.evaluable_lists() {
        for &item in list {
            seen[item as usize] = true;
        }
    }
    seen.iter().filter(|&&s| s).count() as f64
}

/// One minus the Gini index of how often each catalog item was recommended.
/// Items never recommended stay in the distribution with frequency zero, so
/// a model covering few items scores near zero and a perfectly even spread
/// scores one. The index itself is integer arithmetic, hence exact.
pub fn gini_complement(ctx: &EvalContext) -> Result<f64> {
    let mut freq = vec![0u64; ctx.train().n_items()];
    let mut total = 0u64;
    for (_, list) in ctx.evaluable_lists() {
        for &item in list {
            freq[item as usize] += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::Config(
            "cannot measure recommendation spread without any recommendations".into(),
        ));
    }
    freq.sort_unstable();
    let n = freq.len() as i128;
    let mut weighted = 0i128;
    for (i, &f) in freq.iter().enumerate() {
        // ascending rank, 1-based
        weighted += (2 * (i as i128 + 1) - n - 1) * f as i128;
    }
    let gini = weighted as f64 / (n as f64 * total as f64);
    Ok(1.0 - gini)
}

/// Mean self-information of the recommended items, in bits, normalized by the
/// cutoff. An item's surprisal is `-log2(count / total)` under the train
/// fold's interaction distribution. Items with a zero train count carry no
/// defined surprisal; they are skipped and reported on stderr.
pub fn expected_free_discovery(ctx: &EvalContext) -> f64 {
    let total = ctx.total_interactions() as f64;
    let mut sum = 0.0;
    let mut users = 0usize;
    let mut skipped = 0usize;
    for (_, list) in ctx.evaluable_lists() {
        let mut user_sum = 0.0;
        for &item in list {
            let count = ctx.item_counts()[item as usize];
            if count == 0 {
                skipped += 1;
                continue;
            }
            user_sum += -(f64::from(count) / total).log2();
        }
        sum += user_sum / ctx.cutoff() as f64;
        users += 1;
    }
    if skipped > 0 {
        eprintln!("warning: discovery measure skipped {skipped} recommended items with zero train count");
    }
    if users == 0 {
        0.0
    } else {
        sum / users as f64
    }
}

/// Mean popularity complement `1 - count / max_count` of the recommended
/// items, normalized by the cutoff. One means the lists stay far away from
/// the single most popular item, zero means they repeat it at every slot.
pub fn expected_popularity_complement(ctx: &EvalContext) -> f64 {
    let max = f64::from(ctx.max_count().max(1));
    let mut sum = 0.0;
    let mut users = 0usize;
    for (_, list) in ctx.evaluable_lists() {
        let mut user_sum = 0.0;
        for &item in list {
            user_sum += 1.0 - f64::from(ctx.item_counts()[item as usize]) / max;
        }
        sum += user_sum / ctx.cutoff() as f64;
        users += 1;
    }
    if users == 0 {
        0.0
    } else {
        sum / users as f64
    }
}

/// Mean number of long-tail items per list.
pub fn long_tail_count(ctx: &EvalContext) -> f64 {
    let mut sum = 0u64;
    let mut users = 0usize;
    for (_, list) in ctx.evaluable_lists() {
        sum += list
            .iter()
            .filter(|&&i| !ctx.short_head()[i as usize])
            .count() as u64;
        users += 1;
    }
    if users == 0 {
        0.0
    } else {
        sum as f64 / users as f64
    }
}

/// Long-tail count as a share of the cutoff. Kept as an exact rescaling of
/// [`long_tail_count`] so the two measures are proportional by construction.
pub fn long_tail_share(ctx: &EvalContext) -> f64 {
    long_tail_count(ctx) / ctx.cutoff() as f64
}

/// Mean train-fold interaction count of the items actually delivered. Users
/// whose list came back empty have no mean and are skipped.
pub fn mean_recommended_popularity(ctx: &EvalContext) -> f64 {
    let mut sum = 0.0;
    let mut users = 0usize;
    for (_, list) in ctx.evaluable_lists() {
        if list.is_empty() {
            continue;
        }
        let user_sum: f64 = list
            .iter()
            .map(|&i| f64::from(ctx.item_counts()[i as usize]))
            .sum();
        sum += user_sum / list.len() as f64;
        users += 1;
    }
    if users == 0 {
        0.0
    } else {
        sum / users as f64
    }
}

/// Hit rate disparity between the popularity groups: for each group, the
/// share of held-out items from that group that made it into a list, compared
/// across groups as population standard deviation over mean. Zero means both
/// groups see their relevant items surfaced at the same rate.
pub fn popularity_equal_opportunity(ctx: &EvalContext) -> Result<f64> {
    let mut hit = [0u64; 2];
    let mut relevant = [0u64; 2];
    for (user, list) in ctx.evaluable_lists() {
        let truth = ctx.truth().relevant(user);
        for &item in truth {
            relevant[group(ctx, item)] += 1;
        }
        for &item in list {
            if truth.binary_search(&item).is_ok() {
                hit[group(ctx, item)] += 1;
            }
        }
    }
    group_disparity(hit, relevant)
}

/// Exposure disparity between the popularity groups: for each group, the
/// share of its still-recommendable items (catalog minus the user profile)
/// that the lists actually used, compared as population standard deviation
/// over mean.
pub fn popularity_statistical_parity(ctx: &EvalContext) -> Result<f64> {
    let head_total: u64 = ctx.short_head().iter().filter(|&&h| h).count() as u64;
    let tail_total = ctx.train().n_items() as u64 - head_total;
    let mut recommended = [0u64; 2];
    let mut available = [0u64; 2];
    for (user, list) in ctx.evaluable_lists() {
        let profile = ctx.train().row(user);
        let profile_head = profile
            .iter()
            .filter(|&&i| ctx.short_head()[i as usize])
            .count() as u64;
        available[0] += head_total - profile_head;
        available[1] += tail_total - (profile.len() as u64 - profile_head);
        for &item in list {
            recommended[group(ctx, item)] += 1;
        }
    }
    group_disparity(recommended, available)
}

fn group(ctx: &EvalContext, item: u32) -> usize {
    usize::from(!ctx.short_head()[item as usize])
}

fn group_disparity(num: [u64; 2], den: [u64; 2]) -> Result<f64> {
    for (d, name) in den.iter().zip(["short head", "long tail"]) {
        if *d == 0 {
            return Err(Error::EmptyGroup {
                group: name.to_string(),
            });
        }
    }
    let p = [
        num[0] as f64 / den[0] as f64,
        num[1] as f64 / den[1] as f64,
    ];
    let mean = (p[0] + p[1]) / 2.0;
    if mean == 0.0 {
        // neither group got any exposure at all: no disparity to measure
        return Ok(0.0);
    }
    let var = ((p[0] - mean).powi(2) + (p[1] - mean).powi(2)) / 2.0;
    Ok(var.sqrt() / mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{GroundTruth, IdMaps, InteractionMatrix};
    use crate::metrics::Metric;
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn matrix(rows: Vec<Vec<u32>>, n_items: usize) -> InteractionMatrix {
        let ids = IdMaps::synthetic(rows.len(), n_items);
        InteractionMatrix::from_index_rows(Arc::new(ids), rows)
    }

    fn no_truth(n_users: usize) -> GroundTruth {
        GroundTruth::from_rows(vec![Vec::new(); n_users])
    }

    #[test]
    fn coverage_counts_distinct_items() {
        let train = matrix(vec![vec![0], vec![1]], 5);
        let truth = no_truth(2);
        let lists = vec![Some(vec![1, 2]), Some(vec![2, 3])];
        let ctx = EvalContext::new(&train, &truth, &lists, 2);
        assert_eq!(item_coverage(&ctx), 3.0);
    }

    #[test]
    fn gini_complement_extremes() {
        let train = matrix(vec![vec![0], vec![1], vec![2], vec![3]], 4);
        let truth = no_truth(4);

        // every item recommended once: perfectly even, complement 1
        let even = vec![Some(vec![0]), Some(vec![1]), Some(vec![2]), Some(vec![3])];
        let ctx = EvalContext::new(&train, &truth, &even, 1);
        assert_abs_diff_eq!(gini_complement(&ctx).unwrap(), 1.0, epsilon = 1e-12);

        // all mass on one item of four: sorted frequencies (0,0,0,4),
        // index weights (2i-n-1) = (-3,-1,1,3), so the index is 3/4
        let spike = vec![Some(vec![2]), Some(vec![2]), Some(vec![2]), Some(vec![2])];
        let ctx = EvalContext::new(&train, &truth, &spike, 1);
        assert_abs_diff_eq!(gini_complement(&ctx).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn gini_without_recommendations_is_an_error() {
        let train = matrix(vec![vec![0]], 2);
        let truth = no_truth(1);
        let lists = vec![None];
        let ctx = EvalContext::new(&train, &truth, &lists, 1);
        assert!(gini_complement(&ctx).is_err());
    }

    #[test]
    fn discovery_hand_value() {
        // counts (4, 2, 2), total 8; list (0, 1) at cutoff 2 gives
        // (-log2(1/2) - log2(1/4)) / 2 = (1 + 2) / 2
        let train = matrix(
            vec![vec![0], vec![0], vec![0, 1], vec![0, 1], vec![2], vec![2]],
            3,
        );
        let truth = no_truth(6);
        let mut lists = vec![None; 6];
        lists[0] = Some(vec![0, 1]);
        let ctx = EvalContext::new(&train, &truth, &lists, 2);
        assert_abs_diff_eq!(expected_free_discovery(&ctx), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn discovery_skips_zero_count_items() {
        // item 2 never occurs in train; only item 0 contributes, still / cutoff
        let train = matrix(vec![vec![0], vec![0, 1]], 3);
        let truth = no_truth(2);
        let lists = vec![Some(vec![0, 2]), None];
        let ctx = EvalContext::new(&train, &truth, &lists, 2);
        let expected = -(2.0f64 / 3.0).log2() / 2.0;
        assert_abs_diff_eq!(expected_free_discovery(&ctx), expected, epsilon = 1e-12);
    }

    #[test]
    fn popularity_complement_hand_value() {
        // counts (4, 2), max 4; a list holding only item 1 scores
        // (1 - 2/4) / 1
        let train = matrix(vec![vec![0], vec![0], vec![0, 1], vec![0, 1]], 2);
        let truth = no_truth(4);
        let lists = vec![Some(vec![1]), None, None, None];
        let ctx = EvalContext::new(&train, &truth, &lists, 1);
        assert_abs_diff_eq!(
            expected_popularity_complement(&ctx),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn long_tail_measures_and_exact_ratio() {
        // ten items, head = ceil(2) = 2 items (0 and 1 by count)
        let rows = vec![vec![0, 1, 2], vec![0, 1], vec![0]];
        let train = matrix(rows, 10);
        let truth = no_truth(3);
        let lists = vec![
            Some(vec![0, 2, 3]), // two tail items
            Some(vec![0, 1, 4]), // one tail item
            Some(vec![5, 6, 7]), // three tail items
        ];
        let ctx = EvalContext::new(&train, &truth, &lists, 3);
        assert_abs_diff_eq!(long_tail_count(&ctx), 2.0, epsilon = 1e-12);
        assert_eq!(long_tail_share(&ctx), long_tail_count(&ctx) / 3.0);
    }

    #[test]
    fn recommended_popularity_hand_value() {
        let train = matrix(vec![vec![0], vec![0], vec![0, 1], vec![0, 1]], 3);
        let truth = no_truth(4);
        // user 0 mean (4 + 2) / 2 = 3, user 1 mean 4
        let lists = vec![Some(vec![0, 1]), Some(vec![0]), None, None];
        let ctx = EvalContext::new(&train, &truth, &lists, 2);
        assert_abs_diff_eq!(mean_recommended_popularity(&ctx), 3.5, epsilon = 1e-12);
    }

    #[test]
    fn equal_opportunity_hand_value() {
        // Five items, one head slot taken by item 0 (count 2). Held-out
        // truth puts one item in the head group and two in the tail; the
        // lists recover the head item and one tail item.
        // p = (1/1, 1/2): mean 0.75, std 0.25, disparity 1/3.
        let train = matrix(vec![vec![0], vec![0], vec![2]], 5);
        let truth = GroundTruth::from_rows(vec![vec![3], vec![], vec![0, 1]]);
        let lists = vec![Some(vec![3, 4]), Some(vec![1, 4]), Some(vec![0, 4])];
        let ctx = EvalContext::new(&train, &truth, &lists, 2);
        assert_abs_diff_eq!(
            popularity_equal_opportunity(&ctx).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn equal_opportunity_needs_truth_in_both_groups() {
        // head = item 1 (index tie-break over item 2); all truth sits there
        let train = matrix(vec![vec![1], vec![2]], 5);
        let truth = GroundTruth::from_rows(vec![vec![], vec![1]]);
        let lists = vec![Some(vec![2, 3]), Some(vec![1, 3])];
        let ctx = EvalContext::new(&train, &truth, &lists, 2);
        match popularity_equal_opportunity(&ctx) {
            Err(Error::EmptyGroup { group }) => assert_eq!(group, "long tail"),
            other => panic!("expected empty-group error, got {other:?}"),
        }
    }

    #[test]
    fn statistical_parity_hand_value() {
        // Four items, one head slot. Counts (2, 1, 0, 0) make item 0 the
        // head. Only user 2 can still be shown it, and their list does.
        // Availability: head 1, tail 3 + 3 + 2 = 8. Recommended: head 1,
        // tail 5. p = (1, 5/8), so std / mean = 3/13.
        let train = matrix(vec![vec![0], vec![0], vec![1]], 4);
        let truth = no_truth(3);
        let lists = vec![Some(vec![1, 2]), Some(vec![2, 3]), Some(vec![0, 2])];
        let ctx = EvalContext::new(&train, &truth, &lists, 2);
        assert_abs_diff_eq!(
            popularity_statistical_parity(&ctx).unwrap(),
            3.0 / 13.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn statistical_parity_needs_an_available_head_item() {
        // Counts (1, 2): item 1 is the single head slot and sits in every
        // profile, so the head group has nothing left to recommend.
        let train = matrix(vec![vec![1], vec![0, 1]], 4);
        let truth = no_truth(2);
        let lists = vec![Some(vec![0, 2]), Some(vec![2, 3])];
        let ctx = EvalContext::new(&train, &truth, &lists, 2);
        match popularity_statistical_parity(&ctx) {
            Err(Error::EmptyGroup { group }) => assert_eq!(group, "short head"),
            other => panic!("expected empty-group error, got {other:?}"),
        }
    }

    #[test]
    fn share_equals_count_over_cutoff_via_dispatch() {
        let rows = vec![vec![0, 1, 2], vec![0, 1], vec![0]];
        let train = matrix(rows, 10);
        let truth = no_truth(3);
        let lists = vec![
            Some(vec![0, 2, 3]),
            Some(vec![0, 1, 4]),
            Some(vec![5, 6, 7]),
        ];
        let ctx = EvalContext::new(&train, &truth, &lists, 3);
        let aclt = ctx.evaluate(Metric::Aclt).unwrap();
        let aplt = ctx.evaluate(Metric::Aplt).unwrap();
        assert_eq!(aplt, aclt / 3.0);
    }
}
