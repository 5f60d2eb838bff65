//! Per-user ranking accuracy. Lists arrive already truncated to the cutoff;
//! `relevant` slices are sorted ascending so hits binary-search.

fn is_hit(relevant: &[u32], item: u32) -> bool {
    relevant.binary_search(&item).is_ok()
}

pub fn hits(list: &[u32], relevant: &[u32]) -> usize {
    list.iter().filter(|&&i| is_hit(relevant, i)).count()
}

/// Binary-gain DCG against the ideal list. The ideal ranking places one hit
/// per position for `min(|relevant|, cutoff)` positions.
pub fn ndcg_at(list: &[u32], relevant: &[u32], cutoff: usize) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let gain = |rank: usize| 1.0 / ((rank + 2) as f64).log2();
    let mut dcg = 0.0;
    for (rank, &item) in list.iter().take(cutoff).enumerate() {
        if is_hit(relevant, item) {
            dcg += gain(rank);
        }
    }
    let ideal: f64 = (0..relevant.len().min(cutoff)).map(gain).sum();
    dcg / ideal
}

/// Mean of precision-at-hit-positions, normalized by `min(|relevant|, cutoff)`
/// so a list that surfaces every reachable hit scores 1.
pub fn average_precision_at(list: &[u32], relevant: &[u32], cutoff: usize) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let mut seen = 0usize;
    let mut sum = 0.0;
    for (rank, &item) in list.iter().take(cutoff).enumerate() {
        if is_hit(relevant, item) {
            seen += 1;
            sum += seen as f64 / (rank + 1) as f64;
        }
    }
    sum / relevant.len().min(cutoff) as f64
}

/// Reciprocal rank of the first hit, zero when the list has none.
pub fn reciprocal_rank(list: &[u32], relevant: &[u32]) -> f64 {
    list.iter()
        .position(|&i| is_hit(relevant, i))
        .map_or(0.0, |rank| 1.0 / (rank + 1) as f64)
}

/// Hits over the cutoff, not over the delivered length: an exhausted catalog
/// still pays for its missing positions.
pub fn precision_at(list: &[u32], relevant: &[u32], cutoff: usize) -> f64 {
    hits(list, relevant) as f64 / cutoff as f64
}

pub fn recall(list: &[u32], relevant: &[u32]) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    hits(list, relevant) as f64 / relevant.len() as f64
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Harmonic mean per user, then averaged. A user with one near-zero side
/// drags the population value below both averages, so this convention is not
/// bounded by the mean precision and mean recall.
pub fn f1_per_user(pairs: &[(f64, f64)]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let sum: f64 = pairs.iter().map(|&(p, r)| harmonic(p, r)).sum();
    sum / pairs.len() as f64
}

/// Averages precision and recall over users first, then takes one harmonic
/// mean of the two population values.
pub fn f1_of_means(pairs: &[(f64, f64)]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let n = pairs.len() as f64;
    let p: f64 = pairs.iter().map(|&(p, _)| p).sum::<f64>() / n;
    let r: f64 = pairs.iter().map(|&(_, r)| r).sum::<f64>() / n;
    harmonic(p, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Five-user populations where the two F1 conventions disagree, with the
    // population values worked out by hand. System B beats A on both averages
    // yet loses under the per-user convention.
    const SYSTEM_A: [(f64, f64); 5] =
        [(0.2, 0.3), (0.5, 0.6), (0.3, 0.4), (0.6, 0.3), (0.2, 0.3)];
    const SYSTEM_B: [(f64, f64); 5] =
        [(0.2, 0.4), (0.5, 0.2), (0.4, 0.4), (0.2, 0.6), (0.5, 0.4)];

    #[test]
    fn per_user_f1_fixture_values() {
        assert_abs_diff_eq!(f1_per_user(&SYSTEM_A), 0.3536624, epsilon = 1e-6);
        assert_abs_diff_eq!(f1_per_user(&SYSTEM_B), 0.3393651, epsilon = 1e-6);
    }

    #[test]
    fn averaged_f1_fixture_values() {
        assert_abs_diff_eq!(f1_of_means(&SYSTEM_A), 0.3697297, epsilon = 1e-6);
        assert_abs_diff_eq!(f1_of_means(&SYSTEM_B), 0.3789474, epsilon = 1e-6);
    }

    #[test]
    fn conventions_rank_the_fixtures_oppositely() {
        assert!(f1_per_user(&SYSTEM_A) > f1_per_user(&SYSTEM_B));
        assert!(f1_of_means(&SYSTEM_A) < f1_of_means(&SYSTEM_B));
    }

    #[test]
    fn per_user_f1_can_undercut_both_averages() {
        let p_mean = SYSTEM_A.iter().map(|&(p, _)| p).sum::<f64>() / 5.0;
        let r_mean = SYSTEM_A.iter().map(|&(_, r)| r).sum::<f64>() / 5.0;
        let f1 = f1_per_user(&SYSTEM_A);
        assert!(f1 < p_mean && f1 < r_mean);
    }

    #[test]
    fn ndcg_single_hit_positions() {
        let truth = [5u32];
        // hit at rank 1: 1/log2(3) against an ideal of 1
        let got = ndcg_at(&[9, 5, 7], &truth, 3);
        assert_abs_diff_eq!(got, 1.0 / 3f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(ndcg_at(&[5, 9, 7], &truth, 3), 1.0, epsilon = 1e-12);
        assert_eq!(ndcg_at(&[9, 7, 8], &truth, 3), 0.0);
    }

    #[test]
    fn ndcg_ideal_caps_at_cutoff() {
        // four relevant items but cutoff 2: two perfect positions give 1.0
        let truth = [1u32, 2, 3, 4];
        assert_abs_diff_eq!(ndcg_at(&[1, 2], &truth, 2), 1.0, epsilon = 1e-12);
        // one hit of two possible positions
        let ideal = 1.0 + 1.0 / 3f64.log2();
        assert_abs_diff_eq!(ndcg_at(&[1, 9], &truth, 2), 1.0 / ideal, epsilon = 1e-12);
    }

    #[test]
    fn average_precision_hand_value() {
        // hits at ranks 1 and 3 of 4, two relevant items total:
        // (1/1 + 2/3) / 2
        let truth = [10u32, 30];
        let got = average_precision_at(&[10, 20, 30, 40], &truth, 4);
        assert_abs_diff_eq!(got, (1.0 + 2.0 / 3.0) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn average_precision_normalizer_caps_at_cutoff() {
        // three relevant, cutoff 2, both positions hit: perfect score
        let truth = [1u32, 2, 3];
        assert_abs_diff_eq!(
            average_precision_at(&[2, 1], &truth, 2),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn reciprocal_rank_first_hit_only() {
        let truth = [3u32, 4];
        assert_abs_diff_eq!(reciprocal_rank(&[9, 4, 3], &truth), 0.5, epsilon = 1e-12);
        assert_eq!(reciprocal_rank(&[9, 8], &truth), 0.0);
    }

    #[test]
    fn precision_pays_for_short_lists() {
        let truth = [1u32, 2];
        // catalog exhausted after 2 slots, cutoff 5
        assert_abs_diff_eq!(precision_at(&[1, 2], &truth, 5), 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(recall(&[1, 2], &truth), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn all_measures_bounded_by_one_on_random_instances() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let catalog: u32 = rng.gen_range(5..40);
            let cutoff = rng.gen_range(1..12usize);
            let mut items: Vec<u32> = (0..catalog).collect();
            items.shuffle(&mut rng);
            let list: Vec<u32> = items.iter().copied().take(cutoff).collect();
            let mut truth: Vec<u32> = items
                .iter()
                .copied()
                .filter(|_| rng.gen_bool(0.3))
                .collect();
            truth.sort_unstable();
            for v in [
                ndcg_at(&list, &truth, cutoff),
                average_precision_at(&list, &truth, cutoff),
                reciprocal_rank(&list, &truth),
                precision_at(&list, &truth, cutoff),
                recall(&list, &truth),
            ] {
                assert!((0.0..=1.0).contains(&v), "out of range: {v}");
            }
        }
    }
}
