//! Published tuned hyperparameters for the three benchmark datasets,
//! shipped exactly as printed. A few printed values fall outside the search
//! domains in `spaces`; those are kept verbatim and surfaced by
//! [`preset_space_deviations`] instead of being silently corrected.

use crate::harness::algorithm::{AlgorithmKind, HyperParams};
use crate::harness::spaces::search_space;

/// Canonical dataset tags that have presets.
pub const DATASET_TAGS: [&str; 3] = ["movielens", "amazon", "epinions"];

/// Maps common dataset-name spellings onto the preset tags.
pub fn canonical_tag(name: &str) -> Option<&'static str> {
    let n = name.to_ascii_lowercase();
    match n.as_str() {
        "movielens" | "ml1m" | "ml-1m" | "movielens-1m" | "movielens1m" => Some("movielens"),
        "amazon" | "amazon-music" | "amazon-digital-music" | "digital-music" => Some("amazon"),
        "epinions" => Some("epinions"),
        _ => None,
    }
}

/// The tuned configuration for (algorithm, dataset tag), or `None` for an
/// unknown tag. Hyperparameter-free algorithms yield an empty bag.
pub fn preset(kind: AlgorithmKind, tag: &str) -> Option<HyperParams> {
    let tag = canonical_tag(tag)?;
    let t = |ml: HyperParams, am: HyperParams, ep: HyperParams| match tag {
        "movielens" => ml,
        "amazon" => am,
        _ => ep,
    };
    let p = HyperParams::new;
    Some(match kind {
        AlgorithmKind::Random | AlgorithmKind::MostPop => p(),
        AlgorithmKind::UserKnn => t(
            p().with_int("topk", 117).with_text("similarity", "pearson"),
            p().with_int("topk", 226).with_text("similarity", "cosine"),
            p().with_int("topk", 139).with_text("similarity", "cosine"),
        ),
        AlgorithmKind::ItemKnn => t(
            p().with_int("topk", 95).with_text("similarity", "cosine"),
            p().with_int("topk", 798).with_text("similarity", "cosine"),
            p().with_int("topk", 137).with_text("similarity", "cosine"),
        ),
        AlgorithmKind::Rp3Beta => t(
            p().with_int("topk", 158)
                .with_float("alpha", 1.435_019_7)
                .with_float("beta", 0.326_551_7)
                .with_flag("normalization", true),
            p().with_int("topk", 803)
                .with_float("alpha", 0.497_320_7)
                .with_float("beta", 0.283_693_8)
                .with_flag("normalization", false),
            p().with_int("topk", 144)
                .with_float("alpha", 0.871_934_4)
                .with_float("beta", 0.248_369_8)
                .with_flag("normalization", true),
        ),
        AlgorithmKind::Slim => t(
            p().with_int("topk", 518)
                .with_float("l1_ratio", 0.000_042_0)
                .with_float("alpha", 0.297_854_3),
            p().with_int("topk", 663)
                .with_float("l1_ratio", 0.000_010_8)
                .with_float("alpha", 0.048_677_1),
            p().with_int("topk", 663)
                .with_float("l1_ratio", 0.000_010_8)
                .with_float("alpha", 0.048_677_1),
        ),
        AlgorithmKind::Ease => {
            // one printed value for all three datasets
            p().with_float("l2", 238.562_133_8)
        }
        AlgorithmKind::Ials => t(
            p().with_int("factors", 51)
                .with_int("epochs", 27)
                .with_text("scaling", "log")
                .with_float("alpha", 6.381_893_0)
                .with_float("epsilon", 5.649_627_8)
                .with_float("reg", 0.049_473_4),
            p().with_int("factors", 200)
                .with_int("epochs", 70)
                .with_text("scaling", "log")
                .with_float("alpha", 9.121_971_8)
                .with_float("epsilon", 0.492_193_6)
                .with_float("reg", 0.492_193_6),
            p().with_int("factors", 178)
                .with_int("epochs", 145)
                .with_text("scaling", "log")
                .with_float("alpha", 2.853_718_4)
                .with_float("epsilon", 2.309_848_1)
                .with_float("reg", 0.041_149_1),
        ),
        AlgorithmKind::BprMf => t(
            p().with_int("factors", 256)
                .with_int("epochs", 73)
                .with_float("learning_rate", 0.037_893_6)
                .with_int("batch_size", 256)
                .with_float("reg_user", 0.015_783_9)
                .with_float("reg_positive", 0.000_565_1)
                .with_float("reg_negative", 0.001_277_9),
            p().with_int("factors", 64)
                .with_int("epochs", 86)
                .with_float("learning_rate", 0.126_562_4)
                .with_int("batch_size", 256)
                .with_float("reg_user", 0.005_867_3)
                .with_float("reg_positive", 0.005_298_5)
                .with_float("reg_negative", 0.000_957_7),
            p().with_int("factors", 256)
                .with_int("epochs", 63)
                .with_float("learning_rate", 0.100_407_5)
                .with_int("batch_size", 256)
                .with_float("reg_user", 0.000_261_3)
                .with_float("reg_positive", 0.003_451_1)
                .with_float("reg_negative", 0.032_812_7),
        ),
        AlgorithmKind::Mf2020 => t(
            p().with_int("factors", 128)
                .with_int("epochs", 72)
                .with_float("learning_rate", 0.129_596_5)
                .with_float("reg", 0.008_758_3)
                .with_int("negatives", 4),
            p().with_int("factors", 64)
                .with_int("epochs", 92)
                .with_float("learning_rate", 0.129_596_5)
                .with_float("reg", 0.012_500_9)
                .with_int("negatives", 8),
            p().with_int("factors", 16)
                .with_int("epochs", 97)
                .with_float("learning_rate", 0.015_443_5)
                .with_float("reg", 0.022_364_2)
                .with_int("negatives", 4),
        ),
        AlgorithmKind::NeuMf => t(
            p().with_int("factors", 16)
                .with_int("epochs", 93)
                .with_float("learning_rate", 0.000_036_6)
                .with_int("batch_size", 256)
                .with_int("negatives", 6),
            p().with_int("factors", 128)
                .with_int("epochs", 100)
                .with_float("learning_rate", 0.000_136_5)
                .with_int("batch_size", 64)
                .with_int("negatives", 6),
            p().with_int("factors", 32)
                .with_int("epochs", 39)
                .with_float("learning_rate", 0.000_046_5)
                .with_int("batch_size", 256)
                .with_int("negatives", 8),
        ),
        AlgorithmKind::MultiVae => t(
            p().with_int("epochs", 100)
                .with_float("learning_rate", 0.000_154_5)
                .with_int("batch_size", 128)
                .with_int("intermediate", 674)
                .with_int("latent", 175)
                .with_float("reg", 0.000_010_5),
            p().with_int("epochs", 205)
                .with_float("learning_rate", 0.000_072_3)
                .with_int("batch_size", 128)
                .with_int("intermediate", 721)
                .with_int("latent", 279)
                .with_float("reg", 0.115_340_0),
            p().with_int("epochs", 200)
                .with_float("learning_rate", 0.000_100_3)
                .with_int("batch_size", 128)
                .with_int("intermediate", 674)
                .with_int("latent", 175)
                .with_float("reg", 0.002_001_8),
        ),
    })
}

/// One preset value that does not fit its search domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub kind: AlgorithmKind,
    pub tag: &'static str,
    pub key: String,
    /// False when the space has no such dimension at all.
    pub dimension_exists: bool,
}

/// Every (algorithm, dataset, key) whose preset value escapes the search
/// domain. The published tables contain a handful of these; they are pinned
/// by a test so new ones cannot slip in unnoticed.
pub fn preset_space_deviations() -> Vec<Deviation> {
    let mut out = Vec::new();
    for kind in AlgorithmKind::ALL {
        let space = search_space(kind);
        for tag in DATASET_TAGS {
            let params = preset(kind, tag).expect("canonical tags always resolve");
            for (key, value) in &params.0 {
                match space.contains(key, value) {
                    Some(true) => {}
                    Some(false) => out.push(Deviation {
                        kind,
                        tag,
                        key: key.clone(),
                        dimension_exists: true,
                    }),
                    None => out.push(Deviation {
                        kind,
                        tag,
                        key: key.clone(),
                        dimension_exists: false,
                    }),
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_resolve_with_aliases() {
        assert_eq!(canonical_tag("ML-1M"), Some("movielens"));
        assert_eq!(canonical_tag("Amazon-Digital-Music"), Some("amazon"));
        assert_eq!(canonical_tag("epinions"), Some("epinions"));
        assert_eq!(canonical_tag("netflix"), None);
    }

    #[test]
    fn every_algorithm_has_presets_for_every_tag() {
        for kind in AlgorithmKind::ALL {
            for tag in DATASET_TAGS {
                assert!(preset(kind, tag).is_some(), "{kind} lacks {tag}");
            }
            assert!(preset(kind, "unknown").is_none());
        }
    }

    #[test]
    fn spot_check_printed_values() {
        let knn = preset(AlgorithmKind::UserKnn, "movielens").unwrap();
        assert_eq!(knn.int_or("topk", 0).unwrap(), 117);
        assert_eq!(knn.text_or("similarity", "").unwrap(), "pearson");

        let ease = preset(AlgorithmKind::Ease, "epinions").unwrap();
        assert_eq!(ease.float_or("l2", 0.0).unwrap(), 238.562_133_8);

        let vae = preset(AlgorithmKind::MultiVae, "amazon").unwrap();
        assert_eq!(vae.int_or("latent", 0).unwrap(), 279);
        assert_eq!(vae.float_or("reg", 0.0).unwrap(), 0.115_340_0);
    }

    #[test]
    fn slim_shares_one_configuration_between_amazon_and_epinions() {
        // the published table repeats these values; shipped as printed
        assert_eq!(
            preset(AlgorithmKind::Slim, "amazon"),
            preset(AlgorithmKind::Slim, "epinions")
        );
        assert_ne!(
            preset(AlgorithmKind::Slim, "movielens"),
            preset(AlgorithmKind::Slim, "amazon")
        );
    }

    #[test]
    fn deviations_are_exactly_the_known_printed_artifacts() {
        // iALS and BPRMF presets fix epoch counts that the search never
        // samples, the printed iALS reg values sit above the sampled
        // 0.001..0.01 band, and the NeuMF batch size tuned for the sparsest
        // dataset is below its choice set. Everything else must fit.
        let got = preset_space_deviations();
        let mut expected = Vec::new();
        for tag in DATASET_TAGS {
            expected.push((AlgorithmKind::Ials, tag, "epochs", false));
            expected.push((AlgorithmKind::Ials, tag, "reg", true));
            expected.push((AlgorithmKind::BprMf, tag, "epochs", false));
        }
        expected.push((AlgorithmKind::NeuMf, "amazon", "batch_size", true));
        let mut got_tuples: Vec<(AlgorithmKind, &str, &str, bool)> = got
            .iter()
            .map(|d| (d.kind, d.tag, d.key.as_str(), d.dimension_exists))
            .collect();
        got_tuples.sort_by_key(|(k, t, key, _)| (k.label(), *t, key.to_string()));
        expected.sort_by_key(|(k, t, key, _)| (k.label(), *t, key.to_string()));
        assert_eq!(got_tuples, expected);
    }
}
