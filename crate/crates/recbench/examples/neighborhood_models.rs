//! User-based and item-based nearest neighbors on data with two planted
//! taste communities.
//!
//!   cargo run --example neighborhood_models

use recbench::corpus::{build_matrix, Interaction, RawDataset};
use recbench::models::memory::{ItemKnn, Similarity, UserKnn};
use recbench::models::RecommenderModel;

/// Two groups of 12 users; group g likes items 10g..10g+10 but each user is
/// missing a couple of them, which is what the models should fill in.
fn community_data() -> RawDataset {
    let mut interactions = Vec::new();
    for g in 0..2u32 {
        for u in 0..12u32 {
            let user = g * 12 + u;
            for i in 0..10u32 {
                if (i + u) % 5 == 0 {
                    continue; // the holes to recover
                }
                interactions.push(Interaction {
                    user: format!("u{user}"),
                    item: format!("i{}", g * 10 + i),
                    rating: 1.0,
                    timestamp: None,
                });
            }
        }
    }
    RawDataset {
        interactions,
        duplicates_collapsed: 0,
    }
}

fn main() {
    let matrix = build_matrix(&community_data());
    println!(
        "{} users, {} items, {} interactions",
        matrix.n_users(),
        matrix.n_items(),
        matrix.n_interactions()
    );

    let user_knn = UserKnn::fit(&matrix, 8, Similarity::Cosine);
    let item_knn = ItemKnn::fit(&matrix, 8, Similarity::Jaccard);

    // each user is missing exactly 2 in-block items, so ask for exactly 2
    for model in [&user_knn as &dyn RecommenderModel, &item_knn] {
        let mut in_community = 0;
        let mut recommended = 0;
        for user in 0..matrix.n_users() as u32 {
            let own_block = (user / 12) * 10;
            for (item, _) in model.recommend(user, 2) {
                recommended += 1;
                if (own_block..own_block + 10).contains(&item) {
                    in_community += 1;
                }
            }
        }
        println!(
            "{}: {}/{} recommendations stay in the user's community",
            model.name(),
            in_community,
            recommended
        );
        assert_eq!(in_community, recommended, "communities are separable");
    }

    // one user's completion, in index space: indices 0..10 are block 0
    // because its items are interned before any block-1 item appears
    let missing: Vec<u32> = (0..10).filter(|i| !matrix.contains(0, *i)).collect();
    let top: Vec<u32> = user_knn
        .recommend(0, missing.len())
        .into_iter()
        .map(|(i, _)| i)
        .collect();
    println!("u0 is missing {missing:?}; UserKNN suggests {top:?}");
}
