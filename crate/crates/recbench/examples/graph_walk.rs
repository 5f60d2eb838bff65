//! The two-hop random walk recommender and its beta knob: raising beta
//! divides the walk scores by item popularity and pushes the long tail up.
//!
//!   cargo run --example graph_walk

use recbench::corpus::{build_matrix, Interaction, RawDataset};
use recbench::models::memory::Rp3Beta;
use recbench::models::RecommenderModel;

fn main() {
    // blockbuster items 0..3 that almost everyone has, plus a per-user
    // niche neighborhood
    let mut interactions = Vec::new();
    for u in 0..30u32 {
        for i in 0..3u32 {
            if (u + i) % 7 != 0 {
                interactions.push(pair(u, i));
            }
        }
        let base = 3 + (u % 6) * 4;
        for d in 0..4u32 {
            if d != u % 4 {
                interactions.push(pair(u, base + d));
            }
        }
    }
    let matrix = build_matrix(&RawDataset {
        interactions,
        duplicates_collapsed: 0,
    });
    let counts = matrix.item_counts();

    for beta in [0.0, 1.0] {
        let model = Rp3Beta::fit(&matrix, 50, 1.0, beta, true);
        let mut popularity_sum = 0u64;
        let mut recommended = 0u64;
        for u in 0..matrix.n_users() as u32 {
            for (i, _) in model.recommend(u, 2) {
                popularity_sum += u64::from(counts[i as usize]);
                recommended += 1;
            }
        }
        println!(
            "beta = {beta}: mean popularity of recommended items = {:.1}",
            popularity_sum as f64 / recommended as f64
        );
    }
    println!("a higher beta steers the walk away from the blockbusters");

    let plain = Rp3Beta::fit(&matrix, 50, 1.0, 0.0, true);
    let damped = Rp3Beta::fit(&matrix, 50, 1.0, 1.0, true);
    let mean = |m: &Rp3Beta| {
        let mut s = 0u64;
        let mut n = 0u64;
        for u in 0..matrix.n_users() as u32 {
            for (i, _) in m.recommend(u, 2) {
                s += u64::from(counts[i as usize]);
                n += 1;
            }
        }
        s as f64 / n as f64
    };
    assert!(mean(&damped) < mean(&plain));
}

fn pair(u: u32, i: u32) -> Interaction {
    Interaction {
        user: format!("u{u}"),
        item: format!("i{i}"),
        rating: 1.0,
        timestamp: None,
    }
}
