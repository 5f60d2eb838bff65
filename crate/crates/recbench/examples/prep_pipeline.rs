//! Dataset preparation walkthrough: explicit ratings come in, a thresholded
//! and core-filtered implicit matrix comes out.
//!
//!   cargo run --example prep_pipeline

use std::io::Write;

use recbench::corpus::{binarize, build_matrix, load_interactions, pcore_filter, DatasetStats, InputFormat};

fn main() -> recbench::Result<()> {
    // a small explicit-feedback file; user 9 only ever rates low, so the
    // threshold wipes them out, and item i9 is rated once, so the core
    // filter drops it afterwards
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    let mut rows = Vec::new();
    for u in 0..9 {
        for i in 0..8 {
            let rating = if (u + i) % 4 == 0 { 2 } else { 4 + (u + i) % 2 };
            rows.push(format!("u{u},i{i},{rating},0"));
        }
    }
    rows.push("u3,i9,5,0".to_string());
    for u in 0..4 {
        rows.push(format!("u9,i{u},1,0"));
    }
    writeln!(file, "{}", rows.join("\n")).expect("write temp file");

    let raw = load_interactions(file.path(), &InputFormat::csv())?;
    println!("raw interactions: {}", raw.interactions.len());

    let kept = binarize(raw, 3.0);
    println!("rating > 3 keeps:  {}", kept.interactions.len());

    let cored = pcore_filter(kept, 2)?;
    println!("2-core keeps:      {}", cored.interactions.len());

    let matrix = build_matrix(&cored);
    let stats = DatasetStats::of(&matrix);
    println!(
        "final matrix: {} users x {} items, density {:.4}",
        stats.users, stats.items, stats.density
    );

    // the filtered matrix satisfies the core property everywhere
    let counts = matrix.item_counts();
    assert!(matrix.rows().iter().all(|r| r.len() >= 2));
    assert!(counts.iter().all(|&c| c >= 2));
    println!("every remaining user and item has at least 2 interactions");
    Ok(())
}
