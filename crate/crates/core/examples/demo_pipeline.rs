//! The complete synthetic pipeline: faces, pairs, morphs, embeddings, both
//! scenarios and the report.
//!
//!     cargo run --release --example demo_pipeline -- [out_dir]

use std::path::PathBuf;
use std::time::Instant;

use morphkit::cli::{run_demo, DemoOptions};

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("morphkit-demo"));
    let start = Instant::now();
    let summary = match run_demo(&DemoOptions {
        out: out.clone(),
        ..DemoOptions::default()
    }) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("demo failed: {e}");
            std::process::exit(e.exit_code());
        }
    };
    println!(
        "{} bona fide images, {} pairs, {} morphs ({} failed) in {:.2?}",
        summary.n_images,
        summary.n_pairs,
        summary.n_morphs,
        summary.n_failed,
        start.elapsed()
    );
    for e in &summary.entries {
        let r = &e.report;
        println!(
            "{:10} genuine={} impostor={} morph comparisons={} threshold={:.4} fnmr={:.3} mmpmr={:.3}",
            e.mode,
            r.n_genuine,
            r.n_impostor,
            r.n_morph_comparisons,
            r.threshold,
            r.fnmr_at_threshold,
            r.mmpmr
        );
    }
    println!();
    print!("{}", summary.report_text);
    println!("artifacts in {}", out.display());
}
