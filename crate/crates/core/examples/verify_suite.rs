//! Run every check on one metric graph and print the JSON report.
//!
//! ```bash
//! cargo run --release --example verify_suite -- crates/core/data/theta.json
//! ```

use abeljac::graph::parse_metric_graph;
use abeljac::verify::{verify_suite, VerifyConfig};

fn main() -> abeljac::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/theta.json").to_string());
    let (g, lengths) = parse_metric_graph(&std::fs::read_to_string(&path)?)?;

    let start = std::time::Instant::now();
    let report = verify_suite(&g, &lengths, &VerifyConfig::quick())?;
    eprint!("{report}");
    eprintln!("{} checks in {:?}, passed: {}", report.checks.len(), start.elapsed(), report.passed());
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
