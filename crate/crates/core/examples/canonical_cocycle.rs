//! Compute the canonical cocycle and the good scalar product of a metric graph.
//!
//! ```bash
//! cargo run --example canonical_cocycle -- crates/core/data/k4.json
//! ```

use abeljac::graph::parse_metric_graph;
use abeljac::period::{check_nonsingular, good_metric_report, PeriodData};

fn main() -> abeljac::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/theta.json").to_string());
    let (g, lengths) = parse_metric_graph(&std::fs::read_to_string(&path)?)?;
    let data = PeriodData::compute(&g, &lengths, 0)?;

    let tree: Vec<&str> = data.tree.tree_edges().iter().map(|&e| g.edge_name(e)).collect();
    println!("spanning tree {tree:?}, rank {}", data.rank());
    for h in 0..g.num_half_edges() {
        println!("  omega({}) = {:?}", g.half_edge_label(h), data.omega.value(h));
    }
    println!("lambda_* residual {:.2e}", data.lambda_star_residual(&lengths));

    let ns = check_nonsingular(&data.omega);
    println!("nonsingular {} (zero half-edges {:?})", ns.nonsingular, ns.zero_half_edges);

    let metric = data.good_metric(&lengths)?;
    for h in 0..g.num_half_edges() {
        println!("  U omega({}) = {:?}", g.half_edge_label(h), metric.apply(data.omega.value(h)));
    }
    print!("{}", good_metric_report(&g, &data.tree, &data.omega, &metric));
    Ok(())
}
