//! Parse a graph document and check its shape and length function.
//!
//! ```bash
//! cargo run --example validate_graph -- crates/core/data/dumbbell.json
//! ```

use abeljac::graph::{parse_metric_graph, validate_length_function, validate_shape};

fn main() -> abeljac::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/dumbbell.json").to_string());
    let (g, lengths) = parse_metric_graph(&std::fs::read_to_string(&path)?)?;

    println!("{} vertices, {} edges, rank {}", g.num_vertices(), g.num_edges(), g.rank()?);
    let shape = validate_shape(&g, true, true);
    println!("valences {:?}", shape.valences);
    let bridges: Vec<&str> = shape.separating_edges.iter().map(|&e| g.edge_name(e)).collect();
    println!("separating edges {bridges:?}");
    print!("{}", shape.report);
    print!("{}", validate_length_function(&g, &lengths));
    Ok(())
}
