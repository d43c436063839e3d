//! Cut every length-one edge and lay the resulting trees out in good coordinates.
//!
//! ```bash
//! cargo run --example cut_trees -- crates/core/data/k4.json
//! ```

use abeljac::abel_jacobi::{
    check_tautness_labeled, cut_long_edges, embed_trees, path_pair_report, torus_immersion, SCALE,
};
use abeljac::graph::parse_metric_graph;

fn main() -> abeljac::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/theta.json").to_string());
    let (g, lengths) = parse_metric_graph(&std::fs::read_to_string(&path)?)?;
    let im = torus_immersion(&g, &lengths, 0)?;
    let forest = cut_long_edges(&g, &lengths)?;
    let layout = embed_trees(&g, &forest, &im, SCALE)?;

    println!("{} trees, {} gluings", layout.trees.len(), layout.gluings.len());
    for (i, t) in layout.trees.iter().enumerate() {
        println!("tree {i}: valences {:?}", t.valences());
        for v in 0..t.num_vertices() {
            println!("  {:>6} at {:?}", t.vertex_label(Some(&g), v), t.global_position(v));
        }
        print!("{}", check_tautness_labeled(t, Some(&g)));
    }
    for gl in &layout.gluings {
        println!(
            "edge {} glues tree {} to tree {} shifted by {:?}",
            g.edge_name(gl.edge),
            gl.a.0,
            gl.b.0,
            gl.shift_cycles
        );
    }
    println!("gluing mismatch {:.2e}", layout.gluing_mismatch());
    println!("{}", path_pair_report(&g, &layout));
    Ok(())
}
