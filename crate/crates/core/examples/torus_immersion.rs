//! Immerse a metric graph into its Jacobian torus and export it.
//!
//! Writes `immersion.svg` (rank 2) or `potentials.csv` into the current directory.
//!
//! ```bash
//! cargo run --example torus_immersion -- crates/core/data/rose2.json
//! ```

use abeljac::abel_jacobi::{
    check_local_embedding, immersion_svg, lattice_defect_report, potentials_csv, torus_immersion,
};
use abeljac::graph::parse_metric_graph;

fn main() -> abeljac::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/theta.json").to_string());
    let (g, lengths) = parse_metric_graph(&std::fs::read_to_string(&path)?)?;
    let im = torus_immersion(&g, &lengths, 0)?;

    for v in 0..g.num_vertices() {
        println!("F({}) = {:?}", g.vertex_name(v), im.potential_good(v));
    }
    for e in 0..g.num_edges() {
        println!("edge {} displacement {:?}", g.edge_name(e), im.displacement_good(2 * e));
    }
    print!("{}", lattice_defect_report(&g, &im));
    print!("{}", check_local_embedding(&g, &im).report);

    if im.rank() == 2 {
        std::fs::write("immersion.svg", immersion_svg(&g, &im)?)?;
        println!("wrote immersion.svg");
    } else {
        std::fs::write("potentials.csv", potentials_csv(&g, &im))?;
        println!("wrote potentials.csv");
    }
    Ok(())
}
