//! Contour the thickening on a rank-two torus and count its Euler characteristic.
//!
//! Writes `region.svg` and `boundary.csv` into the current directory.
//!
//! ```bash
//! cargo run --release --example sublevel_region -- crates/core/data/rose2.json 0.02
//! ```

use abeljac::abel_jacobi::{cut_long_edges, embed_trees, torus_immersion, SCALE};
use abeljac::graph::parse_metric_graph;
use abeljac::thickening::{sublevel_region, GridConfig};

fn main() -> abeljac::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/theta.json").to_string());
    let h = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let (g, lengths) = parse_metric_graph(&std::fs::read_to_string(&path)?)?;
    let im = torus_immersion(&g, &lengths, 0)?;
    let layout = embed_trees(&g, &cut_long_edges(&g, &lengths)?, &im, SCALE)?;

    let start = std::time::Instant::now();
    let region = sublevel_region(&layout, GridConfig { h, ..GridConfig::default() })?;
    println!("grid {}x{} in {:?}", region.nx, region.ny, start.elapsed());
    println!("euler characteristic {}", region.euler_characteristic);
    println!("{} boundary curves", region.polylines.len());
    println!("min |grad Phi| on the boundary {:.4}", region.min_boundary_gradient);
    print!("{}", region.report());

    std::fs::write("region.svg", region.svg())?;
    std::fs::write("boundary.csv", region.boundary_csv())?;
    println!("wrote region.svg and boundary.csv");
    Ok(())
}
