//! Sweep the simplex of length functions given by a collapse chain.
//!
//! ```bash
//! cargo run --release --example family_sweep -- crates/core/data/theta_rose_family.json
//! ```

use abeljac::family::{family_cocycle_path, face_compatibility_check, lerp, SimplexFamily};

fn main() -> abeljac::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/theta_rose_family.json").to_string());
    let fam = SimplexFamily::from_json(&std::fs::read_to_string(&path)?)?;
    let k = fam.dim();
    println!("{k}-simplex over a graph with {} edges", fam.graph().num_edges());

    for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let t: Vec<f64> = (0..=k).map(|i| if i == 0 { 1.0 - s } else { s / k as f64 }).collect();
        let (lengths, data) = fam.period_data(&t)?;
        let chords: Vec<Vec<f64>> = data.tree.chords().iter().map(|&h| data.omega.value(h).to_vec()).collect();
        println!("t = {t:?}: lengths {:?}, chord values {chords:?}", lengths.edge_lengths());
    }

    let bary = vec![1.0 / (k + 1) as f64; k + 1];
    let corner = |i: usize| -> Vec<f64> { lerp(&(0..=k).map(|j| (i == j) as u8 as f64).collect::<Vec<_>>(), &bary, 0.1) };
    let report = family_cocycle_path(&fam, &corner(0), &corner(k), 5, 1e-3)?;
    print!("{}", report.to_csv());
    print!("{}", report.report);
    for face in 0..=k {
        print!("{}", face_compatibility_check(&fam, face)?);
    }
    Ok(())
}
