//! Evaluate the thickening field on a tripod and sample its lemmas.
//!
//! ```bash
//! cargo run --release --example thickening_field
//! ```

use abeljac::abel_jacobi::EmbeddedTree;
use abeljac::thickening::{
    formula_agreement, gradient_fd_check, leaf_standardness, rigid_motion_check, subdivision_invariance,
    verify_key_lemma, ThickeningField,
};

fn main() -> abeljac::Result<()> {
    let tripod = EmbeddedTree::new(
        vec![vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 4.0], vec![-4.0, -4.0]],
        vec![(0, 1), (0, 2), (0, 3)],
    )?;
    let field = ThickeningField::new(&tripod);

    for x in [[0.0, 0.0], [2.0, 0.5], [2.0, 1.0], [-1.0, -1.0], [1.0, 1.0], [3.0, 3.0]] {
        let (v, g) = field.value_and_gradient(&x);
        println!("Phi{x:?} = {v:.6}, grad = [{:.4}, {:.4}], d = {:.4}", g[0], g[1], field.distance(&x));
    }

    println!("{}", formula_agreement(&field, 10_000, 1));
    println!("{}", subdivision_invariance(&field, &[0.25, 0.5], 1_000, 2));
    println!("{}", gradient_fd_check(&field, 10_000, (0.01, 0.99), 3).check);
    let kl = verify_key_lemma(&field, 100_000, 4);
    println!("{} ({} of {} samples in the band)", kl.check, kl.in_band, kl.samples);
    println!("{}", leaf_standardness(&field, 1_000, 5));
    println!("{}", rigid_motion_check(&field, 3, 1_000, 6));
    Ok(())
}
