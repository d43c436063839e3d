//! The bump profile `ψ`, the field `Φ_T`, sampled lemma checks and the
//! sublevel set `W = Φ⁻¹[0, ¼]` on the torus.

mod field;
mod lemmas;
mod psi;
mod region;

pub use field::{phi_eval, phi_grad, subdivide_tree, ThickeningField, ON_TREE};
pub use lemmas::*;
pub use psi::{
    log_derivative, psi, psi_all, psi_prime, psi_second, tent_peak_fraction, try_psi, try_psi_prime, verify_psi,
    BREAK_FLAT, BREAK_INFLECTION, BREAK_QUADRATIC,
};
pub use region::*;
