//! Tabulate the bump profile and run its property checks.
//!
//! ```bash
//! cargo run --example psi_profile
//! ```

use abeljac::thickening::{log_derivative, psi_all, tent_peak_fraction, verify_psi};

fn main() {
    println!("tent peak fraction {:.6}", tent_peak_fraction());
    println!("{:>6} {:>10} {:>10} {:>10} {:>12}", "t", "psi", "psi'", "psi''", "psi'/psi");
    for k in 0..=16 {
        let t = k as f64 * 0.1;
        let (p, d, s) = psi_all(t);
        let ld = if t > 0.0 && t < 1.5 { log_derivative(t) } else { f64::NAN };
        println!("{t:>6.2} {p:>10.6} {d:>10.6} {s:>10.6} {ld:>12.6}");
    }
    let start = std::time::Instant::now();
    let report = verify_psi(10_000);
    print!("{report}");
    println!("checked in {:?}", start.elapsed());
}
