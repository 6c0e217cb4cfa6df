//! Certifies every lower and upper bound against the ball spectrum for
//! k = 1..500 and prints a short table.
//!
//!     cargo run --release --example certify_bounds

use hardy_lab::bounds::{certify, BoundInputs, BoundKind, CertificationSummary};
use hardy_lab::spectrum::ball_spectrum_oracle;

fn main() -> hardy_lab::Result<()> {
    let ks: Vec<usize> = (1..=500).collect();
    for dim in [3, 4] {
        for mu in [-0.25, -0.1, 0.5, 1.0, 5.0] {
            if mu < hardy_lab::constants::mu_critical(dim) {
                continue;
            }
            let s = ball_spectrum_oracle(dim, mu, 1.0, 500)?;
            let inputs = BoundInputs::from_domain(&s.domain, mu, 4000)?;
            let reports = certify(&s, &inputs, &ks)?;
            let summary = CertificationSummary::of(&reports);
            println!("N = {dim}, μ = {mu:>5}: {} checks, {} failed", summary.total, summary.failed);
        }
    }

    let mu = -0.1;
    let s = ball_spectrum_oracle(3, mu, 1.0, 500)?;
    let inputs = BoundInputs::from_domain(&s.domain, mu, 4000)?;
    let reports = certify(&s, &inputs, &[1, 10, 100, 500])?;
    println!();
    println!("N = 3, μ = {mu}");
    println!("{:>4} {:>12} {:>12} {:>12} {:>12}", "k", "LY lower", "Karachalios", "λ_k", "Cheng-Yang");
    for k in [1, 10, 100, 500] {
        let get = |kind| reports.iter().find(|r| r.k == k && r.kind == kind).map(|r| r.bound).unwrap_or(f64::NAN);
        println!(
            "{k:>4} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            get(BoundKind::LiYauKLower),
            get(BoundKind::KarachaliosLower),
            s.values[k - 1],
            get(BoundKind::ChengYangUpper)
        );
    }
    Ok(())
}
