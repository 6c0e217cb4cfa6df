//! The critical parameter μ = μ₀ = −1/4 in three dimensions: oracle
//! eigenvalue, radial finite volumes, and the bounds that still apply.
//!
//!     cargo run --release --example critical_case

use hardy_lab::bounds::{cheng_yang_upper, karachalios_lower, lower_bound_k, sigma_mu, BoundInputs};
use hardy_lab::constants::mu_critical;
use hardy_lab::spectrum::{ball_spectrum_oracle, radial_fd_spectrum};

fn main() -> hardy_lab::Result<()> {
    let dim = 3;
    let mu = mu_critical(dim);
    let s = ball_spectrum_oracle(dim, mu, 1.0, 20)?;
    println!("λ₁ (Bessel zero j_0,1²) = {:.9}", s.values[0]);
    for mesh in [1000, 2000, 4000, 8000] {
        let fd = radial_fd_spectrum(dim, mu, 1.0, 0, mesh)?;
        println!("radial scheme, mesh {mesh:>5}: λ₁ = {:.9}", fd.values[0]);
    }
    let inputs = BoundInputs::from_domain(&s.domain, mu, 4000)?;
    println!("σ_μ₀ = {:.6}", sigma_mu(&inputs)?);
    println!("{:>3} {:>12} {:>12} {:>12} {:>12}", "k", "e⁻¹σk^{2/3}", "lower", "λ_k", "upper");
    for k in [1, 2, 5, 10, 20] {
        println!(
            "{k:>3} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            karachalios_lower(&inputs, k)?,
            lower_bound_k(&inputs, k)?,
            s.values[k - 1],
            cheng_yang_upper(&inputs, None, k)?
        );
    }
    Ok(())
}
