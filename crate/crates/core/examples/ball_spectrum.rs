//! Lowest eigenvalues of −Δ + μ/|x|² on the unit ball of R³ from Bessel
//! zeros, for a few values of μ.
//!
//!     cargo run --release --example ball_spectrum

use hardy_lab::constants::{channel_multiplicity, channel_order, mu_critical};
use hardy_lab::spectrum::ball_spectrum_oracle;

fn main() -> hardy_lab::Result<()> {
    let dim = 3;
    println!("N = {dim}, μ₀ = {}", mu_critical(dim));
    for mu in [mu_critical(dim), -0.1, 0.0, 1.0, 5.0] {
        let s = ball_spectrum_oracle(dim, mu, 1.0, 10)?;
        let shown: Vec<String> = s.values.iter().map(|v| format!("{v:.6}")).collect();
        println!("μ = {mu:>5}: {}", shown.join(" "));
    }
    println!();
    println!("channel  order ν(l) at μ = 1  multiplicity");
    for l in 0..5 {
        println!("{l:>7}  {:>17.6}  {:>12}", channel_order(dim, 1.0, l), channel_multiplicity(dim, l));
    }
    Ok(())
}
