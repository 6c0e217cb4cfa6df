//! Yang's inequality Σ(λ_{k+1}−λ_i)² ≤ a Σ(λ_{k+1}−λ_i)λ_i on ball spectra
//! and the Cheng-Yang recursion constants.
//!
//!     cargo run --release --example yang_inequality

use hardy_lab::bounds::{cheng_yang_recursion, recursion_constant, telescoped_f, yang_inequality_gap, next_eigenvalue_bound};
use hardy_lab::spectrum::ball_spectrum_oracle;

fn main() -> hardy_lab::Result<()> {
    for (dim, mu) in [(2, 1.0), (3, -0.2), (3, -0.1), (3, 1.0), (4, 5.0)] {
        let s = ball_spectrum_oracle(dim, mu, 1.0, 201)?;
        let mut tightest = f64::INFINITY;
        let mut factor = 0.0;
        for k in 1..=200 {
            let g = yang_inequality_gap(&s, k)?;
            tightest = tightest.min(g.rhs / g.lhs);
            factor = g.factor;
        }
        println!("N = {dim}, μ = {mu:>4}: factor {factor:.4}, min rhs/lhs over k ≤ 200 = {tightest:.4}");
    }

    let dim = 3;
    let s = ball_spectrum_oracle(dim, 1.0, 1.0, 1000)?;
    let r = cheng_yang_recursion(&s.values, dim)?;
    let l1 = s.values[0];
    println!();
    println!("recursion on N = 3, μ = 1 (λ₁ = {l1:.6})");
    println!("{:>5} {:>10} {:>14} {:>14} {:>14}", "k", "C(3,k)", "F_k", "telescoped", "closed form");
    for k in [1, 10, 100, 1000] {
        let closed = (1.0 + 4.0 / dim as f64) * (k as f64).powf(2.0 / dim as f64) * l1;
        println!(
            "{k:>5} {:>10.6} {:>14.4} {:>14.4} {:>14.4}",
            recursion_constant(dim, k),
            r.f[k - 1],
            next_eigenvalue_bound(dim, telescoped_f(dim, l1, k)),
            closed
        );
    }
    Ok(())
}
