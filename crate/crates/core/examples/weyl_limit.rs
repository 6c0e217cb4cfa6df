//! Convergence of λ_k k^{−2/N} to the Weyl constant c_N|Ω|^{−2/N}, for
//! several μ, from 10⁵ Bessel-zero eigenvalues.
//!
//!     cargo run --release --example weyl_limit

use hardy_lab::asymptotics::{counting_function, weyl_ratio};
use hardy_lab::constants::mu_critical;
use hardy_lab::spectrum::ball_spectrum_oracle;

fn main() -> hardy_lab::Result<()> {
    for dim in [2, 3] {
        let mut mus = vec![0.0, 1.0];
        if dim == 3 {
            mus.insert(0, mu_critical(dim));
        }
        for mu in mus {
            let s = ball_spectrum_oracle(dim, mu, 1.0, 100_000)?;
            let v = s.domain.volume();
            let ratios: Vec<String> = [100, 1000, 10_000, 100_000]
                .iter()
                .map(|&k| weyl_ratio(&s, v, k).map(|r| format!("{r:.5}")))
                .collect::<Result<_, _>>()?;
            println!("N = {dim}, μ = {mu:>5}: ratio at k = 1e2..1e5: {}", ratios.join(" "));
            println!("    N(1000) = {}", counting_function(&s, 1000.0)?);
        }
    }
    Ok(())
}
