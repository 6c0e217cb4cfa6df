//! The radial finite-volume scheme against Bessel zeros, channel by
//! channel, including the critical parameter μ = μ₀.
//!
//!     cargo run --release --example radial_fd_vs_oracle

use hardy_lab::spectrum::{ball_channel_eigenvalues, radial_fd_spectrum};

fn main() -> hardy_lab::Result<()> {
    let (dim, mesh) = (3, 4000);
    println!("N = {dim}, mesh {mesh}: worst relative error over the first 10 eigenvalues");
    println!("{:>6} {:>3} {:>10}", "μ", "l", "rel. err");
    for mu in [-0.25, -0.1, 0.0, 1.0, 5.0] {
        for l in 0..=3 {
            let fd = radial_fd_spectrum(dim, mu, 1.0, l, mesh)?;
            let exact = ball_channel_eigenvalues(dim, mu, 1.0, l, 10)?;
            let worst = fd.values.iter().zip(&exact).map(|(a, b)| (a - b).abs() / b).fold(0.0, f64::max);
            println!("{mu:>6} {l:>3} {worst:>10.2e}");
        }
    }
    Ok(())
}
