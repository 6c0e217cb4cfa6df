//! Cartesian finite differences on a square with the origin just off a
//! grid node, compared with π²(m² + n²) at μ = 0, then switched on.
//!
//!     cargo run --release --example box_spectrum

use std::f64::consts::PI;

use hardy_lab::geometry::DomainSpec;
use hardy_lab::spectrum::cartesian_fd_spectrum;

fn main() -> hardy_lab::Result<()> {
    let square: DomainSpec = "box:N=2,sides=1x1,center=0.001x0".parse()?;
    let mut exact: Vec<f64> = (1..8).flat_map(|m| (1..8).map(move |n| PI * PI * (m * m + n * n) as f64)).collect();
    exact.sort_by(f64::total_cmp);

    let free = cartesian_fd_spectrum(&square, 0.0, 200, 10)?;
    println!("μ = 0, mesh 200 (est. rel. error {:.1e})", free.est_rel_error);
    for (k, (v, e)) in free.values.iter().zip(&exact).enumerate() {
        println!("  λ_{:<2} = {v:>12.6}   π²(m²+n²) = {e:>12.6}   rel. diff {:.1e}", k + 1, (v - e).abs() / e);
    }

    let with_potential = cartesian_fd_spectrum(&square, 1.0, 200, 10)?;
    println!("μ = 1, mesh 200 (est. rel. error {:.1e})", with_potential.est_rel_error);
    for (k, v) in with_potential.values.iter().enumerate() {
        println!("  λ_{:<2} = {v:>12.6}", k + 1);
    }
    for w in &with_potential.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
