//! Singular weighted integrals over balls and boxes used by the bounds.
//!
//!     cargo run --release --example weighted_integrals

use hardy_lab::constants::tau_plus;
use hardy_lab::geometry::{weighted_integral, DomainSpec, WeightKind};

fn main() -> hardy_lab::Result<()> {
    let domains: Vec<DomainSpec> = vec![
        "ball:N=2,R=1".parse()?,
        "ball:N=3,R=1".parse()?,
        "box:N=2,sides=1x1,center=0.1x0".parse()?,
        "box:N=3,sides=1,center=0.1x0x0".parse()?,
    ];
    for d in &domains {
        let n = d.dim();
        let tau = tau_plus(n, 1.0)?;
        println!("{d}  |Ω| = {:.6}  D₀ = {:.6}", d.volume(), d.d0());
        let mut weights = vec![WeightKind::LogPower, WeightKind::Power(tau), WeightKind::DistPower(tau)];
        if n >= 3 {
            weights.insert(0, WeightKind::InvSquare);
        }
        for w in weights {
            println!("    ∫ {w} = {:.12}", weighted_integral(d, w)?);
        }
    }
    Ok(())
}
