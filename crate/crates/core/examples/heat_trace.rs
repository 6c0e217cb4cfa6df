//! The heat trace t^{N/2} Z(t) (4π)^{N/2}/|Ω| on the unit disk as t → 0,
//! with the truncation tail bounded from the Weyl envelope.
//!
//!     cargo run --release --example heat_trace

use hardy_lab::asymptotics::{heat_trace, partition_function};
use hardy_lab::spectrum::ball_spectrum_oracle;

fn main() -> hardy_lab::Result<()> {
    let s = ball_spectrum_oracle(2, 0.0, 1.0, 100_000)?;
    let ts = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4];
    let trace = heat_trace(&s, &ts)?;
    println!("{:>8} {:>10} {:>12}", "t", "ratio", "tail/value");
    for (t, ratio) in &trace.samples {
        let z = partition_function(&s, *t)?;
        println!("{t:>8.0e} {ratio:>10.6} {:>12.1e}", z.tail_bound / z.value);
    }
    for t in &trace.refused {
        println!("{t:>8.0e} refused: 10⁵ eigenvalues do not bound the tail");
    }
    Ok(())
}
