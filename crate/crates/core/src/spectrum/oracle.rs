//! Ball spectra from Bessel zeros: λ = (j_{ν(l),m}/R)² with the
//! multiplicity of the degree-l spherical harmonics.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{Method, Spectrum};
use crate::constants::{channel_multiplicity, channel_order, check_mu, BesselZeros};
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;

/// Relative accuracy of the oracle eigenvalues (twice the zero accuracy).
const ORACLE_REL_ERROR: f64 = 1e-12;

/// One angular-momentum sector of the ball problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialChannel {
    pub l: usize,
    pub multiplicity: usize,
    pub nu: f64,
}

impl RadialChannel {
    pub fn new(dim: usize, mu: f64, l: usize) -> Self {
        Self { l, multiplicity: channel_multiplicity(dim, l), nu: channel_order(dim, mu, l) }
    }
}

/// First `count` eigenvalues of channel l on the ball of radius R.
pub fn ball_channel_eigenvalues(dim: usize, mu: f64, radius: f64, l: usize, count: usize) -> Result<Vec<f64>> {
    check_mu(dim, mu)?;
    let mut zeros = BesselZeros::new(RadialChannel::new(dim, mu, l).nu);
    (0..count).map(|_| zeros.next_zero().map(|j| (j / radius).powi(2))).collect()
}

struct Pending {
    zero: f64,
    l: usize,
    m: usize,
    zeros: BesselZeros,
}

impl Pending {
    fn key(&self) -> (f64, usize, usize) {
        (self.zero, self.l, self.m)
    }
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Pending {}
impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.key(), other.key());
        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
    }
}

fn open_channel(dim: usize, mu: f64, l: usize) -> Result<Pending> {
    let mut zeros = BesselZeros::new(channel_order(dim, mu, l));
    let zero = zeros.next_zero()?;
    Ok(Pending { zero, l, m: 1, zeros })
}

/// The k_max smallest eigenvalues on the ball of radius R centered at 0.
///
/// Channels are merged lazily: channel l+1 is opened only when the first
/// zero of channel l is emitted, which is sound because j_{ν,1} increases
/// with ν. Ties are broken by (l, m).
pub fn ball_spectrum_oracle(dim: usize, mu: f64, radius: f64, k_max: usize) -> Result<Spectrum> {
    let domain = DomainSpec::ball(dim, radius)?;
    check_mu(dim, mu)?;
    if k_max == 0 {
        return Err(Error::Restriction("k_max must be at least 1".into()));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(open_channel(dim, mu, 0)?));
    let mut values = Vec::with_capacity(k_max);
    while values.len() < k_max {
        let Reverse(mut top) = heap.pop().expect("channel 0 never runs out");
        let lambda = (top.zero / radius).powi(2);
        let mult = channel_multiplicity(dim, top.l);
        values.extend(std::iter::repeat_n(lambda, mult.min(k_max - values.len())));
        if top.m == 1 {
            heap.push(Reverse(open_channel(dim, mu, top.l + 1)?));
        }
        top.zero = top.zeros.next_zero()?;
        top.m += 1;
        heap.push(Reverse(top));
    }
    Ok(Spectrum { domain, mu, method: Method::BallOracle, est_rel_error: ORACLE_REL_ERROR, values, warnings: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn first_eigenvalues() {
        let s = ball_spectrum_oracle(3, 0.0, 1.0, 1).unwrap();
        assert_relative_eq!(s.values[0], PI * PI, max_relative = 1e-13);
        let j01_sq = 5.783_185_962_946_784;
        assert_relative_eq!(ball_spectrum_oracle(3, -0.25, 1.0, 1).unwrap().values[0], j01_sq, max_relative = 1e-12);
        assert_relative_eq!(ball_spectrum_oracle(2, 0.0, 1.0, 1).unwrap().values[0], j01_sq, max_relative = 1e-12);
    }

    #[test]
    fn multiplicities_are_expanded() {
        // N = 3, μ = 0: π², then the l = 1 triple j_{3/2,1}²
        let s = ball_spectrum_oracle(3, 0.0, 1.0, 4).unwrap();
        assert_relative_eq!(s.values[1], 20.190_728_556_426_62, max_relative = 1e-12);
        assert_eq!(s.values[1], s.values[2]);
        assert_eq!(s.values[2], s.values[3]);
        assert_eq!(s.k_max(), 4);
    }

    #[test]
    fn brute_force_enumeration_agrees() {
        let (dim, mu) = (2, 0.3);
        let s = ball_spectrum_oracle(dim, mu, 1.0, 300).unwrap();
        let cutoff = s.values[299];
        let mut all = Vec::new();
        for l in 0..60 {
            let ch = RadialChannel::new(dim, mu, l);
            for v in ball_channel_eigenvalues(dim, mu, 1.0, l, 30).unwrap() {
                if v <= cutoff {
                    all.extend(std::iter::repeat_n(v, ch.multiplicity));
                }
            }
        }
        all.sort_by(f64::total_cmp);
        assert!(all.len() >= 300);
        assert_eq!(&all[..300], &s.values[..]);
    }

    #[test]
    fn subcritical_mu_is_rejected() {
        assert!(matches!(ball_spectrum_oracle(3, -0.3, 1.0, 5), Err(Error::SubcriticalParameter { .. })));
        assert!(matches!(ball_spectrum_oracle(2, -0.1, 1.0, 5), Err(Error::Restriction(_))));
    }
}
