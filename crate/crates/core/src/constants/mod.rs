//! Dimension-dependent constants and special functions.

mod bessel;
mod gamma;

use std::f64::consts::{E, PI};
use std::sync::OnceLock;

pub use bessel::{bessel_j, bessel_j_pair, bessel_j_series, bessel_zero, mcmahon, BesselZeros};
pub use gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};

/// Dimensions with a cached constant table.
const CACHED_DIMS: usize = 32;

static CACHE: [OnceLock<DimensionConstants>; CACHED_DIMS] = [const { OnceLock::new() }; CACHED_DIMS];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionConstants {
    pub dim: usize,
    /// Surface area ω_{N−1} of the unit sphere in R^N.
    pub omega: f64,
    /// |B₁| = ω_{N−1}/N.
    pub ball_volume: f64,
    /// Weyl constant c_N = (2π)²|B₁|^{−2/N}.
    pub weyl: f64,
    /// Li-Yau constant C_N = N/(N+2)·c_N.
    pub li_yau: f64,
    /// S_N = 2^{2/N} π^{1+1/N} Γ((N+1)/2).
    pub sobolev: f64,
    /// Critical Hardy constant μ₀ = −(N−2)²/4.
    pub mu_critical: f64,
}

impl DimensionConstants {
    fn compute(dim: usize) -> Self {
        let n = dim as f64;
        let omega = 2.0 * PI.powf(0.5 * n) / gamma(0.5 * n);
        let ball_volume = omega / n;
        let weyl = (2.0 * PI).powi(2) * ball_volume.powf(-2.0 / n);
        Self {
            dim,
            omega,
            ball_volume,
            weyl,
            li_yau: n / (n + 2.0) * weyl,
            sobolev: 2f64.powf(2.0 / n) * PI.powf(1.0 + 1.0 / n) * gamma(0.5 * (n + 1.0)),
            mu_critical: -(n - 2.0).powi(2) / 4.0,
        }
    }
}

/// All constants for dimension `dim` (N ≥ 2).
pub fn dimension_constants(dim: usize) -> Result<DimensionConstants> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, requirement: "N ≥ 2 is required" });
    }
    Ok(match CACHE.get(dim) {
        Some(cell) => *cell.get_or_init(|| DimensionConstants::compute(dim)),
        None => DimensionConstants::compute(dim),
    })
}

pub fn mu_critical(dim: usize) -> f64 {
    let n = dim as f64;
    -(n - 2.0).powi(2) / 4.0
}

/// Rejects μ < μ₀(N), and μ < 0 in two dimensions.
pub fn check_mu(dim: usize, mu: f64) -> Result<()> {
    if !mu.is_finite() {
        return Err(Error::Restriction(format!("μ must be finite, got {mu}")));
    }
    if dim == 2 && mu < 0.0 {
        return Err(Error::Restriction("μ < 0 requires N ≥ 3".into()));
    }
    let mu0 = mu_critical(dim);
    if mu < mu0 {
        return Err(Error::SubcriticalParameter { mu, mu_critical: mu0, dim });
    }
    Ok(())
}

/// τ₊(μ) = −(N−2)/2 + √(μ − μ₀), the exponent of the regular radial
/// solution of (−Δ + μ/|x|²)u = 0.
pub fn tau_plus(dim: usize, mu: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidDimension { dim, requirement: "N ≥ 2 is required" });
    }
    let mu0 = mu_critical(dim);
    if mu < mu0 {
        return Err(Error::SubcriticalParameter { mu, mu_critical: mu0, dim });
    }
    Ok(-0.5 * (dim as f64 - 2.0) + (mu - mu0).sqrt())
}

pub fn sobolev_constant(dim: usize) -> Result<f64> {
    if dim < 3 {
        return Err(Error::InvalidDimension { dim, requirement: "the Sobolev constant is only used for N ≥ 3" });
    }
    Ok(dimension_constants(dim)?.sobolev)
}

/// Effective Bessel order ν(l) = √((l + (N−2)/2)² + μ) of angular channel l.
pub fn channel_order(dim: usize, mu: f64, l: usize) -> f64 {
    let a = l as f64 + 0.5 * (dim as f64 - 2.0);
    (a * a + mu).max(0.0).sqrt()
}

/// Dimension of the space of degree-l spherical harmonics on S^{N−1}.
pub fn channel_multiplicity(dim: usize, l: usize) -> usize {
    match (dim, l) {
        (_, 0) => 1,
        (2, _) => 2,
        _ => {
            // (2l+N−2)(l+N−3)! / (l!(N−2)!) = C(l+N−3, l)·(2l+N−2)/(N−2)
            let mut binom: u128 = 1;
            for i in 1..=(dim - 3) as u128 {
                binom = binom * (l as u128 + i) / i;
            }
            (binom * (2 * l + dim - 2) as u128 / (dim - 2) as u128) as usize
        }
    }
}

/// e^{−1}, the factor in the heat-semigroup lower bounds.
pub const INV_E: f64 = 1.0 / E;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weyl_constant_in_two_dimensions() {
        let c = dimension_constants(2).unwrap();
        assert_relative_eq!(c.weyl, 4.0 * PI, max_relative = 1e-14);
        assert_eq!(c.mu_critical, 0.0);
    }

    #[test]
    fn three_dimensional_values() {
        let c = dimension_constants(3).unwrap();
        assert_eq!(c.mu_critical, -0.25);
        // frozen from a 30-digit evaluation of the closed forms
        assert_relative_eq!(c.li_yau, 9.115_599_744_691_194, max_relative = 1e-13);
        assert_relative_eq!(c.weyl, 15.192_666_241_151_99, max_relative = 1e-13);
        assert_relative_eq!(c.sobolev, 7.303_872_119_375_109, max_relative = 1e-13);
        assert_relative_eq!(c.ball_volume, 4.0 * PI / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn sobolev_constant_values() {
        assert_relative_eq!(sobolev_constant(4).unwrap(), 7.863_004_757_550_973, max_relative = 1e-13);
        for n in 3..10 {
            let s = sobolev_constant(n).unwrap();
            let nf = n as f64;
            let reduced = s / (2f64.powf(2.0 / nf) * PI.powf(1.0 + 1.0 / nf));
            assert_relative_eq!(reduced, gamma(0.5 * (nf + 1.0)), max_relative = 1e-14);
        }
        assert!(sobolev_constant(2).is_err());
    }

    #[test]
    fn li_yau_to_weyl_ratio() {
        for n in 2..=10 {
            let c = dimension_constants(n).unwrap();
            assert!(c.li_yau < c.weyl);
            assert_relative_eq!(c.li_yau / c.weyl, n as f64 / (n as f64 + 2.0), max_relative = 1e-15);
            assert_relative_eq!(c.ball_volume, c.omega / n as f64, max_relative = 1e-15);
            assert!(c.omega > 0.0 && c.sobolev > 0.0);
        }
    }

    #[test]
    fn tau_plus_values() {
        assert_eq!(tau_plus(3, 0.0).unwrap(), 0.0);
        assert_eq!(tau_plus(3, -0.25).unwrap(), -0.5);
        assert_relative_eq!(tau_plus(3, 2.0).unwrap(), 1.0, max_relative = 1e-15);
        assert!(matches!(tau_plus(3, -0.3), Err(Error::SubcriticalParameter { .. })));
    }

    #[test]
    fn invalid_dimension() {
        assert!(matches!(dimension_constants(1), Err(Error::InvalidDimension { .. })));
    }

    #[test]
    fn multiplicities() {
        assert_eq!(channel_multiplicity(3, 4), 9);
        assert_eq!(channel_multiplicity(2, 5), 2);
        assert_eq!(channel_multiplicity(4, 2), 9); // (l+1)²
        assert_eq!(channel_multiplicity(5, 1), 5);
        assert_eq!(channel_multiplicity(5, 2), 14);
    }

    #[test]
    fn channel_orders() {
        assert_relative_eq!(channel_order(3, 0.0, 0), 0.5);
        assert_eq!(channel_order(3, -0.25, 0), 0.0);
        assert_relative_eq!(channel_order(3, 1.0, 0), 1.25f64.sqrt());
    }
}
