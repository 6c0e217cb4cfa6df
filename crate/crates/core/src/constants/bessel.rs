//! Bessel functions of the first kind J_ν (real order ν ≥ 0, x > 0) and
//! their positive zeros j_{ν,m}.
//!
//! J_ν is evaluated by the ascending series for small arguments and by
//! Miller's backward recurrence elsewhere, normalized with the Neumann
//! identity (x/2)^f / Γ(1+f) = Σ_k (f+2k) Γ(f+k) / (k! Γ(1+f)) J_{f+2k}(x).
//! Zeros are bracketed by a forward scan (consecutive zeros of J_ν are more
//! than 3 apart for every ν ≥ 0) and refined by safeguarded Newton steps
//! started from McMahon's expansion when it falls inside the bracket.

use std::f64::consts::PI;

use super::gamma::{gamma, ln_gamma};
use crate::error::{Error, Result};

/// Arguments below this use the ascending series.
const SERIES_MAX_ARG: f64 = 1.0;
const RESCALE_THRESHOLD: f64 = 1e200;
const SCAN_STEP: f64 = 1.0;
/// No two zeros of J_ν (ν ≥ 0) are closer than j_{0,2} − j_{0,1} ≈ 3.115.
const MIN_ZERO_GAP: f64 = 2.5;
const MAX_SCAN_STEPS: usize = 100_000;
const MAX_REFINE_STEPS: usize = 200;

/// J_ν(x) for ν ≥ 0 and x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_MAX_ARG {
        return bessel_j_series(nu, x);
    }
    bessel_j_pair(nu, x).0
}

/// Ascending power series Σ (−1)^k (x/2)^{2k+ν} / (k! Γ(k+ν+1)).
///
/// Accurate while the largest term stays moderate (x up to ~10); used as
/// the small-argument path and as an independent check of the recurrence.
pub fn bessel_j_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let lead = if nu == 0.0 {
        1.0
    } else {
        (nu * half.ln() - ln_gamma(nu + 1.0)).exp()
    };
    let q = -half * half;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// (J_ν(x), J_{ν+1}(x)) by normalized backward recurrence.
pub fn bessel_j_pair(nu: f64, x: f64) -> (f64, f64) {
    let n = nu.floor() as usize;
    let f = nu - n as f64;
    let reach = x.max(nu);
    let top = n + 1 + (reach - nu).max(0.0).ceil() as usize + 20 + (10.0 * x.cbrt()).ceil() as usize;
    let top = top + (top % 2);

    // Neumann weights for even offsets
    let half_top = top / 2;
    let mut weights = Vec::with_capacity(half_top + 1);
    weights.push(1.0);
    let mut p = 1.0;
    for i in 1..=half_top {
        let fi = i as f64;
        p *= (f + fi) / fi;
        weights.push((f + 2.0 * fi) / (f + fi) * p);
    }

    let mut upper = 0.0; // J_{f+k+1}
    let mut current = 1e-30; // J_{f+k}
    let mut norm = 0.0;
    let mut j_nu = 0.0;
    let mut j_nu1 = 0.0;
    let mut k = top;
    loop {
        if k == n {
            j_nu = current;
        } else if k == n + 1 {
            j_nu1 = current;
        }
        if k.is_multiple_of(2) {
            norm += weights[k / 2] * current;
        }
        if k == 0 {
            break;
        }
        let lower = 2.0 * (f + k as f64) / x * current - upper;
        upper = current;
        current = lower;
        k -= 1;
        if current.abs() > RESCALE_THRESHOLD {
            let s = 1.0 / RESCALE_THRESHOLD;
            current *= s;
            upper *= s;
            norm *= s;
            j_nu *= s;
            j_nu1 *= s;
        }
    }
    let target = if f == 0.0 {
        1.0
    } else {
        (f * (0.5 * x).ln()).exp() / gamma(1.0 + f)
    };
    let scale = target / norm;
    (j_nu * scale, j_nu1 * scale)
}

/// J_ν(x) and dJ_ν/dx.
fn value_and_derivative(nu: f64, x: f64) -> (f64, f64) {
    let (j, j1) = if x <= SERIES_MAX_ARG {
        (bessel_j_series(nu, x), bessel_j_series(nu + 1.0, x))
    } else {
        bessel_j_pair(nu, x)
    };
    (j, nu / x * j - j1)
}

/// McMahon's large-m expansion of j_{ν,m}.
pub fn mcmahon(nu: f64, m: usize) -> f64 {
    let beta = (m as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8.powi(3))
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8.powi(5))
}

/// Sequential enumeration of the positive zeros of J_ν in increasing order.
#[derive(Debug, Clone)]
pub struct BesselZeros {
    nu: f64,
    index: usize,
    last: Option<f64>,
}

impl BesselZeros {
    pub fn new(nu: f64) -> Self {
        assert!(nu >= 0.0, "Bessel order must be non-negative");
        Self { nu, index: 0, last: None }
    }

    pub fn order(&self) -> f64 {
        self.nu
    }

    /// Number of zeros produced so far.
    pub fn produced(&self) -> usize {
        self.index
    }

    pub fn next_zero(&mut self) -> Result<f64> {
        let nu = self.nu;
        let start = match self.last {
            // strictly below ν + 2.338 (ν/2)^{1/3}, a lower bound for j_{ν,1}
            None => (nu + 2.0 * (0.5 * nu).cbrt()).max(2.0),
            Some(z) => z + MIN_ZERO_GAP,
        };
        let (lo, hi) = self.bracket(start)?;
        let guess = mcmahon(nu, self.index + 1);
        let zero = refine(nu, lo, hi, guess)?;
        self.index += 1;
        self.last = Some(zero);
        Ok(zero)
    }

    fn bracket(&self, start: f64) -> Result<(f64, f64)> {
        let mut a = start;
        let mut fa = bessel_j(self.nu, a);
        for _ in 0..MAX_SCAN_STEPS {
            let b = a + SCAN_STEP;
            let fb = bessel_j(self.nu, b);
            if fa == 0.0 {
                return Ok((a, a));
            }
            if fa.signum() != fb.signum() || fb == 0.0 {
                return Ok((a, b));
            }
            a = b;
            fa = fb;
        }
        Err(Error::Convergence {
            what: "Bessel zero bracketing",
            iterations: MAX_SCAN_STEPS,
            residual: fa.abs(),
        })
    }
}

impl Iterator for BesselZeros {
    type Item = f64;

    /// Panics on internal numerics failure; use [`BesselZeros::next_zero`]
    /// to handle it.
    fn next(&mut self) -> Option<f64> {
        Some(self.next_zero().expect("Bessel zero refinement failed"))
    }
}

fn refine(nu: f64, mut lo: f64, mut hi: f64, guess: f64) -> Result<f64> {
    if lo == hi {
        return Ok(lo);
    }
    let f_lo = bessel_j(nu, lo);
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_REFINE_STEPS {
        let (j, dj) = value_and_derivative(nu, x);
        if j == 0.0 {
            return Ok(x);
        }
        if j.signum() == f_lo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - j / dj;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x || hi - lo <= 4.0 * f64::EPSILON * x {
            return Ok(x);
        }
        // Newton has converged to rounding noise
        if step >= last_step && step <= 1e-13 * x {
            return Ok(x);
        }
        last_step = step;
    }
    Err(Error::Convergence {
        what: "Bessel zero refinement",
        iterations: MAX_REFINE_STEPS,
        residual: hi - lo,
    })
}

/// The m-th positive zero of J_ν (m ≥ 1).
pub fn bessel_zero(nu: f64, m: usize) -> Result<f64> {
    if nu < 0.0 || !nu.is_finite() {
        return Err(Error::Restriction(format!("Bessel order must be non-negative, got {nu}")));
    }
    if m == 0 {
        return Err(Error::Restriction("zero index m starts at 1".into()));
    }
    let mut zeros = BesselZeros::new(nu);
    let mut z = 0.0;
    for _ in 0..m {
        z = zeros.next_zero()?;
    }
    Ok(z)
}
