//! Yang's inequality on a computed spectrum and the Cheng-Yang recursion.

use crate::constants::mu_critical;
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YangGap {
    /// Σ_{i≤k} (λ_{k+1} − λ_i)².
    pub lhs: f64,
    /// factor · Σ_{i≤k} (λ_{k+1} − λ_i) λ_i.
    pub rhs: f64,
    pub factor: f64,
}

/// 4/N for μ ≥ 0 and (4/N)(−μ₀/(μ−μ₀)) for μ₀ < μ < 0.
pub fn yang_factor(dim: usize, mu: f64) -> Result<f64> {
    let n = dim as f64;
    if mu >= 0.0 {
        return Ok(4.0 / n);
    }
    let mu0 = mu_critical(dim);
    if dim < 3 {
        return Err(Error::Restriction("μ < 0 requires N ≥ 3".into()));
    }
    if mu <= mu0 {
        return Err(Error::Restriction(format!(
            "the Yang inequality needs μ > μ₀ = {mu0} strictly, got μ = {mu}"
        )));
    }
    Ok(4.0 / n * (-mu0 / (mu - mu0)))
}

pub fn yang_inequality_gap(spectrum: &Spectrum, k: usize) -> Result<YangGap> {
    yang_gap_values(&spectrum.values, spectrum.dim(), spectrum.mu, k)
}

pub(crate) fn yang_gap_values(values: &[f64], dim: usize, mu: f64, k: usize) -> Result<YangGap> {
    if k == 0 {
        return Err(Error::Restriction("k must be at least 1".into()));
    }
    if values.len() < k + 1 {
        return Err(Error::InsufficientSpectrum { needed: k + 1, available: values.len() });
    }
    let factor = yang_factor(dim, mu)?;
    let next = values[k];
    let (mut sq, mut lin) = (0.0, 0.0);
    for &l in &values[..k] {
        sq += (next - l) * (next - l);
        lin += (next - l) * l;
    }
    Ok(YangGap { lhs: sq, rhs: factor * lin, factor })
}

/// C(N,k) = 1 − (1/6)(k/(k+1))^{4/N}(1+2/N)(1+4/N)/(k+1)³.
pub fn recursion_constant(dim: usize, k: usize) -> f64 {
    let n = dim as f64;
    let kf = k as f64;
    1.0 - (kf / (kf + 1.0)).powf(4.0 / n) * (1.0 + 2.0 / n) * (1.0 + 4.0 / n) / (6.0 * (kf + 1.0).powi(3))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recursion {
    /// Λ_j = mean of λ₁..λ_j, j = 1..k.
    pub mean: Vec<f64>,
    /// T_j = mean of λ₁²..λ_j².
    pub mean_square: Vec<f64>,
    /// F_j = (1+2/N)Λ_j² − T_j.
    pub f: Vec<f64>,
    /// C(N, j).
    pub c: Vec<f64>,
    /// √(N/(N+2)·((N+4)/N)²·F_k). Not an upper bound for λ_{k+1} on its own
    /// (λ₂ of the unit ball with μ = 1 exceeds it); only its telescoped form is
    /// compared with (1+4/N)k^{2/N}λ₁.
    pub bound_next: f64,
}

impl Recursion {
    pub fn k(&self) -> usize {
        self.f.len()
    }

    /// (2/N)λ₁² k^{4/N} Π_{j<k} C(N,j), the value F_k is bounded by when the
    /// recursion inequality is telescoped down to F₁.
    pub fn telescoped_f(&self, dim: usize) -> f64 {
        telescoped_f(dim, self.mean[0], self.k())
    }
}

pub fn telescoped_f(dim: usize, lambda1: f64, k: usize) -> f64 {
    let n = dim as f64;
    let product: f64 = (1..k).map(|j| recursion_constant(dim, j)).product();
    2.0 / n * lambda1 * lambda1 * (k as f64).powf(4.0 / n) * product
}

/// C(N,k)((k+1)/k)^{4/N} F_k, the bound on F_{k+1}.
pub fn recursion_step_bound(dim: usize, k: usize, f_k: f64) -> f64 {
    let kf = k as f64;
    recursion_constant(dim, k) * ((kf + 1.0) / kf).powf(4.0 / dim as f64) * f_k
}

/// √(N/(N+2)·((N+4)/N)²·F).
pub fn next_eigenvalue_bound(dim: usize, f: f64) -> f64 {
    let n = dim as f64;
    (n / (n + 2.0) * ((n + 4.0) / n).powi(2) * f).sqrt()
}

pub fn cheng_yang_recursion(prefix: &[f64], dim: usize) -> Result<Recursion> {
    if prefix.is_empty() {
        return Err(Error::InsufficientSpectrum { needed: 1, available: 0 });
    }
    if prefix.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::Inconsistent("the recursion needs positive eigenvalues".into()));
    }
    if prefix.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Inconsistent("eigenvalues must be ascending".into()));
    }
    let n = dim as f64;
    let k = prefix.len();
    let mut out = Recursion {
        mean: Vec::with_capacity(k),
        mean_square: Vec::with_capacity(k),
        f: Vec::with_capacity(k),
        c: Vec::with_capacity(k),
        bound_next: 0.0,
    };
    let (mut s1, mut s2) = (0.0, 0.0);
    for (j, &l) in prefix.iter().enumerate() {
        let jf = (j + 1) as f64;
        s1 += l;
        s2 += l * l;
        let (lam, t) = (s1 / jf, s2 / jf);
        out.mean.push(lam);
        out.mean_square.push(t);
        out.f.push((1.0 + 2.0 / n) * lam * lam - t);
        out.c.push(recursion_constant(dim, j + 1));
    }
    out.bound_next = next_eigenvalue_bound(dim, out.f[k - 1]);
    Ok(out)
}
