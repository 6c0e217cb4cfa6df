//! Finite differences for the radial channels of the ball.
//!
//! The default scheme works with u = r^{τ} w where r^{τ} is the regular
//! solution exponent of the channel (τ = ν − (N−2)/2). Then
//! −(r^{2ν+1} w')' = λ r^{2ν+1} w on (0, R) with w(R) = 0 and no condition at
//! r = 0 beyond regularity. A finite-volume discretization on a uniform mesh
//! (exact edge integrals of r^{2ν+1}, lumped dual-cell masses) gives a
//! symmetric tridiagonal matrix and second-order eigenvalues for every ν ≥ 0,
//! including ν = 0. All weights are formed in log space so that large ν
//! does not underflow.

use super::eigen::{tridiagonal_eigenvector, tridiagonal_smallest};
use super::{Method, Spectrum};
use crate::constants::{channel_multiplicity, channel_order, check_mu};
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;

/// Below this mesh the results carry an accuracy warning.
pub const MIN_RADIAL_MESH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadialScheme {
    /// Finite volumes for −(r^{2ν+1}w')' = λ r^{2ν+1} w.
    #[default]
    Weighted,
    /// −v'' + (ν² − 1/4)/r² v with v(0) = v(R) = 0 on a uniform mesh.
    Liouville,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialFd {
    pub values: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Symmetric tridiagonal form of one channel, plus the lumped masses needed
/// to map eigenvectors back to w.
pub(crate) struct RadialMatrix {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    /// index of the first unknown node (node i sits at r = i·h)
    pub first: usize,
    pub h: f64,
    pub ln_mass: Vec<f64>,
}

/// ln ∫_a^b r^p dr for 0 ≤ a < b.
fn ln_power_integral(a: f64, b: f64, p: f64) -> f64 {
    let q = p + 1.0;
    let tail = if a > 0.0 { (-(q * (a / b).ln()).exp()).ln_1p() } else { 0.0 };
    q * b.ln() + tail - q.ln()
}

pub(crate) fn radial_matrix(nu: f64, radius: f64, mesh: usize, scheme: RadialScheme) -> RadialMatrix {
    let n = mesh;
    let h = radius / n as f64;
    let r = |i: usize| i as f64 * h;
    match scheme {
        RadialScheme::Liouville => {
            let q = nu * nu - 0.25;
            let d = (1..n).map(|i| 2.0 / (h * h) + q / (r(i) * r(i))).collect();
            let e = vec![-1.0 / (h * h); n - 2];
            RadialMatrix { d, e, first: 1, h, ln_mass: vec![0.0; n - 1] }
        }
        RadialScheme::Weighted => {
            let p = 2.0 * nu + 1.0;
            // for ν ≥ 1 the weight near 0 is negligible and w(0) is dropped
            let first = usize::from(nu >= 1.0);
            let ln_edge: Vec<f64> = (0..n).map(|i| ln_power_integral(r(i), r(i + 1), p) - 2.0 * h.ln()).collect();
            let ln_mass: Vec<f64> = (first..n)
                .map(|i| ln_power_integral((r(i) - 0.5 * h).max(0.0), r(i) + 0.5 * h, p))
                .collect();
            let mut d = Vec::with_capacity(n - first);
            for i in first..n {
                let lm = ln_mass[i - first];
                let left = if i > 0 { (ln_edge[i - 1] - lm).exp() } else { 0.0 };
                d.push(left + (ln_edge[i] - lm).exp());
            }
            let e = (first..n - 1)
                .map(|i| -(ln_edge[i] - 0.5 * (ln_mass[i - first] + ln_mass[i + 1 - first])).exp())
                .collect();
            RadialMatrix { d, e, first, h, ln_mass }
        }
    }
}

/// Eigenvalues of channel l on the ball of radius R (weighted scheme),
/// the first max(mesh/10, 1) of them.
pub fn radial_fd_spectrum(dim: usize, mu: f64, radius: f64, l: usize, mesh: usize) -> Result<RadialFd> {
    radial_fd_spectrum_with(dim, mu, radius, l, mesh, RadialScheme::Weighted, None)
}

/// As [`radial_fd_spectrum`] with an explicit scheme and number of values.
pub fn radial_fd_spectrum_with(
    dim: usize,
    mu: f64,
    radius: f64,
    l: usize,
    mesh: usize,
    scheme: RadialScheme,
    count: Option<usize>,
) -> Result<RadialFd> {
    check_mu(dim, mu)?;
    DomainSpec::ball(dim, radius)?;
    if mesh < 8 {
        return Err(Error::Restriction(format!("radial mesh must be at least 8, got {mesh}")));
    }
    let mut warnings = Vec::new();
    if mesh < MIN_RADIAL_MESH {
        warnings.push(format!("radial mesh {mesh} is below {MIN_RADIAL_MESH}; eigenvalues are inaccurate"));
    }
    let count = count.unwrap_or((mesh / 10).max(1));
    if count > mesh / 10 {
        warnings.push(format!("{count} radial eigenvalues requested from mesh {mesh}; only about mesh/10 are reliable"));
    }
    let m = radial_matrix(channel_order(dim, mu, l), radius, mesh, scheme);
    let values = tridiagonal_smallest(&m.d, &m.e, count);
    Ok(RadialFd { values, warnings })
}

/// Lowest channel eigenvalue with its eigenfunction w sampled at r_i = i·h,
/// i = 0..=mesh, normalized so that ω_{N−1} Σ m_i w_i² = 1 and w > 0.
pub(crate) fn radial_ground_state(dim: usize, radius: f64, mesh: usize) -> Result<(f64, f64, Vec<f64>)> {
    let nu = channel_order(dim, 0.0, 0);
    let m = radial_matrix(nu, radius, mesh, RadialScheme::Weighted);
    let lambda = tridiagonal_smallest(&m.d, &m.e, 1)[0];
    let y = tridiagonal_eigenvector(&m.d, &m.e, lambda);
    let omega = crate::constants::dimension_constants(dim)?.omega;
    let sign = if y.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let mut w = vec![0.0; mesh + 1];
    for (k, yk) in y.iter().enumerate() {
        w[m.first + k] = sign * yk / (omega.sqrt() * (0.5 * m.ln_mass[k]).exp());
    }
    if m.first == 1 {
        // w is even in r: w(0) ≈ (4w(h) − w(2h))/3
        w[0] = (4.0 * w[1] - w[2]) / 3.0;
    }
    Ok((lambda, m.h, w))
}

/// Ball spectrum from the channel-wise finite differences, merged with
/// multiplicities; est_rel_error from the change against mesh/2.
pub fn radial_fd_ball_spectrum(dim: usize, mu: f64, radius: f64, mesh: usize, k_max: usize) -> Result<Spectrum> {
    let domain = DomainSpec::ball(dim, radius)?;
    check_mu(dim, mu)?;
    if k_max == 0 {
        return Err(Error::Restriction("k_max must be at least 1".into()));
    }
    let mut warnings = Vec::new();
    let coarse_mesh = (mesh / 2).max(8);
    let channel = |l: usize, count: usize| -> Result<(Vec<f64>, Vec<f64>, Vec<String>)> {
        let fine = radial_fd_spectrum_with(dim, mu, radius, l, mesh, RadialScheme::Weighted, Some(count))?;
        let coarse = radial_fd_spectrum_with(dim, mu, radius, l, coarse_mesh, RadialScheme::Weighted, Some(count))?;
        Ok((fine.values, coarse.values, fine.warnings))
    };
    let mut count = (mesh / 10).max(1);
    // per channel: (fine, coarse)
    let mut channels: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    loop {
        let (fine, coarse, w) = channel(channels.len(), count)?;
        warnings.extend(w);
        let lowest = fine[0];
        channels.push((fine, coarse));
        if merged(&channels, dim, k_max).is_some_and(|e| lowest > e.last().unwrap().0) {
            break;
        }
    }
    let mut entries = loop {
        let entries = merged(&channels, dim, k_max).expect("enough values");
        let kth = entries.last().unwrap().0;
        // a channel whose computed values end below λ_{k_max} may be missing some
        let short: Vec<usize> =
            (0..channels.len()).filter(|&l| *channels[l].0.last().unwrap() < kth).collect();
        if short.is_empty() || count >= coarse_mesh - 1 {
            if !short.is_empty() {
                warnings.push(format!("k_max = {k_max} exhausts the radial mesh {mesh}; some eigenvalues may be missing"));
            }
            break entries;
        }
        count = (2 * count).min(coarse_mesh - 1);
        for l in short {
            let (fine, coarse, _) = channel(l, count)?;
            channels[l] = (fine, coarse);
        }
    };
    if count > (mesh / 10).max(1) {
        warnings.push(format!("k_max = {k_max} uses more than mesh/10 values per channel at mesh {mesh}"));
    }
    let est_rel_error = entries.iter().map(|(v, c, _)| (c - v).abs() / (3.0 * v.abs())).fold(0.0, f64::max);
    entries.truncate(k_max);
    Ok(Spectrum {
        domain,
        mu,
        method: Method::RadialFd,
        est_rel_error,
        values: entries.into_iter().map(|e| e.0).collect(),
        warnings,
    })
}

/// The k smallest (value, coarse value, l) with multiplicities, or `None`
/// if fewer than k are available.
fn merged(channels: &[(Vec<f64>, Vec<f64>)], dim: usize, k: usize) -> Option<Vec<(f64, f64, usize)>> {
    let mut entries = Vec::new();
    for (l, (fine, coarse)) in channels.iter().enumerate() {
        let mult = channel_multiplicity(dim, l);
        for (v, c) in fine.iter().zip(coarse) {
            entries.extend(std::iter::repeat_n((*v, *c, l), mult));
        }
    }
    if entries.len() < k {
        return None;
    }
    entries.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    entries.truncate(k);
    Some(entries)
}
