//! Counting function, partition function and the Weyl and heat-trace
//! limits.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::constants::dimension_constants;
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// Largest tail/value ratio at which a partition function is reported.
pub const MAX_TAIL_FRACTION: f64 = 1e-6;
/// Slack added to the observed Weyl deficit when fitting the envelope.
pub const ENVELOPE_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceKind {
    WeylRatio,
    HeatTraceRatio,
}

impl TraceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceKind::WeylRatio => "weyl_ratio",
            TraceKind::HeatTraceRatio => "heat_trace_ratio",
        }
    }
}

/// (abscissa, ratio) samples in increasing abscissa order.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsTrace {
    pub kind: TraceKind,
    pub target: f64,
    pub samples: Vec<(f64, f64)>,
    /// Requested abscissae that were refused (heat trace: t too small for
    /// the truncated spectrum).
    pub refused: Vec<f64>,
}

impl AsymptoticsTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("abscissa,ratio,target\n");
        for (x, r) in &self.samples {
            let _ = writeln!(s, "{x:.11e},{r:.11e},{:.11e}", self.target);
        }
        s
    }
}

/// N(β) = #{i : λ_i ≤ β}.
pub fn counting_function(spectrum: &Spectrum, beta: f64) -> Result<usize> {
    let largest = *spectrum.values.last().ok_or(Error::InsufficientSpectrum { needed: 1, available: 0 })?;
    if !(beta < largest) {
        return Err(Error::Truncation { beta, largest });
    }
    Ok(spectrum.values.partition_point(|&v| v <= beta))
}

/// c_N |Ω|^{−2/N}.
pub fn weyl_constant_for(dim: usize, volume: f64) -> Result<f64> {
    Ok(dimension_constants(dim)?.weyl * volume.powf(-2.0 / dim as f64))
}

/// λ_k k^{−2/N} / (c_N |Ω|^{−2/N}).
pub fn weyl_ratio(spectrum: &Spectrum, volume: f64, k: usize) -> Result<f64> {
    let dim = spectrum.dim();
    Ok(spectrum.get(k)? * (k as f64).powf(-2.0 / dim as f64) / weyl_constant_for(dim, volume)?)
}

/// k λ_k^{−N/2} / (|Ω||B₁|/(2π)^N), the same limit stated for the
/// counting function; equals weyl_ratio^{−N/2}.
pub fn reciprocal_weyl_ratio(spectrum: &Spectrum, volume: f64, k: usize) -> Result<f64> {
    let dim = spectrum.dim();
    let n = dim as f64;
    let c = dimension_constants(dim)?;
    let target = volume * c.ball_volume / (2.0 * std::f64::consts::PI).powi(dim as i32);
    Ok(k as f64 * spectrum.get(k)?.powf(-0.5 * n) / target)
}

/// How eigenvalues beyond the computed ones are accounted for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    /// λ_k ≥ a k^{2/N} past the truncation with a = (1−ε)c_N|Ω|^{−2/N}.
    WeylEnvelope { a: f64 },
    /// The values are the whole spectrum (synthetic input).
    Complete,
}

/// The envelope fitted to the upper half of the spectrum: ε is the largest
/// observed deficit of the Weyl ratio below 1 plus `ENVELOPE_SLACK`.
pub fn weyl_envelope(spectrum: &Spectrum) -> Result<TailModel> {
    let volume = spectrum.domain.volume();
    let k_max = spectrum.k_max();
    if k_max == 0 {
        return Err(Error::InsufficientSpectrum { needed: 1, available: 0 });
    }
    let mut min_ratio = f64::INFINITY;
    for k in (k_max / 2).max(1)..=k_max {
        min_ratio = min_ratio.min(weyl_ratio(spectrum, volume, k)?);
    }
    let eps = (1.0 - min_ratio).max(0.0) + ENVELOPE_SLACK;
    if eps >= 1.0 {
        return Err(Error::Inconsistent(format!(
            "observed Weyl ratios (min {min_ratio}) are too far from 1 to bound the tail"
        )));
    }
    Ok(TailModel::WeylEnvelope { a: (1.0 - eps) * weyl_constant_for(spectrum.dim(), volume)? })
}

/// Upper bound for Γ(s, x): x^{s−1}e^{−x}/(1 − (s−1)/x) for s > 1 and
/// x > s − 1, exact for s = 1, x^{s−1}e^{−x} for s < 1.
pub fn upper_gamma_bound(s: f64, x: f64) -> f64 {
    if s == 1.0 {
        return (-x).exp();
    }
    let lead = x.powf(s - 1.0) * (-x).exp();
    if s < 1.0 {
        return lead;
    }
    if x <= s - 1.0 {
        return f64::INFINITY;
    }
    lead / (1.0 - (s - 1.0) / x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionValue {
    /// Σ_{i≤k_max} e^{−λ_i t}.
    pub value: f64,
    /// Bound on the omitted Σ_{i>k_max} e^{−λ_i t}.
    pub tail_bound: f64,
}

/// Z(t) with the tail bounded by the fitted Weyl envelope.
pub fn partition_function(spectrum: &Spectrum, t: f64) -> Result<PartitionValue> {
    partition_function_with(spectrum, t, weyl_envelope(spectrum)?)
}

pub fn partition_function_with(spectrum: &Spectrum, t: f64, tail: TailModel) -> Result<PartitionValue> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Restriction(format!("t must be positive, got {t}")));
    }
    // smallest terms first
    let value: f64 = spectrum.values.iter().rev().map(|&l| (-l * t).exp()).sum();
    let tail_bound = match tail {
        TailModel::Complete => 0.0,
        TailModel::WeylEnvelope { a } => {
            // Σ_{k>K} e^{−b k^{2/N}} ≤ ∫_K^∞ e^{−b x^{2/N}} dx = (N/2) b^{−N/2} Γ(N/2, b K^{2/N})
            let n = spectrum.dim() as f64;
            let b = a * t;
            let x = b * (spectrum.k_max() as f64).powf(2.0 / n);
            0.5 * n * b.powf(-0.5 * n) * upper_gamma_bound(0.5 * n, x)
        }
    };
    if !(tail_bound < MAX_TAIL_FRACTION * value) {
        return Err(Error::TailDominates { t, value, tail: tail_bound });
    }
    Ok(PartitionValue { value, tail_bound })
}

/// t^{N/2} Z(t) (4π)^{N/2} / |Ω|.
pub fn heat_trace_ratio(spectrum: &Spectrum, volume: f64, t: f64) -> Result<f64> {
    heat_trace_ratio_with(spectrum, volume, t, weyl_envelope(spectrum)?)
}

pub fn heat_trace_ratio_with(spectrum: &Spectrum, volume: f64, t: f64, tail: TailModel) -> Result<f64> {
    let n = spectrum.dim() as f64;
    let z = partition_function_with(spectrum, t, tail)?.value;
    Ok((4.0 * std::f64::consts::PI * t).powf(0.5 * n) * z / volume)
}

/// 1e−1, 10^{−1.5}, …, 1e−3.
pub fn default_t_grid() -> Vec<f64> {
    (0..5).map(|i| 10f64.powf(-1.0 - 0.5 * i as f64)).collect()
}

/// 1, 2, 5, 10, 20, 50, … up to k_max, and k_max itself.
pub fn default_k_grid(k_max: usize) -> Vec<usize> {
    let mut ks = Vec::new();
    let mut decade = 1;
    'outer: loop {
        for m in [1, 2, 5] {
            let k = m * decade;
            if k > k_max {
                break 'outer;
            }
            ks.push(k);
        }
        decade *= 10;
    }
    if ks.last() != Some(&k_max) {
        ks.push(k_max);
    }
    ks
}

pub fn weyl_trace(spectrum: &Spectrum, ks: &[usize]) -> Result<AsymptoticsTrace> {
    let volume = spectrum.domain.volume();
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let samples = ks
        .par_iter()
        .map(|&k| weyl_ratio(spectrum, volume, k).map(|r| (k as f64, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AsymptoticsTrace { kind: TraceKind::WeylRatio, target: 1.0, samples, refused: Vec::new() })
}

/// Heat-trace ratios at each t; t whose tail is not negligible are refused
/// (listed in `refused`) rather than extrapolated.
pub fn heat_trace(spectrum: &Spectrum, ts: &[f64]) -> Result<AsymptoticsTrace> {
    let volume = spectrum.domain.volume();
    let tail = weyl_envelope(spectrum)?;
    let mut ts = ts.to_vec();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let results: Vec<(f64, Result<f64>)> =
        ts.par_iter().map(|&t| (t, heat_trace_ratio_with(spectrum, volume, t, tail))).collect();
    let mut trace = AsymptoticsTrace { kind: TraceKind::HeatTraceRatio, target: 1.0, samples: Vec::new(), refused: Vec::new() };
    let mut last_err = None;
    for (t, r) in results {
        match r {
            Ok(ratio) => trace.samples.push((t, ratio)),
            Err(e @ Error::TailDominates { .. }) => {
                trace.refused.push(t);
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    match (trace.samples.is_empty(), last_err) {
        (true, Some(e)) => Err(e),
        _ => Ok(trace),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::spectrum::{ball_channel_eigenvalues, ball_spectrum_oracle, Method, RadialChannel};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn synthetic(values: Vec<f64>) -> Spectrum {
        Spectrum {
            domain: DomainSpec::ball(2, 1.0).unwrap(),
            mu: 0.0,
            method: Method::BallOracle,
            est_rel_error: 0.0,
            values,
            warnings: vec![],
        }
    }

    #[test]
    fn counting() {
        let s = synthetic(vec![1.0, 2.0, 3.0]);
        assert_eq!(counting_function(&s, 0.5).unwrap(), 0);
        assert_eq!(counting_function(&s, 2.5).unwrap(), 2);
        assert_eq!(counting_function(&s, 2.0).unwrap(), 2);
        assert!(matches!(counting_function(&s, 3.0), Err(Error::Truncation { .. })));
    }

    #[test]
    fn disk_count_matches_enumeration() {
        let s = ball_spectrum_oracle(2, 0.0, 1.0, 60).unwrap();
        let mut brute = 0;
        for l in 0..30 {
            let ch = RadialChannel::new(2, 0.0, l);
            brute += ball_channel_eigenvalues(2, 0.0, 1.0, l, 10).unwrap().iter().filter(|&&v| v <= 100.0).count()
                * ch.multiplicity;
        }
        assert_eq!(counting_function(&s, 100.0).unwrap(), brute);
    }

    #[test]
    fn weyl_ratio_is_scale_invariant() {
        let a = ball_spectrum_oracle(3, 1.0, 1.0, 50).unwrap();
        let b = ball_spectrum_oracle(3, 1.0, 2.5, 50).unwrap();
        for k in [1, 10, 50] {
            assert_relative_eq!(
                weyl_ratio(&a, a.domain.volume(), k).unwrap(),
                weyl_ratio(&b, b.domain.volume(), k).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn reciprocal_restatement() {
        let s = ball_spectrum_oracle(3, -0.25, 1.0, 100).unwrap();
        let v = s.domain.volume();
        for k in [1, 17, 100] {
            let r = weyl_ratio(&s, v, k).unwrap();
            assert_relative_eq!(reciprocal_weyl_ratio(&s, v, k).unwrap(), r.powf(-1.5), max_relative = 1e-12);
        }
    }

    #[test]
    fn partition_of_a_single_eigenvalue() {
        let s = synthetic(vec![1.0]);
        let z = partition_function_with(&s, 1.0, TailModel::Complete).unwrap();
        assert_relative_eq!(z.value, (-1.0f64).exp(), max_relative = 1e-15);
        assert_eq!(z.tail_bound, 0.0);
    }

    #[test]
    fn partition_decreases_in_t() {
        let s = ball_spectrum_oracle(2, 0.0, 1.0, 3000).unwrap();
        let mut last = f64::INFINITY;
        for t in [0.02, 0.05, 0.1, 0.5] {
            let z = partition_function(&s, t).unwrap();
            assert!(z.value < last);
            assert!(z.tail_bound < 1e-6 * z.value);
            last = z.value;
        }
    }

    #[test]
    fn tail_refusal() {
        let s = ball_spectrum_oracle(2, 0.0, 1.0, 200).unwrap();
        assert!(matches!(partition_function(&s, 1e-3), Err(Error::TailDominates { .. })));
        let trace = heat_trace(&s, &default_t_grid()).unwrap();
        assert!(!trace.refused.is_empty());
        assert!(trace.samples.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn upper_gamma() {
        // Γ(1/2, x) = √π erfc(√x); at x = 4 erfc(2) = 4.677734981047266e-3
        let exact = PI.sqrt() * 4.677_734_981_047_266e-3;
        assert!(upper_gamma_bound(0.5, 4.0) >= exact);
        // Γ(3/2, x) = √x e^{−x} + Γ(1/2, x)/2
        let exact = 2.0 * (-4.0f64).exp() + 0.5 * PI.sqrt() * 4.677_734_981_047_266e-3;
        let b = upper_gamma_bound(1.5, 4.0);
        assert!(b >= exact && b < 1.2 * exact);
        assert_eq!(upper_gamma_bound(1.5, 0.4), f64::INFINITY);
    }

    #[test]
    fn large_t_ratio_vanishes() {
        let s = ball_spectrum_oracle(2, 0.0, 1.0, 100).unwrap();
        assert!(heat_trace_ratio(&s, PI, 50.0).unwrap() < 1e-100);
    }

    #[test]
    fn k_grid() {
        assert_eq!(default_k_grid(120), vec![1, 2, 5, 10, 20, 50, 100, 120]);
        assert_eq!(default_k_grid(100), vec![1, 2, 5, 10, 20, 50, 100]);
        assert_eq!(default_t_grid().len(), 5);
    }
}
