//! Lower and upper eigenvalue bounds and their certification against
//! computed spectra.

mod formulas;
mod yang;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{mu_critical, tau_plus};
use crate::error::{Error, Result};
use crate::geometry::{weighted_integral, DomainSpec, Shape, WeightKind};
use crate::spectrum::{
    ball_spectrum_oracle, cartesian_fd_spectrum, first_dirichlet_eigenpair_zero, fmt17, EigenpairZero, Spectrum,
    SCHEMA_VERSION,
};

pub use formulas::{
    b_k, cheng_yang_upper, cor11_first_eigenvalue_majorant, cor11_upper, karachalios_lower, lower_bound_k,
    lower_bound_sum, lower_bound_sum_branches, sigma_mu, sigma_mu_with, Cor11Variant,
};
pub use yang::{
    cheng_yang_recursion, next_eigenvalue_bound, recursion_constant, recursion_step_bound, telescoped_f, yang_factor, yang_inequality_gap,
    Recursion, YangGap,
};

/// Smallest relative tolerance used in certification.
pub const MIN_TOL_REL: f64 = 1e-9;

/// Power of ω_{N−1} in the Hardy branch of σ_μ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SigmaVariant {
    /// ω_{N−1}^{2/N}.
    #[default]
    Printed,
    /// ω_{N−1}¹, for comparison.
    OmegaFirstPower,
}

/// Domain and spectral data the bound formulas consume.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub dim: usize,
    pub mu: f64,
    pub volume: f64,
    pub d0: f64,
    /// ‖X₁^{(1−N)/2}‖²_{L²(Ω)} = ∫ (−log(|x|/D₀))^{N−1} dx.
    pub x1_norm_sq: f64,
    /// λ_{μ₀,1}; needed when μ < 0.
    pub lambda_crit_1: Option<f64>,
    /// λ_{0,1}.
    pub lambda_zero_1: Option<f64>,
    pub eigenpair_zero: Option<EigenpairZero>,
    /// ∫|x|^{−2}.
    pub inv_square_integral: Option<f64>,
    /// ∫|x|^{2τ₊−2}.
    pub tau_power_integral: Option<f64>,
    /// ∫ρ²|x|^{2τ₊}.
    pub dist_power_integral: Option<f64>,
    pub sigma_variant: SigmaVariant,
    /// Relative error of the computed eigenvalue inputs.
    pub input_rel_error: f64,
}

impl BoundInputs {
    pub fn new(dim: usize, mu: f64, volume: f64, d0: f64, x1_norm_sq: f64) -> Self {
        Self {
            dim,
            mu,
            volume,
            d0,
            x1_norm_sq,
            lambda_crit_1: None,
            lambda_zero_1: None,
            eigenpair_zero: None,
            inv_square_integral: None,
            tau_power_integral: None,
            dist_power_integral: None,
            sigma_variant: SigmaVariant::Printed,
            input_rel_error: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::constants::check_mu(self.dim, self.mu)?;
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Inconsistent(format!("{name} must be finite and positive, got {v}")))
            }
        };
        positive("volume", self.volume)?;
        positive("d0", self.d0)?;
        positive("x1_norm_sq", self.x1_norm_sq)?;
        for (name, v) in [
            ("lambda_crit_1", self.lambda_crit_1),
            ("lambda_zero_1", self.lambda_zero_1),
            ("inv_square_integral", self.inv_square_integral),
            ("tau_power_integral", self.tau_power_integral),
            ("dist_power_integral", self.dist_power_integral),
        ] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        match (self.mu < 0.0, self.lambda_crit_1.is_some()) {
            (true, false) => Err(Error::IncompleteInputs("λ_{μ₀,1} is required when μ < 0")),
            (false, true) => Err(Error::Inconsistent("λ_{μ₀,1} is only used when μ < 0".into())),
            _ => Ok(()),
        }
    }

    /// Computes every input the bounds of `domain` at `mu` can use. Balls
    /// take their eigenvalues from Bessel zeros and the eigenfunction from
    /// the radial scheme with `mesh` cells; boxes use the Cartesian grid with
    /// `mesh` cells per side.
    pub fn from_domain(domain: &DomainSpec, mu: f64, mesh: usize) -> Result<Self> {
        let dim = domain.dim();
        crate::constants::check_mu(dim, mu)?;
        let x1 = weighted_integral(domain, WeightKind::LogPower)?;
        let mut inputs = Self::new(dim, mu, domain.volume(), domain.d0(), x1);
        let mut errors: Vec<f64> = Vec::new();
        let mut first = |m: f64| -> Result<f64> {
            let s = match domain.shape() {
                Shape::Ball { radius, .. } => ball_spectrum_oracle(dim, m, *radius, 1)?,
                Shape::Box { .. } => cartesian_fd_spectrum(domain, m, mesh, 1)?,
            };
            if s.est_rel_error.is_finite() {
                errors.push(s.est_rel_error);
            }
            Ok(s.values[0])
        };
        inputs.lambda_zero_1 = Some(first(0.0)?);
        if mu < 0.0 {
            inputs.lambda_crit_1 = Some(first(mu_critical(dim))?);
        }
        if mu > 0.0 {
            inputs.eigenpair_zero = Some(first_dirichlet_eigenpair_zero(domain, mesh)?);
            if dim >= 3 {
                inputs.inv_square_integral = Some(weighted_integral(domain, WeightKind::InvSquare)?);
            }
            let tau = tau_plus(dim, mu)?;
            inputs.tau_power_integral = Some(weighted_integral(domain, WeightKind::Power(tau))?);
            inputs.dist_power_integral = Some(weighted_integral(domain, WeightKind::DistPower(tau))?);
        }
        inputs.input_rel_error = errors.into_iter().fold(0.0, f64::max);
        Ok(inputs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundKind {
    #[serde(rename = "LY_sum_lower")]
    LiYauSumLower,
    #[serde(rename = "LY_k_lower")]
    LiYauKLower,
    #[serde(rename = "karachalios_lower")]
    KarachaliosLower,
    #[serde(rename = "combined_lower")]
    CombinedLower,
    #[serde(rename = "cheng_yang_upper")]
    ChengYangUpper,
    #[serde(rename = "cor11_upper_v1")]
    TestFunctionUpperV1,
    #[serde(rename = "cor11_upper_v2")]
    TestFunctionUpperV2,
    #[serde(rename = "yang_inequality")]
    YangInequality,
    #[serde(rename = "recursion_y11")]
    Recursion,
}

impl BoundKind {
    pub const ALL: [BoundKind; 9] = [
        BoundKind::LiYauSumLower,
        BoundKind::LiYauKLower,
        BoundKind::KarachaliosLower,
        BoundKind::CombinedLower,
        BoundKind::ChengYangUpper,
        BoundKind::TestFunctionUpperV1,
        BoundKind::TestFunctionUpperV2,
        BoundKind::YangInequality,
        BoundKind::Recursion,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::LiYauSumLower => "LY_sum_lower",
            BoundKind::LiYauKLower => "LY_k_lower",
            BoundKind::KarachaliosLower => "karachalios_lower",
            BoundKind::CombinedLower => "combined_lower",
            BoundKind::ChengYangUpper => "cheng_yang_upper",
            BoundKind::TestFunctionUpperV1 => "cor11_upper_v1",
            BoundKind::TestFunctionUpperV2 => "cor11_upper_v2",
            BoundKind::YangInequality => "yang_inequality",
            BoundKind::Recursion => "recursion_y11",
        }
    }

    /// Lower bounds certify spectral ≥ bound; the rest spectral ≤ bound.
    pub fn is_lower(&self) -> bool {
        matches!(
            self,
            BoundKind::LiYauSumLower | BoundKind::LiYauKLower | BoundKind::KarachaliosLower | BoundKind::CombinedLower
        )
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse { field: "kind".into(), message: format!("unknown bound kind `{s}`") })
    }
}

/// One bound compared with the spectral quantity it constrains.
///
/// For the Yang inequality `bound` is the right-hand side and `spectral`
/// the left-hand side; for the recursion `spectral` is F_{k+1} and `bound`
/// is C(N,k)((k+1)/k)^{4/N} F_k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub k: usize,
    pub bound: f64,
    pub spectral: f64,
    /// spectral − bound for lower bounds, bound − spectral otherwise.
    pub margin: f64,
    pub pass: bool,
    /// Passed only thanks to the tolerance.
    pub warning: bool,
}

impl BoundReport {
    pub fn new(kind: BoundKind, k: usize, bound: f64, spectral: f64, tol_rel: f64) -> Self {
        let margin = if kind.is_lower() { spectral - bound } else { bound - spectral };
        let pass = margin >= -tol_rel * spectral.abs();
        Self { kind, k, bound, spectral, margin, pass, warning: pass && margin < 0.0 }
    }
}

/// max(est_rel_error, input error, 1e−9).
pub fn certification_tolerance(spectrum: &Spectrum, inputs: &BoundInputs) -> f64 {
    let est = if spectrum.est_rel_error.is_finite() { spectrum.est_rel_error } else { 0.0 };
    est.max(inputs.input_rel_error).max(MIN_TOL_REL)
}

/// Every applicable bound at each k in `ks`, ordered by (k, kind).
///
/// Kinds whose inputs are absent (e.g. no eigenfunction data for the
/// test-function bounds) are skipped, as are the Yang inequality and the
/// recursion at k = k_max.
pub fn certify(spectrum: &Spectrum, inputs: &BoundInputs, ks: &[usize]) -> Result<Vec<BoundReport>> {
    inputs.validate()?;
    if spectrum.dim() != inputs.dim {
        return Err(Error::Inconsistent(format!("spectrum has N = {}, inputs N = {}", spectrum.dim(), inputs.dim)));
    }
    if spectrum.mu != inputs.mu {
        return Err(Error::Inconsistent(format!("spectrum has μ = {}, inputs μ = {}", spectrum.mu, inputs.mu)));
    }
    if (spectrum.domain.volume() - inputs.volume).abs() > 1e-12 * inputs.volume {
        return Err(Error::Inconsistent("spectrum and inputs describe domains of different volume".into()));
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > spectrum.k_max()) {
        return Err(Error::InsufficientSpectrum { needed: k.max(1), available: spectrum.k_max() });
    }
    let tol = certification_tolerance(spectrum, inputs);
    let values = &spectrum.values;
    let dim = inputs.dim;
    let mu = inputs.mu;
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for v in values {
        acc += v;
        prefix.push(acc);
    }
    let max_k = ks.iter().copied().max().unwrap_or(0);
    let recursion = if mu >= 0.0 && max_k >= 1 {
        Some(cheng_yang_recursion(&values[..(max_k + 1).min(values.len())], dim)?)
    } else {
        None
    };
    let semigroup = mu < 0.0;
    let yang_applies = mu > mu_critical(dim);
    let v1 = mu > 0.0 && dim >= 3 && inputs.eigenpair_zero.is_some() && inputs.inv_square_integral.is_some();
    let v2 = mu > 0.0
        && inputs.eigenpair_zero.is_some()
        && inputs.tau_power_integral.is_some()
        && inputs.dist_power_integral.is_some();

    let per_k: Vec<Result<Vec<BoundReport>>> = ks
        .par_iter()
        .map(|&k| {
            let lk = values[k - 1];
            let mut out = Vec::with_capacity(9);
            out.push(BoundReport::new(BoundKind::LiYauSumLower, k, lower_bound_sum(inputs, k)?, prefix[k - 1], tol));
            let ly = lower_bound_k(inputs, k)?;
            out.push(BoundReport::new(BoundKind::LiYauKLower, k, ly, lk, tol));
            let mut combined = ly;
            if semigroup {
                let kb = karachalios_lower(inputs, k)?;
                combined = combined.max(kb);
                out.push(BoundReport::new(BoundKind::KarachaliosLower, k, kb, lk, tol));
            }
            out.push(BoundReport::new(BoundKind::CombinedLower, k, combined, lk, tol));
            out.push(BoundReport::new(BoundKind::ChengYangUpper, k, cheng_yang_upper(inputs, Some(values[0]), k)?, lk, tol));
            if v1 {
                out.push(BoundReport::new(BoundKind::TestFunctionUpperV1, k, cor11_upper(inputs, Cor11Variant::V1, k)?, lk, tol));
            }
            if v2 {
                out.push(BoundReport::new(BoundKind::TestFunctionUpperV2, k, cor11_upper(inputs, Cor11Variant::V2, k)?, lk, tol));
            }
            if k < values.len() {
                if yang_applies {
                    let g = yang::yang_gap_values(values, dim, mu, k)?;
                    out.push(BoundReport::new(BoundKind::YangInequality, k, g.rhs, g.lhs, tol));
                }
                if let Some(r) = &recursion {
                    let b = recursion_step_bound(dim, k, r.f[k - 1]);
                    out.push(BoundReport::new(BoundKind::Recursion, k, b, r.f[k], tol));
                }
            }
            Ok(out)
        })
        .collect();
    let mut reports = Vec::new();
    for r in per_k {
        reports.extend(r?);
    }
    Ok(reports)
}

/// Counts of failed and tolerance-only passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CertificationSummary {
    pub total: usize,
    pub failed: usize,
    pub warned: usize,
}

impl CertificationSummary {
    pub fn of(reports: &[BoundReport]) -> Self {
        Self {
            total: reports.len(),
            failed: reports.iter().filter(|r| !r.pass).count(),
            warned: reports.iter().filter(|r| r.warning).count(),
        }
    }

    /// Whether the run passes; `strict` also rejects tolerance-only passes.
    pub fn passed(&self, strict: bool) -> bool {
        self.failed == 0 && (!strict || self.warned == 0)
    }
}

/// 12 significant digits.
pub(crate) fn fmt12(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn reports_to_csv(reports: &[BoundReport]) -> String {
    let mut s = String::from("kind,k,bound,spectral,margin,pass\n");
    for r in reports {
        let _ = writeln!(s, "{},{},{},{},{},{}", r.kind, r.k, fmt12(r.bound), fmt12(r.spectral), fmt12(r.margin), r.pass);
    }
    s
}

pub fn reports_to_json(spectrum: &Spectrum, tol_rel: f64, reports: &[BoundReport]) -> String {
    let mut s = String::from("{\n");
    let _ = writeln!(s, "  \"schema_version\": {SCHEMA_VERSION},");
    let _ = writeln!(s, "  \"domain\": {},", serde_json::to_string(&spectrum.domain).expect("domain serializes"));
    let _ = writeln!(s, "  \"mu\": {},", fmt17(spectrum.mu));
    let _ = writeln!(s, "  \"method\": \"{}\",", spectrum.method);
    let _ = writeln!(s, "  \"tol_rel\": {},", fmt17(tol_rel));
    s.push_str("  \"reports\": [");
    for (i, r) in reports.iter().enumerate() {
        s.push_str(if i == 0 { "\n    " } else { ",\n    " });
        let _ = write!(
            s,
            "{{\"kind\": \"{}\", \"k\": {}, \"bound\": {}, \"spectral\": {}, \"margin\": {}, \"pass\": {}, \"warning\": {}}}",
            r.kind,
            r.k,
            fmt17(r.bound),
            fmt17(r.spectral),
            fmt17(r.margin),
            r.pass,
            r.warning
        );
    }
    s.push_str(if reports.is_empty() { "]\n" } else { "\n  ]\n" });
    s.push_str("}\n");
    s
}
