//! Closed-form eigenvalue bounds.

use super::{BoundInputs, SigmaVariant};
use crate::constants::{dimension_constants, mu_critical, sobolev_constant, tau_plus, INV_E};
use crate::error::{Error, Result};

fn require_negative_mu(inputs: &BoundInputs, what: &str) -> Result<()> {
    if inputs.dim < 3 {
        return Err(Error::Restriction(format!("{what} requires N ≥ 3 (μ < 0 requires N ≥ 3)")));
    }
    let mu0 = mu_critical(inputs.dim);
    if inputs.mu < mu0 {
        return Err(Error::SubcriticalParameter { mu: inputs.mu, mu_critical: mu0, dim: inputs.dim });
    }
    if inputs.mu >= 0.0 {
        return Err(Error::Restriction(format!("{what} requires μ₀ ≤ μ < 0, got μ = {}", inputs.mu)));
    }
    Ok(())
}

fn lambda_crit(inputs: &BoundInputs) -> Result<f64> {
    inputs.lambda_crit_1.ok_or(Error::IncompleteInputs("λ_{μ₀,1} is required when μ < 0"))
}

/// σ_μ = max{S_N (N−2)^{−2(N−1)/N} ‖X₁^{(1−N)/2}‖^{−4/N},
/// (1−μ/μ₀)(N(N−2)/4) ω_{N−1}^p |Ω|^{−2/N}} with p = 2/N (printed form)
/// or p = 1.
pub fn sigma_mu(inputs: &BoundInputs) -> Result<f64> {
    sigma_mu_with(inputs, inputs.sigma_variant)
}

pub fn sigma_mu_with(inputs: &BoundInputs, variant: SigmaVariant) -> Result<f64> {
    require_negative_mu(inputs, "σ_μ")?;
    let n = inputs.dim as f64;
    let c = dimension_constants(inputs.dim)?;
    let hardy_sobolev = sobolev_constant(inputs.dim)? * (n - 2.0).powf(-2.0 * (n - 1.0) / n)
        * inputs.x1_norm_sq.powf(-2.0 / n);
    let omega_power = match variant {
        SigmaVariant::Printed => c.omega.powf(2.0 / n),
        SigmaVariant::OmegaFirstPower => c.omega,
    };
    let hardy = (1.0 - inputs.mu / c.mu_critical) * 0.25 * n * (n - 2.0) * omega_power * inputs.volume.powf(-2.0 / n);
    Ok(hardy_sobolev.max(hardy))
}

/// b_k = (1/k) Σ_{i≤k} (i/k)^{2/N}.
pub fn b_k(dim: usize, k: usize) -> f64 {
    let p = 2.0 / dim as f64;
    let kf = k as f64;
    (1..=k).map(|i| (i as f64 / kf).powf(p)).sum::<f64>() / kf
}

/// The two candidates of the μ < 0 lower bound on Σ_{i≤k} λ_i, in the order
/// (Li-Yau interpolation, semigroup).
pub fn lower_bound_sum_branches(inputs: &BoundInputs, k: usize) -> Result<(f64, f64)> {
    require_negative_mu(inputs, "the μ < 0 lower bound")?;
    let lc = lambda_crit(inputs)?;
    let n = inputs.dim as f64;
    let c = dimension_constants(inputs.dim)?;
    let kf = k as f64;
    let s = inputs.mu / c.mu_critical;
    let li_yau = (1.0 - s) * c.li_yau * inputs.volume.powf(-2.0 / n) * kf.powf(1.0 + 2.0 / n) + s * lc * kf;
    let semigroup = b_k(inputs.dim, k) * INV_E * sigma_mu(inputs)? * kf.powf(1.0 + 2.0 / n);
    Ok((li_yau, semigroup))
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Restriction("k must be at least 1".into()));
    }
    Ok(())
}

fn check_mu_range(inputs: &BoundInputs) -> Result<()> {
    crate::constants::check_mu(inputs.dim, inputs.mu)
}

/// Lower bound for Σ_{i≤k} λ_{μ,i}.
pub fn lower_bound_sum(inputs: &BoundInputs, k: usize) -> Result<f64> {
    check_k(k)?;
    check_mu_range(inputs)?;
    if inputs.mu < 0.0 {
        let (a, b) = lower_bound_sum_branches(inputs, k)?;
        return Ok(a.max(b));
    }
    let n = inputs.dim as f64;
    let c = dimension_constants(inputs.dim)?;
    let kf = k as f64;
    Ok(c.li_yau * inputs.volume.powf(-2.0 / n) * kf.powf(1.0 + 2.0 / n) + inputs.mu * kf / (inputs.d0 * inputs.d0))
}

/// Lower bound for λ_{μ,k}: the sum bound divided by k.
pub fn lower_bound_k(inputs: &BoundInputs, k: usize) -> Result<f64> {
    check_k(k)?;
    check_mu_range(inputs)?;
    let n = inputs.dim as f64;
    let c = dimension_constants(inputs.dim)?;
    let kf = k as f64;
    if inputs.mu < 0.0 {
        require_negative_mu(inputs, "the μ < 0 lower bound")?;
        let lc = lambda_crit(inputs)?;
        let s = inputs.mu / c.mu_critical;
        let li_yau = (1.0 - s) * c.li_yau * inputs.volume.powf(-2.0 / n) * kf.powf(2.0 / n) + s * lc;
        let semigroup = b_k(inputs.dim, k) * INV_E * sigma_mu(inputs)? * kf.powf(2.0 / n);
        return Ok(li_yau.max(semigroup));
    }
    Ok(c.li_yau * inputs.volume.powf(-2.0 / n) * kf.powf(2.0 / n) + inputs.mu / (inputs.d0 * inputs.d0))
}

/// e^{−1} σ_μ k^{2/N}.
pub fn karachalios_lower(inputs: &BoundInputs, k: usize) -> Result<f64> {
    check_k(k)?;
    Ok(INV_E * sigma_mu(inputs)? * (k as f64).powf(2.0 / inputs.dim as f64))
}

/// (1+4/N) k^{2/N} λ_{μ,1} for μ ≥ 0; (1+4/N) k^{2/N} λ_{0,1} + μ D₀^{−2}
/// for μ < 0.
pub fn cheng_yang_upper(inputs: &BoundInputs, lambda_mu_1: Option<f64>, k: usize) -> Result<f64> {
    check_k(k)?;
    check_mu_range(inputs)?;
    let n = inputs.dim as f64;
    let factor = (1.0 + 4.0 / n) * (k as f64).powf(2.0 / n);
    if inputs.mu >= 0.0 {
        let l1 = lambda_mu_1.ok_or(Error::IncompleteInputs("λ_{μ,1} is required when μ ≥ 0"))?;
        Ok(factor * l1)
    } else {
        let l0 = inputs.lambda_zero_1.ok_or(Error::IncompleteInputs("λ_{0,1} is required when μ < 0"))?;
        Ok(factor * l0 + inputs.mu / (inputs.d0 * inputs.d0))
    }
}

/// Which test-function majorant of λ_{μ,1} feeds the Cheng-Yang factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cor11Variant {
    /// λ_{0,1} + μ sup φ² ∫|x|^{−2}.
    V1,
    /// λ_{0,1} + c₁^{−2} τ₊ ‖φ‖²_{C¹} ∫|x|^{2τ₊−2} / ∫ρ²|x|^{2τ₊}.
    V2,
}

/// The majorant of λ_{μ,1} used by `cor11_upper` (its value at k = 1 up to
/// the factor 1+4/N).
pub fn cor11_first_eigenvalue_majorant(inputs: &BoundInputs, variant: Cor11Variant) -> Result<f64> {
    check_mu_range(inputs)?;
    if inputs.mu <= 0.0 {
        return Err(Error::Restriction(format!("the test-function upper bounds require μ > 0, got μ = {}", inputs.mu)));
    }
    let l0 = inputs.lambda_zero_1.ok_or(Error::IncompleteInputs("λ_{0,1} is required"))?;
    let pair = inputs.eigenpair_zero.ok_or(Error::IncompleteInputs("the first eigenfunction of −Δ is required"))?;
    match variant {
        Cor11Variant::V1 => {
            if inputs.dim < 3 {
                return Err(Error::DivergentWeight { weight: "inv_square".into(), dim: inputs.dim });
            }
            let w = inputs.inv_square_integral.ok_or(Error::IncompleteInputs("∫|x|^{-2} is required"))?;
            Ok(l0 + inputs.mu * pair.phi_sup * pair.phi_sup * w)
        }
        Cor11Variant::V2 => {
            let tau = tau_plus(inputs.dim, inputs.mu)?;
            let num = inputs.tau_power_integral.ok_or(Error::IncompleteInputs("∫|x|^{2τ₊−2} is required"))?;
            let den = inputs.dist_power_integral.ok_or(Error::IncompleteInputs("∫ρ²|x|^{2τ₊} is required"))?;
            Ok(l0 + tau * pair.phi_c1 * pair.phi_c1 * num / (pair.c1_lower * pair.c1_lower * den))
        }
    }
}

pub fn cor11_upper(inputs: &BoundInputs, variant: Cor11Variant, k: usize) -> Result<f64> {
    check_k(k)?;
    let n = inputs.dim as f64;
    Ok((1.0 + 4.0 / n) * cor11_first_eigenvalue_majorant(inputs, variant)? * (k as f64).powf(2.0 / n))
}
