//! First Dirichlet eigenpair of −Δ (μ = 0) with the norms of the
//! eigenfunction used by the test-function upper bounds.

use super::cartesian::cartesian_operator;
use super::eigen::symmetric_eigenpairs;
use super::radial::radial_ground_state;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Shape};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenpairZero {
    /// λ_{0,1}.
    pub lambda01: f64,
    /// sup φ for the positive, L²-normalized eigenfunction φ.
    pub phi_sup: f64,
    /// max(sup |φ|, sup |∇φ|).
    pub phi_c1: f64,
    /// min of φ/ρ over grid nodes at least one cell away from ∂Ω.
    pub c1_lower: f64,
}

/// λ_{0,1} and φ_{0,1} norms; balls use the radial l = 0 channel, boxes the
/// Cartesian grid.
pub fn first_dirichlet_eigenpair_zero(domain: &DomainSpec, mesh: usize) -> Result<EigenpairZero> {
    let pair = match domain.shape() {
        Shape::Ball { dim, radius } => ball_pair(*dim, *radius, mesh)?,
        Shape::Box { .. } => box_pair(domain, mesh)?,
    };
    if !(pair.lambda01 > 0.0 && pair.c1_lower > 0.0) {
        return Err(Error::Convergence { what: "first eigenpair", iterations: 0, residual: pair.c1_lower });
    }
    Ok(pair)
}

fn ball_pair(dim: usize, radius: f64, mesh: usize) -> Result<EigenpairZero> {
    if mesh < 16 {
        return Err(Error::Restriction(format!("mesh must be at least 16, got {mesh}")));
    }
    let (lambda01, h, w) = radial_ground_state(dim, radius, mesh)?;
    let n = mesh;
    let phi_sup = w.iter().cloned().fold(0.0, f64::max);
    // |∇φ| = |w'(r)|: central differences inside, second order one-sided at r = R
    let mut grad: f64 = (1..n).map(|i| ((w[i + 1] - w[i - 1]) / (2.0 * h)).abs()).fold(0.0, f64::max);
    grad = grad.max(((3.0 * w[n] - 4.0 * w[n - 1] + w[n - 2]) / (2.0 * h)).abs());
    let c1_lower = (0..n - 1)
        .map(|i| w[i] / (radius - i as f64 * h))
        .fold(f64::INFINITY, f64::min);
    Ok(EigenpairZero { lambda01, phi_sup, phi_c1: phi_sup.max(grad), c1_lower })
}

fn box_pair(domain: &DomainSpec, mesh: usize) -> Result<EigenpairZero> {
    let (a, grid) = cartesian_operator(domain, 0.0, mesh)?;
    let (vals, vecs) = symmetric_eigenpairs(&a, 1)?;
    let cell: f64 = grid.h.iter().product();
    let v = &vecs[0];
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let scale = sign / (v.iter().map(|x| x * x).sum::<f64>() * cell).sqrt();
    let phi: Vec<f64> = v.iter().map(|x| x * scale).collect();
    let dim = grid.dim();
    let m = grid.m;
    let hmax = grid.h.iter().cloned().fold(0.0, f64::max);
    let mut phi_sup = 0.0f64;
    let mut grad = 0.0f64;
    let mut c1_lower = f64::INFINITY;
    for (idx, &p) in phi.iter().enumerate() {
        let multi = grid.unflatten(idx);
        phi_sup = phi_sup.max(p.abs());
        let mut g2 = 0.0;
        for d in 0..dim {
            let s = m.pow(d as u32);
            let minus = if multi[d] > 0 { phi[idx - s] } else { 0.0 };
            let plus = if multi[d] + 1 < m { phi[idx + s] } else { 0.0 };
            g2 += ((plus - minus) / (2.0 * grid.h[d])).powi(2);
        }
        grad = grad.max(g2.sqrt());
        let rho = domain.distance_to_boundary(&grid.point(idx))?;
        if rho > hmax * (1.0 + 1e-9) {
            c1_lower = c1_lower.min(p / rho);
        }
    }
    // the gradient at the boundary nodes themselves (φ = 0 there)
    for idx in 0..phi.len() {
        let multi = grid.unflatten(idx);
        for d in 0..dim {
            if multi[d] == 0 || multi[d] + 1 == m {
                grad = grad.max(phi[idx].abs() / grid.h[d]);
            }
        }
    }
    Ok(EigenpairZero { lambda01: vals[0], phi_sup, phi_c1: phi_sup.max(grad), c1_lower })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn unit_ball_in_three_dimensions() {
        let e = first_dirichlet_eigenpair_zero(&DomainSpec::ball(3, 1.0).unwrap(), 4000).unwrap();
        assert_relative_eq!(e.lambda01, PI * PI, max_relative = 1e-6);
        let sup = PI / (2.0 * PI).sqrt();
        assert_relative_eq!(e.phi_sup, sup, max_relative = 1e-5);
        // φ = sin(πr)/(r√(2π)); |φ'| peaks inside the ball
        let grad = (1..10_000)
            .map(|i| {
                let r = i as f64 / 10_000.0;
                ((PI * r * (PI * r).cos() - (PI * r).sin()) / (r * r)).abs()
            })
            .fold(0.0, f64::max)
            / (2.0 * PI).sqrt();
        assert_relative_eq!(e.phi_c1, grad, max_relative = 1e-3);
        assert_relative_eq!(e.c1_lower, sup, max_relative = 1e-2);
    }

    #[test]
    fn unit_disk() {
        let e = first_dirichlet_eigenpair_zero(&DomainSpec::ball(2, 1.0).unwrap(), 4000).unwrap();
        assert_relative_eq!(e.lambda01, 5.783_185_962_946_784, max_relative = 1e-6);
        assert!(e.phi_sup <= e.phi_c1);
    }

    #[test]
    fn higher_dimensional_ball_extrapolates_the_center() {
        // N = 4: φ ∝ J_1(j r)/r, sup at the center
        let e = first_dirichlet_eigenpair_zero(&DomainSpec::ball(4, 1.0).unwrap(), 4000).unwrap();
        assert_relative_eq!(e.lambda01, 3.831_705_970_207_512_3f64.powi(2), max_relative = 1e-6);
        assert!(e.phi_sup > 0.0 && e.phi_sup <= e.phi_c1);
    }

    #[test]
    fn square_matches_product_of_sines() {
        let d: DomainSpec = "box:N=2,sides=1x1,center=0.1x0".parse().unwrap();
        let e = first_dirichlet_eigenpair_zero(&d, 100).unwrap();
        assert_relative_eq!(e.lambda01, 2.0 * PI * PI, max_relative = 1e-3);
        // φ = 2 sin(πx) sin(πy): sup 2, sup |∇φ| = 2π
        assert_relative_eq!(e.phi_sup, 2.0, max_relative = 1e-3);
        assert_relative_eq!(e.phi_c1, 2.0 * PI, max_relative = 1e-2);
        // near a corner φ/ρ ≈ 2π² max(x, y), so the grid minimum shrinks with h
        let h = 0.01;
        assert!(e.c1_lower > 0.0 && e.c1_lower < 2.0 * PI * PI * 3.0 * h);
    }
}
