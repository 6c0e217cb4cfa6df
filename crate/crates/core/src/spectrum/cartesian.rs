//! Finite differences on a Cartesian grid over a box.
//!
//! Each side is divided into `mesh` cells; the unknowns are the interior
//! nodes. The Laplacian is the (2N+1)-point stencil and μ/|x|² enters on the
//! diagonal: at the node (or nodes) whose dual cell contains the origin it
//! is replaced by the cell average. In two dimensions that average diverges,
//! so the dyadic core of the cell below the mesh scale is left out.

use super::eigen::{symmetric_eigenpairs, CsrMatrix};
use super::{Method, Spectrum};
use crate::constants::check_mu;
use crate::error::{Error, Result};
use crate::geometry::{origin_shell_boxes, quadrature, radial_box_integral, DomainSpec, QuadratureOptions};

/// Nodes closer than this to the origin (in every coordinate) are rejected.
const ORIGIN_NODE_TOL: f64 = 1e-12;
/// k_max above this fraction of the unknowns triggers a warning.
const SAFE_FRACTION: f64 = 0.1;

/// Interior nodes lo + j·h, j = 1..mesh−1, per axis; axis 0 varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid {
    pub lo: Vec<f64>,
    pub h: Vec<f64>,
    /// interior nodes per axis
    pub m: usize,
}

impl CartesianGrid {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn coordinate(&self, axis: usize, j: usize) -> f64 {
        self.lo[axis] + (j + 1) as f64 * self.h[axis]
    }

    /// Multi-index of a flat index.
    pub fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        (0..self.dim())
            .map(|_| {
                let j = idx % self.m;
                idx /= self.m;
                j
            })
            .collect()
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.unflatten(idx).iter().enumerate().map(|(d, &j)| self.coordinate(d, j)).collect()
    }

    fn stride(&self, axis: usize) -> usize {
        self.m.pow(axis as u32)
    }
}

fn grid_for(domain: &DomainSpec, mesh: usize) -> Result<CartesianGrid> {
    let (lo, hi) = domain
        .bounds()
        .ok_or_else(|| Error::Restriction("Cartesian finite differences need a box domain".into()))?;
    if mesh < 4 {
        return Err(Error::Restriction(format!("Cartesian mesh must be at least 4, got {mesh}")));
    }
    let h = lo.iter().zip(&hi).map(|(a, b)| (b - a) / mesh as f64).collect();
    Ok(CartesianGrid { lo, h, m: mesh - 1 })
}

/// Number of dyadic shells kept around the origin in two dimensions: the
/// excised core is the origin cell scaled by 2^{−levels} ≈ h/D₀.
fn core_levels(h: f64, d0: f64) -> usize {
    (d0 / h).log2().ceil().max(1.0) as usize
}

/// Assembles L_μ on the grid.
pub(crate) fn cartesian_operator(domain: &DomainSpec, mu: f64, mesh: usize) -> Result<(CsrMatrix, CartesianGrid)> {
    let dim = domain.dim();
    check_mu(dim, mu)?;
    let grid = grid_for(domain, mesh)?;
    let m = grid.m;
    let n = grid.len();

    // nodes whose closed dual cell contains the origin
    let mut origin_cells: Vec<Vec<usize>> = vec![Vec::new()];
    for d in 0..dim {
        let cands: Vec<usize> =
            (0..m).filter(|&j| grid.coordinate(d, j).abs() <= 0.5 * grid.h[d] * (1.0 + 1e-12)).collect();
        origin_cells = origin_cells
            .into_iter()
            .flat_map(|prefix| {
                cands.iter().map(move |&j| {
                    let mut p = prefix.clone();
                    p.push(j);
                    p
                })
            })
            .collect();
    }
    if mu != 0.0 {
        for cell in &origin_cells {
            if cell.iter().enumerate().all(|(d, &j)| grid.coordinate(d, j).abs() < ORIGIN_NODE_TOL) {
                return Err(Error::OriginOnNode { index: cell.clone() });
            }
        }
    }

    let mut special = std::collections::HashMap::new();
    if mu != 0.0 {
        let opts = QuadratureOptions::default();
        for cell in &origin_cells {
            let lo: Vec<f64> = cell.iter().enumerate().map(|(d, &j)| grid.coordinate(d, j) - 0.5 * grid.h[d]).collect();
            let hi: Vec<f64> = cell.iter().enumerate().map(|(d, &j)| grid.coordinate(d, j) + 0.5 * grid.h[d]).collect();
            let vol: f64 = grid.h.iter().product();
            let integral = if dim >= 3 {
                radial_box_integral(&lo, &hi, |r| 1.0 / (r * r), Some(-2.0), &opts)?.value
            } else {
                // each dyadic shell of a 2-D cell carries the same ∫|x|^{-2}
                let shell = quadrature::integrate_boxes(
                    |y: &[f64]| 1.0 / (y[0] * y[0] + y[1] * y[1]),
                    origin_shell_boxes(&lo, &hi, 0..1),
                    &opts,
                )?
                .value;
                let hmin = grid.h.iter().cloned().fold(f64::INFINITY, f64::min);
                shell * core_levels(hmin, domain.d0()) as f64
            };
            let flat: usize = cell.iter().enumerate().map(|(d, &j)| j * grid.stride(d)).sum();
            special.insert(flat, mu * integral / vol);
        }
    }

    let mut triplets = Vec::with_capacity(n * (2 * dim + 1));
    let inv_h2: Vec<f64> = grid.h.iter().map(|h| 1.0 / (h * h)).collect();
    let diag_lap: f64 = inv_h2.iter().map(|v| 2.0 * v).sum();
    for idx in 0..n {
        let multi = grid.unflatten(idx);
        let potential = match special.get(&idx) {
            Some(&v) => v,
            None if mu == 0.0 => 0.0,
            None => {
                let r2: f64 = multi.iter().enumerate().map(|(d, &j)| grid.coordinate(d, j).powi(2)).sum();
                mu / r2
            }
        };
        triplets.push((idx, idx, diag_lap + potential));
        for d in 0..dim {
            let s = grid.stride(d);
            if multi[d] > 0 {
                triplets.push((idx, idx - s, -inv_h2[d]));
            }
            if multi[d] + 1 < m {
                triplets.push((idx, idx + s, -inv_h2[d]));
            }
        }
    }
    Ok((CsrMatrix::from_triplets(n, triplets), grid))
}

/// The k_max smallest eigenvalues of the grid operator, with est_rel_error
/// from the change against the grid with mesh/2.
pub fn cartesian_fd_spectrum(domain: &DomainSpec, mu: f64, mesh: usize, k_max: usize) -> Result<Spectrum> {
    if k_max == 0 {
        return Err(Error::Restriction("k_max must be at least 1".into()));
    }
    if domain.dim() == 2 && mu < 0.0 {
        return Err(Error::Restriction("μ < 0 requires N ≥ 3".into()));
    }
    let (a, grid) = cartesian_operator(domain, mu, mesh)?;
    let n = grid.len();
    if k_max > n {
        return Err(Error::Restriction(format!("k_max = {k_max} exceeds the {n} grid unknowns")));
    }
    let mut warnings = Vec::new();
    if k_max as f64 > SAFE_FRACTION * n as f64 {
        warnings.push(format!(
            "k_max = {k_max} is more than {:.0}% of the {n} unknowns; upper eigenvalues are inaccurate",
            100.0 * SAFE_FRACTION
        ));
    }
    let (values, _) = symmetric_eigenpairs(&a, k_max)?;

    let coarse_mesh = mesh / 2;
    let est_rel_error = match (coarse_mesh >= 4).then(|| cartesian_operator(domain, mu, coarse_mesh)) {
        Some(Ok((ac, gc))) => {
            let kc = k_max.min(gc.len());
            let (coarse, _) = symmetric_eigenpairs(&ac, kc)?;
            values.iter().zip(&coarse).map(|(f, c)| (c - f).abs() / (3.0 * f.abs())).fold(0.0, f64::max)
        }
        Some(Err(e)) => {
            warnings.push(format!("no error estimate: the mesh/2 grid is unusable ({e})"));
            f64::NAN
        }
        None => {
            warnings.push("no error estimate: mesh too small to halve".into());
            f64::NAN
        }
    };
    Ok(Spectrum { domain: domain.clone(), mu, method: Method::CartesianFd, est_rel_error, values, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn square_laplacian() {
        let d: DomainSpec = "box:N=2,sides=1x1,center=0.001x0".parse().unwrap();
        let s = cartesian_fd_spectrum(&d, 0.0, 60, 3).unwrap();
        let p2 = PI * PI;
        for (v, e) in s.values.iter().zip([2.0 * p2, 5.0 * p2, 5.0 * p2]) {
            assert_relative_eq!(*v, e, max_relative = 1e-2);
        }
        assert!(s.est_rel_error > 0.0 && s.est_rel_error < 1e-2);
    }

    #[test]
    fn origin_on_node_is_rejected() {
        let d: DomainSpec = "box:N=2,sides=1x1".parse().unwrap();
        assert!(matches!(cartesian_fd_spectrum(&d, 1.0, 20, 1), Err(Error::OriginOnNode { .. })));
        // without a potential the node position does not matter
        assert!(cartesian_fd_spectrum(&d, 0.0, 20, 1).is_ok());
    }

    #[test]
    fn negative_mu_in_two_dimensions() {
        let d: DomainSpec = "box:N=2,sides=1x1,center=0.01x0".parse().unwrap();
        let err = cartesian_fd_spectrum(&d, -0.1, 20, 1).unwrap_err();
        assert!(err.to_string().contains("μ < 0 requires N ≥ 3"));
    }

    #[test]
    fn potential_raises_eigenvalues() {
        let d: DomainSpec = "box:N=2,sides=1x1,center=0.013x0.007".parse().unwrap();
        let free = cartesian_fd_spectrum(&d, 0.0, 40, 4).unwrap();
        let pot = cartesian_fd_spectrum(&d, 1.0, 40, 4).unwrap();
        for (a, b) in free.values.iter().zip(&pot.values) {
            assert!(b > a);
        }
    }

    #[test]
    fn three_dimensional_negative_mu() {
        let d: DomainSpec = "box:N=3,sides=1,center=0.013x0.007x0.003".parse().unwrap();
        let s = cartesian_fd_spectrum(&d, -0.2, 16, 2).unwrap();
        assert!(s.values[0] > 0.0 && s.values[0] < 3.0 * PI * PI);
    }
}
