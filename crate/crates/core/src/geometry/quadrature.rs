//! Globally adaptive quadrature on intervals and axis-aligned boxes.
//!
//! Both drivers keep a max-heap of cells keyed by their local error
//! estimate and bisect the worst cell until the summed error meets the
//! relative tolerance. Intervals use Gauss-Kronrod 7/15; boxes use tensor
//! Gauss-Legendre 7 against tensor Gauss-Legendre 5.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    /// Number of dyadic shells resolved around a point singularity.
    pub dyadic_levels: usize,
    pub max_evaluations: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, dyadic_levels: 40, max_evaluations: 40_000_000 }
    }
}

impl QuadratureOptions {
    /// The accuracy below which a result is reported as an error.
    pub const REQUIRED_REL: f64 = 1e-6;
}

struct Cell<T> {
    error: f64,
    value: f64,
    region: T,
}

impl<T> PartialEq for Cell<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Cell<T> {}
impl<T> PartialOrd for Cell<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Cell<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// ∫ f over the union of `intervals` (which must not overlap).
pub fn integrate_intervals<F: Fn(f64) -> f64>(
    f: F,
    intervals: &[(f64, f64)],
    opts: &QuadratureOptions,
) -> Result<Estimate> {
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evals = 0;
    for &(a, b) in intervals {
        if b <= a {
            continue;
        }
        let (v, e) = gauss_kronrod(&f, a, b);
        evals += 15;
        total += v;
        total_err += e;
        heap.push(Cell { error: e, value: v, region: (a, b) });
    }
    while total_err > opts.rel_tol * total.abs() && evals < opts.max_evaluations {
        let Some(worst) = heap.pop() else { break };
        let (a, b) = worst.region;
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            heap.push(worst);
            break;
        }
        total -= worst.value;
        total_err -= worst.error;
        for (lo, hi) in [(a, mid), (mid, b)] {
            let (v, e) = gauss_kronrod(&f, lo, hi);
            evals += 15;
            total += v;
            total_err += e;
            heap.push(Cell { error: e, value: v, region: (lo, hi) });
        }
    }
    // re-sum to shed accumulated cancellation in the running totals
    let value = heap.iter().map(|c| c.value).sum::<f64>();
    let error = heap.iter().map(|c| c.error).sum::<f64>();
    finish(value, error, evals)
}

fn finish(value: f64, error: f64, evaluations: usize) -> Result<Estimate> {
    if !value.is_finite() || error > QuadratureOptions::REQUIRED_REL * value.abs() {
        return Err(Error::Accuracy {
            estimate: value,
            achieved: error,
            requested: QuadratureOptions::REQUIRED_REL * value.abs(),
        });
    }
    Ok(Estimate { value, error, evaluations })
}

/// Gauss-Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

struct TensorRule {
    dim: usize,
    high: (Vec<f64>, Vec<f64>),
    low: (Vec<f64>, Vec<f64>),
}

impl TensorRule {
    fn new(dim: usize) -> Self {
        Self { dim, high: gauss_legendre(7), low: gauss_legendre(5) }
    }

    fn apply_one<F: Fn(&[f64]) -> f64>(&self, f: &F, lo: &[f64], hi: &[f64], rule: &(Vec<f64>, Vec<f64>)) -> (f64, usize) {
        let n = rule.0.len();
        let dim = self.dim;
        let mut idx = vec![0usize; dim];
        let mut point = vec![0.0; dim];
        let mut jac = 1.0;
        for d in 0..dim {
            jac *= 0.5 * (hi[d] - lo[d]);
        }
        let mut sum = 0.0;
        let total = n.pow(dim as u32);
        for _ in 0..total {
            let mut w = 1.0;
            for d in 0..dim {
                let t = rule.0[idx[d]];
                point[d] = 0.5 * (lo[d] + hi[d]) + 0.5 * (hi[d] - lo[d]) * t;
                w *= rule.1[idx[d]];
            }
            sum += w * f(&point);
            for d in 0..dim {
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
            }
        }
        (sum * jac, total)
    }

    fn apply<F: Fn(&[f64]) -> f64>(&self, f: &F, lo: &[f64], hi: &[f64]) -> (f64, f64, usize) {
        let (h, nh) = self.apply_one(f, lo, hi, &self.high);
        let (l, nl) = self.apply_one(f, lo, hi, &self.low);
        (h, (h - l).abs(), nh + nl)
    }
}

/// ∫ f over the union of non-overlapping boxes, each given as (lo, hi).
pub fn integrate_boxes<F: Fn(&[f64]) -> f64>(
    f: F,
    boxes: Vec<(Vec<f64>, Vec<f64>)>,
    opts: &QuadratureOptions,
) -> Result<Estimate> {
    let Some(dim) = boxes.first().map(|b| b.0.len()) else {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
    };
    let rule = TensorRule::new(dim);
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evals = 0;
    for (lo, hi) in boxes {
        if lo.iter().zip(&hi).any(|(a, b)| b <= a) {
            continue;
        }
        let (v, e, n) = rule.apply(&f, &lo, &hi);
        evals += n;
        total += v;
        total_err += e;
        heap.push(Cell { error: e, value: v, region: (lo, hi) });
    }
    while total_err > opts.rel_tol * total.abs() && evals < opts.max_evaluations {
        let Some(worst) = heap.pop() else { break };
        let (lo, hi) = worst.region;
        total -= worst.value;
        total_err -= worst.error;
        // bisect along the longest edge
        let axis = (0..dim)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        let mid = 0.5 * (lo[axis] + hi[axis]);
        let mut left_hi = hi.clone();
        left_hi[axis] = mid;
        let mut right_lo = lo.clone();
        right_lo[axis] = mid;
        for (a, b) in [(lo, left_hi), (right_lo, hi)] {
            let (v, e, n) = rule.apply(&f, &a, &b);
            evals += n;
            total += v;
            total_err += e;
            heap.push(Cell { error: e, value: v, region: (a, b) });
        }
    }
    let value = heap.iter().map(|c| c.value).sum::<f64>();
    let error = heap.iter().map(|c| c.error).sum::<f64>();
    finish(value, error, evals)
}

/// Dyadic shells of the box [0, a₁]×…×[0, a_N] around its corner at the
/// origin: level j covers the box scaled by 2^{−j} minus the box scaled by
/// 2^{−j−1}, split into 2^N − 1 boxes that stay away from the origin.
pub fn corner_shell(extents: &[f64], level: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let dim = extents.len();
    let s = 0.5f64.powi(level as i32);
    let mut out = Vec::with_capacity((1 << dim) - 1);
    for mask in 1u32..(1 << dim) {
        let mut lo = vec![0.0; dim];
        let mut hi = vec![0.0; dim];
        for d in 0..dim {
            if mask & (1 << d) != 0 {
                lo[d] = 0.5 * s * extents[d];
                hi[d] = s * extents[d];
            } else {
                lo[d] = 0.0;
                hi[d] = 0.5 * s * extents[d];
            }
        }
        out.push((lo, hi));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(7);
        let sum_w: f64 = w.iter().sum();
        assert_relative_eq!(sum_w, 2.0, max_relative = 1e-15);
        let m12: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert_relative_eq!(m12, 2.0 / 13.0, max_relative = 1e-14);
    }

    #[test]
    fn interval_driver_handles_endpoint_singularity() {
        let opts = QuadratureOptions::default();
        let panels: Vec<(f64, f64)> = (0..40).map(|j| (0.5f64.powi(j + 1), 0.5f64.powi(j))).collect();
        let est = integrate_intervals(|x| x.powf(-0.5), &panels, &opts).unwrap();
        // ∫_{2^{-40}}^1 x^{-1/2} dx
        assert_relative_eq!(est.value, 2.0 * (1.0 - 0.5f64.powi(20)), max_relative = 1e-10);
    }

    #[test]
    fn box_driver_on_smooth_integrand() {
        let opts = QuadratureOptions::default();
        let est = integrate_boxes(
            |p: &[f64]| (p[0] + 2.0 * p[1]).exp(),
            vec![(vec![0.0, 0.0], vec![1.0, 0.5])],
            &opts,
        )
        .unwrap();
        let exact = (1f64.exp() - 1.0) * (1f64.exp() - 1.0) / 2.0;
        assert_relative_eq!(est.value, exact, max_relative = 1e-10);
    }

    #[test]
    fn corner_shells_tile_the_box() {
        let ext = [1.0, 2.0, 0.5];
        let vol: f64 = (0..30)
            .flat_map(|j| corner_shell(&ext, j))
            .map(|(lo, hi)| lo.iter().zip(&hi).map(|(a, b)| b - a).product::<f64>())
            .sum();
        assert_relative_eq!(vol, 1.0, max_relative = 1e-12);
    }
}
