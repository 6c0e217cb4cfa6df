//! Symmetric eigensolvers: tridiagonal (Sturm bisection, implicit QL),
//! dense (Householder + QL), and sparse shift-invert block Lanczos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Seed of the Lanczos start block; fixed so that runs are reproducible.
pub const LANCZOS_SEED: u64 = 0x4841_5244_594c_4142;
/// Matrices up to this dimension are solved densely.
pub const DENSE_LIMIT: usize = 200;
/// Largest n·(bandwidth+1) for which the banded factorization is used.
const BANDED_STORAGE_LIMIT: usize = 25_000_000;
/// Accepted residual ‖Av − λv‖ relative to ‖A‖ (Gershgorin estimate).
pub const RESIDUAL_TOL: f64 = 1e-9;
const RITZ_TOL: f64 = 1e-11;
const PCG_TOL: f64 = 1e-13;
const PCG_MAX_ITER: usize = 50_000;
const QL_MAX_ITER: usize = 60;
const POLISH_ROUNDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMode {
    /// The k smallest eigenvalues of a general sparse symmetric matrix.
    Smallest,
    /// Every eigenvalue of a tridiagonal matrix by implicit QL; the first k are returned.
    TridiagonalFull,
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds an n×n matrix from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < n && j < n, "triplet ({i}, {j}) outside a {n}×{n} matrix");
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            cols.push(j);
            vals.push(v);
            row_ptr[i + 1] += 1;
            last = Some((i, j));
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    /// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e` (len n−1).
    pub fn tridiagonal(d: &[f64], e: &[f64]) -> Self {
        let mut t = Vec::with_capacity(3 * d.len());
        for (i, &v) in d.iter().enumerate() {
            t.push((i, i, v));
        }
        for (i, &v) in e.iter().enumerate() {
            t.push((i, i + 1, v));
            t.push((i + 1, i, v));
        }
        Self::from_triplets(d.len(), t)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    /// y = A x, rows in parallel (each row summed in a fixed order).
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().with_min_len(4096).for_each(|(i, yi)| {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Largest |i − j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        (0..self.n).flat_map(|i| self.row(i).map(move |(j, _)| i.abs_diff(j))).max().unwrap_or(0)
    }

    /// Interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let mut d = 0.0;
            let mut r = 0.0;
            for (j, v) in self.row(i) {
                if i == j {
                    d += v;
                } else {
                    r += v.abs();
                }
            }
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    pub fn norm_estimate(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| (self.get(j, i) - v).abs() <= tol * v.abs().max(1.0)))
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                a[i * self.n + j] = v;
            }
        }
        a
    }

    /// (d, e) if the matrix is tridiagonal.
    fn tridiagonal_parts(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.bandwidth() > 1 {
            return None;
        }
        let d = self.diagonal();
        let e = (0..self.n.saturating_sub(1)).map(|i| self.get(i + 1, i)).collect();
        Some((d, e))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

// ---------------------------------------------------------------------------
// tridiagonal

/// Number of eigenvalues of the tridiagonal (d, e) strictly below x.
pub fn sturm_count(d: &[f64], e: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e[i - 1] * e[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn tridiagonal_gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (lo, hi)
}

/// The `count` smallest eigenvalues of the symmetric tridiagonal (d, e) by
/// bisection on Sturm counts, ascending.
pub fn tridiagonal_smallest(d: &[f64], e: &[f64], count: usize) -> Vec<f64> {
    let n = d.len();
    let count = count.min(n);
    let (lo0, hi0) = tridiagonal_gershgorin(d, e);
    let scale = lo0.abs().max(hi0.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(scale * 1e-300);
    (0..count)
        .into_par_iter()
        .map(|j| {
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..2000 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sturm_count(d, e, mid, pivmin) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Implicit QL on the tridiagonal (d, e), e[i] coupling i and i+1. On return
/// `d` holds the eigenvalues (unsorted). If `z` is given (n×n row-major) it is
/// multiplied on the right by the accumulated rotations, so starting from the
/// identity its columns become the eigenvectors.
fn tql(d: &mut [f64], e_in: &[f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&e_in[..n.saturating_sub(1)]);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITER {
                return Err(Error::Convergence { what: "tridiagonal QL", iterations: iter, residual: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let zi1 = z[k * n + i + 1];
                        let zi = z[k * n + i];
                        z[k * n + i + 1] = s * zi + c * zi1;
                        z[k * n + i] = c * zi - s * zi1;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// All eigenvalues of the symmetric tridiagonal (d, e), ascending.
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    let mut d = d.to_vec();
    tql(&mut d, e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvector of the tridiagonal (d, e) for the (accurate) eigenvalue
/// `lambda`, by inverse iteration; unit 2-norm.
pub fn tridiagonal_eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    let (lo, hi) = tridiagonal_gershgorin(d, e);
    let tiny = f64::EPSILON * lo.abs().max(hi.abs()).max(1.0);
    let mut x = vec![1.0; n];
    for _ in 0..3 {
        // Thomas algorithm with zero pivots nudged
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut piv = d[0] - lambda;
        if piv.abs() < tiny {
            piv = tiny;
        }
        y[0] = x[0] / piv;
        for i in 1..n {
            c[i - 1] = e[i - 1] / piv;
            piv = d[i] - lambda - e[i - 1] * c[i - 1];
            if piv.abs() < tiny {
                piv = tiny;
            }
            y[i] = (x[i] - e[i - 1] * y[i - 1]) / piv;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        let s = norm(&y);
        x = y.into_iter().map(|v| v / s).collect();
    }
    x
}

// ---------------------------------------------------------------------------
// dense

/// Eigen-decomposition of a dense symmetric matrix (row-major n×n):
/// eigenvalues ascending and the matching unit eigenvectors.
pub fn dense_symmetric_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut a = a.to_vec();
    // symmetrize against round-off in assembled projections
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    // Householder reduction to tridiagonal form
    let mut reflectors: Vec<Vec<f64>> = Vec::new();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<f64> = (k + 1..n).map(|i| a[i * n + k]).collect();
        let xn = norm(&x);
        if xn == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        let alpha = if x[0] > 0.0 { -xn } else { xn };
        let mut v = x;
        v[0] -= alpha;
        let vn = norm(&v);
        if vn == 0.0 {
            reflectors.push(Vec::new());
            continue;
        }
        v.iter_mut().for_each(|t| *t /= vn);
        let m = n - k - 1;
        let mut p = vec![0.0; m];
        for (r, pr) in p.iter_mut().enumerate() {
            let row = (k + 1 + r) * n + k + 1;
            *pr = dot(&a[row..row + m], &v);
        }
        let kv = dot(&v, &p);
        let q: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kv * vi).collect();
        for r in 0..m {
            let row = (k + 1 + r) * n + k + 1;
            for c in 0..m {
                a[row + c] -= 2.0 * (v[r] * q[c] + q[r] * v[c]);
            }
        }
        a[(k + 1) * n + k] = alpha;
        a[k * n + k + 1] = alpha;
        for i in k + 2..n {
            a[i * n + k] = 0.0;
            a[k * n + i] = 0.0;
        }
        reflectors.push(v);
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let e: Vec<f64> = (0..n.saturating_sub(1)).map(|i| a[(i + 1) * n + i]).collect();
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tql(&mut d, &e, Some(&mut z))?;
    // back-transform: z ← H_0 ⋯ H_{n−3} z
    for (k, v) in reflectors.iter().enumerate().rev() {
        if v.is_empty() {
            continue;
        }
        for col in 0..n {
            let s: f64 = v.iter().enumerate().map(|(r, vr)| vr * z[(k + 1 + r) * n + col]).sum();
            for (r, vr) in v.iter().enumerate() {
                z[(k + 1 + r) * n + col] -= 2.0 * s * vr;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order.iter().map(|&c| (0..n).map(|r| z[r * n + c]).collect()).collect();
    Ok((values, vectors))
}

// ---------------------------------------------------------------------------
// linear solves for the shift-invert operator

/// LDLᵀ factorization of a symmetric positive definite banded matrix.
struct BandedLdlt {
    n: usize,
    b: usize,
    /// row i stores L[i][i−b..i] at offsets 0..b (unit diagonal implied)
    l: Vec<f64>,
    d: Vec<f64>,
}

impl BandedLdlt {
    /// Factors A − σI; `None` if a pivot is not positive.
    fn factor(a: &CsrMatrix, sigma: f64) -> Option<Self> {
        let n = a.n;
        let b = a.bandwidth();
        let w = b + 1;
        let mut l = vec![0.0; n * w];
        // load the lower band: slot b − (i − j) of row i holds A[i][j]
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    l[i * w + b - (i - j)] += v - if i == j { sigma } else { 0.0 };
                }
            }
        }
        let mut d = vec![0.0; n];
        let mut tmp = vec![0.0; w];
        for i in 0..n {
            let j0 = i.saturating_sub(b);
            // tmp[j − j0] = L[i][j]·d[j] as computed
            for j in j0..i {
                let mut s = l[i * w + b - (i - j)];
                let k0 = j0.max(j.saturating_sub(b));
                for k in k0..j {
                    s -= tmp[k - j0] * l[j * w + b - (j - k)];
                }
                tmp[j - j0] = s;
                l[i * w + b - (i - j)] = s / d[j];
            }
            let mut di = l[i * w + b];
            for j in j0..i {
                di -= tmp[j - j0] * l[i * w + b - (i - j)];
            }
            if di.is_nan() || di <= 0.0 {
                return None;
            }
            d[i] = di;
            l[i * w + b] = 1.0;
        }
        Some(Self { n, b, l, d })
    }

    fn solve(&self, rhs: &[f64], x: &mut [f64]) {
        let (n, b, w) = (self.n, self.b, self.b + 1);
        x.copy_from_slice(rhs);
        for i in 0..n {
            let mut s = x[i];
            for j in i.saturating_sub(b)..i {
                s -= self.l[i * w + b - (i - j)] * x[j];
            }
            x[i] = s;
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let s = x[i];
            for j in i.saturating_sub(b)..i {
                x[j] -= self.l[i * w + b - (i - j)] * s;
            }
        }
    }
}

enum InnerSolver<'a> {
    Banded(BandedLdlt),
    Pcg { a: &'a CsrMatrix, sigma: f64, inv_diag: Vec<f64> },
}

impl<'a> InnerSolver<'a> {
    fn new(a: &'a CsrMatrix, sigma: f64) -> Option<Self> {
        if a.n.saturating_mul(a.bandwidth() + 1) <= BANDED_STORAGE_LIMIT {
            return BandedLdlt::factor(a, sigma).map(InnerSolver::Banded);
        }
        let inv_diag = a
            .diagonal()
            .iter()
            .map(|&v| {
                let t = (v - sigma).abs();
                if t > 0.0 {
                    1.0 / t
                } else {
                    1.0
                }
            })
            .collect();
        Some(InnerSolver::Pcg { a, sigma, inv_diag })
    }

    /// x = (A − σI)^{-1} b
    fn solve(&self, b: &[f64], x: &mut [f64]) -> Result<()> {
        match self {
            InnerSolver::Banded(f) => {
                f.solve(b, x);
                Ok(())
            }
            InnerSolver::Pcg { a, sigma, inv_diag } => pcg(a, *sigma, inv_diag, b, x),
        }
    }
}

fn pcg(a: &CsrMatrix, sigma: f64, inv_diag: &[f64], b: &[f64], x: &mut [f64]) -> Result<()> {
    let n = b.len();
    x.iter_mut().for_each(|v| *v = 0.0);
    let bn = norm(b);
    if bn == 0.0 {
        return Ok(());
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(inv_diag).map(|(r, m)| r * m).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 0..PCG_MAX_ITER {
        a.matvec(&p, &mut ap);
        axpy(-sigma, &p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Convergence { what: "conjugate gradients (operator not positive definite)", iterations: it, residual: norm(&r) / bn });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        if norm(&r) <= PCG_TOL * bn {
            return Ok(());
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Convergence { what: "conjugate gradients", iterations: PCG_MAX_ITER, residual: norm(&r) / bn })
}

// ---------------------------------------------------------------------------
// sparse driver

/// The k smallest eigenvalues, ascending.
pub fn symmetric_eigensolve(a: &CsrMatrix, k: usize, mode: EigenMode) -> Result<Vec<f64>> {
    check_request(a, k)?;
    match mode {
        EigenMode::TridiagonalFull => {
            let (d, e) = a
                .tridiagonal_parts()
                .ok_or_else(|| Error::Restriction("tridiagonal mode needs a tridiagonal matrix".into()))?;
            let mut v = tridiagonal_eigenvalues(&d, &e)?;
            v.truncate(k);
            Ok(v)
        }
        EigenMode::Smallest => Ok(symmetric_eigenpairs(a, k)?.0),
    }
}

fn check_request(a: &CsrMatrix, k: usize) -> Result<()> {
    if k == 0 || k > a.n {
        return Err(Error::Restriction(format!("requested {k} eigenvalues of a {}×{} matrix", a.n, a.n)));
    }
    if !a.is_symmetric(1e-12) {
        return Err(Error::Restriction("matrix is not symmetric".into()));
    }
    Ok(())
}

/// The k smallest eigenpairs (values ascending, unit eigenvectors).
pub fn symmetric_eigenpairs(a: &CsrMatrix, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    check_request(a, k)?;
    let n = a.n;
    if n <= DENSE_LIMIT {
        let (mut vals, mut vecs) = dense_symmetric_eigen(&a.to_dense(), n)?;
        vals.truncate(k);
        vecs.truncate(k);
        return Ok((vals, vecs));
    }
    let (glo, _) = a.gershgorin();
    let anorm = a.norm_estimate();
    // σ = 0 unless A turns out not to be positive definite
    if let Some(solver) = InnerSolver::new(a, 0.0) {
        match block_lanczos(a, &solver, k, anorm) {
            Err(Error::Convergence { what, .. }) if what.starts_with("conjugate gradients (") => {}
            other => return other,
        }
    }
    let shift = glo.min(0.0) - 1e-3 * anorm;
    let solver = InnerSolver::new(a, shift)
        .ok_or(Error::Convergence { what: "shifted factorization", iterations: 0, residual: f64::NAN })?;
    block_lanczos(a, &solver, k, anorm)
}

/// Block size of the Lanczos recurrence; at least the largest multiplicity
/// expected from permutation symmetries of a box.
pub const LANCZOS_BLOCK: usize = 6;

fn block_lanczos(
    a: &CsrMatrix,
    solver: &InnerSolver<'_>,
    k: usize,
    anorm: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.n;
    let p = LANCZOS_BLOCK.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut h: Vec<Vec<f64>> = Vec::new(); // h[j][i] = q_iᵀ Op q_j (column-major, ragged)

    let random_unit = |basis: &[Vec<f64>], rng: &mut ChaCha8Rng| -> Vec<f64> {
        loop {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for _ in 0..2 {
                for q in basis {
                    let c = dot(q, &v);
                    axpy(-c, q, &mut v);
                }
            }
            let s = norm(&v);
            if s > 1e-8 {
                v.iter_mut().for_each(|t| *t /= s);
                return v;
            }
        }
    };

    let mut current: Vec<usize> = Vec::new();
    for _ in 0..p {
        let v = random_unit(&basis, &mut rng);
        current.push(basis.len());
        basis.push(v);
    }
    let mut next_check = (k + p).max(2 * p);
    let mut x = vec![0.0; n];
    loop {
        // apply the operator to the current block, orthogonalize against the basis
        let mut residuals: Vec<(Vec<f64>, f64)> = Vec::with_capacity(current.len());
        for &j in &current {
            solver.solve(&basis[j], &mut x)?;
            let size = norm(&x);
            let mut w = x.clone();
            let mut col = vec![0.0; basis.len()];
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let c = dot(q, &w);
                    col[i] += c;
                    axpy(-c, q, &mut w);
                }
            }
            debug_assert_eq!(h.len(), j);
            h.push(col);
            residuals.push((w, size));
        }
        let m = basis.len();
        // orthonormalize the residual block: w_b = Σ_a R[a][b] q_{m+a}
        let mut new_vecs: Vec<Vec<f64>> = Vec::new();
        let mut coupling: Vec<Vec<f64>> = Vec::with_capacity(residuals.len());
        for (w, size) in residuals {
            let mut w = w;
            let mut coeffs = vec![0.0; new_vecs.len() + 1];
            for _ in 0..2 {
                for (ai, q) in new_vecs.iter().enumerate() {
                    let c = dot(q, &w);
                    coeffs[ai] += c;
                    axpy(-c, q, &mut w);
                }
            }
            let s = norm(&w);
            if s > 1e-10 * size && m + new_vecs.len() < n {
                w.iter_mut().for_each(|t| *t /= s);
                coeffs[new_vecs.len()] = s;
                new_vecs.push(w);
            }
            coeffs.truncate(new_vecs.len());
            coupling.push(coeffs);
        }

        let exhausted = new_vecs.is_empty() && m >= n;
        if m >= next_check || exhausted || m + new_vecs.len() >= n {
            let (theta, y) = ritz(&h, m)?;
            // θ = 1/(λ − σ) > 0; the largest θ are the wanted ones
            let wanted: Vec<usize> = (0..m).rev().take(k).collect();
            let converged = wanted.iter().all(|&i| {
                let res: f64 = (0..new_vecs.len())
                    .map(|a| {
                        current
                            .iter()
                            .zip(&coupling)
                            .map(|(&j, c)| c.get(a).copied().unwrap_or(0.0) * y[i][j])
                            .sum::<f64>()
                            .powi(2)
                    })
                    .sum::<f64>()
                    .sqrt();
                res <= RITZ_TOL * theta[i].abs()
            });
            if (converged && wanted.len() == k) || exhausted {
                let vectors: Vec<Vec<f64>> = wanted
                    .iter()
                    .map(|&i| {
                        let mut v = vec![0.0; n];
                        for (j, q) in basis.iter().enumerate() {
                            axpy(y[i][j], q, &mut v);
                        }
                        v
                    })
                    .collect();
                return polish(a, solver, vectors, anorm);
            }
            next_check = (m + p).max(m + m / 4);
        }
        // the couplings R become part of the columns of the current block
        for (&j, c) in current.iter().zip(&coupling) {
            h[j].extend(c.iter().copied());
        }
        current.clear();
        if new_vecs.is_empty() {
            // invariant subspace: continue from a fresh block
            for _ in 0..p.min(n - m) {
                let v = random_unit(&basis, &mut rng);
                current.push(basis.len());
                basis.push(v);
            }
        } else {
            for v in new_vecs {
                current.push(basis.len());
                basis.push(v);
            }
        }
    }
}

/// Eigenpairs of the projection of the operator on the first m basis vectors.
fn ritz(h: &[Vec<f64>], m: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut hm = vec![0.0; m * m];
    for (j, col) in h.iter().enumerate().take(m) {
        for (i, &v) in col.iter().enumerate().take(m) {
            hm[i * m + j] += 0.5 * v;
            hm[j * m + i] += 0.5 * v;
        }
    }
    dense_symmetric_eigen(&hm, m)
}

/// One or more steps of subspace iteration with Rayleigh-Ritz on A, then a
/// residual check of every pair.
fn polish(
    a: &CsrMatrix,
    solver: &InnerSolver<'_>,
    mut vectors: Vec<Vec<f64>>,
    anorm: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.n;
    let k = vectors.len();
    let mut worst = f64::INFINITY;
    for _ in 0..POLISH_ROUNDS {
        let mut w: Vec<Vec<f64>> = vectors
            .iter()
            .map(|v| {
                let mut x = vec![0.0; n];
                solver.solve(v, &mut x).map(|_| x)
            })
            .collect::<Result<_>>()?;
        orthonormalize(&mut w)?;
        let aw: Vec<Vec<f64>> = w
            .iter()
            .map(|v| {
                let mut y = vec![0.0; n];
                a.matvec(v, &mut y);
                y
            })
            .collect();
        let mut g = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                g[i * k + j] = dot(&w[i], &aw[j]);
            }
        }
        let (vals, y) = dense_symmetric_eigen(&g, k)?;
        let mut new_vecs = Vec::with_capacity(k);
        worst = 0.0f64;
        for (i, yi) in y.iter().enumerate() {
            let mut v = vec![0.0; n];
            let mut av = vec![0.0; n];
            for j in 0..k {
                axpy(yi[j], &w[j], &mut v);
                axpy(yi[j], &aw[j], &mut av);
            }
            axpy(-vals[i], &v, &mut av);
            worst = worst.max(norm(&av) / norm(&v));
            new_vecs.push(v);
        }
        vectors = new_vecs;
        if worst <= RESIDUAL_TOL * anorm {
            return Ok((vals, vectors));
        }
    }
    Err(Error::Convergence { what: "shift-invert Lanczos", iterations: POLISH_ROUNDS, residual: worst / anorm })
}

fn orthonormalize(vs: &mut [Vec<f64>]) -> Result<()> {
    for i in 0..vs.len() {
        for _ in 0..2 {
            for j in 0..i {
                let (head, tail) = vs.split_at_mut(i);
                let c = dot(&head[j], &tail[0]);
                axpy(-c, &head[j], &mut tail[0]);
            }
        }
        let s = norm(&vs[i]);
        if s == 0.0 || !s.is_finite() {
            return Err(Error::Convergence { what: "subspace orthonormalization", iterations: i, residual: s });
        }
        vs[i].iter_mut().for_each(|t| *t /= s);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn laplacian_1d(n: usize) -> (Vec<f64>, Vec<f64>, f64) {
        let h = 1.0 / (n as f64 + 1.0);
        (vec![2.0 / (h * h); n], vec![-1.0 / (h * h); n - 1], h)
    }

    #[test]
    fn diagonal_matrix() {
        let a = CsrMatrix::from_diagonal(&[3.0, 1.0, 2.0]);
        assert_eq!(symmetric_eigensolve(&a, 2, EigenMode::Smallest).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn tridiagonal_routines_match_closed_form() {
        let (d, e, h) = laplacian_1d(500);
        let exact: Vec<f64> = (1..=500).map(|j| 2.0 / (h * h) * (1.0 - (j as f64 * PI * h).cos())).collect();
        let bis = tridiagonal_smallest(&d, &e, 20);
        let ql = tridiagonal_eigenvalues(&d, &e).unwrap();
        for j in 0..20 {
            assert_relative_eq!(bis[j], exact[j], max_relative = 1e-11);
            assert_relative_eq!(ql[j], exact[j], max_relative = 1e-9);
        }
        let v = tridiagonal_eigenvector(&d, &e, exact[0]);
        let s: f64 = (1..=500).map(|i| (i as f64 * PI * h).sin().powi(2)).sum::<f64>().sqrt();
        for i in 0..500 {
            assert!((v[i].abs() - ((i + 1) as f64 * PI * h).sin() / s).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_eigen_reconstructs() {
        let n = 7;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 1.0 / (i + j + 1) as f64 + if i == j { i as f64 } else { 0.0 };
            }
        }
        let (vals, vecs) = dense_symmetric_eigen(&a, n).unwrap();
        for (l, v) in vals.iter().zip(&vecs) {
            for i in 0..n {
                let av: f64 = (0..n).map(|j| a[i * n + j] * v[j]).sum();
                assert!((av - l * v[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sparse_lanczos_on_1d_laplacian() {
        let (d, e, h) = laplacian_1d(1500);
        let a = CsrMatrix::tridiagonal(&d, &e);
        let vals = symmetric_eigensolve(&a, 5, EigenMode::Smallest).unwrap();
        for (j, v) in vals.iter().enumerate() {
            let exact = 2.0 / (h * h) * (1.0 - ((j + 1) as f64 * PI * h).cos());
            assert_relative_eq!(*v, exact, max_relative = 1e-9);
        }
        let full = symmetric_eigensolve(&a, 5, EigenMode::TridiagonalFull).unwrap();
        assert_relative_eq!(full[4], vals[4], max_relative = 1e-9);
    }

    #[test]
    fn degenerate_eigenvalues_are_all_found() {
        // 2-D Laplacian on a square grid: λ_{(1,2)} = λ_{(2,1)}
        let m = 30;
        let h = 1.0 / (m as f64 + 1.0);
        let idx = |i: usize, j: usize| i + m * j;
        let mut t = Vec::new();
        for j in 0..m {
            for i in 0..m {
                t.push((idx(i, j), idx(i, j), 4.0 / (h * h)));
                if i + 1 < m {
                    t.push((idx(i, j), idx(i + 1, j), -1.0 / (h * h)));
                    t.push((idx(i + 1, j), idx(i, j), -1.0 / (h * h)));
                }
                if j + 1 < m {
                    t.push((idx(i, j), idx(i, j + 1), -1.0 / (h * h)));
                    t.push((idx(i, j + 1), idx(i, j), -1.0 / (h * h)));
                }
            }
        }
        let a = CsrMatrix::from_triplets(m * m, t);
        let vals = symmetric_eigensolve(&a, 6, EigenMode::Smallest).unwrap();
        let f = |p: usize| 2.0 / (h * h) * (1.0 - (p as f64 * PI * h).cos());
        let mut exact: Vec<f64> = (1..6).flat_map(|p| (1..6).map(move |q| (p, q))).map(|(p, q)| f(p) + f(q)).collect();
        exact.sort_by(f64::total_cmp);
        for j in 0..6 {
            assert_relative_eq!(vals[j], exact[j], max_relative = 1e-9);
        }
    }
}
