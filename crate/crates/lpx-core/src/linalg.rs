//! Dense linear algebra kernels: a symmetric eigensolver (Householder
//! tridiagonalization followed by implicit-shift QL) and a complex LU
//! decomposition used for determinants and smallest-singular-value
//! estimates of the non-backtracking matrix.
//!
//! Sizes here are desk scale (a few hundred at most), so everything is
//! dense, single-threaded, and deterministic.

// The reduction and iteration loops follow the classical index-based
// formulation; iterator rewrites obscure the correspondence.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("eigenvalue iteration failed to converge after {sweeps} sweeps (index {index})")]
    ConvergenceFailure { index: usize, sweeps: usize },
}

const MAX_QL_SWEEPS: usize = 50;

/// Eigenvalues of a dense symmetric matrix, ascending.
///
/// `a` is row-major `n x n`; only the symmetric part is read.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>, LinalgError> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(a, n);
    ql_implicit(&mut d, &mut e)?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Householder reduction to tridiagonal form (values-only variant of the
/// classical tred2). Returns the diagonal `d` and subdiagonal `e` with
/// `e[0] = 0`.
fn tridiagonalize(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| a[i * n..(i + 1) * n].to_vec()).collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i;
        let mut h = 0.0;
        let mut scale = 0.0;
        if l > 1 {
            for k in 0..l {
                scale += v[i][k].abs();
            }
            if scale == 0.0 {
                e[i] = v[i][l - 1];
            } else {
                for k in 0..l {
                    v[i][k] /= scale;
                    h += v[i][k] * v[i][k];
                }
                let mut f = v[i][l - 1];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                v[i][l - 1] = f - g;
                f = 0.0;
                for j in 0..l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += v[j][k] * v[i][k];
                    }
                    for k in (j + 1)..l {
                        g += v[k][j] * v[i][k];
                    }
                    e[j] = g / h;
                    f += e[j] * v[i][j];
                }
                let hh = f / (h + h);
                for j in 0..l {
                    let f = v[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        v[j][k] -= f * e[k] + g * v[i][k];
                    }
                }
            }
        } else {
            e[i] = v[i][l - 1];
        }
    }
    for i in 0..n {
        d[i] = v[i][i];
    }
    e[0] = 0.0;
    (d, e)
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix (tql1).
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> Result<(), LinalgError> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
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
            if iter > MAX_QL_SWEEPS {
                return Err(LinalgError::ConvergenceFailure {
                    index: l,
                    sweeps: MAX_QL_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Rotation annihilated early; deflate and restart.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Group a sorted list of eigenvalues into `(value, multiplicity)` pairs,
/// clustering at the given tolerance. The reported value is the cluster
/// mean.
pub fn group_multiplicities(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &x in sorted {
        match out.last_mut() {
            Some((v, count)) if (x - *v).abs() <= tol => {
                // Running mean keeps the representative stable.
                *v += (x - *v) / (*count + 1) as f64;
                *count += 1;
            }
            _ => out.push((x, 1)),
        }
    }
    out
}

/// Small dense complex matrix, row-major. Used for the finite-dimensional
/// representation models and for materializing edge operators.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> CMat {
        CMat {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> CMat {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> CMat {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim);
            data.extend_from_slice(r);
        }
        CMat { dim, data }
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x += y;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> CMat {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x *= c;
        }
        out
    }

    pub fn pow(&self, k: usize) -> CMat {
        let mut out = CMat::identity(self.dim);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of the 2x2 block with corner `(r0, c0) = (at, at)`.
    pub fn block2_eigenvalues(&self, at: usize) -> [Complex64; 2] {
        let a = self[(at, at)];
        let b = self[(at, at + 1)];
        let c = self[(at + 1, at)];
        let d = self[(at + 1, at + 1)];
        let tr = a + d;
        let det = a * d - b * c;
        let disc = (tr * tr - 4.0 * det).sqrt();
        [(tr + disc) / 2.0, (tr - disc) / 2.0]
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Compare two complex pairs as multisets, returning the smaller of the two
/// matching residuals.
pub fn pair_multiset_distance(got: [Complex64; 2], want: [Complex64; 2]) -> f64 {
    let direct = (got[0] - want[0]).norm().max((got[1] - want[1]).norm());
    let crossed = (got[0] - want[1]).norm().max((got[1] - want[0]).norm());
    direct.min(crossed)
}

/// LU decomposition with partial pivoting of a dense complex matrix.
pub struct ComplexLu {
    n: usize,
    lu: Vec<Complex64>,
    pivots: Vec<usize>,
    swaps: usize,
    /// Set when a pivot underflowed to zero; `det` is then exactly 0 and
    /// `solve` is unavailable.
    pub singular: bool,
}

impl ComplexLu {
    pub fn new(a: &[Complex64], n: usize) -> ComplexLu {
        assert_eq!(a.len(), n * n);
        let mut lu = a.to_vec();
        let mut pivots = vec![0usize; n];
        let mut swaps = 0;
        let mut singular = false;
        for col in 0..n {
            let mut best = col;
            let mut best_mag = lu[col * n + col].norm_sqr();
            for row in (col + 1)..n {
                let mag = lu[row * n + col].norm_sqr();
                if mag > best_mag {
                    best_mag = mag;
                    best = row;
                }
            }
            pivots[col] = best;
            if best != col {
                for k in 0..n {
                    lu.swap(col * n + k, best * n + k);
                }
                swaps += 1;
            }
            let pivot = lu[col * n + col];
            if pivot == Complex64::new(0.0, 0.0) {
                singular = true;
                continue;
            }
            for row in (col + 1)..n {
                let factor = lu[row * n + col] / pivot;
                lu[row * n + col] = factor;
                for k in (col + 1)..n {
                    let sub = factor * lu[col * n + k];
                    lu[row * n + k] -= sub;
                }
            }
        }
        ComplexLu {
            n,
            lu,
            pivots,
            swaps,
            singular,
        }
    }

    pub fn det(&self) -> Complex64 {
        let mut det = if self.swaps.is_multiple_of(2) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        };
        for i in 0..self.n {
            det *= self.lu[i * self.n + i];
        }
        det
    }

    /// Solve `A x = b` in place.
    pub fn solve(&self, b: &mut [Complex64]) {
        let n = self.n;
        for i in 0..n {
            b.swap(i, self.pivots[i]);
        }
        for i in 0..n {
            for k in 0..i {
                let sub = self.lu[i * n + k] * b[k];
                b[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let sub = self.lu[i * n + k] * b[k];
                b[i] -= sub;
            }
            b[i] /= self.lu[i * n + i];
        }
    }

    /// Solve `A^H x = b` in place (conjugate-transpose solve).
    pub fn solve_adjoint(&self, b: &mut [Complex64]) {
        let n = self.n;
        // A = P^T L U, so A^H = U^H L^H P: forward-substitute with U^H,
        // back-substitute with L^H, then undo the row permutation.
        for i in 0..n {
            for k in 0..i {
                let sub = self.lu[k * n + i].conj() * b[k];
                b[i] -= sub;
            }
            b[i] /= self.lu[i * n + i].conj();
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let sub = self.lu[k * n + i].conj() * b[k];
                b[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            b.swap(i, self.pivots[i]);
        }
    }
}

/// Estimate the smallest singular value of a dense complex matrix by
/// inverse power iteration on `(A A^H)^{-1}`. An exactly singular pivot
/// short-circuits to 0.
pub fn smallest_singular_value(a: &[Complex64], n: usize) -> f64 {
    let lu = ComplexLu::new(a, n);
    if lu.singular {
        return 0.0;
    }
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| {
            // Fixed pseudo-random start vector; avoids accidental
            // orthogonality to the target singular vector.
            let t = (i as f64 + 1.0) * 0.7548776662466927;
            Complex64::new(
                (t * std::f64::consts::TAU).cos(),
                (t * 2.399963229728653).sin(),
            )
        })
        .collect();
    normalize(&mut v);
    let mut sigma = f64::INFINITY;
    for _ in 0..40 {
        let mut w = v.clone();
        lu.solve(&mut w);
        lu.solve_adjoint(&mut w);
        let norm = norm2(&w);
        if !norm.is_finite() || norm == 0.0 {
            return 0.0;
        }
        let next = 1.0 / norm.sqrt();
        let rel = (next - sigma).abs() / next.max(f64::MIN_POSITIVE);
        sigma = next;
        for x in &mut w {
            *x /= norm;
        }
        v = w;
        if rel < 1e-10 {
            break;
        }
    }
    sigma
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let n = norm2(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: &[&[f64]]) -> (Vec<f64>, usize) {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            a.extend_from_slice(r);
        }
        (a, n)
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        // K4 adjacency: (λ-3)(λ+1)^3.
        let (a, n) = dense(&[
            &[0.0, 1.0, 1.0, 1.0],
            &[1.0, 0.0, 1.0, 1.0],
            &[1.0, 1.0, 0.0, 1.0],
            &[1.0, 1.0, 1.0, 0.0],
        ]);
        let eig = symmetric_eigenvalues(&a, n).unwrap();
        let expected = [-1.0, -1.0, -1.0, 3.0];
        for (x, y) in eig.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12, "{eig:?}");
        }

        let (a, n) = dense(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let eig = symmetric_eigenvalues(&a, n).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-14);
        assert!((eig[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn grouping_clusters_at_tolerance() {
        let grouped = group_multiplicities(&[-1.0, -1.0 + 1e-10, 0.5, 3.0], 1e-8);
        assert_eq!(grouped.len(), 3);
        assert_eq!(grouped[0].1, 2);
    }

    /// Independent oracle: for a symmetric matrix, the number of
    /// eigenvalues below `t` equals the number of negative pivots of the
    /// LDL^T factorization of `A - tI` (Sylvester's law of inertia).
    fn eigenvalues_below(a: &[f64], n: usize, t: f64) -> usize {
        let mut m: Vec<f64> = a.to_vec();
        for i in 0..n {
            m[i * n + i] -= t;
        }
        let mut negatives = 0;
        for col in 0..n {
            let pivot = m[col * n + col];
            if pivot < 0.0 {
                negatives += 1;
            }
            if pivot == 0.0 {
                // Shift t between eigenvalues so this does not fire.
                panic!("oracle hit a zero pivot at t = {t}");
            }
            for row in (col + 1)..n {
                let factor = m[row * n + col] / pivot;
                for k in col..n {
                    m[row * n + k] -= factor * m[col * n + k];
                }
            }
        }
        negatives
    }

    #[test]
    fn eigenvalues_agree_with_inertia_counts() {
        let mut rng = crate::rng::SplitMix64::new(88);
        for trial in 0..10 {
            let n = 8 + trial % 5;
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let v = rng.range_f64(-2.0, 2.0);
                    a[i * n + j] = v;
                    a[j * n + i] = v;
                }
            }
            let eig = symmetric_eigenvalues(&a, n).unwrap();
            assert_eq!(eig.len(), n);
            // Between consecutive eigenvalues (and outside the spectrum),
            // the inertia count must match the sorted position.
            let mut cuts = vec![eig[0] - 1.0];
            for w in eig.windows(2) {
                if w[1] - w[0] > 1e-6 {
                    cuts.push(0.5 * (w[0] + w[1]));
                }
            }
            cuts.push(eig[n - 1] + 1.0);
            for &t in &cuts {
                let want = eig.iter().filter(|&&x| x < t).count();
                assert_eq!(
                    eigenvalues_below(&a, n, t),
                    want,
                    "trial {trial}, cut {t}: {eig:?}"
                );
            }
            // Trace identities.
            let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
            assert!((eig.iter().sum::<f64>() - trace).abs() < 1e-9 * (1.0 + trace.abs()));
        }
    }

    #[test]
    fn lu_det_and_solve() {
        let a: Vec<Complex64> = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0, 5.0]
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        let lu = ComplexLu::new(&a, 3);
        // det = 3(25-54) - 1(5-18) + 4(6-10) = -90.
        assert!((lu.det().re + 90.0).abs() < 1e-10);
        assert!(lu.det().im.abs() < 1e-12);
        let mut b = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, -1.0),
        ];
        let rhs = b.clone();
        lu.solve(&mut b);
        // Check A x = rhs.
        for i in 0..3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..3 {
                acc += a[i * 3 + j] * b[j];
            }
            assert!((acc - rhs[i]).norm() < 1e-10);
        }
        let mut c = rhs.clone();
        lu.solve_adjoint(&mut c);
        for j in 0..3 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..3 {
                acc += a[i * 3 + j].conj() * c[i];
            }
            assert!((acc - rhs[j]).norm() < 1e-10);
        }
    }

    #[test]
    fn sigma_min_detects_near_singularity() {
        // diag(1, 1e-9) has smallest singular value 1e-9.
        let a = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1e-9, 0.0),
        ];
        let s = smallest_singular_value(&a, 2);
        assert!((s - 1e-9).abs() < 1e-12, "{s}");
        // Exactly singular.
        let b = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(4.0, 0.0),
        ];
        assert!(smallest_singular_value(&b, 2) < 1e-12);
        // Comfortably regular.
        let c = vec![
            Complex64::new(0.0, 2.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 2.0),
        ];
        assert!(smallest_singular_value(&c, 2) > 0.5);
    }
}
