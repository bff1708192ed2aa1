//! Dense matrices over a [`Scalar`] field.
//!
//! Sizes here are tiny (ambient dimension at most a few dozen), so all
//! algorithms are straightforward dense ones: reduced row echelon form with
//! partial pivoting, kernels by back substitution, LU for numeric solves, and
//! power iteration for operator norms.

use num_complex::Complex64;

use crate::scalar::{Scalar, CF64};

#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> std::fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}  ", self.at(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<S>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.len());
        assert!(cols.iter().all(|v| v.len() == r), "ragged columns");
        let mut m = Mat::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Mat<S> {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn mul(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        let mut out: Mat<S> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.at(i, j).add(&a.mul(rhs.at(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.at(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j).add(rhs.at(i, j)))
    }

    pub fn sub(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j).sub(rhs.at(i, j)))
    }

    pub fn scale(&self, s: &S) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j).mul(s))
    }

    pub fn neg(&self) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j).neg())
    }

    pub fn hstack(&self, rhs: &Mat<S>) -> Mat<S> {
        assert_eq!(self.rows, rhs.rows);
        Mat::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                rhs.at(i, j - self.cols).clone()
            }
        })
    }

    pub fn take_rows(&self, range: std::ops::Range<usize>) -> Mat<S> {
        Mat::from_fn(range.len(), self.cols, |i, j| {
            self.at(range.start + i, j).clone()
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn is_zero_within(&self, threshold: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(threshold))
    }

    pub fn to_cf64(&self) -> Mat<CF64> {
        Mat::from_fn(self.rows, self.cols, |i, j| CF64(self.at(i, j).to_c64()))
    }

    /// Reduced row echelon form in place. Returns the pivot columns.
    ///
    /// Pivot selection takes the entry of largest magnitude in the current
    /// column; entries are treated as zero per [`Scalar::is_negligible`] with
    /// the given threshold (ignored in exact mode).
    pub fn rref_in_place(&mut self, threshold: f64) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let mut best = r;
            let mut best_abs = 0.0;
            for i in r..self.rows {
                let a = self.at(i, c).abs();
                if a > best_abs {
                    best_abs = a;
                    best = i;
                }
            }
            if self.at(best, c).is_negligible(threshold) {
                continue;
            }
            self.swap_rows(r, best);
            let inv = S::one().div(self.at(r, c));
            for j in c..self.cols {
                let v = self.at(r, j).mul(&inv);
                self.set(r, j, v);
            }
            self.set(r, c, S::one());
            for i in 0..self.rows {
                if i == r || self.at(i, c).is_zero() {
                    continue;
                }
                let f = self.at(i, c).clone();
                for j in c..self.cols {
                    let v = self.at(i, j).sub(&f.mul(self.at(r, j)));
                    self.set(i, j, v);
                }
                self.set(i, c, S::zero());
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self, threshold: f64) -> usize {
        let mut m = self.clone();
        m.rref_in_place(threshold).len()
    }

    /// Basis of the null space, as matrix columns (possibly zero columns -> 0 cols).
    pub fn kernel(&self, threshold: f64) -> Mat<S> {
        let mut m = self.clone();
        let pivots = m.rref_in_place(threshold);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![S::zero(); self.cols];
            v[f] = S::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = m.at(i, f).neg();
            }
            basis.push(v);
        }
        if basis.is_empty() {
            return Mat::zeros(self.cols, 0);
        }
        Mat::from_columns(&basis)
    }

    /// Solves `self * X = rhs` for square invertible `self`.
    pub fn solve(&self, rhs: &Mat<S>, threshold: f64) -> Option<Mat<S>> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(self.rows, rhs.rows);
        let mut aug = self.hstack(rhs);
        let pivots = aug.rref_in_place(threshold);
        if pivots.len() < self.cols || pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        Some(Mat::from_fn(self.cols, rhs.cols, |i, j| {
            aug.at(i, self.cols + j).clone()
        }))
    }

    /// Least-structure solve for full-column-rank `self`: the unique `X` with
    /// `self * X = rhs` when `rhs` lies in the column span. Returns `None` if
    /// the system is inconsistent or `self` is rank deficient.
    pub fn solve_exact_span(&self, rhs: &Mat<S>, threshold: f64) -> Option<Mat<S>> {
        assert_eq!(self.rows, rhs.rows);
        let mut aug = self.hstack(rhs);
        let pivots = aug.rref_in_place(threshold);
        if pivots.iter().any(|&p| p >= self.cols) {
            return None; // inconsistent
        }
        if pivots.len() < self.cols {
            return None; // rank deficient
        }
        Some(Mat::from_fn(self.cols, rhs.cols, |i, j| {
            aug.at(i, self.cols + j).clone()
        }))
    }

    pub fn inverse(&self, threshold: f64) -> Option<Mat<S>> {
        self.solve(&Mat::identity(self.rows), threshold)
    }

    /// Determinant by fraction-preserving forward elimination.
    pub fn det(&self, threshold: f64) -> S {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let mut best = c;
            let mut best_abs = 0.0;
            for i in c..n {
                let a = m.at(i, c).abs();
                if a > best_abs {
                    best_abs = a;
                    best = i;
                }
            }
            if m.at(best, c).is_negligible(threshold) {
                return S::zero();
            }
            if best != c {
                m.swap_rows(c, best);
                det = det.neg();
            }
            det = det.mul(m.at(c, c));
            let inv = S::one().div(m.at(c, c));
            for i in c + 1..n {
                let f = m.at(i, c).mul(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.at(i, j).sub(&f.mul(m.at(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Sum of k-th powers is never needed; this is plain matrix power.
    pub fn pow(&self, k: usize) -> Mat<S> {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Numeric helpers on complex-double matrices.
// ---------------------------------------------------------------------------

pub const POWER_ITER_TOL: f64 = 1e-12;
const POWER_ITER_MAX: usize = 50_000;

fn start_vector(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let a = ((i as u64).wrapping_mul(2654435761) % 97) as f64 / 97.0;
            Complex64::new(1.0 + 0.25 * a, 0.125 * ((i % 5) as f64))
        })
        .collect()
}

/// Largest eigenvalue of a Hermitian positive semidefinite matrix by power
/// iteration with 1e-12 relative convergence.
pub fn lambda_max_psd(h: &Mat<CF64>) -> f64 {
    let n = h.rows();
    if n == 0 {
        return 0.0;
    }
    let mut v = start_vector(n);
    let mut prev = f64::INFINITY;
    for _ in 0..POWER_ITER_MAX {
        let w: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|j| h.at(i, j).0 * v[j]).sum())
            .collect();
        let vv: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        let vw: Complex64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        if vv == 0.0 {
            return 0.0;
        }
        let lam = (vw / vv).re.max(0.0);
        let wn: f64 = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if wn == 0.0 {
            return 0.0;
        }
        v = w.into_iter().map(|x| x / wn).collect();
        if (lam - prev).abs() <= POWER_ITER_TOL * lam.max(1.0) {
            return lam;
        }
        prev = lam;
    }
    prev
}

/// Operator (spectral) norm of an arbitrary complex matrix.
pub fn op_norm(m: &Mat<CF64>) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let h = m.dagger().mul(m);
    lambda_max_psd(&h).sqrt()
}

/// Smallest singular value of a (tall or square) complex matrix.
pub fn sigma_min(m: &Mat<CF64>) -> f64 {
    let k = m.cols();
    if k == 0 {
        return 0.0;
    }
    let h = m.dagger().mul(m);
    let c = lambda_max_psd(&h) * (1.0 + 1e-10) + 1e-300;
    let shifted = Mat::from_fn(k, k, |i, j| {
        let d = if i == j {
            Complex64::new(c, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        CF64(d - h.at(i, j).0)
    });
    let mu = lambda_max_psd(&shifted);
    (c - mu).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as Q;

    fn qm(rows: Vec<Vec<i64>>) -> Mat<Q> {
        Mat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| Q::from_ints(x, 0)).collect())
                .collect(),
        )
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        let k = qm(vec![vec![1, 0], vec![0, 1]]).kernel(0.0);
        assert_eq!(k.cols(), 0);
    }

    #[test]
    fn kernel_of_nilpotent_shift() {
        // [[0,1],[0,0]] kills (1,0)
        let k = qm(vec![vec![0, 1], vec![0, 0]]).kernel(0.0);
        assert_eq!(k.cols(), 1);
        assert_eq!(*k.at(0, 0), Q::from_ints(1, 0));
        assert!(k.at(1, 0).is_zero());
    }

    #[test]
    fn kernel_of_rank_one() {
        // [[1,1],[2,2]] has kernel span{(1,-1)}
        let k = qm(vec![vec![1, 1], vec![2, 2]]).kernel(0.0);
        assert_eq!(k.cols(), 1);
        let ratio = k.at(1, 0).div(k.at(0, 0));
        assert_eq!(ratio, Q::from_ints(-1, 0));
    }

    #[test]
    fn exact_solve_and_inverse() {
        let a = qm(vec![vec![2, 1], vec![1, 1]]);
        let inv = a.inverse(0.0).unwrap();
        assert_eq!(a.mul(&inv), Mat::identity(2));
        assert_eq!(a.det(0.0), Q::from_ints(1, 0));
    }

    #[test]
    fn op_norm_of_projection_difference() {
        // P1 = diag(1,0), P2 = diag(0,1): ||P1 - P2|| = 1
        let d = Mat::from_rows(vec![
            vec![CF64::new(1.0, 0.0), CF64::new(0.0, 0.0)],
            vec![CF64::new(0.0, 0.0), CF64::new(-1.0, 0.0)],
        ]);
        assert!((op_norm(&d) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sigma_min_of_near_singular() {
        let eps = 1e-3;
        let m = Mat::from_rows(vec![
            vec![CF64::new(1.0, 0.0), CF64::new(1.0, 0.0)],
            vec![CF64::new(0.0, 0.0), CF64::new(eps, 0.0)],
        ]);
        // det = eps, sigma_max ~ sqrt2, sigma_min ~ eps/sqrt2
        let s = sigma_min(&m);
        assert!((s - eps / 2.0f64.sqrt()).abs() < 1e-6, "s = {s}");
    }
}
