//! Frames, subspaces, and the gap metric on Grassmannians.
//!
//! A subspace is carried by an explicit frame (ordered list of independent
//! column vectors). The distance between subspaces is the operator norm of
//! the difference of their orthogonal projections, computed with respect to
//! the standard Hermitian inner product of the coordinates the instance was
//! given in.

use thiserror::Error;

use crate::mat::{op_norm, Mat};
use crate::scalar::Scalar;

/// Numeric thresholds for float mode. Ignored wherever arithmetic is exact.
#[derive(Clone, Debug)]
pub struct Tolerances {
    /// Rank decisions: entries below `tol_rank_rel * sigma_max` count as zero.
    pub tol_rank_rel: f64,
    /// Subspace equality in float mode: gap below this means equal.
    pub tol_subspace_eq: f64,
    /// Eigenvalue clustering: eigenvalues within `tol_cluster_rel * ||a||` merge.
    pub tol_cluster_rel: f64,
    /// Lower bound demanded of |det alpha0| on sample grids.
    pub det_floor: f64,
    /// Clearance below which a sampled torus point counts as meeting the variety.
    pub tol_torus: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_rank_rel: 1e-9,
            tol_subspace_eq: 1e-8,
            tol_cluster_rel: 1e-7,
            det_floor: 1e-8,
            tol_torus: 1e-4,
        }
    }
}

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("columns are linearly dependent (rank {rank} < {cols})")]
    DependentColumns { rank: usize, cols: usize },
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("subspace is not contained in the given space")]
    NotContained,
    #[error("subspaces are not complementary")]
    NotComplementary,
}

/// Rank threshold for a matrix: zero in exact mode, relative to the largest
/// singular value in float mode.
pub fn rank_threshold<S: Scalar>(m: &Mat<S>, tol: &Tolerances) -> f64 {
    if S::EXACT {
        0.0
    } else {
        tol.tol_rank_rel * op_norm(&m.to_cf64())
    }
}

/// Ordered list of independent vectors spanning a subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<S: Scalar> {
    mat: Mat<S>,
}

impl<S: Scalar> Frame<S> {
    /// Builds a frame, checking linear independence of the columns.
    pub fn new(mat: Mat<S>, tol: &Tolerances) -> Result<Self, LinalgError> {
        let rank = mat.rank(rank_threshold(&mat, tol));
        if rank != mat.cols() {
            return Err(LinalgError::DependentColumns {
                rank,
                cols: mat.cols(),
            });
        }
        Ok(Frame { mat })
    }

    /// The zero frame in ambient dimension `n`.
    pub fn empty(n: usize) -> Self {
        Frame {
            mat: Mat::zeros(n, 0),
        }
    }

    pub fn from_vectors(vectors: &[Vec<S>], tol: &Tolerances) -> Result<Self, LinalgError> {
        Frame::new(Mat::from_columns(vectors), tol)
    }

    pub fn ambient_dim(&self) -> usize {
        self.mat.rows()
    }
    pub fn rank(&self) -> usize {
        self.mat.cols()
    }
    pub fn matrix(&self) -> &Mat<S> {
        &self.mat
    }
    pub fn vectors(&self) -> Vec<Vec<S>> {
        self.mat.columns()
    }
}

/// An element of the Grassmannian, represented by a frame.
#[derive(Clone, Debug)]
pub struct Subspace<S: Scalar> {
    frame: Frame<S>,
}

impl<S: Scalar> Subspace<S> {
    pub fn new(frame: Frame<S>) -> Self {
        Subspace { frame }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            frame: Frame::empty(ambient),
        }
    }

    pub fn from_vectors(vectors: &[Vec<S>], tol: &Tolerances) -> Result<Self, LinalgError> {
        Ok(Subspace {
            frame: Frame::from_vectors(vectors, tol)?,
        })
    }

    /// Span of the (possibly dependent) columns of `m`.
    pub fn from_span(m: &Mat<S>, tol: &Tolerances) -> Self {
        let thr = rank_threshold(m, tol);
        let mut red = m.dagger();
        let pivots = red.rref_in_place(thr);
        // rows of the reduced dagger span the row space = column span of m
        let cols: Vec<Vec<S>> = (0..pivots.len())
            .map(|i| (0..m.rows()).map(|j| red.at(i, j).conj()).collect())
            .collect();
        if cols.is_empty() {
            return Subspace::zero(m.rows());
        }
        Subspace {
            frame: Frame {
                mat: Mat::from_columns(&cols),
            },
        }
    }

    pub fn frame(&self) -> &Frame<S> {
        &self.frame
    }
    pub fn ambient_dim(&self) -> usize {
        self.frame.ambient_dim()
    }
    pub fn dim(&self) -> usize {
        self.frame.rank()
    }

    /// Orthogonal projector onto this subspace: F (F*F)^-1 F*.
    pub fn projector(&self, tol: &Tolerances) -> Mat<S> {
        let f = self.frame.matrix();
        if f.cols() == 0 {
            return Mat::zeros(f.rows(), f.rows());
        }
        let g = f.dagger().mul(f);
        let thr = rank_threshold(&g, tol);
        let ginv = g.inverse(thr).expect("frame Gram matrix is invertible");
        f.mul(&ginv).mul(&f.dagger())
    }

    /// Membership test for a single vector.
    pub fn contains(&self, v: &[S], tol: &Tolerances) -> bool {
        let f = self.frame.matrix();
        let aug = f.hstack(&Mat::from_columns(&[v.to_vec()]));
        let thr = rank_threshold(&aug, tol);
        aug.rank(thr) == self.dim()
    }
}

/// Kernel of a scalar matrix, as a subspace of the column-coordinate space.
pub fn kernel<S: Scalar>(m: &Mat<S>, tol: &Tolerances) -> Subspace<S> {
    let thr = rank_threshold(m, tol);
    let k = m.kernel(thr);
    if k.cols() == 0 {
        return Subspace::zero(m.cols());
    }
    Subspace {
        frame: Frame { mat: k },
    }
}

/// Orthogonal complement of `inner` within `within` (standard Hermitian product).
pub fn ortho_complement<S: Scalar>(
    inner: &Subspace<S>,
    within: &Subspace<S>,
    tol: &Tolerances,
) -> Result<Subspace<S>, LinalgError> {
    if inner.ambient_dim() != within.ambient_dim() {
        return Err(LinalgError::AmbientMismatch(
            inner.ambient_dim(),
            within.ambient_dim(),
        ));
    }
    // containment: projecting inner onto within must reproduce it
    let pw = within.projector(tol);
    let fi = inner.frame.matrix();
    let diff = pw.mul(fi).sub(fi);
    let thr = if S::EXACT {
        0.0
    } else {
        tol.tol_subspace_eq * (1.0 + fi.max_abs())
    };
    if !diff.is_zero_within(thr) {
        return Err(LinalgError::NotContained);
    }
    let fw = within.frame.matrix();
    if inner.dim() == 0 {
        return Ok(within.clone());
    }
    // {w = Fw xi : Fi* w = 0}  <=>  xi in ker(Fi* Fw)
    let m = fi.dagger().mul(fw);
    let thr2 = rank_threshold(&m, tol);
    let xi = m.kernel(thr2);
    if xi.cols() == 0 {
        return Ok(Subspace::zero(within.ambient_dim()));
    }
    let cols = fw.mul(&xi);
    Ok(Subspace {
        frame: Frame { mat: cols },
    })
}

/// Gap metric: operator norm of the difference of orthogonal projections.
///
/// Exactly zero (and reported as 0.0) when the subspaces coincide in exact
/// mode; otherwise the norm is evaluated numerically by power iteration.
pub fn gap_distance<S: Scalar>(
    s1: &Subspace<S>,
    s2: &Subspace<S>,
    tol: &Tolerances,
) -> Result<f64, LinalgError> {
    if s1.ambient_dim() != s2.ambient_dim() {
        return Err(LinalgError::AmbientMismatch(
            s1.ambient_dim(),
            s2.ambient_dim(),
        ));
    }
    let d = s1.projector(tol).sub(&s2.projector(tol));
    if S::EXACT && d.is_zero_within(0.0) {
        return Ok(0.0);
    }
    Ok(op_norm(&d.to_cf64()))
}

/// Equality on the Grassmannian: exact projector equality in exact mode, gap
/// below `tol_subspace_eq` in float mode.
pub fn subspace_eq<S: Scalar>(s1: &Subspace<S>, s2: &Subspace<S>, tol: &Tolerances) -> bool {
    if s1.ambient_dim() != s2.ambient_dim() || s1.dim() != s2.dim() {
        return false;
    }
    if S::EXACT {
        s1.projector(tol).sub(&s2.projector(tol)).is_zero_within(0.0)
    } else {
        gap_distance(s1, s2, tol).map_or(false, |g| g < tol.tol_subspace_eq)
    }
}

/// Component of `phi` in `d` under the decomposition `ambient = d (+) k`.
pub fn project_along<S: Scalar>(
    phi: &[S],
    d: &Subspace<S>,
    k: &Subspace<S>,
    tol: &Tolerances,
) -> Result<Vec<S>, LinalgError> {
    let n = d.ambient_dim();
    if k.ambient_dim() != n || phi.len() != n {
        return Err(LinalgError::AmbientMismatch(n, k.ambient_dim()));
    }
    if d.dim() + k.dim() != n {
        return Err(LinalgError::NotComplementary);
    }
    let x = d.frame.matrix().hstack(k.frame.matrix());
    let thr = rank_threshold(&x, tol);
    let rhs = Mat::from_columns(&[phi.to_vec()]);
    let c = x.solve(&rhs, thr).ok_or(LinalgError::NotComplementary)?;
    let c_top = c.take_rows(0..d.dim());
    Ok(d.frame.matrix().mul(&c_top).column(0))
}

/// The projection onto `d` along `k` as an explicit matrix.
pub fn projection_matrix<S: Scalar>(
    d: &Subspace<S>,
    k: &Subspace<S>,
    tol: &Tolerances,
) -> Result<Mat<S>, LinalgError> {
    let n = d.ambient_dim();
    if k.ambient_dim() != n {
        return Err(LinalgError::AmbientMismatch(n, k.ambient_dim()));
    }
    if d.dim() + k.dim() != n {
        return Err(LinalgError::NotComplementary);
    }
    let x = d.frame.matrix().hstack(k.frame.matrix());
    let thr = rank_threshold(&x, tol);
    let xinv = x.inverse(thr).ok_or(LinalgError::NotComplementary)?;
    Ok(d.frame.matrix().mul(&xinv.take_rows(0..d.dim())))
}

/// Gram-Schmidt orthogonalization of the columns.
///
/// Exact mode orthogonalizes without normalizing (norms are irrational);
/// float mode runs modified Gram-Schmidt with normalization. Dependent
/// columns are dropped.
pub fn orthogonalize<S: Scalar>(m: &Mat<S>, tol: &Tolerances) -> Mat<S> {
    let thr = rank_threshold(m, tol);
    let mut basis: Vec<Vec<S>> = Vec::new();
    for j in 0..m.cols() {
        let mut v = m.column(j);
        for u in &basis {
            // v -= <v,u>/<u,u> u
            let mut vu = S::zero();
            let mut uu = S::zero();
            for (a, b) in v.iter().zip(u.iter()) {
                vu = vu.add(&b.conj().mul(a));
            }
            for b in u.iter() {
                uu = uu.add(&b.conj().mul(b));
            }
            let c = vu.div(&uu);
            for (a, b) in v.iter_mut().zip(u.iter()) {
                *a = a.sub(&c.mul(b));
            }
        }
        let norm = v.iter().map(|x| x.abs() * x.abs()).sum::<f64>().sqrt();
        let keep = if S::EXACT {
            v.iter().any(|x| !x.is_zero())
        } else {
            norm > thr
        };
        if !keep {
            continue;
        }
        if !S::EXACT {
            // exact mode keeps the orthogonal (unnormalized) basis; norms are irrational
            let inv = S::from_f64(1.0 / norm);
            for a in v.iter_mut() {
                *a = a.mul(&inv);
            }
        }
        basis.push(v);
    }
    if basis.is_empty() {
        return Mat::zeros(m.rows(), 0);
    }
    Mat::from_columns(&basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as Q;
    use crate::scalar::Scalar as _;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn qv(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| Q::from_ints(x, 0)).collect()
    }

    #[test]
    fn ortho_complement_standard_basis() {
        let e1 = Subspace::from_vectors(&[qv(&[1, 0])], &tol()).unwrap();
        let full = Subspace::from_vectors(&[qv(&[1, 0]), qv(&[0, 1])], &tol()).unwrap();
        let c = ortho_complement(&e1, &full, &tol()).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&qv(&[0, 1]), &tol()));
    }

    #[test]
    fn ortho_complement_of_self_is_zero() {
        let s = Subspace::from_vectors(&[qv(&[1, 2, 3])], &tol()).unwrap();
        let c = ortho_complement(&s, &s, &tol()).unwrap();
        assert_eq!(c.dim(), 0);
    }

    #[test]
    fn ortho_complement_inside_plane() {
        // span{(1,1,0)} inside span{(1,1,0),(1,-1,0)} -> span{(1,-1,0)}
        let s = Subspace::from_vectors(&[qv(&[1, 1, 0])], &tol()).unwrap();
        let w = Subspace::from_vectors(&[qv(&[1, 1, 0]), qv(&[1, -1, 0])], &tol()).unwrap();
        let c = ortho_complement(&s, &w, &tol()).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&qv(&[1, -1, 0]), &tol()));
    }

    #[test]
    fn gap_distance_orthogonal_lines() {
        let e1 = Subspace::from_vectors(&[qv(&[1, 0])], &tol()).unwrap();
        let e2 = Subspace::from_vectors(&[qv(&[0, 1])], &tol()).unwrap();
        assert_eq!(gap_distance(&e1, &e1, &tol()).unwrap(), 0.0);
        let g = gap_distance(&e1, &e2, &tol()).unwrap();
        assert!((g - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gap_distance_tilted_line() {
        // span{(1,0)} vs span{(1,eps)}: gap = eps/sqrt(1+eps^2)
        let eps = 0.5f64;
        let s1 = Subspace::from_vectors(&[qv(&[1, 0])], &tol()).unwrap();
        let s2 = Subspace::from_vectors(&[vec![Q::from_ints(1, 0), Q::from_ratio(1, 2)]], &tol())
            .unwrap();
        let g = gap_distance(&s1, &s2, &tol()).unwrap();
        let expect = eps / (1.0 + eps * eps).sqrt();
        assert!((g - expect).abs() < 1e-10, "g = {g}, expect {expect}");
    }

    #[test]
    fn project_along_coordinates() {
        let d = Subspace::from_vectors(&[qv(&[1, 0])], &tol()).unwrap();
        let k = Subspace::from_vectors(&[qv(&[0, 1])], &tol()).unwrap();
        let p = project_along(&qv(&[3, 5]), &d, &k, &tol()).unwrap();
        assert_eq!(p, qv(&[3, 0]));
        // vectors of K project to zero
        let z = project_along(&qv(&[0, 7]), &d, &k, &tol()).unwrap();
        assert!(z.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn project_along_tilted() {
        // D = span{(1,1/10)}, K = span{(0,1)}, phi=(1,0) -> (1,1/10)
        let d = Subspace::from_vectors(&[vec![Q::from_ints(1, 0), Q::from_ratio(1, 10)]], &tol())
            .unwrap();
        let k = Subspace::from_vectors(&[qv(&[0, 1])], &tol()).unwrap();
        let p = project_along(&qv(&[1, 0]), &d, &k, &tol()).unwrap();
        assert_eq!(p[0], Q::from_ints(1, 0));
        assert_eq!(p[1], Q::from_ratio(1, 10));
    }

    #[test]
    fn project_along_rejects_non_complementary() {
        let d = Subspace::from_vectors(&[qv(&[1, 0])], &tol()).unwrap();
        let k = Subspace::from_vectors(&[qv(&[1, 0])], &tol()).unwrap();
        assert!(matches!(
            project_along(&qv(&[1, 1]), &d, &k, &tol()),
            Err(LinalgError::NotComplementary)
        ));
    }

    #[test]
    fn projection_matrix_is_idempotent() {
        let d = Subspace::from_vectors(&[qv(&[1, 1, 0]), qv(&[0, 0, 1])], &tol()).unwrap();
        let k = Subspace::from_vectors(&[qv(&[1, -1, 0])], &tol()).unwrap();
        let p = projection_matrix(&d, &k, &tol()).unwrap();
        assert_eq!(p.mul(&p), p);
    }
}
