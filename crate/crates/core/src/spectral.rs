//! Generalized-eigenspace decomposition of the flow generator.
//!
//! A decomposition carries, per eigenvalue `lambda`, the spectral projection
//! `pi_lambda`, the nilpotent part `N_lambda`, and a chain basis of the
//! generalized eigenspace; per real part `mu` it carries the graded
//! projection and nilpotent. The skew part `a' = sum (i Im lambda) pi_lambda`
//! generates the bounded oscillatory factor of the flow.

use num_complex::Complex64;
use thiserror::Error;

use crate::eig;
use crate::linalg::{rank_threshold, Frame, Subspace, Tolerances};
use crate::mat::Mat;
use crate::scalar::{RealField, Scalar, CF64};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("exact mode needs a spectrum hint unless the matrix is triangular")]
    ExactNeedsHint,
    #[error("spectrum hint inconsistent: {0}")]
    SpectrumHintInconsistent(String),
    #[error("eigenvalue clusters overlap: {0}")]
    ClusterAmbiguous(String),
    #[error("boundary spectrum violates the strip condition: {0}")]
    StripViolation(String),
    #[error("semigroup generator is positive: {0}")]
    PositiveGenerator(String),
}

/// One generalized eigenspace.
#[derive(Clone, Debug)]
pub struct SpectralEntry<S: Scalar> {
    pub lambda: S,
    /// Spectral projection onto the generalized eigenspace, as an n x n matrix.
    pub projector: Mat<S>,
    /// `N pi_lambda`: the nilpotent part supported on this eigenspace.
    pub nilpotent: Mat<S>,
    /// Chain basis of the eigenspace.
    pub basis: Frame<S>,
    pub alg_mult: usize,
}

/// One real-part level of the grading.
#[derive(Clone, Debug)]
pub struct MuLevel<S: Scalar> {
    pub mu: S::Real,
    /// Projection onto the sum of eigenspaces with this real part.
    pub projector: Mat<S>,
    /// `N` restricted to the level (carried as `N * projector`).
    pub nilpotent: Mat<S>,
    /// Indices into `entries` of the eigenvalues at this level.
    pub entry_indices: Vec<usize>,
}

/// Boundary-spectrum provenance, kept for the zeta-convention conversion.
#[derive(Clone, Debug)]
pub struct BoundarySpectrumSpec<S: Scalar> {
    /// Anisotropy (order) m > 0.
    pub m: S::Real,
    pub sigmas: Vec<SigmaEntry<S>>,
}

#[derive(Clone, Debug)]
pub struct SigmaEntry<S: Scalar> {
    pub sigma: S,
    /// Jordan chain lengths attached to this boundary-spectrum point.
    pub chain_lengths: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SpectralDecomposition<S: Scalar> {
    pub dim: usize,
    pub generator: Mat<S>,
    pub entries: Vec<SpectralEntry<S>>,
    /// Total nilpotent part `N = a - sum lambda pi_lambda`.
    pub nilpotent: Mat<S>,
    /// Skew part `a' = sum (i Im lambda) pi_lambda`.
    pub a_prime: Mat<S>,
    /// Real-part levels in strictly decreasing order of `mu`.
    pub mu_levels: Vec<MuLevel<S>>,
    pub boundary: Option<BoundarySpectrumSpec<S>>,
}

pub type SpectrumHint<S> = Vec<(S, usize)>;

fn is_triangular<S: Scalar>(a: &Mat<S>) -> bool {
    let n = a.rows();
    let upper = (0..n).all(|i| (0..i).all(|j| a.at(i, j).is_zero()));
    let lower = (0..n).all(|i| (i + 1..n).all(|j| a.at(i, j).is_zero()));
    upper || lower
}

fn hint_from_triangular<S: Scalar>(a: &Mat<S>) -> SpectrumHint<S> {
    let mut hint: SpectrumHint<S> = Vec::new();
    for i in 0..a.rows() {
        let d = a.at(i, i).clone();
        if let Some(e) = hint.iter_mut().find(|(l, _)| *l == d) {
            e.1 += 1;
        } else {
            hint.push((d, 1));
        }
    }
    hint
}

fn cluster_eigenvalues<S: Scalar>(
    a: &Mat<S>,
    tol: &Tolerances,
) -> Result<SpectrumHint<S>, SpectralError> {
    let eigs = eig::eigenvalues(&a.to_cf64());
    let scale = crate::mat::op_norm(&a.to_cf64()).max(1.0);
    let merge = tol.tol_cluster_rel * scale;
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    'outer: for e in eigs {
        for c in clusters.iter_mut() {
            if c.iter().any(|x| (x - e).norm() <= merge) {
                c.push(e);
                continue 'outer;
            }
        }
        clusters.push(vec![e]);
    }
    // demand clean separation between clusters
    for i in 0..clusters.len() {
        for j in i + 1..clusters.len() {
            for x in &clusters[i] {
                for y in &clusters[j] {
                    let d = (x - y).norm();
                    if d < 10.0 * merge {
                        return Err(SpectralError::ClusterAmbiguous(format!(
                            "eigenvalues {x} and {y} are {d:.3e} apart (merge window {merge:.3e})"
                        )));
                    }
                }
            }
        }
    }
    let mut hint: SpectrumHint<S> = clusters
        .into_iter()
        .map(|c| {
            let k = c.len();
            let mean = c.into_iter().sum::<Complex64>() / k as f64;
            (
                S::from_re_im(real_from_f64::<S>(mean.re), real_from_f64::<S>(mean.im)),
                k,
            )
        })
        .collect();
    hint.sort_by(|x, y| {
        y.0.re()
            .cmp(&x.0.re())
            .then_with(|| x.0.im().cmp(&y.0.im()))
    });
    Ok(hint)
}

fn real_from_f64<S: Scalar>(x: f64) -> S::Real {
    S::from_f64(x).re()
}

/// Decomposes `a` into generalized eigenspaces.
///
/// Exact mode requires a hint (exact eigenvalues with algebraic
/// multiplicities) unless `a` is triangular; float mode computes and clusters
/// eigenvalues when no hint is given.
pub fn spectral_decompose<S: Scalar>(
    a: &Mat<S>,
    hint: Option<SpectrumHint<S>>,
    tol: &Tolerances,
) -> Result<SpectralDecomposition<S>, SpectralError> {
    if a.rows() != a.cols() {
        return Err(SpectralError::NotSquare);
    }
    let n = a.rows();
    let hint = match hint {
        Some(h) => h,
        None if is_triangular(a) => hint_from_triangular(a),
        None if !S::EXACT => cluster_eigenvalues(a, tol)?,
        None => return Err(SpectralError::ExactNeedsHint),
    };
    let total: usize = hint.iter().map(|(_, m)| m).sum();
    if total != n {
        return Err(SpectralError::SpectrumHintInconsistent(format!(
            "multiplicities sum to {total}, ambient dimension is {n}"
        )));
    }

    // generalized eigenspaces by growing kernel chains
    let mut bases: Vec<Mat<S>> = Vec::with_capacity(hint.len());
    for (lambda, mult) in &hint {
        let shifted = a.sub(&Mat::identity(n).scale(lambda));
        let mut power = shifted.clone();
        let mut basis = None;
        for _ in 0..n {
            let thr = rank_threshold(&power, tol);
            let ker = power.kernel(thr);
            if ker.cols() == *mult {
                basis = Some(ker);
                break;
            }
            if ker.cols() > *mult {
                return Err(SpectralError::SpectrumHintInconsistent(format!(
                    "kernel chain of (a - {lambda}) exceeds multiplicity {mult}"
                )));
            }
            power = power.mul(&shifted);
        }
        let basis = basis.ok_or_else(|| {
            SpectralError::SpectrumHintInconsistent(format!(
                "eigenvalue {lambda} never reaches multiplicity {mult}"
            ))
        })?;
        bases.push(basis);
    }

    // concatenated basis must be invertible
    let mut b = bases[0].clone();
    for extra in &bases[1..] {
        b = b.hstack(extra);
    }
    let thr = rank_threshold(&b, tol);
    let binv = b.inverse(thr).ok_or_else(|| {
        SpectralError::SpectrumHintInconsistent("generalized eigenspaces do not span".into())
    })?;

    build_from_blocks(a.clone(), hint, bases, b, binv, None, tol)
}

fn build_from_blocks<S: Scalar>(
    a: Mat<S>,
    hint: SpectrumHint<S>,
    bases: Vec<Mat<S>>,
    b: Mat<S>,
    binv: Mat<S>,
    boundary: Option<BoundarySpectrumSpec<S>>,
    tol: &Tolerances,
) -> Result<SpectralDecomposition<S>, SpectralError> {
    let n = a.rows();
    let mut entries = Vec::with_capacity(hint.len());
    let mut offset = 0;
    let mut semisimple = Mat::zeros(n, n);
    for ((lambda, mult), basis) in hint.into_iter().zip(bases) {
        // selector of this block's coordinates
        let sel = Mat::from_fn(n, n, |i, j| {
            if i == j && i >= offset && i < offset + mult {
                S::one()
            } else {
                S::zero()
            }
        });
        let projector = b.mul(&sel).mul(&binv);
        semisimple = semisimple.add(&projector.scale(&lambda));
        entries.push(SpectralEntry {
            lambda,
            projector,
            nilpotent: Mat::zeros(n, n), // filled below
            basis: Frame::new(basis, tol)
                .map_err(|e| SpectralError::SpectrumHintInconsistent(e.to_string()))?,
            alg_mult: mult,
        });
        offset += mult;
    }
    let nilpotent = a.sub(&semisimple);
    let nil_thr = if S::EXACT {
        0.0
    } else {
        1e-8 * (1.0 + a.max_abs())
    };
    if !nilpotent.pow(n).is_zero_within(nil_thr) {
        return Err(SpectralError::SpectrumHintInconsistent(
            "residual a - sum(lambda pi) is not nilpotent".into(),
        ));
    }
    let mut a_prime = Mat::zeros(n, n);
    for e in entries.iter_mut() {
        e.nilpotent = nilpotent.mul(&e.projector);
        let im = S::from_re_im(<S::Real as RealField>::zero(), e.lambda.im());
        a_prime = a_prime.add(&e.projector.scale(&im));
    }

    // real-part grading, strictly decreasing
    let mut mu_values: Vec<S::Real> = Vec::new();
    for e in &entries {
        let re = e.lambda.re();
        if !mu_values.iter().any(|m| m.approx_eq(&re)) {
            mu_values.push(re);
        }
    }
    mu_values.sort_by(|x, y| y.cmp(x));
    let mu_levels = mu_values
        .into_iter()
        .map(|mu| {
            let entry_indices: Vec<usize> = entries
                .iter()
                .enumerate()
                .filter(|(_, e)| e.lambda.re().approx_eq(&mu))
                .map(|(i, _)| i)
                .collect();
            let mut projector = Mat::zeros(n, n);
            for &i in &entry_indices {
                projector = projector.add(&entries[i].projector);
            }
            let nilpotent = nilpotent.mul(&projector);
            MuLevel {
                mu,
                projector,
                nilpotent,
                entry_indices,
            }
        })
        .collect();

    Ok(SpectralDecomposition {
        dim: n,
        generator: a,
        entries,
        nilpotent,
        a_prime,
        mu_levels,
        boundary,
    })
}

/// Builds a decomposition from explicit Jordan data: eigenvalues with chain
/// vectors. Chains define the generator by `a v_1 = lambda v_1`,
/// `a v_{k+1} = lambda v_{k+1} + v_k`.
pub fn from_jordan_chains<S: Scalar>(
    dim: usize,
    data: &[(S, Vec<Vec<Vec<S>>>)],
    tol: &Tolerances,
) -> Result<SpectralDecomposition<S>, SpectralError> {
    let mut cols: Vec<Vec<S>> = Vec::new();
    let mut jordan = Vec::new(); // (lambda, chain length) in column order
    for (lambda, chains) in data {
        for chain in chains {
            if chain.is_empty() {
                return Err(SpectralError::SpectrumHintInconsistent(
                    "empty Jordan chain".into(),
                ));
            }
            for v in chain {
                if v.len() != dim {
                    return Err(SpectralError::SpectrumHintInconsistent(format!(
                        "chain vector has length {}, ambient dimension is {dim}",
                        v.len()
                    )));
                }
                cols.push(v.clone());
            }
            jordan.push((lambda.clone(), chain.len()));
        }
    }
    if cols.len() != dim {
        return Err(SpectralError::SpectrumHintInconsistent(format!(
            "chain vectors span {} columns, ambient dimension is {dim}",
            cols.len()
        )));
    }
    let b = Mat::from_columns(&cols);
    let thr = rank_threshold(&b, tol);
    let binv = b.inverse(thr).ok_or_else(|| {
        SpectralError::SpectrumHintInconsistent("chain vectors are dependent".into())
    })?;
    // Jordan matrix in the chain basis
    let mut j = Mat::zeros(dim, dim);
    let mut off = 0;
    for (lambda, len) in &jordan {
        for k in 0..*len {
            j.set(off + k, off + k, lambda.clone());
            if k + 1 < *len {
                j.set(off + k, off + k + 1, S::one());
            }
        }
        off += len;
    }
    let a = b.mul(&j).mul(&binv);
    // aggregate multiplicities per eigenvalue, in chain order
    let mut hint: SpectrumHint<S> = Vec::new();
    for (lambda, len) in &jordan {
        if let Some(e) = hint.iter_mut().find(|(l, _)| l == lambda) {
            e.1 += len;
        } else {
            hint.push((lambda.clone(), *len));
        }
    }
    // per-eigenvalue bases: gather chain columns per eigenvalue
    let mut bases = Vec::new();
    let mut perm_cols: Vec<Vec<S>> = Vec::new();
    for (lambda, _) in &hint {
        let mut block = Vec::new();
        let mut off2 = 0;
        for (l2, len) in &jordan {
            if l2 == lambda {
                for k in 0..*len {
                    block.push(cols[off2 + k].clone());
                }
            }
            off2 += len;
        }
        perm_cols.extend(block.iter().cloned());
        bases.push(Mat::from_columns(&block));
    }
    let b_perm = Mat::from_columns(&perm_cols);
    let thr2 = rank_threshold(&b_perm, tol);
    let b_perm_inv = b_perm.inverse(thr2).ok_or_else(|| {
        SpectralError::SpectrumHintInconsistent("chain vectors are dependent".into())
    })?;
    build_from_blocks(a, hint, bases, b_perm, b_perm_inv, None, tol)
}

/// Builds the generator in spectral coordinates from boundary-spectrum data:
/// eigenvalues `-i sigma - m/2` with the given Jordan chain structure.
pub fn from_boundary_spectrum<S: Scalar>(
    spec: &BoundarySpectrumSpec<S>,
    tol: &Tolerances,
) -> Result<SpectralDecomposition<S>, SpectralError> {
    let m = &spec.m;
    if m.cmp(&<S::Real as RealField>::zero()) != std::cmp::Ordering::Greater {
        return Err(SpectralError::StripViolation("m must be positive".into()));
    }
    let m_half = m.from_ratio_of(1, 2);
    for s in &spec.sigmas {
        let im = s.sigma.im();
        if im.cmp(&m_half.neg()) != std::cmp::Ordering::Greater
            || im.cmp(&m_half) != std::cmp::Ordering::Less
        {
            return Err(SpectralError::StripViolation(format!(
                "sigma = {} lies outside -m/2 < Im sigma < m/2",
                s.sigma
            )));
        }
        if s.chain_lengths.is_empty() || s.chain_lengths.iter().any(|&c| c == 0) {
            return Err(SpectralError::StripViolation(format!(
                "sigma = {} carries an empty chain",
                s.sigma
            )));
        }
    }
    let dim: usize = spec
        .sigmas
        .iter()
        .map(|s| s.chain_lengths.iter().sum::<usize>())
        .sum();
    // lambda = -i sigma - m/2
    let data: Vec<(S, Vec<Vec<Vec<S>>>)> = {
        let mut out = Vec::new();
        let mut offset = 0usize;
        for s in &spec.sigmas {
            let lambda = S::i()
                .neg()
                .mul(&s.sigma)
                .sub(&S::from_real(m_half.clone()));
            let mut chains = Vec::new();
            for &len in &s.chain_lengths {
                let chain: Vec<Vec<S>> = (0..len)
                    .map(|k| {
                        let mut v = vec![S::zero(); dim];
                        v[offset + k] = S::one();
                        v
                    })
                    .collect();
                offset += len;
                chains.push(chain);
            }
            out.push((lambda, chains));
        }
        out
    };
    let mut sd = from_jordan_chains(dim, &data, tol)?;
    sd.boundary = Some(spec.clone());
    Ok(sd)
}

/// Recovers `sigma` from an eigenvalue of a boundary-spectrum decomposition:
/// `sigma = i (lambda + m/2)`.
pub fn sigma_of_lambda<S: Scalar>(lambda: &S, m: &S::Real) -> S {
    let m_half = m.from_ratio_of(1, 2);
    S::i().mul(&lambda.add(&S::from_real(m_half)))
}

impl<S: Scalar> SpectralDecomposition<S> {
    /// The flow `e^{t a}` at a numeric time, as a complex-double matrix.
    pub fn exp_flow_c64(&self, t: Complex64) -> Mat<CF64> {
        let n = self.dim;
        let mut out = Mat::<CF64>::zeros(n, n);
        for e in &self.entries {
            let block = self.exp_nilpotent_block_c64(e, t);
            let w = (t * e.lambda.to_c64()).exp();
            out = out.add(&block.scale(&CF64(w)));
        }
        out
    }

    fn exp_nilpotent_block_c64(&self, e: &SpectralEntry<S>, t: Complex64) -> Mat<CF64> {
        let n = self.dim;
        let npi = e.nilpotent.to_cf64();
        let mut term = e.projector.to_cf64();
        let mut acc = Mat::<CF64>::zeros(n, n);
        for k in 0..=e.alg_mult {
            acc = acc.add(&term);
            if k == e.alg_mult {
                break;
            }
            let factor = CF64(t / (k as f64 + 1.0));
            term = npi.mul(&term).scale(&factor);
            if term.max_abs() == 0.0 {
                break;
            }
        }
        acc
    }

    /// The oscillatory factor `e^{t a'}` at a numeric time.
    pub fn exp_a_prime_c64(&self, t: Complex64) -> Mat<CF64> {
        let n = self.dim;
        let mut out = Mat::<CF64>::zeros(n, n);
        for e in &self.entries {
            let w = (t * Complex64::new(0.0, e.lambda.im().to_f64())).exp();
            out = out.add(&e.projector.to_cf64().scale(&CF64(w)));
        }
        out
    }

    /// Exact structured flow at an exact time: pairs `(lambda, e^{t N_lambda} pi_lambda)`.
    ///
    /// The scalar factors `e^{t lambda}` stay symbolic as the attached
    /// eigenvalue labels, so products and the group law can be checked
    /// exactly in exact mode.
    pub fn exp_flow_factors(&self, t: &S) -> Vec<(S, Mat<S>)> {
        self.entries
            .iter()
            .map(|e| {
                let n = self.dim;
                let mut term = e.projector.clone();
                let mut acc = Mat::<S>::zeros(n, n);
                for k in 0..=e.alg_mult {
                    acc = acc.add(&term);
                    if k == e.alg_mult {
                        break;
                    }
                    let factor = t.mul(&S::from_ratio(1, (k as i64) + 1));
                    term = e.nilpotent.mul(&term).scale(&factor);
                    if S::EXACT && term.is_zero_within(0.0) {
                        break;
                    }
                }
                (e.lambda.clone(), acc)
            })
            .collect()
    }

    /// Reconstruction residual `|| sum(lambda pi + N pi) - a ||` (max entry).
    pub fn reconstruction_residual(&self) -> f64 {
        let n = self.dim;
        let mut acc = Mat::<S>::zeros(n, n);
        for e in &self.entries {
            acc = acc.add(&e.projector.scale(&e.lambda)).add(&e.nilpotent);
        }
        acc.sub(&self.generator).max_abs()
    }

    /// Indices of eigenvalues whose spectral projection does not kill `sub`.
    pub fn support_of(&self, sub: &Subspace<S>, tol: &Tolerances) -> Vec<usize> {
        let f = sub.frame().matrix();
        let thr = if S::EXACT {
            0.0
        } else {
            tol.tol_rank_rel * (1.0 + f.max_abs())
        };
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.projector.mul(f).is_zero_within(thr))
            .map(|(i, _)| i)
            .collect()
    }

    /// Distinct nonzero imaginary parts over the spectrum (the phase list).
    pub fn phase_values(&self) -> Vec<S::Real> {
        let mut out: Vec<S::Real> = Vec::new();
        for e in &self.entries {
            let im = e.lambda.im();
            if im.is_zero() {
                continue;
            }
            if !out.iter().any(|x| x.approx_eq(&im)) {
                out.push(im);
            }
        }
        out.sort();
        out
    }

    /// Whether all eigenvalues share one imaginary part (aligned spectrum).
    pub fn aligned_phase(&self) -> Option<S::Real> {
        let mut iter = self.entries.iter();
        let first = iter.next()?.lambda.im();
        for e in iter {
            if !e.lambda.im().approx_eq(&first) {
                return None;
            }
        }
        Some(first)
    }
}

/// Helper trait splice: `from_ratio` on a value of `R` without naming the type.
pub trait RealRatioExt: RealField {
    fn from_ratio_of(&self, num: i64, den: i64) -> Self {
        let n = Self::from_i64(num);
        let d = Self::from_i64(den);
        self.mul(&n.div(&d))
    }
}
impl<R: RealField> RealRatioExt for R {}

// ---------------------------------------------------------------------------
// Exponent semigroups and phase sets
// ---------------------------------------------------------------------------

/// Inserts `x` in sorted position unless an approx-equal element exists.
fn insert_merged<R: RealField>(sorted: &mut Vec<R>, x: R) -> bool {
    match sorted.binary_search_by(|probe| probe.cmp(&x)) {
        Ok(_) => false,
        Err(pos) => {
            if pos > 0 && sorted[pos - 1].approx_eq(&x) {
                return false;
            }
            if pos < sorted.len() && sorted[pos].approx_eq(&x) {
                return false;
            }
            sorted.insert(pos, x);
            true
        }
    }
}

/// Enumerates the additive semigroup generated by nonpositive reals down to a
/// cutoff. Zero is always included (the empty sum); when
/// `include_neg_integers` is set the negative integers are adjoined as
/// generators. Output is sorted in decreasing order.
pub fn enumerate_real_semigroup<R: RealField>(
    generators: &[R],
    include_neg_integers: bool,
    cutoff: &R,
) -> Result<Vec<R>, SpectralError> {
    let zero = R::zero();
    for g in generators {
        if g.cmp(&zero) == std::cmp::Ordering::Greater {
            return Err(SpectralError::PositiveGenerator(format!("{g}")));
        }
    }
    if cutoff.cmp(&zero) != std::cmp::Ordering::Less {
        return Err(SpectralError::PositiveGenerator(format!(
            "cutoff {cutoff} must be negative"
        )));
    }
    let mut gens: Vec<R> = generators.iter().filter(|g| !g.is_zero()).cloned().collect();
    if include_neg_integers {
        gens.push(R::from_i64(-1));
    }
    let mut sorted = vec![zero.clone()];
    let mut work = vec![zero];
    while let Some(x) = work.pop() {
        for g in &gens {
            let y = x.add(g);
            if y.cmp(cutoff) == std::cmp::Ordering::Less {
                continue;
            }
            if insert_merged(&mut sorted, y.clone()) {
                work.push(y);
            }
        }
    }
    sorted.reverse();
    Ok(sorted)
}

/// The nonpositive pairwise differences of real parts of the spectrum: the
/// generators of the real series semigroup.
pub fn real_part_generators<S: Scalar>(sd: &SpectralDecomposition<S>) -> Vec<S::Real> {
    let mut out: Vec<S::Real> = Vec::new();
    for a in &sd.mu_levels {
        for b in &sd.mu_levels {
            let d = a.mu.sub(&b.mu);
            if d.cmp(&<S::Real as RealField>::zero()) == std::cmp::Ordering::Less
                && !out.iter().any(|x| x.approx_eq(&d))
            {
                out.push(d);
            }
        }
    }
    out.sort();
    out
}

/// The phase set `{Re sigma / m}` of a boundary spectrum, deduplicated and sorted.
pub fn phase_set<S: Scalar>(spec: &BoundarySpectrumSpec<S>) -> Vec<S::Real> {
    let mut out: Vec<S::Real> = Vec::new();
    for s in &spec.sigmas {
        let v = s.sigma.re().div(&spec.m);
        if !out.iter().any(|x| x.approx_eq(&v)) {
            out.push(v);
        }
    }
    out.sort();
    out
}

/// Generators `Im(sigma - sigma')` over pairs with `Im sigma <= Im sigma'`,
/// feeding the trace-exponent semigroup.
pub fn boundary_im_difference_generators<S: Scalar>(
    spec: &BoundarySpectrumSpec<S>,
) -> Vec<S::Real> {
    let mut out: Vec<S::Real> = Vec::new();
    for a in &spec.sigmas {
        for b in &spec.sigmas {
            let d = a.sigma.im().sub(&b.sigma.im());
            if d.cmp(&<S::Real as RealField>::zero()) != std::cmp::Ordering::Greater
                && !d.is_zero()
                && !out.iter().any(|x| x.approx_eq(&d))
            {
                out.push(d);
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussianRational as Q;
    use num_rational::BigRational;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn qm(rows: Vec<Vec<(i64, i64)>>) -> Mat<Q> {
        Mat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|(a, b)| Q::from_ints(a, b)).collect())
                .collect(),
        )
    }

    #[test]
    fn diagonal_decomposition() {
        let a = qm(vec![vec![(1, 0), (0, 0)], vec![(0, 0), (2, 0)]]);
        let sd = spectral_decompose(&a, None, &tol()).unwrap();
        assert_eq!(sd.entries.len(), 2);
        assert_eq!(sd.reconstruction_residual(), 0.0);
        assert!(sd.nilpotent.is_zero_within(0.0));
        assert!(sd.a_prime.is_zero_within(0.0));
        // projections are orthogonal idempotents summing to I
        let p1 = &sd.entries[0].projector;
        let p2 = &sd.entries[1].projector;
        assert_eq!(p1.mul(p1), *p1);
        assert!(p1.mul(p2).is_zero_within(0.0));
        assert_eq!(p1.add(p2), Mat::identity(2));
    }

    #[test]
    fn nilpotent_block() {
        let a = qm(vec![vec![(0, 0), (1, 0)], vec![(0, 0), (0, 0)]]);
        let sd = spectral_decompose(&a, None, &tol()).unwrap();
        assert_eq!(sd.entries.len(), 1);
        assert_eq!(sd.entries[0].projector, Mat::identity(2));
        assert_eq!(sd.entries[0].nilpotent, a);
        assert!(sd.a_prime.is_zero_within(0.0));
    }

    #[test]
    fn triangular_with_imaginary_spectrum() {
        // a = [[i,1,0],[0,i,0],[0,0,-1]]
        let a = qm(vec![
            vec![(0, 1), (1, 0), (0, 0)],
            vec![(0, 0), (0, 1), (0, 0)],
            vec![(0, 0), (0, 0), (-1, 0)],
        ]);
        let sd = spectral_decompose(&a, None, &tol()).unwrap();
        assert_eq!(sd.entries.len(), 2);
        let pi_i = sd
            .entries
            .iter()
            .find(|e| e.lambda == Q::from_ints(0, 1))
            .unwrap();
        assert_eq!(
            pi_i.projector,
            qm(vec![
                vec![(1, 0), (0, 0), (0, 0)],
                vec![(0, 0), (1, 0), (0, 0)],
                vec![(0, 0), (0, 0), (0, 0)]
            ])
        );
        // a' = diag(i, i, 0)
        let expect = qm(vec![
            vec![(0, 1), (0, 0), (0, 0)],
            vec![(0, 0), (0, 1), (0, 0)],
            vec![(0, 0), (0, 0), (0, 0)],
        ]);
        assert_eq!(sd.a_prime, expect);
        // two mu levels: 0 then -1
        assert_eq!(sd.mu_levels.len(), 2);
        assert!(sd.mu_levels[0].mu > sd.mu_levels[1].mu);
    }

    #[test]
    fn exact_mode_rejects_untriangular_without_hint() {
        let a = qm(vec![vec![(0, 0), (1, 0)], vec![(1, 0), (0, 0)]]);
        assert!(matches!(
            spectral_decompose(&a, None, &tol()),
            Err(SpectralError::ExactNeedsHint)
        ));
        let hint = vec![(Q::from_ints(1, 0), 1), (Q::from_ints(-1, 0), 1)];
        let sd = spectral_decompose(&a, Some(hint), &tol()).unwrap();
        assert_eq!(sd.reconstruction_residual(), 0.0);
    }

    #[test]
    fn bad_hint_is_rejected() {
        let a = qm(vec![vec![(1, 0), (0, 0)], vec![(0, 0), (2, 0)]]);
        let hint = vec![(Q::from_ints(3, 0), 1), (Q::from_ints(2, 0), 1)];
        assert!(matches!(
            spectral_decompose(&a, Some(hint), &tol()),
            Err(SpectralError::SpectrumHintInconsistent(_))
        ));
    }

    #[test]
    fn exp_flow_nilpotent() {
        let a = qm(vec![vec![(0, 0), (1, 0)], vec![(0, 0), (0, 0)]]);
        let sd = spectral_decompose(&a, None, &tol()).unwrap();
        let e0 = sd.exp_flow_c64(Complex64::new(0.0, 0.0));
        assert!((e0.at(0, 0).0 - 1.0).norm() < 1e-14);
        assert!((e0.at(0, 1).0).norm() < 1e-14);
        let e = sd.exp_flow_c64(Complex64::new(3.0, 0.0));
        assert!((e.at(0, 1).0 - 3.0).norm() < 1e-14);
    }

    #[test]
    fn exp_flow_diag_scalar_factors() {
        // a = diag(i, -1) at t = pi: diag(-1, e^-pi)
        let a = qm(vec![vec![(0, 1), (0, 0)], vec![(0, 0), (-1, 0)]]);
        let sd = spectral_decompose(&a, None, &tol()).unwrap();
        let e = sd.exp_flow_c64(Complex64::new(std::f64::consts::PI, 0.0));
        assert!((e.at(0, 0).0 - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((e.at(1, 1).0.re - (-std::f64::consts::PI).exp()).abs() < 1e-12);
    }

    #[test]
    fn group_law_exact() {
        // exact group law on the structured factors for a Jordan block
        let a = qm(vec![
            vec![(2, 0), (1, 0), (0, 0)],
            vec![(0, 0), (2, 0), (0, 0)],
            vec![(0, 0), (0, 0), (5, 0)],
        ]);
        let sd = spectral_decompose(&a, None, &tol()).unwrap();
        let s = Q::from_ratio(3, 7);
        let t = Q::from_ratio(-2, 5);
        let st = s.add(&t);
        let f_s = sd.exp_flow_factors(&s);
        let f_t = sd.exp_flow_factors(&t);
        let f_st = sd.exp_flow_factors(&st);
        for ((l1, m1), ((l2, m2), (l3, m3))) in
            f_s.iter().zip(f_t.iter().zip(f_st.iter()))
        {
            assert_eq!(l1, l2);
            assert_eq!(l1, l3);
            // cross terms vanish because pi_l pi_l' = 0, so per-eigenvalue
            // equality is the group law
            assert_eq!(m1.mul(m2), *m3);
        }
    }

    #[test]
    fn boundary_spectrum_mapping() {
        // m=2, sigma=0 -> eigenvalue -1; m=2, sigma=i/2 -> -1/2
        let spec = BoundarySpectrumSpec::<Q> {
            m: BigRational::from_i64_ref(2),
            sigmas: vec![
                SigmaEntry {
                    sigma: Q::from_ints(0, 0),
                    chain_lengths: vec![1],
                },
                SigmaEntry {
                    sigma: Q::from_re_im(
                        BigRational::from_i64_ref(0),
                        BigRational::from_ratio_i64(1, 2),
                    ),
                    chain_lengths: vec![1],
                },
            ],
        };
        let sd = from_boundary_spectrum(&spec, &tol()).unwrap();
        let mut eigs: Vec<Q> = sd.entries.iter().map(|e| e.lambda.clone()).collect();
        eigs.sort_by(|a, b| a.re().cmp(&b.re()));
        assert_eq!(eigs[0], Q::from_ints(-1, 0));
        assert_eq!(
            eigs[1],
            Q::from_re_im(BigRational::from_ratio_i64(-1, 2), BigRational::from_i64_ref(0))
        );
        // inverse mapping recovers sigma
        for e in &sd.entries {
            let sig = sigma_of_lambda(&e.lambda, &spec.m);
            assert!(spec.sigmas.iter().any(|s| s.sigma == sig));
        }
    }

    #[test]
    fn boundary_strip_violation() {
        let spec = BoundarySpectrumSpec::<Q> {
            m: BigRational::from_i64_ref(2),
            sigmas: vec![SigmaEntry {
                sigma: Q::from_ints(0, 1), // Im = 1 = m/2 not allowed
                chain_lengths: vec![1],
            }],
        };
        assert!(matches!(
            from_boundary_spectrum(&spec, &tol()),
            Err(SpectralError::StripViolation(_))
        ));
    }

    #[test]
    fn semigroup_enumeration() {
        // generators {-1, -1/2}, cutoff -2 -> {0, -1/2, -1, -3/2, -2}
        let gens = vec![
            BigRational::from_i64_ref(-1),
            BigRational::from_ratio_i64(-1, 2),
        ];
        let cutoff = BigRational::from_i64_ref(-2);
        let out = enumerate_real_semigroup(&gens, false, &cutoff).unwrap();
        let expect: Vec<BigRational> = [0, -1, -2, -3, -4]
            .iter()
            .map(|&k| BigRational::from_ratio_i64(k, 2))
            .collect();
        assert_eq!(out, expect);
    }

    #[test]
    fn semigroup_with_neg_integers() {
        let out = enumerate_real_semigroup::<BigRational>(
            &[],
            true,
            &BigRational::from_i64_ref(-2),
        )
        .unwrap();
        let expect: Vec<BigRational> = [0, -1, -2]
            .iter()
            .map(|&k| BigRational::from_i64_ref(k))
            .collect();
        assert_eq!(out, expect);
    }

    #[test]
    fn semigroup_rejects_positive_generator() {
        assert!(matches!(
            enumerate_real_semigroup(
                &[BigRational::from_i64_ref(1)],
                false,
                &BigRational::from_i64_ref(-1)
            ),
            Err(SpectralError::PositiveGenerator(_))
        ));
    }

    #[test]
    fn phase_set_examples() {
        // sigmas {i/4, -i/4}, m = 2 -> {0}
        let spec = BoundarySpectrumSpec::<Q> {
            m: BigRational::from_i64_ref(2),
            sigmas: vec![
                SigmaEntry {
                    sigma: Q::from_re_im(
                        BigRational::from_i64_ref(0),
                        BigRational::from_ratio_i64(1, 4),
                    ),
                    chain_lengths: vec![1],
                },
                SigmaEntry {
                    sigma: Q::from_re_im(
                        BigRational::from_i64_ref(0),
                        BigRational::from_ratio_i64(-1, 4),
                    ),
                    chain_lengths: vec![1],
                },
            ],
        };
        let p = phase_set(&spec);
        assert_eq!(p, vec![BigRational::from_i64_ref(0)]);

        // sigmas {0, 1}, m = 1 -> {0, 1}
        let spec2 = BoundarySpectrumSpec::<Q> {
            m: BigRational::from_i64_ref(1),
            sigmas: vec![
                SigmaEntry {
                    sigma: Q::from_ints(0, 0),
                    chain_lengths: vec![1],
                },
                SigmaEntry {
                    sigma: Q::from_ints(1, 0),
                    chain_lengths: vec![1],
                },
            ],
        };
        assert_eq!(
            phase_set(&spec2),
            vec![BigRational::from_i64_ref(0), BigRational::from_i64_ref(1)]
        );
    }

    trait BigRationalExt {
        fn from_i64_ref(n: i64) -> BigRational;
        fn from_ratio_i64(n: i64, d: i64) -> BigRational;
    }
    impl BigRationalExt for BigRational {
        fn from_i64_ref(n: i64) -> BigRational {
            <BigRational as RealField>::from_i64(n)
        }
        fn from_ratio_i64(n: i64, d: i64) -> BigRational {
            <BigRational as RealField>::from_ratio(n, d)
        }
    }
}
