//! Eigenvalues of small dense complex matrices.
//!
//! Shifted QR iteration on the Hessenberg form, complex single-shift with
//! Wilkinson shifts and standard deflation. Only eigenvalues are produced;
//! generalized eigenvectors are recovered elsewhere by kernel chains. The
//! float pipeline targets well-separated spectra of matrices with n <= 32.

use num_complex::Complex64;

use crate::mat::Mat;
use crate::scalar::CF64;

fn house_rotation(a: Complex64, b: Complex64) -> (Complex64, Complex64, f64) {
    // Givens rotation zeroing b against a: returns (c, s, r_norm) with
    // [c  s; -conj(s) conj(c)]^H applied from the left.
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), na);
    }
    let r = (na * na + nb * nb).sqrt();
    let c = a / r;
    let s = b / r;
    (c, s, r)
}

fn to_hessenberg(h: &mut Vec<Vec<Complex64>>) {
    let n = h.len();
    for c in 0..n.saturating_sub(2) {
        for r in (c + 2..n).rev() {
            let (g_c, g_s, _) = house_rotation(h[c + 1][c], h[r][c]);
            if g_s.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let x = h[c + 1][j];
                let y = h[r][j];
                h[c + 1][j] = g_c.conj() * x + g_s.conj() * y;
                h[r][j] = -g_s * x + g_c * y;
            }
            for i in 0..n {
                let x = h[i][c + 1];
                let y = h[i][r];
                h[i][c + 1] = x * g_c + y * g_s;
                h[i][r] = -x * g_s.conj() + y * g_c.conj();
            }
        }
    }
}

fn wilkinson_shift(h: &[Vec<Complex64>], m: usize) -> Complex64 {
    // eigenvalue of the trailing 2x2 closest to h[m][m]
    let a = h[m - 1][m - 1];
    let b = h[m - 1][m];
    let c = h[m][m - 1];
    let d = h[m][m];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let l1 = (tr + disc) / 2.0;
    let l2 = (tr - disc) / 2.0;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of a square complex matrix, unordered, with multiplicity.
pub fn eigenvalues(m: &Mat<CF64>) -> Vec<Complex64> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    if n == 0 {
        return vec![];
    }
    let mut h: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| m.at(i, j).0).collect())
        .collect();
    let scale = h
        .iter()
        .flat_map(|r| r.iter().map(|x| x.norm()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    to_hessenberg(&mut h);

    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is 0..hi
    let eps = 1e-14 * scale;
    let mut stall = 0usize;
    while hi > 0 {
        if hi == 1 {
            eigs.push(h[0][0]);
            hi = 0;
            continue;
        }
        let m_idx = hi - 1;
        // deflate tiny subdiagonals
        let mut lo = m_idx;
        while lo > 0 {
            let s = h[lo][lo - 1].norm();
            if s <= eps.max(1e-15 * (h[lo][lo].norm() + h[lo - 1][lo - 1].norm())) {
                h[lo][lo - 1] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == m_idx {
            eigs.push(h[m_idx][m_idx]);
            hi -= 1;
            stall = 0;
            continue;
        }
        // QR step with shift on the block lo..hi
        let mut mu = wilkinson_shift(&h, m_idx);
        stall += 1;
        if stall % 24 == 0 {
            // exceptional shift to break symmetry-induced stalls
            mu += Complex64::new(0.5, 0.31) * h[m_idx][m_idx - 1].norm();
        }
        if stall > 40 * n {
            // give up refining; report current diagonal of the block
            for i in lo..hi {
                eigs.push(h[i][i]);
            }
            hi = lo;
            stall = 0;
            continue;
        }
        let mut rots = Vec::with_capacity(m_idx - lo + 1);
        for i in lo..hi {
            h[i][i] -= mu;
        }
        for i in lo..m_idx {
            let (g_c, g_s, r) = house_rotation(h[i][i], h[i + 1][i]);
            h[i][i] = Complex64::new(r, 0.0);
            h[i + 1][i] = Complex64::new(0.0, 0.0);
            for j in i + 1..hi {
                let x = h[i][j];
                let y = h[i + 1][j];
                h[i][j] = g_c.conj() * x + g_s.conj() * y;
                h[i + 1][j] = -g_s * x + g_c * y;
            }
            rots.push((g_c, g_s));
        }
        for (k, (g_c, g_s)) in rots.iter().enumerate() {
            let i = lo + k;
            for r in lo..(i + 2).min(hi) {
                let x = h[r][i];
                let y = h[r][i + 1];
                h[r][i] = x * *g_c + y * *g_s;
                h[r][i + 1] = -x * g_s.conj() + y * g_c.conj();
            }
        }
        for i in lo..hi {
            h[i][i] += mu;
        }
    }
    eigs
}
