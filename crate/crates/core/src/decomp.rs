//! Verified dense decompositions.
//!
//! nalgebra's complex SVD and symmetric eigen-solver are fast but can return
//! factors that do not reproduce their input. Every result here is checked,
//! and a one-sided Jacobi SVD takes over when the check fails.

use nalgebra::DVector;

use crate::linalg::{c, CMat, C};

/// Thin singular value decomposition `m = u diag(s) vt`, with `s`
/// non-increasing. Columns of `u` belonging to zero singular values are zero.
#[derive(Debug, Clone)]
pub(crate) struct Svd {
    pub u: CMat,
    pub s: DVector<f64>,
    pub vt: CMat,
}

const CHECK: f64 = 1e-12;

pub(crate) fn svd(m: &CMat) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd { u: CMat::zeros(rows, 0), s: DVector::zeros(0), vt: CMat::zeros(0, cols) };
    }
    if let Some(out) = m.clone().try_svd(true, true, f64::EPSILON, 10_000) {
        let (u, vt) = (out.u.expect("u requested"), out.v_t.expect("v requested"));
        let cand = sorted(u, out.singular_values, vt);
        if accurate(m, &cand) {
            return cand;
        }
    }
    jacobi_svd(m)
}

/// Largest singular value, from the eigenvalues of the smaller Gram matrix.
/// Falls back to a full SVD if the value is inconsistent with the
/// Frobenius norm.
pub(crate) fn op_norm(m: &CMat) -> f64 {
    let gram = if m.nrows() < m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    let value = hermitian_op_norm(&gram).sqrt();
    let (f, k) = (m.norm(), m.nrows().min(m.ncols()).max(1) as f64);
    if value <= f * (1.0 + 1e-10) && value >= f / k.sqrt() * (1.0 - 1e-10) {
        return value;
    }
    svd(m).s.max()
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub(crate) fn hermitian_op_norm(h: &CMat) -> f64 {
    if h.is_empty() {
        return 0.0;
    }
    let value = h.clone().symmetric_eigenvalues().amax();
    let (f, k) = (h.norm(), h.nrows() as f64);
    if value <= f * (1.0 + 1e-10) && value >= f / k.sqrt() * (1.0 - 1e-10) {
        return value;
    }
    hermitian_eigen(h).0.amax()
}

fn accurate(m: &CMat, d: &Svd) -> bool {
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let us = scale_columns(&d.u, &d.s);
    if (&us * &d.vt - m).norm() > CHECK * scale {
        return false;
    }
    let k = d.s.len();
    let live: Vec<usize> = (0..k).filter(|&i| d.s[i] > CHECK * d.s[0]).collect();
    let u = d.u.select_columns(&live);
    let v = d.vt.adjoint();
    let id = CMat::identity(live.len(), live.len());
    (u.adjoint() * &u - id).norm() <= CHECK * (k as f64).sqrt().max(1.0)
        && (v.adjoint() * &v - CMat::identity(k, k)).norm() <= CHECK * (k as f64).sqrt().max(1.0)
}

fn scale_columns(u: &CMat, s: &DVector<f64>) -> CMat {
    let mut out = u.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= c(s[j]);
    }
    out
}

fn sorted(u: CMat, s: DVector<f64>, vt: CMat) -> Svd {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    let s = DVector::from_iterator(order.len(), order.iter().map(|&i| s[i]));
    Svd { u: u.select_columns(&order), s, vt: vt.select_rows(&order) }
}

/// One-sided Jacobi SVD. Wide inputs go through the adjoint, tall ones are
/// first reduced to a square triangular factor.
pub(crate) fn jacobi_svd(m: &CMat) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = jacobi_svd(&m.adjoint());
        return Svd { u: t.vt.adjoint(), s: t.s, vt: t.u.adjoint() };
    }
    if rows > cols {
        let qr = m.clone().qr();
        let (q, r) = (qr.q(), qr.r());
        let inner = jacobi_svd(&r);
        return Svd { u: q * inner.u, s: inner.s, vt: inner.vt };
    }
    let n = cols;
    let mut b = m.clone();
    let mut v = CMat::identity(n, n);
    let mut norms: Vec<f64> = (0..n).map(|j| b.column(j).norm_squared()).collect();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&b, p, q);
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let phase = (gamma / g).conj();
                rotate(&mut b, p, q, cs, sn, phase);
                rotate(&mut v, p, q, cs, sn, phase);
                norms[p] = b.column(p).norm_squared();
                norms[q] = b.column(q).norm_squared();
            }
        }
        if !rotated {
            break;
        }
    }
    let mut u = CMat::zeros(n, n);
    let mut s = DVector::zeros(n);
    for j in 0..n {
        let nj = b.column(j).norm();
        s[j] = nj;
        if nj > 0.0 {
            u.set_column(j, &(b.column(j) / c(nj)));
        }
    }
    sorted(u, s, v.adjoint())
}

fn dot(b: &CMat, p: usize, q: usize) -> C {
    let (x, y) = (b.column(p), b.column(q));
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Columns `x, y` become `c x - s e y` and `s x + c e y`, `e = phase`.
fn rotate(b: &mut CMat, p: usize, q: usize, cs: f64, sn: f64, phase: C) {
    let rows = b.nrows();
    let data = b.as_mut_slice();
    let (head, tail) = data.split_at_mut(q * rows);
    let x = &mut head[p * rows..(p + 1) * rows];
    let y = &mut tail[..rows];
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let ye = *yi * phase;
        let xo = *xi;
        *xi = xo * cs - ye * sn;
        *yi = xo * sn + ye * cs;
    }
}

/// Eigen-decomposition `(values, vectors)` of a Hermitian matrix.
pub(crate) fn hermitian_eigen(h: &CMat) -> (DVector<f64>, CMat) {
    let n = h.nrows();
    let scale = h.norm().max(1.0);
    let eig = h.clone().symmetric_eigen();
    let lam = CMat::from_diagonal(&eig.eigenvalues.map(c));
    let res = (h * &eig.eigenvectors - &eig.eigenvectors * lam).norm();
    let orth = (eig.eigenvectors.adjoint() * &eig.eigenvectors - CMat::identity(n, n)).norm();
    if res <= CHECK * scale && orth <= CHECK * (n as f64).sqrt().max(1.0) {
        return (eig.eigenvalues, eig.eigenvectors);
    }
    // h + shift is positive definite, so its SVD is an eigen-decomposition
    let shift = h.norm() + 1.0;
    let d = jacobi_svd(&(h + CMat::identity(n, n) * c(shift)));
    let vectors = d.vt.adjoint();
    let values = DVector::from_iterator(n, vectors.column_iter().map(|x| (x.adjoint() * h * x)[(0, 0)].re));
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMat::from_fn(rows, cols, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn check(m: &CMat, d: &Svd) {
        let rec = scale_columns(&d.u, &d.s) * &d.vt;
        assert!((rec - m).norm() < 1e-12 * m.norm().max(1.0));
        assert!(d.s.iter().zip(d.s.iter().skip(1)).all(|(a, b)| a >= b));
        let k = d.s.len();
        let v = d.vt.adjoint();
        assert!((v.adjoint() * v - CMat::identity(k, k)).norm() < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_all_shapes() {
        for (r, cl, seed) in [(5, 5, 1), (7, 3, 2), (3, 7, 3), (1, 4, 4), (6, 1, 5)] {
            let m = random(r, cl, seed);
            check(&m, &jacobi_svd(&m));
            check(&m, &svd(&m));
        }
    }

    #[test]
    fn rank_deficient_and_degenerate() {
        let a = random(6, 2, 7);
        let m = &a * a.adjoint();
        let d = jacobi_svd(&m);
        check(&m, &d);
        assert!(d.s[2] < 1e-12);
        let id = CMat::identity(4, 4) * c(2.0);
        let d = jacobi_svd(&id);
        assert!(d.s.iter().all(|s| (s - 2.0).abs() < 1e-14));
    }

    #[test]
    fn norms_agree_with_svd() {
        for (r, cl, seed) in [(4, 4, 11), (6, 3, 12), (2, 5, 13)] {
            let m = random(r, cl, seed);
            let s = jacobi_svd(&m).s[0];
            assert!((op_norm(&m) - s).abs() < 1e-12 * s);
        }
        let a = random(4, 4, 14);
        let h = &a + a.adjoint();
        let s = jacobi_svd(&h).s[0];
        assert!((hermitian_op_norm(&h) - s).abs() < 1e-12 * s);
        assert_eq!(op_norm(&CMat::zeros(3, 2)), 0.0);
    }

    #[test]
    fn hermitian_eigen_matches() {
        let a = random(5, 5, 9);
        let h = &a + a.adjoint();
        let (vals, vecs) = hermitian_eigen(&h);
        let lam = CMat::from_diagonal(&vals.map(c));
        assert!((&h * &vecs - &vecs * lam).norm() < 1e-12);
        assert!((vecs.adjoint() * &vecs - CMat::identity(5, 5)).norm() < 1e-12);
    }
}
