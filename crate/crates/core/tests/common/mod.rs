//! Test-side instance generators shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use cstar_pmu::linalg::{c, span_normalize_in, CMat, HilbertSpace, Operator, OperatorSpan, C};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TOL: f64 = 1e-9;

pub fn span_in(dom: &Arc<HilbertSpace>, cod: &Arc<HilbertSpace>, gens: Vec<CMat>) -> OperatorSpan {
    let ops: Vec<Operator> = gens.into_iter().map(|m| Operator::new(dom.clone(), cod.clone(), m).unwrap()).collect();
    span_normalize_in(dom.clone(), cod.clone(), &ops, TOL).unwrap()
}

pub fn span_of(h: &Arc<HilbertSpace>, gens: Vec<CMat>) -> OperatorSpan {
    span_in(h, h, gens)
}

pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let m = CMat::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

pub fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = c(1.0);
    m
}

/// A random block instance of the induction problem.
///
/// `H = ⊕ ℂ^{h_i} ⊗ ℂ^{m_i}` and `K = ⊕ ℂ^{k_i} ⊗ ℂ^{m_i}`, both rotated by
/// random unitaries; `Γ = ⊕ M_{k_i,h_i} ⊗ 1`, `A = ⊕ M_{h_i} ⊗ C_i` with
/// `C_i ⊆ M_{m_i}` scalars, diagonals or everything. Then
/// `Ind_Γ(A) = ⊕ M_{k_i} ⊗ C_i`.
pub struct InductionInstance {
    pub gamma: OperatorSpan,
    pub a: OperatorSpan,
    pub expected: OperatorSpan,
}

pub fn induction_instance(seed: u64) -> InductionInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // (h, m, k, kind) with Σ h m ≤ 4 and Σ k m ≤ 8
    let mut blocks: Vec<(usize, usize, usize, u8)> = Vec::new();
    let (mut dh, mut dk) = (0, 0);
    loop {
        let m = rng.gen_range(1..=2usize);
        let h = rng.gen_range(1..=2usize);
        let k = rng.gen_range(1..=3usize);
        if dh + h * m > 4 || dk + k * m > 8 {
            break;
        }
        blocks.push((h, m, k, rng.gen_range(0..3u8)));
        dh += h * m;
        dk += k * m;
        if rng.gen_bool(0.3) {
            break;
        }
    }
    let hs = HilbertSpace::euclidean("H", dh).unwrap();
    let ks = HilbertSpace::euclidean("K", dk).unwrap();
    let (uh, uk) = (random_unitary(dh, &mut rng), random_unitary(dk, &mut rng));
    let (mut gam, mut alg, mut exp) = (Vec::new(), Vec::new(), Vec::new());
    let (mut oh, mut ok) = (0, 0);
    for &(h, m, k, kind) in &blocks {
        let mut cs: Vec<CMat> = match kind {
            0 => vec![CMat::identity(m, m)],
            1 => (0..m).map(|i| unit(m, i, i)).collect(),
            _ => (0..m).flat_map(|i| (0..m).map(move |j| unit(m, i, j))).collect(),
        };
        cs.dedup();
        for a in 0..k {
            for b in 0..h {
                let mut g = CMat::zeros(dk, dh);
                let e = CMat::from_fn(k, h, |i, j| c(if (i, j) == (a, b) { 1.0 } else { 0.0 }));
                let block = e.kronecker(&CMat::identity(m, m));
                g.view_mut((ok, oh), (k * m, h * m)).copy_from(&block);
                gam.push(&uk * g * uh.adjoint());
            }
        }
        for cm in &cs {
            for a in 0..h {
                for b in 0..h {
                    let mut x = CMat::zeros(dh, dh);
                    x.view_mut((oh, oh), (h * m, h * m)).copy_from(&unit(h, a, b).kronecker(cm));
                    alg.push(&uh * x * uh.adjoint());
                }
            }
            for a in 0..k {
                for b in 0..k {
                    let mut x = CMat::zeros(dk, dk);
                    x.view_mut((ok, ok), (k * m, k * m)).copy_from(&unit(k, a, b).kronecker(cm));
                    exp.push(&uk * x * uk.adjoint());
                }
            }
        }
        oh += h * m;
        ok += k * m;
    }
    InductionInstance { gamma: span_in(&hs, &ks, gam), a: span_of(&hs, alg), expected: span_of(&ks, exp) }
}
