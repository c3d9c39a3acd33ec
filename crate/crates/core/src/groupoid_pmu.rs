//! The C*-pseudo-multiplicative unitary of a finite groupoid with Haar system
//! and quasi-invariant measure, and the identification of its legs with
//! `C(G)` and `C*_r(G)`.

use std::sync::Arc;

use serde::Serialize;

use crate::cstar_base::{base_from_weight, check_factorization, CStarBase, Factorization};
use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, PairMode};
use crate::linalg::{c, null_space, span_equal, vec_of, CMat, HilbertSpace, Operator, OperatorSpan, C};
use crate::measure::{build_measure, HaarSystem, QuasiInvariantMeasure};
use crate::pmu::{delta, delta_hat, leg_a_span, leg_hat_span, PseudoMultiplicativeUnitary, UnitarySetting};
use crate::rtp::{solve_unitary, RelativeTensorSpace};

/// `α = j(L²(G,λ))` and `β̂ = ĵ(L²(G,λ⁻¹))` with their consistency checks.
#[derive(Debug, Clone)]
pub struct Embeddings {
    pub base: CStarBase,
    pub h: Arc<HilbertSpace>,
    pub alpha: Factorization,
    pub beta_hat: Factorization,
    pub report: EmbeddingReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingReport {
    /// `j(ξ')*j(ξ) = π_μ(⟨ξ',ξ⟩)` over delta functions.
    pub isometry_j: f64,
    pub isometry_j_hat: f64,
    /// `ρ_α = r`.
    pub rho_alpha: f64,
    /// `ρ_β̂ = s`.
    pub rho_beta_hat: f64,
}

fn unit_matrix(n: usize, u: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(u, u)] = c(1.0);
    m
}

/// Natural matrix `𝔥 → H` supported at `(x, unit(x))`.
fn embedding(g: &FiniteGroupoid, x: usize, unit: usize, value: f64) -> CMat {
    let mut m = CMat::zeros(g.len(), g.num_units());
    m[(x, unit)] = c(value);
    m
}

pub fn build_embeddings(
    g: &FiniteGroupoid,
    haar: &HaarSystem,
    qim: &QuasiInvariantMeasure,
    tol: f64,
) -> Result<Embeddings> {
    let units: Vec<String> = g.units().iter().map(|&u| g.arrow(u).to_string()).collect();
    let base = base_from_weight("ℓ²(G⁰,μ)", units, qim.mu.clone())?;
    let arrows: Vec<String> = (0..g.len()).map(|x| g.arrow(x).to_string()).collect();
    let h = HilbertSpace::new("ℓ²(G,ν)", arrows, qim.nu.clone())?;
    let hb = base.space().clone();
    let orth = |nat: CMat| Operator::from_natural(hb.clone(), h.clone(), nat).map(Operator::into_matrix);

    let j: Vec<CMat> = (0..g.len()).map(|x| orth(embedding(g, x, g.r_unit(x), 1.0))).collect::<Result<_>>()?;
    let j_hat: Vec<CMat> =
        (0..g.len()).map(|x| orth(embedding(g, x, g.s_unit(x), qim.d[x].powf(-0.5)))).collect::<Result<_>>()?;

    let alpha = check_factorization(OperatorSpan::from_matrices(hb.clone(), h.clone(), j.clone(), tol), &base, tol)?;
    let beta_hat = check_factorization(
        OperatorSpan::from_matrices(hb.clone(), h.clone(), j_hat.clone(), tol),
        &base.opposite(),
        tol,
    )?;

    let nu0 = g.num_units();
    let mut isometry_j = 0.0f64;
    let mut isometry_j_hat = 0.0f64;
    for x in 0..g.len() {
        for y in 0..g.len() {
            let (pj, pjh) = if x == y {
                let lam_inv = haar.weights[g.inv(x)];
                (unit_matrix(nu0, g.r_unit(x)) * c(haar.weights[x]), unit_matrix(nu0, g.s_unit(x)) * c(lam_inv))
            } else {
                (CMat::zeros(nu0, nu0), CMat::zeros(nu0, nu0))
            };
            isometry_j = isometry_j.max((j[x].adjoint() * &j[y] - pj).norm());
            isometry_j_hat = isometry_j_hat.max((j_hat[x].adjoint() * &j_hat[y] - pjh).norm());
        }
    }

    let mut rho_alpha = 0.0f64;
    let mut rho_beta_hat = 0.0f64;
    for u in 0..nu0 {
        let b = unit_matrix(nu0, u);
        let r = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            g.len(),
            (0..g.len()).map(|x| c(if g.r_unit(x) == u { 1.0 } else { 0.0 })),
        ));
        let s = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            g.len(),
            (0..g.len()).map(|x| c(if g.s_unit(x) == u { 1.0 } else { 0.0 })),
        ));
        rho_alpha = rho_alpha.max((alpha.rho(&b) - r).norm());
        rho_beta_hat = rho_beta_hat.max((beta_hat.rho(&b) - s).norm());
    }
    let report = EmbeddingReport { isometry_j, isometry_j_hat, rho_alpha, rho_beta_hat };
    let worst = isometry_j.max(isometry_j_hat).max(rho_alpha).max(rho_beta_hat);
    if worst > tol {
        return Err(Error::check("groupoid embeddings j, ĵ", worst, tol));
    }
    Ok(Embeddings { base, h, alpha, beta_hat, report })
}

/// A unitary from a relative tensor product onto `ℓ²(G², ν²)` for one of
/// the fibered products `G²_{s,r}` or `G²_{r,r}`.
#[derive(Debug, Clone)]
pub struct PairIdentification {
    pub pairs: Vec<(usize, usize)>,
    pub space: Arc<HilbertSpace>,
    /// Maps the relative tensor product into `space`.
    pub unitary: CMat,
}

impl PairIdentification {
    /// Realizes `ξ ⊳ k` as `(x, y) ↦ ξ(x, u(x)) k(y)` with `ν²(x,y) = μ(r(x))λ(x)λ(y)`,
    /// `u = s` on `G²_{s,r}` and `u = r` on `G²_{r,r}`.
    fn build(
        t: &RelativeTensorSpace,
        g: &FiniteGroupoid,
        haar: &HaarSystem,
        qim: &QuasiInvariantMeasure,
        mode: PairMode,
        tol: f64,
    ) -> Result<Self> {
        let pairs = g.composable_pairs(mode);
        let left_unit = |x: usize| match mode {
            PairMode::SourceRange => g.s_unit(x),
            PairMode::RangeRange => g.r_unit(x),
        };
        let w: Vec<f64> = pairs.iter().map(|&(x, y)| qim.mu[g.r_unit(x)] * haar.weights[x] * haar.weights[y]).collect();
        let labels = pairs.iter().map(|&(x, y)| format!("({},{})", g.arrow(x), g.arrow(y))).collect();
        let name = match mode {
            PairMode::SourceRange => "ℓ²(G²_sr,ν²)",
            PairMode::RangeRange => "ℓ²(G²_rr,ν²)",
        };
        let space = HilbertSpace::new(name, labels, w.clone())?;

        let xi = t.left().basis();
        let n = g.len();
        let mut f = CMat::zeros(pairs.len(), xi.len() * n);
        for (i, e) in xi.iter().enumerate() {
            for k in 0..n {
                let col = i * n + k;
                for (p, &(x, y)) in pairs.iter().enumerate() {
                    if y != k {
                        continue;
                    }
                    let u = left_unit(x);
                    let xi_nat = e[(x, u)] * (qim.mu[u] / qim.nu[x]).sqrt();
                    let k_nat = 1.0 / qim.nu[k].sqrt();
                    f[(p, col)] = xi_nat * c(k_nat * w[p].sqrt());
                }
            }
        }
        let unitary = solve_unitary(t.left_family(), &f, "function realization of the relative tensor product", tol)?;
        Ok(PairIdentification { pairs, space, unitary })
    }

    /// An operator on the relative tensor product, as a natural matrix on
    /// the delta functions of the pairs.
    pub fn to_natural(&self, op: &CMat) -> Result<CMat> {
        let m = &self.unitary * op * self.unitary.adjoint();
        Ok(Operator::new(self.space.clone(), self.space.clone(), m)?.natural())
    }

    pub fn from_natural(&self, nat: CMat) -> Result<CMat> {
        let m = Operator::from_natural(self.space.clone(), self.space.clone(), nat)?.into_matrix();
        Ok(self.unitary.adjoint() * m * &self.unitary)
    }

    pub fn index(&self, x: usize, y: usize) -> Option<usize> {
        self.pairs.iter().position(|&p| p == (x, y))
    }
}

#[derive(Debug, Clone)]
pub struct GroupoidUnitaryBundle {
    pub groupoid: FiniteGroupoid,
    pub haar: HaarSystem,
    pub qim: QuasiInvariantMeasure,
    pub embeddings: Embeddings,
    /// `H s⊗r H ≅ ℓ²(G²_{s,r}, ν²)`.
    pub ident_sr: PairIdentification,
    /// `H r⊗r H ≅ ℓ²(G²_{r,r}, ν²)`.
    pub ident_rr: PairIdentification,
    pub v: PseudoMultiplicativeUnitary,
}

/// Builds `V` with `(Vζ)(x, y) = ζ(x, x⁻¹y)` and verifies it; any failing
/// axiom is reported as an error.
pub fn build_bundle(g: &FiniteGroupoid, haar: &HaarSystem, mu: &[f64], tol: f64) -> Result<GroupoidUnitaryBundle> {
    let bundle = assemble_bundle(g, haar, mu, tol)?;
    bundle.v.verify(tol)?;
    Ok(bundle)
}

/// [`build_bundle`] without the final verification of `V`.
pub fn assemble_bundle(g: &FiniteGroupoid, haar: &HaarSystem, mu: &[f64], tol: f64) -> Result<GroupoidUnitaryBundle> {
    let qim = build_measure(g, haar, mu)?;
    let emb = build_embeddings(g, haar, &qim, tol)?;
    let setting = UnitarySetting::new(&emb.alpha, &emb.beta_hat, &emb.alpha, tol)?;
    let ident_sr = PairIdentification::build(setting.source(), g, haar, &qim, PairMode::SourceRange, tol)?;
    let ident_rr = PairIdentification::build(setting.range(), g, haar, &qim, PairMode::RangeRange, tol)?;

    let mut p = CMat::zeros(ident_rr.pairs.len(), ident_sr.pairs.len());
    for (col, &(a, b)) in ident_sr.pairs.iter().enumerate() {
        let ab = g.compose(a, b).expect("s(a) = r(b)");
        let row = ident_rr.index(a, ab).expect("r(a) = r(ab)");
        p[(row, col)] = c(1.0);
    }
    let p = Operator::from_natural(ident_sr.space.clone(), ident_rr.space.clone(), p)?.into_matrix();
    let v = setting.candidate(ident_rr.unitary.adjoint() * p * &ident_sr.unitary)?;
    Ok(GroupoidUnitaryBundle { groupoid: g.clone(), haar: haar.clone(), qim, embeddings: emb, ident_sr, ident_rr, v })
}

pub fn build_v(g: &FiniteGroupoid, haar: &HaarSystem, mu: &[f64], tol: f64) -> Result<PseudoMultiplicativeUnitary> {
    Ok(build_bundle(g, haar, mu, tol)?.v)
}

impl GroupoidUnitaryBundle {
    pub fn h(&self) -> &Arc<HilbertSpace> {
        &self.embeddings.h
    }

    /// `m(f)`, multiplication by `f` on `ℓ²(G, ν)`.
    pub fn mult_rep(&self, f: &[C]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_column_slice(f))
    }

    /// `(L(g)ζ)(y) = Σ_{x ∈ G^{r(y)}} g(x) D^{-1/2}(x) ζ(x⁻¹y) λ(x)`.
    pub fn conv_op(&self, f: &[C]) -> Result<CMat> {
        let g = &self.groupoid;
        let n = g.len();
        let mut nat = CMat::zeros(n, n);
        for y in 0..n {
            for x in g.range_fiber(g.r_unit(y)) {
                let z = g.compose(g.inv(x), y).expect("r(x) = r(y)");
                nat[(y, z)] += f[x] * c(self.qim.d[x].powf(-0.5) * self.haar.weights[x]);
            }
        }
        Ok(Operator::from_natural(self.h().clone(), self.h().clone(), nat)?.into_matrix())
    }

    fn delta_fn(&self, x: usize) -> Vec<C> {
        (0..self.groupoid.len()).map(|y| c(if x == y { 1.0 } else { 0.0 })).collect()
    }

    /// Expected `Δ̂(m(f))` on `G²_{s,r}`: `(x, y) ↦ f(xy)`.
    pub fn delta_hat_formula(&self, f: &[C]) -> CMat {
        let g = &self.groupoid;
        let d = nalgebra::DVector::from_iterator(
            self.ident_sr.pairs.len(),
            self.ident_sr.pairs.iter().map(|&(x, y)| f[g.compose(x, y).expect("composable")]),
        );
        CMat::from_diagonal(&d)
    }

    /// Expected `Δ(L(f))` on `G²_{r,r}`:
    /// `ζ ↦ (x, y) ↦ Σ_{z ∈ G^{r(x)}} f(z) D^{-1/2}(z) ζ(z⁻¹x, z⁻¹y) λ(z)`.
    pub fn delta_formula(&self, f: &[C]) -> CMat {
        let g = &self.groupoid;
        let pairs = &self.ident_rr.pairs;
        let mut nat = CMat::zeros(pairs.len(), pairs.len());
        for (row, &(x, y)) in pairs.iter().enumerate() {
            for z in g.range_fiber(g.r_unit(x)) {
                let zi = g.inv(z);
                let a = g.compose(zi, x).expect("r(z) = r(x)");
                let b = g.compose(zi, y).expect("r(z) = r(y)");
                let col = self.ident_rr.index(a, b).expect("r(a) = s(z) = r(b)");
                nat[(row, col)] += f[z] * c(self.qim.d[z].powf(-0.5) * self.haar.weights[z]);
            }
        }
        nat
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegIdentification {
    pub arrows: usize,
    pub hat_dim: usize,
    /// `Â(V) = span{m(δ_x)}`.
    pub hat_residual: f64,
    pub hat_commutator: f64,
    pub a_dim: usize,
    /// `A(V) = span{L(δ_x)}`.
    pub a_residual: f64,
    pub a_center_dim: usize,
    /// Largest entry error of `Δ̂(m(δ_x))` against the pair formula.
    pub delta_hat_entry_error: f64,
    /// Largest entry error of `Δ(L(δ_x))` against the convolution formula.
    pub delta_entry_error: f64,
    pub passed: bool,
}

/// Dimension of `{z ∈ A : za = az for all a ∈ A}`.
pub fn center_dim(a: &OperatorSpan, tol: f64) -> usize {
    let b = a.basis();
    if b.is_empty() {
        return 0;
    }
    let n2 = b[0].len();
    let mut m = CMat::zeros(n2 * b.len(), b.len());
    for (k, ak) in b.iter().enumerate() {
        for (i, bi) in b.iter().enumerate() {
            let comm = bi * ak - ak * bi;
            m.view_mut((k * n2, i), (n2, 1)).copy_from(&vec_of(&comm));
        }
    }
    null_space(&m, tol).ncols()
}

fn max_commutator(a: &OperatorSpan) -> f64 {
    let b = a.basis();
    let mut r = 0.0f64;
    for x in &b {
        for y in &b {
            r = r.max((x * y - y * x).norm());
        }
    }
    r
}

fn max_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identify_legs(bundle: &GroupoidUnitaryBundle, tol: f64) -> Result<LegIdentification> {
    let v = &bundle.v;
    let g = &bundle.groupoid;
    let h = bundle.h().clone();
    let n = g.len();
    let hat = leg_hat_span(v, tol);
    let a = leg_a_span(v, tol);
    let deltas: Vec<Vec<C>> = (0..n).map(|x| bundle.delta_fn(x)).collect();
    let m_span =
        OperatorSpan::from_matrices(h.clone(), h.clone(), deltas.iter().map(|f| bundle.mult_rep(f)).collect(), tol);
    let conv: Vec<CMat> = deltas.iter().map(|f| bundle.conv_op(f)).collect::<Result<_>>()?;
    let l_span = OperatorSpan::from_matrices(h.clone(), h, conv.clone(), tol);
    let (_, hat_residual) = span_equal(&hat, &m_span, tol);
    let (_, a_residual) = span_equal(&a, &l_span, tol);

    let mut delta_hat_entry_error = 0.0f64;
    let mut delta_entry_error = 0.0f64;
    for (f, l) in deltas.iter().zip(&conv) {
        let dh = bundle.ident_sr.to_natural(&delta_hat(v, &bundle.mult_rep(f), tol)?)?;
        delta_hat_entry_error = delta_hat_entry_error.max(max_entry(&(dh - bundle.delta_hat_formula(f))));
        let d = bundle.ident_rr.to_natural(&delta(v, l, tol)?)?;
        delta_entry_error = delta_entry_error.max(max_entry(&(d - bundle.delta_formula(f))));
    }

    let hat_commutator = max_commutator(&hat);
    let passed = hat.rank() == n
        && hat_residual.max(a_residual).max(hat_commutator) <= tol
        && delta_hat_entry_error.max(delta_entry_error) <= tol;
    Ok(LegIdentification {
        arrows: n,
        hat_dim: hat.rank(),
        hat_residual,
        hat_commutator,
        a_dim: a.rank(),
        a_residual,
        a_center_dim: center_dim(&a, tol),
        delta_hat_entry_error,
        delta_entry_error,
        passed,
    })
}
