//! C*-bases and C*-factorizations in finite dimension.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{
    c, orth, pinv, solve_operator_constraints, span_equal, span_normalize_in, CMat, Constraint, HilbertSpace,
    OperatorSpan,
};

/// `(𝔥, 𝔅, 𝔅†)` with two commuting nondegenerate *-algebras on `𝔥`.
#[derive(Debug, Clone)]
pub struct CStarBase {
    h: Arc<HilbertSpace>,
    b: OperatorSpan,
    b_dag: OperatorSpan,
}

/// Horizontal concatenation `[m_1 | m_2 | …]`.
pub(crate) fn hcat(blocks: &[CMat], rows: usize) -> CMat {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Residual of `[A A] ⊆ A` and `A* = A`.
pub(crate) fn star_algebra_residual(a: &OperatorSpan) -> f64 {
    let basis = a.basis();
    let mut r = 0.0f64;
    for x in &basis {
        r = r.max(a.distance(&x.adjoint()));
        for y in &basis {
            r = r.max(a.distance(&(x * y)));
        }
    }
    r
}

/// Rank of `[A H]` compared with `dim H`; zero when nondegenerate.
pub(crate) fn range_rank_defect(blocks: &[CMat], rows: usize, tol: f64) -> usize {
    rows - orth(&hcat(blocks, rows), tol).ncols()
}

impl CStarBase {
    pub fn new(h: Arc<HilbertSpace>, b: OperatorSpan, b_dag: OperatorSpan, tol: f64) -> Result<Self> {
        for (name, a) in [("𝔅", &b), ("𝔅†", &b_dag)] {
            if !HilbertSpace::same(a.dom(), &h) || !HilbertSpace::same(a.cod(), &h) {
                return Err(Error::Shape(format!("{name} must act on the base space")));
            }
            let r = star_algebra_residual(a);
            if r > tol {
                return Err(Error::check(format!("{name} is a *-algebra"), r, tol));
            }
            let missing = range_rank_defect(&a.basis(), h.dim(), tol);
            if missing != 0 {
                return Err(Error::check(format!("{name} nondegenerate"), missing as f64, tol));
            }
        }
        let mut comm = 0.0f64;
        for x in b.basis() {
            for y in b_dag.basis() {
                comm = comm.max((&x * &y - &y * &x).norm());
            }
        }
        if comm > tol {
            return Err(Error::check("𝔅 and 𝔅† commute", comm, tol));
        }
        Ok(CStarBase { h, b, b_dag })
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.h
    }

    pub fn b(&self) -> &OperatorSpan {
        &self.b
    }

    pub fn b_dag(&self) -> &OperatorSpan {
        &self.b_dag
    }

    /// `(𝔥, 𝔅†, 𝔅)`.
    pub fn opposite(&self) -> CStarBase {
        CStarBase { h: self.h.clone(), b: self.b_dag.clone(), b_dag: self.b.clone() }
    }

    /// Same space and the same two algebras, as spans.
    pub fn same_as(&self, other: &CStarBase, tol: f64) -> bool {
        HilbertSpace::same(&self.h, &other.h)
            && span_equal(&self.b, &other.b, tol).0
            && span_equal(&self.b_dag, &other.b_dag, tol).0
    }
}

/// The base of a finite commutative function algebra with a faithful weight:
/// `𝔥 = ℓ²(labels, weight)` and `𝔅 = 𝔅†` the multiplication operators.
pub fn base_from_weight(name: &str, labels: Vec<String>, weight: Vec<f64>) -> Result<CStarBase> {
    let n = labels.len();
    let h = HilbertSpace::new(name, labels, weight)?;
    let diag: Vec<CMat> = (0..n)
        .map(|i| {
            let mut m = CMat::zeros(n, n);
            m[(i, i)] = c(1.0);
            m
        })
        .collect();
    let b = OperatorSpan::from_matrices(h.clone(), h.clone(), diag, 1e-12);
    Ok(CStarBase { h, b: b.clone(), b_dag: b })
}

/// A closed subspace `α ⊆ L(𝔥, H)` with `[α*α] = 𝔅`, `[α𝔅] = α`,
/// `[α𝔥] = H`, together with its representation `ρ_α` of `𝔅†` on `H`.
#[derive(Debug, Clone)]
pub struct Factorization {
    base: CStarBase,
    span: OperatorSpan,
    /// `[ξ_1 | ξ_2 | …]` over the orthonormal basis of `α`.
    synth: CMat,
    synth_pinv: CMat,
    residuals: FactorizationResiduals,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct FactorizationResiduals {
    pub inner_products: f64,
    pub module: f64,
    pub nondegenerate: f64,
    pub rho_defining: f64,
    pub rho_homomorphism: f64,
    pub rho_faithful: f64,
}

/// Verifies the factorization axioms and builds `ρ_α`. Failures name the
/// axiom and carry its residual.
pub fn check_factorization(span: OperatorSpan, base: &CStarBase, tol: f64) -> Result<Factorization> {
    let h = base.space();
    if !HilbertSpace::same(span.dom(), h) {
        return Err(Error::Shape("factorization must consist of operators on the base space".into()));
    }
    let target = span.cod().clone();
    let basis = span.basis();
    let mut res = FactorizationResiduals::default();

    let synth = hcat(&basis, target.dim());
    let missing = range_rank_defect(&basis, target.dim(), tol);
    res.nondegenerate = missing as f64;
    if missing != 0 {
        return Err(Error::check("factorization axiom [α𝔥] = H", missing as f64, tol));
    }

    let mut inner = Vec::with_capacity(basis.len() * basis.len());
    for x in &basis {
        for y in &basis {
            inner.push(x.adjoint() * y);
        }
    }
    let inner_span = OperatorSpan::from_matrices(h.clone(), h.clone(), inner, tol);
    let (ok, r) = span_equal(&inner_span, base.b(), tol);
    res.inner_products = r;
    if !ok {
        return Err(Error::check("factorization axiom [α*α] = 𝔅", r, tol));
    }

    let mut module = 0.0f64;
    for x in &basis {
        for b in base.b().basis() {
            module = module.max(span.distance(&(x * b)));
        }
    }
    res.module = module;
    if module > tol {
        return Err(Error::check("factorization axiom [α𝔅] = α", module, tol));
    }

    let synth_pinv = pinv(&synth, tol);
    let mut f = Factorization { base: base.clone(), span, synth, synth_pinv, residuals: res };

    // defining identity, homomorphism and faithfulness of ρ_α on a basis of 𝔅†
    let outer = base.b_dag().basis();
    let images: Vec<CMat> = outer.iter().map(|b| f.rho(b)).collect();
    let mut defining = 0.0f64;
    for (b, img) in outer.iter().zip(&images) {
        defining = defining.max((img * &f.synth - f.right_act(b)).norm() / f.synth.norm().max(1.0));
    }
    let mut hom = 0.0f64;
    for (i, bi) in outer.iter().enumerate() {
        hom = hom.max((f.rho(&bi.adjoint()) - images[i].adjoint()).norm());
        for (j, bj) in outer.iter().enumerate() {
            hom = hom.max((f.rho(&(bi * bj)) - &images[i] * &images[j]).norm());
        }
    }
    let image_span = OperatorSpan::from_matrices(target.clone(), target.clone(), images, tol);
    let faithful = (outer.len() - image_span.rank()) as f64;
    f.residuals.rho_defining = defining;
    f.residuals.rho_homomorphism = hom;
    f.residuals.rho_faithful = faithful;
    if defining > tol {
        return Err(Error::check("ρ_α(b†)ξζ = ξb†ζ", defining, tol));
    }
    if hom > tol {
        return Err(Error::check("ρ_α is a *-homomorphism", hom, tol));
    }
    if faithful > 0.0 {
        return Err(Error::check("ρ_α faithful", faithful, tol));
    }
    Ok(f)
}

impl Factorization {
    pub fn base(&self) -> &CStarBase {
        &self.base
    }

    pub fn span(&self) -> &OperatorSpan {
        &self.span
    }

    pub fn target(&self) -> &Arc<HilbertSpace> {
        self.span.cod()
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }

    pub fn basis(&self) -> Vec<CMat> {
        self.span.basis()
    }

    pub fn residuals(&self) -> FactorizationResiduals {
        self.residuals
    }

    /// `[ξ_1 | ξ_2 | …]`, the map `α ⊗ 𝔥 → H`.
    pub fn synthesis(&self) -> &CMat {
        &self.synth
    }

    pub fn synthesis_pinv(&self) -> &CMat {
        &self.synth_pinv
    }

    /// `[ξ_1 b | ξ_2 b | …]`.
    fn right_act(&self, b: &CMat) -> CMat {
        let d = self.base.space().dim();
        let mut out = CMat::zeros(self.synth.nrows(), self.synth.ncols());
        for i in 0..self.rank() {
            let blk = self.synth.columns(i * d, d) * b;
            out.columns_mut(i * d, d).copy_from(&blk);
        }
        out
    }

    /// `ρ_α(b†)`, determined by `ρ_α(b†)ξζ = ξb†ζ`.
    pub fn rho(&self, b_dag: &CMat) -> CMat {
        self.right_act(b_dag) * &self.synth_pinv
    }

    /// `ρ_α(𝔅†)` as a span on `H`.
    pub fn rho_image(&self, tol: f64) -> OperatorSpan {
        let t = self.target().clone();
        let gens = self.base.b_dag().basis().iter().map(|b| self.rho(b)).collect();
        OperatorSpan::from_matrices(t.clone(), t, gens, tol)
    }

    /// Push-forward `Uα` along a unitary `U: H → K`.
    pub fn transport(&self, u: &crate::linalg::Operator, tol: f64) -> Result<Factorization> {
        if !HilbertSpace::same(u.dom(), self.target()) {
            return Err(Error::Shape("transport: unitary must start at the factorized space".into()));
        }
        let span = self.span.map_span(self.base.space().clone(), u.cod().clone(), tol, |x| u.matrix() * x);
        check_factorization(span, &self.base, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CompatibilityReport {
    /// `[ρ_α(𝔅†)β] = β`
    pub rho_alpha_beta: f64,
    /// `[ρ_β(𝔠†)α] = α`
    pub rho_beta_alpha: f64,
    /// Commutator of the two representations.
    pub commute: f64,
    pub compatible: bool,
}

fn rho_span(rho_of: &Factorization, acted: &Factorization, tol: f64) -> OperatorSpan {
    let mut gens = Vec::new();
    for b in rho_of.base.b_dag().basis() {
        let r = rho_of.rho(&b);
        for x in acted.basis() {
            gens.push(&r * x);
        }
    }
    OperatorSpan::from_matrices(acted.base.space().clone(), acted.target().clone(), gens, tol)
}

/// `α ⊥ β`: each factorization is stable under the other's representation.
pub fn check_compatible(alpha: &Factorization, beta: &Factorization, tol: f64) -> CompatibilityReport {
    if !HilbertSpace::same(alpha.target(), beta.target()) {
        return CompatibilityReport {
            rho_alpha_beta: f64::INFINITY,
            rho_beta_alpha: f64::INFINITY,
            commute: f64::INFINITY,
            compatible: false,
        };
    }
    let (_, r1) = span_equal(&rho_span(alpha, beta, tol), beta.span(), tol);
    let (_, r2) = span_equal(&rho_span(beta, alpha, tol), alpha.span(), tol);
    let mut commute = 0.0f64;
    let ra: Vec<CMat> = alpha.base.b_dag().basis().iter().map(|b| alpha.rho(b)).collect();
    let rb: Vec<CMat> = beta.base.b_dag().basis().iter().map(|b| beta.rho(b)).collect();
    for x in &ra {
        for y in &rb {
            commute = commute.max((x * y - y * x).norm());
        }
    }
    CompatibilityReport { rho_alpha_beta: r1, rho_beta_alpha: r2, commute, compatible: r1.max(r2).max(commute) <= tol }
}

/// `L(H_α, K_β) = {T : Tα ⊆ β, T*β ⊆ α}`.
pub fn intertwiner_space(alpha: &Factorization, beta: &Factorization, tol: f64) -> Result<OperatorSpan> {
    if !HilbertSpace::same(alpha.base.space(), beta.base.space()) || !span_equal(alpha.base.b(), beta.base.b(), tol).0 {
        return Err(Error::Shape("intertwiners need factorizations over the same base".into()));
    }
    let mut cons = Vec::new();
    for x in alpha.basis() {
        cons.push(Constraint::maps_into(x, beta.span().clone()));
    }
    for y in beta.basis() {
        cons.push(Constraint::AdjointMapsInto { gamma: y, target: alpha.span().clone() });
    }
    solve_operator_constraints(alpha.target().clone(), beta.target().clone(), &cons, tol)
}

/// The base factorization `𝔅 ⊆ L(𝔥)`, with `ρ_𝔅 = Id`.
pub fn base_factorization(base: &CStarBase, tol: f64) -> Result<Factorization> {
    check_factorization(base.b().clone(), base, tol)
}

/// Unused generators are dropped; an empty candidate yields the zero span.
pub fn factorization_from_generators(
    base: &CStarBase,
    target: Arc<HilbertSpace>,
    generators: &[crate::linalg::Operator],
    tol: f64,
) -> Result<Factorization> {
    let span = span_normalize_in(base.space().clone(), target, generators, tol)?;
    check_factorization(span, base, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Operator, DEFAULT_TOL};

    const TOL: f64 = DEFAULT_TOL;

    #[test]
    fn weight_bases() {
        let one = base_from_weight("h", vec!["u".into()], vec![1.0]).unwrap();
        assert_eq!((one.space().dim(), one.b().rank(), one.b_dag().rank()), (1, 1, 1));
        let two = base_from_weight("h", vec!["1".into(), "2".into()], vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert_eq!(two.b().rank(), 2);
        // GNS by hand: multiplication by f acts diagonally in any orthonormal basis
        for m in two.b().basis() {
            assert!(m[(0, 1)].norm() < 1e-15 && m[(1, 0)].norm() < 1e-15);
        }
        let three = base_from_weight("h", (0..3).map(|k| k.to_string()).collect(), vec![1.0; 3]).unwrap();
        assert_eq!(three.b().rank(), 3);
        assert!(base_from_weight("h", vec!["a".into()], vec![0.0]).is_err());
    }

    #[test]
    fn base_is_a_factorization_of_itself() {
        let base = base_from_weight("h", vec!["1".into(), "2".into()], vec![0.25, 0.75]).unwrap();
        let f = base_factorization(&base, TOL).unwrap();
        for b in base.b_dag().basis() {
            assert!((f.rho(&b) - &b).norm() < 1e-12);
        }
        let g = check_factorization(base.b_dag().clone(), &base.opposite(), TOL).unwrap();
        let rep = check_compatible(&f, &g, TOL);
        assert!(rep.compatible, "{rep:?}");
        let l = intertwiner_space(&f, &f, TOL).unwrap();
        for b in base.b().basis() {
            assert!(l.distance(&b) < 1e-9);
        }
        assert!(l.distance(&CMat::identity(2, 2)) < 1e-9);
    }

    #[test]
    fn zero_span_fails_nondegeneracy() {
        let base = base_from_weight("h", vec!["u".into()], vec![1.0]).unwrap();
        let h2 = HilbertSpace::euclidean("H", 2).unwrap();
        let zero = OperatorSpan::zero(base.space().clone(), h2);
        let err = check_factorization(zero, &base, TOL).unwrap_err();
        assert!(err.to_string().contains("[α𝔥] = H"), "{err}");
        // scalars on ℂ² are nondegenerate but their inner products miss 𝔅
        let diag = base_from_weight("h", vec!["1".into(), "2".into()], vec![1.0, 1.0]).unwrap();
        let scalars =
            OperatorSpan::from_matrices(diag.space().clone(), diag.space().clone(), vec![CMat::identity(2, 2)], TOL);
        let err = check_factorization(scalars, &diag, TOL).unwrap_err();
        assert!(err.to_string().contains("[α*α] = 𝔅"), "{err}");
    }

    #[test]
    fn unitary_transport_stays_a_factorization() {
        let base = base_from_weight("h", vec!["1".into(), "2".into()], vec![0.5, 0.5]).unwrap();
        let f = base_factorization(&base, TOL).unwrap();
        let h = base.space().clone();
        let s = 1.0 / 2f64.sqrt();
        let u = CMat::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)]);
        let k = HilbertSpace::euclidean("K", 2).unwrap();
        let g = f.transport(&Operator::new(h, k, u.clone()).unwrap(), TOL).unwrap();
        for b in base.b_dag().basis() {
            assert!((g.rho(&b) - &u * &b * u.adjoint()).norm() < 1e-12);
        }
    }

    #[test]
    fn bad_base_rejected() {
        let h = HilbertSpace::euclidean("h", 2).unwrap();
        let mut e01 = CMat::zeros(2, 2);
        e01[(0, 1)] = c(1.0);
        let not_star = OperatorSpan::from_matrices(h.clone(), h.clone(), vec![CMat::identity(2, 2), e01], TOL);
        let full = OperatorSpan::full(h.clone(), h.clone());
        assert!(CStarBase::new(h.clone(), not_star, full.clone(), TOL).is_err());
        let diag = base_from_weight("d", vec!["a".into(), "b".into()], vec![1.0, 1.0]).unwrap();
        let d = OperatorSpan::from_orthonormal(h.clone(), h.clone(), diag.b().vec_basis().clone());
        assert!(CStarBase::new(h.clone(), d, full, TOL).is_err());
    }
}
