//! Induced algebras, fiber products of concrete algebras, morphisms and the
//! Hopf bimodule audit.
//!
//! In finite dimension the `τ_Γ`-closure of a span is the span itself, so the
//! three descriptions of `Ind_Γ(A)` (definition, `[ΓAΓ*]`, slice test) are
//! exact identities here. [`fiber_product`] uses the generated form because
//! it avoids an unknown of size `dim K²`.

use std::sync::Arc;

use serde::Serialize;

use crate::cstar_base::{check_compatible, hcat, range_rank_defect, star_algebra_residual, Factorization};
use crate::error::{Error, Result};
use crate::linalg::{
    solve_operator_constraints, span_equal, span_intersect, span_product, CMat, Constraint, HilbertSpace, OperatorSpan,
};
use crate::rtp::{associator, build_rtp, RelativeTensorSpace};

/// `(H, A, α, β, …)`: a C*-algebra of operators on `H` with attached
/// factorizations for which `A` is a module.
#[derive(Debug, Clone)]
pub struct ConcreteAlgebra {
    algebra: OperatorSpan,
    factorizations: Vec<(String, Factorization)>,
}

impl ConcreteAlgebra {
    /// Checks closure under products and adjoints.
    pub fn new(algebra: OperatorSpan, tol: f64) -> Result<Self> {
        if !HilbertSpace::same(algebra.dom(), algebra.cod()) {
            return Err(Error::Shape("a concrete algebra acts on one space".into()));
        }
        let r = star_algebra_residual(&algebra);
        if r > tol {
            return Err(Error::check("algebra is closed under products and adjoints", r, tol));
        }
        Ok(ConcreteAlgebra { algebra, factorizations: Vec::new() })
    }

    /// Attaches `f` after checking `[ρ_f(𝔅†) A] ⊆ A`.
    pub fn with_factorization(mut self, name: &str, f: &Factorization, tol: f64) -> Result<Self> {
        if !HilbertSpace::same(f.target(), self.space()) {
            return Err(Error::Shape(format!("factorization {name} lives on another space")));
        }
        let r = module_residual(&self.algebra, f);
        if r > tol {
            return Err(Error::check(format!("algebra is a {name}-module"), r, tol));
        }
        self.factorizations.push((name.to_string(), f.clone()));
        Ok(self)
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        self.algebra.dom()
    }

    pub fn algebra(&self) -> &OperatorSpan {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.rank()
    }

    pub fn factorization(&self, name: &str) -> Option<&Factorization> {
        self.factorizations.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn factorizations(&self) -> &[(String, Factorization)] {
        &self.factorizations
    }

    /// `dim H - rank [AH]`; zero iff `A` is nondegenerate.
    pub fn degeneracy(&self, tol: f64) -> usize {
        range_rank_defect(&self.algebra.basis(), self.space().dim(), tol)
    }
}

/// Largest distance of `ρ_f(b†) a` and `a ρ_f(b†)` to `A`.
fn module_residual(a: &OperatorSpan, f: &Factorization) -> f64 {
    let mut r = 0.0f64;
    for b in f.base().b_dag().basis() {
        let rb = f.rho(&b);
        for x in a.basis() {
            r = r.max(a.distance(&(&rb * &x))).max(a.distance(&(&x * &rb)));
        }
    }
    r
}

fn require_shapes(gamma: &OperatorSpan, a: &OperatorSpan) -> Result<()> {
    if !HilbertSpace::same(gamma.dom(), a.dom()) || !HilbertSpace::same(a.dom(), a.cod()) {
        return Err(Error::Shape("induction: Γ ⊆ L(H, K) and A ⊆ L(H) required".into()));
    }
    Ok(())
}

/// Verifies `[ΓΓ*Γ] = Γ`, `[ΓH] = K` and `[A𝔅] ⊆ A` for `𝔅 = [Γ*Γ]`.
pub fn check_induce_preconditions(gamma: &OperatorSpan, a: &OperatorSpan, tol: f64) -> Result<()> {
    require_shapes(gamma, a)?;
    let k = gamma.cod().dim();
    let defect = range_rank_defect(&gamma.basis(), k, tol);
    if defect > 0 {
        return Err(Error::check("[ΓH] = K", defect as f64, tol));
    }
    let g = gamma.basis();
    let mut ternary = Vec::new();
    for x in &g {
        for y in &g {
            let xy = x * y.adjoint();
            for z in &g {
                ternary.push(&xy * z);
            }
        }
    }
    let t = OperatorSpan::from_matrices(gamma.dom().clone(), gamma.cod().clone(), ternary, tol);
    let (ok, r) = span_equal(&t, gamma, tol);
    if !ok {
        return Err(Error::check("[ΓΓ*Γ] = Γ", r, tol));
    }
    let b = span_product(&gamma.adjoint(), gamma, tol)?;
    let ab = span_product(a, &b, tol)?;
    let r = a.inclusion_residual(&ab);
    if r > tol {
        return Err(Error::check("[A𝔅] ⊆ A", r, tol));
    }
    Ok(())
}

/// `Ind_Γ(A) = {T ∈ L(K) : TΓ, T*Γ ⊆ [ΓA]}`, solved as a linear system.
pub fn induce(gamma: &OperatorSpan, a: &OperatorSpan, tol: f64) -> Result<OperatorSpan> {
    check_induce_preconditions(gamma, a, tol)?;
    let ga = span_product(gamma, a, tol)?;
    let k = gamma.cod().clone();
    let mut cons = Vec::new();
    for g in gamma.basis() {
        cons.push(Constraint::maps_into(g.clone(), ga.clone()));
        cons.push(Constraint::AdjointMapsInto { gamma: g, target: ga.clone() });
    }
    let ind = solve_operator_constraints(k.clone(), k, &cons, tol)?;
    let r = star_algebra_residual(&ind);
    if r > tol {
        return Err(Error::check("Ind_Γ(A) is a *-algebra", r, tol));
    }
    Ok(ind)
}

/// `[ΓAΓ*]`.
pub fn induce_generated(gamma: &OperatorSpan, a: &OperatorSpan, tol: f64) -> Result<OperatorSpan> {
    require_shapes(gamma, a)?;
    Ok(generated(&gamma.basis(), &a.basis(), gamma.cod().clone(), tol))
}

fn generated(gammas: &[CMat], a: &[CMat], k: Arc<HilbertSpace>, tol: f64) -> OperatorSpan {
    let mut gens = Vec::with_capacity(gammas.len() * gammas.len() * a.len());
    for x in a {
        let left: Vec<CMat> = gammas.iter().map(|g| g * x).collect();
        for l in &left {
            for g in gammas {
                gens.push(l * g.adjoint());
            }
        }
    }
    OperatorSpan::from_matrices(k.clone(), k, gens, tol)
}

/// `{T ∈ Ind_Γ(L(H)) : Γ*TΓ ⊆ A}`, solved as a linear system.
pub fn induce_sandwich(gamma: &OperatorSpan, a: &OperatorSpan, tol: f64) -> Result<OperatorSpan> {
    require_shapes(gamma, a)?;
    let k = gamma.cod().clone();
    let h = gamma.dom().clone();
    let full = OperatorSpan::full(h.clone(), h);
    let g_full = span_product(gamma, &full, tol)?;
    let mut cons = Vec::new();
    let g = gamma.basis();
    for x in &g {
        cons.push(Constraint::maps_into(x.clone(), g_full.clone()));
        cons.push(Constraint::AdjointMapsInto { gamma: x.clone(), target: g_full.clone() });
        for y in &g {
            cons.push(Constraint::Sandwich { left: Some(x.adjoint()), right: y.clone(), target: a.clone() });
        }
    }
    solve_operator_constraints(k.clone(), k, &cons, tol)
}

/// Residual of `T ∈ Ind_Γ(A)` via the slices `γ_i* T γ_j ∈ A`, relative to
/// `‖T‖`. Valid because `Ind_Γ(L(H)) = L(K)` whenever `[ΓH] = K`.
pub fn induce_membership(gammas: &[CMat], a: &OperatorSpan, t: &CMat) -> f64 {
    let scale = t.norm().max(1.0);
    let mut r = 0.0f64;
    for x in gammas {
        let xt = x.adjoint() * t;
        for y in gammas {
            r = r.max(a.distance(&(&xt * y)));
        }
    }
    r / scale
}

/// `A α∗β B` on `H α⊗β K`, with its nondegeneracy tested.
#[derive(Debug, Clone)]
pub struct FiberProduct {
    pub algebra: ConcreteAlgebra,
    /// `dim (H α⊗β K) - rank [(A∗B)(H α⊗β K)]`.
    pub degeneracy: usize,
}

impl FiberProduct {
    pub fn nondegenerate(&self) -> bool {
        self.degeneracy == 0
    }

    /// Membership residual of `t` in `A∗B`.
    pub fn membership(&self, t: &CMat) -> f64 {
        self.algebra.algebra().distance(t) / t.norm().max(1.0)
    }
}

/// `A α∗β B := Ind_{|α⟩₁}(B) ∩ Ind_{|β⟩₂}(A)`; `pair` must be `H α⊗β K`.
pub fn fiber_product(
    a: &ConcreteAlgebra,
    alpha: &Factorization,
    b: &ConcreteAlgebra,
    beta: &Factorization,
    pair: &RelativeTensorSpace,
    tol: f64,
) -> Result<FiberProduct> {
    let (ok1, r1) = span_equal(pair.left().span(), alpha.span(), tol);
    let (ok2, r2) = span_equal(pair.right().span(), beta.span(), tol);
    if !(ok1 && ok2) {
        return Err(Error::check("fiber product: pair is H α⊗β K", r1.max(r2), tol));
    }
    let ra = module_residual(a.algebra(), alpha);
    let rb = module_residual(b.algebra(), beta);
    if ra.max(rb) > tol {
        return Err(Error::check("fiber product: module properties", ra.max(rb), tol));
    }
    let k1: Vec<CMat> = (0..alpha.rank()).map(|i| pair.ket1_basis(i)).collect();
    let k2: Vec<CMat> = (0..beta.rank()).map(|j| pair.ket2_basis(j)).collect();
    let ind_b = generated(&k1, &b.algebra().basis(), pair.space().clone(), tol);
    let ind_a = generated(&k2, &a.algebra().basis(), pair.space().clone(), tol);
    let span = span_intersect(&ind_b, &ind_a, tol)?;
    let algebra = ConcreteAlgebra::new(span, tol)?;
    let degeneracy = algebra.degeneracy(tol);
    Ok(FiberProduct { algebra, degeneracy })
}

/// `γ ◁ β` as a factorization of `A∗B`, for `γ ∈ C*-fact(A_α)`.
pub fn push_left_through_fiber(
    fp: &FiberProduct,
    pair: &RelativeTensorSpace,
    a: &ConcreteAlgebra,
    gamma: &Factorization,
    tol: f64,
) -> Result<Factorization> {
    let compat = check_compatible(gamma, pair.left(), tol);
    let r = module_residual(a.algebra(), gamma);
    if !compat.compatible || r > tol {
        let worst = r.max(compat.rho_alpha_beta).max(compat.rho_beta_alpha).max(compat.commute);
        return Err(Error::check("γ ∈ C*-fact(A_α)", worst, tol));
    }
    let pushed = pair.push_left(gamma, tol)?;
    let r = module_residual(fp.algebra.algebra(), &pushed);
    if r > tol {
        return Err(Error::check("A∗B is a (γ◁β)-module", r, tol));
    }
    Ok(pushed)
}

/// `α ▷ δ` as a factorization of `A∗B`, for `δ ∈ C*-fact(B_β)`.
pub fn push_right_through_fiber(
    fp: &FiberProduct,
    pair: &RelativeTensorSpace,
    b: &ConcreteAlgebra,
    delta: &Factorization,
    tol: f64,
) -> Result<Factorization> {
    let compat = check_compatible(delta, pair.right(), tol);
    let r = module_residual(b.algebra(), delta);
    if !compat.compatible || r > tol {
        let worst = r.max(compat.rho_alpha_beta).max(compat.rho_beta_alpha).max(compat.commute);
        return Err(Error::check("δ ∈ C*-fact(B_β)", worst, tol));
    }
    let pushed = pair.push_right(delta, tol)?;
    let r = module_residual(fp.algebra.algebra(), &pushed);
    if r > tol {
        return Err(Error::check("A∗B is an (α▷δ)-module", r, tol));
    }
    Ok(pushed)
}

/// A linear map on a concrete algebra, evaluated on arbitrary elements.
pub type AlgebraMap<'a> = &'a dyn Fn(&CMat) -> Result<CMat>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MorphismReport {
    /// `π(xy) - π(x)π(y)` and `π(x*) - π(x)*` over basis pairs.
    pub homomorphism: f64,
    /// Distance of `π(A)` to the target algebra.
    pub lands_in_target: f64,
    /// `π(a ρ_α(b†)) = π(a) ρ_β(b†)`.
    pub base_compatibility: f64,
    /// `β = [L^π(H_α, K_β) α]`.
    pub intertwiner_span: f64,
    pub intertwiner_dim: usize,
    /// `[π(A)K] = K`.
    pub nondegenerate_image: bool,
    pub valid: bool,
}

fn map_residual(x: &CMat, y: &CMat) -> f64 {
    (x - y).norm() / x.norm().max(y.norm()).max(1.0)
}

/// `L^π(H_α, K_β) = {V : Vα ⊆ β, V*β ⊆ α, π(a)V = Va}`.
pub fn morphism_intertwiners(
    src: &ConcreteAlgebra,
    alpha: &Factorization,
    beta: &Factorization,
    pi: AlgebraMap<'_>,
    tol: f64,
) -> Result<OperatorSpan> {
    let mut cons = Vec::new();
    for x in alpha.basis() {
        cons.push(Constraint::maps_into(x, beta.span().clone()));
    }
    for y in beta.basis() {
        cons.push(Constraint::AdjointMapsInto { gamma: y, target: alpha.span().clone() });
    }
    for a in src.algebra().basis() {
        cons.push(Constraint::Intertwines { a: pi(&a)?, b: a });
    }
    solve_operator_constraints(alpha.target().clone(), beta.target().clone(), &cons, tol)
}

/// Checks that `π` is a morphism from `(H, A, α)` to `(K, B, β)`.
pub fn check_morphism(
    src: &ConcreteAlgebra,
    alpha: &Factorization,
    dst: &ConcreteAlgebra,
    beta: &Factorization,
    pi: AlgebraMap<'_>,
    tol: f64,
) -> Result<(MorphismReport, OperatorSpan)> {
    let basis = src.algebra().basis();
    let images: Vec<CMat> = basis.iter().map(pi).collect::<Result<_>>()?;
    let mut hom = 0.0f64;
    for (x, px) in basis.iter().zip(&images) {
        hom = hom.max(map_residual(&pi(&x.adjoint())?, &px.adjoint()));
        for (y, py) in basis.iter().zip(&images) {
            hom = hom.max(map_residual(&pi(&(x * y))?, &(px * py)));
        }
    }
    if hom > tol {
        return Err(Error::check("morphism is a *-homomorphism", hom, tol));
    }
    let lands = images.iter().map(|p| dst.algebra().distance(p) / p.norm().max(1.0)).fold(0.0, f64::max);
    let mut base_res = 0.0f64;
    for b in alpha.base().b_dag().basis() {
        let (ra, rb) = (alpha.rho(&b), beta.rho(&b));
        for (x, px) in basis.iter().zip(&images) {
            base_res = base_res.max(map_residual(&pi(&(x * &ra))?, &(px * &rb)));
        }
    }
    let l = morphism_intertwiners(src, alpha, beta, pi, tol)?;
    let mut gens = Vec::new();
    for v in l.basis() {
        for x in alpha.basis() {
            gens.push(&v * x);
        }
    }
    let la = OperatorSpan::from_matrices(beta.base().space().clone(), beta.target().clone(), gens, tol);
    let (_, intertwiner_res) = span_equal(&la, beta.span(), tol);
    let nondeg = range_rank_defect(&images, dst.space().dim(), tol) == 0;
    let valid = lands.max(base_res).max(intertwiner_res) <= tol && nondeg;
    let report = MorphismReport {
        homomorphism: hom,
        lands_in_target: lands,
        base_compatibility: base_res,
        intertwiner_span: intertwiner_res,
        intertwiner_dim: l.rank(),
        nondegenerate_image: nondeg,
        valid,
    };
    Ok((report, l))
}

/// `φ ∗ ψ` on `src = H α⊗β K`, landing in `dst = L γ⊗δ M`, determined by
/// `(φ∗ψ)(T)(X⊗Y) = (X⊗Y)T` for `X ∈ L^φ`, `Y ∈ L^ψ`.
#[derive(Debug, Clone)]
pub struct InducedMorphism {
    /// Selected `X ⊗ Y` with the source directions `W` they contribute.
    blocks: Vec<(CMat, CMat)>,
    /// `[(X ⊗ Y) W]`, square and invertible when certified.
    family: CMat,
    family_pinv: CMat,
    /// `dim dst - rank [(X⊗Y) src]`; the image is unique iff this is zero.
    pub uniqueness_defect: usize,
}

impl InducedMorphism {
    pub fn certified(&self) -> bool {
        self.uniqueness_defect == 0
    }

    pub fn blocks(&self) -> usize {
        self.blocks.len()
    }

    /// The image of `t` and the residual of the defining relation.
    pub fn apply(&self, t: &CMat) -> Result<(CMat, f64)> {
        if !self.certified() {
            return Err(Error::Invalid(format!(
                "uniqueness not certified: intertwiners miss {} dimensions",
                self.uniqueness_defect
            )));
        }
        let blocks: Vec<CMat> = self.blocks.iter().map(|(xy, w)| xy * (t * w)).collect();
        let rhs = hcat(&blocks, self.family.nrows());
        let z = &rhs * &self.family_pinv;
        let mut res = 0.0f64;
        for (xy, _) in &self.blocks {
            let lhs = &z * xy;
            let r = xy * t;
            res = res.max((lhs - &r).norm() / r.norm().max(1.0));
        }
        Ok((z, res))
    }
}

/// Picks pairs `X ⊗ Y` whose ranges fill the target and solves the defining
/// relation `Z (X ⊗ Y) = (X ⊗ Y) T` on the directions each pair adds.
///
/// A first pass only accepts directions with singular value above
/// `STURDY * |X ⊗ Y|`, which keeps the square system well conditioned; a
/// second pass at `tol` completes the coverage if needed.
pub fn induced_morphism(
    src: &RelativeTensorSpace,
    dst: &RelativeTensorSpace,
    xs: &OperatorSpan,
    ys: &OperatorSpan,
    tol: f64,
) -> Result<InducedMorphism> {
    const STURDY: f64 = 1e-3;
    let target = dst.dim();
    let mut blocks = Vec::new();
    let mut covered = CMat::zeros(target, 0);
    let (xb, yb) = (xs.basis(), ys.basis());
    let mut cache: Vec<Option<CMat>> = vec![None; xb.len() * yb.len()];
    for cutoff in [STURDY.max(tol), tol] {
        // Y runs in the outer loop so that a single identity-like Y usually suffices
        'outer: for (iy, y) in yb.iter().enumerate() {
            for (ix, x) in xb.iter().enumerate() {
                if covered.ncols() == target {
                    break 'outer;
                }
                let slot = &mut cache[iy * xb.len() + ix];
                if slot.is_none() {
                    *slot = Some(src.tensor_op(dst, x, y, tol)?);
                }
                let xy = slot.as_ref().expect("filled");
                let mut rest = xy - &covered * (covered.adjoint() * xy);
                rest -= &covered * (covered.adjoint() * &rest);
                let svd = crate::decomp::svd(&rest);
                let (u, vt) = (svd.u, svd.vt);
                let bar = cutoff * xy.norm().max(1.0);
                let keep: Vec<usize> = (0..svd.s.len()).filter(|&i| svd.s[i] > bar).collect();
                if keep.is_empty() {
                    continue;
                }
                let fresh = u.select_columns(&keep);
                let w = vt.select_rows(&keep).adjoint();
                let mut grown = CMat::zeros(target, covered.ncols() + fresh.ncols());
                grown.columns_mut(0, covered.ncols()).copy_from(&covered);
                grown.columns_mut(covered.ncols(), fresh.ncols()).copy_from(&fresh);
                covered = grown;
                blocks.push((xy.clone(), w));
            }
        }
    }
    let family = hcat(&blocks.iter().map(|(xy, w)| xy * w).collect::<Vec<_>>(), target);
    let family_pinv = crate::linalg::pinv(&family, tol);
    Ok(InducedMorphism { blocks, family, family_pinv, uniqueness_defect: target - covered.ncols() })
}

/// One leg in the Hopf audit: `(H, A, α, β)` with `Δ: A → A α∗β A`.
pub struct HopfInput<'a> {
    pub algebra: &'a ConcreteAlgebra,
    pub alpha: &'a Factorization,
    pub beta: &'a Factorization,
    /// `H α⊗β H`.
    pub pair: &'a RelativeTensorSpace,
    pub delta: AlgebraMap<'a>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfReport {
    pub algebra_dim: usize,
    pub fiber_dim: usize,
    /// The fiber product is nondegenerate and contains `Δ(A)`.
    pub nondegenerate: bool,
    pub delta_in_fiber: f64,
    /// `Δ` as a morphism for the first and second factorization.
    pub morphism_alpha: MorphismReport,
    pub morphism_beta: MorphismReport,
    /// `Θ (Δ∗Id)Δ(a) Θ* = (Id∗Δ)Δ(a)`.
    pub coassociativity: f64,
    /// Both sides lie in both bracketings of the triple fiber product.
    pub triple_containment: f64,
    /// `⟨η|₂ (Δ∗Id)(T) |η'⟩₂ = Δ(⟨η|₂ T |η'⟩₂)`.
    pub slice_identity: f64,
    /// Residual of the defining relation of the induced maps.
    pub induced_residual: f64,
    pub uniqueness_certified: bool,
    pub passed: bool,
}

/// Audits a concrete Hopf C*-bimodule: `Δ` must be a morphism into the
/// nondegenerate fiber product and coassociative.
pub fn check_hopf_bimodule(input: &HopfInput<'_>, tol: f64) -> Result<HopfReport> {
    let HopfInput { algebra: a, alpha, beta, pair, delta } = *input;
    let fp = fiber_product(a, alpha, a, beta, pair, tol)?;
    let basis = a.algebra().basis();
    let images: Vec<CMat> = basis.iter().map(delta).collect::<Result<_>>()?;
    let delta_in_fiber = images.iter().map(|t| fp.membership(t)).fold(0.0, f64::max);

    let aa = alpha_alpha(pair, alpha, tol)?;
    let bb = pair.push_left(beta, tol)?;
    let fp_alg = fp.algebra.clone();
    let (m_alpha, l_alpha) = check_morphism(a, alpha, &fp_alg, &aa, delta, tol)?;
    let (m_beta, l_beta) = check_morphism(a, beta, &fp_alg, &bb, delta, tol)?;

    // (Δ∗Id) into (A∗A)∗A on (H⊗H)⊗H, (Id∗Δ) into A∗(A∗A) on H⊗(H⊗H)
    let ll = build_rtp("(HH)H", &aa, pair.right(), tol)?;
    let rr = build_rtp("H(HH)", pair.left(), &bb, tol)?;
    let theta = associator(pair, pair, &ll, &rr, tol)?;
    let id_h = identity_commutant(a, beta, tol)?;
    let id_h_left = identity_commutant(a, alpha, tol)?;
    let left_map = induced_morphism(pair, &ll, &l_alpha, &id_h, tol)?;
    let right_map = induced_morphism(pair, &rr, &id_h_left, &l_beta, tol)?;
    let certified = left_map.certified() && right_map.certified();

    let (mut coassoc, mut contain, mut slices, mut induced) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    if certified {
        let ll_k1: Vec<CMat> = (0..aa.rank()).map(|i| ll.ket1_basis(i)).collect();
        let ll_k2: Vec<CMat> = (0..beta.rank()).map(|j| ll.ket2_basis(j)).collect();
        let rr_k1: Vec<CMat> = (0..alpha.rank()).map(|i| rr.ket1_basis(i)).collect();
        let rr_k2: Vec<CMat> = (0..bb.rank()).map(|j| rr.ket2_basis(j)).collect();
        let p_k2: Vec<CMat> = (0..beta.rank()).map(|j| pair.ket2_basis(j)).collect();
        let fa = fp.algebra.algebra();
        for t in &images {
            let (z1, r1) = left_map.apply(t)?;
            let (z2, r2) = right_map.apply(t)?;
            induced = induced.max(r1).max(r2);
            let z1r = &theta * &z1 * theta.adjoint();
            coassoc = coassoc.max((&z1r - &z2).norm() / z2.norm().max(1.0));
            let z2l = theta.adjoint() * &z2 * &theta;
            for z in [&z1, &z2l] {
                contain = contain.max(induce_membership(&ll_k1, a.algebra(), z)).max(induce_membership(&ll_k2, fa, z));
            }
            for z in [&z1r, &z2] {
                contain = contain.max(induce_membership(&rr_k1, fa, z)).max(induce_membership(&rr_k2, a.algebra(), z));
            }
            for (i, ki) in ll_k2.iter().enumerate() {
                for (j, kj) in ll_k2.iter().enumerate() {
                    let lhs = ki.adjoint() * &z1 * kj;
                    let rhs = delta(&(p_k2[i].adjoint() * t * &p_k2[j]))?;
                    slices = slices.max(map_residual(&lhs, &rhs));
                }
            }
        }
    }
    let passed = fp.nondegenerate()
        && delta_in_fiber <= tol
        && m_alpha.valid
        && m_beta.valid
        && certified
        && coassoc.max(contain).max(slices).max(induced) <= tol;
    Ok(HopfReport {
        algebra_dim: a.dim(),
        fiber_dim: fp.algebra.dim(),
        nondegenerate: fp.nondegenerate(),
        delta_in_fiber,
        morphism_alpha: m_alpha,
        morphism_beta: m_beta,
        coassociativity: coassoc,
        triple_containment: contain,
        slice_identity: slices,
        induced_residual: induced,
        uniqueness_certified: certified,
        passed,
    })
}

/// `α ▷ α` on `H α⊗β H`.
fn alpha_alpha(pair: &RelativeTensorSpace, alpha: &Factorization, tol: f64) -> Result<Factorization> {
    pair.push_right(alpha, tol)
}

/// `L^Id(H_γ, H_γ)`: the intertwiners of the identity morphism.
fn identity_commutant(a: &ConcreteAlgebra, gamma: &Factorization, tol: f64) -> Result<OperatorSpan> {
    let id = |x: &CMat| Ok(x.clone());
    morphism_intertwiners(a, gamma, gamma, &id, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, DEFAULT_TOL};

    const TOL: f64 = DEFAULT_TOL;

    fn e(i: usize, j: usize, n: usize) -> CMat {
        let mut m = CMat::zeros(n, n);
        m[(i, j)] = c(1.0);
        m
    }

    #[test]
    fn identity_gamma_induces_itself() {
        let h = HilbertSpace::euclidean("H", 2).unwrap();
        let gamma = OperatorSpan::from_matrices(h.clone(), h.clone(), vec![CMat::identity(2, 2)], TOL);
        let a = OperatorSpan::from_matrices(h.clone(), h.clone(), vec![e(0, 0, 2), e(1, 1, 2)], TOL);
        let ind = induce(&gamma, &a, TOL).unwrap();
        assert!(span_equal(&ind, &a, TOL).0);
        assert!(span_equal(&induce_generated(&gamma, &a, TOL).unwrap(), &a, TOL).0);
        assert!(span_equal(&induce_sandwich(&gamma, &a, TOL).unwrap(), &a, TOL).0);
    }

    #[test]
    fn non_algebra_rejected() {
        let h = HilbertSpace::euclidean("H", 2).unwrap();
        let s = OperatorSpan::from_matrices(h.clone(), h, vec![e(0, 1, 2)], TOL);
        assert!(ConcreteAlgebra::new(s, TOL).is_err());
    }

    #[test]
    fn gamma_must_fill_k() {
        let h = HilbertSpace::euclidean("H", 1).unwrap();
        let k = HilbertSpace::euclidean("K", 2).unwrap();
        let mut v = CMat::zeros(2, 1);
        v[(0, 0)] = c(1.0);
        let gamma = OperatorSpan::from_matrices(h.clone(), k, vec![v], TOL);
        let a = OperatorSpan::full(h.clone(), h);
        assert!(matches!(induce(&gamma, &a, TOL), Err(Error::Check { .. })));
    }
}
