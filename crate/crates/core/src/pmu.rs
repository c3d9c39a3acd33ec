//! C*-pseudo-multiplicative unitaries `V: H β̂⊗α H → H α⊗β H`: axioms,
//! opposite, regularity, legs and comultiplications.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::cstar_base::{check_compatible, hcat, range_rank_defect, star_algebra_residual, CStarBase, Factorization};
use crate::error::{Error, Result};
use crate::fiber::{check_hopf_bimodule, ConcreteAlgebra, HopfInput, HopfReport};
use crate::linalg::{op_norm, span_equal, unitarity_defect, CMat, HilbertSpace, OperatorSpan};
use crate::rtp::{associator, build_rtp, flip, solve_unitary, RelativeTensorSpace, TensorCase};

/// The data a candidate unitary is defined on: `α` over the base, `β̂` and
/// `β` over the opposite base, and the two relative tensor products.
#[derive(Debug, Clone)]
pub struct UnitarySetting {
    base: CStarBase,
    alpha: Factorization,
    beta_hat: Factorization,
    beta: Factorization,
    /// `H β̂⊗α H`
    source: RelativeTensorSpace,
    /// `H α⊗β H`
    range: RelativeTensorSpace,
}

impl UnitarySetting {
    pub fn new(alpha: &Factorization, beta_hat: &Factorization, beta: &Factorization, tol: f64) -> Result<Self> {
        let h = alpha.target();
        if !HilbertSpace::same(h, beta_hat.target()) || !HilbertSpace::same(h, beta.target()) {
            return Err(Error::Shape("α, β̂, β must factorize the same space".into()));
        }
        let base = alpha.base().clone();
        let op = base.opposite();
        if !beta_hat.base().same_as(&op, tol) || !beta.base().same_as(&op, tol) {
            return Err(Error::Shape("β̂ and β must be factorizations over the opposite base".into()));
        }
        for (name, x, y) in [("α ⊥ β̂", alpha, beta_hat), ("α ⊥ β", alpha, beta), ("β̂ ⊥ β", beta_hat, beta)]
        {
            let rep = check_compatible(x, y, tol);
            if !rep.compatible {
                return Err(Error::check(name, rep.rho_alpha_beta.max(rep.rho_beta_alpha).max(rep.commute), tol));
            }
        }
        let source = build_rtp("Hβ̂⊗αH", beta_hat, alpha, tol)?;
        let range = build_rtp("Hα⊗βH", alpha, beta, tol)?;
        Ok(UnitarySetting { base, alpha: alpha.clone(), beta_hat: beta_hat.clone(), beta: beta.clone(), source, range })
    }

    pub fn base(&self) -> &CStarBase {
        &self.base
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        self.alpha.target()
    }

    pub fn alpha(&self) -> &Factorization {
        &self.alpha
    }

    pub fn beta_hat(&self) -> &Factorization {
        &self.beta_hat
    }

    pub fn beta(&self) -> &Factorization {
        &self.beta
    }

    pub fn source(&self) -> &RelativeTensorSpace {
        &self.source
    }

    pub fn range(&self) -> &RelativeTensorSpace {
        &self.range
    }

    /// Wraps `v: H β̂⊗α H → H α⊗β H` as an unverified candidate.
    pub fn candidate(&self, v: CMat) -> Result<PseudoMultiplicativeUnitary> {
        if v.nrows() != self.range.dim() || v.ncols() != self.source.dim() {
            return Err(Error::Shape(format!(
                "V must be {}x{}, got {}x{}",
                self.range.dim(),
                self.source.dim(),
                v.nrows(),
                v.ncols()
            )));
        }
        Ok(PseudoMultiplicativeUnitary {
            setting: self.clone(),
            v,
            pentagon: Arc::new(OnceLock::new()),
            report: OnceLock::new(),
        })
    }
}

/// The spaces and V-independent unitaries of the pentagon diagram.
///
/// `L*` are left-bracketed triple products, `R*` right-bracketed ones:
/// `L1 = (Hβ̂⊗αH)⊗H`, `L2 = (Hα⊗βH)⊗H` (after `V⊗1`), `L3 = (Hβ̂⊗αH)⊗H`
/// over `β̂▷β`, `L4 = (Hα⊗βH)⊗H` over `β̂◁β`, `L5 = (Hβ̂⊗αH)⊗H` over `α◁α`,
/// `L6 = (Hα⊗βH)⊗H` over `α▷α`.
#[derive(Debug)]
pub struct PentagonSpaces {
    pub flipped: RelativeTensorSpace,
    pub l1: RelativeTensorSpace,
    pub l2: RelativeTensorSpace,
    pub l3: RelativeTensorSpace,
    pub l4: RelativeTensorSpace,
    pub l5: RelativeTensorSpace,
    pub l6: RelativeTensorSpace,
    pub r1: RelativeTensorSpace,
    pub r2: RelativeTensorSpace,
    pub r3: RelativeTensorSpace,
    pub ra: RelativeTensorSpace,
    pub rb: RelativeTensorSpace,
    pub theta_l1: CMat,
    pub theta_l2: CMat,
    pub theta_l3: CMat,
    pub theta_l6: CMat,
    /// `Σ: H α⊗β H → H β⊗α H`.
    pub sigma: CMat,
    /// `(ζ⊲ξ)⊲η ↦ (ζ⊲η)⊲ξ`, `L4 → L5`.
    pub sigma23: CMat,
    /// The four factorization pairs of the intertwining laws, source side
    /// then range side.
    pub laws: Vec<(&'static str, Factorization, Factorization)>,
}

impl PentagonSpaces {
    pub fn build(s: &UnitarySetting, tol: f64) -> Result<Self> {
        let (a, bh, b) = (&s.alpha, &s.beta_hat, &s.beta);
        let (src, rng) = (&s.source, &s.range);
        let src_aa = src.push_left(a, tol)?; // α◁α
        let src_bhb = src.push_right(b, tol)?; // β̂▷β
        let src_bhbh = src.push_right(bh, tol)?; // β̂▷β̂
        let src_ba = src.push_left(b, tol)?; // β◁α
        let rng_aa = rng.push_right(a, tol)?; // α▷α
        let rng_bhb = rng.push_left(bh, tol)?; // β̂◁β
        let rng_abh = rng.push_right(bh, tol)?; // α▷β̂
        let rng_bb = rng.push_left(b, tol)?; // β◁β
        let flipped = build_rtp("Hβ⊗αH", b, a, tol)?;
        let fl_aa = flipped.push_left(a, tol)?;

        let l1 = build_rtp("L1", &src_bhbh, a, tol)?;
        let l2 = build_rtp("L2", &rng_abh, a, tol)?;
        let l3 = build_rtp("L3", &src_bhb, a, tol)?;
        let l4 = build_rtp("L4", &rng_bhb, a, tol)?;
        let l5 = build_rtp("L5", &src_aa, b, tol)?;
        let l6 = build_rtp("L6", &rng_aa, b, tol)?;
        let r1 = build_rtp("R1", bh, &src_aa, tol)?;
        let r2 = build_rtp("R2", bh, &rng_aa, tol)?;
        let r3 = build_rtp("R3", bh, &fl_aa, tol)?;
        let ra = build_rtp("RA", a, &src_ba, tol)?;
        let rb = build_rtp("RB", a, &rng_bb, tol)?;

        let theta_l1 = associator(src, src, &l1, &r1, tol)?;
        let theta_l2 = associator(rng, src, &l2, &ra, tol)?;
        let theta_l3 = associator(src, &flipped, &l3, &r3, tol)?;
        let theta_l6 = associator(rng, rng, &l6, &rb, tol)?;
        let sigma = flip(rng, &flipped, tol)?;

        let mut dom = Vec::new();
        let mut cod = Vec::new();
        for eta in a.basis() {
            let k4 = l4.ket2(&eta, tol)?;
            let ks = src.ket2(&eta, tol)?;
            for xi in b.basis() {
                dom.push(&k4 * rng.ket2(&xi, tol)?);
                cod.push(l5.ket2(&xi, tol)? * &ks);
            }
        }
        let sigma23 = solve_unitary(&hcat(&dom, l4.dim()), &hcat(&cod, l5.dim()), "Σ₂₃", tol)?;

        let laws = vec![
            ("V(α◁α) = α▷α", src_aa, rng_aa),
            ("V(β̂▷β) = β̂◁β", src_bhb, rng_bhb),
            ("V(β̂▷β̂) = α▷β̂", src_bhbh, rng_abh),
            ("V(β◁α) = β◁β", src_ba, rng_bb),
        ];
        Ok(PentagonSpaces {
            flipped,
            l1,
            l2,
            l3,
            l4,
            l5,
            l6,
            r1,
            r2,
            r3,
            ra,
            rb,
            theta_l1,
            theta_l2,
            theta_l3,
            theta_l6,
            sigma,
            sigma23,
            laws,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PmuReport {
    pub source_dim: usize,
    pub range_dim: usize,
    pub unitarity: f64,
    /// One residual per intertwining law, in the order of [`PmuReport::LAWS`].
    pub intertwining: Vec<f64>,
    /// Operator norm of the difference of both pentagon paths.
    pub pentagon: f64,
    pub triple_dim: usize,
    pub passed: bool,
}

impl PmuReport {
    pub const LAWS: [&'static str; 4] = ["V(α◁α) = α▷α", "V(β̂▷β) = β̂◁β", "V(β̂▷β̂) = α▷β̂", "V(β◁α) = β◁β"];
}

#[derive(Debug, Clone)]
pub struct PseudoMultiplicativeUnitary {
    setting: UnitarySetting,
    v: CMat,
    pentagon: Arc<OnceLock<PentagonSpaces>>,
    report: OnceLock<PmuReport>,
}

/// The two paths of the pentagon, both `L1 → L6`.
struct Paths {
    a: CMat,
    b: CMat,
    /// `V₁₃V₂₃: L1 → L5`, the prefix of path B before the final `V⊗1`.
    v13_v23: CMat,
}

impl PseudoMultiplicativeUnitary {
    pub fn setting(&self) -> &UnitarySetting {
        &self.setting
    }

    pub fn matrix(&self) -> &CMat {
        &self.v
    }

    pub fn report(&self) -> Option<&PmuReport> {
        self.report.get()
    }

    pub fn pentagon_spaces(&self, tol: f64) -> Result<&PentagonSpaces> {
        if let Some(p) = self.pentagon.get() {
            return Ok(p);
        }
        let p = PentagonSpaces::build(&self.setting, tol)?;
        Ok(self.pentagon.get_or_init(|| p))
    }

    fn paths(&self, tol: f64) -> Result<Paths> {
        let p = self.pentagon_spaces(tol)?;
        let v = &self.v;
        let id = CMat::identity(self.setting.space().dim(), self.setting.space().dim());
        let arrow = |name: &str, src: &RelativeTensorSpace, dst: &RelativeTensorSpace, s: &CMat, t: &CMat, case| {
            src.tensor_op_case(dst, s, t, case, tol).map_err(|e| match e {
                Error::Check { what, residual, tol } => {
                    Error::Check { what: format!("pentagon arrow {name}: {what}"), residual, tol }
                }
                other => other,
            })
        };
        use TensorCase::{LeftModule, RightModule};
        let v12_l1 = arrow("V⊗1 on L1", &p.l1, &p.l2, v, &id, LeftModule)?;
        let v23_ra = arrow("1⊗V on RA", &p.ra, &p.rb, &id, v, RightModule)?;
        let v23_r1 = arrow("1⊗V on R1", &p.r1, &p.r2, &id, v, RightModule)?;
        let id_sigma = arrow("1⊗Σ on R2", &p.r2, &p.r3, &id, &p.sigma, RightModule)?;
        let v12_l3 = arrow("V⊗1 on L3", &p.l3, &p.l4, v, &id, LeftModule)?;
        let v12_l5 = arrow("V⊗1 on L5", &p.l5, &p.l6, v, &id, LeftModule)?;

        let a = p.theta_l6.adjoint() * v23_ra * &p.theta_l2 * v12_l1;
        let v13_v23 = &p.sigma23 * v12_l3 * p.theta_l3.adjoint() * id_sigma * v23_r1 * &p.theta_l1;
        let b = v12_l5 * &v13_v23;
        Ok(Paths { a, b, v13_v23 })
    }

    /// Composes both paths of the pentagon and returns their difference in
    /// operator norm.
    pub fn pentagon_residual(&self, tol: f64) -> Result<f64> {
        let paths = self.paths(tol)?;
        Ok(op_norm(&(paths.a - paths.b)))
    }

    /// `V₁₃V₂₃: L1 → L5`.
    pub fn v13_v23(&self, tol: f64) -> Result<CMat> {
        Ok(self.paths(tol)?.v13_v23)
    }

    fn require_verified(&self) -> Result<&PmuReport> {
        match self.report.get() {
            Some(r) if r.passed => Ok(r),
            _ => Err(Error::Invalid("V has not passed check_pmu".into())),
        }
    }

    /// Runs [`check_pmu`] and caches the report; fails if any axiom fails.
    pub fn verify(&self, tol: f64) -> Result<&PmuReport> {
        let r = match self.report.get() {
            Some(r) => r,
            None => {
                let r = check_pmu(self, tol)?;
                self.report.get_or_init(|| r)
            }
        };
        if r.passed {
            Ok(r)
        } else {
            let worst = r.intertwining.iter().fold(r.unitarity.max(r.pentagon), |m, x| m.max(*x));
            Err(Error::check("C*-pseudo-multiplicative unitary axioms", worst, tol))
        }
    }
}

/// Unitarity, the four intertwining laws and the pentagon.
pub fn check_pmu(v: &PseudoMultiplicativeUnitary, tol: f64) -> Result<PmuReport> {
    let unitarity = unitarity_defect(&v.v);
    let p = v.pentagon_spaces(tol)?;
    let s = &v.setting;
    let mut intertwining = Vec::new();
    for (_, from, to) in &p.laws {
        let pushed = from.span().map_span(s.base.space().clone(), s.range.space().clone(), tol, |x| &v.v * x);
        // compare in the target's coordinates, with the factorization base of `to`
        let (_, r) = span_equal(&pushed, to.span(), tol);
        intertwining.push(r);
    }
    let pentagon = v.pentagon_residual(tol)?;
    let passed = unitarity <= tol && intertwining.iter().all(|r| *r <= tol) && pentagon <= tol;
    Ok(PmuReport {
        source_dim: s.source.dim(),
        range_dim: s.range.dim(),
        unitarity,
        intertwining,
        pentagon,
        triple_dim: p.l1.dim(),
        passed,
    })
}

/// `V^op = ΣV*Σ: H β⊗α H → H α⊗β̂ H`, with `β` and `β̂` exchanged.
pub fn opposite(v: &PseudoMultiplicativeUnitary, tol: f64) -> Result<PseudoMultiplicativeUnitary> {
    let s = &v.setting;
    let op = UnitarySetting::new(&s.alpha, &s.beta, &s.beta_hat, tol)?;
    let into_range = flip(&op.source, &s.range, tol)?;
    let out_of_source = flip(&s.source, &op.range, tol)?;
    op.candidate(out_of_source * v.v.adjoint() * into_range)
}

/// `V^op` against `V`: its legs are the adjoint legs of `V` and both are
/// regular or neither is.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OppositeReport {
    pub pmu: PmuReport,
    /// `Â(V^op) = A(V)*`.
    pub hat_vs_a_star: f64,
    /// `A(V^op) = Â(V)*`.
    pub a_vs_hat_star: f64,
    pub regular: bool,
    pub regular_op: bool,
    pub passed: bool,
}

pub fn check_opposite(v: &PseudoMultiplicativeUnitary, tol: f64) -> Result<OppositeReport> {
    let op = opposite(v, tol)?;
    let pmu = check_pmu(&op, tol)?;
    let _ = op.report.set(pmu.clone());
    let (_, hat_vs_a_star) = span_equal(&leg_hat_span(&op, tol), &leg_a_span(v, tol).adjoint(), tol);
    let (_, a_vs_hat_star) = span_equal(&leg_a_span(&op, tol), &leg_hat_span(v, tol).adjoint(), tol);
    let regular = check_regular(v, tol)?.regular;
    let regular_op = pmu.passed && check_regular(&op, tol)?.regular;
    let passed = pmu.passed && hat_vs_a_star.max(a_vs_hat_star) <= tol && regular == regular_op;
    Ok(OppositeReport { pmu, hat_vs_a_star, a_vs_hat_star, regular, regular_op, passed })
}

/// Unitary identifying two models of the same relative tensor product, built
/// from the same factorizations.
pub fn identify_models(a: &RelativeTensorSpace, b: &RelativeTensorSpace, tol: f64) -> Result<CMat> {
    solve_unitary(a.left_family(), b.left_family(), "model identification", tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityReport {
    pub c_dim: usize,
    pub alpha_alpha_dim: usize,
    pub residual: f64,
    /// `[CC] ⊆ C`.
    pub c_multiplicative: f64,
    pub regular: bool,
}

fn leg_span(h: &Arc<HilbertSpace>, left: &[CMat], v: &CMat, right: &[CMat], tol: f64) -> OperatorSpan {
    let mut gens = Vec::with_capacity(left.len() * right.len());
    for l in left {
        let lv = l.adjoint() * v;
        for r in right {
            gens.push(&lv * r);
        }
    }
    OperatorSpan::from_matrices(h.clone(), h.clone(), gens, tol)
}

fn kets1(t: &RelativeTensorSpace) -> Vec<CMat> {
    (0..t.left().rank()).map(|i| t.ket1_basis(i)).collect()
}

fn kets2(t: &RelativeTensorSpace) -> Vec<CMat> {
    (0..t.right().rank()).map(|j| t.ket2_basis(j)).collect()
}

/// `Â(V) = [⟨β|₂ V |α⟩₂]` as a plain span.
pub fn leg_hat_span(v: &PseudoMultiplicativeUnitary, tol: f64) -> OperatorSpan {
    let s = &v.setting;
    leg_span(s.space(), &kets2(&s.range), &v.v, &kets2(&s.source), tol)
}

/// `A(V) = [⟨α|₁ V |β̂⟩₁]` as a plain span.
pub fn leg_a_span(v: &PseudoMultiplicativeUnitary, tol: f64) -> OperatorSpan {
    let s = &v.setting;
    leg_span(s.space(), &kets1(&s.range), &v.v, &kets1(&s.source), tol)
}

/// `C = [⟨α|₁ V |α⟩₂]`.
pub fn algebra_c(v: &PseudoMultiplicativeUnitary, tol: f64) -> OperatorSpan {
    let s = &v.setting;
    leg_span(s.space(), &kets1(&s.range), &v.v, &kets2(&s.source), tol)
}

/// `[αα*]`.
pub fn alpha_alpha_star(alpha: &Factorization, tol: f64) -> OperatorSpan {
    let xs = alpha.basis();
    let mut gens = Vec::with_capacity(xs.len() * xs.len());
    for x in &xs {
        for y in &xs {
            gens.push(x * y.adjoint());
        }
    }
    let h = alpha.target().clone();
    OperatorSpan::from_matrices(h.clone(), h, gens, tol)
}

pub fn check_regular(v: &PseudoMultiplicativeUnitary, tol: f64) -> Result<RegularityReport> {
    v.require_verified()?;
    let c = algebra_c(v, tol);
    let aa = alpha_alpha_star(&v.setting.alpha, tol);
    let (regular, residual) = span_equal(&c, &aa, tol);
    Ok(RegularityReport {
        c_dim: c.rank(),
        alpha_alpha_dim: aa.rank(),
        residual,
        c_multiplicative: product_residual(&c),
        regular,
    })
}

fn product_residual(a: &OperatorSpan) -> f64 {
    let b = a.basis();
    let mut r = 0.0f64;
    for x in &b {
        for y in &b {
            r = r.max(a.distance(&(x * y)));
        }
    }
    r
}

/// Structural properties of a leg checked on construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegReport {
    pub dim: usize,
    /// `[XX] ⊆ X`.
    pub multiplicative: f64,
    /// `X* = X` (only expected for regular `V`).
    pub star: f64,
    /// The four module spans `[Xρ(𝔅)]`, `[ρ(𝔅)X]`, … equal `X`.
    pub modules: f64,
    /// `X ⊆ L(H_γ)` for both `γ = β` and `γ = β̂`.
    pub adjointable: f64,
    /// `[Xγ] = γ = [X*γ]`.
    pub strong_nondegeneracy: f64,
    /// `dim H - rank [XH]`.
    pub degeneracy: usize,
}

fn rho_products(x: &OperatorSpan, f: &Factorization, tol: f64) -> f64 {
    let rho: Vec<CMat> = f.base().b_dag().basis().iter().map(|b| f.rho(b)).collect();
    let h = x.dom().clone();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for a in x.basis() {
        for r in &rho {
            left.push(r * &a);
            right.push(&a * r);
        }
    }
    let l = OperatorSpan::from_matrices(h.clone(), h.clone(), left, tol);
    let r = OperatorSpan::from_matrices(h.clone(), h, right, tol);
    span_equal(&l, x, tol).1.max(span_equal(&r, x, tol).1)
}

/// Largest distance of `Tγ` and `T*γ` to `γ` over the bases.
fn adjointable_residual(x: &OperatorSpan, f: &Factorization) -> f64 {
    let mut r = 0.0f64;
    for t in x.basis() {
        let ta = t.adjoint();
        for g in f.basis() {
            r = r.max(f.span().distance(&(&t * &g))).max(f.span().distance(&(&ta * &g)));
        }
    }
    r
}

fn strong_nondegeneracy(x: &OperatorSpan, f: &Factorization, tol: f64) -> f64 {
    let mut gens = Vec::new();
    let mut gens_star = Vec::new();
    for t in x.basis() {
        for g in f.basis() {
            gens.push(&t * &g);
            gens_star.push(t.adjoint() * &g);
        }
    }
    let d = f.base().space().clone();
    let h = f.target().clone();
    let a = OperatorSpan::from_matrices(d.clone(), h.clone(), gens, tol);
    let b = OperatorSpan::from_matrices(d, h, gens_star, tol);
    span_equal(&a, f.span(), tol).1.max(span_equal(&b, f.span(), tol).1)
}

fn leg_report(x: &OperatorSpan, s: &UnitarySetting, nondeg: &Factorization, tol: f64) -> LegReport {
    let modules =
        rho_products(x, &s.beta_hat, tol).max(rho_products(x, &s.alpha, tol)).max(rho_products(x, &s.beta, tol));
    LegReport {
        dim: x.rank(),
        multiplicative: product_residual(x),
        star: star_algebra_residual(x),
        modules,
        adjointable: adjointable_residual(x, &s.beta).max(adjointable_residual(x, &s.beta_hat)),
        strong_nondegeneracy: strong_nondegeneracy(x, nondeg, tol),
        degeneracy: range_rank_defect(&x.basis(), s.space().dim(), tol),
    }
}

/// `Â(V)` as a concrete algebra with `β̂` and `α` attached.
pub fn leg_hat(v: &PseudoMultiplicativeUnitary, tol: f64) -> Result<(ConcreteAlgebra, LegReport)> {
    v.require_verified()?;
    let s = &v.setting;
    let x = leg_hat_span(v, tol);
    let rep = leg_report(&x, s, &s.beta, tol);
    let alg = ConcreteAlgebra::new(x, tol)?
        .with_factorization("β̂", &s.beta_hat, tol)?
        .with_factorization("α", &s.alpha, tol)?;
    Ok((alg, rep))
}

/// `A(V)` as a concrete algebra with `α` and `β` attached.
pub fn leg_a(v: &PseudoMultiplicativeUnitary, tol: f64) -> Result<(ConcreteAlgebra, LegReport)> {
    v.require_verified()?;
    let s = &v.setting;
    let x = leg_a_span(v, tol);
    let rep = leg_report(&x, s, &s.beta_hat, tol);
    let alg =
        ConcreteAlgebra::new(x, tol)?.with_factorization("α", &s.alpha, tol)?.with_factorization("β", &s.beta, tol)?;
    Ok((alg, rep))
}

/// `Δ̂(y) = V*(1 ⊗ y)V` on `H β̂⊗α H`, for `y ∈ ρ_β(𝔅)'`.
pub fn delta_hat(v: &PseudoMultiplicativeUnitary, y: &CMat, tol: f64) -> Result<CMat> {
    let s = &v.setting;
    let id = CMat::identity(s.space().dim(), s.space().dim());
    let one_y = s.range.tensor_op_case(&s.range, &id, y, TensorCase::LeftModule, tol)?;
    Ok(v.v.adjoint() * one_y * &v.v)
}

/// `Δ(z) = V(z ⊗ 1)V*` on `H α⊗β H`, for `z ∈ ρ_β̂(𝔅)'`.
pub fn delta(v: &PseudoMultiplicativeUnitary, z: &CMat, tol: f64) -> Result<CMat> {
    let s = &v.setting;
    let id = CMat::identity(s.space().dim(), s.space().dim());
    let z_one = s.source.tensor_op_case(&s.source, z, &id, TensorCase::RightModule, tol)?;
    Ok(&v.v * z_one * v.v.adjoint())
}

/// The four base-transport laws of the comultiplications.
pub fn delta_transport_residual(v: &PseudoMultiplicativeUnitary, tol: f64) -> Result<f64> {
    let s = &v.setting;
    let src_aa = s.source.push_left(&s.alpha, tol)?;
    let src_bhbh = s.source.push_right(&s.beta_hat, tol)?;
    let rng_bb = s.range.push_left(&s.beta, tol)?;
    let rng_aa = s.range.push_right(&s.alpha, tol)?;
    let mut r = 0.0f64;
    for b in s.base.b_dag().basis() {
        r = r.max((delta_hat(v, &s.alpha.rho(&b), tol)? - src_aa.rho(&b)).norm());
        r = r.max((delta(v, &s.alpha.rho(&b), tol)? - rng_aa.rho(&b)).norm());
    }
    for b in s.base.b().basis() {
        r = r.max((delta_hat(v, &s.beta_hat.rho(&b), tol)? - src_bhbh.rho(&b)).norm());
        r = r.max((delta(v, &s.beta.rho(&b), tol)? - rng_bb.rho(&b)).norm());
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfAudit {
    pub regularity: RegularityReport,
    pub hat: HopfReport,
    pub a: HopfReport,
    /// `Δ̂(⟨η|₂V|ξ⟩₂) = ⟨η|₃ V₁₃V₂₃ |ξ⟩₃`.
    pub legs_delta: f64,
    /// `[Δ̂(Â)|α⟩₂] = [|α⟩₂Â]` and `[Δ̂(Â)*|β̂⟩₁] = [|β̂⟩₁Â*]`.
    pub hat_slices: f64,
    pub transport: f64,
    pub passed: bool,
}

/// Audits both legs as concrete Hopf C*-bimodules; needs a regular `V`.
pub fn verify_hopf(v: &PseudoMultiplicativeUnitary, tol: f64) -> Result<HopfAudit> {
    let regularity = check_regular(v, tol)?;
    if !regularity.regular {
        return Err(Error::Invalid(format!(
            "V is not regular (residual {:.3e}); see check_regular",
            regularity.residual
        )));
    }
    let s = &v.setting;
    let (a_hat, _) = leg_hat(v, tol)?;
    let (a_leg, _) = leg_a(v, tol)?;
    let dh = |y: &CMat| delta_hat(v, y, tol);
    let d = |z: &CMat| delta(v, z, tol);
    let hat = check_hopf_bimodule(
        &HopfInput { algebra: &a_hat, alpha: &s.beta_hat, beta: &s.alpha, pair: &s.source, delta: &dh },
        tol,
    )?;
    let a = check_hopf_bimodule(
        &HopfInput { algebra: &a_leg, alpha: &s.alpha, beta: &s.beta, pair: &s.range, delta: &d },
        tol,
    )?;

    let p = v.pentagon_spaces(tol)?;
    let prefix = v.v13_v23(tol)?;
    let mut legs_delta = 0.0f64;
    let src_k2 = kets2(&s.source);
    let rng_k2 = kets2(&s.range);
    for (i, ki) in src_k2.iter().enumerate() {
        let k3 = p.l1.ket2_basis(i);
        let lifted = &prefix * k3;
        for (j, kj) in rng_k2.iter().enumerate() {
            let a = kj.adjoint() * &v.v * ki;
            let lhs = delta_hat(v, &a, tol)?;
            let rhs = p.l5.ket2_basis(j).adjoint() * &lifted;
            legs_delta = legs_delta.max((lhs - rhs).norm());
        }
    }

    let hat_basis = a_hat.algebra().basis();
    let images: Vec<CMat> = hat_basis.iter().map(|x| delta_hat(v, x, tol)).collect::<Result<_>>()?;
    let src_k1 = kets1(&s.source);
    let (mut l1, mut r1, mut l2, mut r2) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (x, dx) in hat_basis.iter().zip(&images) {
        for k in &src_k2 {
            l1.push(dx * k);
            r1.push(k * x);
        }
        for k in &src_k1 {
            l2.push(dx.adjoint() * k);
            r2.push(k * x.adjoint());
        }
    }
    let h = s.space().clone();
    let t = s.source.space().clone();
    let span = |g: Vec<CMat>| OperatorSpan::from_matrices(h.clone(), t.clone(), g, tol);
    let hat_slices = span_equal(&span(l1), &span(r1), tol).1.max(span_equal(&span(l2), &span(r2), tol).1);
    let transport = delta_transport_residual(v, tol)?;
    let passed = hat.passed && a.passed && legs_delta.max(hat_slices).max(transport) <= tol;
    Ok(HopfAudit { regularity, hat, a, legs_delta, hat_slices, transport, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar_base::check_factorization;
    use crate::linalg::{c, DEFAULT_TOL};

    const TOL: f64 = DEFAULT_TOL;

    /// Trivial base and `H = ℂ²` with the multiplicative unitary of `ℤ/2`.
    fn z2_setting() -> UnitarySetting {
        let base = crate::cstar_base::base_from_weight("C", vec!["*".into()], vec![1.0]).unwrap();
        let h = HilbertSpace::euclidean("C2", 2).unwrap();
        let all = OperatorSpan::full(base.space().clone(), h);
        let a = check_factorization(all.clone(), &base, TOL).unwrap();
        let b = check_factorization(all, &base.opposite(), TOL).unwrap();
        UnitarySetting::new(&a, &b, &b, TOL).unwrap()
    }

    #[test]
    fn classical_z2_unitary_passes() {
        let s = z2_setting();
        // `(x, y) ↦ (x, x + y)` on `δ_x ⊗ δ_y`
        let mut deltas = Vec::new();
        for i in 0..2 {
            let mut m = CMat::zeros(2, 1);
            m[(i, 0)] = c(1.0);
            deltas.push(m);
        }
        let mut dom = Vec::new();
        let mut cod = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                dom.push(s.source().ket1(&deltas[x], TOL).unwrap() * &deltas[y]);
                cod.push(s.range().ket1(&deltas[x], TOL).unwrap() * &deltas[(x + y) % 2]);
            }
        }
        let v = solve_unitary(&hcat(&dom, 4), &hcat(&cod, 4), "shift", TOL).unwrap();
        let pmu = s.candidate(v).unwrap();
        let rep = pmu.verify(TOL).unwrap();
        assert!(rep.pentagon < 1e-12);
        assert!(check_regular(&pmu, TOL).unwrap().regular);
        assert_eq!(leg_hat_span(&pmu, TOL).rank(), 2);
        assert_eq!(leg_a_span(&pmu, TOL).rank(), 2);
    }

    #[test]
    fn flip_fails_pentagon() {
        let s = z2_setting();
        let sigma = flip(s.source(), s.range(), TOL).unwrap();
        let pmu = s.candidate(sigma).unwrap();
        let rep = check_pmu(&pmu, TOL).unwrap();
        assert!(rep.unitarity < 1e-12);
        assert!(rep.pentagon > 0.1);
        assert!(!rep.passed);
        assert!(pmu.verify(TOL).is_err());
        assert!(check_regular(&pmu, TOL).is_err());
    }

    #[test]
    fn wrong_shape_rejected() {
        let s = z2_setting();
        assert!(matches!(s.candidate(CMat::identity(3, 3)), Err(Error::Shape(_))));
    }
}
