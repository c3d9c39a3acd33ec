//! The relative tensor product `H α⊗β K = α ⊳ 𝔥 ⊲ β` and its canonical maps.
//!
//! The space is realized as the Gram quotient of the formal family
//! `ξ_i ⊳ k` (orthonormal basis `ξ_i` of `α`, `k` running over a basis of
//! `K`), with inner products `⟨k, ρ_β(ξ_i*ξ_j) k'⟩`. Every triple
//! `ξ ⊗ ζ ⊗ η` is the vector `ξ ⊳ ηζ`, so this family spans the same space as
//! the full triple family while being much smaller.

use std::sync::Arc;

use crate::cstar_base::{check_compatible, check_factorization, hcat, Factorization};
use crate::error::{Error, Result};
use crate::linalg::{
    gram_quotient, pinv_rank, solve_on_family, span_equal, unitarity_defect, CMat, HilbertSpace, OperatorSpan,
};

#[derive(Debug, Clone)]
pub struct RelativeTensorSpace {
    left: Factorization,
    right: Factorization,
    space: Arc<HilbertSpace>,
    /// Column `i * dim K + k` is `ξ_i ⊳ k`.
    sl: CMat,
    sl_inv: CMat,
    /// Column `j * dim H + h` is `h ⊲ η_j`.
    sr: CMat,
    sr_inv: CMat,
    /// Unitary from the quotient model of `H ρ_α⊲ β` onto `space`.
    iso_right: CMat,
}

/// Builds `H α⊗β K` from `α` over `(𝔥, 𝔅, 𝔅†)` and `β` over `(𝔥, 𝔅†, 𝔅)`.
pub fn build_rtp(name: &str, left: &Factorization, right: &Factorization, tol: f64) -> Result<RelativeTensorSpace> {
    let lb = left.base();
    let rb = right.base();
    if !HilbertSpace::same(lb.space(), rb.space())
        || !span_equal(lb.b(), rb.b_dag(), tol).0
        || !span_equal(lb.b_dag(), rb.b(), tol).0
    {
        return Err(Error::Shape("relative tensor product needs factorizations over opposite bases".into()));
    }
    let (xi, eta) = (left.basis(), right.basis());
    let (dk, dh) = (right.target().dim(), left.target().dim());

    let gram_l = block_gram(&xi, |b| right.rho(b));
    let q = gram_quotient(name, &gram_l, tol)?;
    let space = q.space.clone();
    let (sl, sl_inv) = (q.synthesis, q.right_inverse);

    let mut sr = CMat::zeros(space.dim(), eta.len() * dh);
    for (j, e) in eta.iter().enumerate() {
        let k2 = ket2_from(&sl, left, e, dk, tol)?;
        sr.columns_mut(j * dh, dh).copy_from(&k2);
    }
    let (sr_inv, sr_rank) = pinv_rank(&sr, tol);
    if sr_rank != space.dim() {
        return Err(Error::check("[ζ ⊲ η] spans the relative tensor product", 1.0, tol));
    }

    // the other model H ρ_α⊲ β, with ⟨h, ρ_α(η_j*η_j')h'⟩
    let gram_r = block_gram(&eta, |b| left.rho(b));
    let qr = gram_quotient(format!("{name}:right"), &gram_r, tol)?;
    if qr.space.dim() != space.dim() {
        return Err(Error::check("both models of the relative tensor product have equal dimension", 1.0, tol));
    }
    // the synthesis has orthogonal rows, so its right inverse is its pseudo-inverse
    let iso_right = &sr * &qr.right_inverse;
    let res = (&iso_right * &qr.synthesis - &sr).norm() / sr.norm().max(1.0);
    let defect = unitarity_defect(&iso_right);
    if res.max(defect) > tol {
        return Err(Error::check("ζ ⊲ η ↦ ξ ⊳ ηζ identification is unitary", res.max(defect), tol));
    }
    Ok(RelativeTensorSpace { left: left.clone(), right: right.clone(), space, sl, sl_inv, sr, sr_inv, iso_right })
}

/// Block Gram matrix `[rho(x_i* x_j)]_{ij}`.
fn block_gram(xs: &[CMat], rho: impl Fn(&CMat) -> CMat) -> CMat {
    let n = xs.len();
    let d = if n == 0 { 0 } else { rho(&(xs[0].adjoint() * &xs[0])).nrows() };
    let mut g = CMat::zeros(n * d, n * d);
    for i in 0..n {
        for j in i..n {
            let blk = rho(&(xs[i].adjoint() * &xs[j]));
            g.view_mut((i * d, j * d), (d, d)).copy_from(&blk);
            if i != j {
                g.view_mut((j * d, i * d), (d, d)).copy_from(&blk.adjoint());
            }
        }
    }
    g
}

/// `|η⟩₂` from the left synthesis: `ξ_i ζ ↦ ξ_i ⊳ ηζ`.
fn ket2_from(sl: &CMat, left: &Factorization, eta: &CMat, dk: usize, tol: f64) -> Result<CMat> {
    let d = left.base().space().dim();
    let r = left.rank();
    let mut family = CMat::zeros(sl.nrows(), r * d);
    for i in 0..r {
        let blk = sl.columns(i * dk, dk) * eta;
        family.columns_mut(i * d, d).copy_from(&blk);
    }
    let k = &family * left.synthesis_pinv();
    let res = (&k * left.synthesis() - &family).norm() / family.norm().max(1.0);
    if res > tol {
        return Err(Error::check("|η⟩₂ well defined", res, tol));
    }
    Ok(k)
}

/// Which defining case of `S ⊗ T` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorCase {
    /// `S ∈ L(H_α, L_γ)` and `T ρ_β(b) = ρ_δ(b) T`.
    LeftModule,
    /// `T ∈ L(K_β, M_δ)` and `S ρ_α(b†) = ρ_γ(b†) S`.
    RightModule,
}

impl RelativeTensorSpace {
    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn left(&self) -> &Factorization {
        &self.left
    }

    pub fn right(&self) -> &Factorization {
        &self.right
    }

    /// `[ξ_i ⊳ k]` over the orthonormal basis of `α` and the basis of `K`.
    pub fn left_family(&self) -> &CMat {
        &self.sl
    }

    /// `[h ⊲ η_j]` over the orthonormal basis of `β` and the basis of `H`.
    pub fn right_family(&self) -> &CMat {
        &self.sr
    }

    pub fn iso_right(&self) -> &CMat {
        &self.iso_right
    }

    /// `|ξ_i⟩₁` for the `i`-th basis element of `α`.
    pub fn ket1_basis(&self, i: usize) -> CMat {
        let dk = self.right.target().dim();
        self.sl.columns(i * dk, dk).into_owned()
    }

    /// `|η_j⟩₂` for the `j`-th basis element of `β`.
    pub fn ket2_basis(&self, j: usize) -> CMat {
        let dh = self.left.target().dim();
        self.sr.columns(j * dh, dh).into_owned()
    }

    /// `|ξ⟩₁: K → H α⊗β K`, `ζ ↦ ξ ⊳ ζ`.
    pub fn ket1(&self, xi: &CMat, tol: f64) -> Result<CMat> {
        let coeffs = element_coefficients(self.left.span(), xi, tol, "|ξ⟩₁")?;
        let dk = self.right.target().dim();
        let mut out = CMat::zeros(self.dim(), dk);
        for (i, c) in coeffs.iter().enumerate() {
            out += self.sl.columns(i * dk, dk) * *c;
        }
        Ok(out)
    }

    /// `|η⟩₂: H → H α⊗β K`, `ζ ↦ ζ ⊲ η`.
    pub fn ket2(&self, eta: &CMat, tol: f64) -> Result<CMat> {
        let coeffs = element_coefficients(self.right.span(), eta, tol, "|η⟩₂")?;
        let dh = self.left.target().dim();
        let mut out = CMat::zeros(self.dim(), dh);
        for (j, c) in coeffs.iter().enumerate() {
            out += self.sr.columns(j * dh, dh) * *c;
        }
        Ok(out)
    }

    pub fn bra1(&self, xi: &CMat, tol: f64) -> Result<CMat> {
        Ok(self.ket1(xi, tol)?.adjoint())
    }

    pub fn bra2(&self, eta: &CMat, tol: f64) -> Result<CMat> {
        Ok(self.ket2(eta, tol)?.adjoint())
    }

    /// `ξ ⊗ ζ ⊗ η` for basis indices.
    pub fn triple(&self, i: usize, zeta: &CMat, j: usize) -> CMat {
        self.ket1_basis(i) * (&self.right.basis()[j] * zeta)
    }

    /// `γ ◁ β = [|β⟩₂ γ]` for `γ ⊥ α`, with `ρ_{γ◁β} = (ρ_γ)₁` verified.
    pub fn push_left(&self, gamma: &Factorization, tol: f64) -> Result<Factorization> {
        if !HilbertSpace::same(gamma.target(), self.left.target()) {
            return Err(Error::Shape("push_left: γ must factorize the left space".into()));
        }
        let rep = check_compatible(gamma, &self.left, tol);
        if !rep.compatible {
            let r = rep.rho_alpha_beta.max(rep.rho_beta_alpha).max(rep.commute);
            return Err(Error::check("push_left precondition γ ⊥ α", r, tol));
        }
        let mut gens = Vec::new();
        for j in 0..self.right.rank() {
            let k = self.ket2_basis(j);
            for g in gamma.basis() {
                gens.push(&k * g);
            }
        }
        let span = OperatorSpan::from_matrices(gamma.base().space().clone(), self.space.clone(), gens, tol);
        let f = check_factorization(span, gamma.base(), tol)?;
        let id = CMat::identity(self.right.target().dim(), self.right.target().dim());
        let mut r = 0.0f64;
        for c in gamma.base().b_dag().basis() {
            let leg = self.tensor_op_case(self, &gamma.rho(&c), &id, TensorCase::RightModule, tol)?;
            r = r.max((f.rho(&c) - leg).norm());
        }
        if r > tol {
            return Err(Error::check("ρ_(γ◁β) = (ρ_γ)₁", r, tol));
        }
        Ok(f)
    }

    /// `α ▷ δ = [|α⟩₁ δ]` for `δ ⊥ β`, with `ρ_{α▷δ} = (ρ_δ)₂` verified.
    pub fn push_right(&self, delta: &Factorization, tol: f64) -> Result<Factorization> {
        if !HilbertSpace::same(delta.target(), self.right.target()) {
            return Err(Error::Shape("push_right: δ must factorize the right space".into()));
        }
        let rep = check_compatible(delta, &self.right, tol);
        if !rep.compatible {
            let r = rep.rho_alpha_beta.max(rep.rho_beta_alpha).max(rep.commute);
            return Err(Error::check("push_right precondition δ ⊥ β", r, tol));
        }
        let mut gens = Vec::new();
        for i in 0..self.left.rank() {
            let k = self.ket1_basis(i);
            for d in delta.basis() {
                gens.push(&k * d);
            }
        }
        let span = OperatorSpan::from_matrices(delta.base().space().clone(), self.space.clone(), gens, tol);
        let f = check_factorization(span, delta.base(), tol)?;
        let id = CMat::identity(self.left.target().dim(), self.left.target().dim());
        let mut r = 0.0f64;
        for c in delta.base().b_dag().basis() {
            let leg = self.tensor_op_case(self, &id, &delta.rho(&c), TensorCase::LeftModule, tol)?;
            r = r.max((f.rho(&c) - leg).norm());
        }
        if r > tol {
            return Err(Error::check("ρ_(α▷δ) = (ρ_δ)₂", r, tol));
        }
        Ok(f)
    }

    /// Checks the preconditions of `case` for `S ⊗ T: self → dst`; returns the
    /// largest residual.
    pub fn tensor_precondition(&self, dst: &RelativeTensorSpace, s: &CMat, t: &CMat, case: TensorCase) -> f64 {
        match case {
            TensorCase::LeftModule => {
                let a = maps_between(s, &self.left, &dst.left);
                let b = intertwines(t, &self.right, &dst.right);
                a.max(b)
            }
            TensorCase::RightModule => {
                let a = maps_between(t, &self.right, &dst.right);
                let b = intertwines(s, &self.left, &dst.left);
                a.max(b)
            }
        }
    }

    /// `S ⊗ T: self → dst` per the requested case, after checking its
    /// preconditions.
    pub fn tensor_op_case(
        &self,
        dst: &RelativeTensorSpace,
        s: &CMat,
        t: &CMat,
        case: TensorCase,
        tol: f64,
    ) -> Result<CMat> {
        let shape_ok = s.ncols() == self.left.target().dim()
            && s.nrows() == dst.left.target().dim()
            && t.ncols() == self.right.target().dim()
            && t.nrows() == dst.right.target().dim();
        if !shape_ok {
            return Err(Error::Shape("S ⊗ T: operator shapes do not match the factors".into()));
        }
        let pre = self.tensor_precondition(dst, s, t, case);
        if pre > tol {
            return Err(Error::check(format!("S ⊗ T precondition ({case:?})"), pre, tol));
        }
        let (x, res) = match case {
            TensorCase::LeftModule => {
                let coeff = transfer_coefficients(s, &self.left, &dst.left);
                let m = kron_blocks(&coeff, t);
                let cod = &dst.sl * m;
                let x = &cod * &self.sl_inv;
                let res = (&x * &self.sl - &cod).norm() / cod.norm().max(1.0);
                (x, res)
            }
            TensorCase::RightModule => {
                let coeff = transfer_coefficients(t, &self.right, &dst.right);
                let m = kron_blocks(&coeff, s);
                let cod = &dst.sr * m;
                let x = &cod * &self.sr_inv;
                let res = (&x * &self.sr - &cod).norm() / cod.norm().max(1.0);
                (x, res)
            }
        };
        if res > tol {
            return Err(Error::check("S ⊗ T well defined", res, tol));
        }
        Ok(x)
    }

    /// `S ⊗ T`, using the first case whose preconditions hold.
    pub fn tensor_op(&self, dst: &RelativeTensorSpace, s: &CMat, t: &CMat, tol: f64) -> Result<CMat> {
        match self.tensor_op_case(dst, s, t, TensorCase::LeftModule, tol) {
            Ok(x) => Ok(x),
            Err(Error::Shape(m)) => Err(Error::Shape(m)),
            Err(_) => self.tensor_op_case(dst, s, t, TensorCase::RightModule, tol),
        }
    }
}

fn element_coefficients(span: &OperatorSpan, x: &CMat, tol: f64, what: &str) -> Result<Vec<crate::linalg::C>> {
    if x.nrows() != span.cod().dim() || x.ncols() != span.dom().dim() {
        return Err(Error::Shape(format!("{what}: element has the wrong shape")));
    }
    let d = span.distance(x) / x.norm().max(1.0);
    if d > tol {
        return Err(Error::check(format!("{what}: argument lies in the factorization"), d, tol));
    }
    Ok(span.coefficients(x).iter().copied().collect())
}

/// Largest residual of `S α ⊆ γ` and `S* γ ⊆ α`.
fn maps_between(s: &CMat, from: &Factorization, to: &Factorization) -> f64 {
    let mut r = 0.0f64;
    for x in from.basis() {
        r = r.max(to.span().distance(&(s * x)));
    }
    let sa = s.adjoint();
    for y in to.basis() {
        r = r.max(from.span().distance(&(&sa * y)));
    }
    r
}

/// Largest residual of `T ρ_from(b) = ρ_to(b) T` over a basis of the common
/// represented algebra.
fn intertwines(t: &CMat, from: &Factorization, to: &Factorization) -> f64 {
    from.base().b_dag().basis().iter().map(|b| (t * from.rho(b) - to.rho(b) * t).norm()).fold(0.0, f64::max)
}

/// `C[j, i]` with `S ξ_i = Σ_j C[j, i] γ_j`.
fn transfer_coefficients(s: &CMat, from: &Factorization, to: &Factorization) -> CMat {
    let basis = from.basis();
    let mut c = CMat::zeros(to.rank(), basis.len());
    for (i, x) in basis.iter().enumerate() {
        c.set_column(i, &to.span().coefficients(&(s * x)));
    }
    c
}

/// Block matrix with `(j, i)` block `C[j, i] · T`.
fn kron_blocks(c: &CMat, t: &CMat) -> CMat {
    c.kronecker(t)
}

/// `Σ: H α⊗β K → K β⊗α H`, `ξ ⊗ ζ ⊗ η ↦ η ⊗ ζ ⊗ ξ`.
pub fn flip(src: &RelativeTensorSpace, dst: &RelativeTensorSpace, tol: f64) -> Result<CMat> {
    let same_factors = HilbertSpace::same(src.left.target(), dst.right.target())
        && HilbertSpace::same(src.right.target(), dst.left.target())
        && span_equal(src.left.span(), dst.right.span(), tol).0
        && span_equal(src.right.span(), dst.left.span(), tol).0;
    if !same_factors {
        return Err(Error::Shape("flip: target must be the product in the other order".into()));
    }
    let (xi, eta) = (src.left.basis(), src.right.basis());
    let mut dom = Vec::new();
    let mut cod = Vec::new();
    for (i, x) in xi.iter().enumerate() {
        let k_src = src.ket1_basis(i);
        let k_dst = dst.ket2(x, tol)?;
        for e in &eta {
            dom.push(&k_src * e);
            cod.push(&k_dst * e);
        }
    }
    let dom = hcat(&dom, src.dim());
    let cod = hcat(&cod, dst.dim());
    solve_unitary(&dom, &cod, "Σ", tol)
}

/// `X` with `X · dom = cod`, checked to be exact and unitary.
pub(crate) fn solve_unitary(dom: &CMat, cod: &CMat, what: &str, tol: f64) -> Result<CMat> {
    let (x, res) = solve_on_family(dom, cod, tol);
    if res > tol {
        return Err(Error::check(format!("{what} well defined"), res, tol));
    }
    let u = unitarity_defect(&x);
    if u > tol || x.nrows() != x.ncols() {
        return Err(Error::check(format!("{what} unitary"), u, tol));
    }
    Ok(x)
}

/// `Φ: 𝔥 𝔅⊗β K → K`, `b ⊗ ζ ⊗ η ↦ ηbζ`; `src` must be built from the base
/// factorization `𝔅` on the left.
pub fn unit_left(src: &RelativeTensorSpace, tol: f64) -> Result<CMat> {
    let base = src.left.base();
    if !HilbertSpace::same(src.left.target(), base.space()) || !span_equal(src.left.span(), base.b(), tol).0 {
        return Err(Error::Shape("unit_left: left factor must be 𝔥 with 𝔅".into()));
    }
    let mut dom = Vec::new();
    let mut cod = Vec::new();
    let bs = src.left.basis();
    for (i, b) in bs.iter().enumerate() {
        let k = src.ket1_basis(i);
        for e in src.right.basis() {
            dom.push(&k * &e);
            cod.push(&e * b);
        }
    }
    solve_unitary(&hcat(&dom, src.dim()), &hcat(&cod, src.right.target().dim()), "Φ", tol)
}

/// `Ψ: H α⊗𝔅† 𝔥 → H`, `ξ ⊗ ζ ⊗ b† ↦ ξb†ζ`; `src` must be built from the
/// base factorization `𝔅†` on the right.
pub fn unit_right(src: &RelativeTensorSpace, tol: f64) -> Result<CMat> {
    let base = src.right.base();
    if !HilbertSpace::same(src.right.target(), base.space()) || !span_equal(src.right.span(), base.b(), tol).0 {
        return Err(Error::Shape("unit_right: right factor must be 𝔥 with 𝔅†".into()));
    }
    let mut dom = Vec::new();
    let mut cod = Vec::new();
    let xs = src.left.basis();
    for (i, x) in xs.iter().enumerate() {
        let k = src.ket1_basis(i);
        for b in src.right.basis() {
            dom.push(&k * &b);
            cod.push(x * &b);
        }
    }
    solve_unitary(&hcat(&dom, src.dim()), &hcat(&cod, src.left.target().dim()), "Ψ", tol)
}

/// `Θ: (H α⊗β K) α▷γ⊗δ L → H α⊗β◁δ (K γ⊗δ L)`,
/// `(ξ ⊳ k) ⊲ ε ↦ ξ ⊳ (k ⊲ ε)`.
///
/// `hk = H α⊗β K`, `kl = K γ⊗δ L`, `lhs` and `rhs` the two bracketings.
pub fn associator(
    hk: &RelativeTensorSpace,
    kl: &RelativeTensorSpace,
    lhs: &RelativeTensorSpace,
    rhs: &RelativeTensorSpace,
    tol: f64,
) -> Result<CMat> {
    let shapes = HilbertSpace::same(lhs.left.target(), hk.space())
        && HilbertSpace::same(rhs.right.target(), kl.space())
        && HilbertSpace::same(lhs.right.target(), kl.right.target())
        && HilbertSpace::same(rhs.left.target(), hk.left.target())
        && HilbertSpace::same(hk.right.target(), kl.left.target());
    if !shapes {
        return Err(Error::Shape("associator: factors do not line up".into()));
    }
    let compat = check_compatible(&hk.right, &kl.left, tol);
    if !compat.compatible {
        return Err(Error::check(
            "associator precondition β ⊥ γ",
            compat.rho_alpha_beta.max(compat.rho_beta_alpha),
            tol,
        ));
    }
    let (ok1, r1) = span_equal(lhs.left.span(), hk.push_right(&kl.left, tol)?.span(), tol);
    let (ok2, r2) = span_equal(rhs.right.span(), kl.push_left(&hk.right, tol)?.span(), tol);
    let (ok3, r3) = span_equal(lhs.right.span(), kl.right.span(), tol);
    let (ok4, r4) = span_equal(rhs.left.span(), hk.left.span(), tol);
    if !(ok1 && ok2 && ok3 && ok4) {
        return Err(Error::check(
            "associator: outer factorizations are α ▷ γ and β ◁ δ",
            r1.max(r2).max(r3).max(r4),
            tol,
        ));
    }
    let dk = hk.right.target().dim();
    let mut dom = Vec::new();
    let mut cod = Vec::new();
    let deltas = kl.right.basis();
    let kets_lhs: Vec<CMat> = deltas.iter().map(|e| lhs.ket2(e, tol)).collect::<Result<_>>()?;
    for (i, xi) in hk.left.basis().iter().enumerate() {
        let k1_hk = hk.ket1_basis(i);
        let k1_rhs = rhs.ket1(xi, tol)?;
        for (j, _) in deltas.iter().enumerate() {
            // columns over the basis of K
            dom.push(&kets_lhs[j] * &k1_hk);
            cod.push(&k1_rhs * kl.ket2_basis(j));
        }
    }
    debug_assert!(dom.iter().all(|m| m.ncols() == dk));
    solve_unitary(&hcat(&dom, lhs.dim()), &hcat(&cod, rhs.dim()), "Θ", tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cstar_base::{base_factorization, base_from_weight};
    use crate::linalg::{c, DEFAULT_TOL};

    const TOL: f64 = DEFAULT_TOL;

    fn weighted_base() -> crate::cstar_base::CStarBase {
        base_from_weight("h", vec!["1".into(), "2".into()], vec![1.0 / 3.0, 2.0 / 3.0]).unwrap()
    }

    #[test]
    fn base_with_itself_is_unital() {
        let base = weighted_base();
        let b = base_factorization(&base, TOL).unwrap();
        let bd = check_factorization(base.b_dag().clone(), &base.opposite(), TOL).unwrap();
        let t = build_rtp("hh", &b, &bd, TOL).unwrap();
        assert_eq!(t.dim(), 2);
        let phi = unit_left(&t, TOL).unwrap();
        assert!(unitarity_defect(&phi) < 1e-12);
        let psi = unit_right(&t, TOL).unwrap();
        assert!(unitarity_defect(&psi) < 1e-12);
    }

    #[test]
    fn bra_ket_gives_rho() {
        let base = weighted_base();
        let b = base_factorization(&base, TOL).unwrap();
        let bd = check_factorization(base.b_dag().clone(), &base.opposite(), TOL).unwrap();
        let t = build_rtp("hh", &b, &bd, TOL).unwrap();
        let xs = b.basis();
        for x in &xs {
            for y in &xs {
                let lhs = t.bra1(y, TOL).unwrap() * t.ket1(x, TOL).unwrap();
                assert!((lhs - bd.rho(&(y.adjoint() * x))).norm() < 1e-12);
            }
        }
        let mut not_in = CMat::zeros(2, 2);
        not_in[(0, 1)] = c(1.0);
        assert!(t.ket1(&not_in, TOL).is_err());
    }

    #[test]
    fn identity_tensor_identity() {
        let base = weighted_base();
        let b = base_factorization(&base, TOL).unwrap();
        let bd = check_factorization(base.b_dag().clone(), &base.opposite(), TOL).unwrap();
        let t = build_rtp("hh", &b, &bd, TOL).unwrap();
        let id = CMat::identity(2, 2);
        for case in [TensorCase::LeftModule, TensorCase::RightModule] {
            let x = t.tensor_op_case(&t, &id, &id, case, TOL).unwrap();
            assert!((x - CMat::identity(t.dim(), t.dim())).norm() < 1e-12);
        }
    }
}
