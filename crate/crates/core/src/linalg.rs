//! Weighted finite-dimensional Hilbert spaces, operators between them and
//! linear spans of operators.
//!
//! Every operator is stored in orthonormal coordinates: the basis vector
//! `e_i` of a space with weight `w_i` is represented by `sqrt(w_i) e_i`.
//! Adjoints are then plain conjugate transposes and the Hilbert–Schmidt inner
//! product is the Frobenius inner product. [`Operator::from_natural`] and
//! [`Operator::natural`] convert to and from the delta-function basis.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decomp::{hermitian_eigen, svd};
use crate::error::{Error, Result};

pub type C = Complex64;
pub type CMat = DMatrix<C>;
pub type CVec = DVector<C>;

/// Default relative tolerance for rank cuts and span comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Generators below this absolute norm are treated as numerical zeros.
const ABS_FLOOR: f64 = 1e-14;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HilbertSpace {
    name: String,
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl HilbertSpace {
    pub fn new(name: impl Into<String>, labels: Vec<String>, weights: Vec<f64>) -> Result<Arc<Self>> {
        let name = name.into();
        if labels.is_empty() {
            return Err(Error::Invalid(format!("space {name} has no basis labels")));
        }
        if labels.len() != weights.len() {
            return Err(Error::Shape(format!("space {name}: {} labels but {} weights", labels.len(), weights.len())));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w <= 0.0) {
            return Err(Error::Invalid(format!("space {name}: nonpositive weight {w}")));
        }
        Ok(Arc::new(HilbertSpace { name, labels, weights }))
    }

    /// Unweighted space with labels `0..dim`.
    pub fn euclidean(name: impl Into<String>, dim: usize) -> Result<Arc<Self>> {
        HilbertSpace::new(name, (0..dim).map(|i| i.to_string()).collect(), vec![1.0; dim])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn same(a: &Arc<HilbertSpace>, b: &Arc<HilbertSpace>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

fn require_same(a: &Arc<HilbertSpace>, b: &Arc<HilbertSpace>, ctx: &str) -> Result<()> {
    if HilbertSpace::same(a, b) {
        Ok(())
    } else {
        Err(Error::Shape(format!("{ctx}: space {} does not match {}", a.name(), b.name())))
    }
}

#[derive(Clone)]
pub struct Operator {
    dom: Arc<HilbertSpace>,
    cod: Arc<HilbertSpace>,
    mat: CMat,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Operator({} -> {}, {}x{})", self.dom.name(), self.cod.name(), self.mat.nrows(), self.mat.ncols())
    }
}

impl Operator {
    /// Operator given by its matrix in orthonormal coordinates.
    pub fn new(dom: Arc<HilbertSpace>, cod: Arc<HilbertSpace>, mat: CMat) -> Result<Self> {
        if mat.nrows() != cod.dim() || mat.ncols() != dom.dim() {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, expected {}x{} for {} -> {}",
                mat.nrows(),
                mat.ncols(),
                cod.dim(),
                dom.dim(),
                dom.name(),
                cod.name()
            )));
        }
        Ok(Operator { dom, cod, mat })
    }

    /// Operator given by its matrix on the delta-function bases.
    pub fn from_natural(dom: Arc<HilbertSpace>, cod: Arc<HilbertSpace>, natural: CMat) -> Result<Self> {
        if natural.nrows() != cod.dim() || natural.ncols() != dom.dim() {
            return Operator::new(dom, cod, natural);
        }
        let mut mat = natural;
        for (j, wd) in dom.weights().iter().enumerate() {
            for (i, wc) in cod.weights().iter().enumerate() {
                mat[(i, j)] *= (wc / wd).sqrt();
            }
        }
        Operator::new(dom, cod, mat)
    }

    pub fn identity(space: Arc<HilbertSpace>) -> Self {
        let n = space.dim();
        Operator { dom: space.clone(), cod: space, mat: CMat::identity(n, n) }
    }

    pub fn zero(dom: Arc<HilbertSpace>, cod: Arc<HilbertSpace>) -> Self {
        let mat = CMat::zeros(cod.dim(), dom.dim());
        Operator { dom, cod, mat }
    }

    pub fn dom(&self) -> &Arc<HilbertSpace> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<HilbertSpace> {
        &self.cod
    }

    /// Matrix in orthonormal coordinates.
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    /// Matrix on the delta-function bases.
    pub fn natural(&self) -> CMat {
        let mut m = self.mat.clone();
        for (j, wd) in self.dom.weights().iter().enumerate() {
            for (i, wc) in self.cod.weights().iter().enumerate() {
                m[(i, j)] *= (wd / wc).sqrt();
            }
        }
        m
    }

    pub fn adjoint(&self) -> Operator {
        Operator { dom: self.cod.clone(), cod: self.dom.clone(), mat: self.mat.adjoint() }
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        require_same(&self.dom, &rhs.cod, "compose")?;
        Ok(Operator { dom: rhs.dom.clone(), cod: self.cod.clone(), mat: &self.mat * &rhs.mat })
    }

    pub fn add(&self, rhs: &Operator) -> Result<Operator> {
        require_same(&self.dom, &rhs.dom, "add")?;
        require_same(&self.cod, &rhs.cod, "add")?;
        Ok(Operator { dom: self.dom.clone(), cod: self.cod.clone(), mat: &self.mat + &rhs.mat })
    }

    pub fn scale(&self, s: C) -> Operator {
        Operator { dom: self.dom.clone(), cod: self.cod.clone(), mat: &self.mat * s }
    }

    pub fn hs_norm(&self) -> f64 {
        self.mat.norm()
    }

    pub fn op_norm(&self) -> f64 {
        op_norm(&self.mat)
    }
}

pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    crate::decomp::op_norm(m)
}

/// Largest singular value of `a - b`.
pub fn op_dist(a: &CMat, b: &CMat) -> f64 {
    op_norm(&(a - b))
}

/// Operator norm of `m*m - 1`.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.ncols();
    crate::decomp::hermitian_op_norm(&(m.adjoint() * m - CMat::identity(n, n)))
}

pub(crate) fn vec_of(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub(crate) fn unvec(v: &[C], rows: usize, cols: usize) -> CMat {
    CMat::from_column_slice(rows, cols, v)
}

/// Columns spanning the range of `n`, orthonormal, cut at `tol * sigma_max`.
///
/// Wide families of low rank are first compressed with a seeded random
/// sketch; the sketch size doubles until it exceeds the detected rank with a
/// safety margin, so the result is the range of `n` itself.
pub(crate) fn orth(n: &CMat, tol: f64) -> CMat {
    let (d, m) = n.shape();
    if m == 0 || d == 0 {
        return CMat::zeros(d, 0);
    }
    let limit = d.min(m);
    if limit > SKETCH_MIN {
        let mut rng = ChaCha8Rng::seed_from_u64((d as u64) << 32 | m as u64);
        let mut k = 48;
        while k + SKETCH_MARGIN < limit {
            let omega = CMat::from_fn(m, k, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let q = orth_dense(&(n * omega), tol);
            if q.ncols() + SKETCH_MARGIN <= k {
                return q;
            }
            k *= 2;
        }
    }
    orth_dense(n, tol)
}

const SKETCH_MIN: usize = 160;
const SKETCH_MARGIN: usize = 12;

fn orth_dense(n: &CMat, tol: f64) -> CMat {
    let d = n.nrows();
    let svd = svd(n);
    let u = svd.u;
    let s = &svd.s;
    let smax = s.max();
    if smax <= ABS_FLOOR {
        return CMat::zeros(d, 0);
    }
    let mut keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > tol * smax && s[i] > ABS_FLOOR).collect();
    keep.sort_by(|&a, &b| s[b].partial_cmp(&s[a]).unwrap().then(a.cmp(&b)));
    u.select_columns(&keep)
}

/// Orthonormal basis of the null space of `a` (columns), cut at `tol * sigma_max`.
pub(crate) fn null_space(a: &CMat, tol: f64) -> CMat {
    let n = a.ncols();
    if a.nrows() == 0 || n == 0 {
        return CMat::identity(n, n);
    }
    let r = compress_rows(a);
    let mut sq = CMat::zeros(n, n);
    let k = r.nrows().min(n);
    sq.rows_mut(0, k).copy_from(&r.rows(0, k));
    let svd = svd(&sq);
    let vt = svd.vt;
    let s = &svd.s;
    let smax = s.max();
    let null: Vec<usize> = (0..n).filter(|&i| smax <= ABS_FLOOR || s[i] <= tol * smax).collect();
    let mut out = CMat::zeros(n, null.len());
    for (c, &i) in null.iter().enumerate() {
        out.set_column(c, &vt.row(i).adjoint());
    }
    out
}

/// Upper-triangular `R` with `R*R = a*a`, built blockwise to bound memory.
fn compress_rows(a: &CMat) -> CMat {
    let n = a.ncols();
    if a.nrows() <= n {
        return a.clone();
    }
    let mut r = CMat::zeros(0, n);
    let block = n.max(64);
    let mut start = 0;
    while start < a.nrows() {
        let len = block.min(a.nrows() - start);
        let mut stacked = CMat::zeros(r.nrows() + len, n);
        stacked.rows_mut(0, r.nrows()).copy_from(&r);
        stacked.rows_mut(r.nrows(), len).copy_from(&a.rows(start, len));
        r = stacked.qr().r();
        start += len;
    }
    r
}

/// Moore–Penrose pseudo-inverse with relative singular value cut.
pub(crate) fn pinv(m: &CMat, tol: f64) -> CMat {
    pinv_rank(m, tol).0
}

/// [`pinv`] together with the numerical rank it kept.
pub(crate) fn pinv_rank(m: &CMat, tol: f64) -> (CMat, usize) {
    if m.is_empty() {
        return (CMat::zeros(m.ncols(), m.nrows()), 0);
    }
    let svd = svd(m);
    let s = &svd.s;
    let smax = s.max();
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > tol * smax && s[i] > ABS_FLOOR).collect();
    let mut left = svd.vt.select_rows(&keep).adjoint();
    for (j, &i) in keep.iter().enumerate() {
        left.column_mut(j).scale_mut(1.0 / s[i]);
    }
    (left * svd.u.select_columns(&keep).adjoint(), keep.len())
}

/// The operator `X` with `X · dom_family = cod_family`, together with the
/// relative residual of that equation.
pub(crate) fn solve_on_family(dom_family: &CMat, cod_family: &CMat, tol: f64) -> (CMat, f64) {
    let x = cod_family * pinv(dom_family, tol);
    let scale = cod_family.norm().max(1.0);
    let res = (&x * dom_family - cod_family).norm() / scale;
    (x, res)
}

/// A linear span of operators `dom -> cod`, held with an orthonormal basis in
/// the Hilbert–Schmidt inner product.
#[derive(Clone)]
pub struct OperatorSpan {
    dom: Arc<HilbertSpace>,
    cod: Arc<HilbertSpace>,
    generators: Vec<CMat>,
    /// Vectorized orthonormal basis, one column per element.
    q: CMat,
}

impl fmt::Debug for OperatorSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorSpan({} -> {}, rank {})", self.dom.name(), self.cod.name(), self.rank())
    }
}

impl OperatorSpan {
    pub(crate) fn from_matrices(
        dom: Arc<HilbertSpace>,
        cod: Arc<HilbertSpace>,
        generators: Vec<CMat>,
        tol: f64,
    ) -> Self {
        let d = dom.dim() * cod.dim();
        let mut stacked = CMat::zeros(d, generators.len());
        for (k, g) in generators.iter().enumerate() {
            stacked.column_mut(k).copy_from_slice(g.as_slice());
        }
        let q = orth(&stacked, tol);
        OperatorSpan { dom, cod, generators, q }
    }

    /// Span with a basis that is already orthonormal (columns of `q`).
    pub(crate) fn from_orthonormal(dom: Arc<HilbertSpace>, cod: Arc<HilbertSpace>, q: CMat) -> Self {
        let (r, cdim) = (cod.dim(), dom.dim());
        let generators = (0..q.ncols()).map(|k| unvec(q.column(k).as_slice(), r, cdim)).collect();
        OperatorSpan { dom, cod, generators, q }
    }

    pub fn zero(dom: Arc<HilbertSpace>, cod: Arc<HilbertSpace>) -> Self {
        let d = dom.dim() * cod.dim();
        OperatorSpan { dom, cod, generators: Vec::new(), q: CMat::zeros(d, 0) }
    }

    pub fn full(dom: Arc<HilbertSpace>, cod: Arc<HilbertSpace>) -> Self {
        let d = dom.dim() * cod.dim();
        OperatorSpan::from_orthonormal(dom, cod, CMat::identity(d, d))
    }

    pub fn dom(&self) -> &Arc<HilbertSpace> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<HilbertSpace> {
        &self.cod
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    /// Vectorized orthonormal basis (column-major vec of each element).
    pub fn vec_basis(&self) -> &CMat {
        &self.q
    }

    /// Orthonormal basis, in orthonormal coordinates.
    pub fn basis(&self) -> Vec<CMat> {
        (0..self.rank()).map(|k| self.element(k)).collect()
    }

    pub fn element(&self, k: usize) -> CMat {
        unvec(self.q.column(k).as_slice(), self.cod.dim(), self.dom.dim())
    }

    pub fn basis_operators(&self) -> Vec<Operator> {
        self.basis().into_iter().map(|m| Operator { dom: self.dom.clone(), cod: self.cod.clone(), mat: m }).collect()
    }

    /// Hilbert–Schmidt coefficients of `x` against the orthonormal basis.
    pub fn coefficients(&self, x: &CMat) -> CVec {
        self.q.adjoint() * vec_of(x)
    }

    /// Absolute Hilbert–Schmidt distance from `x` to the span.
    pub fn distance(&self, x: &CMat) -> f64 {
        let v = vec_of(x);
        let p = &self.q * (self.q.adjoint() * &v);
        (v - p).norm()
    }

    pub fn contains(&self, x: &Operator, tol: f64) -> (bool, f64) {
        let r = self.distance(x.matrix()) / x.hs_norm().max(1.0);
        (r <= tol, r)
    }

    /// Largest distance of an orthonormal basis element of `other` to `self`.
    pub fn inclusion_residual(&self, other: &OperatorSpan) -> f64 {
        if other.rank() == 0 {
            return 0.0;
        }
        let p = &self.q * (self.q.adjoint() * &other.q);
        let diff = &other.q - p;
        (0..diff.ncols()).map(|k| diff.column(k).norm()).fold(0.0, f64::max)
    }

    pub fn adjoint(&self) -> OperatorSpan {
        let gens: Vec<CMat> = self.basis().iter().map(|m| m.adjoint()).collect();
        let (dom, cod) = (self.cod.clone(), self.dom.clone());
        let d = dom.dim() * cod.dim();
        let mut q = CMat::zeros(d, gens.len());
        for (k, g) in gens.iter().enumerate() {
            q.column_mut(k).copy_from_slice(g.as_slice());
        }
        OperatorSpan { dom, cod, generators: gens, q }
    }

    /// Span of the union of both generator sets.
    pub fn sum(&self, other: &OperatorSpan, tol: f64) -> Result<OperatorSpan> {
        require_same(&self.dom, &other.dom, "span sum")?;
        require_same(&self.cod, &other.cod, "span sum")?;
        let mut stacked = CMat::zeros(self.q.nrows(), self.rank() + other.rank());
        stacked.columns_mut(0, self.rank()).copy_from(&self.q);
        stacked.columns_mut(self.rank(), other.rank()).copy_from(&other.q);
        Ok(OperatorSpan::from_orthonormal(self.dom.clone(), self.cod.clone(), orth(&stacked, tol)))
    }

    /// Span of `f(b)` over the basis elements `b`.
    pub fn map_span(
        &self,
        dom: Arc<HilbertSpace>,
        cod: Arc<HilbertSpace>,
        tol: f64,
        f: impl Fn(&CMat) -> CMat,
    ) -> OperatorSpan {
        let gens = self.basis().iter().map(f).collect();
        OperatorSpan::from_matrices(dom, cod, gens, tol)
    }
}

/// Realizes the closed linear span `[Y]` of a list of operators.
pub fn span_normalize(generators: &[Operator], tol: f64) -> Result<OperatorSpan> {
    let Some(first) = generators.first() else {
        return Err(Error::Shape("span_normalize needs the ambient spaces; use span_normalize_in".into()));
    };
    span_normalize_in(first.dom.clone(), first.cod.clone(), generators, tol)
}

/// Like [`span_normalize`] but with explicit ambient spaces, so an empty list
/// yields the zero span.
pub fn span_normalize_in(
    dom: Arc<HilbertSpace>,
    cod: Arc<HilbertSpace>,
    generators: &[Operator],
    tol: f64,
) -> Result<OperatorSpan> {
    for g in generators {
        require_same(&dom, &g.dom, "span_normalize")?;
        require_same(&cod, &g.cod, "span_normalize")?;
    }
    let gens = generators.iter().map(|g| g.mat.clone()).collect();
    Ok(OperatorSpan::from_matrices(dom, cod, gens, tol))
}

/// `[ΓΔ]`: the span of all products `γ δ`.
pub fn span_product(gamma: &OperatorSpan, delta: &OperatorSpan, tol: f64) -> Result<OperatorSpan> {
    require_same(&gamma.dom, &delta.cod, "span_product")?;
    let gb = gamma.basis();
    let db = delta.basis();
    let mut gens = Vec::with_capacity(gb.len() * db.len());
    for g in &gb {
        for d in &db {
            gens.push(g * d);
        }
    }
    Ok(OperatorSpan::from_matrices(delta.dom.clone(), gamma.cod.clone(), gens, tol))
}

/// Mutual inclusion test; returns the larger of the two projection residuals.
pub fn span_equal(s: &OperatorSpan, t: &OperatorSpan, tol: f64) -> (bool, f64) {
    if !HilbertSpace::same(&s.dom, &t.dom) || !HilbertSpace::same(&s.cod, &t.cod) {
        return (false, f64::INFINITY);
    }
    let r = s.inclusion_residual(t).max(t.inclusion_residual(s));
    (r <= tol, r)
}

/// Intersection of two spans in the same ambient space.
pub fn span_intersect(s: &OperatorSpan, t: &OperatorSpan, tol: f64) -> Result<OperatorSpan> {
    require_same(&s.dom, &t.dom, "span_intersect")?;
    require_same(&s.cod, &t.cod, "span_intersect")?;
    if s.rank() == 0 || t.rank() == 0 {
        return Ok(OperatorSpan::zero(s.dom.clone(), s.cod.clone()));
    }
    // x in S lies in T iff (1 - P_T) Q_S x = 0; singular values are the sines
    // of the principal angles.
    let outside = &s.q - &t.q * (t.q.adjoint() * &s.q);
    let svd = svd(&outside);
    let vt = svd.vt;
    let sv = &svd.s;
    let mut coeffs: Vec<CVec> = Vec::new();
    for i in 0..sv.len() {
        if sv[i] <= tol {
            coeffs.push(vt.row(i).adjoint());
        }
    }
    let mut basis = CMat::zeros(s.q.nrows(), coeffs.len());
    for (k, x) in coeffs.iter().enumerate() {
        basis.set_column(k, &(&s.q * x));
    }
    Ok(OperatorSpan::from_orthonormal(s.dom.clone(), s.cod.clone(), orth(&basis, tol)))
}

/// A linear condition on an unknown operator `T: dom -> cod`.
#[derive(Debug, Clone)]
pub enum Constraint {
    /// `left · T · right ∈ target`; `left = None` means the identity.
    Sandwich { left: Option<CMat>, right: CMat, target: OperatorSpan },
    /// `T* · gamma ∈ target`.
    AdjointMapsInto { gamma: CMat, target: OperatorSpan },
    /// `a · T = T · b`.
    Intertwines { a: CMat, b: CMat },
}

impl Constraint {
    /// `T · gamma ∈ target`.
    pub fn maps_into(gamma: CMat, target: OperatorSpan) -> Self {
        Constraint::Sandwich { left: None, right: gamma, target }
    }

    fn rows(&self, cod: usize, dom: usize) -> Result<CMat> {
        match self {
            Constraint::Sandwich { left, right, target } => {
                let l = left.clone().unwrap_or_else(|| CMat::identity(cod, cod));
                if l.ncols() != cod || right.nrows() != dom {
                    return Err(Error::Shape("sandwich constraint".into()));
                }
                if target.cod.dim() != l.nrows() || target.dom.dim() != right.ncols() {
                    return Err(Error::Shape("sandwich constraint target".into()));
                }
                let y = right.transpose().kronecker(&l);
                let q = &target.q;
                Ok(&y - q * (q.adjoint() * &y))
            }
            Constraint::AdjointMapsInto { gamma, target } => {
                if gamma.nrows() != cod {
                    return Err(Error::Shape("adjoint constraint".into()));
                }
                if target.cod.dim() != dom || target.dom.dim() != gamma.ncols() {
                    return Err(Error::Shape("adjoint constraint target".into()));
                }
                // conj(T* γ) = T^T conj(γ); vec(T^T conj γ) = (γ^H ⊗ 1) vec(T^T)
                let y = gamma.adjoint().kronecker(&CMat::identity(dom, dom));
                let mut yk = CMat::zeros(y.nrows(), cod * dom);
                for cc in 0..cod {
                    for a in 0..dom {
                        yk.set_column(a * cod + cc, &y.column(cc * dom + a));
                    }
                }
                let qc = target.q.map(|z| z.conj());
                Ok(&yk - &qc * (target.q.transpose() * &yk))
            }
            Constraint::Intertwines { a, b } => {
                if a.nrows() != cod || a.ncols() != cod || b.nrows() != dom || b.ncols() != dom {
                    return Err(Error::Shape("intertwining constraint".into()));
                }
                Ok(CMat::identity(dom, dom).kronecker(a) - b.transpose().kronecker(&CMat::identity(cod, cod)))
            }
        }
    }
}

/// The subspace of operators `dom -> cod` satisfying every constraint.
pub fn solve_operator_constraints(
    dom: Arc<HilbertSpace>,
    cod: Arc<HilbertSpace>,
    constraints: &[Constraint],
    tol: f64,
) -> Result<OperatorSpan> {
    let n = dom.dim() * cod.dim();
    let mut blocks = Vec::with_capacity(constraints.len());
    for con in constraints {
        blocks.push(con.rows(cod.dim(), dom.dim())?);
    }
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut a = CMat::zeros(total, n);
    let mut at = 0;
    for b in blocks {
        a.rows_mut(at, b.nrows()).copy_from(&b);
        at += b.nrows();
    }
    let q = null_space(&a, tol);
    Ok(OperatorSpan::from_orthonormal(dom, cod, q))
}

/// Result of factoring out the null space of a positive semidefinite Gram
/// matrix.
#[derive(Debug, Clone)]
pub struct GramQuotient {
    pub space: Arc<HilbertSpace>,
    /// `rank x family` matrix sending formal combinations to vectors.
    pub synthesis: CMat,
    /// Right inverse of `synthesis`.
    pub right_inverse: CMat,
}

pub fn gram_quotient(name: impl Into<String>, gram: &CMat, tol: f64) -> Result<GramQuotient> {
    let n = gram.nrows();
    if gram.ncols() != n {
        return Err(Error::Shape("gram matrix must be square".into()));
    }
    let scale = gram.norm().max(f64::MIN_POSITIVE);
    let herm = (gram - gram.adjoint()).norm() / scale;
    if herm > tol {
        return Err(Error::check("gram hermiticity", herm, tol));
    }
    let h = (gram + gram.adjoint()) * c(0.5);
    let (values, vectors) = hermitian_eigen(&h);
    let lmax = values.max();
    let lmin = values.min();
    if lmin < -tol * lmax.abs().max(1.0) {
        return Err(Error::NotPsd { min_eigenvalue: lmin });
    }
    let mut keep: Vec<usize> = (0..n).filter(|&i| values[i] > tol * lmax).collect();
    keep.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    let r = keep.len();
    let mut synthesis = CMat::zeros(r, n);
    let mut right_inverse = CMat::zeros(n, r);
    for (k, &i) in keep.iter().enumerate() {
        let l = values[i];
        let v = vectors.column(i);
        synthesis.set_row(k, &(v.adjoint() * c(l.sqrt())));
        right_inverse.set_column(k, &(v * c(1.0 / l.sqrt())));
    }
    if r == 0 {
        return Err(Error::Invalid("gram matrix is zero".into()));
    }
    let space = HilbertSpace::euclidean(name, r)?;
    Ok(GramQuotient { space, synthesis, right_inverse })
}
