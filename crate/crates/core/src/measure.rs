//! Haar systems and quasi-invariant measures on finite groupoids.

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, PairMode};

/// Left Haar system, stored as `λ^{r(x)}({x})` per arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarSystem {
    pub weights: Vec<f64>,
}

impl HaarSystem {
    pub fn new(g: &FiniteGroupoid, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != g.len() {
            return Err(Error::Shape(format!("{} Haar weights for {} arrows", weights.len(), g.len())));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::Invalid("Haar weights must be positive".into()));
        }
        Ok(HaarSystem { weights })
    }
}

pub fn counting_haar(g: &FiniteGroupoid) -> HaarSystem {
    HaarSystem { weights: vec![1.0; g.len()] }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub max_residual: f64,
    /// `(x, z)` pairs where the identity fails for the delta function at `z`.
    pub violations: Vec<(usize, usize)>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tests `Σ_{y ∈ G^{s(x)}} f(xy) λ(y) = Σ_{z ∈ G^{r(x)}} f(z) λ(z)` for all
/// arrows `x` and delta functions `f = δ_z`.
pub fn check_left_invariance(g: &FiniteGroupoid, haar: &HaarSystem, tol: f64) -> InvarianceReport {
    let mut max_residual = 0.0f64;
    let mut violations = Vec::new();
    for x in 0..g.len() {
        let left_fiber = g.range_fiber(g.s_unit(x));
        for z in g.range_fiber(g.r_unit(x)) {
            let lhs: f64 = left_fiber.iter().filter(|&&y| g.compose(x, y) == Some(z)).map(|&y| haar.weights[y]).sum();
            let rhs = haar.weights[z];
            let r = (lhs - rhs).abs();
            max_residual = max_residual.max(r);
            if r > tol * rhs.max(1.0) {
                violations.push((x, z));
            }
        }
    }
    InvarianceReport { max_residual, violations }
}

/// `ν`, `ν⁻¹` and `D = dν/dν⁻¹` as per-arrow tables.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiInvariantMeasure {
    /// Weight per unit position.
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub nu_inv: Vec<f64>,
    pub d: Vec<f64>,
}

pub fn build_measure(g: &FiniteGroupoid, haar: &HaarSystem, mu: &[f64]) -> Result<QuasiInvariantMeasure> {
    if mu.len() != g.num_units() {
        return Err(Error::Shape(format!("{} unit weights for {} units", mu.len(), g.num_units())));
    }
    if mu.iter().any(|m| !m.is_finite() || *m <= 0.0) {
        return Err(Error::Invalid("unit measure must be strictly positive".into()));
    }
    if haar.weights.len() != g.len() {
        return Err(Error::Shape("Haar system does not match the groupoid".into()));
    }
    let nu: Vec<f64> = (0..g.len()).map(|x| mu[g.r_unit(x)] * haar.weights[x]).collect();
    let nu_inv: Vec<f64> = (0..g.len()).map(|x| nu[g.inv(x)]).collect();
    if nu.iter().zip(&nu_inv).any(|(a, b)| (*a > 0.0) != (*b > 0.0)) {
        return Err(Error::Invalid("ν and ν⁻¹ have different supports".into()));
    }
    let d = nu.iter().zip(&nu_inv).map(|(a, b)| a / b).collect();
    Ok(QuasiInvariantMeasure { mu: mu.to_vec(), nu, nu_inv, d })
}

/// `max |D(xy) - D(x) D(y)|` over composable pairs.
pub fn cocycle_residual(g: &FiniteGroupoid, d: &[f64]) -> f64 {
    g.composable_pairs(PairMode::SourceRange)
        .into_iter()
        .map(|(x, y)| (d[g.compose(x, y).expect("composable")] - d[x] * d[y]).abs())
        .fold(0.0, f64::max)
}

pub fn check_cocycle(g: &FiniteGroupoid, m: &QuasiInvariantMeasure) -> f64 {
    cocycle_residual(g, &m.d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{group_as_groupoid, group_bundle, pair_groupoid, GroupTable};

    #[test]
    fn counting_is_invariant() {
        let gs = [
            pair_groupoid(2).unwrap(),
            group_as_groupoid(&GroupTable::symmetric3()).unwrap(),
            group_bundle(&[GroupTable::cyclic(2), GroupTable::cyclic(3)]).unwrap(),
        ];
        for g in &gs {
            let rep = check_left_invariance(g, &counting_haar(g), 0.0);
            assert!(rep.passed());
            assert_eq!(rep.max_residual, 0.0);
        }
    }

    #[test]
    fn skewed_weight_breaks_invariance() {
        let g = pair_groupoid(2).unwrap();
        let mut w = vec![1.0; 4];
        w[g.arrow_index("(1,2)").unwrap()] = 2.0;
        let rep = check_left_invariance(&g, &HaarSystem::new(&g, w).unwrap(), 1e-12);
        assert!(!rep.passed());
        assert!((rep.max_residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_weight_on_group() {
        let g = group_as_groupoid(&GroupTable::cyclic(4)).unwrap();
        let rep = check_left_invariance(&g, &HaarSystem::new(&g, vec![2.5; 4]).unwrap(), 1e-12);
        assert!(rep.passed());
    }

    #[test]
    fn derivative_on_pair_groupoid() {
        let g = pair_groupoid(2).unwrap();
        let mu = [1.0 / 3.0, 2.0 / 3.0];
        let m = build_measure(&g, &counting_haar(&g), &mu).unwrap();
        for x in 0..g.len() {
            // oracle: ν({x}) = μ(r(x)), ν⁻¹({x}) = μ(s(x))
            let oracle = mu[g.r_unit(x)] / mu[g.s_unit(x)];
            assert!((m.d[x] - oracle).abs() < 1e-15);
        }
        assert!((m.d[g.arrow_index("(1,2)").unwrap()] - 0.5).abs() < 1e-15);
        assert!(check_cocycle(&g, &m) < 1e-15);
        let total: f64 = m.nu.iter().sum();
        let oracle: f64 = (0..2).map(|u| mu[u] * g.range_fiber(u).len() as f64).sum();
        assert!((total - oracle).abs() < 1e-15);
    }

    #[test]
    fn degenerate_cases() {
        let g = group_as_groupoid(&GroupTable::symmetric3()).unwrap();
        let m = build_measure(&g, &counting_haar(&g), &[1.0]).unwrap();
        assert!(m.d.iter().all(|&d| d == 1.0));
        let p3 = pair_groupoid(3).unwrap();
        let m = build_measure(&p3, &counting_haar(&p3), &[0.2; 3]).unwrap();
        assert!(m.d.iter().all(|&d| (d - 1.0).abs() < 1e-15));
        assert!(build_measure(&p3, &counting_haar(&p3), &[0.2, 0.0, 0.1]).is_err());
        assert!(build_measure(&p3, &counting_haar(&p3), &[0.2, -1.0, 0.1]).is_err());
    }

    #[test]
    fn perturbed_derivative_fails_cocycle() {
        let g = pair_groupoid(2).unwrap();
        let m = build_measure(&g, &counting_haar(&g), &[0.25, 0.75]).unwrap();
        let mut d = m.d.clone();
        d[1] *= 1.1;
        assert!(cocycle_residual(&g, &d) > 1e-3);
    }
}
