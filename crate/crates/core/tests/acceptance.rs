//! The ten acceptance criteria, one PASS/FAIL line each.
//!
//! Bundles are built once and shared; expected values come from formulas
//! evaluated here, not from the library's own identification code.

use std::sync::Arc;
use std::time::{Duration, Instant};

use cstar_pmu::corpus::{corpus, CorpusInstance};
use cstar_pmu::cstar_base::{base_factorization, check_factorization, Factorization};
use cstar_pmu::fiber::{induce, induce_generated, induce_sandwich};
use cstar_pmu::groupoid_pmu::{build_bundle, center_dim, GroupoidUnitaryBundle};
use cstar_pmu::linalg::{c, span_equal, unitarity_defect, CMat, HilbertSpace, Operator, C};
use cstar_pmu::pmu::{check_opposite, check_regular, delta, delta_hat, leg_a_span, leg_hat_span, verify_hopf};
use cstar_pmu::rtp::{associator, build_rtp, flip, unit_left, unit_right, RelativeTensorSpace};

mod common;

use common::{induction_instance, span_of};

const TOL: f64 = 1e-9;

struct Built {
    inst: CorpusInstance,
    bundle: GroupoidUnitaryBundle,
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

/// Runs `check` on every instance and keeps the worst residual.
fn over_all(built: &[Built], bound: f64, mut check: impl FnMut(&Built) -> Result<f64, String>) -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for b in built {
        match check(b) {
            Ok(r) if r <= bound => worst = worst.max(r),
            Ok(r) => {
                worst = worst.max(r);
                failures.push(format!("{} residual {r:.3e}", b.inst.id));
            }
            Err(e) => failures.push(format!("{}: {e}", b.inst.id)),
        }
    }
    if failures.is_empty() {
        outcome(true, format!("worst {worst:.3e} <= {bound:e} on {} instances", built.len()))
    } else {
        outcome(false, failures.join("; "))
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn delta_fn(n: usize, x: usize) -> Vec<C> {
    (0..n).map(|y| c(if x == y { 1.0 } else { 0.0 })).collect()
}

fn mult(f: &[C]) -> CMat {
    CMat::from_fn(f.len(), f.len(), |i, j| if i == j { f[i] } else { c(0.0) })
}

/// `(L(g)ζ)(y) = Σ_{x ∈ G^{r(y)}} g(x) D^{-1/2}(x) ζ(x⁻¹y) λ(x)`, in orthonormal coordinates.
fn conv(b: &GroupoidUnitaryBundle, f: &[C]) -> CMat {
    let g = &b.groupoid;
    let n = g.len();
    let mut nat = CMat::zeros(n, n);
    for y in 0..n {
        for (x, fx) in f.iter().enumerate() {
            if g.r(x) != g.r(y) {
                continue;
            }
            let z = g.compose(g.inv(x), y).unwrap();
            nat[(y, z)] += fx * c(b.qim.d[x].powf(-0.5) * b.haar.weights[x]);
        }
    }
    Operator::from_natural(b.h().clone(), b.h().clone(), nat).unwrap().into_matrix()
}

fn crit1_pentagon(built: &[Built], elapsed: Duration) -> Outcome {
    let o = over_all(built, 1e-10, |b| Ok(b.bundle.v.report().ok_or("not verified")?.pentagon));
    let fast = elapsed.as_secs_f64() < 60.0;
    outcome(o.passed && fast, format!("{}; build and pentagon {:.1} s (< 60 s)", o.detail, elapsed.as_secs_f64()))
}

fn crit2_intertwining(built: &[Built]) -> Outcome {
    over_all(built, TOL, |b| {
        let r = b.bundle.v.report().ok_or("not verified")?;
        if r.intertwining.len() != 4 {
            return Err(format!("{} laws", r.intertwining.len()));
        }
        Ok(r.intertwining.iter().fold(0.0, |m, x| m.max(*x)))
    })
}

fn crit3_regularity(built: &[Built]) -> Outcome {
    over_all(built, TOL, |b| {
        let r = check_regular(&b.bundle.v, TOL).map_err(err)?;
        if !r.regular {
            return Err(format!("not regular, residual {:.3e}", r.residual));
        }
        Ok(r.residual)
    })
}

fn crit4_legs(built: &[Built]) -> Outcome {
    over_all(built, TOL, |b| {
        let g = &b.bundle.groupoid;
        let n = g.len();
        let h = b.bundle.h();
        let hat = leg_hat_span(&b.bundle.v, TOL);
        let a = leg_a_span(&b.bundle.v, TOL);
        if hat.rank() != n {
            return Err(format!("dim A-hat {} != |G| {n}", hat.rank()));
        }
        let m_span = span_of(h, (0..n).map(|x| mult(&delta_fn(n, x))).collect());
        let l_span = span_of(h, (0..n).map(|x| conv(&b.bundle, &delta_fn(n, x))).collect());
        let (_, r_hat) = span_equal(&hat, &m_span, TOL);
        let (_, r_a) = span_equal(&a, &l_span, TOL);
        let name = b.inst.id.trim_end_matches("-skew");
        if matches!(name, "pair2" | "pair3") {
            let k = if name == "pair2" { 2 } else { 3 };
            if a.rank() != k * k {
                return Err(format!("dim A {} != {}", a.rank(), k * k));
            }
            let z = center_dim(&a, TOL);
            if z != 1 {
                return Err(format!("center of A has dim {z}"));
            }
        }
        if g.num_units() == 1 && a.rank() != n {
            return Err(format!("group: dim A {} != |G| {n}", a.rank()));
        }
        Ok(r_hat.max(r_a))
    })
}

fn crit5_formulas(built: &[Built]) -> Outcome {
    let chosen: Vec<Built> = built
        .iter()
        .filter(|b| matches!(b.inst.id.as_str(), "pair2" | "pair2-skew" | "s3" | "s3-skew"))
        .map(|b| Built { inst: b.inst.clone(), bundle: b.bundle.clone() })
        .collect();
    over_all(&chosen, 1e-10, |b| {
        let bu = &b.bundle;
        let g = &bu.groupoid;
        let n = g.len();
        let mut worst = 0.0f64;
        for x in 0..n {
            let f = delta_fn(n, x);
            let got = bu.ident_sr.to_natural(&delta_hat(&bu.v, &mult(&f), TOL).map_err(err)?).map_err(err)?;
            let pairs = &bu.ident_sr.pairs;
            let want = CMat::from_fn(pairs.len(), pairs.len(), |i, j| {
                if i == j {
                    let (p, q) = pairs[i];
                    f[g.compose(p, q).unwrap()]
                } else {
                    c(0.0)
                }
            });
            worst = worst.max(max_entry(&(got - want)));

            let got = bu.ident_rr.to_natural(&delta(&bu.v, &conv(bu, &f), TOL).map_err(err)?).map_err(err)?;
            let pairs = &bu.ident_rr.pairs;
            let mut want = CMat::zeros(pairs.len(), pairs.len());
            for (row, &(p, q)) in pairs.iter().enumerate() {
                for (z, fz) in f.iter().enumerate() {
                    if g.r(z) != g.r(p) {
                        continue;
                    }
                    let zi = g.inv(z);
                    let target = (g.compose(zi, p).unwrap(), g.compose(zi, q).unwrap());
                    let col = pairs.iter().position(|pq| *pq == target).unwrap();
                    want[(row, col)] += fz * c(bu.qim.d[z].powf(-0.5) * bu.haar.weights[z]);
                }
            }
            worst = worst.max(max_entry(&(got - want)));
        }
        Ok(worst)
    })
}

fn crit6_hopf(built: &[Built]) -> Outcome {
    over_all(built, TOL, |b| {
        let audit = verify_hopf(&b.bundle.v, TOL).map_err(err)?;
        if !(audit.passed && audit.hat.passed && audit.a.passed) {
            return Err(format!("audit failed: {:?}", audit));
        }
        Ok(audit.hat.coassociativity.max(audit.a.coassociativity))
    })
}

fn crit7_induction() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut shapes = Vec::new();
    for seed in 1..=5u64 {
        let inst = induction_instance(seed);
        shapes.push(format!("{}/{}/{}", inst.gamma.dom().dim(), inst.gamma.cod().dim(), inst.expected.rank()));
        let res = (|| -> Result<f64, String> {
            let one = induce(&inst.gamma, &inst.a, TOL).map_err(err)?;
            let two = induce_generated(&inst.gamma, &inst.a, TOL).map_err(err)?;
            let three = induce_sandwich(&inst.gamma, &inst.a, TOL).map_err(err)?;
            let mut r = 0.0f64;
            for (x, y) in [(&one, &two), (&two, &three), (&one, &inst.expected)] {
                r = r.max(span_equal(x, y, TOL).1);
            }
            if one.rank() != inst.expected.rank() {
                return Err(format!("dim {} != expected {}", one.rank(), inst.expected.rank()));
            }
            Ok(r)
        })();
        match res {
            Ok(r) if r <= TOL => worst = worst.max(r),
            Ok(r) => failures.push(format!("seed {seed} residual {r:.3e}")),
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    if failures.is_empty() {
        outcome(true, format!("worst {worst:.3e} <= {TOL:e} on 5 random instances (dim H/K/Ind: {})", shapes.join(" ")))
    } else {
        outcome(false, failures.join("; "))
    }
}

/// Span residual of `U_*(from) = to`.
fn transported(
    u: &CMat,
    src: &RelativeTensorSpace,
    to_space: &Arc<HilbertSpace>,
    from: &Factorization,
    to: &Factorization,
) -> Result<f64, String> {
    let op = Operator::new(src.space().clone(), to_space.clone(), u.clone()).map_err(err)?;
    let pushed = from.transport(&op, TOL).map_err(err)?;
    Ok(span_equal(pushed.span(), to.span(), TOL).1)
}

fn canonical_maps(b: &GroupoidUnitaryBundle) -> Result<f64, String> {
    let s = b.v.setting();
    let (alpha, beta_hat) = (s.alpha(), s.beta_hat());
    let (src, rng) = (s.source(), s.range());
    let mut r = 0.0f64;

    // Σ: H β̂⊗α H → H α⊗β̂ H
    let flipped = build_rtp("flipped", alpha, beta_hat, TOL).map_err(err)?;
    let sigma = flip(src, &flipped, TOL).map_err(err)?;
    let back = flip(&flipped, src, TOL).map_err(err)?;
    r = r.max(unitarity_defect(&sigma));
    r = r.max((&back * &sigma - CMat::identity(src.dim(), src.dim())).norm());
    let gl = src.push_left(alpha, TOL).map_err(err)?;
    r = r.max(transported(&sigma, src, flipped.space(), &gl, &flipped.push_right(alpha, TOL).map_err(err)?)?);
    let dr = src.push_right(beta_hat, TOL).map_err(err)?;
    r = r.max(transported(&sigma, src, flipped.space(), &dr, &flipped.push_left(beta_hat, TOL).map_err(err)?)?);

    // Φ: 𝔥 𝔅⊗α H → H and Ψ: H α⊗𝔅† 𝔥 → H
    let b_left = base_factorization(alpha.base(), TOL).map_err(err)?;
    let t = build_rtp("hH", &b_left, alpha, TOL).map_err(err)?;
    let phi = unit_left(&t, TOL).map_err(err)?;
    r = r.max(unitarity_defect(&phi));
    r = r.max(transported(&phi, &t, alpha.target(), &t.push_right(beta_hat, TOL).map_err(err)?, beta_hat)?);
    let b_dag = check_factorization(alpha.base().b_dag().clone(), &alpha.base().opposite(), TOL).map_err(err)?;
    r = r.max(transported(&phi, &t, alpha.target(), &t.push_left(&b_dag, TOL).map_err(err)?, alpha)?);

    let b_right = base_factorization(&alpha.base().opposite(), TOL).map_err(err)?;
    let t = build_rtp("Hh", alpha, &b_right, TOL).map_err(err)?;
    let psi = unit_right(&t, TOL).map_err(err)?;
    r = r.max(unitarity_defect(&psi));
    let b_plain = check_factorization(alpha.base().b().clone(), alpha.base(), TOL).map_err(err)?;
    r = r.max(transported(&psi, &t, alpha.target(), &t.push_right(&b_plain, TOL).map_err(err)?, alpha)?);
    r = r.max(transported(&psi, &t, alpha.target(), &t.push_left(beta_hat, TOL).map_err(err)?, beta_hat)?);

    // Θ on (H α⊗α H) α▷α⊗α H, where β̂ is compatible with every factor
    let lhs = build_rtp("(HH)H", &rng.push_right(alpha, TOL).map_err(err)?, alpha, TOL).map_err(err)?;
    let rhs = build_rtp("H(HH)", alpha, &rng.push_left(alpha, TOL).map_err(err)?, TOL).map_err(err)?;
    let theta = associator(rng, rng, &lhs, &rhs, TOL).map_err(err)?;
    r = r.max(unitarity_defect(&theta));
    let e = beta_hat;
    // (ε◁β)◁δ ↦ ε◁(β◁δ)
    let from = lhs.push_left(&rng.push_left(e, TOL).map_err(err)?, TOL).map_err(err)?;
    let to = rhs.push_left(e, TOL).map_err(err)?;
    r = r.max(transported(&theta, &lhs, rhs.space(), &from, &to)?);
    // (α▷ζ)◁δ ↦ α▷(ζ◁δ)
    let from = lhs.push_left(&rng.push_right(e, TOL).map_err(err)?, TOL).map_err(err)?;
    let to = rhs.push_right(&rng.push_left(e, TOL).map_err(err)?, TOL).map_err(err)?;
    r = r.max(transported(&theta, &lhs, rhs.space(), &from, &to)?);
    // (α▷γ)▷φ ↦ α▷(γ▷φ)
    let from = lhs.push_right(e, TOL).map_err(err)?;
    let to = rhs.push_right(&rng.push_right(e, TOL).map_err(err)?, TOL).map_err(err)?;
    r = r.max(transported(&theta, &lhs, rhs.space(), &from, &to)?);
    Ok(r)
}

fn crit8_canonical(built: &[Built]) -> Outcome {
    over_all(built, TOL, |b| canonical_maps(&b.bundle))
}

fn crit9_opposite(built: &[Built]) -> Outcome {
    over_all(built, TOL, |b| {
        let r = check_opposite(&b.bundle.v, TOL).map_err(err)?;
        if !r.passed || !r.regular || !r.regular_op {
            return Err(format!("{r:?}"));
        }
        Ok(r.hat_vs_a_star.max(r.a_vs_hat_star).max(r.pmu.pentagon))
    })
}

fn crit10_permutation(built: &[Built]) -> Outcome {
    let cyclic: Vec<Built> = built
        .iter()
        .filter(|b| b.inst.id.starts_with('z'))
        .map(|b| Built { inst: b.inst.clone(), bundle: b.bundle.clone() })
        .collect();
    over_all(&cyclic, 1e-14, |b| {
        let bu = &b.bundle;
        let n = bu.groupoid.len();
        let (sr, rr) = (&bu.ident_sr, &bu.ident_rr);
        let m = &rr.unitary * bu.v.matrix() * sr.unitary.adjoint();
        let got = Operator::new(sr.space.clone(), rr.space.clone(), m).map_err(err)?.natural();
        let residue: Vec<usize> = (0..n).map(|x| bu.groupoid.arrow(x).parse().unwrap()).collect();
        let arrow = |k: usize| residue.iter().position(|&r| r == k).unwrap();
        let mut want = CMat::zeros(rr.pairs.len(), sr.pairs.len());
        for x in 0..n {
            for y in 0..n {
                let xy = arrow((residue[x] + residue[y]) % n);
                let col = sr.pairs.iter().position(|p| *p == (x, y)).ok_or("pair missing")?;
                let row = rr.pairs.iter().position(|p| *p == (x, xy)).ok_or("pair missing")?;
                want[(row, col)] = c(1.0);
            }
        }
        Ok(max_entry(&(got - want)))
    })
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let built: Vec<Built> = corpus()
        .into_iter()
        .map(|inst| {
            let bundle =
                build_bundle(&inst.groupoid, &inst.haar, &inst.mu, TOL).unwrap_or_else(|e| panic!("{}: {e}", inst.id));
            Built { inst, bundle }
        })
        .collect();
    let build_time = start.elapsed();

    let results = [
        ("pentagon", crit1_pentagon(&built, build_time)),
        ("intertwining", crit2_intertwining(&built)),
        ("regularity", crit3_regularity(&built)),
        ("leg identification", crit4_legs(&built)),
        ("comultiplication formulas", crit5_formulas(&built)),
        ("hopf audit", crit6_hopf(&built)),
        ("induction characterizations", crit7_induction()),
        ("rtp canonical maps", crit8_canonical(&built)),
        ("legs symmetry and opposite", crit9_opposite(&built)),
        ("cyclic permutation oracle", crit10_permutation(&built)),
    ];
    for (i, (name, o)) in results.iter().enumerate() {
        println!("{} {:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

fn max_entry(m: &CMat) -> f64 {
    m.iter().fold(0.0, |r, z| r.max(z.norm()))
}
