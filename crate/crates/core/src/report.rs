//! The verification pipeline behind the command line, with a serializable
//! report. Check order is fixed, so identical inputs give identical reports.

use std::time::Instant;

use serde::Serialize;

use crate::corpus;
use crate::error::{Error, Result};
use crate::groupoid::{validate, FiniteGroupoid, GroupoidData};
use crate::groupoid_pmu::{assemble_bundle, identify_legs, GroupoidUnitaryBundle};
use crate::measure::{build_measure, check_cocycle, check_left_invariance, HaarSystem};
use crate::pmu::{check_opposite, check_regular, verify_hopf};
use crate::specfile::GroupoidFile;

/// Bump when fields change meaning or disappear.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    CheckGroupoid,
    BuildPmu,
    Legs,
    Hopf,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CheckGroupoid => "check-groupoid",
            Command::BuildPmu => "build-pmu",
            Command::Legs => "legs",
            Command::Hopf => "hopf",
            Command::Report => "report",
        }
    }

    fn wants_legs(self) -> bool {
        matches!(self, Command::Legs | Command::Hopf | Command::Report)
    }

    fn wants_hopf(self) -> bool {
        matches!(self, Command::Hopf | Command::Report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not run because an earlier stage failed.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub name: &'static str,
    pub status: Status,
    /// `None` when skipped.
    pub residual: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Derived {
    pub arrows: usize,
    pub units: usize,
    pub dim_h: Option<usize>,
    /// `H β̂⊗α H`.
    pub dim_source: Option<usize>,
    /// `H α⊗β H`.
    pub dim_range: Option<usize>,
    pub dim_triple: Option<usize>,
    pub dim_hat: Option<usize>,
    pub dim_a: Option<usize>,
    pub a_center_dim: Option<usize>,
    pub regular: Option<bool>,
    pub hopf: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub instance: String,
    pub command: Command,
    pub tolerance: f64,
    pub checks: Vec<CheckEntry>,
    pub derived: Derived,
    pub passed: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Groupoid data with unit and Haar weights, not yet validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub data: GroupoidData,
    pub mu: Vec<f64>,
    pub haar: Vec<f64>,
}

impl Instance {
    pub fn builtin(id: &str) -> Option<Self> {
        let c = corpus::instance(id)?;
        Some(Instance { id: c.id, data: c.groupoid.data().clone(), mu: c.mu, haar: c.haar.weights })
    }

    pub fn from_file(id: impl Into<String>, file: GroupoidFile) -> Self {
        Instance { id: id.into(), data: file.data, mu: file.measure, haar: file.haar }
    }
}

/// Names of the checks each command runs, in report order.
pub fn check_names(command: Command) -> Vec<&'static str> {
    let mut names = vec![GROUPOID_AXIOMS, HAAR_INVARIANCE, QUASI_INVARIANCE, COCYCLE];
    if command == Command::CheckGroupoid {
        return names;
    }
    names.extend([EMBEDDINGS, CONSTRUCTION, UNITARITY, INTERTWINING, PENTAGON, REGULARITY]);
    if command.wants_legs() {
        names.extend([LEG_HAT, LEG_A, DELTA_HAT_FORMULA, DELTA_FORMULA]);
    }
    if command.wants_hopf() {
        names.extend([HOPF_HAT, HOPF_A, HOPF_LEGS]);
    }
    if command == Command::Report {
        names.push(OPPOSITE);
    }
    names
}

pub const GROUPOID_AXIOMS: &str = "groupoid axioms";
pub const HAAR_INVARIANCE: &str = "haar left invariance";
pub const QUASI_INVARIANCE: &str = "quasi-invariant measure";
pub const COCYCLE: &str = "radon-nikodym cocycle";
pub const EMBEDDINGS: &str = "factorization embeddings";
pub const CONSTRUCTION: &str = "construction of V";
pub const UNITARITY: &str = "V unitary";
pub const INTERTWINING: &str = "intertwining";
pub const PENTAGON: &str = "pentagon";
pub const REGULARITY: &str = "regularity";
pub const LEG_HAT: &str = "leg A-hat = m(C(G))";
pub const LEG_A: &str = "leg A = C*_r(G)";
pub const DELTA_HAT_FORMULA: &str = "delta-hat pair formula";
pub const DELTA_FORMULA: &str = "delta convolution formula";
pub const HOPF_HAT: &str = "hopf bimodule A-hat";
pub const HOPF_A: &str = "hopf bimodule A";
pub const HOPF_LEGS: &str = "delta-hat on legs and slices";
pub const OPPOSITE: &str = "opposite unitary";

struct Recorder {
    tol: f64,
    timings: bool,
    checks: Vec<CheckEntry>,
}

impl Recorder {
    fn push(&mut self, name: &'static str, residual: f64, passed: bool, started: Instant, detail: Option<String>) {
        let status = if passed { Status::Pass } else { Status::Fail };
        let elapsed_ms = self.timings.then(|| started.elapsed().as_secs_f64() * 1e3);
        let residual = Some(if residual.is_finite() { residual } else { f64::MAX });
        self.checks.push(CheckEntry { name, status, residual, tolerance: self.tol, elapsed_ms, detail });
    }

    fn residual(&mut self, name: &'static str, residual: f64, started: Instant) {
        self.push(name, residual, residual <= self.tol, started, None);
    }

    fn error(&mut self, name: &'static str, err: &Error, started: Instant) -> Stopped {
        let residual = match err {
            Error::Check { residual, .. } => *residual,
            _ => 1.0,
        };
        self.push(name, residual, false, started, Some(err.to_string()));
        Stopped
    }
}

/// Runs the checks of `command` on `inst`. Failures become report entries;
/// checks after a failed stage are marked skipped.
pub fn run(command: Command, inst: &Instance, tol: f64, timings: bool) -> VerificationReport {
    let mut rec = Recorder { tol, timings, checks: Vec::new() };
    let mut derived = Derived { arrows: inst.data.arrows.len(), units: inst.data.units.len(), ..Derived::default() };
    let _ = stages(command, inst, &mut rec, &mut derived);
    let checks: Vec<CheckEntry> = check_names(command)
        .into_iter()
        .map(|name| {
            rec.checks.iter().find(|c| c.name == name).cloned().unwrap_or(CheckEntry {
                name,
                status: Status::Skipped,
                residual: None,
                tolerance: tol,
                elapsed_ms: None,
                detail: None,
            })
        })
        .collect();
    let passed = checks.iter().all(|c| c.status == Status::Pass);
    VerificationReport {
        schema_version: SCHEMA_VERSION,
        instance: inst.id.clone(),
        command,
        tolerance: tol,
        checks,
        derived,
        passed,
    }
}

/// Returned once a stage has failed; later checks are skipped.
struct Stopped;

fn stages(
    command: Command,
    inst: &Instance,
    rec: &mut Recorder,
    derived: &mut Derived,
) -> std::result::Result<(), Stopped> {
    let tol = rec.tol;
    let t = Instant::now();
    let validation = validate(&inst.data);
    let detail = (!validation.is_valid()).then(|| {
        let shown: Vec<String> = validation.violations.iter().take(5).map(|v| v.to_string()).collect();
        let more = validation.violations.len().saturating_sub(shown.len());
        let tail = if more > 0 { format!("; {more} more") } else { String::new() };
        format!("{}{tail}", shown.join("; "))
    });
    rec.push(GROUPOID_AXIOMS, validation.violations.len() as f64, validation.is_valid(), t, detail);
    let g = FiniteGroupoid::new(inst.data.clone()).map_err(|_| Stopped)?;

    let t = Instant::now();
    let haar = match HaarSystem::new(&g, inst.haar.clone()) {
        Ok(h) => h,
        Err(e) => return Err(rec.error(HAAR_INVARIANCE, &e, t)),
    };
    let inv = check_left_invariance(&g, &haar, tol);
    rec.push(HAAR_INVARIANCE, inv.max_residual, inv.passed(), t, None);

    let t = Instant::now();
    let qim = match build_measure(&g, &haar, &inst.mu) {
        Ok(q) => q,
        Err(e) => return Err(rec.error(QUASI_INVARIANCE, &e, t)),
    };
    rec.residual(QUASI_INVARIANCE, 0.0, t);
    let t = Instant::now();
    rec.residual(COCYCLE, check_cocycle(&g, &qim), t);
    if !inv.passed() {
        return Err(Stopped);
    }
    if command == Command::CheckGroupoid {
        return Ok(());
    }

    let bundle = build_stage(&g, &haar, inst, rec, derived)?;
    if command.wants_legs() {
        legs_stage(&bundle, rec, derived);
    }
    if command.wants_hopf() {
        let t = Instant::now();
        match verify_hopf(&bundle.v, tol) {
            Ok(audit) => {
                let hat = &audit.hat;
                let worst = |h: &crate::fiber::HopfReport| {
                    h.coassociativity.max(h.triple_containment).max(h.slice_identity).max(h.induced_residual)
                };
                rec.push(HOPF_HAT, worst(hat), hat.passed, t, None);
                rec.push(HOPF_A, worst(&audit.a), audit.a.passed, t, None);
                rec.residual(HOPF_LEGS, audit.legs_delta.max(audit.hat_slices).max(audit.transport), t);
                derived.hopf = Some(audit.passed);
            }
            Err(e) => {
                rec.error(HOPF_HAT, &e, t);
                derived.hopf = Some(false);
            }
        }
    }
    if command == Command::Report {
        let t = Instant::now();
        match check_opposite(&bundle.v, tol) {
            Ok(op) => {
                let pent = op.pmu.pentagon.max(op.pmu.unitarity);
                let worst = op.pmu.intertwining.iter().fold(pent, |m, r| m.max(*r));
                let residual = worst.max(op.hat_vs_a_star).max(op.a_vs_hat_star);
                rec.push(OPPOSITE, residual, op.passed, t, None);
            }
            Err(e) => {
                rec.error(OPPOSITE, &e, t);
            }
        }
    }
    Ok(())
}

fn build_stage(
    g: &FiniteGroupoid,
    haar: &HaarSystem,
    inst: &Instance,
    rec: &mut Recorder,
    derived: &mut Derived,
) -> std::result::Result<GroupoidUnitaryBundle, Stopped> {
    let tol = rec.tol;
    let t = Instant::now();
    let bundle = match assemble_bundle(g, haar, &inst.mu, tol) {
        Ok(b) => b,
        Err(e) => return Err(rec.error(CONSTRUCTION, &e, t)),
    };
    let e = bundle.embeddings.report;
    rec.residual(EMBEDDINGS, e.isometry_j.max(e.isometry_j_hat).max(e.rho_alpha).max(e.rho_beta_hat), t);
    rec.residual(CONSTRUCTION, 0.0, t);
    derived.dim_h = Some(bundle.h().dim());
    derived.dim_source = Some(bundle.v.setting().source().dim());
    derived.dim_range = Some(bundle.v.setting().range().dim());

    let t = Instant::now();
    let report = match bundle.v.verify(tol) {
        Ok(r) => r.clone(),
        Err(e) => match bundle.v.report() {
            Some(r) => r.clone(),
            None => return Err(rec.error(PENTAGON, &e, t)),
        },
    };
    derived.dim_triple = Some(report.triple_dim);
    rec.residual(UNITARITY, report.unitarity, t);
    rec.residual(INTERTWINING, report.intertwining.iter().fold(0.0, |m, r| m.max(*r)), t);
    rec.residual(PENTAGON, report.pentagon, t);
    if !report.passed {
        return Err(Stopped);
    }
    let t = Instant::now();
    match check_regular(&bundle.v, tol) {
        Ok(r) => {
            rec.push(REGULARITY, r.residual, r.regular, t, None);
            derived.regular = Some(r.regular);
        }
        Err(e) => {
            rec.error(REGULARITY, &e, t);
        }
    }
    Ok(bundle)
}

fn legs_stage(bundle: &GroupoidUnitaryBundle, rec: &mut Recorder, derived: &mut Derived) {
    let t = Instant::now();
    match identify_legs(bundle, rec.tol) {
        Ok(l) => {
            derived.dim_hat = Some(l.hat_dim);
            derived.dim_a = Some(l.a_dim);
            derived.a_center_dim = Some(l.a_center_dim);
            let n = l.arrows;
            let hat_ok = l.hat_dim == n && l.hat_residual.max(l.hat_commutator) <= rec.tol;
            let dim_note = |what: &str, d: usize| (d != n).then(|| format!("dim {what} = {d}, expected {n}"));
            rec.push(LEG_HAT, l.hat_residual.max(l.hat_commutator), hat_ok, t, dim_note("Â", l.hat_dim));
            let a_ok = l.a_dim == n && l.a_residual <= rec.tol;
            rec.push(LEG_A, l.a_residual, a_ok, t, dim_note("A", l.a_dim));
            rec.residual(DELTA_HAT_FORMULA, l.delta_hat_entry_error, t);
            rec.residual(DELTA_FORMULA, l.delta_entry_error, t);
        }
        Err(e) => {
            rec.error(LEG_HAT, &e, t);
        }
    }
}

/// Convenience for callers that already hold a validated corpus id.
pub fn run_builtin(command: Command, id: &str, tol: f64) -> Result<VerificationReport> {
    let inst = Instance::builtin(id).ok_or_else(|| Error::Invalid(format!("unknown built-in instance `{id}`")))?;
    Ok(run(command, &inst, tol, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfile::parse_groupoid_file;

    #[test]
    fn z2_report_passes_and_lists_every_check_once() {
        let r = run_builtin(Command::Report, "z2", 1e-9).unwrap();
        assert!(r.passed, "{r:#?}");
        let names: Vec<&str> = r.checks.iter().map(|c| c.name).collect();
        assert_eq!(names, check_names(Command::Report));
        assert_eq!(r.derived.dim_hat, Some(2));
        assert!(r.check(PENTAGON).unwrap().residual.unwrap() < 1e-12);
    }

    #[test]
    fn broken_composition_stops_after_axioms() {
        let text = crate::specfile::write_groupoid_file(
            crate::groupoid::pair_groupoid(2).unwrap().data(),
            &[0.5, 0.5],
            &[1.0; 4],
        );
        let mut file = parse_groupoid_file(&text).unwrap();
        let last = file.data.compose.len() - 1;
        file.data.compose[last].2 = 0;
        let r = run(Command::BuildPmu, &Instance::from_file("broken", file), 1e-9, false);
        assert!(!r.passed);
        let axioms = r.check(GROUPOID_AXIOMS).unwrap();
        assert_eq!(axioms.status, Status::Fail);
        assert!(axioms.detail.as_deref().unwrap().contains("mismatch"), "{axioms:?}");
        assert_eq!(r.check(PENTAGON).unwrap().status, Status::Skipped);
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_builtin(Command::BuildPmu, "pair2-skew", 1e-9).unwrap();
        let b = run_builtin(Command::BuildPmu, "pair2-skew", 1e-9).unwrap();
        assert_eq!(a, b);
    }
}
