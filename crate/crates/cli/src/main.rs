use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cstar_pmu::corpus;
use cstar_pmu::report::{run, Command, Instance, Status, VerificationReport};
use cstar_pmu::specfile::parse_groupoid_file;

/// Verify the canonical C*-pseudo-multiplicative unitary of a finite groupoid.
#[derive(Parser)]
#[command(name = "cstar-pmu", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Groupoid axioms, Haar invariance and the measure.
    CheckGroupoid(Target),
    /// Build V and check unitarity, intertwining, the pentagon and regularity.
    BuildPmu(Target),
    /// Identify the legs with C(G) and C*_r(G).
    Legs(Target),
    /// Audit both legs as Hopf C*-bimodules.
    Hopf(Target),
    /// Everything, plus the opposite unitary.
    Report(Target),
    /// List the built-in instances.
    Instances,
}

#[derive(Args)]
struct Target {
    /// Groupoid file; see the README for the format.
    #[arg(required_unless_present = "instance", conflicts_with = "instance")]
    spec: Option<PathBuf>,
    /// Use a built-in instance instead of a file.
    #[arg(long)]
    instance: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include per-check wall-clock times (makes output nondeterministic).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, target) = match cli.command {
        Sub::CheckGroupoid(t) => (Command::CheckGroupoid, t),
        Sub::BuildPmu(t) => (Command::BuildPmu, t),
        Sub::Legs(t) => (Command::Legs, t),
        Sub::Hopf(t) => (Command::Hopf, t),
        Sub::Report(t) => (Command::Report, t),
        Sub::Instances => {
            let _ = std::io::stdout().lock().write_all((corpus::ids().join("\n") + "\n").as_bytes());
            return ExitCode::SUCCESS;
        }
    };
    let inst = match load(&target) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let report = run(command, &inst, target.tol, target.timings);
    let text = match target.format {
        Format::Text => render_text(&report),
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
    };
    // a closed pipe is not worth a panic
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn load(target: &Target) -> anyhow::Result<Instance> {
    if !(target.tol > 0.0 && target.tol.is_finite()) {
        bail!("--tol must be positive and finite");
    }
    if let Some(id) = &target.instance {
        return Instance::builtin(id)
            .with_context(|| format!("unknown instance `{id}`; known: {}", corpus::ids().join(", ")));
    }
    let path = target.spec.as_ref().expect("clap requires a file or an instance");
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = parse_groupoid_file(&text).with_context(|| format!("{}", path.display()))?;
    Ok(Instance::from_file(path.display().to_string(), file))
}

fn render_text(r: &VerificationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "instance {}  command {}  tol {:e}", r.instance, r.command.name(), r.tolerance);
    let width = r.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0);
    for c in &r.checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        let pad = width - c.name.chars().count();
        let _ = write!(out, "{status}  {}{}", c.name, " ".repeat(pad));
        if let Some(res) = c.residual {
            let _ = write!(out, "  residual {res:.3e}");
        }
        if let Some(ms) = c.elapsed_ms {
            let _ = write!(out, "  {ms:.1} ms");
        }
        if let Some(d) = &c.detail {
            let _ = write!(out, "  ({d})");
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
    let d = &r.derived;
    let _ = write!(out, "arrows {}  units {}", d.arrows, d.units);
    for (name, value) in [
        ("dim H", d.dim_h),
        ("dim source", d.dim_source),
        ("dim range", d.dim_range),
        ("dim triple", d.dim_triple),
        ("dim A-hat", d.dim_hat),
        ("dim A", d.dim_a),
        ("center A", d.a_center_dim),
    ] {
        if let Some(v) = value {
            let _ = write!(out, "  {name} {v}");
        }
    }
    out.push('\n');
    if let Some(reg) = d.regular {
        let _ = write!(out, "regular {reg}");
        if let Some(h) = d.hopf {
            let _ = write!(out, "  hopf {h}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "result {}", if r.passed { "PASS" } else { "FAIL" });
    out
}
