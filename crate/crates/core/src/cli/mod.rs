//! Command-line front end. Data goes to the output writer (CSV dumps and
//! tables, JSON reports); diagnostics go to stderr from `main`.

pub mod dump;
pub mod scenario;

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::attack::{alpha_bound, alpha_bound_inf, exact_alpha, sweep, DEFAULT_BISECTION_TOL};
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::reachability::ReachSequence;
use crate::setops::{self, Matrix};
use crate::spectral::{analyze, eigen};
use crate::tolerance::Tolerances;
use dump::{num, SetWriter};

#[derive(Debug, Parser)]
#[command(name = "attackset", version, about = "Defendability analysis of constrained linear systems under actuation attacks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ScenarioArg {
    /// Scenario JSON file, or builtin:s1 / builtin:s2 / builtin:s3.
    pub scenario: String,
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    /// Attack fraction (defaults to the scenario's value, then 0).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub imax: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the admissible sets C_0..C_imax.
    Reach(SeqArgs),
    /// Dump the outer-bound sequence T_0..T_imax.
    Tbound(SeqArgs),
    /// Dump S_0..S_imax.
    Sbound(SeqArgs),
    /// Dump C_i together with its outer bound and report the inclusion.
    Outer {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long = "i", default_value_t = 3)]
        i: usize,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Closed-form bound for one horizon.
    Bound {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        istar: usize,
    },
    /// Infinite-horizon closed-form bound.
    BoundInf(ScenarioArg),
    /// Bisection for the critical attack fraction at one horizon.
    Exact {
        #[command(flatten)]
        scenario: ScenarioArg,
        #[arg(long)]
        istar: usize,
        #[arg(long, default_value_t = DEFAULT_BISECTION_TOL)]
        tol: f64,
    },
    /// Table of exact and closed-form critical fractions.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Range `a..b` (inclusive) or comma list; defaults to the
        /// scenario's istar_list, then 2..10.
        #[arg(long)]
        istar: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BISECTION_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check robust control invariance of the computed fixpoint or a given set.
    RciCheck {
        #[command(flatten)]
        seq: SeqArgs,
        /// Polytope JSON file to check instead of the fixpoint.
        #[arg(long)]
        set: Option<String>,
    },
    /// Eigenvalues, dominant directions and the support ratio.
    Spectral(ScenarioArg),
    /// Apply one set operation to polytope JSON files.
    Setop {
        #[arg(value_enum)]
        op: SetOp,
        /// Operand files (polytope JSON).
        #[arg(required = true, num_args = 1..=2)]
        operands: Vec<String>,
        /// Row-major matrix as JSON, for image and preimage.
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetOp {
    Sum,
    Diff,
    Intersect,
    Image,
    Preimage,
    Scale,
    Negate,
    Reduce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Exit status for an error: 2 for bad input, 3 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation(_) | Error::Parse(_) | Error::DimensionMismatch { .. } | Error::Domain(_) => 2,
        Error::Numerical(_) => 3,
        Error::Unsupported(_) => 1,
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Reach(a) => dump_sequence(&a, 50, out, |sys, n| sys.c_sequence(n)),
        Command::Tbound(a) => dump_sequence(&a, 10, out, |sys, n| sys.t_sequence(n)),
        Command::Sbound(a) => dump_sequence(&a, 10, out, |sys, n| sys.s_sequence(n)),
        Command::Outer { scenario, i, alpha } => {
            let sys = scenario::load(&scenario.scenario)?.system(alpha)?;
            let tol = sys.tolerances();
            let c = sys.c_sequence(i)?.set(i).expect("set extends past early stop");
            let bound = sys.outer_bound(i)?;
            let mut w = SetWriter::new(out, sys.dim())?;
            w.write_set("C", i, &c, tol)?;
            w.write_set("outer", i, &bound, tol)?;
            let contains = bound.contains_set(&c, tol)?;
            let equal = contains && c.contains_set(&bound, tol)?;
            w.comment(&format!("outer i={i} contains={contains} equal={equal}"))?;
            w.finish()?;
            Ok(())
        }
        Command::Bound { scenario, istar } => {
            let sc = scenario::load(&scenario.scenario)?.attack(None)?;
            let r = alpha_bound(istar, &sc.spectral()?, sc.tolerances())?;
            write_json(out, &r)
        }
        Command::BoundInf(s) => {
            let sc = scenario::load(&s.scenario)?.attack(None)?;
            write_json(out, &alpha_bound_inf(&sc.spectral()?, sc.tolerances()))
        }
        Command::Exact { scenario, istar, tol } => {
            let sc = scenario::load(&scenario.scenario)?.attack(None)?;
            let mut r = alpha_bound(istar, &sc.spectral()?, sc.tolerances())?;
            r.exact_alpha = Some(exact_alpha(&sc, istar, tol)?);
            write_json(out, &r)
        }
        Command::Sweep { scenario, istar, tol, jobs } => {
            let file = scenario::load(&scenario.scenario)?;
            let istars = match istar {
                Some(s) => parse_istars(&s)?,
                None => file.istar_list.clone().unwrap_or_else(|| (2..=10).collect()),
            };
            let sc = file.attack(None)?;
            let rows = sweep(&sc, &istars, tol, jobs)?;
            let mut w = csv::Writer::from_writer(out);
            let io = |e: csv::Error| Error::Parse(format!("output: {e}"));
            w.write_record(["istar", "exact_alpha", "alpha_bar", "conclusive"]).map_err(io)?;
            for r in rows {
                let exact = r.exact_alpha.and_then(|e| e.value()).map_or("none".into(), num);
                let bar = r.alpha_bar.map_or("none".into(), num);
                let istar = r.istar.expect("finite horizon").to_string();
                w.write_record([istar, exact, bar, r.conclusive.to_string()]).map_err(io)?;
            }
            w.flush().map_err(|e| Error::Parse(format!("output: {e}")))
        }
        Command::RciCheck { seq, set } => {
            let sys = scenario::load(&seq.scenario.scenario)?.system(seq.alpha)?;
            let tol = sys.tolerances();
            #[derive(Serialize)]
            struct Report {
                candidate: &'static str,
                fixpoint_at: Option<usize>,
                empty_at: Option<usize>,
                contained_in_x: Option<bool>,
                rci: Option<bool>,
            }
            let report = if let Some(path) = set {
                let c = read_polytope(&path)?;
                Report {
                    candidate: "file",
                    fixpoint_at: None,
                    empty_at: None,
                    contained_in_x: Some(sys.x().contains_set(&c, tol)?),
                    rci: Some(sys.is_rci(&c)?),
                }
            } else {
                let c = sys.c_sequence(seq.imax.unwrap_or(50))?;
                let last = c.sets.last().expect("C_0 present");
                let rci = match (c.fixpoint_at, c.empty_at) {
                    (Some(_), _) => Some(sys.is_rci(last)?),
                    _ => None,
                };
                Report {
                    candidate: "fixpoint",
                    fixpoint_at: c.fixpoint_at,
                    empty_at: c.empty_at,
                    contained_in_x: rci.map(|_| true),
                    rci,
                }
            };
            write_json(out, &report)
        }
        Command::Spectral(s) => {
            let file = scenario::load(&s.scenario)?;
            let sys = file.system(None)?;
            let tol = sys.tolerances();
            // the full input set, not the defence share
            let u = if file.is_general() { sys.u().clone() } else { file.attack(None)?.u().clone() };
            let bu = setops::linear_image(sys.b(), &u, tol)?;
            let info = analyze(sys.a(), sys.x(), &bu, tol)?;
            #[derive(Serialize)]
            struct Eig {
                re: f64,
                im: f64,
                multiplicity: usize,
            }
            #[derive(Serialize)]
            struct Report<'a> {
                eigenvalues: Vec<Eig>,
                #[serde(flatten)]
                info: &'a crate::spectral::SpectralInfo,
            }
            let eigenvalues = eigen(sys.a(), tol)?
                .into_iter()
                .map(|e| Eig { re: e.value.re, im: e.value.im, multiplicity: e.multiplicity })
                .collect();
            write_json(out, &Report { eigenvalues, info: &info })
        }
        Command::Setop { op, operands, matrix, lambda, format } => {
            let tol = Tolerances::default().with_env_overrides()?;
            let sets: Vec<Polytope> = operands.iter().map(|p| read_polytope(p)).collect::<Result<_>>()?;
            let need = match op {
                SetOp::Sum | SetOp::Diff | SetOp::Intersect => 2,
                _ => 1,
            };
            if sets.len() != need {
                return Err(Error::Validation(vec![format!("{op:?} takes {need} operand(s)")]));
            }
            let mat = || -> Result<Matrix> {
                let text = matrix.as_deref().ok_or_else(|| Error::Validation(vec!["--matrix is required".into()]))?;
                let rows: Vec<Vec<f64>> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("--matrix: {e}")))?;
                let c = rows.first().map_or(0, Vec::len);
                if c == 0 || rows.iter().any(|r| r.len() != c) {
                    return Err(Error::Validation(vec!["--matrix must be rectangular".into()]));
                }
                Ok(Matrix::from_row_iterator(rows.len(), c, rows.into_iter().flatten()))
            };
            let p = &sets[0];
            let result = match op {
                SetOp::Sum => setops::minkowski_sum(p, &sets[1], &tol)?,
                SetOp::Diff => setops::pontryagin_diff(p, &sets[1], &tol)?,
                SetOp::Intersect => setops::intersect(p, &sets[1], &tol)?,
                SetOp::Image => setops::linear_image(&mat()?, p, &tol)?,
                SetOp::Preimage => setops::preimage(&mat()?, p)?.remove_redundancy(&tol)?,
                SetOp::Scale => {
                    let l = lambda.ok_or_else(|| Error::Validation(vec!["--lambda is required".into()]))?;
                    setops::scale(l, p)?
                }
                SetOp::Negate => setops::negate(p),
                SetOp::Reduce => p.remove_redundancy(&tol)?,
            };
            match format {
                Format::Json => write_json(out, &result),
                Format::Csv => {
                    let mut w = SetWriter::new(out, result.dim())?;
                    w.write_set("result", 0, &result, &tol)?;
                    w.finish()?;
                    Ok(())
                }
            }
        }
    }
}

fn dump_sequence(
    args: &SeqArgs,
    default_imax: usize,
    out: &mut dyn Write,
    compute: impl Fn(&crate::reachability::GeneralSystem, usize) -> Result<ReachSequence>,
) -> Result<()> {
    let sys = scenario::load(&args.scenario.scenario)?.system(args.alpha)?;
    let seq = compute(&sys, args.imax.unwrap_or(default_imax))?;
    let tol = sys.tolerances();
    let label = seq.kind.label();
    let mut w = SetWriter::new(out, sys.dim())?;
    for (i, s) in seq.sets.iter().enumerate() {
        w.write_set(label, i, s, tol)?;
    }
    let opt = |v: Option<usize>| v.map_or("none".to_string(), |i| i.to_string());
    w.comment(&format!(
        "{label} steps={} empty_at={} fixpoint_at={}",
        seq.sets.len() - 1,
        opt(seq.empty_at),
        opt(seq.fixpoint_at)
    ))?;
    w.finish()?;
    Ok(())
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| Error::Parse(format!("output: {e}")))
}

fn read_polytope(path: &str) -> Result<Polytope> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

/// `a..b` (inclusive) or `a,b,c`.
pub fn parse_istars(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Parse(format!("istar list '{s}' (expected a..b or a,b,c)"));
    let list: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if list.is_empty() || list.contains(&0) {
        return Err(bad());
    }
    Ok(list)
}
