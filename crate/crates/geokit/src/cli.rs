//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use geokit_core::assignment::{self, ChainMode};
use geokit_core::geometry;
use geokit_core::linalg::{image_basis_scaled, reigenvalues};
use geokit_core::pencils;
use geokit_core::verify::TheoremId;
use geokit_core::{c64, GeoError, Subspace, SystemQuad, Tol};
use serde_json::{json, Value};

use crate::io::{load_system, LoadError};
use crate::report::{self, complex, complex_list, matrix, num, subspace, Report};
use crate::sweep;

#[derive(Debug, Parser)]
#[command(name = "geokit", version, about = "Invariant subspaces, zeros and eigenstructure assignment for (A, B, C, D)")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true, env = "GEOKIT_TOL_REL", default_value_t = 1e-11)]
    pub tol_rel: f64,
    /// Absolute residual bound.
    #[arg(long, global = true, visible_alias = "tol", default_value_t = 1e-8)]
    pub tol_abs: f64,
    /// Spaces per indentation level; 0 prints compact JSON.
    #[arg(long, global = true, default_value_t = 2)]
    pub json_indent: usize,
}

#[derive(Debug, Clone, Args)]
pub struct FileArgs {
    /// System file (JSON with A, B and optionally C, D).
    pub system: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// System file (JSON with A, B and optionally C, D).
    pub system: PathBuf,
    /// Comma-separated eigenvalues; complex values as `a+bi`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambdas: String,
}

#[derive(Debug, Clone, Args)]
pub struct FriendArgs {
    /// System file (JSON with A, B and optionally C, D).
    pub system: PathBuf,
    /// Eigenvalues to assign inside `V*`.
    #[arg(long, allow_hyphen_values = true)]
    pub lambdas: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// th1 | th2 | lattice | thlast | corollary-last | lemma-diag |
    /// lemma-reach | lemma-intersection | rstar-identity | all
    pub id: String,
    /// Trials per suite.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Run seed; each trial seed is derived from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest state dimension drawn.
    #[arg(long, default_value_t = 8)]
    pub nmax: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Reachable subspace of (A, B).
    Reach(FileArgs),
    /// Unobservable subspace of (C, A).
    Unobs(FileArgs),
    /// Largest output-nulling subspace and its recursion.
    Vstar(FileArgs),
    /// Smallest input-containing subspace and its recursion.
    Sstar(FileArgs),
    /// Largest output-nulling reachability subspace.
    Rstar(FileArgs),
    /// Invariant zeros.
    Zeros(FileArgs),
    /// Eigenvalues of A that (A, B) cannot move.
    Uncontrollable(FileArgs),
    /// Block decomposition adapted to R* and V*.
    Morse(FileArgs),
    /// Span of the pencil kernels for a spectrum, with its friend.
    Kh(SpectrumArgs),
    /// Pole placement on (A, B).
    Place(SpectrumArgs),
    /// A friend of V*, optionally assigning eigenvalues inside it.
    Friend(FriendArgs),
    /// Smallest number of distinct closed-loop eigenvalues.
    Minspec(FileArgs),
    /// Seeded randomized checks.
    Verify(VerifyArgs),
}

/// What the process prints and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    /// Bad input: exit code 1.
    Input(String, String),
    /// Residual or construction failure: exit code 2.
    Numerical(String, String),
}

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        let kind = error_kind(&e).to_string();
        match e {
            GeoError::NotOutputNulling(_)
            | GeoError::SpectrumNotAssignable(_)
            | GeoError::DecompositionResidual(_)
            | GeoError::GenerationFailed(_)
            | GeoError::BlockNotReachable { .. } => Failure::Numerical(kind, e.to_string()),
            _ => Failure::Input(kind, e.to_string()),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Invalid(g) => g.into(),
            LoadError::Io(_) => Failure::Input("io".into(), e.to_string()),
            LoadError::Parse(_) => Failure::Input("parse".into(), e.to_string()),
        }
    }
}

fn error_kind(e: &GeoError) -> &'static str {
    match e {
        GeoError::DimensionMismatch(_) => "dimension_mismatch",
        GeoError::NonFinite(_) => "non_finite",
        GeoError::InvalidTolerance(_) => "invalid_tolerance",
        GeoError::InvalidSpec(_) => "invalid_spec",
        GeoError::GenerationFailed(_) => "generation_failed",
        GeoError::NoOutput => "no_output",
        GeoError::NotOutputNulling(_) => "not_output_nulling",
        GeoError::SpectrumNotAssignable(_) => "spectrum_not_assignable",
        GeoError::DecompositionResidual(_) => "decomposition_residual",
        GeoError::DuplicateLambda(_) => "duplicate_lambda",
        GeoError::NotSelfConjugate(_) => "not_self_conjugate",
        GeoError::TooCloseToForbidden { .. } => "too_close_to_forbidden",
        GeoError::DependentSelection { .. } => "dependent_selection",
        GeoError::NonSelfConjugateSelection(_) => "non_self_conjugate_selection",
        GeoError::NonDiagonal => "non_diagonal",
        GeoError::BlockNotReachable { .. } => "block_not_reachable",
    }
}

/// Parses one complex literal: `2`, `-1.5`, `3i`, `-i`, `1-2i`, `1e-3+4.5i`.
pub fn parse_complex(s: &str) -> Option<c64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().ok().filter(|x| x.is_finite()).map(|x| c64::new(x, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => t.parse::<f64>().ok(),
    };
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().ok()?, imag(&body[k..])?),
        None => (0.0, imag(body)?),
    };
    (re.is_finite() && im.is_finite()).then(|| c64::new(re, im))
}

pub fn parse_lambdas(s: &str) -> Result<Vec<c64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| parse_complex(t).ok_or_else(|| format!("cannot parse eigenvalue `{}`", t.trim())))
        .collect()
}

fn tol_of(common: &Common) -> Result<Tol, Failure> {
    Ok(Tol::new(common.tol_rel, common.tol_abs)?)
}

fn options_string(common: &Common, extra: &str) -> String {
    format!("tol_rel={:e};tol_abs={:e};{extra}", common.tol_rel, common.tol_abs)
}

struct Loaded {
    sys: SystemQuad,
    digest: String,
}

fn load(path: &PathBuf, common: &Common, op: &str, extra: &str) -> Result<Loaded, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::from(LoadError::Io(e)))?;
    let digest = report::digest(&bytes, &options_string(common, &format!("op={op};{extra}")));
    let sys = load_system(path)?;
    Ok(Loaded { sys, digest })
}

fn dims(sys: &SystemQuad) -> Value {
    json!({ "n": sys.n(), "m": sys.m(), "p": sys.p() })
}

fn tol_json(tol: Tol) -> Value {
    json!({ "rel": num(tol.rel), "abs": num(tol.abs) })
}

fn chain_dims(chain: &[Subspace]) -> Value {
    Value::Array(chain.iter().map(|s| Value::from(s.dim())).collect())
}

fn check(ok: bool, what: &str, residual: f64) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Numerical("residual".into(), format!("{what}: residual {residual:e} above tolerance")))
    }
}

fn compute(op: &str, cmd: &Command, common: &Common, report: &mut Report) -> Result<bool, Failure> {
    let tol = tol_of(common)?;
    let base_diag = |sys: &SystemQuad| json!({ "dims": dims(sys), "tol": tol_json(tol) });
    match cmd {
        Command::Reach(f) => {
            let l = load(&f.system, common, op, "")?;
            report.inputs_digest = l.digest;
            let r = geometry::reachable_subspace(&l.sys.a, &l.sys.b, tol);
            report.result = json!({ "dim": r.space.dim(), "basis": matrix(&r.space.real_basis()), "h_min": r.h_min });
            report.diagnostics = base_diag(&l.sys);
        }
        Command::Unobs(f) => {
            let l = load(&f.system, common, op, "")?;
            report.inputs_digest = l.digest;
            let q = geometry::unobservable_subspace(&l.sys.c, &l.sys.a, tol)?;
            report.result = subspace(&q);
            report.diagnostics = base_diag(&l.sys);
        }
        Command::Vstar(f) => {
            let l = load(&f.system, common, op, "")?;
            report.inputs_digest = l.digest;
            let chain = geometry::vstar_sequence(&l.sys, &Subspace::full(l.sys.n()), tol)?;
            let v = chain.last().expect("non-empty chain");
            let res = geometry::output_nulling_residual(&l.sys, v, tol)?;
            check(res <= tol.abs, "V* output-nulling check", res)?;
            report.result = json!({ "dim": v.dim(), "basis": matrix(&v.real_basis()), "chain_dims": chain_dims(&chain) });
            let mut d = base_diag(&l.sys);
            d["output_nulling_residual"] = num(res);
            report.diagnostics = d;
        }
        Command::Sstar(f) => {
            let l = load(&f.system, common, op, "")?;
            report.inputs_digest = l.digest;
            let chain = geometry::sstar_sequence(&l.sys, tol)?;
            let s = chain.last();
            let ok = geometry::is_input_containing(&l.sys, s, tol)?;
            check(ok, "S* input-containing check", f64::NAN)?;
            report.result = json!({ "dim": s.dim(), "basis": matrix(&s.real_basis()), "chain_dims": chain_dims(chain.terms()) });
            report.diagnostics = base_diag(&l.sys);
        }
        Command::Rstar(f) => {
            let l = load(&f.system, common, op, "")?;
            report.inputs_digest = l.digest;
            let rs = geometry::rstar(&l.sys, tol)?;
            let vs = geometry::vstar(&l.sys, tol)?;
            let fr = geometry::friend_of(&l.sys, &vs, None, tol)?;
            report.result = json!({ "dim": rs.dim(), "basis": matrix(&rs.real_basis()), "vstar_dim": vs.dim() });
            let mut d = base_diag(&l.sys);
            d["friend_residual_out"] = num(fr.residual_out);
            d["friend_residual_inv"] = num(fr.residual_inv);
            report.diagnostics = d;
        }
        Command::Zeros(f) => {
            let l = load(&f.system, common, op, "")?;
            report.inputs_digest = l.digest;
            let z = pencils::invariant_zeros(&l.sys, tol)?;
            report.result = json!({ "zeros": complex_list(&z.zeros) });
            let mut d = base_diag(&l.sys);
            d["distinct"] = complex_list(&z.distinct);
            d["normal_rank"] = json!(z.normal_rank);
            d["all_drop_rank"] = json!(z.consistent());
            report.diagnostics = d;
            if !z.consistent() {
                return Err(Failure::Numerical(
                    "residual".into(),
                    "a computed zero does not drop the rank of the system matrix".into(),
                ));
            }
        }
        Command::Uncontrollable(f) => {
            let l = load(&f.system, common, op, "")?;
            report.inputs_digest = l.digest;
            let ev = pencils::uncontrollable_eigenvalues(&l.sys.a, &l.sys.b, tol);
            report.result = json!({ "eigenvalues": complex_list(&ev) });
            report.diagnostics = base_diag(&l.sys);
        }
        Command::Morse(f) => {
            let l = load(&f.system, common, op, "")?;
            report.inputs_digest = l.digest;
            let m = geometry::morse_decomposition(&l.sys, tol)?;
            report.result = json!({
                "dim_rstar": m.dim_rstar,
                "dim_vstar": m.dim_vstar,
                "dim_input_split": m.dim_omega1,
                "zeros": complex_list(&m.zeros),
                "T": matrix(&m.t),
                "Omega": matrix(&m.omega),
                "F": matrix(&m.f),
                "A_bar": matrix(&m.a_bar),
                "B_bar": matrix(&m.b_bar),
                "C_bar": matrix(&m.c_bar),
                "D_bar": matrix(&m.d_bar),
            });
            let mut d = base_diag(&l.sys);
            d["block_residual"] = num(m.block_residual);
            report.diagnostics = d;
        }
        Command::Kh(s) => {
            let l = load(&s.system, common, op, &format!("lambdas={}", s.lambdas))?;
            report.inputs_digest = l.digest;
            let lambdas = parse_lambdas(&s.lambdas).map_err(|e| Failure::Input("parse".into(), e))?;
            let spec = assignment::admissible_spectrum(&l.sys, &lambdas, tol)?;
            let (kh, kernels) = assignment::build_kh(&l.sys, &spec, tol)?;
            let fr = geometry::friend_of(&l.sys, &kh, Some(&spec), tol)?;
            let rh = geometry::reachability_on_with_friend(&l.sys, &kh, &fr.f, tol)?;
            report.result = json!({
                "h": spec.len(),
                "dim": kh.dim(),
                "basis": matrix(&kh.real_basis()),
                "kernels": kernels.iter().map(|k| json!({
                    "lambda": complex(k.lambda),
                    "q": k.q(),
                    "state_rank": image_basis_scaled(&k.v, 1.0, tol).dim(),
                })).collect::<Vec<_>>(),
                "reach": subspace(&rh),
                "F": matrix(&fr.f),
            });
            let mut d = base_diag(&l.sys);
            d["friend_residual_out"] = num(fr.residual_out);
            d["friend_residual_inv"] = num(fr.residual_inv);
            d["residual_eig"] = num(fr.residual_eig);
            d["cond_v"] = num(fr.cond_v);
            d["warning"] = json!(fr.warning);
            report.diagnostics = d;
        }
        Command::Place(s) => {
            let l = load(&s.system, common, op, &format!("lambdas={}", s.lambdas))?;
            report.inputs_digest = l.digest;
            let lambdas = parse_lambdas(&s.lambdas).map_err(|e| Failure::Input("parse".into(), e))?;
            let fr = assignment::place(&l.sys.a, &l.sys.b, &lambdas, tol)?;
            let closed = reigenvalues(&(&l.sys.a + &l.sys.b * &fr.f));
            report.result = json!({ "F": matrix(&fr.f), "closed_loop": complex_list(&closed) });
            let mut d = base_diag(&l.sys);
            d["residual_eig"] = num(fr.residual_eig);
            d["cond_v"] = num(fr.cond_v);
            d["imag_max"] = num(fr.imag_max);
            d["warning"] = json!(fr.warning);
            report.diagnostics = d;
        }
        Command::Friend(s) => {
            let extra = format!("lambdas={}", s.lambdas.as_deref().unwrap_or(""));
            let l = load(&s.system, common, op, &extra)?;
            report.inputs_digest = l.digest;
            let vs = geometry::vstar(&l.sys, tol)?;
            let spec = match &s.lambdas {
                Some(text) => {
                    let lambdas = parse_lambdas(text).map_err(|e| Failure::Input("parse".into(), e))?;
                    Some(pencils::validate_spectrum(&lambdas, &[], tol)?)
                }
                None => None,
            };
            let fr = geometry::friend_of(&l.sys, &vs, spec.as_ref(), tol)?;
            let assigned = fr.assigned_lambdas();
            let unassigned: Vec<c64> = spec
                .as_ref()
                .map(|s| s.lambdas().iter().copied().filter(|l| !assigned.contains(l)).collect())
                .unwrap_or_default();
            report.result = json!({
                "F": matrix(&fr.f),
                "vstar": subspace(&vs),
                "assigned": complex_list(&assigned),
                "unassigned": complex_list(&unassigned),
            });
            let mut d = base_diag(&l.sys);
            d["residual_out"] = num(fr.residual_out);
            d["residual_inv"] = num(fr.residual_inv);
            d["residual_eig"] = num(fr.residual_eig);
            d["cond_v"] = num(fr.cond_v);
            d["warning"] = json!(fr.warning);
            report.diagnostics = d;
        }
        Command::Minspec(f) => {
            let l = load(&f.system, common, op, "")?;
            report.inputs_digest = l.digest;
            let reach = assignment::min_distinct_spectrum(&l.sys, ChainMode::Reachability, tol)?;
            let mut result = json!({ "reachability": reach });
            if l.sys.has_output() {
                result["rosenbrock"] = json!(assignment::min_distinct_spectrum(&l.sys, ChainMode::Rosenbrock, tol)?);
            }
            report.result = result;
            report.diagnostics = base_diag(&l.sys);
        }
        Command::Verify(v) => {
            let extra = format!("id={};trials={};seed={};nmax={}", v.id, v.trials, v.seed, v.nmax);
            report.inputs_digest = report::digest(b"", &options_string(common, &extra));
            let ids: Vec<TheoremId> = if v.id == "all" {
                TheoremId::ALL.to_vec()
            } else {
                vec![v.id.parse::<TheoremId>()?]
            };
            let summaries: Vec<_> = ids.iter().map(|&id| sweep::run_parallel(id, v.trials, v.seed, v.nmax, tol)).collect();
            let passed: usize = summaries.iter().map(|s| s.passed).sum();
            let failed: usize = summaries.iter().map(|s| s.failed).sum();
            report.result = json!({
                "suites": summaries.iter().map(sweep::summary_json).collect::<Vec<_>>(),
                "passed": passed,
                "failed": failed,
            });
            report.diagnostics = json!({
                "trials": v.trials, "seed": v.seed, "nmax": v.nmax, "tol": tol_json(tol),
            });
            return Ok(failed == 0);
        }
    }
    Ok(true)
}

fn op_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Reach(_) => "reach",
        Command::Unobs(_) => "unobs",
        Command::Vstar(_) => "vstar",
        Command::Sstar(_) => "sstar",
        Command::Rstar(_) => "rstar",
        Command::Zeros(_) => "zeros",
        Command::Uncontrollable(_) => "uncontrollable",
        Command::Morse(_) => "morse",
        Command::Kh(_) => "kh",
        Command::Place(_) => "place",
        Command::Friend(_) => "friend",
        Command::Minspec(_) => "minspec",
        Command::Verify(_) => "verify",
    }
}

/// Runs one invocation without touching the process state.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: shown,
                    stderr: String::new(),
                },
                _ => {
                    let v = json!({ "error": { "kind": "usage", "message": shown.trim() } });
                    Outcome {
                        code: 1,
                        stdout: report::render(&v, 2) + "\n",
                        stderr: shown,
                    }
                }
            };
        }
    };
    let op = op_name(&cli.command);
    let mut rep = Report::new(op, String::new());
    let indent = cli.common.json_indent;
    match compute(op, &cli.command, &cli.common, &mut rep) {
        Ok(ok) => Outcome {
            code: if ok { 0 } else { 2 },
            stdout: rep.render(indent) + "\n",
            stderr: String::new(),
        },
        Err(f) => {
            let (code, kind, msg) = match f {
                Failure::Input(k, m) => (1, k, m),
                Failure::Numerical(k, m) => (2, k, m),
            };
            rep.error = Some(json!({ "kind": kind, "message": msg }));
            Outcome {
                code,
                stdout: rep.render(indent) + "\n",
                stderr: format!("error: {msg}\n"),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let c = |re, im| Some(c64::new(re, im));
        assert_eq!(parse_complex("-1"), c(-1.0, 0.0));
        assert_eq!(parse_complex(" 2.5 "), c(2.5, 0.0));
        assert_eq!(parse_complex("-1+1i"), c(-1.0, 1.0));
        assert_eq!(parse_complex("-1-i"), c(-1.0, -1.0));
        assert_eq!(parse_complex("3i"), c(0.0, 3.0));
        assert_eq!(parse_complex("-i"), c(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2.5e+1i"), c(1e-3, -25.0));
        assert_eq!(parse_complex("2-1e-2j"), c(2.0, -0.01));
        assert_eq!(parse_complex("x"), None);
        assert_eq!(parse_complex("1+xi"), None);
        assert_eq!(parse_complex("NaN"), None);
        assert_eq!(parse_complex(""), None);
    }

    #[test]
    fn lambda_lists() {
        assert_eq!(parse_lambdas("-1,-2").unwrap().len(), 2);
        assert_eq!(parse_lambdas("-1+1i, -1-1i").unwrap()[1], c64::new(-1.0, -1.0));
        assert!(parse_lambdas("-1,,2").is_err());
        assert!(parse_lambdas("").unwrap().is_empty());
    }

    #[test]
    fn unknown_id_is_an_input_error() {
        let out = run(["geokit", "verify", "nope"]);
        assert_eq!(out.code, 1);
        assert!(out.stdout.contains("\"error\""));
    }
}
