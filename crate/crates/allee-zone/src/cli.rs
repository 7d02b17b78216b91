//! Command-line front end.
//!
//! Every subcommand writes one file (or stdout): a JSON object with sorted
//! keys, or a CSV table preceded by `# key=value` parameter lines. Exit codes
//! are 0 on success, 2 for invalid input and 3 when a computation fails.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use allee_zone_core::{
    classify_fate, design_report, dlambda_dalpha_closed, dlambda_dalpha_fd, oracle_eigenvalue_at,
    principal_eigenvalue, simulate, verify_transcendental, AlphaStar, BaselineError, BoundaryKind,
    BoundarySpec, CaseTag, DesignReport, EigenError, FateVerdict, GrowthPair, ModelError, OracleError,
    Recommendation, Regime, Scheme, SensitivityError, SimConfig, SimError, Verdict, ZoneLayout,
    EIGEN_TOL, FD_STEP_FRACTION,
};

use crate::io::{csv_string, json_document, Cell, Params, Table};
use crate::parallel::{map_ordered, par_sweep, pool_from_env, ThreadsError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numerical(_) => EXIT_NUMERICAL,
            Self::Invalid(_) | Self::Io(_) => EXIT_INVALID,
        }
    }
}

fn invalid(e: impl Display) -> CliError {
    CliError::Invalid(e.to_string())
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        invalid(e)
    }
}

impl From<ThreadsError> for CliError {
    fn from(e: ThreadsError) -> Self {
        invalid(e)
    }
}

impl From<EigenError> for CliError {
    fn from(e: EigenError) -> Self {
        match e {
            EigenError::Baseline(BaselineError::Model(_) | BaselineError::InvalidTolerance(_))
            | EigenError::InvalidTolerance(_) => invalid(e),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SensitivityError> for CliError {
    fn from(e: SensitivityError) -> Self {
        match e {
            SensitivityError::Eigen(e) => e.into(),
            SensitivityError::InvalidStep(_) => invalid(e),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NegativeDensity { .. } => CliError::Numerical(e.to_string()),
            _ => invalid(e),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::NonConvergent { .. } => CliError::Numerical(e.to_string()),
            _ => invalid(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "allee-zone", version, about = "Protection-zone design for a habitat with a strong Allee effect")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Principal eigenvalue of one layout, with case tag and equation residuals.
    Eigen(EigenArgs),
    /// Table of lambda_1 over an (alpha, l) grid.
    Sweep(SweepArgs),
    /// Closed-form and finite-difference d lambda_1 / d alpha along alpha.
    Sensitivity(SensitivityArgs),
    /// Time-integrate the reaction-diffusion model and classify the fate.
    Simulate(SimulateArgs),
    /// Design report: critical lengths, best placement, verdict.
    Design(DesignArgs),
    /// Transfer-matrix lambda_1 against the finite-difference oracle.
    OracleCompare(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Robin at x=0 (ratio a2/a1 from --ratio), Neumann at x=L.
    #[value(name = "fig1-rn")]
    Fig1Rn,
    /// Robin at x=0 (ratio a2/a1 from --ratio), Dirichlet at x=L.
    #[value(name = "fig2-rd")]
    Fig2Rd,
    /// Simulation set-up with u0 = 0.01, t_end = 2000, dx = 0.025; Dirichlet at x=L unless --bc says otherwise.
    #[value(name = "fig3")]
    Fig3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Parameter preset (r=0.2, a=0.1, L=10); explicit flags override it.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Habitat length.
    #[arg(long = "L", value_name = "LENGTH")]
    pub habitat: Option<f64>,
    /// Growth rate r.
    #[arg(long)]
    pub r: Option<f64>,
    /// Allee threshold a in (0, 1).
    #[arg(long)]
    pub a: Option<f64>,
    /// Boundary keyword: NN, ND, DN or DD (left end first).
    #[arg(long, conflicts_with = "bc_raw")]
    pub bc: Option<String>,
    /// Raw boundary rows a1*phi'(0) - a2*phi(0) = 0, b1*phi'(L) + b2*phi(L) = 0.
    #[arg(long = "bc-raw", value_name = "A1,A2,B1,B2", allow_hyphen_values = true)]
    pub bc_raw: Option<String>,
    /// Robin ratio a2/a1 at x=0 for the fig1-rn and fig2-rd presets.
    #[arg(long)]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EigenArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub l: f64,
    #[arg(long, default_value_t = EIGEN_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// alpha grid as START:STOP:COUNT or a comma list [default: 0:L:41].
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: Option<String>,
    /// l grid as START:STOP:COUNT or a comma list [default: L/40:L:40].
    #[arg(long, allow_hyphen_values = true)]
    pub ls: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SensitivityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub l: f64,
    /// alpha grid [default: 0:L-l:21].
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: Option<String>,
    /// Finite-difference step in alpha [default: 1e-4 L].
    #[arg(long)]
    pub step: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Cn,
    Euler,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub l: f64,
    /// Constant initial density.
    #[arg(long)]
    pub u0: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dx: Option<f64>,
    /// Time step [default: dx].
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = SchemeArg::Cn)]
    pub scheme: SchemeArg,
    /// Persistence floor [default: a/2].
    #[arg(long)]
    pub xi: Option<f64>,
    /// Final window used for the fate call [default: t_end/4].
    #[arg(long)]
    pub window: Option<f64>,
    #[arg(long = "snapshot-every", default_value_t = 10.0)]
    pub snapshot_every: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Zone length; omit to report critical lengths only.
    #[arg(long)]
    pub l: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// alpha grid [default: 0:L:5].
    #[arg(long, allow_hyphen_values = true)]
    pub alphas: Option<String>,
    /// l grid [default: L/5:L:5].
    #[arg(long, allow_hyphen_values = true)]
    pub ls: Option<String>,
    /// Cells of the middle finite-difference grid.
    #[arg(long, default_value_t = allee_zone_core::fd_oracle::DEFAULT_CELLS)]
    pub cells: usize,
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `START:STOP:COUNT` (inclusive, evenly spaced) or `v1,v2,...`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in grid {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, count] => {
            let (a, b) = (num(start)?, num(stop)?);
            let n: usize = count.trim().parse().map_err(|_| format!("bad count in grid {s:?}"))?;
            match n {
                0 => return Err(format!("grid {s:?} has no points")),
                1 => vec![a],
                _ => (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
            }
        }
        [list] => list.split(',').map(num).collect::<Result<_, _>>()?,
        _ => return Err(format!("grid {s:?} is neither START:STOP:COUNT nor a comma list")),
    };
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(format!("grid {s:?} has non-finite entries"));
    }
    Ok(grid)
}

fn grid_or(s: &Option<String>, default: impl FnOnce() -> Vec<f64>) -> Result<Vec<f64>, CliError> {
    s.as_deref().map_or_else(|| Ok(default()), parse_grid).map_err(CliError::Invalid)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    parse_grid(&format!("{a}:{b}:{n}")).expect("well-formed grid")
}

struct Setup {
    habitat: f64,
    growth: GrowthPair,
    bc: BoundarySpec,
    params: Params,
}

fn bc_label(bc: &BoundarySpec) -> String {
    bc.label().iter().collect()
}

fn parse_bc_raw(s: &str) -> Result<BoundarySpec, CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| invalid(format!("bad --bc-raw entry {t:?}"))))
        .collect::<Result<_, _>>()?;
    match v.as_slice() {
        &[a1, a2, b1, b2] => Ok(BoundarySpec::new(a1, a2, b1, b2)?),
        _ => Err(invalid("--bc-raw needs four comma-separated numbers a1,a2,b1,b2")),
    }
}

impl ModelArgs {
    fn setup(&self) -> Result<Setup, CliError> {
        let habitat = self.habitat.unwrap_or(10.0);
        let r = self.r.unwrap_or(0.2);
        let a = self.a.unwrap_or(0.1);
        if self.ratio.is_some() && !matches!(self.preset, Some(Preset::Fig1Rn | Preset::Fig2Rd)) {
            return Err(invalid("--ratio applies to the fig1-rn and fig2-rd presets"));
        }
        let ratio = self.ratio.unwrap_or(1.0);
        if !(ratio >= 0.0 && ratio.is_finite()) {
            return Err(invalid(format!("--ratio must be a finite number >= 0, got {ratio}")));
        }
        let bc = if let Some(raw) = &self.bc_raw {
            parse_bc_raw(raw)?
        } else if let Some(kw) = &self.bc {
            BoundarySpec::from_keyword(kw).map_err(|_| invalid(format!("unknown --bc {kw:?}; use NN, ND, DN or DD")))?
        } else {
            match self.preset {
                Some(Preset::Fig1Rn) => BoundarySpec::new(1.0, ratio, 1.0, 0.0)?,
                Some(Preset::Fig2Rd) => BoundarySpec::new(1.0, ratio, 0.0, 1.0)?,
                Some(Preset::Fig3) => BoundarySpec::ND,
                None => BoundarySpec::NN,
            }
        };
        let growth = GrowthPair::cubic_logistic(r, a)?;
        if !(habitat > 0.0 && habitat.is_finite()) {
            return Err(ModelError::InvalidLength(habitat).into());
        }
        let mut params = Params::new();
        params
            .set("L", habitat)
            .set("r", r)
            .set("a", a)
            .set("bc", bc_label(&bc))
            .set("bc_raw", json!([bc.a1, bc.a2, bc.b1, bc.b2]));
        if let Some(p) = self.preset {
            params.set("preset", p.to_possible_value().expect("named preset").get_name());
        }
        Ok(Setup { habitat, growth, bc, params })
    }
}

fn case_name(tag: CaseTag) -> &'static str {
    match tag {
        CaseTag::H1 => "H1",
        CaseTag::H2 => "H2",
        CaseTag::H3 => "H3",
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Persist => "persist",
        Verdict::Extinct => "extinct",
        Verdict::Undecided => "undecided",
    }
}

fn fate_json(f: &FateVerdict) -> Value {
    json!({"verdict": verdict_name(f.verdict), "lambda1": f.lambda1, "sim_floor": f.sim_floor})
}

/// A rendered output: JSON result body or CSV table.
enum Rendered {
    Json(Value),
    Csv(Table),
}

fn render(command: &str, params: &Params, r: Rendered) -> String {
    match r {
        Rendered::Json(v) => json_document(command, params, v),
        Rendered::Csv(t) => csv_string(command, params, &t),
    }
}

fn cmd_eigen(args: &EigenArgs) -> Result<(Params, Rendered), CliError> {
    let mut s = args.model.setup()?;
    s.params.set("alpha", args.alpha).set("l", args.l).set("tol", args.tol);
    let z = ZoneLayout::new(s.habitat, args.alpha, args.l)?;
    let r = principal_eigenvalue(&z, &s.bc, &s.growth, args.tol)?;
    let check = verify_transcendental(&r, &z, &s.bc, &s.growth)?;
    let verdict = FateVerdict::from_lambda(r.lambda1);
    let out = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => Rendered::Json(json!({
            "lambda1": r.lambda1,
            "case_tag": case_name(r.case_tag),
            "f_tilde": r.f_tilde,
            "g_tilde": r.g_tilde,
            "characteristic_residual": r.residual,
            "bracket": {"lo": r.bracket.lo, "hi": r.bracket.hi},
            "equations": check.residuals.iter()
                .map(|e| json!({"equation": e.equation.name(), "residual": e.residual}))
                .collect::<Vec<_>>(),
            "max_equation_residual": check.max_residual(),
            "verdict": verdict_name(verdict.verdict),
        })),
        Format::Csv => {
            let mut t = Table::new(&["lambda1", "case_tag", "characteristic_residual", "max_equation_residual", "verdict"]);
            t.push(vec![
                r.lambda1.into(),
                case_name(r.case_tag).into(),
                r.residual.into(),
                check.max_residual().into(),
                verdict_name(verdict.verdict).into(),
            ]);
            Rendered::Csv(t)
        }
    };
    Ok((s.params, out))
}

fn cmd_sweep(args: &SweepArgs) -> Result<(Params, Rendered), CliError> {
    let mut s = args.model.setup()?;
    let alphas = grid_or(&args.alphas, || linspace(0.0, s.habitat, 41))?;
    let ls = grid_or(&args.ls, || linspace(s.habitat / 40.0, s.habitat, 40))?;
    s.params.set("alphas", alphas.clone()).set("ls", ls.clone());
    let pool = pool_from_env()?;
    let table = par_sweep(&pool, s.habitat, &s.bc, &s.growth, &alphas, &ls)?;
    let out = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => Rendered::Json(json!({
            "alphas": table.alphas,
            "ls": table.ls,
            "lambda1": table.values,
        })),
        Format::Csv => {
            let mut t = Table::new(&["l", "alpha", "lambda1"]);
            for (row, &l) in table.values.iter().zip(&table.ls) {
                for (v, &a) in row.iter().zip(&table.alphas) {
                    t.push(vec![l.into(), a.into(), (*v).into()]);
                }
            }
            Rendered::Csv(t)
        }
    };
    Ok((s.params, out))
}

struct SensitivityRow {
    alpha: f64,
    lambda1: f64,
    case_tag: CaseTag,
    formula: Option<&'static str>,
    reflected: bool,
    closed: Option<f64>,
    fd: f64,
    note: String,
}

fn cmd_sensitivity(args: &SensitivityArgs) -> Result<(Params, Rendered), CliError> {
    let mut s = args.model.setup()?;
    ZoneLayout::new(s.habitat, 0.0, args.l)?;
    let alphas = grid_or(&args.alphas, || linspace(0.0, s.habitat - args.l, 21))?;
    let step = args.step.unwrap_or(FD_STEP_FRACTION * s.habitat);
    s.params.set("l", args.l).set("alphas", alphas.clone()).set("step", step);
    let pool = pool_from_env()?;
    let rows = map_ordered(&pool, &alphas, |&alpha| -> Result<SensitivityRow, CliError> {
        let z = ZoneLayout::new(s.habitat, alpha, args.l)?;
        let r = principal_eigenvalue(&z, &s.bc, &s.growth, EIGEN_TOL)?;
        let fd = dlambda_dalpha_fd(&z, &s.bc, &s.growth, step)?;
        let (formula, reflected, closed, note) = match dlambda_dalpha_closed(&r, &z, &s.bc, &s.growth) {
            Ok(t) => (Some(t.formula.name()), t.reflected, Some(t.dlambda_dalpha), String::new()),
            Err(SensitivityError::Eigen(e)) => return Err(e.into()),
            Err(e) => (None, false, None, e.to_string()),
        };
        Ok(SensitivityRow { alpha, lambda1: r.lambda1, case_tag: r.case_tag, formula, reflected, closed, fd, note })
    })?;
    let rel = |r: &SensitivityRow| r.closed.map(|c| (c - r.fd).abs() / r.fd.abs().max(1e-12));
    let out = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => Rendered::Json(Value::Array(
            rows.iter()
                .map(|r| {
                    json!({
                        "alpha": r.alpha,
                        "lambda1": r.lambda1,
                        "case_tag": case_name(r.case_tag),
                        "formula": r.formula,
                        "reflected": r.reflected,
                        "closed_form": r.closed,
                        "finite_difference": r.fd,
                        "rel_diff": rel(r),
                        "note": r.note,
                    })
                })
                .collect(),
        )),
        Format::Csv => {
            let mut t = Table::new(&[
                "alpha", "lambda1", "case_tag", "formula", "reflected", "closed_form", "finite_difference", "rel_diff", "note",
            ]);
            for r in &rows {
                t.push(vec![
                    r.alpha.into(),
                    r.lambda1.into(),
                    case_name(r.case_tag).into(),
                    r.formula.map_or(Cell::Empty, Cell::from),
                    Cell::Int(i64::from(r.reflected)),
                    r.closed.into(),
                    r.fd.into(),
                    rel(r).into(),
                    r.note.clone().into(),
                ]);
            }
            Rendered::Csv(t)
        }
    };
    Ok((s.params, out))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(Params, Rendered), CliError> {
    let mut s = args.model.setup()?;
    let fig3 = args.model.preset == Some(Preset::Fig3);
    let z = ZoneLayout::new(s.habitat, args.alpha, args.l)?;
    let mut cfg = SimConfig::new(s.growth.allee_a());
    let u0 = args.u0.unwrap_or(0.01);
    cfg.t_end = args.t_end.unwrap_or(cfg.t_end);
    cfg.dx = args.dx.unwrap_or(cfg.dx);
    cfg.dt = args.dt.unwrap_or(cfg.dx);
    cfg.xi = args.xi.unwrap_or(cfg.xi);
    cfg.snapshot_every = args.snapshot_every;
    cfg.scheme = match args.scheme {
        SchemeArg::Cn => Scheme::SemiImplicitCn,
        SchemeArg::Euler => Scheme::ExplicitEuler,
    };
    let window = args.window.unwrap_or(0.25 * cfg.t_end);
    if !(u0 >= 0.0 && u0.is_finite()) {
        return Err(invalid(format!("--u0 must be a finite density >= 0, got {u0}")));
    }
    s.params
        .set("alpha", args.alpha)
        .set("l", args.l)
        .set("u0", u0)
        .set("t_end", cfg.t_end)
        .set("dx", cfg.dx)
        .set("dt", cfg.dt)
        .set("xi", cfg.xi)
        .set("window", window)
        .set("scheme", args.scheme.to_possible_value().expect("named scheme").get_name());
    if fig3 {
        s.params.set("right_end", if s.bc.kind_right() == BoundaryKind::Dirichlet { "dirichlet" } else { "other" });
    }
    let traj = simulate(&z, &s.bc, &s.growth, &|_| u0, &cfg)?;
    let lambda1 = principal_eigenvalue(&z, &s.bc, &s.growth, EIGEN_TOL)?.lambda1;
    let mut fate = classify_fate(&traj, cfg.xi, window);
    fate.lambda1 = Some(lambda1);
    let spectral = FateVerdict::from_lambda(lambda1).verdict;
    let agrees = fate.verdict == spectral;
    let out = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => Rendered::Json(json!({
            "fate": fate_json(&fate),
            "spectral_verdict": verdict_name(spectral),
            "agrees": agrees,
            "x": traj.x,
            "snapshot_times": traj.snapshot_times,
            "snapshots": traj.snapshots,
            "series": {
                "t": traj.times,
                "floor": traj.floor_series,
                "max": traj.max_series,
                "mass": traj.mass_series,
            },
        })),
        Format::Csv => {
            let mut t = Table::new(&["t", "x", "u"]);
            t.note("fate", verdict_name(fate.verdict));
            t.note("lambda1", lambda1);
            if let Some(f) = fate.sim_floor {
                t.note("sim_floor", f);
            }
            t.note("spectral_verdict", verdict_name(spectral));
            t.note("agrees", agrees);
            for (&time, snap) in traj.snapshot_times.iter().zip(&traj.snapshots) {
                for (&x, &u) in traj.x.iter().zip(snap) {
                    t.push(vec![time.into(), x.into(), u.into()]);
                }
            }
            Rendered::Csv(t)
        }
    };
    Ok((s.params, out))
}

fn alpha_star_json(a: &AlphaStar) -> Value {
    match *a {
        AlphaStar::At(x) => json!(x),
        AlphaStar::Pair(x, y) => json!([x, y]),
    }
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::PersistAnywhere => "persist_anywhere",
        Regime::PersistAtOptimum => "persist_at_optimum",
        Regime::ExtinctForLength => "extinct_for_length",
        Regime::ExtinctAllZones => "extinct_for_all_zones",
        Regime::LengthsOnly => "lengths_only",
    }
}

fn design_json(d: &DesignReport) -> Value {
    let mut l_bars = serde_json::Map::new();
    for (k, v) in [
        ("l_bar1", d.lengths.l_bar1),
        ("l_bar2", d.lengths.l_bar2),
        ("l_bar3", d.lengths.l_bar3),
        ("l_tilde", d.lengths.l_tilde),
    ] {
        if let Some(v) = v {
            l_bars.insert(k.into(), v.into());
        }
    }
    let alpha_star = match d.recommendation {
        Recommendation::Anywhere => json!("anywhere"),
        Recommendation::Nowhere => json!("none"),
        Recommendation::Place(a) => alpha_star_json(&a),
    };
    json!({
        "regime": regime_name(d.regime),
        "branch": d.branch,
        "consistent": d.consistent,
        "l_bars": l_bars,
        "extinct_for_all_zones": d.lengths.extinct_for_all_zones,
        "alpha_star": alpha_star,
        "optimal_alpha": d.alpha_star.as_ref().map(alpha_star_json),
        "verdict_at_optimum": d.verdict_at_optimum.as_ref().map(fate_json),
        "lambda_worst": d.lambda_worst,
    })
}

fn cmd_design(args: &DesignArgs) -> Result<(Params, Rendered), CliError> {
    let mut s = args.model.setup()?;
    if let Some(l) = args.l {
        ZoneLayout::new(s.habitat, 0.0, l)?;
        s.params.set("l", l);
    }
    let report = design_report(s.habitat, &s.bc, &s.growth, args.l)?;
    let body = design_json(&report);
    let out = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => Rendered::Json(body),
        Format::Csv => {
            let mut t = Table::new(&["field", "value"]);
            let mut flat = Vec::new();
            flatten("", &body, &mut flat);
            for (k, v) in flat {
                t.push(vec![k.into(), v]);
            }
            Rendered::Csv(t)
        }
    };
    Ok((s.params, out))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Cell)>) {
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, out);
            }
        }
        Value::Number(n) => out.push((prefix.to_owned(), n.as_f64().map_or(Cell::Empty, Cell::Num))),
        Value::String(s) => out.push((prefix.to_owned(), s.clone().into())),
        Value::Bool(b) => out.push((prefix.to_owned(), b.to_string().into())),
        Value::Null => out.push((prefix.to_owned(), Cell::Empty)),
    }
}

fn cmd_oracle(args: &OracleArgs) -> Result<(Params, Rendered), CliError> {
    let mut s = args.model.setup()?;
    let alphas = grid_or(&args.alphas, || linspace(0.0, s.habitat, 5))?;
    let ls = grid_or(&args.ls, || linspace(s.habitat / 5.0, s.habitat, 5))?;
    s.params.set("alphas", alphas.clone()).set("ls", ls.clone()).set("cells", args.cells).set("tol", args.tol);
    let cells: Vec<(f64, f64)> = ls
        .iter()
        .flat_map(|&l| alphas.iter().map(move |&a| (a, l)))
        .filter(|&(a, l)| ZoneLayout::new(s.habitat, a, l).is_ok())
        .collect();
    let pool = pool_from_env()?;
    let rows = map_ordered(&pool, &cells, |&(a, l)| -> Result<[f64; 6], CliError> {
        let z = ZoneLayout::new(s.habitat, a, l)?;
        let exact = principal_eigenvalue(&z, &s.bc, &s.growth, EIGEN_TOL)?.lambda1;
        let fd = oracle_eigenvalue_at(&z, &s.bc, &s.growth, args.tol, args.cells)?;
        Ok([l, a, exact, fd.value, fd.err_estimate, (exact - fd.value).abs()])
    })?;
    let max_diff = rows.iter().map(|r| r[5]).fold(0.0, f64::max);
    let out = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => Rendered::Json(json!({
            "rows": rows.iter().map(|r| json!({
                "l": r[0], "alpha": r[1], "lambda1": r[2], "oracle": r[3], "err_estimate": r[4], "abs_diff": r[5],
            })).collect::<Vec<_>>(),
            "max_abs_diff": max_diff,
        })),
        Format::Csv => {
            let mut t = Table::new(&["l", "alpha", "lambda1", "oracle", "err_estimate", "abs_diff"]);
            t.note("max_abs_diff", max_diff);
            for r in &rows {
                t.push(r.iter().map(|&x| x.into()).collect());
            }
            Rendered::Csv(t)
        }
    };
    Ok((s.params, out))
}

fn dispatch(cmd: &Command) -> Result<String, CliError> {
    let (name, output, result) = match cmd {
        Command::Eigen(a) => ("eigen", &a.output, cmd_eigen(a)),
        Command::Sweep(a) => ("sweep", &a.output, cmd_sweep(a)),
        Command::Sensitivity(a) => ("sensitivity", &a.output, cmd_sensitivity(a)),
        Command::Simulate(a) => ("simulate", &a.output, cmd_simulate(a)),
        Command::Design(a) => ("design", &a.output, cmd_design(a)),
        Command::OracleCompare(a) => ("oracle-compare", &a.output, cmd_oracle(a)),
    };
    let (params, rendered) = result?;
    let text = render(name, &params, rendered);
    match &output.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Runs the CLI on `args` (program name first), writing results to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(text) => match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {}", CliError::Io(e));
                EXIT_INVALID
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
