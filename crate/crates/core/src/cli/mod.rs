//! Command-line front end: `flrw classify | chart spherical | chart axi |
//! probe | verify | catalog list`.
//!
//! Exit codes: 0 success, 1 internal error, 2 configuration error, 3 a
//! verification identity failed.

pub mod config;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::axi_chart::{AxiChart, AxiError, DegeneracyKind};
use crate::catalog;
use crate::criteria::full_report;
use crate::probe::{probe, witness_degeneracy, ProbeError, WitnessReport};
use crate::scale_factor::{limit_at_lower, LimitDiag, LimitKind, LimitTarget, SfError};
use crate::sph_chart::{excluded_set, ChartError, ExcludedKind, SphericalChart};
use crate::verify::{self, VerifyError, VerifyReport};

use config::{CheckCfg, RunConfig, VerifyCfg};
use output::{json, num, Csv, AXI_HEADER, PROBE_HEADER, SPH_HEADER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Internal(_) => EXIT_INTERNAL,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }
}

pub(crate) fn sf_error(e: SfError) -> CliError {
    if e.is_numerical_breakdown() {
        CliError::Internal(e.to_string())
    } else {
        CliError::Config(e.to_string())
    }
}

pub(crate) fn chart_error(e: ChartError) -> CliError {
    match e {
        ChartError::Sf(e) => sf_error(e),
        ChartError::Source { .. } => CliError::Internal(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

pub(crate) fn axi_error(e: AxiError) -> CliError {
    match e {
        AxiError::Source(c) => chart_error(c),
        AxiError::Integration { .. } => CliError::Internal(e.to_string()),
        other => CliError::Config(other.to_string()),
    }
}

fn probe_error(e: ProbeError) -> CliError {
    match e {
        ProbeError::Sf(e) => sf_error(e),
        other => CliError::Config(other.to_string()),
    }
}

fn verify_error(e: VerifyError) -> CliError {
    match e {
        VerifyError::Chart(c) => chart_error(c),
        VerifyError::Axi(a) => axi_error(a),
        VerifyError::NoSamples { .. } => CliError::Config(e.to_string()),
        VerifyError::SampleOutsideRegion { .. } => CliError::Internal(e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "flrw", version, about = "Charts and inextendibility diagnostics for FLRW spacetimes")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `verify.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides `verify.tol` and the witness threshold `probe.witness.eps`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every inextendibility statement and print a JSON report.
    Classify {
        /// Classify a catalog entry instead of the configured spacetime.
        #[arg(long)]
        entry: Option<String>,
    },
    /// Export a chart grid as CSV.
    Chart {
        #[command(subcommand)]
        which: ChartKind,
    },
    /// Follow a curve toward the Big Bang and classify the limits.
    Probe,
    /// Check the chart identities numerically.
    Verify,
    /// Inspect the catalog of example spacetimes.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum ChartKind {
    Spherical,
    Axi,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CatalogAction {
    List,
}

/// Parses arguments, runs, and returns the exit code. Diagnostics go to
/// `err`.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "flrw: {e}");
            e.exit_code()
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config is required for this command".into()))?;
    RunConfig::load(path)
}

fn emit(cli: &Cli, stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => write_file(path, text),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Internal(format!("stdout: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Classify { entry } => {
            let spec = match entry {
                Some(name) => catalog::get(name).map_err(|e| CliError::Config(e.to_string()))?.spec,
                None => load(cli)?.spec()?,
            };
            emit(cli, stdout, &json(&full_report(&spec))?)
        }
        Command::Chart { which } => {
            let cfg = load(cli)?;
            let text = match which {
                ChartKind::Spherical => spherical_csv(&cfg.spherical_chart()?)?,
                ChartKind::Axi => axi_csv(&cfg)?,
            };
            emit(cli, stdout, &text)
        }
        Command::Probe => probe_cmd(cli, stdout),
        Command::Verify => verify_cmd(cli, stdout),
        Command::Catalog { action: CatalogAction::List } => {
            let mut text = String::new();
            for e in catalog::listing() {
                let flags = if e.flags.is_empty() {
                    String::new()
                } else {
                    format!(" [{}]", e.flags.join(", "))
                };
                text.push_str(&format!("{}\tK={}\ta={}\t{}{}\n", e.name, e.k, e.a, e.provenance, flags));
            }
            emit(cli, stdout, &text)
        }
    }
}

fn excluded_label(kind: Option<ExcludedKind>) -> &'static str {
    match kind {
        None => "none",
        Some(ExcludedKind::DegenerateJacobian) => "degenerate_jacobian",
        Some(ExcludedKind::Axis) => "axis",
        Some(ExcludedKind::OutsideInterval) => "outside_interval",
    }
}

pub fn spherical_csv(chart: &SphericalChart) -> Result<String, CliError> {
    let mut csv = Csv::with_header(&SPH_HEADER);
    let (ts, rs) = chart.grid();
    for (i, &t) in ts.iter().enumerate() {
        for (j, &r) in rs.iter().enumerate() {
            let (t_cap, f) = chart.node(i, j);
            let big_r = chart.big_r(t, r).map_err(chart_error)?;
            let g = chart.g(t, r).map_err(chart_error)?;
            let ex = excluded_set(chart.branch(), chart.scale_factor(), t, r).map(|d| d.kind);
            csv.row([num(t), num(r), num(t_cap), num(big_r), num(f), num(g), excluded_label(ex).into()]);
        }
    }
    Ok(csv.into_string())
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn degeneracy_label(kind: DegeneracyKind) -> &'static str {
    match kind {
        DegeneracyKind::None => "none",
        DegeneracyKind::GTanLocus => "g_tan_locus",
        DegeneracyKind::AxisTheta => "axis",
    }
}

/// The `(T, R, θ)` grid. Nodes outside the image of the source are kept
/// as rows marked `outside` so the grid shape stays rectangular.
pub fn axi_csv(cfg: &RunConfig) -> Result<String, CliError> {
    let axi_cfg = cfg.axi.as_ref().ok_or_else(|| CliError::Config("axi: section missing".into()))?;
    let chart = cfg.axi_chart()?;
    axi_grid_csv(&chart, axi_cfg.grid, axi_cfg.n_theta)
}

pub fn axi_grid_csv(chart: &AxiChart, grid: [usize; 2], n_theta: usize) -> Result<String, CliError> {
    let (t_lo, t_hi) = chart.source().t_range();
    let (r_lo, r_hi) = chart.source().r_range();
    let thetas: Vec<f64> = (1..=n_theta)
        .map(|k| std::f64::consts::PI * k as f64 / (n_theta + 1) as f64)
        .collect();
    let mut csv = Csv::with_header(&AXI_HEADER);
    let blank = || String::new();
    for t_cap in linspace(t_lo, t_hi, grid[0]) {
        for r in linspace(r_lo, r_hi, grid[1]) {
            for &theta in &thetas {
                let head = [num(t_cap), num(r), num(theta)];
                match chart.point(t_cap, r, theta) {
                    Ok(p) => {
                        let (a, b, c) = match p.coeffs {
                            Some(k) => (num(k.a), num(k.b), num(k.c)),
                            None => (blank(), blank(), blank()),
                        };
                        csv.row(head.into_iter().chain([
                            num(p.z),
                            num(p.rho),
                            a,
                            b,
                            c,
                            num(p.jacobian),
                            p.case.label().into(),
                            degeneracy_label(p.degeneracy).into(),
                        ]));
                    }
                    Err(AxiError::Source(ChartError::OutsideRegion { .. })) => {
                        csv.row(head.into_iter().chain((0..6).map(|_| blank())).chain(["outside".into(), "outside".into()]));
                    }
                    Err(e) => return Err(axi_error(e)),
                }
            }
        }
    }
    Ok(csv.into_string())
}

#[derive(Debug, Serialize)]
struct LimitSummary {
    #[serde(flatten)]
    kind: LimitKind,
    note: String,
}

impl From<&LimitDiag> for LimitSummary {
    fn from(d: &LimitDiag) -> Self {
        LimitSummary {
            kind: d.kind,
            note: d.note.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ProbeLimitsSummary {
    #[serde(rename = "R")]
    big_r: LimitSummary,
    r: LimitSummary,
    #[serde(rename = "G")]
    g: LimitSummary,
    #[serde(rename = "C")]
    c: LimitSummary,
    r2_aprime2: LimitSummary,
}

#[derive(Debug, Serialize)]
pub struct ProbeSummary {
    curve: String,
    theta: f64,
    q: f64,
    samples: usize,
    skipped: Vec<f64>,
    limits: ProbeLimitsSummary,
    timelike_fraction: f64,
    radius_invariant_holds: Option<bool>,
    witness: Option<WitnessReport>,
    notes: Vec<String>,
}

fn probe_cmd(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(cli)?;
    let spec = cfg.spec()?;
    let curve = cfg.curve()?;
    let pcfg = cfg.probe.as_ref().expect("curve() checked the section");
    let result = probe(&spec, &curve, pcfg.q).map_err(probe_error)?;
    let witness = match pcfg.witness {
        Some(w) => {
            let eps = cli.tol.unwrap_or(w.eps);
            if !(eps > 0.0) {
                return Err(CliError::Config("probe.witness.eps: must be positive".into()));
            }
            Some(witness_degeneracy(&spec, w.r0, w.theta, eps).map_err(probe_error)?)
        }
        None => None,
    };
    let a_limit = limit_at_lower(&spec.sf, LimitTarget::A).ok();
    let l = &result.limits;
    let summary = ProbeSummary {
        curve: result.curve.clone(),
        theta: result.theta,
        q: result.q,
        samples: result.samples.len(),
        skipped: result.skipped.clone(),
        limits: ProbeLimitsSummary {
            big_r: (&l.big_r).into(),
            r: (&l.r).into(),
            g: (&l.g).into(),
            c: (&l.c).into(),
            r2_aprime2: (&l.r2ap2).into(),
        },
        timelike_fraction: result.timelike_fraction,
        radius_invariant_holds: a_limit.map(|a| result.radius_invariant_holds(&a)),
        witness,
        notes: result.notes.clone(),
    };
    let summary_text = json(&summary)?;
    match &cli.out {
        Some(path) => {
            let mut csv = Csv::with_header(&PROBE_HEADER);
            for s in &result.samples {
                csv.row([num(s.t), num(s.r), num(s.big_r), num(s.g), num(s.c), num(s.tangent_norm)]);
            }
            write_file(path, &csv.into_string())?;
            write_file(&summary_path(path), &summary_text)
        }
        None => stdout
            .write_all(summary_text.as_bytes())
            .map_err(|e| CliError::Internal(format!("stdout: {e}"))),
    }
}

/// `trace.csv` → `trace.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.json"))
}

#[derive(Debug, Serialize)]
pub struct VerifyOutput {
    pub pass: bool,
    pub reports: Vec<VerifyReport>,
}

fn verify_cmd(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load(cli)?;
    let mut vc = cfg.verify.clone().unwrap_or_default();
    if let Some(s) = cli.seed {
        vc.seed = s;
    }
    if let Some(t) = cli.tol {
        vc.tol = t;
    }
    let out = run_checks(&cfg, &vc)?;
    emit(cli, stdout, &json(&out)?)?;
    if out.pass {
        Ok(())
    } else {
        let failed: Vec<&str> = out.reports.iter().filter(|r| !r.pass).map(|r| r.identity.as_str()).collect();
        Err(CliError::Verification(failed.join(", ")))
    }
}

pub fn run_checks(cfg: &RunConfig, vc: &VerifyCfg) -> Result<VerifyOutput, CliError> {
    if !(vc.tol > 0.0 && vc.h > 0.0) || vc.samples == 0 {
        return Err(CliError::Config("verify: tol, h and samples must be positive".into()));
    }
    let checks = match &vc.checks {
        Some(c) => c.clone(),
        None => {
            let mut c = Vec::new();
            if cfg.chart.is_some() {
                c.push(CheckCfg::Sph);
            }
            if cfg.axi.is_some() {
                c.extend([
                    CheckCfg::Axi,
                    CheckCfg::Jacobian,
                    CheckCfg::Transport,
                    CheckCfg::ZTheta,
                    CheckCfg::Characteristics,
                ]);
            }
            if c.is_empty() {
                return Err(CliError::Config("verify: needs a [chart] or [axi] section".into()));
            }
            c
        }
    };
    let needs_axi = checks.iter().any(|c| *c != CheckCfg::Sph);
    let sph = if checks.contains(&CheckCfg::Sph) {
        Some(cfg.spherical_chart()?)
    } else {
        None
    };
    let axi = if needs_axi { Some(cfg.axi_chart()?) } else { None };
    let (n, h, tol, seed) = (vc.samples, vc.h, vc.tol, vc.seed);
    let mut reports = Vec::with_capacity(checks.len());
    for check in checks {
        let report = match (check, &sph, &axi) {
            (CheckCfg::Sph, Some(c), _) => verify::check_sph_pushforward(c, n, h, tol, seed),
            (CheckCfg::Axi, _, Some(a)) => verify::check_axi_pushforward(a, n, h, tol, seed),
            (CheckCfg::Jacobian, _, Some(a)) => verify::check_jacobian(a, n, h, tol, seed),
            (CheckCfg::Transport, _, Some(a)) => verify::check_transport(a, n, h, tol, seed),
            (CheckCfg::ZTheta, _, Some(a)) => verify::check_z_theta(a, n, h, tol, seed),
            (CheckCfg::Characteristics, _, Some(a)) => verify::check_characteristics(a, (n / 5).max(10), tol, seed),
            _ => unreachable!("charts are built for every requested check"),
        }
        .map_err(verify_error)?;
        reports.push(report);
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(VerifyOutput { pass, reports })
}
