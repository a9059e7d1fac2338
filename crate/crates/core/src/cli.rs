//! Command-line front end.
//!
//! Every command writes rows with the fixed schema
//! `param,branch,re_s,im_s,re_mu,im_mu,residual,stable,source`, as CSV or as
//! JSON (an array of row objects plus a `meta` block).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analytic;
use crate::boundary::determinant;
use crate::error::SpectraError;
use crate::oracle::{self, ShootConfig};
use crate::params::{Root, RootSource, SpectralParams};
use crate::rootfind::{self, Branch, CoalescenceEvent, ScanConfig, ScanOutcome, SweepParam, TraceConfig};
use crate::verify::{self, CheckGroup};

type C64 = Complex64;

pub const MAX_M: usize = 2000;
pub const THREADS_ENV: &str = "SPHERE_SPECTRA_THREADS";
pub const CSV_HEADER: &str = "param,branch,re_s,im_s,re_mu,im_mu,residual,stable,source";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Solver(#[from] SpectraError),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Solver(SpectraError::InvalidParams(_)) | CliError::Solver(SpectraError::TrivialEigenvalue(_)) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "sphere-spectra", version, about = "Eigenvalue spectra of the linearized Navier-Stokes equations on a truncated sphere")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Real roots of the series determinant (analytic spectrum at x0 = 1).
    Spectrum(ProblemArgs),
    /// Follow roots along a sweep in x0 or eps.
    Trace(ProblemArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
    /// Real roots from the shooting oracle.
    Oracle(OracleArgs),
    /// Write the preset figure data sets.
    Figures(FigureArgs),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProblemArgs {
    /// Azimuthal wavenumber.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    /// Reynolds number.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Truncation coordinate cos(theta0), in (0, 1].
    #[arg(long)]
    pub x0: Option<f64>,
    /// Series truncation order (default 150 for k != 0, 100 for k = 0).
    #[arg(long = "M")]
    pub m: Option<usize>,
    #[arg(long)]
    pub smin: Option<f64>,
    /// Upper end of the scan (default sigma + roots + 1).
    #[arg(long)]
    pub smax: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of roots wanted; sets the default scan window.
    #[arg(long)]
    pub roots: Option<usize>,
    /// `name:start:stop:step`, name one of x0, eps.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON file with any of the above keys; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Shoot the Dirichlet problem for chi instead of the full system.
    #[arg(long)]
    pub chi: bool,
    /// RK4 steps across [-x0, x0].
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Restrict to these groups (series, boundary, analytic, oracle, green, darboux).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FigureArgs {
    /// Output directory.
    #[arg(long, default_value = "figures")]
    pub output: PathBuf,
    /// Restrict to these figures (fig1 ... fig8).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<i64>,
    pub eps: Option<f64>,
    pub x0: Option<f64>,
    #[serde(rename = "M", alias = "m")]
    pub m: Option<usize>,
    pub smin: Option<f64>,
    pub smax: Option<f64>,
    pub step: Option<f64>,
    pub tol: Option<f64>,
    pub roots: Option<usize>,
    pub sweep: Option<String>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sweep {
    pub parameter: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

pub fn parse_sweep(text: &str) -> CliResult<Sweep> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 {
        return Err(CliError::Config(format!("sweep must be name:start:stop:step, got '{text}'")));
    }
    let parameter = match parts[0] {
        "x0" => SweepParam::X0,
        "eps" => SweepParam::Eps,
        other => return Err(CliError::Config(format!("unknown sweep parameter '{other}' (expected x0 or eps)"))),
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| CliError::Config(format!("bad number '{s}' in sweep")));
    let sweep = Sweep { parameter, start: num(parts[1])?, stop: num(parts[2])?, step: num(parts[3])? };
    if !(sweep.step > 0.0) || !(sweep.stop >= sweep.start) {
        return Err(CliError::Config(format!("sweep needs start <= stop and step > 0, got '{text}'")));
    }
    Ok(sweep)
}

/// Fully resolved settings of a spectrum, trace or oracle run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: SpectralParams,
    pub scan: ScanConfig,
    pub roots: usize,
    /// `s_max` was defaulted, so single-point scans may widen it to find `roots` roots.
    pub auto_smax: bool,
    pub sweep: Option<Sweep>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

fn read_config(path: &Path) -> CliResult<FileConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    /// Merge flags over the config file over defaults and validate.
    pub fn resolve(args: &ProblemArgs, need_sweep: bool) -> CliResult<Self> {
        let file = match &args.config {
            Some(p) => read_config(p)?,
            None => FileConfig::default(),
        };
        let k = args.k.or(file.k).unwrap_or(1);
        let eps = args.eps.or(file.eps).unwrap_or(0.0);
        let x0 = args.x0.or(file.x0).unwrap_or(0.9);
        let m = args.m.or(file.m).unwrap_or(if k == 0 { 100 } else { 150 });
        if m > MAX_M {
            return Err(CliError::Config(format!("M = {m} exceeds the maximum {MAX_M}")));
        }
        let params = SpectralParams::new(k, eps, x0, m)?;
        let roots = args.roots.or(file.roots).unwrap_or(5);
        let sigma = analytic::sigma_of(k, eps);
        let defaults = ScanConfig::default();
        let scan = ScanConfig {
            s_min: args.smin.or(file.smin).unwrap_or(0.0),
            s_max: args.smax.or(file.smax).unwrap_or(sigma + roots as f64 + 1.0),
            step: args.step.or(file.step).unwrap_or(defaults.step),
            tol: args.tol.or(file.tol).unwrap_or(defaults.tol),
            ..defaults
        };
        scan.validate()?;
        let sweep = match args.sweep.clone().or(file.sweep) {
            Some(s) => Some(parse_sweep(&s)?),
            None => None,
        };
        if need_sweep && sweep.is_none() {
            return Err(CliError::Config("trace needs --sweep name:start:stop:step".into()));
        }
        if !need_sweep && sweep.is_some() {
            return Err(CliError::Config("--sweep only applies to trace".into()));
        }
        let widest_x0 = match sweep {
            Some(Sweep { parameter: SweepParam::X0, stop, .. }) => stop,
            _ => x0,
        };
        if widest_x0 > 0.95 && widest_x0 < 1.0 {
            log::warn!("x0 = {widest_x0} > 0.95: the series converges slowly, consider a larger M");
        }
        Ok(Self {
            params,
            scan,
            roots,
            auto_smax: args.smax.or(file.smax).is_none(),
            sweep,
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            output: args.output.clone().or(file.output),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub param: f64,
    pub branch: usize,
    pub re_s: f64,
    pub im_s: f64,
    pub re_mu: f64,
    pub im_mu: f64,
    pub residual: f64,
    pub stable: bool,
    pub source: &'static str,
}

impl Row {
    pub fn new(param: f64, branch: usize, root: &Root) -> Self {
        let (s, mu) = (root.s(), root.mu());
        // + 0.0 turns -0.0 into 0.0
        Self {
            param: param + 0.0,
            branch,
            re_s: s.re + 0.0,
            im_s: s.im + 0.0,
            re_mu: mu.re + 0.0,
            im_mu: mu.im + 0.0,
            residual: root.residual,
            stable: root.point.is_stable(),
            source: root.source.as_str(),
        }
    }
}

/// Format with 15 significant digits, fixed notation where reasonable.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..15).contains(&exp) {
        trim(&format!("{v:.prec$}", prec = (14 - exp) as usize))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt_num(r.param),
            r.branch,
            fmt_num(r.re_s),
            fmt_num(r.im_s),
            fmt_num(r.re_mu),
            fmt_num(r.im_mu),
            fmt_num(r.residual),
            r.stable,
            r.source
        ));
    }
    out
}

pub fn rows_to_json(rows: &[Row], meta: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "rows": rows })).expect("rows serialize");
    s.push('\n');
    s
}

fn meta(command: &str, cfg: &RunConfig) -> serde_json::Value {
    json!({
        "tool": "sphere-spectra",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "params": { "k": cfg.params.k, "eps": cfg.params.eps, "x0": cfg.params.x0, "M": cfg.params.m },
        "scan": cfg.scan,
        "sweep": cfg.sweep,
    })
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.display().to_string(), source: e })?;
            }
            fs::write(p, text).map_err(|e| CliError::Io { path: p.display().to_string(), source: e })
        }
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io { path: "stdout".into(), source: e }),
    }
}

/// Drop rows whose residual exceeds `limit`, with a warning.
fn enforce_residuals(rows: Vec<Row>, limit: f64) -> Vec<Row> {
    let before = rows.len();
    let kept: Vec<Row> = rows.into_iter().filter(|r| r.residual <= limit).collect();
    if kept.len() < before {
        log::warn!("dropped {} row(s) with residual above {limit:e}", before - kept.len());
    }
    kept
}

fn emit(rows: Vec<Row>, format: Format, output: Option<&Path>, meta: serde_json::Value, residual_limit: f64) -> CliResult<()> {
    let rows = enforce_residuals(rows, residual_limit);
    let text = match format {
        Format::Csv => rows_to_csv(&rows),
        Format::Json => rows_to_json(&rows, meta),
    };
    write_text(output, &text)
}

/// Roots of one problem: series scan, or the analytic spectrum at `x0 = 1`.
pub fn spectrum_rows(cfg: &RunConfig) -> CliResult<Vec<Row>> {
    let p = &cfg.params;
    let roots: Vec<Root> = if p.is_full_sphere() {
        let sp = if p.k == 0 {
            analytic::spectrum_full_sphere_k0(p.eps, cfg.roots.max(1))?
        } else {
            let n_max = (cfg.scan.s_max - analytic::sigma_of(p.k, p.eps)).floor().max(0.0) as usize;
            analytic::spectrum_full_sphere_k(p.k, p.eps, n_max)?
        };
        sp.s_values
            .iter()
            .filter(|&&s| s >= cfg.scan.s_min && s <= cfg.scan.s_max)
            .map(|&s| Root::new(C64::new(s, 0.0), 0.0, RootSource::Analytic))
            .collect()
    } else {
        let out = scan_for_roots(cfg, |scan| rootfind::series_roots(p, scan))?;
        for w in &out.warnings {
            log::warn!("{w:?}");
        }
        out.roots
    };
    Ok(roots.iter().enumerate().map(|(i, r)| Row::new(p.x0, i, r)).collect())
}

/// Run `scan`, widening a defaulted window up to four times until `roots`
/// roots are found; the result is then cut to the first `roots`.
pub fn scan_for_roots<F>(cfg: &RunConfig, scan: F) -> CliResult<ScanOutcome>
where
    F: Fn(&ScanConfig) -> crate::error::Result<ScanOutcome>,
{
    let mut window = cfg.scan;
    let mut out = scan(&window)?;
    if !cfg.auto_smax {
        return Ok(out);
    }
    for _ in 0..4 {
        if out.roots.len() >= cfg.roots {
            break;
        }
        window.s_max += window.s_max - window.s_min;
        log::debug!("widening scan to s_max = {}", window.s_max);
        out = scan(&window)?;
    }
    out.roots.truncate(cfg.roots);
    Ok(out)
}

pub fn cmd_spectrum(args: &ProblemArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(args, false)?;
    let rows = spectrum_rows(&cfg)?;
    emit(rows, cfg.format, cfg.output.as_deref(), meta("spectrum", &cfg), cfg.scan.residual_tol)
}

/// Trace configuration for a resolved run.
pub fn trace_config(cfg: &RunConfig) -> CliResult<TraceConfig> {
    let sw = cfg.sweep.ok_or_else(|| CliError::Config("missing sweep".into()))?;
    Ok(TraceConfig::new(sw.parameter, sw.start, sw.stop, sw.step, cfg.scan))
}

pub fn run_trace(params: &SpectralParams, trace: &TraceConfig) -> CliResult<Vec<Branch>> {
    let base = *params;
    let parameter = trace.parameter;
    let family = move |p: f64, s: C64| {
        let q = match parameter {
            SweepParam::X0 => base.with_x0(p)?,
            SweepParam::Eps => base.with_eps(p)?,
        };
        determinant(&q, s)
    };
    Ok(rootfind::trace_parameter(family, trace, None, RootSource::Series)?)
}

/// One row per branch sample, ordered by parameter then branch. Merged real
/// branches end on their complex continuation, which is written once, under
/// the complex branch.
pub fn branch_rows(branches: &[Branch]) -> Vec<Row> {
    let mut rows: Vec<Row> = branches
        .iter()
        .flat_map(|b| {
            let complex = b.is_complex();
            b.samples
                .iter()
                .filter(move |smp| complex || smp.root.kind == crate::params::RootKind::Real)
                .map(move |smp| Row::new(smp.param, b.id, &smp.root))
        })
        .collect();
    rows.sort_by(|a, b| a.param.total_cmp(&b.param).then(a.branch.cmp(&b.branch)));
    rows
}

#[derive(Debug, Clone, Serialize)]
pub struct EventRecord {
    pub param: f64,
    pub merged: (f64, f64),
    pub branches: (usize, usize),
    pub seed: (f64, f64),
    pub continued: Option<(f64, f64)>,
    pub complex_branch: Option<usize>,
    pub error: Option<String>,
}

impl From<&CoalescenceEvent> for EventRecord {
    fn from(e: &CoalescenceEvent) -> Self {
        Self {
            param: e.param,
            merged: e.merged,
            branches: e.branches,
            seed: (e.seed.re, e.seed.im),
            continued: e.continued.as_ref().ok().map(|r| (r.s().re, r.s().im)),
            complex_branch: e.complex_branch,
            error: e.continued.as_ref().err().map(|e| e.to_string()),
        }
    }
}

/// Coalescence events, each listed once.
pub fn event_records(branches: &[Branch]) -> Vec<EventRecord> {
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for b in branches {
        for e in &b.events {
            if !seen.contains(&e.branches) {
                seen.push(e.branches);
                out.push(EventRecord::from(e));
            }
        }
    }
    out.sort_by(|a, b| a.param.total_cmp(&b.param).then(a.branches.cmp(&b.branches)));
    out
}

/// `out.csv` -> `out.events.json`.
pub fn events_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().to_string()).unwrap_or_else(|| "trace".into());
    output.with_file_name(format!("{stem}.events.json"))
}

fn write_trace(branches: &[Branch], format: Format, output: Option<&Path>, meta: serde_json::Value, residual_limit: f64) -> CliResult<()> {
    for b in branches {
        for (p, e) in &b.failures {
            log::warn!("branch {} stopped at {} = {p}: {e}", b.id, b.parameter.as_str());
        }
    }
    emit(branch_rows(branches), format, output, meta, residual_limit)?;
    let events = event_records(branches);
    match output {
        Some(out) => {
            let text = serde_json::to_string_pretty(&events).expect("events serialize") + "\n";
            write_text(Some(&events_path(out)), &text)
        }
        None => {
            if !events.is_empty() {
                log::info!("{} coalescence event(s); pass --output to save them", events.len());
            }
            Ok(())
        }
    }
}

pub fn cmd_trace(args: &ProblemArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(args, true)?;
    let trace = trace_config(&cfg)?;
    let branches = run_trace(&cfg.params, &trace)?;
    write_trace(&branches, cfg.format, cfg.output.as_deref(), meta("trace", &cfg), cfg.scan.residual_tol)
}

pub fn cmd_oracle(args: &OracleArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(&args.problem, false)?;
    let shoot = ShootConfig { steps: args.steps, richardson: false };
    let p = &cfg.params;
    let out =
        scan_for_roots(
            &cfg,
            |scan| {
                if args.chi {
                    oracle::chi_roots(p.eps, p.x0, scan, &shoot)
                } else {
                    oracle::system_roots(p, scan, &shoot)
                }
            },
        )?;
    let rows = out.roots.iter().enumerate().map(|(i, r)| Row::new(p.x0, i, r)).collect();
    let mut m = meta("oracle", &cfg);
    m["chi"] = json!(args.chi);
    m["steps"] = json!(args.steps);
    emit(rows, cfg.format, cfg.output.as_deref(), m, cfg.scan.residual_tol)
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let groups = args
        .only
        .iter()
        .map(|g| g.trim().parse::<CheckGroup>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let report = verify::run(&groups);
    for c in &report.checks {
        eprintln!(
            "{} [{}] {}: {:e} (tol {:e}) {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.group,
            c.name,
            c.measured,
            c.tolerance,
            c.detail
        );
    }
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_text(args.output.as_deref(), &text)?;
    match report.failures().count() {
        0 => Ok(()),
        n => Err(CliError::ChecksFailed(n)),
    }
}

/// Preset runs producing the figure data sets.
pub const FIGURES: [&str; 8] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

fn figure_file(dir: &Path, name: &str, format: Format) -> PathBuf {
    dir.join(format!("{name}.{}", if format == Format::Csv { "csv" } else { "json" }))
}

fn preset(k: i64, eps: f64, x0: f64, m: usize, s_max: f64) -> CliResult<RunConfig> {
    Ok(RunConfig {
        params: SpectralParams::new(k, eps, x0, m)?,
        scan: ScanConfig { s_max, ..Default::default() },
        roots: 10,
        auto_smax: false,
        sweep: None,
        format: Format::Csv,
        output: None,
    })
}

fn figure_trace(dir: &Path, name: &str, format: Format, cfg: RunConfig, sweep: Sweep) -> CliResult<()> {
    let cfg = RunConfig { sweep: Some(sweep), ..cfg };
    let trace = trace_config(&cfg)?;
    let branches = run_trace(&cfg.params, &trace)?;
    write_trace(&branches, format, Some(&figure_file(dir, name, format)), meta("figures", &cfg), cfg.scan.residual_tol)
}

/// Rows of one root list per value of an integer parameter.
fn figure_scan<F>(dir: &Path, name: &str, format: Format, cfg: &RunConfig, values: Vec<i64>, at: F) -> CliResult<()>
where
    F: Fn(i64) -> CliResult<RunConfig> + Sync,
{
    let rows = values
        .par_iter()
        .map(|&v| {
            let c = at(v)?;
            Ok(spectrum_rows(&c)?.into_iter().map(|r| Row { param: v as f64, ..r }).collect::<Vec<_>>())
        })
        .collect::<CliResult<Vec<_>>>()?
        .concat();
    emit(rows, format, Some(&figure_file(dir, name, format)), meta("figures", cfg), cfg.scan.residual_tol)
}

pub fn cmd_figures(args: &FigureArgs) -> CliResult<()> {
    for f in &args.only {
        if !FIGURES.contains(&f.as_str()) {
            return Err(CliError::Config(format!("unknown figure '{f}' (expected one of {})", FIGURES.join(", "))));
        }
    }
    let wanted = |f: &str| args.only.is_empty() || args.only.iter().any(|g| g == f);
    let (dir, fmt) = (args.output.as_path(), args.format);
    let x0_sweep = |start, stop| Sweep { parameter: SweepParam::X0, start, stop, step: 0.01 };
    let eps_sweep = Sweep { parameter: SweepParam::Eps, start: 0.0, stop: 12.0, step: 0.1 };
    if wanted("fig1") {
        for k in [1, 3, 5] {
            figure_trace(dir, &format!("fig1_k{k}"), fmt, preset(k, 0.0, 0.3, 150, 10.0)?, x0_sweep(0.3, 0.99))?;
        }
    }
    if wanted("fig2") {
        for k in [1, 5] {
            let base = preset(k, 0.0, 0.9, 150, 12.0)?;
            let ms = (10..=150).step_by(5).collect();
            figure_scan(dir, &format!("fig2_k{k}"), fmt, &base, ms, |m| preset(k, 0.0, 0.9, m as usize, 12.0))?;
        }
    }
    if wanted("fig3") {
        let base = preset(1, 0.0, 0.9, 150, 20.0)?;
        figure_scan(dir, "fig3", fmt, &base, (1..=10).collect(), |k| preset(k, 0.0, 0.9, 150, k as f64 + 9.0))?;
    }
    // the eps sweep carries both the real branches and their complex continuation
    if wanted("fig4") || wanted("fig5") {
        for k in [1, 3] {
            figure_trace(dir, &format!("fig4_5_k{k}"), fmt, preset(k, 0.0, 0.9, 150, 12.0)?, eps_sweep)?;
        }
    }
    if wanted("fig6") {
        figure_trace(dir, "fig6", fmt, preset(0, 1.0, 0.5, 100, 11.0)?, x0_sweep(0.5, 0.95))?;
    }
    if wanted("fig7") {
        figure_trace(dir, "fig7", fmt, preset(0, 0.0, 0.9, 100, 11.0)?, eps_sweep)?;
    }
    if wanted("fig8") {
        for m in [100, 1000] {
            figure_trace(dir, &format!("fig8_M{m}"), fmt, preset(0, 4.0, 0.5, m, 11.0)?, x0_sweep(0.5, 0.99))?;
        }
    }
    Ok(())
}

/// Size the global worker pool from `SPHERE_SPECTRA_THREADS`.
pub fn configure_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Trace(a) => cmd_trace(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Figures(a) => cmd_figures(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(-6.0), "-6");
        assert_eq!(fmt_num(2.2359585059838167), "2.23595850598382");
        assert_eq!(fmt_num(1e-12), "1e-12");
        assert_eq!(fmt_num(0.0001234), "0.0001234");
        assert_eq!(fmt_num(1.5e20), "1.5e20");
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
    }

    #[test]
    fn sweep_parsing() {
        let s = parse_sweep("x0:0.3:0.99:0.01").unwrap();
        assert_eq!(s.parameter, SweepParam::X0);
        assert_eq!((s.start, s.stop, s.step), (0.3, 0.99, 0.01));
        assert_eq!(parse_sweep("eps:0:12:0.1").unwrap().parameter, SweepParam::Eps);
        for bad in ["k:0:1:0.1", "x0:0:1", "eps:1:0:0.1", "eps:0:1:0", "eps:a:1:0.1"] {
            assert!(parse_sweep(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn defaults_follow_k() {
        let a = ProblemArgs { k: Some(0), eps: Some(1.0), ..Default::default() };
        assert_eq!(RunConfig::resolve(&a, false).unwrap().params.m, 100);
        let a = ProblemArgs { k: Some(2), ..Default::default() };
        let c = RunConfig::resolve(&a, false).unwrap();
        assert_eq!(c.params.m, 150);
        assert_eq!(c.scan.s_max, 2.0 + 5.0 + 1.0);
    }

    #[test]
    fn config_errors_map_to_exit_two() {
        let bad = [
            ProblemArgs { m: Some(2001), ..Default::default() },
            ProblemArgs { eps: Some(-1.0), ..Default::default() },
            ProblemArgs { x0: Some(1.5), ..Default::default() },
            ProblemArgs { step: Some(0.0), ..Default::default() },
            ProblemArgs { sweep: Some("eps:0:1:0.1".into()), ..Default::default() },
        ];
        for a in bad {
            assert_eq!(RunConfig::resolve(&a, false).unwrap_err().exit_code(), 2, "{a:?}");
        }
        assert_eq!(RunConfig::resolve(&ProblemArgs::default(), true).unwrap_err().exit_code(), 2);
        assert_eq!(CliError::Solver(SpectraError::NonFinite { s: C64::new(1.0, 0.0), m: 3 }).exit_code(), 3);
        assert_eq!(CliError::ChecksFailed(2).exit_code(), 1);
    }

    #[test]
    fn events_file_sits_next_to_output() {
        assert_eq!(events_path(Path::new("out/fig4.csv")), PathBuf::from("out/fig4.events.json"));
        assert_eq!(events_path(Path::new("trace")), PathBuf::from("trace.events.json"));
    }

    #[test]
    fn full_sphere_uses_analytic_spectrum() {
        let a = ProblemArgs { k: Some(1), x0: Some(1.0), smax: Some(8.0), ..Default::default() };
        let rows = spectrum_rows(&RunConfig::resolve(&a, false).unwrap()).unwrap();
        let s: Vec<f64> = rows.iter().map(|r| r.re_s).collect();
        assert_eq!(s, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert!(rows.iter().all(|r| r.source == "analytic" && r.residual == 0.0));
    }
}
