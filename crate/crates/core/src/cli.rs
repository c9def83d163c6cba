//! Command-line front end.
//!
//! Every subcommand writes data files into an output directory and prints a
//! one-line summary. Settings resolve as built-in defaults, then an optional
//! JSON config file, then command-line flags; the effective settings are
//! echoed into each output (`#`-prefixed lines in CSV, a `config` object in
//! JSON). The worker thread count is not part of the echoed settings, so
//! outputs do not depend on it.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::amplitude::{crystal_b, AmplitudeModel, Family};
use crate::error::{Result, SchmidtError};
use crate::filtering::apply_filter;
use crate::gaussian::{analytic_k, analytic_mode, analytic_spectrum};
use crate::measures::SchmidtSpectrum;
use crate::pipeline::{decompose, Decomposition, SolverConfig};
use crate::slice::ridge_slice;

const TOP_MODES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// `start:stop:count[:log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl SweepRange {
    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let s = i as f64 / last;
                if self.log {
                    (self.start.ln() + s * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + s * (self.stop - self.start)
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(SchmidtError::Config(format!(
                "sweep count {} must be at least 2",
                self.count
            )));
        }
        if !(self.start > 0.0 && self.stop > 0.0 && self.start.is_finite() && self.stop.is_finite())
        {
            return Err(SchmidtError::Config("sweep bounds must be positive".into()));
        }
        Ok(())
    }
}

impl FromStr for SweepRange {
    type Err = SchmidtError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad =
            || SchmidtError::Config(format!("range `{s}` is not start:stop:count[:log|:lin]"));
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let start = parts[0].parse().map_err(|_| bad())?;
        let stop = parts[1].parse().map_err(|_| bad())?;
        let count = parts[2].parse().map_err(|_| bad())?;
        let log = match parts.get(3) {
            None | Some(&"lin") | Some(&"linear") => false,
            Some(&"log") => true,
            Some(_) => return Err(bad()),
        };
        let range = Self {
            start,
            stop,
            count,
            log,
        };
        range.validate()?;
        Ok(range)
    }
}

/// Physical inputs; `b` follows from the crystal length and pump frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Crystal length, m.
    pub length: f64,
    /// Pump angular frequency, rad/s.
    pub pump_omega: f64,
    /// Pump transverse width σ⊥ in wavevector space, 1/m.
    pub sigma_perp: f64,
}

impl PhysicalParams {
    pub fn b(&self) -> Result<f64> {
        crystal_b(self.length, self.pump_omega)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub family: Family,
    pub b_sigma: f64,
    pub b_sigma_range: Option<SweepRange>,
    #[serde(flatten)]
    pub solver: SolverConfig,
    /// Radial cutoff in σ⊥ units.
    pub mu_c: f64,
    pub format: OutputFormat,
    pub out: PathBuf,
    pub physical: Option<PhysicalParams>,
    /// Requested `(n, m)` profiles for `modes`.
    pub modes: Vec<(usize, i32)>,
    /// Compute the Gaussian sweep column numerically instead of by formula.
    pub gauss_numeric: bool,
    pub slice_n_k: usize,
    pub slice_n_theta: usize,
    /// Upper radial limit of the slice in σ⊥ units.
    pub slice_k_max: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            family: Family::GaussianSinc,
            b_sigma: 0.25,
            b_sigma_range: None,
            solver: SolverConfig::default(),
            mu_c: 0.0,
            format: OutputFormat::Csv,
            out: PathBuf::from("biphoton-output"),
            physical: None,
            modes: vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (0, 2)],
            gauss_numeric: false,
            slice_n_k: 161,
            slice_n_theta: 256,
            slice_k_max: 8.0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if !(self.b_sigma.is_finite() && self.b_sigma > 0.0) {
            return Err(SchmidtError::Config(format!(
                "b_sigma {} must be positive",
                self.b_sigma
            )));
        }
        if let Some(range) = &self.b_sigma_range {
            range.validate()?;
        }
        if !(self.mu_c.is_finite() && self.mu_c >= 0.0) {
            return Err(SchmidtError::Config(format!(
                "mu_c {} must be >= 0",
                self.mu_c
            )));
        }
        if let Some(p) = &self.physical {
            p.b()?;
            if !(p.sigma_perp.is_finite() && p.sigma_perp > 0.0) {
                return Err(SchmidtError::Config("sigma_perp must be positive".into()));
            }
        }
        if self.slice_n_k < 2 || self.slice_n_theta < 2 {
            return Err(SchmidtError::Config(
                "slice needs at least two samples per axis".into(),
            ));
        }
        if !(self.slice_k_max.is_finite() && self.slice_k_max > 0.0) {
            return Err(SchmidtError::Config("slice_k_max must be positive".into()));
        }
        Ok(())
    }

    fn model(&self, b_sigma: f64) -> Result<AmplitudeModel> {
        AmplitudeModel::scaled(self.family, b_sigma)
    }

    fn echo(&self) -> Value {
        // the output location is not part of what was computed
        let mut value = serde_json::to_value(self).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut value {
            map.remove("out");
            if let Some(b) = self.physical.and_then(|p| p.b().ok()) {
                map.insert("b_meters".into(), json!(b));
            }
        }
        value
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "biphoton",
    version,
    about = "Schmidt decomposition of transverse biphoton amplitudes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: CliOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Full Schmidt spectrum of one amplitude.
    Decompose,
    /// Schmidt number over a range of bσ⊥.
    Sweep,
    /// Radial mode profiles.
    Modes,
    /// |C(k, k, Δθ)|² on the equal-magnitude subspace.
    Slice,
    /// Low-wavevector filtering and its acceptance.
    Filter,
    /// Closed-form double-Gaussian results.
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::Sweep => "sweep",
            Command::Modes => "modes",
            Command::Slice => "slice",
            Command::Filter => "filter",
            Command::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CliOptions {
    /// JSON file with any subset of the run settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_family)]
    pub family: Option<Family>,
    #[arg(long = "bsigma", global = true)]
    pub b_sigma: Option<f64>,
    /// start:stop:count[:log]
    #[arg(long = "bsigma-range", global = true)]
    pub b_sigma_range: Option<SweepRange>,
    #[arg(long, global = true)]
    pub grid_n: Option<usize>,
    #[arg(long, global = true)]
    pub kmax_factor: Option<f64>,
    #[arg(long, global = true)]
    pub ntheta: Option<usize>,
    #[arg(long, global = true)]
    pub sector_tol: Option<f64>,
    #[arg(long, global = true)]
    pub m_max: Option<usize>,
    #[arg(long = "mu-c", global = true)]
    pub mu_c: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Derive bσ⊥ from crystal length, pump frequency and pump width.
    #[arg(long, global = true, requires_all = ["length", "pump_omega", "sigma_perp"])]
    pub physical: bool,
    /// Crystal length, m.
    #[arg(long, global = true)]
    pub length: Option<f64>,
    /// Pump angular frequency, rad/s.
    #[arg(long = "pump-omega", global = true)]
    pub pump_omega: Option<f64>,
    /// Pump transverse width in wavevector space, 1/m.
    #[arg(long = "sigma-perp", global = true)]
    pub sigma_perp: Option<f64>,
    /// Modes for `modes`, e.g. `0,0;1,0;0,2`.
    #[arg(long, global = true)]
    pub modes: Option<String>,
    #[arg(long, global = true)]
    pub gauss_numeric: bool,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: SchmidtError| e.to_string())
}

fn parse_modes(s: &str) -> Result<Vec<(usize, i32)>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (n, m) = pair
                .split_once(',')
                .ok_or_else(|| SchmidtError::Config(format!("mode `{pair}` is not n,m")))?;
            let n = n
                .trim()
                .parse()
                .map_err(|_| SchmidtError::Config(format!("bad n in `{pair}`")))?;
            let m = m
                .trim()
                .parse()
                .map_err(|_| SchmidtError::Config(format!("bad m in `{pair}`")))?;
            Ok((n, m))
        })
        .collect()
}

impl CliOptions {
    /// Defaults, overridden by the config file, overridden by flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.family {
            config.family = v;
        }
        if let Some(v) = self.b_sigma {
            config.b_sigma = v;
        }
        if let Some(v) = self.b_sigma_range {
            config.b_sigma_range = Some(v);
        }
        if let Some(v) = self.grid_n {
            config.solver.grid_n = v;
        }
        if let Some(v) = self.kmax_factor {
            config.solver.kmax_factor = v;
        }
        if let Some(v) = self.ntheta {
            config.solver.n_theta = v;
        }
        if let Some(v) = self.sector_tol {
            config.solver.sector_tol = v;
        }
        if let Some(v) = self.m_max {
            config.solver.m_max = Some(v);
        }
        if let Some(v) = self.mu_c {
            config.mu_c = v;
        }
        if let Some(v) = self.format {
            config.format = v;
        }
        if let Some(v) = &self.out {
            config.out = v.clone();
        }
        if let Some(v) = &self.modes {
            config.modes = parse_modes(v)?;
        }
        if self.gauss_numeric {
            config.gauss_numeric = true;
        }
        if self.physical {
            let physical = PhysicalParams {
                length: self.length.unwrap_or(f64::NAN),
                pump_omega: self.pump_omega.unwrap_or(f64::NAN),
                sigma_perp: self.sigma_perp.unwrap_or(f64::NAN),
            };
            config.physical = Some(physical);
        }
        if let Some(p) = &config.physical {
            config.b_sigma = p.b()? * p.sigma_perp;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Result of a subcommand: the files written, a summary line and whether any
/// per-point error was recorded.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub had_errors: bool,
}

/// Parses `args`, runs the subcommand on a pool of `--threads` workers and
/// returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = cli.options.resolve().and_then(|config| {
        let mut pool = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.options.threads {
            pool = pool.num_threads(n);
        }
        let pool = pool
            .build()
            .map_err(|e| SchmidtError::Config(format!("thread pool: {e}")))?;
        pool.install(|| run_command(cli.command, &config))
    });
    match outcome {
        Ok(output) => {
            println!("{}", output.summary);
            if output.had_errors {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn run_command(command: Command, config: &RunConfig) -> Result<CommandOutput> {
    config.validate()?;
    fs::create_dir_all(&config.out)?;
    match command {
        Command::Decompose => cmd_decompose(config),
        Command::Sweep => cmd_sweep(config),
        Command::Modes => cmd_modes(config),
        Command::Slice => cmd_slice(config),
        Command::Filter => cmd_filter(config),
        Command::Oracle => cmd_oracle(config),
    }
}

fn metadata(command: Command, config: &RunConfig, extra: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# biphoton-schmidt {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "# command: {}", command.name());
    let _ = writeln!(out, "# config: {}", config.echo());
    for line in extra {
        let _ = writeln!(out, "# {line}");
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf> {
    fs::write(path, contents)?;
    Ok(path.to_path_buf())
}

fn write_json(path: &Path, value: &Value) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, &text)
}

fn spectrum_table(
    command: Command,
    config: &RunConfig,
    spectrum: &SchmidtSpectrum,
    dir: &Path,
    stem: &str,
) -> Result<PathBuf> {
    match config.format {
        OutputFormat::Csv => {
            let mut text = metadata(command, config, &[]);
            text.push_str("n,m,lambda\n");
            for e in &spectrum.entries {
                let _ = writeln!(text, "{},{},{:e}", e.n, e.m, e.lambda);
            }
            write_file(&dir.join(format!("{stem}.csv")), &text)
        }
        OutputFormat::Json => {
            let entries: Vec<Value> = spectrum
                .entries
                .iter()
                .map(|e| json!([e.n, e.m, e.lambda]))
                .collect();
            write_json(
                &dir.join(format!("{stem}.json")),
                &json!({ "config": config.echo(), "columns": ["n", "m", "lambda"], "entries": entries }),
            )
        }
    }
}

/// JSON summary of a decomposition.
pub fn summary_json(config: &RunConfig, result: &Decomposition) -> Value {
    let spectrum = &result.spectrum;
    let p_m: Vec<Value> = spectrum.p_m.iter().map(|(m, p)| json!([m, p])).collect();
    let top: Vec<Value> = spectrum
        .entries
        .iter()
        .take(TOP_MODES)
        .map(|e| json!([e.n, e.m, e.lambda]))
        .collect();
    json!({
        "config": config.echo(),
        "b_sigma": result.model.control_parameter(),
        "coverage": spectrum.coverage,
        "sector_coverage": result.sector_coverage,
        "m_max": result.m_max,
        "n_theta": result.n_theta,
        "K_raw": spectrum.schmidt_number.raw,
        "K_renormalized": spectrum.schmidt_number.renormalized,
        "entropy_bits": spectrum.entropy_bits,
        "p_m": p_m,
        "top_modes": top,
    })
}

pub fn cmd_decompose(config: &RunConfig) -> Result<CommandOutput> {
    let model = config.model(config.b_sigma)?.with_cutoff(config.mu_c)?;
    let result = decompose(&model, &config.solver)?;
    let dir = &config.out;
    let files = vec![
        spectrum_table(
            Command::Decompose,
            config,
            &result.spectrum,
            dir,
            "spectrum",
        )?,
        write_json(&dir.join("summary.json"), &summary_json(config, &result))?,
    ];
    let s = &result.spectrum;
    Ok(CommandOutput {
        files,
        summary: format!(
            "{} bσ⊥={}: K = {:.6}, E = {:.6} bits, coverage = {:.8}",
            config.family.name(),
            config.b_sigma,
            s.k(),
            s.entropy_bits,
            s.coverage
        ),
        had_errors: false,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub b_sigma: f64,
    pub k_sinc: Option<f64>,
    pub k_gauss: Option<f64>,
    pub error: Option<String>,
}

pub fn sweep_rows(config: &RunConfig) -> Result<Vec<SweepRow>> {
    let range = config
        .b_sigma_range
        .ok_or_else(|| SchmidtError::Config("sweep needs --bsigma-range".into()))?;
    let with_sinc = config.family == Family::GaussianSinc;
    let numeric_gauss = config.gauss_numeric;
    Ok(range
        .points()
        .into_par_iter()
        .map(|t| {
            let mut errors = Vec::new();
            let k_sinc = if with_sinc {
                AmplitudeModel::scaled(Family::GaussianSinc, t)
                    .and_then(|m| decompose(&m, &config.solver))
                    .map(|r| r.k())
                    .map_err(|e| errors.push(format!("sinc: {e}")))
                    .ok()
            } else {
                None
            };
            let k_gauss = if numeric_gauss {
                AmplitudeModel::scaled(Family::DoubleGaussian, t)
                    .and_then(|m| decompose(&m, &config.solver))
                    .map(|r| r.k())
            } else {
                analytic_k(t)
            }
            .map_err(|e| errors.push(format!("gauss: {e}")))
            .ok();
            SweepRow {
                b_sigma: t,
                k_sinc,
                k_gauss,
                error: (!errors.is_empty()).then(|| errors.join("; ")),
            }
        })
        .collect())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn cmd_sweep(config: &RunConfig) -> Result<CommandOutput> {
    let rows = sweep_rows(config)?;
    let gauss_source = if config.gauss_numeric {
        "numeric"
    } else {
        "analytic"
    };
    let with_sinc = config.family == Family::GaussianSinc;
    let file = match config.format {
        OutputFormat::Csv => {
            let mut text = metadata(
                Command::Sweep,
                config,
                &[format!("K_gauss: {gauss_source}")],
            );
            text.push_str(if with_sinc {
                "b_sigma,K_sinc,K_gauss,error\n"
            } else {
                "b_sigma,K_gauss,error\n"
            });
            for r in &rows {
                let err = r.error.as_deref().unwrap_or("").replace(',', ";");
                if with_sinc {
                    let _ = writeln!(
                        text,
                        "{},{},{},{}",
                        r.b_sigma,
                        opt(r.k_sinc),
                        opt(r.k_gauss),
                        err
                    );
                } else {
                    let _ = writeln!(text, "{},{},{}", r.b_sigma, opt(r.k_gauss), err);
                }
            }
            write_file(&config.out.join("sweep.csv"), &text)?
        }
        OutputFormat::Json => write_json(
            &config.out.join("sweep.json"),
            &json!({ "config": config.echo(), "K_gauss_source": gauss_source, "rows": rows }),
        )?,
    };
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(CommandOutput {
        files: vec![file],
        summary: format!("sweep: {} points, {} failed", rows.len(), failures),
        had_errors: failures > 0,
    })
}

pub fn cmd_modes(config: &RunConfig) -> Result<CommandOutput> {
    let model = config.model(config.b_sigma)?.with_cutoff(config.mu_c)?;
    let result = decompose(&model, &config.solver)?;
    let mut columns = Vec::new();
    let mut notes = Vec::new();
    let mut errors = Vec::new();
    for &(n, m) in &config.modes {
        match result.mode(n, m) {
            Ok(mode) => {
                let name = format!("phi_n{n}_m{m}");
                notes.push(format!("nodes {name} = {}", mode.node_count()));
                if config.family == Family::DoubleGaussian && config.mu_c == 0.0 {
                    let reference = analytic_mode(n, m, config.b_sigma, &result.grid)?;
                    notes.push(format!(
                        "analytic_overlap {name} = {:e}",
                        mode.overlap(&reference.values).abs()
                    ));
                }
                columns.push((name, mode.values));
            }
            Err(e) => {
                notes.push(format!("error: {e}"));
                errors.push(e.to_string());
            }
        }
    }
    let nodes = result.grid.nodes();
    let si = config.physical.map(|p| p.sigma_perp);
    let file = match config.format {
        OutputFormat::Csv => {
            let mut text = metadata(Command::Modes, config, &notes);
            let mut header = vec!["k".to_string()];
            if si.is_some() {
                header.push("k_per_m".into());
            }
            header.extend(columns.iter().map(|c| c.0.clone()));
            let _ = writeln!(text, "{}", header.join(","));
            for (i, k) in nodes.iter().enumerate() {
                let mut row = vec![format!("{k:e}")];
                if let Some(s) = si {
                    row.push(format!("{:e}", k * s));
                }
                row.extend(columns.iter().map(|c| format!("{:e}", c.1[i])));
                let _ = writeln!(text, "{}", row.join(","));
            }
            write_file(&config.out.join("modes.csv"), &text)?
        }
        OutputFormat::Json => {
            let modes: serde_json::Map<String, Value> =
                columns.iter().map(|(n, v)| (n.clone(), json!(v))).collect();
            write_json(
                &config.out.join("modes.json"),
                &json!({ "config": config.echo(), "notes": notes, "k": nodes, "modes": modes, "errors": errors }),
            )?
        }
    };
    Ok(CommandOutput {
        files: vec![file],
        summary: format!("modes: {} written, {} errors", columns.len(), errors.len()),
        had_errors: !errors.is_empty(),
    })
}

pub fn cmd_slice(config: &RunConfig) -> Result<CommandOutput> {
    let model = config.model(config.b_sigma)?;
    let slice = ridge_slice(
        &model,
        config.slice_k_max,
        config.slice_n_k,
        config.slice_n_theta,
    )?;
    let mut notes = vec![format!(
        "peak k = {:e}, dtheta = {:e}",
        slice.peak.0, slice.peak.1
    )];
    if config.mu_c > 0.0 {
        notes.push(format!("cutting plane k = mu_c = {}", config.mu_c));
    }
    let file = match config.format {
        OutputFormat::Csv => {
            let mut text = metadata(Command::Slice, config, &notes);
            text.push_str("k,dtheta,probability\n");
            for (i, k) in slice.k.iter().enumerate() {
                for (l, d) in slice.dtheta.iter().enumerate() {
                    let _ = writeln!(text, "{k:e},{d:e},{:e}", slice.values[i][l]);
                }
            }
            write_file(&config.out.join("slice.csv"), &text)?
        }
        OutputFormat::Json => write_json(
            &config.out.join("slice.json"),
            &json!({
                "config": config.echo(),
                "notes": notes,
                "k": slice.k,
                "dtheta": slice.dtheta,
                "probability": slice.values,
            }),
        )?,
    };
    Ok(CommandOutput {
        files: vec![file],
        summary: format!("slice: {}x{} samples", slice.k.len(), slice.dtheta.len()),
        had_errors: false,
    })
}

pub fn cmd_filter(config: &RunConfig) -> Result<CommandOutput> {
    let model = config.model(config.b_sigma)?;
    let outcome = apply_filter(&model, config.mu_c, &config.solver)?;
    let r = outcome.report;
    let files = vec![
        write_json(
            &config.out.join("filter.json"),
            &json!({
                "config": config.echo(),
                "mu_c": r.mu_c,
                "acceptance": r.acceptance,
                "K_filtered": r.k_filtered,
                "K_original": r.k_original,
                "coverage_filtered": outcome.filtered.spectrum.coverage,
                "coverage_original": outcome.original.spectrum.coverage,
            }),
        )?,
        spectrum_table(
            Command::Filter,
            config,
            &outcome.filtered.spectrum,
            &config.out,
            "filtered_spectrum",
        )?,
    ];
    Ok(CommandOutput {
        files,
        summary: format!(
            "filter mu_c={}: K {:.4} -> {:.4}, acceptance = {:.4}",
            r.mu_c, r.k_original, r.k_filtered, r.acceptance
        ),
        had_errors: false,
    })
}

pub fn cmd_oracle(config: &RunConfig) -> Result<CommandOutput> {
    let t = config.b_sigma;
    let spectrum = analytic_spectrum(t, 40, 80)?;
    let top: Vec<Value> = spectrum
        .entries
        .iter()
        .take(TOP_MODES)
        .map(|e| json!([e.n, e.m, e.lambda]))
        .collect();
    let k = analytic_k(t)?;
    let file = write_json(
        &config.out.join("oracle.json"),
        &json!({
            "config": config.echo(),
            "b_sigma": t,
            "K_closed_form": k,
            "xi": spectrum.params.xi,
            "coverage": spectrum.coverage,
            "top_modes": top,
        }),
    )?;
    Ok(CommandOutput {
        files: vec![file],
        summary: format!("oracle bσ⊥={t}: K = {k:.6}, xi = {:.6}", spectrum.params.xi),
        had_errors: false,
    })
}
