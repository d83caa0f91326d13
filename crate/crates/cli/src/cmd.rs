//! Subcommand argument structs and their implementations.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::json;

use chaosdeg_core::circlemap::convergent_decay;
use chaosdeg_core::dynamics::{builtin_map, InitialEnsemble, MapSystem, Orbit};
use chaosdeg_core::infodyn::{
    classify, ecd_of_orbit, ecd_of_system, total_ecd, EcdResult, ObservationSpec,
};
use chaosdeg_core::lyapunov::{lyapunov_1d, lyapunov_md};
use chaosdeg_core::partition::EquiPartition;
use chaosdeg_core::quantum::{
    observable_orbit, parse_matrix_blocks, parse_matrix_text, quantum_ecd_seeded, DensityMatrix,
    QuantumChannel, DEFAULT_SEARCH_TRIALS,
};
use chaosdeg_core::report::{
    bifurcation_csv, ecd_csv_header, ecd_csv_row, ecd_json_record, json_float, lyapunov_csv,
    sweep_csv, LogBase,
};
use chaosdeg_core::sweep::{bifurcation_data, run_sweep, SweepConfig};

use crate::config::{parse_f64_list, parse_usize_list, ConfigFile};
use crate::svg;
use crate::CliError;

const DEFAULT_SKIP: usize = 1000;
const DEFAULT_LENGTH: usize = 100_000;
const DEFAULT_EPSILON: f64 = 1e-6;

#[derive(Args)]
pub struct MapArgs {
    /// Built-in map name (see --help for the catalog)
    #[arg(long)]
    map: Option<String>,
    /// Shorthand for the first parameter (logistic-style `a`)
    #[arg(long, conflicts_with = "params")]
    a: Option<f64>,
    /// Shorthand for the rotation number of the circle map
    #[arg(long, conflicts_with_all = ["params", "a"])]
    v: Option<f64>,
    /// Comma-separated parameter list (overrides the canonical values)
    #[arg(long)]
    params: Option<String>,
}

impl MapArgs {
    fn build(&self, cfg: &ConfigFile) -> Result<MapSystem, CliError> {
        let name = cfg
            .resolve_opt(self.map.clone(), "map")?
            .ok_or_else(|| CliError::Usage("--map is required".into()))?;
        let params = self.resolve_params(cfg)?;
        Ok(builtin_map(&name, &params)?)
    }

    fn resolve_params(&self, cfg: &ConfigFile) -> Result<Vec<f64>, CliError> {
        if let Some(p) = cfg.resolve_opt(self.params.clone(), "params")? {
            return parse_f64_list(&p);
        }
        if let Some(a) = cfg.resolve_opt(self.a, "a")? {
            return Ok(vec![a]);
        }
        if let Some(v) = cfg.resolve_opt(self.v, "v")? {
            return Ok(vec![v]);
        }
        Ok(vec![])
    }
}

fn parse_cells(cfg: &ConfigFile, flag: Option<String>) -> Result<Vec<usize>, CliError> {
    let spec = cfg.resolve(flag, "cells", "100".to_string())?;
    Ok(EquiPartition::parse_spec(&spec)?)
}

fn parse_log_base(cfg: &ConfigFile, flag: Option<String>) -> Result<LogBase, CliError> {
    let s = cfg.resolve(flag, "log-base", "e".to_string())?;
    s.parse::<LogBase>().map_err(CliError::Usage)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OutFormat {
    Csv,
    Json,
}

fn parse_format(cfg: &ConfigFile, flag: Option<String>) -> Result<OutFormat, CliError> {
    match cfg.resolve(flag, "format", "csv".to_string())?.as_str() {
        "csv" => Ok(OutFormat::Csv),
        "json" => Ok(OutFormat::Json),
        other => Err(CliError::Usage(format!(
            "format must be `csv` or `json`, got `{other}`"
        ))),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)?;
    Ok(())
}

fn cells_spec_string(cells: &[usize]) -> String {
    cells
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

// ---------------------------------------------------------------------------
// ecd
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct EcdArgs {
    #[command(flatten)]
    map_args: MapArgs,
    /// Orbit CSV to analyze instead of iterating a map
    #[arg(long)]
    orbit_file: Option<PathBuf>,
    /// Partition spec, e.g. `100` or `32x32`
    #[arg(long)]
    cells: Option<String>,
    /// Discarded transient length
    #[arg(long)]
    skip: Option<usize>,
    /// Orbit length after the transient
    #[arg(long)]
    n: Option<usize>,
    /// Initial point, comma-separated
    #[arg(long)]
    x0: Option<String>,
    /// Stride subsampling before partitioning (time-scaling observation)
    #[arg(long)]
    tau: Option<usize>,
    /// Coordinate projection, comma-separated axis indices
    #[arg(long)]
    project: Option<String>,
    /// Partition the orbit's bounding box instead of the map domain
    #[arg(long)]
    auto_box: bool,
    /// Evaluate an observation family of cell counts (e.g. `10,100,1000`)
    /// and report the infimum
    #[arg(long)]
    family_cells: Option<String>,
    /// Monte Carlo ensemble size for the initial measure (uniform sample)
    #[arg(long)]
    ensemble: Option<usize>,
    /// Also export the generated orbit as CSV (map runs only)
    #[arg(long)]
    dump_orbit: Option<PathBuf>,
    /// Chaotic/stable threshold
    #[arg(long)]
    epsilon: Option<f64>,
    /// Report unit: `e` (nats) or `2` (bits)
    #[arg(long)]
    log_base: Option<String>,
    /// Seed for ensemble sampling
    #[arg(long)]
    seed: Option<u64>,
    /// Output file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: `csv` or `json`
    #[arg(long)]
    format: Option<String>,
    /// Config file of key=value lines
    #[arg(long)]
    config: Option<PathBuf>,
}

fn observation_for(
    cells: Vec<usize>,
    tau: Option<usize>,
    project: Option<Vec<usize>>,
    auto_box: bool,
) -> ObservationSpec {
    let mut obs = ObservationSpec::new();
    if let Some(t) = tau {
        obs = obs.then_time_scale(t);
    }
    if let Some(axes) = project {
        obs = obs.then_project(axes);
    }
    if auto_box {
        obs = obs.then_stage(chaosdeg_core::infodyn::ObsStage::Partition {
            cells_per_axis: cells,
            source: chaosdeg_core::infodyn::BoxSource::Auto,
        });
    } else {
        obs = obs.then_partition(cells);
    }
    obs
}

pub fn run_ecd(args: EcdArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let cells = parse_cells(&cfg, args.cells)?;
    let skip = cfg.resolve(args.skip, "skip", DEFAULT_SKIP)?;
    let length = cfg.resolve(args.n, "n", DEFAULT_LENGTH)?;
    let epsilon = cfg.resolve(args.epsilon, "epsilon", DEFAULT_EPSILON)?;
    let base = parse_log_base(&cfg, args.log_base)?;
    let format = parse_format(&cfg, args.format)?;
    let seed = cfg.resolve(args.seed, "seed", 0u64)?;
    let tau = cfg.resolve_opt(args.tau, "tau")?;
    let project = match cfg.resolve_opt(args.project.clone(), "project")? {
        Some(s) => Some(parse_usize_list(&s)?),
        None => None,
    };
    let orbit_file = args
        .orbit_file
        .clone()
        .or(cfg.get::<PathBuf>("orbit-file")?);

    let (label, params, result, used_spec) = if let Some(path) = orbit_file {
        // external series: the partition box is always the orbit's own
        // bounding box
        let file = fs::File::open(&path)?;
        let orbit = Orbit::read_csv(std::io::BufReader::new(file))?;
        let obs = observation_for(cells.clone(), tau, project, true);
        let domain = orbit.bounding_box()?;
        let result = ecd_of_orbit(&orbit, &domain, &obs)?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        (format!("orbit:{stem}"), vec![], result, cells_spec_string(&cells))
    } else {
        let system = args.map_args.build(&cfg)?;
        let x0 = match cfg.resolve_opt(args.x0.clone(), "x0")? {
            Some(s) => parse_f64_list(&s)?,
            None => system.default_x0().to_vec(),
        };
        let ensemble = match cfg.resolve_opt(args.ensemble, "ensemble")? {
            Some(m) => InitialEnsemble::sample_domain(system.domain(), m, seed)?,
            None => InitialEnsemble::point(&x0),
        };
        if let Some(path) = &args.dump_orbit {
            let orbit = chaosdeg_core::dynamics::iterate_map(&system, &x0, skip, length)?;
            let mut buf = Vec::new();
            orbit.write_csv(&mut buf)?;
            fs::write(path, buf)?;
        }
        let family_cells = cfg.resolve_opt(args.family_cells.clone(), "family-cells")?;
        if let Some(spec) = family_cells {
            let family: Vec<ObservationSpec> = parse_usize_list(&spec)?
                .into_iter()
                .map(|l| observation_for(vec![l], tau, project.clone(), args.auto_box))
                .collect();
            if family.is_empty() {
                return Err(CliError::Usage("empty observation family".into()));
            }
            let (idx, result) = total_ecd(&system, &ensemble, &family, skip, length)?;
            println!(
                "infimum over {} observations attained by #{idx} ({})",
                family.len(),
                result.observation
            );
            let spec_str = result.observation.clone();
            (
                system.name().to_string(),
                system.params().to_vec(),
                result,
                spec_str,
            )
        } else {
            let obs = observation_for(cells.clone(), tau, project, args.auto_box);
            let result = ecd_of_system(&system, &ensemble, &obs, skip, length)?;
            (
                system.name().to_string(),
                system.params().to_vec(),
                result,
                cells_spec_string(&cells),
            )
        }
    };

    emit_ecd_result(
        &label, &params, &used_spec, skip, length, &result, epsilon, base, seed, format,
        args.out.as_deref(),
    )
}

#[allow(clippy::too_many_arguments)]
fn emit_ecd_result(
    map: &str,
    params: &[f64],
    partition_spec: &str,
    skip: usize,
    length: usize,
    result: &EcdResult,
    epsilon: f64,
    base: LogBase,
    seed: u64,
    format: OutFormat,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let f = base.factor();
    println!(
        "D = {} {} ({}), S_out = {}, I = {}, observation = {}",
        result.value * f,
        base.column_suffix(),
        classify(result.value, epsilon),
        result.s_out * f,
        result.mutual * f,
        result.observation
    );
    let rendered = match format {
        OutFormat::Csv => format!(
            "{}\n{}\n",
            ecd_csv_header(base),
            ecd_csv_row(map, params, partition_spec, skip, length, result, epsilon, base)
        ),
        OutFormat::Json => {
            let mut record = ecd_json_record(
                map, params, partition_spec, skip, length, result, epsilon, base, seed,
            );
            record["subcommand"] = json!("ecd");
            format!("{record}\n")
        }
    };
    match out {
        Some(path) => write_file(path, &rendered)?,
        None => {
            if format == OutFormat::Json {
                print!("{rendered}");
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    map_args: MapArgs,
    /// Grid start
    #[arg(long)]
    from: Option<f64>,
    /// Grid end (inclusive)
    #[arg(long)]
    to: Option<f64>,
    /// Grid step
    #[arg(long)]
    step: Option<f64>,
    /// Which parameter the grid replaces (0-based)
    #[arg(long)]
    param_index: Option<usize>,
    #[arg(long)]
    cells: Option<String>,
    #[arg(long)]
    skip: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    log_base: Option<String>,
    /// Recorded for reproducibility; sweep evaluation itself is deterministic
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG prefix: writes `<prefix>.ecd.svg` and `<prefix>.lyapunov.svg`
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run_sweep_cmd(args: SweepArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let require = |v: Option<f64>, key: &str| -> Result<f64, CliError> {
        cfg.resolve_opt(v, key)?
            .ok_or_else(|| CliError::Usage(format!("--{key} is required")))
    };
    let start = require(args.from, "from")?;
    let end = require(args.to, "to")?;
    let step = require(args.step, "step")?;
    let base = parse_log_base(&cfg, args.log_base)?;
    let map = cfg
        .resolve_opt(args.map_args.map.clone(), "map")?
        .ok_or_else(|| CliError::Usage("--map is required".into()))?;
    let mut base_params = args.map_args.resolve_params(&cfg)?;
    if base_params.is_empty() {
        // grid values replace a parameter slot; materialize the canonical set
        base_params = builtin_map(&map, &[])?.params().to_vec();
    }
    let x0 = match cfg.resolve_opt(args.x0.clone(), "x0")? {
        Some(s) => Some(parse_f64_list(&s)?),
        None => None,
    };
    let config = SweepConfig {
        map,
        base_params,
        param_index: cfg.resolve(args.param_index, "param-index", 0)?,
        start,
        end,
        step,
        cells: parse_cells(&cfg, args.cells)?,
        skip: cfg.resolve(args.skip, "skip", DEFAULT_SKIP)?,
        length: cfg.resolve(args.n, "n", DEFAULT_LENGTH)?,
        x0,
    };
    // accepted for the config contract; sweeps draw no random numbers
    let _seed = cfg.resolve(args.seed, "seed", 0u64)?;
    let rows = run_sweep(&config)?;
    for r in rows.iter().filter(|r| r.warning.is_some()) {
        eprintln!(
            "warning: param {} failed: {}",
            r.param,
            r.warning.as_deref().unwrap_or("")
        );
    }
    let csv = sweep_csv(&rows, base);
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(prefix) = &args.svg {
        let f = base.factor();
        let d_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.param, r.d * f)).collect();
        let l_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.param, r.lambda)).collect();
        let unit = base.column_suffix();
        write_file(
            &suffixed(prefix, ".ecd.svg"),
            &svg::line_plot("chaos degree", "parameter", &format!("D ({unit})"), &d_pts),
        )?;
        write_file(
            &suffixed(prefix, ".lyapunov.svg"),
            &svg::line_plot("Lyapunov exponent", "parameter", "lambda", &l_pts),
        )?;
    }
    eprintln!("sweep: {} rows", rows.len());
    Ok(())
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

// ---------------------------------------------------------------------------
// bifurcation
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct BifurcationArgs {
    #[command(flatten)]
    map_args: MapArgs,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    param_index: Option<usize>,
    /// Post-transient points kept per parameter value
    #[arg(long)]
    keep: Option<usize>,
    #[arg(long)]
    skip: Option<usize>,
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG path for the scatter plot
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run_bifurcation(args: BifurcationArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let require = |v: Option<f64>, key: &str| -> Result<f64, CliError> {
        cfg.resolve_opt(v, key)?
            .ok_or_else(|| CliError::Usage(format!("--{key} is required")))
    };
    let start = require(args.from, "from")?;
    let end = require(args.to, "to")?;
    let step = require(args.step, "step")?;
    let map = cfg
        .resolve_opt(args.map_args.map.clone(), "map")?
        .ok_or_else(|| CliError::Usage("--map is required".into()))?;
    let mut base_params = args.map_args.resolve_params(&cfg)?;
    if base_params.is_empty() {
        base_params = builtin_map(&map, &[])?.params().to_vec();
    }
    if builtin_map(&map, &base_params)?.dim() != 1 {
        return Err(CliError::Usage(
            "bifurcation diagrams are for 1-D maps".into(),
        ));
    }
    let x0 = match cfg.resolve_opt(args.x0.clone(), "x0")? {
        Some(s) => Some(parse_f64_list(&s)?),
        None => None,
    };
    let rows = bifurcation_data(
        &map,
        &base_params,
        cfg.resolve(args.param_index, "param-index", 0)?,
        start,
        end,
        step,
        x0.as_deref(),
        cfg.resolve(args.skip, "skip", DEFAULT_SKIP)?,
        cfg.resolve(args.keep, "keep", 200)?,
    )?;
    let csv = bifurcation_csv(&rows);
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.svg {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .flat_map(|(p, xs)| xs.iter().map(move |x| (*p, *x)))
            .collect();
        write_file(
            path,
            &svg::scatter_plot("bifurcation diagram", "parameter", "x", &pts),
        )?;
    }
    eprintln!("bifurcation: {} parameter values", rows.len());
    Ok(())
}

// ---------------------------------------------------------------------------
// circle-decay
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct CircleDecayArgs {
    /// Rotation number in (0,1)
    #[arg(long)]
    v: Option<f64>,
    /// Maximum number of convergents
    #[arg(long)]
    depth: Option<usize>,
    /// Initial angle
    #[arg(long)]
    theta0: Option<f64>,
    #[arg(long)]
    skip: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG path for the log-scale decay plot
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run_circle_decay(args: CircleDecayArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let v = cfg
        .resolve_opt(args.v, "v")?
        .ok_or_else(|| CliError::Usage("--v is required".into()))?;
    let depth = cfg.resolve(args.depth, "depth", 7)?;
    let theta0 = cfg.resolve(args.theta0, "theta0", 0.5)?;
    let skip = cfg.resolve(args.skip, "skip", DEFAULT_SKIP)?;
    let length = cfg.resolve(args.n, "n", 1_000_000)?;
    let table = convergent_decay(v, depth, theta0, skip, length)?;
    if table.truncated {
        eprintln!(
            "warning: expansion truncated at {} convergents (floating-point resolution)",
            table.rows.len()
        );
    }
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    let csv = String::from_utf8(csv).expect("csv is utf-8");
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.svg {
        // log-scale decay: log10 of both the closed form and its bound
        let theo: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter(|r| r.d_theoretical > 0.0)
            .map(|r| (r.denominator as f64, r.d_theoretical.log10()))
            .collect();
        let bound: Vec<(f64, f64)> = table
            .rows
            .iter()
            .map(|r| (r.denominator as f64, r.bound.log10()))
            .collect();
        write_file(
            path,
            &svg::multi_line_plot(
                "rotation-map chaos degree vs convergent denominator",
                "c_j",
                "log10 D",
                &[("D theoretical", &theo), ("log(c)/c", &bound)],
            ),
        )?;
    }
    eprintln!("circle-decay: {} rows", table.rows.len());
    Ok(())
}

// ---------------------------------------------------------------------------
// lyapunov
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct LyapunovArgs {
    #[command(flatten)]
    map_args: MapArgs,
    #[arg(long)]
    x0: Option<String>,
    #[arg(long)]
    skip: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Include the full spectrum (multi-dimensional maps)
    #[arg(long)]
    spectrum: bool,
    /// QR re-orthonormalization period
    #[arg(long)]
    ortho_period: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run_lyapunov(args: LyapunovArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let system = args.map_args.build(&cfg)?;
    let x0 = match cfg.resolve_opt(args.x0.clone(), "x0")? {
        Some(s) => parse_f64_list(&s)?,
        None => system.default_x0().to_vec(),
    };
    let skip = cfg.resolve(args.skip, "skip", DEFAULT_SKIP)?;
    let n = cfg.resolve(args.n, "n", DEFAULT_LENGTH)?;
    let format = parse_format(&cfg, args.format)?;
    let result = if system.dim() == 1 {
        lyapunov_1d(&system, x0[0], skip, n)?
    } else {
        let period = cfg.resolve(args.ortho_period, "ortho-period", 1)?;
        lyapunov_md(&system, &x0, skip, n, period)?
    };
    println!(
        "lambda_top = {} (converged = {})",
        result.top_exponent, result.converged
    );
    if args.spectrum {
        if let Some(spec) = &result.spectrum {
            println!(
                "spectrum = [{}]",
                spec.iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
    }
    let rendered = match format {
        OutFormat::Csv => lyapunov_csv(
            system.name(),
            system.params(),
            skip,
            &result,
            args.spectrum,
        ),
        OutFormat::Json => {
            let record = json!({
                "subcommand": "lyapunov",
                "map": system.name(),
                "params": system.params(),
                "x0": x0,
                "skip": skip,
                "n": result.n_used,
                "lambda_top": json_float(result.top_exponent),
                "spectrum": result.spectrum.as_ref().map(|s| {
                    s.iter().map(|l| json_float(*l)).collect::<Vec<_>>()
                }),
                "converged": result.converged,
                "history": result.convergence_history.iter()
                    .map(|(k, l)| json!([k, json_float(*l)])).collect::<Vec<_>>(),
            });
            format!("{record}\n")
        }
    };
    match &args.out {
        Some(path) => write_file(path, &rendered)?,
        None => {
            if format == OutFormat::Json {
                print!("{rendered}");
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// quantum-ecd
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct QuantumEcdArgs {
    /// Density-matrix file (dimension header, rows of `re,im` entries)
    #[arg(long)]
    state: Option<PathBuf>,
    /// Kraus-operator file (matrix blocks separated by blank lines)
    #[arg(long)]
    kraus: Option<PathBuf>,
    /// Random decomposition-search trials for degenerate spectra
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Hermitian observable file: also run the observable-orbit reduction
    /// through the classical pipeline
    #[arg(long)]
    observable: Option<PathBuf>,
    /// Cells for the observable-orbit partition
    #[arg(long)]
    cells: Option<String>,
    /// Observable-orbit length
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run_quantum_ecd(args: QuantumEcdArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let state_path = args
        .state
        .clone()
        .or(cfg.get("state")?)
        .ok_or_else(|| CliError::Usage("--state is required".into()))?;
    let kraus_path = args
        .kraus
        .clone()
        .or(cfg.get("kraus")?)
        .ok_or_else(|| CliError::Usage("--kraus is required".into()))?;
    let trials = cfg.resolve(args.trials, "trials", DEFAULT_SEARCH_TRIALS)?;
    let seed = cfg.resolve(args.seed, "seed", 0x5eed_cd01u64)?;
    let epsilon = cfg.resolve(args.epsilon, "epsilon", DEFAULT_EPSILON)?;
    let format = parse_format(&cfg, args.format)?;

    let rho = DensityMatrix::new(parse_matrix_text(&fs::read_to_string(&state_path)?)?)?;
    let kraus = parse_matrix_blocks(&fs::read_to_string(&kraus_path)?)?
        .into_iter()
        .map(|(_, m)| m)
        .collect();
    let channel = QuantumChannel::new(kraus)?;
    let d_quantum = quantum_ecd_seeded(&rho, &channel, trials, seed)?;
    println!("quantum D = {d_quantum} nats");

    let observable_path = args.observable.clone().or(cfg.get("observable")?);
    let classical = if let Some(path) = observable_path {
        let x = parse_matrix_text(&fs::read_to_string(&path)?)?;
        let n = cfg.resolve(args.n, "n", 10_000)?;
        let xs = observable_orbit(&rho, &channel, &x, n)?;
        let orbit = Orbit::from_series(&xs)?;
        let cells = parse_cells(&cfg, args.cells)?;
        let obs = observation_for(cells, None, None, true);
        let domain = orbit.bounding_box()?;
        let r = ecd_of_orbit(&orbit, &domain, &obs)?;
        println!(
            "observable-orbit D = {} nats ({})",
            r.value,
            classify(r.value, epsilon)
        );
        Some(r)
    } else {
        None
    };

    let rendered = match format {
        OutFormat::Csv => {
            let mut header = String::from("dim,kraus,trials,D_nats");
            let mut row = format!(
                "{},{},{trials},{d_quantum}",
                rho.dim(),
                channel.kraus().len()
            );
            if let Some(r) = &classical {
                header.push_str(",observable_D_nats,observable_classification");
                row.push_str(&format!(",{},{}", r.value, classify(r.value, epsilon)));
            }
            format!("{header}\n{row}\n")
        }
        OutFormat::Json => {
            let record = json!({
                "subcommand": "quantum-ecd",
                "dim": rho.dim(),
                "kraus": channel.kraus().len(),
                "trials": trials,
                "seed": seed,
                "d": json_float(d_quantum),
                "observable_d": classical.as_ref().map(|r| json_float(r.value)),
            });
            format!("{record}\n")
        }
    };
    match &args.out {
        Some(path) => write_file(path, &rendered)?,
        None => {
            if format == OutFormat::Json {
                print!("{rendered}");
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

#[derive(Args)]
pub struct IngestArgs {
    /// Orbit CSV to parse
    #[arg(long)]
    input: Option<PathBuf>,
    /// Re-export path (bit-exact round trip)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run_ingest(args: IngestArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let input = args
        .input
        .clone()
        .or(cfg.get("input")?)
        .ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let file = fs::File::open(&input)?;
    let orbit = Orbit::read_csv(std::io::BufReader::new(file))?;
    let bbox = orbit.bounding_box()?;
    println!(
        "orbit: dim = {}, points = {}, box = {:?} .. {:?}",
        orbit.dim(),
        orbit.len(),
        bbox.lo(),
        bbox.hi()
    );
    if let Some(path) = &args.out {
        let mut buf = Vec::new();
        orbit.write_csv(&mut buf)?;
        fs::write(path, buf)?;
    }
    Ok(())
}
