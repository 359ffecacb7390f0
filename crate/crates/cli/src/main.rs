//! `curvens` — deterministic command-line front end for the
//! curvature-ensemble toolkit. Every verification pipeline is a subcommand
//! with machine-readable JSON output (CSV for sweep tables).
//!
//! Exit codes: 0 success, 1 verification failure (`--verify`, `verify-all`),
//! 2 usage or input error.

use clap::{Args, Parser, Subcommand};
use curvens_core::catalog::CatalogEntry;
use curvens_core::dynamics::{parse_scenario, relax_to_stationary, RelaxOptions};
use curvens_core::ensemble::{
    dominance_ratio, log_grid, mixed_integral_cprime, quartic_integral_c, scaling_exponent,
    EnsembleConfig, ScalingBranch,
};
use curvens_core::mass::{mass_report, pressure_profile_integrate};
use curvens_core::metric::Signature;
use curvens_core::quadrature::{
    action_per_unit_time, dilation_curve, volume, Normalization, QuadratureSpec, VolumeMode,
};
use curvens_core::verify::{run_all, VerifyOptions};
use curvens_core::xi::{fit_expansion, sweep, COEFFICIENT_V_GRID, DEFAULT_V_GRID};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "curvens",
    about = "Curvature tensors, quadratic curvature actions and ensemble statistics for catalog 4-metrics",
    version
)]
struct Cli {
    /// Worker threads (default: CURVENS_THREADS or 1 for bit-reproducibility).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Suppress the timestamp field so identical runs emit identical bytes.
    #[arg(long, global = true)]
    deterministic: bool,

    /// Write the JSON report to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Print the resolved run configuration as JSON and exit.
    #[arg(long, global = true)]
    dump_config: bool,

    /// Load the run configuration from a JSON file (as produced by
    /// --dump-config) instead of subcommand flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Serialize, Deserialize, Clone)]
#[serde(tag = "subcommand", rename_all = "kebab-case", deny_unknown_fields)]
enum Command {
    /// Curvature tensors of a catalog metric at a point.
    Curvature(CurvatureArgs),
    /// Quadratic curvature action over a coordinate box.
    Action(ActionArgs),
    /// Volume of a coordinate box.
    Volume(VolumeArgs),
    /// Action of spatially dilated handles across a factor list.
    Dilation(DilationArgs),
    /// Single Ξ(v) evaluation.
    Xi(XiArgs),
    /// Ξ(v) sweep: CSV samples plus the fitted even-quartic expansion.
    XiSweep(XiSweepArgs),
    /// Ensemble statistics: scaling slopes, integrals, dominance ratio.
    Ensemble(EnsembleArgs),
    /// Exterior mass profile and stationary-mass report.
    Mass(MassArgs),
    /// Relax a worldline scenario to stationarity and report energies.
    Dynamics(DynamicsArgs),
    /// Run the full verification suite.
    VerifyAll(VerifyAllArgs),
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct CurvatureArgs {
    /// Metric id, e.g. `wormhole-static:a=1`, `schwarzschild:M=1`.
    metric: String,
    /// Point as `t,r,theta,phi` (Cartesian coordinates for flat metrics).
    #[arg(long, value_parser = parse_point)]
    point: Point4,
    /// Use central finite differences instead of analytic derivatives.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    fd: bool,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-4)]
    #[serde(default = "default_fd_step")]
    step: f64,
}

fn default_fd_step() -> f64 {
    1e-4
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct ActionArgs {
    metric: String,
    /// Radial interval `lo:hi`; defaults to the full handle for wormholes.
    #[arg(long, value_parser = parse_interval)]
    #[serde(default)]
    radial: Option<(f64, f64)>,
    #[arg(long, default_value_t = 64)]
    #[serde(default = "default_nodes")]
    nodes: usize,
    /// `full` or `half`.
    #[arg(long, default_value = "half")]
    #[serde(default = "default_normalization")]
    normalization: String,
    /// `metric` (√|det g|) or `fixed-static`.
    #[arg(long, default_value = "metric")]
    #[serde(default = "default_volume_mode")]
    volume_mode: String,
}

fn default_nodes() -> usize {
    64
}

fn default_normalization() -> String {
    "half".into()
}

fn default_volume_mode() -> String {
    "metric".into()
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct VolumeArgs {
    metric: String,
    #[arg(long, value_parser = parse_interval)]
    #[serde(default)]
    radial: Option<(f64, f64)>,
    #[arg(long, default_value_t = 64)]
    #[serde(default = "default_nodes")]
    nodes: usize,
    #[arg(long, default_value = "metric")]
    #[serde(default = "default_volume_mode")]
    volume_mode: String,
    /// Lower |det g| floor for charts with coordinate degeneracies.
    #[arg(long)]
    #[serde(default)]
    det_floor: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct DilationArgs {
    #[arg(long, default_value = "wormhole-static:a=1")]
    #[serde(default = "default_handle")]
    metric: String,
    /// Comma-separated dilation factors.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 2.0, 4.0])]
    #[serde(default = "default_lambdas")]
    lambdas: Vec<f64>,
    #[arg(long, default_value_t = 32)]
    #[serde(default = "default_sweep_nodes")]
    nodes: usize,
    /// Exit 1 unless I(λ)·λ matches I(1) to 1e-6.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    verify: bool,
}

fn default_handle() -> String {
    "wormhole-static:a=1".into()
}

fn default_lambdas() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 4.0]
}

fn default_sweep_nodes() -> usize {
    32
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct XiArgs {
    #[arg(long)]
    v: f64,
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    euclidean: bool,
    #[arg(long, default_value_t = 32)]
    #[serde(default = "default_sweep_nodes")]
    nodes: usize,
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct XiSweepArgs {
    #[arg(long, conflicts_with = "euclidean", default_value_t = false)]
    #[serde(default)]
    lorentzian: bool,
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    euclidean: bool,
    /// Speed grid; defaults to the sweep grid (0..0.3), or the small
    /// coefficient grid under --verify.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    v_grid: Option<Vec<f64>>,
    /// Upper bound of the slow-rotation regime; grids beyond it are
    /// rejected.
    #[arg(long, default_value_t = 0.3)]
    #[serde(default = "default_v_max")]
    v_max: f64,
    #[arg(long, default_value_t = 32)]
    #[serde(default = "default_sweep_nodes")]
    nodes: usize,
    /// Write the sweep as CSV (`v,xi,signature`) to this path.
    #[arg(long)]
    #[serde(default)]
    csv: Option<PathBuf>,
    /// Check the expansion against the reference ratios; exit 1 on failure.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    verify: bool,
}

fn default_v_max() -> f64 {
    0.3
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct EnsembleArgs {
    /// `flat`, `background`, `integrals` or `dominance`.
    #[arg(long, default_value = "flat")]
    #[serde(default = "default_mode")]
    mode: String,
    /// μ_Δ grid `lo:hi:count` (log-spaced).
    #[arg(long, default_value = "1e2:1e6:9", value_parser = parse_grid)]
    #[serde(default = "default_mu_grid")]
    mu_grid: (f64, f64, usize),
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_rho")]
    rho: f64,
    #[arg(long, default_value_t = 1e4)]
    #[serde(default = "default_mu_delta")]
    mu_delta: f64,
    #[arg(long, default_value_t = 100)]
    #[serde(default = "default_cells")]
    cells: u64,
    #[arg(long, default_value_t = 42)]
    #[serde(default = "default_seed")]
    seed: u64,
    #[arg(long, default_value_t = 200_000)]
    #[serde(default = "default_samples")]
    samples: u64,
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    verify: bool,
}

fn default_mode() -> String {
    "flat".into()
}

fn default_mu_grid() -> (f64, f64, usize) {
    (1e2, 1e6, 9)
}

fn default_rho() -> f64 {
    1.0
}

fn default_mu_delta() -> f64 {
    1e4
}

fn default_cells() -> u64 {
    100
}

fn default_seed() -> u64 {
    42
}

fn default_samples() -> u64 {
    200_000
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct MassArgs {
    #[arg(long)]
    m: f64,
    #[arg(long)]
    r0: f64,
    /// Write `r,a` profile samples to this CSV path.
    #[arg(long)]
    #[serde(default)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 100.0)]
    #[serde(default = "default_r_max")]
    r_max: f64,
}

fn default_r_max() -> f64 {
    100.0
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct DynamicsArgs {
    /// Scenario file; see docs/scenario.md.
    #[arg(long)]
    scenario: PathBuf,
    /// Report the input state without relaxing it.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    no_relax: bool,
}

#[derive(Args, Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
struct VerifyAllArgs {
    #[arg(long, default_value_t = 42)]
    #[serde(default = "default_seed")]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    #[serde(default = "default_verify_samples")]
    samples: u64,
    #[arg(long, default_value_t = 64)]
    #[serde(default = "default_nodes")]
    nodes: usize,
}

fn default_verify_samples() -> u64 {
    1_000_000
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
struct Point4([f64; 4]);

fn parse_point(s: &str) -> Result<Point4, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected t,r,theta,phi; got '{s}'"));
    }
    let mut p = [0.0; 4];
    for (slot, part) in p.iter_mut().zip(parts.iter()) {
        *slot = part
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("bad coordinate '{part}'"))?;
    }
    Ok(Point4(p))
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    let lo = lo.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let hi = hi.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:count, got '{s}'"));
    }
    Ok((
        parts[0].parse::<f64>().map_err(|e| e.to_string())?,
        parts[1].parse::<f64>().map_err(|e| e.to_string())?,
        parts[2].parse::<usize>().map_err(|e| e.to_string())?,
    ))
}

/// CLI failure: message plus the exit-code class.
enum CliError {
    Usage(String),
    Verification(String),
}

impl From<curvens_core::Error> for CliError {
    fn from(e: curvens_core::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn default_radial_box(entry: &CatalogEntry) -> Option<(f64, f64)> {
    match *entry {
        CatalogEntry::WormholeStatic { a } => Some((-a, a)),
        CatalogEntry::WormholeRotating { .. } | CatalogEntry::WormholeRotatingEuclidean { .. } => {
            Some((-1.0, 1.0))
        }
        _ => None,
    }
}

fn parse_normalization(s: &str) -> CliResult<Normalization> {
    match s {
        "full" => Ok(Normalization::FullHandle),
        "half" => Ok(Normalization::HalfHandle),
        other => Err(CliError::Usage(format!(
            "normalization must be 'full' or 'half', got '{other}'"
        ))),
    }
}

fn parse_volume_mode(s: &str) -> CliResult<VolumeMode> {
    match s {
        "metric" => Ok(VolumeMode::MetricDensity),
        "fixed-static" => Ok(VolumeMode::FixedStatic),
        other => Err(CliError::Usage(format!(
            "volume mode must be 'metric' or 'fixed-static', got '{other}'"
        ))),
    }
}

fn build_spec(
    metric: &str,
    radial: Option<(f64, f64)>,
    nodes: usize,
    volume_mode: &str,
) -> CliResult<(curvens_core::MetricField, QuadratureSpec)> {
    let entry = CatalogEntry::parse(metric)?;
    let field = entry.build()?;
    let radial = radial
        .or_else(|| default_radial_box(&entry))
        .ok_or_else(|| {
            CliError::Usage(format!("--radial lo:hi is required for metric '{metric}'"))
        })?;
    let spec = QuadratureSpec::over_radial(radial.0, radial.1, nodes)?
        .with_volume_mode(parse_volume_mode(volume_mode)?);
    Ok((field, spec))
}

fn run(command: &Command) -> CliResult<serde_json::Value> {
    match command {
        Command::Curvature(args) => {
            let entry = CatalogEntry::parse(&args.metric)?;
            let mut field = entry.build()?;
            if args.fd {
                field = field
                    .with_mode(curvens_core::DerivativeMode::FiniteDifference { h: args.step });
            }
            let bundle = field.curvature_at(args.point.0)?;
            Ok(json!({
                "metric": args.metric,
                "bundle": bundle,
                "ricci_norm": bundle.ricci_norm(),
                "max_abs_ricci": bundle.max_abs_ricci(),
            }))
        }
        Command::Action(args) => {
            let (field, spec) =
                build_spec(&args.metric, args.radial, args.nodes, &args.volume_mode)?;
            let normalization = parse_normalization(&args.normalization)?;
            let result = action_per_unit_time(&field, &spec, normalization)?;
            Ok(serde_json::to_value(&result).expect("serializable"))
        }
        Command::Volume(args) => {
            let (mut field, spec) =
                build_spec(&args.metric, args.radial, args.nodes, &args.volume_mode)?;
            if let Some(floor) = args.det_floor {
                field = field.with_det_floor(floor);
            }
            let value = volume(&field, &spec)?;
            Ok(json!({ "metric": args.metric, "volume": value, "nodes": spec.nodes }))
        }
        Command::Dilation(args) => {
            let (field, spec) = build_spec(&args.metric, None, args.nodes, "metric")?;
            let curve = dilation_curve(&field, &spec, Normalization::FullHandle, &args.lambdas)?;
            let base = action_per_unit_time(&field, &spec, Normalization::FullHandle)?.value;
            let max_err = curve
                .iter()
                .map(|&(l, v)| ((v * l - base) / base).abs())
                .fold(0.0_f64, f64::max);
            let report = json!({
                "metric": args.metric,
                "base_action": base,
                "curve": curve,
                "max_scaling_err": max_err,
            });
            if args.verify && max_err > 1e-6 {
                print_report(&report);
                return Err(CliError::Verification(format!(
                    "dilation scaling error {max_err:.2e} exceeds 1e-6"
                )));
            }
            Ok(report)
        }
        Command::Xi(args) => {
            let signature = if args.euclidean {
                Signature::Euclidean
            } else {
                Signature::Lorentzian
            };
            let value = curvens_core::xi::xi_of_v(
                args.v,
                signature,
                args.nodes,
                Normalization::HalfHandle,
            )?;
            Ok(json!({ "v": args.v, "signature": signature, "xi": value }))
        }
        Command::XiSweep(args) => run_xi_sweep(args),
        Command::Ensemble(args) => run_ensemble(args),
        Command::Mass(args) => {
            let report = mass_report(args.m, args.r0)?;
            if let Some(path) = &args.csv {
                if args.r_max <= args.r0 {
                    return Err(CliError::Usage("--r-max must exceed --r0".into()));
                }
                let samples = pressure_profile_integrate(
                    args.r0,
                    args.r_max,
                    2.0 * args.m / args.r_max,
                    512,
                )?;
                let mut csv = String::from("r,a\n");
                for (r, a) in samples {
                    csv.push_str(&format!("{r},{a}\n"));
                }
                std::fs::write(path, csv)?;
            }
            Ok(serde_json::to_value(&report).expect("serializable"))
        }
        Command::Dynamics(args) => {
            let text = std::fs::read_to_string(&args.scenario)?;
            let state = parse_scenario(&text)?;
            if args.no_relax {
                let energies: Result<Vec<f64>, _> =
                    (0..state.intervals()).map(|k| state.energy(k)).collect();
                return Ok(json!({
                    "relaxed": false,
                    "energies": energies?,
                    "xi_total": state.xi_total()?,
                    "boundary_times": state.boundary_times,
                }));
            }
            let report = relax_to_stationary(&state, RelaxOptions::default())?;
            Ok(json!({
                "relaxed": true,
                "energies": report.energies,
                "xi_total": report.xi_total,
                "iterations": report.iterations,
                "max_residual": report.max_residual,
                "boundary_times": report.state.boundary_times,
            }))
        }
        Command::VerifyAll(args) => {
            let opts = VerifyOptions {
                seed: args.seed,
                mc_samples: args.samples,
                action_nodes: args.nodes,
                sweep_nodes: 32,
            };
            let reports = run_all(&opts)?;
            for report in &reports {
                println!("{}", report.line());
            }
            let all_passed = reports.iter().all(|r| r.passed);
            let value = json!({
                "passed": all_passed,
                "criteria": reports,
                "seed": args.seed,
            });
            if !all_passed {
                return Err(CliError::Verification("verification suite failed".into()));
            }
            Ok(value)
        }
    }
}

fn run_xi_sweep(args: &XiSweepArgs) -> CliResult<serde_json::Value> {
    if args.v_max > 0.3 {
        return Err(CliError::Usage(format!(
            "--v-max {} is outside the slow-rotation regime (<= 0.3)",
            args.v_max
        )));
    }
    let signature = if args.euclidean {
        Signature::Euclidean
    } else {
        Signature::Lorentzian
    };
    let grid: Vec<f64> = match (&args.v_grid, args.verify) {
        (Some(g), _) => g.clone(),
        (None, true) => COEFFICIENT_V_GRID.to_vec(),
        (None, false) => DEFAULT_V_GRID.to_vec(),
    };
    if grid.iter().any(|v| v.abs() > args.v_max + 1e-12) {
        return Err(CliError::Usage(format!(
            "v grid exceeds --v-max {}",
            args.v_max
        )));
    }
    let samples = sweep(&grid, signature, args.nodes, Normalization::HalfHandle)?;
    let fit = fit_expansion(&samples)?;

    if let Some(path) = &args.csv {
        let tag = match signature {
            Signature::Lorentzian => "lorentzian",
            Signature::Euclidean => "euclidean",
        };
        let mut csv = String::from("v,xi,signature\n");
        for (v, xi) in &samples {
            csv.push_str(&format!("{v},{xi},{tag}\n"));
        }
        std::fs::write(path, csv)?;
    }

    let report = json!({
        "signature": signature,
        "nodes": args.nodes,
        "samples": samples,
        "expansion": fit,
    });

    if args.verify {
        let (r2_target, r4_target) = match signature {
            Signature::Lorentzian => (-65.485 / 57.820, 53.735 / 57.820),
            Signature::Euclidean => (65.485 / 57.820, 184.71 / 57.820),
        };
        let sign_ok = match signature {
            Signature::Lorentzian => fit.c2 < 0.0,
            Signature::Euclidean => fit.c2 > 0.0,
        };
        let e2 = ((fit.ratios.0 - r2_target) / r2_target).abs();
        let e4 = ((fit.ratios.1 - r4_target) / r4_target).abs();
        if !(sign_ok && e2 <= 0.02 && e4 <= 0.05) {
            print_report(&report);
            return Err(CliError::Verification(format!(
                "expansion check failed: sign {sign_ok}, c2/c0 err {:.2}%, c4/c0 err {:.2}%",
                e2 * 100.0,
                e4 * 100.0
            )));
        }
    }
    Ok(report)
}

fn run_ensemble(args: &EnsembleArgs) -> CliResult<serde_json::Value> {
    let config = EnsembleConfig {
        mu_delta: args.mu_delta,
        cells: args.cells,
        rho: args.rho,
        seed: args.seed,
        samples: args.samples,
        ..Default::default()
    };
    let (lo, hi, count) = args.mu_grid;
    match args.mode.as_str() {
        "flat" | "background" => {
            let branch = if args.mode == "flat" {
                ScalingBranch::RicciFlat
            } else {
                ScalingBranch::RicciBackground
            };
            let target = match branch {
                ScalingBranch::RicciFlat => -2.5,
                ScalingBranch::RicciBackground => -2.75,
            };
            let report = scaling_exponent(branch, &log_grid(lo, hi, count), &config)?;
            let value = json!({
                "mode": args.mode,
                "slope": report.slope,
                "stderr": report.stderr,
                "target": target,
                "mu_grid": report.mu_grid,
                "samples": report.samples,
                "seed": report.seed,
            });
            if args.verify && (report.slope - target).abs() > 0.05 {
                print_report(&value);
                return Err(CliError::Verification(format!(
                    "slope {:.4} misses target {target} by more than 0.05",
                    report.slope
                )));
            }
            Ok(value)
        }
        "integrals" => {
            let c = quartic_integral_c(args.samples, args.seed);
            let cp = mixed_integral_cprime(args.samples, args.seed);
            let c_ok = (c.value - c.closed_form).abs() <= 3.0 * c.stderr;
            let cp_ok = (cp.value - cp.closed_form).abs() <= 3.0 * cp.stderr;
            let value = json!({ "mode": "integrals", "quartic": c, "mixed": cp });
            if args.verify && !(c_ok && cp_ok) {
                print_report(&value);
                return Err(CliError::Verification(
                    "integral estimates fell outside 3 standard errors".into(),
                ));
            }
            Ok(value)
        }
        "dominance" => {
            let report = dominance_ratio(&config)?;
            let value = serde_json::to_value(&report).expect("serializable");
            if args.verify && report.tau >= 1.0 {
                print_report(&value);
                return Err(CliError::Verification(format!(
                    "tau = {} is not < 1",
                    report.tau
                )));
            }
            Ok(value)
        }
        other => Err(CliError::Usage(format!(
            "mode must be flat|background|integrals|dominance, got '{other}'"
        ))),
    }
}

fn print_report(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("CURVENS_THREADS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(1);
    if rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .is_err()
    {
        // pool already configured (e.g. repeated invocation in tests)
    }

    let command = match (&cli.config, cli.command) {
        (Some(path), _) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read config: {e}");
                    return ExitCode::from(2);
                }
            };
            match serde_json::from_str::<Command>(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: bad config: {e}");
                    return ExitCode::from(2);
                }
            }
        }
        (None, Some(c)) => c,
        (None, None) => {
            eprintln!("error: a subcommand or --config is required (see --help)");
            return ExitCode::from(2);
        }
    };

    if cli.dump_config {
        println!(
            "{}",
            serde_json::to_string_pretty(&command).expect("config serializes")
        );
        return ExitCode::SUCCESS;
    }

    match run(&command) {
        Ok(mut value) => {
            if !cli.deterministic {
                if let Some(obj) = value.as_object_mut() {
                    let stamp = std::time::SystemTime::now()
                        .duration_since(std::time::UNIX_EPOCH)
                        .map(|d| d.as_secs())
                        .unwrap_or(0);
                    obj.insert("timestamp".into(), json!(stamp));
                }
            }
            let text = serde_json::to_string_pretty(&value).expect("json");
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text + "\n") {
                        eprintln!("error: cannot write report: {e}");
                        return ExitCode::from(2);
                    }
                }
                None => println!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
