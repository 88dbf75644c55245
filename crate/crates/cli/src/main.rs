//! `xpcomm`: runs the commutator bench from a `.bench` file and writes
//! CSV/JSON data.
//!
//! Exit codes: 0 success, 1 a validation check failed, 2 usage, parse,
//! input or simulation error. Nothing is written unless the whole command
//! succeeded up to its output stage.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use xpcomm::bench::{parse_bench, parse_length, render_bench, BenchDocument};
use xpcomm::elements::ClipWarning;
use xpcomm::interferometer::{phase_sweep, run_interferometer, uniform_phases};
use xpcomm::io::{self, write_atomic};
use xpcomm::validation::validate;
use xpcomm::wigner::{negativity_metrics, wigner_compare, wigner_transform, NegativityMetrics, WignerOptions};
use xpcomm::GridSpec;

#[derive(Parser)]
#[command(name = "xpcomm", version, about = "Optical position/momentum commutator bench simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the interferometer once and write both port fields and a manifest.
    Simulate(RunArgs),
    /// Sweep the relative phase and write the D1 probability map.
    Sweep(RunArgs),
    /// Write Wigner maps of the input and of both port outputs.
    Wigner(RunArgs),
    /// Run the oracle suite; exits 1 if any check fails.
    Validate(RunArgs),
    /// Parse a bench file and report diagnostics.
    ParseCheck(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Bench description; the built-in default bench when omitted.
    #[arg(long)]
    bench: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "XPCOMM_OUT_DIR", default_value = "out")]
    out: PathBuf,
    /// Override the grid point count (power of two).
    #[arg(long)]
    grid_n: Option<usize>,
    /// Override the grid half-extent, with unit (e.g. `6mm`).
    #[arg(long, value_parser = parse_length_arg)]
    grid_half_extent: Option<f64>,
    /// Number of phases in a sweep, uniform over [0, 2 pi).
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(2..))]
    phases: u32,
}

fn parse_length_arg(s: &str) -> Result<f64, String> {
    parse_length(s).map_err(|d| d.message)
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn load(args: &RunArgs) -> anyhow::Result<BenchDocument> {
    let (name, mut doc) = match &args.bench {
        None => ("<built-in>".to_string(), BenchDocument::desk_default()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
            let doc = parse_bench(&text).map_err(|failure| {
                let lines: Vec<String> = failure
                    .diagnostics
                    .iter()
                    .map(|d| format!("{}:{d}", path.display()))
                    .collect();
                InputError(lines.join("\n"))
            })?;
            (path.display().to_string(), doc)
        }
    };
    if args.grid_n.is_some() || args.grid_half_extent.is_some() {
        let n = args.grid_n.unwrap_or(doc.grid.n_points());
        let h = args.grid_half_extent.unwrap_or(doc.grid.half_extent());
        doc.grid = GridSpec::new(n, h).map_err(|e| InputError(format!("grid override: {e}")))?;
        let issues = doc.check();
        if !issues.is_empty() {
            let lines: Vec<String> = issues.iter().map(|i| format!("{name}: {}", i.message)).collect();
            return Err(InputError(lines.join("\n")).into());
        }
    }
    log::info!("loaded {name}: grid n = {}, half-extent = {:e} m", doc.grid.n_points(), doc.grid.half_extent());
    Ok(doc)
}

/// Files are rendered in memory first and only written once all of them
/// exist, each one atomically.
fn write_all(out: &Path, files: Vec<(&str, String)>) -> anyhow::Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for (name, contents) in files {
        let path = out.join(name);
        write_atomic(&path, contents.as_bytes()).with_context(|| format!("writing {}", path.display()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn simulation_error(e: xpcomm::OpticsError) -> anyhow::Error {
    InputError(format!("simulation failed: {e}")).into()
}

#[derive(Serialize)]
struct GridInfo {
    n_points: usize,
    half_extent_m: f64,
    spacing_m: f64,
}

#[derive(Serialize)]
struct Manifest {
    lambda_m: f64,
    f_m: f64,
    l_m: f64,
    w_m: f64,
    hbar_js: f64,
    phase_rad: f64,
    grid: GridInfo,
    c: f64,
    raw_probabilities: Probabilities,
    fidelity_with_input: Probabilities,
    /// `d1` at phi = pi, `d2` at phi = 0, otherwise none.
    commutator_port: Option<&'static str>,
    commutator_port_fidelity: Option<f64>,
    warnings: Vec<ClipWarning>,
    bench: String,
}

#[derive(Serialize)]
struct Probabilities {
    d1: f64,
    d2: f64,
}

fn commutator_port(phase: f64) -> Option<&'static str> {
    let wrapped = phase.rem_euclid(2.0 * PI);
    let near = |target: f64| (wrapped - target).abs() < 1e-9 || (wrapped - target - 2.0 * PI).abs() < 1e-9;
    if near(PI) {
        Some("d1")
    } else if near(0.0) {
        Some("d2")
    } else {
        None
    }
}

fn simulate(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let doc = load(args)?;
    let input = doc.input_field().map_err(simulation_error)?;
    let spec = doc.interferometer().map_err(simulation_error)?;
    let out = run_interferometer(&input, &spec).map_err(simulation_error)?;
    for w in &out.warnings {
        log::warn!("{w}");
    }
    let fidelity = |f: &xpcomm::ComplexField| f.fidelity(&input).unwrap_or(0.0);
    let fidelity_with_input = Probabilities {
        d1: fidelity(&out.d1),
        d2: fidelity(&out.d2),
    };
    let port = commutator_port(doc.phase);
    let manifest = Manifest {
        lambda_m: doc.params.lambda,
        f_m: doc.params.f,
        l_m: doc.params.l,
        w_m: doc.params.w,
        hbar_js: doc.params.hbar,
        phase_rad: doc.phase,
        grid: GridInfo {
            n_points: doc.grid.n_points(),
            half_extent_m: doc.grid.half_extent(),
            spacing_m: doc.grid.spacing(),
        },
        c: doc.params.dimensionless_c(),
        raw_probabilities: Probabilities {
            d1: out.raw_probabilities.0,
            d2: out.raw_probabilities.1,
        },
        commutator_port: port,
        commutator_port_fidelity: port.map(|p| match p {
            "d1" => fidelity_with_input.d1,
            _ => fidelity_with_input.d2,
        }),
        fidelity_with_input,
        warnings: out.warnings.clone(),
        bench: render_bench(&doc),
    };
    write_all(
        &args.out,
        vec![
            ("d1.csv", io::field_to_csv(&out.d1)),
            ("d2.csv", io::field_to_csv(&out.d2)),
            ("manifest.json", serde_json::to_string_pretty(&manifest)? + "\n"),
        ],
    )?;
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let doc = load(args)?;
    let input = doc.input_field().map_err(simulation_error)?;
    let spec = doc.interferometer().map_err(simulation_error)?;
    let map = phase_sweep(&input, &spec, &uniform_phases(args.phases as usize)).map_err(simulation_error)?;
    write_all(
        &args.out,
        vec![
            ("probability_map.csv", io::probability_map_to_csv(&map)),
            ("probability_map.json", io::probability_map_to_json(&map)? + "\n"),
        ],
    )?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct WignerMetrics {
    input: NegativityMetrics,
    commutator: NegativityMetrics,
    anticommutator: NegativityMetrics,
    /// `max |W_commutator - W_input| / max |W_input|`.
    commutator_vs_input: f64,
    x_stride: usize,
    k_bins: usize,
}

fn wigner(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let doc = load(args)?;
    let options = WignerOptions { x_stride: 8, k_bins: 512 };
    let input = doc.input_field().map_err(simulation_error)?;
    let spec = doc.interferometer().map_err(simulation_error)?;
    let commutator = run_interferometer(&input, &spec.with_phase(PI)).map_err(simulation_error)?.d1;
    let anti = run_interferometer(&input, &spec.with_phase(0.0)).map_err(simulation_error)?.d1;
    let map_of = |f: &xpcomm::ComplexField| f.normalize().and_then(|f| wigner_transform(&f, options));
    let maps = [
        map_of(&input).map_err(simulation_error)?,
        map_of(&commutator).map_err(simulation_error)?,
        map_of(&anti).map_err(simulation_error)?,
    ];
    let metrics = WignerMetrics {
        input: negativity_metrics(&maps[0]),
        commutator: negativity_metrics(&maps[1]),
        anticommutator: negativity_metrics(&maps[2]),
        commutator_vs_input: wigner_compare(&maps[1], &maps[0]).map_err(simulation_error)?,
        x_stride: options.x_stride,
        k_bins: options.k_bins,
    };
    let hbar = doc.params.hbar;
    write_all(
        &args.out,
        vec![
            ("wigner_input.json", io::wigner_to_json(&maps[0], hbar)? + "\n"),
            ("wigner_commutator.json", io::wigner_to_json(&maps[1], hbar)? + "\n"),
            ("wigner_anticommutator.json", io::wigner_to_json(&maps[2], hbar)? + "\n"),
            ("wigner_metrics.json", serde_json::to_string_pretty(&metrics)? + "\n"),
        ],
    )?;
    Ok(ExitCode::SUCCESS)
}

fn run_validate(args: &RunArgs) -> anyhow::Result<ExitCode> {
    let doc = load(args)?;
    let report = validate(&doc);
    for c in &report.checks {
        println!("{} {:<28} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    write_all(
        &args.out,
        vec![("validation.json", serde_json::to_string_pretty(&report)? + "\n")],
    )?;
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn parse_check(args: &RunArgs) -> anyhow::Result<ExitCode> {
    if args.bench.is_none() {
        bail!(InputError("parse-check needs --bench".into()));
    }
    let doc = load(args)?;
    print!("{}", render_bench(&doc));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Wigner(a) => wigner(a),
        Command::Validate(a) => run_validate(a),
        Command::ParseCheck(a) => parse_check(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
