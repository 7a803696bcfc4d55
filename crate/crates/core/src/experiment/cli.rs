//! Command-line front end. The binary only parses arguments and calls [`run`].

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use super::config::{load_config, ExperimentConfig};
use super::emit::{emit, Summary};
use super::run::{evolution_cross_check, report_t0, run_prepared, static_frame_report, Prepared};
use crate::deformation::{DeformationPair, DeformationReport};
use crate::error::Error;
use crate::flow::{default_steps, distortion_constants, flow_set, gronwall_defect};
use crate::frames::FrameReport;
use crate::grid::stft_full;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SLICE_FAILED: i32 = 3;
pub const EXIT_NOT_A_FRAME: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hamframe", version, about = "Gabor frames under Hamiltonian deformation")]
pub struct Cli {
    /// Output directory (overrides output.directory of the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Do not print results to stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame bounds of the deformed systems along the time grid.
    Evolve { config: PathBuf },
    /// Frame bounds of the undeformed system.
    Framebounds { config: PathBuf },
    /// Lattice nodes before and after the classical flow.
    Flow {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Spectrogram magnitude of the (evolved) window.
    Stft {
        config: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
    },
    /// Deformation metrics of the flowed lattice.
    Checkdef {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
}

/// Failure of a command together with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Config(_) | Error::InvalidGrid(_) => EXIT_CONFIG,
            Error::NotAFrame(_) => EXIT_NOT_A_FRAME,
            _ => EXIT_RUNTIME,
        };
        CliError::new(code, e.to_string())
    }
}

/// What a successful command produced.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub files: Vec<PathBuf>,
    pub report: String,
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    load_config(path).map_err(|e| CliError::new(EXIT_CONFIG, e.to_string()))
}

fn out_dir(cli: &Cli, cfg: &ExperimentConfig) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| cfg.output.directory.clone())
}

fn write_json<T: Serialize>(path: PathBuf, value: &T) -> Result<PathBuf, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    std::fs::write(&path, s).map_err(Error::from)?;
    Ok(path)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(Error::from)?)
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Evolve { config } => evolve(cli, config),
        Command::Framebounds { config } => framebounds(cli, config),
        Command::Flow { config, t } => flow(cli, config, *t),
        Command::Stft { config, t } => stft(cli, config, *t),
        Command::Checkdef { config, t } => checkdef(cli, config, *t),
    }
}

/// Runs the command, prints unless `--quiet`, and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(o) => {
            if !cli.quiet {
                println!("{}", o.report);
                for f in &o.files {
                    println!("wrote {}", f.display());
                }
            }
            o.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn evolve(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let cfg = load(path)?;
    let prep = Prepared::new(&cfg)?;
    let records = run_prepared(&cfg, &prep);
    let t0 = report_t0(&records, cfg.analysis.threshold);
    let cross = if t0.is_ok() && prep.spec.is_quadratic() && cfg.analysis.cross_check_signals > 0 {
        Some(evolution_cross_check(&cfg, cli.seed, cfg.analysis.cross_check_signals)?)
    } else {
        None
    };
    let summary = Summary::new(&cfg, &records, t0.as_ref().ok().copied(), prep.lipschitz_l, cross, cli.seed);
    let dir = out_dir(cli, &cfg);
    emit(&dir, &records, &summary)?;
    let mut report = String::from("t\tA\tB\tcondition\tstatus\n");
    for r in &records {
        report.push_str(&format!("{:+.4}\t{:.6}\t{:.6}\t{:.4}\t{}\n", r.t, r.a, r.b, r.condition, r.status.label()));
    }
    let code = match &t0 {
        Ok(t0) => {
            report.push_str(&format!("t0 = {t0} at threshold {}", cfg.analysis.threshold));
            if summary.failed_slices > 0 {
                EXIT_SLICE_FAILED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            report.push_str(&format!("no t0: {e}"));
            match e {
                Error::NotAFrame(_) => EXIT_NOT_A_FRAME,
                _ => EXIT_SLICE_FAILED,
            }
        }
    };
    Ok(Outcome {
        code,
        files: vec![dir.join("records.csv"), dir.join("summary.json")],
        report,
    })
}

#[derive(Serialize)]
struct StaticReport {
    report: FrameReport,
    rel: usize,
    config: ExperimentConfig,
}

fn framebounds(cli: &Cli, path: &Path) -> Result<Outcome, CliError> {
    let cfg = load(path)?;
    let report = static_frame_report(&cfg)?;
    let nodes = cfg.nodes()?;
    let dir = out_dir(cli, &cfg);
    std::fs::create_dir_all(&dir).map_err(Error::from)?;
    let file = write_json(
        dir.join("framebounds.json"),
        &StaticReport {
            report,
            rel: crate::deformation::rel_separation(&nodes),
            config: cfg.clone(),
        },
    )?;
    Ok(Outcome {
        code: if report.is_frame() { EXIT_OK } else { EXIT_NOT_A_FRAME },
        files: vec![file],
        report: format!(
            "A = {:e}\nB = {:e}\ncondition = {:e}\nnodes = {}",
            report.a, report.b, report.condition, report.node_count
        ),
    })
}

fn flow(cli: &Cli, path: &Path, t: f64) -> Result<Outcome, CliError> {
    let cfg = load(path)?;
    let spec = cfg.hamiltonian_spec()?;
    let nodes = cfg.nodes()?;
    let moved = flow_set(&spec, &nodes, t, default_steps(t, cfg.flow.steps_per_unit_time))?;
    let dir = out_dir(cli, &cfg);
    std::fs::create_dir_all(&dir).map_err(Error::from)?;
    let file = dir.join("flow.csv");
    let mut w = csv_writer(&file)?;
    let fmt = cfg.output.number_format;
    w.write_record(["index", "x", "xi", "x_t", "xi_t"]).map_err(Error::from)?;
    for (i, (a, b)) in nodes.iter().zip(moved.iter()).enumerate() {
        w.write_record([i.to_string(), fmt.format(a.x), fmt.format(a.xi), fmt.format(b.x), fmt.format(b.xi)])
            .map_err(Error::from)?;
    }
    w.flush().map_err(Error::from)?;
    Ok(Outcome {
        code: EXIT_OK,
        files: vec![file],
        report: format!("{} nodes flowed to t = {t}", nodes.len()),
    })
}

fn stft(cli: &Cli, path: &Path, t: f64) -> Result<Outcome, CliError> {
    let cfg = load(path)?;
    let prep = Prepared::new(&cfg)?;
    let window_t = prep.propagate(&cfg, t, &prep.window)?;
    let v = stft_full(&window_t, &prep.window)?;
    let grid = cfg.grid_spec()?;
    let dir = out_dir(cli, &cfg);
    std::fs::create_dir_all(&dir).map_err(Error::from)?;
    let file = dir.join("stft.csv");
    let mut w = csv_writer(&file)?;
    let fmt = cfg.output.number_format;
    w.write_record(["x", "xi", "magnitude"]).map_err(Error::from)?;
    for m in 0..grid.len() {
        for j in 0..grid.len() {
            w.write_record([fmt.format(grid.x(m)), fmt.format(grid.xi(j)), fmt.format(v.get(m, j).norm())])
                .map_err(Error::from)?;
        }
    }
    w.flush().map_err(Error::from)?;
    Ok(Outcome {
        code: EXIT_OK,
        files: vec![file],
        report: format!("spectrogram of U({t}) g, {} x {} samples", grid.len(), grid.len()),
    })
}

#[derive(Serialize)]
struct CheckdefReport {
    t: f64,
    metrics: DeformationReport,
    max_displacement: f64,
    lipschitz_l: f64,
    gronwall_ratio: f64,
    distortion: Option<crate::flow::DistortionReport>,
}

fn checkdef(cli: &Cli, path: &Path, t: f64) -> Result<Outcome, CliError> {
    let cfg = load(path)?;
    let spec = cfg.hamiltonian_spec()?;
    let nodes = cfg.nodes()?;
    let steps = default_steps(t, cfg.flow.steps_per_unit_time);
    let moved = flow_set(&spec, &nodes, t, steps)?;
    let pair = DeformationPair::new(nodes.clone(), moved)?;
    let metrics = DeformationReport::compute(&pair, cfg.analysis.radius)?;
    let lipschitz_l = spec.lipschitz_estimate(&cfg.lipschitz_box()?, cfg.hamiltonian.lipschitz_samples)?;
    let gronwall_ratio = gronwall_defect(&spec, &nodes, t, steps, lipschitz_l)?;
    let distortion = if t != 0.0 && nodes.len() >= 2 {
        Some(distortion_constants(&spec, &nodes, t.abs(), 5, cfg.flow.steps_per_unit_time)?)
    } else {
        None
    };
    let report = CheckdefReport {
        t,
        metrics,
        max_displacement: pair.max_displacement(),
        lipschitz_l,
        gronwall_ratio,
        distortion,
    };
    let dir = out_dir(cli, &cfg);
    std::fs::create_dir_all(&dir).map_err(Error::from)?;
    let file = write_json(dir.join("checkdef.json"), &report)?;
    Ok(Outcome {
        code: EXIT_OK,
        files: vec![file],
        report: serde_json::to_string_pretty(&report).map_err(Error::from)?,
    })
}
