//! `records.csv` and `summary.json`.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::{ExperimentConfig, NumberFormat};
use super::run::TimeSliceRecord;
use crate::error::Result;

pub const RECORD_COLUMNS: [&str; 13] = [
    "t",
    "A",
    "B",
    "condition",
    "rel_deformed",
    "l1_defect",
    "l2_radius",
    "jitter",
    "m1_drift",
    "covariance_residual",
    "lipschitz_L",
    "wall_ms",
    "status",
];

pub fn write_records<W: Write>(out: W, records: &[TimeSliceRecord], fmt: NumberFormat) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(RECORD_COLUMNS)?;
    for r in records {
        let nums = [
            r.t,
            r.a,
            r.b,
            r.condition,
            r.rel_deformed,
            r.l1_defect,
            r.l2_radius,
            r.jitter,
            r.m1_drift,
            r.covariance_residual,
            r.lipschitz_l,
            r.wall_ms,
        ];
        let mut row: Vec<String> = nums.iter().map(|&v| fmt.format(v)).collect();
        row.push(r.status.label());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn records_to_string(records: &[TimeSliceRecord], fmt: NumberFormat) -> Result<String> {
    let mut buf = Vec::new();
    write_records(&mut buf, records, fmt)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformBounds {
    pub min_a: f64,
    pub max_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub slices: usize,
    pub failed_slices: usize,
    pub uniform_bounds: Option<UniformBounds>,
    pub t0: Option<f64>,
    pub threshold: f64,
    pub sampling_constant: f64,
    pub lipschitz_l: f64,
    pub max_gronwall_ratio: Option<f64>,
    /// Worst relative error of the evolution cross-check (quadratic specs).
    pub evolution_cross_check: Option<f64>,
    pub seed: u64,
}

impl Summary {
    pub fn new(
        cfg: &ExperimentConfig,
        records: &[TimeSliceRecord],
        t0: Option<f64>,
        lipschitz_l: f64,
        evolution_cross_check: Option<f64>,
        seed: u64,
    ) -> Self {
        let ok: Vec<&TimeSliceRecord> = records.iter().filter(|r| r.status.is_ok()).collect();
        let uniform_bounds = (!ok.is_empty()).then(|| UniformBounds {
            min_a: ok.iter().map(|r| r.a).fold(f64::INFINITY, f64::min),
            max_b: ok.iter().map(|r| r.b).fold(0.0, f64::max),
        });
        let max_gronwall_ratio = (!ok.is_empty()).then(|| ok.iter().map(|r| r.gronwall_ratio).fold(0.0, f64::max));
        Summary {
            version: env!("CARGO_PKG_VERSION"),
            config: cfg.clone(),
            slices: records.len(),
            failed_slices: records.len() - ok.len(),
            uniform_bounds,
            t0,
            threshold: cfg.analysis.threshold,
            sampling_constant: cfg.analysis.sampling_constant,
            lipschitz_l,
            max_gronwall_ratio,
            evolution_cross_check,
            seed,
        }
    }
}

/// Writes `records.csv` and `summary.json` into `dir`, creating it if needed.
pub fn emit(dir: &Path, records: &[TimeSliceRecord], summary: &Summary) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let file = std::fs::File::create(dir.join("records.csv"))?;
    write_records(std::io::BufWriter::new(file), records, summary.config.output.number_format)?;
    let mut json = serde_json::to_string_pretty(summary)?;
    json.push('\n');
    std::fs::write(dir.join("summary.json"), json)?;
    Ok(())
}
