//! The deformation experiment: frame bounds of `G(U(t) g, Phi_t Lambda)` along a time grid.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::deformation::{jitter, l1_defect, l2_radius, rel_separation, DeformationPair};
use crate::error::{Error, Result};
use crate::flow::{default_steps, flow_set, gronwall_ratio, NodeSet};
use crate::frames::{frame_bounds, FrameInverse, FrameReport, GaborSystem};
use crate::grid::{gaussian_window, m1_norm, Signal};
use crate::hamiltonian::{HamiltonianSpec, PhasePoint};
use crate::shift::rho;
use crate::weyl::{propagate_split_with, PropagatorMethod, QuantumSystem, SeparableParts};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceStatus {
    Ok,
    Diverged,
    Failed(String),
}

impl SliceStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, SliceStatus::Ok)
    }

    pub fn label(&self) -> String {
        match self {
            SliceStatus::Ok => "ok".into(),
            SliceStatus::Diverged => "diverged".into(),
            SliceStatus::Failed(m) => format!("failed: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSliceRecord {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub condition: f64,
    pub rel_deformed: f64,
    pub l1_defect: f64,
    pub l2_radius: f64,
    pub jitter: f64,
    pub m1_drift: f64,
    pub covariance_residual: f64,
    pub lipschitz_l: f64,
    pub wall_ms: f64,
    /// `|Phi_t a - Phi_t b - (a - b)| / (L|t||a - b| e^{L|t|})` over node pairs.
    pub gronwall_ratio: f64,
    pub status: SliceStatus,
}

impl TimeSliceRecord {
    fn failed(t: f64, lipschitz_l: f64, status: SliceStatus) -> Self {
        TimeSliceRecord {
            t,
            a: f64::NAN,
            b: f64::NAN,
            condition: f64::NAN,
            rel_deformed: f64::NAN,
            l1_defect: f64::NAN,
            l2_radius: f64::NAN,
            jitter: f64::NAN,
            m1_drift: f64::NAN,
            covariance_residual: f64::NAN,
            lipschitz_l,
            wall_ms: 0.0,
            gronwall_ratio: f64::NAN,
            status,
        }
    }
}

/// Everything the experiment needs, built once from a config.
pub struct Prepared {
    pub spec: HamiltonianSpec,
    pub window: Signal,
    pub nodes: NodeSet,
    pub system: QuantumSystem,
    pub split: Option<SeparableParts>,
    pub lipschitz_l: f64,
}

impl Prepared {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let grid = cfg.grid_spec()?;
        let spec = cfg.hamiltonian_spec()?;
        let window = cfg.window_signal()?;
        let nodes = cfg.nodes()?;
        let lipschitz_l = spec.lipschitz_estimate(&cfg.lipschitz_box()?, cfg.hamiltonian.lipschitz_samples)?;
        // also needed by the covariance probe when the split method is used
        let system = QuantumSystem::new(spec.clone(), &grid)?;
        let split = match cfg.propagator.method {
            PropagatorMethod::Split => Some(SeparableParts::new(&spec, &grid)?),
            PropagatorMethod::Eigen => None,
        };
        Ok(Prepared {
            spec,
            window,
            nodes,
            system,
            split,
            lipschitz_l,
        })
    }

    pub fn propagate(&self, cfg: &ExperimentConfig, t: f64, f: &Signal) -> Result<Signal> {
        match &self.split {
            Some(parts) => {
                propagate_split_with(parts, t, default_steps(t, cfg.propagator.split_steps_per_unit_time), f)
            }
            None => self.system.propagate(t, f),
        }
    }
}

/// Frame bounds of the undeformed system `G(g, Lambda)`.
pub fn static_frame_report(cfg: &ExperimentConfig) -> Result<FrameReport> {
    let sys = GaborSystem::new(cfg.window_signal()?, cfg.torus_nodes(&cfg.nodes()?)?)?;
    frame_bounds(&sys, cfg.estimator.method, cfg.estimator.tol, cfg.estimator.max_iter)
}

fn run_slice(cfg: &ExperimentConfig, prep: &Prepared, t: f64) -> Result<TimeSliceRecord> {
    let steps = default_steps(t, cfg.flow.steps_per_unit_time);
    let moved = flow_set(&prep.spec, &prep.nodes, t, steps)?;
    let window_t = prep.propagate(cfg, t, &prep.window)?;
    let sys = GaborSystem::new(window_t.clone(), cfg.torus_nodes(&moved)?)?;
    let bounds = frame_bounds(&sys, cfg.estimator.method, cfg.estimator.tol, cfg.estimator.max_iter)?;
    if let Some(d) = bounds.diagnostics {
        if !d.converged {
            return Err(Error::InvalidArgument(format!(
                "frame bound iteration did not converge in {} steps",
                cfg.estimator.max_iter
            )));
        }
    }
    let pair = DeformationPair::new(prep.nodes.clone(), moved)?;
    let r = cfg.analysis.radius;
    let covariance_residual = prep.system.covariance_residual(
        cfg.covariance_point(),
        t,
        &prep.window,
        cfg.analysis.covariance_map,
    )?;
    let factor = prep.lipschitz_l * t.abs() * (prep.lipschitz_l * t.abs()).exp();
    let gronwall = if t == 0.0 {
        0.0
    } else {
        gronwall_ratio(pair.base(), pair.deformed(), factor)
    };
    Ok(TimeSliceRecord {
        t,
        a: bounds.a,
        b: bounds.b,
        condition: bounds.condition,
        rel_deformed: rel_separation(pair.deformed()) as f64,
        l1_defect: l1_defect(&pair, r)?,
        l2_radius: l2_radius(&pair, r)?,
        jitter: jitter(pair.base(), pair.deformed())?,
        m1_drift: m1_norm(&window_t.sub(&prep.window)?),
        covariance_residual,
        lipschitz_l: prep.lipschitz_l,
        wall_ms: 0.0,
        gronwall_ratio: gronwall,
        status: SliceStatus::Ok,
    })
}

/// Runs every slice of the time grid in ascending `t`. A failing slice is
/// recorded with its status and does not stop the sweep.
pub fn run_deformation_experiment(cfg: &ExperimentConfig) -> Result<Vec<TimeSliceRecord>> {
    let prep = Prepared::new(cfg)?;
    Ok(run_prepared(cfg, &prep))
}

pub fn run_prepared(cfg: &ExperimentConfig, prep: &Prepared) -> Vec<TimeSliceRecord> {
    cfg.time_grid()
        .into_iter()
        .map(|t| {
            let start = Instant::now();
            let mut rec = match run_slice(cfg, prep, t) {
                Ok(r) => r,
                Err(Error::Divergence { .. }) => TimeSliceRecord::failed(t, prep.lipschitz_l, SliceStatus::Diverged),
                Err(e) => TimeSliceRecord::failed(t, prep.lipschitz_l, SliceStatus::Failed(e.to_string())),
            };
            if cfg.output.timing {
                rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            }
            rec
        })
        .collect()
}

/// Largest `t0` on the grid with `A(t) >= threshold * A(0)` for every
/// slice with `|t| <= t0`. Failed slices count as violations.
pub fn report_t0(records: &[TimeSliceRecord], threshold: f64) -> Result<f64> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidArgument(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let zero = records
        .iter()
        .find(|r| r.t == 0.0)
        .ok_or_else(|| Error::InvalidArgument("records contain no t = 0 slice".into()))?;
    if !(zero.status.is_ok() && zero.a > 0.0) {
        return Err(Error::NotAFrame(if zero.a.is_nan() { 0.0 } else { zero.a }));
    }
    let floor = threshold * zero.a;
    let mut sorted: Vec<&TimeSliceRecord> = records.iter().filter(|r| r.t != 0.0).collect();
    sorted.sort_by(|a, b| a.t.abs().total_cmp(&b.t.abs()));
    let mut t0 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let level = sorted[i].t.abs();
        let mut j = i;
        let mut ok = true;
        while j < sorted.len() && sorted[j].t.abs() == level {
            let r = sorted[j];
            ok &= r.status.is_ok() && r.a >= floor;
            j += 1;
        }
        if !ok {
            break;
        }
        t0 = level;
        i = j;
    }
    Ok(t0)
}

/// Worst relative error of the evolution identity
/// `U(t) f = sum_l c_l rho(e^{2tJM} l) U(t) g` with `c` the canonical
/// time-zero coefficients of `f`, over `signals` random `f` and all nonzero
/// grid times. The signals are random combinations of Gaussians centred
/// within `|z| <= 3`, where the torus model is faithful. Quadratic specs only.
pub fn evolution_cross_check(cfg: &ExperimentConfig, seed: u64, signals: usize) -> Result<f64> {
    let prep = Prepared::new(cfg)?;
    if !prep.spec.is_quadratic() {
        return Err(Error::NotQuadratic);
    }
    let grid = *prep.window.grid();
    let base = GaborSystem::new(prep.window.clone(), cfg.torus_nodes(&prep.nodes)?)?;
    let inverse = FrameInverse::new(&base)?;
    let phi = gaussian_window(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs: Vec<Signal> = (0..signals)
        .map(|_| {
            let mut f = Signal::zeros(grid);
            for _ in 0..4 {
                let r = rng.gen_range(0.0..3.0);
                let a = rng.gen_range(0.0..std::f64::consts::TAU);
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                f = f.add_scaled(c, &rho(PhasePoint::new(r * a.cos(), r * a.sin()), &phi))?;
            }
            Ok(f)
        })
        .collect::<Result<_>>()?;
    let coeffs = fs.iter().map(|f| inverse.coefficients(f)).collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for t in cfg.time_grid().into_iter().filter(|&t| t != 0.0) {
        let lin = prep.spec.quadratic_flow(t);
        // index-aligned with the coefficients, so no clipping here
        let moved = base.nodes().map(|z| lin.apply(z))?;
        let window_t = prep.propagate(cfg, t, &prep.window)?;
        let deformed = GaborSystem::new(window_t, moved)?;
        for (f, c) in fs.iter().zip(&coeffs) {
            // the deformed system uses the normalized window; undo the scale
            let scaled = crate::frames::CoefficientVector::new(
                c.values().iter().map(|v| v * base.scale() / deformed.scale()).collect(),
            );
            let lhs = prep.propagate(cfg, t, f)?;
            let rhs = crate::frames::synthesize(&deformed, &scaled)?;
            worst = worst.max(lhs.sub(&rhs)?.norm() / f.norm());
        }
    }
    Ok(worst)
}
