//! Experiment configuration: JSON on disk, validated as a whole on load.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::flow::{NodeSet, STEPS_PER_UNIT_TIME};
use crate::frames::{EstimatorMethod, DEFAULT_SAMPLING_CONSTANT};
use crate::grid::{gaussian_window, hermite_window, GridSpec, Signal};
use crate::hamiltonian::{HamiltonianSpec, PhaseBox, PhasePoint};
use crate::shift::TorusBox;
use crate::symbol::{parse, Expr};
use crate::weyl::{CovarianceMap, PropagatorMethod};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub window: WindowConfig,
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub hamiltonian: HamiltonianConfig,
    pub times: TimesConfig,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub propagator: PropagatorConfig,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub torus: TorusConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// How flowed nodes are placed on the phase-space torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodePlacement {
    /// Keep every node; shifts reduce coordinates modulo the periods.
    #[default]
    Wrap,
    /// Keep only the nodes that land in the fundamental domain `[-L/2, L/2) x [-N/(2L), N/(2L))`.
    Clip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusConfig {
    #[serde(default)]
    pub nodes: NodePlacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    /// Period `L`; defaults to `sqrt(N)`.
    #[serde(default)]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    #[default]
    Gaussian,
    Hermite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    #[serde(default)]
    pub kind: WindowKind,
    #[serde(default)]
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtentName {
    /// The fundamental domain `[-L/2, L/2)^2`.
    Box,
    /// The square `[-r, r)^2` with `r = L/sqrt(2) + margin`, which still
    /// covers the fundamental domain after any rotation.
    Cover,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Extent {
    Named(ExtentName),
    Explicit(PhaseBox),
}

impl Default for Extent {
    fn default() -> Self {
        Extent::Named(ExtentName::Box)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LatticeConfig {
    Rect {
        alpha: f64,
        beta: f64,
        #[serde(default)]
        extent: Extent,
        /// Extra width for the `cover` extent; defaults to `max(alpha, beta)`.
        #[serde(default)]
        margin: Option<f64>,
    },
    Points {
        points: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    /// Entries `m11, m12, m22` of the symmetric matrix `M`.
    #[serde(default = "default_m")]
    pub m: [f64; 3],
    #[serde(default)]
    pub sigma: Option<String>,
    /// Box for the Lipschitz estimate; defaults to the lattice extent.
    #[serde(default, rename = "box")]
    pub lipschitz_box: Option<PhaseBox>,
    #[serde(default = "default_lipschitz_samples")]
    pub lipschitz_samples: usize,
}

fn default_m() -> [f64; 3] {
    [1.0, 0.0, 1.0]
}

fn default_lipschitz_samples() -> usize {
    41
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        HamiltonianConfig {
            m: default_m(),
            sigma: None,
            lipschitz_box: None,
            lipschitz_samples: default_lipschitz_samples(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesConfig {
    pub t_max: f64,
    pub count: usize,
    #[serde(default = "yes")]
    pub symmetric: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    #[serde(default = "default_steps")]
    pub steps_per_unit_time: f64,
}

fn default_steps() -> f64 {
    STEPS_PER_UNIT_TIME
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            steps_per_unit_time: STEPS_PER_UNIT_TIME,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagatorConfig {
    #[serde(default = "default_method")]
    pub method: PropagatorMethod,
    /// Strang steps per unit time for the split method.
    #[serde(default = "default_split_steps")]
    pub split_steps_per_unit_time: f64,
}

fn default_method() -> PropagatorMethod {
    PropagatorMethod::Eigen
}

fn default_split_steps() -> f64 {
    1000.0
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        PropagatorConfig {
            method: default_method(),
            split_steps_per_unit_time: default_split_steps(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    #[serde(default)]
    pub method: EstimatorMethod,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    50_000
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            method: EstimatorMethod::Dense,
            tol: default_tol(),
            max_iter: default_max_iter(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// `t0` is the largest time with `A(t) >= threshold * A(0)` on `[-t0, t0]`.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Radius `R` for the (L1)/(L2) functionals.
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_probe")]
    pub covariance_point: [f64; 2],
    #[serde(default)]
    pub covariance_map: CovarianceMap,
    #[serde(default = "default_c")]
    pub sampling_constant: f64,
    /// Random signals in the evolution cross-check (quadratic specs only).
    #[serde(default = "default_cross")]
    pub cross_check_signals: usize,
}

fn default_threshold() -> f64 {
    0.5
}

fn default_radius() -> f64 {
    2.0
}

fn default_probe() -> [f64; 2] {
    [1.0, 0.0]
}

fn default_c() -> f64 {
    DEFAULT_SAMPLING_CONSTANT
}

fn default_cross() -> usize {
    5
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            threshold: default_threshold(),
            radius: default_radius(),
            covariance_point: default_probe(),
            covariance_map: CovarianceMap::default(),
            sampling_constant: default_c(),
            cross_check_signals: default_cross(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumberFormat {
    /// `{:.16e}`: 17 significant digits.
    #[default]
    Sci17,
    /// Shortest decimal that round-trips.
    Shortest,
}

impl NumberFormat {
    pub fn format(self, v: f64) -> String {
        if v.is_nan() {
            return "NaN".into();
        }
        if v.is_infinite() {
            return if v > 0.0 { "inf".into() } else { "-inf".into() };
        }
        match self {
            NumberFormat::Sci17 => format!("{v:.16e}"),
            NumberFormat::Shortest => format!("{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default)]
    pub number_format: NumberFormat,
    /// Record wall-clock time per slice. Off by default so that output is
    /// byte-stable.
    #[serde(default)]
    pub timing: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: default_dir(),
            number_format: NumberFormat::default(),
            timing: false,
        }
    }
}

/// One problem found in a config, with the dotted path of the field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    Read { path: PathBuf, message: String },
    Syntax { path: String, line: usize, column: usize, message: String },
    Invalid(Vec<ConfigIssue>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Read { path, message } => write!(f, "cannot read {}: {message}", path.display()),
            ConfigError::Syntax { path, line, column, message } => {
                if path.is_empty() || path == "." {
                    write!(f, "line {line}, column {column}: {message}")
                } else {
                    write!(f, "{path} (line {line}, column {column}): {message}")
                }
            }
            ConfigError::Invalid(issues) => {
                write!(f, "{} invalid field(s)", issues.len())?;
                for i in issues {
                    write!(f, "\n  {i}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn issues(&self) -> &[ConfigIssue] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Syntax {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    let issues = cfg.validate();
    if issues.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError::Invalid(issues))
    }
}

impl ExperimentConfig {
    /// Every problem in the config, not only the first.
    pub fn validate(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        let mut bad = |path: &str, message: String| {
            out.push(ConfigIssue {
                path: path.to_string(),
                message,
            })
        };
        if let Err(e) = GridSpec::new(self.grid.n, self.grid.length) {
            let path = match self.grid.length {
                Some(l) if !(l > 0.0 && l.is_finite()) => "grid.length",
                _ => "grid.n",
            };
            bad(path, e.to_string());
        }
        if self.window.kind == WindowKind::Hermite && self.window.order > 8 {
            bad("window.order", format!("Hermite order must be at most 8, got {}", self.window.order));
        }
        match &self.lattice {
            LatticeConfig::Rect {
                alpha,
                beta,
                extent,
                margin,
            } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    bad("lattice.alpha", format!("must be positive, got {alpha}"));
                }
                if !(*beta > 0.0 && beta.is_finite()) {
                    bad("lattice.beta", format!("must be positive, got {beta}"));
                }
                if let Extent::Explicit(b) = extent {
                    if !b.is_valid() {
                        bad("lattice.extent", "box is empty or not finite".into());
                    }
                }
                if let Some(m) = margin {
                    if !(*m >= 0.0 && m.is_finite()) {
                        bad("lattice.margin", format!("must be nonnegative, got {m}"));
                    }
                }
            }
            LatticeConfig::Points { points } => {
                if points.is_empty() {
                    bad("lattice.points", "at least one node is required".into());
                }
                if let Some(i) = points.iter().position(|p| !p.iter().all(|v| v.is_finite())) {
                    bad(&format!("lattice.points[{i}]"), "coordinates must be finite".into());
                }
            }
        }
        if !self.hamiltonian.m.iter().all(|v| v.is_finite()) {
            bad("hamiltonian.m", "entries must be finite".into());
        }
        if let Some(s) = &self.hamiltonian.sigma {
            if let Err(e) = parse(s) {
                bad("hamiltonian.sigma", e.to_string());
            }
        }
        if let Some(b) = &self.hamiltonian.lipschitz_box {
            if !b.is_valid() {
                bad("hamiltonian.box", "box is empty or not finite".into());
            }
        }
        if self.hamiltonian.lipschitz_samples < 4 {
            bad("hamiltonian.lipschitz_samples", "must be at least 4".into());
        }
        if !(self.times.t_max > 0.0 && self.times.t_max.is_finite()) {
            bad("times.t_max", format!("must be positive, got {}", self.times.t_max));
        }
        if self.times.count < 1 {
            bad("times.count", "must be at least 1".into());
        }
        if !(self.flow.steps_per_unit_time >= 1.0 && self.flow.steps_per_unit_time.is_finite()) {
            bad("flow.steps_per_unit_time", "must be at least 1".into());
        }
        if !(self.propagator.split_steps_per_unit_time >= 1.0
            && self.propagator.split_steps_per_unit_time.is_finite())
        {
            bad("propagator.split_steps_per_unit_time", "must be at least 1".into());
        }
        if self.propagator.method == PropagatorMethod::Split {
            if let Ok(spec) = self.hamiltonian_spec() {
                if let Ok(g) = self.grid_spec() {
                    if let Err(e) = crate::weyl::SeparableParts::new(&spec, &g) {
                        bad("propagator.method", e.to_string());
                    }
                }
            }
        }
        if !(self.estimator.tol > 0.0) {
            bad("estimator.tol", "must be positive".into());
        }
        if self.estimator.max_iter == 0 {
            bad("estimator.max_iter", "must be positive".into());
        }
        if self.estimator.method == EstimatorMethod::Dense && self.grid.n > crate::frames::MAX_DENSE_SAMPLES {
            bad("estimator.method", "dense estimator limited to N <= 1024".into());
        }
        if self.grid.n > crate::weyl::MAX_EIGEN_SAMPLES && self.propagator.method == PropagatorMethod::Eigen {
            bad("propagator.method", "eigen propagator limited to N <= 2048".into());
        }
        let a = &self.analysis;
        if !(a.threshold > 0.0 && a.threshold < 1.0) {
            bad("analysis.threshold", format!("must lie in (0, 1), got {}", a.threshold));
        }
        if !(a.radius > 0.0 && a.radius.is_finite()) {
            bad("analysis.radius", "must be positive".into());
        }
        if !a.covariance_point.iter().all(|v| v.is_finite()) {
            bad("analysis.covariance_point", "must be finite".into());
        }
        if !(a.sampling_constant > 0.0 && a.sampling_constant.is_finite()) {
            bad("analysis.sampling_constant", "must be positive".into());
        }
        out
    }

    pub fn grid_spec(&self) -> crate::Result<GridSpec> {
        GridSpec::new(self.grid.n, self.grid.length)
    }

    pub fn window_signal(&self) -> crate::Result<Signal> {
        let g = self.grid_spec()?;
        match self.window.kind {
            WindowKind::Gaussian => Ok(gaussian_window(&g)),
            WindowKind::Hermite => hermite_window(&g, self.window.order),
        }
    }

    pub fn sigma_expr(&self) -> crate::Result<Option<Expr>> {
        Ok(match &self.hamiltonian.sigma {
            Some(s) => Some(parse(s)?),
            None => None,
        })
    }

    pub fn hamiltonian_spec(&self) -> crate::Result<HamiltonianSpec> {
        let [m11, m12, m22] = self.hamiltonian.m;
        Ok(HamiltonianSpec::from_entries(m11, m12, m22, self.sigma_expr()?))
    }

    /// Bounding box of the lattice before deformation.
    pub fn lattice_box(&self) -> crate::Result<PhaseBox> {
        let g = self.grid_spec()?;
        match &self.lattice {
            LatticeConfig::Rect {
                alpha,
                beta,
                extent,
                margin,
            } => Ok(match extent {
                Extent::Named(ExtentName::Box) => PhaseBox::square(0.5 * g.period()),
                Extent::Named(ExtentName::Cover) => {
                    let m = margin.unwrap_or(alpha.max(*beta));
                    PhaseBox::square(g.period() / std::f64::consts::SQRT_2 + m)
                }
                Extent::Explicit(b) => *b,
            }),
            LatticeConfig::Points { points } => {
                let fold = |i: usize, pick: fn(f64, f64) -> f64, init: f64| {
                    points.iter().map(|p| p[i]).fold(init, pick)
                };
                let mut b = PhaseBox {
                    x: [fold(0, f64::min, f64::INFINITY), fold(0, f64::max, f64::NEG_INFINITY)],
                    xi: [fold(1, f64::min, f64::INFINITY), fold(1, f64::max, f64::NEG_INFINITY)],
                };
                for r in [&mut b.x, &mut b.xi] {
                    if r[0] >= r[1] {
                        r[0] -= 0.5;
                        r[1] += 0.5;
                    }
                }
                Ok(b)
            }
        }
    }

    pub fn nodes(&self) -> crate::Result<NodeSet> {
        match &self.lattice {
            LatticeConfig::Rect { alpha, beta, .. } => {
                let b = self.lattice_box()?;
                NodeSet::rect_lattice(*alpha, *beta, b.x, b.xi)
            }
            LatticeConfig::Points { points } => {
                NodeSet::new(points.iter().map(|p| PhasePoint::new(p[0], p[1])).collect())
            }
        }
    }

    /// Nodes of the Gabor system built from (possibly flowed) lattice nodes.
    pub fn torus_nodes(&self, nodes: &NodeSet) -> crate::Result<NodeSet> {
        match self.torus.nodes {
            NodePlacement::Wrap => Ok(nodes.clone()),
            NodePlacement::Clip => {
                let torus = TorusBox::of(&self.grid_spec()?);
                Ok(nodes.iter().copied().filter(|&z| torus.contains(z)).collect())
            }
        }
    }

    pub fn lipschitz_box(&self) -> crate::Result<PhaseBox> {
        match self.hamiltonian.lipschitz_box {
            Some(b) => Ok(b),
            None => self.lattice_box(),
        }
    }

    /// Ascending time grid; `t = 0` is always present.
    pub fn time_grid(&self) -> Vec<f64> {
        let TimesConfig {
            t_max,
            count,
            symmetric,
        } = self.times;
        let mut ts: Vec<f64> = if count == 1 {
            vec![0.0]
        } else {
            let d = (count - 1) as f64;
            (0..count)
                .map(|i| {
                    // the fraction is exactly +-1 at the ends and odd in i,
                    // so t(i) = -t(count - 1 - i) bit for bit
                    if symmetric {
                        (2 * i as i64 - (count - 1) as i64) as f64 / d * t_max
                    } else {
                        i as f64 / d * t_max
                    }
                })
                .collect()
        };
        if !ts.contains(&0.0) {
            ts.push(0.0);
            ts.sort_by(f64::total_cmp);
        }
        ts
    }

    pub fn covariance_point(&self) -> PhasePoint {
        let [x, xi] = self.analysis.covariance_point;
        PhasePoint::new(x, xi)
    }
}
