//! Gabor systems `{rho(l) g : l in Lambda}` on the grid, their frame
//! operators, frame bounds, dual windows and reconstruction.
//!
//! Frame bounds are the extreme eigenvalues of the discrete frame operator
//! `S f = sum_l <f, rho(l) g> rho(l) g` acting on all grid signals.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformation::rel_separation;
use crate::error::{Error, Result};
use crate::flow::NodeSet;
use crate::grid::{gaussian_window, hermite_window, m1_norm, GridSpec, Signal};
use crate::hamiltonian::PhasePoint;
use crate::linalg::{self, CMat, ZERO};
use crate::shift::{pi_shift, rho};
use crate::weyl::HermitianOperator;

/// Largest grid for the dense eigensolver path.
pub const MAX_DENSE_SAMPLES: usize = 1024;
/// Largest grid for dense solves in [`dual_window`].
pub const MAX_DENSE_SOLVE: usize = 512;
/// Lower bounds below this are reported as zero.
pub const ZERO_BOUND: f64 = 1e-12;

/// Constant `C` in `||C_g f|| <= C rel(Lambda) ||g||_{M1} ||f||`, calibrated as
/// 1.2 times the largest ratio seen by [`sampling_trials`] with seed
/// [`CALIBRATION_SEED`] (see `calibrate_sampling_constant`).
pub const DEFAULT_SAMPLING_CONSTANT: f64 = 0.9550510644215724;
pub const CALIBRATION_SEED: u64 = 20_240_601;
pub const CALIBRATION_TRIALS: usize = 200;
pub const CALIBRATION_GRID: usize = 128;

const START_SEED: u64 = 0x5eed_f8a3;

/// Which shift builds the atoms. Frame bounds do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftKind {
    #[default]
    Rho,
    Pi,
}

#[derive(Debug, Clone)]
pub struct GaborSystem {
    window: Signal,
    scale: f64,
    nodes: NodeSet,
    shift: ShiftKind,
}

impl GaborSystem {
    /// Normalizes `window` to unit norm; the original norm is kept as `scale`.
    pub fn new(window: Signal, nodes: NodeSet) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("Gabor system needs at least one node".into()));
        }
        let (window, scale) = window.normalized()?;
        Ok(GaborSystem {
            window,
            scale,
            nodes,
            shift: ShiftKind::Rho,
        })
    }

    pub fn with_shift(mut self, shift: ShiftKind) -> Self {
        self.shift = shift;
        self
    }

    pub fn window(&self) -> &Signal {
        &self.window
    }

    /// Norm of the window passed to [`GaborSystem::new`].
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn grid(&self) -> &GridSpec {
        self.window.grid()
    }

    pub fn shift(&self) -> ShiftKind {
        self.shift
    }

    pub fn atom(&self, z: PhasePoint) -> Signal {
        match self.shift {
            ShiftKind::Rho => rho(z, &self.window),
            ShiftKind::Pi => pi_shift(z, &self.window),
        }
    }

    /// Atoms `rho(l) g` as the columns of an `N x |Lambda|` matrix.
    pub fn atom_matrix(&self) -> CMat {
        let atoms: Vec<Signal> = self.nodes.points().par_iter().map(|&z| self.atom(z)).collect();
        let n = self.grid().len();
        CMat::from_fn(n, atoms.len(), |i, j| atoms[j].samples()[i])
    }
}

/// `|Lambda| x N` matrix with `(C f)_l = <f, rho(l) g>`.
pub fn analysis_matrix(sys: &GaborSystem) -> CMat {
    let g = sys.atom_matrix();
    let w = sys.grid().dx();
    CMat::from_fn(g.ncols(), g.nrows(), |l, n| g[(n, l)].conj() * w)
}

/// `S = C^* C` with the adjoint taken in the weighted inner product.
pub fn frame_operator(sys: &GaborSystem) -> Result<HermitianOperator> {
    let g = sys.atom_matrix();
    let mut s = linalg::matmul_adjoint(&g, &g);
    let w = Complex64::new(sys.grid().dx(), 0.0);
    for j in 0..s.ncols() {
        for i in 0..s.nrows() {
            s[(i, j)] *= w;
        }
    }
    HermitianOperator::new(*sys.grid(), s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorMethod {
    #[default]
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationDiagnostics {
    pub upper_iterations: usize,
    pub lower_iterations: usize,
    pub converged: bool,
    /// Relative change of the last Rayleigh quotient of each run.
    pub upper_change: f64,
    pub lower_change: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub a: f64,
    pub b: f64,
    pub condition: f64,
    pub node_count: usize,
    pub grid_n: usize,
    pub method: EstimatorMethod,
    pub diagnostics: Option<IterationDiagnostics>,
}

impl FrameReport {
    fn new(a: f64, b: f64, sys: &GaborSystem, method: EstimatorMethod) -> Self {
        let a = if a < ZERO_BOUND { 0.0 } else { a.min(b) };
        FrameReport {
            a,
            b,
            condition: if a > 0.0 { b / a } else { f64::INFINITY },
            node_count: sys.nodes().len(),
            grid_n: sys.grid().len(),
            method,
            diagnostics: None,
        }
    }

    pub fn is_frame(&self) -> bool {
        self.a > 0.0
    }

    /// Bounds for the window scaled by `s` (frame bounds scale with `s^2`).
    pub fn rescaled(&self, s: f64) -> FrameReport {
        FrameReport {
            a: self.a * s * s,
            b: self.b * s * s,
            ..*self
        }
    }
}

pub fn frame_bounds_dense(sys: &GaborSystem) -> Result<FrameReport> {
    if sys.grid().len() > MAX_DENSE_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "dense frame bounds limited to N <= {MAX_DENSE_SAMPLES}"
        )));
    }
    let s = frame_operator(sys)?;
    let ev = linalg::hermitian_eigenvalues(s.matrix())?;
    Ok(FrameReport::new(ev[0], ev[ev.len() - 1], sys, EstimatorMethod::Dense))
}

/// Matrix-free `S f = G (w G^H f)` over the atom matrix `G`.
struct FrameApply {
    atoms: CMat,
    weight: f64,
}

impl FrameApply {
    fn new(sys: &GaborSystem) -> Self {
        FrameApply {
            atoms: sys.atom_matrix(),
            weight: sys.grid().dx(),
        }
    }

    fn coefficients(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut c = linalg::adjoint_matvec(&self.atoms, f);
        for v in &mut c {
            *v *= self.weight;
        }
        c
    }

    fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        linalg::matvec(&self.atoms, &self.coefficients(f))
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn start_vector(n: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let s = 1.0 / norm(&v);
    v.into_iter().map(|x| x * s).collect()
}

struct PowerResult {
    value: f64,
    iterations: usize,
    converged: bool,
    change: f64,
}

fn power_iteration(
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    start: Vec<Complex64>,
    tol: f64,
    max_iter: usize,
) -> PowerResult {
    let mut x = start;
    let mut prev = f64::NAN;
    let mut change = f64::INFINITY;
    for it in 1..=max_iter {
        let y = apply(&x);
        let r = dot(&x, &y).re;
        change = ((r - prev) / r).abs();
        if change < tol {
            return PowerResult {
                value: r,
                iterations: it,
                converged: true,
                change,
            };
        }
        prev = r;
        let ny = norm(&y);
        if ny == 0.0 {
            return PowerResult {
                value: 0.0,
                iterations: it,
                converged: true,
                change: 0.0,
            };
        }
        x = y.into_iter().map(|v| v / ny).collect();
    }
    PowerResult {
        value: prev,
        iterations: max_iter,
        converged: false,
        change,
    }
}

/// Power iteration for `B`, then power iteration on `1.01 B I - S` for `A`.
///
/// Hitting `max_iter` is not an error; the report carries the last iterate
/// and `converged = false`.
pub fn frame_bounds_iterative(sys: &GaborSystem, tol: f64, max_iter: usize) -> Result<FrameReport> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(Error::InvalidArgument("tolerance and iteration cap must be positive".into()));
    }
    let op = FrameApply::new(sys);
    let n = sys.grid().len();
    let upper = power_iteration(|x| op.apply(x), start_vector(n), tol, max_iter);
    let shift = 1.01 * upper.value;
    let lower = power_iteration(
        |x| {
            let sx = op.apply(x);
            x.iter().zip(sx).map(|(&a, b)| a * shift - b).collect()
        },
        start_vector(n),
        tol,
        max_iter,
    );
    let mut report = FrameReport::new(shift - lower.value, upper.value, sys, EstimatorMethod::Iterative);
    report.diagnostics = Some(IterationDiagnostics {
        upper_iterations: upper.iterations,
        lower_iterations: lower.iterations,
        converged: upper.converged && lower.converged,
        upper_change: upper.change,
        lower_change: lower.change,
    });
    Ok(report)
}

pub fn frame_bounds(sys: &GaborSystem, method: EstimatorMethod, tol: f64, max_iter: usize) -> Result<FrameReport> {
    match method {
        EstimatorMethod::Dense => frame_bounds_dense(sys),
        EstimatorMethod::Iterative => frame_bounds_iterative(sys, tol, max_iter),
    }
}

/// Coefficients `c_l` indexed like the node set.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(Vec<Complex64>);

impl CoefficientVector {
    pub fn new(values: Vec<Complex64>) -> Self {
        CoefficientVector(values)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        norm(&self.0)
    }
}

/// `(<f, rho(l) g>)_l`.
pub fn analyze(sys: &GaborSystem, f: &Signal) -> Result<CoefficientVector> {
    if f.grid() != sys.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(CoefficientVector(FrameApply::new(sys).coefficients(f.samples())))
}

/// `sum_l c_l rho(l) g`.
pub fn synthesize(sys: &GaborSystem, c: &CoefficientVector) -> Result<Signal> {
    if c.len() != sys.nodes().len() {
        return Err(Error::InvalidArgument(format!(
            "{} coefficients for {} nodes",
            c.len(),
            sys.nodes().len()
        )));
    }
    Signal::new(*sys.grid(), linalg::matvec(&sys.atom_matrix(), c.values()))
}

enum Inverse {
    Dense { values: Vec<f64>, vectors: CMat },
    Iterative,
}

/// Inverse frame operator of a Gabor system that is a frame.
pub struct FrameInverse {
    apply: FrameApply,
    inverse: Inverse,
    grid: GridSpec,
    tol: f64,
}

impl FrameInverse {
    /// Dense eigendecomposition for `N <= 512`, conjugate gradients above.
    pub fn new(sys: &GaborSystem) -> Result<Self> {
        let apply = FrameApply::new(sys);
        let grid = *sys.grid();
        let inverse = if grid.len() <= MAX_DENSE_SOLVE {
            let s = frame_operator(sys)?;
            let (values, vectors) = linalg::hermitian_eigen(s.matrix())?;
            if values[0] < ZERO_BOUND.max(1e-12 * values[values.len() - 1]) {
                return Err(Error::NotAFrame(values[0]));
            }
            Inverse::Dense { values, vectors }
        } else {
            Inverse::Iterative
        };
        Ok(FrameInverse {
            apply,
            inverse,
            grid,
            tol: 1e-10,
        })
    }

    /// Solves `S d = f`.
    pub fn solve(&self, f: &Signal) -> Result<Signal> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let out = match &self.inverse {
            Inverse::Dense { values, vectors } => {
                let mut c = linalg::adjoint_matvec(vectors, f.samples());
                for (v, &lam) in c.iter_mut().zip(values) {
                    *v /= lam;
                }
                linalg::matvec(vectors, &c)
            }
            Inverse::Iterative => self.conjugate_gradient(f.samples())?,
        };
        Signal::new(self.grid, out)
    }

    fn conjugate_gradient(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = b.len();
        let bn = norm(b);
        let mut x = vec![ZERO; n];
        if bn == 0.0 {
            return Ok(x);
        }
        let mut r = b.to_vec();
        let mut p = r.clone();
        let mut rr = dot(&r, &r).re;
        for _ in 0..(20 * n) {
            let sp = self.apply.apply(&p);
            let curv = dot(&p, &sp).re;
            if !(curv > 0.0) {
                return Err(Error::NotAFrame(curv / dot(&p, &p).re));
            }
            let alpha = rr / curv;
            for i in 0..n {
                x[i] += p[i] * alpha;
                r[i] -= sp[i] * alpha;
            }
            let rr_new = dot(&r, &r).re;
            if rr_new.sqrt() <= self.tol * bn {
                return Ok(x);
            }
            let beta = rr_new / rr;
            for i in 0..n {
                p[i] = r[i] + p[i] * beta;
            }
            rr = rr_new;
        }
        Err(Error::NotAFrame(0.0))
    }

    /// Canonical dual coefficients `<f, S^{-1} rho(l) g> = (C S^{-1} f)_l`.
    pub fn coefficients(&self, f: &Signal) -> Result<CoefficientVector> {
        let d = self.solve(f)?;
        Ok(CoefficientVector(self.apply.coefficients(d.samples())))
    }

    /// `sum_l <f, S^{-1} rho(l) g> rho(l) g`, which equals `f` for a frame.
    pub fn reconstruct(&self, f: &Signal) -> Result<Signal> {
        let c = self.coefficients(f)?;
        Signal::new(self.grid, linalg::matvec(&self.apply.atoms, c.values()))
    }
}

/// Canonical dual window `S^{-1} g`.
pub fn dual_window(sys: &GaborSystem) -> Result<Signal> {
    FrameInverse::new(sys)?.solve(sys.window())
}

/// `sum_l <f, rho(l) d> rho(l) g`. Equals `f` when `S` commutes with the
/// shifts of the node set, e.g. for lattices that close up on the torus.
pub fn reconstruct_with_dual(sys: &GaborSystem, dual: &Signal, f: &Signal) -> Result<Signal> {
    let dual_sys = GaborSystem {
        window: dual.clone(),
        scale: 1.0,
        nodes: sys.nodes().clone(),
        shift: sys.shift(),
    };
    let c = analyze(&dual_sys, f)?;
    synthesize(sys, &c)
}

/// Predicted `(A_n, B_n) = (A - d, B + d)` with `d = C ||g - g_new||_{M1} rel(Lambda)`,
/// where `a` and `b` are square roots of the frame bounds of `(g, nodes)`.
pub fn window_perturbation_bounds(
    a: f64,
    b: f64,
    g: &Signal,
    g_new: &Signal,
    nodes: &NodeSet,
    sampling_constant: f64,
) -> Result<(f64, f64)> {
    let d = g.sub(g_new)?;
    let m1 = m1_norm(&d);
    if m1 == 0.0 {
        return Ok((a, b));
    }
    let delta = sampling_constant * m1 * rel_separation(nodes) as f64;
    Ok((a - delta, b + delta))
}

/// `||C_g f|| / (rel(Lambda) ||g||_{M1} ||f||)` for the unnormalized window `g`.
pub fn sampling_ratio(f: &Signal, g: &Signal, nodes: &NodeSet) -> Result<f64> {
    let sys = GaborSystem::new(g.clone(), nodes.clone())?;
    let c = analyze(&sys, f)?;
    Ok(c.l2_norm() * sys.scale() / (rel_separation(nodes) as f64 * m1_norm(g) * f.norm()))
}

/// Supremum of [`sampling_ratio`] over `f`: `sqrt(B) / (rel ||g||_{M1})`.
pub fn sampling_ratio_sup(g: &Signal, nodes: &NodeSet) -> Result<f64> {
    let sys = GaborSystem::new(g.clone(), nodes.clone())?;
    let rep = frame_bounds_dense(&sys)?;
    Ok(rep.b.sqrt() * sys.scale() / (rel_separation(nodes) as f64 * m1_norm(g)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingTrial {
    pub ratio: f64,
    pub sup_ratio: f64,
    pub rel: usize,
    pub node_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingSuite {
    pub seed: u64,
    pub trials: Vec<SamplingTrial>,
}

impl SamplingSuite {
    pub fn max_ratio(&self) -> f64 {
        self.trials.iter().map(|t| t.ratio).fold(0.0, f64::max)
    }

    pub fn max_sup_ratio(&self) -> f64 {
        self.trials.iter().map(|t| t.sup_ratio).fold(0.0, f64::max)
    }
}

fn random_signal(grid: GridSpec, rng: &mut ChaCha8Rng) -> Signal {
    Signal::from_fn(grid, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn random_window(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<Signal> {
    let half = 0.25 * grid.period();
    let z = PhasePoint::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
    let base = match rng.gen_range(0..3) {
        0 => {
            let s: f64 = rng.gen_range(0.5..2.0);
            Signal::from_fn(grid, |x| {
                Complex64::new(2f64.powf(0.25) / s.sqrt() * (-std::f64::consts::PI * x * x / (s * s)).exp(), 0.0)
            })
        }
        1 => hermite_window(&grid, rng.gen_range(0..6))?,
        _ => {
            let mut acc = Signal::zeros(grid);
            for k in 0..5 {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                acc = acc.add_scaled(c, &hermite_window(&grid, k)?)?;
            }
            acc
        }
    };
    let amp = rng.gen_range(0.2..5.0);
    Ok(rho(z, &base).scaled(Complex64::new(amp, 0.0)))
}

fn random_nodes(grid: GridSpec, rng: &mut ChaCha8Rng) -> Result<NodeSet> {
    let half = 0.5 * grid.period();
    if rng.gen_bool(0.5) {
        let alpha = rng.gen_range(0.35..1.4);
        let beta = rng.gen_range(0.35..1.4);
        let (ox, oy) = (rng.gen_range(0.0..alpha), rng.gen_range(0.0..beta));
        let nodes = NodeSet::rect_lattice(alpha, beta, [-half, half], [-half, half])?;
        Ok(nodes.translated(PhasePoint::new(ox, oy)))
    } else {
        let count = rng.gen_range(grid.len() / 2..3 * grid.len());
        Ok((0..count)
            .map(|_| PhasePoint::new(rng.gen_range(-half..half), rng.gen_range(-half..half)))
            .collect())
    }
}

/// Randomized `(f, g, Lambda)` trials of the sampling inequality.
pub fn sampling_trials(seed: u64, trials: usize, n: usize) -> Result<SamplingSuite> {
    let grid = GridSpec::new(n, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let g = random_window(grid, &mut rng)?;
        let nodes = random_nodes(grid, &mut rng)?;
        let f = random_signal(grid, &mut rng);
        out.push(SamplingTrial {
            ratio: sampling_ratio(&f, &g, &nodes)?,
            sup_ratio: sampling_ratio_sup(&g, &nodes)?,
            rel: rel_separation(&nodes),
            node_count: nodes.len(),
        });
    }
    Ok(SamplingSuite { seed, trials: out })
}

/// `1.2 x` the largest supremum ratio of the suite.
pub fn calibrate_sampling_constant(seed: u64) -> Result<f64> {
    Ok(1.2 * sampling_trials(seed, CALIBRATION_TRIALS, CALIBRATION_GRID)?.max_sup_ratio())
}

/// Gaussian window and `alpha Z x beta Z` over `[-L/2, L/2)^2`.
pub fn box_lattice_system(grid: &GridSpec, alpha: f64, beta: f64) -> Result<GaborSystem> {
    let h = 0.5 * grid.period();
    let nodes = NodeSet::rect_lattice(alpha, beta, [-h, h], [-h, h])?;
    GaborSystem::new(gaussian_window(grid), nodes)
}

/// Every grid point `(x_m, xi_k)` as a node.
pub fn full_grid_nodes(grid: &GridSpec) -> NodeSet {
    let xs = grid.positions();
    let xis = grid.frequencies();
    xs.iter()
        .flat_map(|&x| xis.iter().map(move |&xi| PhasePoint::new(x, xi)))
        .collect()
}
