//! Discrete Weyl quantization and Schrödinger propagators.
//!
//! A real symbol `sigma(x, xi)` becomes the matrix
//!
//! ```text
//! A[m][n] = (1/N) sum_k sigma((x_m + x_n)/2, xi_k) e^{2 pi i (m - n) k / N}
//! ```
//!
//! which is the midpoint kernel `(1/L) sum_k sigma(...) e^{2 pi i (x_m - x_n) xi_k}`
//! times the quadrature weight `L/N`. Rows sharing a midpoint are assembled
//! with one length-`N` transform.
//!
//! With the `e^{2 pi i}` quantization convention the Schrödinger group that
//! is covariant with the classical flow `Phi_t` is `e^{-2 pi i t H}`; all
//! propagators here use that time scale.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{default_steps, flow_point, STEPS_PER_UNIT_TIME};
use crate::grid::{dft, idft, ifft_in_place, m1_norm, GridSpec, Signal};
use crate::hamiltonian::{HamiltonianSpec, PhasePoint};
use crate::linalg::{self, CMat, ZERO};
use crate::shift::rho;

/// Factor between the physical time `t` and the exponent of `e^{-i s H}`.
pub const TIME_SCALE: f64 = 2.0 * PI;

/// Largest grid accepted by the dense eigendecomposition.
pub const MAX_EIGEN_SAMPLES: usize = 2048;

struct Eigen {
    values: Vec<f64>,
    vectors: CMat,
}

/// Hermitian matrix acting on grid signals, with a lazily cached
/// eigendecomposition.
pub struct HermitianOperator {
    grid: GridSpec,
    matrix: CMat,
    defect: f64,
    eigen: OnceLock<std::result::Result<Eigen, String>>,
}

impl std::fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HermitianOperator")
            .field("n", &self.grid.len())
            .field("defect", &self.defect)
            .finish()
    }
}

impl HermitianOperator {
    /// Hermitizes `matrix` and records the defect it had before.
    pub fn new(grid: GridSpec, mut matrix: CMat) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != grid.len() {
            return Err(Error::InvalidArgument("operator size does not match grid".into()));
        }
        let defect = linalg::hermitian_defect(&matrix);
        linalg::hermitize(&mut matrix);
        Ok(HermitianOperator {
            grid,
            matrix,
            defect,
            eigen: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Largest `|A - A^H|` entry before symmetrization.
    pub fn hermitian_defect(&self) -> f64 {
        self.defect
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        Signal::new(self.grid, linalg::matvec(&self.matrix, f.samples()))
    }

    fn eigen(&self) -> Result<&Eigen> {
        let cached = self.eigen.get_or_init(|| {
            if self.grid.len() > MAX_EIGEN_SAMPLES {
                return Err(format!(
                    "dense eigendecomposition limited to N <= {MAX_EIGEN_SAMPLES}"
                ));
            }
            linalg::hermitian_eigen(&self.matrix)
                .map(|(values, vectors)| Eigen { values, vectors })
                .map_err(|e| e.to_string())
        });
        cached.as_ref().map_err(|e| Error::Eigen(e.clone()))
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<&[f64]> {
        Ok(&self.eigen()?.values)
    }

    /// Eigenvector `index` (ascending order) as a unit-norm signal.
    pub fn eigenvector(&self, index: usize) -> Result<Signal> {
        let e = self.eigen()?;
        let col = e.vectors.col(index);
        let raw = Signal::new(self.grid, (0..self.grid.len()).map(|i| col[i]).collect())?;
        Ok(raw.normalized()?.0)
    }
}

/// Quantizes a real symbol given as a fallible function of `(x, xi)`.
pub fn weyl_quantize<F>(symbol: F, grid: &GridSpec) -> Result<HermitianOperator>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let n = grid.len();
    let freqs = grid.frequencies();
    let half = n / 2;
    let mut matrix = CMat::zeros(n, n);
    let mut buf = vec![ZERO; n];
    let inv_n = 1.0 / n as f64;
    for s in 0..(2 * n - 1) {
        let mid = -0.5 * grid.period() + s as f64 * grid.period() / (2 * n) as f64;
        for (j, &xi) in freqs.iter().enumerate() {
            let v = symbol(mid, xi)?;
            if !v.is_finite() {
                return Err(Error::BadSymbol(format!("sigma({mid}, {xi}) = {v}")));
            }
            // frequency k = j - N/2 lives at FFT slot k mod N
            buf[(j + half) % n] = Complex64::new(v, 0.0);
        }
        ifft_in_place(&mut buf);
        let m_lo = s.saturating_sub(n - 1);
        let m_hi = s.min(n - 1);
        for m in m_lo..=m_hi {
            let col = s - m;
            let d = (m + n - col) % n;
            matrix[(m, col)] = buf[d] * inv_n;
        }
    }
    HermitianOperator::new(*grid, matrix)
}

/// Weyl quantization of the full Hamiltonian `<Mz, z> + sigma(z)`.
pub fn build_hamiltonian(spec: &HamiltonianSpec, grid: &GridSpec) -> Result<HermitianOperator> {
    weyl_quantize(|x, xi| spec.eval(PhasePoint::new(x, xi)), grid)
}

/// `e^{-2 pi i t H} f` from the cached eigendecomposition.
pub fn propagate_eigen(op: &HermitianOperator, t: f64, f: &Signal) -> Result<Signal> {
    if f.grid() != op.grid() {
        return Err(Error::GridMismatch);
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let e = op.eigen()?;
    let mut coeffs = linalg::adjoint_matvec(&e.vectors, f.samples());
    for (c, &lam) in coeffs.iter_mut().zip(&e.values) {
        *c *= Complex64::from_polar(1.0, -TIME_SCALE * t * lam);
    }
    Signal::new(*op.grid(), linalg::matvec(&e.vectors, &coeffs))
}

/// `H = T(xi) + V(x)` read off a separable spec.
#[derive(Debug, Clone)]
pub struct SeparableParts {
    kinetic: Vec<f64>,
    potential: Vec<f64>,
}

impl SeparableParts {
    pub fn new(spec: &HamiltonianSpec, grid: &GridSpec) -> Result<Self> {
        let m = spec.matrix().0;
        if m[0][1] != 0.0 {
            return Err(Error::NotSeparable("quadratic part has an x*p cross term".into()));
        }
        let sigma = spec.sigma();
        if let Some(e) = sigma {
            if e.depends_on_x() && e.depends_on_p() && !probe_additive(spec)? {
                return Err(Error::NotSeparable(
                    "perturbation mixes x and p dependence".into(),
                ));
            }
        }
        let s = |x: f64, p: f64| -> Result<f64> {
            Ok(match sigma {
                Some(e) => e.eval(x, p)?,
                None => 0.0,
            })
        };
        let s00 = s(0.0, 0.0)?;
        let potential = grid
            .positions()
            .into_iter()
            .map(|x| Ok(m[0][0] * x * x + s(x, 0.0)?))
            .collect::<Result<Vec<_>>>()?;
        let kinetic = grid
            .frequencies()
            .into_iter()
            .map(|xi| Ok(m[1][1] * xi * xi + s(0.0, xi)? - s00))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeparableParts { kinetic, potential })
    }
}

/// Checks `sigma(a,c) + sigma(b,d) = sigma(a,d) + sigma(b,c)` on axis-aligned probes.
fn probe_additive(spec: &HamiltonianSpec) -> Result<bool> {
    let Some(e) = spec.sigma() else {
        return Ok(true);
    };
    let xs = [-1.3, 0.0, 0.45, 2.1];
    let ps = [-0.9, 0.0, 0.65, 1.7];
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i + 1..] {
            for (j, &c) in ps.iter().enumerate() {
                for &d in &ps[j + 1..] {
                    let lhs = e.eval(a, c)? + e.eval(b, d)?;
                    let rhs = e.eval(a, d)? + e.eval(b, c)?;
                    if (lhs - rhs).abs() > 1e-12 * (1.0 + lhs.abs().max(rhs.abs())) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Strang splitting `e^{-i tau V/2} e^{-i tau T} e^{-i tau V/2}` with
/// `tau = 2 pi t / steps`.
pub fn propagate_split(
    spec: &HamiltonianSpec,
    grid: &GridSpec,
    t: f64,
    steps: usize,
    f: &Signal,
) -> Result<Signal> {
    let parts = SeparableParts::new(spec, grid)?;
    propagate_split_with(&parts, t, steps, f)
}

pub fn propagate_split_with(
    parts: &SeparableParts,
    t: f64,
    steps: usize,
    f: &Signal,
) -> Result<Signal> {
    if steps == 0 {
        return Err(Error::InvalidArgument("splitting needs at least one step".into()));
    }
    if f.grid().len() != parts.potential.len() {
        return Err(Error::GridMismatch);
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let tau = TIME_SCALE * t / steps as f64;
    let half_v: Vec<Complex64> = parts
        .potential
        .iter()
        .map(|&v| Complex64::from_polar(1.0, -0.5 * tau * v))
        .collect();
    let kin: Vec<Complex64> = parts
        .kinetic
        .iter()
        .map(|&k| Complex64::from_polar(1.0, -tau * k))
        .collect();
    let mut cur = f.clone();
    for _ in 0..steps {
        for (s, p) in cur.samples_mut().iter_mut().zip(&half_v) {
            *s *= p;
        }
        let mut spec = dft(&cur);
        for (c, k) in spec.coeffs_mut().iter_mut().zip(&kin) {
            *c *= k;
        }
        cur = idft(&spec);
        for (s, p) in cur.samples_mut().iter_mut().zip(&half_v) {
            *s *= p;
        }
    }
    Ok(cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagatorMethod {
    Eigen,
    Split,
}

/// Dense unitary `U(t) = e^{-2 pi i t H}`.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub time: f64,
    pub method: PropagatorMethod,
    pub unitary: CMat,
}

impl Propagator {
    pub fn eigen(op: &HermitianOperator, t: f64) -> Result<Self> {
        let e = op.eigen()?;
        let n = op.grid().len();
        let mut scaled = e.vectors.clone();
        for j in 0..n {
            let ph = Complex64::from_polar(1.0, -TIME_SCALE * t * e.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= ph;
            }
        }
        Ok(Propagator {
            time: t,
            method: PropagatorMethod::Eigen,
            unitary: linalg::matmul_adjoint(&scaled, &e.vectors),
        })
    }

    pub fn split(spec: &HamiltonianSpec, grid: &GridSpec, t: f64, steps: usize) -> Result<Self> {
        let parts = SeparableParts::new(spec, grid)?;
        let n = grid.len();
        let mut unitary = CMat::zeros(n, n);
        for j in 0..n {
            let mut e = Signal::zeros(*grid);
            e.samples_mut()[j] = Complex64::new(1.0, 0.0);
            let col = propagate_split_with(&parts, t, steps, &e)?;
            for (i, v) in col.samples().iter().enumerate() {
                unitary[(i, j)] = *v;
            }
        }
        Ok(Propagator {
            time: t,
            method: PropagatorMethod::Split,
            unitary,
        })
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        Signal::new(*f.grid(), linalg::matvec(&self.unitary, f.samples()))
    }

    /// `max |U^H U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.unitary)
    }
}

/// How the phase-space argument is transported in the covariance check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceMap {
    /// Full (possibly nonlinear) classical flow.
    #[default]
    Flow,
    /// Linear map `e^{2tJM}` of the quadratic part only.
    QuadraticOnly,
}

/// A Hamiltonian together with its quantization on a grid.
#[derive(Debug)]
pub struct QuantumSystem {
    spec: HamiltonianSpec,
    op: HermitianOperator,
}

impl QuantumSystem {
    pub fn new(spec: HamiltonianSpec, grid: &GridSpec) -> Result<Self> {
        let op = build_hamiltonian(&spec, grid)?;
        Ok(QuantumSystem { spec, op })
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn grid(&self) -> &GridSpec {
        self.op.grid()
    }

    pub fn propagate(&self, t: f64, f: &Signal) -> Result<Signal> {
        propagate_eigen(&self.op, t, f)
    }

    /// Classical image of `z` after time `t` under the chosen map.
    pub fn transport(&self, z: PhasePoint, t: f64, map: CovarianceMap) -> Result<PhasePoint> {
        if self.spec.is_quadratic() || map == CovarianceMap::QuadraticOnly {
            Ok(self.spec.quadratic_flow(t).apply(z))
        } else {
            flow_point(&self.spec, z, t, default_steps(t, STEPS_PER_UNIT_TIME))
        }
    }

    /// `|| U(t) rho(z) g - rho(Phi_t z) U(t) g || / ||g||`.
    pub fn covariance_residual(
        &self,
        z: PhasePoint,
        t: f64,
        g: &Signal,
        map: CovarianceMap,
    ) -> Result<f64> {
        let lhs = self.propagate(t, &rho(z, g))?;
        let zt = self.transport(z, t, map)?;
        let rhs = rho(zt, &self.propagate(t, g)?);
        Ok(lhs.sub(&rhs)?.norm() / g.norm())
    }

    /// `(t, ||U(t) g - g||_{M1})` for each requested time.
    pub fn m1_continuity_curve(&self, g: &Signal, times: &[f64]) -> Result<Vec<(f64, f64)>> {
        times
            .iter()
            .map(|&t| Ok((t, m1_norm(&self.propagate(t, g)?.sub(g)?))))
            .collect()
    }
}

/// One-shot covariance residual; builds and diagonalizes the operator.
pub fn covariance_residual(
    spec: &HamiltonianSpec,
    grid: &GridSpec,
    z: PhasePoint,
    t: f64,
    g: &Signal,
) -> Result<f64> {
    QuantumSystem::new(spec.clone(), grid)?.covariance_residual(z, t, g, CovarianceMap::Flow)
}

/// One-shot continuity curve.
pub fn m1_continuity_curve(
    spec: &HamiltonianSpec,
    grid: &GridSpec,
    g: &Signal,
    times: &[f64],
) -> Result<Vec<(f64, f64)>> {
    QuantumSystem::new(spec.clone(), grid)?.m1_continuity_curve(g, times)
}
