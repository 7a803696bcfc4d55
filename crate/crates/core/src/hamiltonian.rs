//! Hamiltonians `H(x,p) = <M(x,p),(x,p)> + sigma(x,p)` on the phase plane.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{self, Expr};

/// A point `z = (x, xi)` of phase space. `xi` doubles as the momentum `p`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub xi: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0.0, xi: 0.0 };

    pub fn new(x: f64, xi: f64) -> Self {
        PhasePoint { x, xi }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.xi)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.xi.is_finite()
    }
}

impl Add for PhasePoint {
    type Output = PhasePoint;
    fn add(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x + o.x, self.xi + o.xi)
    }
}

impl Sub for PhasePoint {
    type Output = PhasePoint;
    fn sub(self, o: PhasePoint) -> PhasePoint {
        PhasePoint::new(self.x - o.x, self.xi - o.xi)
    }
}

impl Neg for PhasePoint {
    type Output = PhasePoint;
    fn neg(self) -> PhasePoint {
        PhasePoint::new(-self.x, -self.xi)
    }
}

impl Mul<PhasePoint> for f64 {
    type Output = PhasePoint;
    fn mul(self, z: PhasePoint) -> PhasePoint {
        PhasePoint::new(self * z.x, self * z.xi)
    }
}

/// Real 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);
    /// The standard symplectic form `J = [[0, 1], [-1, 0]]`.
    pub const J: Mat2 = Mat2([[0.0, 1.0], [-1.0, 0.0]]);

    pub fn diag(a: f64, d: f64) -> Mat2 {
        Mat2([[a, 0.0], [0.0, d]])
    }

    pub fn apply(&self, z: PhasePoint) -> PhasePoint {
        let m = &self.0;
        PhasePoint::new(m[0][0] * z.x + m[0][1] * z.xi, m[1][0] * z.x + m[1][1] * z.xi)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let m = &self.0;
        Mat2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().0
    }

    /// `(s_max, s_min)`.
    pub fn singular_values(&self) -> (f64, f64) {
        let g = self.transpose() * *self;
        let (a, b, d) = (g.0[0][0], g.0[0][1], g.0[1][1]);
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let hi = (mean + rad).max(0.0).sqrt();
        let lo = (mean - rad).max(0.0).sqrt();
        (hi, lo)
    }

    /// Matrix exponential by scaling and squaring with a Taylor core.
    pub fn exp(&self) -> Mat2 {
        let norm = self.max_abs() * 2.0;
        let mut squarings = 0;
        let mut scaled = *self;
        if norm > 0.25 {
            squarings = (norm / 0.25).log2().ceil() as u32;
            scaled = self.scale(0.5f64.powi(squarings as i32));
        }
        let mut result = Mat2::IDENTITY;
        let mut term = Mat2::IDENTITY;
        for k in 1..=18 {
            term = (term * scaled).scale(1.0 / k as f64);
            result = result + term;
        }
        for _ in 0..squarings {
            result = result * result;
        }
        result
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let mut c = [[0.0; 2]; 2];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(c)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(-1.0)
    }
}

/// Axis-aligned rectangle `[x0, x1] x [xi0, xi1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseBox {
    pub x: [f64; 2],
    pub xi: [f64; 2],
}

impl PhaseBox {
    pub fn square(half_width: f64) -> Self {
        PhaseBox {
            x: [-half_width, half_width],
            xi: [-half_width, half_width],
        }
    }

    pub fn is_valid(&self) -> bool {
        self.x[0] < self.x[1]
            && self.xi[0] < self.xi[1]
            && self.x.iter().chain(&self.xi).all(|v| v.is_finite())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x[0], self.x[1], self.xi[0], self.xi[1]]
    }
}

/// Quadratic part `M` (symmetrized) plus an optional perturbation symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    m: Mat2,
    sigma: Option<Expr>,
    fd_step: f64,
}

impl HamiltonianSpec {
    pub fn new(m: Mat2, sigma: Option<Expr>) -> Self {
        let off = 0.5 * (m.0[0][1] + m.0[1][0]);
        HamiltonianSpec {
            m: Mat2([[m.0[0][0], off], [off, m.0[1][1]]]),
            sigma,
            fd_step: symbol::DEFAULT_GRAD_STEP,
        }
    }

    /// `M = [[m11, m12], [m12, m22]]`.
    pub fn from_entries(m11: f64, m12: f64, m22: f64, sigma: Option<Expr>) -> Self {
        Self::new(Mat2([[m11, m12], [m12, m22]]), sigma)
    }

    /// `x^2 + p^2`.
    pub fn harmonic_oscillator() -> Self {
        Self::new(Mat2::IDENTITY, None)
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn matrix(&self) -> Mat2 {
        self.m
    }

    pub fn sigma(&self) -> Option<&Expr> {
        self.sigma.as_ref()
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn is_quadratic(&self) -> bool {
        self.sigma.is_none()
    }

    /// The same quadratic part without the perturbation.
    pub fn quadratic_part(&self) -> HamiltonianSpec {
        HamiltonianSpec {
            m: self.m,
            sigma: None,
            fd_step: self.fd_step,
        }
    }

    /// `<Mz, z>`.
    pub fn quadratic_value(&self, z: PhasePoint) -> f64 {
        let mz = self.m.apply(z);
        mz.x * z.x + mz.xi * z.xi
    }

    pub fn eval(&self, z: PhasePoint) -> Result<f64> {
        let s = match &self.sigma {
            Some(e) => e.eval(z.x, z.xi)?,
            None => 0.0,
        };
        Ok(self.quadratic_value(z) + s)
    }

    /// `(dH/dx, dH/dp)`: analytic `2Mz` plus finite differences of sigma.
    pub fn gradient(&self, z: PhasePoint) -> Result<PhasePoint> {
        let mut g = 2.0 * self.m.apply(z);
        if let Some(e) = &self.sigma {
            let (gx, gp) = e.grad(z.x, z.xi, self.fd_step)?;
            g = g + PhasePoint::new(gx, gp);
        }
        Ok(g)
    }

    /// Hamiltonian vector field `(dH/dp, -dH/dx) = J grad H`.
    pub fn vector_field(&self, z: PhasePoint) -> Result<PhasePoint> {
        Ok(Mat2::J.apply(self.gradient(z)?))
    }

    /// Hessian of `H` at `z`.
    pub fn hessian(&self, z: PhasePoint) -> Result<Mat2> {
        let mut h = self.m.scale(2.0);
        if let Some(e) = &self.sigma {
            h = h + Mat2(e.hessian(z.x, z.xi, symbol::DEFAULT_HESSIAN_STEP)?);
        }
        Ok(h)
    }

    /// `e^{2tJM}`, the exact flow of the quadratic part. Rejects perturbed specs.
    pub fn linear_flow_exact(&self, t: f64) -> Result<Mat2> {
        if !self.is_quadratic() {
            return Err(Error::NotQuadratic);
        }
        Ok(self.quadratic_flow(t))
    }

    /// `e^{2tJM}` for the quadratic part, ignoring any perturbation.
    pub fn quadratic_flow(&self, t: f64) -> Mat2 {
        (Mat2::J * self.m).scale(2.0 * t).exp()
    }

    /// Empirical Lipschitz constant of the vector field on `box_`: the
    /// maximum of `||J Hess H(z)||_2` over a `samples x samples` grid.
    pub fn lipschitz_estimate(&self, box_: &PhaseBox, samples: usize) -> Result<f64> {
        if samples < 4 {
            return Err(Error::InvalidArgument(format!(
                "need at least 4 samples per axis, got {samples}"
            )));
        }
        if !box_.is_valid() {
            return Err(Error::InvalidArgument("empty Lipschitz box".into()));
        }
        if self.sigma.is_none() {
            return Ok((Mat2::J * self.m.scale(2.0)).spectral_norm());
        }
        let mut best = 0.0f64;
        for i in 0..samples {
            let x = box_.x[0] + (box_.x[1] - box_.x[0]) * i as f64 / (samples - 1) as f64;
            for j in 0..samples {
                let p = box_.xi[0] + (box_.xi[1] - box_.xi[0]) * j as f64 / (samples - 1) as f64;
                let h = self.hessian(PhasePoint::new(x, p))?;
                best = best.max((Mat2::J * h).spectral_norm());
            }
        }
        Ok(best)
    }
}
