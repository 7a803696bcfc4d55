//! Periodic position grid, sampled signals and their spectra, windows, and the
//! discrete short-time Fourier transform.
//!
//! Positions are `x_n = -L/2 + n L/N` and frequencies `xi_k = k/L` for
//! `k = -N/2 .. N/2-1`. Spectra are stored in that centered order, so index
//! `j` holds frequency `(j - N/2)/L`. Inner products carry the quadrature
//! weight `L/N`, which keeps unit-norm continuum windows unit-norm on the grid.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 8;
pub const MAX_SAMPLES: usize = 8192;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Unnormalized forward FFT, in place: `X_k = sum_n x_n e^{-2 pi i k n / N}`.
pub(crate) fn fft_in_place(buf: &mut [Complex64]) {
    forward_plan(buf.len()).process(buf);
}

/// Unnormalized inverse FFT, in place.
pub(crate) fn ifft_in_place(buf: &mut [Complex64]) {
    inverse_plan(buf.len()).process(buf);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    length: f64,
}

impl GridSpec {
    /// Builds a grid with `n` samples over a period of `length` (default `sqrt(n)`).
    pub fn new(n: usize, length: Option<f64>) -> Result<Self> {
        if !n.is_multiple_of(2) || !(MIN_SAMPLES..=MAX_SAMPLES).contains(&n) {
            return Err(Error::InvalidGrid(format!(
                "N must be even and within {MIN_SAMPLES}..={MAX_SAMPLES}, got {n}"
            )));
        }
        let length = length.unwrap_or((n as f64).sqrt());
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("L must be positive, got {length}")));
        }
        Ok(GridSpec { n, length })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn period(&self) -> f64 {
        self.length
    }

    /// Position step `L/N`.
    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Frequency step `1/L`.
    pub fn dxi(&self) -> f64 {
        1.0 / self.length
    }

    /// Frequency period `N/L`.
    pub fn xi_period(&self) -> f64 {
        self.n as f64 / self.length
    }

    /// Phase-space cell area `dx * dxi = 1/N`.
    pub fn cell_area(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn x(&self, index: usize) -> f64 {
        -0.5 * self.length + index as f64 * self.dx()
    }

    /// Frequency at centered spectral index `j`.
    pub fn xi(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) / self.length
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.xi(j)).collect()
    }

    /// Index of the grid position closest to `x` after periodic reduction.
    pub fn nearest_x_index(&self, x: f64) -> usize {
        let i = ((x + 0.5 * self.length) / self.dx()).round() as i64;
        i.rem_euclid(self.n as i64) as usize
    }

    /// Centered spectral index closest to `xi` after periodic reduction.
    pub fn nearest_xi_index(&self, xi: f64) -> usize {
        let j = (xi * self.length).round() as i64 + (self.n / 2) as i64;
        j.rem_euclid(self.n as i64) as usize
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Shorthand for [`GridSpec::new`].
pub fn make_grid(n: usize, length: Option<f64>) -> Result<GridSpec> {
    GridSpec::new(n, length)
}

/// Complex samples on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: GridSpec,
    samples: Vec<Complex64>,
}

impl Signal {
    pub fn new(grid: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        Ok(Signal { grid, samples })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Signal {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f(x_n)` on the grid.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(f64) -> Complex64) -> Self {
        let samples = (0..grid.len()).map(|i| f(grid.x(i))).collect();
        Signal { grid, samples }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// `<f, g> = (L/N) sum_n f_n conj(g_n)`.
    pub fn inner(&self, other: &Signal) -> Result<Complex64> {
        self.grid.check_same(&other.grid)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Signal) -> Complex64 {
        let s: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b.conj())
            .sum();
        s * self.grid.dx()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.samples.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> Signal {
        Signal {
            grid: self.grid,
            samples: self.samples.iter().map(|a| a * s).collect(),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: Complex64, other: &Signal) -> Result<Signal> {
        self.grid.check_same(&other.grid)?;
        Ok(Signal {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + s * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Signal) -> Result<Signal> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    /// Returns the signal rescaled to unit norm together with the original norm.
    pub fn normalized(&self) -> Result<(Signal, f64)> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::InvalidArgument("cannot normalize a zero signal".into()));
        }
        Ok((self.scaled(Complex64::new(1.0 / n, 0.0)), n))
    }

    /// Largest absolute sample difference.
    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Frequency-domain coefficients of a [`Signal`], in centered order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Spectrum { grid, coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// `sum_k |F_k|^2 / L`, equal to the signal energy by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dxi()
    }
}

#[inline]
fn alternating_sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `F_k = (L/N) sum_n f_n e^{-2 pi i xi_k x_n}`.
pub fn dft(f: &Signal) -> Spectrum {
    let grid = *f.grid();
    let n = grid.len();
    let half = n / 2;
    let mut buf = f.samples.clone();
    fft_in_place(&mut buf);
    let coeffs = (0..n)
        .map(|j| {
            let k = j as i64 - half as i64;
            buf[(j + half) % n] * (grid.dx() * alternating_sign(k))
        })
        .collect();
    Spectrum { grid, coeffs }
}

/// Inverse of [`dft`]: `f_n = (1/L) sum_k F_k e^{2 pi i xi_k x_n}`.
pub fn idft(spec: &Spectrum) -> Signal {
    let grid = *spec.grid();
    let n = grid.len();
    let half = n / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (j, c) in spec.coeffs.iter().enumerate() {
        let k = j as i64 - half as i64;
        buf[(j + half) % n] = c * alternating_sign(k);
    }
    ifft_in_place(&mut buf);
    let scale = 1.0 / (grid.period());
    for v in &mut buf {
        *v *= scale;
    }
    Signal { grid, samples: buf }
}

/// Sampled Gaussian `2^{1/4} e^{-pi x^2}`, not renormalized.
pub fn gaussian_window(grid: &GridSpec) -> Signal {
    let c = 2f64.powf(0.25);
    Signal::from_fn(*grid, |x| Complex64::new(c * (-PI * x * x).exp(), 0.0))
}

pub const MAX_HERMITE_ORDER: usize = 8;

/// Physicists' Hermite polynomial by three-term recurrence.
pub fn hermite_polynomial(order: usize, u: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * u);
    if order == 0 {
        return prev;
    }
    for k in 1..order {
        let next = 2.0 * u * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_n(sqrt(2 pi) x) e^{-pi x^2}`, normalized numerically on the grid.
pub fn hermite_window(grid: &GridSpec, order: usize) -> Result<Signal> {
    if order > MAX_HERMITE_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Hermite order must be at most {MAX_HERMITE_ORDER}, got {order}"
        )));
    }
    let s = (2.0 * PI).sqrt();
    let raw = Signal::from_fn(*grid, |x| {
        Complex64::new(hermite_polynomial(order, s * x) * (-PI * x * x).exp(), 0.0)
    });
    Ok(raw.normalized()?.0)
}

/// Full short-time Fourier transform on the `N x N` phase-space grid.
#[derive(Debug, Clone)]
pub struct StftGrid {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl StftGrid {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Value at position index `m` and centered frequency index `j`.
    pub fn get(&self, m: usize, j: usize) -> Complex64 {
        self.values[m * self.grid.len() + j]
    }

    /// Value at the grid point nearest to `(x, xi)`.
    pub fn at(&self, x: f64, xi: f64) -> Complex64 {
        self.get(self.grid.nearest_x_index(x), self.grid.nearest_xi_index(xi))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn cell_area(&self) -> f64 {
        self.grid.cell_area()
    }

    /// `sum |V|^2 / N`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_area()
    }
}

/// `V_g f(x_m, xi_k) = sum_n (L/N) f_n conj(g(x_n - x_m)) e^{-2 pi i xi_k x_n}`.
pub fn stft_full(f: &Signal, g: &Signal) -> Result<StftGrid> {
    f.grid.check_same(&g.grid)?;
    if !(g.norm() > 0.0) {
        return Err(Error::InvalidArgument("STFT window has zero norm".into()));
    }
    let grid = f.grid;
    let n = grid.len();
    let half = n / 2;
    let mut values = vec![Complex64::new(0.0, 0.0); n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(m, row)| {
        let mut buf: Vec<Complex64> = (0..n)
            .map(|i| f.samples[i] * g.samples[(i + n + half - m) % n].conj())
            .collect();
        fft_in_place(&mut buf);
        for (j, out) in row.iter_mut().enumerate() {
            let k = j as i64 - half as i64;
            *out = buf[(j + half) % n] * (grid.dx() * alternating_sign(k));
        }
    });
    Ok(StftGrid { grid, values })
}

/// Discrete mixed norm `(sum_k (sum_m |V_phi f|^p dx)^{q/p} dxi)^{1/q}` with
/// the Gaussian window; `f64::INFINITY` selects the maximum.
pub fn mixed_modulation_norm(f: &Signal, p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0) || !(q >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "mixed norm exponents must be >= 1, got p={p}, q={q}"
        )));
    }
    let phi = gaussian_window(f.grid());
    let v = stft_full(f, &phi)?;
    Ok(mixed_norm_of(&v, p, q))
}

pub(crate) fn mixed_norm_of(v: &StftGrid, p: f64, q: f64) -> f64 {
    let grid = v.grid;
    let n = grid.len();
    let inner: Vec<f64> = (0..n)
        .map(|j| {
            let col = (0..n).map(|m| v.get(m, j).norm());
            if p.is_infinite() {
                col.fold(0.0, f64::max)
            } else {
                (col.map(|a| a.powf(p)).sum::<f64>() * grid.dx()).powf(1.0 / p)
            }
        })
        .collect();
    if q.is_infinite() {
        inner.into_iter().fold(0.0, f64::max)
    } else {
        (inner.into_iter().map(|a| a.powf(q)).sum::<f64>() * grid.dxi()).powf(1.0 / q)
    }
}

/// Riemann-sum proxy `sum |V_phi f| / N` for the Feichtinger-algebra norm.
pub fn m1_norm(f: &Signal) -> f64 {
    let phi = gaussian_window(f.grid());
    let v = stft_full(f, &phi).expect("Gaussian window on the signal's own grid");
    mixed_norm_of(&v, 1.0, 1.0)
}
