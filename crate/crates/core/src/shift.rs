//! Symmetric time-frequency shifts `rho(z) f = e^{-pi i x xi} e^{2 pi i xi .} f(. - x)`
//! for arbitrary real `z`, on the periodic grid.
//!
//! Translation multiplies the spectrum by `e^{-2 pi i xi_k a}`; modulation
//! multiplies samples by `e^{2 pi i b x_n}`. Both are exactly unitary. For
//! grid-aligned arguments they reduce to cyclic shifts; off the grid the
//! Heisenberg commutation law holds only approximately.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::grid::{dft, idft, GridSpec, Signal};
use crate::hamiltonian::PhasePoint;

/// Fundamental domain `[-L/2, L/2) x [-N/(2L), N/(2L))` of the phase-space torus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusBox {
    pub x_period: f64,
    pub xi_period: f64,
}

impl TorusBox {
    pub fn of(grid: &GridSpec) -> Self {
        TorusBox {
            x_period: grid.period(),
            xi_period: grid.xi_period(),
        }
    }

    pub fn wrap(&self, z: PhasePoint) -> PhasePoint {
        PhasePoint::new(wrap_coord(z.x, self.x_period), wrap_coord(z.xi, self.xi_period))
    }

    pub fn contains(&self, z: PhasePoint) -> bool {
        let inside = |v: f64, p: f64| v >= -0.5 * p && v < 0.5 * p;
        inside(z.x, self.x_period) && inside(z.xi, self.xi_period)
    }
}

fn wrap_coord(v: f64, period: f64) -> f64 {
    let half = 0.5 * period;
    if v >= -half && v < half {
        return v;
    }
    let w = (v + half).rem_euclid(period) - half;
    // rem_euclid can round up to exactly `period`
    if w >= half {
        w - period
    } else {
        w
    }
}

/// `f(. - a)` by a spectral phase ramp.
pub fn translate(f: &Signal, a: f64) -> Signal {
    if a == 0.0 {
        return f.clone();
    }
    let grid = *f.grid();
    let mut spec = dft(f);
    for (j, c) in spec.coeffs_mut().iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, -2.0 * PI * grid.xi(j) * a);
    }
    idft(&spec)
}

/// `e^{2 pi i b x} f(x)`.
pub fn modulate(f: &Signal, b: f64) -> Signal {
    if b == 0.0 {
        return f.clone();
    }
    let grid = *f.grid();
    let mut out = f.clone();
    for (i, v) in out.samples_mut().iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, 2.0 * PI * b * grid.x(i));
    }
    out
}

/// Symmetric shift with the coordinates reduced to the torus first.
pub fn rho(z: PhasePoint, f: &Signal) -> Signal {
    let w = TorusBox::of(f.grid()).wrap(z);
    if w.x == 0.0 && w.xi == 0.0 {
        return f.clone();
    }
    let phase = Complex64::from_polar(1.0, -PI * w.x * w.xi);
    modulate(&translate(f, w.x), w.xi).scaled(phase)
}

/// Signal-processing shift `pi(z) = e^{pi i x xi} rho(z)`.
pub fn pi_shift(z: PhasePoint, f: &Signal) -> Signal {
    let w = TorusBox::of(f.grid()).wrap(z);
    let phase = Complex64::from_polar(1.0, PI * w.x * w.xi);
    rho(z, f).scaled(phase)
}
