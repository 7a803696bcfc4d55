//! Numerical Hamiltonian flow on points and node sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianSpec, Mat2, PhasePoint};
use crate::symbol::EvalError;

/// Default resolution of the fixed-step integrator.
pub const STEPS_PER_UNIT_TIME: f64 = 1000.0;

/// Step count for a flow of duration `t` at `per_unit` steps per unit time.
pub fn default_steps(t: f64, per_unit: f64) -> usize {
    ((t.abs() * per_unit).ceil() as usize).max(1)
}

/// Ordered phase-space points; index `i` of a deformed set is the image of
/// index `i` of its source.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NodeSet {
    points: Vec<PhasePoint>,
}

impl NodeSet {
    pub fn new(points: Vec<PhasePoint>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("node {i} has non-finite coordinates")));
        }
        Ok(NodeSet { points })
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PhasePoint> {
        self.points.iter()
    }

    /// `alpha Z x beta Z` restricted to `[x0, x1) x [xi0, xi1)`, row-major in `x`.
    pub fn rect_lattice(alpha: f64, beta: f64, x: [f64; 2], xi: [f64; 2]) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidArgument("lattice spacings must be positive".into()));
        }
        let axis = |step: f64, lo: f64, hi: f64| -> Vec<f64> {
            let first = (lo / step).ceil() as i64;
            let mut out = Vec::new();
            let mut k = first;
            loop {
                let v = k as f64 * step;
                if v >= hi {
                    break;
                }
                if v >= lo {
                    out.push(v);
                }
                k += 1;
            }
            out
        };
        let xs = axis(alpha, x[0], x[1]);
        let xis = axis(beta, xi[0], xi[1]);
        let points = xs
            .iter()
            .flat_map(|&a| xis.iter().map(move |&b| PhasePoint::new(a, b)))
            .collect();
        NodeSet::new(points)
    }

    pub fn map(&self, f: impl Fn(PhasePoint) -> PhasePoint) -> Result<Self> {
        NodeSet::new(self.points.iter().map(|&z| f(z)).collect())
    }

    pub fn translated(&self, w: PhasePoint) -> Self {
        NodeSet {
            points: self.points.iter().map(|&z| z + w).collect(),
        }
    }
}

impl FromIterator<PhasePoint> for NodeSet {
    fn from_iter<I: IntoIterator<Item = PhasePoint>>(iter: I) -> Self {
        NodeSet {
            points: iter.into_iter().collect(),
        }
    }
}

/// Empirical distortion constants `c_T |x-y| <= |Phi_t x - Phi_t y| <= C_T |x-y|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub c_lower: f64,
    pub c_upper: f64,
    pub horizon: f64,
    pub pair_count: usize,
}

fn rk4_step(spec: &HamiltonianSpec, z: PhasePoint, h: f64) -> Result<PhasePoint> {
    let k1 = spec.vector_field(z)?;
    let k2 = spec.vector_field(z + (0.5 * h) * k1)?;
    let k3 = spec.vector_field(z + (0.5 * h) * k2)?;
    let k4 = spec.vector_field(z + h * k3)?;
    Ok(z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Classical RK4 with `steps` fixed steps of size `t/steps`; `t` may be negative.
pub fn flow_point(spec: &HamiltonianSpec, z: PhasePoint, t: f64, steps: usize) -> Result<PhasePoint> {
    if steps == 0 {
        return Err(Error::InvalidArgument("flow needs at least one step".into()));
    }
    if t == 0.0 {
        return Ok(z);
    }
    let h = t / steps as f64;
    let mut cur = z;
    for _ in 0..steps {
        cur = match rk4_step(spec, cur, h) {
            Ok(z) => z,
            Err(Error::Eval(EvalError::NonFinite)) => return Err(Error::Divergence { node: 0, t }),
            Err(e) => return Err(e),
        };
        if !cur.is_finite() {
            return Err(Error::Divergence { node: 0, t });
        }
    }
    Ok(cur)
}

/// Flows every node; divergence reports the first failing index.
pub fn flow_set(spec: &HamiltonianSpec, nodes: &NodeSet, t: f64, steps: usize) -> Result<NodeSet> {
    if t == 0.0 {
        return Ok(nodes.clone());
    }
    let moved: Vec<Result<PhasePoint>> = nodes
        .points
        .par_iter()
        .map(|&z| flow_point(spec, z, t, steps))
        .collect();
    let mut points = Vec::with_capacity(moved.len());
    for (i, r) in moved.into_iter().enumerate() {
        match r {
            Ok(z) => points.push(z),
            Err(Error::Divergence { t, .. }) => return Err(Error::Divergence { node: i, t }),
            Err(e) => return Err(e),
        }
    }
    Ok(NodeSet { points })
}

/// Central-difference Jacobian `D Phi_t(z)`.
pub fn jacobian_fd(
    spec: &HamiltonianSpec,
    z: PhasePoint,
    t: f64,
    steps: usize,
    h: f64,
) -> Result<Mat2> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("difference step must be positive".into()));
    }
    let col = |dir: PhasePoint| -> Result<PhasePoint> {
        let plus = flow_point(spec, z + h * dir, t, steps)?;
        let minus = flow_point(spec, z - h * dir, t, steps)?;
        Ok((1.0 / (2.0 * h)) * (plus - minus))
    };
    let c0 = col(PhasePoint::new(1.0, 0.0))?;
    let c1 = col(PhasePoint::new(0.0, 1.0))?;
    Ok(Mat2([[c0.x, c1.x], [c0.xi, c1.xi]]))
}

/// Maximum over node pairs of
/// `|Phi_t a - Phi_t b - (a - b)| / (L |t| |a - b| e^{L|t|})`.
/// Values at most one confirm the Gronwall-type bound.
pub fn gronwall_defect(
    spec: &HamiltonianSpec,
    nodes: &NodeSet,
    t: f64,
    steps: usize,
    lipschitz: f64,
) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    if !(lipschitz > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Lipschitz constant must be positive, got {lipschitz}"
        )));
    }
    let moved = flow_set(spec, nodes, t, steps)?;
    let factor = lipschitz * t.abs() * (lipschitz * t.abs()).exp();
    Ok(gronwall_ratio(nodes, &moved, factor))
}

pub(crate) fn gronwall_ratio(base: &NodeSet, moved: &NodeSet, factor: f64) -> f64 {
    let (a, b) = (base.points(), moved.points());
    (0..a.len())
        .into_par_iter()
        .map(|i| {
            let mut worst = 0.0f64;
            for j in (i + 1)..a.len() {
                let d = (a[i] - a[j]).norm();
                if d == 0.0 {
                    continue;
                }
                let num = ((b[i] - b[j]) - (a[i] - a[j])).norm();
                worst = worst.max(num / (factor * d));
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Scans `t_samples` equally spaced times in `[-T, T]` (only `t = 0` when
/// `t_samples == 1`) and all distinct node pairs.
pub fn distortion_constants(
    spec: &HamiltonianSpec,
    nodes: &NodeSet,
    horizon: f64,
    t_samples: usize,
    steps_per_unit: f64,
) -> Result<DistortionReport> {
    if nodes.len() < 2 {
        return Err(Error::InvalidArgument("need at least two nodes".into()));
    }
    if !(horizon > 0.0) || t_samples == 0 {
        return Err(Error::InvalidArgument("horizon must be positive".into()));
    }
    let times: Vec<f64> = if t_samples == 1 {
        vec![0.0]
    } else {
        (0..t_samples)
            .map(|i| -horizon + 2.0 * horizon * i as f64 / (t_samples - 1) as f64)
            .collect()
    };
    let pts = nodes.points();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut pairs = 0usize;
    for &t in &times {
        let moved = flow_set(spec, nodes, t, default_steps(t, steps_per_unit))?;
        let m = moved.points();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = (pts[i] - pts[j]).norm();
                if d == 0.0 {
                    continue;
                }
                let r = (m[i] - m[j]).norm() / d;
                lo = lo.min(r);
                hi = hi.max(r);
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return Err(Error::InvalidArgument("all node pairs coincide".into()));
    }
    Ok(DistortionReport {
        c_lower: lo,
        c_upper: hi,
        horizon,
        pair_count: pairs / times.len(),
    })
}
