//! Relative separation and Lipschitz-deformation functionals on node sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::NodeSet;
use crate::hamiltonian::PhasePoint;

/// Maximum number of nodes in a closed unit square `[a, a+1] x [b, b+1]`.
///
/// The maximum is attained with the left and bottom faces touching nodes,
/// so anchors range over coordinate pairs occurring in the set. For each
/// `x` anchor the nodes in the vertical strip are scanned with two pointers
/// over their sorted `xi` values.
pub fn rel_separation(nodes: &NodeSet) -> usize {
    let pts = nodes.points();
    if pts.is_empty() {
        return 0;
    }
    let mut anchors: Vec<f64> = pts.iter().map(|p| p.x).collect();
    anchors.sort_by(f64::total_cmp);
    anchors.dedup();
    anchors
        .par_iter()
        .map(|&a| {
            let mut strip: Vec<f64> = pts
                .iter()
                .filter(|p| p.x >= a && p.x <= a + 1.0)
                .map(|p| p.xi)
                .collect();
            strip.sort_by(f64::total_cmp);
            let mut best = 0;
            let mut hi = 0;
            for lo in 0..strip.len() {
                if hi < lo {
                    hi = lo;
                }
                while hi < strip.len() && strip[hi] <= strip[lo] + 1.0 {
                    hi += 1;
                }
                best = best.max(hi - lo);
            }
            best
        })
        .max()
        .unwrap_or(0)
}

/// Index-aligned pair `(Lambda, tau Lambda)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationPair {
    base: NodeSet,
    deformed: NodeSet,
}

impl DeformationPair {
    pub fn new(base: NodeSet, deformed: NodeSet) -> Result<Self> {
        if base.len() != deformed.len() {
            return Err(Error::InvalidArgument(format!(
                "deformation pair has {} base and {} deformed nodes",
                base.len(),
                deformed.len()
            )));
        }
        Ok(DeformationPair { base, deformed })
    }

    /// Pair obtained by applying `tau` to every node.
    pub fn from_map(base: NodeSet, tau: impl Fn(PhasePoint) -> PhasePoint) -> Result<Self> {
        let deformed = base.map(tau)?;
        Ok(DeformationPair { base, deformed })
    }

    pub fn base(&self) -> &NodeSet {
        &self.base
    }

    pub fn deformed(&self) -> &NodeSet {
        &self.deformed
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    /// Largest per-index displacement `|tau(l_i) - l_i|`.
    pub fn max_displacement(&self) -> f64 {
        self.base
            .iter()
            .zip(self.deformed.iter())
            .map(|(&a, &b)| (b - a).norm())
            .fold(0.0, f64::max)
    }
}

fn pair_scan(pair: &DeformationPair, f: impl Fn(usize, usize) -> f64 + Sync) -> f64 {
    let n = pair.len();
    (0..n)
        .into_par_iter()
        .map(|i| ((i + 1)..n).map(|j| f(i, j)).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {r}")))
    }
}

/// Max of `|(tau l_i - tau l_j) - (l_i - l_j)|` over pairs with `|l_i - l_j| <= r`.
pub fn l1_defect(pair: &DeformationPair, r: f64) -> Result<f64> {
    check_radius(r)?;
    let (a, b) = (pair.base.points(), pair.deformed.points());
    Ok(pair_scan(pair, |i, j| {
        let d = a[i] - a[j];
        if d.norm() <= r {
            ((b[i] - b[j]) - d).norm()
        } else {
            0.0
        }
    }))
}

/// Empirical `R'`: max of `|l_i - l_j|` over pairs with `|tau l_i - tau l_j| <= r`.
pub fn l2_radius(pair: &DeformationPair, r: f64) -> Result<f64> {
    check_radius(r)?;
    let (a, b) = (pair.base.points(), pair.deformed.points());
    Ok(pair_scan(pair, |i, j| {
        if (b[i] - b[j]).norm() <= r {
            (a[i] - a[j]).norm()
        } else {
            0.0
        }
    }))
}

fn directed(a: &[PhasePoint], b: &[PhasePoint]) -> f64 {
    a.par_iter()
        .map(|&p| b.iter().map(|&q| (p - q).norm()).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

/// Hausdorff distance between two node sets.
pub fn jitter(a: &NodeSet, b: &NodeSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("jitter needs two nonempty node sets".into()));
    }
    Ok(directed(a.points(), b.points()).max(directed(b.points(), a.points())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationReport {
    pub rel_base: usize,
    pub rel_deformed: usize,
    pub radius: f64,
    pub l1_defect: f64,
    pub l2_radius: f64,
    pub jitter: f64,
}

impl DeformationReport {
    pub fn compute(pair: &DeformationPair, r: f64) -> Result<Self> {
        Ok(DeformationReport {
            rel_base: rel_separation(pair.base()),
            rel_deformed: rel_separation(pair.deformed()),
            radius: r,
            l1_defect: l1_defect(pair, r)?,
            l2_radius: l2_radius(pair, r)?,
            jitter: jitter(pair.base(), pair.deformed())?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(pts: &[(f64, f64)]) -> NodeSet {
        NodeSet::new(pts.iter().map(|&(x, xi)| PhasePoint::new(x, xi)).collect()).unwrap()
    }

    fn rel_brute(nodes: &NodeSet) -> usize {
        let p = nodes.points();
        let mut best = 0;
        for a in p {
            for b in p {
                let c = p
                    .iter()
                    .filter(|q| q.x >= a.x && q.x <= a.x + 1.0 && q.xi >= b.xi && q.xi <= b.xi + 1.0)
                    .count();
                best = best.max(c);
            }
        }
        best
    }

    #[test]
    fn rel_examples() {
        assert_eq!(rel_separation(&NodeSet::new(vec![]).unwrap()), 0);
        let grid: Vec<(f64, f64)> = (0..4)
            .flat_map(|i| (0..4).map(move |j| (i as f64, j as f64)))
            .collect();
        assert_eq!(rel_separation(&set(&grid)), 4);
        assert_eq!(rel_separation(&set(&[(0.0, 0.0), (0.5, 0.0), (2.0, 0.0)])), 2);
        assert_eq!(rel_separation(&set(&[(1.0, 1.0), (1.0, 1.0)])), 2);
    }

    #[test]
    fn jitter_examples() {
        let a = set(&[(0.0, 0.0)]);
        assert_eq!(jitter(&a, &a).unwrap(), 0.0);
        assert_eq!(jitter(&a, &set(&[(3.0, 4.0)])).unwrap(), 5.0);
        assert!(jitter(&a, &NodeSet::new(vec![]).unwrap()).is_err());
    }

    #[test]
    fn defect_examples() {
        let base = NodeSet::rect_lattice(0.5, 0.5, [-1.0, 1.25], [-1.0, 1.25]).unwrap();
        let ident = DeformationPair::from_map(base.clone(), |z| z).unwrap();
        assert_eq!(l1_defect(&ident, 2.0).unwrap(), 0.0);
        assert_eq!(l2_radius(&ident, 2.0).unwrap(), 2.0);
        let dil = DeformationPair::from_map(base.clone(), |z| 1.01 * z).unwrap();
        let d = l1_defect(&dil, 2.0).unwrap();
        assert!((d - 0.02).abs() < 1e-12, "{d}");
        let half = DeformationPair::from_map(base, |z| 0.5 * z).unwrap();
        let r = l2_radius(&half, 1.0).unwrap();
        assert!(r > 1.0 && r <= 2.0 + 1e-12, "{r}");
        assert!(l1_defect(&half, 0.0).is_err());
        assert!(DeformationPair::new(set(&[(0.0, 0.0)]), set(&[])).is_err());
    }

    #[test]
    fn report_fields() {
        let base = set(&[(0.0, 0.0), (0.5, 0.0), (2.0, 0.0)]);
        let pair = DeformationPair::from_map(base, |z| z + PhasePoint::new(0.1, 0.0)).unwrap();
        let rep = DeformationReport::compute(&pair, 1.0).unwrap();
        assert_eq!((rep.rel_base, rep.rel_deformed), (2, 2));
        assert!(rep.l1_defect < 1e-15);
        assert!(rep.jitter <= pair.max_displacement() + 1e-15);
    }

    fn arb_set() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec(((-3.0f64..3.0), (-3.0f64..3.0)), 0..40)
    }

    proptest! {
        #[test]
        fn rel_matches_brute_force(pts in arb_set()) {
            let s = set(&pts);
            prop_assert_eq!(rel_separation(&s), rel_brute(&s));
        }

        #[test]
        fn rel_bounded_by_count(pts in arb_set()) {
            let s = set(&pts);
            prop_assert!(rel_separation(&s) <= s.len());
        }

        #[test]
        fn rel_translation_invariant_on_dyadic_grid(
            pts in prop::collection::vec(((-24i32..24), (-24i32..24)), 1..40),
            sx in -64i32..64, sy in -64i32..64,
        ) {
            // dyadic coordinates keep the shift exact in floating point
            let s = set(&pts.iter().map(|&(a, b)| (a as f64 / 8.0, b as f64 / 8.0)).collect::<Vec<_>>());
            let w = PhasePoint::new(sx as f64 / 8.0, sy as f64 / 8.0);
            prop_assert_eq!(rel_separation(&s), rel_separation(&s.translated(w)));
        }

        #[test]
        fn l1_monotone_in_radius(pts in arb_set(), k in 0.5f64..1.5, r in 0.1f64..3.0) {
            prop_assume!(!pts.is_empty());
            let pair = DeformationPair::from_map(set(&pts), |z| PhasePoint::new(k * z.x + 0.1 * z.xi.sin(), z.xi / k)).unwrap();
            prop_assert!(l1_defect(&pair, r).unwrap() <= l1_defect(&pair, 2.0 * r).unwrap());
        }

        #[test]
        fn jitter_at_most_displacement(pts in arb_set(), dx in -0.3f64..0.3, dy in -0.3f64..0.3) {
            prop_assume!(!pts.is_empty());
            let pair = DeformationPair::from_map(set(&pts), |z| z + PhasePoint::new(dx * z.xi.cos(), dy)).unwrap();
            let j = jitter(pair.base(), pair.deformed()).unwrap();
            prop_assert!(j <= pair.max_displacement() + 1e-15);
        }
    }
}
