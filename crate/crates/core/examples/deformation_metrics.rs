// Relative separation, the (L1)/(L2) functionals and jitter for a lattice
// moved by the Hamiltonian flow.

use hamframe::deformation::{jitter, l1_defect, l2_radius, rel_separation, DeformationPair, DeformationReport};
use hamframe::flow::{distortion_constants, flow_set, NodeSet};
use hamframe::hamiltonian::{HamiltonianSpec, PhasePoint};
use hamframe::symbol::parse;

pub fn run_example() -> hamframe::Result<()> {
    let square = NodeSet::rect_lattice(1.0, 1.0, [0.0, 3.0], [0.0, 3.0])?;
    println!("rel(Z^2 in [0,3]^2) = {}", rel_separation(&square));

    let a = NodeSet::new(vec![PhasePoint::new(0.0, 0.0)])?;
    let b = NodeSet::new(vec![PhasePoint::new(3.0, 4.0)])?;
    println!("jitter between (0,0) and (3,4) = {}", jitter(&a, &b)?);

    let spec = HamiltonianSpec::from_entries(1.0, 0.0, 1.0, Some(parse("0.1*cos(x)")?));
    let base = NodeSet::rect_lattice(0.7, 0.7, [-3.0, 3.0], [-3.0, 3.0])?;
    let c = distortion_constants(&spec, &base, 0.2, 5, 1000.0)?;
    for t in [0.2, 0.1, 0.05, 0.025] {
        let pair = DeformationPair::new(base.clone(), flow_set(&spec, &base, t, 1000)?)?;
        let r = DeformationReport::compute(&pair, 2.0)?;
        println!(
            "t = {t:5}: rel {} -> {}, l1 = {:.4e}, R' = {:.4} (C R = {:.4}), jitter = {:.4e}",
            r.rel_base,
            r.rel_deformed,
            r.l1_defect,
            r.l2_radius,
            c.c_upper * 2.0,
            r.jitter
        );
    }

    let stretch = DeformationPair::from_map(base, |z| 1.01 * z)?;
    println!("z -> 1.01 z: l1(R = 2) = {:.6}, l2(R = 2) = {:.6}", l1_defect(&stretch, 2.0)?, l2_radius(&stretch, 2.0)?);
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
