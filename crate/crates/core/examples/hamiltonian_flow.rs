// Classical flow of H(z) = z.Mz/2 + sigma(z): RK4 against the exact rotation,
// symplecticity of the Jacobian and the Gronwall bound on lattice pairs.

use std::f64::consts::FRAC_PI_4;

use hamframe::flow::{distortion_constants, flow_set, gronwall_defect, jacobian_fd, NodeSet};
use hamframe::hamiltonian::{HamiltonianSpec, PhaseBox, PhasePoint};
use hamframe::symbol::parse;

pub fn run_example() -> hamframe::Result<()> {
    let ho = HamiltonianSpec::harmonic_oscillator();
    let nodes = NodeSet::rect_lattice(0.5, 0.5, [-2.0, 2.0], [-2.0, 2.0])?;
    let moved = flow_set(&ho, &nodes, FRAC_PI_4, 1000)?;
    let exact = ho.linear_flow_exact(FRAC_PI_4)?;
    let err = nodes
        .iter()
        .zip(moved.iter())
        .map(|(&z, &w)| (exact.apply(z) - w).norm())
        .fold(0.0, f64::max);
    println!("{} nodes, RK4 vs exact rotation at t = pi/4: {err:.3e}", nodes.len());

    let spec = HamiltonianSpec::from_entries(1.0, 0.0, 1.0, Some(parse("0.1*cos(x)")?));
    let j = jacobian_fd(&spec, PhasePoint::new(0.8, -0.3), 0.5, 500, 1e-5)?;
    println!("det of the flow Jacobian = {:.8}", j.det());

    let l = spec.lipschitz_estimate(&PhaseBox::square(3.0), 41)?;
    println!("Lipschitz constant of the vector field ~ {l:.6}");
    for t in [0.1, 0.25, 0.5] {
        let ratio = gronwall_defect(&spec, &nodes, t, 1000, l)?;
        println!("t = {t}: worst pair defect / Gronwall bound = {ratio:.4}");
    }
    let d = distortion_constants(&spec, &nodes, 0.5, 5, 1000.0)?;
    println!("distortion on |t| <= 0.5: c = {:.4}, C = {:.4}", d.c_lower, d.c_upper);
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
