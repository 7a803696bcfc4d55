// Strang splitting for separable Hamiltonians against the eigen propagator.

use hamframe::grid::{gaussian_window, make_grid};
use hamframe::hamiltonian::{HamiltonianSpec, PhasePoint};
use hamframe::shift::rho;
use hamframe::symbol::parse;
use hamframe::weyl::{propagate_split, QuantumSystem};

pub fn run_example() -> hamframe::Result<()> {
    let grid = make_grid(256, None)?;
    let spec = HamiltonianSpec::from_entries(1.0, 0.0, 1.0, Some(parse("0.1*cos(x)")?));
    let sys = QuantumSystem::new(spec.clone(), &grid)?;
    let f = rho(PhasePoint::new(1.5, -0.5), &gaussian_window(&grid));

    let t = 0.5;
    let reference = sys.propagate(t, &f)?;
    for steps in [50, 200, 800] {
        let split = propagate_split(&spec, &grid, t, steps, &f)?;
        println!("steps = {steps:4}: ||split - eigen|| = {:.3e}", split.sub(&reference)?.norm());
    }

    let mixed = HamiltonianSpec::from_entries(1.0, 0.0, 1.0, Some(parse("x*p")?));
    match propagate_split(&mixed, &grid, t, 100, &f) {
        Ok(_) => unreachable!("x*p is not separable"),
        Err(e) => println!("x*p: {e}"),
    }
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
