// Weyl quantization of the harmonic oscillator and of a perturbed symbol.

use hamframe::grid::{gaussian_window, make_grid};
use hamframe::hamiltonian::HamiltonianSpec;
use hamframe::symbol::parse;
use hamframe::weyl::{build_hamiltonian, weyl_quantize, Propagator};

pub fn run_example() -> hamframe::Result<()> {
    let grid = make_grid(128, None)?;
    let ho = build_hamiltonian(&HamiltonianSpec::harmonic_oscillator(), &grid)?;
    let e = ho.eigenvalues()?;
    println!("lowest eigenvalues: {:.9} {:.9} {:.9}", e[0], e[1], e[2]);
    println!("spacing / e0 = {:.6}", (e[1] - e[0]) / e[0]);

    let phi = gaussian_window(&grid);
    let ground = ho.eigenvector(0)?;
    println!("|<ground, phi>| = {:.12}", ground.inner(&phi)?.norm());

    let one = weyl_quantize(|_, _| Ok(1.0), &grid)?;
    println!("Op(1) applied to phi, max deviation = {:.3e}", one.apply(&phi)?.max_abs_diff(&phi));

    let spec = HamiltonianSpec::from_entries(1.0, 0.0, 1.0, Some(parse("0.3*cos(x)")?));
    let op = build_hamiltonian(&spec, &grid)?;
    println!("Hermitian defect before symmetrization: {:.3e}", op.hermitian_defect());
    let u = Propagator::eigen(&op, 0.4)?;
    println!("||U*U - I|| at t = 0.4: {:.3e}", u.unitarity_defect());
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
