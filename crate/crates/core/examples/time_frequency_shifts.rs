// Time-frequency shifts on the torus and their commutation phase.

use hamframe::grid::{gaussian_window, make_grid};
use hamframe::hamiltonian::PhasePoint;
use hamframe::shift::{pi_shift, rho, TorusBox};
use num_complex::Complex64;

pub fn run_example() -> hamframe::Result<()> {
    let grid = make_grid(64, Some(8.0))?;
    let phi = gaussian_window(&grid);
    let torus = TorusBox::of(&grid);

    let z = PhasePoint::new(1.25, -0.5);
    let w = PhasePoint::new(-0.75, 2.0);
    println!("||rho(z) phi|| = {:.15}", rho(z, &phi).norm());

    // rho(z) rho(w) = e^{pi i (x' xi - x xi')} rho(z + w) on lattice-aligned points
    let lhs = rho(z, &rho(w, &phi));
    let phase = Complex64::from_polar(1.0, std::f64::consts::PI * (w.x * z.xi - z.x * w.xi));
    let rhs = rho(z + w, &phi).scaled(phase);
    println!("composition defect = {:.3e}", lhs.max_abs_diff(&rhs));

    let far = PhasePoint::new(z.x + grid.period(), z.xi);
    println!("periodic in x: {:.3e}", rho(far, &phi).max_abs_diff(&rho(z, &phi)));
    println!("wrap({:?}) = {:?}", far, torus.wrap(far));

    let p = pi_shift(z, &phi);
    println!("<pi(z) phi, rho(z) phi> = {:.6}", p.inner(&rho(z, &phi))?);
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
