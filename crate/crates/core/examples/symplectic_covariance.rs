// U(t) rho(z) g against rho(Phi_t z) U(t) g: exact for quadratic H up to
// discretization, broken by a nonquadratic perturbation.

use hamframe::grid::{gaussian_window, make_grid};
use hamframe::hamiltonian::{HamiltonianSpec, PhasePoint};
use hamframe::symbol::parse;
use hamframe::weyl::{CovarianceMap, QuantumSystem};

pub fn run_example() -> hamframe::Result<()> {
    let grid = make_grid(256, None)?;
    let g = gaussian_window(&grid);
    let ho = QuantumSystem::new(HamiltonianSpec::harmonic_oscillator(), &grid)?;
    let perturbed = QuantumSystem::new(
        HamiltonianSpec::from_entries(1.0, 0.0, 1.0, Some(parse("0.3*cos(x)")?)),
        &grid,
    )?;

    println!("   t      z        quadratic    perturbed(flow)  perturbed(linear map)");
    for t in [0.1, 0.4, std::f64::consts::FRAC_PI_4] {
        for z in [PhasePoint::new(1.0, 0.0), PhasePoint::new(-2.0, 1.5)] {
            let q = ho.covariance_residual(z, t, &g, CovarianceMap::Flow)?;
            let p = perturbed.covariance_residual(z, t, &g, CovarianceMap::Flow)?;
            let l = perturbed.covariance_residual(z, t, &g, CovarianceMap::QuadraticOnly)?;
            println!("{t:6.3}  ({:+.1},{:+.1})  {q:.3e}    {p:.3e}        {l:.3e}", z.x, z.xi);
        }
    }

    let curve = perturbed.m1_continuity_curve(&g, &[0.2, 0.1, 0.05, 0.025])?;
    for (t, d) in curve {
        println!("||U({t})g - g||_M1 = {d:.6}");
    }
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
