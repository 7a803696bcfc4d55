// Predicted frame bounds for a perturbed window, checked against the dense
// estimator, plus the sampling-inequality ratios behind the constant C.

use hamframe::frames::{
    box_lattice_system, frame_bounds_dense, sampling_trials, window_perturbation_bounds, GaborSystem,
    DEFAULT_SAMPLING_CONSTANT,
};
use hamframe::grid::{hermite_window, make_grid};
use hamframe::hamiltonian::PhasePoint;
use hamframe::shift::rho;
use num_complex::Complex64;

pub fn run_example() -> hamframe::Result<()> {
    let grid = make_grid(128, None)?;
    let sys = box_lattice_system(&grid, 0.75, 0.75)?;
    let base = frame_bounds_dense(&sys)?;
    let g = sys.window().clone();
    println!("unperturbed: A = {:.6}, B = {:.6}", base.a, base.b);

    let bump = rho(PhasePoint::new(0.3, -0.2), &hermite_window(&grid, 2)?);
    for eps in [1e-3, 3e-3, 1e-2] {
        let g_new = g.add_scaled(Complex64::new(eps, 0.0), &bump)?;
        let (lo, hi) =
            window_perturbation_bounds(base.a.sqrt(), base.b.sqrt(), &g, &g_new, sys.nodes(), DEFAULT_SAMPLING_CONSTANT)?;
        let new_sys = GaborSystem::new(g_new, sys.nodes().clone())?;
        let measured = frame_bounds_dense(&new_sys)?.rescaled(new_sys.scale());
        println!(
            "eps = {eps:.0e}: predicted [{:.6}, {:.6}], measured [{:.6}, {:.6}]",
            lo.max(0.0).powi(2),
            hi * hi,
            measured.a,
            measured.b
        );
    }

    let suite = sampling_trials(1, 20, 64)?;
    println!(
        "20 random systems at N = 64: max ratio {:.4}, max sup ratio {:.4} (C = {DEFAULT_SAMPLING_CONSTANT:.4})",
        suite.max_ratio(),
        suite.max_sup_ratio()
    );
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
