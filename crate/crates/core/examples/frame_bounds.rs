// Frame bounds of Gaussian Gabor systems: dense eigenvalues and the
// matrix-free power iteration.

use hamframe::frames::{
    box_lattice_system, frame_bounds_dense, frame_bounds_iterative, full_grid_nodes, GaborSystem,
};
use hamframe::grid::{gaussian_window, make_grid};

pub fn run_example() -> hamframe::Result<()> {
    let small = make_grid(16, None)?;
    let tight = GaborSystem::new(gaussian_window(&small), full_grid_nodes(&small))?;
    let r = frame_bounds_dense(&tight)?;
    println!("full grid N = 16: A = {:.12}, B = {:.12}", r.a, r.b);

    let grid = make_grid(64, None)?;
    for (alpha, beta) in [(0.5, 0.5), (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2), (1.0, 1.0)] {
        let sys = box_lattice_system(&grid, alpha, beta)?;
        let dense = frame_bounds_dense(&sys)?;
        let iter = frame_bounds_iterative(&sys, 1e-10, 50_000)?;
        println!(
            "alpha = beta = {alpha:.4}: {} nodes, dense [{:.6}, {:.6}], iterative [{:.6}, {:.6}], B/A = {:.3}",
            dense.node_count, dense.a, dense.b, iter.a, iter.b, dense.condition
        );
        if let Some(d) = iter.diagnostics {
            println!("    {} + {} iterations, converged: {}", d.upper_iterations, d.lower_iterations, d.converged);
        }
    }
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
