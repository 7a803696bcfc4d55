// Reconstruction from Gabor coefficients: canonical dual frame in general,
// the dual window when the lattice fits the torus.

use hamframe::frames::{box_lattice_system, dual_window, reconstruct_with_dual, FrameInverse};
use hamframe::grid::{make_grid, Signal};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_signal(grid: hamframe::grid::GridSpec, rng: &mut ChaCha8Rng) -> Signal {
    Signal::from_fn(grid, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn run_example() -> hamframe::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let grid = make_grid(128, None)?;
    let sys = box_lattice_system(&grid, 0.7, 0.7)?;
    let inv = FrameInverse::new(&sys)?;
    let f = random_signal(grid, &mut rng);
    let back = inv.reconstruct(&f)?;
    println!("alpha = beta = 0.7 on N = 128: relative error {:.3e}", back.sub(&f)?.norm() / f.norm());
    let c = inv.coefficients(&f)?;
    println!("{} coefficients, ||c|| = {:.6}", c.len(), c.l2_norm());

    // alpha = beta = 0.5 divides both periods of the N = 256, L = 16 torus
    let grid = make_grid(256, Some(16.0))?;
    let sys = box_lattice_system(&grid, 0.5, 0.5)?;
    let d = dual_window(&sys)?;
    let f = random_signal(grid, &mut rng);
    let back = reconstruct_with_dual(&sys, &d, &f)?;
    println!("dual window on the commensurate lattice: relative error {:.3e}", back.sub(&f)?.norm() / f.norm());
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
