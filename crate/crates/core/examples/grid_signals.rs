// Periodic grid, Gaussian window, DFT round trip and the STFT isometry.

use hamframe::grid::{dft, gaussian_window, idft, m1_norm, make_grid, stft_full, Signal};
use num_complex::Complex64;

pub fn run_example() -> hamframe::Result<()> {
    let grid = make_grid(256, Some(16.0))?;
    println!("N = {}, L = {}, dx = {}, dxi = {}", grid.len(), grid.period(), grid.dx(), grid.dxi());

    let phi = gaussian_window(&grid);
    println!("||phi||_2 = {:.15}", phi.norm());
    println!("M1 proxy of phi = {:.6} (continuum value 2)", m1_norm(&phi));

    let f = Signal::from_fn(grid, |x| Complex64::new((-x * x).exp(), 0.3 * x * (-x * x / 2.0).exp()));
    let back = idft(&dft(&f));
    println!("DFT round trip max error = {:.3e}", back.max_abs_diff(&f));

    let v = stft_full(&f, &phi)?;
    println!(
        "||V_phi f||^2 = {:.12}, ||f||^2 ||phi||^2 = {:.12}",
        v.energy(),
        f.norm_sqr() * phi.norm_sqr()
    );
    println!("|V_phi phi(1, 0)| = {:.9}, e^(-pi/2) = {:.9}", stft_full(&phi, &phi)?.at(1.0, 0.0).norm(), (-std::f64::consts::FRAC_PI_2).exp());
    Ok(())
}

fn main() -> hamframe::Result<()> {
    run_example()
}
