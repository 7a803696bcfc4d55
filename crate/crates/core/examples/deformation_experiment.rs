// The headline experiment on a small grid: frame bounds of
// G(e^{-itH} g, Phi_t Lambda) over a symmetric time grid.

use hamframe::experiment::{parse_config, records_to_string, report_t0, run_deformation_experiment, Summary};

const CONFIG: &str = r#"{
  "grid": {"n": 64},
  "lattice": {"kind": "rect", "alpha": 0.7071067811865476, "beta": 0.7071067811865476, "extent": "cover"},
  "hamiltonian": {"m": [1.0, 0.0, 1.0], "sigma": "0.1*cos(x)"},
  "times": {"t_max": 0.4, "count": 9},
  "output": {"number_format": "shortest"}
}"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = parse_config(CONFIG)?;
    let records = run_deformation_experiment(&cfg)?;
    for r in &records {
        println!(
            "t = {:+.2}  A = {:.5}  B = {:.5}  B/A = {:7.3}  l1 = {:.3e}  drift = {:.4}  {}",
            r.t,
            r.a,
            r.b,
            r.condition,
            r.l1_defect,
            r.m1_drift,
            r.status.label()
        );
    }
    let t0 = report_t0(&records, cfg.analysis.threshold)?;
    println!("t0 = {t0} at threshold {}", cfg.analysis.threshold);

    let summary = Summary::new(&cfg, &records, Some(t0), records[0].lipschitz_l, None, 0);
    if let Some(u) = &summary.uniform_bounds {
        println!("uniform bounds over the grid: [{:.5}, {:.5}]", u.min_a, u.max_b);
    }
    let csv = records_to_string(&records, cfg.output.number_format)?;
    println!("{}", csv.lines().next().unwrap_or_default());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
