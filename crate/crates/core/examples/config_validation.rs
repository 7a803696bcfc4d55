// Loading experiment configs: defaults, syntax errors with locations and
// validation errors collected with field paths.

use hamframe::experiment::{load_config, parse_config};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/minimal.json");
    let cfg = load_config(shipped)?;
    println!(
        "minimal.json: N = {}, {} nodes, {} time slices, estimator {:?}",
        cfg.grid.n,
        cfg.nodes()?.len(),
        cfg.time_grid().len(),
        cfg.estimator.method
    );

    let typo = r#"{"grid": {"size": 64}, "lattice": {"kind": "rect", "alpha": 1, "beta": 1}, "times": {"t_max": 1, "count": 3}}"#;
    println!("unknown field -> {}", parse_config(typo).unwrap_err());

    let broken = r#"{
  "grid": {"n": 64},
  "lattice": {"kind": "rect", "alpha": 0, "beta": -1},
  "hamiltonian": {"sigma": "cos(x"},
  "times": {"t_max": 0.5, "count": 0}
}"#;
    let err = parse_config(broken).unwrap_err();
    println!("{err}");
    for issue in err.issues() {
        println!("  path = {}", issue.path);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
