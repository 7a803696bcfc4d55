#[allow(dead_code)]
mod grid_signals {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/grid_signals.rs"));
}

#[test]
fn grid_signals_runs() {
    grid_signals::run_example().expect("grid signals example should run");
}

#[allow(dead_code)]
mod symbol_parse {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/symbol_parse.rs"));
}

#[test]
fn symbol_parse_runs() {
    symbol_parse::run_example().expect("symbol parse example should run");
}

#[allow(dead_code)]
mod hamiltonian_flow {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/hamiltonian_flow.rs"));
}

#[test]
fn hamiltonian_flow_runs() {
    hamiltonian_flow::run_example().expect("hamiltonian flow example should run");
}

#[allow(dead_code)]
mod time_frequency_shifts {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/time_frequency_shifts.rs"));
}

#[test]
fn time_frequency_shifts_runs() {
    time_frequency_shifts::run_example().expect("time frequency shifts example should run");
}

#[allow(dead_code)]
mod weyl_quantization {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/weyl_quantization.rs"));
}

#[test]
fn weyl_quantization_runs() {
    weyl_quantization::run_example().expect("weyl quantization example should run");
}

#[allow(dead_code)]
mod split_step {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/split_step.rs"));
}

#[test]
fn split_step_runs() {
    split_step::run_example().expect("split step example should run");
}

#[allow(dead_code)]
mod symplectic_covariance {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/symplectic_covariance.rs"));
}

#[test]
fn symplectic_covariance_runs() {
    symplectic_covariance::run_example().expect("symplectic covariance example should run");
}

#[allow(dead_code)]
mod frame_bounds {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/frame_bounds.rs"));
}

#[test]
fn frame_bounds_runs() {
    frame_bounds::run_example().expect("frame bounds example should run");
}

#[allow(dead_code)]
mod dual_reconstruction {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/dual_reconstruction.rs"));
}

#[test]
fn dual_reconstruction_runs() {
    dual_reconstruction::run_example().expect("dual reconstruction example should run");
}

#[allow(dead_code)]
mod perturbation_bounds {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/perturbation_bounds.rs"));
}

#[test]
fn perturbation_bounds_runs() {
    perturbation_bounds::run_example().expect("perturbation bounds example should run");
}

#[allow(dead_code)]
mod deformation_metrics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/deformation_metrics.rs"));
}

#[test]
fn deformation_metrics_runs() {
    deformation_metrics::run_example().expect("deformation metrics example should run");
}

#[allow(dead_code)]
mod deformation_experiment {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/deformation_experiment.rs"));
}

#[test]
fn deformation_experiment_runs() {
    deformation_experiment::run_example().expect("deformation experiment example should run");
}

#[allow(dead_code)]
mod config_validation {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/config_validation.rs"));
}

#[test]
fn config_validation_runs() {
    config_validation::run_example().expect("config validation example should run");
}

#[allow(dead_code)]
mod cli_tour {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cli_tour.rs"));
}

#[test]
fn cli_tour_runs() {
    cli_tour::run_example().expect("cli tour example should run");
}
