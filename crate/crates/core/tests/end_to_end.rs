use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_4;
use std::path::Path;

use hamframe::deformation::{l1_defect, rel_separation, DeformationPair};
use hamframe::experiment::config::TimesConfig;
use hamframe::experiment::{
    evolution_cross_check, load_config, report_t0, run_deformation_experiment, static_frame_report, ExperimentConfig,
};
use hamframe::flow::{default_steps, flow_set, NodeSet};
use hamframe::hamiltonian::HamiltonianSpec;

fn config(name: &str) -> ExperimentConfig {
    load_config(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

#[test]
fn single_slice_reproduces_static_bounds() {
    for name in ["baseline.json", "minimal.json"] {
        let mut cfg = config(name);
        cfg.times = TimesConfig { t_max: 0.5, count: 1, symmetric: true };
        let records = run_deformation_experiment(&cfg).unwrap();
        assert_eq!(records.len(), 1);
        let s = static_frame_report(&cfg).unwrap();
        assert!((records[0].a - s.a).abs() <= 1e-12 * s.a, "{name}");
        assert!((records[0].b - s.b).abs() <= 1e-12 * s.b, "{name}");
        assert_eq!(records[0].l1_defect, 0.0);
    }
}

#[test]
fn harmonic_oscillator_keeps_half_the_lower_bound_to_quarter_period() {
    let mut cfg = config("quadratic_control.json");
    cfg.times = TimesConfig { t_max: FRAC_PI_4, count: 9, symmetric: true };
    let records = run_deformation_experiment(&cfg).unwrap();
    let a0 = records.iter().find(|r| r.t == 0.0).unwrap().a;
    for r in &records {
        assert!(r.a >= 0.5 * a0, "t = {}: A = {} vs A(0) = {a0}", r.t, r.a);
    }
    assert_eq!(report_t0(&records, 0.5).unwrap(), FRAC_PI_4);
}

#[test]
fn evolution_cross_check_at_n512() {
    let mut cfg = config("quadratic_control.json");
    cfg.grid.n = 512;
    cfg.times = TimesConfig { t_max: 0.5, count: 3, symmetric: true };
    let err = evolution_cross_check(&cfg, 0, 5).unwrap();
    assert!(err <= 5e-3, "{err}");
}

#[test]
fn relative_separation_stays_bounded_along_the_flow() {
    for name in ["baseline.json", "minimal.json", "split_baseline.json"] {
        let cfg = config(name);
        let spec = cfg.hamiltonian_spec().unwrap();
        let nodes = cfg.nodes().unwrap();
        let rel0 = rel_separation(&nodes);
        for t in [-0.2, -0.1, 0.05, 0.1, 0.2] {
            let moved = flow_set(&spec, &nodes, t, default_steps(t, 1000.0)).unwrap();
            assert!(rel_separation(&moved) <= rel0 + 4, "{name} t = {t}");
        }
    }
}

#[test]
fn harmonic_oscillator_lipschitz_defect_bound() {
    let ho = HamiltonianSpec::harmonic_oscillator();
    let base = NodeSet::rect_lattice(1.0, 1.0, [-2.0, 2.0], [-2.0, 2.0]).unwrap();
    let pair = DeformationPair::new(base.clone(), flow_set(&ho, &base, 0.1, 100).unwrap()).unwrap();
    let bound = 2.0 * 0.1 * (0.2f64).exp() * 2.0;
    assert!(l1_defect(&pair, 2.0).unwrap() <= bound);
}

fn keys(v: &serde_json::Value) -> BTreeSet<String> {
    v.as_object().map(|o| o.keys().cloned().collect()).unwrap_or_default()
}

#[test]
fn schema_matches_the_config_types() {
    let schema: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/schema.json")).unwrap(),
    )
    .unwrap();
    let echo = serde_json::to_value(config("baseline.json")).unwrap();
    assert_eq!(keys(&schema["properties"]), keys(&echo));
    for (section, value) in echo.as_object().unwrap() {
        if section == "lattice" {
            continue;
        }
        assert_eq!(keys(&schema["properties"][section]["properties"]), keys(value), "{section}");
    }
    let rect = &schema["properties"]["lattice"]["oneOf"][0]["properties"];
    assert_eq!(keys(rect), keys(&echo["lattice"]));
}
