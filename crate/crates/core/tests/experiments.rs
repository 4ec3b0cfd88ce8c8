use std::path::PathBuf;

use spectral_transfer::experiments::{run_table, stability_report, Experiment, ExperimentConfig, NetworkFile};
use spectral_transfer::stability::FormulaTag;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn small(experiment: Experiment) -> ExperimentConfig {
    let text = match experiment {
        Experiment::ExpScaling => r#"{"inv_delta_a": [10, 100]}"#,
        Experiment::ExpCollapse | Experiment::ExpNegative => r#"{"deltas": [0.1, 0.01]}"#,
        Experiment::ExpCircle => r#"{"sizes": [5, 7]}"#,
        Experiment::ExpMolecule => r#"{"t": [0.0, 0.5], "molecule": {"inputs": 5, "hidden_channels": 4}}"#,
        Experiment::StabilityReport => r#"{"network": "demo_network.json"}"#,
    };
    let mut c = ExperimentConfig::from_json_str(text).unwrap();
    c.base_dir = Some(configs());
    c
}

#[test]
fn tables_carry_their_schema_and_columns() {
    for e in Experiment::ALL {
        let table = run_table(e, &small(e)).unwrap();
        assert_eq!(table.experiment, e.name());
        assert_eq!(table.schema, format!("{}/v1", e.name()));
        assert_eq!(table.columns, e.columns());
        assert!(!table.rows.is_empty());
        assert!(table.rows.iter().all(|r| r.len() == table.columns.len() && r.iter().all(|x| x.is_finite())));
        let first = table.column(&table.columns[0]).unwrap();
        assert!(first.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn runs_are_deterministic() {
    for e in [Experiment::ExpMolecule, Experiment::ExpCollapse] {
        let a = serde_json::to_string(&run_table(e, &small(e)).unwrap()).unwrap();
        let b = serde_json::to_string(&run_table(e, &small(e)).unwrap()).unwrap();
        assert_eq!(a, b);
    }
    let mut c = small(Experiment::StabilityReport);
    c.empirical = true;
    c.samples = Some(50);
    let a = serde_json::to_string(&stability_report(&c).unwrap()).unwrap();
    assert_eq!(a, serde_json::to_string(&stability_report(&c).unwrap()).unwrap());
}

#[test]
fn experiment_names_parse() {
    for e in Experiment::ALL {
        assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
    }
    assert!("exp-unknown".parse::<Experiment>().is_err());
}

#[test]
fn unknown_config_fields_are_rejected() {
    let err = ExperimentConfig::from_json_str(r#"{"seeed": 3}"#).unwrap_err();
    assert!(err.to_string().contains("seeed"), "{err}");
    assert!(ExperimentConfig::from_json_str(r#"{"molecule": {"atoms": 3}}"#).is_err());
}

#[test]
fn bad_grids_are_config_errors() {
    let empty = ExperimentConfig::from_json_str(r#"{"deltas": []}"#).unwrap();
    let err = run_table(Experiment::ExpCollapse, &empty).unwrap_err();
    assert!(!err.is_numerical());
    let even = ExperimentConfig::from_json_str(r#"{"sizes": [5, 8]}"#).unwrap();
    let err = run_table(Experiment::ExpCircle, &even).unwrap_err();
    assert!(err.to_string().contains('8'), "{err}");
    assert!(!err.is_numerical());
    let missing = ExperimentConfig::default();
    assert!(stability_report(&missing).is_err());
}

#[test]
fn demo_network_report_dominates_empirical_slope() {
    let mut c = small(Experiment::StabilityReport);
    c.empirical = true;
    c.seed = Some(3);
    let report = stability_report(&c).unwrap();
    assert_eq!(report.tag, FormulaTag::Signal);
    assert_eq!(report.depth, 2);
    assert_eq!(report.seeds, vec![3]);
    let empirical = report.empirical.unwrap();
    assert!(empirical > 0.0 && empirical <= report.bound, "{empirical} > {}", report.bound);
    assert_eq!(report.bound, report.recompute());
}

#[test]
fn network_files_name_the_failing_layer() {
    let text = r#"{"layers": [
        {"graph": {"n": 2, "mu": [1, 1], "edges": [[0, 1, 1]]}, "operator": "laplacian",
         "filters": {"grid": [[{"kind": "entire", "coeffs": [1]}]]}},
        {"graph": {"n": 2, "mu": [1, 1], "edges": [[0, 1, 1]]}, "operator": "laplacian",
         "filters": {"grid": [[{"kind": "entire", "coeffs": [1]}, {"kind": "entire", "coeffs": [1]}]]}}
    ]}"#;
    let err = NetworkFile::from_json_str(text).unwrap().build(None).unwrap_err();
    assert!(err.to_string().contains('1'), "{err}");
    assert!(NetworkFile::from_json_str(r#"{"layers": [], "extra": 1}"#).is_err());
}
