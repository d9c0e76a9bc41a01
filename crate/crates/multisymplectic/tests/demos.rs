//! Every built-in model's expected-fact table passes end to end — the fact
//! tables are the regression suite.

use multisymplectic::models;
use multisymplectic::system::RunConfig;

#[test]
fn every_model_fact_table_passes() {
    for &name in models::model_names() {
        let model = models::by_name(name).unwrap();
        // the heavyweight models get fewer sample points, same seed
        let points = match name {
            "em" | "metric-affine" => 3,
            _ => 8,
        };
        let cfg = RunConfig {
            points,
            ..RunConfig::default()
        };
        let verdicts = model.run_facts(&cfg, None);
        assert!(!verdicts.is_empty());
        for v in &verdicts {
            assert!(
                v.pass,
                "model `{name}` fact `{}` failed (residual {:.3e}, witness {:?})",
                v.check, v.max_residual, v.witness
            );
        }
        println!("model {name}: {} facts pass", verdicts.len());
    }
}

#[test]
fn fact_tables_are_deterministic_across_worker_counts() {
    let model = models::by_name("r8").unwrap();
    let serial = RunConfig::default();
    let parallel = RunConfig {
        jobs: 4,
        ..RunConfig::default()
    };
    let a: Vec<String> = model
        .run_facts(&serial, None)
        .iter()
        .map(|v| serde_json::to_string(v).unwrap())
        .collect();
    let b: Vec<String> = model
        .run_facts(&parallel, None)
        .iter()
        .map(|v| serde_json::to_string(v).unwrap())
        .collect();
    assert_eq!(a, b);
}

#[test]
fn unknown_model_name_errors() {
    assert!(models::by_name("nope").is_err());
}
