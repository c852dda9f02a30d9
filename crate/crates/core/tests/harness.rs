use std::fs;
use std::path::Path;

use power_mixture::format::save_instance;
use power_mixture::harness::{
    print_summary, run_experiment, summarize, ExperimentConfig, Manifest, AGGREGATE_CSV_HEADER, AGGREGATE_FILE,
    MANIFEST_FILE, RUN_CSV_HEADER,
};
use power_mixture::{Error, FeatureMap, MixtureMdp, RewardTable};

fn config(text: &str, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_json(text).unwrap();
    cfg.output_dir = out.to_path_buf();
    cfg
}

fn column(path: &Path, idx: usize) -> Vec<f64> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.records().map(|r| r.unwrap()[idx].parse().unwrap()).collect()
}

const SMALL: &str = r#"{
    "instance": { "kind": "random", "seed": 1, "num_states": 3, "num_actions": 2, "dim": 2, "horizon": 2 },
    "episodes": 25,
    "variants": ["power-bernstein", "uniform-policy"],
    "adversary": { "kind": "seeded-iid-uniform" },
    "seeds": [4, 7]
}"#;

#[test]
fn two_by_two_writes_six_files() {
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_experiment(&config(SMALL, dir.path())).unwrap();
    assert_eq!(outcome.failed_runs, 0);
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "aggregate.csv",
            "manifest.json",
            "run_power-bernstein_seed4.csv",
            "run_power-bernstein_seed7.csv",
            "run_uniform-policy_seed4.csv",
            "run_uniform-policy_seed7.csv",
        ]
    );
    let run = fs::read_to_string(dir.path().join("run_power-bernstein_seed4.csv")).unwrap();
    assert_eq!(run.lines().next(), Some(RUN_CSV_HEADER));
    assert_eq!(run.lines().count(), 26);
    let agg = fs::read_to_string(dir.path().join(AGGREGATE_FILE)).unwrap();
    assert_eq!(agg.lines().next(), Some(AGGREGATE_CSV_HEADER));

    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest.runs.len(), 4);
    assert_eq!(manifest.checksums.len(), 5);
    assert!(manifest.config.alpha > 0.0);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_experiment(&config(SMALL, a.path())).unwrap();
    run_experiment(&config(SMALL, b.path())).unwrap();
    for name in ["run_power-bernstein_seed4.csv", "run_uniform-policy_seed7.csv", AGGREGATE_FILE] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
}

#[test]
fn aggregate_is_the_mean_over_seeds() {
    let dir = tempfile::tempdir().unwrap();
    run_experiment(&config(SMALL, dir.path())).unwrap();
    let s4 = column(&dir.path().join("run_power-bernstein_seed4.csv"), 5);
    let s7 = column(&dir.path().join("run_power-bernstein_seed7.csv"), 5);
    let mut reader = csv::Reader::from_path(dir.path().join(AGGREGATE_FILE)).unwrap();
    let rows: Vec<_> = reader
        .records()
        .map(|r| r.unwrap())
        .filter(|r| &r[1] == "power-bernstein")
        .collect();
    assert_eq!(rows.len(), 25);
    for (k, row) in rows.iter().enumerate() {
        let mean: f64 = row[3].parse().unwrap();
        let sd: f64 = row[4].parse().unwrap();
        let want = 0.5 * (s4[k] + s7[k]);
        assert!((mean - want).abs() < 1e-9);
        let want_sd = ((s4[k] - want).powi(2) + (s7[k] - want).powi(2)).sqrt();
        assert!((sd - want_sd).abs() < 1e-9);
    }
}

fn bandit_file(dir: &Path) -> std::path::PathBuf {
    let fm = FeatureMap::new(1, 2, 1, vec![1.0, 1.0]).unwrap();
    let mdp = MixtureMdp::new(fm, vec![vec![1.0]], 1.0, 0).unwrap();
    let r = RewardTable::new(1, 1, 2, vec![0.2, 0.7]).unwrap();
    let path = dir.join("bandit.json");
    save_instance(&path, &mdp, Some(&r)).unwrap();
    path
}

#[test]
fn uniform_agent_on_a_bandit() {
    let dir = tempfile::tempdir().unwrap();
    let path = bandit_file(dir.path());
    let text = format!(
        r#"{{ "instance": {{ "kind": "file", "path": {:?} }}, "episodes": 200, "variants": ["uniform-policy"] }}"#,
        path.to_str().unwrap()
    );
    let out = dir.path().join("out");
    run_experiment(&config(&text, &out)).unwrap();
    let rows = summarize(&out).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].final_sd, 0.0);
    assert!((rows[0].final_mean - 50.0).abs() < 1e-9);
    assert!((rows[0].growth_ratio.unwrap() - 2.0).abs() < 0.05);
    let table = print_summary(&out).unwrap();
    assert!(table.contains("uniform-policy"));
    assert!(table.contains("2.000"));
}

#[test]
fn config_errors_name_the_field() {
    let path_of = |text: &str| match ExperimentConfig::from_json(text).and_then(|c| c.resolve().map(|_| ())) {
        Err(Error::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    };
    let base = r#""instance": { "kind": "random", "num_states": 3, "num_actions": 2, "dim": 2, "horizon": 2 }"#;
    assert_eq!(path_of(&format!("{{ {base}, \"episodes\": 0 }}")), "episodes");
    assert_eq!(path_of(&format!("{{ {base}, \"episodes\": 5, \"seeds\": [1, 1] }}")), "seeds");
    assert_eq!(path_of(&format!("{{ {base}, \"episodes\": 5, \"delta\": 1.5 }}")), "delta");
    assert_eq!(path_of(&format!("{{ {base}, \"episodes\": 5, \"variants\": [\"greedy\"] }}")), "variants[0]");
    assert_eq!(path_of(&format!("{{ {base}, \"episodes\": 5, \"colour\": 1 }}")), "colour");
    assert_eq!(
        path_of(r#"{ "instance": { "kind": "hard", "dim": 3, "horizon": 3 }, "episodes": 5 }"#),
        "instance"
    );
    assert_eq!(
        path_of(r#"{ "instance": { "kind": "random", "num_states": 2, "num_actions": 2, "dim": 3, "horizon": 2 }, "episodes": 5 }"#),
        "instance"
    );
}

#[test]
fn missing_experiment_directory_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let err = print_summary(dir.path().join("nope")).unwrap_err();
    assert!(err.to_string().contains("aggregate.csv"));
    fs::write(dir.path().join(AGGREGATE_FILE), "a,b\n1,2\n").unwrap();
    assert!(matches!(summarize(dir.path()), Err(Error::Parse { .. })));
}
