use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use timetomo::harness::output::SWEEP_CSV_HEADER;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_timetomo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const QUBIT_CONFIG: &str = r#"
mode = "qubit-pure"
sigma_list = [0.0, 0.25]
photon_list = [10, 1000]
seed = 11
threads = 2
state_log = true

[samples]
pure_grid = [4, 4]

[estimator]
restarts = 3
"#;

fn parse_rows(csv: &str) -> Vec<Vec<String>> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
    lines
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn qubit_sweep_cli_writes_complete_deterministic_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "q.toml", QUBIT_CONFIG);
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for out in [&out_a, &out_b] {
        let o = cli(&[
            "qubit-sweep",
            "--config",
            &cfg,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let csv_a = fs::read_to_string(out_a.join("qubit-sweep.csv")).unwrap();
    let csv_b = fs::read_to_string(out_b.join("qubit-sweep.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    assert_eq!(
        fs::read(out_a.join("states.jsonl")).unwrap(),
        fs::read(out_b.join("states.jsonl")).unwrap()
    );

    let rows = parse_rows(&csv_a);
    let mut cells: BTreeMap<(String, String, String), usize> = BTreeMap::new();
    for r in &rows {
        assert_eq!(r.len(), 7);
        assert_eq!(r[6], "16");
        *cells
            .entry((r[0].clone(), r[1].clone(), r[2].clone()))
            .or_default() += 1;
    }
    for s in ["0", "0.25"] {
        for n in ["10", "1000"] {
            let key = (s.to_owned(), n.to_owned(), "fidelity".to_owned());
            assert_eq!(cells.get(&key), Some(&1), "{key:?}");
        }
    }

    let log = fs::read_to_string(out_a.join("states.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 4 * 16);
    let first: serde_json::Value = serde_json::from_str(log.lines().next().unwrap()).unwrap();
    assert!(first["metrics"]["fidelity"].is_number());

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["command"], "qubit-sweep");
    assert_eq!(manifest["config"]["mode"], "qubit-pure");
    assert_eq!(manifest["samples"]["pure_grid"], serde_json::json!([4, 4]));
    assert!(manifest["version"].is_string());
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "q.toml", QUBIT_CONFIG);
    let run = |seed: &str, dir: &str| {
        let out = tmp.path().join(dir);
        let o = cli(&[
            "qubit-sweep",
            "--config",
            &cfg,
            "--seed",
            seed,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        fs::read_to_string(out.join("qubit-sweep.csv")).unwrap()
    };
    let a = run("11", "a");
    let b = run("12", "b");
    assert_eq!(a, run("11", "c"));
    assert_ne!(a, b);
}

#[test]
fn unknown_config_keys_fail_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.toml",
        "mode = \"entangled\"\nsigma_list = [0.0]\nphoton_list = [10]\njitter = 0.1\n",
    );
    let o = cli(&[
        "entangled-sweep",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("jitter"));
}

#[test]
fn subcommand_rejects_foreign_mode() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "q.toml", QUBIT_CONFIG);
    let o = cli(&[
        "ortho-sweep",
        "--config",
        &cfg,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    assert!(!tmp.path().join("manifest.json").exists());
}

#[test]
fn ortho_and_entangled_sweeps_from_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let ortho = write_config(
        tmp.path(),
        "o.toml",
        "mode = \"qubit-orthogonal-pairs\"\nsigma_list = [0.0, 0.75]\nphoton_list = [1000]\n[samples]\npure_grid = [3, 4]\n",
    );
    let out = tmp.path().join("o");
    let o = cli(&[
        "ortho-sweep",
        "--config",
        &ortho,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = parse_rows(&fs::read_to_string(out.join("ortho-sweep.csv")).unwrap());
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[2] == "trace_distance" && r[6] == "6"));
    let d0: f64 = rows[0][3].parse().unwrap();
    let d75: f64 = rows[1][3].parse().unwrap();
    assert!(d0 > 0.97 && d75 < 0.1, "{d0} {d75}");

    let ent = write_config(
        tmp.path(),
        "e.toml",
        "mode = \"entangled\"\nsigma_list = [0.3]\nphoton_list = [100]\ndump_counts = true\n[samples]\nbell_count = 3\n",
    );
    let out = tmp.path().join("e");
    let o = cli(&[
        "entangled-sweep",
        "--config",
        &ent,
        "--out",
        out.to_str().unwrap(),
        "--paper-scale",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = parse_rows(&fs::read_to_string(out.join("entangled-sweep.csv")).unwrap());
    let metrics: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(metrics, ["concurrence", "fidelity", "chsh_guarantee"]);
    assert_eq!(rows[2][3], "0");
    let counts = fs::read_to_string(out.join("counts_sigma_0.3_n_100.csv")).unwrap();
    assert!(counts.starts_with("state_id,t_i_over_T,t_j_over_T,expected,measured\n"));
    assert_eq!(counts.lines().count(), 1 + 3 * 36);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["paper_scale"], true);
    // explicit sample sizes win over the profile
    assert_eq!(manifest["samples"]["bell_count"], 3);
    assert_eq!(
        manifest["samples"]["mixed_grid"],
        serde_json::json!([21, 21, 20])
    );
}

#[test]
fn trajectory_cli_default_and_custom() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t");
    let o = cli(&["trajectory", "--out", out.to_str().unwrap(), "--seed", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("trajectory_H_sigma_0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t_over_T,x,y,z,purity"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 500);
    assert_eq!(rows[0], "0,0,0,1,1");
    assert!(rows[499].starts_with("2,"));

    let cfg = write_config(
        tmp.path(),
        "t.toml",
        "operator = \"R\"\nsigma_list = [0.1, 0.75]\npoints = 50\n",
    );
    let out = tmp.path().join("r");
    let o = cli(&[
        "trajectory",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    for name in ["trajectory_R_sigma_0.1.csv", "trajectory_R_sigma_0.75.csv"] {
        assert_eq!(
            fs::read_to_string(out.join(name)).unwrap().lines().count(),
            51
        );
    }
    let max_radius = |name: &str| {
        fs::read_to_string(out.join(name))
            .unwrap()
            .lines()
            .skip(1)
            .map(|line| {
                let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
                (v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt()
            })
            .fold(0.0, f64::max)
    };
    let light = max_radius("trajectory_R_sigma_0.1.csv");
    let heavy = max_radius("trajectory_R_sigma_0.75.csv");
    assert!(light < 1.0 && heavy < 0.5 * light, "{light} {heavy}");
}

#[test]
fn library_and_cli_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = write_config(tmp.path(), "q.toml", QUBIT_CONFIG);
    let out = tmp.path().join("cli");
    assert!(cli(&[
        "qubit-sweep",
        "--config",
        &cfg_path,
        "--out",
        out.to_str().unwrap()
    ])
    .status
    .success());
    let cfg = timetomo::harness::ExperimentConfig::load(Path::new(&cfg_path)).unwrap();
    let report = timetomo::harness::run_qubit_sweep(&cfg).unwrap();
    assert_eq!(
        timetomo::harness::sweep_csv(&report.rows),
        fs::read_to_string(out.join("qubit-sweep.csv")).unwrap()
    );
}
