use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use synthpop::data::{CodedTable, Schema};
use synthpop::eval::{empirical_joint, srmse, MetricsRow};
use synthpop::oracle::default_benchmark;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_synthpop"))
}

struct Run {
    ok: bool,
    stderr: String,
}

fn synthpop(sub: &str, config: &Path, extra: &[&str]) -> Run {
    let out = bin()
        .arg(sub)
        .arg("--config")
        .arg(config)
        .args(extra)
        .output()
        .expect("binary runs");
    Run {
        ok: out.status.success(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn write_config(dir: &Path, name: &str, value: Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    path
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref())
        .unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn csv_rows(path: impl AsRef<Path>) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn raw_csv(dir: &Path) -> PathBuf {
    let mut text = String::from("age,sex,mode,notes\n");
    for i in 0..60 {
        let notes = if i % 3 == 0 { "x" } else { "" };
        text.push_str(&format!(
            "{},{},{},{}\n",
            18 + (i * 7) % 60,
            ["f", "m"][i % 2],
            ["car", "bike", "bus"][i % 3],
            notes
        ));
    }
    let path = dir.join("raw.csv");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn preprocess_drops_sparse_column_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    raw_csv(tmp.path());
    let config = write_config(
        tmp.path(),
        "run.json",
        json!({"seed": 3, "preprocess": {"input": "raw.csv", "numerical": ["age"]}}),
    );
    let first = synthpop(
        "preprocess",
        &config,
        &["--out", tmp.path().join("a").to_str().unwrap()],
    );
    assert!(first.ok, "{}", first.stderr);
    assert!(first.stderr.contains("dropped column \"notes\""));
    let second = synthpop(
        "preprocess",
        &config,
        &["--out", tmp.path().join("b").to_str().unwrap()],
    );
    assert!(second.ok);
    for f in [
        "schema.json",
        "train.csv",
        "validation.csv",
        "test.csv",
        "preprocess_report.json",
    ] {
        assert_eq!(
            read(tmp.path().join("a").join(f)),
            read(tmp.path().join("b").join(f)),
            "{f}"
        );
    }

    let schema = Schema::load(tmp.path().join("a/schema.json")).unwrap();
    assert_eq!(schema.names(), vec!["age", "sex", "mode"]);
    let sizes: Vec<usize> = ["train", "validation", "test"]
        .iter()
        .map(|s| {
            CodedTable::load_csv(tmp.path().join(format!("a/{s}.csv")), &schema)
                .unwrap()
                .n_rows()
        })
        .collect();
    assert_eq!(sizes, vec![24, 24, 12]);
    let report: Value =
        serde_json::from_str(&read(tmp.path().join("a/preprocess_report.json"))).unwrap();
    assert_eq!(report["dropped_columns"], json!(["notes"]));

    let other_seed = synthpop(
        "preprocess",
        &config,
        &[
            "--seed",
            "4",
            "--out",
            tmp.path().join("c").to_str().unwrap(),
        ],
    );
    assert!(other_seed.ok);
    assert_ne!(
        read(tmp.path().join("a/train.csv")),
        read(tmp.path().join("c/train.csv"))
    );
}

#[test]
fn invalid_config_has_no_side_effects() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("never");
    let config = write_config(
        tmp.path(),
        "bad.json",
        json!({"generate": {"model_dir": "missing", "n": 10}}),
    );
    let run = synthpop("generate", &config, &["--out", out.to_str().unwrap()]);
    assert!(!run.ok);
    assert!(run.stderr.contains("does not exist"));
    assert!(!out.exists());

    let config = write_config(tmp.path(), "typo.json", json!({"sed": 1}));
    assert!(!synthpop("synth-data", &config, &["--out", out.to_str().unwrap()]).ok);
    assert!(!out.exists());
}

#[test]
fn failure_after_validation_removes_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    // the schema names a variable the table header lacks, so loading fails
    // after the config itself validated
    let schema = Schema::from_cardinalities(&[2, 2]).unwrap();
    schema.save(tmp.path().join("schema.json")).unwrap();
    std::fs::write(tmp.path().join("train.csv"), "x0,y\n0,1\n").unwrap();
    let out = tmp.path().join("out");
    let config = write_config(
        tmp.path(),
        "run.json",
        json!({"train": {"model": "uniform", "schema": "schema.json", "train": "train.csv"}}),
    );
    let run = synthpop("train", &config, &["--out", out.to_str().unwrap()]);
    assert!(!run.ok);
    assert!(!out.exists());
}

/// synth-data with splits, returning the data directory.
fn oracle_data(dir: &Path, n: usize) -> PathBuf {
    let config = write_config(
        dir,
        "data.json",
        json!({"seed": 11, "out": "data", "synth_data": {"n": n, "split": true}}),
    );
    let run = synthpop("synth-data", &config, &[]);
    assert!(run.ok, "{}", run.stderr);
    dir.join("data")
}

#[test]
fn synth_data_outputs_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let data = oracle_data(tmp.path(), 3000);
    let summary: Value = serde_json::from_str(&read(data.join("summary.json"))).unwrap();
    assert_eq!(summary["n_cells"], json!(7680));
    assert_eq!(summary["spec_hash"], json!(default_benchmark().hash()));

    let spec = default_benchmark();
    let population = CodedTable::load_csv(data.join("population.csv"), spec.schema()).unwrap();
    assert_eq!(population.n_rows(), 3000);
    assert!(population.rows().all(|r| !spec.is_zero_cell(r).unwrap()));

    let joint = csv_rows(data.join("exact_joint.csv"));
    let total: f64 = joint.iter().map(|r| r[5].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(
        joint.len() + summary["n_zero_cells"].as_u64().unwrap() as usize,
        7680
    );

    let again = tmp.path().join("again");
    std::fs::create_dir(&again).unwrap();
    let data2 = oracle_data(&again, 3000);
    for f in [
        "population.csv",
        "train.csv",
        "test.csv",
        "exact_joint.csv",
        "spec.json",
    ] {
        assert_eq!(read(data.join(f)), read(data2.join(f)), "{f}");
    }
}

#[test]
fn train_generate_evaluate_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    oracle_data(dir, 4000);
    let small = json!({"epochs": 4, "hidden_encoder": [16], "hidden_decoder": [16], "hidden_generator": [16], "hidden_critic": [16]});
    for model in ["vae", "wgan", "marginal", "uniform"] {
        let config = write_config(
            dir,
            &format!("train_{model}.json"),
            json!({"seed": 5, "out": model, "train": {
                "model": model, "schema": "data/schema.json", "train": "data/train.csv", "config": small
            }}),
        );
        let run = synthpop("train", &config, &[]);
        assert!(run.ok, "{model}: {}", run.stderr);
        let log = csv_rows(dir.join(model).join("training_log.csv"));
        let expected = if matches!(model, "vae" | "wgan") {
            4
        } else {
            0
        };
        assert_eq!(log.len(), expected, "{model}");
    }

    let search = write_config(
        dir,
        "search.json",
        json!({"seed": 5, "out": "searched", "train": {
            "model": "vae", "schema": "data/schema.json", "train": "data/train.csv",
            "validation": "data/validation.csv", "config": {"epochs": 2},
            "search": {"trials": 3, "space": {"hidden_widths": [8, 16], "hidden_depths": [1]}}
        }}),
    );
    assert!(synthpop("train", &search, &[]).ok);
    let trials = csv_rows(dir.join("searched/trials.csv"));
    assert_eq!(trials.len(), 3);
    let scores: Vec<f64> = trials.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] <= w[1]));

    let generate = write_config(
        dir,
        "generate.json",
        json!({"seed": 9, "generate": {"model_dir": "vae/model", "n": 1234}}),
    );
    for out in ["g1", "g2"] {
        assert!(
            synthpop(
                "generate",
                &generate,
                &["--out", dir.join(out).to_str().unwrap()]
            )
            .ok
        );
    }
    assert!(
        synthpop(
            "generate",
            &generate,
            &["--seed", "10", "--out", dir.join("g3").to_str().unwrap()]
        )
        .ok
    );
    let spec = default_benchmark();
    let g1 = CodedTable::load_csv(dir.join("g1/generated.csv"), spec.schema()).unwrap();
    assert_eq!(g1.n_rows(), 1234);
    assert_eq!(
        read(dir.join("g1/generated.csv")),
        read(dir.join("g2/generated.csv"))
    );
    assert_ne!(
        read(dir.join("g1/generated.csv")),
        read(dir.join("g3/generated.csv"))
    );

    // evaluating the test table against itself gives SRMSE 0
    let evaluate = write_config(
        dir,
        "evaluate.json",
        json!({"out": "eval", "evaluate": {
            "schema": "data/schema.json", "train": "data/train.csv", "test": "data/test.csv",
            "generated": [{"name": "self", "path": "data/test.csv"}, {"name": "vae", "path": "g1/generated.csv"}],
            "subsets": [["x0", "x1"], ["x2", "x3", "x4"]]
        }}),
    );
    let run = synthpop("evaluate", &evaluate, &[]);
    assert!(run.ok, "{}", run.stderr);
    let metrics = csv_rows(dir.join("eval/metrics.csv"));
    assert_eq!(metrics.len(), 4);
    for row in metrics.iter().filter(|r| r[1] == "self") {
        assert_eq!(row[3].parse::<f64>().unwrap(), 0.0);
    }
    let train = CodedTable::load_csv(dir.join("data/train.csv"), spec.schema()).unwrap();
    let test = CodedTable::load_csv(dir.join("data/test.csv"), spec.schema()).unwrap();
    let direct = MetricsRow::compute("vae", &train, &test, &g1, &["x2", "x3", "x4"]).unwrap();
    let from_cli = metrics
        .iter()
        .find(|r| r[1] == "vae" && r[0] == "x2|x3|x4")
        .unwrap();
    assert_eq!(from_cli[3].parse::<f64>().unwrap(), direct.srmse);
    assert_eq!(
        direct.srmse,
        srmse(
            &empirical_joint(&g1, &["x2", "x3", "x4"]).unwrap(),
            &empirical_joint(&test, &["x2", "x3", "x4"]).unwrap()
        )
        .unwrap()
    );
    let svg = read(dir.join("eval/scatter/vae_001.svg"));
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("SRMSE = ") && svg.contains("stroke-dasharray"));

    let sweep = |log_scale: bool, out: &str| {
        write_config(
            dir,
            &format!("{out}.json"),
            json!({"seed": 2, "out": out, "sweep": {
                "schema": "data/schema.json", "train": "data/train.csv", "test": "data/test.csv",
                "models": [{"name": "wgan", "path": "wgan/model"}, {"name": "vae", "path": "vae/model"},
                           {"name": "uniform", "path": "uniform/model"}],
                "ladder": [["x0", "x1", "x2", "x3", "x4"], ["x0", "x1"], ["x0", "x1", "x2"]],
                "n": 30000, "step": 2500, "log_scale": log_scale
            }}),
        )
    };
    assert!(synthpop("sweep", &sweep(true, "sweep_log"), &[]).ok);
    assert!(synthpop("sweep", &sweep(false, "sweep_lin"), &[]).ok);
    let table = csv_rows(dir.join("sweep_log/ratio_table.csv"));
    assert_eq!(table.len(), 9);
    let cells: Vec<u64> = table.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(cells.windows(2).all(|w| w[0] <= w[1]));
    for row in &table {
        let base = table
            .iter()
            .find(|r| r[0] == row[0] && r[2] == "wgan")
            .unwrap();
        match (row[3].parse::<f64>(), base[3].parse::<f64>()) {
            (Ok(r), Ok(b)) if b > 0.0 => {
                let pct: f64 = row[4].parse().unwrap();
                assert!((pct - (r / b - 1.0) * 100.0).abs() < 1e-9);
            }
            _ => assert!(row[4].is_empty()),
        }
    }
    for model in ["wgan", "vae", "uniform"] {
        let curve = csv_rows(dir.join(format!("sweep_log/curves/{model}_000.csv")));
        assert_eq!(curve.len(), 12);
        let col = |i: usize| {
            curve
                .iter()
                .map(|r| r[i].parse::<u64>().unwrap())
                .collect::<Vec<_>>()
        };
        for i in 0..3 {
            assert!(
                col(i).windows(2).all(|w| w[0] <= w[1]),
                "{model} column {i}"
            );
        }
    }
    assert_ne!(
        read(dir.join("sweep_log/dimension_sweep.svg")),
        read(dir.join("sweep_lin/dimension_sweep.svg"))
    );
    assert_eq!(
        read(dir.join("sweep_log/dimension_sweep.csv")),
        read(dir.join("sweep_lin/dimension_sweep.csv"))
    );
}

#[test]
fn help_lists_subcommands() {
    let out = bin().arg("--help").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "preprocess",
        "train",
        "generate",
        "evaluate",
        "sweep",
        "synth-data",
    ] {
        assert!(text.contains(sub), "{sub}");
    }
}
