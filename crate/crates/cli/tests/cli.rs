//! Command-level behavior: exit codes, output formats, determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn iotier() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iotier"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let config = r#"{
  "dataset": { "file_count": 320, "file_size_bytes": 131072 },
  "cluster": { "nodes": 4, "procs_per_node": 2, "nodes_per_ssd": 2, "gfs_ost_count": 2 },
  "storage": { "ost_read_bw": 104857600.0, "ssd_read_bw": 209715200.0,
               "gfs_meta_base_s": 0.0005, "gfs_meta_capacity": 1000.0, "lfs_meta_s": 0.0002 },
  "sim": { "seed": 13, "jitter_sigma": 0.05, "epochs": 2 },
  "sweep": [0, 50, 100]
}"#;
    let path = dir.join("config.json");
    fs::write(&path, config).unwrap();
    path
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn simulate_writes_expected_files_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let status = iotier()
            .args(["simulate", "--config"])
            .arg(&config)
            .arg("--out-dir")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let mut names: Vec<String> = fs::read_dir(&out_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        vec![
            "trace_r0_e0.jsonl",
            "trace_r0_e1.jsonl",
            "trace_r100_e0.jsonl",
            "trace_r100_e1.jsonl",
            "trace_r50_e0.jsonl",
            "trace_r50_e1.jsonl",
        ]
    );
    for name in &names {
        assert_eq!(
            fs::read(out_a.join(name)).unwrap(),
            fs::read(out_b.join(name)).unwrap(),
            "{name} differs between runs"
        );
    }
}

#[test]
fn simulate_missing_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    fs::write(
        &path,
        r#"{ "dataset": { "file_count": 8, "file_size_bytes": 1 },
             "cluster": { "nodes": 1, "procs_per_node": 1, "nodes_per_ssd": 1, "gfs_ost_count": 1 },
             "sim": { "seed": 0, "jitter_sigma": 0.0, "epochs": 1 },
             "sweep": [0] }"#,
    )
    .unwrap();
    let out = iotier()
        .args(["simulate", "--config"])
        .arg(&path)
        .arg("--out-dir")
        .arg(dir.path().join("t"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("storage"), "{}", stderr_of(&out));
}

#[test]
fn analyze_summary_format_and_sort_order() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let traces = dir.path().join("traces");
    assert!(iotier()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&traces)
        .status()
        .unwrap()
        .success());

    let summary = dir.path().join("summary.csv");
    let breakdowns = dir.path().join("breakdowns.jsonl");
    assert!(iotier()
        .arg("analyze")
        .arg(&traces)
        .arg("--summary")
        .arg(&summary)
        .arg("--breakdowns")
        .arg(&breakdowns)
        .status()
        .unwrap()
        .success());

    let text = fs::read_to_string(&summary).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "cache_rate_pct,epoch,slowest_rank,gfs_read_s,gfs_meta_s,lfs_read_s,lfs_meta_s,total_s"
    );
    assert_eq!(lines.len(), 1 + 6);
    let keys: Vec<(f64, u64)> = lines[1..]
        .iter()
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[0].parse().unwrap(), cols[1].parse().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(keys, sorted, "rows must be sorted by (cache_rate_pct, epoch)");
    // seconds columns carry exactly nine decimal digits
    for line in &lines[1..] {
        for col in line.split(',').skip(3) {
            let (_, frac) = col.split_once('.').expect("decimal point");
            assert_eq!(frac.len(), 9, "bad column {col} in {line}");
        }
        assert!(line.ends_with(|c: char| c.is_ascii_digit()));
    }
    assert!(text.ends_with('\n'));

    // breakdown lines: one object per (rate, epoch, rank)
    let breakdown_count = fs::read_to_string(&breakdowns).unwrap().lines().count();
    assert_eq!(breakdown_count, 3 * 2 * 8);
}

#[test]
fn analyze_empty_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("empty")).unwrap();
    let out = iotier()
        .arg("analyze")
        .arg(dir.path().join("empty"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("empty input set"));
}

#[test]
fn analyze_rejects_malformed_trace_name_and_data() {
    let dir = tempfile::tempdir().unwrap();
    let bad_name = dir.path().join("notatrace.jsonl");
    fs::write(&bad_name, "{}").unwrap();
    let out = iotier().arg("analyze").arg(&bad_name).output().unwrap();
    assert_eq!(out.status.code(), Some(3));

    let bad_data = dir.path().join("trace_r0_e0.jsonl");
    fs::write(&bad_data, "{\"rank\":0}\n").unwrap();
    let out = iotier().arg("analyze").arg(&bad_data).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_of(&out).contains("line 1"), "{}", stderr_of(&out));
}

const DARSHAN_SMALL: &str = "\
POSIX 0 7 POSIX_F_READ_TIME 0.125 /gfs/ds/f0 /gfs lustre
POSIX 0 7 POSIX_F_META_TIME 0.01 /gfs/ds/f0 /gfs lustre
POSIX 1 8 POSIX_F_READ_TIME 0.0625 /local/ds/f1 /local tmpfs
POSIX 1 8 POSIX_F_META_TIME 0.005 /local/ds/f1 /local tmpfs
POSIX -1 9 POSIX_F_META_TIME 0.5 /gfs/ds/sh /gfs lustre
";

#[test]
fn ingest_lenient_reports_skip_count() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("darshan.txt");
    fs::write(&input, DARSHAN_SMALL).unwrap();
    let out_path = dir.path().join("trace_r0_e0.jsonl");
    let out = iotier()
        .args(["ingest", "--input"])
        .arg(&input)
        .args(["--epoch", "0", "--gfs-prefix", "/gfs", "--lfs-prefix", "/local", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stderr_of(&out).contains("skipped 1"), "{}", stderr_of(&out));
    let lines = fs::read_to_string(&out_path).unwrap().lines().count();
    assert_eq!(lines, 2);
}

#[test]
fn ingest_takes_mounts_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("darshan.txt");
    fs::write(&input, DARSHAN_SMALL).unwrap();
    let config_path = dir.path().join("config.json");
    let mut config: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(write_config(dir.path())).unwrap()).unwrap();
    config["mounts"] =
        serde_json::json!({ "gfs_prefixes": ["/gfs"], "lfs_prefixes": ["/local"] });
    fs::write(&config_path, config.to_string()).unwrap();
    let out = iotier()
        .args(["ingest", "--input"])
        .arg(&input)
        .args(["--epoch", "1", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 2);
    assert!(stdout.contains("\"epoch\":1"));
}

#[test]
fn ingest_without_mounts_exits_2() {
    let out = iotier()
        .args(["ingest", "--input", "/dev/null", "--epoch", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

const BREAKDOWNS_FIXTURE: &str = "\
{\"cache_rate_pct\":0,\"epoch\":2,\"rank\":0,\"gfs_read_s\":0.000000000,\"gfs_meta_s\":4.000000000,\"lfs_read_s\":0.000000000,\"lfs_meta_s\":0.000000000}
{\"cache_rate_pct\":0,\"epoch\":2,\"rank\":1,\"gfs_read_s\":0.000000000,\"gfs_meta_s\":3.000000000,\"lfs_read_s\":0.000000000,\"lfs_meta_s\":0.000000000}
{\"cache_rate_pct\":50,\"epoch\":2,\"rank\":0,\"gfs_read_s\":0.000000000,\"gfs_meta_s\":2.000000000,\"lfs_read_s\":1.500000000,\"lfs_meta_s\":0.000000000}
{\"cache_rate_pct\":50,\"epoch\":2,\"rank\":1,\"gfs_read_s\":0.000000000,\"gfs_meta_s\":1.000000000,\"lfs_read_s\":2.000000000,\"lfs_meta_s\":0.000000000}
";

fn write_breakdowns(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("breakdowns.jsonl");
    fs::write(&path, BREAKDOWNS_FIXTURE).unwrap();
    path
}

#[test]
fn estimate_identity_reports_zero_reduction() {
    let dir = tempfile::tempdir().unwrap();
    let breakdowns = write_breakdowns(dir.path());
    let out = iotier()
        .args(["estimate", "--breakdowns"])
        .arg(&breakdowns)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(
        lines[0],
        "baseline_cache_rate_pct,baseline_time_s,improved_cache_rate_pct,improved_time_s,reduction_pct"
    );
    assert_eq!(lines[1], "50,3.500000000,50,3.500000000,0.000000000");
}

#[test]
fn estimate_matches_hand_computed_oracle() {
    // Identity best: 50% at 3.5 s. Improving GFS-META by 50% scales it by
    // 2/3: 0% cell becomes max(8/3, 2) = 8/3, 50% cell becomes
    // max(2*2/3+1.5, 2/3+2) = 2.8333..., so the best moves to 0% at 8/3 and
    // the reduction is 100 * (1 - (8/3)/3.5).
    let dir = tempfile::tempdir().unwrap();
    let breakdowns = write_breakdowns(dir.path());
    let out = iotier()
        .args(["estimate", "--breakdowns"])
        .arg(&breakdowns)
        .args(["--epoch", "2", "--improve", "GFS-META=50"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let row: Vec<&str> = stdout.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "50");
    assert_eq!(row[1], "3.500000000");
    assert_eq!(row[2], "0");
    let improved: f64 = row[3].parse().unwrap();
    let reduction: f64 = row[4].parse().unwrap();
    assert!((improved - 8.0 / 3.0).abs() <= 1e-9);
    assert!((reduction - 100.0 * (1.0 - (8.0 / 3.0) / 3.5)).abs() <= 1e-7);
}

#[test]
fn estimate_unknown_class_exits_2_listing_names() {
    let dir = tempfile::tempdir().unwrap();
    let breakdowns = write_breakdowns(dir.path());
    let out = iotier()
        .args(["estimate", "--breakdowns"])
        .arg(&breakdowns)
        .args(["--improve", "gfs_meta=50"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    for name in ["GFS-READ", "GFS-META", "LFS-READ", "LFS-META"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn estimate_missing_epoch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let breakdowns = write_breakdowns(dir.path());
    let out = iotier()
        .args(["estimate", "--breakdowns"])
        .arg(&breakdowns)
        .args(["--epoch", "7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn explore_degenerate_goals() {
    let dir = tempfile::tempdir().unwrap();
    let breakdowns = write_breakdowns(dir.path());
    let run_goal = |goal: &str| -> String {
        let out = iotier()
            .args(["explore", "--breakdowns"])
            .arg(&breakdowns)
            .args([
                "--epoch", "2", "--class-a", "GFS-META", "--class-b", "LFS-READ",
                "--max-percent", "30", "--step", "10", "--goal-s", goal, "--out", "-",
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr_of(&out));
        String::from_utf8_lossy(&out.stdout).into_owned()
    };

    // effectively infinite goal: every cell feasible at the smallest rate
    let huge = run_goal("1e15");
    let lines: Vec<&str> = huge.lines().collect();
    assert_eq!(lines[0], "imp_a_pct,imp_b_pct,feasible,min_cache_rate_pct,best_time_s");
    assert_eq!(lines.len(), 1 + 16);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2], "true");
        assert_eq!(cols[3], "0");
    }

    // goal below anything achievable: every cell infeasible, empty min rate
    let tiny = run_goal("0.000001");
    for line in tiny.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2], "false");
        assert_eq!(cols[3], "");
    }
}

#[test]
fn fractional_sweep_percent_survives_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    let mut config: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(write_config(dir.path())).unwrap()).unwrap();
    config["sweep"] = serde_json::json!([0, 2.5, 100]);
    config["sim"]["epochs"] = serde_json::json!(1);
    fs::write(&config_path, config.to_string()).unwrap();

    let traces = dir.path().join("traces");
    assert!(iotier()
        .args(["simulate", "--config"])
        .arg(&config_path)
        .arg("--out-dir")
        .arg(&traces)
        .status()
        .unwrap()
        .success());
    assert!(traces.join("trace_r2.5_e0.jsonl").exists());

    let out = iotier()
        .arg("analyze")
        .arg(&traces)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let rates: Vec<&str> =
        stdout.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(rates, vec!["0", "2.5", "100"]);
}

#[test]
fn analyze_accepts_explicit_file_list() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let traces = dir.path().join("traces");
    assert!(iotier()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&traces)
        .status()
        .unwrap()
        .success());
    let out = iotier()
        .arg("analyze")
        .arg(traces.join("trace_r50_e0.jsonl"))
        .arg(traces.join("trace_r100_e0.jsonl"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 3);
}

#[test]
fn estimate_improving_all_four_classes() {
    let dir = tempfile::tempdir().unwrap();
    let breakdowns = write_breakdowns(dir.path());
    let out = iotier()
        .args(["estimate", "--breakdowns"])
        .arg(&breakdowns)
        .args([
            "--epoch", "2",
            "--improve", "GFS-READ=10",
            "--improve", "GFS-META=100",
            "--improve", "LFS-READ=100",
            "--improve", "LFS-META=10",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_of(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let row: Vec<&str> = stdout.lines().nth(1).unwrap().split(',').collect();
    // every class halved or better: 0% cell max(2, 1.5) vs 50% cell
    // max(1 + 0.75, 0.5 + 1) = 1.75
    let improved: f64 = row[3].parse().unwrap();
    assert!((improved - 1.75).abs() <= 1e-9, "{stdout}");
}

#[test]
fn estimate_duplicate_class_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let breakdowns = write_breakdowns(dir.path());
    let out = iotier()
        .args(["estimate", "--breakdowns"])
        .arg(&breakdowns)
        .args(["--improve", "GFS-META=10", "--improve", "GFS-META=20"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("duplicate"));
}

#[test]
fn explore_same_class_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let breakdowns = write_breakdowns(dir.path());
    let out = iotier()
        .args(["explore", "--breakdowns"])
        .arg(&breakdowns)
        .args([
            "--epoch", "2", "--class-a", "GFS-META", "--class-b", "GFS-META",
            "--goal-s", "1.0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
