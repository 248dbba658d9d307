use std::fs;
use std::path::Path;
use std::process::Command;

use randwave::io::*;
use randwave::randomization::{RandomLaw, WindowSpec};

const MINIMAL: &str = "experiment = randomize\nseed = 1\ngrid.points = 16\n";

fn with(extra: &str) -> String {
    format!("{MINIMAL}{extra}")
}

#[test]
fn minimal_config_takes_documented_defaults() {
    let cfg = parse_config(MINIMAL).unwrap();
    assert_eq!(cfg.experiment, ExperimentKind::Randomize);
    assert_eq!(cfg.random.seed, 1);
    assert_eq!(cfg.grid.points(), 16);
    assert_eq!(cfg.grid.oversampling(), 1);
    assert!((cfg.grid.dealias_fraction() - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(cfg.time_grid.nodes(), 17);
    assert_eq!(cfg.random.window, WindowSpec::SharpCube);
    assert_eq!(cfg.random.law, RandomLaw::ComplexGaussian);
    assert_eq!(cfg.random.members, 32);
    assert_eq!(cfg.regularity.s, 0.3);
    assert!(cfg.regularity.k_was_auto);
    assert_eq!(cfg.regularity.k, Some(1));
    assert_eq!(cfg.params.tail_q, 10.0 / 3.0);
    assert_eq!(cfg.params.dispersive_r, vec![2.0, 6.0, f64::INFINITY]);
    assert!(cfg.warnings.is_empty());
    // every documented key has a default except the three required ones
    assert_eq!(KEYS.iter().filter(|(_, d, _)| d.is_none()).count(), 3);
}

#[test]
fn every_default_parses() {
    for kind in ["randomize", "expand", "tail", "smooth-fit", "counterexample", "dispersive", "gain"] {
        let text = format!("experiment = {kind}\nseed = 0\ngrid.points = 64\nregularity.s = 0.25\n");
        let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{kind}: {e}"));
        assert_eq!(cfg.experiment.name(), kind);
    }
    let bilinear = "experiment = bilinear\nseed = 0\ngrid.points = 256\n";
    assert_eq!(parse_config(bilinear).unwrap().params.bilinear_n2, vec![8, 16, 32, 64]);
}

#[test]
fn comments_blank_lines_and_fractions() {
    let cfg = parse_config(&with("\n  # comment line\nregularity.s = 1/4   # trailing\ntail.r = 6\n")).unwrap();
    assert_eq!(cfg.regularity.s, 0.25);
    assert_eq!(cfg.regularity.k, Some(2));
    assert_eq!(parse_number("10/3").unwrap(), 10.0 / 3.0);
    assert!(parse_number("1/0").is_err());
    assert!(parse_number("nan").is_err());
    // q = ∞ is not a finite tail exponent
    assert!(parse_config(&with("tail.q = inf\n")).unwrap_err().message.contains("tail.q"));
}

#[test]
fn solve_below_the_floor_is_rejected() {
    let text = "experiment = solve\nseed = 1\ngrid.points = 16\nregularity.s = 0.1\n";
    let err = parse_config(text).unwrap_err();
    assert_eq!(err.line, Some(4));
    assert!(err.message.contains("1/6"), "{err}");
    let exact = "experiment = solve\nseed = 1\ngrid.points = 16\nregularity.s = 1/6\n";
    assert!(parse_config(exact).is_err());
    let ok = "experiment = solve\nseed = 1\ngrid.points = 16\nregularity.s = 0.2\n";
    assert_eq!(parse_config(ok).unwrap().regularity.k, Some(3));
}

#[test]
fn duplicate_keys_name_both_lines() {
    let err = parse_config("experiment = randomize\nseed = 1\ngrid.points = 16\nseed = 2\n").unwrap_err();
    assert_eq!(err.line, Some(4));
    assert!(err.message.contains("line 2") && err.message.contains("line 4"), "{err}");
    assert!(err.to_string().starts_with("line 4:"));
}

#[test]
fn errors_carry_line_numbers() {
    let cases = [
        ("bogus.key = 1\n", 4, "unknown key"),
        ("grid.oversampling\n", 4, "key = value"),
        ("random.members = 0\n", 4, "random.members"),
        ("time.nodes = 1\n", 4, "time.nodes"),
        ("time.horizon = -1\n", 4, "time.horizon"),
        ("random.law = cauchy\n", 4, "random.law"),
        ("regularity.s = 1.5\n", 4, "regularity.s"),
        ("\n\ngain.k = 7\n", 6, "gain.k"),
        ("random.window = smooth-bump\nrandom.width = 0.7\n", 5, "random.width"),
        ("time.quadrature = simpson\n", 4, "time.quadrature"),
        ("regularity.k = 0\n", 4, "regularity.k"),
        ("data.kind = plane-wave\ndata.mode = 40,0,0\n", 5, "data.mode"),
        ("smooth.fit_lo = 16\n", 4, "fit window"),
    ];
    for (extra, line, needle) in cases {
        let err = parse_config(&with(extra)).unwrap_err();
        assert!(err.message.contains(needle), "{extra:?}: {err}");
        assert_eq!(err.line, Some(line), "{extra:?}: {err}");
    }
    assert!(parse_config("experiment = randomize\nseed = 1\n").unwrap_err().message.contains("grid.points"));
    assert!(parse_config("experiment = paint\nseed = 1\ngrid.points = 16\n").is_err());
    assert!(parse_config(&with("grid.points = 12\n")).is_err());
}

#[test]
fn depth_outside_the_bracket_only_warns() {
    let cfg = parse_config(&with("regularity.s = 0.3\nregularity.k = 3\n")).unwrap();
    assert_eq!(cfg.regularity.k, Some(3));
    assert!(!cfg.regularity.k_was_auto);
    assert_eq!(cfg.warnings.len(), 1, "{:?}", cfg.warnings);
    let cfg = parse_config(&with("regularity.s = 0.3\nregularity.k = 1\n")).unwrap();
    assert!(cfg.warnings.is_empty());
    // auto depth needs s inside (1/6, 1/2) only for experiments that use it
    let cfg = parse_config(&with("regularity.s = 0\n")).unwrap();
    assert_eq!(cfg.regularity.k, None);
    let expand = "experiment = expand\nseed = 1\ngrid.points = 16\nregularity.s = 0\n";
    assert!(parse_config(expand).is_err());
}

#[test]
fn unused_experiment_keys_warn() {
    let cfg = parse_config(&with("bilinear.n1 = 2\n")).unwrap();
    assert_eq!(cfg.warnings.len(), 1);
    assert!(cfg.warnings[0].contains("bilinear.n1"));
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn config_in(dir: &Path, body: &str) -> RunConfig {
    let mut cfg = parse_config(body).unwrap();
    cfg.output = dir.to_path_buf();
    cfg
}

#[test]
fn runs_are_byte_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let body = "experiment = smooth-fit\nseed = 4\ngrid.points = 16\ngrid.oversampling = 2\n\
                random.members = 6\ntime.horizon = 0.2\ntime.nodes = 5\nsmooth.k_max = 3\n\
                smooth.fit_lo = 1\nsmooth.fit_hi = 4\ndata.kind = bump\n";
    let mut outputs = Vec::new();
    for (name, workers) in [("a", 1), ("b", 1), ("c", 3)] {
        let dir = tmp.path().join(name);
        let m = run_with_workers(&config_in(&dir, body), workers).unwrap();
        assert!(!m.has_hard_error(), "{:?}", m.experiments);
        assert_eq!(m.workers, workers);
        outputs.push(csv_files(&dir));
    }
    assert_eq!(outputs[0].len(), 2);
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let (_, first) = &outputs[0][0];
    assert!(String::from_utf8_lossy(first).starts_with(&format!("# {CSV_SCHEMA} experiment=smooth-fit")));
}

#[test]
fn expand_writes_one_directory_per_order() {
    let tmp = tempfile::tempdir().unwrap();
    let body = "experiment = expand\nseed = 3\ngrid.points = 16\ngrid.oversampling = 2\ntime.horizon = 0.1\n\
                time.nodes = 5\nregularity.s = 0.19\nregularity.k = 3\ndata.kind = bump\n";
    let manifest = run_with_workers(&config_in(tmp.path(), body), 1).unwrap();
    assert_eq!(manifest.experiments[0].error, None);
    let mut dirs: Vec<String> = fs::read_dir(tmp.path().join("expansion"))
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().unwrap().is_dir())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    dirs.sort();
    assert_eq!(dirs, ["order_1", "order_3", "order_5"]);
    for d in &dirs {
        assert_eq!(fs::read_dir(tmp.path().join("expansion").join(d)).unwrap().count(), 5);
    }
    // 15 snapshots, expansion.json, the CSV and the summary
    assert_eq!(manifest.files.len(), 18);
}

#[test]
fn manifest_hashes_reverify_and_detect_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let body = "experiment = randomize\nseed = 9\ngrid.points = 8\nrandom.members = 3\ndata.kind = bump\n\
                random.law = circle\n";
    let manifest = run_with_workers(&config_in(tmp.path(), body), 2).unwrap();
    assert_eq!(manifest.experiments[0].passed, Some(true));
    assert_eq!(manifest.artifact_version, ARTIFACT_VERSION);
    assert!(manifest.files.iter().any(|f| f.path == "members/member_0002.rwv"));
    assert!(verify_manifest(tmp.path()).unwrap().is_empty());
    for f in &manifest.files {
        let (sha, bytes) = sha256_file(&tmp.path().join(&f.path)).unwrap();
        assert_eq!((sha.as_str(), bytes), (f.sha256.as_str(), f.bytes));
    }
    fs::write(tmp.path().join("randomize.csv"), "tampered").unwrap();
    assert_eq!(verify_manifest(tmp.path()).unwrap(), vec!["randomize.csv".to_string()]);
    assert!(!tmp.path().join(format!(".{MANIFEST_FILE}.tmp")).exists());
}

#[test]
fn hard_errors_are_recorded_and_stale_manifests_replaced() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join(MANIFEST_FILE), "stale").unwrap();
    // profiled data needs a larger grid: the experiment fails after validation
    let body = "experiment = tail\nseed = 1\ngrid.points = 8\nrandom.members = 10\n";
    let manifest = run_with_workers(&config_in(tmp.path(), body), 1).unwrap();
    assert!(manifest.has_hard_error());
    assert!(manifest.experiments[0].error.is_some());
    let text = fs::read_to_string(tmp.path().join(MANIFEST_FILE)).unwrap();
    assert!(text.contains("\"error\""));
}

#[test]
fn counterexample_run_reports_pass_fail() {
    let tmp = tempfile::tempdir().unwrap();
    let body = "experiment = counterexample\nseed = 0\ngrid.points = 64\ncounterexample.ns = 2,4,8\n\
                counterexample.nodes = 5\n";
    let manifest = run_with_workers(&config_in(tmp.path(), body), 1).unwrap();
    assert_eq!(manifest.experiments[0].error, None);
    assert!(manifest.experiments[0].passed.is_some());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("counterexample_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["checks"].as_array().unwrap().len(), 2);
    assert!(summary["details"]["c0"].as_f64().unwrap() > 0.0);
}

fn cli(args: &[&str], env_workers: Option<&str>) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_randwave"));
    cmd.args(args);
    match env_workers {
        Some(w) => cmd.env(WORKERS_ENV, w),
        None => cmd.env_remove(WORKERS_ENV),
    };
    cmd.output().unwrap()
}

#[test]
fn cli_exit_codes_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "experiment = randomize\nseed = 1\ngrid.points = 8\nrandom.members = 2\ndata.kind = bump\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let out = tmp.path().join("out");
    let out_s = out.to_str().unwrap();

    let ok = cli(&["randomize", "--config", cfg_s, "--out", out_s, "--seed", "5"], Some("2"));
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest["workers"], 2);
    assert_eq!(manifest["config"]["random"]["seed"], 5);

    let flag = cli(&["randomize", "--config", cfg_s, "--out", out_s, "--workers", "3"], Some("2"));
    assert!(flag.status.success());
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest["workers"], 3);

    let mismatch = cli(&["solve", "--config", cfg_s, "--out", out_s], None);
    assert_eq!(mismatch.status.code(), Some(2));

    let bad = tmp.path().join("bad.cfg");
    fs::write(&bad, "experiment = randomize\nseed = x\ngrid.points = 8\n").unwrap();
    let parse = cli(&["randomize", "--config", bad.to_str().unwrap()], None);
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("line 2"));

    let hard = tmp.path().join("hard.cfg");
    fs::write(&hard, "experiment = tail\nseed = 1\ngrid.points = 8\nrandom.members = 10\n").unwrap();
    let failed = cli(&["tail", "--config", hard.to_str().unwrap(), "--out", out_s], None);
    assert_eq!(failed.status.code(), Some(1));
}

#[test]
fn shipped_example_configs_parse_cleanly() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(cfg.warnings.is_empty(), "{}: {:?}", path.display(), cfg.warnings);
        let stem = path.file_stem().unwrap().to_str().unwrap().replace('_', "-");
        assert!(stem.starts_with(cfg.experiment.name()), "{} runs {}", path.display(), cfg.experiment);
        seen += 1;
    }
    assert!(seen >= 9);
}
