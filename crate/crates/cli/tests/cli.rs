use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cvqt::config::{ExperimentConfig, SweepSpec};
use cvqt::report::{Payload, RunReport};
use cvqt::run::{self, EngineChoice, EngineOverrides};
use cvqt::CliError;
use cvqt_core::{Engine, MonteCarlo, TeleporterConfig};

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn cvqt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvqt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("experiment.toml");
    std::fs::write(&path, text).unwrap();
    path
}

const MINIMAL: &str = r#"
schema_version = 1

[teleporter]
gain_x = 1.0
gain_p = 1.0
squeezer_a = { kind = "direct", r = 0.5 }
squeezer_b = { kind = "direct", r = 0.5 }
"#;

#[test]
fn bundled_configs_load() {
    for name in ["paper_fig3.toml", "paper_fig4.toml", "paper_classical.toml"] {
        ExperimentConfig::load(&bundled(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn unknown_key_exits_two_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        &MINIMAL.replace("gain_p = 1.0", "gain_p = 1.0\ngain_q = 2.0"),
    );
    let out = cvqt(&["teleport", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("gain_q"), "{err}");
    assert!(err.contains("line"), "{err}");
}

#[test]
fn unknown_nested_key_is_rejected() {
    let text = MINIMAL.replace(
        r#"squeezer_a = { kind = "direct", r = 0.5 }"#,
        r#"squeezer_a = { kind = "direct", r = 0.5, db = 3.0 }"#,
    );
    let err = ExperimentConfig::parse(&text, "inline").unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
    assert!(err.to_string().contains("db"), "{err}");
}

#[test]
fn schema_version_is_checked() {
    let err = ExperimentConfig::parse(&MINIMAL.replace("= 1\n", "= 2\n"), "inline").unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("schema_version"));
}

#[test]
fn unphysical_values_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        &format!("{MINIMAL}\n[teleporter.efficiencies]\npath_a = 1.3\n"),
    );
    let out = cvqt(&["teleport", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("path_a"));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = cvqt(&["teleport", "--config", "/nonexistent/cfg.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_sweep_and_zero_chain_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, &format!("{MINIMAL}\n[sweep]\ngains = []\n"));
    let out = cvqt(&["sweep-gain", "--config", cfg.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    let cfg = write_config(&dir, MINIMAL);
    let out = cvqt(&[
        "sequential",
        "--config",
        cfg.to_str().unwrap(),
        "--n-max",
        "0",
    ]);
    assert_ne!(out.status.code(), Some(0));
    let out = cvqt(&[
        "sweep-gain",
        "--config",
        cfg.to_str().unwrap(),
        "--start",
        "1",
        "--stop",
        "0",
        "--step",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fixed_seed_gives_identical_payloads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, MINIMAL);
    let mut hashes = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}.toml"));
        let status = cvqt(&[
            "teleport",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "5",
            "--shots",
            "2000",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(
            status.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&status.stderr)
        );
        let report = RunReport::load(&std::fs::read_to_string(&out).unwrap()).unwrap();
        hashes.push(report.meta.payload_sha256.clone());
    }
    assert_eq!(hashes[0], hashes[1]);
}

#[test]
fn workers_split_is_reproducible_and_matches_sequential_workers() {
    let mut cfg = TeleporterConfig::ideal(0.5, 1.0);
    let mc = MonteCarlo {
        shots: 4000,
        seed: 1,
        workers: 3,
    };
    cfg.engine = Engine::MonteCarlo(mc);
    let (a, ta) = run::monte_carlo_parallel(&cfg, &mc).unwrap();
    let (b, tb) = cvqt_core::teleporter::run_monte_carlo(&cfg, &mc).unwrap();
    assert_eq!(a, b);
    assert_eq!(ta, tb);
}

#[test]
fn sampling_flags_select_monte_carlo() {
    let cfg = TeleporterConfig::ideal(0.5, 1.0);
    let o = EngineOverrides {
        seed: Some(9),
        ..Default::default()
    };
    assert_eq!(
        o.apply(cfg).engine,
        Engine::MonteCarlo(MonteCarlo::new(run::DEFAULT_SHOTS, 9))
    );
    let forced = EngineOverrides {
        engine: Some(EngineChoice::Heisenberg),
        seed: Some(9),
        ..Default::default()
    };
    assert_eq!(forced.apply(cfg).engine, Engine::Heisenberg);
    assert_eq!(
        EngineOverrides::default().apply(cfg).engine,
        Engine::Heisenberg
    );
}

#[test]
fn reports_round_trip() {
    let tele = TeleporterConfig::ideal(0.8, 1.0);
    let payloads = vec![
        Payload::Teleport(run::teleport(&tele).unwrap().0),
        Payload::SweepGain(run::sweep(&tele, &[1.0, 0.0, 0.5]).unwrap()),
        Payload::Sequential(run::sequential(&tele, 4).unwrap()),
        Payload::Calibrate(run::calibrate(&[0.99, 1.0], &[37.4], 1.0).unwrap()),
    ];
    let mc = TeleporterConfig {
        engine: Engine::MonteCarlo(MonteCarlo::new(500, 3)),
        ..tele
    };
    let mut payloads = payloads;
    payloads.push(Payload::Teleport(run::teleport(&mc).unwrap().0));
    for payload in payloads {
        let report = RunReport::new(payload).unwrap();
        let text = report.emit().unwrap();
        assert_eq!(RunReport::load(&text).unwrap(), report);
    }
}

#[test]
fn tampered_report_is_rejected() {
    let report = RunReport::new(Payload::Teleport(
        run::teleport(&TeleporterConfig::ideal(0.8, 1.0)).unwrap().0,
    ))
    .unwrap();
    let text = report
        .emit()
        .unwrap()
        .replace("gain_x = 1.0", "gain_x = 1.5");
    assert!(RunReport::load(&text).is_err());
}

#[test]
fn configs_round_trip() {
    let mut cfg = ExperimentConfig::load(&bundled("paper_fig4.toml")).unwrap();
    cfg.sweep = Some(SweepSpec::list(vec![0.5, 1.0]));
    let again = ExperimentConfig::parse(&cfg.to_toml().unwrap(), "emitted").unwrap();
    assert_eq!(again, cfg);
}

#[test]
fn sweep_table_is_sorted_and_matches_teleport() {
    let out = cvqt(&[
        "sweep-gain",
        "--config",
        bundled("paper_fig4.toml").to_str().unwrap(),
        "--gains",
        "1.0,0.0,0.99",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "g,sigma_x,sigma_x_db,sigma_p,sigma_p_db,fidelity,n_s"
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(
        rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
        [0.0, 0.99, 1.0]
    );
    let tele = run::teleport(&TeleporterConfig {
        engine: Engine::Heisenberg,
        ..ExperimentConfig::load(&bundled("paper_fig4.toml"))
            .unwrap()
            .teleporter
    })
    .unwrap()
    .0;
    assert_eq!(rows[2][1], tele.report.sigma_x.linear);
    assert_eq!(rows[2][5], tele.report.fidelity);
    assert!((rows[1][5] - 0.842).abs() < 0.003);
}

#[test]
fn sequential_table_flags_the_crossing() {
    let out = cvqt(&[
        "sequential",
        "--config",
        bundled("paper_classical.toml").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let flags: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(flags, ["false", "true", "false"]);
    let one = cvqt(&[
        "sequential",
        "--config",
        bundled("paper_classical.toml").to_str().unwrap(),
        "--n-max",
        "1",
    ]);
    assert_eq!(String::from_utf8(one.stdout).unwrap().lines().count(), 2);
}

#[test]
fn opo_spectrum_rows() {
    let out = cvqt(&[
        "opo-spectrum",
        "--parametric-gain",
        "1",
        "--bandwidth-mhz",
        "10",
        "--stop-mhz",
        "1",
        "--step-mhz",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols[2], 0.0);
        assert_eq!(cols[4], 0.0);
    }
    let bad = cvqt(&[
        "opo-spectrum",
        "--parametric-gain",
        "0.5",
        "--bandwidth-mhz",
        "10",
    ]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn calibrate_reports_bound_and_floor() {
    let out = cvqt(&["calibrate", "--suppression-db", "37.4", "--gain", "0.99"]);
    assert_eq!(out.status.code(), Some(0));
    let report = RunReport::load(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let Payload::Calibrate(cal) = report.payload else {
        panic!("wrong payload")
    };
    assert!((cal.classical_floor - 3.0).abs() < 1e-12);
    assert!((cal.bounds[0].gain_bound - 0.0135).abs() < 1e-4);
    assert!((cal.cancellations[0].result.suppression_db - 40.0).abs() < 1e-9);
    let neg = cvqt(&["calibrate", "--suppression-db", "-3"]);
    assert_eq!(neg.status.code(), Some(3));
}

#[test]
fn classical_bundle_reports_half() {
    let out = cvqt(&[
        "teleport",
        "--config",
        bundled("paper_classical.toml").to_str().unwrap(),
        "--format",
        "table",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let f: f64 = row[7].parse().unwrap();
    assert!((f - 0.5).abs() < 1e-12);
}

#[test]
fn trace_file_has_one_row_per_shot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, MINIMAL);
    let trace = dir.path().join("trace.csv");
    let out = cvqt(&[
        "teleport",
        "--config",
        cfg.to_str().unwrap(),
        "--shots",
        "25",
        "--workers",
        "2",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(trace).unwrap().lines().count(), 26);
}
