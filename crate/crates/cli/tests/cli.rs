use std::path::Path;
use std::process::{Command, Output};

fn spinmzi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinmzi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn invalid_values_exit_with_one() {
    assert_eq!(code(&spinmzi(&["qfi-sweep", "--j", "0.7"])), 1);
    assert_eq!(code(&spinmzi(&["qfi-sweep", "--tau-sq-start", "1.5"])), 1);
    assert_eq!(code(&spinmzi(&["state-info", "--bogus"])), 1);
    let bh_c = spinmzi(&["sensitivity-sweep", "--scheme", "bh", "--scenario", "c"]);
    assert_eq!(code(&bh_c), 1);
    assert!(bh_c.stdout.is_empty());
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("out.csv");
    let run = spinmzi(&["state-info", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 3);
    assert!(!out.exists());
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "j = 2.0\nlambda_mag = 0.5\nformat = \"json\"\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let from_file = spinmzi(&["state-info", "--config", cfg]);
    assert_eq!(code(&from_file), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&from_file)).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 5);
    assert_eq!(json["metadata"]["config"]["j"].as_f64().unwrap(), 2.0);

    let overridden = spinmzi(&["state-info", "--config", cfg, "--j", "1", "--format", "csv"]);
    assert_eq!(code(&overridden), 0);
    assert_eq!(data_rows(&stdout(&overridden)).len(), 3);

    let bad = Path::new(cfg).with_file_name("bad.toml");
    std::fs::write(&bad, "spin = 1\n").unwrap();
    assert_eq!(
        code(&spinmzi(&["state-info", "--config", bad.to_str().unwrap()])),
        1
    );
}

#[test]
fn zero_tolerance_fails_verification_but_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.csv");
    let run = spinmzi(&["verify", "--tolerance", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 2);
    let report = std::fs::read_to_string(&out).unwrap();
    assert!(report.lines().any(|l| l.contains("false")));

    assert_eq!(code(&spinmzi(&["verify"])), 0);
}

#[test]
fn dark_points_print_inf_and_never_nan() {
    let run = spinmzi(&[
        "sensitivity-sweep",
        "--phi-start",
        "0",
        "--phi-stop",
        "3.141592653589793",
        "--phi-count",
        "3",
    ]);
    assert_eq!(code(&run), 0);
    let text = stdout(&run);
    assert!(!text.to_lowercase().contains("nan"));
    let rows = data_rows(&text);
    assert!(rows[0].iter().skip(1).any(|c| c == "inf"));
    assert!(rows[2].iter().skip(1).any(|c| c == "inf"));
}

#[test]
fn vacuum_input_is_flagged_degenerate() {
    let run = spinmzi(&["qfi-sweep", "--lambda-mag", "0", "--tau-sq-count", "3"]);
    assert_eq!(code(&run), 0);
    let text = stdout(&run);
    let header: Vec<_> = text.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "degenerate").unwrap();
    let qcrb = header.iter().position(|h| *h == "qcrb_c").unwrap();
    for row in data_rows(&text) {
        assert_eq!(row[col], "true");
        assert_eq!(row[qcrb], "inf");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = [
        "sensitivity-sweep",
        "--phi-count",
        "50",
        "--oracle",
        "--format",
        "json",
    ];
    assert_eq!(spinmzi(&args).stdout, spinmzi(&args).stdout);
}
