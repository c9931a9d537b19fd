use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(format!("{name}.moran"))
}

fn moran(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moran"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(name: &str) -> String {
    corpus(name).to_string_lossy().into_owned()
}

#[test]
fn validate_lists_each_level() {
    let o = moran(&["validate", &path("unit_interval")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("T3") && text.contains("T2") && text.contains("boundary-ratio"));
    assert!(text.contains("system: admissible"));
}

#[test]
fn qsum_csv_is_identically_one() {
    let o = moran(&["qsum", &path("unit_interval"), "--level", "4", "--grid", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("xi,Q"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|(_, q)| (q - 1.0).abs() < 1e-9));
    assert_eq!(rows[0].0, -5.0);
}

#[test]
fn csv_values_carry_fifteen_significant_digits() {
    let o = moran(&["spectrum", &path("unit_interval"), "--level", "2"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda_exact,lambda"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let value = row.split(',').nth(1).unwrap().trim_start_matches('-');
        let digits = value.chars().filter(char::is_ascii_digit).collect::<String>();
        let significant = digits.trim_start_matches('0');
        assert!(value == "0" || significant.len() == 15, "{value}");
    }
}

#[test]
fn certify_exit_codes_follow_verdicts() {
    for (name, code) in [
        ("alternating", 0),
        ("pure_t3", 0),
        ("growing_blocks", 0),
        ("nonuniform_overlap", 2),
        ("odd_quotient", 2),
        ("unit_interval", 3),
    ] {
        let o = moran(&["certify", &path(name)]);
        assert_eq!(o.status.code(), Some(code), "{name}: {}", stdout(&o));
    }
}

#[test]
fn certify_prints_seed_and_is_deterministic() {
    let args = ["certify", &path("alternating"), "--seed", "17", "--samples", "50"];
    let a = moran(&args);
    let b = moran(&args);
    assert!(stdout(&a).contains("seed: 17"));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn density_writes_csv_and_verdict() {
    let out = std::env::temp_dir().join(format!("moran-density-{}.csv", std::process::id()));
    let o = moran(&[
        "density",
        &path("nonuniform_overlap"),
        "--level",
        "12",
        "--bins",
        "256",
        "-o",
        &out.to_string_lossy(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("not spectral by uniformity criterion"));
    let csv = std::fs::read_to_string(&out).unwrap();
    std::fs::remove_file(&out).ok();
    assert!(csv.starts_with("center,density\n"));
    assert_eq!(csv.lines().count(), 257);
}

#[test]
fn tiling_reports_both_outcomes() {
    let yes = moran(&["tiling", &path("unit_interval"), "--level", "8"]);
    assert_eq!(yes.status.code(), Some(0));
    assert!(stdout(&yes).contains("tiles by Z: yes"));
    let no = moran(&["tiling", &path("nonuniform_overlap"), "--level", "6"]);
    assert_eq!(no.status.code(), Some(1));
    assert!(stdout(&no).contains("tiles by Z: no"));
}

#[test]
fn hadamard_over_a_file() {
    let o = moran(&["hadamard", &path("alternating")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("(9,{0,1,2})  L = {0,3,-3}"));
    assert!(text.contains("(4,{0,2})  L = {0,1}"));
    let bad = moran(&["hadamard", &path("odd_quotient")]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn ortho_passes_on_admissible_level() {
    let o = moran(&["ortho", &path("alternating"), "--level", "4", "--sigma", "-+-+"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 not orthogonal"));
}

#[test]
fn examples_reproduce_every_expectation() {
    let o = moran(&["examples"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("MISMATCH"));
}

#[test]
fn error_exit_codes() {
    assert_eq!(moran(&[]).status.code(), Some(64));
    assert_eq!(moran(&["spectrum", &path("alternating"), "--level", "0"]).status.code(), Some(64));
    assert_eq!(moran(&["certify", &path("alternating"), "--sigma", "+x"]).status.code(), Some(64));
    assert_eq!(moran(&["validate", "/no/such/file.moran"]).status.code(), Some(66));

    let bad = std::env::temp_dir().join(format!("moran-bad-{}.moran", std::process::id()));
    std::fs::write(&bad, "cycle: (4,{0,2}\n").unwrap();
    let o = moran(&["validate", &bad.to_string_lossy()]);
    std::fs::remove_file(&bad).ok();
    assert_eq!(o.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn finite_system_rejects_levels_past_its_end() {
    let o = moran(&["spectrum", &path("growing_blocks"), "--level", "13"]);
    assert_eq!(o.status.code(), Some(64));
}
