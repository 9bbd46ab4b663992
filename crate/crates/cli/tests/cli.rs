//! Exit codes, golden outputs and file round trips of the `soliton` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use soliton_core::toric::{read_series, solve_singular_ivp, ToricInitialData};

fn soliton(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soliton"))
        .args(args)
        .current_dir(dir)
        .env_remove("SOLITON_FD_STEP")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against a golden file; `BLESS=1` rewrites it instead.
fn assert_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn data_rows(path: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn gen_cigar_table_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&["gen", "--family", "cigar", "--c", "2", "--h", "1", "--grid", "41", "--rmax", "3", "-o", "out/"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = dir.path().join("out/table.csv");
    let header = std::fs::read_to_string(&table).unwrap().lines().next().unwrap().to_string();
    assert_eq!(header, "re_z1,im_z1,phi,f,det_g,R,Z_sq");
    let rows = data_rows(&table);
    assert_eq!(rows.len(), 41);
    let meta = read_json(&dir.path().join("out/metadata.json"));
    assert_eq!(meta["family"], "cigar");
    assert_eq!(meta["soliton_h"].as_f64(), Some(1.0));
    // R + 2|Z|² = 2h along the whole table
    for r in &rows {
        assert!((r[5] + 2.0 * r[6] - 2.0).abs() < 1e-6, "{r:?}");
        assert!((r[4] - 1.0 / (1.0 + 0.5 * r[0] * r[0])).abs() < 1e-15);
    }
}

#[test]
fn gen_product_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&["gen", "--family", "product", "--c", "2,2", "--h", "1,2", "--grid", "9", "-o", "p"], dir.path());
    assert_eq!(code(&out), 0);
    let rows = data_rows(&dir.path().join("p/table.csv"));
    assert_eq!(rows.len(), 81);
    assert!(rows.iter().all(|r| r.len() == 4 + 5));
}

#[test]
fn gen_cao_outside_domain_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&["gen", "--family", "cao", "--n", "2", "--h", "-1", "--rmax", "5"], dir.path());
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the domain"));
    let inside = soliton(&["gen", "--family", "cao", "--n", "2", "--h", "-1", "--rmax", "0.9", "--grid", "5", "-o", "c"], dir.path());
    assert_eq!(code(&inside), 0);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["gen", "--family", "torus", "--h", "1"],
        &["gen", "--family", "cigar", "--c", "2,3", "--h", "1"],
        &["gen", "--family", "cao", "--h", "1"],
        &["gen", "--family", "cigar", "--h", "one"],
        &["verify", "--family", "cigar", "--h", "1", "--checks", "entropy"],
        &["verify", "--family", "cigar", "--h", "1", "--tol", "lie"],
        &["toric", "--init", "missing.series", "--h", "1,1"],
        &["resonance", "--h", "1,sqrt(2)"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(code(&soliton(args, dir.path())), 2, "{args:?}");
    }
}

#[test]
fn bad_fd_step_env_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_soliton"))
        .args(["verify", "--family", "cigar", "--h", "1", "--checks", "conservation"])
        .current_dir(dir.path())
        .env("SOLITON_FD_STEP", "tiny")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn fd_step_env_reaches_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_soliton"))
        .args(["verify", "--family", "cigar", "--h", "1", "--checks", "conservation", "-o", "r.json"])
        .current_dir(dir.path())
        .env("SOLITON_FD_STEP", "2e-5")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(read_json(&dir.path().join("r.json"))["fd_rel_step"].as_f64(), Some(2e-5));
}

#[test]
fn verify_cigar_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(
        &["verify", "--family", "cigar", "--c", "2", "--h", "1", "--checks", "conservation,residual,orbits", "-o", "r.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let report = read_json(&dir.path().join("r.json"));
    assert_eq!(report["pass"], true);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["conservation", "residual", "orbits"]);
}

#[test]
fn verify_product_growth_rates() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&["verify", "--family", "product", "--c", "2,2", "--h", "1,1", "--checks", "growth", "-o", "g.json"], dir.path());
    assert_eq!(code(&out), 0);
    let report = read_json(&dir.path().join("g.json"));
    let dirs = report["checks"][0]["report"]["directions"].as_array().unwrap();
    let mu: Vec<f64> = dirs.iter().map(|d| d["mu_est"].as_f64().unwrap()).collect();
    assert_eq!(mu.len(), 3);
    assert!((mu[0] - 2.0).abs() < 0.1 && (mu[1] - 2.0).abs() < 0.1, "{mu:?}");
    assert!((mu[2] - 4.0).abs() < 0.1, "{mu:?}");
}

#[test]
fn verify_series_and_perturbed_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&["toric", "--init", "zero", "--h", "1", "--degree", "12", "-o", "u.series"], dir.path());
    assert_eq!(code(&out), 0);
    let good = soliton(
        &["verify", "--series", "u.series", "--h", "1", "--checks", "conservation,residual,lie,rho,affine", "-o", "ok.json"],
        dir.path(),
    );
    assert_eq!(code(&good), 0, "{}", stdout(&good));

    let text = std::fs::read_to_string(dir.path().join("u.series")).unwrap();
    let bad = text.replacen("-1.2500000000000000e-1", "-1.2000000000000000e-1", 1);
    assert_ne!(bad, text);
    std::fs::write(dir.path().join("bad.series"), bad).unwrap();
    let out = soliton(&["verify", "--series", "bad.series", "--h", "1", "--checks", "residual", "-o", "bad.json"], dir.path());
    assert_eq!(code(&out), 1);
    let report = read_json(&dir.path().join("bad.json"));
    assert_eq!(report["pass"], false);
    assert_eq!(report["checks"][0]["report"]["monge_ampere"]["pass"], false);

    let growth = soliton(&["verify", "--series", "u.series", "--h", "1", "--checks", "growth"], dir.path());
    assert_eq!(code(&growth), 2);
}

#[test]
fn verify_non_positive_growth_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&["verify", "--family", "cigar", "--h", "-1", "--checks", "growth"], dir.path());
    assert_eq!(code(&out), 3);
}

#[test]
fn broken_symmetry_fails_affine_check() {
    let dir = tempfile::tempdir().unwrap();
    let sym = r#"{"s":1.0,"a_mat":[[1.0]],"b_mat":[[1.0]],"a":[1.0],"b":[0.0],"c":0.0}"#;
    std::fs::write(dir.path().join("sym.json"), sym).unwrap();
    let out = soliton(
        &["verify", "--family", "cigar", "--h", "1", "--checks", "affine", "--symmetry", "sym.json", "-o", "a.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
    assert_eq!(read_json(&dir.path().join("a.json"))["checks"][0]["pass"], false);
}

#[test]
fn toric_zero_data_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&["toric", "--init", "zero", "--h", "1", "--degree", "6"], dir.path());
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_golden("toric_zero_h1_d6.series", &text);
    let u = read_series(&text).unwrap();
    assert_eq!(u.coeff(&[1]), 1.0);
    assert!((u.coeff(&[2]) + 1.0 / 8.0).abs() < 1e-15);
    assert!((u.coeff(&[3]) - 1.0 / 36.0).abs() < 1e-15);
    assert!(String::from_utf8_lossy(&out.stderr).contains("max residual coefficient"));
}

#[test]
fn toric_file_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("v.series"),
        r#"{"nvars":1,"degree":3,"terms":[{"exponents":[1],"coeff":1.0},{"exponents":[2],"coeff":0.3}]}"#,
    )
    .unwrap();
    let out = soliton(&["toric", "--init", "v.series", "--h", "1,2", "--degree", "9", "-o", "u.series"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("max residual coefficient"));
    let from_file = read_series(&std::fs::read_to_string(dir.path().join("u.series")).unwrap()).unwrap();

    let v = read_series(&std::fs::read_to_string(dir.path().join("v.series")).unwrap()).unwrap();
    let direct = solve_singular_ivp(&ToricInitialData::new(v, vec![1.0, 2.0]).unwrap(), 9).unwrap();
    assert_eq!(from_file, direct);
}

#[test]
fn toric_degenerate_data_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&["toric", "--init", "zero", "--h", "1,1", "--degree", "6"], dir.path());
    assert_eq!(code(&out), 3);
    std::fs::write(dir.path().join("neg.series"), r#"{"nvars":1,"degree":2,"terms":[{"exponents":[1],"coeff":-1.0}]}"#)
        .unwrap();
    let out = soliton(&["toric", "--init", "neg.series", "--h", "1,1"], dir.path());
    assert_eq!(code(&out), 3);
}

#[test]
fn resonance_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = soliton(&["resonance", "--h", "1,1,3"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("d_h = 9\n"));

    let out = soliton(&["resonance", "--h", "1,1.5", "--pairs"], dir.path());
    assert_eq!(code(&out), 0);
    assert_golden("resonance_1_1.5.txt", &stdout(&out));

    let out = soliton(&["resonance", "--h", "1,3/2", "--json"], dir.path());
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["d_h"], 2);
    assert_eq!(doc["lattice"]["basis"], serde_json::json!([[3, -2]]));
}
