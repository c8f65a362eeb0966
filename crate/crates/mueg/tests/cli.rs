//! End-to-end runs of the `mueg` binary.

use std::path::Path;
use std::process::{Command, Output};

use mueg::fields::io::FieldData;
use mueg::fields::{GridSpec, ScalarField};

fn mueg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mueg")).current_dir(dir).args(args).output().expect("spawn mueg")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn help_and_usage_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&mueg(dir.path(), &["--help"])), 0);
    assert_eq!(code(&mueg(dir.path(), &["--version"])), 0);
    assert_eq!(code(&mueg(dir.path(), &["frobnicate"])), 2);
    assert_eq!(code(&mueg(dir.path(), &["verify", "--suite", "nonsense"])), 2);
    assert_eq!(code(&mueg(dir.path(), &["tile", "--config", "missing.cfg"])), 2);
}

#[test]
fn malformed_inputs_report_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.field", "MUEG-FIELD 1\ndim 3 components 1\n0 0 0\n1 1 1\n2 2 x\n");
    write(dir.path(), "job.cfg", "[construct]\nrho = bad.field\n");
    let o = mueg(dir.path(), &["construct", "--config", "job.cfg"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"), "{}", String::from_utf8_lossy(&o.stderr));

    write(dir.path(), "keys.cfg", "[tile]\nell = 1\n\nsamples = many\n");
    let o = mueg(dir.path(), &["tile", "--config", "keys.cfg"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    write(dir.path(), "unknown.cfg", "[tile]\nell = 1\nshape = cube\n");
    let o = mueg(dir.path(), &["tile", "--config", "unknown.cfg"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    write(dir.path(), "nofile.cfg", "[construct]\nrho = nowhere.field\n");
    assert_eq!(code(&mueg(dir.path(), &["construct", "--config", "nofile.cfg"])), 2);
}

#[test]
fn tile_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "tile.cfg", "[tile]\nell = 1.5\nsamples = 50000\nindicator_points = 2000\noff = true\n");
    for out in ["a", "b"] {
        let o = mueg(dir.path(), &["tile", "--config", "tile.cfg", "--seed", "11", "--out", out]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = std::fs::read_to_string(dir.path().join("a/tile.report")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b/tile.report")).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("config_hash = "));
    assert!(a.trim_end().ends_with("pass = true"));
    let off = std::fs::read_to_string(dir.path().join("a/tiling.off")).unwrap();
    assert!(off.starts_with("OFF"));

    // a different seed changes the report through the sampled coverage
    let o = mueg(dir.path(), &["tile", "--config", "tile.cfg", "--seed", "12", "--out", "c"]);
    assert_eq!(code(&o), 0);
    assert_ne!(a, std::fs::read_to_string(dir.path().join("c/tile.report")).unwrap());
}

#[test]
fn ueg_scan_recovers_quadratic_gauge_growth() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ueg.cfg", "[ueg]\ngrid = 0\n");
    let o = mueg(dir.path(), &["ueg-scan", "--config", "ueg.cfg", "--scales", "4,8,16,32"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let tsv = std::fs::read_to_string(dir.path().join("mueg-out/ueg_scan.tsv")).unwrap();
    let row = tsv.lines().find(|l| l.starts_with("exponent")).expect("exponent row");
    let p: f64 = row.split('\t').nth(1).unwrap().parse().unwrap();
    assert!((p - 2.0).abs() <= 0.05, "exponent {p}");
    assert_eq!(tsv.lines().filter(|l| l.starts_with("gauge\t")).count(), 4);
}

#[test]
fn construct_from_field_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridSpec::cube(3, -7.0, 7.0, 22).unwrap();
    let rho = ScalarField::from_fn(&g, |x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 2.0).exp() * 0.2);
    FieldData::from_scalar(&rho).write(&dir.path().join("rho.field")).unwrap();
    write(dir.path(), "c.cfg", "[construct]\nrho = rho.field\ndump_kernel = true\n");
    let o = mueg(dir.path(), &["construct", "--config", "c.cfg", "--workers", "2"]);
    assert_eq!(code(&o), 0, "{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.path().join("mueg-out/construct.report")).unwrap();
    assert!(report.contains("[check marginals]"));
    let slice = FieldData::read(&dir.path().join("mueg-out/kernel_slice.field")).unwrap();
    assert!(slice.complex);
}

#[test]
fn verify_single_suite_and_acceptance_subset() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "v.cfg", "[verify]\nsets = 4\n");
    let o = mueg(dir.path(), &["verify", "--config", "v.cfg", "--suite", "pointwise", "--strict-vorticity"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(dir.path().join("mueg-out/verify.report")).unwrap();
    assert!(report.contains("strict_vorticity = true"));
    assert!(!report.contains("affine"));

    let o = mueg(dir.path(), &["acceptance", "--criteria", "12,15"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("criterion 15"));
}
