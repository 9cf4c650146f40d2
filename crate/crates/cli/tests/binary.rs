//! End-to-end runs of the `weinstein` binary on small configurations.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = "\
# small grids: fast, not accurate
alphas = 0.5
pairs = 1:2
L = 5
n = 17
R = 5
m = 16
J = 16
op_L = 4
op_n = 9
op_R = 4
op_m = 8
op_J = 12
kernel_samples = 200
mixtures = 2
norm_p = 1, 2, inf, 1.5
";

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weinstein")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn small_config(dir: &Path) -> String {
    let p = dir.join("small.conf");
    fs::write(&p, SMALL).unwrap();
    p.display().to_string()
}

#[test]
fn transform_of_the_default_gaussian_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["transform", "--set", "out=t"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = fs::read_to_string(dir.path().join("t/report.csv")).unwrap();
    assert!(report.starts_with("check_id,paper_anchor,lhs,rhs,tolerance,pass\n"));
    for f in ["input", "transform", "roundtrip"] {
        let text = fs::read_to_string(dir.path().join(format!("t/fields/{f}.csv"))).unwrap();
        assert!(text.starts_with("x_1,x_2,re,im\n"));
        assert_eq!(text.lines().count(), 65 * 64 + 1);
    }
}

#[test]
fn non_admissible_window_fails_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = run(dir.path(), &["cwt", "--config", &cfg, "--set", "phi=lg:0", "--set", "out=w"]);
    assert_eq!(code(&o), 1);
    let report = fs::read_to_string(dir.path().join("w/report.csv")).unwrap();
    let row = report.lines().find(|l| l.starts_with("\"admissibility[alpha=0.5,phi=lg:0]\"") || l.starts_with("admissibility[alpha=0.5,phi=lg:0]")).unwrap();
    assert!(row.ends_with(",false"), "{row}");
    let header = fs::read_to_string(dir.path().join("w/fields/cwt.csv")).unwrap();
    assert!(header.starts_with("a,x_1,x_2,re,im\n"));
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "alpha = 0.5\nwidth = 3\n").unwrap();
    let o = run(dir.path(), &["verify", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("width"), "{err}");

    let o = run(dir.path(), &["transform", "--set", "alpha=-0.7"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha > -1/2"));

    let o = run(dir.path(), &["transform", "--config", "missing.conf"]);
    assert_eq!(code(&o), 2);
    let o = run(dir.path(), &["nonsense"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn runtime_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["transform", "--set", "input=csv:absent.csv", "--set", "out=r"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("absent.csv"));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let read = |name: &str| fs::read(dir.path().join(name).join("report.csv")).unwrap();
    for out in ["a", "b"] {
        let o = run(dir.path(), &["verify", "--config", &cfg, "--set", &format!("out={out}")]);
        assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(read("a"), read("b"));
    let o = run(dir.path(), &["verify", "--config", &cfg, "--set", "seed=7", "--set", "out=c"]);
    assert!(code(&o) <= 1);
    assert_ne!(read("a"), read("c"));

    let text = String::from_utf8(read("a")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check_id,paper_anchor,lhs,rhs,tolerance,pass"));
    for l in lines {
        assert!(l.ends_with(",true") || l.ends_with(",false"), "{l}");
    }
}

#[test]
fn localize_writes_operator_bounds_and_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = run(dir.path(), &["localize", "--config", &cfg, "--set", "symbol=indicator", "--set", "out=l"]);
    assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    let op = fs::read_to_string(dir.path().join("l/operator.csv")).unwrap();
    assert!(op.starts_with("row,col,re,im\n"));
    assert_eq!(op.lines().count(), 72 * 72 + 1);
    let bounds = fs::read_to_string(dir.path().join("l/bounds.csv")).unwrap();
    assert!(bounds.starts_with("theorem_id,p,measured,bound,ratio\n"));
    assert!(bounds.lines().count() > 4);
    for f in ["input", "output"] {
        assert!(dir.path().join(format!("l/fields/{f}.csv")).exists());
    }
    // every exact identity holds whatever the resolution
    let report = fs::read_to_string(dir.path().join("l/report.csv")).unwrap();
    for l in report.lines().filter(|l| l.contains("weak_strong") || l.contains("adjoint")) {
        assert!(l.ends_with(",true"), "{l}");
    }
}

#[test]
fn convergence_reports_levels_and_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = run(dir.path(), &["convergence", "--config", &cfg, "--set", "out=c"]);
    assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("c/report.csv")).unwrap();
    assert!(report.contains("plancherel_ratio[alpha=0.5,level=0->1]"));
    for l in report.lines().filter(|l| l.starts_with("weak_strong") || l.starts_with("adjoint")) {
        assert!(l.ends_with(",true"), "{l}");
    }
    let table = fs::read_to_string(dir.path().join("c/convergence.csv")).unwrap();
    assert!(table.starts_with("quantity,alpha,level,n,m,error\n"));
    assert!(table.contains(",0.5,1,33,32,"));

    // a level beyond the node limit is skipped and flagged
    let o = run(dir.path(), &["convergence", "--config", &cfg, "--set", "max_nodes=1000", "--set", "out=big"]);
    assert_eq!(code(&o), 1);
    let report = fs::read_to_string(dir.path().join("big/report.csv")).unwrap();
    assert!(report.contains("level_skipped[alpha=0.5,level=1,n=33,m=32]"));
}
