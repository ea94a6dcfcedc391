use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn kaclab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kaclab"))
        .args(["--out", out.to_str().unwrap()])
        .args(args)
        .env_remove("KACLAB_OUT")
        .output()
        .expect("kaclab runs")
}

fn first_line(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn verify_writes_chain_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["verify", "--family", "bump", "--N", "8,16"];
    let ra = kaclab(&args, a.path());
    let rb = kaclab(&args, b.path());
    assert_eq!(ra.status.code(), Some(0), "{}", String::from_utf8_lossy(&ra.stderr));
    assert_eq!(rb.status.code(), Some(0));
    assert_eq!(first_line(&a.path().join("chain.csv")), "family,N,k,q,p,beta,step,lhs,rhs,slack,pass");
    assert_eq!(first_line(&a.path().join("epsilon.csv")), "N,epsilon_hat");
    for f in ["chain.csv", "epsilon.csv", "epsilon.svg"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn uniform_ratio_is_undefined() {
    let d = tempfile::tempdir().unwrap();
    let r = kaclab(&["verify", "--family", "uniform", "--N", "8"], d.path());
    assert_eq!(r.status.code(), Some(0));
    assert!(fs::read_to_string(d.path().join("epsilon.csv")).unwrap().contains("8,undefined"));
}

#[test]
fn invalid_parameters_exit_two() {
    let d = tempfile::tempdir().unwrap();
    let r = kaclab(&["verify", "--family", "bump", "--q", "5", "--N", "8"], d.path());
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("2<q<k"));
    let r = kaclab(&["transport", "--family", "bump", "--N", "2"], d.path());
    assert_eq!(r.status.code(), Some(2));
    let r = kaclab(&["zcurve", "--family", "uniform", "--N", "8"], d.path());
    assert_eq!(r.status.code(), Some(2));
    let r = kaclab(&["verify", "--family", "file", "--path", "/nonexistent/density.csv", "--N", "8"], d.path());
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn zcurve_outputs() {
    let d = tempfile::tempdir().unwrap();
    let r = kaclab(&["zcurve", "--family", "gaussian", "--N", "8,32"], d.path());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(first_line(&d.path().join("zcurve_N8.csv")), "u,log_z,lambda");
    assert_eq!(first_line(&d.path().join("zcurve_sup.csv")), "N,sup_abs_lambda");
    assert!(fs::read_to_string(d.path().join("zcurve.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn transport_outputs() {
    let d = tempfile::tempdir().unwrap();
    let r = kaclab(&["transport", "--family", "bump", "--N", "16"], d.path());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = fs::read_to_string(d.path().join("transport.csv")).unwrap();
    assert!(csv.starts_with("family,N,q,bound,lhs,rhs,slack,pass"));
    assert!(!csv.contains(",false"));
    assert_eq!(first_line(&d.path().join("tau.csv")), "N,m2,b1,w1,tau_hat");
}

#[test]
fn proptest_subcommand_and_config_file() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.toml");
    fs::write(&cfg, "seed = 3\nholder_cases = 50\npointwise_cases = 500\n[family]\nkind = \"bump\"\nr = 2.0\n").unwrap();
    let r = kaclab(&["--config", cfg.to_str().unwrap(), "proptest"], d.path());
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = fs::read_to_string(d.path().join("proptest.csv")).unwrap();
    assert!(csv.starts_with("suite,seed,cases,violations,min_slack"));
    assert!(csv.contains(",3,50,0,") && csv.contains(",3,500,0,"));
}

#[test]
fn output_directory_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let r = Command::new(env!("CARGO_BIN_EXE_kaclab"))
        .args(["proptest", "--holder-cases", "10", "--pointwise-cases", "10"])
        .env("KACLAB_OUT", d.path())
        .output()
        .unwrap();
    assert_eq!(r.status.code(), Some(0));
    assert!(d.path().join("proptest.csv").exists());
}
