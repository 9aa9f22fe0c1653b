use std::process::Command;

fn planted(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_planted")).args(args).output().unwrap()
}

#[test]
fn sample_then_recover() {
    let dir = tempfile::tempdir().unwrap();
    let obs = dir.path().join("obs.plnt");
    let sig = dir.path().join("sig.txt");
    let rec = dir.path().join("rec.json");
    let (obs_s, sig_s, rec_s) = (obs.to_str().unwrap(), sig.to_str().unwrap(), rec.to_str().unwrap());
    let out = planted(&[
        "sample", "--model", "pds", "--n", "30", "--r", "2", "--rho", "0.3", "--q0", "0.3", "--q1", "0.9", "--seed",
        "1", "--out", obs_s, "--signal", sig_s,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = planted(&[
        "recover", "--model", "pds", "--input", obs_s, "--rho", "0.3", "--q0", "0.3", "--q1", "0.9", "--ell", "1",
        "--trials", "10", "--no-preprocess", "--out", rec_s,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&rec).unwrap()).unwrap();
    assert_eq!(report["k"], 5);
    assert!(!report["s_hat"].as_array().unwrap().is_empty());
}

#[test]
fn oracle_and_cumulant_reports() {
    let out = planted(&["oracle", "--model", "pds", "--n", "3", "--r", "2", "--D", "1", "--rho", "1/3", "--q0", "1/4", "--q1", "2/3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("corr_sq").is_some());
    let out = planted(&["cumulant", "--alpha", "0-1:2", "--lambda", "1/2", "--m", "2", "--n", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.get("kappa").is_some());
    let out = planted(&["oracle", "--model", "pds", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    let ok = planted(&["verify", "--level", "fast"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = planted(&["verify", "--level", "fast", "--inject-fault"]);
    assert_eq!(bad.status.code(), Some(1));
}
