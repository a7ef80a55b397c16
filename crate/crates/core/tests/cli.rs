//! End-to-end runs of the driftrec binary: gen -> check -> simulate ->
//! estimate -> bounds -> sweep, exercising the file formats in between.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_driftrec"))
}

#[test]
fn gen_check_simulate_estimate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("theta.mat");
    let traj = dir.path().join("run.traj");
    let est = dir.path().join("est.json");

    let out = bin()
        .args(["gen", "--ensemble", "sparse-shift", "--p", "8", "--k", "2"])
        .args(["--shift", "6", "--seed", "3"])
        .arg("--out")
        .arg(&matrix)
        .output()
        .unwrap();
    assert!(out.status.success(), "gen failed: {}", String::from_utf8_lossy(&out.stderr));

    let out = bin().arg("check").arg("--matrix").arg(&matrix).arg("--row").arg("0").output().unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["row"], 0);
    assert!(report["rho_min"].as_f64().unwrap() > 0.0, "generated matrix must be stable");
    assert!(report["support"].as_array().unwrap().iter().any(|v| v == 0), "diagonal shift is on-support");

    // discrete assumption report additionally carries D
    let out = bin()
        .arg("check")
        .arg("--matrix")
        .arg(&matrix)
        .args(["--row", "0", "--eta", "0.1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["d"].as_f64().unwrap() > 0.0);

    let out = bin()
        .arg("simulate")
        .arg("--matrix")
        .arg(&matrix)
        .args(["--model", "discrete", "--eta", "0.1", "--n", "20000", "--seed", "5"])
        .arg("--out")
        .arg(&traj)
        .output()
        .unwrap();
    assert!(out.status.success(), "simulate failed: {}", String::from_utf8_lossy(&out.stderr));

    let out = bin()
        .arg("estimate")
        .arg("--traj")
        .arg(&traj)
        .args(["--lambda", "0.05"])
        .arg("--out")
        .arg(&est)
        .output()
        .unwrap();
    assert!(out.status.success(), "estimate failed: {}", String::from_utf8_lossy(&out.stderr));

    // the estimated signed support must match the generating matrix
    let est: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&est).unwrap()).unwrap();
    assert_eq!(est["converged"], true);
    let theta = driftrec::io::read_matrix(&matrix).unwrap();
    let signs = est["signed_support"].as_array().unwrap();
    for r in 0..8 {
        for c in 0..8 {
            let want = theta[(r, c)].signum() as i64 * (theta[(r, c)] != 0.0) as i64;
            let got = signs[r].as_array().unwrap()[c].as_i64().unwrap();
            assert_eq!(got, want, "sign mismatch at ({r},{c})");
        }
    }
}

#[test]
fn continuous_simulation_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("theta.mat");
    let traj = dir.path().join("run.traj");

    let out = bin()
        .args(["gen", "--ensemble", "signed-regular", "--p", "10", "--k", "3"])
        .args(["--theta-min", "0.5", "--rho", "0.5", "--seed", "7"])
        .arg("--out")
        .arg(&matrix)
        .output()
        .unwrap();
    assert!(out.status.success(), "gen failed: {}", String::from_utf8_lossy(&out.stderr));

    let out = bin()
        .arg("simulate")
        .arg("--matrix")
        .arg(&matrix)
        .args(["--model", "continuous", "--eta", "0.1", "--t", "50", "--seed", "2"])
        .arg("--out")
        .arg(&traj)
        .output()
        .unwrap();
    assert!(out.status.success(), "simulate failed: {}", String::from_utf8_lossy(&out.stderr));

    let t = driftrec::io::read_trajectory(&traj).unwrap();
    assert_eq!(t.p, 10);
    assert_eq!(t.n(), 500);
    assert_eq!(t.eta, 0.1);
}

#[test]
fn bounds_subcommand_reports() {
    let out = bin()
        .args(["bounds", "--theorem", "1", "--k", "5", "--rho-min", "2.0"])
        .args(["--theta-min", "1.0", "--alpha", "0.5", "--c-min", "0.1"])
        .args(["--p", "100", "--delta", "0.1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["value"].as_f64().unwrap() > 0.0);
    assert!(report["lambda_coeff"].as_f64().unwrap() > 0.0);

    let out = bin()
        .args(["bounds", "--theorem", "lemma7", "--entropy", "10", "--log-alphabet", "4"])
        .args(["--mutual-info", "1", "--denominator", "2.0", "--p", "7"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let expect = (2.0 * 10.0 - 4.0 - 2.0 - 2.0) / (0.5 * 7.0 * 2.0);
    assert!((report["value"].as_f64().unwrap() - expect).abs() < 1e-12);

    // missing parameters are a usage error, not a crash
    let out = bin().args(["bounds", "--theorem", "1", "--k", "5"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn sweep_subcommand_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.cfg");
    std::fs::write(
        &config,
        "ensemble = sparse-shift\n\
         k = 2\n\
         shift = 5\n\
         p = 6\n\
         n = 200, 400\n\
         eta = 0.1\n\
         lambda_points = 6\n\
         instances = 8\n\
         delta = 0.1\n\
         seed = 9\n",
    )
    .unwrap();

    let out = bin().arg("sweep").arg(&config).arg("--out-dir").arg(dir.path()).output().unwrap();
    assert!(out.status.success(), "sweep failed: {}", String::from_utf8_lossy(&out.stderr));

    let results: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("results.json")).unwrap())
            .unwrap();
    assert_eq!(results["cells"].as_array().unwrap().len(), 2);

    let curve = std::fs::read_to_string(dir.path().join("curve_6.csv")).unwrap();
    assert!(curve.starts_with("n_eta,success,se\n"));
    assert_eq!(curve.lines().count(), 3);

    let complexity = std::fs::read_to_string(dir.path().join("complexity.csv")).unwrap();
    assert!(complexity.starts_with("p,n_eta_at_delta\n"));
}

#[test]
fn unknown_ensemble_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["gen", "--ensemble", "nope", "--p", "4"])
        .arg("--out")
        .arg(dir.path().join("x.mat"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown ensemble"));
}
