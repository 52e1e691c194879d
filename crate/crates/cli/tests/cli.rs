use std::process::{Command, Output};

use serde_json::Value;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .env_remove("QWALK_MAX_N")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time_s");
    v
}

#[test]
fn verify_ito_hadamard_random_table() {
    let out = qwalk(&[
        "verify-ito",
        "--coin",
        "hadamard",
        "--n",
        "8",
        "--f",
        "random",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["n"], 8);
    assert_eq!(r["coin"], "hadamard");
    assert_eq!(r["f"], "random");
    assert_eq!(r["pass"], true);
    for key in ["residual_step_max", "residual_telescoped"] {
        assert!(r[key].as_f64().unwrap() <= 1e-12, "{key} = {}", r[key]);
    }
}

#[test]
fn identity_coin_is_accepted() {
    let out = qwalk(&["verify-ito", "--coin", "1,0,0,0,0,0,1,0", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["pass"], true);
}

#[test]
fn dist_csv_two_steps() {
    let out = qwalk(&[
        "dist", "--coin", "hadamard", "--alpha", "1,0", "--beta", "0,0", "--n", "2", "--method",
        "paths", "--out", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,prob,psiL_re,psiL_im,psiR_re,psiR_im"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for (row, (x, p)) in rows.iter().zip([(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]) {
        assert_eq!(row.len(), 6);
        assert_eq!(row[0], x);
        assert!((row[1] - p).abs() < 1e-14);
        let norm = row[2].powi(2) + row[3].powi(2) + row[4].powi(2) + row[5].powi(2);
        assert!((norm - row[1]).abs() < 1e-14);
    }
}

#[test]
fn dist_methods_agree() {
    let get = |m: &str| {
        let out = qwalk(&[
            "dist", "--n", "9", "--alpha", "0.6,0", "--beta", "0,-0.8", "--method", m,
        ]);
        assert_eq!(out.status.code(), Some(0));
        report(&out)["rows"].as_array().unwrap().clone()
    };
    let (a, b, c) = (get("paths"), get("recursion"), get("fourier"));
    assert_eq!(a.len(), 10);
    for ((x, y), z) in a.iter().zip(&b).zip(&c) {
        let p = |v: &Value| v["prob"].as_f64().unwrap();
        assert!((p(x) - p(y)).abs() < 1e-12 && (p(x) - p(z)).abs() < 1e-12);
    }
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = qwalk(&["verify-ito", "--n", "3", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn non_unitary_coin_is_rejected() {
    let out = qwalk(&["verify-ito", "--coin", "1,0,1,0,1,0,1,0", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not unitary"));
}

#[test]
fn numerical_failure_exits_one() {
    let out = qwalk(&[
        "classical",
        "--p",
        "0.3",
        "--n",
        "10",
        "--check",
        "ito",
        "--tol",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["pass"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("theorem residual"));
}

#[test]
fn enumeration_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(["verify-ito", "--n", "6"])
        .env("QWALK_MAX_N", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn reports_are_reproducible() {
    let args = ["verify-ito", "--n", "10", "--f", "random", "--seed", "3"];
    let a = without_timing(report(&qwalk(&args)));
    let b = without_timing(report(&qwalk(&args)));
    assert_eq!(a, b);
    let mut threaded = vec!["--threads", "3"];
    threaded.extend(args);
    let mut c = without_timing(report(&qwalk(&threaded)));
    c["argv"] = a["argv"].clone();
    assert_eq!(a, c);
}

#[test]
fn decoherence_falls_back_above_dense_cap() {
    let out = qwalk(&["decoherence", "--n", "9", "--dense-cap", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dense cap"));
    let r = report(&out);
    assert_eq!(r["mode"], "matrix-free");
    assert!((r["grand_sum"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let dense = report(&qwalk(&[
        "decoherence",
        "--n",
        "6",
        "--check",
        "psd,grandsum",
    ]));
    assert_eq!(dense["mode"], "dense");
    assert_eq!(dense["pass"], true);
}

#[test]
fn complex_integrand_is_rejected() {
    let out = qwalk(&["qintegral", "--n", "4", "--f", "endpoint_exp:0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn qintegral_indicator_matches_distribution() {
    let r = report(&qwalk(&["qintegral", "--n", "2", "--f", "cylinder:0"]));
    assert!((r["integral"].as_f64().unwrap() - 0.5).abs() < 1e-14);
}

#[test]
fn tanaka_one_step_local_time_is_the_coin() {
    let r = report(&qwalk(&["tanaka", "--n", "1"]));
    assert_eq!(r["pass"], true);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let lt = &r["local_time_term"];
    let want = [[h, h], [h, -h]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((lt[i][j][0].as_f64().unwrap() - want[i][j]).abs() < 1e-15);
            assert_eq!(lt[i][j][1].as_f64().unwrap(), 0.0);
        }
    }
}

#[test]
fn sweep_subset() {
    let out = qwalk(&["sweep", "--only", "2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["criteria"].as_array().unwrap().len(), 2);
    assert_eq!(qwalk(&["sweep", "--only", "0"]).status.code(), Some(2));
}

#[test]
fn decoherence_matrix_csv() {
    let out = qwalk(&["decoherence", "--n", "2", "--out", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,kp,re,im"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 16);
    let grand_sum: f64 = rows.iter().map(|r| r[2]).sum();
    assert!((grand_sum - 1.0).abs() < 1e-14);

    let capped = qwalk(&[
        "decoherence",
        "--n",
        "8",
        "--dense-cap",
        "4",
        "--out",
        "csv",
    ]);
    assert_eq!(capped.status.code(), Some(2));
}
