use std::fs;
use std::process::{Command, Output};

use aim_core::closed_form::gk_wavefunction;

fn aim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aim"))
        .args(args)
        .env_remove("AIM_MAX_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parsed CSV body as (header, records).
fn csv_table(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn harmonic_levels() {
    let o = aim(&["solve", "--problem", "harmonic1d", "--levels", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_table(&o);
    let e = column(&h, &rows, "E_aim");
    for (got, want) in e.iter().zip([1.0, 3.0, 5.0]) {
        assert!((got - want).abs() < 1e-9, "{e:?}");
    }
}

#[test]
fn quartic_levels_at_depth_forty() {
    let o = aim(&[
        "solve", "--problem", "quartic", "--A", "0.1", "--levels", "6", "--iters", "40", "--format",
        "csv",
    ]);
    // unstabilized levels are reported through exit status 2
    assert!(matches!(o.status.code(), Some(0 | 2)));
    let (h, rows) = csv_table(&o);
    let e = column(&h, &rows, "E_aim");
    assert_eq!(e.len(), 6);
    let printed = [1.065286, 3.306871, 5.747960, 8.352642];
    for (got, want) in e.iter().zip(printed) {
        assert!((got - want).abs() < 1e-5, "{e:?}");
    }
    assert!((e[5] - 13.96695).abs() < 1e-3, "{e:?}");
}

#[test]
fn bad_numbers_and_missing_parameters_exit_one() {
    for args in [
        &["solve", "--problem", "quartic", "--A", "bad"][..],
        &["solve", "--problem", "quartic"],
        &["solve", "--problem", "spiked", "--gamma", "1", "--A", "1"],
        &["solve", "--problem", "custom", "--potential", "x^^2"],
        &["solve", "--problem", "harmonic1d", "--x0", "middle"],
        &["solve", "--problem", "harmonic1d", "--emin", "5", "--emax", "1"],
        &["verify", "--problem", "hermite", "--k", "2"],
    ] {
        let o = aim(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    let o = aim(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reconstruct"));
}

#[test]
fn csv_is_deterministic() {
    let args = ["solve", "--problem", "spiked", "--N", "5", "--A", "10", "--alpha-exp", "1.9", "--format", "csv"];
    let a = aim(&args);
    let b = aim(&args);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(
        text.lines().next().unwrap(),
        "problem,param_json,level,E_aim,E_oracle,E_exact,delta_residual,n_iter,x0,stabilized"
    );
    assert!(text.lines().nth(1).unwrap().starts_with(r#"spiked,"{""gamma"":1,""A"":10,""alpha"":1.9}",0,"#));
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["table2", "--no-oracle", "--format", "csv"];
    let one = Command::new(env!("CARGO_BIN_EXE_aim"))
        .args(args)
        .env("AIM_MAX_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, aim(&args).stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_aim"))
        .args(args)
        .env("AIM_MAX_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# harmonic run\nproblem = harmonic1d\nlevels = 4\nformat = csv\n").unwrap();
    let path = cfg.to_str().unwrap();

    let o = aim(&["--config", path, "solve"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_table(&o).1.len(), 4);

    let o = aim(&["solve", "--config", path, "--levels", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_table(&o).1.len(), 2);

    let o = aim(&["--config", dir.path().join("missing").to_str().unwrap(), "solve"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn resolved_settings_are_echoed() {
    let o = aim(&["solve", "--problem", "gk", "--gamma", "2", "--levels", "1"]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("# iters=12"), "{err}");
    assert!(err.contains("# order=32"), "{err}");
    assert!(err.contains("(min)"), "{err}");
}

#[test]
fn verify_against_exact_and_oracle() {
    let o = aim(&["verify", "--problem", "harmonic1d", "--levels", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_table(&o);
    let oracle = column(&h, &rows, "E_oracle");
    for (got, want) in oracle.iter().zip([1.0, 3.0, 5.0]) {
        assert!((got - want).abs() < 1e-6);
    }

    let o = aim(&["verify", "--problem", "quartic", "--A", "0.1", "--levels", "6", "--check-tol", "1e-4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAILED"));
}

#[test]
fn scan_reports_bracket_midpoints() {
    let o = aim(&["scan", "--problem", "gk", "--gamma", "0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv_table(&o);
    let mids = column(&h, &rows, "E_aim");
    assert_eq!(mids.len(), 3, "{mids:?}");
    for (m, e) in mids.iter().zip([3.0, 7.0, 11.0]) {
        assert!((m - e).abs() <= 0.25);
    }
}

#[test]
fn tables_have_expected_shape() {
    let o = aim(&["table1", "--no-oracle", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, rows) = csv_table(&o);
    let e = column(&h, &rows, "E_aim");
    assert_eq!(e.len(), 9);
    assert!(e.windows(2).all(|w| w[0] < w[1]));
    assert!((e[3] - 9.16309).abs() < 1e-5);

    let o = aim(&["table3", "--format", "csv"]);
    let (h, rows) = csv_table(&o);
    assert_eq!(column(&h, &rows, "E_oracle").len(), 6);
}

#[test]
fn hermite_reconstruction_is_the_polynomial() {
    let o = aim(&["reconstruct", "--problem", "hermite", "--k", "2", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_table(&o);
    assert_eq!(h, ["x", "y", "psi"]);
    let x = column(&h, &rows, "x");
    let y = column(&h, &rows, "y");
    let psi = column(&h, &rows, "psi");
    assert_eq!(x.len(), 101);
    // y(1) = 1 fixes the scale of 2x² − 1
    for i in 0..x.len() {
        let want = 2.0 * x[i] * x[i] - 1.0;
        assert!((y[i] - want).abs() < 1e-6 * want.abs(), "x={} y={} want={want}", x[i], y[i]);
        assert!((psi[i] - want * (-0.5 * x[i] * x[i]).exp()).abs() < 1e-6);
    }
}

#[test]
fn gk_reconstruction_matches_closed_form() {
    let o = aim(&[
        "reconstruct", "--problem", "gk", "--gamma", "2", "--level", "1", "--xmin", "0.5", "--xmax",
        "1.5", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_table(&o);
    let x = column(&h, &rows, "x");
    let psi = column(&h, &rows, "psi");
    let exact: Vec<f64> = x.iter().map(|&r| gk_wavefunction(1, 2.0, r).unwrap()).collect();
    let scale = exact[0] / psi[0];
    for i in 0..x.len() {
        assert!((scale * psi[i] - exact[i]).abs() < 1e-6, "r={}", x[i]);
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("levels.csv");
    let o = aim(&[
        "solve", "--problem", "harmonic1d", "--format", "csv", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn spiked_verify_passes_tight_tolerance() {
    let o = aim(&[
        "verify", "--problem", "spiked", "--gamma", "3", "--A", "0.001", "--alpha-exp", "4", "--levels",
        "1", "--check-tol", "1e-7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn harmonic_ground_state_is_gaussian() {
    let o = aim(&["reconstruct", "--problem", "harmonic1d", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv_table(&o);
    let x = column(&h, &rows, "x");
    let psi = column(&h, &rows, "psi");
    let scale = psi[0] / (-0.5 * x[0] * x[0]).exp();
    for (xi, p) in x.iter().zip(&psi) {
        assert!((p - scale * (-0.5 * xi * xi).exp()).abs() < 1e-8, "x={xi}");
    }
}
