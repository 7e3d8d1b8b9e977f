mod common;

use common::*;
use tempfile::TempDir;

fn reference(dir: &TempDir) -> String {
    write_config(dir.path(), "ref.cfg", REFERENCE)
        .display()
        .to_string()
}

#[test]
fn analyze_reports_derived_parameters() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("payoff.csv");
    let o = fdd2d(&["analyze", &reference(&dir), "--out", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = stdout(&o);
    assert_eq!(field(&report, "lambda1", "lambda1"), "0.769231");
    assert_eq!(field(&report, "lambda1", "mu1"), "0.842105");
    assert_eq!(field(&report, "lambda1", "tau1"), "0.187500");
    assert_eq!(field(&report, "lambda2", "beta_star2"), "30000.000000");
    assert!(report.contains("(1.295547, 0.709141)"));

    let table = Csv::parse(&std::fs::read_to_string(csv).unwrap());
    assert_eq!(table.header, ["mode1", "mode2", "rho1", "rho2"]);
    assert_eq!(table.rows.len(), 9);
    let fd_fd = table
        .rows
        .iter()
        .position(|r| r[0] == "FD" && r[1] == "FD")
        .unwrap();
    let lambda = oracle_lambda(3.0, 10.0, 4.0, 1e5);
    let mu = oracle_mu(3.0, 1.0, 1.0, 10.0, 20.0, 4.0);
    assert!((table.num(fd_fd, "rho1") - oracle_throughput(2, 2, lambda, mu)).abs() < 1e-12);
}

#[test]
fn analyze_rejects_inconsistent_thresholds() {
    let dir = TempDir::new().unwrap();
    let text = format!("{REFERENCE}sir_threshold_db = 4.77\nrate_bps_hz = 3\n")
        .replace("sir_threshold_linear = 3\n", "");
    let path = write_config(dir.path(), "bad.cfg", &text);
    let o = fdd2d(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(
        msg.contains("sir_threshold_db") && msg.contains("rate_bps_hz"),
        "{msg}"
    );
}

#[test]
fn analyze_rejects_zero_separation() {
    let dir = TempDir::new().unwrap();
    let path = write_config(
        dir.path(),
        "bad.cfg",
        &REFERENCE.replace("separation_m = 20", "separation_m = 0"),
    );
    let o = fdd2d(&["analyze", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("separation_m"));
}

#[test]
fn analyze_missing_file() {
    let o = fdd2d(&["analyze", "/nonexistent/scenario.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn game_symmetric_fd() {
    let (code, out) = run_in_process(&["game", "--lambda1", "0.8", "--lambda2", "0.8"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "NE=FD,FD"), "{out}");
    assert!(out.contains("region: FD-FD"));
}

#[test]
fn game_mixed_region() {
    let (_, out) = run_in_process(&["game", "--lambda1", "0.4", "--lambda2", "0.8"]);
    assert!(out.lines().any(|l| l == "NE=HD,FD"));
    assert!(out.contains("region: HD-FD"));
}

#[test]
fn game_boundary_flag() {
    let (_, out) = run_in_process(&["game", "--lambda1", "0.5", "--lambda2", "0.5"]);
    let line = out.lines().find(|l| l.starts_with("NE=")).unwrap();
    assert_eq!(line, "NE=HD,HD BOUNDARY");
    let (_, out) = run_in_process(&["game", "--lambda1", "0.51", "--lambda2", "0.5"]);
    assert!(out.contains("NE=FD,HD BOUNDARY"));
    let (_, out) = run_in_process(&["game", "--lambda1", "0.51", "--lambda2", "0.49"]);
    assert!(!out.contains("BOUNDARY"));
}

#[test]
fn game_from_scenario() {
    let dir = TempDir::new().unwrap();
    let o = fdd2d(&["game", &reference(&dir)]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("NE=FD,FD"));
    assert!(out.contains("rho1=1.090987"));
}

#[test]
fn game_rejects_out_of_range_lambda() {
    let o = fdd2d(&["game", "--lambda1", "1.5", "--lambda2", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lambda1"));
}

#[test]
fn optimize_anchor_values() {
    let (_, out) = run_in_process(&["optimize", "--lambda", "1", "--mu", "0"]);
    assert_eq!(field(&out, "global", "family"), "mixed-FD");
    assert_eq!(field(&out, "global", "rho"), "0.5");
    let (_, out) = run_in_process(&["optimize", "--lambda", "0.3", "--mu", "0"]);
    assert_eq!(field(&out, "global", "family"), "mixed-HD");
    assert_eq!(field(&out, "global", "rho"), "0.25");
}

#[test]
fn optimize_prints_all_three_edges() {
    let (_, out) = run_in_process(&["optimize", "--lambda", "0.6", "--mu", "0.82"]);
    for edge in ["mixed-HD ", "mixed-FD ", "mixed-hybrid "] {
        assert!(
            out.lines().any(|l| l.starts_with(edge)),
            "{edge} missing in\n{out}"
        );
    }
    let hybrid: f64 = field(&out, "mixed-hybrid", "rho").parse().unwrap();
    let p1 = 13.0 / 18.0;
    let expected = oracle_objective([0.0, p1, 1.0 - p1], 0.6, 0.82);
    assert!((hybrid - expected).abs() < 1e-12);
}

#[test]
fn optimize_oracle_gap() {
    let o = fdd2d(&[
        "optimize", "--lambda", "0.6", "--mu", "0.3", "--oracle", "0.005", "--strict",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let gap: f64 = field(&stdout(&o), "oracle", "gap").parse().unwrap();
    assert!(gap <= 5e-3);
}

#[test]
fn optimize_rejects_bad_lattice_step() {
    let o = fdd2d(&[
        "optimize", "--lambda", "0.6", "--mu", "0.3", "--oracle", "0.3",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn optimize_asymmetric_needs_flag() {
    let dir = TempDir::new().unwrap();
    let path = write_config(dir.path(), "asym.cfg", ASYMMETRIC);
    let o = fdd2d(&["optimize", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--experimental"));

    let o = fdd2d(&[
        "optimize",
        "--scenario",
        path.to_str().unwrap(),
        "--experimental",
        "--oracle",
        "0.05",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("total rho="));
}

#[test]
fn optimize_symmetric_scenario() {
    let dir = TempDir::new().unwrap();
    let o = fdd2d(&["optimize", "--scenario", &reference(&dir)]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "global", "family"), "pure-FD");
}

#[test]
fn simulate_hd_hd_passes() {
    let dir = TempDir::new().unwrap();
    let o = fdd2d(&[
        "simulate",
        &reference(&dir),
        "--modes",
        "HD,HD",
        "--slots",
        "1000000",
        "--seed",
        "11",
    ]);
    assert!(o.status.success());
    let csv = Csv::parse(&stdout(&o));
    assert_eq!(
        csv.header,
        ["estimand", "analytic", "empirical", "ci_half_width", "pass"]
    );
    assert_eq!(csv.rows.len(), 4);
    assert!(csv.rows.iter().all(|r| r[4] == "true"), "{:?}", csv.rows);
    assert!(stderr(&o).contains("4/4"));
}

#[test]
fn simulate_idle_pair_is_exactly_zero() {
    let dir = TempDir::new().unwrap();
    let o = fdd2d(&[
        "simulate",
        &reference(&dir),
        "--modes",
        "Idle,FD",
        "--slots",
        "1000",
    ]);
    let csv = Csv::parse(&stdout(&o));
    let row = csv
        .rows
        .iter()
        .position(|r| r[0] == "pair1_throughput")
        .unwrap();
    assert_eq!(csv.num(row, "empirical"), 0.0);
    assert_eq!(csv.num(row, "ci_half_width"), 0.0);
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "asym.cfg", ASYMMETRIC);
    let args = |seed: &'static str| {
        vec![
            "simulate",
            cfg.to_str().unwrap(),
            "--strategy1",
            "0.2,0.3,0.5",
            "--strategy2",
            "0.1,0.1,0.8",
            "--slots",
            "20000",
            "--seed",
            seed,
        ]
    };
    let a = fdd2d(&args("5")).stdout;
    let b = fdd2d(&args("5")).stdout;
    let c = fdd2d(&args("6")).stdout;
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn simulate_strict_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let o = fdd2d(&[
        "simulate",
        &reference(&dir),
        "--modes",
        "HD,HD",
        "--slots",
        "1",
        "--strict",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn simulate_input_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = reference(&dir);
    for args in [
        vec!["simulate", cfg.as_str(), "--modes", "HD,HD", "--slots", "0"],
        vec!["simulate", cfg.as_str(), "--modes", "HD"],
        vec!["simulate", cfg.as_str()],
        vec![
            "simulate",
            cfg.as_str(),
            "--strategy1",
            "0.5,0.5,0.5",
            "--strategy2",
            "0,1,0",
        ],
    ] {
        assert_eq!(fdd2d(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn simulate_writes_csv_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim.csv");
    let o = fdd2d(&[
        "simulate",
        &reference(&dir),
        "--modes",
        "FD,HD",
        "--slots",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("estimands pass"));
    assert!(std::fs::read_to_string(out)
        .unwrap()
        .starts_with("estimand,"));
}

#[test]
fn sweep_fig7_at_zero() {
    let (_, out) = run_in_process(&["sweep", "fig7"]);
    let csv = Csv::parse(&out);
    assert_eq!(
        csv.header,
        ["mu", "pure_hd", "pure_fd", "mixed_hd", "mixed_fd"]
    );
    assert_eq!(csv.num(0, "mu"), 0.0);
    assert_eq!(csv.num(0, "mixed_fd"), 0.5);
    assert_eq!(csv.num(0, "mixed_hd"), 0.25);
    assert_eq!(csv.num(0, "pure_hd"), 0.0);
    assert_eq!(csv.num(0, "pure_fd"), 0.0);
}

#[test]
fn sweep_fig4_at_one() {
    let (_, out) = run_in_process(&["sweep", "fig4"]);
    let csv = Csv::parse(&out);
    let last = csv.rows.len() - 1;
    assert_eq!(csv.num(last, "lambda"), 1.0);
    assert_eq!(csv.num(last, "mu_lower"), 0.0);
    assert!((csv.num(last, "mu_upper") - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn sweep_fig5_and_fig6_cover_their_lambdas() {
    for (preset, lambdas) in [("fig5", [1.0, 0.6]), ("fig6", [0.5, 0.3])] {
        let (_, out) = run_in_process(&["sweep", preset]);
        let csv = Csv::parse(&out);
        assert_eq!(csv.rows.len(), 202);
        for (i, lambda) in lambdas.into_iter().enumerate() {
            assert_eq!(csv.num(i * 101, "lambda"), lambda);
            assert_eq!(csv.num(i * 101 + 100, "mu"), 1.0);
        }
    }
}

#[test]
fn sweep_numbers_have_enough_digits() {
    let (_, out) = run_in_process(&["sweep", "fig3"]);
    let csv = Csv::parse(&out);
    let cell = &csv.rows[37][csv.col("rho_fd_fd")];
    let mantissa = cell.split('e').next().unwrap().replace(['.', '-'], "");
    assert!(mantissa.len() >= 9, "{cell}");
}

#[test]
fn sweep_unknown_preset() {
    let o = fdd2d(&["sweep", "fig9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_custom_mu() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("mu.csv");
    let o = fdd2d(&[
        "sweep",
        "custom",
        "--var",
        "mu",
        "--lo",
        "0.1",
        "--hi",
        "1",
        "--step",
        "0.05",
        "--lambda",
        "0.45",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = Csv::parse(&std::fs::read_to_string(out).unwrap());
    assert_eq!(csv.header[0], "mu");
    assert_eq!(csv.rows.len(), 19);
    for (i, row) in csv.rows.iter().enumerate() {
        assert_eq!(row[csv.col("ne_mode1")], "HD");
        let mu = csv.num(i, "mu");
        assert!((csv.num(i, "ne_rho1") - mu).abs() < 1e-12);
    }
}

#[test]
fn sweep_custom_scenario_variables() {
    let dir = TempDir::new().unwrap();
    let cfg = reference(&dir);
    let (code, out) = run_in_process(&[
        "sweep",
        "custom",
        "--var",
        "beta-db",
        "--lo",
        "40",
        "--hi",
        "60",
        "--step",
        "10",
        "--scenario",
        &cfg,
    ]);
    assert_eq!(code, 0);
    let csv = Csv::parse(&out);
    let modes: Vec<&str> = csv
        .rows
        .iter()
        .map(|r| r[csv.col("ne_mode1")].as_str())
        .collect();
    // beta* = 3e4, about 44.8 dB
    assert_eq!(modes, ["HD", "FD", "FD"]);

    let (code, out) = run_in_process(&[
        "sweep",
        "custom",
        "--var",
        "d",
        "--lo",
        "10",
        "--hi",
        "40",
        "--step",
        "10",
        "--scenario",
        &cfg,
    ]);
    assert_eq!(code, 0);
    let csv = Csv::parse(&out);
    let mu = oracle_mu(3.0, 1.0, 1.0, 10.0, 40.0, 4.0);
    assert!((csv.num(3, "mu1") - mu).abs() < 1e-12);
}

#[test]
fn sweep_custom_asymmetric_leaves_optimum_blank() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "asym.cfg", ASYMMETRIC);
    let (_, out) = run_in_process(&[
        "sweep",
        "custom",
        "--var",
        "d",
        "--lo",
        "20",
        "--hi",
        "30",
        "--step",
        "5",
        "--scenario",
        cfg.to_str().unwrap(),
    ]);
    let csv = Csv::parse(&out);
    assert!(csv.rows.iter().all(|r| r[csv.col("opt_family")].is_empty()));
}

#[test]
fn sweep_custom_invalid_specs() {
    for args in [
        vec![
            "sweep", "custom", "--var", "mu", "--lo", "0.5", "--hi", "0.2", "--step", "0.1",
            "--lambda", "0.5",
        ],
        vec![
            "sweep", "custom", "--var", "mu", "--lo", "0.1", "--hi", "1.2", "--step", "0.1",
            "--lambda", "0.5",
        ],
        vec![
            "sweep", "custom", "--var", "lambda", "--lo", "0", "--hi", "1", "--step", "0.1",
            "--mu", "0.5",
        ],
        vec![
            "sweep", "custom", "--var", "mu", "--lo", "0.1", "--hi", "1", "--step", "0",
            "--lambda", "0.5",
        ],
        vec![
            "sweep", "custom", "--var", "mu", "--lo", "0.1", "--hi", "1", "--step", "0.1",
        ],
        vec![
            "sweep", "custom", "--var", "d", "--lo", "1", "--hi", "2", "--step", "0.1",
        ],
        vec![
            "sweep", "custom", "--lo", "0.1", "--hi", "1", "--step", "0.1",
        ],
    ] {
        assert_eq!(fdd2d(&args).status.code(), Some(2), "{args:?}");
    }
}
