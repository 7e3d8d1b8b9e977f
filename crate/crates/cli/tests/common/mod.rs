#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fdd2d_cli::Cli;

pub const REFERENCE: &str = "\
# theta = 3, R = 10 m, alpha = 4, beta = 1e5, D = 20 m
p1.tx_power_dbm = 20
p1.intra_distance_m = 10
p1.si_attenuation_db = 50
p2.tx_power_dbm = 20
p2.intra_distance_m = 10
p2.si_attenuation_db = 50
separation_m = 20
path_loss_exp = 4
sir_threshold_linear = 3
";

pub const ASYMMETRIC: &str = "\
p1.tx_power_linear = 2
p1.intra_distance_m = 8
p1.si_attenuation_linear = 2e4
p2.tx_power_linear = 0.5
p2.intra_distance_m = 12
p2.si_attenuation_linear = 3e5
separation_m = 25
path_loss_exp = 3.5
sir_threshold_linear = 1.5
";

pub fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn fdd2d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdd2d"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Runs a command in-process and returns `(exit code, stdout)`.
pub fn run_in_process(args: &[&str]) -> (i32, String) {
    use clap::Parser;
    let mut argv = vec!["fdd2d"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv).expect("arguments parse");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = match fdd2d_cli::run(&cli, &mut out, &mut err) {
        Ok(()) => 0,
        Err(e) => e.exit_code(),
    };
    (code, String::from_utf8(out).unwrap())
}

/// Value of `key=` on the first line starting with `prefix`.
pub fn field(report: &str, prefix: &str, key: &str) -> String {
    let line = report
        .lines()
        .find(|l| l.starts_with(prefix))
        .unwrap_or_else(|| panic!("no line starting with {prefix} in\n{report}"));
    let needle = format!("{key}=");
    let start = line
        .find(&needle)
        .unwrap_or_else(|| panic!("no {key} in {line}"))
        + needle.len();
    line[start..].split_whitespace().next().unwrap().to_string()
}

pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn parse(text: &str) -> Csv {
        let mut lines = text.lines();
        let header = lines.next().unwrap().split(',').map(String::from).collect();
        let rows = lines
            .map(|l| l.split(',').map(String::from).collect())
            .collect();
        Csv { header, rows }
    }

    pub fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name}"))
    }

    pub fn num(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.col(name)].parse().unwrap()
    }
}

// Closed forms written out directly from the model, kept apart from the
// library so the two can be compared.

pub fn oracle_lambda(theta: f64, r: f64, alpha: f64, beta: f64) -> f64 {
    1.0 / (1.0 + theta * r.powf(alpha) / beta)
}

pub fn oracle_mu(theta: f64, p_own: f64, p_other: f64, r: f64, d: f64, alpha: f64) -> f64 {
    1.0 / (1.0 + theta * (p_other / p_own) * (r / d).powf(alpha))
}

/// Packets delivered per slot: `own` and `other` are 0 (Idle), 1 (HD) or 2 (FD).
pub fn oracle_throughput(own: u8, other: u8, lambda: f64, mu: f64) -> f64 {
    match own {
        0 => 0.0,
        1 => mu.powi(other as i32),
        _ => 2.0 * lambda * mu.powi(other as i32),
    }
}

pub fn oracle_objective(p: [f64; 3], lambda: f64, mu: f64) -> f64 {
    let mut rho = 0.0;
    for a in 0..3u8 {
        for b in 0..3u8 {
            rho += p[a as usize] * p[b as usize] * oracle_throughput(a, b, lambda, mu);
        }
    }
    rho
}
