//! Figure presets and custom one-dimensional sweeps.

use fdd2d_core::optimizer::hybrid_limits;
use fdd2d_core::{
    db_to_linear, derive_params, global_optimum, mixed_fd_optimum, mixed_hd_optimum,
    mixed_hybrid_optimum, nash_equilibrium, pair_throughput, DerivedParams, Scenario,
    TransmissionMode,
};

use crate::error::{CliError, Result};
use crate::table::{Cell, Table};

/// Largest number of grid points a custom sweep may produce.
pub const MAX_POINTS: usize = 1_000_000;

/// Symmetry tolerance for reporting the cooperative optimum.
const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

/// Evenly spaced points from `lo` to `hi`. When `step` divides the range the
/// points are computed as weighted averages of the ends so that `hi` is hit
/// exactly; otherwise the grid stops at the last point below `hi`.
pub fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let span = hi - lo;
    let n = (span / step).round();
    if (n * step - span).abs() <= 1e-9 * span.abs().max(step) {
        let n = n as usize;
        (0..=n)
            .map(|i| (lo * (n - i) as f64 + hi * i as f64) / n as f64)
            .collect()
    } else {
        let n = (span / step).floor() as usize;
        (0..=n).map(|i| lo + i as f64 * step).collect()
    }
}

fn unit_grid() -> Vec<f64> {
    grid(0.0, 1.0, 0.01)
}

pub fn preset(which: Preset) -> Table {
    match which {
        Preset::Fig3 => fig3(),
        Preset::Fig4 => fig4(),
        Preset::Fig5 => families(&[1.0, 0.6]),
        Preset::Fig6 => families(&[0.5, 0.3]),
        Preset::Fig7 => fig7(),
    }
}

/// Player 1 throughput in the four pure HD/FD profiles at `lambda1 = 0.8`.
fn fig3() -> Table {
    use TransmissionMode::{Fd, Hd};
    let lambda = 0.8;
    let mut t = Table::new(&["mu", "rho_hd_hd", "rho_hd_fd", "rho_fd_hd", "rho_fd_fd"]);
    for mu in unit_grid() {
        let mut row = vec![Cell::Num(mu)];
        for (own, other) in [(Hd, Hd), (Hd, Fd), (Fd, Hd), (Fd, Fd)] {
            row.push(pair_throughput(own, other, lambda, mu).into());
        }
        t.push(row);
    }
    t
}

/// Limits of the interior hybrid branch for `lambda` in `(0.25, 1]`.
fn fig4() -> Table {
    let mut t = Table::new(&["lambda", "mu_lower", "mu_upper"]);
    for lambda in grid(0.25, 1.0, 0.01).into_iter().skip(1) {
        let (lower, upper) = hybrid_limits(lambda);
        t.push(vec![lambda.into(), lower.into(), upper.into()]);
    }
    t
}

fn families(lambdas: &[f64]) -> Table {
    let mut t = Table::new(&[
        "lambda",
        "mu",
        "mixed_hd",
        "mixed_fd",
        "mixed_hybrid",
        "best",
    ]);
    for &lambda in lambdas {
        for mu in unit_grid() {
            t.push(vec![
                lambda.into(),
                mu.into(),
                mixed_hd_optimum(mu).rho.into(),
                mixed_fd_optimum(lambda, mu).rho.into(),
                mixed_hybrid_optimum(lambda, mu).rho.into(),
                global_optimum(lambda, mu).family.label().into(),
            ]);
        }
    }
    t
}

/// Equilibrium versus cooperative policies at `lambda = 1`.
fn fig7() -> Table {
    use TransmissionMode::{Fd, Hd};
    let lambda = 1.0;
    let mut t = Table::new(&["mu", "pure_hd", "pure_fd", "mixed_hd", "mixed_fd"]);
    for mu in unit_grid() {
        t.push(vec![
            mu.into(),
            pair_throughput(Hd, Hd, lambda, mu).into(),
            pair_throughput(Fd, Fd, lambda, mu).into(),
            mixed_hd_optimum(mu).rho.into(),
            mixed_fd_optimum(lambda, mu).rho.into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    Mu,
    Lambda,
    BetaDb,
    Separation,
}

impl SweepVar {
    pub fn column(self) -> &'static str {
        match self {
            SweepVar::Mu => "mu",
            SweepVar::Lambda => "lambda",
            SweepVar::BetaDb => "beta_db",
            SweepVar::Separation => "d",
        }
    }
}

/// A custom sweep. `mu` and `lambda` sweeps are symmetric and need the other
/// abstract parameter fixed; `beta_db` and `d` sweeps modify a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub var: SweepVar,
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub scenario: Option<Scenario>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.lo, self.hi, self.step].iter().all(|x| x.is_finite());
        if !finite || self.lo >= self.hi {
            return Err(usage(format!(
                "--lo ({}) must be below --hi ({})",
                self.lo, self.hi
            )));
        }
        if self.step <= 0.0 {
            return Err(usage(format!("--step must be positive, got {}", self.step)));
        }
        if (self.hi - self.lo) / self.step >= MAX_POINTS as f64 {
            return Err(usage(format!(
                "--step {} gives more than {MAX_POINTS} points",
                self.step
            )));
        }
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(usage(format!("{name} must lie in (0, 1], got {v}")))
            }
        };
        match self.var {
            SweepVar::Mu | SweepVar::Lambda => {
                unit("--lo", self.lo)?;
                unit("--hi", self.hi)?;
                let (flag, fixed) = match self.var {
                    SweepVar::Mu => ("--lambda", self.lambda),
                    _ => ("--mu", self.mu),
                };
                let fixed = fixed
                    .ok_or_else(|| usage(format!("a {} sweep needs {flag}", self.var.column())))?;
                unit(flag, fixed)
            }
            SweepVar::BetaDb | SweepVar::Separation => {
                if self.scenario.is_none() {
                    return Err(usage(format!(
                        "a {} sweep needs --scenario",
                        self.var.column()
                    )));
                }
                if self.var == SweepVar::Separation && self.lo <= 0.0 {
                    return Err(usage(format!(
                        "separation must be positive, got {}",
                        self.lo
                    )));
                }
                Ok(())
            }
        }
    }

    fn params_at(&self, x: f64) -> Result<DerivedParams> {
        let params = match self.var {
            SweepVar::Mu => DerivedParams::symmetric(self.lambda.unwrap_or_default(), x)?,
            SweepVar::Lambda => DerivedParams::symmetric(x, self.mu.unwrap_or_default())?,
            SweepVar::BetaDb | SweepVar::Separation => {
                let mut s = self.scenario.expect("validated");
                if self.var == SweepVar::BetaDb {
                    s.pair1.si_attenuation = db_to_linear(x);
                    s.pair2.si_attenuation = db_to_linear(x);
                } else {
                    s.separation = x;
                }
                s.validate()?;
                derive_params(&s)
            }
        };
        Ok(params)
    }

    pub fn run(&self) -> Result<Table> {
        self.validate()?;
        let mut t = Table::new(&[
            self.var.column(),
            "lambda1",
            "lambda2",
            "mu1",
            "mu2",
            "ne_mode1",
            "ne_mode2",
            "ne_rho1",
            "ne_rho2",
            "opt_family",
            "opt_rho",
        ]);
        for x in grid(self.lo, self.hi, self.step) {
            let p = self.params_at(x)?;
            let ne = nash_equilibrium(&p);
            let (family, rho) = if p.is_symmetric(SYMMETRY_TOLERANCE) {
                let opt = global_optimum(p.lambda1, p.mu1);
                (opt.family.label().into(), opt.rho.into())
            } else {
                (Cell::Empty, Cell::Empty)
            };
            t.push(vec![
                x.into(),
                p.lambda1.into(),
                p.lambda2.into(),
                p.mu1.into(),
                p.mu2.into(),
                ne.mode1.label().into(),
                ne.mode2.label().into(),
                ne.rho1.into(),
                ne.rho2.into(),
                family,
                rho,
            ]);
        }
        Ok(t)
    }
}
