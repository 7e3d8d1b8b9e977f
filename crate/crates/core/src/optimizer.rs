//! Cooperative mixed-strategy optimum for the symmetric configuration.
//!
//! Both pairs draw their mode every slot from the same distribution
//! `(p_idle, p_hd, p_fd)` and the expected per-pair throughput is
//!
//! ```text
//! rho = p0 p1 + mu p1^2 + mu^2 p1 p2 + 2 lambda p2 p0 + 2 lambda mu p2 p1 + 2 lambda mu^2 p2^2
//! ```
//!
//! The objective has no interior maximum on the simplex, so the optimum sits
//! on one of the three edges: mixed HD (`p_fd = 0`), mixed FD (`p_hd = 0`)
//! or mixed hybrid (`p_idle = 0`). Each edge is a one-dimensional quadratic
//! with a closed-form maximizer. [`brute_force_optimum`] searches the whole
//! closed simplex on a lattice and serves as the independent check.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use rayon::prelude::*;

use crate::channel::{pair_throughput, DerivedParams, TransmissionMode};
use crate::error::{ModelError, Result};

/// Tolerance on `p_idle + p_hd + p_fd = 1`.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// Gradient norm below which a scanned grid point counts as stationary.
pub const GRADIENT_TOLERANCE: f64 = 1e-9;

/// Default lattice step of [`brute_force_optimum`].
pub const DEFAULT_LATTICE_STEP: f64 = 0.005;

/// Default grid step of [`interior_stationarity_scan`].
pub const DEFAULT_SCAN_STEP: f64 = 0.01;

/// Finest lattice allowed for the asymmetric search over two simplices.
pub const MIN_ASYMMETRIC_STEP: f64 = 0.02;

/// A later family must beat the incumbent by more than this to win.
const TIE_TOLERANCE: f64 = 1e-12;

/// Probability distribution over Idle, HD and FD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedStrategy {
    p_idle: f64,
    p_hd: f64,
    p_fd: f64,
}

impl MixedStrategy {
    pub fn new(p_idle: f64, p_hd: f64, p_fd: f64) -> Result<Self> {
        let probs = [p_idle, p_hd, p_fd];
        let in_range = probs.iter().all(|p| (0.0..=1.0).contains(p));
        if !in_range || (probs.iter().sum::<f64>() - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(ModelError::OffSimplex(p_idle, p_hd, p_fd));
        }
        Ok(MixedStrategy { p_idle, p_hd, p_fd })
    }

    /// Always plays `mode`.
    pub fn pure(mode: TransmissionMode) -> Self {
        let mut probs = [0.0; 3];
        probs[mode.index()] = 1.0;
        MixedStrategy {
            p_idle: probs[0],
            p_hd: probs[1],
            p_fd: probs[2],
        }
    }

    pub fn p_idle(&self) -> f64 {
        self.p_idle
    }

    pub fn p_hd(&self) -> f64 {
        self.p_hd
    }

    pub fn p_fd(&self) -> f64 {
        self.p_fd
    }

    /// `[p_idle, p_hd, p_fd]`, indexed like [`TransmissionMode::index`].
    pub fn probs(&self) -> [f64; 3] {
        [self.p_idle, self.p_hd, self.p_fd]
    }

    pub fn prob(&self, mode: TransmissionMode) -> f64 {
        self.probs()[mode.index()]
    }

    /// Maps a uniform draw in `[0, 1)` to a mode by inverting the CDF.
    pub fn sample(&self, u: f64) -> TransmissionMode {
        if u < self.p_idle {
            TransmissionMode::Idle
        } else if u < self.p_idle + self.p_hd {
            TransmissionMode::Hd
        } else {
            TransmissionMode::Fd
        }
    }
}

impl fmt::Display for MixedStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.p_idle, self.p_hd, self.p_fd)
    }
}

/// Edge of the simplex a solution was found on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Boundary {
    MixedHd,
    MixedFd,
    MixedHybrid,
}

impl Boundary {
    pub const ALL: [Boundary; 3] = [Boundary::MixedHd, Boundary::MixedFd, Boundary::MixedHybrid];

    pub fn family(self) -> Family {
        match self {
            Boundary::MixedHd => Family::MixedHd,
            Boundary::MixedFd => Family::MixedFd,
            Boundary::MixedHybrid => Family::MixedHybrid,
        }
    }
}

/// Reported policy family. Degenerate edge solutions collapse to the pure
/// strategies of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    PureHd,
    PureFd,
    MixedHd,
    MixedFd,
    MixedHybrid,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::PureHd => "pure-HD",
            Family::PureFd => "pure-FD",
            Family::MixedHd => "mixed-HD",
            Family::MixedFd => "mixed-FD",
            Family::MixedHybrid => "mixed-hybrid",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicySolution {
    pub family: Family,
    /// Edge maximizer that produced the solution, before canonicalization.
    pub boundary: Boundary,
    pub strategy: MixedStrategy,
    pub rho: f64,
}

impl PolicySolution {
    fn on_boundary(boundary: Boundary, strategy: MixedStrategy, lambda: f64, mu: f64) -> Self {
        let family = if strategy.p_hd == 1.0 {
            Family::PureHd
        } else if strategy.p_fd == 1.0 {
            Family::PureFd
        } else {
            boundary.family()
        };
        PolicySolution {
            family,
            boundary,
            strategy,
            rho: mixed_objective(&strategy, lambda, mu),
        }
    }
}

fn rho_of(p0: f64, p1: f64, p2: f64, lambda: f64, mu: f64) -> f64 {
    let mu2 = mu * mu;
    p0 * p1
        + mu * p1 * p1
        + mu2 * p1 * p2
        + 2.0 * lambda * p2 * p0
        + 2.0 * lambda * mu * p2 * p1
        + 2.0 * lambda * mu2 * p2 * p2
}

/// Expected throughput of one pair when both pairs independently follow
/// `strategy` and share `lambda` and `mu`.
pub fn mixed_objective(strategy: &MixedStrategy, lambda: f64, mu: f64) -> f64 {
    rho_of(strategy.p_idle, strategy.p_hd, strategy.p_fd, lambda, mu)
}

/// The objective as a function of `(p_idle, p_hd)` with `p_fd = 1 - p_idle - p_hd`.
pub fn reduced_objective(p_idle: f64, p_hd: f64, lambda: f64, mu: f64) -> f64 {
    rho_of(p_idle, p_hd, 1.0 - p_idle - p_hd, lambda, mu)
}

/// Analytic gradient of [`reduced_objective`] with respect to `(p_idle, p_hd)`.
pub fn reduced_gradient(p_idle: f64, p_hd: f64, lambda: f64, mu: f64) -> [f64; 2] {
    let (p0, p1) = (p_idle, p_hd);
    let p2 = 1.0 - p0 - p1;
    let mu2 = mu * mu;
    let d0 = p1 + 2.0 * lambda * p2;
    let d1 = p0 + 2.0 * mu * p1 + mu2 * p2 + 2.0 * lambda * mu * p2;
    let d2 = mu2 * p1 + 2.0 * lambda * p0 + 2.0 * lambda * mu * p1 + 4.0 * lambda * mu2 * p2;
    [d0 - d2, d1 - d2]
}

/// Best mix of HD and Idle.
pub fn mixed_hd_optimum(mu: f64) -> PolicySolution {
    debug_assert!((0.0..=1.0).contains(&mu));
    let p_hd = if mu < 0.5 {
        1.0 / (2.0 * (1.0 - mu))
    } else {
        1.0
    };
    let strategy = MixedStrategy {
        p_idle: 1.0 - p_hd,
        p_hd,
        p_fd: 0.0,
    };
    let mut sol = PolicySolution::on_boundary(Boundary::MixedHd, strategy, 0.0, mu);
    sol.rho = if mu < 0.5 {
        1.0 / (4.0 * (1.0 - mu))
    } else {
        mu
    };
    sol
}

/// Best mix of FD and Idle.
pub fn mixed_fd_optimum(lambda: f64, mu: f64) -> PolicySolution {
    debug_assert!((0.0..=1.0).contains(&mu));
    let mu2 = mu * mu;
    let split = mu < FRAC_1_SQRT_2;
    let p_fd = if split {
        1.0 / (2.0 * (1.0 - mu2))
    } else {
        1.0
    };
    let strategy = MixedStrategy {
        p_idle: 1.0 - p_fd,
        p_hd: 0.0,
        p_fd,
    };
    let mut sol = PolicySolution::on_boundary(Boundary::MixedFd, strategy, lambda, mu);
    sol.rho = if split {
        lambda / (2.0 * (1.0 - mu2))
    } else {
        2.0 * lambda * mu2
    };
    sol
}

/// Which piece of the hybrid maximizer applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HybridBranch {
    /// `p_hd = 1`
    PureHd,
    /// `0 < p_hd < 1`
    Interior,
    /// `p_hd = 0`
    PureFd,
}

/// Lower and upper `mu` limits of the interior hybrid branch,
/// `2 (1 - lambda)` and `2 lambda / (4 lambda - 1)`.
pub fn hybrid_limits(lambda: f64) -> (f64, f64) {
    (2.0 * (1.0 - lambda), 2.0 * lambda / (4.0 * lambda - 1.0))
}

/// Whether the hybrid limits are ordered as `0 < lower < upper < 1`.
pub fn hybrid_limits_ordered(lambda: f64) -> bool {
    let (lower, upper) = hybrid_limits(lambda);
    0.0 < lower && lower < upper && upper < 1.0
}

pub fn hybrid_branch(lambda: f64, mu: f64) -> HybridBranch {
    let (lower, upper) = hybrid_limits(lambda);
    if lambda <= 0.5 || mu <= lower {
        HybridBranch::PureHd
    } else if mu >= upper {
        HybridBranch::PureFd
    } else {
        HybridBranch::Interior
    }
}

/// Best mix of HD and FD. The value is obtained by substituting the
/// maximizer back into the objective.
pub fn mixed_hybrid_optimum(lambda: f64, mu: f64) -> PolicySolution {
    debug_assert!((0.0..=1.0).contains(&mu));
    let p_hd = match hybrid_branch(lambda, mu) {
        HybridBranch::PureHd => 1.0,
        HybridBranch::PureFd => 0.0,
        HybridBranch::Interior => {
            let p =
                (4.0 * lambda * mu - 2.0 * lambda - mu) / (2.0 * (1.0 - 2.0 * lambda) * (1.0 - mu));
            p.clamp(0.0, 1.0)
        }
    };
    let strategy = MixedStrategy {
        p_idle: 0.0,
        p_hd,
        p_fd: 1.0 - p_hd,
    };
    PolicySolution::on_boundary(Boundary::MixedHybrid, strategy, lambda, mu)
}

/// Compares the three edge maxima. Ties go to the earlier family in the
/// order mixed HD, mixed FD, mixed hybrid.
pub fn global_optimum(lambda: f64, mu: f64) -> PolicySolution {
    let candidates = [
        mixed_hd_optimum(mu),
        mixed_fd_optimum(lambda, mu),
        mixed_hybrid_optimum(lambda, mu),
    ];
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if c.rho > best.rho + TIE_TOLERANCE {
            best = *c;
        }
    }
    best
}

/// Outcome of scanning the open simplex for interior maxima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityReport {
    /// Largest objective value over interior grid points.
    pub max_interior_rho: f64,
    pub argmax: MixedStrategy,
    /// Some grid point has gradient norm below [`GRADIENT_TOLERANCE`] and is
    /// no smaller than its grid neighbours.
    pub any_stationary_point: bool,
    pub min_gradient_norm: f64,
    /// Solution of `grad = 0`, if it lies strictly inside the simplex and the
    /// (constant) Hessian is negative definite there.
    pub interior_maximum: Option<MixedStrategy>,
}

/// Evaluates the objective and its gradient on every interior grid point.
pub fn interior_stationarity_scan(
    lambda: f64,
    mu: f64,
    grid_step: f64,
) -> Result<StationarityReport> {
    if !(grid_step > 0.0 && grid_step <= 0.1) {
        return Err(ModelError::GridStep {
            step: grid_step,
            max: 0.1,
        });
    }
    let n = (1.0 / grid_step + 1e-9).floor() as i64;
    let interior = |i: i64, j: i64| i >= 1 && j >= 1 && ((i + j) as f64) * grid_step < 1.0 - 1e-12;
    let value =
        |i: i64, j: i64| reduced_objective(i as f64 * grid_step, j as f64 * grid_step, lambda, mu);

    let mut max_rho = f64::NEG_INFINITY;
    let mut argmax = (0, 0);
    let mut min_norm = f64::INFINITY;
    let mut any_stationary = false;
    for i in 1..n {
        for j in 1..n {
            if !interior(i, j) {
                continue;
            }
            let rho = value(i, j);
            if rho > max_rho {
                max_rho = rho;
                argmax = (i, j);
            }
            let [g0, g1] = reduced_gradient(i as f64 * grid_step, j as f64 * grid_step, lambda, mu);
            let norm = g0.hypot(g1);
            min_norm = min_norm.min(norm);
            if norm < GRADIENT_TOLERANCE {
                let local_max = (-1..=1).all(|di| {
                    (-1..=1).all(|dj| !interior(i + di, j + dj) || value(i + di, j + dj) <= rho)
                });
                any_stationary |= local_max;
            }
        }
    }
    if max_rho == f64::NEG_INFINITY {
        return Err(ModelError::GridStep {
            step: grid_step,
            max: 0.1,
        });
    }

    let (p0, p1) = (argmax.0 as f64 * grid_step, argmax.1 as f64 * grid_step);
    Ok(StationarityReport {
        max_interior_rho: max_rho,
        argmax: MixedStrategy {
            p_idle: p0,
            p_hd: p1,
            p_fd: 1.0 - p0 - p1,
        },
        any_stationary_point: any_stationary,
        min_gradient_norm: min_norm,
        interior_maximum: interior_stationary_maximum(lambda, mu),
    })
}

/// The gradient is affine, so the Hessian is read off exactly from
/// gradient differences and the stationary point solves a 2x2 system.
fn interior_stationary_maximum(lambda: f64, mu: f64) -> Option<MixedStrategy> {
    let g = reduced_gradient(0.0, 0.0, lambda, mu);
    let ge0 = reduced_gradient(1.0, 0.0, lambda, mu);
    let ge1 = reduced_gradient(0.0, 1.0, lambda, mu);
    let h = [
        [ge0[0] - g[0], ge1[0] - g[0]],
        [ge0[1] - g[1], ge1[1] - g[1]],
    ];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let negative_definite = h[0][0] < 0.0 && det > 0.0;
    if !negative_definite {
        return None;
    }
    // H x = -g
    let p0 = (-g[0] * h[1][1] + g[1] * h[0][1]) / det;
    let p1 = (-g[1] * h[0][0] + g[0] * h[1][0]) / det;
    let p2 = 1.0 - p0 - p1;
    (p0 > 0.0 && p1 > 0.0 && p2 > 0.0).then_some(MixedStrategy {
        p_idle: p0,
        p_hd: p1,
        p_fd: p2,
    })
}

fn lattice_size(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(ModelError::LatticeStep(step));
    }
    let n = (1.0 / step).round();
    if (n * step - 1.0).abs() > 1e-9 {
        return Err(ModelError::LatticeStep(step));
    }
    Ok(n as usize)
}

/// Prefers the larger value, then the smaller lattice index.
fn better(a: (f64, usize, usize), b: (f64, usize, usize)) -> (f64, usize, usize) {
    if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
        b
    } else {
        a
    }
}

/// Exhaustive search of the objective over the simplex lattice with spacing
/// `step`. Deterministic regardless of how the work is split across threads.
pub fn brute_force_optimum(lambda: f64, mu: f64, step: f64) -> Result<(MixedStrategy, f64)> {
    let n = lattice_size(step)?;
    let nf = n as f64;
    let (rho, i, j) = (0..=n)
        .into_par_iter()
        .map(|i| {
            (0..=n - i)
                .map(|j| {
                    let k = n - i - j;
                    (
                        rho_of(i as f64 / nf, j as f64 / nf, k as f64 / nf, lambda, mu),
                        i,
                        j,
                    )
                })
                .fold((f64::NEG_INFINITY, usize::MAX, usize::MAX), better)
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX, usize::MAX), better);
    let strategy = MixedStrategy {
        p_idle: i as f64 / nf,
        p_hd: j as f64 / nf,
        p_fd: (n - i - j) as f64 / nf,
    };
    Ok((strategy, rho))
}

/// Result of the cooperative search for two pairs with different parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymmetricSolution {
    pub strategy1: MixedStrategy,
    pub strategy2: MixedStrategy,
    pub rho1: f64,
    pub rho2: f64,
}

impl AsymmetricSolution {
    pub fn total(&self) -> f64 {
        self.rho1 + self.rho2
    }
}

/// Expected throughputs `(rho1, rho2)` when the pairs independently follow
/// their own mixed strategies.
pub fn expected_throughputs(
    params: &DerivedParams,
    strategy1: &MixedStrategy,
    strategy2: &MixedStrategy,
) -> (f64, f64) {
    let mut rho = (0.0, 0.0);
    for a in TransmissionMode::ALL {
        for b in TransmissionMode::ALL {
            let w = strategy1.prob(a) * strategy2.prob(b);
            if w == 0.0 {
                continue;
            }
            rho.0 += w * pair_throughput(a, b, params.lambda1, params.mu1);
            rho.1 += w * pair_throughput(b, a, params.lambda2, params.mu2);
        }
    }
    rho
}

/// Experimental: maximizes the sum throughput over two independent simplex
/// lattices. Only the symmetric case has closed forms.
pub fn brute_force_asymmetric(params: &DerivedParams, step: f64) -> Result<AsymmetricSolution> {
    if step < MIN_ASYMMETRIC_STEP {
        return Err(ModelError::GridStep {
            step,
            max: MIN_ASYMMETRIC_STEP,
        });
    }
    let n = lattice_size(step)?;
    let nf = n as f64;
    let lattice: Vec<[f64; 3]> = (0..=n)
        .flat_map(|i| {
            (0..=n - i).map(move |j| [i as f64 / nf, j as f64 / nf, (n - i - j) as f64 / nf])
        })
        .collect();

    let mut u1 = [[0.0; 3]; 3];
    let mut u2 = [[0.0; 3]; 3];
    for a in TransmissionMode::ALL {
        for b in TransmissionMode::ALL {
            u1[a.index()][b.index()] = pair_throughput(a, b, params.lambda1, params.mu1);
            u2[a.index()][b.index()] = pair_throughput(b, a, params.lambda2, params.mu2);
        }
    }

    let (_, ix, iy) = (0..lattice.len())
        .into_par_iter()
        .map(|ix| {
            let x = &lattice[ix];
            let mut row = [0.0; 3];
            for (b, r) in row.iter_mut().enumerate() {
                *r = (0..3).map(|a| x[a] * (u1[a][b] + u2[a][b])).sum();
            }
            lattice
                .iter()
                .enumerate()
                .map(|(iy, y)| (row[0] * y[0] + row[1] * y[1] + row[2] * y[2], ix, iy))
                .fold((f64::NEG_INFINITY, usize::MAX, usize::MAX), better)
        })
        .reduce(|| (f64::NEG_INFINITY, usize::MAX, usize::MAX), better);

    let to_strategy = |p: [f64; 3]| MixedStrategy {
        p_idle: p[0],
        p_hd: p[1],
        p_fd: p[2],
    };
    let strategy1 = to_strategy(lattice[ix]);
    let strategy2 = to_strategy(lattice[iy]);
    let (rho1, rho2) = expected_throughputs(params, &strategy1, &strategy2);
    Ok(AsymmetricSolution {
        strategy1,
        strategy2,
        rho1,
        rho2,
    })
}
