//! The non-cooperative throughput game between the two pairs.
//!
//! Each pair picks Idle, HD or FD and is paid its own throughput. Idle is
//! strictly dominated, and the choice between HD and FD depends only on the
//! pair's own `lambda`: FD doubles both the packets sent and the
//! interference received by the opponent, while self-interference scales
//! every FD packet by `lambda`. Hence FD dominates iff `2 * lambda > 1`, and
//! the game has exactly one pure equilibrium away from that knife edge.

use std::fmt;

use crate::channel::{pair_throughput, DerivedParams, TransmissionMode};

/// Bimatrix of pair throughputs, indexed by `(mode of pair 1, mode of pair 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffMatrix {
    cells: [[(f64, f64); 3]; 3],
}

impl PayoffMatrix {
    /// `(rho1, rho2)` when pair 1 plays `mode1` and pair 2 plays `mode2`.
    pub fn get(&self, mode1: TransmissionMode, mode2: TransmissionMode) -> (f64, f64) {
        self.cells[mode1.index()][mode2.index()]
    }

    /// Payoff of `player` (0 or 1) at the profile.
    pub fn payoff(&self, player: usize, mode1: TransmissionMode, mode2: TransmissionMode) -> f64 {
        let (rho1, rho2) = self.get(mode1, mode2);
        if player == 0 {
            rho1
        } else {
            rho2
        }
    }

    /// All pure profiles from which no player gains by deviating alone.
    pub fn pure_equilibria(&self) -> Vec<(TransmissionMode, TransmissionMode)> {
        let mut found = Vec::new();
        for m1 in TransmissionMode::ALL {
            for m2 in TransmissionMode::ALL {
                let (rho1, rho2) = self.get(m1, m2);
                let stable1 = TransmissionMode::ALL
                    .iter()
                    .all(|&d| self.get(d, m2).0 <= rho1);
                let stable2 = TransmissionMode::ALL
                    .iter()
                    .all(|&d| self.get(m1, d).1 <= rho2);
                if stable1 && stable2 {
                    found.push((m1, m2));
                }
            }
        }
        found
    }
}

/// Fills the bimatrix from each pair's `(lambda, mu)`.
pub fn payoff_matrix(params: &DerivedParams) -> PayoffMatrix {
    let mut cells = [[(0.0, 0.0); 3]; 3];
    for m1 in TransmissionMode::ALL {
        for m2 in TransmissionMode::ALL {
            cells[m1.index()][m2.index()] = (
                pair_throughput(m1, m2, params.lambda1, params.mu1),
                pair_throughput(m2, m1, params.lambda2, params.mu2),
            );
        }
    }
    PayoffMatrix { cells }
}

/// A pair's dominant mode. `boundary` marks the tie `2 * lambda == 1`, where
/// HD and FD pay the same in every column and HD is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dominance {
    pub mode: TransmissionMode,
    pub boundary: bool,
}

pub fn dominant_mode(lambda: f64) -> Dominance {
    let twice = 2.0 * lambda;
    Dominance {
        mode: if twice > 1.0 {
            TransmissionMode::Fd
        } else {
            TransmissionMode::Hd
        },
        boundary: twice == 1.0,
    }
}

/// SI attenuation above which FD strictly dominates HD for a pair at
/// distance `intra_distance`: `theta * R^alpha`.
pub fn dominance_threshold(sir_threshold: f64, intra_distance: f64, path_loss_exp: f64) -> f64 {
    sir_threshold * intra_distance.powf(path_loss_exp)
}

/// Quadrant of the `(lambda1, lambda2)` plane holding the equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    HdHd,
    HdFd,
    FdHd,
    FdFd,
}

impl Region {
    pub fn of(mode1: TransmissionMode, mode2: TransmissionMode) -> Option<Region> {
        use TransmissionMode::*;
        match (mode1, mode2) {
            (Hd, Hd) => Some(Region::HdHd),
            (Hd, Fd) => Some(Region::HdFd),
            (Fd, Hd) => Some(Region::FdHd),
            (Fd, Fd) => Some(Region::FdFd),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Region::HdHd => "HD-HD",
            Region::HdFd => "HD-FD",
            Region::FdHd => "FD-HD",
            Region::FdFd => "FD-FD",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub mode1: TransmissionMode,
    pub mode2: TransmissionMode,
    pub rho1: f64,
    pub rho2: f64,
    pub region: Region,
    /// Set when either pair sits exactly on `2 * lambda == 1`.
    pub boundary: bool,
}

/// The dominant-strategy equilibrium of the game.
pub fn nash_equilibrium(params: &DerivedParams) -> Equilibrium {
    let d1 = dominant_mode(params.lambda1);
    let d2 = dominant_mode(params.lambda2);
    let (rho1, rho2) = payoff_matrix(params).get(d1.mode, d2.mode);
    Equilibrium {
        mode1: d1.mode,
        mode2: d2.mode,
        rho1,
        rho2,
        region: Region::of(d1.mode, d2.mode).expect("dominant modes are never Idle"),
        boundary: d1.boundary || d2.boundary,
    }
}
