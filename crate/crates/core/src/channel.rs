//! Physical-layer model of the two pairs and its closed-form consequences.
//!
//! Every received packet sees Rayleigh fading on the useful link, one
//! independently faded interference term per concurrent transmission of the
//! other pair, and (in full duplex) an exponentially distributed residual
//! self-interference. Averaging over the fading reduces the success
//! probability of a packet to `lambda^[FD] * mu^n`, where `n` is the number
//! of packets the other pair sends in the same slot.

use std::fmt;
use std::str::FromStr;

use crate::error::{check, ModelError, Result};

/// Converts a decibel quantity into a linear factor.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// SIR threshold needed to sustain `rate` bits/s/Hz over an AWGN-like link,
/// `2^rate - 1`.
pub fn theta_from_rate(rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate < 0.0 {
        return Err(ModelError::NegativeRate(rate));
    }
    Ok(rate.exp2() - 1.0)
}

/// Inverse of [`theta_from_rate`].
pub fn rate_from_theta(theta: f64) -> f64 {
    theta.ln_1p() / std::f64::consts::LN_2
}

/// Per-slot action of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransmissionMode {
    Idle,
    Hd,
    Fd,
}

impl TransmissionMode {
    pub const ALL: [TransmissionMode; 3] = [
        TransmissionMode::Idle,
        TransmissionMode::Hd,
        TransmissionMode::Fd,
    ];

    /// Packets put on the air in one slot: 0, 1 or 2.
    pub fn packets_sent(self) -> u8 {
        match self {
            TransmissionMode::Idle => 0,
            TransmissionMode::Hd => 1,
            TransmissionMode::Fd => 2,
        }
    }

    /// Position in [`TransmissionMode::ALL`], also the row/column of payoff tables.
    pub fn index(self) -> usize {
        self.packets_sent() as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            TransmissionMode::Idle => "Idle",
            TransmissionMode::Hd => "HD",
            TransmissionMode::Fd => "FD",
        }
    }
}

impl fmt::Display for TransmissionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TransmissionMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "idle" => Ok(TransmissionMode::Idle),
            "hd" => Ok(TransmissionMode::Hd),
            "fd" => Ok(TransmissionMode::Fd),
            other => Err(format!(
                "unknown transmission mode `{other}` (expected Idle, HD or FD)"
            )),
        }
    }
}

/// Radio configuration of one pair. All quantities are linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConfig {
    /// Transmit power of both devices of the pair.
    pub tx_power: f64,
    /// Distance between the two devices, in meters.
    pub intra_distance: f64,
    /// Mean self-interference attenuation, the reciprocal of the mean
    /// residual loop-back coefficient.
    pub si_attenuation: f64,
}

impl PairConfig {
    pub fn new(tx_power: f64, intra_distance: f64, si_attenuation: f64) -> Result<Self> {
        let pair = PairConfig {
            tx_power,
            intra_distance,
            si_attenuation,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn validate(&self) -> Result<()> {
        check(
            positive(self.tx_power),
            "tx_power",
            self.tx_power,
            "positive and finite",
        )?;
        check(
            positive(self.intra_distance),
            "intra_distance",
            self.intra_distance,
            "positive and finite",
        )?;
        check(
            positive(self.si_attenuation),
            "si_attenuation",
            self.si_attenuation,
            "positive and finite",
        )
    }
}

/// Full physical configuration of the two interfering pairs.
///
/// `separation` is the distance between the midpoints of the two pairs and
/// stands in for every cross-link distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub pair1: PairConfig,
    pub pair2: PairConfig,
    pub separation: f64,
    pub path_loss_exp: f64,
    /// Linear SIR threshold.
    pub sir_threshold: f64,
}

impl Scenario {
    pub fn new(
        pair1: PairConfig,
        pair2: PairConfig,
        separation: f64,
        path_loss_exp: f64,
        sir_threshold: f64,
    ) -> Result<Self> {
        let scenario = Scenario {
            pair1,
            pair2,
            separation,
            path_loss_exp,
            sir_threshold,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Both pairs share `pair`.
    pub fn symmetric(
        pair: PairConfig,
        separation: f64,
        path_loss_exp: f64,
        sir_threshold: f64,
    ) -> Result<Self> {
        Scenario::new(pair, pair, separation, path_loss_exp, sir_threshold)
    }

    pub fn validate(&self) -> Result<()> {
        self.pair1.validate()?;
        self.pair2.validate()?;
        check(
            positive(self.separation),
            "separation",
            self.separation,
            "positive and finite",
        )?;
        check(
            self.path_loss_exp >= 2.0 && self.path_loss_exp.is_finite(),
            "path_loss_exp",
            self.path_loss_exp,
            "at least 2",
        )?;
        check(
            positive(self.sir_threshold),
            "sir_threshold",
            self.sir_threshold,
            "positive and finite",
        )
    }

    /// `pair` is 0 or 1.
    pub fn pair(&self, pair: usize) -> &PairConfig {
        match pair {
            0 => &self.pair1,
            _ => &self.pair2,
        }
    }

    /// The same configuration with the two pairs' roles exchanged.
    pub fn swapped(&self) -> Scenario {
        Scenario {
            pair1: self.pair2,
            pair2: self.pair1,
            ..*self
        }
    }
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

/// Abstract per-pair parameters that summarize the physical layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl DerivedParams {
    /// Builds parameters directly from `lambda` and `mu` values, recovering
    /// `tau = 1/mu - 1`. Zero is accepted as the strong-interference limit.
    pub fn from_abstract(lambda1: f64, lambda2: f64, mu1: f64, mu2: f64) -> Result<Self> {
        for (name, value) in [
            ("lambda1", lambda1),
            ("lambda2", lambda2),
            ("mu1", mu1),
            ("mu2", mu2),
        ] {
            check((0.0..=1.0).contains(&value), name, value, "within [0, 1]")?;
        }
        Ok(DerivedParams {
            lambda1,
            lambda2,
            mu1,
            mu2,
            tau1: 1.0 / mu1 - 1.0,
            tau2: 1.0 / mu2 - 1.0,
        })
    }

    pub fn symmetric(lambda: f64, mu: f64) -> Result<Self> {
        DerivedParams::from_abstract(lambda, lambda, mu, mu)
    }

    /// `(lambda, mu)` of pair 0 or 1.
    pub fn pair(&self, pair: usize) -> (f64, f64) {
        match pair {
            0 => (self.lambda1, self.mu1),
            _ => (self.lambda2, self.mu2),
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (self.lambda1 - self.lambda2).abs() <= tol && (self.mu1 - self.mu2).abs() <= tol
    }
}

/// Reduces a scenario to `lambda`, `mu` and `tau` for both pairs.
pub fn derive_params(scenario: &Scenario) -> DerivedParams {
    let theta = scenario.sir_threshold;
    let alpha = scenario.path_loss_exp;
    let d = scenario.separation;

    let lambda =
        |p: &PairConfig| 1.0 / (1.0 + theta * p.intra_distance.powf(alpha) / p.si_attenuation);
    let tau = |own: &PairConfig, other: &PairConfig| {
        theta * (other.tx_power / own.tx_power) * (own.intra_distance / d).powf(alpha)
    };

    let tau1 = tau(&scenario.pair1, &scenario.pair2);
    let tau2 = tau(&scenario.pair2, &scenario.pair1);
    DerivedParams {
        lambda1: lambda(&scenario.pair1),
        lambda2: lambda(&scenario.pair2),
        mu1: 1.0 / (1.0 + tau1),
        mu2: 1.0 / (1.0 + tau2),
        tau1,
        tau2,
    }
}

/// Probability that one packet of a pair in `mode_self` is decoded while the
/// other pair sends `n_opponent_tx` packets.
pub fn success_probability(
    mode_self: TransmissionMode,
    n_opponent_tx: u8,
    lambda: f64,
    mu: f64,
) -> Result<f64> {
    if n_opponent_tx > 2 {
        return Err(ModelError::InterfererCount(n_opponent_tx));
    }
    let external = mu.powi(n_opponent_tx as i32);
    Ok(match mode_self {
        TransmissionMode::Idle => 0.0,
        TransmissionMode::Hd => external,
        TransmissionMode::Fd => lambda * external,
    })
}

/// Expected number of packets a pair delivers in one slot.
pub fn pair_throughput(
    mode_self: TransmissionMode,
    mode_other: TransmissionMode,
    lambda: f64,
    mu: f64,
) -> f64 {
    let n = mode_other.packets_sent();
    let ps = success_probability(mode_self, n, lambda, mu).expect("packets_sent is at most 2");
    mode_self.packets_sent() as f64 * ps
}
