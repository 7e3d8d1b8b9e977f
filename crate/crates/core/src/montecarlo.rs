//! Slot-level fading simulator used to check the closed forms.
//!
//! Each slot draws, for every possible receiver, an Exp(1) gain on the
//! useful link, one Exp(1) gain per potential interferer and an Exp(beta)
//! self-interference coefficient. A packet succeeds iff its SIR exceeds the
//! threshold; there is no thermal noise.
//!
//! Randomness is counter-based: slot `k` reads a fixed block of words from
//! ChaCha8 stream `k` under a key derived from the seed, and every random
//! variable of the slot has a fixed position in that block. Results are
//! therefore bit-identical for a given seed whatever the thread count,
//! chunking or evaluation order.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{Scenario, TransmissionMode};
use crate::error::{ModelError, Result};
use crate::optimizer::MixedStrategy;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

const DEFAULT_CHUNK: u64 = 1 << 14;

/// Words drawn per slot: two mode draws, then 4 per (pair, receiver).
const DRAWS_PER_SLOT: usize = 2 + 2 * 2 * 4;

/// The uniform words backing one slot.
#[derive(Debug, Clone)]
pub struct SlotDraws {
    words: [u64; DRAWS_PER_SLOT],
}

impl SlotDraws {
    pub fn new(key: &[u8; 32], slot: u64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(*key);
        rng.set_stream(slot);
        let mut words = [0u64; DRAWS_PER_SLOT];
        for w in words.iter_mut() {
            *w = rng.next_u64();
        }
        SlotDraws { words }
    }

    /// Uniform in `[0, 1)` driving the mode choice of `pair`.
    fn mode_uniform(&self, pair: usize) -> f64 {
        unit_open_right(self.words[pair])
    }

    /// Exp(1) variate `slot` (0: useful link, 1-2: interferers, 3: SI) of a receiver.
    fn exp1(&self, pair: usize, receiver: usize, slot: usize) -> f64 {
        let idx = 2 + (pair * 2 + receiver) * 4 + slot;
        -unit_open_left(self.words[idx]).ln()
    }
}

/// Key for the per-slot streams.
pub fn seed_key(seed: u64) -> [u8; 32] {
    ChaCha8Rng::seed_from_u64(seed).get_seed()
}

fn unit_open_right(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn unit_open_left(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Cross-link distances used for external interference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkGeometry {
    /// Every cross link has length equal to the pair separation, as in the
    /// closed-form analysis.
    Midpoint,
    /// Devices are placed explicitly: pair midpoints `separation` apart on
    /// the x axis, each pair rotated by its orientation (radians). In HD the
    /// first device of a pair transmits to the second.
    Placed {
        orientation1: f64,
        orientation2: f64,
    },
}

/// A single packet reception.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reception {
    /// Realized SIR; infinite when nothing interferes.
    pub sir: f64,
    pub success: bool,
}

/// Receptions of one pair in one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOutcome {
    active: usize,
    receptions: [Reception; 2],
}

impl PairOutcome {
    pub fn receptions(&self) -> &[Reception] {
        &self.receptions[..self.active]
    }

    pub fn successes(&self) -> u64 {
        self.receptions().iter().filter(|r| r.success).count() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotOutcome {
    pub modes: [TransmissionMode; 2],
    pub pairs: [PairOutcome; 2],
}

/// Sample mean with a 95% half width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub n_slots: u64,
    /// Bernoulli trials (packets) for success estimates, slots otherwise.
    pub n_samples: u64,
    pub seed: u64,
}

impl SimEstimate {
    pub fn sigma(&self) -> f64 {
        self.half_width_95 / Z_95
    }

    /// Whether `value` lies within `k` standard errors of the mean.
    pub fn within_sigmas(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.sigma()
    }
}

/// Integer counters for one pair; additive across any split of the slots.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairTally {
    pub slots: u64,
    pub packets: u64,
    pub successes: u64,
    /// Sum over slots of squared per-slot success counts.
    pub successes_sq: u64,
    /// Slots in FD mode in which both receivers succeeded.
    pub fd_slots: u64,
    pub fd_both: u64,
    /// Per-receiver successes in FD slots.
    pub fd_first: u64,
    pub fd_second: u64,
}

impl PairTally {
    fn record(&mut self, outcome: &PairOutcome, mode: TransmissionMode) {
        let c = outcome.successes();
        self.slots += 1;
        self.packets += outcome.active as u64;
        self.successes += c;
        self.successes_sq += c * c;
        if mode == TransmissionMode::Fd {
            let r = outcome.receptions();
            self.fd_slots += 1;
            self.fd_first += r[0].success as u64;
            self.fd_second += r[1].success as u64;
            self.fd_both += (r[0].success && r[1].success) as u64;
        }
    }

    fn merge(mut self, other: PairTally) -> PairTally {
        self.slots += other.slots;
        self.packets += other.packets;
        self.successes += other.successes;
        self.successes_sq += other.successes_sq;
        self.fd_slots += other.fd_slots;
        self.fd_both += other.fd_both;
        self.fd_first += other.fd_first;
        self.fd_second += other.fd_second;
        self
    }

    /// Per-packet success ratio. A pair that never transmits reports 0 with
    /// zero width, matching the Idle branch of the closed form.
    pub fn success(&self, seed: u64) -> SimEstimate {
        let mean = if self.packets == 0 {
            0.0
        } else {
            self.successes as f64 / self.packets as f64
        };
        let half = if self.packets == 0 {
            0.0
        } else {
            Z_95 * (mean * (1.0 - mean) / self.packets as f64).sqrt()
        };
        SimEstimate {
            mean,
            half_width_95: half,
            n_slots: self.slots,
            n_samples: self.packets,
            seed,
        }
    }

    /// Delivered packets per slot, with the sample standard deviation.
    pub fn throughput(&self, seed: u64) -> SimEstimate {
        let n = self.slots as f64;
        let mean = self.successes as f64 / n;
        let var = if self.slots > 1 {
            ((self.successes_sq as f64 - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        SimEstimate {
            mean,
            half_width_95: Z_95 * (var / n).sqrt(),
            n_slots: self.slots,
            n_samples: self.slots,
            seed,
        }
    }
}

/// Estimates for a fixed pair of modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEstimate {
    pub success: [SimEstimate; 2],
    pub throughput: [SimEstimate; 2],
    pub tallies: [PairTally; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simulator {
    scenario: Scenario,
    geometry: LinkGeometry,
    chunk: u64,
}

enum ModeSource<'a> {
    Fixed([TransmissionMode; 2]),
    Mixed([&'a MixedStrategy; 2]),
}

impl Simulator {
    pub fn new(scenario: Scenario) -> Result<Self> {
        scenario.validate()?;
        Ok(Simulator {
            scenario,
            geometry: LinkGeometry::Midpoint,
            chunk: DEFAULT_CHUNK,
        })
    }

    pub fn with_geometry(mut self, geometry: LinkGeometry) -> Self {
        self.geometry = geometry;
        self
    }

    /// Number of consecutive slots handled per parallel task. Only affects
    /// scheduling, never results.
    pub fn with_chunk_size(mut self, chunk: u64) -> Self {
        self.chunk = chunk.max(1);
        self
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Distance from receiver `receiver` of `pair` to transmitter
    /// `interferer` of the other pair.
    fn cross_distance(&self, pair: usize, receiver: usize, interferer: usize) -> f64 {
        match self.geometry {
            LinkGeometry::Midpoint => self.scenario.separation,
            LinkGeometry::Placed {
                orientation1,
                orientation2,
            } => {
                let device = |p: usize, d: usize| -> (f64, f64) {
                    let (mid, phi) = if p == 0 {
                        (0.0, orientation1)
                    } else {
                        (self.scenario.separation, orientation2)
                    };
                    let half = 0.5 * self.scenario.pair(p).intra_distance;
                    let sign = if d == 0 { -1.0 } else { 1.0 };
                    (mid + sign * half * phi.cos(), sign * half * phi.sin())
                };
                // receiver 0 is device 1 (the HD receiver); transmitter 0 is device 0
                let rx = device(pair, 1 - receiver);
                let tx = device(1 - pair, interferer);
                (rx.0 - tx.0).hypot(rx.1 - tx.1)
            }
        }
    }

    fn receive(
        &self,
        draws: &SlotDraws,
        pair: usize,
        receiver: usize,
        own: TransmissionMode,
        other: TransmissionMode,
    ) -> Reception {
        let s = &self.scenario;
        let me = s.pair(pair);
        let them = s.pair(1 - pair);
        let alpha = s.path_loss_exp;

        let signal = me.tx_power * draws.exp1(pair, receiver, 0) * me.intra_distance.powf(-alpha);
        let mut interference = 0.0;
        for k in 0..other.packets_sent() as usize {
            let d = self.cross_distance(pair, receiver, k);
            interference += them.tx_power * draws.exp1(pair, receiver, 1 + k) * d.powf(-alpha);
        }
        if own == TransmissionMode::Fd {
            let kappa = draws.exp1(pair, receiver, 3) / me.si_attenuation;
            interference += kappa * me.tx_power;
        }
        Reception {
            sir: signal / interference,
            success: signal > s.sir_threshold * interference,
        }
    }

    /// Simulates one slot with the given modes.
    pub fn sample_slot(
        &self,
        mode1: TransmissionMode,
        mode2: TransmissionMode,
        draws: &SlotDraws,
    ) -> SlotOutcome {
        let modes = [mode1, mode2];
        let empty = Reception {
            sir: 0.0,
            success: false,
        };
        let pairs = [0, 1].map(|p| {
            let (own, other) = (modes[p], modes[1 - p]);
            let mut receptions = [empty; 2];
            let active = own.packets_sent() as usize;
            for (r, slot) in receptions.iter_mut().enumerate().take(active) {
                *slot = self.receive(draws, p, r, own, other);
            }
            PairOutcome { active, receptions }
        });
        SlotOutcome { modes, pairs }
    }

    fn run(&self, source: ModeSource<'_>, n_slots: u64, seed: u64) -> Result<[PairTally; 2]> {
        if n_slots == 0 {
            return Err(ModelError::NoSlots);
        }
        let key = seed_key(seed);
        let chunks = n_slots.div_ceil(self.chunk);
        let tallies = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * self.chunk;
                let end = (start + self.chunk).min(n_slots);
                let mut t = [PairTally::default(); 2];
                for slot in start..end {
                    let draws = SlotDraws::new(&key, slot);
                    let modes = match &source {
                        ModeSource::Fixed(m) => *m,
                        ModeSource::Mixed(s) => [
                            s[0].sample(draws.mode_uniform(0)),
                            s[1].sample(draws.mode_uniform(1)),
                        ],
                    };
                    let outcome = self.sample_slot(modes[0], modes[1], &draws);
                    for p in 0..2 {
                        t[p].record(&outcome.pairs[p], modes[p]);
                    }
                }
                t
            })
            .reduce(
                || [PairTally::default(); 2],
                |a, b| [a[0].merge(b[0]), a[1].merge(b[1])],
            );
        Ok(tallies)
    }

    /// Success and throughput estimates over `n_slots` slots with fixed modes.
    pub fn estimate(
        &self,
        mode1: TransmissionMode,
        mode2: TransmissionMode,
        n_slots: u64,
        seed: u64,
    ) -> Result<ModeEstimate> {
        let tallies = self.run(ModeSource::Fixed([mode1, mode2]), n_slots, seed)?;
        Ok(ModeEstimate {
            success: [tallies[0].success(seed), tallies[1].success(seed)],
            throughput: [tallies[0].throughput(seed), tallies[1].throughput(seed)],
            tallies,
        })
    }

    /// Per-pair throughput when each pair draws its mode independently every slot.
    pub fn estimate_mixed(
        &self,
        strategy1: &MixedStrategy,
        strategy2: &MixedStrategy,
        n_slots: u64,
        seed: u64,
    ) -> Result<[SimEstimate; 2]> {
        let tallies = self.run(ModeSource::Mixed([strategy1, strategy2]), n_slots, seed)?;
        Ok([tallies[0].throughput(seed), tallies[1].throughput(seed)])
    }
}
