//! Interference management for two full-duplex device-to-device pairs.
//!
//! Two D2D pairs share a band and choose, every slot, to stay idle, transmit
//! one packet (half duplex) or two packets (full duplex). Rayleigh fading,
//! power-law path loss and residual self-interference reduce the whole
//! physical layer to two numbers per pair:
//!
//! * `lambda`, the success multiplier caused by self-interference, and
//! * `mu`, the success multiplier applied per interfering transmission.
//!
//! On top of that abstraction the crate provides
//!
//! * [`channel`]: closed-form success probabilities and pair throughput,
//! * [`game`]: the non-cooperative throughput game and its dominant-strategy
//!   equilibrium,
//! * [`optimizer`]: the cooperative symmetric mixed-strategy optimum and a
//!   brute-force lattice search used as its oracle,
//! * [`montecarlo`]: a slot-level fading simulator that checks every closed
//!   form empirically.

pub mod channel;
pub mod error;
pub mod game;
pub mod montecarlo;
pub mod optimizer;

pub use channel::{
    db_to_linear, derive_params, pair_throughput, success_probability, theta_from_rate,
    DerivedParams, PairConfig, Scenario, TransmissionMode,
};
pub use error::{ModelError, Result};
pub use game::{
    dominance_threshold, dominant_mode, nash_equilibrium, payoff_matrix, Dominance, Equilibrium,
    PayoffMatrix, Region,
};
pub use montecarlo::{LinkGeometry, ModeEstimate, SimEstimate, Simulator, SlotDraws, SlotOutcome};
pub use optimizer::{
    brute_force_asymmetric, brute_force_optimum, global_optimum, interior_stationarity_scan,
    mixed_fd_optimum, mixed_hd_optimum, mixed_hybrid_optimum, mixed_objective, Boundary, Family,
    MixedStrategy, PolicySolution, StationarityReport,
};
