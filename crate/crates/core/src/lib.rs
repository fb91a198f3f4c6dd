//! Least-squares carrier phase and amplitude estimation for M-PSK frames
//! with pilot symbols, its asymptotic covariance, and a reproducible
//! Monte-Carlo harness for checking one against the other.
//!
//! ```
//! use mpsk_ls::{apply_channel, mackenthun, random_frame, ChannelParams, Constellation, FramePlan, ZeroNoise};
//! use rand::SeedableRng;
//!
//! let plan = FramePlan::prefix(Constellation::new(4).unwrap(), 64, 8).unwrap();
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
//! let symbols = random_frame(&plan, &mut rng);
//! let params = ChannelParams::new(1.5, 0.3).unwrap();
//! let frame = apply_channel(&plan, &symbols, params, &ZeroNoise, &mut rng).unwrap();
//! let est = mackenthun(&frame).unwrap();
//! assert!((est.amplitude.to_complex() - params.gain()).norm() < 1e-12);
//! ```

// Domain checks are written `!(x > 0.0)` on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod asymptotics;
pub mod error;
pub mod estimators;
pub mod montecarlo;
pub mod rngs;
pub mod signal;
pub mod stats;

pub use angle::{round_half_up, round_to_grid, wrap_frac, wrap_pi, Radians};
pub use asymptotics::{
    constants_gaussian, constants_mc, predict, CovariancePrediction, McFigures, NoiseFigures,
    TheoryInput, KAPPA_FLOOR,
};
pub use error::{Error, Result};
pub use estimators::{
    brute_force, evaluate_decisions, hard_decision, mackenthun, mackenthun_traced,
    mackenthun_weighted, naive_enumeration, pilot_only, sum_of_squares, viterbi_viterbi,
    AmplitudeWeight, ComplexAmplitude, EstimateReport, BRUTE_FORCE_LIMIT,
};
pub use montecarlo::{
    amp_error, phase_error, run_sweep, EstimatorKind, NoiseKind, SweepConfig, SweepResult,
    SweepRow, TheoryStatus,
};
pub use signal::{
    apply_channel, db_to_linear, random_frame, snr_to_sigma, ChannelParams, Constellation,
    FramePlan, GaussianNoise, NoiseModel, PilotLayout, ReceivedFrame, RingNoise, ZeroNoise,
};
