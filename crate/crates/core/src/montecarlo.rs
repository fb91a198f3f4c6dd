//! Reproducible trial harness: simulated phase MSE and amplitude variance
//! over an SNR sweep, next to the asymptotic prediction.
//!
//! Every trial draws its own randomness from a stream keyed by
//! `(master_seed, SNR, trial)`, and per-trial results are reduced serially in
//! trial order, so a sweep is bitwise reproducible at any thread count.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::{grid_split_raw, wrap_pi_raw, Radians};
use crate::asymptotics::{
    constants_gaussian, constants_mc, predict, FigureErrors, NoiseFigures, TheoryInput,
};
use crate::error::{Error, Result};
use crate::estimators::{
    mackenthun, mackenthun_weighted, pilot_only, viterbi_viterbi, AmplitudeWeight,
};
use crate::rngs::{keyed_rng, TAG_THEORY, TAG_TRIAL};
use crate::signal::{
    apply_channel, db_to_linear, random_frame, snr_to_sigma, ChannelParams, Constellation,
    FramePlan, GaussianNoise, NoiseModel, PilotLayout, RingNoise, ZeroNoise,
};
use crate::stats::{mean_and_se, sum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorKind {
    Mackenthun,
    /// Closed form from the pilots alone; data samples are ignored.
    PilotOnly,
    /// Noncoherent power-law estimator; pilots are ignored.
    ViterbiViterbi {
        #[serde(default)]
        weight: AmplitudeWeight,
    },
    /// Least squares with data terms scaled by `beta`.
    Weighted {
        beta: f64,
    },
}

impl EstimatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Mackenthun => "mackenthun",
            EstimatorKind::PilotOnly => "pilot",
            EstimatorKind::ViterbiViterbi { .. } => "vv",
            EstimatorKind::Weighted { .. } => "weighted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// Complex Gaussian with `κ = rho0² / (2σ²)` set by the SNR.
    #[default]
    Gaussian,
    /// Constant-modulus noise with the same power as the Gaussian at that SNR.
    Ring,
    /// No noise; the SNR grid only labels rows.
    Zero,
}

fn default_rho0() -> f64 {
    1.0
}

fn default_theory_samples() -> u64 {
    10_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub m: u32,
    pub len: usize,
    pub pilots: usize,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    #[serde(default = "default_rho0")]
    pub rho0: f64,
    pub master_seed: u64,
    pub estimator: EstimatorKind,
    #[serde(default)]
    pub noise: NoiseKind,
    #[serde(default)]
    pub layout: PilotLayout,
    /// Samples used by the Monte-Carlo theory backend (non-Gaussian noise).
    #[serde(default = "default_theory_samples")]
    pub theory_samples: u64,
}

impl SweepConfig {
    /// A Gaussian-noise sweep of the least-squares estimator with `rho0 = 1`.
    pub fn new(
        m: u32,
        len: usize,
        pilots: usize,
        snr_grid_db: Vec<f64>,
        trials: usize,
        master_seed: u64,
    ) -> Self {
        SweepConfig {
            m,
            len,
            pilots,
            snr_grid_db,
            trials,
            rho0: default_rho0(),
            master_seed,
            estimator: EstimatorKind::Mackenthun,
            noise: NoiseKind::Gaussian,
            layout: PilotLayout::Prefix,
            theory_samples: default_theory_samples(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.m < 2 {
            return bad(format!("M must be at least 2, got {}", self.m));
        }
        if self.len == 0 {
            return bad("frame length must be positive".into());
        }
        if self.pilots > self.len {
            return bad(format!(
                "{} pilots exceed frame length {}",
                self.pilots, self.len
            ));
        }
        if self.trials == 0 {
            return bad("at least one trial is required".into());
        }
        if self.snr_grid_db.is_empty() {
            return bad("SNR grid is empty".into());
        }
        if let Some(s) = self.snr_grid_db.iter().find(|s| !s.is_finite()) {
            return bad(format!("SNR {s} is not finite"));
        }
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return bad(format!("rho0 must be positive, got {}", self.rho0));
        }
        match self.estimator {
            EstimatorKind::PilotOnly if self.pilots == 0 => {
                bad("pilot-only estimation needs at least one pilot".into())
            }
            EstimatorKind::Weighted { beta } if !(beta > 0.0 && beta.is_finite()) => {
                bad(format!("beta must be positive, got {beta}"))
            }
            _ => Ok(()),
        }
    }

    /// Phase errors are compared modulo `2π` when the estimate is anchored by
    /// pilots, and modulo `2π/M` otherwise.
    pub fn coherent(&self) -> bool {
        match self.estimator {
            EstimatorKind::PilotOnly => true,
            EstimatorKind::ViterbiViterbi { .. } => false,
            EstimatorKind::Mackenthun | EstimatorKind::Weighted { .. } => self.pilots > 0,
        }
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if matches!(self.estimator, EstimatorKind::ViterbiViterbi { .. }) && self.pilots > 0 {
            out.push(format!(
                "viterbi_viterbi ignores the {} pilot symbols; errors are taken modulo 2π/M",
                self.pilots
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoryStatus {
    Ok,
    /// SNR below the floor of the theory backend.
    OutOfRange,
    /// `p + H d ≤ 0`.
    Breakdown,
    /// No prediction exists for this estimator or noise model.
    NoBackend,
    /// Monte-Carlo constants flagged as unstable.
    Unreliable,
}

impl TheoryStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoryStatus::Ok => "ok",
            TheoryStatus::OutOfRange => "out_of_range",
            TheoryStatus::Breakdown => "breakdown",
            TheoryStatus::NoBackend => "no_backend",
            TheoryStatus::Unreliable => "unreliable",
        }
    }
}

/// Aggregates at one SNR point. Simulated amplitude columns are `None` for
/// estimators that do not produce an amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub snr_db: f64,
    pub kappa: f64,
    pub mse_phase_sim: f64,
    pub se_phase: f64,
    /// Mean of `(rho_hat - centre)²`, centred at the predicted mean when a
    /// prediction exists and at the sample mean otherwise.
    pub var_amp_sim: Option<f64>,
    pub se_amp: Option<f64>,
    pub amp_mean_sim: Option<f64>,
    pub se_amp_mean: Option<f64>,
    pub cross_cov_sim: Option<f64>,
    pub se_cross: Option<f64>,
    pub mse_phase_theory: Option<f64>,
    /// Standard error of the prediction itself, nonzero only for sampled constants.
    pub se_phase_theory: Option<f64>,
    pub var_amp_theory: Option<f64>,
    pub se_amp_theory: Option<f64>,
    pub amp_mean_theory: Option<f64>,
    pub theory_status: TheoryStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

/// Estimation error of a phase: reduced modulo `2π` when `coherent`,
/// modulo `2π/M` otherwise.
pub fn phase_error(theta_hat: Radians, theta0: Radians, coherent: bool, m: u32) -> Result<Radians> {
    if m < 2 {
        return Err(Error::domain("constellation size must be at least 2"));
    }
    let diff = theta_hat.value() - theta0.value();
    Radians::new(phase_error_raw(diff, coherent, m))
}

fn phase_error_raw(diff: f64, coherent: bool, m: u32) -> f64 {
    if coherent {
        wrap_pi_raw(diff)
    } else {
        grid_split_raw(diff, m).1
    }
}

/// `rho_hat - rho0 G(0)`.
pub fn amp_error(rho_hat: f64, rho0: f64, g0: f64) -> f64 {
    debug_assert!(rho_hat >= 0.0);
    rho_hat - rho0 * g0
}

struct Prediction {
    phase_var: f64,
    se_phase: f64,
    amp_var: f64,
    se_amp: f64,
    amp_mean: f64,
}

struct Theory {
    status: TheoryStatus,
    prediction: Option<Prediction>,
}

impl Theory {
    fn none(status: TheoryStatus) -> Self {
        Theory {
            status,
            prediction: None,
        }
    }
}

/// Noise model realising `snr_db` for amplitude `rho0`.
pub fn noise_at(kind: NoiseKind, snr_db: f64, rho0: f64) -> Result<Box<dyn NoiseModel>> {
    Ok(match kind {
        NoiseKind::Gaussian => Box::new(GaussianNoise::new(snr_to_sigma(snr_db, rho0)?)?),
        NoiseKind::Ring => Box::new(RingNoise::matching_power(snr_to_sigma(snr_db, rho0)?)?),
        NoiseKind::Zero => Box::new(ZeroNoise),
    })
}

fn theory_at(
    config: &SweepConfig,
    snr_db: f64,
    kappa: f64,
    noise: &dyn NoiseModel,
) -> Result<Theory> {
    let (pilots, len) = match config.estimator {
        EstimatorKind::Mackenthun => (config.pilots, config.len),
        EstimatorKind::Weighted { beta: 1.0 } => (config.pilots, config.len),
        EstimatorKind::PilotOnly => (config.pilots, config.pilots),
        EstimatorKind::Weighted { .. } | EstimatorKind::ViterbiViterbi { .. } => {
            return Ok(Theory::none(TheoryStatus::NoBackend))
        }
    };
    let (figures, errors, reliable): (NoiseFigures, Option<FigureErrors>, bool) = match config.noise
    {
        NoiseKind::Zero => return Ok(Theory::none(TheoryStatus::NoBackend)),
        NoiseKind::Gaussian => match constants_gaussian(config.m, kappa) {
            Ok(f) => (f, None, true),
            Err(Error::TheoryOutOfRange { .. }) => {
                return Ok(Theory::none(TheoryStatus::OutOfRange))
            }
            Err(e) => return Err(e),
        },
        NoiseKind::Ring => {
            let seed = keyed_rng(config.master_seed, snr_db.to_bits(), 0, TAG_THEORY).next_u64();
            let mc = constants_mc(noise, config.m, config.rho0, config.theory_samples, seed)?;
            (mc.figures, Some(mc.errors), mc.reliable)
        }
    };
    let input = TheoryInput::from_counts(config.m, len, pilots, kappa, config.rho0)?;
    let pred = match predict(&figures, &input, len) {
        Ok(p) => p,
        Err(Error::TheoryBreakdown { .. }) => return Ok(Theory::none(TheoryStatus::Breakdown)),
        Err(e) => return Err(e),
    };
    let (se_phase, se_amp) = match &errors {
        None => (0.0, 0.0),
        Some(err) => {
            // delta method, treating the sampled constants as independent
            let (p, d, l) = (input.p, input.d, len as f64);
            let den = p + figures.h * d;
            let d_a1 = p / (den * den * l);
            let d_a2 = d / (den * den * l);
            let d_h = -2.0 * d * pred.phase_var / den;
            let se_phase =
                ((d_a1 * err.a1).powi(2) + (d_a2 * err.a2).powi(2) + (d_h * err.h).powi(2)).sqrt();
            let r2 = config.rho0 * config.rho0 / l;
            let se_amp = ((r2 * p * err.b1).powi(2) + (r2 * d * err.b2).powi(2)).sqrt();
            (se_phase, se_amp)
        }
    };
    Ok(Theory {
        status: if reliable {
            TheoryStatus::Ok
        } else {
            TheoryStatus::Unreliable
        },
        prediction: Some(Prediction {
            phase_var: pred.phase_var,
            se_phase,
            amp_var: pred.amp_var,
            se_amp,
            amp_mean: pred.amp_mean,
        }),
    })
}

/// One trial's raw outcome: wrapped phase error and amplitude estimate.
#[derive(Debug, Clone, Copy)]
struct Outcome {
    phase: f64,
    rho: Option<f64>,
}

fn run_trial(
    config: &SweepConfig,
    plan: &FramePlan,
    noise: &dyn NoiseModel,
    snr_db: f64,
    trial: usize,
    coherent: bool,
) -> Result<Outcome> {
    let mut rng = keyed_rng(
        config.master_seed,
        snr_db.to_bits(),
        trial as u64,
        TAG_TRIAL,
    );
    let params = ChannelParams::random_phase(config.rho0, &mut rng)?;
    let symbols = random_frame(plan, &mut rng);
    let frame = apply_channel(plan, &symbols, params, noise, &mut rng)?;
    let (theta, rho) = match config.estimator {
        EstimatorKind::Mackenthun => {
            let a = mackenthun(&frame)?.amplitude;
            (a.theta(), Some(a.rho()))
        }
        EstimatorKind::Weighted { beta } => {
            let a = mackenthun_weighted(&frame, beta)?.amplitude;
            (a.theta(), Some(a.rho()))
        }
        EstimatorKind::PilotOnly => {
            let a = pilot_only(&frame)?;
            (a.theta(), Some(a.rho()))
        }
        EstimatorKind::ViterbiViterbi { weight } => (viterbi_viterbi(&frame, weight).value(), None),
    };
    Ok(Outcome {
        phase: phase_error_raw(theta - params.theta0(), coherent, config.m),
        rho,
    })
}

/// Runs `config.trials` independent trials at every SNR of the grid.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let plan = FramePlan::with_layout(
        Constellation::new(config.m)?,
        config.len,
        config.pilots,
        config.layout,
    )?;
    let coherent = config.coherent();
    let mut rows = Vec::with_capacity(config.snr_grid_db.len());
    for &snr_db in &config.snr_grid_db {
        let kappa = match config.noise {
            NoiseKind::Zero => f64::INFINITY,
            _ => db_to_linear(snr_db),
        };
        let noise = noise_at(config.noise, snr_db, config.rho0)?;
        let theory = theory_at(config, snr_db, kappa, noise.as_ref())?;
        let outcomes: Vec<Outcome> = (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, &plan, noise.as_ref(), snr_db, t, coherent))
            .collect::<Result<_>>()?;
        rows.push(aggregate(snr_db, kappa, &outcomes, &theory));
    }
    Ok(SweepResult {
        config: config.clone(),
        rows,
        warnings: config.warnings(),
    })
}

fn aggregate(snr_db: f64, kappa: f64, outcomes: &[Outcome], theory: &Theory) -> SweepRow {
    let sq: Vec<f64> = outcomes.iter().map(|o| o.phase * o.phase).collect();
    let (mse_phase_sim, se_phase) = mean_and_se(&sq);
    let pred = theory.prediction.as_ref();

    let rhos: Option<Vec<f64>> = outcomes.iter().map(|o| o.rho).collect();
    let mut row = SweepRow {
        snr_db,
        kappa,
        mse_phase_sim,
        se_phase,
        var_amp_sim: None,
        se_amp: None,
        amp_mean_sim: None,
        se_amp_mean: None,
        cross_cov_sim: None,
        se_cross: None,
        mse_phase_theory: pred.map(|p| p.phase_var),
        se_phase_theory: pred.map(|p| p.se_phase),
        var_amp_theory: pred.map(|p| p.amp_var),
        se_amp_theory: pred.map(|p| p.se_amp),
        amp_mean_theory: pred.map(|p| p.amp_mean),
        theory_status: theory.status,
    };
    if let Some(rhos) = rhos {
        let (amp_mean, se_amp_mean) = mean_and_se(&rhos);
        let centre = pred.map_or(amp_mean, |p| p.amp_mean);
        let dev: Vec<f64> = rhos.iter().map(|&r| r - centre).collect();
        let dev_sq: Vec<f64> = dev.iter().map(|e| e * e).collect();
        let (var_amp, se_amp) = mean_and_se(&dev_sq);
        let n = outcomes.len() as f64;
        let phase_mean = sum(outcomes.iter().map(|o| o.phase)) / n;
        let dev_mean = sum(dev.iter().copied()) / n;
        let products: Vec<f64> = outcomes
            .iter()
            .zip(&dev)
            .map(|(o, e)| (o.phase - phase_mean) * (e - dev_mean))
            .collect();
        let (cross, se_cross) = mean_and_se(&products);
        row.var_amp_sim = Some(var_amp);
        row.se_amp = Some(se_amp);
        row.amp_mean_sim = Some(amp_mean);
        row.se_amp_mean = Some(se_amp_mean);
        row.cross_cov_sim = Some(cross);
        row.se_cross = Some(se_cross);
    }
    row
}
