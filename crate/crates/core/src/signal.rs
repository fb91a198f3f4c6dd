//! Constellations, frame layouts and the additive-noise channel
//! `y_i = a0 s_i + w_i`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, RngCore};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::angle::grid_split_raw;
use crate::error::{Error, Result};

/// M-PSK constellation: point `k` is `exp(j 2πk/M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    m: u32,
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain(format!(
                "constellation size must be at least 2, got {m}"
            )));
        }
        let points = (0..m)
            .map(|k| {
                // exact values on the axes keep noiseless products exact
                if (4 * k) % m == 0 {
                    match 4 * k / m {
                        0 => Complex64::new(1.0, 0.0),
                        1 => Complex64::new(0.0, 1.0),
                        2 => Complex64::new(-1.0, 0.0),
                        _ => Complex64::new(0.0, -1.0),
                    }
                } else {
                    Complex64::from_polar(1.0, TAU * k as f64 / m as f64)
                }
            })
            .collect();
        Ok(Constellation { m, points })
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.m
    }

    /// Symbol `k mod M`.
    #[inline]
    pub fn point(&self, k: usize) -> Complex64 {
        self.points[k % self.m as usize]
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Index of the symbol whose phase is `round(M x / 2π)` grid steps.
    #[inline]
    pub(crate) fn index_of_phase(&self, x: f64) -> usize {
        let (n, _) = grid_split_raw(x, self.m);
        n.rem_euclid(self.m as i64) as usize
    }

    /// Maps a unit-modulus value onto its symbol index, if it lies on the grid.
    pub fn index_of(&self, s: Complex64, tol: f64) -> Option<usize> {
        let k = self.index_of_phase(s.arg());
        ((s - self.points[k]).norm() <= tol).then_some(k)
    }
}

/// Transmission layout: which positions carry pilots and what they are.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePlan {
    constellation: Constellation,
    len: usize,
    pilot_positions: Vec<usize>,
    pilot_symbols: Vec<usize>,
    data_positions: Vec<usize>,
}

/// How pilot positions are placed within a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PilotLayout {
    /// Pilots occupy the first `|P|` positions.
    #[default]
    Prefix,
    /// Pilots are spread evenly over the frame.
    Spread,
}

impl FramePlan {
    /// Builds a plan from explicit pilot positions and pilot symbol indices.
    /// Data positions are the complement of the pilot positions.
    pub fn new(
        constellation: Constellation,
        len: usize,
        pilot_positions: Vec<usize>,
        pilot_symbols: Vec<usize>,
    ) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidPlan("frame length must be positive".into()));
        }
        if pilot_positions.len() != pilot_symbols.len() {
            return Err(Error::InvalidPlan(format!(
                "{} pilot positions but {} pilot symbols",
                pilot_positions.len(),
                pilot_symbols.len()
            )));
        }
        let m = constellation.order() as usize;
        if let Some(&bad) = pilot_symbols.iter().find(|&&k| k >= m) {
            return Err(Error::InvalidPlan(format!(
                "pilot symbol index {bad} not below M = {m}"
            )));
        }
        let mut is_pilot = vec![false; len];
        for &p in &pilot_positions {
            if p >= len {
                return Err(Error::InvalidPlan(format!(
                    "pilot position {p} outside frame of length {len}"
                )));
            }
            if is_pilot[p] {
                return Err(Error::InvalidPlan(format!("duplicate pilot position {p}")));
            }
            is_pilot[p] = true;
        }
        let data_positions = (0..len).filter(|&i| !is_pilot[i]).collect();
        Ok(FramePlan {
            constellation,
            len,
            pilot_positions,
            pilot_symbols,
            data_positions,
        })
    }

    /// All-ones pilots at the positions given by `layout`.
    pub fn with_layout(
        constellation: Constellation,
        len: usize,
        pilots: usize,
        layout: PilotLayout,
    ) -> Result<Self> {
        if pilots > len {
            return Err(Error::InvalidPlan(format!(
                "{pilots} pilots do not fit in a frame of length {len}"
            )));
        }
        let positions = match layout {
            PilotLayout::Prefix => (0..pilots).collect(),
            PilotLayout::Spread => (0..pilots).map(|k| k * len / pilots).collect(),
        };
        FramePlan::new(constellation, len, positions, vec![0; pilots])
    }

    /// All-ones pilots in the first `pilots` positions.
    pub fn prefix(constellation: Constellation, len: usize, pilots: usize) -> Result<Self> {
        FramePlan::with_layout(constellation, len, pilots, PilotLayout::Prefix)
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn pilot_positions(&self) -> &[usize] {
        &self.pilot_positions
    }

    pub fn data_positions(&self) -> &[usize] {
        &self.data_positions
    }

    /// Pilot symbol indices, aligned with [`pilot_positions`](Self::pilot_positions).
    pub fn pilot_symbols(&self) -> &[usize] {
        &self.pilot_symbols
    }

    /// `(position, pilot value)` pairs.
    pub fn pilots(&self) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        self.pilot_positions
            .iter()
            .zip(&self.pilot_symbols)
            .map(|(&i, &k)| (i, self.constellation.point(k)))
    }
}

/// True channel gain `a0 = rho0 exp(j theta0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    rho0: f64,
    theta0: f64,
}

impl ChannelParams {
    pub fn new(rho0: f64, theta0: f64) -> Result<Self> {
        if !(rho0 > 0.0 && rho0.is_finite()) {
            return Err(Error::domain(format!(
                "amplitude must be positive, got {rho0}"
            )));
        }
        if !theta0.is_finite() {
            return Err(Error::domain("phase must be finite"));
        }
        Ok(ChannelParams {
            rho0,
            theta0: crate::angle::wrap_pi_raw(theta0),
        })
    }

    /// Uniform phase on `[-π, π)`.
    pub fn random_phase<R: Rng + ?Sized>(rho0: f64, rng: &mut R) -> Result<Self> {
        let theta0 = rng.random_range(-PI..PI);
        ChannelParams::new(rho0, theta0)
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn gain(&self) -> Complex64 {
        Complex64::from_polar(self.rho0, self.theta0)
    }
}

/// Source of i.i.d. circularly symmetric complex noise.
pub trait NoiseModel: Send + Sync + fmt::Debug {
    fn sample(&self, rng: &mut dyn RngCore) -> Complex64;

    /// `E|w|^2`.
    fn power(&self) -> f64;
}

/// Complex Gaussian noise, independent `N(0, σ²)` real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianNoise {
    sigma: f64,
}

impl GaussianNoise {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::domain(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(GaussianNoise { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

impl NoiseModel for GaussianNoise {
    fn sample(&self, rng: &mut dyn RngCore) -> Complex64 {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(self.sigma * re, self.sigma * im)
    }

    fn power(&self) -> f64 {
        2.0 * self.sigma * self.sigma
    }
}

/// Fixed-modulus noise `c exp(jU)` with `U` uniform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingNoise {
    radius: f64,
}

impl RingNoise {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!(
                "ring radius must be positive, got {radius}"
            )));
        }
        Ok(RingNoise { radius })
    }

    /// Ring noise with the same power `2σ²` as Gaussian noise of deviation `sigma`.
    pub fn matching_power(sigma: f64) -> Result<Self> {
        RingNoise::new(std::f64::consts::SQRT_2 * sigma)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl NoiseModel for RingNoise {
    fn sample(&self, rng: &mut dyn RngCore) -> Complex64 {
        let phase = rng.random_range(0.0..TAU);
        Complex64::from_polar(self.radius, phase)
    }

    fn power(&self) -> f64 {
        self.radius * self.radius
    }
}

/// Degenerate zero noise, for noiseless checks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ZeroNoise;

impl NoiseModel for ZeroNoise {
    fn sample(&self, _rng: &mut dyn RngCore) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn power(&self) -> f64 {
        0.0
    }
}

/// Received samples aligned with a frame plan.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame<'a> {
    plan: &'a FramePlan,
    samples: Vec<Complex64>,
}

impl<'a> ReceivedFrame<'a> {
    pub fn new(plan: &'a FramePlan, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != plan.len() {
            return Err(Error::InvalidPlan(format!(
                "{} samples for a frame of length {}",
                samples.len(),
                plan.len()
            )));
        }
        Ok(ReceivedFrame { plan, samples })
    }

    pub fn plan(&self) -> &'a FramePlan {
        self.plan
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }
}

/// Transmitted symbol indices: pilots from the plan, uniform data elsewhere.
pub fn random_frame<R: Rng + ?Sized>(plan: &FramePlan, rng: &mut R) -> Vec<usize> {
    let m = plan.constellation().order() as usize;
    let mut symbols = vec![0usize; plan.len()];
    for (&i, &k) in plan.pilot_positions().iter().zip(plan.pilot_symbols()) {
        symbols[i] = k;
    }
    for &i in plan.data_positions() {
        symbols[i] = rng.random_range(0..m);
    }
    symbols
}

/// Applies `y_i = a0 s_i + w_i` with fresh noise draws.
pub fn apply_channel<'a>(
    plan: &'a FramePlan,
    symbols: &[usize],
    params: ChannelParams,
    noise: &dyn NoiseModel,
    rng: &mut dyn RngCore,
) -> Result<ReceivedFrame<'a>> {
    if symbols.len() != plan.len() {
        return Err(Error::InvalidPlan(format!(
            "{} symbols for a frame of length {}",
            symbols.len(),
            plan.len()
        )));
    }
    let a0 = params.gain();
    let c = plan.constellation();
    let samples = symbols
        .iter()
        .map(|&k| a0 * c.point(k) + noise.sample(rng))
        .collect();
    ReceivedFrame::new(plan, samples)
}

/// Per-component noise deviation for `SNR = rho0² / (2σ²)` given in dB.
pub fn snr_to_sigma(snr_db: f64, rho0: f64) -> Result<f64> {
    if !(rho0 > 0.0) {
        return Err(Error::domain(format!(
            "amplitude must be positive, got {rho0}"
        )));
    }
    if !snr_db.is_finite() {
        return Err(Error::domain("SNR must be finite"));
    }
    Ok(rho0 / (2.0 * db_to_linear(snr_db)).sqrt())
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
