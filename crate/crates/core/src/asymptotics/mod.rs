//! Asymptotic theory of the least-squares estimator.
//!
//! Write `R exp(jΦ) = 1 + w / (a0 s)` for a single noisy symbol. The phase
//! estimator is consistent and `√L` times its wrapped error is asymptotically
//! normal with variance `(p A1 + d A2) / (p + H d)²`; the amplitude estimator
//! converges to `rho0 G(0)` with asymptotic variance `rho0² (p B1 + d B2)`,
//! and the two are asymptotically uncorrelated. Here `p` and `d` are the pilot
//! and data fractions and
//!
//! ```text
//! h1(x) = E R cos(x + Φ)      h2(x) = E R cos⟨x + Φ⟩      G = p h1 + d h2
//! A1 = E R² sin²Φ             A2 = E R² sin²⟨Φ⟩
//! B1 = E R² cos²Φ - 1         B2 = E R² cos²⟨Φ⟩ - h2(0)²
//! H  = h2(0) - 2 sin(π/M) Σ_k g(2πk/M + π/M)
//! ```
//!
//! where `g(φ) = ∫ r f(r, φ) dr` and `⟨·⟩` reduces modulo `2π/M`.

pub mod gaussian;
mod mc;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gaussian::{
    constants_gaussian, first_moment, gaussian_g, gaussian_joint_pdf, normal_cdf, objective_curve,
    polar_moment, second_moment, AngularWeight, KAPPA_FLOOR,
};
pub use mc::{constants_mc, FigureErrors, McFigures, MC_MIN_SAMPLES};

/// Noise-dependent constants of the asymptotic theory for one `(M, noise)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseFigures {
    pub m: u32,
    /// `E R cos Φ`, equal to one for any circularly symmetric noise.
    pub h1_0: f64,
    pub h2_0: f64,
    pub h: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    /// `g(2πk/M + π/M)` for `k = 0..M`.
    pub g_boundaries: Vec<f64>,
}

impl NoiseFigures {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        m: u32,
        h1_0: f64,
        h2_0: f64,
        a1: f64,
        a2: f64,
        b1: f64,
        b2: f64,
        g_boundaries: Vec<f64>,
    ) -> Self {
        let h =
            h2_0 - 2.0 * (std::f64::consts::PI / m as f64).sin() * g_boundaries.iter().sum::<f64>();
        NoiseFigures {
            m,
            h1_0,
            h2_0,
            h,
            a1,
            a2,
            b1,
            b2,
            g_boundaries,
        }
    }

    /// `G(0) = p + d h2(0)`.
    pub fn g0(&self, p: f64, d: f64) -> f64 {
        p + d * self.h2_0
    }
}

/// Operating point at which the theory is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryInput {
    pub m: u32,
    /// Pilot fraction `|P| / L`.
    pub p: f64,
    /// Data fraction `|D| / L`.
    pub d: f64,
    pub kappa: f64,
    pub rho0: f64,
}

impl TheoryInput {
    pub fn new(m: u32, p: f64, d: f64, kappa: f64, rho0: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::domain("constellation size must be at least 2"));
        }
        if !(p >= 0.0 && d >= 0.0 && (p + d - 1.0).abs() <= 1e-12) {
            return Err(Error::domain(format!(
                "fractions must be nonnegative and sum to one, got p={p}, d={d}"
            )));
        }
        if !(kappa > 0.0 && rho0 > 0.0) {
            return Err(Error::domain(format!(
                "kappa and rho0 must be positive, got {kappa}, {rho0}"
            )));
        }
        Ok(TheoryInput {
            m,
            p,
            d,
            kappa,
            rho0,
        })
    }

    /// Fractions taken from a frame with `pilots` of `len` symbols known.
    pub fn from_counts(m: u32, len: usize, pilots: usize, kappa: f64, rho0: f64) -> Result<Self> {
        if len == 0 || pilots > len {
            return Err(Error::domain(format!(
                "{pilots} pilots in a frame of length {len}"
            )));
        }
        let p = pilots as f64 / len as f64;
        TheoryInput::new(m, p, 1.0 - p, kappa, rho0)
    }
}

/// Predicted finite-`L` moments of `(phase error, amplitude error)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovariancePrediction {
    pub phase_var: f64,
    pub amp_var: f64,
    pub cross: f64,
    pub amp_mean: f64,
    pub len: usize,
}

/// Divides the asymptotic covariance by `L`.
pub fn predict(
    figures: &NoiseFigures,
    input: &TheoryInput,
    len: usize,
) -> Result<CovariancePrediction> {
    if len == 0 {
        return Err(Error::domain("frame length must be positive"));
    }
    if figures.m != input.m {
        return Err(Error::domain(format!(
            "figures for M = {} used at M = {}",
            figures.m, input.m
        )));
    }
    let (p, d) = (input.p, input.d);
    let denominator = p + figures.h * d;
    if !(denominator > 0.0) {
        return Err(Error::TheoryBreakdown { denominator });
    }
    let l = len as f64;
    Ok(CovariancePrediction {
        phase_var: (p * figures.a1 + d * figures.a2) / (denominator * denominator * l),
        amp_var: input.rho0 * input.rho0 * (p * figures.b1 + d * figures.b2) / l,
        cross: 0.0,
        amp_mean: input.rho0 * figures.g0(p, d),
        len,
    })
}
