//! Closed-form densities and quadrature-based theory constants for complex
//! Gaussian noise.
//!
//! With `R exp(jΦ) = 1 + w/rho0` and `κ = rho0² / (2σ²)` the joint density of
//! `(R, Φ)` is `(κ r / π) exp(-κ (r² - 2 r cos φ + 1))`, and its radial first
//! moment has the closed form
//!
//! ```text
//! g(φ) = cos φ e^{-κ} / 2π + Ψ(√(2κ) cos φ) e^{-κ sin²φ} (1/2 + κ cos²φ) / √(πκ)
//! ```
//!
//! with `Ψ` the standard normal CDF.

use std::f64::consts::{PI, SQRT_2, TAU};

use super::quadrature::{breakpoints, integrate, Integral};
use super::NoiseFigures;
use crate::angle::grid_split_raw;
use crate::error::{Error, Result};

/// Smallest `κ` for which [`constants_gaussian`] evaluates the theory.
pub const KAPPA_FLOOR: f64 = 0.01;

const FIRST_MOMENT_TOL: f64 = 1e-11;
const OUTER_TOL: f64 = 1e-11;
const INNER_TOL: f64 = 1e-13;

/// Standard normal CDF.
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * libm::erfc(-t / SQRT_2)
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "kappa must be positive and finite, got {kappa}"
        )))
    }
}

#[inline]
fn g_raw(phi: f64, kappa: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let edge = c / TAU * (-kappa).exp();
    let bulk = normal_cdf((2.0 * kappa).sqrt() * c) / (PI * kappa).sqrt()
        * (-kappa * s * s).exp()
        * (0.5 + kappa * c * c);
    edge + bulk
}

/// Radial first moment `g(φ) = ∫ r f(r, φ) dr` of the `(R, Φ)` density.
pub fn gaussian_g(phi: f64, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if !phi.is_finite() {
        return Err(Error::domain("phase must be finite"));
    }
    Ok(g_raw(phi, kappa))
}

#[inline]
fn joint_pdf_raw(r: f64, phi: f64, kappa: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    let d = r - c;
    kappa * r / PI * (-kappa * (d * d + s * s)).exp()
}

/// Joint density of `(R, Φ)`.
pub fn gaussian_joint_pdf(r: f64, phi: f64, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if !(r >= 0.0) {
        return Err(Error::domain(format!(
            "radius must be nonnegative, got {r}"
        )));
    }
    Ok(joint_pdf_raw(r, phi, kappa))
}

/// Radial truncation for the two-dimensional integrals; the neglected tail
/// is below `exp(-32)` relative to the peak.
pub fn radial_cutoff(kappa: f64) -> f64 {
    1.0 + 8.0 / (2.0 * kappa).sqrt()
}

/// Angular weight applied to `R` or `R²` in a moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngularWeight {
    /// `cos φ`
    Cos,
    /// `sin φ`
    Sin,
    /// `cos⟨φ⟩`
    CosWrapped,
    /// `sin⟨φ⟩`
    SinWrapped,
    /// `sin² φ`
    SinSq,
    /// `cos² φ`
    CosSq,
    /// `sin²⟨φ⟩`
    SinSqWrapped,
    /// `cos²⟨φ⟩`
    CosSqWrapped,
}

impl AngularWeight {
    fn eval(self, phi: f64, m: u32) -> f64 {
        let wrapped = || grid_split_raw(phi, m).1;
        match self {
            AngularWeight::Cos => phi.cos(),
            AngularWeight::Sin => phi.sin(),
            AngularWeight::CosWrapped => wrapped().cos(),
            AngularWeight::SinWrapped => wrapped().sin(),
            AngularWeight::SinSq => phi.sin().powi(2),
            AngularWeight::CosSq => phi.cos().powi(2),
            AngularWeight::SinSqWrapped => wrapped().sin().powi(2),
            AngularWeight::CosSqWrapped => wrapped().cos().powi(2),
        }
    }
}

/// Breakpoints on `[-π, π]` at the peak of the density and wherever
/// `shift + φ` crosses a decision boundary `(2k + 1) π / M`.
fn angular_breakpoints(m: u32, shift: f64) -> Vec<f64> {
    let step = TAU / m as f64;
    let mi = m as i64;
    let cuts = (-2 * mi - 2..=2 * mi + 2).map(move |k| (k as f64 + 0.5) * step - shift);
    breakpoints(-PI, PI, cuts.chain([0.0, -shift]))
}

/// `E[R w(shift + Φ)]` by quadrature of `w(shift + φ) g(φ)` over `[-π, π)`.
pub fn first_moment(kappa: f64, m: u32, weight: AngularWeight, shift: f64) -> Result<Integral> {
    check_kappa(kappa)?;
    if m < 2 {
        return Err(Error::domain("constellation size must be at least 2"));
    }
    integrate(
        |phi| weight.eval(shift + phi, m) * g_raw(phi, kappa),
        &angular_breakpoints(m, shift),
        FIRST_MOMENT_TOL,
    )
}

/// `E[R² w(Φ)]` by two-dimensional quadrature of the joint density.
pub fn second_moment(kappa: f64, m: u32, weight: AngularWeight) -> Result<Integral> {
    polar_moment(kappa, m, 2, weight)
}

/// `E[R^power w(Φ)]` by two-dimensional quadrature of the joint density
/// over `r ∈ [0, radial_cutoff(κ)]`, `φ ∈ [-π, π)`.
pub fn polar_moment(kappa: f64, m: u32, power: i32, weight: AngularWeight) -> Result<Integral> {
    check_kappa(kappa)?;
    if m < 2 {
        return Err(Error::domain("constellation size must be at least 2"));
    }
    let r_max = radial_cutoff(kappa);
    let inner_failure = std::cell::Cell::new(None);
    let radial = |phi: f64| -> f64 {
        let peak = phi.cos().max(0.0);
        let pts = breakpoints(0.0, r_max, [peak]);
        match integrate(
            |r| r.powi(power) * joint_pdf_raw(r, phi, kappa),
            &pts,
            INNER_TOL,
        ) {
            Ok(v) => v.value,
            Err(e) => {
                inner_failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let outer = integrate(
        |phi| weight.eval(phi, m) * radial(phi),
        &angular_breakpoints(m, 0.0),
        OUTER_TOL,
    );
    if let Some(e) = inner_failure.take() {
        return Err(e);
    }
    let outer = outer?;
    // every inner integral contributes at most INNER_TOL over a range of 2π
    Ok(Integral {
        value: outer.value,
        error: outer.error + TAU * INNER_TOL,
    })
}

/// `G(x) = p h1(x) + d h2(x)`.
pub fn objective_curve(kappa: f64, m: u32, p: f64, d: f64, x: f64) -> Result<f64> {
    let h1 = first_moment(kappa, m, AngularWeight::Cos, x)?.value;
    let h2 = first_moment(kappa, m, AngularWeight::CosWrapped, x)?.value;
    Ok(p * h1 + d * h2)
}

/// Theory constants for Gaussian noise at SNR `κ` with an `M`-point constellation.
pub fn constants_gaussian(m: u32, kappa: f64) -> Result<NoiseFigures> {
    check_kappa(kappa)?;
    if m < 2 {
        return Err(Error::domain("constellation size must be at least 2"));
    }
    if kappa < KAPPA_FLOOR {
        return Err(Error::TheoryOutOfRange {
            kappa,
            floor: KAPPA_FLOOR,
        });
    }
    let h1_0 = first_moment(kappa, m, AngularWeight::Cos, 0.0)?.value;
    let h2_0 = first_moment(kappa, m, AngularWeight::CosWrapped, 0.0)?.value;
    let a2 = second_moment(kappa, m, AngularWeight::SinSqWrapped)?.value;
    let b2 = second_moment(kappa, m, AngularWeight::CosSqWrapped)?.value - h2_0 * h2_0;
    let step = TAU / m as f64;
    let g_boundaries: Vec<f64> = (0..m)
        .map(|k| g_raw(step * k as f64 + 0.5 * step, kappa))
        .collect();
    Ok(NoiseFigures::assemble(
        m,
        h1_0,
        h2_0,
        0.5 / kappa,
        a2,
        0.5 / kappa,
        b2,
        g_boundaries,
    ))
}
