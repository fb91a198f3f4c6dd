//! Estimators of the complex channel gain `a0 = rho0 exp(j theta0)`.
//!
//! [`mackenthun`] is the `O(L log L)` least-squares search over the
//! candidate data sequences swept out as the trial phase turns once around
//! the circle. [`naive_enumeration`] walks the same candidates but
//! recomputes every correlation from scratch, and [`brute_force`] tries every
//! data assignment; both exist to check the fast path.

mod mackenthun;
mod oracle;
mod viterbi;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::wrap_pi_raw;
use crate::error::{Error, Result};
use crate::signal::{Constellation, ReceivedFrame};

pub use mackenthun::{mackenthun, mackenthun_traced, mackenthun_weighted};
pub use oracle::{brute_force, naive_enumeration, BRUTE_FORCE_LIMIT};
pub use viterbi::{viterbi_viterbi, AmplitudeWeight};

/// Polar complex amplitude `rho exp(j theta)` with `theta` in `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexAmplitude {
    rho: f64,
    theta: f64,
}

impl ComplexAmplitude {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) || !theta.is_finite() {
            return Err(Error::domain(format!("invalid amplitude ({rho}, {theta})")));
        }
        Ok(ComplexAmplitude {
            rho,
            theta: wrap_pi_raw(theta),
        })
    }

    /// Polar form of `a`; the zero vector maps to `(0, 0)`.
    pub fn from_complex(a: Complex64) -> Self {
        if a.norm_sqr() == 0.0 {
            return ComplexAmplitude {
                rho: 0.0,
                theta: 0.0,
            };
        }
        ComplexAmplitude {
            rho: a.norm(),
            theta: wrap_pi_raw(a.arg()),
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.rho, self.theta)
    }
}

/// Output of the least-squares estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub amplitude: ComplexAmplitude,
    /// Unnormalised estimate `Y`; the amplitude is `Y / normaliser`.
    pub correlation: Complex64,
    /// Symbol indices decided at the data positions, in data-position order.
    pub data_decisions: Option<Vec<usize>>,
    /// Maximised criterion `|Y|^2 / normaliser`.
    pub objective: f64,
    /// Sum of squares at the optimum, `A - objective`.
    pub sum_of_squares: f64,
    /// Index `k` of the winning candidate sequence `f_k`, where one exists.
    pub candidate_index: Option<usize>,
    /// `Y = 0`: the phase is undefined and reported as zero.
    pub degenerate: bool,
}

impl EstimateReport {
    pub(crate) fn from_correlation(
        y: Complex64,
        normaliser: f64,
        energy: f64,
        decisions: Option<Vec<usize>>,
        candidate_index: Option<usize>,
    ) -> Self {
        let objective = y.norm_sqr() / normaliser;
        EstimateReport {
            amplitude: ComplexAmplitude::from_complex(y / normaliser),
            correlation: y,
            data_decisions: decisions,
            objective,
            sum_of_squares: energy - objective,
            candidate_index,
            degenerate: y.norm_sqr() == 0.0,
        }
    }
}

/// Symbol index minimising `|y - rho exp(j theta) d|^2` over the
/// constellation, for any `rho > 0`. `y = 0` returns symbol 0.
pub fn hard_decision(y: Complex64, theta: f64, constellation: &Constellation) -> usize {
    if y.norm_sqr() == 0.0 {
        return 0;
    }
    let derotated = y * Complex64::from_polar(1.0, -theta);
    constellation.index_of_phase(derotated.arg())
}

/// `sum_{i in P} y_i p_i^*`.
pub(crate) fn pilot_correlation(frame: &ReceivedFrame<'_>) -> Complex64 {
    let y = frame.samples();
    frame.plan().pilots().map(|(i, p)| y[i] * p.conj()).sum()
}

/// Pilot-only estimate `(1/|P|) sum_{i in P} y_i p_i^*`.
pub fn pilot_only(frame: &ReceivedFrame<'_>) -> Result<ComplexAmplitude> {
    let n = frame.plan().pilot_positions().len();
    if n == 0 {
        return Err(Error::domain(
            "pilot-only estimation needs at least one pilot",
        ));
    }
    Ok(ComplexAmplitude::from_complex(
        pilot_correlation(frame) / n as f64,
    ))
}

/// Sum of squares `sum_P |y - a p|^2 + sum_D |y - a d|^2` for explicit data
/// decisions (indices in data-position order).
pub fn sum_of_squares(frame: &ReceivedFrame<'_>, a: Complex64, decisions: &[usize]) -> Result<f64> {
    let plan = frame.plan();
    if decisions.len() != plan.data_positions().len() {
        return Err(Error::domain(format!(
            "{} decisions for {} data positions",
            decisions.len(),
            plan.data_positions().len()
        )));
    }
    let y = frame.samples();
    let c = plan.constellation();
    let pilots: f64 = plan.pilots().map(|(i, p)| (y[i] - a * p).norm_sqr()).sum();
    let data: f64 = plan
        .data_positions()
        .iter()
        .zip(decisions)
        .map(|(&i, &k)| (y[i] - a * c.point(k)).norm_sqr())
        .sum();
    Ok(pilots + data)
}

/// Least-squares fit for fixed data decisions, summed in frame order:
/// `Y = sum_P y p^* + beta sum_D y d^*`, `a = Y / (|P| + beta |D|)`.
///
/// Two searches that agree on the decisions agree bit-for-bit here.
pub fn evaluate_decisions(
    frame: &ReceivedFrame<'_>,
    decisions: &[usize],
    beta: f64,
) -> Result<EstimateReport> {
    let plan = frame.plan();
    if decisions.len() != plan.data_positions().len() {
        return Err(Error::domain(format!(
            "{} decisions for {} data positions",
            decisions.len(),
            plan.data_positions().len()
        )));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!(
            "weight beta must be positive, got {beta}"
        )));
    }
    let c = plan.constellation();
    let m = c.order() as usize;
    if let Some(&bad) = decisions.iter().find(|&&k| k >= m) {
        return Err(Error::domain(format!("decision {bad} not below M = {m}")));
    }
    let mut symbol = vec![None; plan.len()];
    for (&i, &k) in plan.pilot_positions().iter().zip(plan.pilot_symbols()) {
        symbol[i] = Some((k, 1.0));
    }
    for (&i, &k) in plan.data_positions().iter().zip(decisions) {
        symbol[i] = Some((k, beta));
    }
    let y = frame.samples();
    let (mut acc, mut energy) = (Complex64::new(0.0, 0.0), 0.0);
    for (yi, s) in y.iter().zip(&symbol) {
        let (k, w) = s.expect("every position is a pilot or a data symbol");
        acc += w * yi * c.point(k).conj();
        energy += w * yi.norm_sqr();
    }
    let normaliser = plan.pilot_positions().len() as f64 + beta * decisions.len() as f64;
    Ok(EstimateReport::from_correlation(
        acc,
        normaliser,
        energy,
        Some(decisions.to_vec()),
        None,
    ))
}
