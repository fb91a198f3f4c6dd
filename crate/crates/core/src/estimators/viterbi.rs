use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angle::{grid_split_raw, Radians};
use crate::signal::ReceivedFrame;

/// Amplitude nonlinearity `F(|y|)` of the Viterbi & Viterbi estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeWeight {
    /// `F(x) = 1`
    #[default]
    Unit,
    /// `F(x) = x`
    Linear,
    /// `F(x) = x^M`
    PowerM,
}

impl AmplitudeWeight {
    fn apply(self, r: f64, m: u32) -> f64 {
        match self {
            AmplitudeWeight::Unit => 1.0,
            AmplitudeWeight::Linear => r,
            AmplitudeWeight::PowerM => r.powi(m as i32),
        }
    }
}

/// Non-data-aided phase estimate `(1/M) arg sum F(|y|) (y/|y|)^M`, in
/// `[-π/M, π/M)`. Pilots are treated like data; zero samples are skipped.
pub fn viterbi_viterbi(frame: &ReceivedFrame<'_>, weight: AmplitudeWeight) -> Radians {
    let m = frame.plan().constellation().order();
    let sum: Complex64 = frame
        .samples()
        .iter()
        .filter(|y| y.norm_sqr() > 0.0)
        .map(|y| {
            let r = y.norm();
            weight.apply(r, m) * (y / r).powu(m)
        })
        .sum();
    let phase = if sum.norm_sqr() == 0.0 {
        0.0
    } else {
        sum.arg() / m as f64
    };
    Radians::new(grid_split_raw(phase, m).1).expect("finite phase")
}
