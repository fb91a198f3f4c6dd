//! Monte-Carlo estimates of the theory constants for arbitrary circularly
//! symmetric noise.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::NoiseFigures;
use crate::angle::{grid_split_raw, wrap_pi_raw};
use crate::error::{Error, Result};
use crate::rngs::{keyed_rng, TAG_NOISE_CHUNK};
use crate::signal::NoiseModel;

pub const MC_MIN_SAMPLES: u64 = 10_000;
const CHUNK: u64 = 1 << 16;

/// Standard errors of the Monte-Carlo figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureErrors {
    pub h1_0: f64,
    pub h2_0: f64,
    pub h: f64,
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
    pub g_boundaries: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McFigures {
    pub figures: NoiseFigures,
    pub errors: FigureErrors,
    pub samples: u64,
    /// Half-width `δ` of the angular bins used to estimate `g`.
    pub bin_half_width: f64,
    /// Estimated `O(δ²)` smoothing bias of each boundary value of `g`.
    pub g_bias: Vec<f64>,
    /// False when the second-moment estimates look unstable across the run,
    /// as happens for noise without a finite second moment.
    pub reliable: bool,
}

/// Sums over one chunk of samples.
#[derive(Debug, Clone)]
struct Sums {
    n: f64,
    // first and second powers of each per-sample term
    h1: [f64; 2],
    t1: [f64; 2],
    a1: [f64; 2],
    a2: [f64; 2],
    b1: [f64; 2],
    t5: [f64; 2],
    t1t5: f64,
    h: [f64; 2],
    // per boundary: R in bins centred at φk - 2δ, φk, φk + 2δ, and R² in the centre bin
    bins: Vec<[f64; 4]>,
}

impl Sums {
    fn new(m: usize) -> Self {
        Sums {
            n: 0.0,
            h1: [0.0; 2],
            t1: [0.0; 2],
            a1: [0.0; 2],
            a2: [0.0; 2],
            b1: [0.0; 2],
            t5: [0.0; 2],
            t1t5: 0.0,
            h: [0.0; 2],
            bins: vec![[0.0; 4]; m],
        }
    }

    fn merge(&mut self, o: &Sums) {
        self.n += o.n;
        for (a, b) in [
            (&mut self.h1, &o.h1),
            (&mut self.t1, &o.t1),
            (&mut self.a1, &o.a1),
            (&mut self.a2, &o.a2),
            (&mut self.b1, &o.b1),
            (&mut self.t5, &o.t5),
            (&mut self.h, &o.h),
        ] {
            a[0] += b[0];
            a[1] += b[1];
        }
        self.t1t5 += o.t1t5;
        for (a, b) in self.bins.iter_mut().zip(&o.bins) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
}

fn push(acc: &mut [f64; 2], v: f64) {
    acc[0] += v;
    acc[1] += v * v;
}

struct Moments {
    mean: f64,
    var: f64,
}

fn moments(sum: f64, sum_sq: f64, n: f64) -> Moments {
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Moments { mean, var }
}

/// Estimates every theory constant by sampling `R exp(jΦ) = 1 + w / rho0`.
///
/// Deterministic for a fixed `(seed, samples)`: samples are drawn in fixed
/// chunks, each with its own keyed stream, and combined in chunk order.
pub fn constants_mc(
    noise: &dyn NoiseModel,
    m: u32,
    rho0: f64,
    samples: u64,
    seed: u64,
) -> Result<McFigures> {
    if m < 2 {
        return Err(Error::domain("constellation size must be at least 2"));
    }
    if !(rho0 > 0.0) {
        return Err(Error::domain(format!(
            "amplitude must be positive, got {rho0}"
        )));
    }
    if samples < MC_MIN_SAMPLES {
        return Err(Error::domain(format!(
            "need at least {MC_MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let mu = m as usize;
    let step = 2.0 * PI / m as f64;
    let delta = (0.01f64).min(PI / (8.0 * m as f64));
    let weight = 2.0 * (PI / m as f64).sin();
    let centres: Vec<f64> = (0..mu).map(|k| step * k as f64 + 0.5 * step).collect();

    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<Sums> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = keyed_rng(seed, chunk, 0, TAG_NOISE_CHUNK);
            let count = CHUNK.min(samples - chunk * CHUNK);
            let mut s = Sums::new(mu);
            for _ in 0..count {
                let x = Complex64::new(1.0, 0.0) + noise.sample(&mut rng) / rho0;
                let r = x.norm();
                let phi = x.arg();
                let wrapped = grid_split_raw(phi, m).1;
                let (ws, wc) = wrapped.sin_cos();
                let t1 = r * wc;
                let t5 = t1 * t1;
                push(&mut s.h1, x.re);
                push(&mut s.t1, t1);
                push(&mut s.a1, x.im * x.im);
                push(&mut s.a2, (r * ws).powi(2));
                push(&mut s.b1, x.re * x.re);
                push(&mut s.t5, t5);
                s.t1t5 += t1 * t5;
                let mut in_centre = false;
                for (k, &c) in centres.iter().enumerate() {
                    let off = wrap_pi_raw(phi - c);
                    if off.abs() < 3.0 * delta {
                        let slot = if off < -delta {
                            0
                        } else if off < delta {
                            in_centre = true;
                            s.bins[k][3] += r * r;
                            1
                        } else {
                            2
                        };
                        s.bins[k][slot] += r;
                    }
                }
                let q = if in_centre { r / (2.0 * delta) } else { 0.0 };
                push(&mut s.h, t1 - weight * q);
                s.n += 1.0;
            }
            s
        })
        .collect();

    // fixed chunk order keeps the result independent of the thread count
    let mut total = Sums::new(mu);
    for s in &partial {
        total.merge(s);
    }

    let n = total.n;
    let se = |m: &Moments| (m.var / n).sqrt();
    let h1 = moments(total.h1[0], total.h1[1], n);
    let h2 = moments(total.t1[0], total.t1[1], n);
    let a1 = moments(total.a1[0], total.a1[1], n);
    let a2 = moments(total.a2[0], total.a2[1], n);
    let b1 = moments(total.b1[0], total.b1[1], n);
    let t5 = moments(total.t5[0], total.t5[1], n);
    let hh = moments(total.h[0], total.h[1], n);
    let cov_t1_t5 = (total.t1t5 - n * h2.mean * t5.mean) / (n - 1.0);
    let var_b2 = (t5.var + 4.0 * h2.mean * h2.mean * h2.var - 4.0 * h2.mean * cov_t1_t5).max(0.0);

    let width = 2.0 * delta;
    let mut g = Vec::with_capacity(mu);
    let mut g_se = Vec::with_capacity(mu);
    let mut g_bias = Vec::with_capacity(mu);
    for b in &total.bins {
        let [lo, mid, hi, mid_sq] = *b;
        let centre = mid / (n * width);
        let second = (lo / (n * width) - 2.0 * centre + hi / (n * width)) / (width * width);
        let var = (mid_sq / (width * width) / n - centre * centre).max(0.0) * n / (n - 1.0);
        g.push(centre);
        g_se.push((var / n).sqrt());
        g_bias.push(second.abs() * delta * delta / 6.0);
    }

    let reliable = [
        h1.mean, h2.mean, a1.mean, a2.mean, b1.mean, t5.mean, hh.mean,
    ]
    .iter()
    .all(|x| x.is_finite())
        && second_moment_stable(&partial);

    let figures = NoiseFigures {
        m,
        h1_0: h1.mean,
        h2_0: h2.mean,
        h: hh.mean,
        a1: a1.mean,
        a2: a2.mean,
        b1: b1.mean - 1.0,
        b2: t5.mean - h2.mean * h2.mean,
        g_boundaries: g,
    };
    let errors = FigureErrors {
        h1_0: se(&h1),
        h2_0: se(&h2),
        h: se(&hh),
        a1: se(&a1),
        a2: se(&a2),
        b1: se(&b1),
        b2: (var_b2 / n).sqrt(),
        g_boundaries: g_se,
    };
    Ok(McFigures {
        figures,
        errors,
        samples,
        bin_half_width: delta,
        g_bias,
        reliable,
    })
}

/// Compares the spread of `R² cos²Φ` between the two halves of the run.
fn second_moment_stable(partial: &[Sums]) -> bool {
    if partial.len() < 2 {
        return true;
    }
    let half = partial.len() / 2;
    let var = |part: &[Sums]| {
        let (n, s, ss) = part.iter().fold((0.0, 0.0, 0.0), |(n, s, ss), p| {
            (n + p.n, s + p.b1[0], ss + p.b1[1])
        });
        moments(s, ss, n).var
    };
    let (first, second) = (var(&partial[..half]), var(&partial[half..]));
    first.is_finite()
        && second.is_finite()
        && first.max(second) <= 10.0 * first.min(second).max(f64::MIN_POSITIVE)
}
