use num_complex::Complex64;

use super::{pilot_correlation, EstimateReport};
use crate::angle::grid_split_raw;
use crate::error::{Error, Result};
use crate::signal::ReceivedFrame;

/// Least-squares estimate of `a0` and the data symbols.
pub fn mackenthun(frame: &ReceivedFrame<'_>) -> Result<EstimateReport> {
    search(frame, 1.0, None)
}

/// Least-squares estimate with the data terms of the sum of squares scaled
/// by `beta`. `beta = 1` is the unweighted estimator.
pub fn mackenthun_weighted(frame: &ReceivedFrame<'_>, beta: f64) -> Result<EstimateReport> {
    search(frame, beta, None)
}

/// Like [`mackenthun`], also returning the sum of squares of every candidate
/// `f_0, f_1, ..., f_{M|D|}` in visiting order.
pub fn mackenthun_traced(frame: &ReceivedFrame<'_>) -> Result<(EstimateReport, Vec<f64>)> {
    let mut trace = Vec::new();
    let report = search(frame, 1.0, Some(&mut trace))?;
    Ok((report, trace))
}

fn search(
    frame: &ReceivedFrame<'_>,
    beta: f64,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<EstimateReport> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!(
            "weight beta must be positive, got {beta}"
        )));
    }
    let plan = frame.plan();
    let c = plan.constellation();
    let m = c.order();
    let y = frame.samples();
    let data = plan.data_positions();
    let n_data = data.len();
    let normaliser = plan.pilot_positions().len() as f64 + beta * n_data as f64;

    let mut base = Vec::with_capacity(n_data);
    let mut residual = Vec::with_capacity(n_data);
    let mut g = Vec::with_capacity(n_data);
    for &i in data {
        let (n, z) = grid_split_raw(y[i].arg(), m);
        let b = n.rem_euclid(m as i64) as usize;
        base.push(b);
        residual.push(z);
        g.push(beta * y[i] * c.point(b).conj());
    }

    let energy = plan
        .pilot_positions()
        .iter()
        .map(|&i| y[i].norm_sqr())
        .sum::<f64>()
        + beta * data.iter().map(|&i| y[i].norm_sqr()).sum::<f64>();

    let mut acc = pilot_correlation(frame) + g.iter().sum::<Complex64>();
    let mut best_y = acc;
    let mut best_q = acc.norm_sqr() / normaliser;
    let mut best_k = 0usize;
    if let Some(t) = trace.as_deref_mut() {
        t.push(energy - best_q);
    }

    // stable sort: equal residuals keep their original order
    let mut order: Vec<usize> = (0..n_data).collect();
    order.sort_by(|&a, &b| residual[a].total_cmp(&residual[b]));

    let rot = c.point(1);
    let eta = rot - Complex64::new(1.0, 0.0);
    for k in 0..m as usize * n_data {
        let j = order[k % n_data];
        acc += eta * g[j];
        g[j] *= rot;
        let q = acc.norm_sqr() / normaliser;
        if q > best_q {
            best_q = q;
            best_y = acc;
            best_k = k + 1;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(energy - q);
        }
    }

    let decisions = (n_data > 0).then(|| candidate_decisions(&base, &order, best_k, m as usize));
    Ok(EstimateReport::from_correlation(
        best_y,
        normaliser,
        energy,
        decisions,
        Some(best_k),
    ))
}

/// Data decisions of candidate `f_k`: every step moves one symbol back by
/// one grid position, visiting data indices in `order` cyclically.
pub(super) fn candidate_decisions(
    base: &[usize],
    order: &[usize],
    k: usize,
    m: usize,
) -> Vec<usize> {
    let n = base.len();
    let (rounds, rem) = (k / n, k % n);
    let mut steps = vec![rounds; n];
    for &j in &order[..rem] {
        steps[j] += 1;
    }
    base.iter()
        .zip(steps)
        .map(|(&b, s)| (b + m - s % m) % m)
        .collect()
}
