//! Slow reference estimators used to validate the recursive search.

use num_complex::Complex64;

use super::{hard_decision, mackenthun::candidate_decisions, pilot_correlation, EstimateReport};
use crate::angle::grid_split_raw;
use crate::error::{Error, Result};
use crate::signal::ReceivedFrame;

/// Largest `M^|D|` that [`brute_force`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 10_000_000;

fn energy(frame: &ReceivedFrame<'_>) -> f64 {
    frame.samples().iter().map(|y| y.norm_sqr()).sum()
}

/// Global least-squares optimum over all `M^|D|` data assignments.
pub fn brute_force(frame: &ReceivedFrame<'_>) -> Result<EstimateReport> {
    let plan = frame.plan();
    let c = plan.constellation();
    let m = c.order() as usize;
    let data = plan.data_positions();
    let candidates = (m as u128)
        .checked_pow(data.len() as u32)
        .unwrap_or(u128::MAX);
    if candidates > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            candidates,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let y = frame.samples();
    let pilots = pilot_correlation(frame);
    let total = plan.len() as f64;
    let mut digits = vec![0usize; data.len()];
    let mut best: Option<(f64, Complex64, Vec<usize>)> = None;
    loop {
        let acc = pilots
            + data
                .iter()
                .zip(&digits)
                .map(|(&i, &k)| y[i] * c.point(k).conj())
                .sum::<Complex64>();
        let q = acc.norm_sqr() / total;
        if best.as_ref().is_none_or(|(bq, _, _)| q > *bq) {
            best = Some((q, acc, digits.clone()));
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == digits.len() {
                let (_, acc, d) = best.expect("at least one candidate");
                let decisions = (!d.is_empty()).then_some(d);
                return Ok(EstimateReport::from_correlation(
                    acc,
                    total,
                    energy(frame),
                    decisions,
                    None,
                ));
            }
            digits[pos] += 1;
            if digits[pos] < m {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Evaluates every candidate sequence `f_0, ..., f_{M|D|}` by recomputing
/// its correlation from scratch, `O(L^2)` in total. Returns the estimate and
/// the sum of squares of each candidate in visiting order.
pub fn naive_enumeration(frame: &ReceivedFrame<'_>) -> Result<(EstimateReport, Vec<f64>)> {
    let plan = frame.plan();
    let c = plan.constellation();
    let m = c.order() as usize;
    let y = frame.samples();
    let data = plan.data_positions();
    let total = plan.len() as f64;
    let a = energy(frame);

    let base: Vec<usize> = data.iter().map(|&i| hard_decision(y[i], 0.0, c)).collect();
    let residual: Vec<f64> = data
        .iter()
        .map(|&i| grid_split_raw(y[i].arg(), c.order()).1)
        .collect();
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.sort_by(|&p, &q| residual[p].total_cmp(&residual[q]));

    let correlation = |f: &[usize]| -> Complex64 {
        let pilots: Complex64 = plan.pilots().map(|(i, p)| y[i] * p.conj()).sum();
        pilots
            + data
                .iter()
                .zip(f)
                .map(|(&i, &k)| y[i] * c.point(k).conj())
                .sum::<Complex64>()
    };

    let steps = m * data.len();
    let mut f = base.clone();
    let mut trace = Vec::with_capacity(steps + 1);
    let mut best_q = f64::NEG_INFINITY;
    let mut best_k = 0;
    let mut best_y = Complex64::new(0.0, 0.0);
    for k in 0..=steps {
        let acc = correlation(&f);
        let q = acc.norm_sqr() / total;
        trace.push(a - q);
        if q > best_q {
            best_q = q;
            best_k = k;
            best_y = acc;
        }
        if k < steps {
            let j = order[k % data.len()];
            f[j] = (f[j] + m - 1) % m;
        }
    }
    let decisions = (!data.is_empty()).then(|| candidate_decisions(&base, &order, best_k, m));
    Ok((
        EstimateReport::from_correlation(best_y, total, a, decisions, Some(best_k)),
        trace,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{mackenthun, mackenthun_traced, pilot_only, sum_of_squares};
    use crate::signal::{
        apply_channel, random_frame, ChannelParams, Constellation, FramePlan, GaussianNoise,
        ZeroNoise,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn brute_force_guard() {
        let plan = FramePlan::prefix(Constellation::new(8).unwrap(), 9, 0).unwrap();
        let frame = ReceivedFrame::new(&plan, vec![Complex64::new(1.0, 0.0); 9]).unwrap();
        assert!(matches!(brute_force(&frame), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn brute_force_without_data_is_pilot_only() {
        let plan = FramePlan::new(
            Constellation::new(4).unwrap(),
            3,
            vec![0, 1, 2],
            vec![0, 2, 1],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let noise = GaussianNoise::new(0.4).unwrap();
        let symbols = random_frame(&plan, &mut rng);
        let frame = apply_channel(
            &plan,
            &symbols,
            ChannelParams::new(1.0, 1.0).unwrap(),
            &noise,
            &mut rng,
        )
        .unwrap();
        let b = brute_force(&frame).unwrap();
        assert!(
            (b.amplitude.to_complex() - pilot_only(&frame).unwrap().to_complex()).norm() < 1e-15
        );
    }

    #[test]
    fn brute_force_noiseless_recovers_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let plan = FramePlan::prefix(Constellation::new(4).unwrap(), 7, 2).unwrap();
        let params = ChannelParams::new(1.5, -0.7).unwrap();
        let symbols = random_frame(&plan, &mut rng);
        let frame = apply_channel(&plan, &symbols, params, &ZeroNoise, &mut rng).unwrap();
        let b = brute_force(&frame).unwrap();
        assert!((b.amplitude.to_complex() - params.gain()).norm() < 1e-12);
        let sent: Vec<usize> = plan.data_positions().iter().map(|&i| symbols[i]).collect();
        assert_eq!(b.data_decisions.unwrap(), sent);
    }

    #[test]
    fn brute_force_beats_random_assignments() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let plan = FramePlan::prefix(Constellation::new(4).unwrap(), 8, 2).unwrap();
        let noise = GaussianNoise::new(0.8).unwrap();
        let symbols = random_frame(&plan, &mut rng);
        let frame = apply_channel(
            &plan,
            &symbols,
            ChannelParams::new(1.0, 0.3).unwrap(),
            &noise,
            &mut rng,
        )
        .unwrap();
        let b = brute_force(&frame).unwrap();
        let best = sum_of_squares(
            &frame,
            b.amplitude.to_complex(),
            b.data_decisions.as_ref().unwrap(),
        )
        .unwrap();
        for _ in 0..100 {
            let d: Vec<usize> = (0..6).map(|_| rng.random_range(0..4)).collect();
            // for fixed data the least-squares amplitude is Y / L
            let y = frame.samples();
            let c = plan.constellation();
            let acc: Complex64 = plan
                .pilots()
                .map(|(i, p)| y[i] * p.conj())
                .sum::<Complex64>()
                + plan
                    .data_positions()
                    .iter()
                    .zip(&d)
                    .map(|(&i, &k)| y[i] * c.point(k).conj())
                    .sum::<Complex64>();
            let ss = sum_of_squares(&frame, acc / 8.0, &d).unwrap();
            assert!(best <= ss + 1e-12);
        }
    }

    #[test]
    fn naive_trace_matches_recursive_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..40 {
            let m = [2, 4, 8][rng.random_range(0..3)];
            let len = rng.random_range(1..=70);
            let pilots = rng.random_range(0..=len.min(6));
            let plan = FramePlan::prefix(Constellation::new(m).unwrap(), len, pilots).unwrap();
            let noise = GaussianNoise::new(rng.random_range(0.1..1.5)).unwrap();
            let symbols = random_frame(&plan, &mut rng);
            let frame = apply_channel(
                &plan,
                &symbols,
                ChannelParams::random_phase(1.0, &mut rng).unwrap(),
                &noise,
                &mut rng,
            )
            .unwrap();
            let (fast, fast_trace) = mackenthun_traced(&frame).unwrap();
            let (slow, slow_trace) = naive_enumeration(&frame).unwrap();
            assert_eq!(fast_trace.len(), slow_trace.len());
            for (a, b) in fast_trace.iter().zip(&slow_trace) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
            let n_data = plan.data_positions().len().max(1);
            if pilots > 0 {
                assert_eq!(fast.candidate_index, slow.candidate_index);
                assert_eq!(fast.data_decisions, slow.data_decisions);
            } else {
                // rotations f_k, f_{k+|D|} tie exactly without pilots
                assert_eq!(
                    fast.candidate_index.unwrap() % n_data,
                    slow.candidate_index.unwrap() % n_data
                );
            }
            assert!((fast.objective - slow.objective).abs() < 1e-9);
            assert_eq!(mackenthun(&frame).unwrap(), fast);
        }
    }

    #[test]
    fn naive_noiseless_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let plan = FramePlan::prefix(Constellation::new(8).unwrap(), 20, 2).unwrap();
        let params = ChannelParams::new(0.9, 2.5).unwrap();
        let symbols = random_frame(&plan, &mut rng);
        let frame = apply_channel(&plan, &symbols, params, &ZeroNoise, &mut rng).unwrap();
        let (r, _) = naive_enumeration(&frame).unwrap();
        assert!((r.amplitude.to_complex() - params.gain()).norm() < 1e-12);
    }
}
