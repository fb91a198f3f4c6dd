use std::f64::consts::PI;

use mpsk_ls::asymptotics::quadrature::{breakpoints, integrate};
use mpsk_ls::asymptotics::{first_moment, gaussian_g, objective_curve, AngularWeight};
use mpsk_ls::constants_gaussian;

#[test]
fn h1_is_one() {
    for kappa in [0.25, 1.0, 4.0, 16.0] {
        let f = constants_gaussian(4, kappa).unwrap();
        assert!((f.h1_0 - 1.0).abs() <= 1e-6, "kappa {kappa}: {}", f.h1_0);
    }
}

#[test]
fn wrapped_sine_moment_vanishes() {
    for m in [2u32, 3, 4, 8, 16] {
        for kappa in [0.05, 0.5, 2.0, 50.0] {
            let v = first_moment(kappa, m, AngularWeight::SinWrapped, 0.0)
                .unwrap()
                .value;
            assert!(v.abs() <= 1e-6, "M {m} kappa {kappa}: {v}");
        }
    }
}

#[test]
fn objective_curve_peaks_at_zero() {
    let grid: Vec<f64> = (0..512)
        .map(|i| -PI + 2.0 * PI * i as f64 / 512.0)
        .collect();
    for m in [2u32, 4, 8] {
        for kappa in [0.5, 2.0, 10.0] {
            for (p, d) in [(1.0, 0.0), (0.5, 0.5), (0.0, 1.0)] {
                let half = PI / m as f64;
                let points: Vec<f64> = grid
                    .iter()
                    .copied()
                    .filter(|&x| p > 0.0 || (-half..half).contains(&x))
                    .collect();
                let values: Vec<f64> = points
                    .iter()
                    .map(|&x| objective_curve(kappa, m, p, d, x).unwrap())
                    .collect();
                let best = values
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .unwrap()
                    .0;
                assert_eq!(
                    points[best], 0.0,
                    "M {m} kappa {kappa} p {p}: peak at {}",
                    points[best]
                );
            }
        }
    }
}

#[test]
fn wrapping_reduces_sine_and_raises_cosine_dispersion() {
    for m in [2u32, 4, 8] {
        for kappa in [0.01, 0.1, 0.5, 2.0, 10.0, 100.0] {
            let f = constants_gaussian(m, kappa).unwrap();
            assert!(
                f.a2 <= f.a1 * (1.0 + 1e-9),
                "M {m} kappa {kappa}: A2 {} > A1 {}",
                f.a2,
                f.a1
            );
            // E R² cos²⟨Φ⟩ ≥ E R² cos²Φ, since |⟨Φ⟩| ≤ |Φ| on the principal branch
            let wrapped = f.b2 + f.h2_0 * f.h2_0;
            let plain = f.b1 + 1.0;
            assert!(
                wrapped >= plain * (1.0 - 1e-9),
                "M {m} kappa {kappa}: {wrapped} < {plain}"
            );
        }
    }
}

#[test]
fn g_integrals_stable_under_refinement() {
    for m in [2u32, 4, 8] {
        for kappa in [0.05, 1.0, 20.0] {
            let step = 2.0 * PI / m as f64;
            let edges: Vec<f64> = (0..=m).map(|k| -PI + step * (k as f64 + 0.5)).collect();
            let coarse = breakpoints(-PI, PI, edges.iter().copied());
            let fine = breakpoints(
                -PI,
                PI,
                coarse
                    .windows(2)
                    .map(|w| 0.5 * (w[0] + w[1]))
                    .chain(coarse.iter().copied()),
            );
            let h2 = |phi: f64| {
                let w = phi - step * (phi / step).round();
                w.cos() * gaussian_g(phi, kappa).unwrap()
            };
            let a = integrate(h2, &coarse, 1e-11).unwrap().value;
            let b = integrate(h2, &fine, 1e-11).unwrap().value;
            assert!(
                (a - b).abs() <= 1e-7 * a.abs(),
                "M {m} kappa {kappa}: {a} vs {b}"
            );
            let direct = first_moment(kappa, m, AngularWeight::CosWrapped, 0.0)
                .unwrap()
                .value;
            assert!((direct - b).abs() <= 1e-7 * b.abs());
        }
    }
}
