//! Wall-time growth of the search when the frame length doubles.
//! Kept in its own test binary so it does not compete with other tests for cores.

mod common;

use std::time::Instant;

use common::noisy_samples;
use mpsk_ls::{mackenthun, Constellation, FramePlan, ReceivedFrame};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn mean_time(len: usize, runs: usize) -> f64 {
    let plan = FramePlan::prefix(Constellation::new(4).unwrap(), len, len / 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(len as u64);
    let frames: Vec<_> = (0..runs)
        .map(|_| noisy_samples(&mut rng, &plan, 1.0, 5.0).2)
        .collect();
    // warm-up
    mackenthun(&ReceivedFrame::new(&plan, frames[0].clone()).unwrap()).unwrap();
    let mut total = 0.0;
    for samples in frames {
        let frame = ReceivedFrame::new(&plan, samples).unwrap();
        let start = Instant::now();
        std::hint::black_box(mackenthun(&frame).unwrap());
        total += start.elapsed().as_secs_f64();
    }
    total / runs as f64
}

#[test]
fn doubling_length_at_most_2_6x_slower() {
    let times: Vec<f64> = [1usize << 14, 1 << 15, 1 << 16]
        .iter()
        .map(|&l| mean_time(l, 20))
        .collect();
    for pair in times.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!(ratio <= 2.6, "time ratio {ratio:.2} ({:?})", times);
    }
}
