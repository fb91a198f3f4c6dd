#![allow(dead_code)]

use mpsk_ls::{
    apply_channel, random_frame, snr_to_sigma, ChannelParams, Constellation, FramePlan,
    GaussianNoise, NoiseModel,
};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Plan with pilots at random positions carrying random symbols.
pub fn random_plan(rng: &mut ChaCha8Rng, m: u32, len: usize, pilots: usize) -> FramePlan {
    let mut positions: Vec<usize> = (0..len).collect();
    positions.shuffle(rng);
    positions.truncate(pilots);
    let symbols = (0..pilots)
        .map(|_| rng.random_range(0..m as usize))
        .collect();
    FramePlan::new(Constellation::new(m).unwrap(), len, positions, symbols).unwrap()
}

pub fn noisy_samples(
    rng: &mut ChaCha8Rng,
    plan: &FramePlan,
    rho0: f64,
    snr_db: f64,
) -> (ChannelParams, Vec<usize>, Vec<Complex64>) {
    let params = ChannelParams::random_phase(rho0, rng).unwrap();
    let noise = GaussianNoise::new(snr_to_sigma(snr_db, rho0).unwrap()).unwrap();
    let symbols = random_frame(plan, rng);
    let samples = apply_channel(plan, &symbols, params, &noise as &dyn NoiseModel, rng)
        .unwrap()
        .into_samples();
    (params, symbols, samples)
}
