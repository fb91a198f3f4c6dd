//! Shared inputs for the benchmarks.

use mpsk_ls::{
    apply_channel, random_frame, snr_to_sigma, ChannelParams, Constellation, FramePlan,
    GaussianNoise,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A frame plan and the received samples of one noisy frame.
pub fn noisy_frame(
    m: u32,
    len: usize,
    pilots: usize,
    snr_db: f64,
    seed: u64,
) -> (FramePlan, Vec<Complex64>) {
    let plan = FramePlan::prefix(Constellation::new(m).unwrap(), len, pilots).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let symbols = random_frame(&plan, &mut rng);
    let params = ChannelParams::random_phase(1.0, &mut rng).unwrap();
    let noise = GaussianNoise::new(snr_to_sigma(snr_db, 1.0).unwrap()).unwrap();
    let samples = apply_channel(&plan, &symbols, params, &noise, &mut rng)
        .unwrap()
        .into_samples();
    (plan, samples)
}
