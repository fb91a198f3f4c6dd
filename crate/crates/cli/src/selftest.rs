use std::process::ExitCode;
use std::time::Instant;

use mpsk_ls::asymptotics::{first_moment, second_moment, AngularWeight};
use mpsk_ls::{
    apply_channel, brute_force, mackenthun, mackenthun_weighted, naive_enumeration, random_frame,
    run_sweep, snr_to_sigma, ChannelParams, Constellation, FramePlan, GaussianNoise, SweepConfig,
    ZeroNoise,
};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::usage;

const SUITES: [&str; 6] = [
    "oracle",
    "zero-noise",
    "weighted",
    "quadrature",
    "theory",
    "determinism",
];
const SEED: u64 = 1;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Run only these suites (comma separated).
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Force a named failure in one suite, to exercise the failure path.
    #[arg(long, hide = true)]
    inject_fault: Option<String>,
}

type Outcome = Result<String, String>;

fn random_plan(rng: &mut ChaCha8Rng, m: u32, len: usize, pilots: usize) -> FramePlan {
    let mut positions: Vec<usize> = (0..len).collect();
    positions.shuffle(rng);
    positions.truncate(pilots);
    let symbols = (0..pilots)
        .map(|_| rng.random_range(0..m as usize))
        .collect();
    FramePlan::new(
        Constellation::new(m).expect("valid M"),
        len,
        positions,
        symbols,
    )
    .expect("valid plan")
}

fn noisy(rng: &mut ChaCha8Rng, plan: &FramePlan, snr_db: f64) -> Result<Vec<Complex64>, String> {
    let rho0 = rng.random_range(0.5..2.0);
    let params = ChannelParams::random_phase(rho0, rng).map_err(|e| e.to_string())?;
    let noise = GaussianNoise::new(snr_to_sigma(snr_db, rho0).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let symbols = random_frame(plan, rng);
    Ok(apply_channel(plan, &symbols, params, &noise, rng)
        .map_err(|e| e.to_string())?
        .into_samples())
}

fn oracle(fault: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = [2u32, 4, 8][rng.random_range(0..3)];
        let data = rng.random_range(0..=5usize);
        let pilots = rng.random_range(1..=3usize);
        let plan = random_plan(&mut rng, m, data + pilots, pilots);
        let snr = [-5.0, 5.0, 15.0][rng.random_range(0..3)];
        let samples = noisy(&mut rng, &plan, snr)?;
        let frame = mpsk_ls::ReceivedFrame::new(&plan, samples).map_err(|e| e.to_string())?;
        let fast = mackenthun(&frame).map_err(|e| e.to_string())?;
        let brute = brute_force(&frame).map_err(|e| e.to_string())?;
        let (naive, _) = naive_enumeration(&frame).map_err(|e| e.to_string())?;
        for other in [&brute, &naive] {
            worst = worst.max((fast.objective - other.objective).abs());
            worst = worst.max((fast.amplitude.to_complex() - other.amplitude.to_complex()).norm());
        }
    }
    if fault {
        worst += 1.0;
    }
    if worst <= 1e-9 {
        Ok(format!(
            "100 instances agree with exhaustive search, max gap {worst:.1e}"
        ))
    } else {
        Err(format!(
            "fast search disagrees with exhaustive search by {worst:.3e}"
        ))
    }
}

fn zero_noise(fault: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let m = [2u32, 4, 8][rng.random_range(0..3)];
        let len = rng.random_range(1..=128usize);
        let pilots = rng.random_range(1..=len);
        let plan = random_plan(&mut rng, m, len, pilots);
        let params = ChannelParams::random_phase(rng.random_range(0.1..10.0), &mut rng)
            .map_err(|e| e.to_string())?;
        let symbols = random_frame(&plan, &mut rng);
        let frame = apply_channel(&plan, &symbols, params, &ZeroNoise, &mut rng)
            .map_err(|e| e.to_string())?;
        let est = mackenthun(&frame).map_err(|e| e.to_string())?;
        worst = worst.max((est.amplitude.to_complex() - params.gain()).norm());
    }
    if fault {
        worst = 1.0;
    }
    if worst <= 1e-12 {
        Ok(format!(
            "200 noiseless frames recovered, max error {worst:.1e}"
        ))
    } else {
        Err(format!("noiseless recovery error {worst:.3e} above 1e-12"))
    }
}

fn weighted(fault: bool) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let beta = if fault { 0.999 } else { 1.0 };
    for i in 0..50 {
        let m = [2u32, 4, 8][rng.random_range(0..3)];
        let len = rng.random_range(2..=256usize);
        let pilots = rng.random_range(0..=len / 2);
        let plan = random_plan(&mut rng, m, len, pilots);
        let samples = noisy(&mut rng, &plan, 0.0)?;
        let frame = mpsk_ls::ReceivedFrame::new(&plan, samples).map_err(|e| e.to_string())?;
        let plain = mackenthun(&frame).map_err(|e| e.to_string())?;
        let w = mackenthun_weighted(&frame, beta).map_err(|e| e.to_string())?;
        if plain.amplitude.to_complex() != w.amplitude.to_complex()
            || plain.objective != w.objective
        {
            return Err(format!("instance {i}: weighted search at beta = {beta} is not bit-identical to the plain search"));
        }
    }
    Ok("50 instances bit-identical at beta = 1".into())
}

fn quadrature(fault: bool) -> Outcome {
    let err = |e: mpsk_ls::Error| e.to_string();
    let offset = if fault { 1e-6 } else { 0.0 };
    for kappa in [0.5, 2.0, 10.0] {
        let closed = 0.5 / kappa + offset;
        let a1 = second_moment(kappa, 4, AngularWeight::SinSq)
            .map_err(err)?
            .value;
        if (a1 - closed).abs() > 1e-8 {
            return Err(format!(
                "kappa = {kappa}: second sine moment {a1} differs from 1/(2 kappa)"
            ));
        }
        for m in [2u32, 4, 8] {
            let cos = first_moment(kappa, m, AngularWeight::Cos, 0.0)
                .map_err(err)?
                .value;
            if (cos - 1.0).abs() > 1e-6 {
                return Err(format!(
                    "kappa = {kappa}, M = {m}: first cosine moment {cos} is not 1"
                ));
            }
        }
    }
    Ok("closed-form moments reproduced at kappa = 0.5, 2, 10".into())
}

fn theory(fault: bool) -> Outcome {
    let config = SweepConfig::new(4, 1024, 128, vec![10.0], 500, SEED);
    let result = run_sweep(&config).map_err(|e| e.to_string())?;
    let row = &result.rows[0];
    let scale = if fault { 1.5 } else { 1.0 };
    let theory = row.mse_phase_theory.ok_or("no phase prediction at 10 dB")? * scale;
    let z = (row.mse_phase_sim - theory) / row.se_phase.hypot(row.se_phase_theory.unwrap_or(0.0));
    let amp_theory = row
        .var_amp_theory
        .ok_or("no amplitude prediction at 10 dB")?;
    let amp_z = (row.var_amp_sim.unwrap_or(f64::NAN) - amp_theory) / row.se_amp.unwrap_or(f64::NAN);
    if z.abs() <= 3.0 && amp_z.abs() <= 3.0 {
        Ok(format!(
            "M=4 L=1024 |P|=128 10 dB: phase z = {z:+.2}, amplitude z = {amp_z:+.2}"
        ))
    } else {
        Err(format!(
            "simulation departs from prediction: phase z = {z:+.2}, amplitude z = {amp_z:+.2}"
        ))
    }
}

fn determinism(fault: bool) -> Outcome {
    let config = SweepConfig::new(8, 256, 16, vec![0.0, 6.0], 200, SEED);
    let mut other = config.clone();
    if fault {
        other.master_seed += 1;
    }
    let pool = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| e.to_string())
    };
    let a = pool(1)?
        .install(|| run_sweep(&config))
        .map_err(|e| e.to_string())?;
    let b = pool(3)?
        .install(|| run_sweep(&other))
        .map_err(|e| e.to_string())?;
    let same = a.rows.iter().zip(&b.rows).all(|(x, y)| {
        x.mse_phase_sim.to_bits() == y.mse_phase_sim.to_bits()
            && x.var_amp_sim.map(f64::to_bits) == y.var_amp_sim.map(f64::to_bits)
    });
    if same {
        Ok("sweep identical on 1 and 3 threads".into())
    } else {
        Err("sweep results depend on the thread count".into())
    }
}

fn run_suite(name: &str, fault: bool) -> Outcome {
    match name {
        "oracle" => oracle(fault),
        "zero-noise" => zero_noise(fault),
        "weighted" => weighted(fault),
        "quadrature" => quadrature(fault),
        "theory" => theory(fault),
        "determinism" => determinism(fault),
        other => Err(format!("unknown suite {other}")),
    }
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    for s in args.suite.iter().chain(&args.inject_fault) {
        if !SUITES.contains(&s.as_str()) {
            return Err(usage(format!(
                "unknown suite {s:?}; known: {}",
                SUITES.join(", ")
            )));
        }
    }
    let selected: Vec<&str> = if args.suite.is_empty() {
        SUITES.to_vec()
    } else {
        SUITES
            .iter()
            .copied()
            .filter(|s| args.suite.iter().any(|a| a == s))
            .collect()
    };
    let mut failed = Vec::new();
    for name in selected {
        let start = Instant::now();
        let fault = args.inject_fault.as_deref() == Some(name);
        let outcome = run_suite(name, fault);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({secs:.2} s): {detail}"),
            Err(detail) => {
                println!("FAIL {name} ({secs:.2} s): {detail}");
                failed.push(name);
            }
        }
    }
    if failed.is_empty() {
        println!("PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAIL: {}", failed.join(", "));
        Ok(ExitCode::from(3))
    }
}
