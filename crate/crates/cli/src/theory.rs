use std::path::PathBuf;
use std::process::ExitCode;

use mpsk_ls::montecarlo::noise_at;
use mpsk_ls::{
    constants_gaussian, constants_mc, db_to_linear, Error, NoiseFigures, NoiseKind, KAPPA_FLOOR,
};

use crate::grid::parse_grid;
use crate::output::{num, write_csv, write_manifest};
use crate::simulate::NoiseArg;
use crate::usage;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[arg(long = "M", default_value_t = 4)]
    m: u32,
    /// Frame length; with --pilots fixes the pilot fraction p = pilots / L.
    #[arg(long = "L", default_value_t = 4096)]
    len: usize,
    #[arg(long, default_value_t = 0)]
    pilots: usize,
    #[arg(long, allow_hyphen_values = true, default_value = "-20:1:20")]
    snr: String,
    #[arg(long, default_value_t = 1.0)]
    rho0: f64,
    #[arg(long, value_enum, default_value_t = NoiseArg::Gaussian)]
    noise: NoiseArg,
    /// Samples for the sampled constants (ring noise).
    #[arg(long, default_value_t = 10_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

const HEADER: [&str; 14] = [
    "snr_db",
    "kappa",
    "h1_0",
    "h2_0",
    "G0",
    "H",
    "A1",
    "A2",
    "B1",
    "B2",
    "phase_var_per_L",
    "amp_var_per_L",
    "amp_mean",
    "status",
];

fn row(
    snr_db: f64,
    kappa: f64,
    f: &NoiseFigures,
    p: f64,
    d: f64,
    rho0: f64,
    reliable: bool,
) -> Vec<String> {
    let g0 = f.g0(p, d);
    let den = p + f.h * d;
    let (phase, status) = if den > 0.0 {
        (
            num((p * f.a1 + d * f.a2) / (den * den)),
            if reliable { "ok" } else { "unreliable" },
        )
    } else {
        (String::new(), "breakdown")
    };
    vec![
        num(snr_db),
        num(kappa),
        num(f.h1_0),
        num(f.h2_0),
        num(g0),
        num(f.h),
        num(f.a1),
        num(f.a2),
        num(f.b1),
        num(f.b2),
        phase,
        num(rho0 * rho0 * (p * f.b1 + d * f.b2)),
        num(rho0 * g0),
        status.to_string(),
    ]
}

#[derive(serde::Serialize)]
struct Body<'a> {
    m: u32,
    len: usize,
    pilots: usize,
    snr_grid_db: &'a [f64],
    rho0: f64,
    noise: &'static str,
    samples: u64,
    seed: u64,
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    if args.m < 2 {
        return Err(usage("--M must be at least 2"));
    }
    if args.len == 0 || args.pilots > args.len {
        return Err(usage(format!(
            "--pilots {} does not fit --L {}",
            args.pilots, args.len
        )));
    }
    if !(args.rho0 > 0.0 && args.rho0.is_finite()) {
        return Err(usage("--rho0 must be positive"));
    }
    let grid = parse_grid(&args.snr)?;
    let p = args.pilots as f64 / args.len as f64;
    let d = 1.0 - p;
    let mut rows = Vec::new();
    for &snr_db in &grid {
        let kappa = db_to_linear(snr_db);
        let (figures, reliable) = match args.noise {
            NoiseArg::Gaussian => match constants_gaussian(args.m, kappa) {
                Ok(f) => (f, true),
                Err(Error::TheoryOutOfRange { .. }) => {
                    let mut r = vec![num(snr_db), num(kappa)];
                    r.extend(std::iter::repeat_n(String::new(), HEADER.len() - 3));
                    r.push("out_of_range".into());
                    rows.push(r);
                    continue;
                }
                Err(e) => return Err(e.into()),
            },
            NoiseArg::Ring => {
                let noise = noise_at(NoiseKind::Ring, snr_db, args.rho0)?;
                let mc = constants_mc(noise.as_ref(), args.m, args.rho0, args.samples, args.seed)
                    .map_err(|e| usage(e.to_string()))?;
                (mc.figures, mc.reliable)
            }
        };
        rows.push(row(snr_db, kappa, &figures, p, d, args.rho0, reliable));
    }
    write_csv(args.out.as_deref(), &HEADER, &rows)?;
    if let Some(out) = &args.out {
        let body = Body {
            m: args.m,
            len: args.len,
            pilots: args.pilots,
            snr_grid_db: &grid,
            rho0: args.rho0,
            noise: match args.noise {
                NoiseArg::Gaussian => "gaussian",
                NoiseArg::Ring => "ring",
            },
            samples: args.samples,
            seed: args.seed,
        };
        write_manifest(out, "theory", &body)?;
    }
    if grid.iter().any(|&s| db_to_linear(s) < KAPPA_FLOOR) && args.noise == NoiseArg::Gaussian {
        eprintln!("note: rows below kappa = {KAPPA_FLOOR} are outside the theory range");
    }
    Ok(ExitCode::SUCCESS)
}
