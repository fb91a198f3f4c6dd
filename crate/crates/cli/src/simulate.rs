use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::ValueEnum;
use mpsk_ls::{
    run_sweep, AmplitudeWeight, EstimatorKind, NoiseKind, PilotLayout, SweepConfig, SweepResult,
};
use serde::{Deserialize, Serialize};

use crate::grid::parse_grid;
use crate::output::{num, opt, write_csv, write_manifest};
use crate::{usage, with_threads};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Mackenthun,
    Pilot,
    Vv,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Gaussian,
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    Prefix,
    Spread,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Constellation size.
    #[arg(long = "M", default_value_t = 4)]
    m: u32,
    /// Frame length.
    #[arg(long = "L", default_value_t = 4096)]
    len: usize,
    /// Number of pilot symbols.
    #[arg(long, default_value_t = 0)]
    pilots: usize,
    /// SNR grid in dB: start:step:stop, a comma list, or one value.
    #[arg(long, allow_hyphen_values = true, default_value = "-20:1:20")]
    snr: String,
    #[arg(long, default_value_t = 5000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// One or more estimators, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mackenthun")]
    estimator: Vec<EstimatorArg>,
    /// Data weight for the weighted estimator.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = NoiseArg::Gaussian)]
    noise: NoiseArg,
    #[arg(long, value_enum, default_value_t = LayoutArg::Prefix)]
    layout: LayoutArg,
    #[arg(long, default_value_t = 1.0)]
    rho0: f64,
    /// Samples for the sampled theory constants (ring noise).
    #[arg(long, default_value_t = 10_000_000)]
    theory_samples: u64,
    /// CSV destination; a manifest is written next to it. Standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; never changes the output.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    /// Re-run the sweeps recorded in a manifest.
    #[arg(long)]
    from_manifest: Option<PathBuf>,
}

#[derive(Serialize, Deserialize)]
struct Body {
    master_seed: u64,
    configs: Vec<SweepConfig>,
}

fn configs_from_args(args: &Args) -> anyhow::Result<Vec<SweepConfig>> {
    let grid = parse_grid(&args.snr)?;
    let wants_weighted = args.estimator.contains(&EstimatorArg::Weighted);
    if wants_weighted && args.beta.is_none() {
        return Err(usage("--estimator weighted needs --beta"));
    }
    if !wants_weighted && args.beta.is_some() {
        return Err(usage("--beta only applies to --estimator weighted"));
    }
    let mut seen = Vec::new();
    let mut configs = Vec::new();
    for &e in &args.estimator {
        if seen.contains(&e) {
            return Err(usage(format!("estimator {e:?} listed twice")));
        }
        seen.push(e);
        let estimator = match e {
            EstimatorArg::Mackenthun => EstimatorKind::Mackenthun,
            EstimatorArg::Pilot => EstimatorKind::PilotOnly,
            EstimatorArg::Vv => EstimatorKind::ViterbiViterbi {
                weight: AmplitudeWeight::Unit,
            },
            EstimatorArg::Weighted => EstimatorKind::Weighted {
                beta: args.beta.unwrap_or(1.0),
            },
        };
        let trials = usize::try_from(args.trials).map_err(|_| usage("--trials too large"))?;
        configs.push(SweepConfig {
            m: args.m,
            len: args.len,
            pilots: args.pilots,
            snr_grid_db: grid.clone(),
            trials,
            rho0: args.rho0,
            master_seed: args.seed,
            estimator,
            noise: match args.noise {
                NoiseArg::Gaussian => NoiseKind::Gaussian,
                NoiseArg::Ring => NoiseKind::Ring,
            },
            layout: match args.layout {
                LayoutArg::Prefix => PilotLayout::Prefix,
                LayoutArg::Spread => PilotLayout::Spread,
            },
            theory_samples: args.theory_samples,
        });
    }
    Ok(configs)
}

const HEADER: [&str; 18] = [
    "estimator",
    "beta",
    "snr_db",
    "kappa",
    "mse_phase_sim",
    "se_phase",
    "var_amp_sim",
    "se_amp",
    "amp_mean_sim",
    "se_amp_mean",
    "cross_cov_sim",
    "se_cross",
    "mse_phase_theory",
    "se_phase_theory",
    "var_amp_theory",
    "se_amp_theory",
    "amp_mean_theory",
    "theory_status",
];

fn rows(results: &[SweepResult]) -> Vec<Vec<String>> {
    let points = results.first().map_or(0, |r| r.rows.len());
    let mut out = Vec::new();
    for i in 0..points {
        for result in results {
            let r = &result.rows[i];
            let beta = match result.config.estimator {
                EstimatorKind::Weighted { beta } => num(beta),
                _ => String::new(),
            };
            out.push(vec![
                result.config.estimator.name().to_string(),
                beta,
                num(r.snr_db),
                num(r.kappa),
                num(r.mse_phase_sim),
                num(r.se_phase),
                opt(r.var_amp_sim),
                opt(r.se_amp),
                opt(r.amp_mean_sim),
                opt(r.se_amp_mean),
                opt(r.cross_cov_sim),
                opt(r.se_cross),
                opt(r.mse_phase_theory),
                opt(r.se_phase_theory),
                opt(r.var_amp_theory),
                opt(r.se_amp_theory),
                opt(r.amp_mean_theory),
                r.theory_status.as_str().to_string(),
            ]);
        }
    }
    out
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let configs = match &args.from_manifest {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let body: Body = serde_json::from_str(&text)
                .with_context(|| format!("bad manifest {}", path.display()))?;
            if body.configs.is_empty() {
                return Err(usage("manifest lists no sweeps"));
            }
            body.configs
        }
        None => configs_from_args(&args)?,
    };
    for c in &configs {
        c.validate().map_err(|e| usage(e.to_string()))?;
    }
    let threads = args.threads.map(|t| t as usize);
    let results = with_threads(threads, || {
        configs
            .iter()
            .map(run_sweep)
            .collect::<mpsk_ls::Result<Vec<_>>>()
    })??;
    for r in &results {
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
    }
    write_csv(args.out.as_deref(), &HEADER, &rows(&results))?;
    if let Some(out) = &args.out {
        let body = Body {
            master_seed: configs[0].master_seed,
            configs,
        };
        let manifest = write_manifest(out, "simulate", &body)?;
        eprintln!("wrote {} and {}", out.display(), manifest.display());
    }
    Ok(ExitCode::SUCCESS)
}
