use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::ValueEnum;
use mpsk_ls::{
    brute_force, evaluate_decisions, mackenthun, mackenthun_weighted, naive_enumeration,
    pilot_only, viterbi_viterbi, AmplitudeWeight, Constellation, EstimateReport, FramePlan,
    ReceivedFrame,
};
use num_complex::Complex64;

use crate::output::num;
use crate::usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Mackenthun,
    Weighted,
    Pilot,
    Vv,
    Brute,
    Naive,
}

#[derive(clap::Args, Debug)]
pub struct Args {
    /// CSV with header `index,re_y,im_y,is_pilot,re_p,im_p`.
    input: PathBuf,
    #[arg(long = "M", default_value_t = 4)]
    m: u32,
    #[arg(long, value_enum, default_value_t = Method::Mackenthun)]
    estimator: Method,
    #[arg(long)]
    beta: Option<f64>,
    /// Also print the data symbol decisions.
    #[arg(long)]
    decisions: bool,
}

const HEADER: [&str; 6] = ["index", "re_y", "im_y", "is_pilot", "re_p", "im_p"];
// Pilot symbols given in decimal are matched to the grid within this distance.
const SYMBOL_TOL: f64 = 1e-6;

struct Parsed {
    samples: Vec<Complex64>,
    pilot_positions: Vec<usize>,
    pilot_symbols: Vec<usize>,
}

fn field(rec: &csv::StringRecord, i: usize, line: u64) -> anyhow::Result<&str> {
    rec.get(i)
        .ok_or_else(|| anyhow!("line {line}: missing column {}", HEADER[i]))
}

fn float(rec: &csv::StringRecord, i: usize, line: u64) -> anyhow::Result<f64> {
    let s = field(rec, i, line)?;
    let v: f64 = s
        .parse()
        .map_err(|_| anyhow!("line {line}: {} = {s:?} is not a number", HEADER[i]))?;
    if !v.is_finite() {
        bail!("line {line}: {} is not finite", HEADER[i]);
    }
    Ok(v)
}

fn parse(path: &PathBuf, constellation: &Constellation) -> anyhow::Result<Parsed> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let header = reader
        .headers()
        .with_context(|| format!("cannot read header of {}", path.display()))?
        .clone();
    if header.is_empty() {
        bail!("{} is empty", path.display());
    }
    if header.iter().collect::<Vec<_>>() != HEADER {
        bail!("line 1: expected header {}", HEADER.join(","));
    }
    let mut rows: Vec<(usize, Complex64, Option<usize>, u64)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.context("malformed CSV")?;
        let line = rec.position().map_or(0, |p| p.line());
        let idx = field(&rec, 0, line)?;
        let index: usize = idx
            .parse()
            .map_err(|_| anyhow!("line {line}: index {idx:?} is not a nonnegative integer"))?;
        let y = Complex64::new(float(&rec, 1, line)?, float(&rec, 2, line)?);
        let pilot = match field(&rec, 3, line)? {
            "1" | "true" => true,
            "0" | "false" => false,
            other => bail!("line {line}: is_pilot = {other:?} is not 0/1"),
        };
        let symbol = if pilot {
            let p = Complex64::new(float(&rec, 4, line)?, float(&rec, 5, line)?);
            let k = constellation.index_of(p, SYMBOL_TOL).ok_or_else(|| {
                anyhow!(
                    "line {line}: pilot {p} is not a {}-PSK symbol",
                    constellation.order()
                )
            })?;
            Some(k)
        } else {
            None
        };
        rows.push((index, y, symbol, line));
    }
    if rows.is_empty() {
        bail!("{} has no samples", path.display());
    }
    rows.sort_by_key(|r| r.0);
    let mut parsed = Parsed {
        samples: Vec::new(),
        pilot_positions: Vec::new(),
        pilot_symbols: Vec::new(),
    };
    for (expected, (index, y, symbol, line)) in rows.into_iter().enumerate() {
        if index != expected {
            bail!("line {line}: indices must be 0..L-1 without gaps or repeats (found {index}, expected {expected})");
        }
        parsed.samples.push(y);
        if let Some(k) = symbol {
            parsed.pilot_positions.push(index);
            parsed.pilot_symbols.push(k);
        }
    }
    Ok(parsed)
}

fn print_report(name: &str, r: &EstimateReport, show_decisions: bool) {
    let mut line = format!(
        "estimator={name} rho={} theta={} objective={} sum_of_squares={}",
        num(r.amplitude.rho()),
        num(r.amplitude.theta()),
        num(r.objective),
        num(r.sum_of_squares)
    );
    if show_decisions {
        let d = r.data_decisions.as_deref().unwrap_or(&[]);
        let list: Vec<String> = d.iter().map(|k| k.to_string()).collect();
        line.push_str(&format!(" decisions={}", list.join(",")));
    }
    println!("{line}");
}

pub fn run(args: Args) -> anyhow::Result<ExitCode> {
    let constellation = Constellation::new(args.m).map_err(|e| usage(e.to_string()))?;
    match (args.estimator, args.beta) {
        (Method::Weighted, None) => return Err(usage("--estimator weighted needs --beta")),
        (Method::Weighted, Some(_)) | (_, None) => {}
        (_, Some(_)) => return Err(usage("--beta only applies to --estimator weighted")),
    }
    let parsed = parse(&args.input, &constellation)?;
    let plan = FramePlan::new(
        constellation,
        parsed.samples.len(),
        parsed.pilot_positions,
        parsed.pilot_symbols,
    )?;
    let frame = ReceivedFrame::new(&plan, parsed.samples)?;
    let name = format!("{:?}", args.estimator).to_lowercase();
    match args.estimator {
        Method::Pilot => {
            let a = pilot_only(&frame)?;
            println!(
                "estimator={name} rho={} theta={}",
                num(a.rho()),
                num(a.theta())
            );
        }
        Method::Vv => {
            let theta = viterbi_viterbi(&frame, AmplitudeWeight::Unit);
            println!("estimator={name} theta={}", num(theta.value()));
        }
        method => {
            let (search, beta) = match method {
                Method::Mackenthun => (mackenthun(&frame)?, 1.0),
                Method::Weighted => {
                    let beta = args.beta.unwrap_or(1.0);
                    (mackenthun_weighted(&frame, beta)?, beta)
                }
                Method::Brute => (brute_force(&frame)?, 1.0),
                _ => (naive_enumeration(&frame)?.0, 1.0),
            };
            // Re-evaluate from the decisions so every search method reports the
            // same numbers for the same minimiser.
            let decisions = search.data_decisions.clone().unwrap_or_default();
            let report = evaluate_decisions(&frame, &decisions, beta)?;
            print_report(&name, &report, args.decisions);
        }
    }
    Ok(ExitCode::SUCCESS)
}
