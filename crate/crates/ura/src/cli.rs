//! Command-line front end: `detector-curve`, `pupe` and `selftest`.
//!
//! Every result file starts with a `# manifest:` line echoing the full
//! parameter set and master seed, and is byte-identical across re-runs
//! with the same seed regardless of thread count.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{db_to_linear, SystemConfig};
use crate::detector::{analytic_pd, np_threshold, row_statistic};
use crate::error::{Result, UraError};
use crate::hadamard::HadamardCodebook;
use crate::mc::{estimate_pupe, find_min_ebn0, SearchMode};
use crate::numerics::{rng_from_seed, sample_complex_gaussian, sub_seed, ComplexMatrix};
use crate::phy::Scheme;

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ura", version, about = "Unsourced random access link-level simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pilot detector curve: analytic and simulated P_D/P_F over a P_p sweep
    DetectorCurve(DetectorCurveArgs),
    /// PUPE estimation over an E_b/N0 grid, or minimum-E_b/N0 search
    Pupe(PupeArgs),
    /// Built-in consistency checks; nonzero exit on any failure
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct DetectorCurveArgs {
    /// Receive antennas M
    #[arg(long, default_value_t = 50)]
    pub antennas: usize,
    /// Pilot length n_p (power of two)
    #[arg(long, default_value_t = 256)]
    pub pilot_len: usize,
    /// Neyman-Pearson level
    #[arg(long, default_value_t = 0.001)]
    pub gamma: f64,
    /// Lowest pilot power in the sweep
    #[arg(long, default_value_t = 2e-4)]
    pub pp_min: f64,
    /// Highest pilot power in the sweep
    #[arg(long, default_value_t = 1e-2)]
    pub pp_max: f64,
    /// Sweep points (geometric spacing)
    #[arg(long, default_value_t = 8)]
    pub points: usize,
    /// Monte-Carlo trials per point; 0 emits analytics only
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores (not part of the result manifest)
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PupeArgs {
    /// Flat key=value config file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Config override, e.g. --set m=50 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Comma-separated E_b/N0 grid in dB (grid mode)
    #[arg(long, value_delimiter = ',')]
    pub ebn0_db: Vec<f64>,
    /// Target PUPE (search mode; overrides the grid)
    #[arg(long)]
    pub target_pe: Option<f64>,
    /// Search lower bound, dB
    #[arg(long, default_value_t = -2.0)]
    pub search_lo: f64,
    /// Search upper bound, dB
    #[arg(long, default_value_t = 12.0)]
    pub search_hi: f64,
    /// Accept on the point estimate instead of the upper confidence bound
    #[arg(long)]
    pub loose: bool,
    /// Power split P_c/P_p
    #[arg(long, default_value_t = 0.5)]
    pub ratio: f64,
    /// Comma-separated K_a values; defaults to the config's active_users
    #[arg(long, value_delimiter = ',')]
    pub ka_list: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SelftestArgs {
    /// Negative-control hook: corrupt the CRC before the round-trip check
    #[arg(long, hide = true)]
    pub corrupt_crc: bool,
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::DetectorCurve(args) => cmd_detector_curve(args),
        Command::Pupe(args) => cmd_pupe(args),
        Command::Selftest(args) => cmd_selftest(args),
    }
}

fn install_threads(threads: usize) {
    if threads > 0 {
        // Ignore the error when a pool already exists (tests call run()
        // repeatedly); results do not depend on the pool size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_detector_curve(args: DetectorCurveArgs) -> Result<i32> {
    if !args.pilot_len.is_power_of_two() || args.pilot_len < 2 {
        return Err(UraError::Config(format!(
            "pilot_len = {} must be a power of two >= 2",
            args.pilot_len
        )));
    }
    if !(0.0 < args.gamma && args.gamma < 1.0) {
        return Err(UraError::Config(format!("gamma = {} outside (0,1)", args.gamma)));
    }
    if args.points < 1 || args.pp_min <= 0.0 || args.pp_max < args.pp_min {
        return Err(UraError::Config("invalid P_p sweep range".into()));
    }
    install_threads(args.threads);
    let started = Instant::now();

    let bits = args.pilot_len.trailing_zeros() as usize;
    let codebook = HadamardCodebook::build(bits)?;
    let threshold = np_threshold(args.gamma, args.antennas)?;
    let manifest = json!({
        "command": "detector-curve",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": args.seed,
        "params": &args,
    });
    let mut csv = format!("# manifest: {manifest}\n");
    csv.push_str("p_p,analytic_pd,simulated_pd,simulated_pf,trials\n");

    for point in 0..args.points {
        let p_p = if args.points == 1 {
            args.pp_min
        } else {
            let t = point as f64 / (args.points - 1) as f64;
            args.pp_min * (args.pp_max / args.pp_min).powf(t)
        };
        let pd = analytic_pd(args.gamma, args.antennas, args.pilot_len, p_p, 1)?;
        if args.trials == 0 {
            csv.push_str(&format!("{p_p:.6e},{pd:.6},,,0\n"));
            continue;
        }
        let hits: Vec<(u32, u32)> = (0..args.trials as u64)
            .into_par_iter()
            .map(|trial| {
                let mut rng = rng_from_seed(sub_seed(args.seed, point as u64, trial));
                detector_trial(&codebook, args.antennas, p_p, threshold, &mut rng)
            })
            .collect();
        let (det, fa) = hits
            .iter()
            .fold((0u64, 0u64), |(d, f), &(a, b)| (d + a as u64, f + b as u64));
        let sim_pd = det as f64 / args.trials as f64;
        let sim_pf = fa as f64 / args.trials as f64;
        csv.push_str(&format!(
            "{p_p:.6e},{pd:.6},{sim_pd:.6},{sim_pf:.6},{}\n",
            args.trials
        ));
    }
    write_output(&args.out, &csv)?;
    eprintln!(
        "detector-curve: {} points in {:.1}s",
        args.points,
        started.elapsed().as_secs_f64()
    );
    Ok(0)
}

/// One detector trial: a single user on a random row through the fading
/// channel plus noise. Returns (detected on the active row, false alarm on
/// an inactive row); row orthogonality makes the inactive-row statistic an
/// exact H_0 sample.
fn detector_trial(
    codebook: &HadamardCodebook,
    antennas: usize,
    p_p: f64,
    threshold: f64,
    rng: &mut crate::numerics::SimRng,
) -> (u32, u32) {
    use rand::Rng;
    let n_p = codebook.order();
    let active = rng.gen_range(0..n_p);
    let h = sample_complex_gaussian(antennas, 1, 1.0, rng);
    let mut y = sample_complex_gaussian(antennas, n_p, 1.0, rng);
    let amp = p_p.sqrt();
    let row = codebook.row(active);
    for m in 0..antennas {
        let hm = h.get(m, 0);
        for t in 0..n_p {
            y.set(m, t, y.get(m, t) + hm * (amp * row[t] as f64));
        }
    }
    let stat_active = row_statistic(&y, row);
    let other = (active + 1) % n_p;
    let stat_other = row_statistic(&y, codebook.row(other));
    (
        (stat_active >= threshold) as u32,
        (stat_other >= threshold) as u32,
    )
}

pub fn cmd_pupe(args: PupeArgs) -> Result<i32> {
    let mut base = match &args.config {
        Some(path) => SystemConfig::from_file(path)?,
        None => SystemConfig::default(),
    };
    for kv in &args.overrides {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| UraError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        base.apply_pair(key.trim(), value.trim())?;
    }
    base.validate()?;
    if args.target_pe.is_none() && args.ebn0_db.is_empty() {
        return Err(UraError::Config(
            "pupe: give either --ebn0-db grid points or --target-pe".into(),
        ));
    }
    if !(args.ratio > 0.0 && args.ratio.is_finite()) {
        return Err(UraError::Config(format!("ratio = {} must be positive", args.ratio)));
    }
    if args.ebn0_db.iter().any(|db| !db.is_finite())
        || !args.search_lo.is_finite()
        || !args.search_hi.is_finite()
    {
        return Err(UraError::Config("E_b/N0 values must be finite".into()));
    }
    if args.trials == 0 {
        return Err(UraError::Config("pupe: trials must be >= 1".into()));
    }
    install_threads(args.threads);
    let started = Instant::now();

    let manifest = json!({
        "command": "pupe",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": args.seed,
        "config": &base,
        "params": &args,
    });
    let mut csv = format!("# manifest: {manifest}\n");
    csv.push_str("k_a,ebn0_db,pe,p_md,p_fa,half_width,trials\n");

    let ka_list = if args.ka_list.is_empty() {
        vec![base.active_users]
    } else {
        args.ka_list.clone()
    };
    for &ka in &ka_list {
        let mut cfg = base.clone();
        cfg.active_users = ka;
        if let Some(target) = args.target_pe {
            let mode = if args.loose {
                SearchMode::Loose
            } else {
                SearchMode::Strict
            };
            let found = find_min_ebn0(
                &cfg,
                target,
                args.ratio,
                args.search_lo,
                args.search_hi,
                args.trials,
                args.seed,
                mode,
            )?;
            match found {
                Some(db) => {
                    let scheme = Scheme::new(cfg.with_ebn0(db_to_linear(db), args.ratio))?;
                    let est = estimate_pupe(&scheme, args.trials, args.seed)?;
                    csv.push_str(&format!(
                        "{ka},{db:.2},{:.6},{:.6},{:.6},{:.6},{}\n",
                        est.pe, est.p_md, est.p_fa, est.half_width, est.trials
                    ));
                }
                None => {
                    csv.push_str(&format!("{ka},not-found,,,,,{}\n", args.trials));
                }
            }
        } else {
            for &db in &args.ebn0_db {
                let scheme = Scheme::new(cfg.with_ebn0(db_to_linear(db), args.ratio))?;
                let est = estimate_pupe(&scheme, args.trials, args.seed)?;
                csv.push_str(&format!(
                    "{ka},{db:.2},{:.6},{:.6},{:.6},{:.6},{}\n",
                    est.pe, est.p_md, est.p_fa, est.half_width, est.trials
                ));
            }
        }
    }
    write_output(&args.out, &csv)?;
    eprintln!("pupe: done in {:.1}s", started.elapsed().as_secs_f64());
    Ok(0)
}

pub fn cmd_selftest(args: SelftestArgs) -> Result<i32> {
    let mut all_ok = true;
    let mut report =
        |name: &str, measured: f64, tol: f64, ok: bool| {
            all_ok &= ok;
            println!(
                "{:<28} measured {:>12.3e}  tolerance {:>9.1e}  {}",
                name,
                measured,
                tol,
                if ok { "PASS" } else { "FAIL" }
            );
        };

    // Noiseless polar + CRC round trip.
    {
        use crate::polar::{crc_append, scl_decode, PolarSpec};
        use rand::Rng;
        let spec =
            PolarSpec::construct(512, 111, PolarSpec::design_erasure_from_snr_db(2.0))?;
        let mut rng = rng_from_seed(0xDEC0DE);
        let mut failures = 0usize;
        for _ in 0..20 {
            let info: Vec<u8> = (0..100).map(|_| rng.gen_range(0..2u8)).collect();
            let mut payload = crc_append(&info);
            if args.corrupt_crc {
                let last = payload.len() - 1;
                payload[last] ^= 1;
            }
            let cw = spec.encode(&payload)?;
            let llrs: Vec<f64> = cw.iter().map(|&b| if b == 0 { 40.0 } else { -40.0 }).collect();
            let cands = scl_decode(&llrs, &spec, 8);
            let ok = cands.first().is_some_and(|c| c.crc_ok && c.info_bits == info);
            if !ok {
                failures += 1;
            }
        }
        report("noiseless-round-trip", failures as f64, 0.0, failures == 0);
    }

    // Hadamard orthogonality.
    {
        let cb = HadamardCodebook::build(5)?;
        let mut max_off = 0i64;
        for r in 0..cb.order() {
            for s in 0..r {
                let dot: i64 = cb
                    .row(r)
                    .iter()
                    .zip(cb.row(s))
                    .map(|(&a, &b)| a as i64 * b as i64)
                    .sum();
                max_off = max_off.max(dot.abs());
            }
        }
        report("hadamard-orthogonality", max_off as f64, 0.0, max_off == 0);
    }

    // SIC residual consistency on random decoded sets.
    {
        use crate::numerics::ls_solve;
        let mut worst: f64 = 0.0;
        let mut rng = rng_from_seed(0x51C);
        for _ in 0..20 {
            let x = sample_complex_gaussian(4, 64, 1.0, &mut rng);
            let y = sample_complex_gaussian(8, 64, 1.0, &mut rng);
            let h = ls_solve(&y, &x)?;
            let resid: ComplexMatrix = y.sub(&h.mul(&x));
            let recon = y.sub(&resid).sub(&h.mul(&x));
            worst = worst.max(recon.frobenius_norm() / y.frobenius_norm());
        }
        report("sic-residual-consistency", worst, 1e-8, worst <= 1e-8);
    }

    // Analytic false alarm at the NP threshold equals gamma.
    {
        let gamma = 0.001;
        let t = np_threshold(gamma, 50)?;
        let pf = crate::detector::analytic_pf(50, t)?;
        let err = (pf - gamma).abs();
        report("np-threshold-calibration", err, 1e-9, err <= 1e-9);
    }

    Ok(if all_ok { 0 } else { EXIT_SELFTEST })
}
