//! Command-line front end: subcommands for each experiment, an oracle
//! self-check, and CSV/JSON emission of plot-ready data.
//!
//! Output contract: CSV is UTF-8 with LF line endings, '.' decimal
//! separator and 17 significant digits, and is byte-identical across runs
//! of the same config. Measured timings are therefore written to the JSON
//! manifest next to the CSV (`<out>.manifest.json`), and the CSV
//! `wall_time` column is fixed at 0.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::channel::{ChannelOpts, KrausChannel, RoundOrder};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::experiments::{
    detuning_rng, error_experiment, purity_experiment, sample_detunings, variance_experiment,
    ExperimentConfig, ExperimentRecord,
};
use crate::model::ProbeConvention;
use crate::oracle::simulate_full_circuit;

#[derive(Parser)]
#[command(
    name = "pme-sim",
    version,
    about = "Probe-based projective energy measurement simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the key = value run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; the JSON manifest lands at <out>.manifest.json.
    #[arg(long)]
    out: PathBuf,
    /// Override the seed from the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread count for sample evaluation.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate-variance sweep over the configured (N, L) grid.
    Variance(RunArgs),
    /// Projection-error sweep, numeric and closed-form columns.
    Error(RunArgs),
    /// Post-measurement purity sweep for a maximally mixed input.
    Purity(RunArgs),
    /// Exact outcome distribution of the first configured (N, L) point.
    Distribution(RunArgs),
    /// Run the completeness and oracle-equivalence suites.
    Selfcheck {
        /// Evaluate the fast path with inverted round order; the
        /// equivalence suite must then fail.
        #[arg(long, hide = true)]
        debug_flip_round_order: bool,
    },
}

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Variance(args) => run_experiment(&args, Kind::Variance),
        Command::Error(args) => run_experiment(&args, Kind::Error),
        Command::Purity(args) => run_experiment(&args, Kind::Purity),
        Command::Distribution(args) => run_distribution(&args),
        Command::Selfcheck {
            debug_flip_round_order,
        } => selfcheck(debug_flip_round_order),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Variance,
    Error,
    Purity,
}

fn load_config(args: &RunArgs) -> Result<(RunConfig, ExperimentConfig)> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut run = RunConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        run.seed = seed;
    }
    configure_threads(args.threads);
    let exp = run.to_experiment_config(true);
    Ok((run, exp))
}

#[cfg(feature = "parallel")]
fn configure_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // Only the first initialization wins; later calls keep the pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads(threads: Option<usize>) {
    if threads.is_some() {
        eprintln!("note: built without the 'parallel' feature; --threads ignored");
    }
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// 17 significant digits, locale-independent.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(serde::Serialize)]
struct RunManifest<'a> {
    config_hash: String,
    tool_version: &'a str,
    started_unix_s: u64,
    finished_unix_s: u64,
    output: String,
    records: Vec<ManifestRecord>,
}

#[derive(serde::Serialize)]
struct ManifestRecord {
    n_qubits: usize,
    rounds: usize,
    wall_time_s: f64,
    wrap_warnings: usize,
    excluded_weight: f64,
}

fn write_manifest(
    out: &Path,
    run: &RunConfig,
    started: u64,
    records: &[ExperimentRecord],
) -> Result<()> {
    let manifest = RunManifest {
        config_hash: run.config_hash(),
        tool_version: env!("CARGO_PKG_VERSION"),
        started_unix_s: started,
        finished_unix_s: unix_now(),
        output: out.display().to_string(),
        records: records
            .iter()
            .map(|r| ManifestRecord {
                n_qubits: r.n_qubits,
                rounds: r.rounds,
                wall_time_s: r.wall_time_s,
                wrap_warnings: r.wrap_warnings,
                excluded_weight: r.excluded_weight,
            })
            .collect(),
    };
    let path = manifest_path(out);
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Invariant(format!("manifest serialization: {e}")))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut os = out.as_os_str().to_owned();
    os.push(".manifest.json");
    PathBuf::from(os)
}

fn run_experiment(args: &RunArgs, kind: Kind) -> Result<()> {
    let (run, exp) = load_config(args)?;
    let started = unix_now();
    let records = match kind {
        Kind::Variance => variance_experiment(&exp)?,
        Kind::Error => error_experiment(&exp)?,
        Kind::Purity => purity_experiment(&exp)?,
    };
    let mut csv = String::new();
    match kind {
        Kind::Variance => {
            csv.push_str("N,L,seed,sigma,stderr,wall_time\n");
            for r in &records {
                csv.push_str(&format!(
                    "{},{},{},{},{},0\n",
                    r.n_qubits,
                    r.rounds,
                    r.seed,
                    fmt(r.sigma.unwrap_or(f64::NAN)),
                    fmt(r.sigma_stderr.unwrap_or(f64::NAN)),
                ));
            }
        }
        Kind::Error => {
            csv.push_str("N,L,seed,epsilon_numeric,epsilon_analytic,wall_time\n");
            for r in &records {
                csv.push_str(&format!(
                    "{},{},{},{},{},0\n",
                    r.n_qubits,
                    r.rounds,
                    r.seed,
                    fmt(r.epsilon_numeric.unwrap_or(f64::NAN)),
                    fmt(r.epsilon_analytic.unwrap_or(f64::NAN)),
                ));
            }
        }
        Kind::Purity => {
            csv.push_str("N,L,seed,purity,wall_time\n");
            for r in &records {
                csv.push_str(&format!(
                    "{},{},{},{},0\n",
                    r.n_qubits,
                    r.rounds,
                    r.seed,
                    fmt(r.purity.unwrap_or(f64::NAN)),
                ));
            }
        }
    }
    let mut file = std::fs::File::create(&args.out)?;
    file.write_all(csv.as_bytes())?;
    for r in &records {
        if r.wrap_warnings > 0 {
            eprintln!(
                "warning: N={} L={}: {} of {} samples outside the unambiguous phase window",
                r.n_qubits, r.rounds, r.wrap_warnings, exp.n_samples
            );
        }
    }
    write_manifest(&args.out, &run, started, &records)
}

fn run_distribution(args: &RunArgs) -> Result<()> {
    let (run, exp) = load_config(args)?;
    let started = unix_now();
    let (n, l) = exp.sweep[0];
    let params = exp.params_for(n, l)?;
    let mut rng = detuning_rng(exp.seed, 0);
    let sample = sample_detunings(&mut rng, n, exp.sigma_g);
    let channel = KrausChannel::new(&params, &sample, exp.channel_opts())?;
    let bits = vec![0u8; n];
    let dist = channel.outcome_distribution(&bits)?;
    let mut csv = String::from("m,f_m,prob\n");
    for (m, &p) in dist.probs().iter().enumerate() {
        let f = crate::channel::estimate_from_outcome(m, &params)?;
        csv.push_str(&format!("{m},{},{}\n", fmt(f), fmt(p)));
    }
    std::fs::File::create(&args.out)?.write_all(csv.as_bytes())?;
    let record = ExperimentRecord {
        n_qubits: n,
        rounds: l,
        seed: exp.seed,
        sigma: None,
        sigma_stderr: None,
        epsilon_numeric: None,
        epsilon_analytic: None,
        purity: None,
        wrap_warnings: 0,
        excluded_weight: 0.0,
        wall_time_s: 0.0,
    };
    write_manifest(&args.out, &run, started, &[record])
}

/// Completeness and oracle-equivalence suites on small instances; prints
/// one residual line per suite.
fn selfcheck(flip_round_order: bool) -> Result<()> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let opts = ChannelOpts {
        round_order: if flip_round_order {
            RoundOrder::ShortestFirst
        } else {
            RoundOrder::LongestFirst
        },
        ..Default::default()
    };
    let tol = 1e-9;

    let mut completeness: f64 = 0.0;
    let mut equivalence: f64 = 0.0;
    let mut stream = 0u64;
    for n in 1..=2usize {
        for l in 1..=4usize {
            for _ in 0..3 {
                let mut rng = detuning_rng(0xC0FFEE, stream);
                stream += 1;
                let t = 160.0 / (n as f64).sqrt();
                let params =
                    crate::model::ProtocolParams::new(two_pi * 0.1, t, l, n, two_pi * 0.001)?;
                let sample = sample_detunings(&mut rng, n, params.sigma_g());
                let channel = KrausChannel::new(&params, &sample, opts)?;
                completeness = completeness.max(channel.completeness_residual()?);
                let bits = vec![0u8; n];
                let fast = channel.outcome_distribution(&bits)?;
                let dense =
                    simulate_full_circuit(&sample, &params, &bits, ProbeConvention::ShiftOnOne)?;
                equivalence = equivalence.max(fast.max_abs_diff(&dense));
            }
        }
    }
    println!("selfcheck: completeness residual {completeness:.3e} (tol {tol:.0e})");
    println!("selfcheck: oracle equivalence residual {equivalence:.3e} (tol {tol:.0e})");
    if completeness > tol {
        return Err(Error::invariant(format!(
            "completeness suite residual {completeness:.3e} above {tol:.0e}"
        )));
    }
    if equivalence > tol {
        return Err(Error::invariant(format!(
            "oracle equivalence suite residual {equivalence:.3e} above {tol:.0e}"
        )));
    }
    println!("selfcheck: ok");
    Ok(())
}
