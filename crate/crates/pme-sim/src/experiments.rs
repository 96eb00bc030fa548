//! Monte Carlo sweeps: Gaussian detuning sampling, estimate variance,
//! projection error with the closed-form overlay, purity, and the
//! t ~ 1/sqrt(N) schedule.
//!
//! Determinism: detunings for sample l are drawn from a counter-seeded
//! stream (base seed, stream = sample index), so results do not depend on
//! sweep order or on how samples are scheduled across threads. Per-record
//! aggregation always folds in ascending sample order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{ChannelOpts, KrausChannel, PurityWeighting};
use crate::error::{Error, Result};
use crate::model::{DetuningSample, GateModel, ProbeConvention, ProtocolParams};

/// Free-evolution schedule across register sizes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum TRule {
    /// Same base duration (us) for every N.
    Fixed { t_us: f64 },
    /// Keep t * sqrt(N) constant (us).
    ScaledSqrtN { t_sqrt_n_us: f64 },
}

/// Base free-evolution duration for a register of `n_qubits`.
pub fn choose_t(n_qubits: usize, rule: &TRule) -> f64 {
    match *rule {
        TRule::Fixed { t_us } => t_us,
        TRule::ScaledSqrtN { t_sqrt_n_us } => t_sqrt_n_us / (n_qubits as f64).sqrt(),
    }
}

/// One Monte Carlo sweep description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Coupling strength (rad/us).
    pub g: f64,
    /// Detuning standard deviation (rad/us).
    pub sigma_g: f64,
    /// Detuning realizations per record.
    pub n_samples: usize,
    /// Base seed for the counter-derived sample streams.
    pub seed: u64,
    /// (N, L) pairs to evaluate.
    pub sweep: Vec<(usize, usize)>,
    pub t_rule: TRule,
    pub convention: ProbeConvention,
    pub gates: GateModel,
    pub purity_weighting: PurityWeighting,
    /// Evaluate samples on the rayon pool (no-op without the `parallel`
    /// feature).
    pub parallel: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::validation("n_samples must be at least 1"));
        }
        if self.sweep.is_empty() {
            return Err(Error::validation(
                "sweep must contain at least one (N, L) pair",
            ));
        }
        if !self.g.is_finite() || self.g <= 0.0 || !self.sigma_g.is_finite() || self.sigma_g < 0.0 {
            return Err(Error::validation("g must be positive, sigma_g nonnegative"));
        }
        Ok(())
    }

    pub fn channel_opts(&self) -> ChannelOpts {
        ChannelOpts {
            convention: self.convention,
            gates: self.gates,
            ..Default::default()
        }
    }

    pub fn params_for(&self, n_qubits: usize, rounds: usize) -> Result<ProtocolParams> {
        ProtocolParams::new(
            self.g,
            choose_t(n_qubits, &self.t_rule),
            rounds,
            n_qubits,
            self.sigma_g,
        )
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        // reference point: g/2pi = 100 kHz, sigma_g/2pi = 1 kHz,
        // t*sqrt(N) = 0.16 ms
        let two_pi = 2.0 * std::f64::consts::PI;
        ExperimentConfig {
            g: two_pi * 0.1,
            sigma_g: two_pi * 0.001,
            n_samples: 1000,
            seed: 1,
            sweep: vec![(1, 6)],
            t_rule: TRule::ScaledSqrtN { t_sqrt_n_us: 160.0 },
            convention: ProbeConvention::ShiftOnOne,
            gates: GateModel::Approximate,
            purity_weighting: PurityWeighting::ProbabilityWeighted,
            parallel: true,
        }
    }
}

/// One row of a sweep. Quantities not produced by a given experiment stay
/// `None`; `wall_time_s` is measured and therefore excluded from the
/// determinism contract.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ExperimentRecord {
    pub n_qubits: usize,
    pub rounds: usize,
    pub seed: u64,
    pub sigma: Option<f64>,
    pub sigma_stderr: Option<f64>,
    pub epsilon_numeric: Option<f64>,
    pub epsilon_analytic: Option<f64>,
    pub purity: Option<f64>,
    /// Samples whose accumulated phase left the unambiguous window
    /// (|sum_j delta_j| t >= pi): the estimator is biased there.
    pub wrap_warnings: usize,
    /// Total probability excluded as degenerate in fidelity averages.
    pub excluded_weight: f64,
    pub wall_time_s: f64,
}

impl ExperimentRecord {
    fn new(n_qubits: usize, rounds: usize, seed: u64) -> Self {
        ExperimentRecord {
            n_qubits,
            rounds,
            seed,
            sigma: None,
            sigma_stderr: None,
            epsilon_numeric: None,
            epsilon_analytic: None,
            purity: None,
            wrap_warnings: 0,
            excluded_weight: 0.0,
            wall_time_s: 0.0,
        }
    }

    /// Equality on everything except the measured wall time.
    pub fn same_data(&self, rhs: &Self) -> bool {
        self.n_qubits == rhs.n_qubits
            && self.rounds == rhs.rounds
            && self.seed == rhs.seed
            && self.sigma == rhs.sigma
            && self.sigma_stderr == rhs.sigma_stderr
            && self.epsilon_numeric == rhs.epsilon_numeric
            && self.epsilon_analytic == rhs.epsilon_analytic
            && self.purity == rhs.purity
            && self.wrap_warnings == rhs.wrap_warnings
            && self.excluded_weight == rhs.excluded_weight
    }
}

/// Deterministic stream for one detuning realization.
pub fn detuning_rng(seed: u64, sample_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(sample_index);
    rng
}

/// Draw N independent detunings, zero mean, standard deviation `sigma_g`.
/// Uses the ziggurat-based standard normal sampler.
pub fn sample_detunings(rng: &mut impl Rng, n: usize, sigma_g: f64) -> DetuningSample {
    DetuningSample::new(
        (0..n)
            .map(|_| sigma_g * rng.sample::<f64, _>(StandardNormal))
            .collect(),
    )
}

/// Evaluate `f` for every sample index, in parallel when requested, and
/// return results in ascending index order.
fn map_samples<T, F>(n_samples: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return (0..n_samples).into_par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    (0..n_samples).map(f).collect()
}

/// Estimate variance against L: the root-mean-square deviation of the
/// unwrapped estimate from the accumulated phase, averaged over samples.
pub fn variance_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let opts = config.channel_opts();
    let mut records = Vec::with_capacity(config.sweep.len());
    for &(n, l) in &config.sweep {
        let start = std::time::Instant::now();
        let params = config.params_for(n, l)?;
        let bits = vec![0u8; n];
        let per_sample: Vec<Result<(f64, bool)>> =
            map_samples(config.n_samples, config.parallel, |i| {
                let mut rng = detuning_rng(config.seed, i as u64);
                let sample = sample_detunings(&mut rng, n, config.sigma_g);
                let channel = KrausChannel::new(&params, &sample, opts)?;
                let dist = channel.outcome_distribution(&bits)?;
                let phase = sample.total() * params.t();
                let target = phase / (2.0 * std::f64::consts::PI);
                Ok((dist.rms_error(target), phase.abs() >= std::f64::consts::PI))
            });
        let mut record = ExperimentRecord::new(n, l, config.seed);
        let mut values = Vec::with_capacity(config.n_samples);
        for r in per_sample {
            let (rms, wrapped) = r?;
            values.push(rms);
            if wrapped {
                record.wrap_warnings += 1;
            }
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
        record.sigma = Some(mean);
        record.sigma_stderr = Some((var / values.len() as f64).sqrt());
        record.wall_time_s = start.elapsed().as_secs_f64();
        records.push(record);
    }
    Ok(records)
}

/// Projection error against L and N, numeric next to the closed form.
pub fn error_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let opts = config.channel_opts();
    let mut records = Vec::with_capacity(config.sweep.len());
    for &(n, l) in &config.sweep {
        let start = std::time::Instant::now();
        let params = config.params_for(n, l)?;
        let bits = vec![0u8; n];
        let per_sample: Vec<Result<(f64, f64)>> =
            map_samples(config.n_samples, config.parallel, |i| {
                let mut rng = detuning_rng(config.seed, i as u64);
                let sample = sample_detunings(&mut rng, n, config.sigma_g);
                let channel = KrausChannel::new(&params, &sample, opts)?;
                let report = channel.projection_error_report(&bits)?;
                Ok((report.epsilon, report.excluded_weight))
            });
        let mut record = ExperimentRecord::new(n, l, config.seed);
        let mut eps_sum = 0.0;
        for r in per_sample {
            let (eps, excluded) = r?;
            eps_sum += eps;
            record.excluded_weight += excluded;
        }
        record.epsilon_numeric = Some(eps_sum / config.n_samples as f64);
        record.epsilon_analytic = Some(crate::channel::analytic_projection_error_total(&params));
        record.wall_time_s = start.elapsed().as_secs_f64();
        records.push(record);
    }
    Ok(records)
}

/// Post-measurement purity against L for a maximally mixed input. A sweep
/// entry with L = 0 is the no-measurement edge and yields exactly 1/2^N.
pub fn purity_experiment(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    config.validate()?;
    let opts = config.channel_opts();
    let mut records = Vec::with_capacity(config.sweep.len());
    for &(n, l) in &config.sweep {
        let start = std::time::Instant::now();
        let mut record = ExperimentRecord::new(n, l, config.seed);
        if l == 0 {
            record.purity = Some(1.0 / (1u64 << n) as f64);
            record.wall_time_s = start.elapsed().as_secs_f64();
            records.push(record);
            continue;
        }
        let params = config.params_for(n, l)?;
        let weighting = config.purity_weighting;
        let per_sample: Vec<Result<f64>> = map_samples(config.n_samples, config.parallel, |i| {
            let mut rng = detuning_rng(config.seed, i as u64);
            let sample = sample_detunings(&mut rng, n, config.sigma_g);
            KrausChannel::new(&params, &sample, opts)?.purity_mixed(weighting)
        });
        let mut acc = 0.0;
        for r in per_sample {
            acc += r?;
        }
        record.purity = Some(acc / config.n_samples as f64);
        record.wall_time_s = start.elapsed().as_secs_f64();
        records.push(record);
    }
    Ok(records)
}
