//! The measurement channel: Kraus operators of the probe-recycled phase
//! estimation, outcome probabilities, post-measurement states, fidelity and
//! projection error, the closed-form error estimate, purity of the
//! post-measurement state and the outcome-to-frequency estimator.
//!
//! A channel instance fixes the protocol parameters, one detuning
//! realization and the gate/convention options, and precomputes the
//! per-qubit round unitaries. Branches are indexed by the integer B whose
//! bit at weight 2^(L-k) is the probe state during round k; round k evolves
//! for 2^(L-k) t (longest evolution first) and the Fourier weight of outcome
//! m on branch B is e^{+2 pi i m B / 2^L}.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::{StateVector, C_ZERO};
use crate::mat2::{basis2, dot2, Mat2, Vec2};
use crate::model::{
    controlled_round_unitary_opts, DetuningSample, GateModel, ProbeConvention, ProtocolParams,
};

/// Outcomes with probability at or below this weight are flagged degenerate
/// and excluded from fidelity averages.
pub const DEGENERATE_PROB: f64 = 1e-14;

/// Hard cap on the dense target dimension for state-producing operations.
pub const DENSE_QUBIT_GUARD: usize = 10;

/// Temporal order of the measurement rounds. The protocol applies the
/// longest evolution first; the flipped order exists only to demonstrate
/// that the oracle equivalence check is order sensitive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoundOrder {
    #[default]
    LongestFirst,
    ShortestFirst,
}

/// Options shared by the channel, the trajectory sampler and the oracle.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChannelOpts {
    pub convention: ProbeConvention,
    pub gates: GateModel,
    pub round_order: RoundOrder,
}

/// How outcomes are weighted when averaging the post-measurement purity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PurityWeighting {
    /// Weight each outcome by its probability under the maximally mixed
    /// input.
    #[default]
    ProbabilityWeighted,
    /// Average uniformly over outcomes with nonvanishing probability.
    Uniform,
}

/// Provenance tag for an outcome distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionMethod {
    Kraus,
    Trajectory,
    Oracle,
}

/// Probabilities over the 2^L outcomes of one protocol run.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
    rounds: usize,
    method: DistributionMethod,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<f64>, rounds: usize, method: DistributionMethod) -> Result<Self> {
        if probs.len() != (1 << rounds) {
            return Err(Error::validation(format!(
                "distribution over {} outcomes does not match L = {rounds}",
                probs.len()
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invariant(format!(
                "outcome probabilities sum to {sum}, not 1"
            )));
        }
        if probs.iter().any(|p| !(-1e-9..=1.0 + 1e-9).contains(p)) {
            return Err(Error::invariant(
                "outcome probability outside [0, 1]".to_string(),
            ));
        }
        let probs = probs.into_iter().map(|p| p.clamp(0.0, 1.0)).collect();
        Ok(OutcomeDistribution {
            probs,
            rounds,
            method,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn method(&self) -> DistributionMethod {
        self.method
    }

    pub fn max_abs_diff(&self, rhs: &OutcomeDistribution) -> f64 {
        self.probs
            .iter()
            .zip(&rhs.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Probability-weighted mean of the unwrapped phase estimate.
    pub fn mean_estimate(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(m, p)| p * unwrap_fraction(m, self.rounds))
            .sum()
    }

    /// Root of the probability-weighted squared deviation of the unwrapped
    /// estimate from `target` (a phase in cycles).
    pub fn rms_error(&self, target: f64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(m, p)| {
                let d = unwrap_fraction(m, self.rounds) - target;
                p * d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Post-measurement record for one outcome.
#[derive(Debug, Clone)]
pub struct PostMeasurement {
    pub m: usize,
    pub prob: f64,
    pub state: StateVector,
    pub fidelity: f64,
    /// Set when the outcome probability is at or below the degeneracy
    /// threshold; the state is then left unnormalized and the fidelity is
    /// meaningless.
    pub degenerate: bool,
}

/// Projection error with the bookkeeping of excluded degenerate outcomes.
#[derive(Debug, Clone, Copy)]
pub struct ProjectionErrorReport {
    pub epsilon: f64,
    /// Total probability of outcomes excluded as degenerate.
    pub excluded_weight: f64,
}

/// Per-qubit, per-probe-bit, per-round unitaries shared by the channel and
/// the trajectory sampler: ops[j][s][k-1] acts on qubit j during round k
/// when the probe is in state s.
pub(crate) fn build_round_ops(
    params: &ProtocolParams,
    sample: &DetuningSample,
    opts: ChannelOpts,
) -> Result<Vec<[Vec<Mat2>; 2]>> {
    sample.matches(params)?;
    let l = params.rounds();
    Ok(sample
        .deltas
        .iter()
        .map(|&delta| {
            let per_bit = |bit: u8| -> Vec<Mat2> {
                (1..=l)
                    .map(|k| {
                        let tau = match opts.round_order {
                            RoundOrder::LongestFirst => params.round_duration(k),
                            RoundOrder::ShortestFirst => params.round_duration(l + 1 - k),
                        };
                        Mat2::from_matrix(&controlled_round_unitary_opts(
                            delta,
                            bit,
                            tau,
                            params,
                            opts.convention,
                            opts.gates,
                        ))
                    })
                    .collect()
            };
            [per_bit(0), per_bit(1)]
        })
        .collect())
}

/// Measurement channel for a fixed detuning realization.
pub struct KrausChannel {
    params: ProtocolParams,
    opts: ChannelOpts,
    round_ops: Vec<[Vec<Mat2>; 2]>,
    /// roots[r] = e^{+2 pi i r / 2^L}
    roots: Vec<Complex64>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl KrausChannel {
    pub fn new(
        params: &ProtocolParams,
        sample: &DetuningSample,
        opts: ChannelOpts,
    ) -> Result<Self> {
        let round_ops = build_round_ops(params, sample, opts)?;
        let outcomes = params.outcome_count();
        let roots = (0..outcomes)
            .map(|r| {
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / outcomes as f64)
            })
            .collect();
        let fft_inv = FftPlanner::new().plan_fft_inverse(outcomes);
        Ok(KrausChannel {
            params: params.clone(),
            opts,
            round_ops,
            roots,
            fft_inv,
        })
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn opts(&self) -> ChannelOpts {
        self.opts
    }

    fn check_bits(&self, bits: &[u8]) -> Result<()> {
        if bits.len() != self.params.n_qubits() {
            return Err(Error::validation(format!(
                "{} initial bits supplied for N = {} qubits",
                bits.len(),
                self.params.n_qubits()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::validation("initial bits must be 0 or 1"));
        }
        Ok(())
    }

    fn check_outcome(&self, m: usize) -> Result<()> {
        if m >= self.params.outcome_count() {
            return Err(Error::validation(format!(
                "outcome {m} out of range for L = {}",
                self.params.rounds()
            )));
        }
        Ok(())
    }

    /// Per-qubit branch vectors: entry B holds the qubit state after the L
    /// rounds along probe branch B, starting from |bit>.
    fn leaf_vectors(&self, qubit: usize, bit: u8) -> Vec<Vec2> {
        let l = self.params.rounds();
        let ops = &self.round_ops[qubit];
        let mut level: Vec<Vec2> = vec![basis2(bit)];
        for (kept, flipped) in ops[0][..l].iter().zip(&ops[1][..l]) {
            let mut next = Vec::with_capacity(level.len() * 2);
            for v in &level {
                next.push(kept.apply(v));
                next.push(flipped.apply(v));
            }
            level = next;
        }
        level
    }

    #[inline]
    fn root(&self, m: usize, b: usize) -> Complex64 {
        self.roots[(m * b) & (self.roots.len() - 1)]
    }

    /// Unnormalized post-measurement vector V_m |bits>, dense over 2^N.
    pub fn kraus_apply(&self, m: usize, bits: &[u8]) -> Result<StateVector> {
        self.check_outcome(m)?;
        self.check_bits(bits)?;
        let n = self.params.n_qubits();
        if n > DENSE_QUBIT_GUARD {
            return Err(Error::resource(format!(
                "dense Kraus application limited to N <= {DENSE_QUBIT_GUARD}"
            )));
        }
        let outcomes = self.params.outcome_count();
        let leafs: Vec<Vec<Vec2>> = (0..n).map(|j| self.leaf_vectors(j, bits[j])).collect();
        let dim = 1usize << n;
        let mut out = vec![C_ZERO; dim];
        let norm = 1.0 / outcomes as f64;
        let mut prod = vec![C_ZERO; dim];
        for b in 0..outcomes {
            // product state of this branch, qubit 1 most significant
            prod[0] = Complex64::new(1.0, 0.0);
            let mut len = 1;
            for leaf in leafs.iter() {
                let w = &leaf[b];
                for i in (0..len).rev() {
                    let a = prod[i];
                    prod[2 * i] = a * w[0];
                    prod[2 * i + 1] = a * w[1];
                }
                len *= 2;
            }
            let coef = self.root(m, b) * norm;
            for (o, p) in out.iter_mut().zip(&prod) {
                *o += coef * p;
            }
        }
        Ok(StateVector::from_amplitudes(out))
    }

    /// Exact outcome probabilities for the given initial bits.
    pub fn outcome_distribution(&self, bits: &[u8]) -> Result<OutcomeDistribution> {
        self.check_bits(bits)?;
        let n = self.params.n_qubits();
        let probs = if n <= 8 {
            self.distribution_dense(bits)
        } else {
            self.distribution_gram(bits)
        };
        OutcomeDistribution::new(probs, self.params.rounds(), DistributionMethod::Kraus)
    }

    /// Dense route: transform every amplitude component over the branch
    /// index, then accumulate norms per outcome.
    fn distribution_dense(&self, bits: &[u8]) -> Vec<f64> {
        let n = self.params.n_qubits();
        let outcomes = self.params.outcome_count();
        let leafs: Vec<Vec<Vec2>> = (0..n).map(|j| self.leaf_vectors(j, bits[j])).collect();
        let dim = 1usize << n;
        let scale = 1.0 / (outcomes as f64 * outcomes as f64);
        let mut probs = vec![0.0f64; outcomes];
        let mut prod = vec![C_ZERO; dim];
        let mut cols = vec![C_ZERO; dim * outcomes];
        for b in 0..outcomes {
            prod[0] = Complex64::new(1.0, 0.0);
            let mut len = 1;
            for leaf in leafs.iter() {
                let w = &leaf[b];
                for i in (0..len).rev() {
                    let a = prod[i];
                    prod[2 * i] = a * w[0];
                    prod[2 * i + 1] = a * w[1];
                }
                len *= 2;
            }
            for d in 0..dim {
                cols[d * outcomes + b] = prod[d];
            }
        }
        for d in 0..dim {
            let col = &mut cols[d * outcomes..(d + 1) * outcomes];
            self.fft_inv.process(col);
            for (p, amp) in probs.iter_mut().zip(col.iter()) {
                *p += amp.norm_sqr() * scale;
            }
        }
        probs
    }

    /// Gram route: probabilities from per-qubit branch overlaps only. Cost
    /// and memory are independent of 2^N, so this serves wide registers.
    fn distribution_gram(&self, bits: &[u8]) -> Vec<f64> {
        let n = self.params.n_qubits();
        let outcomes = self.params.outcome_count();
        let leafs: Vec<Vec<Vec2>> = (0..n).map(|j| self.leaf_vectors(j, bits[j])).collect();
        let mask = outcomes - 1;
        let scale = 1.0 / (outcomes as f64 * outcomes as f64);
        let mut corr = vec![C_ZERO; outcomes];
        for (d, c) in corr.iter_mut().enumerate() {
            let mut acc = C_ZERO;
            for b in 0..outcomes {
                let shifted = (b + d) & mask;
                let mut prod = Complex64::new(1.0, 0.0);
                for leaf in leafs.iter() {
                    prod *= dot2(&leaf[b], &leaf[shifted]);
                }
                acc += prod;
            }
            *c = acc;
        }
        self.fft_inv.process(&mut corr);
        corr.iter().map(|z| z.re * scale).collect()
    }

    /// Normalized post-measurement state, probability and fidelity to the
    /// initial product state.
    pub fn post_measurement(&self, m: usize, bits: &[u8]) -> Result<PostMeasurement> {
        let raw = self.kraus_apply(m, bits)?;
        let prob = raw.norm_sqr();
        if prob <= DEGENERATE_PROB {
            return Ok(PostMeasurement {
                m,
                prob,
                state: raw,
                fidelity: 0.0,
                degenerate: true,
            });
        }
        let state = raw.normalized();
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let fidelity = state.amplitudes()[index].norm_sqr();
        Ok(PostMeasurement {
            m,
            prob,
            state,
            fidelity,
            degenerate: false,
        })
    }

    /// Projection error 1 - sum_m P_m F_m for this detuning realization.
    pub fn projection_error_report(&self, bits: &[u8]) -> Result<ProjectionErrorReport> {
        self.check_bits(bits)?;
        let n = self.params.n_qubits();
        let outcomes = self.params.outcome_count();
        let leafs: Vec<Vec<Vec2>> = (0..n).map(|j| self.leaf_vectors(j, bits[j])).collect();
        // diagonal amplitude <bits| V_m |bits> for all m at once
        let mut diag: Vec<Complex64> = (0..outcomes)
            .map(|b| {
                let mut prod = Complex64::new(1.0, 0.0);
                for (leaf, &bit) in leafs.iter().zip(bits) {
                    prod *= leaf[b][bit as usize];
                }
                prod
            })
            .collect();
        self.fft_inv.process(&mut diag);
        let scale = 1.0 / (outcomes as f64 * outcomes as f64);
        let probs = self.outcome_distribution(bits)?;
        let mut kept = 0.0;
        let mut excluded = 0.0;
        for (m, amp) in diag.iter().enumerate() {
            let p = probs.probs()[m];
            if p <= DEGENERATE_PROB {
                excluded += p;
            } else {
                kept += amp.norm_sqr() * scale;
            }
        }
        Ok(ProjectionErrorReport {
            epsilon: 1.0 - kept,
            excluded_weight: excluded,
        })
    }

    /// Max-entry residual of the channel completeness relation
    /// sum_m V_m^dag V_m = identity, evaluated on the full matrix via the
    /// per-qubit branch overlaps.
    pub fn completeness_residual(&self) -> Result<f64> {
        let n = self.params.n_qubits();
        if n > DENSE_QUBIT_GUARD {
            return Err(Error::resource(format!(
                "completeness check limited to N <= {DENSE_QUBIT_GUARD}"
            )));
        }
        let outcomes = self.params.outcome_count();
        let leafs: Vec<[Vec<Vec2>; 2]> = (0..n)
            .map(|j| [self.leaf_vectors(j, 0), self.leaf_vectors(j, 1)])
            .collect();
        let dim = 1usize << n;
        let scale = 1.0 / outcomes as f64;
        let mut worst = 0.0f64;
        for row in 0..dim {
            for col in 0..dim {
                let mut acc = C_ZERO;
                for b in 0..outcomes {
                    let mut prod = Complex64::new(1.0, 0.0);
                    for (j, leaf) in leafs.iter().enumerate() {
                        let br = (row >> (n - 1 - j)) & 1;
                        let bc = (col >> (n - 1 - j)) & 1;
                        prod *= dot2(&leaf[br][b], &leaf[bc][b]);
                    }
                    acc += prod;
                }
                let expect = if row == col { 1.0 } else { 0.0 };
                worst = worst.max((acc * scale - Complex64::new(expect, 0.0)).norm());
            }
        }
        Ok(worst)
    }

    /// Purity of the post-measurement state for a maximally mixed input,
    /// averaged over outcomes under the given weighting.
    pub fn purity_mixed(&self, policy: PurityWeighting) -> Result<f64> {
        let n = self.params.n_qubits();
        if n > DENSE_QUBIT_GUARD {
            return Err(Error::resource(format!(
                "purity limited to N <= {DENSE_QUBIT_GUARD}"
            )));
        }
        let outcomes = self.params.outcome_count();
        let dim = 1usize << n;
        let pairs = dim * dim;
        if pairs.saturating_mul(outcomes) > (1 << 24) {
            return Err(Error::resource(
                "purity correlation table exceeds the memory guard".to_string(),
            ));
        }
        // branch vectors for both initial bits of every qubit
        let leafs: Vec<[Vec<Vec2>; 2]> = (0..n)
            .map(|j| [self.leaf_vectors(j, 0), self.leaf_vectors(j, 1)])
            .collect();
        let mask = outcomes - 1;
        // corr[(r*dim + c)*outcomes + d] = sum_B prod_j <w_(r_j)[B] | w_(c_j)[B+d]>
        let mut corr = vec![C_ZERO; pairs * outcomes];
        let mut scratch = vec![C_ZERO; pairs];
        for d in 0..outcomes {
            for b in 0..outcomes {
                let shifted = (b + d) & mask;
                // outer product over qubits of the 2x2 overlap blocks
                scratch[0] = Complex64::new(1.0, 0.0);
                let mut len = 1usize; // current register width in states
                for leaf in leafs.iter() {
                    let o00 = dot2(&leaf[0][b], &leaf[0][shifted]);
                    let o01 = dot2(&leaf[0][b], &leaf[1][shifted]);
                    let o10 = dot2(&leaf[1][b], &leaf[0][shifted]);
                    let o11 = dot2(&leaf[1][b], &leaf[1][shifted]);
                    for r in (0..len).rev() {
                        for c in (0..len).rev() {
                            let a = scratch[r * len + c];
                            let base_r = 2 * r;
                            let base_c = 2 * c;
                            let stride = 2 * len;
                            scratch[base_r * stride + base_c] = a * o00;
                            scratch[base_r * stride + base_c + 1] = a * o01;
                            scratch[(base_r + 1) * stride + base_c] = a * o10;
                            scratch[(base_r + 1) * stride + base_c + 1] = a * o11;
                        }
                    }
                    len *= 2;
                }
                for (pair, v) in scratch.iter().enumerate() {
                    corr[pair * outcomes + d] += v;
                }
            }
        }
        let scale = 1.0 / (outcomes as f64 * outcomes as f64);
        // transform the correlation over d into per-outcome Gram matrices
        let mut grams = vec![C_ZERO; pairs * outcomes];
        let mut buf = vec![C_ZERO; outcomes];
        for pair in 0..pairs {
            buf.copy_from_slice(&corr[pair * outcomes..(pair + 1) * outcomes]);
            self.fft_inv.process(&mut buf);
            for m in 0..outcomes {
                grams[m * pairs + pair] = buf[m] * scale;
            }
        }
        let mut weighted = 0.0;
        let mut total_weight = 0.0;
        let mut uniform = 0.0;
        let mut count = 0usize;
        for m in 0..outcomes {
            let g = &grams[m * pairs..(m + 1) * pairs];
            let trace: f64 = (0..dim).map(|r| g[r * dim + r].re).sum();
            let p_m = trace / dim as f64;
            if p_m <= DEGENERATE_PROB {
                continue;
            }
            let frob: f64 = g.iter().map(|z| z.norm_sqr()).sum();
            let tr2 = frob / (trace * trace);
            weighted += p_m * tr2;
            total_weight += p_m;
            uniform += tr2;
            count += 1;
        }
        Ok(match policy {
            PurityWeighting::ProbabilityWeighted => weighted / total_weight,
            PurityWeighting::Uniform => uniform / count.max(1) as f64,
        })
    }
}

/// V_m applied to a computational-basis product state (free-function form).
pub fn kraus_apply(
    m: usize,
    sample: &DetuningSample,
    params: &ProtocolParams,
    bits: &[u8],
) -> Result<StateVector> {
    KrausChannel::new(params, sample, ChannelOpts::default())?.kraus_apply(m, bits)
}

/// Exact outcome distribution (free-function form).
pub fn outcome_distribution(
    sample: &DetuningSample,
    params: &ProtocolParams,
    bits: &[u8],
) -> Result<OutcomeDistribution> {
    KrausChannel::new(params, sample, ChannelOpts::default())?.outcome_distribution(bits)
}

/// Post-measurement state for outcome `m` (free-function form).
pub fn post_measurement(
    m: usize,
    sample: &DetuningSample,
    params: &ProtocolParams,
    bits: &[u8],
) -> Result<PostMeasurement> {
    KrausChannel::new(params, sample, ChannelOpts::default())?.post_measurement(m, bits)
}

/// Average projection error over a set of detuning realizations.
pub fn projection_error(
    samples: &[DetuningSample],
    params: &ProtocolParams,
    bits: &[u8],
    opts: ChannelOpts,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::validation(
            "projection error needs at least one sample",
        ));
    }
    let mut fidelity_sum = 0.0;
    for sample in samples {
        let channel = KrausChannel::new(params, sample, opts)?;
        fidelity_sum += 1.0 - channel.projection_error_report(bits)?.epsilon;
    }
    Ok(1.0 - fidelity_sum / samples.len() as f64)
}

/// Average post-measurement purity over detuning realizations, maximally
/// mixed input.
pub fn purity(
    samples: &[DetuningSample],
    params: &ProtocolParams,
    policy: PurityWeighting,
    opts: ChannelOpts,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::validation("purity needs at least one sample"));
    }
    let mut acc = 0.0;
    for sample in samples {
        let channel = KrausChannel::new(params, sample, opts)?;
        acc += channel.purity_mixed(policy)?;
    }
    Ok(acc / samples.len() as f64)
}

/// Closed-form per-qubit projection error estimate.
///
/// Sums the per-round contribution of the gate infidelities under a
/// Gaussian detuning of width sigma_g; multiply by N for a register
/// estimate (see [`analytic_projection_error_total`]).
pub fn analytic_projection_error(params: &ProtocolParams) -> f64 {
    let sigma = params.sigma_g();
    if sigma == 0.0 {
        return 0.0;
    }
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let ratio2 = (params.g() / sigma).powi(2);
    (0..params.rounds())
        .map(|n| {
            let x2 = (sigma * (1u64 << n) as f64 * params.t()).powi(2);
            3.0 * (64.0 + 3.0 * pi2 + (-0.5 * x2).exp() * (64.0 - 3.0 * pi2) * (1.0 - x2))
                / (256.0 * ratio2)
        })
        .sum()
}

/// N times the per-qubit closed-form projection error.
pub fn analytic_projection_error_total(params: &ProtocolParams) -> f64 {
    params.n_qubits() as f64 * analytic_projection_error(params)
}

/// Unwrap a measured fraction m / 2^L from [0, 1) to [-1/2, 1/2); exactly
/// one half maps to the negative branch.
pub(crate) fn unwrap_fraction(m: usize, rounds: usize) -> f64 {
    let f = m as f64 / (1u64 << rounds) as f64;
    if f >= 0.5 {
        f - 1.0
    } else {
        f
    }
}

/// Phase estimate associated with outcome `m`, in cycles per base duration.
pub fn estimate_from_outcome(m: usize, params: &ProtocolParams) -> Result<f64> {
    if m >= params.outcome_count() {
        return Err(Error::validation(format!(
            "outcome {m} out of range for L = {}",
            params.rounds()
        )));
    }
    Ok(unwrap_fraction(m, params.rounds()))
}
