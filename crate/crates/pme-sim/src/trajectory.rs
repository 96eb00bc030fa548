//! Sequential single-probe phase estimation: round-by-round probe
//! preparation, controlled evolution, feedback rotation, measurement and
//! reset. Samples outcome bit strings whose law matches the Kraus
//! distribution.
//!
//! The target register between rounds is kept as a sum of product states
//! (one branch per probe history), which is exact because the target qubits
//! never interact with each other. Round k evolves for 2^(L-k) t and the bit
//! it measures enters the outcome as the 2^(k-1) digit; the feedback
//! rotation applies the conjugate of [`feedback_phase`] to the probe |1>
//! amplitude before the half-basis measurement. That placement is the one
//! under which chained round probabilities reproduce the Kraus outcome law.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{build_round_ops, ChannelOpts};
use crate::error::{Error, Result};
use crate::mat2::{basis2, dot2, Mat2, Vec2};
use crate::model::{DetuningSample, ProtocolParams};

/// Hard cap on the number of coherent branches.
pub const BRANCH_GUARD: usize = 1 << 14;

/// Ordered list of measured probe bits, first round first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeedbackHistory {
    bits: Vec<u8>,
}

impl FeedbackHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(bits.iter().all(|&b| b <= 1));
        FeedbackHistory {
            bits: bits.to_vec(),
        }
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits.push(bit);
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Integer known so far: the bit of round r carries weight 2^(r-1).
    pub fn known_outcome(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .map(|(i, &b)| (b as usize) << i)
            .sum()
    }
}

/// Feedback rotation phase for the round following this history:
/// exp(-2 pi i sum_{k=2..j} h[j-k] / 2^k) with j = len + 1, equivalently
/// exp(-2 pi i * known / 2^j). Unit modulus; the empty history gives 1.
pub fn feedback_phase(history: &FeedbackHistory) -> Complex64 {
    let j = history.len() + 1;
    let fraction = history.known_outcome() as f64 / (1u64 << j) as f64;
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * fraction)
}

#[derive(Debug, Clone)]
struct Branch {
    weight: Complex64,
    /// One 2-vector per target qubit.
    factors: Vec<Vec2>,
}

/// Target-register state as a weighted sum of product states.
#[derive(Debug, Clone)]
pub struct BranchState {
    branches: Vec<Branch>,
}

impl BranchState {
    /// Computational-basis product state.
    pub fn product(bits: &[u8]) -> Self {
        BranchState {
            branches: vec![Branch {
                weight: Complex64::new(1.0, 0.0),
                factors: bits.iter().map(|&b| basis2(b)).collect(),
            }],
        }
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Total norm squared via the pairwise branch Gram sum.
    pub fn norm_sqr(&self) -> f64 {
        cross_inner(&self.branches, &self.branches).re
    }

    /// Dense amplitude vector over 2^N, qubit 1 most significant.
    pub fn dense(&self) -> Vec<Complex64> {
        let n = self.branches[0].factors.len();
        let dim = 1usize << n;
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for branch in &self.branches {
            let mut prod = vec![Complex64::new(0.0, 0.0); dim];
            prod[0] = branch.weight;
            let mut len = 1;
            for f in &branch.factors {
                for i in (0..len).rev() {
                    let a = prod[i];
                    prod[2 * i] = a * f[0];
                    prod[2 * i + 1] = a * f[1];
                }
                len *= 2;
            }
            for (o, p) in out.iter_mut().zip(&prod) {
                *o += p;
            }
        }
        out
    }

    fn scaled(mut self, c: Complex64) -> Self {
        for b in &mut self.branches {
            b.weight *= c;
        }
        self
    }
}

/// <sum_a | sum_b> over two branch sets.
fn cross_inner(a: &[Branch], b: &[Branch]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for x in a {
        for y in b {
            let mut overlap = x.weight.conj() * y.weight;
            for (fx, fy) in x.factors.iter().zip(&y.factors) {
                overlap *= dot2(fx, fy);
            }
            acc += overlap;
        }
    }
    acc
}

/// Round-by-round sampler for one detuning realization.
pub struct TrajectorySampler {
    params: ProtocolParams,
    round_ops: Vec<[Vec<Mat2>; 2]>,
    initial_bits: Vec<u8>,
}

impl TrajectorySampler {
    pub fn new(
        params: &ProtocolParams,
        sample: &DetuningSample,
        bits: &[u8],
        opts: ChannelOpts,
    ) -> Result<Self> {
        if bits.len() != params.n_qubits() || bits.iter().any(|&b| b > 1) {
            return Err(Error::validation("initial bits must be 0/1, one per qubit"));
        }
        Ok(TrajectorySampler {
            params: params.clone(),
            round_ops: build_round_ops(params, sample, opts)?,
            initial_bits: bits.to_vec(),
        })
    }

    pub fn initial_state(&self) -> BranchState {
        BranchState::product(&self.initial_bits)
    }

    /// One measurement round: applies the probe-conditioned product
    /// operators fused with the feedback rotation and the half-basis
    /// measurement. Returns the Born probability of bit 1 and the two
    /// normalized conditional states (branch count doubles).
    pub fn round_step(
        &self,
        state: &BranchState,
        round: usize,
        history: &FeedbackHistory,
    ) -> Result<(f64, BranchState, BranchState)> {
        if round < 1 || round > self.params.rounds() {
            return Err(Error::validation(format!(
                "round {round} outside 1..={}",
                self.params.rounds()
            )));
        }
        if state.branches.len() * 2 > BRANCH_GUARD {
            return Err(Error::resource(format!(
                "branch count would exceed {BRANCH_GUARD}"
            )));
        }
        let k = round - 1;
        let rot = feedback_phase(history).conj();
        let half = Complex64::new(0.5, 0.0);
        let child = |s: usize, extra: Complex64| -> Vec<Branch> {
            state
                .branches
                .iter()
                .map(|b| Branch {
                    weight: b.weight * extra,
                    factors: b
                        .factors
                        .iter()
                        .enumerate()
                        .map(|(j, f)| self.round_ops[j][s][k].apply(f))
                        .collect(),
                })
                .collect()
        };
        let kept = child(0, half);
        let flipped = child(1, half * rot);
        let n0 = cross_inner(&kept, &kept).re;
        let n1 = cross_inner(&flipped, &flipped).re;
        let cross = cross_inner(&kept, &flipped).re;
        let p0 = (n0 + n1 + 2.0 * cross).max(0.0);
        let p1 = (n0 + n1 - 2.0 * cross).max(0.0);
        let assemble = |sign: f64, norm_sqr: f64| -> BranchState {
            let scale = if norm_sqr > 0.0 {
                1.0 / norm_sqr.sqrt()
            } else {
                0.0
            };
            let mut branches = kept.clone();
            branches.extend(flipped.iter().map(|b| Branch {
                weight: b.weight * sign,
                factors: b.factors.clone(),
            }));
            BranchState { branches }.scaled(Complex64::new(scale, 0.0))
        };
        Ok((p1, assemble(1.0, p0), assemble(-1.0, p1)))
    }

    /// Sample one full trajectory with the given random stream.
    pub fn run(&self, rng: &mut impl Rng) -> Result<(usize, FeedbackHistory)> {
        let mut state = self.initial_state();
        let mut history = FeedbackHistory::new();
        for round in 1..=self.params.rounds() {
            let (p1, s0, s1) = self.round_step(&state, round, &history)?;
            let bit = u8::from(rng.gen::<f64>() < p1);
            state = if bit == 1 { s1 } else { s0 };
            history.push(bit);
        }
        Ok((history.known_outcome(), history))
    }
}

/// Deterministic random stream for trajectory `index` of a base seed.
pub fn trajectory_rng(base_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(index);
    rng
}

/// Sample one trajectory from a fresh deterministic stream.
pub fn run_trajectory(
    sample: &DetuningSample,
    params: &ProtocolParams,
    bits: &[u8],
    rng_seed: u64,
    opts: ChannelOpts,
) -> Result<(usize, FeedbackHistory)> {
    let sampler = TrajectorySampler::new(params, sample, bits, opts)?;
    sampler.run(&mut trajectory_rng(rng_seed, 0))
}

/// Empirical outcome frequencies from repeated trajectories, one stream per
/// trajectory index.
pub fn empirical_distribution(
    sampler: &TrajectorySampler,
    trials: usize,
    base_seed: u64,
) -> Result<crate::channel::OutcomeDistribution> {
    let mut counts = vec![0usize; sampler.params.outcome_count()];
    for i in 0..trials {
        let (m, _) = sampler.run(&mut trajectory_rng(base_seed, i as u64))?;
        counts[m] += 1;
    }
    crate::channel::OutcomeDistribution::new(
        counts.iter().map(|&c| c as f64 / trials as f64).collect(),
        sampler.params.rounds(),
        crate::channel::DistributionMethod::Trajectory,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{outcome_distribution, ChannelOpts};
    use crate::model::GateModel;
    use proptest::prelude::*;

    const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

    fn reference_params(rounds: usize, n_qubits: usize) -> ProtocolParams {
        let g = TWO_PI * 0.1;
        let t = 160.0 / (n_qubits as f64).sqrt();
        ProtocolParams::new(g, t, rounds, n_qubits, TWO_PI * 0.001).unwrap()
    }

    #[test]
    fn feedback_phase_examples() {
        assert_eq!(
            feedback_phase(&FeedbackHistory::new()),
            Complex64::new(1.0, 0.0)
        );

        let one = feedback_phase(&FeedbackHistory::from_bits(&[1]));
        assert!((one - Complex64::new(0.0, -1.0)).norm() < 1e-14);

        let two = feedback_phase(&FeedbackHistory::from_bits(&[1, 1]));
        let expect = Complex64::from_polar(1.0, -3.0 * std::f64::consts::PI / 4.0);
        assert!((two - expect).norm() < 1e-14);
    }

    #[test]
    fn zero_detuning_rounds_are_deterministic() {
        let params = reference_params(3, 1);
        let sample = DetuningSample::new(vec![0.0]);
        let opts = ChannelOpts {
            gates: GateModel::Exact,
            ..Default::default()
        };
        let sampler = TrajectorySampler::new(&params, &sample, &[0], opts).unwrap();
        let mut state = sampler.initial_state();
        let mut history = FeedbackHistory::new();
        for round in 1..=3 {
            let (p1, s0, _s1) = sampler.round_step(&state, round, &history).unwrap();
            assert!(p1 < 1e-12);
            state = s0;
            history.push(0);
        }
        assert_eq!(history.known_outcome(), 0);
    }

    #[test]
    fn born_probabilities_sum_to_one() {
        let params = reference_params(4, 2);
        let sample = DetuningSample::new(vec![0.004, -0.007]);
        let sampler =
            TrajectorySampler::new(&params, &sample, &[0, 1], ChannelOpts::default()).unwrap();
        let mut state = sampler.initial_state();
        let mut history = FeedbackHistory::new();
        for round in 1..=4 {
            let (p1, s0, s1) = sampler.round_step(&state, round, &history).unwrap();
            let (_p1b, q0, _q1) = sampler.round_step(&state, round, &history).unwrap();
            // p0 + p1 = 1 and the state norms stay 1
            assert!(((1.0 - p1) + p1 - 1.0).abs() < 1e-12);
            assert!((s0.norm_sqr() - 1.0).abs() < 1e-9 || p1 > 1.0 - 1e-12);
            assert!((s1.norm_sqr() - 1.0).abs() < 1e-9 || p1 < 1e-12);
            assert!((q0.dense().len()) == s0.dense().len());
            state = if p1 > 0.5 { s1 } else { s0 };
            history.push(u8::from(p1 > 0.5));
        }
        assert!(state.branch_count() <= 1 << 4);
    }

    #[test]
    fn chained_round_probabilities_match_kraus_distribution() {
        for (n, l) in [(1usize, 3usize), (2, 3), (2, 4)] {
            let params = reference_params(l, n);
            let deltas: Vec<f64> = (0..n).map(|j| TWO_PI * 0.0012 * (j as f64 - 0.4)).collect();
            let sample = DetuningSample::new(deltas);
            let bits = vec![0u8; n];
            let dist = outcome_distribution(&sample, &params, &bits).unwrap();
            let sampler =
                TrajectorySampler::new(&params, &sample, &bits, ChannelOpts::default()).unwrap();
            for m in 0..params.outcome_count() {
                let mut state = sampler.initial_state();
                let mut history = FeedbackHistory::new();
                let mut path_prob = 1.0;
                for round in 1..=l {
                    let bit = ((m >> (round - 1)) & 1) as u8;
                    let (p1, s0, s1) = sampler.round_step(&state, round, &history).unwrap();
                    path_prob *= if bit == 1 { p1 } else { 1.0 - p1 };
                    state = if bit == 1 { s1 } else { s0 };
                    history.push(bit);
                    if path_prob == 0.0 {
                        break;
                    }
                }
                assert!(
                    (path_prob - dist.probs()[m]).abs() < 1e-9,
                    "m={m}: path {path_prob} vs kraus {}",
                    dist.probs()[m]
                );
            }
        }
    }

    #[test]
    fn fixed_seed_reruns_identically() {
        let params = reference_params(5, 1);
        let sample = DetuningSample::new(vec![TWO_PI * 0.0007]);
        let a = run_trajectory(&sample, &params, &[0], 99, ChannelOpts::default()).unwrap();
        let b = run_trajectory(&sample, &params, &[0], 99, ChannelOpts::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_phase_gives_same_outcome_every_trajectory() {
        let l = 3;
        let m_star = 3usize;
        let t = 41.0;
        let delta = TWO_PI * m_star as f64 / ((1 << l) as f64 * t);
        let params = ProtocolParams::new(1.0, t, l, 1, 0.0).unwrap();
        let sample = DetuningSample::new(vec![delta]);
        let opts = ChannelOpts {
            gates: GateModel::Exact,
            ..Default::default()
        };
        let sampler = TrajectorySampler::new(&params, &sample, &[0], opts).unwrap();
        for i in 0..32 {
            let (m, _) = sampler.run(&mut trajectory_rng(7, i)).unwrap();
            assert_eq!(m, m_star);
        }
    }

    #[test]
    fn empirical_frequencies_match_distribution() {
        let params = reference_params(3, 1);
        let sample = DetuningSample::new(vec![TWO_PI * 0.0011]);
        let bits = [0u8];
        let dist = outcome_distribution(&sample, &params, &bits).unwrap();
        let sampler =
            TrajectorySampler::new(&params, &sample, &bits, ChannelOpts::default()).unwrap();
        let trials = 20_000usize;
        let empirical = empirical_distribution(&sampler, trials, 1234).unwrap();
        assert_eq!(
            empirical.method(),
            crate::channel::DistributionMethod::Trajectory
        );
        for (m, (&freq, &expect)) in empirical.probs().iter().zip(dist.probs()).enumerate() {
            let tol = 5.0 * (expect / trials as f64).sqrt() + 5.0 / trials as f64;
            assert!(
                (freq - expect).abs() < tol,
                "m={m}: frequency {freq:.5} vs expected {expect:.5}"
            );
        }
    }

    proptest! {
        #[test]
        fn feedback_phase_has_unit_modulus(bits in proptest::collection::vec(0u8..2, 0..12)) {
            let phi = feedback_phase(&FeedbackHistory::from_bits(&bits));
            prop_assert!((phi.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn branch_guard_trips() {
        let params = ProtocolParams::new(1.0, 1.0, 1, 1, 0.0).unwrap();
        let sample = DetuningSample::new(vec![0.0]);
        let sampler =
            TrajectorySampler::new(&params, &sample, &[0], ChannelOpts::default()).unwrap();
        let mut state = sampler.initial_state();
        // artificially inflate the branch set beyond the guard
        while state.branches.len() * 2 <= BRANCH_GUARD {
            let copy = state.branches.clone();
            state.branches.extend(copy);
        }
        let history = FeedbackHistory::new();
        assert!(matches!(
            sampler.round_step(&state, 1, &history),
            Err(Error::Resource(_))
        ));
    }
}
