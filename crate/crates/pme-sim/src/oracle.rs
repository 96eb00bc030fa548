//! Brute-force validator: simulates the full (N+1)-qubit circuit on a dense
//! 2^(N+1) state vector, with the conditional Hamiltonians assembled as
//! whole-system operators, exact dense exponentials and explicit probe
//! measurements with feedback. Certifies the factorized fast paths.
//!
//! Index convention: the probe occupies the most significant bit of the
//! composite index, target qubit 1 the next block, and so on.
//!
//! This module is intentionally exponential and guarded; nothing here is
//! meant to scale.

use num_complex::Complex64;

use crate::channel::{DistributionMethod, OutcomeDistribution};
use crate::error::{Error, Result};
use crate::linalg::{
    expm_hermitian_dense, identity2, kron, pauli_x, pauli_z, ComplexMatrix, StateVector, C_ZERO,
};
use crate::model::{DetuningSample, ProbeConvention, ProtocolParams};
use crate::trajectory::{feedback_phase, FeedbackHistory};

/// Which whole-system Hamiltonian to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HamiltonianTag {
    /// Conditional pulses with the positive transverse drive.
    DrivePlus,
    /// Conditional pulses with the negative transverse drive.
    DriveMinus,
    /// Free evolution: drives and coupling off.
    Free,
}

/// Dense Hermitian operator over probe plus targets.
#[derive(Debug, Clone)]
pub struct FullSystemHamiltonian {
    pub tag: HamiltonianTag,
    pub matrix: ComplexMatrix,
}

const BUILD_QUBIT_GUARD: usize = 10;
const CIRCUIT_QUBIT_GUARD: usize = 3;
const CIRCUIT_ROUND_GUARD: usize = 6;

/// Assemble the dense Hamiltonian of the chosen segment. `convention`
/// selects which probe basis state carries the 2g shift.
pub fn build_hamiltonian(
    tag: HamiltonianTag,
    sample: &DetuningSample,
    params: &ProtocolParams,
    convention: ProbeConvention,
) -> Result<FullSystemHamiltonian> {
    sample.matches(params)?;
    let n = params.n_qubits();
    if n > BUILD_QUBIT_GUARD {
        return Err(Error::resource(format!(
            "dense Hamiltonian limited to N <= {BUILD_QUBIT_GUARD}"
        )));
    }
    let dim = 1usize << (n + 1);
    let mut h = ComplexMatrix::zeros(dim);
    let shift_projector = {
        let mut p = ComplexMatrix::zeros(2);
        let bit = match convention {
            ProbeConvention::ShiftOnOne => 1,
            ProbeConvention::ShiftOnZero => 0,
        };
        p[(bit, bit)] = 1.0.into();
        p
    };
    let id = identity2();
    for (j, &delta) in sample.deltas.iter().enumerate() {
        // detuning term, probe untouched
        h = h.add(&one_qubit_term(
            n,
            j,
            &id,
            &pauli_z().scale((delta / 2.0).into()),
        )?);
        match tag {
            HamiltonianTag::Free => {}
            HamiltonianTag::DrivePlus | HamiltonianTag::DriveMinus => {
                // collective coupling: 2g shift in the selected probe sector
                h = h.add(&one_qubit_term(
                    n,
                    j,
                    &shift_projector,
                    &pauli_z().scale(params.g().into()),
                )?);
                let sign = if tag == HamiltonianTag::DrivePlus {
                    1.0
                } else {
                    -1.0
                };
                h = h.add(&one_qubit_term(
                    n,
                    j,
                    &id,
                    &pauli_x().scale((sign * params.lambda() / 2.0).into()),
                )?);
            }
        }
    }
    debug_assert!(h.is_hermitian(1e-12));
    Ok(FullSystemHamiltonian { tag, matrix: h })
}

/// probe_op (x) (identities ... target_op at qubit j ... identities)
fn one_qubit_term(
    n: usize,
    j: usize,
    probe_op: &ComplexMatrix,
    target_op: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let id = identity2();
    let mut factors: Vec<&ComplexMatrix> = Vec::with_capacity(n + 1);
    factors.push(probe_op);
    for q in 0..n {
        factors.push(if q == j { target_op } else { &id });
    }
    kron(&factors)
}

/// Exact outcome distribution of the full circuit, path-enumerated.
pub fn simulate_full_circuit(
    sample: &DetuningSample,
    params: &ProtocolParams,
    bits: &[u8],
    convention: ProbeConvention,
) -> Result<OutcomeDistribution> {
    Ok(simulate_full_circuit_states(sample, params, bits, convention)?.0)
}

/// Full-circuit distribution together with the unnormalized post-measurement
/// target states per outcome.
pub fn simulate_full_circuit_states(
    sample: &DetuningSample,
    params: &ProtocolParams,
    bits: &[u8],
    convention: ProbeConvention,
) -> Result<(OutcomeDistribution, Vec<StateVector>)> {
    sample.matches(params)?;
    let n = params.n_qubits();
    let l = params.rounds();
    if n > CIRCUIT_QUBIT_GUARD || l > CIRCUIT_ROUND_GUARD {
        return Err(Error::resource(format!(
            "full-circuit oracle limited to N <= {CIRCUIT_QUBIT_GUARD}, L <= {CIRCUIT_ROUND_GUARD}"
        )));
    }
    if bits.len() != n || bits.iter().any(|&b| b > 1) {
        return Err(Error::validation("initial bits must be 0/1, one per qubit"));
    }
    let pulse = params.pulse_duration();
    let u_plus = expm_hermitian_dense(
        &build_hamiltonian(HamiltonianTag::DrivePlus, sample, params, convention)?.matrix,
        pulse,
    )?;
    let u_minus = expm_hermitian_dense(
        &build_hamiltonian(HamiltonianTag::DriveMinus, sample, params, convention)?.matrix,
        pulse,
    )?;
    let h_free = build_hamiltonian(HamiltonianTag::Free, sample, params, convention)?.matrix;
    let u_free: Vec<ComplexMatrix> = (1..=l)
        .map(|k| expm_hermitian_dense(&h_free, params.round_duration(k)))
        .collect::<Result<_>>()?;

    let target_dim = 1usize << n;
    let dim = target_dim << 1;
    let start_index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let mut initial = vec![C_ZERO; dim];
    initial[start_index] = 1.0.into(); // probe |0>, targets |bits>

    let outcomes = params.outcome_count();
    let mut probs = vec![0.0f64; outcomes];
    let mut states: Vec<StateVector> = (0..outcomes)
        .map(|_| StateVector::from_amplitudes(vec![C_ZERO; target_dim]))
        .collect();

    // depth-first over measurement paths, carrying unnormalized states
    let mut stack: Vec<(Vec<Complex64>, FeedbackHistory)> = vec![(initial, FeedbackHistory::new())];
    while let Some((mut psi, history)) = stack.pop() {
        let round = history.len() + 1;
        probe_hadamard(&mut psi, target_dim);
        psi = apply_dense(&u_plus, &psi);
        psi = apply_dense(&u_free[round - 1], &psi);
        psi = apply_dense(&u_minus, &psi);
        let rot = feedback_phase(&history).conj();
        for d in 0..target_dim {
            psi[target_dim + d] *= rot;
        }
        probe_hadamard(&mut psi, target_dim);
        for bit in 0..2u8 {
            // project the probe, then reset it to |0>
            let mut collapsed = vec![C_ZERO; dim];
            let offset = bit as usize * target_dim;
            collapsed[..target_dim].copy_from_slice(&psi[offset..offset + target_dim]);
            let weight: f64 = collapsed.iter().map(|a| a.norm_sqr()).sum();
            if weight == 0.0 {
                continue;
            }
            let mut next = history.clone();
            next.push(bit);
            if round == l {
                let m = next.known_outcome();
                probs[m] = weight;
                states[m] = StateVector::from_amplitudes(collapsed[..target_dim].to_vec());
            } else {
                stack.push((collapsed, next));
            }
        }
    }
    let dist = OutcomeDistribution::new(probs, l, DistributionMethod::Oracle)?;
    Ok((dist, states))
}

fn apply_dense(u: &ComplexMatrix, psi: &[Complex64]) -> Vec<Complex64> {
    let d = u.dim();
    debug_assert_eq!(d, psi.len());
    let mut out = vec![C_ZERO; d];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = C_ZERO;
        for (j, p) in psi.iter().enumerate() {
            acc += u[(i, j)] * p;
        }
        *o = acc;
    }
    out
}

/// Hadamard on the probe (most significant) qubit.
fn probe_hadamard(psi: &mut [Complex64], target_dim: usize) {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    for d in 0..target_dim {
        let a = psi[d];
        let b = psi[target_dim + d];
        psi[d] = (a + b) * inv;
        psi[target_dim + d] = (a - b) * inv;
    }
}
