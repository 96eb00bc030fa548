//! Protocol parameters, rotating-frame Hamiltonians, per-qubit conditional
//! Hamiltonians, approximate-CNOT pulses and the composed controlled round
//! unitary.
//!
//! Units: angular frequencies in rad/us, durations in us. With the reference
//! coupling g/2pi = 100 kHz this makes g = 0.2*pi rad/us, keeping magnitudes
//! near one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{expm_2x2_hermitian, identity2, pauli_x, pauli_z, ComplexMatrix, C_I};

/// Ratio lambda/g fixed by the gate construction: lambda = 2 g / sqrt(3).
pub const LAMBDA_OVER_G: f64 = 2.0 / 1.732_050_807_568_877_2;

/// Which probe basis state carries the 2g frequency shift during the
/// conditional pulses. `ShiftOnOne` attaches the shift to probe |1>, so the
/// resonant flip happens when the probe is |0>; `ShiftOnZero` swaps the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub enum ProbeConvention {
    #[default]
    ShiftOnOne,
    ShiftOnZero,
}

impl ProbeConvention {
    /// Maps the physical probe bit to the effective bit of the text
    /// convention (bit 1 = shifted sector).
    pub(crate) fn effective_bit(self, probe_bit: u8) -> u8 {
        match self {
            ProbeConvention::ShiftOnOne => probe_bit,
            ProbeConvention::ShiftOnZero => 1 - probe_bit,
        }
    }
}

/// Gate model used when composing round unitaries. `Approximate` evolves the
/// exact conditional Hamiltonians for the pi/lambda pulse duration;
/// `Exact` substitutes the zero-detuning pulse unitaries (the g -> infinity
/// limit) while keeping the free evolution exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GateModel {
    #[default]
    Approximate,
    Exact,
}

/// Sign of the transverse drive in the conditional Hamiltonians: the first
/// pulse of a round uses `Plus`, the closing pulse uses `Minus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseSign {
    Plus,
    Minus,
}

impl PulseSign {
    fn factor(self) -> f64 {
        match self {
            PulseSign::Plus => 1.0,
            PulseSign::Minus => -1.0,
        }
    }
}

/// Lab-frame description of the probe/target system. Only used to derive
/// rotating-frame quantities; the time-dependent lab-frame dynamics is not
/// simulated.
#[derive(Debug, Clone)]
pub struct LabFrameParams {
    pub omega_p: f64,
    pub omega_av: f64,
    pub omega_j: Vec<f64>,
    pub g: f64,
    pub lambda_p: f64,
    pub lambda_t: f64,
    pub omega_drive_p: f64,
    pub omega_drive_t: f64,
}

impl LabFrameParams {
    pub fn validate(&self) -> Result<()> {
        if self.omega_j.is_empty() {
            return Err(Error::validation("at least one target qubit required"));
        }
        let all = self
            .omega_j
            .iter()
            .chain([
                &self.omega_p,
                &self.omega_av,
                &self.g,
                &self.lambda_p,
                &self.lambda_t,
                &self.omega_drive_p,
                &self.omega_drive_t,
            ])
            .all(|x| x.is_finite());
        if !all {
            return Err(Error::validation("all frequencies must be finite"));
        }
        Ok(())
    }
}

/// Drive frequencies selected by the rotating-frame reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingFrame {
    /// Probe drive frequency (set to the probe qubit frequency).
    pub drive_probe: f64,
    /// Target drive frequency (average target frequency minus g).
    pub drive_target: f64,
    pub g: f64,
}

/// Reduce a lab-frame description to the rotating-frame data the protocol
/// needs: per-qubit detunings from the ensemble average, plus the drive
/// choices as metadata.
pub fn rotating_frame_reduce(lab: &LabFrameParams) -> Result<(RotatingFrame, DetuningSample)> {
    lab.validate()?;
    let deltas = lab.omega_j.iter().map(|w| w - lab.omega_av).collect();
    Ok((
        RotatingFrame {
            drive_probe: lab.omega_p,
            drive_target: lab.omega_av - lab.g,
            g: lab.g,
        },
        DetuningSample { deltas },
    ))
}

/// All protocol constants in one validated record.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    g: f64,
    lambda: f64,
    t: f64,
    rounds: usize,
    n_qubits: usize,
    sigma_g: f64,
}

impl ProtocolParams {
    /// Build a validated record; `lambda` is fixed to 2 g / sqrt(3).
    pub fn new(g: f64, t: f64, rounds: usize, n_qubits: usize, sigma_g: f64) -> Result<Self> {
        if !g.is_finite() || g <= 0.0 {
            return Err(Error::validation("g must be positive and finite"));
        }
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::validation("t must be positive and finite"));
        }
        if rounds == 0 {
            return Err(Error::validation("number of rounds L must be at least 1"));
        }
        if n_qubits == 0 {
            return Err(Error::validation(
                "number of target qubits N must be at least 1",
            ));
        }
        if !sigma_g.is_finite() || sigma_g < 0.0 {
            return Err(Error::validation("sigma_g must be nonnegative and finite"));
        }
        Ok(ProtocolParams {
            g,
            lambda: LAMBDA_OVER_G * g,
            t,
            rounds,
            n_qubits,
            sigma_g,
        })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Base free-evolution duration in us.
    pub fn t(&self) -> f64 {
        self.t
    }

    /// Number of measurement rounds L.
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Number of target qubits N.
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn sigma_g(&self) -> f64 {
        self.sigma_g
    }

    /// Number of measurement outcomes 2^L.
    pub fn outcome_count(&self) -> usize {
        1usize << self.rounds
    }

    /// Duration of the conditional pulse, pi/lambda.
    pub fn pulse_duration(&self) -> f64 {
        std::f64::consts::PI / self.lambda
    }

    /// Free-evolution duration of round k (1-based): 2^(L-k) t, longest
    /// first.
    pub fn round_duration(&self, k: usize) -> f64 {
        debug_assert!(k >= 1 && k <= self.rounds);
        (1u64 << (self.rounds - k)) as f64 * self.t
    }
}

/// One realization of the N unknown detunings.
#[derive(Debug, Clone, PartialEq)]
pub struct DetuningSample {
    pub deltas: Vec<f64>,
}

impl DetuningSample {
    pub fn new(deltas: Vec<f64>) -> Self {
        DetuningSample { deltas }
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    /// Sum of all detunings, the quantity estimated for an all-zeros input.
    pub fn total(&self) -> f64 {
        self.deltas.iter().sum()
    }

    pub fn matches(&self, params: &ProtocolParams) -> Result<()> {
        if self.len() != params.n_qubits() {
            return Err(Error::validation(format!(
                "detuning sample has {} entries, expected N = {}",
                self.len(),
                params.n_qubits()
            )));
        }
        Ok(())
    }
}

/// Per-qubit Hamiltonian conditioned on the probe state, text convention:
/// probe |0> leaves the splitting at delta, probe |1> shifts it by 2g.
pub fn conditional_hamiltonian(
    delta: f64,
    probe_bit: u8,
    sign: PulseSign,
    params: &ProtocolParams,
) -> ComplexMatrix {
    debug_assert!(probe_bit <= 1);
    let dz = if probe_bit == 1 {
        delta + 2.0 * params.g()
    } else {
        delta
    };
    let h = pauli_z().scale((dz / 2.0).into());
    h.add(&pauli_x().scale((sign.factor() * params.lambda() / 2.0).into()))
}

/// Conditional Hamiltonian honoring a probe sign convention.
pub fn conditional_hamiltonian_with(
    delta: f64,
    probe_bit: u8,
    sign: PulseSign,
    params: &ProtocolParams,
    convention: ProbeConvention,
) -> ComplexMatrix {
    conditional_hamiltonian(delta, convention.effective_bit(probe_bit), sign, params)
}

/// The pi/lambda pulse unitary for one qubit and probe sector.
pub fn cnot_step_unitary(
    delta: f64,
    probe_bit: u8,
    sign: PulseSign,
    params: &ProtocolParams,
) -> ComplexMatrix {
    let h = conditional_hamiltonian(delta, probe_bit, sign, params);
    expm_2x2_hermitian(&h, params.pulse_duration())
        .expect("conditional Hamiltonian is Hermitian by construction")
}

fn cnot_step_unitary_opts(
    delta: f64,
    probe_bit: u8,
    sign: PulseSign,
    params: &ProtocolParams,
    convention: ProbeConvention,
    gates: GateModel,
) -> ComplexMatrix {
    let eff = convention.effective_bit(probe_bit);
    match gates {
        GateModel::Approximate => cnot_step_unitary(delta, eff, sign, params),
        // Zero-detuning limits: the resonant sector is a perfect pi pulse
        // (-+ i sx depending on the drive sign), the shifted sector a full
        // 2pi rotation (-identity).
        GateModel::Exact => match eff {
            0 => pauli_x().scale(-sign.factor() * C_I),
            _ => identity2().scale((-1.0).into()),
        },
    }
}

/// Probability that the pi/lambda pulse flips a target qubit when the probe
/// is in the unshifted sector. Exact two-level (Rabi) value.
pub fn flip_probability(delta: f64, params: &ProtocolParams) -> f64 {
    let l2 = params.lambda() * params.lambda();
    let om2 = delta * delta + l2;
    let arg = om2.sqrt() * std::f64::consts::PI / (2.0 * params.lambda());
    (l2 / om2) * arg.sin().powi(2)
}

/// Probability that the target qubit is unchanged when the probe is in the
/// shifted sector (a full 2pi rotation at zero detuning).
pub fn stay_probability(delta: f64, params: &ProtocolParams) -> f64 {
    let shifted = delta + 2.0 * params.g();
    let l2 = params.lambda() * params.lambda();
    let om2 = shifted * shifted + l2;
    let arg = om2.sqrt() * std::f64::consts::PI / (2.0 * params.lambda());
    1.0 - (l2 / om2) * arg.sin().powi(2)
}

/// Free evolution of one qubit for duration tau: e^{-i (delta/2) sz tau}.
pub fn free_evolution(delta: f64, tau: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(0, 0)] = Complex64::from_polar(1.0, -0.5 * delta * tau);
    m[(1, 1)] = Complex64::from_polar(1.0, 0.5 * delta * tau);
    m
}

/// The composed per-qubit building block of one measurement round: opening
/// pulse (Plus), free evolution for tau, closing pulse (Minus). The free
/// phase does not depend on the probe bit.
pub fn controlled_round_unitary(
    delta: f64,
    probe_bit: u8,
    tau: f64,
    params: &ProtocolParams,
) -> ComplexMatrix {
    controlled_round_unitary_opts(
        delta,
        probe_bit,
        tau,
        params,
        ProbeConvention::ShiftOnOne,
        GateModel::Approximate,
    )
}

pub fn controlled_round_unitary_opts(
    delta: f64,
    probe_bit: u8,
    tau: f64,
    params: &ProtocolParams,
    convention: ProbeConvention,
    gates: GateModel,
) -> ComplexMatrix {
    debug_assert!(tau >= 0.0);
    let open = cnot_step_unitary_opts(delta, probe_bit, PulseSign::Plus, params, convention, gates);
    let close = cnot_step_unitary_opts(
        delta,
        probe_bit,
        PulseSign::Minus,
        params,
        convention,
        gates,
    );
    close.mul(&free_evolution(delta, tau)).mul(&open)
}
