//! Minimal dense complex linear algebra for small Hilbert spaces: 2x2
//! closed-form Hermitian exponentials, dense exponentials via
//! eigendecomposition, tensor products and state-vector application.
//!
//! Everything here is double-precision `Complex64` on row-major storage.
//! All dimensions are desk scale (at most 2^12), so no sparsity or blocking
//! is attempted.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for Hermiticity checks on inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Tolerance for unitarity checks on produced matrices.
pub const UNITARY_TOL: f64 = 1e-10;
/// Largest dimension accepted by the dense exponential.
pub const DENSE_DIM_GUARD: usize = 1 << 12;

pub const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const C_I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            data: vec![C_ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C_ONE;
        }
        m
    }

    /// Build from a row-major slice of length dim^2.
    pub fn from_rows(dim: usize, data: &[Complex64]) -> Self {
        assert_eq!(data.len(), dim * dim, "entry count must equal dim^2");
        ComplexMatrix {
            dim,
            data: data.to_vec(),
        }
    }

    /// Build a 2x2 matrix from real entries.
    pub fn from_real_2x2(a: f64, b: f64, c: f64, d: f64) -> Self {
        ComplexMatrix {
            dim: 2,
            data: vec![a.into(), b.into(), c.into(), d.into()],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == C_ZERO {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest absolute entry of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Residual of the Hermiticity condition, max |H - H^dag|.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Residual of the unitarity condition, max |U^dag U - I|.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint()
            .mul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// Apply to a state vector.
    pub fn apply(&self, state: &StateVector) -> StateVector {
        assert_eq!(self.dim, state.dim(), "dimension mismatch in apply");
        let d = self.dim;
        let mut out = vec![C_ZERO; d];
        for i in 0..d {
            let mut acc = C_ZERO;
            for j in 0..d {
                acc += self[(i, j)] * state.amplitudes()[j];
            }
            out[i] = acc;
        }
        StateVector::from_amplitudes(out)
    }

    /// Maximum distance to `rhs` after removing a global phase, i.e.
    /// min over unit phases c of max |self - c*rhs|.
    pub fn max_abs_diff_up_to_phase(&self, rhs: &Self) -> f64 {
        let (mut best, mut idx) = (0.0f64, None);
        for (k, z) in rhs.data.iter().enumerate() {
            if z.norm() > best {
                best = z.norm();
                idx = Some(k);
            }
        }
        let Some(k) = idx else {
            return self.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        };
        let phase = self.data[k] / rhs.data[k];
        let phase = if phase.norm() == 0.0 {
            C_ONE
        } else {
            phase / phase.norm()
        };
        self.max_abs_diff(&rhs.scale(phase))
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Complex amplitude vector over a power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        assert!(
            amps.len().is_power_of_two(),
            "state dimension must be a power of two"
        );
        StateVector { amps }
    }

    /// Computational basis state |index> over `dim` amplitudes.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut amps = vec![C_ZERO; dim];
        amps[index] = C_ONE;
        Self::from_amplitudes(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, rhs: &Self) -> Complex64 {
        assert_eq!(self.dim(), rhs.dim());
        self.amps
            .iter()
            .zip(&rhs.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        assert!(n > 0.0, "cannot normalize the zero vector");
        StateVector {
            amps: self.amps.iter().map(|a| a / n).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        StateVector {
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    /// |<self|rhs>|^2 / (|self|^2 |rhs|^2): overlap insensitive to phase
    /// and normalization.
    pub fn overlap_sqr(&self, rhs: &Self) -> f64 {
        self.inner(rhs).norm_sqr() / (self.norm_sqr() * rhs.norm_sqr())
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_2x2(0.0, 1.0, 1.0, 0.0)
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(2, &[C_ZERO, -C_I, C_I, C_ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_2x2(1.0, 0.0, 0.0, -1.0)
}

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

/// Tensor product of the given factors, first factor most significant.
///
/// Index convention: for `kron(&[a, b])` with dims (da, db), entry
/// `((ia*db+ib), (ja*db+jb)) = a[ia,ja] * b[ib,jb]`. With qubit factors this
/// places qubit 1 on the most significant bits of the composite index.
pub fn kron(ops: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    if ops.is_empty() {
        return Err(Error::validation("kron of an empty factor list"));
    }
    let mut acc = ops[0].clone();
    for op in &ops[1..] {
        let (da, db) = (acc.dim(), op.dim());
        let mut out = ComplexMatrix::zeros(da * db);
        for ia in 0..da {
            for ja in 0..da {
                let a = acc[(ia, ja)];
                if a == C_ZERO {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        out[(ia * db + ib, ja * db + jb)] = a * op[(ib, jb)];
                    }
                }
            }
        }
        acc = out;
    }
    Ok(acc)
}

/// Closed-form e^{-i h tau} for a 2x2 Hermitian h.
///
/// Decomposes h = c0*I + (dz/2) sz + (ox/2) sx + (oy/2) sy and applies the
/// axis-angle rotation formula; a vanishing field reduces to a pure phase.
pub fn expm_2x2_hermitian(h: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
    if h.dim() != 2 {
        return Err(Error::validation(format!(
            "expected a 2x2 matrix, got dim {}",
            h.dim()
        )));
    }
    let res = h.hermiticity_residual();
    if res > HERMITIAN_TOL {
        return Err(Error::validation(format!(
            "matrix is not Hermitian (residual {res:.3e})"
        )));
    }
    let a = h[(0, 0)].re;
    let b = h[(1, 1)].re;
    let c0 = 0.5 * (a + b);
    let dz = a - b;
    let ox = 2.0 * h[(0, 1)].re;
    let oy = -2.0 * h[(0, 1)].im;
    let omega = (dz * dz + ox * ox + oy * oy).sqrt();
    let phase = Complex64::from_polar(1.0, -c0 * tau);
    if omega == 0.0 {
        return Ok(identity2().scale(phase));
    }
    let half = 0.5 * omega * tau;
    let (s, c) = (half.sin(), half.cos());
    let (nx, ny, nz) = (ox / omega, oy / omega, dz / omega);
    // cos(half) I - i sin(half) (n . sigma)
    let m = ComplexMatrix::from_rows(
        2,
        &[
            Complex64::new(c, -s * nz),
            Complex64::new(-s * ny, -s * nx),
            Complex64::new(s * ny, -s * nx),
            Complex64::new(c, s * nz),
        ],
    );
    Ok(m.scale(phase))
}

/// e^{-i h tau} for a Hermitian h of any dimension up to the guard, via
/// real-eigenvalue spectral decomposition.
pub fn expm_hermitian_dense(h: &ComplexMatrix, tau: f64) -> Result<ComplexMatrix> {
    let d = h.dim();
    if d > DENSE_DIM_GUARD {
        return Err(Error::resource(format!(
            "dense exponential limited to dim {DENSE_DIM_GUARD}, got {d}"
        )));
    }
    let res = h.hermiticity_residual();
    if res > HERMITIAN_TOL {
        return Err(Error::validation(format!(
            "matrix is not Hermitian (residual {res:.3e})"
        )));
    }
    let m = DMatrix::from_fn(d, d, |i, j| h[(i, j)]);
    let eig = m.symmetric_eigen();
    let mut out = ComplexMatrix::zeros(d);
    // U = V diag(e^{-i w tau}) V^dag with real eigenvalues w.
    for i in 0..d {
        for j in 0..d {
            let mut acc = C_ZERO;
            for k in 0..d {
                let w = eig.eigenvalues[k];
                let ph = Complex64::from_polar(1.0, -w * tau);
                acc += eig.eigenvectors[(i, k)] * ph * eig.eigenvectors[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}
