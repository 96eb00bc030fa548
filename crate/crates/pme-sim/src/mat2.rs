//! Stack-allocated 2x2 complex matrices and 2-vectors for the hot paths.

use num_complex::Complex64;

use crate::linalg::{ComplexMatrix, C_ZERO};

pub(crate) type Vec2 = [Complex64; 2];

#[derive(Debug, Clone, Copy)]
pub(crate) struct Mat2(pub [Complex64; 4]);

impl Mat2 {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        assert_eq!(m.dim(), 2);
        Mat2([m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
    }

    #[inline]
    pub fn apply(&self, v: &Vec2) -> Vec2 {
        [
            self.0[0] * v[0] + self.0[1] * v[1],
            self.0[2] * v[0] + self.0[3] * v[1],
        ]
    }
}

#[inline]
pub(crate) fn basis2(bit: u8) -> Vec2 {
    let mut v = [C_ZERO; 2];
    v[bit as usize] = Complex64::new(1.0, 0.0);
    v
}

/// Conjugate-linear inner product <a|b>.
#[inline]
pub(crate) fn dot2(a: &Vec2, b: &Vec2) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}
