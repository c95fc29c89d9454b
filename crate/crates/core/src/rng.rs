//! Reproducible standard-normal stream.
//!
//! The generator is ChaCha20 (20 rounds, stream 0) keyed by the 32-byte seed
//! whose first 8 bytes are the `u64` seed in little-endian order and whose
//! remaining bytes are zero. Uniforms are `(next_u64 >> 11)·2⁻⁵³`; normals come
//! in Box–Muller pairs from two consecutive uniforms `u₁, u₂` as
//! `√(−2 ln(1 − u₁))·cos(2πu₂)` followed by the matching `sin` value.
//! Matrices are filled row by row.

use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::problem::Vector;

#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Self {
            rng: ChaCha20Rng::from_seed(key),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn vector(&mut self, n: usize) -> Vector {
        Vector::from_iterator(n, (0..n).map(|_| self.normal()))
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        let data: Vec<f64> = (0..rows * cols).map(|_| self.normal()).collect();
        DMatrix::from_row_slice(rows, cols, &data)
    }

    /// `GᵀG/n` for a standard-normal `n × n` matrix `G`.
    pub fn psd_matrix(&mut self, n: usize) -> DMatrix<f64> {
        let g = self.matrix(n, n);
        let a = g.tr_mul(&g) / n as f64;
        (&a + a.transpose()) * 0.5
    }
}
