//! Forward and inverse Pauli transforms.
//!
//! The normalized trace `τ(σ_s A)` factorizes over qubits, so the full
//! transform is `n` passes of a local 4-point butterfly, one per qubit, over
//! the matrix entries rearranged so that qubit `q` owns base-4 digit `q`
//! (row bit and column bit interleaved). Cost is `O(n·4^n)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;

const HALF: f64 = 0.5;

/// Spreads the low 16 bits of `x` onto even bit positions.
#[inline]
fn spread_bits(mut x: usize) -> usize {
    x &= 0xFFFF;
    x = (x | (x << 8)) & 0x00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333;
    x = (x | (x << 1)) & 0x5555_5555;
    x
}

/// Position of matrix entry `(row, col)` in the digit-per-qubit layout.
#[inline]
fn interleave(row: usize, col: usize) -> usize {
    (spread_bits(row) << 1) | spread_bits(col)
}

/// `n` from a spectrum length `4^n`.
pub fn qubits_from_len(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() || !len.trailing_zeros().is_multiple_of(2) {
        return Err(Error::Shape(format!(
            "coefficient vector length {len} is not a power of 4"
        )));
    }
    Ok(len.trailing_zeros() as usize / 2)
}

/// Pauli coefficients `Â_s = τ(σ_s A)` of a `2^n × 2^n` matrix.
pub fn forward(matrix: &CMatrix) -> Vec<Complex64> {
    let dim = matrix.dim();
    let mut buf = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            buf[interleave(r, c)] = matrix[(r, c)];
        }
    }
    let mut stride = 1;
    while stride < buf.len() {
        for block in (0..buf.len()).step_by(4 * stride) {
            for i in block..block + stride {
                forward_butterfly(&mut buf, i, stride);
            }
        }
        stride *= 4;
    }
    buf
}

/// The matrix `Σ_s c_s σ_s` for a coefficient vector of length `4^n`.
pub fn inverse(coeffs: &[Complex64]) -> Result<CMatrix> {
    let n = qubits_from_len(coeffs.len())?;
    let mut buf = coeffs.to_vec();
    let mut stride = 1;
    while stride < buf.len() {
        for block in (0..buf.len()).step_by(4 * stride) {
            for i in block..block + stride {
                inverse_butterfly(&mut buf, i, stride);
            }
        }
        stride *= 4;
    }
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(r, c)] = buf[interleave(r, c)];
        }
    }
    Ok(out)
}

// Local slot order is 2*row_bit + col_bit: [m00, m01, m10, m11].
#[inline(always)]
fn forward_butterfly(buf: &mut [Complex64], i: usize, stride: usize) {
    let (i0, i1, i2, i3) = (i, i + stride, i + 2 * stride, i + 3 * stride);
    let (m00, m01, m10, m11) = (buf[i0], buf[i1], buf[i2], buf[i3]);
    let sum_off = m01 + m10;
    let dif_off = m01 - m10;
    buf[i0] = (m00 + m11) * HALF;
    buf[i1] = sum_off * HALF;
    buf[i2] = Complex64::new(-dif_off.im, dif_off.re) * HALF;
    buf[i3] = (m00 - m11) * HALF;
}

#[inline(always)]
fn inverse_butterfly(buf: &mut [Complex64], i: usize, stride: usize) {
    let (i0, i1, i2, i3) = (i, i + stride, i + 2 * stride, i + 3 * stride);
    let (c0, c1, c2, c3) = (buf[i0], buf[i1], buf[i2], buf[i3]);
    // i * c2
    let ic2 = Complex64::new(-c2.im, c2.re);
    buf[i0] = c0 + c3;
    buf[i1] = c1 - ic2;
    buf[i2] = c1 + ic2;
    buf[i3] = c0 - c3;
}
