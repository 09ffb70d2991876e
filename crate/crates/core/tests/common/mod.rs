//! Shared oracles and seeded inputs for the integration tests.
#![allow(dead_code)]

use qcube::generators::random_hermitian;
use qcube::rng::Rng;
use qcube::{pauli_matrix, CMatrix, Complex64, PauliIndex, QOperator};

pub fn hermitian(n: usize, seed: u64) -> QOperator {
    random_hermitian(n, &mut Rng::new(seed))
}

/// Random Hermitian rescaled to operator norm 1.
pub fn contraction(n: usize, seed: u64) -> QOperator {
    let a = hermitian(n, seed);
    let norm = a.operator_norm();
    a.scale(1.0 / norm)
}

/// `τ(σ_s A)` for every `s`, one dense trace per index.
pub fn naive_coefficients(m: &CMatrix, n: usize) -> Vec<Complex64> {
    let dim = m.dim() as f64;
    (0..1usize << (2 * n))
        .map(|s| {
            let p = pauli_matrix(PauliIndex::new(n, s).unwrap());
            p.matmul(m).trace() / dim
        })
        .collect()
}

/// Dense `Σ_s c_s σ_s`.
pub fn naive_synthesis(coeffs: &[Complex64], n: usize) -> CMatrix {
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim);
    for (s, &c) in coeffs.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        out = out.add(&pauli_matrix(PauliIndex::new(n, s).unwrap()).scale(c));
    }
    out
}

/// `Σ_x f(x)|x⟩⟨x|` built directly as a diagonal matrix.
pub fn diagonal(table: &[i64]) -> CMatrix {
    let diag: Vec<Complex64> = table.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect();
    CMatrix::from_diagonal(&diag)
}

/// Walsh coefficients `f̂(S) = E_x f(x) χ_S(x)`, keyed by bit mask with the
/// most significant bit standing for qubit 0.
pub fn walsh(table: &[i64]) -> Vec<f64> {
    let size = table.len();
    (0..size)
        .map(|mask| {
            let sum: f64 = (0..size)
                .map(|x| {
                    let sign = if (x & mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    table[x] as f64 * sign
                })
                .sum();
            sum / size as f64
        })
        .collect()
}

/// All `±1` tables on `n` bits.
pub fn all_tables(n: usize) -> Vec<Vec<i64>> {
    let size = 1usize << n;
    (0..1u64 << size)
        .map(|code| {
            (0..size)
                .map(|x| if code >> x & 1 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect()
}

pub fn random_table(n: usize, rng: &mut Rng) -> Vec<i64> {
    (0..1usize << n)
        .map(|_| if rng.bernoulli(0.5) { -1 } else { 1 })
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
