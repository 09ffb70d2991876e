//! FKN decomposition and rounding to a 1-junta.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::influence::{conditional_expectation, single_site_index};
use crate::operator::QOperator;
use crate::pauli::{self, QubitSet};

/// Eigenvalues at or below this round to −1.
pub const SIGN_TOL: f64 = 1e-12;

/// Largest `||A^2 − I||_∞` accepted as Boolean.
pub const BOOLEAN_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectral sign with `sgn(x) = −1` for `x ≤ 0`.
pub fn sign_round(a: &QOperator) -> Result<QOperator> {
    let e = a.eigen()?;
    let m = e.apply(|l| if l > SIGN_TOL { 1.0 } else { -1.0 });
    Ok(QOperator::from_matrix_unchecked(a.n(), m, true))
}

/// `A − Â_0 I = ℓ + h`, split by degree.
#[derive(Clone, Debug)]
pub struct FknDecomposition {
    /// Degree-one part.
    pub linear: QOperator,
    /// Degree ≥ 2 part.
    pub high: QOperator,
    /// `||h||_2^2`.
    pub epsilon: f64,
}

pub fn fkn_decompose(a: &QOperator) -> FknDecomposition {
    let linear = a.map_spectrum(|s, c| if pauli::degree(s) == 1 { c } else { ZERO });
    let high = a.map_spectrum(|s, c| if pauli::degree(s) > 1 { c } else { ZERO });
    let epsilon = high.norm2_sq();
    FknDecomposition {
        linear,
        high,
        epsilon,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FknResult {
    pub epsilon: f64,
    pub chosen_j: usize,
    /// `Σ_k |Â_{k(j)}|^2` at the chosen qubit.
    pub level1_mass_at_j: f64,
    #[serde(serialize_with = "crate::io::serialize_pauli")]
    pub b_j: QOperator,
    #[serde(serialize_with = "crate::io::serialize_pauli")]
    pub c_j: QOperator,
    /// `||A − C_j||_2^2`.
    pub distance_sq: f64,
    /// `||A − B_j||_2^2`.
    pub b_distance_sq: f64,
    /// `||B_j^2 − I||_2^2`.
    pub b_square_defect: f64,
    /// `2 ||A − B_j||_2^2 + 2 ||B_j^2 − I||_2^2`.
    pub chain_bound: f64,
    /// `||E_{j^c}(A) − B_j||_2`.
    pub conditional_gap: f64,
    /// `|τ(ℓ^2) − ||ℓ||_2^2|` together with the largest coefficient of
    /// `ℓ^2` outside degrees 0 and 2.
    pub level1_square_defect: f64,
    /// `distance_sq / ε`, absent when `ε = 0`.
    pub ratio: Option<f64>,
}

/// Rounds a quantum Boolean function to the sign of its dominant level-1
/// block. The qubit maximizes the level-1 mass; ties go to the smallest.
pub fn fkn_round(a: &QOperator) -> Result<FknResult> {
    a.require_hermitian()?;
    let deviation = a.boolean_deviation();
    if deviation > BOOLEAN_TOL {
        return Err(Error::NotBoolean { deviation });
    }
    let n = a.n();
    let spectrum = a.spectrum();
    let mass = |j: usize| -> f64 {
        (1..=3u8)
            .map(|k| spectrum[single_site_index(n, j, k)].norm_sqr())
            .sum()
    };
    let mut chosen_j = 0;
    let mut best = mass(0);
    for j in 1..n {
        let m = mass(j);
        if m > best {
            best = m;
            chosen_j = j;
        }
    }

    let mut coeffs = vec![ZERO; spectrum.len()];
    for k in 1..=3u8 {
        let s = single_site_index(n, chosen_j, k);
        coeffs[s] = spectrum[s];
    }
    let b_j = QOperator::from_coefficients(n, coeffs, true);
    let c_j = sign_round(&b_j)?;
    let c_j = QOperator::from_coefficients(n, c_j.spectrum().to_vec(), true);

    let distance_sq = a.sub(&c_j)?.norm2_sq();
    let b_distance_sq = a.sub(&b_j)?.norm2_sq();
    let b_sq = b_j.mul(&b_j)?;
    let b_square_defect = b_sq.sub(&QOperator::identity(n)?)?.norm2_sq();
    let others = QubitSet::singleton(chosen_j).complement(n);
    let conditional_gap = conditional_expectation(a, others)?
        .sub(&b_j)?
        .norm2_sq()
        .sqrt();

    let decomposition = fkn_decompose(a);
    let epsilon = decomposition.epsilon;
    let level1_square_defect = square_defect(&decomposition.linear);

    Ok(FknResult {
        epsilon,
        chosen_j,
        level1_mass_at_j: best,
        b_j,
        c_j,
        distance_sq,
        b_distance_sq,
        b_square_defect,
        chain_bound: 2.0 * b_distance_sq + 2.0 * b_square_defect,
        conditional_gap,
        level1_square_defect,
        ratio: (epsilon > 0.0).then(|| distance_sq / epsilon),
    })
}

/// Products of distinct single-site Paulis on one qubit anticommute, so `ℓ^2`
/// is `||ℓ||_2^2 I` plus degree-two terms.
fn square_defect(linear: &QOperator) -> f64 {
    let sq = linear.mul(linear).expect("same size");
    let spectrum = sq.spectrum();
    let trace_gap = (spectrum[0] - linear.norm2_sq()).norm();
    let stray = spectrum
        .iter()
        .enumerate()
        .filter(|(s, _)| !matches!(pauli::degree(*s), 0 | 2))
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    trace_gap.max(stray)
}
