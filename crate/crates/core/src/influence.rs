//! Derivatives, conditional expectations, partial traces and influences.
//!
//! Qubit sets are 0-based. Operators produced on a complement `J^c` are
//! re-indexed onto `|J^c|` qubits in ascending order of the original sites;
//! [`PartialTrace::sites`] records that map.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::norms::schatten_power;
use crate::operator::QOperator;
use crate::pauli::{self, PauliIndex, QubitSet};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenvalues in `[-CLAMP_TOL, 0)` are treated as zero.
pub const CLAMP_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfluenceProfile {
    pub n: usize,
    pub p: f64,
    pub per_coordinate: Vec<f64>,
    pub total: f64,
    pub variance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSpectrum {
    pub n: usize,
    /// `W_{=d}` for `d = 0..=n`.
    pub by_degree: Vec<f64>,
}

impl WeightSpectrum {
    pub fn w_eq(&self, d: usize) -> f64 {
        self.by_degree.get(d).copied().unwrap_or(0.0)
    }

    /// `W_{≥d}`.
    pub fn w_geq(&self, d: usize) -> f64 {
        self.by_degree.iter().skip(d).sum()
    }

    /// `W_{≈d} = Σ_{d ≤ j < 2d} W_{=j}`.
    pub fn w_approx(&self, d: usize) -> f64 {
        (d..2 * d).map(|j| self.w_eq(j)).sum()
    }

    pub fn total(&self) -> f64 {
        self.by_degree.iter().sum()
    }
}

/// An operator on the complement of a traced-out set.
#[derive(Clone, Debug)]
pub struct PartialTrace {
    pub operator: QOperator,
    /// Original site of each remaining qubit, ascending.
    pub sites: Vec<usize>,
}

fn check_qubit(a: &QOperator, j: usize) -> Result<()> {
    if j >= a.n() {
        return Err(Error::QubitOutOfRange { index: j, n: a.n() });
    }
    Ok(())
}

fn check_set(a: &QOperator, set: QubitSet) -> Result<()> {
    if !set.is_subset(QubitSet::full(a.n())) {
        let index = set.iter().find(|&q| q >= a.n()).unwrap_or(0);
        return Err(Error::QubitOutOfRange { index, n: a.n() });
    }
    Ok(())
}

/// Keeps the coefficients for which `keep(spread support)` holds.
fn filter(a: &QOperator, keep: impl Fn(usize) -> bool) -> QOperator {
    a.map_spectrum(|s, c| if keep(pauli::spread_support(s)) { c } else { ZERO })
}

/// `d_j A`: removes every term with `s_j = 0`.
pub fn derivative(a: &QOperator, j: usize) -> Result<QOperator> {
    check_qubit(a, j)?;
    let bit = QubitSet::singleton(j).spread(a.n());
    Ok(filter(a, |supp| supp & bit != 0))
}

/// `d_J A`: keeps the terms with `J ⊆ supp s`.
pub fn derivative_set(a: &QOperator, set: QubitSet) -> Result<QOperator> {
    check_set(a, set)?;
    let bits = set.spread(a.n());
    Ok(filter(a, |supp| supp & bits == bits))
}

/// `E_J A = τ_J(A) ⊗ 1_J`: keeps the terms with `supp s ∩ J = ∅`.
pub fn conditional_expectation(a: &QOperator, set: QubitSet) -> Result<QOperator> {
    check_set(a, set)?;
    let bits = set.spread(a.n());
    Ok(filter(a, |supp| supp & bits == 0))
}

/// Spreads a packed index over `kept` sites of an `n`-qubit word.
fn expand(packed: usize, kept: &[usize], n: usize) -> usize {
    let m = kept.len();
    kept.iter().enumerate().fold(0, |acc, (i, &q)| {
        let d = (packed >> (2 * (m - 1 - i))) & 3;
        acc | d << (2 * (n - 1 - q))
    })
}

/// Coefficients of `A` on the `s` with `s_J = pattern` (packed over `J`),
/// re-indexed onto `J^c`.
fn slice(a: &QOperator, set: QubitSet, pattern: usize) -> PartialTrace {
    let n = a.n();
    let traced = set.to_vec();
    let sites = set.complement(n).to_vec();
    let m = sites.len();
    let base = expand(pattern, &traced, n);
    let coeffs: Vec<Complex64> = (0..1usize << (2 * m))
        .map(|t| a.spectrum()[base | expand(t, &sites, n)])
        .collect();
    PartialTrace {
        operator: QOperator::from_coefficients(m, coeffs, a.is_hermitian()),
        sites,
    }
}

/// Normalized partial trace `τ_J`, returning an operator on `J^c`.
pub fn partial_trace(a: &QOperator, set: QubitSet) -> Result<PartialTrace> {
    check_set(a, set)?;
    Ok(slice(a, set, 0))
}

/// `X ⊗ 1_J`: places an operator on `J^c` back into `n` qubits.
pub fn embed(b: &QOperator, set: QubitSet, n: usize) -> Result<QOperator> {
    let sites = set.complement(n).to_vec();
    if sites.len() != b.n() {
        return Err(Error::Shape(format!(
            "operator on {} qubits does not fit the {} sites outside J",
            b.n(),
            sites.len()
        )));
    }
    let mut coeffs = vec![ZERO; 1 << (2 * n)];
    for (t, &c) in b.spectrum().iter().enumerate() {
        coeffs[expand(t, &sites, n)] = c;
    }
    Ok(QOperator::from_coefficients(n, coeffs, b.is_hermitian()))
}

/// Matrix-path partial trace: `(τ_J M)_{rc} = 2^{-|J|} Σ_x M_{(r,x),(c,x)}`.
pub fn partial_trace_matrix(m: &CMatrix, n: usize, set: QubitSet) -> CMatrix {
    let traced = set.to_vec();
    let kept = set.complement(n).to_vec();
    let row_bits = |q: usize| 1usize << (n - 1 - q);
    let place = |bits: usize, sites: &[usize]| {
        let k = sites.len();
        sites
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> (k - 1 - i) & 1 == 1)
            .fold(0usize, |acc, (_, &q)| acc | row_bits(q))
    };
    let dim = 1usize << kept.len();
    let scale = 1.0 / (1usize << traced.len()) as f64;
    let mut out = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            let (rr, cc) = (place(r, &kept), place(c, &kept));
            let mut acc = ZERO;
            for x in 0..1usize << traced.len() {
                let xx = place(x, &traced);
                acc += m[(rr | xx, cc | xx)];
            }
            out[(r, c)] = acc * scale;
        }
    }
    out
}

/// `Inf_j^p[A] = ||d_j A||_p^p`. `p = 2` reads the coefficients; any other
/// exponent goes through the spectrum of `d_j A`.
pub fn influence(a: &QOperator, j: usize, p: f64) -> Result<f64> {
    let dj = derivative(a, j)?;
    schatten_power(&dj, p)
}

/// `Inf_j[A]` from the coefficients: `Σ_{s_j ≠ 0} |Â_s|^2`.
pub fn influence_l2(a: &QOperator, j: usize) -> Result<f64> {
    check_qubit(a, j)?;
    let bit = QubitSet::singleton(j).spread(a.n());
    Ok(a.spectrum()
        .iter()
        .enumerate()
        .filter(|(s, _)| pauli::spread_support(*s) & bit != 0)
        .map(|(_, c)| c.norm_sqr())
        .sum())
}

/// `Inf_J^p[A] = ||d_J A||_p^p`.
pub fn set_influence(a: &QOperator, set: QubitSet, p: f64) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::Domain("set influence over the empty set".into()));
    }
    let dj = derivative_set(a, set)?;
    schatten_power(&dj, p)
}

/// Per-coordinate and total `L^p` influences plus the variance.
pub fn influence_profile(a: &QOperator, p: f64) -> Result<InfluenceProfile> {
    let per_coordinate = (0..a.n())
        .into_par_iter()
        .map(|j| influence(a, j, p))
        .collect::<Result<Vec<f64>>>()?;
    let total = per_coordinate.iter().sum();
    Ok(InfluenceProfile {
        n: a.n(),
        p,
        per_coordinate,
        total,
        variance: variance(a),
    })
}

/// `Inf^p[A] = Σ_j Inf_j^p[A]`.
pub fn total_influence(a: &QOperator, p: f64) -> Result<f64> {
    influence_profile(a, p).map(|prof| prof.total)
}

/// `Σ_s |supp s| · |Â_s|^2`, the `L^2` total influence read off the spectrum.
pub fn total_influence_l2(a: &QOperator) -> f64 {
    a.spectrum()
        .iter()
        .enumerate()
        .map(|(s, c)| pauli::degree(s) as f64 * c.norm_sqr())
        .sum()
}

/// `Var[A] = Σ_{s ≠ 0} |Â_s|^2`.
pub fn variance(a: &QOperator) -> f64 {
    a.spectrum().iter().skip(1).map(|c| c.norm_sqr()).sum()
}

pub fn fourier_weights(a: &QOperator) -> WeightSpectrum {
    let mut by_degree = vec![0.0; a.n() + 1];
    for (s, c) in a.spectrum().iter().enumerate() {
        by_degree[pauli::degree(s)] += c.norm_sqr();
    }
    WeightSpectrum { n: a.n(), by_degree }
}

/// `Ent[ρ] = τ(ρ log ρ) − τ(ρ) log τ(ρ)` for a positive semidefinite `ρ`.
pub fn entropy(rho: &QOperator) -> Result<f64> {
    rho.require_hermitian()?;
    entropy_of_values(rho.spectral_values())
}

/// `Ent[|A|^2]`, computed from the singular values of `A`.
pub fn entropy_abs_sq(a: &QOperator) -> Result<f64> {
    let sq: Vec<f64> = a.singular_values().iter().map(|s| s * s).collect();
    entropy_of_values(&sq)
}

fn entropy_of_values(values: &[f64]) -> Result<f64> {
    let mut plogp = 0.0;
    let mut mass = 0.0;
    for &l in values {
        if l < -CLAMP_TOL {
            return Err(Error::Domain(format!(
                "entropy of an operator with eigenvalue {l}"
            )));
        }
        let l = l.max(0.0);
        if l > 0.0 {
            plogp += l * l.ln();
        }
        mass += l;
    }
    let dim = values.len() as f64;
    let (plogp, mass) = (plogp / dim, mass / dim);
    let correction = if mass > 0.0 { mass * mass.ln() } else { 0.0 };
    Ok(plogp - correction)
}

/// `g_{j,k} = τ_J(A σ_{k(j)})`, an operator on `J^c`.
pub fn restriction_coefficient(
    a: &QOperator,
    set: QubitSet,
    j: usize,
    k: u8,
) -> Result<PartialTrace> {
    check_set(a, set)?;
    check_restriction(set, j, k)?;
    let traced = set.to_vec();
    let pos = traced.iter().position(|&q| q == j).expect("j in J");
    let pattern = (k as usize) << (2 * (traced.len() - 1 - pos));
    Ok(slice(a, set, pattern))
}

/// `τ_J(d_j(A) σ_{k(j)})` evaluated on dense matrices.
pub fn restriction_coefficient_via_trace(
    a: &QOperator,
    set: QubitSet,
    j: usize,
    k: u8,
) -> Result<QOperator> {
    check_set(a, set)?;
    check_restriction(set, j, k)?;
    let dj = derivative(a, j)?;
    let sigma = PauliIndex::single_site(a.n(), j, k)?;
    let prod = dj.matrix().matmul(&crate::operator::pauli_matrix(sigma));
    let m = partial_trace_matrix(&prod, a.n(), set);
    matrix_on_complement(m, set.complement(a.n()).len(), a.is_hermitian())
}

fn check_restriction(set: QubitSet, j: usize, k: u8) -> Result<()> {
    if !set.contains(j) {
        return Err(Error::Domain(format!("coordinate {j} is not in J")));
    }
    if !(1..=3).contains(&k) {
        return Err(Error::Domain(format!("direction {k} not in 1..=3")));
    }
    Ok(())
}

fn matrix_on_complement(m: CMatrix, sites: usize, hermitian: bool) -> Result<QOperator> {
    if sites == 0 {
        let c = m[(0, 0)];
        return Ok(QOperator::from_coefficients(0, vec![c], hermitian));
    }
    let op = QOperator::from_matrix(m)?;
    // Touch the spectrum so comparisons see the same representation.
    op.spectrum();
    Ok(op)
}

fn check_gamma(set: QubitSet, gamma: &[u8]) -> Result<()> {
    if gamma.len() != set.len() {
        return Err(Error::Shape(format!(
            "direction word has length {}, J has {} elements",
            gamma.len(),
            set.len()
        )));
    }
    if gamma.iter().any(|g| !(1..=3).contains(g)) {
        return Err(Error::Domain("direction word must lie in {1,2,3}".into()));
    }
    Ok(())
}

/// `∂_J^γ A = Σ_{s_J = γ} Â_s σ_{s_{J^c}}`; `γ[i]` belongs to the `i`-th
/// smallest element of `J`.
pub fn directional_block(a: &QOperator, set: QubitSet, gamma: &[u8]) -> Result<PartialTrace> {
    check_set(a, set)?;
    check_gamma(set, gamma)?;
    let pattern = gamma.iter().fold(0usize, |acc, &g| (acc << 2) | g as usize);
    Ok(slice(a, set, pattern))
}

/// `τ_J(d_J(A) (1_{J^c} ⊗ σ_γ))` evaluated on dense matrices.
pub fn directional_block_via_trace(
    a: &QOperator,
    set: QubitSet,
    gamma: &[u8],
) -> Result<QOperator> {
    check_set(a, set)?;
    check_gamma(set, gamma)?;
    let n = a.n();
    let mut symbols = vec![0u8; n];
    for (q, &g) in set.iter().zip(gamma) {
        symbols[q] = g;
    }
    let sigma = crate::operator::pauli_matrix(PauliIndex::from_symbols(&symbols)?);
    let dj = derivative_set(a, set)?;
    let m = partial_trace_matrix(&dj.matrix().matmul(&sigma), n, set);
    matrix_on_complement(m, n - set.len(), a.is_hermitian())
}

/// `W_J(A) = Σ_{|supp v ∩ J| = 1} |Â_v|^2`.
pub fn single_intersection_weight(a: &QOperator, set: QubitSet) -> Result<f64> {
    check_set(a, set)?;
    let bits = set.spread(a.n());
    Ok(a.spectrum()
        .iter()
        .enumerate()
        .filter(|(s, _)| (pauli::spread_support(*s) & bits).count_ones() == 1)
        .map(|(_, c)| c.norm_sqr())
        .sum())
}

/// Index of the spectrum entry for the qubit-`j` single-site term `σ_k`.
pub(crate) fn single_site_index(n: usize, j: usize, k: u8) -> usize {
    (k as usize) << (2 * (n - 1 - j))
}
