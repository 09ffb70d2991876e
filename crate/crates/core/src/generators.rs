//! Seeded operator families, classical embeddings and random subsets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_n, Error, Result};
use crate::fkn::sign_round;
use crate::matrix::CMatrix;
use crate::operator::QOperator;
use crate::pauli::{self, PauliIndex, QubitSet};
use crate::rng::{derive_seed, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Dictator,
    PauliString,
    EmbeddedClassical,
    RandomHermitianUnitary,
    RandomLowDegree,
    RandomProjectorBoolean,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Dictator,
        Kind::PauliString,
        Kind::EmbeddedClassical,
        Kind::RandomHermitianUnitary,
        Kind::RandomLowDegree,
        Kind::RandomProjectorBoolean,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Kind::Dictator => "dictator",
            Kind::PauliString => "pauli-string",
            Kind::EmbeddedClassical => "embedded-classical",
            Kind::RandomHermitianUnitary => "random-hermitian-unitary",
            Kind::RandomLowDegree => "random-low-degree",
            Kind::RandomProjectorBoolean => "random-projector-boolean",
        }
    }

    /// Whether generated operators are Hermitian unitaries.
    pub fn is_boolean(&self) -> bool {
        !matches!(self, Kind::RandomLowDegree)
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family kind `{s}`")))
    }
}

/// Kind-specific parameters. Absent fields fall back to seeded choices.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extra {
    /// `±1` truth table of length `2^n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<i64>>,
    /// Truth table as a bit string, `0 ↦ +1`, `1 ↦ −1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_bits: Option<String>,
    /// Degree cap for `random-low-degree`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    /// Base-4 Pauli word for `pauli-string`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    /// Projector rank for `random-projector-boolean`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// Fraction of truth-table points flipped in a dictator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corruption: Option<f64>,
    /// Qubit carrying the dictator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubit: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: Kind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub extra: Extra,
    /// Sweeps range over `n..=n_max` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    /// Members per qubit count in a sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
}

impl FamilySpec {
    pub fn new(kind: Kind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            seed,
            extra: Extra::default(),
            n_max: None,
            count: None,
        }
    }

    /// Sweep members in enumeration order: qubit counts ascending, then
    /// member index. Each member gets a seed derived from `(seed, n, i)`.
    pub fn members(&self, count: usize) -> Vec<FamilySpec> {
        let hi = self.n_max.unwrap_or(self.n).max(self.n);
        (self.n..=hi)
            .flat_map(|n| {
                (0..count).map(move |i| FamilySpec {
                    n,
                    seed: derive_seed(self.seed, n as u64, i as u64),
                    n_max: None,
                    count: None,
                    ..self.clone()
                })
            })
            .collect()
    }
}

/// Builds the operator named by a spec. Same spec, same bits.
pub fn generate(spec: &FamilySpec) -> Result<QOperator> {
    let n = spec.n;
    check_n(n)?;
    let mut rng = Rng::new(spec.seed);
    match spec.kind {
        Kind::Dictator => dictator(spec, &mut rng),
        Kind::PauliString => {
            let s = match &spec.extra.word {
                Some(w) => {
                    let s: PauliIndex = w.parse()?;
                    if s.n() != n {
                        return Err(Error::Shape(format!(
                            "word `{w}` has length {}, expected n = {n}",
                            s.n()
                        )));
                    }
                    s
                }
                None => PauliIndex::new(n, 1 + rng.below((1u64 << (2 * n)) - 1) as usize)?,
            };
            Ok(QOperator::pauli(s))
        }
        Kind::EmbeddedClassical => {
            let table = match resolve_table(&spec.extra)? {
                Some(t) => t,
                None => (0..1usize << n)
                    .map(|_| if rng.bernoulli(0.5) { -1 } else { 1 })
                    .collect(),
            };
            if table.len() != 1 << n {
                return Err(Error::TruthTable(format!(
                    "length {} does not match n = {n}",
                    table.len()
                )));
            }
            classical_embed(&table)
        }
        Kind::RandomHermitianUnitary => sign_round(&random_hermitian(n, &mut rng)),
        Kind::RandomLowDegree => {
            let cap = spec.extra.degree.unwrap_or(2.min(n)).min(n);
            random_low_degree(n, cap, &mut rng)
        }
        Kind::RandomProjectorBoolean => {
            let dim = 1usize << n;
            let rank = match spec.extra.rank {
                Some(r) if r <= dim => r,
                Some(r) => {
                    return Err(Error::Domain(format!("rank {r} exceeds dimension {dim}")))
                }
                None => 1 + rng.below((dim - 1).max(1) as u64) as usize,
            };
            Ok(projector_boolean(n, rank, &mut rng))
        }
    }
}

fn resolve_table(extra: &Extra) -> Result<Option<Vec<i64>>> {
    match (&extra.table, &extra.table_bits) {
        (Some(t), _) => Ok(Some(t.clone())),
        (None, Some(bits)) => bits
            .chars()
            .map(|c| match c {
                '0' => Ok(1),
                '1' => Ok(-1),
                _ => Err(Error::TruthTable(format!("bit `{c}` in table_bits"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Some),
        (None, None) => Ok(None),
    }
}

fn dictator(spec: &FamilySpec, rng: &mut Rng) -> Result<QOperator> {
    let n = spec.n;
    let qubit = spec.extra.qubit.unwrap_or(0);
    let s = PauliIndex::single_site(n, qubit, 3)?;
    let fraction = spec.extra.corruption.unwrap_or(0.0);
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Domain(format!("corruption {fraction} outside [0, 1]")));
    }
    if fraction == 0.0 {
        return Ok(QOperator::pauli(s));
    }
    let size = 1usize << n;
    let flips = (fraction * size as f64).floor() as usize;
    let mut table: Vec<i64> = (0..size)
        .map(|x| if x >> (n - 1 - qubit) & 1 == 0 { 1 } else { -1 })
        .collect();
    for &x in rng.permutation(size).iter().take(flips) {
        table[x] = -table[x];
    }
    classical_embed(&table)
}

/// `Σ_x f(x) |x⟩⟨x|`. The most significant bit of `x` is qubit 0 and bit
/// value 0 stands for input `+1`.
pub fn classical_embed(table: &[i64]) -> Result<QOperator> {
    let n = table_qubits(table)?;
    let diag: Vec<Complex64> = table.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect();
    let m = CMatrix::from_diagonal(&diag);
    Ok(QOperator::from_matrix_unchecked(n, m, true))
}

fn table_qubits(table: &[i64]) -> Result<usize> {
    let len = table.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::TruthTable(format!("length {len} is not 2^n with n ≥ 1")));
    }
    if let Some(v) = table.iter().find(|v| v.abs() != 1) {
        return Err(Error::TruthTable(format!("entry {v} is not ±1")));
    }
    let n = len.trailing_zeros() as usize;
    check_n(n)?;
    Ok(n)
}

/// `Pr_x[f(x) ≠ f(x ⊕ e_j)]`.
pub fn classical_influence(table: &[i64], j: usize) -> Result<f64> {
    let n = table_qubits(table)?;
    if j >= n {
        return Err(Error::QubitOutOfRange { index: j, n });
    }
    let bit = 1usize << (n - 1 - j);
    let flips = (0..table.len())
        .filter(|&x| table[x] != table[x ^ bit])
        .count();
    Ok(flips as f64 / table.len() as f64)
}

/// `(G + G*)/2` with i.i.d. standard complex Gaussian entries.
pub fn random_hermitian(n: usize, rng: &mut Rng) -> QOperator {
    let dim = 1usize << n;
    let mut g = CMatrix::zeros(dim);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = Complex64::new(rng.normal(), rng.normal()) * scale;
        }
    }
    let mut h = CMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            h[(i, j)] = (g[(i, j)] + g[(j, i)].conj()) * 0.5;
        }
    }
    QOperator::from_matrix_unchecked(n, h, true)
}

/// Real Gaussian coefficients on every degree ≤ `cap`, scaled to unit
/// operator norm.
fn random_low_degree(n: usize, cap: usize, rng: &mut Rng) -> Result<QOperator> {
    let coeffs: Vec<Complex64> = (0..1usize << (2 * n))
        .map(|s| {
            if pauli::degree(s) <= cap {
                Complex64::new(rng.normal(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let raw = QOperator::from_coefficients(n, coeffs, true);
    let norm = raw.operator_norm();
    Ok(if norm > 0.0 { raw.scale(1.0 / norm) } else { raw })
}

/// `2P − I` for the projector onto the span of `rank` Gaussian vectors.
fn projector_boolean(n: usize, rank: usize, rng: &mut Rng) -> QOperator {
    let dim = 1usize << n;
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(rank);
    while basis.len() < rank {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.normal(), rng.normal()))
            .collect();
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for b in &basis {
                let dot: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= dot * bi;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut m = CMatrix::identity(dim).scale(Complex64::new(-1.0, 0.0));
    for b in &basis {
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] += b[i] * b[j].conj() * 2.0;
            }
        }
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
        m[(i, i)].im = 0.0;
    }
    QOperator::from_matrix_unchecked(n, m, true)
}

/// A draw of a δ-random subset of `{0, …, n−1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetSample {
    pub n: usize,
    pub delta: f64,
    pub members: QubitSet,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!("δ = {delta} outside [0, 1]")));
    }
    Ok(())
}

/// Independent Bernoulli(δ) membership, qubit 0 first.
pub fn sample_subset(rng: &mut Rng, n: usize, delta: f64) -> QubitSet {
    (0..n).filter(|_| rng.bernoulli(delta)).collect()
}

pub fn random_subset(n: usize, delta: f64, seed: u64) -> Result<SubsetSample> {
    check_n(n)?;
    check_delta(delta)?;
    let members = sample_subset(&mut Rng::new(seed), n, delta);
    Ok(SubsetSample { n, delta, members })
}

/// `Pr[|J ∩ supp v| = 1] = m δ (1−δ)^{m−1}` with `m = |supp v|`.
pub fn single_intersection_probability(delta: f64, v: PauliIndex) -> Result<f64> {
    check_delta(delta)?;
    let m = v.degree();
    if m == 0 {
        return Ok(0.0);
    }
    Ok(m as f64 * delta * (1.0 - delta).powi(m as i32 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli_operator;

    #[test]
    fn dictator_and_pauli_string() {
        let d = generate(&FamilySpec::new(Kind::Dictator, 2, 0)).unwrap();
        assert_eq!(d.spectrum(), pauli_operator(&[3, 0]).unwrap().spectrum());
        let mut spec = FamilySpec::new(Kind::PauliString, 2, 0);
        spec.extra.word = Some("11".into());
        let p = generate(&spec).unwrap();
        assert_eq!(p.spectrum(), pauli_operator(&[1, 1]).unwrap().spectrum());
        spec.extra.word = Some("1".into());
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn embedding_examples() {
        let x1 = classical_embed(&[1, 1, -1, -1]).unwrap();
        assert!(x1.max_coeff_diff(&pauli_operator(&[3, 0]).unwrap()) < 1e-15);
        let parity = classical_embed(&[1, -1, -1, 1]).unwrap();
        assert!(parity.max_coeff_diff(&pauli_operator(&[3, 3]).unwrap()) < 1e-15);
        assert!(classical_embed(&[1, 0]).is_err());
        assert!(classical_embed(&[1, 1, 1]).is_err());
    }

    #[test]
    fn table_bits_are_accepted() {
        let mut spec = FamilySpec::new(Kind::EmbeddedClassical, 2, 0);
        spec.extra.table_bits = Some("0110".into());
        let p = generate(&spec).unwrap();
        assert!(p.max_coeff_diff(&pauli_operator(&[3, 3]).unwrap()) < 1e-15);
        spec.extra.table_bits = Some("011".into());
        assert!(matches!(generate(&spec), Err(Error::TruthTable(_))));
    }

    #[test]
    fn classical_influence_examples() {
        let x1 = [1, 1, -1, -1];
        assert_eq!(classical_influence(&x1, 0).unwrap(), 1.0);
        assert_eq!(classical_influence(&x1, 1).unwrap(), 0.0);
        let parity = [1, -1, -1, 1];
        assert_eq!(classical_influence(&parity, 1).unwrap(), 1.0);
    }

    #[test]
    fn boolean_kinds_square_to_identity() {
        for kind in [
            Kind::RandomHermitianUnitary,
            Kind::RandomProjectorBoolean,
            Kind::EmbeddedClassical,
            Kind::PauliString,
        ] {
            for n in 1..=3 {
                let a = generate(&FamilySpec::new(kind, n, 7)).unwrap();
                assert!(a.is_hermitian());
                assert!(a.boolean_deviation() <= 1e-10, "{kind:?} n={n}");
            }
        }
    }

    #[test]
    fn low_degree_respects_cap_and_norm() {
        let mut spec = FamilySpec::new(Kind::RandomLowDegree, 4, 3);
        spec.extra.degree = Some(2);
        let a = generate(&spec).unwrap();
        assert!(a.degree(1e-15) <= 2);
        assert!((a.operator_norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn corruption_flips_the_requested_count() {
        let mut spec = FamilySpec::new(Kind::Dictator, 3, 1);
        spec.extra.corruption = Some(0.25);
        let a = generate(&spec).unwrap();
        let diag: Vec<f64> = (0..8).map(|i| a.matrix()[(i, i)].re).collect();
        let wrong = diag
            .iter()
            .enumerate()
            .filter(|(x, v)| (x >> 2 & 1 == 0) != (**v > 0.0))
            .count();
        assert_eq!(wrong, 2);
    }

    #[test]
    fn members_enumerate_n_then_index() {
        let mut spec = FamilySpec::new(Kind::Dictator, 2, 5);
        spec.n_max = Some(4);
        let m = spec.members(2);
        assert_eq!(m.iter().map(|s| s.n).collect::<Vec<_>>(), vec![2, 2, 3, 3, 4, 4]);
        assert_ne!(m[0].seed, m[1].seed);
    }

    #[test]
    fn subset_edges() {
        assert!(random_subset(5, 0.0, 1).unwrap().members.is_empty());
        assert_eq!(random_subset(5, 1.0, 1).unwrap().members, QubitSet::full(5));
        assert!(random_subset(5, 1.5, 1).is_err());
    }

    #[test]
    fn single_intersection_examples() {
        let v1 = PauliIndex::from_symbols(&[0, 2, 0]).unwrap();
        assert_eq!(single_intersection_probability(0.5, v1).unwrap(), 0.5);
        let v2 = PauliIndex::from_symbols(&[1, 2, 0]).unwrap();
        assert_eq!(single_intersection_probability(0.5, v2).unwrap(), 0.5);
        let v0 = PauliIndex::identity(3).unwrap();
        assert_eq!(single_intersection_probability(1.0, v0).unwrap(), 0.0);
    }

    #[test]
    fn kind_names_roundtrip() {
        for k in Kind::ALL {
            assert_eq!(k.name().parse::<Kind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.name()));
        }
    }
}
