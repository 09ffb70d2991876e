//! Observables on `n` qubits carried in dual form: dense matrix and Pauli
//! spectrum. Each representation is computed lazily, at most once.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::eigen::{self, EigenDecomposition, HERMITIAN_TOL};
use crate::error::{check_n, Error, Result};
use crate::matrix::CMatrix;
use crate::pauli::{self, PauliIndex};
use crate::transform;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Clone, Debug)]
pub struct QOperator {
    n: usize,
    hermitian: bool,
    matrix: OnceLock<CMatrix>,
    spectrum: OnceLock<Vec<Complex64>>,
    /// Eigenvalues (Hermitian) or singular values, descending.
    values: OnceLock<Vec<f64>>,
}

impl QOperator {
    /// Wraps a dense `2^n × 2^n` matrix. The Hermitian flag is detected.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let n = qubits_from_dim(matrix.dim())?;
        let scale = matrix.max_abs().max(1.0);
        let hermitian = matrix.hermitian_deviation() <= HERMITIAN_TOL * scale;
        Ok(Self::assemble(n, hermitian, Some(matrix), None))
    }

    /// Wraps a Pauli coefficient vector of length `4^n`. The Hermitian flag is
    /// detected from the imaginary parts.
    pub fn from_spectrum(coeffs: Vec<Complex64>) -> Result<Self> {
        let n = transform::qubits_from_len(coeffs.len())?;
        if n > crate::MAX_QUBITS {
            return Err(Error::Capacity {
                n,
                max: crate::MAX_QUBITS,
            });
        }
        let hermitian = coeffs.iter().all(|c| c.im.abs() <= HERMITIAN_TOL);
        Ok(Self::assemble(n, hermitian, None, Some(coeffs)))
    }

    /// Real coefficients give a Hermitian operator.
    pub fn from_real_spectrum(coeffs: &[f64]) -> Result<Self> {
        Self::from_spectrum(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Builds from `(index, coefficient)` pairs; omitted entries are zero.
    pub fn from_terms(n: usize, terms: &[(PauliIndex, Complex64)]) -> Result<Self> {
        check_n(n)?;
        let mut coeffs = vec![ZERO; 1 << (2 * n)];
        for (s, c) in terms {
            if s.n() != n {
                return Err(Error::Shape(format!(
                    "index {s} has {} qubits, expected {n}",
                    s.n()
                )));
            }
            coeffs[s.packed()] += c;
        }
        Self::from_spectrum(coeffs)
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self::pauli(PauliIndex::identity(n)?))
    }

    pub fn zero(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self::from_coefficients(n, vec![ZERO; 1 << (2 * n)], true))
    }

    /// `σ_s` as an operator carrying both representations.
    pub fn pauli(s: PauliIndex) -> Self {
        let matrix = pauli_matrix(s);
        let mut coeffs = vec![ZERO; 1 << (2 * s.n())];
        coeffs[s.packed()] = Complex64::new(1.0, 0.0);
        Self::assemble(s.n(), true, Some(matrix), Some(coeffs))
    }

    /// Internal constructor for spectra derived from an operator whose
    /// Hermitian flag is already known. Also admits the 0-qubit scalar case
    /// produced by tracing out every qubit.
    pub(crate) fn from_coefficients(n: usize, coeffs: Vec<Complex64>, hermitian: bool) -> Self {
        debug_assert_eq!(coeffs.len(), 1 << (2 * n));
        Self::assemble(n, hermitian, None, Some(coeffs))
    }

    pub(crate) fn from_matrix_unchecked(n: usize, matrix: CMatrix, hermitian: bool) -> Self {
        Self::assemble(n, hermitian, Some(matrix), None)
    }

    fn assemble(
        n: usize,
        hermitian: bool,
        matrix: Option<CMatrix>,
        spectrum: Option<Vec<Complex64>>,
    ) -> Self {
        let op = Self {
            n,
            hermitian,
            matrix: OnceLock::new(),
            spectrum: OnceLock::new(),
            values: OnceLock::new(),
        };
        if let Some(m) = matrix {
            let _ = op.matrix.set(m);
        }
        if let Some(s) = spectrum {
            let _ = op.spectrum.set(s);
        }
        op
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn matrix(&self) -> &CMatrix {
        self.matrix.get_or_init(|| {
            let coeffs = self.spectrum.get().expect("operator has no representation");
            transform::inverse(coeffs).expect("spectrum length is 4^n")
        })
    }

    /// Pauli coefficients `Â_s`, indexed by packed [`PauliIndex`].
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let m = self.matrix.get().expect("operator has no representation");
            let mut coeffs = transform::forward(m);
            if self.hermitian {
                for c in &mut coeffs {
                    c.im = 0.0;
                }
            }
            coeffs
        })
    }

    pub fn coefficient(&self, s: PauliIndex) -> Complex64 {
        self.spectrum()[s.packed()]
    }

    pub fn has_matrix(&self) -> bool {
        self.matrix.get().is_some()
    }

    pub fn has_spectrum(&self) -> bool {
        self.spectrum.get().is_some()
    }

    /// `τ(A) = 2^{-n} tr A`, read off the identity coefficient.
    pub fn normalized_trace(&self) -> Complex64 {
        match (self.spectrum.get(), self.matrix.get()) {
            (Some(s), _) => s[0],
            (None, Some(m)) => m.trace() / self.dim() as f64,
            (None, None) => unreachable!("operator has no representation"),
        }
    }

    /// `||A||_2^2 = τ(A*A) = Σ_s |Â_s|^2`.
    pub fn norm2_sq(&self) -> f64 {
        self.spectrum().iter().map(|c| c.norm_sqr()).sum()
    }

    /// Same quantity computed from matrix entries: `2^{-n} ||A||_F^2`.
    pub fn norm2_sq_matrix(&self) -> f64 {
        let f = self.matrix().frobenius_norm();
        f * f / self.dim() as f64
    }

    pub fn eigen(&self) -> Result<EigenDecomposition> {
        if !self.hermitian {
            return Err(Error::NotHermitian {
                deviation: self.matrix().hermitian_deviation(),
            });
        }
        eigen::hermitian_eigen(self.matrix())
    }

    /// Eigenvalues for Hermitian operators, singular values otherwise; both
    /// descending. Cached.
    pub fn spectral_values(&self) -> &[f64] {
        self.values.get_or_init(|| {
            if self.hermitian {
                eigen::hermitian_eigenvalues(self.matrix()).expect("flagged Hermitian")
            } else {
                let m = self.matrix();
                let gram = m.adjoint().matmul(m);
                let mut sv: Vec<f64> = eigen::hermitian_eigenvalues(&gram)
                    .expect("A*A is Hermitian")
                    .into_iter()
                    .map(|l| l.max(0.0).sqrt())
                    .collect();
                sv.sort_by(|a, b| b.total_cmp(a));
                sv
            }
        })
    }

    /// Moduli of the eigenvalues of `|A|`.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.spectral_values().iter().map(|l| l.abs()).collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Operator norm `||A||_∞`.
    pub fn operator_norm(&self) -> f64 {
        self.spectral_values().iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// Highest Fourier degree carrying a coefficient above `tol`.
    pub fn degree(&self, tol: f64) -> usize {
        self.spectrum()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(s, _)| pauli::degree(s))
            .max()
            .unwrap_or(0)
    }

    /// `||A^2 - I||_∞`, zero for quantum Boolean functions.
    pub fn boolean_deviation(&self) -> f64 {
        let m = self.matrix();
        m.matmul(m).sub(&CMatrix::identity(self.dim())).max_abs()
    }

    /// Applies a per-coefficient map; the Hermitian flag is kept when the map
    /// is real.
    pub(crate) fn map_spectrum(&self, f: impl Fn(usize, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .spectrum()
            .iter()
            .enumerate()
            .map(|(s, &c)| f(s, c))
            .collect();
        Self::from_coefficients(self.n, coeffs, self.hermitian)
    }

    /// Real per-degree damping `c_s ↦ w(|supp s|) c_s`.
    pub(crate) fn scale_by_degree(&self, weight: impl Fn(usize) -> f64) -> Self {
        let table: Vec<f64> = (0..=self.n).map(&weight).collect();
        self.map_spectrum(|s, c| c * table[pauli::degree(s)])
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .spectrum()
            .iter()
            .zip(other.spectrum())
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_coefficients(
            self.n,
            coeffs,
            self.hermitian && other.hermitian,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs = self
            .spectrum()
            .iter()
            .zip(other.spectrum())
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_coefficients(
            self.n,
            coeffs,
            self.hermitian && other.hermitian,
        ))
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map_spectrum(|_, c| c * factor)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let m = self.matrix().matmul(other.matrix());
        Ok(Self::from_matrix_unchecked(self.n, m, false))
    }

    pub fn adjoint(&self) -> Self {
        if self.hermitian {
            return self.clone();
        }
        let coeffs = self.spectrum().iter().map(|c| c.conj()).collect();
        Self::from_coefficients(self.n, coeffs, false)
    }

    /// Largest coefficient-wise difference `max_s |Â_s - B̂_s|`.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        self.spectrum()
            .iter()
            .zip(other.spectrum())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Shape(format!(
                "operators on {} and {} qubits",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                deviation: self.matrix().hermitian_deviation(),
            })
        }
    }
}

fn qubits_from_dim(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() {
        return Err(Error::Shape(format!("matrix dimension {dim} is not 2^n")));
    }
    let n = dim.trailing_zeros() as usize;
    check_n(n)?;
    Ok(n)
}

/// Dense `σ_s` built by the tensor rule.
pub fn pauli_matrix(s: PauliIndex) -> CMatrix {
    let n = s.n();
    let dim = 1usize << n;
    let factors: Vec<[Complex64; 4]> = (0..n).map(|q| pauli::single_qubit(s.symbol(q))).collect();
    let mut out = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            let mut acc = Complex64::new(1.0, 0.0);
            for (q, f) in factors.iter().enumerate() {
                let shift = n - 1 - q;
                let (rb, cb) = ((r >> shift) & 1, (c >> shift) & 1);
                acc *= f[2 * rb + cb];
                if acc == ZERO {
                    break;
                }
            }
            out[(r, c)] = acc;
        }
    }
    out
}

/// Operator form of [`pauli_matrix`], with the capacity check.
pub fn pauli_operator(symbols: &[u8]) -> Result<QOperator> {
    Ok(QOperator::pauli(PauliIndex::from_symbols(symbols)?))
}
