//! Operator files.
//!
//! `{"n": 2, "format": "pauli", "entries": {"30": [1.0, 0.0]}}` maps base-4
//! words (qubit 0 leftmost) to `[re, im]`; `"format": "matrix"` holds
//! row-major rows of `[re, im]`. Omitted Pauli entries are zero. A flat list
//! of `4^n` pairs is also accepted for the matrix format.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{check_n, Error, Result};
use crate::matrix::CMatrix;
use crate::operator::QOperator;
use crate::pauli::PauliIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Pauli,
    Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entries {
    Pauli(BTreeMap<String, [f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
    Flat(Vec<[f64; 2]>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorFile {
    pub n: usize,
    pub format: Format,
    pub entries: Entries,
}

fn pair(c: Complex64) -> [f64; 2] {
    [c.re, c.im]
}

impl OperatorFile {
    pub fn from_operator(op: &QOperator, format: Format) -> Self {
        let n = op.n();
        let entries = match format {
            Format::Pauli => Entries::Pauli(
                op.spectrum()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
                    .map(|(s, &c)| {
                        let label = PauliIndex::new(n, s).map(|p| p.to_string());
                        (label.unwrap_or_default(), pair(c))
                    })
                    .collect(),
            ),
            Format::Matrix => {
                let m = op.matrix();
                Entries::Rows(
                    (0..m.dim())
                        .map(|r| (0..m.dim()).map(|c| pair(m[(r, c)])).collect())
                        .collect(),
                )
            }
        };
        Self { n, format, entries }
    }

    pub fn to_operator(&self) -> Result<QOperator> {
        let n = self.n;
        check_n(n)?;
        let dim = 1usize << n;
        let complex = |p: &[f64; 2]| Complex64::new(p[0], p[1]);
        match (&self.format, &self.entries) {
            (Format::Pauli, Entries::Pauli(map)) => {
                let mut coeffs = vec![Complex64::new(0.0, 0.0); 1 << (2 * n)];
                for (label, value) in map {
                    let s: PauliIndex = label.parse()?;
                    if s.n() != n {
                        return Err(Error::Parse(format!(
                            "Pauli word `{label}` has length {}, expected {n}",
                            s.n()
                        )));
                    }
                    coeffs[s.packed()] = complex(value);
                }
                QOperator::from_spectrum(coeffs)
            }
            (Format::Matrix, Entries::Rows(rows)) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::Parse(format!("matrix must be {dim} x {dim}")));
                }
                let data = rows.iter().flatten().map(complex).collect();
                let m = CMatrix::from_row_major(data).expect("square by construction");
                QOperator::from_matrix(m)
            }
            (Format::Matrix, Entries::Flat(flat)) => {
                if flat.len() != dim * dim {
                    return Err(Error::Parse(format!(
                        "matrix needs {} entries, found {}",
                        dim * dim,
                        flat.len()
                    )));
                }
                let m = CMatrix::from_row_major(flat.iter().map(complex).collect())
                    .expect("square by construction");
                QOperator::from_matrix(m)
            }
            (Format::Pauli, Entries::Rows(v)) if v.is_empty() => QOperator::zero(n),
            (format, _) => Err(Error::Parse(format!(
                "entries do not match format {format:?}"
            ))),
        }
    }
}

pub fn to_json(op: &QOperator, format: Format) -> String {
    serde_json::to_string_pretty(&OperatorFile::from_operator(op, format))
        .expect("operator files always serialize")
}

pub fn from_json(text: &str) -> Result<QOperator> {
    let file: OperatorFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_operator()
}

/// `serialize_with` helper writing an operator in Pauli format.
pub fn serialize_pauli<S: Serializer>(op: &QOperator, s: S) -> std::result::Result<S::Ok, S::Error> {
    OperatorFile::from_operator(op, Format::Pauli).serialize(s)
}
