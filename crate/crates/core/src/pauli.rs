//! Pauli multi-indices and qubit subsets.
//!
//! A Pauli index `s` on `n` qubits is a word over `{0,1,2,3}` naming the basis
//! element `σ_{s_0} ⊗ … ⊗ σ_{s_{n-1}}`. Qubit 0 is the leftmost tensor factor.
//! The packed encoding stores two bits per site with qubit 0 in the most
//! significant position, so the packed value is also the position of the
//! coefficient inside a length-`4^n` spectrum vector and the base-4 string of
//! the index reads left to right in qubit order.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{check_n, Error, Result};

/// A tensor-product Pauli basis label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliIndex {
    n: usize,
    packed: usize,
}

impl PauliIndex {
    pub fn new(n: usize, packed: usize) -> Result<Self> {
        check_n(n)?;
        if packed >= 1 << (2 * n) {
            return Err(Error::Shape(format!(
                "packed index {packed} out of range for n = {n}"
            )));
        }
        Ok(Self { n, packed })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn from_symbols(symbols: &[u8]) -> Result<Self> {
        check_n(symbols.len())?;
        let mut packed = 0usize;
        for &s in symbols {
            if s > 3 {
                return Err(Error::Parse(format!("Pauli symbol {s} not in 0..=3")));
            }
            packed = (packed << 2) | s as usize;
        }
        Ok(Self {
            n: symbols.len(),
            packed,
        })
    }

    /// The index with symbol `k` on `qubit` and identity elsewhere.
    pub fn single_site(n: usize, qubit: usize, k: u8) -> Result<Self> {
        check_n(n)?;
        if qubit >= n {
            return Err(Error::QubitOutOfRange { index: qubit, n });
        }
        let mut symbols = vec![0u8; n];
        symbols[qubit] = k;
        Self::from_symbols(&symbols)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn packed(&self) -> usize {
        self.packed
    }

    pub fn symbol(&self, qubit: usize) -> u8 {
        digit(self.packed, self.n, qubit)
    }

    pub fn symbols(&self) -> Vec<u8> {
        (0..self.n).map(|q| self.symbol(q)).collect()
    }

    pub fn support(&self) -> QubitSet {
        support_set(self.packed, self.n)
    }

    /// `|supp s|`, the Fourier degree of `σ_s`.
    pub fn degree(&self) -> usize {
        degree(self.packed)
    }
}

impl fmt::Display for PauliIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.symbol(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '0'..='3' => Ok(c as u8 - b'0'),
                _ => Err(Error::Parse(format!("invalid Pauli symbol `{c}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_symbols(&symbols)
    }
}

/// The base-4 digit of `packed` at `qubit`.
#[inline]
pub(crate) fn digit(packed: usize, n: usize, qubit: usize) -> u8 {
    ((packed >> (2 * (n - 1 - qubit))) & 3) as u8
}

/// One bit per site, located at the low bit of that site's 2-bit slot.
#[inline]
pub(crate) fn spread_support(packed: usize) -> usize {
    (packed | (packed >> 1)) & 0x5555_5555_5555_5555
}

#[inline]
pub(crate) fn degree(packed: usize) -> usize {
    spread_support(packed).count_ones() as usize
}

pub(crate) fn support_set(packed: usize, n: usize) -> QubitSet {
    let mut set = QubitSet::empty();
    for q in 0..n {
        if digit(packed, n, q) != 0 {
            set.insert(q);
        }
    }
    set
}

/// A subset of qubits `J ⊆ {0, …, n-1}`, stored as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitSet(u32);

impl QubitSet {
    pub const fn empty() -> Self {
        Self(0)
    }

    pub fn full(n: usize) -> Self {
        Self(((1u64 << n) - 1) as u32)
    }

    pub fn from_indices(indices: &[usize], n: usize) -> Result<Self> {
        let mut set = Self::empty();
        for &q in indices {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
            set.insert(q);
        }
        Ok(set)
    }

    pub fn from_mask(mask: u32) -> Self {
        Self(mask)
    }

    pub fn mask(&self) -> u32 {
        self.0
    }

    pub fn singleton(q: usize) -> Self {
        Self(1 << q)
    }

    pub fn insert(&mut self, q: usize) {
        self.0 |= 1 << q;
    }

    pub fn contains(&self, q: usize) -> bool {
        self.0 & (1 << q) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn union(&self, other: QubitSet) -> Self {
        Self(self.0 | other.0)
    }

    pub fn is_subset(&self, other: QubitSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn complement(&self, n: usize) -> Self {
        Self(!self.0 & Self::full(n).0)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..32).filter(move |&q| self.contains(q))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// The set in the spread layout used by [`spread_support`].
    pub(crate) fn spread(&self, n: usize) -> usize {
        self.iter().fold(0usize, |acc, q| acc | 1 << (2 * (n - 1 - q)))
    }

    /// Every subset of `{0..n}` with exactly `k` elements, in increasing mask order.
    pub fn all_of_size(n: usize, k: usize) -> Vec<QubitSet> {
        (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(QubitSet)
            .collect()
    }
}

/// Serialized as the ascending list of members.
impl serde::Serialize for QubitSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl FromIterator<usize> for QubitSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = Self::empty();
        for q in iter {
            set.insert(q);
        }
        set
    }
}

/// The 2×2 single-qubit Pauli matrix `σ_k`, row-major.
pub fn single_qubit(k: u8) -> [Complex64; 4] {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match k {
        0 => [one, z, z, one],
        1 => [z, one, one, z],
        2 => [z, -i, i, z],
        3 => [one, z, z, -one],
        _ => panic!("Pauli symbol {k} not in 0..=3"),
    }
}
