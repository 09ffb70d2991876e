//! The depolarizing semigroup, noise stability and soft chunks.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::influence::{self, directional_block, fourier_weights};
use crate::operator::QOperator;
use crate::pauli::QubitSet;

/// Variance or influence at or below this is treated as zero.
pub const DEGENERATE_TOL: f64 = 1e-14;

/// Largest `n` for which the weight integral is enumerated.
pub const WEIGHT_INTEGRAL_MAX_N: usize = 6;

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!("noise rate {delta} outside [0, 1]")));
    }
    Ok(())
}

/// `T_δ A = Σ δ^{|supp s|} Â_s σ_s`, with `0^0 = 1`.
pub fn noise_operator(a: &QOperator, delta: f64) -> Result<QOperator> {
    check_delta(delta)?;
    Ok(a.scale_by_degree(|d| delta.powi(d as i32)))
}

/// `P_t A = Σ e^{-t|supp s|} Â_s σ_s`.
pub fn semigroup(a: &QOperator, t: f64) -> Result<QOperator> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::Domain(format!("semigroup time {t} < 0")));
    }
    Ok(a.scale_by_degree(|d| (-t * d as f64).exp()))
}

/// `S_δ[A] = Σ_{s≠0} δ^{|supp s|} |Â_s|^2`.
pub fn noise_stability(a: &QOperator, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let table: Vec<f64> = (0..=a.n()).map(|d| delta.powi(d as i32)).collect();
    Ok(a.spectrum()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(s, c)| table[crate::pauli::degree(s)] * c.norm_sqr())
        .sum())
}

/// `τ(A* T_δ A) − |Â_0|^2` on dense matrices.
pub fn noise_stability_matrix(a: &QOperator, delta: f64) -> Result<f64> {
    let t = noise_operator(a, delta)?;
    let prod = a.matrix().adjoint().matmul(t.matrix());
    let tau = prod.trace().re / a.dim() as f64;
    Ok(tau - a.normalized_trace().norm_sqr())
}

fn check_dyadic(d: usize) -> Result<()> {
    if d == 0 || !d.is_power_of_two() {
        return Err(Error::Domain(format!("chunk degree {d} is not a power of two")));
    }
    Ok(())
}

/// `(1 − 1/(3d))^m − (1 − 1/(2d))^m`, the soft-chunk multiplier at degree `m`.
pub fn chunk_multiplier(d: usize, m: usize) -> f64 {
    let d = d as f64;
    (1.0 - 1.0 / (3.0 * d)).powi(m as i32) - (1.0 - 1.0 / (2.0 * d)).powi(m as i32)
}

/// `B_d = (T_{1−1/(3d)} − T_{1−1/(2d)}) A`.
pub fn soft_chunk(a: &QOperator, d: usize) -> Result<QOperator> {
    check_dyadic(d)?;
    Ok(a.scale_by_degree(|m| chunk_multiplier(d, m)))
}

/// `1, 2, 4, …` up to `2n`; `W_{≈d}` vanishes beyond.
pub fn dyadic_degrees(n: usize) -> Vec<usize> {
    std::iter::successors(Some(1usize), |d| Some(d * 2))
        .take_while(|&d| d <= 2 * n)
        .collect()
}

/// Every soft chunk of `A` over [`dyadic_degrees`].
#[derive(Clone, Debug)]
pub struct ChunkFamily {
    pub chunks: BTreeMap<usize, QOperator>,
}

pub fn chunk_family(a: &QOperator) -> ChunkFamily {
    let chunks = dyadic_degrees(a.n())
        .into_iter()
        .map(|d| (d, a.scale_by_degree(|m| chunk_multiplier(d, m))))
        .collect();
    ChunkFamily { chunks }
}

/// A dyadic scan: members, the summed band weight and the asserted bound
/// `Var ≤ factor · Σ_{d ∈ set} W_{≈d}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodDegrees {
    pub degrees: Vec<usize>,
    pub band_weight: f64,
    pub variance: f64,
    pub factor: f64,
    pub degenerate: bool,
}

impl GoodDegrees {
    fn degenerate(variance: f64, factor: f64) -> Self {
        Self {
            degrees: Vec::new(),
            band_weight: 0.0,
            variance,
            factor,
            degenerate: true,
        }
    }

    /// Right side of the asserted bound.
    pub fn bound(&self) -> f64 {
        self.factor * self.band_weight
    }
}

/// `{d : W_{≈d} ≥ Var² / (16 Inf¹)}`.
pub fn good_degrees_d(a: &QOperator) -> Result<GoodDegrees> {
    let var = influence::variance(a);
    if var <= DEGENERATE_TOL {
        return Ok(GoodDegrees::degenerate(var, 4.0));
    }
    let inf1 = influence::total_influence(a, 1.0)?;
    if inf1 <= DEGENERATE_TOL {
        return Ok(GoodDegrees::degenerate(var, 4.0));
    }
    let w = fourier_weights(a);
    let threshold = var * var / (16.0 * inf1);
    let degrees: Vec<usize> = dyadic_degrees(a.n())
        .into_iter()
        .filter(|&d| w.w_approx(d) >= threshold)
        .collect();
    let band_weight = degrees.iter().map(|&d| w.w_approx(d)).sum();
    Ok(GoodDegrees {
        degrees,
        band_weight,
        variance: var,
        factor: 4.0,
        degenerate: false,
    })
}

/// `{d : d · W_{≈d} ≥ Inf[B_d] / 20}`.
pub fn good_degrees_g(a: &QOperator) -> Result<GoodDegrees> {
    let var = influence::variance(a);
    if var <= DEGENERATE_TOL {
        return Ok(GoodDegrees::degenerate(var, 2.0));
    }
    let w = fourier_weights(a);
    let family = chunk_family(a);
    let degrees: Vec<usize> = family
        .chunks
        .iter()
        .filter(|(&d, b)| d as f64 * w.w_approx(d) >= influence::total_influence_l2(b) / 20.0)
        .map(|(&d, _)| d)
        .collect();
    let band_weight = degrees.iter().map(|&d| w.w_approx(d)).sum();
    Ok(GoodDegrees {
        degrees,
        band_weight,
        variance: var,
        factor: 2.0,
        degenerate: false,
    })
}

fn binomial(m: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// Both sides of `W_{≥k}[A] = 2k Σ_{|J|=k} Σ_γ ∫ (e^{2t}−1)^{k−1} e^{−2kt} ||P_t ∂_J^γ A||_2^2 dt`.
///
/// After `u = e^{-2t}` each Fourier degree `m ≥ k` of `A` contributes the Beta
/// integral `1 / (2k · C(m, k))`, so the right side is summed in closed form.
pub fn weight_integral_identity(a: &QOperator, k: usize) -> Result<(f64, f64)> {
    let n = a.n();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("order k = {k} outside 1..={n}")));
    }
    if n > WEIGHT_INTEGRAL_MAX_N {
        return Err(Error::Capacity {
            n,
            max: WEIGHT_INTEGRAL_MAX_N,
        });
    }
    let lhs = fourier_weights(a).w_geq(k);
    let mut rhs = 0.0;
    for set in QubitSet::all_of_size(n, k) {
        for code in 0..3usize.pow(k as u32) {
            let gamma: Vec<u8> = (0..k)
                .map(|i| (code / 3usize.pow(i as u32) % 3) as u8 + 1)
                .collect();
            let block = directional_block(a, set, &gamma)?.operator;
            for (t, c) in block.spectrum().iter().enumerate() {
                let m = crate::pauli::degree(t) + k;
                let weight = 1.0 / (2.0 * k as f64 * binomial(m, k));
                rhs += 2.0 * k as f64 * weight * c.norm_sqr();
            }
        }
    }
    Ok((lhs, rhs))
}
