//! Normalized Schatten norms `||A||_p = τ(|A|^p)^{1/p}`.

use crate::error::{Error, Result};
use crate::operator::QOperator;

/// `||A||_p` for `p ≥ 1` or `p = ∞`.
///
/// Hermitian operators use the moduli of their eigenvalues; anything else is
/// routed through the singular values, i.e. the eigenvalues of `(A*A)^{1/2}`.
pub fn schatten_norm(a: &QOperator, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p == f64::INFINITY {
        return Ok(a.operator_norm());
    }
    Ok(power_trace(a, p).powf(1.0 / p))
}

/// `||A||_p^p = τ(|A|^p)`, the form in which influences are defined.
pub fn schatten_power(a: &QOperator, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p == f64::INFINITY {
        return Err(Error::Domain("p-th power of the operator norm".into()));
    }
    Ok(power_trace(a, p))
}

fn power_trace(a: &QOperator, p: f64) -> f64 {
    if p == 2.0 {
        return a.norm2_sq();
    }
    let values = a.spectral_values();
    let sum: f64 = values.iter().map(|l| l.abs().powf(p)).sum();
    sum / values.len() as f64
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("Schatten exponent {p} < 1")));
    }
    Ok(())
}
