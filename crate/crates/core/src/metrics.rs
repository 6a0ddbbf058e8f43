//! Comparison metrics: relative L2 error and the frequency response
//! assurance criterion (FRAC).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `sqrt( sum |p - p_ref|^2 / sum |p_ref|^2 )` over sampled points.
pub fn l2_relative_error(p: &[Complex64], p_ref: &[Complex64]) -> Result<f64> {
    if p.len() != p_ref.len() || p.is_empty() {
        return Err(Error::LengthMismatch(p.len(), p_ref.len()));
    }
    let num: f64 = p
        .iter()
        .zip(p_ref)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let den: f64 = p_ref.iter().map(|b| b.norm_sqr()).sum();
    if den == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((num / den).sqrt())
}

/// Frequency Response Assurance Criterion:
/// `|sum h1 conj(h2)|^2 / (sum |h1|^2 * sum |h2|^2)`, a similarity score in
/// `[0, 1]` invariant under complex scaling of either argument.
pub fn frac(h1: &[Complex64], h2: &[Complex64]) -> Result<f64> {
    if h1.len() != h2.len() || h1.is_empty() {
        return Err(Error::LengthMismatch(h1.len(), h2.len()));
    }
    let cross: Complex64 = h1.iter().zip(h2).map(|(a, b)| a * b.conj()).sum();
    let n1: f64 = h1.iter().map(|a| a.norm_sqr()).sum();
    let n2: f64 = h2.iter().map(|b| b.norm_sqr()).sum();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((cross.norm_sqr() / (n1 * n2)).min(1.0))
}
