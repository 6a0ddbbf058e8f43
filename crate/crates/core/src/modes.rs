//! Closed-form resonance modes of the 1D room and reflection-coefficient
//! utilities.
//!
//! Unlike the eigenvalue problem, the mode problem is exactly solvable for
//! frequency-independent admittance:
//! `q_tilde = (1/pi) arctan(i (b- + b+) / (1 + b- b+)) + n`. Its real part
//! locates transfer-function peaks, `Re = arg(R- R+)/(2 pi) + n`, and its
//! imaginary part measures damping, `Im = -ln|R- R+|/(2 pi)`, where
//! `R = (1 - beta)/(1 + beta)` is the normal-incidence pressure reflection
//! coefficient. With `arg` on `(-pi, pi]` the per-branch values fall in
//! `(n - 1/2, n + 1/2]`; branches are labeled so the union over `n` covers
//! every mode exactly once.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::types::AxisBoundary;

/// One resonance mode of the axis.
#[derive(Debug, Clone, Copy)]
pub struct ModeValue {
    pub q_tilde: Complex64,
    pub n: i64,
    /// `arg(R- R+)/(2 pi) + n`, with `arg` on `(-pi, pi]`.
    pub re_part: f64,
    /// `-ln|R- R+|/(2 pi)`; independent of `n`.
    pub im_part: f64,
}

/// Pressure reflection coefficient at normal incidence,
/// `R = (1 - beta)/(1 + beta)`.
pub fn reflection_coefficient(beta: Complex64) -> Result<Complex64> {
    if (beta + Complex64::ONE).norm() == 0.0 {
        return Err(Error::ReflectionPole);
    }
    Ok((Complex64::ONE - beta) / (Complex64::ONE + beta))
}

/// Mode value of branch `n` from the arctangent form, cross-checked against
/// the reflection-coefficient components to 1e-10.
pub fn mode_q(n: i64, beta_minus: Complex64, beta_plus: Complex64) -> Result<ModeValue> {
    let denom = Complex64::ONE + beta_minus * beta_plus;
    if denom.norm() == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let rr = reflection_coefficient(beta_minus)? * reflection_coefficient(beta_plus)?;
    if rr.norm() == 0.0 {
        return Err(Error::AbsorbingPole);
    }
    let re_part = rr.arg() / TAU + n as f64;
    let im_part = -rr.norm().ln() / TAU;

    let base = (Complex64::I * (beta_minus + beta_plus) / denom).atan() / PI;
    // The principal arctangent already reproduces the component form up to an
    // integer shift of its real part; align and verify.
    let shift = (re_part - n as f64 - base.re).round();
    let q_tilde = Complex64::new(base.re + shift + n as f64, base.im);
    debug_assert!(
        (q_tilde.re - re_part).abs() < 1e-10 && (q_tilde.im - im_part).abs() < 1e-10,
        "mode branch misalignment: {q_tilde} vs ({re_part}, {im_part})"
    );
    Ok(ModeValue {
        q_tilde,
        n,
        re_part,
        im_part,
    })
}

/// Modal frequencies `f_n = Re(q_tilde) c / (2 l)` for the branch range.
///
/// Only frequency-independent admittance is admissible here: the closed form
/// assumes `beta` does not vary with the unknown modal frequency.
pub fn mode_frequencies(
    axis: &AxisBoundary,
    speed_of_sound: f64,
    n_range: std::ops::RangeInclusive<i64>,
) -> Result<Vec<f64>> {
    let (bm, bp) = match (
        axis.beta_minus.constant_value(),
        axis.beta_plus.constant_value(),
    ) {
        (Some(bm), Some(bp)) => (bm, bp),
        _ => return Err(Error::FrequencyDependentAdmittance),
    };
    n_range
        .map(|n| Ok(mode_q(n, bm, bp)?.re_part * speed_of_sound / (2.0 * axis.length)))
        .collect()
}
