//! Per-root eigenfunction data — phase offset, normalization constant,
//! pointwise evaluation — and assembly of the complete 1D basis.
//!
//! Each eigenfunction has the form `phi(x) = cos((pi/l) q_hat x + b_hat)` on
//! the centered interval `[-l/2, l/2]`. The phase offset solves
//! `pi q_hat tan(pi q_hat / 2 + b_hat) = i gamma_+` (the right-wall
//! condition); the left-wall condition then holds automatically because
//! `q_hat` solves the eigenvalue condition, and is verified as a guard
//! against spurious roots. The normalization constant is
//! `Lambda = (l/2)(1 + sin(pi q_hat) cos(2 b_hat) / (pi q_hat))`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::asymptotics::Group;
use crate::eigensolver::{solve_axis, EigenRoot};
use crate::error::{Error, Result};
use crate::types::{AxisBoundary, GammaPair, SolverParams, WaveContext};

/// Relative `|Lambda|` threshold below which an entry is flagged
/// near-defective (the expansion denominator is dangerously small).
pub const LAMBDA_WARN_TOL: f64 = 1e-6;
/// Relative `|Lambda|` threshold below which the basis is refused outright:
/// the eigenfunction is numerically defective and the expansion breaks down.
pub const LAMBDA_DEFECT_TOL: f64 = 1e-12;

/// One basis entry: an accepted root with its eigenfunction data.
#[derive(Debug, Clone, Copy)]
pub struct ModalRoot {
    pub root: EigenRoot,
    /// Phase offset, reduced to `|Re| <= pi/2`.
    pub b_hat: Complex64,
    /// Normalization constant `Lambda = integral of phi^2` over the axis (m).
    pub lambda: Complex64,
    /// Dimensional wavenumber `pi q_hat / l` (rad/m).
    pub k_hat: Complex64,
    /// `|Lambda|` is below the warning threshold.
    pub near_defective: bool,
}

impl ModalRoot {
    /// Evaluate the eigenfunction at `x` (centered coordinates).
    pub fn eval(&self, length: f64, x: f64) -> Result<Complex64> {
        eigenfunction_eval(self.root.q_hat, self.b_hat, length, x)
    }
}

/// The complete eigenfunction basis of one axis at one frequency.
#[derive(Debug, Clone)]
pub struct Basis1D {
    pub length: f64,
    pub frequency: f64,
    pub wavenumber: f64,
    pub gamma: GammaPair,
    pub entries: Vec<ModalRoot>,
    pub oracle_fallback: bool,
    pub warnings: Vec<String>,
}

/// Phase offset for an accepted root:
/// `b_hat = arctan(i gamma_+ / (pi q_hat)) - pi q_hat / 2`, principal branch,
/// with `Re(b_hat)` reduced modulo `pi` (a `pi` shift only flips the sign of
/// `phi`, which no downstream quantity sees).
///
/// Deeply damped negative-reactance roots sit at `pi q_hat = gamma_+` to
/// machine precision, where the arctangent argument touches its branch point
/// `±i`; there the equivalent left-wall form
/// `b_hat = pi q_hat / 2 - arctan(i gamma_- / (pi q_hat))` is well
/// conditioned, so whichever wall is farther from the branch point defines
/// `b_hat` and the other wall is verified.
pub fn b_from_q(q_hat: Complex64, g: &GammaPair) -> Result<Complex64> {
    if q_hat.norm() == 0.0 {
        return Err(Error::TrivialRoot(q_hat));
    }
    let p = PI * q_hat;
    let branch_distance = |z: Complex64| (z - Complex64::I).norm().min((z + Complex64::I).norm());
    let z_plus = Complex64::I * g.gamma_plus / p;
    let z_minus = Complex64::I * g.gamma_minus / p;
    let (d_plus, d_minus) = (branch_distance(z_plus), branch_distance(z_minus));
    if d_plus.max(d_minus) < 1e-13 {
        return Err(Error::DegenerateBoundaryData(q_hat));
    }
    // check = +1 verifies the right wall, -1 the left wall.
    let (mut b, check) = if d_plus >= d_minus {
        (z_plus.atan() - p / 2.0, -1.0)
    } else {
        (p / 2.0 - z_minus.atan(), 1.0)
    };
    b.re -= PI * (b.re / PI).round();

    // The other wall must be satisfied by any genuine root:
    // pi q_hat tan(pi q_hat / 2 ± b_hat) = i gamma_±.
    let gamma = if check > 0.0 { g.gamma_plus } else { g.gamma_minus };
    let theta = p / 2.0 + check * b;
    let (sin_t, cos_t) = (theta.sin(), theta.cos());
    let res = p * sin_t - Complex64::I * gamma * cos_t;
    let scale = (p.norm() + gamma.norm()) * (sin_t.norm() + cos_t.norm());
    if res.norm() > 1e-8 * scale {
        return Err(Error::LeftBcViolation {
            q_hat,
            residual: res.norm(),
            scale,
        });
    }
    Ok(b)
}

/// Normalization constant `Lambda = (l/2)(1 + sin(pi q) cos(2 b) / (pi q))`,
/// switching to the series of `sin(z)/z` for small `|pi q|`.
pub fn lambda_of(q_hat: Complex64, b_hat: Complex64, length: f64) -> Complex64 {
    let z = PI * q_hat;
    let sinc = if z.norm() < 1e-3 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    };
    (length / 2.0) * (1.0 + sinc * (2.0 * b_hat).cos())
}

/// `phi(x) = cos((pi/l) q_hat x + b_hat)` for `x` in `[-l/2, l/2]`
/// (tolerance `1e-12 l` at the walls).
pub fn eigenfunction_eval(
    q_hat: Complex64,
    b_hat: Complex64,
    length: f64,
    x: f64,
) -> Result<Complex64> {
    let half = length / 2.0;
    if x.abs() > half + 1e-12 * length {
        return Err(Error::OutOfDomain {
            x,
            lo: -half,
            hi: half,
        });
    }
    Ok(((PI / length) * q_hat * x + b_hat).cos())
}

/// Spatial derivative `phi'(x)`, used by boundary-condition checks.
pub fn eigenfunction_derivative(
    q_hat: Complex64,
    b_hat: Complex64,
    length: f64,
    x: f64,
) -> Complex64 {
    let s = (PI / length) * q_hat;
    -s * (s * x + b_hat).sin()
}

/// Solve the axis and attach eigenfunction data to every root.
///
/// For exactly rigid walls the constant Neumann mode (`q_hat = 0`,
/// `Lambda = l`) is appended; the eigenvalue pipeline removes the trivial
/// root, but at `beta = 0` the constant function is a genuine eigenfunction
/// and the expansion needs it at low wavenumbers.
pub fn build_basis(
    axis: &AxisBoundary,
    ctx: &WaveContext,
    params: &SolverParams,
) -> Result<Basis1D> {
    let g = GammaPair::for_axis(axis, ctx)?;
    let set = solve_axis(&g, params)?;
    let mut warnings = set.warnings.clone();
    let mut entries = Vec::with_capacity(set.roots.len() + 1);

    if g.is_rigid() {
        entries.push(ModalRoot {
            root: EigenRoot {
                q_hat: Complex64::ZERO,
                residual: 0.0,
                rel_residual: 0.0,
                group: Group::Constant,
            },
            b_hat: Complex64::ZERO,
            lambda: Complex64::new(axis.length, 0.0),
            k_hat: Complex64::ZERO,
            near_defective: false,
        });
    }

    for root in &set.roots {
        let b_hat = b_from_q(root.q_hat, &g)?;
        let lambda = lambda_of(root.q_hat, b_hat, axis.length);
        let lam_rel = lambda.norm() / axis.length;
        if lam_rel < LAMBDA_DEFECT_TOL {
            return Err(Error::DefectiveEigenfunction {
                q_hat: root.q_hat,
                lambda_abs: lambda.norm(),
            });
        }
        let near_defective = lam_rel < LAMBDA_WARN_TOL;
        if near_defective {
            warnings.push(format!(
                "near-defective eigenfunction at q_hat = {} (|Lambda|/l = {lam_rel:.3e})",
                root.q_hat
            ));
        }
        entries.push(ModalRoot {
            root: *root,
            b_hat,
            lambda,
            k_hat: root.k_hat(axis.length),
            near_defective,
        });
    }

    Ok(Basis1D {
        length: axis.length,
        frequency: ctx.frequency,
        wavenumber: ctx.wavenumber,
        gamma: g,
        entries,
        oracle_fallback: set.oracle_fallback,
        warnings,
    })
}
