//! Domain types: room geometry, wall admittance, wave context and solver
//! parameters.
//!
//! Coordinates are measured from the room center, so axis `j` spans
//! `[-l_j/2, l_j/2]`. All types are immutable values after construction and
//! safe to share across threads.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Normalized surface admittance of one wall, either a frequency-independent
/// constant or a table interpolated linearly in frequency.
///
/// `beta = 0` is a perfectly rigid wall; `zeta = 1/beta` is the normalized
/// impedance.
#[derive(Debug, Clone, PartialEq)]
pub enum Admittance {
    Constant(Complex64),
    Table(AdmittanceTable),
}

/// Interpolation table of `(frequency_hz, beta)` rows with strictly
/// increasing frequencies. Evaluation outside the covered range is an error;
/// no extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmittanceTable {
    rows: Vec<(f64, Complex64)>,
}

impl AdmittanceTable {
    pub fn new(rows: Vec<(f64, Complex64)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::TableEmpty);
        }
        if rows.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::TableNotIncreasing);
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[(f64, Complex64)] {
        &self.rows
    }

    fn eval(&self, f: f64) -> Result<Complex64> {
        let (lo, hi) = (self.rows[0].0, self.rows[self.rows.len() - 1].0);
        if !(f >= lo && f <= hi) {
            return Err(Error::TableRange { f, lo, hi });
        }
        let idx = self.rows.partition_point(|r| r.0 <= f);
        if idx == 0 {
            return Ok(self.rows[0].1);
        }
        if idx == self.rows.len() {
            return Ok(self.rows[idx - 1].1);
        }
        let (f0, b0) = self.rows[idx - 1];
        let (f1, b1) = self.rows[idx];
        // Linear interpolation on Re and Im independently.
        let t = (f - f0) / (f1 - f0);
        Ok(Complex64::new(
            b0.re + t * (b1.re - b0.re),
            b0.im + t * (b1.im - b0.im),
        ))
    }
}

impl Admittance {
    pub fn constant(beta: Complex64) -> Self {
        Admittance::Constant(beta)
    }

    /// Convenience constructor from the normalized impedance `zeta = 1/beta`.
    pub fn from_impedance(zeta: Complex64) -> Result<Self> {
        if zeta == Complex64::ZERO {
            return Err(Error::ZeroImpedance);
        }
        Ok(Admittance::Constant(zeta.inv()))
    }

    pub fn from_table(rows: Vec<(f64, Complex64)>) -> Result<Self> {
        Ok(Admittance::Table(AdmittanceTable::new(rows)?))
    }

    /// Rigid wall (`beta = 0`).
    pub fn rigid() -> Self {
        Admittance::Constant(Complex64::ZERO)
    }

    pub fn eval(&self, frequency_hz: f64) -> Result<Complex64> {
        match self {
            Admittance::Constant(b) => Ok(*b),
            Admittance::Table(t) => t.eval(frequency_hz),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Admittance::Constant(_))
    }

    /// The constant value, if frequency-independent.
    pub fn constant_value(&self) -> Option<Complex64> {
        match self {
            Admittance::Constant(b) => Some(*b),
            Admittance::Table(_) => None,
        }
    }
}

/// One room axis: its length and the admittances of its two walls.
#[derive(Debug, Clone)]
pub struct AxisBoundary {
    pub length: f64,
    pub beta_minus: Admittance,
    pub beta_plus: Admittance,
}

impl AxisBoundary {
    pub fn new(length: f64, beta_minus: Admittance, beta_plus: Admittance) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::NonPositiveLength(length));
        }
        Ok(Self {
            length,
            beta_minus,
            beta_plus,
        })
    }

    pub fn rigid(length: f64) -> Result<Self> {
        Self::new(length, Admittance::rigid(), Admittance::rigid())
    }
}

/// The physical problem definition: axes (1 to 3) and speed of sound.
#[derive(Debug, Clone)]
pub struct RoomSpec {
    pub axes: Vec<AxisBoundary>,
    pub speed_of_sound: f64,
}

impl RoomSpec {
    pub fn new(axes: Vec<AxisBoundary>, speed_of_sound: f64) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::BadDimension(axes.len()));
        }
        if !(speed_of_sound > 0.0) || !speed_of_sound.is_finite() {
            return Err(Error::NonPositiveSpeed(speed_of_sound));
        }
        Ok(Self {
            axes,
            speed_of_sound,
        })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Wave quantities at a given frequency: `k = 2 pi f / c` and the
    /// per-axis dimensionless `q = k l / pi`.
    pub fn wave_context(&self, frequency_hz: f64) -> Result<WaveContext> {
        if !(frequency_hz >= 0.0) || !frequency_hz.is_finite() {
            return Err(Error::NegativeFrequency(frequency_hz));
        }
        let k = 2.0 * PI * frequency_hz / self.speed_of_sound;
        Ok(WaveContext {
            frequency: frequency_hz,
            wavenumber: k,
            q: self.axes.iter().map(|a| k * a.length / PI).collect(),
        })
    }

    /// True when `x` (room-centered coordinates) lies inside the room
    /// closure, within `tol_rel * l` per axis.
    pub fn contains(&self, x: &[f64], tol_rel: f64) -> bool {
        x.len() >= self.dim()
            && self.axes.iter().enumerate().all(|(j, a)| {
                let h = a.length / 2.0;
                x[j].abs() <= h + tol_rel * a.length
            })
    }
}

/// Frequency, wavenumber and per-axis dimensionless wavenumbers `q = k l / pi`.
#[derive(Debug, Clone)]
pub struct WaveContext {
    pub frequency: f64,
    pub wavenumber: f64,
    pub q: Vec<f64>,
}

/// The dimensionless wall parameters of one axis at one frequency,
/// `gamma_± = beta_± k l`, together with the asymptotic-regime cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPair {
    pub gamma_minus: Complex64,
    pub gamma_plus: Complex64,
}

impl GammaPair {
    pub fn new(gamma_minus: Complex64, gamma_plus: Complex64) -> Self {
        Self {
            gamma_minus,
            gamma_plus,
        }
    }

    /// Evaluate the wall admittances of `axis` at the context frequency.
    pub fn for_axis(axis: &AxisBoundary, ctx: &WaveContext) -> Result<Self> {
        let kl = ctx.wavenumber * axis.length;
        Ok(Self {
            gamma_minus: axis.beta_minus.eval(ctx.frequency)? * kl,
            gamma_plus: axis.beta_plus.eval(ctx.frequency)? * kl,
        })
    }

    pub fn rigid() -> Self {
        Self::new(Complex64::ZERO, Complex64::ZERO)
    }

    pub fn sum(&self) -> Complex64 {
        self.gamma_minus + self.gamma_plus
    }

    pub fn product(&self) -> Complex64 {
        self.gamma_minus * self.gamma_plus
    }

    /// Parallel combination `gamma_- gamma_+ / (gamma_- + gamma_+)`;
    /// undefined when the sum vanishes.
    pub fn gamma_parallel(&self) -> Option<Complex64> {
        let s = self.sum();
        if s == Complex64::ZERO {
            None
        } else {
            Some(self.product() / s)
        }
    }

    /// Branch index below which soft-wall guesses replace hard-wall ones:
    /// `sqrt(|gamma_- gamma_+|) / pi`.
    pub fn soft_wall_cutoff(&self) -> f64 {
        self.product().norm().sqrt() / PI
    }

    /// Branch index below which the asymmetric-wall (tangent-pole) guesses
    /// apply: `|gamma_- + gamma_+| / pi`.
    pub fn asymmetric_cutoff(&self) -> f64 {
        self.sum().norm() / PI
    }

    pub fn is_rigid(&self) -> bool {
        self.gamma_minus == Complex64::ZERO && self.gamma_plus == Complex64::ZERO
    }
}

/// Parameters of the eigenvalue pipeline.
///
/// `eps_newton` is a relative residual tolerance: a refined point is accepted
/// when `|v(q_hat)|` drops below `eps_newton` times the natural magnitude of
/// the two terms whose cancellation defines the root.
#[derive(Debug, Clone, Copy)]
pub struct SolverParams {
    /// Truncation order of the expansion (branch indices 0..=n_max).
    pub n_max: usize,
    /// Maximum Newton iterations per candidate.
    pub n_newton: usize,
    /// Newton damping factor in (0, 1].
    pub alpha_newton: f64,
    /// Relative residual tolerance for accepting a refined root.
    pub eps_newton: f64,
    /// Root-coincidence tolerance in q_hat space.
    pub dedup_tol: f64,
    /// Threshold below which a root is treated as the trivial q_hat = 0.
    pub zero_tol: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            n_max: 40,
            n_newton: 100,
            alpha_newton: 0.3,
            eps_newton: 1e-12,
            dedup_tol: 1e-4,
            zero_tol: 1e-4,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_newton == 0 {
            return Err(Error::BadSolverParam("n_newton must be >= 1".into()));
        }
        if !(self.alpha_newton > 0.0 && self.alpha_newton <= 1.0) {
            return Err(Error::BadSolverParam(format!(
                "alpha_newton must be in (0, 1], got {}",
                self.alpha_newton
            )));
        }
        for (name, v) in [
            ("eps_newton", self.eps_newton),
            ("dedup_tol", self.dedup_tol),
            ("zero_tol", self.zero_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::BadSolverParam(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}
