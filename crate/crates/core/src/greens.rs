//! Eigenfunction-expansion assembly of the Green's function in 1, 2 or 3
//! dimensions, frequency sweeps and sound pressure level.
//!
//! The expansion is
//!
//! ```text
//! G_k(x | x0) = sum_n phi_n(x) phi_n(x0) / (Lambda_n (k_hat_n^2 - k^2))
//! ```
//!
//! over the full tensor product of the per-axis bases, with
//! `phi_n(x) = prod_j phi_{n_j}(x_j)`, `Lambda_n = prod_j Lambda_{n_j}` and
//! `k_hat_n^2 = sum_j k_hat_{n_j}^2`. Evaluation is factorized: the per-axis
//! eigenfunction values are tabulated once per distinct coordinate, so the
//! trig-call count is `O(d N n_max)` while the multi-index loop reduces to
//! multiply-accumulates.

use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::modal::{build_basis, Basis1D};
use crate::types::{RoomSpec, SolverParams, WaveContext};

/// Reference sound pressure (Pa) for SPL.
pub const P0: f64 = 2e-5;
/// Relative near-resonance guard on the expansion denominator.
pub const DENOM_TOL: f64 = 1e-12;

/// Complex pressure samples of the Green's function over evaluation points.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    /// Evaluation points, centered coordinates; trailing components unused
    /// for d < 3.
    pub points: Vec<[f64; 3]>,
    pub values: Vec<Complex64>,
    pub frequency: f64,
    pub n_max: usize,
    /// Fingerprint of the room definition that produced the field.
    pub room_hash: u64,
    /// Number of multi-index terms actually summed.
    pub term_count: usize,
    pub warnings: Vec<String>,
}

/// Frequency sweep of the Green's function at one receiver.
#[derive(Debug, Clone)]
pub struct TransferFunction {
    pub frequencies: Vec<f64>,
    /// One value per frequency; `None` marks a frequency whose evaluation
    /// failed (see `failures`).
    pub values: Vec<Option<Complex64>>,
    pub failures: Vec<(f64, String)>,
    pub warnings: Vec<String>,
}

impl TransferFunction {
    /// SPL view, `20 log10(|G|/p0)`; `-inf` at exact zeros, `None` where the
    /// value is absent.
    pub fn spl(&self) -> Vec<Option<f64>> {
        self.values
            .iter()
            .map(|v| v.map(|g| spl_value(g, P0)))
            .collect()
    }
}

fn spl_value(g: Complex64, p0: f64) -> f64 {
    let mag = g.norm();
    if mag == 0.0 {
        f64::NEG_INFINITY
    } else {
        20.0 * (mag / p0).log10()
    }
}

/// Elementwise `20 log10(|g|/p0)` with a `-inf` sentinel at zeros.
pub fn spl(values: &[Complex64], p0: f64) -> Vec<f64> {
    assert!(p0 > 0.0, "reference pressure must be positive");
    values.iter().map(|&g| spl_value(g, p0)).collect()
}

/// FNV-1a fingerprint of the room definition (axes, admittances, speed of
/// sound); stable across runs for identical configs.
pub fn room_hash(room: &RoomSpec) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    let mut eat = |bits: u64| {
        for byte in bits.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(room.axes.len() as u64);
    eat(room.speed_of_sound.to_bits());
    for axis in &room.axes {
        eat(axis.length.to_bits());
        for adm in [&axis.beta_minus, &axis.beta_plus] {
            match adm {
                crate::types::Admittance::Constant(b) => {
                    eat(0);
                    eat(b.re.to_bits());
                    eat(b.im.to_bits());
                }
                crate::types::Admittance::Table(t) => {
                    eat(1);
                    for (f, b) in t.rows() {
                        eat(f.to_bits());
                        eat(b.re.to_bits());
                        eat(b.im.to_bits());
                    }
                }
            }
        }
    }
    h
}

/// Per-axis eigenfunction tables for a point set: the product
/// `phi(x) * phi(x0)` at every distinct coordinate of the point set.
/// Folding the source factor into the table keeps each term's rounding
/// symmetric under swapping `x` and `x0`, so reciprocity holds bit-exactly.
struct AxisTable {
    /// `phi(x_unique) * phi(x0)`, indexed `[entry][unique coordinate]`.
    pair: Vec<Vec<Complex64>>,
    /// Unique-coordinate index per evaluation point.
    point_slot: Vec<usize>,
}

fn axis_table(basis: &Basis1D, x0: f64, coords: &[f64]) -> Result<AxisTable> {
    let mut unique: Vec<f64> = Vec::new();
    let mut slots: HashMap<u64, usize> = HashMap::new();
    let point_slot: Vec<usize> = coords
        .iter()
        .map(|&x| {
            *slots.entry(x.to_bits()).or_insert_with(|| {
                unique.push(x);
                unique.len() - 1
            })
        })
        .collect();
    let mut pair = Vec::with_capacity(basis.entries.len());
    for entry in &basis.entries {
        let phi0 = entry.eval(basis.length, x0)?;
        pair.push(
            unique
                .iter()
                .map(|&x| Ok(entry.eval(basis.length, x)? * phi0))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(AxisTable { pair, point_slot })
}

/// Evaluate the Green's function at `points` for a source at `x0`.
///
/// One basis is built per axis at the context frequency; the sum runs over
/// the full tensor product of basis entries. A denominator smaller than
/// `DENOM_TOL * k^2` aborts with [`Error::NearResonance`], which only occurs
/// for lossless walls driven at an eigenfrequency.
pub fn green_eval(
    room: &RoomSpec,
    ctx: &WaveContext,
    x0: [f64; 3],
    points: &[[f64; 3]],
    params: &SolverParams,
) -> Result<FieldGrid> {
    params.validate()?;
    if params.n_max < 1 {
        return Err(Error::BadSolverParam(
            "n_max must be >= 1 for the expansion".into(),
        ));
    }
    let d = room.dim();
    if !room.contains(&x0, 1e-9) {
        return Err(Error::PointOutsideRoom(x0[..d].to_vec()));
    }
    for p in points {
        if !room.contains(p, 1e-9) {
            return Err(Error::PointOutsideRoom(p[..d].to_vec()));
        }
    }

    let mut warnings = Vec::new();
    let mut bases = Vec::with_capacity(d);
    for (j, axis) in room.axes.iter().enumerate() {
        let basis = build_basis(axis, ctx, params)?;
        warnings.extend(basis.warnings.iter().map(|w| format!("axis {j}: {w}")));
        bases.push(basis);
    }

    let tables: Vec<AxisTable> = bases
        .iter()
        .enumerate()
        .map(|(j, basis)| {
            let coords: Vec<f64> = points.iter().map(|p| p[j]).collect();
            axis_table(basis, x0[j], &coords)
        })
        .collect::<Result<Vec<_>>>()?;

    let k2 = ctx.wavenumber * ctx.wavenumber;
    let denom_gate = DENOM_TOL * k2.max(f64::MIN_POSITIVE);
    let counts: Vec<usize> = bases.iter().map(|b| b.entries.len()).collect();
    let term_count: usize = counts.iter().product();

    let mut values = vec![Complex64::ZERO; points.len()];
    let mut index = vec![0usize; d];
    loop {
        let mut khat2 = Complex64::ZERO;
        let mut lambda = Complex64::ONE;
        for j in 0..d {
            let entry = &bases[j].entries[index[j]];
            khat2 += entry.k_hat * entry.k_hat;
            lambda *= entry.lambda;
        }
        let denom = khat2 - k2;
        if denom.norm() < denom_gate {
            return Err(Error::NearResonance {
                index: index.clone(),
                denom: denom.norm(),
                frequency: ctx.frequency,
            });
        }
        let coeff = (lambda * denom).inv();
        match d {
            1 => {
                let row = &tables[0].pair[index[0]];
                for (value, &s0) in values.iter_mut().zip(&tables[0].point_slot) {
                    *value += coeff * row[s0];
                }
            }
            2 => {
                let row_x = &tables[0].pair[index[0]];
                let row_y = &tables[1].pair[index[1]];
                for (i, value) in values.iter_mut().enumerate() {
                    *value +=
                        coeff * row_x[tables[0].point_slot[i]] * row_y[tables[1].point_slot[i]];
                }
            }
            _ => {
                for (i, value) in values.iter_mut().enumerate() {
                    let mut phi = coeff;
                    for (j, table) in tables.iter().enumerate() {
                        phi *= table.pair[index[j]][table.point_slot[i]];
                    }
                    *value += phi;
                }
            }
        }
        // Advance the multi-index odometer.
        let mut j = 0;
        loop {
            if j == d {
                break;
            }
            index[j] += 1;
            if index[j] < counts[j] {
                break;
            }
            index[j] = 0;
            j += 1;
        }
        if j == d {
            break;
        }
    }

    Ok(FieldGrid {
        points: points.to_vec(),
        values,
        frequency: ctx.frequency,
        n_max: params.n_max,
        room_hash: room_hash(room),
        term_count,
        warnings,
    })
}

/// Frequency sweep of `G(x | x0)`: one basis rebuild and single-point
/// evaluation per frequency (`gamma` depends on `k` even for constant
/// admittance). Frequencies are independent work items and run in parallel;
/// results keep input order. A frequency that fails numerically is recorded
/// in `failures` and its value marked absent instead of aborting the sweep.
pub fn transfer_function(
    room: &RoomSpec,
    x0: [f64; 3],
    x: [f64; 3],
    frequencies: &[f64],
    params: &SolverParams,
) -> Result<TransferFunction> {
    if frequencies.is_empty() || frequencies.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::FrequenciesNotIncreasing);
    }
    // Admittance tables must cover the sweep; fail fast instead of per point.
    for axis in &room.axes {
        for adm in [&axis.beta_minus, &axis.beta_plus] {
            adm.eval(frequencies[0])?;
            adm.eval(frequencies[frequencies.len() - 1])?;
        }
    }

    let outcomes: Vec<std::result::Result<(Complex64, Vec<String>), String>> = frequencies
        .par_iter()
        .map(|&f| {
            room.wave_context(f)
                .and_then(|ctx| green_eval(room, &ctx, x0, &[x], params))
                .map(|grid| (grid.values[0], grid.warnings))
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut values = Vec::with_capacity(frequencies.len());
    let mut failures = Vec::new();
    let mut warnings = Vec::new();
    for (&f, outcome) in frequencies.iter().zip(outcomes) {
        match outcome {
            Ok((value, w)) => {
                values.push(Some(value));
                warnings.extend(w.into_iter().map(|w| format!("f = {f} Hz: {w}")));
            }
            Err(message) => {
                values.push(None);
                failures.push((f, message));
            }
        }
    }
    Ok(TransferFunction {
        frequencies: frequencies.to_vec(),
        values,
        failures,
        warnings,
    })
}
