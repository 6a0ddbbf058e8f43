//! TOML room configuration and admittance-table files.
//!
//! ```toml
//! speed_of_sound = 343.0
//!
//! [solver]
//! n_max = 40
//! n_newton = 100
//! alpha_newton = 0.3
//! eps_newton = 1e-12
//! dedup_tol = 1e-4
//! zero_tol = 1e-4
//!
//! [[axes]]
//! length = 1.0
//! beta_minus = { beta = [0.1, 0.1] }
//! beta_plus = { zeta = [6.0, 0.0] }      # impedance form, beta = 1/zeta
//!
//! [[axes]]
//! length = 1.4
//! beta_minus = { table = "west_wall.csv" }
//! beta_plus = { beta = [0.0, 0.0] }
//! ```
//!
//! Table files hold comma-separated rows `f_hz, re_beta, im_beta` with
//! strictly increasing frequencies; `#`-prefixed lines are ignored. Relative
//! table paths resolve against the config file's directory.

use num_complex::Complex64;
use serde::Deserialize;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::types::{Admittance, AxisBoundary, RoomSpec, SolverParams};

#[derive(Debug, Clone)]
pub struct Config {
    pub room: RoomSpec,
    pub params: SolverParams,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    speed_of_sound: f64,
    #[serde(default)]
    solver: RawSolver,
    axes: Vec<RawAxis>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
struct RawSolver {
    n_max: Option<usize>,
    n_newton: Option<usize>,
    alpha_newton: Option<f64>,
    eps_newton: Option<f64>,
    dedup_tol: Option<f64>,
    zero_tol: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    length: f64,
    beta_minus: RawAdmittance,
    beta_plus: RawAdmittance,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAdmittance {
    beta: Option<[f64; 2]>,
    zeta: Option<[f64; 2]>,
    table: Option<PathBuf>,
}

impl RawAdmittance {
    fn resolve(&self, base: &Path) -> Result<Admittance> {
        match (&self.beta, &self.zeta, &self.table) {
            (Some(b), None, None) => Ok(Admittance::constant(Complex64::new(b[0], b[1]))),
            (None, Some(z), None) => Admittance::from_impedance(Complex64::new(z[0], z[1])),
            (None, None, Some(path)) => {
                let full = if path.is_absolute() {
                    path.clone()
                } else {
                    base.join(path)
                };
                load_admittance_table(&full)
            }
            _ => Err(Error::Config(
                "admittance needs exactly one of `beta`, `zeta`, `table`".into(),
            )),
        }
    }
}

/// Parse a `f_hz, re_beta, im_beta` table file.
pub fn load_admittance_table(path: &Path) -> Result<Admittance> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Config(format!(
                "{}: line {}: expected `f_hz, re_beta, im_beta`",
                path.display(),
                lineno + 1
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| {
                Error::Config(format!(
                    "{}: line {}: bad number {s:?}",
                    path.display(),
                    lineno + 1
                ))
            })
        };
        rows.push((
            parse(fields[0])?,
            Complex64::new(parse(fields[1])?, parse(fields[2])?),
        ));
    }
    Admittance::from_table(rows)
}

/// Load a config file; relative table paths resolve against its directory.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)?;
    let raw: RawConfig =
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();

    let mut axes = Vec::with_capacity(raw.axes.len());
    for axis in &raw.axes {
        axes.push(AxisBoundary::new(
            axis.length,
            axis.beta_minus.resolve(&base)?,
            axis.beta_plus.resolve(&base)?,
        )?);
    }
    let room = RoomSpec::new(axes, raw.speed_of_sound)?;

    let defaults = SolverParams::default();
    let params = SolverParams {
        n_max: raw.solver.n_max.unwrap_or(defaults.n_max),
        n_newton: raw.solver.n_newton.unwrap_or(defaults.n_newton),
        alpha_newton: raw.solver.alpha_newton.unwrap_or(defaults.alpha_newton),
        eps_newton: raw.solver.eps_newton.unwrap_or(defaults.eps_newton),
        dedup_tol: raw.solver.dedup_tol.unwrap_or(defaults.dedup_tol),
        zero_tol: raw.solver.zero_tol.unwrap_or(defaults.zero_tol),
    };
    params.validate()?;
    Ok(Config { room, params })
}
