//! Semi-analytical room acoustics for rectangular rooms with complex
//! surface-admittance walls.
//!
//! The library computes the complex eigenvalues of the 1D impedance
//! boundary-value problem by Newton refinement of closed-form asymptotic
//! guesses, assembles the per-axis eigenfunction bases, and sums the
//! tensorized eigenfunction expansion of the Green's function in 1, 2 or 3
//! dimensions. Resonance modes of the 1D room are available in closed form.
//!
//! Two independent reference paths are provided for verification: an
//! argument-principle root enumerator ([`oracle`]) and direct reference
//! solvers ([`reference`]) — a boundary-matched 1D closed form and a
//! desk-scale 2D finite-difference solver.
//!
//! Typical use:
//!
//! ```
//! use num_complex::Complex64;
//! use rectroom::{Admittance, AxisBoundary, RoomSpec, SolverParams};
//!
//! let room = RoomSpec::new(
//!     vec![AxisBoundary::new(
//!         1.0,
//!         Admittance::constant(Complex64::new(0.1, 0.1)),
//!         Admittance::constant(Complex64::new(0.2, 0.07)),
//!     )
//!     .unwrap()],
//!     343.0,
//! )
//! .unwrap();
//! let params = SolverParams { n_max: 12, ..Default::default() };
//! let grid = rectroom::greens::green_eval(
//!     &room,
//!     &room.wave_context(1000.0).unwrap(),
//!     [0.2, 0.0, 0.0],
//!     &[[-0.3, 0.0, 0.0]],
//!     &params,
//! )
//! .unwrap();
//! assert!(grid.values[0].norm() > 0.0);
//! ```

pub mod asymptotics;
pub mod config;
pub mod eigensolver;
pub mod error;
pub mod greens;
pub mod metrics;
pub mod modal;
pub mod modes;
pub mod oracle;
pub mod reference;
pub mod types;

pub use config::{load_config, Config};
pub use error::{Error, Result};
pub use types::{
    Admittance, AxisBoundary, GammaPair, RoomSpec, SolverParams, WaveContext,
};
