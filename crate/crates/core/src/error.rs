//! Error type shared by all modules.

use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("frequency must be nonnegative, got {0} Hz")]
    NegativeFrequency(f64),
    #[error("axis length must be positive, got {0} m")]
    NonPositiveLength(f64),
    #[error("speed of sound must be positive, got {0} m/s")]
    NonPositiveSpeed(f64),
    #[error("room dimension must be 1, 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("invalid solver parameter: {0}")]
    BadSolverParam(String),
    #[error("admittance table frequencies must be strictly increasing")]
    TableNotIncreasing,
    #[error("admittance table is empty")]
    TableEmpty,
    #[error("frequency {f} Hz outside admittance table range [{lo}, {hi}] Hz")]
    TableRange { f: f64, lo: f64, hi: f64 },
    #[error("normalized impedance must be nonzero")]
    ZeroImpedance,
    #[error("gamma_minus + gamma_plus = 0: parallel combination undefined")]
    GammaSumZero,

    #[error(
        "root count mismatch on axis: found {found} roots with |q_hat| <= {radius}, \
         expected {expected} (oracle count {oracle}); found roots: {roots:?}"
    )]
    CountMismatch {
        found: usize,
        expected: usize,
        oracle: usize,
        radius: f64,
        roots: Vec<Complex64>,
    },

    #[error("invalid search region: {0}")]
    BadRegion(String),
    #[error("contour passes through a root near q_hat = {0} after retries")]
    ContourOnRoot(Complex64),
    #[error("root subdivision exceeded maximum depth near q_hat = {0}")]
    MaxDepth(Complex64),
    #[error("residual is non-finite at q_hat = {0}")]
    NonFinite(Complex64),

    #[error("trivial root q_hat = {0} has no phase offset")]
    TrivialRoot(Complex64),
    #[error("degenerate boundary data at q_hat = {0}: i*gamma_plus/(pi q_hat) = ±i")]
    DegenerateBoundaryData(Complex64),
    #[error(
        "left-wall boundary condition violated at q_hat = {q_hat} \
         (residual {residual:.3e}, scale {scale:.3e}): spurious root"
    )]
    LeftBcViolation {
        q_hat: Complex64,
        residual: f64,
        scale: f64,
    },
    #[error("coordinate {x} outside axis interval [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error(
        "eigenfunction at q_hat = {q_hat} is defective (|Lambda| = {lambda_abs:.3e}): \
         the expansion denominator vanishes"
    )]
    DefectiveEigenfunction { q_hat: Complex64, lambda_abs: f64 },

    #[error(
        "near-resonant term at multi-index {index:?}: |k_hat^2 - k^2| = {denom:.3e} \
         at f = {frequency} Hz (lossless resonance)"
    )]
    NearResonance {
        index: Vec<usize>,
        denom: f64,
        frequency: f64,
    },
    #[error("point {0:?} lies outside the room")]
    PointOutsideRoom(Vec<f64>),
    #[error("frequencies must be strictly increasing")]
    FrequenciesNotIncreasing,

    #[error("reflection coefficient pole: beta = -1")]
    ReflectionPole,
    #[error("1 + beta_minus*beta_plus = 0: mode formula denominator degenerate")]
    DegenerateDenominator,
    #[error("|R_minus * R_plus| = 0: perfectly absorbing pair, mode damping infinite")]
    AbsorbingPole,
    #[error("mode formulas require frequency-independent admittance")]
    FrequencyDependentAdmittance,

    #[error("Wronskian degenerate (|W| = {0:.3e}): k is a lossless resonance")]
    DegenerateWronskian(f64),
    #[error("grid too large: {unknowns} unknowns (cap {cap})")]
    GridTooLarge { unknowns: usize, cap: usize },
    #[error("linear solve failed: {0}")]
    SolveFailure(String),
    #[error("points-per-wavelength must be >= 10, got {0}")]
    BadEpw(f64),
    #[error("finite-difference reference requires a 2D room, got dimension {0}")]
    NotTwoDimensional(usize),

    #[error("sequences must have equal nonzero length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("reference sequence has zero norm")]
    ZeroNorm,

    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
