//! Shared helpers for the integration tests: an adaptive quadrature oracle
//! independent of the closed forms under test, and the wall configurations
//! used throughout.

use num_complex::Complex64;
use rectroom::{Admittance, AxisBoundary, GammaPair, RoomSpec};

/// 16-point Gauss-Legendre abscissae (positive half) on [-1, 1].
const GL_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
/// Matching weights.
const GL_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

fn gauss16<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::ZERO;
    for i in 0..8 {
        acc += GL_W[i] * (f(mid + half * GL_X[i]) + f(mid - half * GL_X[i]));
    }
    acc * half
}

/// Adaptive composite 16-point Gauss quadrature: the segment count doubles
/// until two successive estimates agree to 1e-10 relative.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64) -> Complex64 {
    let composite = |segments: usize| -> Complex64 {
        let h = (b - a) / segments as f64;
        (0..segments)
            .map(|s| gauss16(&f, a + s as f64 * h, a + (s + 1) as f64 * h))
            .sum()
    };
    let mut segments = 1;
    let mut prev = composite(segments);
    loop {
        segments *= 2;
        let next = composite(segments);
        if (next - prev).norm() <= 1e-10 * next.norm().max(1e-300) || segments >= 1024 {
            return next;
        }
        prev = next;
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn axis(bm: Complex64, bp: Complex64, l: f64) -> AxisBoundary {
    AxisBoundary::new(l, Admittance::constant(bm), Admittance::constant(bp)).unwrap()
}

pub fn room_1d(bm: Complex64, bp: Complex64, l: f64) -> RoomSpec {
    RoomSpec::new(vec![axis(bm, bp, l)], 343.0).unwrap()
}

/// The three eigenvalue-study wall configurations (l = 1 m, f = 5000 Hz).
pub fn study_gammas() -> [GammaPair; 3] {
    let kl = 2.0 * std::f64::consts::PI * 5000.0 / 343.0;
    let gamma = |bm: Complex64, bp: Complex64| GammaPair::new(bm * kl, bp * kl);
    [
        gamma(c(0.01, 0.01), c(0.02, 0.0)),
        gamma(c(0.1, 0.1), c(0.2, 0.07)),
        gamma(c(0.1, 0.06), c(0.0, 0.0)),
    ]
}

/// The 2D room of the Green's-function validation study:
/// 1.0 m x 1.4 m, one normalized impedance per wall.
pub fn study_room_2d() -> RoomSpec {
    let beta = |re: f64, im: f64| {
        Admittance::from_impedance(Complex64::new(re, im)).unwrap()
    };
    RoomSpec::new(
        vec![
            AxisBoundary::new(1.0, beta(10.0, -3.0), beta(6.0, 0.0)).unwrap(),
            AxisBoundary::new(1.4, beta(12.0, -5.0), beta(4.0, -4.0)).unwrap(),
        ],
        343.0,
    )
    .unwrap()
}

/// Deterministic uniform points inside the room, at least `margin` from
/// `exclude` (Euclidean) when given.
pub fn sample_points(
    room: &RoomSpec,
    count: usize,
    seed: u64,
    exclude: Option<([f64; 3], f64)>,
) -> Vec<[f64; 3]> {
    let mut state = seed.max(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let d = room.dim();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut p = [0.0f64; 3];
        for (j, axis) in room.axes.iter().enumerate() {
            p[j] = (next() - 0.5) * axis.length;
        }
        if let Some((center, margin)) = exclude {
            let dist2: f64 = (0..d).map(|j| (p[j] - center[j]).powi(2)).sum();
            if dist2 < margin * margin {
                continue;
            }
        }
        out.push(p);
    }
    out
}
