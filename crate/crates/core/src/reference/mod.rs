//! Independent Green's-function references.
//!
//! Two oracles, deliberately sharing no machinery with the eigenfunction
//! expansion: an exact 1D closed form built from boundary-matched
//! homogeneous solutions, and a desk-scale 2D finite-difference
//! frequency-domain solver with ghost-point impedance boundaries and a
//! banded direct solve.

pub mod banded;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{AxisBoundary, RoomSpec, WaveContext};
use banded::BandedMatrix;

/// Hard cap on FDM unknowns (desk scale).
pub const FDM_UNKNOWN_CAP: usize = 200_000;

/// Exact 1D Green's function from the Wronskian construction.
///
/// `u_-(x) = cos(k(x + l/2)) + i b_- sin(k(x + l/2))` satisfies the left-wall
/// condition `-u' + i k b_- u = 0` at `x = -l/2`; `u_+` mirrors it on the
/// right. Then `G = -u_-(min) u_+(max) / W` with the (constant) Wronskian
/// `W = u_- u_+' - u_-' u_+`, which gives the required unit derivative jump
/// at the source and both wall conditions.
pub fn green_1d_closed_form(
    axis: &AxisBoundary,
    ctx: &WaveContext,
    x0: f64,
    x: f64,
) -> Result<Complex64> {
    let k = ctx.wavenumber;
    if k <= 0.0 {
        return Err(Error::NegativeFrequency(ctx.frequency));
    }
    let l = axis.length;
    let half = l / 2.0;
    for coord in [x, x0] {
        if coord.abs() > half + 1e-12 * l {
            return Err(Error::OutOfDomain {
                x: coord,
                lo: -half,
                hi: half,
            });
        }
    }
    let bm = axis.beta_minus.eval(ctx.frequency)?;
    let bp = axis.beta_plus.eval(ctx.frequency)?;
    let i = Complex64::I;

    let um = |x: f64| {
        let t = k * (x + half);
        t.cos() + i * bm * t.sin()
    };
    let um_d = |x: f64| {
        let t = k * (x + half);
        -k * t.sin() + i * bm * k * t.cos()
    };
    let up = |x: f64| {
        let t = k * (half - x);
        t.cos() + i * bp * t.sin()
    };
    let up_d = |x: f64| {
        let t = k * (half - x);
        k * t.sin() - i * bp * k * t.cos()
    };

    let w = um(x0) * up_d(x0) - um_d(x0) * up(x0);
    let w_scale = (um(x0) * up_d(x0)).norm() + (um_d(x0) * up(x0)).norm();
    if w.norm() < 1e-12 * w_scale.max(k) {
        return Err(Error::DegenerateWronskian(w.norm()));
    }
    let (lo, hi) = if x <= x0 { (x, x0) } else { (x0, x) };
    Ok(-um(lo) * up(hi) / w)
}

/// Uniform-grid 2D finite-difference solution.
#[derive(Debug, Clone)]
pub struct FdmSolution {
    /// Node coordinates along axis 0, wall to wall (centered coordinates).
    pub xs: Vec<f64>,
    /// Node coordinates along axis 1.
    pub ys: Vec<f64>,
    /// Values in row-major `[iy * nx + ix]` order.
    pub values: Vec<Complex64>,
    pub frequency: f64,
}

impl FdmSolution {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn value_at(&self, ix: usize, iy: usize) -> Complex64 {
        self.values[iy * self.nx() + ix]
    }

    /// Bilinear interpolation at an interior point.
    pub fn sample(&self, x: f64, y: f64) -> Result<Complex64> {
        let locate = |coords: &[f64], v: f64| -> Result<(usize, f64)> {
            let lo = coords[0];
            let hi = coords[coords.len() - 1];
            if v < lo - 1e-12 || v > hi + 1e-12 {
                return Err(Error::OutOfDomain { x: v, lo, hi });
            }
            let h = coords[1] - coords[0];
            let idx = (((v - lo) / h).floor() as usize).min(coords.len() - 2);
            Ok((idx, ((v - coords[idx]) / h).clamp(0.0, 1.0)))
        };
        let (ix, tx) = locate(&self.xs, x)?;
        let (iy, ty) = locate(&self.ys, y)?;
        let f00 = self.value_at(ix, iy);
        let f10 = self.value_at(ix + 1, iy);
        let f01 = self.value_at(ix, iy + 1);
        let f11 = self.value_at(ix + 1, iy + 1);
        Ok(f00 * ((1.0 - tx) * (1.0 - ty))
            + f10 * (tx * (1.0 - ty))
            + f01 * ((1.0 - tx) * ty)
            + f11 * (tx * ty))
    }
}

struct FdmGrid {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

fn build_grid(room: &RoomSpec, ctx: &WaveContext, epw: f64) -> Result<FdmGrid> {
    let wavelength = room.speed_of_sound / ctx.frequency;
    let h_target = wavelength / epw;
    let axis_nodes = |l: f64| ((l / h_target).ceil() as usize + 1).max(9);
    let nx = axis_nodes(room.axes[0].length);
    let ny = axis_nodes(room.axes[1].length);
    let unknowns = nx * ny;
    if unknowns > FDM_UNKNOWN_CAP {
        return Err(Error::GridTooLarge {
            unknowns,
            cap: FDM_UNKNOWN_CAP,
        });
    }
    let hx = room.axes[0].length / (nx - 1) as f64;
    let hy = room.axes[1].length / (ny - 1) as f64;
    let xs = (0..nx)
        .map(|i| -room.axes[0].length / 2.0 + i as f64 * hx)
        .collect();
    let ys = (0..ny)
        .map(|j| -room.axes[1].length / 2.0 + j as f64 * hy)
        .collect();
    Ok(FdmGrid { nx, ny, hx, hy, xs, ys })
}

/// Assemble the complex-symmetric FDM operator.
///
/// Impedance walls enter through ghost-point elimination,
/// `G_ghost = G_in - 2 h i k beta G_wall`; multiplying each node row by its
/// cell-area weight (1/2 on walls, 1/4 in corners) keeps the operator
/// symmetric. Ordering runs fastest along the smaller grid dimension, so the
/// bandwidth is `min(nx, ny)`.
fn assemble(
    room: &RoomSpec,
    ctx: &WaveContext,
    grid: &FdmGrid,
) -> Result<(BandedMatrix, Vec<f64>, Box<dyn Fn(usize, usize) -> usize>)> {
    let k = ctx.wavenumber;
    let f = ctx.frequency;
    let beta_xm = room.axes[0].beta_minus.eval(f)?;
    let beta_xp = room.axes[0].beta_plus.eval(f)?;
    let beta_ym = room.axes[1].beta_minus.eval(f)?;
    let beta_yp = room.axes[1].beta_plus.eval(f)?;
    let (nx, ny, hx, hy) = (grid.nx, grid.ny, grid.hx, grid.hy);

    let index: Box<dyn Fn(usize, usize) -> usize> = if nx <= ny {
        Box::new(move |ix, iy| iy * nx + ix)
    } else {
        Box::new(move |ix, iy| ix * ny + iy)
    };
    let band = nx.min(ny);
    let n = nx * ny;
    let mut a = BandedMatrix::zeros(n, band, band);
    let mut weights = vec![0.0f64; n];
    let ik = Complex64::I * k;

    let wall_w = |i: usize, last: usize| if i == 0 || i == last { 0.5 } else { 1.0 };
    for iy in 0..ny {
        for ix in 0..nx {
            let w = wall_w(ix, nx - 1) * wall_w(iy, ny - 1);
            let row = index(ix, iy);
            weights[row] = w;
            let mut diag = Complex64::new(k * k, 0.0);

            // x direction.
            let cx = 1.0 / (hx * hx);
            if ix == 0 {
                diag += -2.0 * cx - 2.0 * ik * beta_xm / hx;
                a.add(row, index(1, iy), Complex64::new(2.0 * cx * w, 0.0));
            } else if ix == nx - 1 {
                diag += -2.0 * cx - 2.0 * ik * beta_xp / hx;
                a.add(row, index(nx - 2, iy), Complex64::new(2.0 * cx * w, 0.0));
            } else {
                diag += Complex64::new(-2.0 * cx, 0.0);
                a.add(row, index(ix - 1, iy), Complex64::new(cx * w, 0.0));
                a.add(row, index(ix + 1, iy), Complex64::new(cx * w, 0.0));
            }

            // y direction.
            let cy = 1.0 / (hy * hy);
            if iy == 0 {
                diag += -2.0 * cy - 2.0 * ik * beta_ym / hy;
                a.add(row, index(ix, 1), Complex64::new(2.0 * cy * w, 0.0));
            } else if iy == ny - 1 {
                diag += -2.0 * cy - 2.0 * ik * beta_yp / hy;
                a.add(row, index(ix, ny - 2), Complex64::new(2.0 * cy * w, 0.0));
            } else {
                diag += Complex64::new(-2.0 * cy, 0.0);
                a.add(row, index(ix, iy - 1), Complex64::new(cy * w, 0.0));
                a.add(row, index(ix, iy + 1), Complex64::new(cy * w, 0.0));
            }

            a.add(row, row, w * diag);
        }
    }
    Ok((a, weights, index))
}

/// Direct finite-difference solution of the 2D room at the grid resolution
/// `epw` points per wavelength (>= 10). The delta source is discretized as a
/// density of total strength `1/(hx hy)` spread bilinearly over the four
/// nodes of the cell containing it (collapsing to a single node when the
/// source is grid-aligned); nearest-node placement would shift the source by
/// up to `h/2` and cap the scheme at first order.
pub fn fdm_green_2d(
    room: &RoomSpec,
    ctx: &WaveContext,
    x0: [f64; 2],
    epw: f64,
) -> Result<FdmSolution> {
    if room.dim() != 2 {
        return Err(Error::NotTwoDimensional(room.dim()));
    }
    if !(epw >= 10.0) {
        return Err(Error::BadEpw(epw));
    }
    if ctx.wavenumber <= 0.0 {
        return Err(Error::NegativeFrequency(ctx.frequency));
    }
    if !room.contains(&x0, 1e-12) {
        return Err(Error::PointOutsideRoom(x0.to_vec()));
    }
    let grid = build_grid(room, ctx, epw)?;
    let (a, weights, index) = assemble(room, ctx, &grid)?;

    let cell = |coords: &[f64], h: f64, v: f64| -> (usize, f64) {
        let t = (v - coords[0]) / h;
        let i = (t.floor() as usize).min(coords.len() - 2);
        (i, (t - i as f64).clamp(0.0, 1.0))
    };
    let (sx, tx) = cell(&grid.xs, grid.hx, x0[0]);
    let (sy, ty) = cell(&grid.ys, grid.hy, x0[1]);

    let n = grid.nx * grid.ny;
    let mut rhs = vec![Complex64::ZERO; n];
    let strength = -1.0 / (grid.hx * grid.hy);
    for (ix, iy, w) in [
        (sx, sy, (1.0 - tx) * (1.0 - ty)),
        (sx + 1, sy, tx * (1.0 - ty)),
        (sx, sy + 1, (1.0 - tx) * ty),
        (sx + 1, sy + 1, tx * ty),
    ] {
        if w == 0.0 {
            continue;
        }
        let row = index(ix, iy);
        rhs[row] += Complex64::new(strength * w * weights[row], 0.0);
    }

    let lu = a.factor()?;
    let solution = lu.solve(&rhs);

    // Reorder into row-major [iy * nx + ix].
    let mut values = vec![Complex64::ZERO; n];
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            values[iy * grid.nx + ix] = solution[index(ix, iy)];
        }
    }
    Ok(FdmSolution {
        xs: grid.xs,
        ys: grid.ys,
        values,
        frequency: ctx.frequency,
    })
}

/// Assemble the operator and verify complex symmetry across the band;
/// exposed for structural tests.
pub fn fdm_operator_symmetry_defect(room: &RoomSpec, ctx: &WaveContext, epw: f64) -> Result<f64> {
    if room.dim() != 2 {
        return Err(Error::NotTwoDimensional(room.dim()));
    }
    let grid = build_grid(room, ctx, epw)?;
    let (a, _, _) = assemble(room, ctx, &grid)?;
    let n = grid.nx * grid.ny;
    let band = grid.nx.min(grid.ny);
    let mut defect = 0.0f64;
    for i in 0..n {
        for j in i.saturating_sub(band)..i {
            defect = defect.max((a.get(i, j) - a.get(j, i)).norm());
        }
    }
    Ok(defect)
}
