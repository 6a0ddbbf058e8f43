//! Independent root enumeration by the argument principle.
//!
//! The winding number of `v` along a rectangle boundary counts enclosed roots
//! with multiplicity. The phase is tracked by adaptive edge sampling — each
//! segment is refined until its wrapped phase change is below `pi/2` — which
//! stays robust across the enormous dynamic range of `v` without quadrature
//! tuning. Enumeration quadrisectons regions recursively until each piece
//! holds a single root, then polishes it with undamped Newton.
//!
//! This module shares only the residual evaluation with the asymptotics-based
//! solver; counts and locations are otherwise derived from scratch, which is
//! what makes it usable as a fallback and as a test oracle.

use num_complex::Complex64;

use crate::eigensolver::{is_converged, newton_step, residual_parts};
use crate::error::{Error, Result};
use crate::types::GammaPair;

/// Relative clearance below which a contour sample counts as "on a root".
const CLEARANCE_REL: f64 = 1e-12;
/// Wrapped phase change per segment above which the segment is refined.
const PHASE_STEP: f64 = std::f64::consts::FRAC_PI_2;
/// Segment refinement depth cap; reaching it means a root sits on the contour.
const EDGE_DEPTH: u32 = 48;
/// Subdivision depth cap for enumeration.
const MAX_DEPTH: u32 = 60;
/// Regions smaller than this are reported as unresolvable clusters.
const MIN_REGION: f64 = 1e-10;
/// Off-center cut fractions tried when a cut line lands on a root.
const CUT_FRACTIONS: [f64; 5] = [0.5, 0.53, 0.47, 0.59, 0.41];

const TAU: f64 = std::f64::consts::TAU;

/// Axis-aligned rectangle in the `q_hat` plane.
#[derive(Debug, Clone, Copy)]
pub struct SearchRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchRegion {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max)
            || ![re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite())
        {
            return Err(Error::BadRegion(format!(
                "need re_min < re_max and im_min < im_max, got [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn max_dim(&self) -> f64 {
        self.width().max(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    fn expanded(&self, delta: f64) -> Self {
        Self {
            re_min: self.re_min - delta,
            re_max: self.re_max + delta,
            im_min: self.im_min - delta,
            im_max: self.im_max + delta,
        }
    }

    fn contains(&self, q: Complex64, margin: f64) -> bool {
        q.re >= self.re_min - margin
            && q.re <= self.re_max + margin
            && q.im >= self.im_min - margin
            && q.im <= self.im_max + margin
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

fn wrap_phase(d: f64) -> f64 {
    let r = d.rem_euclid(TAU);
    if r > std::f64::consts::PI {
        r - TAU
    } else {
        r
    }
}

fn sample_arg(q: Complex64, g: &GammaPair) -> Result<f64> {
    let parts = residual_parts(q, g);
    if !parts.arg.is_finite() {
        return Err(Error::NonFinite(q));
    }
    if parts.relative <= CLEARANCE_REL {
        return Err(Error::ContourOnRoot(q));
    }
    Ok(parts.arg)
}

/// Total phase change of `v` along the straight edge `z0 -> z1`.
fn edge_phase_change(z0: Complex64, z1: Complex64, g: &GammaPair) -> Result<f64> {
    let len = (z1 - z0).norm();
    let segments = ((4.0 * len).ceil() as usize + 4).min(100_000);
    let mut total = 0.0;
    let mut t_prev = 0.0;
    let mut a_prev = sample_arg(z0, g)?;
    for s in 1..=segments {
        let t = s as f64 / segments as f64;
        let a = sample_arg(z0 + t * (z1 - z0), g)?;
        total += refine_segment(z0, z1, t_prev, a_prev, t, a, g, 0)?;
        t_prev = t;
        a_prev = a;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine_segment(
    z0: Complex64,
    z1: Complex64,
    t0: f64,
    a0: f64,
    t1: f64,
    a1: f64,
    g: &GammaPair,
    depth: u32,
) -> Result<f64> {
    let d = wrap_phase(a1 - a0);
    if d.abs() < PHASE_STEP {
        return Ok(d);
    }
    if depth >= EDGE_DEPTH {
        // Phase keeps swinging across a vanishing segment: a root is
        // effectively on the contour.
        return Err(Error::ContourOnRoot(z0 + 0.5 * (t0 + t1) * (z1 - z0)));
    }
    let tm = 0.5 * (t0 + t1);
    let am = sample_arg(z0 + tm * (z1 - z0), g)?;
    Ok(refine_segment(z0, z1, t0, a0, tm, am, g, depth + 1)?
        + refine_segment(z0, z1, tm, am, t1, a1, g, depth + 1)?)
}

/// Winding number of `v` along the positively oriented region boundary,
/// with no retry on clearance failure.
fn winding_exact(region: &SearchRegion, g: &GammaPair) -> Result<i64> {
    let c = region.corners();
    let mut total = 0.0;
    for e in 0..4 {
        total += edge_phase_change(c[e], c[(e + 1) % 4], g)?;
    }
    let turns = total / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 0.25 {
        // Phase accounting failed to close; treat like a contour hit so
        // callers retry with a perturbed region.
        return Err(Error::ContourOnRoot(region.center()));
    }
    Ok(rounded as i64)
}

/// Number of roots of `v` (with multiplicity) inside the region.
///
/// A region whose boundary passes too close to a root is expanded outward by
/// multiples of `1e-4` and retried, up to 5 times.
pub fn winding_count(region: &SearchRegion, g: &GammaPair) -> Result<i64> {
    let mut last = Error::ContourOnRoot(region.center());
    for attempt in 0..=5 {
        let r = region.expanded(attempt as f64 * 1e-4);
        match winding_exact(&r, g) {
            Ok(w) => return Ok(w),
            Err(e @ Error::ContourOnRoot(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// An unresolvable multiple root: a sub-`MIN_REGION` box still holding
/// `multiplicity` roots.
#[derive(Debug, Clone, Copy)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: i64,
}

/// Result of a region enumeration.
#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Simple roots, polished to `|v| <= tol` (relative), pairwise distinct.
    pub roots: Vec<Complex64>,
    /// Root clusters that could not be separated (degenerate parameters).
    pub clusters: Vec<RootCluster>,
    /// Winding number of the whole region.
    pub winding: i64,
}

/// Find every root of `v` in the region by recursive quadrisection.
pub fn enumerate_roots(region: &SearchRegion, g: &GammaPair, tol: f64) -> Result<Enumeration> {
    // Nudge the outer boundary off any root before starting.
    let mut outer = *region;
    let mut winding = None;
    for attempt in 0..=5 {
        outer = region.expanded(attempt as f64 * 1e-4);
        match winding_exact(&outer, g) {
            Ok(w) => {
                winding = Some(w);
                break;
            }
            Err(Error::ContourOnRoot(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let winding = winding.ok_or(Error::ContourOnRoot(region.center()))?;
    let mut out = Enumeration {
        roots: Vec::new(),
        clusters: Vec::new(),
        winding,
    };
    subdivide(&outer, winding, g, tol, 0, &mut out)?;
    // Separated subregions yield distinct roots already; enforce the
    // pairwise-distinct contract anyway.
    out.roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("finite roots")
    });
    out.roots.dedup_by(|a, b| (*a - *b).norm() <= tol);
    Ok(out)
}

fn subdivide(
    region: &SearchRegion,
    w: i64,
    g: &GammaPair,
    tol: f64,
    depth: u32,
    out: &mut Enumeration,
) -> Result<()> {
    if w == 0 {
        return Ok(());
    }
    if w < 0 {
        // v is entire; a negative count means broken phase accounting.
        return Err(Error::ContourOnRoot(region.center()));
    }
    if region.max_dim() < MIN_REGION {
        if w == 1 {
            out.roots.push(polish(region, g, tol).unwrap_or_else(|| region.center()));
        } else {
            out.clusters.push(RootCluster {
                center: region.center(),
                multiplicity: w,
            });
        }
        return Ok(());
    }
    if w == 1 {
        if let Some(root) = polish(region, g, tol) {
            out.roots.push(root);
            return Ok(());
        }
        // Newton escaped the box; keep splitting.
    }
    if depth >= MAX_DEPTH {
        return Err(Error::MaxDepth(region.center()));
    }
    'cut: for fraction in CUT_FRACTIONS {
        let xc = region.re_min + fraction * region.width();
        let yc = region.im_min + fraction * region.height();
        let children = [
            SearchRegion { re_min: region.re_min, re_max: xc, im_min: region.im_min, im_max: yc },
            SearchRegion { re_min: xc, re_max: region.re_max, im_min: region.im_min, im_max: yc },
            SearchRegion { re_min: region.re_min, re_max: xc, im_min: yc, im_max: region.im_max },
            SearchRegion { re_min: xc, re_max: region.re_max, im_min: yc, im_max: region.im_max },
        ];
        let mut counts = [0i64; 4];
        for (i, child) in children.iter().enumerate() {
            match winding_exact(child, g) {
                Ok(cw) => counts[i] = cw,
                Err(Error::ContourOnRoot(_)) => continue 'cut,
                Err(e) => return Err(e),
            }
        }
        if counts.iter().sum::<i64>() != w {
            // A root sits close enough to a cut to leak phase; this cut is
            // unusable.
            continue 'cut;
        }
        for (child, cw) in children.iter().zip(counts) {
            subdivide(child, cw, g, tol, depth + 1, out)?;
        }
        return Ok(());
    }
    Err(Error::ContourOnRoot(region.center()))
}

/// Undamped Newton from the region center; `Some` only when the iteration
/// stays in (or returns to) the region and meets the residual tolerance.
fn polish(region: &SearchRegion, g: &GammaPair, tol: f64) -> Option<Complex64> {
    let mut q = region.center();
    let escape = region.max_dim();
    for _ in 0..100 {
        if !region.contains(q, escape) {
            return None;
        }
        let step = newton_step(q, g)?;
        q -= step;
        if step.norm() <= 1e-15 * q.norm().max(1.0) {
            break;
        }
    }
    let margin = 1e-9 * region.max_dim().max(1e-30) + 1e-12;
    if region.contains(q, margin) && is_converged(q, g, tol) {
        Some(q)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rigid_wall_integer_roots_counted() {
        let g = GammaPair::rigid();
        let region = SearchRegion::new(0.5, 5.5, -1.0, 1.0).unwrap();
        assert_eq!(winding_count(&region, &g).unwrap(), 5);
    }

    #[test]
    fn degenerate_origin_is_a_triple_root() {
        // gamma_- = gamma_+ = 2i satisfies g-g+ = i(g- + g+).
        let g = GammaPair::new(c(0.0, 2.0), c(0.0, 2.0));
        let region = SearchRegion::new(-0.4, 0.4, -0.4, 0.4).unwrap();
        assert_eq!(winding_count(&region, &g).unwrap(), 3);
    }

    #[test]
    fn winding_is_additive_over_partitions() {
        let g = GammaPair::new(c(0.9, 0.9), c(1.8, 0.0));
        let whole = SearchRegion::new(0.1, 8.3, -0.7, 4.9).unwrap();
        let left = SearchRegion::new(0.1, 3.7, -0.7, 4.9).unwrap();
        let right = SearchRegion::new(3.7, 8.3, -0.7, 4.9).unwrap();
        let w = winding_count(&whole, &g).unwrap();
        let wl = winding_count(&left, &g).unwrap();
        let wr = winding_count(&right, &g).unwrap();
        assert_eq!(w, wl + wr);
        assert!(w > 0);
    }

    #[test]
    fn enumerate_rigid_integers() {
        let g = GammaPair::rigid();
        let region = SearchRegion::new(0.5, 5.5, -1.0, 1.0).unwrap();
        let e = enumerate_roots(&region, &g, 1e-12).unwrap();
        assert_eq!(e.winding, 5);
        assert!(e.clusters.is_empty());
        assert_eq!(e.roots.len(), 5);
        for (i, r) in e.roots.iter().enumerate() {
            assert!((r - c((i + 1) as f64, 0.0)).norm() < 1e-12, "root {r}");
        }
    }

    #[test]
    fn enumerate_empty_region() {
        let g = GammaPair::rigid();
        let region = SearchRegion::new(5.6, 5.9, 0.3, 0.9).unwrap();
        let e = enumerate_roots(&region, &g, 1e-10).unwrap();
        assert_eq!(e.winding, 0);
        assert!(e.roots.is_empty() && e.clusters.is_empty());
    }

    #[test]
    fn enumerated_roots_pass_residual_reevaluation() {
        let g = GammaPair::new(c(9.157, 9.157), c(18.315, 6.410));
        let region = SearchRegion::new(0.05, 8.5, -0.05, 5.0).unwrap();
        let e = enumerate_roots(&region, &g, 1e-10).unwrap();
        assert_eq!(e.winding as usize, e.roots.len());
        for r in &e.roots {
            assert!(is_converged(*r, &g, 1e-10), "root {r}");
        }
    }

    #[test]
    fn region_validation() {
        assert!(SearchRegion::new(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(SearchRegion::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(SearchRegion::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }
}
