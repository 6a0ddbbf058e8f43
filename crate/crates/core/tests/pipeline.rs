//! Cross-module checks of the eigenvalue pipeline against the
//! argument-principle enumerator.

use num_complex::Complex64;
use rectroom::asymptotics::Group;
use rectroom::eigensolver::{
    backward_error, count_formula_provable, expected_count, fallback_im_bound, residual,
    solve_axis, DEGENERACY_TOL,
};
use rectroom::oracle::{enumerate_roots, winding_count, SearchRegion};
use rectroom::{GammaPair, SolverParams};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The three wall configurations of the eigenvalue validation study:
/// l = 1 m, f = 5000 Hz, c = 343 m/s.
pub fn study_gammas() -> [GammaPair; 3] {
    let kl = 2.0 * std::f64::consts::PI * 5000.0 / 343.0;
    let gamma = |bm: Complex64, bp: Complex64| GammaPair::new(bm * kl, bp * kl);
    [
        gamma(c(0.01, 0.01), c(0.02, 0.0)), // hard walls
        gamma(c(0.1, 0.1), c(0.2, 0.07)),   // soft walls
        gamma(c(0.1, 0.06), c(0.0, 0.0)),   // highly asymmetric walls
    ]
}

#[test]
fn study_configs_give_nine_roots_with_tiny_residuals() {
    let params = SolverParams { n_max: 8, ..Default::default() };
    for (i, g) in study_gammas().iter().enumerate() {
        let set = solve_axis(g, &params).unwrap();
        let in_circle: Vec<_> = set
            .roots
            .iter()
            .filter(|r| r.q_hat.norm() <= 8.5)
            .collect();
        assert_eq!(in_circle.len(), 9, "config {i}: {:?}", set.roots);
        for root in &in_circle {
            let raw = residual(root.q_hat, g).norm();
            assert!(raw < 1e-10, "config {i}: root {} has |v| = {raw:.3e}", root.q_hat);
        }
        assert_eq!(expected_count(8, g, DEGENERACY_TOL), 9);
    }
}

#[test]
fn study_configs_winding_count_confirms_nine() {
    let region = SearchRegion::new(0.05, 8.5, -0.05, 5.0).unwrap();
    for (i, g) in study_gammas().iter().enumerate() {
        assert_eq!(winding_count(&region, g).unwrap(), 9, "config {i}");
    }
}

#[test]
fn solver_and_enumerator_agree_on_study_configs() {
    let params = SolverParams { n_max: 8, ..Default::default() };
    for (i, g) in study_gammas().iter().enumerate() {
        let set = solve_axis(g, &params).unwrap();
        let im = fallback_im_bound(g);
        let region = SearchRegion::new(0.0, 9.0, -im, im).unwrap();
        let enumeration = enumerate_roots(&region, g, 1e-10).unwrap();
        assert!(enumeration.clusters.is_empty(), "config {i}");
        // Canonical representatives of enumerated roots (right half plane,
        // trivial root dropped).
        let mut oracle: Vec<Complex64> = enumeration
            .roots
            .iter()
            .map(|&q| if q.re < 0.0 { -q } else { q })
            .filter(|q| q.norm() > params.zero_tol)
            .collect();
        oracle.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        oracle.dedup_by(|a, b| (*a - *b).norm() <= params.dedup_tol);

        // Every solver root is genuine: matched by an enumerated root.
        for found in &set.roots {
            assert!(
                oracle.iter().any(|q| (found.q_hat - q).norm() < 1e-8),
                "config {i}: solver root {} not enumerated",
                found.q_hat
            );
        }
        // Completeness inside the counting circle: no enumerated root there
        // is missing from the solver set.
        let radius = params.n_max as f64 + 0.5;
        for q in oracle.iter().filter(|q| q.norm() <= radius) {
            assert!(
                set.roots.iter().any(|r| (r.q_hat - q).norm() < 1e-8),
                "config {i}: enumerated root {q} missed by solver"
            );
        }
    }
}

#[test]
fn hard_wall_study_config_uses_group_one_without_fallback() {
    let params = SolverParams { n_max: 8, ..Default::default() };
    let set = solve_axis(&study_gammas()[0], &params).unwrap();
    assert!(!set.oracle_fallback);
    assert!(set.roots.iter().all(|r| r.group != Group::Oracle));
}

#[test]
fn asymmetric_study_config_covers_half_integer_branches() {
    // Low branches refine from the tangent-pole family.
    let params = SolverParams { n_max: 8, ..Default::default() };
    let set = solve_axis(&study_gammas()[2], &params).unwrap();
    let near_half_integers = set
        .roots
        .iter()
        .filter(|r| {
            let frac = r.q_hat.re.fract();
            r.q_hat.re < 4.0 && (frac - 0.5).abs() < 0.2
        })
        .count();
    assert!(near_half_integers >= 3, "roots: {:?}", set.roots);
}

#[test]
fn degenerate_gamma_pair_counts_m_roots() {
    // g+ = i g- / (g- - i) forces the degenerate branch; the origin becomes
    // a triple root and the circle holds exactly m nontrivial roots.
    let gm = c(0.0, 2.0);
    let gp = Complex64::I * gm / (gm - Complex64::I);
    let g = GammaPair::new(gm, gp);
    assert_eq!(expected_count(3, &g, DEGENERACY_TOL), 3);
    let params = SolverParams { n_max: 3, ..Default::default() };
    let set = solve_axis(&g, &params).unwrap();
    assert_eq!(set.in_circle_count(3.5), 3, "roots: {:?}", set.roots);

    let region = SearchRegion::new(-0.4, 0.4, -0.4, 0.4).unwrap();
    assert_eq!(winding_count(&region, &g).unwrap(), 3, "triple origin");
}

#[test]
fn root_set_invariant_under_candidate_shuffling() {
    use rectroom::asymptotics::candidate_set;
    use rectroom::eigensolver::{canonicalize_and_dedup, newton_refine};

    let g = study_gammas()[1];
    let params = SolverParams { n_max: 8, ..Default::default() };
    let mut cands = candidate_set(&g, params.n_max);
    let (refined, _) = newton_refine(&cands, &g, &params);
    let baseline = canonicalize_and_dedup(&refined, &params);

    // Deterministic pseudo-shuffle.
    let mut state = 0x2545f4914f6cdd1du64;
    for i in (1..cands.len()).rev() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        cands.swap(i, (state as usize) % (i + 1));
    }
    let (refined, _) = newton_refine(&cands, &g, &params);
    let shuffled = canonicalize_and_dedup(&refined, &params);

    assert_eq!(baseline.len(), shuffled.len());
    for (a, b) in baseline.iter().zip(&shuffled) {
        assert!((a.q_hat - b.q_hat).norm() <= params.dedup_tol);
    }
}

#[test]
fn accepted_roots_have_mirror_roots() {
    let params = SolverParams { n_max: 8, ..Default::default() };
    for g in study_gammas() {
        let set = solve_axis(&g, &params).unwrap();
        for root in &set.roots {
            // v is odd, so -q_hat must be a root as well.
            assert!(backward_error(-root.q_hat, &g) < 1e-9 * root.q_hat.norm().max(1.0));
        }
    }
}

#[test]
fn count_formula_validity_condition_is_monotone() {
    let g = GammaPair::new(c(30.0, 10.0), c(5.0, 2.0));
    assert!(!count_formula_provable(1, &g));
    assert!(count_formula_provable(40, &g));
}
