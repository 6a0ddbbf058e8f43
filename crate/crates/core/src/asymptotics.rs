//! Closed-form first-order guesses for the eigenvalue condition and the
//! regime-selection logic that turns them into a candidate list.
//!
//! Four guess families cover complementary wall regimes:
//!
//! * hard walls — perturbation of the integer roots,
//! * soft walls — perturbation proportional to the branch index,
//! * negative reactance — roots near `gamma_± / pi` high in the upper half
//!   plane, with a two-point correction when the walls are identical,
//! * highly asymmetric walls — perturbation of the tangent poles at
//!   half-integers.
//!
//! Generation is over-inclusive by design: duplicated or spurious guesses are
//! cheap, Newton refinement and deduplication discard them, and missing a
//! basin is the only failure that matters.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::types::GammaPair;

/// Relative wall-symmetry threshold under which the corrected two-point
/// negative-reactance guesses are used.
pub const SYMMETRIC_TOL: f64 = 1e-9;

/// Provenance of a root guess (and, downstream, of an accepted root).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    /// Hard-wall branch near integer `n`.
    G1,
    /// Soft-wall branch near integer `n`.
    G2,
    /// Negative-reactance root near `gamma_- / pi` or `gamma_+ / pi`.
    G3,
    /// Symmetric-wall correction, `+` sign.
    G3SymPlus,
    /// Symmetric-wall correction, `-` sign.
    G3SymMinus,
    /// Asymmetric-wall branch near half-integer `n + 1/2`.
    G1P,
    /// The constant eigenfunction appended for exactly rigid walls.
    Constant,
    /// Recovered by the argument-principle fallback, not by a guess family.
    Oracle,
}

impl Group {
    pub fn label(&self) -> &'static str {
        match self {
            Group::G1 => "1",
            Group::G2 => "2",
            Group::G3 => "3",
            Group::G3SymPlus => "3+",
            Group::G3SymMinus => "3-",
            Group::G1P => "1P",
            Group::Constant => "const",
            Group::Oracle => "oracle",
        }
    }
}

/// One eigenvalue guess with its provenance.
#[derive(Debug, Clone, Copy)]
pub struct Candidate {
    pub q_hat: Complex64,
    pub group: Group,
    /// Asymptotic branch index; unused for the negative-reactance family.
    pub index: usize,
}

/// Hard-wall guess: `q_hat ~ (n + sqrt(n^2 + 4 i (gamma_- + gamma_+) / pi^2)) / 2`.
///
/// The principal square root keeps the result in the right half plane.
pub fn group1_guess(n: usize, g: &GammaPair) -> Complex64 {
    let n = n as f64;
    let disc = Complex64::new(n * n, 0.0) + 4.0 * Complex64::I * g.sum() / (PI * PI);
    0.5 * (n + disc.sqrt())
}

/// Soft-wall guess: `q_hat ~ n (1 + i / (gamma_parallel - i))`.
pub fn group2_guess(n: usize, g: &GammaPair) -> Result<Complex64> {
    let gp = g.gamma_parallel().ok_or(Error::GammaSumZero)?;
    Ok((n as f64) * (1.0 + Complex64::I / (gp - Complex64::I)))
}

/// Negative-reactance guesses.
///
/// Asymmetric walls yield up to two one-point guesses `gamma_± / pi`, each
/// admissible only when the corresponding `Im(gamma) > 0`. Nearly identical
/// walls collapse those to a double point, so the corrected pair
/// `(gamma / pi)(1 ± 2 e^{i gamma})` is emitted instead.
pub fn group3_guesses(g: &GammaPair, symmetric_tol: f64) -> Vec<Candidate> {
    let (gm, gp) = (g.gamma_minus, g.gamma_plus);
    let symmetric = (gm - gp).norm() <= symmetric_tol * gm.norm().max(1.0);
    if symmetric {
        if gm.im <= 0.0 {
            return Vec::new();
        }
        let split = 2.0 * (Complex64::I * gm).exp();
        return vec![
            Candidate {
                q_hat: gm / PI * (1.0 + split),
                group: Group::G3SymPlus,
                index: 0,
            },
            Candidate {
                q_hat: gm / PI * (1.0 - split),
                group: Group::G3SymMinus,
                index: 0,
            },
        ];
    }
    let mut out = Vec::new();
    for gamma in [gm, gp] {
        if gamma.im > 0.0 {
            out.push(Candidate {
                q_hat: gamma / PI,
                group: Group::G3,
                index: 0,
            });
        }
    }
    out
}

/// Asymmetric-wall guess: `q_hat ~ (n + 1/2)(1 + i / (gamma_- + gamma_+))`.
pub fn group1p_guess(n: usize, g: &GammaPair) -> Result<Complex64> {
    let s = g.sum();
    if s == Complex64::ZERO {
        return Err(Error::GammaSumZero);
    }
    Ok((n as f64 + 0.5) * (1.0 + Complex64::I / s))
}

/// All candidates for branch indices `0..=n_max`.
///
/// Regime attribution per index follows the cutoffs, inclusively at the
/// boundaries so that no transition index is left uncovered:
/// hard-wall guesses for `n >= A_soft` (or everywhere when `A_soft < 1`),
/// soft-wall guesses for `n <= A_soft`, asymmetric-wall guesses for
/// `A_soft <= n <= A_asym`, plus every negative-reactance guess.
pub fn candidate_set(g: &GammaPair, n_max: usize) -> Vec<Candidate> {
    let a_soft = g.soft_wall_cutoff();
    let a_asym = g.asymmetric_cutoff();
    let has_sum = g.sum() != Complex64::ZERO;
    let mut out = Vec::new();
    for n in 0..=n_max {
        let nf = n as f64;
        if nf >= a_soft || a_soft < 1.0 {
            out.push(Candidate {
                q_hat: group1_guess(n, g),
                group: Group::G1,
                index: n,
            });
        }
        if has_sum && nf <= a_soft {
            out.push(Candidate {
                q_hat: group2_guess(n, g).expect("sum checked nonzero"),
                group: Group::G2,
                index: n,
            });
        }
        if has_sum && nf <= a_asym && nf >= a_soft {
            out.push(Candidate {
                q_hat: group1p_guess(n, g).expect("sum checked nonzero"),
                group: Group::G1P,
                index: n,
            });
        }
    }
    out.extend(group3_guesses(g, SYMMETRIC_TOL));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn group1_rigid_walls_are_integers() {
        let g = GammaPair::rigid();
        for n in 0..10 {
            let q = group1_guess(n, &g);
            assert_relative_eq!(q.re, n as f64, max_relative = 1e-14);
            assert_eq!(q.im, 0.0);
        }
    }

    #[test]
    fn group1_n0_closed_form() {
        // At n = 0 the formula reduces to sqrt(i (gamma_- + gamma_+)) / pi.
        let g = GammaPair::new(c(0.7, 0.3), c(0.1, -0.2));
        let expected = (Complex64::I * g.sum()).sqrt() / PI;
        let got = group1_guess(0, &g);
        assert_relative_eq!(got.re, expected.re, max_relative = 1e-14);
        assert_relative_eq!(got.im, expected.im, max_relative = 1e-14);
    }

    #[test]
    fn group1_right_half_plane() {
        for (gm, gp) in [
            (c(3.0, 4.0), c(-2.0, 7.0)),
            (c(0.0, -9.0), c(0.0, -1.0)),
            (c(100.0, 0.0), c(0.0, 55.0)),
        ] {
            let g = GammaPair::new(gm, gp);
            for n in 0..6 {
                assert!(group1_guess(n, &g).re >= 0.0);
            }
        }
    }

    #[test]
    fn group2_scales_with_index_and_limits() {
        let g = GammaPair::new(c(2.0, 1.0), c(3.0, 0.5));
        assert_eq!(group2_guess(0, &g).unwrap(), Complex64::ZERO);
        // Pressure-release limit: enormous parallel admittance recovers n.
        let g = GammaPair::new(c(1e9, 0.0), c(1e9, 0.0));
        let q = group2_guess(4, &g).unwrap();
        assert_relative_eq!(q.re, 4.0, max_relative = 1e-8);
        assert!(q.im.abs() < 1e-8);
    }

    #[test]
    fn group2_requires_parallel_combination() {
        let g = GammaPair::new(c(1.0, 1.0), c(-1.0, -1.0));
        assert!(matches!(group2_guess(1, &g), Err(Error::GammaSumZero)));
    }

    #[test]
    fn group3_symmetric_emits_corrected_pair() {
        let gamma = c(2.0, 3.0);
        let g = GammaPair::new(gamma, gamma);
        let cands = group3_guesses(&g, SYMMETRIC_TOL);
        assert_eq!(cands.len(), 2);
        let split = 2.0 * (Complex64::I * gamma).exp();
        let plus = gamma / PI * (1.0 + split);
        let minus = gamma / PI * (1.0 - split);
        assert!((cands[0].q_hat - plus).norm() < 1e-14);
        assert!((cands[1].q_hat - minus).norm() < 1e-14);
        assert!((cands[0].q_hat - cands[1].q_hat).norm() > 0.0);
    }

    #[test]
    fn group3_requires_positive_reactance() {
        let g = GammaPair::new(c(2.0, -0.1), c(3.0, 0.0));
        assert!(group3_guesses(&g, SYMMETRIC_TOL).is_empty());
        let g = GammaPair::new(c(2.0, 0.5), c(3.0, -1.0));
        let cands = group3_guesses(&g, SYMMETRIC_TOL);
        assert_eq!(cands.len(), 1);
        assert!((cands[0].q_hat - c(2.0, 0.5) / PI).norm() < 1e-14);
    }

    #[test]
    fn group1p_pole_limit_and_error() {
        let g = GammaPair::new(c(1e12, 0.0), c(0.0, 0.0));
        let q = group1p_guess(3, &g).unwrap();
        assert_relative_eq!(q.re, 3.5, max_relative = 1e-10);
        assert!(matches!(
            group1p_guess(0, &GammaPair::rigid()),
            Err(Error::GammaSumZero)
        ));
    }

    #[test]
    fn candidate_set_rigid_is_exactly_integers() {
        let g = GammaPair::rigid();
        let cands = candidate_set(&g, 5);
        assert_eq!(cands.len(), 6);
        for (n, cand) in cands.iter().enumerate() {
            assert_eq!(cand.group, Group::G1);
            assert_relative_eq!(cand.q_hat.re, n as f64, max_relative = 1e-14);
        }
    }

    #[test]
    fn candidate_set_all_finite() {
        for (gm, gp) in [
            (c(0.9, 0.9), c(1.8, 0.0)),
            (c(9.2, 9.2), c(18.3, 6.4)),
            (c(9.2, 5.5), c(0.0, 0.0)),
            (c(450.0, 200.0), c(1.0, -0.5)),
        ] {
            for cand in candidate_set(&GammaPair::new(gm, gp), 12) {
                assert!(cand.q_hat.re.is_finite() && cand.q_hat.im.is_finite());
            }
        }
    }

    #[test]
    fn candidate_set_covers_asymmetric_low_branches() {
        // One soft wall against a rigid one: A_soft = 0, so the half-integer
        // family must appear from n = 0 up to the asymmetric cutoff.
        let g = GammaPair::new(c(9.157, 5.494), c(0.0, 0.0));
        let cands = candidate_set(&g, 8);
        let p_idx: Vec<usize> = cands
            .iter()
            .filter(|cand| cand.group == Group::G1P)
            .map(|cand| cand.index)
            .collect();
        assert_eq!(p_idx, vec![0, 1, 2, 3]);
    }
}
