//! The extremal three-point solver.
//!
//! Pipeline of [`solve_extremal`]:
//! 1. move node 1 to (0, 0) and target 1 to 0 by disk automorphisms;
//! 2. bracket the extremal scale t* between the one-variable scales (where
//!    a function of one coordinate still interpolates) and the pairwise
//!    scales (where a two-point subproblem becomes extremal), then bisect
//!    with the feasibility solver;
//! 3. classify the problem at t*: degenerate if a one-variable scale
//!    reaches t*, two-point extremal if a pairwise scale does;
//! 4. take the near-rank-one feasible pair found just below t*, extract
//!    vectors a, b and polish (a, b, t*) by Newton's method on the
//!    stationarity conditions of t on the rank-one solution surface;
//! 5. write the interpolant by Cramer's rule, carry everything back to the
//!    caller's frame and verify decomposition, interpolation and
//!    innerness.

mod feasibility;
mod kernel;
mod rank_one;
mod rational;

pub use feasibility::{feasible_pair, FeasibilityResult};
pub use kernel::{active_kernel, ActiveKernel};
pub use rank_one::{
    b_from_a, extract_rank_one, refine_fold, refine_newton, residual_jan, FoldPoint,
};
pub use rational::{cramer_phi, RationalInner2, MONOMIALS};

use crate::config::SolverConfig;
use crate::error::{Error, Result, Stage};
use crate::hyperbolic::{normalize_problem, Coord, NormalizationFrame};
use crate::numerics::{CVec3, HermMat3, C64, ZERO};
use crate::pick::{
    build_matrices, min_two_point_scale, one_variable_extremal_scale, ClassKind, Classification,
    PickData3, PickMatrices,
};
use crate::realization::{build_realization, Realization};

/// A stall ends the bisection only inside a bracket this narrow (relative);
/// a stall on a wider bracket means the solver, not the data, is at fault.
const STALL_WIDTH: f64 = 1e-6;

/// Eigenvalue slack (relative) for the one-variable scales.
const ONE_VARIABLE_SLACK: f64 = 1e-13;

/// A permissible pair of rank one, Γ = a⊗a and Δ = b⊗b.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PermissiblePair {
    pub gamma: HermMat3,
    pub delta: HermMat3,
    pub a: CVec3,
    pub b: CVec3,
}

impl PermissiblePair {
    pub fn from_vectors(a: CVec3, b: CVec3) -> Self {
        Self {
            gamma: a.outer_self(),
            delta: b.outer_self(),
            a,
            b,
        }
    }

    /// ‖W − Λ¹∘Γ − Λ²∘Δ‖_F.
    pub fn decomposition_residual(&self, mats: &PickMatrices) -> f64 {
        mats.decomposition_residual(&self.gamma, &self.delta)
    }

    /// Second over first eigenvalue, the larger of the two matrices' ratios.
    pub fn rank_one_ratio(&self) -> f64 {
        [self.gamma, self.delta]
            .iter()
            .map(|m| {
                let e = m.eig();
                e.values[1].abs() / e.values[0]
            })
            .fold(0.0, f64::max)
    }
}

/// Bracket, bisection and classification of the extremal scale of a
/// normalized scaling direction.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleAnalysis {
    /// One-variable extremal scales in z¹ and z².
    pub t_one_variable: [f64; 2],
    /// Smallest pairwise extremal scale and its pair (0-based).
    pub t_two_point: f64,
    pub two_point_pair: (usize, usize),
    /// Final bracket: feasible at `lower`, infeasible (or undecidable) at
    /// `upper`.
    pub lower: f64,
    pub upper: f64,
    pub t_star: f64,
    /// The bisection ended on a stall: both verdicts were out of reach,
    /// which happens only within rounding distance of t*. A stall while the
    /// bracket is still wide is returned as `StallWithoutVerdict` instead.
    pub stalled: bool,
    pub bisection_steps: usize,
    pub feasibility_iterations: usize,
    /// The feasible pair at `lower`, when one was computed.
    pub pair: Option<(HermMat3, HermMat3)>,
    pub classification: Classification,
}

fn all_zero(data: &PickData3) -> bool {
    data.targets().iter().all(|w| *w == ZERO)
}

/// Locates and classifies t* for normalized data (λ₁ = (0,0), w₁ = 0) whose
/// targets are the scaling direction.
pub fn analyze_scale(direction: &PickData3, cfg: &SolverConfig) -> Result<ScaleAnalysis> {
    if all_zero(direction) {
        return Err(Error::AllZeroTargets);
    }
    let t1 = one_variable_extremal_scale(direction, Coord::Z1, ONE_VARIABLE_SLACK);
    let t2 = one_variable_extremal_scale(direction, Coord::Z2, ONE_VARIABLE_SLACK);
    let (tp, pair_ij) = min_two_point_scale(direction);
    let wmax = direction
        .targets()
        .iter()
        .map(|w| w.norm())
        .fold(0.0, f64::max);
    let hi0 = tp.min(1.0 / wmax);
    let mut lo = t1.max(t2).min(hi0);
    let mut hi = hi0;

    let mut pair = None;
    let mut stalled = false;
    let mut steps = 0;
    let mut iterations = 0;
    while hi - lo > cfg.t_tol {
        let mid = 0.5 * (lo + hi);
        steps += 1;
        let mats = build_matrices(&direction.scaled_unchecked(mid));
        match feasible_pair(&mats, cfg) {
            Ok(FeasibilityResult::Feasible {
                gamma,
                delta,
                iterations: it,
                ..
            }) => {
                iterations += it;
                lo = mid;
                pair = Some((gamma, delta));
            }
            Ok(FeasibilityResult::Infeasible { iterations: it, .. }) => {
                iterations += it;
                hi = mid;
            }
            Err(Error::StallWithoutVerdict { iterations: it, .. })
                if hi - lo <= STALL_WIDTH * hi.max(1.0) =>
            {
                iterations += it;
                stalled = true;
                hi = mid;
                break;
            }
            Err(e) => return Err(e.at(Stage::Feasibility)),
        }
    }
    let t_star = if stalled { hi } else { 0.5 * (lo + hi) };
    let band = cfg.two_point_band.max(10.0 * cfg.t_tol) * t_star.max(1.0);

    // After a stall t* is only known to lie in [lo, hi]; each comparison
    // uses the end of that interval that favours the special case.
    let classification = if t1.max(t2) >= lo - band {
        let k = if t1 >= t2 { Coord::Z1 } else { Coord::Z2 };
        Classification {
            kind: ClassKind::degenerate(k),
            details: format!(
                "a function of z{} alone interpolates up to scale {:.12}, which reaches t* = {t_star:.12}",
                k.index(),
                t1.max(t2)
            ),
        }
    } else if tp - hi <= band {
        Classification {
            kind: ClassKind::TwoPointExtremal(pair_ij.0, pair_ij.1),
            details: format!(
                "nodes {} and {} become a two-point extremal problem at scale {tp:.12}, which t* = {t_star:.12} reaches",
                pair_ij.0 + 1,
                pair_ij.1 + 1
            ),
        }
    } else {
        Classification {
            kind: ClassKind::NonDegenerateCandidate,
            details: format!(
                "t* = {t_star:.12} lies strictly between the one-variable scale {:.12} and the two-point scale {tp:.12}",
                t1.max(t2)
            ),
        }
    };

    Ok(ScaleAnalysis {
        t_one_variable: [t1, t2],
        t_two_point: tp,
        two_point_pair: pair_ij,
        lower: lo,
        upper: hi,
        t_star,
        stalled,
        bisection_steps: steps,
        feasibility_iterations: iterations,
        pair,
        classification,
    })
}

/// sup{t > 0 : the normalized problem with targets t·w′ has a permissible
/// pair}, where w′ are the targets after moving w₁ to 0.
///
/// Fails with `DegenerateAtExtreme` when a function of one coordinate
/// already solves the problem at t*.
pub fn extremal_t(data: &PickData3, cfg: &SolverConfig) -> Result<f64> {
    let (direction, _) = normalize_problem(data);
    let s = analyze_scale(&direction, cfg).map_err(|e| e.at(Stage::ExtremalScale))?;
    if matches!(
        s.classification.kind,
        ClassKind::Degenerate1 | ClassKind::Degenerate2
    ) {
        return Err(Error::DegenerateAtExtreme(s.classification.details).at(Stage::ExtremalScale));
    }
    Ok(s.t_star)
}

/// How the final (a, b, t*) was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Refinement {
    /// Newton on the stationarity conditions of t.
    Fold,
    /// The stationarity Newton failed or left the bisection bracket (for
    /// instance by converging to a rank-one pair on a non-extremal branch
    /// at `rejected_t`); a fixed-scale Newton at the bracket's feasible end
    /// was used instead.
    FixedScale { rejected_t: Option<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub scale: ScaleAnalysis,
    pub refinement: Refinement,
    pub newton_iterations: usize,
    /// Frobenius distance between the feasible pair found by bisection and
    /// the refined rank-one pair (normalized frame).
    pub seed_distance: f64,
    /// Reduced-system residuals of the refined vectors (normalized frame).
    pub reduced_residual: [f64; 4],
    pub decomposition_residual: f64,
    pub decomposition_residual_normalized: f64,
    pub interpolation_residual: f64,
    pub interpolation_residual_normalized: f64,
    pub torus_deviation: f64,
    pub kernel: ActiveKernel,
}

/// Result of [`solve_extremal`].
///
/// `phi` solves the scaled problem λᵢ ↦ ŵᵢ (`scaled_data`), where
/// ŵᵢ = m⁻¹(t*·m(wᵢ)) and m is the disk automorphism moving w₁ to 0. When
/// w₁ = 0 this is plain scaling ŵ = t*·w, and (1/t*)·φ is then the unique
/// solution of minimal norm of the original data.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub t_star: f64,
    pub classification: Classification,
    pub scaled_data: PickData3,
    pub pair: PermissiblePair,
    pub phi: RationalInner2,
    pub frame: NormalizationFrame,
    /// The normalized problem at scale t*.
    pub normalized_data: PickData3,
    pub normalized_pair: PermissiblePair,
    pub normalized_phi: RationalInner2,
    pub diagnostics: Diagnostics,
}

impl SolveReport {
    /// 1/t*: the minimal norm of an interpolant of the original data when
    /// w₁ = 0.
    pub fn minimal_norm(&self) -> f64 {
        1.0 / self.t_star
    }

    /// The transfer-function realization of the solution (caller's frame).
    pub fn realization(&self, cfg: &SolverConfig) -> Result<Realization> {
        build_realization(
            &self.pair.a,
            &self.pair.b,
            &self.scaled_data,
            cfg.gram_tol,
            cfg.rank_tol,
        )
        .map_err(|e| e.at(Stage::Realization))
    }
}

/// Carries vectors of the normalized problem back to the caller's frame:
/// aᵢ = √(c₁/c_w)·a′ᵢ·conj(h¹ᵢ/kᵢ) with c₁ = 1 − |λ₁¹|², c_w = 1 − |w₁|²,
/// h¹ᵢ = 1/(1 − conj(λ₁¹)λᵢ¹), kᵢ = 1/(1 − conj(w₁)ŵᵢ), likewise for b.
fn denormalize_vectors(
    a: &CVec3,
    b: &CVec3,
    original: &PickData3,
    scaled: &[C64; 3],
) -> (CVec3, CVec3) {
    let n = original.nodes();
    let p1 = n[0].z1;
    let p2 = n[0].z2;
    let w1 = original.targets()[0];
    let cw = 1.0 - w1.norm_sqr();
    let k = scaled.map(|w| C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - w1.conj() * w));
    let map = |v: &CVec3, p: C64, coord: fn(&crate::hyperbolic::BidiskPoint) -> C64| {
        let c = (1.0 - p.norm_sqr()) / cw;
        let mut out = CVec3::zeros();
        for i in 0..3 {
            let h = C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - p.conj() * coord(&n[i]));
            out[i] = v[i] * (h / k[i]).conj() * c.sqrt();
        }
        rank_one::phase_normalize(&out)
    };
    (map(a, p1, |q| q.z1), map(b, p2, |q| q.z2))
}

fn check(check: &'static str, residual: f64, tolerance: f64) -> Result<()> {
    if residual <= tolerance {
        Ok(())
    } else {
        Err(Error::VerificationFailed {
            check,
            residual,
            tolerance,
        }
        .at(Stage::Verify))
    }
}

/// Solves the extremal three-point problem determined by `data`.
///
/// Data that is degenerate or two-point extremal at t* is reported as
/// `ClassifiedAway` with the classification; every other failure carries
/// the stage where it occurred.
pub fn solve_extremal(data: &PickData3, cfg: &SolverConfig) -> Result<SolveReport> {
    let (direction, frame) = normalize_problem(data);
    if all_zero(&direction) {
        return Err(Error::AllZeroTargets.at(Stage::Normalize));
    }
    let scale = analyze_scale(&direction, cfg).map_err(|e| e.at(Stage::ExtremalScale))?;
    if scale.classification.kind != ClassKind::NonDegenerateCandidate {
        return Err(Error::ClassifiedAway(scale.classification.clone()).at(Stage::Classify));
    }
    let (g0, d0) = scale.pair.ok_or_else(|| {
        Error::DegenerateAtExtreme("no feasible pair below t*".into()).at(Stage::Feasibility)
    })?;
    // The pair found at the bracket's feasible end is within t_tol of t*,
    // but the feasible set there still has width of order √(t* − t), so its
    // second eigenvalues are only that small. It merely seeds the Newton
    // refinement, whose output is exactly rank one and verified below.
    let seed_tol = cfg
        .rank_one_tol
        .max(10.0 * (cfg.t_tol * scale.t_star.max(1.0)).sqrt());
    let (a0, b0) = extract_rank_one(&g0, &d0, seed_tol).map_err(|e| e.at(Stage::RankOne))?;

    let margin = 1e-8 * scale.t_star.max(1.0);
    let fold = refine_fold(&a0, &b0, &direction, scale.lower, cfg);
    let (a, b, t_star, refinement, newton_iterations) = match fold {
        Ok(f) if f.t >= scale.lower - margin && f.t <= scale.upper + margin => {
            (f.a, f.b, f.t, Refinement::Fold, f.iterations)
        }
        other => {
            let rejected_t = other.as_ref().ok().map(|f| f.t);
            let t = scale.lower;
            let (a, b) = refine_newton(&a0, &direction.scaled_unchecked(t), cfg)
                .map_err(|e| e.at(Stage::Newton))?;
            (
                a,
                b,
                t,
                Refinement::FixedScale { rejected_t },
                cfg.newton_max_iter,
            )
        }
    };

    let normalized_data = direction.scaled_unchecked(t_star);
    let nmats = build_matrices(&normalized_data);
    let normalized_pair = PermissiblePair::from_vectors(a, b);
    let normalized_phi = cramer_phi(&a, &b, &normalized_data).map_err(|e| e.at(Stage::Cramer))?;
    let seed_distance = (normalized_pair.gamma.sub(&g0).frobenius_norm())
        .max(normalized_pair.delta.sub(&d0).frobenius_norm());

    let scaled_targets = normalized_data.targets().map(|w| frame.restore_target(w));
    let mut scaled_targets = scaled_targets;
    scaled_targets[0] = data.targets()[0];
    let scaled_data = PickData3::new_unchecked(*data.nodes(), scaled_targets);
    let (oa, ob) = denormalize_vectors(&a, &b, data, &scaled_targets);
    let pair = PermissiblePair::from_vectors(oa, ob);
    let phi = normalized_phi
        .precompose(&frame.first, &frame.second)
        .and_then(|p| p.postcompose(&frame.target.inverse()))
        .map_err(|e| e.at(Stage::Cramer))?;

    let omats = build_matrices(&scaled_data);
    let decomposition_residual = pair.decomposition_residual(&omats);
    let decomposition_residual_normalized = normalized_pair.decomposition_residual(&nmats);
    let interp = |f: &RationalInner2, d: &PickData3| {
        (0..3)
            .map(|i| {
                let p = d.nodes()[i];
                (f.eval(p.z1, p.z2) - d.targets()[i]).norm()
            })
            .fold(0.0, f64::max)
    };
    let interpolation_residual = interp(&phi, &scaled_data);
    let interpolation_residual_normalized = interp(&normalized_phi, &normalized_data);
    let torus_deviation = phi.torus_deviation(cfg.torus_grid);
    let kernel = active_kernel(&a, &b, &nmats);

    check(
        "decomposition (normalized frame)",
        decomposition_residual_normalized,
        cfg.feas_tol,
    )?;
    check("decomposition", decomposition_residual, cfg.feas_tol)?;
    check(
        "interpolation (normalized frame)",
        interpolation_residual_normalized,
        cfg.interp_tol,
    )?;
    check("interpolation", interpolation_residual, cfg.interp_tol)?;
    check("innerness on the torus", torus_deviation, cfg.inner_tol)?;

    Ok(SolveReport {
        t_star,
        classification: scale.classification.clone(),
        scaled_data,
        pair,
        phi,
        frame,
        normalized_data,
        normalized_pair,
        normalized_phi,
        diagnostics: Diagnostics {
            reduced_residual: residual_jan(&a, &normalized_data),
            scale,
            refinement,
            newton_iterations,
            seed_distance,
            decomposition_residual,
            decomposition_residual_normalized,
            interpolation_residual,
            interpolation_residual_normalized,
            torus_deviation,
            kernel,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::BidiskPoint;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn symmetric(r: f64, t: f64) -> PickData3 {
        PickData3::new(
            [
                BidiskPoint::new(ZERO, ZERO).unwrap(),
                BidiskPoint::new(c(r), ZERO).unwrap(),
                BidiskPoint::new(ZERO, c(r)).unwrap(),
            ],
            [ZERO, c(t), c(t)],
        )
        .unwrap()
    }

    #[test]
    fn extremal_t_examples() {
        let cfg = SolverConfig::default();
        assert!((extremal_t(&symmetric(0.5, 1.0), &cfg).unwrap() - 1.0 / 3.0).abs() < 1e-6);
        assert!((extremal_t(&symmetric(0.3, 1.0), &cfg).unwrap() - 0.3 / 1.7).abs() < 1e-6);
        assert!((extremal_t(&symmetric(0.5, 1.0 / 3.0), &cfg).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn all_zero_targets_rejected() {
        let d = PickData3::new(*symmetric(0.5, 1.0).nodes(), [ZERO; 3]).unwrap();
        let e = solve_extremal(&d, &SolverConfig::default()).unwrap_err();
        assert!(matches!(e.root(), Error::AllZeroTargets));
    }

    #[test]
    fn solve_worked_example() {
        let cfg = SolverConfig::default();
        let rep = solve_extremal(&symmetric(0.5, 1.0), &cfg).unwrap();
        assert!((rep.t_star - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(rep.diagnostics.refinement, Refinement::Fold);
        let expected = RationalInner2::new(
            [ZERO, c(1.0), c(1.0), c(-2.0)],
            [c(2.0), c(-1.0), c(-1.0), ZERO],
        )
        .unwrap();
        assert!(rep.phi.coefficient_distance(&expected).unwrap() < 1e-10);
        assert!((rep.minimal_norm() - 3.0).abs() < 1e-10);
        assert!(rep
            .diagnostics
            .reduced_residual
            .iter()
            .all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn degenerate_data_is_classified_away() {
        let d = PickData3::new(
            [
                BidiskPoint::new(ZERO, ZERO).unwrap(),
                BidiskPoint::new(c(0.5), ZERO).unwrap(),
                BidiskPoint::new(c(0.75), ZERO).unwrap(),
            ],
            [ZERO, c(0.5), c(0.2)],
        )
        .unwrap();
        let e = solve_extremal(&d, &SolverConfig::default()).unwrap_err();
        match e.root() {
            Error::ClassifiedAway(cl) => assert_eq!(cl.kind, ClassKind::Degenerate1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(e.is_classification());
    }
}
