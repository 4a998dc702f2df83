//! Permissible-pair feasibility as a maximum-margin problem.
//!
//! Every Hermitian Γ determines Δ(Γ) = (W − Λ¹∘Γ)⊘Λ² (entrywise division;
//! no entry of Λ² vanishes), so the affine constraint is eliminated and the
//! question becomes whether
//!
//! ```text
//!     s* = max { s : Γ − sI ⪰ 0, Δ(Γ) − sI ⪰ 0 }
//! ```
//!
//! is positive. The maximization runs a log-barrier path-following Newton
//! method over the 10 real unknowns (Γ, s). Along the central path with
//! barrier weight μ the gap to s* is at most 6μ (the barrier parameter of
//! two 3×3 PSD cones), which gives both verdicts:
//! - feasible as soon as an iterate has s > 0, since then Γ, Δ ≻ 0;
//! - infeasible once a centered iterate has s + 6μ < −infeas_tol.

use nalgebra::{Matrix3, SMatrix, SVector};
use rand::Rng;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::numerics::{herm_from_coords, herm_to_coords, hermitian_basis, HermMat3, C64};
use crate::pick::PickMatrices;
use crate::sample;

/// Outcome of [`feasible_pair`].
#[derive(Clone, Debug, PartialEq)]
pub enum FeasibilityResult {
    /// A strictly feasible pair; `margin` is a lower bound on the smallest
    /// eigenvalue of both matrices.
    Feasible {
        gamma: HermMat3,
        delta: HermMat3,
        margin: f64,
        iterations: usize,
    },
    /// No permissible pair exists: the largest achievable margin is at most
    /// −`gap`.
    Infeasible { gap: f64, iterations: usize },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }

    pub fn iterations(&self) -> usize {
        match self {
            FeasibilityResult::Feasible { iterations, .. }
            | FeasibilityResult::Infeasible { iterations, .. } => *iterations,
        }
    }
}

type M3 = Matrix3<C64>;

/// Newton steps allowed per barrier weight.
const CENTERING_STEPS: usize = 200;
type V10 = SVector<f64, 10>;
type M10 = SMatrix<f64, 10, 10>;

fn to_na(m: &HermMat3) -> M3 {
    M3::from_fn(|i, j| m.get(i, j))
}

/// Returns (log det, inverse) when `m` is positive definite.
///
/// The pivots are formed as real numbers and must be positive. (A complex
/// Cholesky that takes square roots of complex pivots accepts a negative
/// pivot carrying a rounding-level imaginary part.)
fn logdet_inv(m: &M3) -> Option<(f64, M3)> {
    let mut l = M3::zeros();
    let mut ld = 0.0;
    for j in 0..3 {
        let d = m[(j, j)].re - (0..j).map(|k| l[(j, k)].norm_sqr()).sum::<f64>();
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let ljj = d.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        ld += d.ln();
        for i in j + 1..3 {
            let s: C64 = (0..j).map(|k| l[(i, k)] * l[(j, k)].conj()).sum();
            l[(i, j)] = (m[(i, j)] - s) / ljj;
        }
    }
    let linv = l.solve_lower_triangular(&M3::identity())?;
    Some((ld, linv.adjoint() * linv))
}

/// Re tr(A·B) for 3×3 matrices.
fn tr_prod(a: &M3, b: &M3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

struct Barrier {
    dx: [M3; 10],
    dy: [M3; 10],
    y0: M3,
}

impl Barrier {
    fn new(mats: &PickMatrices) -> Self {
        let basis = hermitian_basis();
        let neg_id = -M3::identity();
        let dx = std::array::from_fn(|k| if k < 9 { to_na(&basis[k]) } else { neg_id });
        let dy = std::array::from_fn(|k| {
            if k < 9 {
                -to_na(
                    &mats
                        .l1
                        .schur(&basis[k])
                        .map_entries(|i, j, v| v / mats.l2.get(i, j)),
                )
            } else {
                neg_id
            }
        });
        let y0 = to_na(&mats.w.map_entries(|i, j, v| v / mats.l2.get(i, j)));
        Self { dx, dy, y0 }
    }

    fn matrices(&self, x: &V10) -> (M3, M3) {
        let mut xm = M3::zeros();
        let mut ym = self.y0;
        for k in 0..10 {
            xm += self.dx[k] * C64::new(x[k], 0.0);
            ym += self.dy[k] * C64::new(x[k], 0.0);
        }
        (xm, ym)
    }

    /// Barrier objective −s/μ − log det X − log det Y, or `None` outside
    /// the domain.
    fn value(&self, x: &V10, mu: f64) -> Option<f64> {
        let (xm, ym) = self.matrices(x);
        let (lx, _) = logdet_inv(&xm)?;
        let (ly, _) = logdet_inv(&ym)?;
        Some(-x[9] / mu - lx - ly)
    }

    fn newton(&self, x: &V10, mu: f64) -> Option<(f64, V10, M10)> {
        let (xm, ym) = self.matrices(x);
        let (lx, xi) = logdet_inv(&xm)?;
        let (ly, yi) = logdet_inv(&ym)?;
        let ax: [M3; 10] = std::array::from_fn(|k| xi * self.dx[k]);
        let ay: [M3; 10] = std::array::from_fn(|k| yi * self.dy[k]);
        let mut g = V10::zeros();
        let mut h = M10::zeros();
        for k in 0..10 {
            g[k] = -(ax[k].trace().re + ay[k].trace().re);
            for l in k..10 {
                let v = tr_prod(&ax[k], &ax[l]) + tr_prod(&ay[k], &ay[l]);
                h[(k, l)] = v;
                h[(l, k)] = v;
            }
        }
        g[9] -= 1.0 / mu;
        Some((-x[9] / mu - lx - ly, g, h))
    }
}

fn min_eig(m: &M3) -> f64 {
    HermMat3::symmetrized(&crate::numerics::CMat3::from_fn(|i, j| m[(i, j)])).min_eigenvalue()
}

/// Decides whether a permissible pair exists for `mats` and returns one
/// with a positive margin if it does.
///
/// Starts from Γ = ½I, or from a random Hermitian perturbation of it when
/// `cfg.seed` is set. Fails with `StallWithoutVerdict` if the Newton budget
/// `cfg.max_iter` runs out or μ drops below `cfg.mu_min` first; the error
/// carries the bracket [s, s + 6μ] known for the optimal margin.
pub fn feasible_pair(mats: &PickMatrices, cfg: &SolverConfig) -> Result<FeasibilityResult> {
    let bar = Barrier::new(mats);
    let mut gamma0 = HermMat3::identity().scale(0.5);
    if let Some(seed) = cfg.seed {
        let mut rng = sample::rng(seed);
        let c: [f64; 9] = std::array::from_fn(|_| rng.gen_range(-0.25..0.25));
        gamma0 = gamma0.add(&herm_from_coords(&c));
    }
    let coords = herm_to_coords(&gamma0);
    let mut x = V10::zeros();
    for k in 0..9 {
        x[k] = coords[k];
    }
    {
        let (xm, ym) = bar.matrices(&x);
        x[9] = min_eig(&xm).min(min_eig(&ym)) - 1.0;
    }

    let mut mu: f64 = 1.0;
    let mut iterations = 0usize;
    let feasible = |x: &V10, iterations: usize| {
        let gamma = herm_from_coords(&x.as_slice()[..9]);
        let delta = mats
            .w
            .sub(&mats.l1.schur(&gamma))
            .map_entries(|i, j, v| v / mats.l2.get(i, j));
        FeasibilityResult::Feasible {
            gamma,
            delta,
            margin: x[9],
            iterations,
        }
    };
    loop {
        // Centering. Near the end of the path the objective is dominated by
        // s/μ and rounding can keep the Newton decrement from ever getting
        // small, so each round is capped; the 6μ bound is only used on
        // iterates that did converge.
        let mut centered = false;
        for _ in 0..CENTERING_STEPS {
            if x[9] > 0.0 {
                return Ok(feasible(&x, iterations));
            }
            if iterations >= cfg.max_iter {
                return Err(Error::StallWithoutVerdict {
                    iterations,
                    lower: x[9],
                    upper: x[9] + 6.0 * mu,
                });
            }
            let Some((f, g, h)) = bar.newton(&x, mu) else {
                // cannot happen for iterates produced by the line search
                return Err(Error::StallWithoutVerdict {
                    iterations,
                    lower: x[9],
                    upper: x[9] + 6.0 * mu,
                });
            };
            let step = match h.cholesky() {
                Some(ch) => ch.solve(&(-g)),
                None => match h.lu().solve(&(-g)) {
                    Some(s) => s,
                    None => break,
                },
            };
            let slope = g.dot(&step);
            if !(slope < 0.0) || -slope < 1e-18 {
                centered = true;
                break;
            }
            iterations += 1;
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-14 {
                let trial = x + step * alpha;
                if let Some(ft) = bar.value(&trial, mu) {
                    if ft <= f + 0.25 * alpha * slope {
                        x = trial;
                        moved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !moved || -slope < 1e-10 {
                centered = -slope < 1e-10;
                break;
            }
        }
        if x[9] > 0.0 {
            return Ok(feasible(&x, iterations));
        }
        let upper = x[9] + 6.0 * mu;
        if centered && upper < -cfg.infeas_tol {
            return Ok(FeasibilityResult::Infeasible {
                gap: -upper,
                iterations,
            });
        }
        mu *= 0.2;
        if mu < cfg.mu_min {
            return Err(Error::StallWithoutVerdict {
                iterations,
                lower: x[9],
                upper,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::BidiskPoint;
    use crate::numerics::ZERO;
    use crate::pick::{build_matrices, is_permissible, PickData3};

    fn symmetric(r: f64, t: f64) -> PickMatrices {
        let c = |x: f64| C64::new(x, 0.0);
        let d = PickData3::new(
            [
                BidiskPoint::new(ZERO, ZERO).unwrap(),
                BidiskPoint::new(c(r), ZERO).unwrap(),
                BidiskPoint::new(ZERO, c(r)).unwrap(),
            ],
            [ZERO, c(t), c(t)],
        )
        .unwrap();
        build_matrices(&d)
    }

    #[test]
    fn zero_targets_are_feasible() {
        let m = symmetric(0.5, 0.0);
        let cfg = SolverConfig::default();
        match feasible_pair(&m, &cfg).unwrap() {
            FeasibilityResult::Feasible { gamma, delta, .. } => {
                assert!(is_permissible(&gamma, &delta, &m, 1e-9));
                assert!(m.decomposition_residual(&gamma, &delta) < 1e-12);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn worked_example_verdicts() {
        let cfg = SolverConfig::default();
        assert!(feasible_pair(&symmetric(0.5, 1.0 / 3.0 - 1e-6), &cfg)
            .unwrap()
            .is_feasible());
        let r = feasible_pair(&symmetric(0.5, 0.40), &cfg).unwrap();
        assert!(matches!(r, FeasibilityResult::Infeasible { gap, .. } if gap > cfg.infeas_tol));
    }

    #[test]
    fn seeded_start_gives_same_verdicts() {
        for seed in 0..4 {
            let cfg = SolverConfig {
                seed: Some(seed),
                ..SolverConfig::default()
            };
            assert!(feasible_pair(&symmetric(0.5, 0.3), &cfg)
                .unwrap()
                .is_feasible());
            assert!(!feasible_pair(&symmetric(0.5, 0.36), &cfg)
                .unwrap()
                .is_feasible());
        }
    }

    #[test]
    fn indefinite_matrices_are_outside_the_domain() {
        // a negative pivot with a rounding-level imaginary part
        let m = M3::from_fn(|i, j| match (i, j) {
            (0, 0) => C64::new(1.0, 0.0),
            (1, 1) => C64::new(-77.0, 0.0),
            (2, 2) => C64::new(2.0, 0.0),
            (1, 0) => C64::new(0.0, 1e-14),
            (0, 1) => C64::new(0.0, -1e-14),
            _ => C64::new(0.0, 0.0),
        });
        assert!(logdet_inv(&m).is_none());
        let p = M3::from_fn(|i, j| {
            if i == j {
                C64::new(2.0, 0.0)
            } else {
                C64::new(0.5, 0.25)
            }
        });
        let p = (p + p.adjoint()) * C64::new(0.5, 0.0);
        let (ld, inv) = logdet_inv(&p).unwrap();
        assert!((ld - p.determinant().re.ln()).abs() < 1e-13);
        assert!((inv * p - M3::identity()).norm() < 1e-13);
    }

    #[test]
    fn verdicts_near_the_boundary_of_the_bidisk() {
        let cfg = SolverConfig::default();
        let r = 0.999;
        let t = r / (2.0 - r);
        assert!(feasible_pair(&symmetric(r, t - 1e-6), &cfg)
            .unwrap()
            .is_feasible());
        assert!(!feasible_pair(&symmetric(r, t + 1e-6), &cfg)
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn budget_exhaustion_is_a_stall() {
        let cfg = SolverConfig {
            max_iter: 1,
            ..SolverConfig::default()
        };
        assert!(matches!(
            feasible_pair(&symmetric(0.5, 1.0 / 3.0), &cfg),
            Err(Error::StallWithoutVerdict { .. })
        ));
    }
}
