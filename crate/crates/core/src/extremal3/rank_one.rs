//! The rank-one system of a normalized problem (λ₁ = (0,0), w₁ = 0).
//!
//! Unknowns are a = (a₁, a₂, a₃) with a₁ ≥ 0 real and b = (b₁, b₂, b₃)
//! with b₁ = √(1 − a₁²) eliminated, packed as nine reals
//!
//! ```text
//!     x = [a₁, ℜa₂, ℑa₂, ℜa₃, ℑa₃, ℜb₂, ℑb₂, ℜb₃, ℑb₃].
//! ```
//!
//! The equations are the entries (i ≤ j) of
//! Λ¹∘(a⊗a) + Λ²∘(b⊗b) − W(t) = 0 with W(t)ᵢⱼ = 1 − t²·conj(wᵢ)wⱼ. The
//! (1,1) entry holds identically, leaving eight real equations in nine
//! unknowns: at a fixed scale below t* the solutions form curves, and t* is
//! the largest t reached on the solution surface. [`refine_fold`] finds
//! that point directly by Newton's method on the first-order conditions;
//! [`refine_newton`] is the fixed-scale Gauss–Newton corrector.

use nalgebra::{DMatrix, DVector};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::numerics::{CVec3, HermMat3, C64, ONE, ZERO};
use crate::pick::{build_matrices, PickData3};

/// Entry (i, j) and real (false) or imaginary (true) part of each equation.
const EQS: [(usize, usize, bool); 8] = [
    (0, 1, false),
    (0, 1, true),
    (0, 2, false),
    (0, 2, true),
    (1, 1, false),
    (2, 2, false),
    (1, 2, false),
    (1, 2, true),
];

fn part(z: C64, imag: bool) -> f64 {
    if imag {
        z.im
    } else {
        z.re
    }
}

/// b from a through the first-column relations a₁·conj(aᵢ) + b₁·conj(bᵢ) = 1
/// of a normalized problem: b = (√(1 − a₁²), (1 − a₁a₂)/b₁, (1 − a₁a₃)/b₁).
///
/// Only the real part of a₁ is used.
pub fn b_from_a(a: &CVec3) -> Result<CVec3> {
    let a1 = a[0].re;
    if !(a1 >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "a1 = {a1} must be nonnegative"
        )));
    }
    if a1 >= 1.0 - 1e-12 {
        return Err(Error::DegenerateFirstEntry { a1 });
    }
    let b1 = (1.0 - a1 * a1).sqrt();
    let k = C64::new(a1, 0.0);
    Ok(CVec3::new(
        C64::new(b1, 0.0),
        (ONE - k * a[1]) / b1,
        (ONE - k * a[2]) / b1,
    ))
}

/// Residuals of the reduced system: with b eliminated by [`b_from_a`],
/// the entries (2,2), (3,3) and the real and imaginary parts of (2,3) of
/// Λ¹∘(a⊗a) + Λ²∘(b⊗b) − W, in that order. `data` must be normalized; its
/// targets are used as given (no extra scaling). Returns infinities when
/// a₁ leaves [0, 1).
pub fn residual_jan(a: &CVec3, data: &PickData3) -> [f64; 4] {
    let Ok(b) = b_from_a(a) else {
        return [f64::INFINITY; 4];
    };
    let a = CVec3::new(C64::new(a[0].re, 0.0), a[1], a[2]);
    let m = build_matrices(data);
    let e = |i: usize, j: usize| {
        m.l1.get(i, j) * a[i] * a[j].conj() + m.l2.get(i, j) * b[i] * b[j].conj() - m.w.get(i, j)
    };
    let e23 = e(1, 2);
    [e(1, 1).re, e(2, 2).re, e23.re, e23.im]
}

/// Rotates `u` so that its first entry is real and nonnegative; when that
/// entry is below 1e-12 in modulus, the first entry that is not is made
/// real positive instead.
pub(crate) fn phase_normalize(u: &CVec3) -> CVec3 {
    for k in 0..3 {
        if u[k].norm() >= 1e-12 || k == 2 {
            if u[k].norm() == 0.0 {
                return *u;
            }
            let ph = u[k].conj() / u[k].norm();
            let mut v = u.scale(ph);
            v[k] = C64::new(v[k].re, 0.0);
            return v;
        }
    }
    *u
}

/// Vectors with Γ = a⊗a and Δ = b⊗b for a near-rank-one pair, phase
/// normalized so a₁ ≥ 0 and b₁ ≥ 0.
///
/// Fails with `NotRankOne` unless both second eigenvalues are below
/// `tol`·(first eigenvalue).
pub fn extract_rank_one(gamma: &HermMat3, delta: &HermMat3, tol: f64) -> Result<(CVec3, CVec3)> {
    let top = |m: &HermMat3| {
        let e = m.eig();
        if !(e.values[0] > 0.0) || e.values[1] > tol * e.values[0] {
            return Err(Error::NotRankOne {
                eigenvalues: e.values,
            });
        }
        Ok(phase_normalize(
            &e.vectors[0].scale(C64::new(e.values[0].sqrt(), 0.0)),
        ))
    };
    Ok((top(gamma)?, top(delta)?))
}

/// The eight-equation system of a normalized problem whose targets give
/// the scaling direction.
pub(crate) struct RankOneSystem {
    l1: HermMat3,
    l2: HermMat3,
    dir: [C64; 3],
}

struct Derivs {
    da: [[C64; 9]; 3],
    db: [[C64; 9]; 3],
    /// d²b₁/dx₀².
    b1_xx: f64,
}

impl RankOneSystem {
    pub(crate) fn new(data: &PickData3) -> Self {
        let m = build_matrices(data);
        Self {
            l1: m.l1,
            l2: m.l2,
            dir: *data.targets(),
        }
    }

    pub(crate) fn pack(a: &CVec3, b: &CVec3) -> [f64; 9] {
        [
            a[0].re, a[1].re, a[1].im, a[2].re, a[2].im, b[1].re, b[1].im, b[2].re, b[2].im,
        ]
    }

    pub(crate) fn unpack(x: &[f64]) -> Result<(CVec3, CVec3)> {
        let a1 = x[0];
        if !(a1.abs() < 1.0) {
            return Err(Error::DegenerateFirstEntry { a1 });
        }
        let b1 = (1.0 - a1 * a1).sqrt();
        Ok((
            CVec3::new(
                C64::new(a1, 0.0),
                C64::new(x[1], x[2]),
                C64::new(x[3], x[4]),
            ),
            CVec3::new(
                C64::new(b1, 0.0),
                C64::new(x[5], x[6]),
                C64::new(x[7], x[8]),
            ),
        ))
    }

    fn derivs(x: &[f64]) -> Derivs {
        let b1 = (1.0 - x[0] * x[0]).sqrt();
        let i = C64::new(0.0, 1.0);
        let mut da = [[ZERO; 9]; 3];
        let mut db = [[ZERO; 9]; 3];
        da[0][0] = ONE;
        da[1][1] = ONE;
        da[1][2] = i;
        da[2][3] = ONE;
        da[2][4] = i;
        db[0][0] = C64::new(-x[0] / b1, 0.0);
        db[1][5] = ONE;
        db[1][6] = i;
        db[2][7] = ONE;
        db[2][8] = i;
        Derivs {
            da,
            db,
            b1_xx: -1.0 / (b1 * b1 * b1),
        }
    }

    fn entry(&self, a: &CVec3, b: &CVec3, t: f64, i: usize, j: usize) -> C64 {
        self.l1.get(i, j) * a[i] * a[j].conj() + self.l2.get(i, j) * b[i] * b[j].conj() - ONE
            + self.dir[i].conj() * self.dir[j] * (t * t)
    }

    pub(crate) fn residual(&self, x: &[f64], t: f64) -> Result<DVector<f64>> {
        let (a, b) = Self::unpack(x)?;
        Ok(DVector::from_iterator(
            8,
            EQS.iter()
                .map(|&(i, j, im)| part(self.entry(&a, &b, t, i, j), im)),
        ))
    }

    /// ∂F/∂x (8×9).
    pub(crate) fn jac_x(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let (a, b) = Self::unpack(x)?;
        let d = Self::derivs(x);
        Ok(DMatrix::from_fn(8, 9, |m, k| {
            let (i, j, im) = EQS[m];
            let v = self.l1.get(i, j) * (d.da[i][k] * a[j].conj() + a[i] * d.da[j][k].conj())
                + self.l2.get(i, j) * (d.db[i][k] * b[j].conj() + b[i] * d.db[j][k].conj());
            part(v, im)
        }))
    }

    /// ∂F/∂t.
    pub(crate) fn jac_t(&self, t: f64) -> DVector<f64> {
        DVector::from_iterator(
            8,
            EQS.iter()
                .map(|&(i, j, im)| part(self.dir[i].conj() * self.dir[j] * (2.0 * t), im)),
        )
    }

    /// ∂²F/∂t².
    fn jac_tt(&self) -> DVector<f64> {
        DVector::from_iterator(
            8,
            EQS.iter()
                .map(|&(i, j, im)| part(self.dir[i].conj() * self.dir[j] * 2.0, im)),
        )
    }

    /// Σₘ yₘ·∇²ₓFₘ (9×9).
    fn hess_x(&self, x: &[f64], y: &DVector<f64>) -> Result<DMatrix<f64>> {
        let (_, b) = Self::unpack(x)?;
        let d = Self::derivs(x);
        let mut h = DMatrix::zeros(9, 9);
        for (m, &(i, j, im)) in EQS.iter().enumerate() {
            for k in 0..9 {
                for l in k..9 {
                    let mut v = self.l1.get(i, j)
                        * (d.da[i][k] * d.da[j][l].conj() + d.da[i][l] * d.da[j][k].conj())
                        + self.l2.get(i, j)
                            * (d.db[i][k] * d.db[j][l].conj() + d.db[i][l] * d.db[j][k].conj());
                    if k == 0 && l == 0 {
                        let s = [d.b1_xx, 0.0, 0.0];
                        v += self.l2.get(i, j) * (b[j].conj() * s[i] + b[i] * s[j]);
                    }
                    let v = y[m] * part(v, im);
                    h[(k, l)] += v;
                    if l != k {
                        h[(l, k)] += v;
                    }
                }
            }
        }
        Ok(h)
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Runs `f` in the gauge where the eliminated first entry is the smaller
/// of a₁ and b₁; in the other gauge the coordinates (and so a and b) are
/// exchanged and exchanged back afterwards.
fn in_gauge<T>(
    a: &CVec3,
    b: &CVec3,
    data: &PickData3,
    f: impl FnOnce(&CVec3, &CVec3, &PickData3) -> Result<(CVec3, CVec3, T)>,
) -> Result<(CVec3, CVec3, T)> {
    if a[0].re > b[0].re {
        let (b2, a2, extra) = f(b, a, &data.swapped())?;
        Ok((a2, b2, extra))
    } else {
        f(a, b, data)
    }
}

/// Fixed-scale Gauss–Newton on the rank-one system of the normalized
/// problem `data` (targets taken as given), started from `seed_a` with b
/// from [`b_from_a`].
///
/// Steps are minimum-norm least-squares steps through the SVD of the 8×9
/// Jacobian, damped by halving until the residual norm decreases. Returns
/// only when max |residual| < `cfg.newton_tol`. A Jacobian of numerical
/// rank below 7 (relative cutoff 1e-10) is reported as `JacobianSingular`.
pub fn refine_newton(
    seed_a: &CVec3,
    data: &PickData3,
    cfg: &SolverConfig,
) -> Result<(CVec3, CVec3)> {
    let seed_a = phase_normalize(seed_a);
    let seed_b = b_from_a(&seed_a)?;
    let (a, b, ()) = in_gauge(&seed_a, &seed_b, data, |a, b, data| {
        let sys = RankOneSystem::new(data);
        let mut x = RankOneSystem::pack(a, b);
        for _ in 0..=cfg.newton_max_iter {
            let f = sys.residual(&x, 1.0)?;
            if max_abs(&f) < cfg.newton_tol {
                let (a, b) = RankOneSystem::unpack(&x)?;
                return Ok((a, b, ()));
            }
            let j = sys.jac_x(&x)?;
            let svd = j.svd(true, true);
            let smax = svd.singular_values.max();
            let cut = 1e-10 * smax;
            let rank = svd.singular_values.iter().filter(|&&s| s > cut).count();
            if rank < 7 {
                return Err(Error::JacobianSingular {
                    rank,
                    sigma_min: svd.singular_values.min(),
                });
            }
            let step = svd
                .solve(&(-&f), cut)
                .map_err(|_| Error::JacobianSingular {
                    rank,
                    sigma_min: svd.singular_values.min(),
                })?;
            let f0 = f.norm();
            let mut alpha = 1.0;
            loop {
                let trial: Vec<f64> = (0..9).map(|k| x[k] + alpha * step[k]).collect();
                if let Ok(ft) = sys.residual(&trial, 1.0) {
                    if ft.norm() < f0 || alpha < 1e-3 {
                        x.copy_from_slice(&trial);
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-6 {
                    break;
                }
            }
        }
        let f = sys
            .residual(&x, 1.0)
            .map(|f| max_abs(&f))
            .unwrap_or(f64::INFINITY);
        Err(Error::NoConvergence {
            iterations: cfg.newton_max_iter,
            residual: f,
        })
    })?;
    Ok((a, b))
}

/// A point of the solution surface where the scale t is stationary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoldPoint {
    pub a: CVec3,
    pub b: CVec3,
    pub t: f64,
    pub iterations: usize,
    /// max |F| at the returned point.
    pub residual: f64,
}

/// Newton's method for the stationary points of t on the rank-one solution
/// surface of the normalized direction `data`, started at (a, b, t0).
///
/// The unknowns are x (9), t and a multiplier y ∈ ℝ⁸, and the equations
///
/// ```text
///     F(x, t) = 0,   J_xᵀ·y = 0,   J_t·y = 1,
/// ```
///
/// i.e. J_x is rank deficient with a left null vector that is not
/// orthogonal to ∂F/∂t. The multiplier starts as the left singular vector
/// of the smallest singular value of J_x. The Jacobian of this bordered
/// system uses exact second derivatives of F.
pub fn refine_fold(
    a: &CVec3,
    b: &CVec3,
    data: &PickData3,
    t0: f64,
    cfg: &SolverConfig,
) -> Result<FoldPoint> {
    let a = phase_normalize(a);
    let b = phase_normalize(b);
    let (a, b, (t, iterations, residual)) = in_gauge(&a, &b, data, |a, b, data| {
        let sys = RankOneSystem::new(data);
        let x0 = RankOneSystem::pack(a, b);
        let jx = sys.jac_x(&x0)?;
        let svd = jx.clone().svd(true, false);
        let u = svd.u.as_ref().expect("requested U");
        let kmin = svd
            .singular_values
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (k, &s)| if s < best.1 { (k, s) } else { best },
            )
            .0;
        let u_min = u.column(kmin).into_owned();
        let jt = sys.jac_t(t0);
        let c = jt.dot(&u_min);
        if !(c.abs() > 1e-14) {
            return Err(Error::JacobianSingular {
                rank: 8,
                sigma_min: svd.singular_values.min(),
            });
        }
        let mut z = DVector::zeros(18);
        for k in 0..9 {
            z[k] = x0[k];
        }
        z[9] = t0;
        for m in 0..8 {
            z[10 + m] = u_min[m] / c;
        }

        let eval = |z: &DVector<f64>| -> Result<DVector<f64>> {
            let x = &z.as_slice()[..9];
            let t = z[9];
            let y = z.rows(10, 8).into_owned();
            let f = sys.residual(x, t)?;
            let jx = sys.jac_x(x)?;
            let g2 = jx.transpose() * &y;
            let g3 = sys.jac_t(t).dot(&y) - 1.0;
            let mut g = DVector::zeros(18);
            g.rows_mut(0, 8).copy_from(&f);
            g.rows_mut(8, 9).copy_from(&g2);
            g[17] = g3;
            Ok(g)
        };
        let converged = |g: &DVector<f64>, z: &DVector<f64>| {
            let ymax = z.rows(10, 8).iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let fmax = g.rows(0, 8).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            fmax < cfg.newton_tol && max_abs(&g.clone()) < cfg.newton_tol * ymax
        };

        let mut g = eval(&z)?;
        for it in 0..=cfg.newton_max_iter {
            if converged(&g, &z) {
                let (a, b) = RankOneSystem::unpack(&z.as_slice()[..9])?;
                let fmax = g.rows(0, 8).iter().fold(0.0f64, |m, v| m.max(v.abs()));
                return Ok((a, b, (z[9], it, fmax)));
            }
            if it == cfg.newton_max_iter {
                break;
            }
            let x = &z.as_slice()[..9];
            let t = z[9];
            let y = z.rows(10, 8).into_owned();
            let jx = sys.jac_x(x)?;
            let jt = sys.jac_t(t);
            let h = sys.hess_x(x, &y)?;
            let mut dg = DMatrix::zeros(18, 18);
            dg.view_mut((0, 0), (8, 9)).copy_from(&jx);
            dg.view_mut((0, 9), (8, 1)).copy_from(&jt);
            dg.view_mut((8, 0), (9, 9)).copy_from(&h);
            dg.view_mut((8, 10), (9, 8)).copy_from(&jx.transpose());
            dg[(17, 9)] = sys.jac_tt().dot(&y);
            dg.view_mut((17, 10), (1, 8)).copy_from(&jt.transpose());
            let Some(step) = dg.clone().lu().solve(&(-&g)) else {
                let sv = dg.singular_values();
                let smax = sv.max();
                return Err(Error::JacobianSingular {
                    rank: sv.iter().filter(|&&s| s > 1e-12 * smax).count(),
                    sigma_min: sv.min(),
                });
            };
            let g0 = g.norm();
            let mut alpha = 1.0;
            loop {
                let trial = &z + &step * alpha;
                if let Ok(gt) = eval(&trial) {
                    if gt.norm() < g0 || alpha < 1e-3 {
                        z = trial;
                        g = gt;
                        break;
                    }
                }
                alpha *= 0.5;
                if alpha < 1e-6 {
                    return Err(Error::NoConvergence {
                        iterations: it,
                        residual: max_abs(&g),
                    });
                }
            }
        }
        Err(Error::NoConvergence {
            iterations: cfg.newton_max_iter,
            residual: max_abs(&g),
        })
    })?;
    Ok(FoldPoint {
        a: phase_normalize(&a),
        b: phase_normalize(&b),
        t,
        iterations,
        residual,
    })
}
