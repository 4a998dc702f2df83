//! Transfer-function realization ψ(z) = A + B·E_z·(I − D·E_z)⁻¹·C of a
//! 3×3 unitary U = (A B; C D) with E_z = diag(z¹, z²).

use crate::error::{Error, Result};
use crate::extremal3::RationalInner2;
use crate::hyperbolic::interior_grid;
use crate::numerics::{unitary_complete, CMat3, CVec3, C64, ONE};
use crate::pick::PickData3;

/// A unitary colligation. The scalar block A is `u[(0,0)]`, B is the rest
/// of the first row, C the rest of the first column and D the lower-right
/// 2×2 block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Realization {
    u: CMat3,
}

impl Realization {
    /// Accepts `u` if ‖U*U − I‖_F ≤ tol.
    pub fn from_unitary(u: CMat3, tol: f64) -> Result<Self> {
        let defect = u.unitarity_defect();
        if !(defect <= tol) {
            return Err(Error::VerificationFailed {
                check: "unitarity",
                residual: defect,
                tolerance: tol,
            });
        }
        Ok(Self { u })
    }

    pub fn unitary(&self) -> &CMat3 {
        &self.u
    }

    pub fn a(&self) -> C64 {
        self.u[(0, 0)]
    }

    pub fn b(&self) -> [C64; 2] {
        [self.u[(0, 1)], self.u[(0, 2)]]
    }

    pub fn c(&self) -> [C64; 2] {
        [self.u[(1, 0)], self.u[(2, 0)]]
    }

    pub fn d(&self) -> [[C64; 2]; 2] {
        [
            [self.u[(1, 1)], self.u[(1, 2)]],
            [self.u[(2, 1)], self.u[(2, 2)]],
        ]
    }

    /// h = (I − D·E_z)⁻¹·C, or `SingularResolvent` when the 2×2 system is
    /// singular within 1e-12.
    fn state(&self, z1: C64, z2: C64) -> Result<[C64; 2]> {
        let d = self.d();
        let c = self.c();
        // M = I − D·diag(z1, z2)
        let m00 = ONE - d[0][0] * z1;
        let m01 = -d[0][1] * z2;
        let m10 = -d[1][0] * z1;
        let m11 = ONE - d[1][1] * z2;
        let det = m00 * m11 - m01 * m10;
        if !(det.norm() > 1e-12) {
            return Err(Error::SingularResolvent { z1, z2 });
        }
        Ok([
            (m11 * c[0] - m01 * c[1]) / det,
            (m00 * c[1] - m10 * c[0]) / det,
        ])
    }

    /// ψ(z¹, z²); the point may be interior or on the torus.
    pub fn eval(&self, z1: C64, z2: C64) -> Result<C64> {
        let h = self.state(z1, z2)?;
        let b = self.b();
        Ok(self.a() + b[0] * z1 * h[0] + b[1] * z2 * h[1])
    }

    /// |(1 − |ψ(z)|²) − h*(I − E*E)h| with h the state at z.
    pub fn innerness_certificate(&self, z1: C64, z2: C64) -> Result<f64> {
        let h = self.state(z1, z2)?;
        let psi = self.eval(z1, z2)?;
        let lhs = 1.0 - psi.norm_sqr();
        let rhs = (1.0 - z1.norm_sqr()) * h[0].norm_sqr() + (1.0 - z2.norm_sqr()) * h[1].norm_sqr();
        Ok((lhs - rhs).abs())
    }
}

/// Builds the unitary that maps xⱼ = (1, λⱼ¹·conj(aⱼ), λⱼ²·conj(bⱼ)) to
/// yⱼ = (wⱼ, conj(aⱼ), conj(bⱼ)) for j = 1, 2, 3. The two families have the
/// same Gram matrix exactly when (a⊗a, b⊗b) decomposes W.
pub fn build_realization(
    a: &CVec3,
    b: &CVec3,
    data: &PickData3,
    gram_tol: f64,
    rank_tol: f64,
) -> Result<Realization> {
    let n = data.nodes();
    let w = data.targets();
    let x = [0, 1, 2].map(|j| CVec3::new(ONE, n[j].z1 * a[j].conj(), n[j].z2 * b[j].conj()));
    let y = [0, 1, 2].map(|j| CVec3::new(w[j], a[j].conj(), b[j].conj()));
    let u = unitary_complete(&x, &y, gram_tol, rank_tol)?;
    Realization::from_unitary(u, 1e-10)
}

pub fn eval_transfer(r: &Realization, z1: C64, z2: C64) -> Result<C64> {
    r.eval(z1, z2)
}

pub fn innerness_certificate(r: &Realization, z1: C64, z2: C64) -> Result<f64> {
    r.innerness_certificate(z1, z2)
}

/// max |ψ(z) − φ(z)| over the n×n grid of pairs from
/// [`interior_grid`]; infinite if either side fails to evaluate.
pub fn cross_validate(r: &Realization, phi: &RationalInner2, n_grid: usize) -> f64 {
    let g = interior_grid(n_grid);
    let mut worst: f64 = 0.0;
    for &z1 in &g {
        for &z2 in &g {
            let d = match r.eval(z1, z2) {
                Ok(psi) => (psi - phi.eval(z1, z2)).norm(),
                Err(_) => f64::INFINITY,
            };
            worst = if d.is_nan() {
                f64::INFINITY
            } else {
                worst.max(d)
            };
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::BidiskPoint;
    use crate::numerics::ZERO;
    use crate::sample;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn worked() -> (CVec3, CVec3, PickData3) {
        let s2 = std::f64::consts::SQRT_2;
        let a = CVec3::from_real([1.0 / s2, 2.0 * s2 / 3.0, s2 / 3.0]);
        let b = CVec3::from_real([1.0 / s2, s2 / 3.0, 2.0 * s2 / 3.0]);
        let c = |x: f64| C64::new(x, 0.0);
        let data = PickData3::new(
            [
                BidiskPoint::new(ZERO, ZERO).unwrap(),
                BidiskPoint::new(c(0.5), ZERO).unwrap(),
                BidiskPoint::new(ZERO, c(0.5)).unwrap(),
            ],
            [ZERO, c(1.0 / 3.0), c(1.0 / 3.0)],
        )
        .unwrap();
        (a, b, data)
    }

    fn worked_phi(z1: C64, z2: C64) -> C64 {
        (z1 + z2 - z1 * z2 * 2.0) / (C64::new(2.0, 0.0) - z1 - z2)
    }

    #[test]
    fn worked_example_realization() {
        let (a, b, data) = worked();
        let r = build_realization(&a, &b, &data, 1e-9, 1e-10).unwrap();
        assert!(r.unitary().unitarity_defect() < 1e-10);
        // first column is the image of (1, 0, 0)
        let s = 1.0 / std::f64::consts::SQRT_2;
        assert!(r.a().norm() < 1e-12);
        assert!((r.c()[0] - C64::new(s, 0.0)).norm() < 1e-12);
        assert!((r.c()[1] - C64::new(s, 0.0)).norm() < 1e-12);
        let v = r.eval(C64::new(0.5, 0.0), ZERO).unwrap();
        assert_abs_diff_eq!((v - C64::new(1.0 / 3.0, 0.0)).norm(), 0.0, epsilon = 1e-9);
        let z1 = C64::from_polar(1.0, 0.1);
        let z2 = C64::from_polar(1.0, 0.2);
        assert_abs_diff_eq!(r.eval(z1, z2).unwrap().norm(), 1.0, epsilon = 1e-9);
        let cert = r
            .innerness_certificate(C64::new(0.3, 0.0), C64::new(-0.4, 0.0))
            .unwrap();
        assert!(cert < 1e-10);
        assert!(r.innerness_certificate(ZERO, ZERO).unwrap() < 1e-14);
        for j in 0..3 {
            let p = data.nodes()[j];
            assert!((r.eval(p.z1, p.z2).unwrap() - data.targets()[j]).norm() < 1e-9);
        }
        // agrees with the closed form
        let g = interior_grid(32);
        for &z1 in &g {
            for &z2 in &g {
                assert!((r.eval(z1, z2).unwrap() - worked_phi(z1, z2)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn grammian_mismatch_is_reported() {
        let (_, b, data) = worked();
        let bad = CVec3::from_real([0.5, 0.5, 0.5]);
        assert!(matches!(
            build_realization(&bad, &b, &data, 1e-9, 1e-10),
            Err(Error::GrammianMismatch { .. })
        ));
    }

    #[test]
    fn origin_value_is_a() {
        let r =
            Realization::from_unitary(sample::random_unitary(&mut sample::rng(5)), 1e-10).unwrap();
        assert_eq!(r.eval(ZERO, ZERO).unwrap(), r.a());
    }

    #[test]
    fn singular_resolvent_on_boundary() {
        // D = diag(0, 1): I − D·E is singular whenever z² = 1
        let u = CMat3::from_real([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        let r = Realization::from_unitary(u, 1e-12).unwrap();
        assert!(matches!(
            r.eval(ZERO, ONE),
            Err(Error::SingularResolvent { .. })
        ));
        assert!(Realization::from_unitary(CMat3::zeros(), 1e-10).is_err());
    }

    #[test]
    fn random_realizations_are_inner() {
        let mut rng = sample::rng(11);
        for _ in 0..10 {
            let r = Realization::from_unitary(sample::random_unitary(&mut rng), 1e-10).unwrap();
            for _ in 0..100 {
                let z1 = sample::random_disk_point(&mut rng, 0.99);
                let z2 = sample::random_disk_point(&mut rng, 0.99);
                assert!(r.innerness_certificate(z1, z2).unwrap() < 1e-10);
                assert!(r.eval(z1, z2).unwrap().norm() <= 1.0 + 1e-12);
            }
            for _ in 0..50 {
                let t1: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                let t2: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                if let Ok(v) = r.eval(C64::from_polar(1.0, t1), C64::from_polar(1.0, t2)) {
                    assert_abs_diff_eq!(v.norm(), 1.0, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn holomorphic_in_each_variable() {
        let mut rng = sample::rng(12);
        let r = Realization::from_unitary(sample::random_unitary(&mut rng), 1e-10).unwrap();
        let h = 1e-5;
        for _ in 0..50 {
            let z1 = sample::random_disk_point(&mut rng, 0.8);
            let z2 = sample::random_disk_point(&mut rng, 0.8);
            // ∂/∂x = −i ∂/∂y for a holomorphic function of z¹
            let dx = (r.eval(z1 + h, z2).unwrap() - r.eval(z1 - h, z2).unwrap()) / (2.0 * h);
            let i = C64::new(0.0, 1.0);
            let dy =
                (r.eval(z1 + i * h, z2).unwrap() - r.eval(z1 - i * h, z2).unwrap()) / (2.0 * h);
            assert!((dx + i * dy).norm() < 1e-6);
            let dx = (r.eval(z1, z2 + h).unwrap() - r.eval(z1, z2 - h).unwrap()) / (2.0 * h);
            let dy =
                (r.eval(z1, z2 + i * h).unwrap() - r.eval(z1, z2 - i * h).unwrap()) / (2.0 * h);
            assert!((dx + i * dy).norm() < 1e-6);
        }
    }
}
