//! Rational functions of bidegree (1, 1) and the Cramer-rule interpolant.

use crate::error::{Error, Result};
use crate::hyperbolic::{circle_grid, interior_grid, MobiusMap};
use crate::numerics::{det3, CMat3, CVec3, C64, ONE, ZERO};
use crate::pick::PickData3;

/// Monomial labels of the coefficient arrays, in order.
pub const MONOMIALS: [&str; 4] = ["1", "z1", "z2", "z1z2"];

/// φ = N/D with N, D spanned by {1, z¹, z², z¹z²}. Pure squares (z¹)² and
/// (z²)² cannot occur in this representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RationalInner2 {
    pub num: [C64; 4],
    pub den: [C64; 4],
}

fn monomials(z1: C64, z2: C64) -> [C64; 4] {
    [ONE, z1, z2, z1 * z2]
}

fn poly(c: &[C64; 4], z1: C64, z2: C64) -> C64 {
    let m = monomials(z1, z2);
    (0..4).map(|k| c[k] * m[k]).sum()
}

/// Coefficients of (p·z¹ + q)(r·z² + s).
fn affine_product(p: C64, q: C64, r: C64, s: C64) -> [C64; 4] {
    [q * s, p * s, q * r, p * r]
}

fn axpy(acc: &mut [C64; 4], k: C64, v: [C64; 4]) {
    for i in 0..4 {
        acc[i] += k * v[i];
    }
}

impl RationalInner2 {
    /// Divides numerator and denominator by den(0,0). Fails if that
    /// coefficient is zero.
    pub fn new(num: [C64; 4], den: [C64; 4]) -> Result<Self> {
        Self { num, den }.normalized()
    }

    /// The common scaling with den(0,0) = 1.
    pub fn normalized(&self) -> Result<Self> {
        let d0 = self.den[0];
        let dmax = self.den.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(d0.norm() > 1e-14 * dmax) {
            return Err(Error::VerificationFailed {
                check: "den(0,0) nonzero",
                residual: d0.norm(),
                tolerance: 1e-14 * dmax,
            });
        }
        Ok(Self {
            num: self.num.map(|c| c / d0),
            den: self.den.map(|c| c / d0),
        })
    }

    pub fn eval(&self, z1: C64, z2: C64) -> C64 {
        poly(&self.num, z1, z2) / poly(&self.den, z1, z2)
    }

    /// φ(m₁(z¹), m₂(z²)), normalized.
    pub fn precompose(&self, m1: &MobiusMap, m2: &MobiusMap) -> Result<Self> {
        // Zᵏ = (aₖzᵏ + bₖ)/(cₖzᵏ + dₖ); multiply through by (c₁z¹ + d₁)(c₂z² + d₂)
        let sub = |c: &[C64; 4]| {
            let mut out = [ZERO; 4];
            axpy(&mut out, c[0], affine_product(m1.c, m1.d, m2.c, m2.d));
            axpy(&mut out, c[1], affine_product(m1.a, m1.b, m2.c, m2.d));
            axpy(&mut out, c[2], affine_product(m1.c, m1.d, m2.a, m2.b));
            axpy(&mut out, c[3], affine_product(m1.a, m1.b, m2.a, m2.b));
            out
        };
        Self {
            num: sub(&self.num),
            den: sub(&self.den),
        }
        .normalized()
    }

    /// m ∘ φ, normalized.
    pub fn postcompose(&self, m: &MobiusMap) -> Result<Self> {
        let comb = |x: C64, y: C64| std::array::from_fn(|k| x * self.num[k] + y * self.den[k]);
        Self {
            num: comb(m.a, m.b),
            den: comb(m.c, m.d),
        }
        .normalized()
    }

    /// max ‖φ| − 1| over an n×n grid of the torus (off the point (1, 1));
    /// infinite if φ is not finite at a grid point.
    pub fn torus_deviation(&self, n: usize) -> f64 {
        let g = circle_grid(n);
        let mut worst: f64 = 0.0;
        for &z1 in &g {
            for &z2 in &g {
                let d = (self.eval(z1, z2).norm() - 1.0).abs();
                worst = if d.is_finite() {
                    worst.max(d)
                } else {
                    f64::INFINITY
                };
            }
        }
        worst
    }

    /// max |φ| over an n×n grid of pairs from [`interior_grid`].
    pub fn interior_max_modulus(&self, n: usize) -> f64 {
        let g = interior_grid(n);
        let mut worst: f64 = 0.0;
        for &z1 in &g {
            for &z2 in &g {
                let v = self.eval(z1, z2).norm();
                worst = if v.is_finite() {
                    worst.max(v)
                } else {
                    f64::INFINITY
                };
            }
        }
        worst
    }

    /// Largest coefficient of N·∂D/∂zᵏ − D·∂N/∂zᵏ (k = 1 or 2); zero exactly
    /// when φ does not depend on zᵏ.
    pub fn dependence(&self, k: usize) -> f64 {
        let (n, d) = (&self.num, &self.den);
        // write N = P + zᵏ·Q, D = R + zᵏ·S with P, Q, R, S affine in the
        // other variable; then Q·R − P·S is a quadratic in that variable
        let (p, q, r, s) = if k == 1 {
            ([n[0], n[2]], [n[1], n[3]], [d[0], d[2]], [d[1], d[3]])
        } else {
            ([n[0], n[1]], [n[2], n[3]], [d[0], d[1]], [d[2], d[3]])
        };
        let c = [
            q[0] * r[0] - p[0] * s[0],
            q[0] * r[1] + q[1] * r[0] - p[0] * s[1] - p[1] * s[0],
            q[1] * r[1] - p[1] * s[1],
        ];
        c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference after normalizing both functions.
    pub fn coefficient_distance(&self, other: &Self) -> Result<f64> {
        let (x, y) = (self.normalized()?, other.normalized()?);
        Ok((0..4)
            .map(|k| {
                (x.num[k] - y.num[k])
                    .norm()
                    .max((x.den[k] - y.den[k]).norm())
            })
            .fold(0.0, f64::max))
    }
}

/// The interpolant given by Cramer's rule.
///
/// For a fourth point z = (z¹, z²) the rank-one decomposition extends with
/// unknowns (conj(a₄), conj(b₄), φ(z)), giving the 3×3 linear system
/// v¹ᵢ·conj(a₄) + v²ᵢ·conj(b₄) + conj(wᵢ)·φ(z) = 1 with
/// v¹ᵢ = (1 − conj(λᵢ¹)z¹)aᵢ and v²ᵢ = (1 − conj(λᵢ²)z²)bᵢ. Hence
///
/// ```text
///     φ(z) = det(v¹, v², 1) / det(v¹, v², conj(w)),
/// ```
///
/// and since v¹ is affine in z¹ and v² affine in z², multilinearity of the
/// determinant yields the coefficients of {1, z¹, z², z¹z²}. `data` holds
/// the targets the pair decomposes (any frame). Fails with
/// `IdenticallyVanishingDenominator` when every denominator coefficient is
/// negligible.
pub fn cramer_phi(a: &CVec3, b: &CVec3, data: &PickData3) -> Result<RationalInner2> {
    let n = data.nodes();
    let w = data.targets();
    let a0 = *a;
    let a1 = CVec3::new(
        -n[0].z1.conj() * a[0],
        -n[1].z1.conj() * a[1],
        -n[2].z1.conj() * a[2],
    );
    let b0 = *b;
    let b1 = CVec3::new(
        -n[0].z2.conj() * b[0],
        -n[1].z2.conj() * b[1],
        -n[2].z2.conj() * b[2],
    );
    let ones = CVec3::new(ONE, ONE, ONE);
    let wbar = CVec3::new(w[0].conj(), w[1].conj(), w[2].conj());
    let coeffs = |c: &CVec3| -> [C64; 4] {
        [(&a0, &b0), (&a1, &b0), (&a0, &b1), (&a1, &b1)]
            .map(|(u, v)| det3(&CMat3::from_columns(&[*u, *v, *c])))
    };
    let num = coeffs(&ones);
    let den = coeffs(&wbar);
    let wmax = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let reference = a.norm() * b.norm() * 3f64.sqrt() * (1.0 + wmax);
    let dmax = den.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(dmax > 1e-12 * reference) {
        return Err(Error::IdenticallyVanishingDenominator {
            max_coefficient: dmax,
        });
    }
    RationalInner2::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{BidiskPoint, DiskPoint};
    use std::f64::consts::SQRT_2;

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

    fn worked_phi() -> RationalInner2 {
        RationalInner2::new(
            [ZERO, c(1.0), c(1.0), c(-2.0)],
            [c(2.0), c(-1.0), c(-1.0), ZERO],
        )
        .unwrap()
    }

    #[test]
    fn worked_example_closed_form() {
        let a = CVec3::from_real([1.0 / SQRT_2, 2.0 * SQRT_2 / 3.0, SQRT_2 / 3.0]);
        let b = CVec3::from_real([1.0 / SQRT_2, SQRT_2 / 3.0, 2.0 * SQRT_2 / 3.0]);
        let phi = cramer_phi(&a, &b, &symmetric(0.5, 1.0 / 3.0)).unwrap();
        assert!(phi.coefficient_distance(&worked_phi()).unwrap() < 1e-12);
        assert!((phi.eval(c(0.5), ZERO) - c(1.0 / 3.0)).norm() < 1e-14);
        assert!(phi.torus_deviation(64) < 1e-12);
        assert!(phi.interior_max_modulus(20) <= 1.0 + 1e-12);
        assert!(phi.dependence(1) > 1e-3 && phi.dependence(2) > 1e-3);
    }

    #[test]
    fn second_branch_closed_form() {
        let r = 0.5;
        let a2 = SQRT_2 / (2.0 + r);
        let a = CVec3::from_real([1.0 / SQRT_2, a2, SQRT_2 - a2]);
        let b = crate::extremal3::b_from_a(&a).unwrap();
        let phi = cramer_phi(&a, &b, &symmetric(r, r / (2.0 + r))).unwrap();
        let phi2 = RationalInner2::new(
            [ZERO, c(1.0), c(1.0), c(2.0)],
            [c(2.0), c(1.0), c(1.0), ZERO],
        )
        .unwrap();
        assert!(phi.coefficient_distance(&phi2).unwrap() < 1e-12);
    }

    #[test]
    fn vanishing_denominator_is_reported() {
        let a = CVec3::from_real([0.5, 0.5, 0.5]);
        let b = CVec3::from_real([0.5, 0.5, 0.5]);
        // zero targets make the last column vanish
        let d = PickData3::new(*symmetric(0.5, 0.0).nodes(), [ZERO; 3]).unwrap();
        assert!(matches!(
            cramer_phi(&a, &b, &d),
            Err(Error::IdenticallyVanishingDenominator { .. })
        ));
    }

    #[test]
    fn compositions_match_pointwise() {
        let phi = worked_phi();
        let m1 = MobiusMap::to_zero(DiskPoint::new(C64::new(0.2, -0.3)).unwrap());
        let m2 = MobiusMap::rotation(C64::from_polar(1.0, 0.4))
            .compose(&MobiusMap::to_zero(DiskPoint::new(c(-0.5)).unwrap()));
        let m = MobiusMap::to_zero(DiskPoint::new(C64::new(0.1, 0.6)).unwrap());
        let pre = phi.precompose(&m1, &m2).unwrap();
        let post = phi.postcompose(&m).unwrap();
        for &z1 in &interior_grid(7) {
            for &z2 in &interior_grid(5) {
                assert!((pre.eval(z1, z2) - phi.eval(m1.apply(z1), m2.apply(z2))).norm() < 1e-12);
                assert!((post.eval(z1, z2) - m.apply(phi.eval(z1, z2))).norm() < 1e-12);
            }
        }
        assert!(pre.torus_deviation(32) < 1e-10);
        assert!(post.torus_deviation(32) < 1e-10);
    }

    #[test]
    fn one_variable_dependence() {
        let z1_only =
            RationalInner2::new([ZERO, ONE, ZERO, ZERO], [ONE, ZERO, ZERO, ZERO]).unwrap();
        assert!(z1_only.dependence(2) == 0.0);
        assert!(z1_only.dependence(1) > 0.5);
    }
}
