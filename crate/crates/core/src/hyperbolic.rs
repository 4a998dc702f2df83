//! Disk and bidisk geometry: disk automorphisms, pseudohyperbolic and
//! Kobayashi distances, and the automorphism frame that moves the first
//! node to the origin and the first target to zero.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{C64, ONE, ZERO};
use crate::pick::PickData3;

/// A point of the open unit disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskPoint(C64);

impl DiskPoint {
    pub fn new(z: C64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "{z} is not inside the open unit disk"
            )));
        }
        Ok(Self(z))
    }

    pub fn value(self) -> C64 {
        self.0
    }
}

/// A point (z¹, z²) of the open bidisk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BidiskPoint {
    pub z1: C64,
    pub z2: C64,
}

impl BidiskPoint {
    pub fn new(z1: C64, z2: C64) -> Result<Self> {
        DiskPoint::new(z1)?;
        DiskPoint::new(z2)?;
        Ok(Self { z1, z2 })
    }

    pub fn coord(&self, k: Coord) -> C64 {
        match k {
            Coord::Z1 => self.z1,
            Coord::Z2 => self.z2,
        }
    }

    /// The same point with its coordinates exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            z1: self.z2,
            z2: self.z1,
        }
    }

    pub(crate) fn new_unchecked(z1: C64, z2: C64) -> Self {
        Self { z1, z2 }
    }
}

/// A coordinate of the bidisk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coord {
    Z1,
    Z2,
}

impl Coord {
    pub fn index(self) -> usize {
        match self {
            Coord::Z1 => 1,
            Coord::Z2 => 2,
        }
    }

    pub fn other(self) -> Coord {
        match self {
            Coord::Z1 => Coord::Z2,
            Coord::Z2 => Coord::Z1,
        }
    }
}

/// A linear fractional map z ↦ (a z + b)/(c z + d) that is an automorphism
/// of the unit disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl MobiusMap {
    /// Validates that the coefficients define a disk automorphism: nonzero
    /// determinant, the origin maps inside the disk and 16 boundary samples
    /// stay on the circle within 1e-10.
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let m = Self { a, b, c, d }.rescaled();
        if m.det().norm() <= 1e-300 {
            return Err(Error::InvalidInput("singular Möbius coefficients".into()));
        }
        if !m.is_automorphism(1e-10) {
            return Err(Error::InvalidInput(
                "Möbius map does not preserve the unit disk".into(),
            ));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// z ↦ u·z for unimodular `u`.
    pub fn rotation(u: C64) -> Self {
        Self {
            a: u / u.norm(),
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// z ↦ (z − p)/(1 − conj(p)·z).
    pub fn to_zero(p: DiskPoint) -> Self {
        let p = p.value();
        Self {
            a: ONE,
            b: -p,
            c: -p.conj(),
            d: ONE,
        }
    }

    /// The automorphism sending `p ↦ wp` and `q ↦ wq`, which exists when
    /// ρ(p, q) = ρ(wp, wq). The rotation factor is forced onto the unit
    /// circle, so for nearly equal distances the result matches `q` only
    /// approximately.
    pub fn through(p: DiskPoint, q: DiskPoint, wp: DiskPoint, wq: DiskPoint) -> Self {
        let mp = Self::to_zero(p);
        let mw = Self::to_zero(wp);
        let num = mw.apply(wq.value());
        let den = mp.apply(q.value());
        let u = if num.norm() == 0.0 || den.norm() == 0.0 {
            ONE
        } else {
            num / den
        };
        mw.inverse().compose(&Self::rotation(u)).compose(&mp)
    }

    pub fn apply(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// self ∘ inner.
    pub fn compose(&self, inner: &MobiusMap) -> MobiusMap {
        Self {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
        .rescaled()
    }

    pub fn inverse(&self) -> MobiusMap {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let s = self.d;
        if s.norm() == 0.0 {
            return false;
        }
        (self.a / s - ONE).norm() <= tol && (self.b / s).norm() <= tol && (self.c / s).norm() <= tol
    }

    pub fn is_automorphism(&self, tol: f64) -> bool {
        let z0 = self.apply(ZERO);
        if !(z0.norm() < 1.0) {
            return false;
        }
        (0..16).all(|k| {
            let z = C64::from_polar(1.0, 2.0 * PI * k as f64 / 16.0);
            (self.apply(z).norm() - 1.0).abs() <= tol
        })
    }

    fn rescaled(self) -> Self {
        let s = [self.a, self.b, self.c, self.d]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if s > 0.0 && s.is_finite() {
            let k = C64::new(1.0 / s, 0.0);
            Self {
                a: self.a * k,
                b: self.b * k,
                c: self.c * k,
                d: self.d * k,
            }
        } else {
            self
        }
    }
}

/// The automorphism of the disk taking `p` to 0.
pub fn mobius_to_zero(p: DiskPoint) -> MobiusMap {
    MobiusMap::to_zero(p)
}

/// Pseudohyperbolic distance |p − q| / |1 − conj(q)·p|.
pub fn pseudo_dist(p: DiskPoint, q: DiskPoint) -> f64 {
    rho(p.value(), q.value())
}

pub(crate) fn rho(p: C64, q: C64) -> f64 {
    let den = (ONE - q.conj() * p).norm();
    if den == 0.0 {
        return 1.0;
    }
    ((p - q).norm() / den).min(1.0)
}

/// Coordinatewise pseudohyperbolic distances (first, second).
pub fn coordinate_dists(p: &BidiskPoint, q: &BidiskPoint) -> (f64, f64) {
    (rho(p.z1, q.z1), rho(p.z2, q.z2))
}

/// Kobayashi distance of the bidisk in pseudohyperbolic form: the larger of
/// the two coordinate distances.
pub fn kobayashi_dist(p: &BidiskPoint, q: &BidiskPoint) -> f64 {
    let (d1, d2) = coordinate_dists(p, q);
    d1.max(d2)
}

/// True when both coordinates are equally far apart, within `tol`.
pub fn is_balanced(p: &BidiskPoint, q: &BidiskPoint, tol: f64) -> bool {
    let (d1, d2) = coordinate_dists(p, q);
    (d1 - d2).abs() <= tol
}

/// Coordinatewise automorphisms that carry a problem to its normalized form
/// (first node at the origin, first target at zero).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizationFrame {
    pub first: MobiusMap,
    pub second: MobiusMap,
    pub target: MobiusMap,
}

impl NormalizationFrame {
    pub fn identity() -> Self {
        Self {
            first: MobiusMap::identity(),
            second: MobiusMap::identity(),
            target: MobiusMap::identity(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.first.is_identity(0.0) && self.second.is_identity(0.0) && self.target.is_identity(0.0)
    }

    pub fn map_node(&self, p: &BidiskPoint) -> BidiskPoint {
        BidiskPoint::new_unchecked(self.first.apply(p.z1), self.second.apply(p.z2))
    }

    pub fn map_target(&self, w: C64) -> C64 {
        self.target.apply(w)
    }

    /// Carries a target value of the normalized problem back to the
    /// original frame.
    pub fn restore_target(&self, w: C64) -> C64 {
        self.target.inverse().apply(w)
    }
}

/// Moves node 1 to (0, 0) and target 1 to 0 by coordinatewise disk
/// automorphisms. A solution ψ of the normalized problem gives the solution
/// `target⁻¹ ∘ ψ ∘ (first, second)` of the original one.
pub fn normalize_problem(data: &PickData3) -> (PickData3, NormalizationFrame) {
    let l1 = data.nodes[0];
    let w1 = data.targets[0];
    let frame = NormalizationFrame {
        first: MobiusMap::to_zero(DiskPoint(l1.z1)),
        second: MobiusMap::to_zero(DiskPoint(l1.z2)),
        target: if w1 == ZERO {
            MobiusMap::identity()
        } else {
            MobiusMap::to_zero(DiskPoint(w1))
        },
    };
    let nodes = data.nodes.map(|p| frame.map_node(&p));
    let mut targets = data.targets.map(|w| frame.map_target(w));
    // exact zeros at the anchor
    targets[0] = ZERO;
    let mut nodes = nodes;
    nodes[0] = BidiskPoint::new_unchecked(ZERO, ZERO);
    (PickData3::new_unchecked(nodes, targets), frame)
}

/// n disk points spiralling out to radius 0.95:
/// uⱼ = 0.95·(j/(n−1))·exp(2πij/n). For n = 1 the single point is 0.
pub fn interior_grid(n: usize) -> Vec<C64> {
    if n <= 1 {
        return vec![ZERO; n];
    }
    (0..n)
        .map(|j| {
            let r = 0.95 * j as f64 / (n - 1) as f64;
            C64::from_polar(r, 2.0 * PI * j as f64 / n as f64)
        })
        .collect()
}

/// n points exp(2πi(j + ½)/n) on the unit circle. The half-step offset
/// keeps the grid off 1, where rational inner functions commonly have
/// their boundary singularities.
pub fn circle_grid(n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / n as f64))
        .collect()
}
