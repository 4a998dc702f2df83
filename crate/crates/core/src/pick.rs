//! Problem data, the matrices W, Λ¹, Λ², kernel predicates, classification
//! of three-point problems and the complete two-point solver.

use std::fmt;

use crate::error::{Error, Result};
use crate::hyperbolic::{
    coordinate_dists, kobayashi_dist, rho, BidiskPoint, Coord, DiskPoint, MobiusMap,
};
use crate::numerics::{HermMat3, C64, ONE, ZERO};

/// Three distinct bidisk nodes and their target values.
///
/// Targets must lie in the open unit disk. The one exception is data whose
/// first target is exactly zero: then the targets only fix a direction of
/// scaling (the extremal solver multiplies them by t), so the remaining
/// targets may have any finite modulus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PickData3 {
    pub(crate) nodes: [BidiskPoint; 3],
    pub(crate) targets: [C64; 3],
}

impl PickData3 {
    pub fn new(nodes: [BidiskPoint; 3], targets: [C64; 3]) -> Result<Self> {
        for p in &nodes {
            BidiskPoint::new(p.z1, p.z2)?;
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if nodes[i] == nodes[j] {
                    return Err(Error::InvalidInput(format!(
                        "nodes {} and {} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for (i, w) in targets.iter().enumerate() {
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "target {} is not finite",
                    i + 1
                )));
            }
        }
        if targets[0] != ZERO {
            for (i, w) in targets.iter().enumerate() {
                if w.norm() >= 1.0 {
                    return Err(Error::InvalidInput(format!(
                        "target {} = {w} is not inside the open unit disk",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { nodes, targets })
    }

    pub(crate) fn new_unchecked(nodes: [BidiskPoint; 3], targets: [C64; 3]) -> Self {
        Self { nodes, targets }
    }

    pub fn nodes(&self) -> &[BidiskPoint; 3] {
        &self.nodes
    }

    pub fn targets(&self) -> &[C64; 3] {
        &self.targets
    }

    /// True when every target lies in the open unit disk.
    pub fn in_disk(&self) -> bool {
        self.targets.iter().all(|w| w.norm() < 1.0)
    }

    /// The same nodes with targets multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.nodes, self.targets.map(|w| w * t))
    }

    pub(crate) fn scaled_unchecked(&self, t: f64) -> Self {
        Self::new_unchecked(self.nodes, self.targets.map(|w| w * t))
    }

    /// The problem with the two bidisk coordinates exchanged.
    pub fn swapped(&self) -> Self {
        Self::new_unchecked(self.nodes.map(|p| p.swapped()), self.targets)
    }
}

/// W, Λ¹ and Λ² of a problem: Wᵢⱼ = 1 − conj(wᵢ)wⱼ and
/// Λᵏᵢⱼ = 1 − conj(λᵢᵏ)λⱼᵏ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PickMatrices {
    pub w: HermMat3,
    pub l1: HermMat3,
    pub l2: HermMat3,
}

impl PickMatrices {
    pub fn new(data: &PickData3) -> Self {
        build_matrices(data)
    }

    pub fn lambda(&self, k: Coord) -> &HermMat3 {
        match k {
            Coord::Z1 => &self.l1,
            Coord::Z2 => &self.l2,
        }
    }

    /// ‖W − Λ¹∘Γ − Λ²∘Δ‖_F.
    pub fn decomposition_residual(&self, gamma: &HermMat3, delta: &HermMat3) -> f64 {
        self.w
            .sub(&self.l1.schur(gamma))
            .sub(&self.l2.schur(delta))
            .frobenius_norm()
    }
}

pub fn build_matrices(data: &PickData3) -> PickMatrices {
    let n = &data.nodes;
    let w = &data.targets;
    PickMatrices {
        w: HermMat3::from_upper(|i, j| ONE - w[i].conj() * w[j]),
        l1: HermMat3::from_upper(|i, j| ONE - n[i].z1.conj() * n[j].z1),
        l2: HermMat3::from_upper(|i, j| ONE - n[i].z2.conj() * n[j].z2),
    }
}

/// Both matrices PSD (minimum eigenvalue ≥ −tol) and
/// ‖W − Λ¹∘Γ − Λ²∘Δ‖_F ≤ tol.
pub fn is_permissible(gamma: &HermMat3, delta: &HermMat3, mats: &PickMatrices, tol: f64) -> bool {
    gamma.min_eigenvalue() >= -tol
        && delta.min_eigenvalue() >= -tol
        && mats.decomposition_residual(gamma, delta) <= tol
}

fn require_kernel(k: &HermMat3) -> Result<()> {
    let m = k.min_eigenvalue();
    if m > 0.0 {
        Ok(())
    } else {
        Err(Error::NotAKernel { min_eigenvalue: m })
    }
}

/// K positive definite with Λ¹∘K ⪰ 0 and Λ²∘K ⪰ 0 (within `tol`).
pub fn is_admissible(k: &HermMat3, mats: &PickMatrices, tol: f64) -> Result<bool> {
    require_kernel(k)?;
    Ok(mats.l1.schur(k).min_eigenvalue() >= -tol && mats.l2.schur(k).min_eigenvalue() >= -tol)
}

/// Admissible, with K∘W PSD but singular (within `tol`).
pub fn is_active(k: &HermMat3, mats: &PickMatrices, tol: f64) -> Result<bool> {
    if !is_admissible(k, mats, tol)? {
        return Ok(false);
    }
    let m = mats.w.schur(k).min_eigenvalue();
    Ok(m.abs() <= tol)
}

/// Outcome of [`classify`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    /// Solvable by a function of z¹ alone.
    Degenerate1,
    /// Solvable by a function of z² alone.
    Degenerate2,
    /// The two-point subproblem on nodes (i, j) (0-based) is extremal.
    TwoPointExtremal(usize, usize),
    NonDegenerateCandidate,
}

impl ClassKind {
    pub fn degenerate(k: Coord) -> Self {
        match k {
            Coord::Z1 => ClassKind::Degenerate1,
            Coord::Z2 => ClassKind::Degenerate2,
        }
    }

    /// Exchanges Degenerate1 and Degenerate2.
    pub fn swapped(self) -> Self {
        match self {
            ClassKind::Degenerate1 => ClassKind::Degenerate2,
            ClassKind::Degenerate2 => ClassKind::Degenerate1,
            k => k,
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassKind::Degenerate1 => f.write_str("Degenerate1"),
            ClassKind::Degenerate2 => f.write_str("Degenerate2"),
            ClassKind::TwoPointExtremal(i, j) => write!(f, "TwoPointExtremal({},{})", i + 1, j + 1),
            ClassKind::NonDegenerateCandidate => f.write_str("NonDegenerateCandidate"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub kind: ClassKind,
    pub details: String,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.kind, self.details)
    }
}

/// The one-variable Pick matrix ((1 − conj(wᵢ)wⱼ)/(1 − conj(λᵢᵏ)λⱼᵏ)).
pub fn one_variable_pick_matrix(data: &PickData3, k: Coord) -> HermMat3 {
    let mats = build_matrices(data);
    let l = mats.lambda(k);
    mats.w.map_entries(|i, j, w| w / l.get(i, j))
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Classifies in-disk data.
///
/// Checks run in this order: a pair whose target distance exceeds the node
/// distance by more than `tol` is an error (`Infeasible`); then the
/// one-variable Pick matrices (PSD within `tol` means degenerate); then
/// two-point extremality (target distance ≥ Kobayashi distance − `tol`).
pub fn classify(data: &PickData3, tol: f64) -> Result<Classification> {
    if !data.in_disk() {
        return Err(Error::InvalidInput(
            "classification needs every target inside the open unit disk".into(),
        ));
    }
    let n = &data.nodes;
    let w = &data.targets;
    for &(i, j) in &PAIRS {
        let target_dist = rho(w[i], w[j]);
        let node_dist = kobayashi_dist(&n[i], &n[j]);
        if target_dist > node_dist + tol {
            return Err(Error::Infeasible {
                i,
                j,
                target_dist,
                node_dist,
            });
        }
    }
    for k in [Coord::Z1, Coord::Z2] {
        let m = one_variable_pick_matrix(data, k).min_eigenvalue();
        if m >= -tol {
            return Ok(Classification {
                kind: ClassKind::degenerate(k),
                details: format!(
                    "one-variable Pick matrix in z{} is PSD (min eigenvalue {m:.3e})",
                    k.index()
                ),
            });
        }
    }
    for &(i, j) in &PAIRS {
        let target_dist = rho(w[i], w[j]);
        let node_dist = kobayashi_dist(&n[i], &n[j]);
        if target_dist >= node_dist - tol {
            return Ok(Classification {
                kind: ClassKind::TwoPointExtremal(i, j),
                details: format!(
                    "nodes {} and {}: target distance {target_dist:.12} reaches Kobayashi distance {node_dist:.12}",
                    i + 1,
                    j + 1
                ),
            });
        }
    }
    Ok(Classification {
        kind: ClassKind::NonDegenerateCandidate,
        details: "no one-variable solution and no extremal two-point subproblem".into(),
    })
}

/// sup{t ≥ 0 : the one-variable problem in coordinate k with targets t·wᵢ
/// is solvable}, capped at 1/max|wᵢ|; infinite when all targets vanish.
///
/// The Pick matrix of the scaled data is C − t²·M with Cᵢⱼ = 1/Λᵏᵢⱼ and
/// Mᵢⱼ = conj(wᵢ)wⱼ/Λᵏᵢⱼ. Its smallest eigenvalue is concave and
/// nonincreasing in t², so bisection applies; `tol` is the eigenvalue slack
/// relative to ‖C‖.
pub fn one_variable_extremal_scale(data: &PickData3, k: Coord, tol: f64) -> f64 {
    let mats = build_matrices(data);
    let l = mats.lambda(k);
    let w = &data.targets;
    let c = HermMat3::from_upper(|i, j| ONE / l.get(i, j));
    let m = HermMat3::from_upper(|i, j| w[i].conj() * w[j] / l.get(i, j));
    let wmax = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if wmax == 0.0 {
        return f64::INFINITY;
    }
    let slack = tol * c.frobenius_norm();
    let ok = |s: f64| c.sub(&m.scale(s)).min_eigenvalue() >= -slack;
    let s_max = 1.0 / (wmax * wmax);
    if !ok(0.0) {
        return 0.0;
    }
    if ok(s_max) {
        return s_max.sqrt();
    }
    let (mut lo, mut hi) = (0.0, s_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.sqrt()
}

/// sup{t ≥ 0 : ρ(t·wᵢ, t·wⱼ) ≤ Kobayashi distance of nodes i, j}, capped at
/// 1/max(|wᵢ|, |wⱼ|); infinite when wᵢ = wⱼ = 0. ρ(t·u, t·v) is
/// nondecreasing in t by the Schwarz–Pick lemma.
pub fn two_point_extremal_scale(data: &PickData3, i: usize, j: usize) -> f64 {
    let (wi, wj) = (data.targets[i], data.targets[j]);
    let kob = kobayashi_dist(&data.nodes[i], &data.nodes[j]);
    let wmax = wi.norm().max(wj.norm());
    if wmax == 0.0 {
        return f64::INFINITY;
    }
    let cap = 1.0 / wmax;
    if wi == wj {
        return cap;
    }
    let (mut lo, mut hi) = (0.0, cap);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rho(wi * mid, wj * mid) <= kob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The smallest pairwise extremal scale over the three pairs, with the
/// pair attaining it.
pub fn min_two_point_scale(data: &PickData3) -> (f64, (usize, usize)) {
    PAIRS
        .iter()
        .map(|&(i, j)| (two_point_extremal_scale(data, i, j), (i, j)))
        .fold((f64::INFINITY, (0, 1)), |best, cur| {
            if cur.0 < best.0 {
                cur
            } else {
                best
            }
        })
}

/// A degree-≤1 one-variable interpolant z ↦ target_inv(factor·node_map(zᵏ))
/// with |factor| ≤ 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlaschkeWitness {
    pub coord: Coord,
    pub node_map: MobiusMap,
    pub factor: C64,
    pub target_inv: MobiusMap,
}

impl BlaschkeWitness {
    pub fn eval(&self, z: &BidiskPoint) -> C64 {
        self.target_inv
            .apply(self.factor * self.node_map.apply(z.coord(self.coord)))
    }
}

/// The two coordinatewise Möbius solutions of a balanced extremal pair.
/// Every convex combination s·first(z¹) + (1 − s)·second(z²) also solves.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BalancedFamily {
    pub first: MobiusMap,
    pub second: MobiusMap,
}

impl BalancedFamily {
    pub fn eval(&self, s: f64, z: &BidiskPoint) -> C64 {
        self.first.apply(z.z1) * s + self.second.apply(z.z2) * (1.0 - s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TwoPointSolution {
    Infeasible {
        target_dist: f64,
        node_dist: f64,
    },
    /// φ(z) = map(zᵏ), the only solution.
    UniqueExtremal {
        map: MobiusMap,
        coord: Coord,
    },
    BalancedExtremal(BalancedFamily),
    NonExtremal(BlaschkeWitness),
}

impl TwoPointSolution {
    pub fn is_extremal(&self) -> bool {
        matches!(
            self,
            TwoPointSolution::UniqueExtremal { .. } | TwoPointSolution::BalancedExtremal(_)
        )
    }

    /// Evaluates the returned solution: the unique one, the witness, or the
    /// z¹ member of a balanced family. `None` when infeasible.
    pub fn eval(&self, z: &BidiskPoint) -> Option<C64> {
        match self {
            TwoPointSolution::Infeasible { .. } => None,
            TwoPointSolution::UniqueExtremal { map, coord } => Some(map.apply(z.coord(*coord))),
            TwoPointSolution::BalancedExtremal(f) => Some(f.eval(1.0, z)),
            TwoPointSolution::NonExtremal(w) => Some(w.eval(z)),
        }
    }
}

/// Solves the two-point problem p ↦ w1, q ↦ w2 on the bidisk.
///
/// Solvable iff ρ(w1, w2) ≤ Kobayashi(p, q). At equality (within `tol`) the
/// solution is a Möbius map of the attaining coordinate, unique unless the
/// pair is balanced. Below equality a one-variable Blaschke witness of
/// degree ≤ 1 in the attaining coordinate (ties: z¹) is returned.
pub fn solve_two_point(
    p: &BidiskPoint,
    q: &BidiskPoint,
    w1: DiskPoint,
    w2: DiskPoint,
    tol: f64,
) -> Result<TwoPointSolution> {
    if p == q {
        return Err(Error::InvalidInput("the two nodes coincide".into()));
    }
    let target_dist = rho(w1.value(), w2.value());
    let (d1, d2) = coordinate_dists(p, q);
    let node_dist = d1.max(d2);
    if target_dist > node_dist + tol {
        return Ok(TwoPointSolution::Infeasible {
            target_dist,
            node_dist,
        });
    }
    let coord = if d1 >= d2 { Coord::Z1 } else { Coord::Z2 };
    let through = |k: Coord| {
        MobiusMap::through(
            DiskPoint::new(p.coord(k)).expect("validated node"),
            DiskPoint::new(q.coord(k)).expect("validated node"),
            w1,
            w2,
        )
    };
    if target_dist >= node_dist - tol {
        if (d1 - d2).abs() <= tol {
            return Ok(TwoPointSolution::BalancedExtremal(BalancedFamily {
                first: through(Coord::Z1),
                second: through(Coord::Z2),
            }));
        }
        return Ok(TwoPointSolution::UniqueExtremal {
            map: through(coord),
            coord,
        });
    }
    let node_map = MobiusMap::to_zero(DiskPoint::new(p.coord(coord))?);
    let target_map = MobiusMap::to_zero(w1);
    let factor = target_map.apply(w2.value()) / node_map.apply(q.coord(coord));
    Ok(TwoPointSolution::NonExtremal(BlaschkeWitness {
        coord,
        node_map,
        factor,
        target_inv: target_map.inverse(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn bp(a: f64, b: f64) -> BidiskPoint {
        BidiskPoint::new(c(a), c(b)).unwrap()
    }

    fn worked() -> PickData3 {
        PickData3::new(
            [bp(0.0, 0.0), bp(0.5, 0.0), bp(0.0, 0.5)],
            [ZERO, c(1.0 / 3.0), c(1.0 / 3.0)],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let nodes = [bp(0.0, 0.0), bp(0.5, 0.0), bp(0.0, 0.5)];
        assert!(PickData3::new([nodes[0], nodes[0], nodes[2]], [ZERO; 3]).is_err());
        assert!(PickData3::new(nodes, [c(0.1), c(1.0), ZERO]).is_err());
        // a zero first target makes the rest a scaling direction
        assert!(PickData3::new(nodes, [ZERO, c(1.0), c(1.0)]).is_ok());
        assert!(PickData3::new(nodes, [ZERO, c(f64::NAN), c(1.0)]).is_err());
        assert!(worked().scaled(4.0).is_ok());
        let d = PickData3::new(nodes, [c(0.1), c(0.2), c(0.3)]).unwrap();
        assert!(d.scaled(4.0).is_err());
    }

    #[test]
    fn build_matrices_examples() {
        let zero_targets = PickData3::new(worked().nodes, [ZERO; 3]).unwrap();
        assert_eq!(build_matrices(&zero_targets).w, HermMat3::ones());

        let m = build_matrices(&worked());
        for j in 0..3 {
            assert_abs_diff_eq!((m.w.get(0, j) - ONE).norm(), 0.0, epsilon = 1e-15);
        }
        assert_abs_diff_eq!((m.w.get(1, 1) - c(8.0 / 9.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.w.get(1, 2) - c(8.0 / 9.0)).norm(), 0.0, epsilon = 1e-15);
        let l1 = HermMat3::diag([0.0, -0.25, 0.0]).add(&HermMat3::ones());
        let l2 = HermMat3::diag([0.0, 0.0, -0.25]).add(&HermMat3::ones());
        assert!(m.l1.sub(&l1).frobenius_norm() < 1e-15);
        assert!(m.l2.sub(&l2).frobenius_norm() < 1e-15);
    }

    #[test]
    fn permissible_examples() {
        // second coordinates all zero: Λ² = J, so (0, J) decomposes W = J
        let d = PickData3::new([bp(0.0, 0.0), bp(0.5, 0.0), bp(0.2, 0.0)], [ZERO; 3]).unwrap();
        let m = build_matrices(&d);
        assert!(is_permissible(
            &HermMat3::zeros(),
            &HermMat3::ones(),
            &m,
            1e-12
        ));
        let m = build_matrices(&worked());
        assert!(!is_permissible(
            &HermMat3::zeros(),
            &HermMat3::zeros(),
            &m,
            1e-9
        ));

        let s2 = std::f64::consts::SQRT_2;
        let a = crate::numerics::CVec3::from_real([1.0 / s2, 2.0 * s2 / 3.0, s2 / 3.0]);
        let b = crate::numerics::CVec3::from_real([1.0 / s2, s2 / 3.0, 2.0 * s2 / 3.0]);
        assert!(is_permissible(&a.outer_self(), &b.outer_self(), &m, 1e-12));
    }

    #[test]
    fn admissible_and_active_examples() {
        let m = build_matrices(&worked());
        // The product of the two Szegő kernels is admissible: Schur-multiplying
        // it by Λᵏ leaves the Szegő kernel of the other coordinate.
        let nodes = worked().nodes;
        let szego = HermMat3::from_upper(|i, j| {
            let (p, q) = (nodes[i], nodes[j]);
            C64::new(1.0, 0.0)
                / ((C64::new(1.0, 0.0) - p.z1.conj() * q.z1)
                    * (C64::new(1.0, 0.0) - p.z2.conj() * q.z2))
        });
        assert!(is_admissible(&szego, &m, 1e-12).unwrap());
        // J + εI is not: Λ¹ itself is indefinite for these nodes.
        assert!(m.l1.min_eigenvalue() < -0.1);
        let k = HermMat3::ones().add(&HermMat3::identity().scale(1e-6));
        assert!(!is_admissible(&k, &m, 1e-12).unwrap());
        assert!(is_admissible(&HermMat3::identity(), &m, 0.0).unwrap());
        assert!(matches!(
            is_admissible(&HermMat3::ones(), &m, 1e-12),
            Err(Error::NotAKernel { .. })
        ));
        // K = I with zero targets: K∘W = I is nonsingular
        let z = PickData3::new(worked().nodes, [ZERO; 3]).unwrap();
        assert!(!is_active(&HermMat3::identity(), &build_matrices(&z), 1e-9).unwrap());
        // non-extremal data with K = I
        let half = worked().scaled(0.5).unwrap();
        assert!(!is_active(&HermMat3::identity(), &build_matrices(&half), 1e-9).unwrap());
    }

    #[test]
    fn admissibility_can_fail() {
        // a kernel concentrated on a direction that Λ¹ penalizes
        let d = PickData3::new([bp(0.0, 0.0), bp(0.9, 0.0), bp(-0.9, 0.0)], [ZERO; 3]).unwrap();
        let m = build_matrices(&d);
        let v = crate::numerics::CVec3::from_real([1.0, 1.0, 1.0]);
        let k = v.outer_self().add(&HermMat3::identity().scale(1e-3));
        let l1k = m.l1.schur(&k).min_eigenvalue();
        assert!(l1k < -1e-6);
        assert!(!is_admissible(&k, &m, 1e-9).unwrap());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&worked(), 1e-9).unwrap().kind,
            ClassKind::NonDegenerateCandidate
        );
        let d = PickData3::new(
            [bp(0.0, 0.0), bp(0.5, 0.0), bp(0.75, 0.0)],
            [ZERO, c(0.5), c(0.75)],
        )
        .unwrap();
        assert_eq!(classify(&d, 1e-9).unwrap().kind, ClassKind::Degenerate1);
        assert_eq!(
            classify(&d.swapped(), 1e-9).unwrap().kind,
            ClassKind::Degenerate2
        );

        let d = PickData3::new(
            [bp(0.0, 0.0), bp(0.5, 0.5), bp(0.25, 0.0)],
            [ZERO, c(0.5), c(0.1)],
        )
        .unwrap();
        assert_eq!(
            classify(&d, 1e-9).unwrap().kind,
            ClassKind::TwoPointExtremal(0, 1)
        );

        let d = PickData3::new(
            [bp(0.0, 0.0), bp(0.5, 0.5), bp(0.25, 0.0)],
            [ZERO, c(0.6), c(0.1)],
        )
        .unwrap();
        assert!(matches!(
            classify(&d, 1e-9),
            Err(Error::Infeasible { i: 0, j: 1, .. })
        ));
        assert!(classify(&worked().scaled(3.0).unwrap(), 1e-9).is_err());
    }

    #[test]
    fn scales_of_worked_example() {
        // direction (0, 1, 1): the two-point scales are r = 1/2 and the
        // one-variable scales lie below the extremal scale 1/3
        let d = worked().scaled(3.0).unwrap();
        assert_abs_diff_eq!(two_point_extremal_scale(&d, 0, 1), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(two_point_extremal_scale(&d, 0, 2), 0.5, epsilon = 1e-14);
        assert_eq!(two_point_extremal_scale(&d, 1, 2), 1.0);
        let t1 = one_variable_extremal_scale(&d, Coord::Z1, 1e-14);
        let t2 = one_variable_extremal_scale(&d, Coord::Z2, 1e-14);
        assert!(t1 < 1.0 / 3.0 - 1e-3 && t2 < 1.0 / 3.0 - 1e-3);
        assert_abs_diff_eq!(t1, t2, epsilon = 1e-9);
    }

    #[test]
    fn one_variable_scale_matches_schwarz() {
        // nodes (0, ·), (r, ·) in z¹ with targets (0, 1): solvable iff t ≤ r
        let d = PickData3::new(
            [bp(0.0, 0.0), bp(0.4, 0.1), bp(0.0, 0.3)],
            [ZERO, c(1.0), ZERO],
        )
        .unwrap();
        assert_abs_diff_eq!(
            one_variable_extremal_scale(&d, Coord::Z1, 1e-14),
            0.4,
            epsilon = 1e-6
        );
    }

    #[test]
    fn two_point_balanced_example() {
        let s = solve_two_point(
            &bp(0.0, 0.0),
            &bp(0.5, 0.5),
            DiskPoint::new(ZERO).unwrap(),
            DiskPoint::new(c(0.5)).unwrap(),
            1e-10,
        )
        .unwrap();
        let TwoPointSolution::BalancedExtremal(f) = s else {
            panic!("expected balanced, got {s:?}");
        };
        for k in 0..100 {
            let z = C64::from_polar(0.99 * k as f64 / 100.0, 0.37 * k as f64);
            let p = BidiskPoint::new(z, z).unwrap();
            assert!((f.first.apply(z) - z).norm() < 1e-12);
            assert!((f.second.apply(z) - z).norm() < 1e-12);
            assert!((f.eval(0.3, &p) - z).norm() < 1e-12);
        }
    }

    #[test]
    fn two_point_unique_and_witness() {
        let s = solve_two_point(
            &bp(0.0, 0.0),
            &bp(0.5, 0.0),
            DiskPoint::new(ZERO).unwrap(),
            DiskPoint::new(c(0.5)).unwrap(),
            1e-10,
        )
        .unwrap();
        match s {
            TwoPointSolution::UniqueExtremal { map, coord } => {
                assert_eq!(coord, Coord::Z1);
                assert!(map.is_identity(1e-14));
            }
            other => panic!("expected unique extremal, got {other:?}"),
        }

        let s = solve_two_point(
            &bp(0.0, 0.0),
            &bp(0.5, 0.0),
            DiskPoint::new(ZERO).unwrap(),
            DiskPoint::new(c(0.25)).unwrap(),
            1e-10,
        )
        .unwrap();
        let TwoPointSolution::NonExtremal(w) = s else {
            panic!("expected witness, got {s:?}");
        };
        assert_eq!(w.coord, Coord::Z1);
        assert_abs_diff_eq!((w.factor - c(0.5)).norm(), 0.0, epsilon = 1e-15);
        assert!(w.eval(&bp(0.0, 0.7)).norm() < 1e-15);
        assert!((w.eval(&bp(0.5, -0.2)) - c(0.25)).norm() < 1e-15);

        let s = solve_two_point(
            &bp(0.0, 0.0),
            &bp(0.5, 0.0),
            DiskPoint::new(ZERO).unwrap(),
            DiskPoint::new(c(0.6)).unwrap(),
            1e-10,
        )
        .unwrap();
        assert!(matches!(s, TwoPointSolution::Infeasible { .. }));
        assert!(s.eval(&bp(0.0, 0.0)).is_none());
    }
}
