//! Seeded random instances: Haar-distributed 3×3 unitaries and bidisk
//! nodes, and the round-trip generator that turns them into interpolation
//! data with a known inner interpolant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hyperbolic::BidiskPoint;
use crate::numerics::{CMat3, CVec3, C64};
use crate::pick::PickData3;
use crate::realization::Realization;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unitary: Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl Rng) -> CMat3 {
    let mut cols: Vec<CVec3> = Vec::with_capacity(3);
    while cols.len() < 3 {
        let mut u = CVec3::new(gaussian(rng), gaussian(rng), gaussian(rng));
        for e in &cols {
            let c = e.dot(&u);
            u = u - e.scale(c);
        }
        let n = u.norm();
        if n > 1e-6 {
            cols.push(u.scale(C64::new(1.0 / n, 0.0)));
        }
    }
    CMat3::from_columns(&[cols[0], cols[1], cols[2]])
}

/// A point uniformly distributed on the disk of the given radius.
pub fn random_disk_point(rng: &mut impl Rng, radius: f64) -> C64 {
    let r = radius * rng.gen::<f64>().sqrt();
    C64::from_polar(r, rng.gen::<f64>() * std::f64::consts::TAU)
}

pub fn random_bidisk_point(rng: &mut impl Rng, radius: f64) -> BidiskPoint {
    BidiskPoint::new(
        random_disk_point(rng, radius),
        random_disk_point(rng, radius),
    )
    .expect("radius below one")
}

/// Random unitary U and random nodes in the bidisk of radius 0.9; the
/// targets are the values of the transfer function of U at the nodes.
pub fn round_trip_instance(rng: &mut impl Rng) -> (Realization, PickData3) {
    loop {
        let real = Realization::from_unitary(random_unitary(rng), 1e-10)
            .expect("Gram–Schmidt output is unitary");
        let nodes = [0; 3].map(|_| random_bidisk_point(rng, 0.9));
        let targets = nodes.map(|p| real.eval(p.z1, p.z2).expect("interior point"));
        if let Ok(data) = PickData3::new(nodes, targets) {
            return (real, data);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_and_deterministic() {
        let u = random_unitary(&mut rng(7));
        assert!(u.unitarity_defect() < 1e-12);
        assert_eq!(u, random_unitary(&mut rng(7)));
        assert_ne!(u, random_unitary(&mut rng(8)));
    }

    #[test]
    fn disk_points_stay_inside() {
        let mut r = rng(1);
        for _ in 0..1000 {
            assert!(random_disk_point(&mut r, 0.9).norm() <= 0.9);
        }
    }

    #[test]
    fn round_trip_targets_in_disk() {
        let mut r = rng(3);
        for _ in 0..20 {
            let (_, d) = round_trip_instance(&mut r);
            assert!(d.in_disk());
        }
    }
}
