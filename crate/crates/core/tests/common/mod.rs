//! Instance generators shared by the integration tests.
#![allow(dead_code)]

use bidisk_pick::hyperbolic::BidiskPoint;
use bidisk_pick::{sample, solve_extremal, PickData3, Realization, SolveReport, SolverConfig, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Nodes (0,0), (r,0), (0,r) with target direction (0, 1, 1).
pub fn symmetric(r: f64) -> PickData3 {
    let z = c(0.0, 0.0);
    PickData3::new(
        [
            BidiskPoint::new(z, z).unwrap(),
            BidiskPoint::new(c(r, 0.0), z).unwrap(),
            BidiskPoint::new(z, c(r, 0.0)).unwrap(),
        ],
        [z, c(1.0, 0.0), c(1.0, 0.0)],
    )
    .unwrap()
}

/// A solved round-trip instance: the realization that produced the data,
/// the data, and the extremal solution along its scaling direction.
pub struct Solved {
    pub source: Realization,
    pub data: PickData3,
    pub report: SolveReport,
}

/// The first `count` round-trip instances from `seed` that are not
/// classified away. Any other solver error fails the calling test.
pub fn solved_round_trips(seed: u64, count: usize, cfg: &SolverConfig) -> Vec<Solved> {
    let mut rng = sample::rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut drawn = 0;
    while out.len() < count {
        drawn += 1;
        assert!(drawn <= 10 * count, "too few non-degenerate instances");
        let (source, data) = sample::round_trip_instance(&mut rng);
        match solve_extremal(&data, cfg) {
            Ok(report) => out.push(Solved {
                source,
                data,
                report,
            }),
            Err(e) if e.is_classification() => {}
            Err(e) => panic!("instance {drawn} of seed {seed}: {e}"),
        }
    }
    out
}

/// Second-to-first eigenvalue ratio of a PSD matrix.
pub fn rank_one_ratio(m: &bidisk_pick::HermMat3) -> f64 {
    let e = m.eig();
    e.values[1].abs() / e.values[0]
}
