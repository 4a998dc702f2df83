//! Extremal three-point Pick interpolation on the bidisk.
//!
//! Given nodes λ₁, λ₂, λ₃ in 𝔻² and targets w₁, w₂, w₃, the solver finds
//! the largest scaling t* for which the problem λᵢ ↦ t·wᵢ (taken in the
//! frame where w₁ = 0) still has a solution of norm at most one, recovers
//! the unique rank-one decomposition
//!
//! ```text
//!     1 − conj(wᵢ)wⱼ = (1 − conj(λᵢ¹)λⱼ¹)·aᵢ·conj(aⱼ) + (1 − conj(λᵢ²)λⱼ²)·bᵢ·conj(bⱼ)
//! ```
//!
//! at that scale, and writes the unique interpolant as a rational inner
//! function of bidegree (1, 1) via Cramer's rule. An independent
//! transfer-function realization cross-checks the result.
//!
//! Module map:
//! - [`numerics`]: 3×3 complex linear algebra.
//! - [`hyperbolic`]: disk automorphisms and distances.
//! - [`pick`]: problem data, kernel predicates, classification and the
//!   two-point solver.
//! - [`extremal3`]: extremal scale, rank-one pair, closed-form interpolant.
//! - [`realization`]: unitary realization ψ = A + B·E·(I − D·E)⁻¹·C.
//! - [`sample`]: seeded random unitaries and nodes for round-trip tests.

pub mod config;
pub mod error;
pub mod extremal3;
pub mod hyperbolic;
pub mod numerics;
pub mod pick;
pub mod realization;
pub mod sample;

pub use config::SolverConfig;
pub use error::{Error, Result, Stage};
pub use extremal3::{
    solve_extremal, FeasibilityResult, PermissiblePair, RationalInner2, SolveReport,
};
pub use hyperbolic::{BidiskPoint, Coord, DiskPoint, MobiusMap, NormalizationFrame};
pub use numerics::{CMat3, CVec3, HermMat3, C64};
pub use pick::{ClassKind, Classification, PickData3, PickMatrices, TwoPointSolution};
pub use realization::Realization;
