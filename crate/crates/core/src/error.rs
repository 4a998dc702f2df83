use thiserror::Error;

use crate::pick::Classification;

/// Pipeline stage names carried by [`Error::Stage`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Normalize,
    Classify,
    ExtremalScale,
    Feasibility,
    RankOne,
    Newton,
    Cramer,
    Realization,
    Verify,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Normalize => "normalize",
            Stage::Classify => "classify",
            Stage::ExtremalScale => "extremal-scale",
            Stage::Feasibility => "feasibility",
            Stage::RankOne => "rank-one",
            Stage::Newton => "newton",
            Stage::Cramer => "cramer",
            Stage::Realization => "realization",
            Stage::Verify => "verify",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("Gram matrices differ by {deviation:.3e}")]
    GrammianMismatch { deviation: f64 },

    #[error("kernel is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotAKernel { min_eigenvalue: f64 },

    #[error("nodes {i} and {j}: target distance {target_dist:.6} exceeds Kobayashi distance {node_dist:.6}; no interpolant exists", i = .i + 1, j = .j + 1)]
    Infeasible {
        i: usize,
        j: usize,
        target_dist: f64,
        node_dist: f64,
    },

    #[error("all targets coincide after normalization; the extremal scaling is undefined")]
    AllZeroTargets,

    #[error("feasibility solver stalled after {iterations} iterations (margin bracket [{lower:.3e}, {upper:.3e}])")]
    StallWithoutVerdict {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("problem is degenerate at the extremal scale: {0}")]
    DegenerateAtExtreme(String),

    #[error("matrix is not rank one (eigenvalues {eigenvalues:?})")]
    NotRankOne { eigenvalues: [f64; 3] },

    #[error("first entry a1 = {a1} leaves no room for b1 = sqrt(1 - a1^2)")]
    DegenerateFirstEntry { a1: f64 },

    #[error("Newton iteration did not converge in {iterations} steps (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Newton system is singular (numerical rank {rank}, smallest singular value {sigma_min:.3e})")]
    JacobianSingular { rank: usize, sigma_min: f64 },

    #[error(
        "the Cramer denominator vanishes identically (coefficients max {max_coefficient:.3e})"
    )]
    IdenticallyVanishingDenominator { max_coefficient: f64 },

    #[error("resolvent I - D E is singular at ({z1}, {z2})")]
    SingularResolvent {
        z1: num_complex::Complex64,
        z2: num_complex::Complex64,
    },

    #[error("problem classified as {0}; no three-point extremal interpolant is produced")]
    ClassifiedAway(Classification),

    #[error("verification failed: {check} residual {residual:.3e} exceeds {tolerance:.1e}")]
    VerificationFailed {
        check: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, with stage wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for outcomes that are mathematical answers about the data
    /// (degenerate, two-point extremal, infeasible) rather than solver
    /// failures.
    pub fn is_classification(&self) -> bool {
        matches!(
            self.root(),
            Error::ClassifiedAway(_) | Error::Infeasible { .. } | Error::DegenerateAtExtreme(_)
        )
    }

    pub fn is_invalid_input(&self) -> bool {
        matches!(self.root(), Error::InvalidInput(_) | Error::AllZeroTargets)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
