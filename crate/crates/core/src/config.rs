use serde::{Deserialize, Serialize};

/// Tolerances and iteration caps shared by every solver stage.
///
/// Missing fields take their defaults when deserialized, so a config file
/// only needs to name what it overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Hermitian check on construction, relative to max(1, ‖m‖_F).
    pub herm_tol: f64,
    /// Gram–Schmidt rank cutoff in the unitary completion.
    pub rank_tol: f64,
    /// Allowed Gram-matrix mismatch for the unitary completion.
    pub gram_tol: f64,
    /// Balanced-pair tolerance on pseudohyperbolic distances.
    pub balance_tol: f64,
    /// Equality band for two-point extremality and for comparing scales.
    pub two_point_band: f64,
    /// Eigenvalue slack for PSD tests.
    pub psd_tol: f64,
    /// Decomposition residual required of a feasible pair.
    pub feas_tol: f64,
    /// An infeasible verdict needs the certified margin bound below -infeas_tol.
    pub infeas_tol: f64,
    /// Newton-step budget of one feasibility solve.
    pub max_iter: usize,
    /// Smallest barrier weight tried before reporting a stall.
    pub mu_min: f64,
    /// Bisection width for the extremal scale.
    pub t_tol: f64,
    /// Second/first eigenvalue ratio accepted as rank one.
    pub rank_one_tol: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Interpolation residual accepted by the final verification.
    pub interp_tol: f64,
    /// Allowed deviation of |φ| from 1 on the torus.
    pub inner_tol: f64,
    /// Torus grid size per coordinate for the innerness check.
    pub torus_grid: usize,
    /// Seed for randomized starting points; `None` uses a fixed start.
    pub seed: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            herm_tol: 1e-14,
            rank_tol: 1e-10,
            gram_tol: 1e-9,
            balance_tol: 1e-10,
            two_point_band: 1e-9,
            psd_tol: 1e-10,
            feas_tol: 1e-9,
            infeas_tol: 1e-12,
            max_iter: 50_000,
            mu_min: 1e-15,
            t_tol: 1e-10,
            rank_one_tol: 1e-6,
            newton_tol: 1e-12,
            newton_max_iter: 100,
            interp_tol: 1e-9,
            inner_tol: 1e-8,
            torus_grid: 64,
            seed: None,
        }
    }
}
