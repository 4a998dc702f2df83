//! The active kernel witnessing extremality of a rank-one decomposition.
//!
//! With Γ = a⊗a and Δ = b⊗b,
//!
//! ```text
//!     K∘W = D_a·(K∘Λ¹)·D_a* + D_b·(K∘Λ²)·D_b*,
//! ```
//!
//! so a Hermitian K with (K∘Λ¹)·conj(a) = 0 and (K∘Λ²)·conj(b) = 0 makes
//! K∘W annihilate (1, 1, 1). These are twelve real linear conditions on
//! the nine real coordinates of K; at the extremal scale they have a
//! one-dimensional solution space.

use nalgebra::DMatrix;

use crate::numerics::{herm_from_coords, hermitian_basis, CVec3, HermMat3};
use crate::pick::PickMatrices;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActiveKernel {
    /// Unit Frobenius norm, nonnegative trace.
    pub k: HermMat3,
    /// Smallest singular value of the 12×9 constraint map (ideally zero).
    pub sigma_min: f64,
    /// Next singular value: the gap certifying the kernel is unique.
    pub sigma_next: f64,
}

fn push_vec(col: &mut Vec<f64>, v: &CVec3) {
    for i in 0..3 {
        col.push(v[i].re);
        col.push(v[i].im);
    }
}

/// The K of unit norm that best satisfies (K∘Λ¹)·conj(a) = 0 and
/// (K∘Λ²)·conj(b) = 0 in the least-squares sense.
pub fn active_kernel(a: &CVec3, b: &CVec3, mats: &PickMatrices) -> ActiveKernel {
    let basis = hermitian_basis();
    let (ac, bc) = (a.conj(), b.conj());
    let mut m = DMatrix::zeros(12, 9);
    for (k, e) in basis.iter().enumerate() {
        let mut col = Vec::with_capacity(12);
        push_vec(&mut col, &e.schur(&mats.l1).as_mat().mul_vec(&ac));
        push_vec(&mut col, &e.schur(&mats.l2).as_mat().mul_vec(&bc));
        for (i, v) in col.into_iter().enumerate() {
            m[(i, k)] = v;
        }
    }
    let svd = m.svd(false, true);
    let vt = svd.v_t.as_ref().expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let row = vt.row(order[0]);
    let coords: Vec<f64> = row.iter().copied().collect();
    let mut k = herm_from_coords(&coords);
    let n = k.frobenius_norm();
    k = k.scale(1.0 / n);
    let tr: f64 = (0..3).map(|i| k.get(i, i).re).sum();
    if tr < 0.0 {
        k = k.scale(-1.0);
    }
    ActiveKernel {
        k,
        sigma_min: svd.singular_values[order[0]],
        sigma_next: svd.singular_values[order[1]],
    }
}
