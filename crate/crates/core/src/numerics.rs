//! Fixed-size complex linear algebra for 3×3 Hermitian problems.
//!
//! Everything here is sized for the three-point problem: vectors in ℂ³,
//! 3×3 matrices, a cyclic Jacobi eigensolver for Hermitian matrices and the
//! Gram-matching unitary completion used by the transfer-function
//! realization.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::Error;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// A vector in ℂ³.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVec3(pub [C64; 3]);

impl CVec3 {
    pub const fn new(x0: C64, x1: C64, x2: C64) -> Self {
        Self([x0, x1, x2])
    }

    pub fn zeros() -> Self {
        Self([ZERO; 3])
    }

    pub fn from_real(x: [f64; 3]) -> Self {
        Self(x.map(|v| C64::new(v, 0.0)))
    }

    pub fn basis(k: usize) -> Self {
        let mut v = Self::zeros();
        v.0[k] = ONE;
        v
    }

    /// Inner product ⟨self, other⟩ = Σ conj(selfᵢ)·otherᵢ.
    pub fn dot(&self, other: &Self) -> C64 {
        (0..3).map(|i| self.0[i].conj() * other.0[i]).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        Self([
            self.0[0] * other.0[0],
            self.0[1] * other.0[1],
            self.0[2] * other.0[2],
        ])
    }

    /// The rank-one matrix u⊗u with entries uᵢ·conj(uⱼ).
    pub fn outer_self(&self) -> HermMat3 {
        HermMat3(CMat3::from_fn(|i, j| self.0[i] * self.0[j].conj()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for CVec3 {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVec3 {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, rhs: CVec3) -> CVec3 {
        CVec3([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, rhs: CVec3) -> CVec3 {
        CVec3([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
        ])
    }
}

impl Neg for CVec3 {
    type Output = CVec3;
    fn neg(self) -> CVec3 {
        CVec3(self.0.map(|z| -z))
    }
}

/// A general complex 3×3 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat3(pub [[C64; 3]; 3]);

impl CMat3 {
    pub fn zeros() -> Self {
        Self([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: [[f64; 3]; 3]) -> Self {
        Self::from_fn(|i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(d: [C64; 3]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i] } else { ZERO })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[CVec3; 3]) -> Self {
        Self::from_fn(|i, j| cols[j].0[i])
    }

    pub fn column(&self, j: usize) -> CVec3 {
        CVec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn mul_vec(&self, v: &CVec3) -> CVec3 {
        CVec3(std::array::from_fn(|i| {
            (0..3).map(|k| self.0[i][k] * v.0[k]).sum()
        }))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Cofactor-expansion determinant.
    pub fn det(&self) -> C64 {
        det3(self)
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// ‖U*U − I‖_F.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - CMat3::identity()).frobenius_norm()
    }
}

impl Index<(usize, usize)> for CMat3 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for CMat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl Mul for CMat3 {
    type Output = CMat3;
    fn mul(self, rhs: CMat3) -> CMat3 {
        CMat3::from_fn(|i, j| (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

impl Add for CMat3 {
    type Output = CMat3;
    fn add(self, rhs: CMat3) -> CMat3 {
        CMat3::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl Sub for CMat3 {
    type Output = CMat3;
    fn sub(self, rhs: CMat3) -> CMat3 {
        CMat3::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

/// A 3×3 Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermMat3(CMat3);

impl HermMat3 {
    /// Accepts `m` if it is Hermitian within `tol`·max(1, ‖m‖_F), then
    /// symmetrizes it exactly.
    pub fn new(m: CMat3, tol: f64) -> Result<Self, Error> {
        let scale = m.frobenius_norm().max(1.0);
        let defect = (m - m.adjoint()).max_abs();
        if !defect.is_finite() || defect > tol * scale {
            return Err(Error::NotHermitian { defect });
        }
        Ok(Self::symmetrized(&m))
    }

    /// (m + m*)/2 with a real diagonal.
    pub fn symmetrized(m: &CMat3) -> Self {
        let mut h = CMat3::from_fn(|i, j| (m.0[i][j] + m.0[j][i].conj()) * 0.5);
        for i in 0..3 {
            h.0[i][i] = C64::new(h.0[i][i].re, 0.0);
        }
        Self(h)
    }

    /// Builds a Hermitian matrix from its upper triangle (i ≤ j).
    pub fn from_upper(f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = CMat3::zeros();
        for i in 0..3 {
            m.0[i][i] = C64::new(f(i, i).re, 0.0);
            for j in i + 1..3 {
                let v = f(i, j);
                m.0[i][j] = v;
                m.0[j][i] = v.conj();
            }
        }
        Self(m)
    }

    pub fn zeros() -> Self {
        Self(CMat3::zeros())
    }

    pub fn identity() -> Self {
        Self(CMat3::identity())
    }

    pub fn ones() -> Self {
        Self(CMat3::from_fn(|_, _| ONE))
    }

    pub fn diag(d: [f64; 3]) -> Self {
        Self(CMat3::diag(d.map(|x| C64::new(x, 0.0))))
    }

    pub fn as_mat(&self) -> &CMat3 {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0 .0[i][j]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(C64::new(s, 0.0)))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0 + other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0 - other.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    pub fn eig(&self) -> HermEigen {
        herm_eig3(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig().values[2]
    }

    /// Entrywise product with another Hermitian matrix.
    pub fn schur(&self, other: &Self) -> Self {
        schur_product(self, other)
    }

    /// The same matrix with every entry multiplied by `f(i, j)`; `f` must
    /// itself define a Hermitian pattern for the result to stay Hermitian.
    pub(crate) fn map_entries(&self, f: impl Fn(usize, usize, C64) -> C64) -> Self {
        Self::from_upper(|i, j| f(i, j, self.get(i, j)))
    }

    pub fn is_finite(&self) -> bool {
        self.0
             .0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Eigen-decomposition of a Hermitian matrix: `values` descending,
/// `vectors[k]` the unit eigenvector for `values[k]`.
#[derive(Clone, Debug)]
pub struct HermEigen {
    pub values: [f64; 3],
    pub vectors: [CVec3; 3],
}

impl HermEigen {
    /// Σ μₖ vₖ⊗vₖ.
    pub fn reconstruct(&self) -> HermMat3 {
        let mut m = CMat3::zeros();
        for k in 0..3 {
            let p = self.vectors[k].outer_self();
            m = m + p.as_mat().scale(C64::new(self.values[k], 0.0));
        }
        HermMat3::symmetrized(&m)
    }
}

/// (x∘y)ᵢⱼ = xᵢⱼ·yᵢⱼ.
pub fn schur_product(x: &HermMat3, y: &HermMat3) -> HermMat3 {
    HermMat3::from_upper(|i, j| x.get(i, j) * y.get(i, j))
}

pub fn det3(m: &CMat3) -> C64 {
    let a = &m.0;
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Cyclic complex Jacobi eigensolver for 3×3 Hermitian matrices.
pub fn herm_eig3(m: &HermMat3) -> HermEigen {
    let mut a = *m.as_mat();
    let mut q = CMat3::identity();
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _sweep in 0..64 {
            let off: f64 = [(0, 1), (0, 2), (1, 2)]
                .iter()
                .map(|&(p, r)| a.0[p][r].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-17 * scale {
                break;
            }
            for &(p, r) in &[(0usize, 1usize), (0, 2), (1, 2)] {
                let apr = a.0[p][r];
                let g = apr.norm();
                if g <= 1e-300 {
                    continue;
                }
                let phase = apr / g;
                let app = a.0[p][p].re;
                let arr = a.0[r][r].re;
                let tau = (arr - app) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let mut v = CMat3::identity();
                v.0[p][p] = C64::new(c, 0.0);
                v.0[p][r] = C64::new(s, 0.0);
                v.0[r][p] = phase.conj() * (-s);
                v.0[r][r] = phase.conj() * c;

                a = v.adjoint() * a * v;
                a.0[p][r] = ZERO;
                a.0[r][p] = ZERO;
                for i in 0..3 {
                    a.0[i][i] = C64::new(a.0[i][i].re, 0.0);
                }
                q = q * v;
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a.0[j][j].re.total_cmp(&a.0[i][i].re));
    HermEigen {
        values: order.map(|k| a.0[k][k].re),
        vectors: order.map(|k| q.column(k)),
    }
}

/// Index pairs (i, j), i < j, of the strict upper triangle.
pub(crate) const UPPER: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// Real coordinates of a Hermitian matrix: three diagonal entries, then the
/// real parts and the imaginary parts of the (0,1), (0,2), (1,2) entries.
pub(crate) fn herm_from_coords(x: &[f64]) -> HermMat3 {
    let mut m = CMat3::zeros();
    for k in 0..3 {
        m.0[k][k] = C64::new(x[k], 0.0);
    }
    for (n, &(i, j)) in UPPER.iter().enumerate() {
        let v = C64::new(x[3 + n], x[6 + n]);
        m.0[i][j] = v;
        m.0[j][i] = v.conj();
    }
    HermMat3(m)
}

pub(crate) fn herm_to_coords(m: &HermMat3) -> [f64; 9] {
    let mut x = [0.0; 9];
    for k in 0..3 {
        x[k] = m.get(k, k).re;
    }
    for (n, &(i, j)) in UPPER.iter().enumerate() {
        x[3 + n] = m.get(i, j).re;
        x[6 + n] = m.get(i, j).im;
    }
    x
}

/// The basis of 3×3 Hermitian matrices dual to [`herm_from_coords`].
pub(crate) fn hermitian_basis() -> [HermMat3; 9] {
    std::array::from_fn(|k| {
        let mut x = [0.0; 9];
        x[k] = 1.0;
        herm_from_coords(&x)
    })
}

/// Nearest positive semidefinite matrix in Frobenius norm: eigenvalues
/// clipped at zero.
pub fn psd_project(m: &HermMat3) -> HermMat3 {
    let mut e = herm_eig3(m);
    if e.values.iter().all(|&v| v >= 0.0) {
        return *m;
    }
    for v in e.values.iter_mut() {
        *v = v.max(0.0);
    }
    e.reconstruct()
}

/// Finds a unitary `U` with `U·xⱼ = yⱼ` for j = 0, 1, 2, assuming the two
/// families have the same Gram matrix.
///
/// `x` is orthonormalized by modified Gram–Schmidt; the identical
/// combination of the `y` columns gives the image basis. Directions outside
/// span{xⱼ} are paired with the orthogonal complement of span{yⱼ} in
/// order of the standard basis.
pub fn unitary_complete(
    x: &[CVec3; 3],
    y: &[CVec3; 3],
    gram_tol: f64,
    rank_tol: f64,
) -> Result<CMat3, Error> {
    let mut deviation: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            deviation = deviation.max((x[i].dot(&x[j]) - y[i].dot(&y[j])).norm());
        }
    }
    if !deviation.is_finite() || deviation > gram_tol {
        return Err(Error::GrammianMismatch { deviation });
    }

    let mut src: Vec<CVec3> = Vec::with_capacity(3);
    let mut dst: Vec<CVec3> = Vec::with_capacity(3);
    for j in 0..3 {
        let mut u = x[j];
        let mut v = y[j];
        for (e, f) in src.iter().zip(dst.iter()) {
            let c = e.dot(&u);
            u = u - e.scale(c);
            v = v - f.scale(c);
        }
        let n = u.norm();
        if n > rank_tol {
            src.push(u.scale(C64::new(1.0 / n, 0.0)));
            dst.push(v.scale(C64::new(1.0 / n, 0.0)));
        }
    }
    // Clean the image basis; with matching Gram matrices this only removes
    // rounding.
    let dst = orthonormalize(&dst);

    let src = complete_basis(src);
    let dst = complete_basis(dst);
    let e = CMat3::from_columns(&[src[0], src[1], src[2]]);
    let f = CMat3::from_columns(&[dst[0], dst[1], dst[2]]);
    Ok(f * e.adjoint())
}

fn orthonormalize(vs: &[CVec3]) -> Vec<CVec3> {
    let mut out: Vec<CVec3> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut u = *v;
        for e in &out {
            let c = e.dot(&u);
            u = u - e.scale(c);
        }
        let n = u.norm();
        out.push(u.scale(C64::new(1.0 / n, 0.0)));
    }
    out
}

/// Extends an orthonormal family to an orthonormal basis of ℂ³, drawing
/// from the standard basis in order and taking the largest residual first.
fn complete_basis(mut basis: Vec<CVec3>) -> Vec<CVec3> {
    while basis.len() < 3 {
        let mut best: Option<(f64, CVec3)> = None;
        for k in 0..3 {
            let mut u = CVec3::basis(k);
            for _ in 0..2 {
                for e in &basis {
                    let c = e.dot(&u);
                    u = u - e.scale(c);
                }
            }
            let n = u.norm();
            if best.as_ref().map_or(true, |(bn, _)| n > *bn + 1e-12) {
                best = Some((n, u));
            }
        }
        let (n, u) = best.expect("standard basis spans ℂ³");
        basis.push(u.scale(C64::new(1.0 / n, 0.0)));
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn herm_from(parts: [f64; 9]) -> HermMat3 {
        HermMat3::from_upper(|i, j| match (i, j) {
            (0, 0) => c(parts[0], 0.0),
            (1, 1) => c(parts[1], 0.0),
            (2, 2) => c(parts[2], 0.0),
            (0, 1) => c(parts[3], parts[4]),
            (0, 2) => c(parts[5], parts[6]),
            _ => c(parts[7], parts[8]),
        })
    }

    fn gram_psd(parts: [f64; 9], shift: f64) -> HermMat3 {
        let m = herm_from(parts);
        HermMat3::symmetrized(&(m.as_mat().adjoint() * *m.as_mat()))
            .add(&HermMat3::identity().scale(shift))
    }

    #[test]
    fn schur_with_ones_is_identity_map() {
        let m = herm_from([1.0, -2.0, 0.5, 0.3, -0.7, 1.1, 0.2, -0.4, 0.9]);
        assert_eq!(schur_product(&HermMat3::ones(), &m), m);
    }

    #[test]
    fn schur_of_diagonals() {
        let p = schur_product(
            &HermMat3::diag([1.0, 2.0, 3.0]),
            &HermMat3::diag([4.0, 5.0, 6.0]),
        );
        assert_eq!(p, HermMat3::diag([4.0, 10.0, 18.0]));
    }

    #[test]
    fn hermitian_check_rejects_skew_entries() {
        let mut m = CMat3::identity();
        m.0[0][1] = c(1.0, 0.0);
        assert!(matches!(
            HermMat3::new(m, 1e-14),
            Err(Error::NotHermitian { .. })
        ));
        m.0[1][0] = c(1.0, 0.0);
        assert!(HermMat3::new(m, 1e-14).is_ok());
    }

    #[test]
    fn eig_identity() {
        let e = herm_eig3(&HermMat3::identity());
        for v in e.values {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn eig_all_ones() {
        let e = herm_eig3(&HermMat3::ones());
        assert_abs_diff_eq!(e.values[0], 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(e.values[1], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(e.values[2], 0.0, epsilon = 1e-13);
        let top = e.vectors[0];
        let s = 1.0 / 3f64.sqrt();
        for k in 0..3 {
            assert_abs_diff_eq!(top[k].norm(), s, epsilon = 1e-12);
        }
        // all entries share a phase
        assert_abs_diff_eq!((top[0] * top[1].conj()).im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_diagonal_sorted() {
        let e = herm_eig3(&HermMat3::diag([2.0, -1.0, 0.0]));
        assert_eq!(e.values, [2.0, 0.0, -1.0]);
    }

    #[test]
    fn psd_project_examples() {
        let p = psd_project(&HermMat3::diag([1.0, -2.0, 3.0]));
        assert!(p.sub(&HermMat3::diag([1.0, 0.0, 3.0])).frobenius_norm() < 1e-14);
        let z = psd_project(&HermMat3::identity().scale(-1.0));
        assert!(z.frobenius_norm() < 1e-14);
        let m = gram_psd([0.3, -1.0, 0.2, 0.5, 0.1, -0.4, 0.8, 0.6, -0.3], 0.1);
        assert!(psd_project(&m).sub(&m).frobenius_norm() < 1e-12);
    }

    #[test]
    fn det3_examples() {
        assert_eq!(det3(&CMat3::identity()), ONE);
        let m = CMat3::from_real([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [4.0, -1.0, 0.5]]);
        assert_abs_diff_eq!(det3(&m).norm(), 0.0, epsilon = 1e-14);
        let d = CMat3::diag([c(0.0, 1.0), c(2.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(det3(&d), c(0.0, -2.0));
    }

    #[test]
    fn unitary_complete_identity_and_swap() {
        let e = [CVec3::basis(0), CVec3::basis(1), CVec3::basis(2)];
        let u = unitary_complete(&e, &e, 1e-9, 1e-10).unwrap();
        assert!((u - CMat3::identity()).frobenius_norm() < 1e-15);

        let swapped = [CVec3::basis(1), CVec3::basis(0), CVec3::basis(2)];
        let u = unitary_complete(&e, &swapped, 1e-9, 1e-10).unwrap();
        let perm = CMat3::from_real([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!((u - perm).frobenius_norm() < 1e-15);
    }

    #[test]
    fn unitary_complete_rejects_gram_mismatch() {
        let e = [CVec3::basis(0), CVec3::basis(1), CVec3::basis(2)];
        let mut y = e;
        y[2] = y[2].scale(c(2.0, 0.0));
        assert!(matches!(
            unitary_complete(&e, &y, 1e-9, 1e-10),
            Err(Error::GrammianMismatch { .. })
        ));
    }

    #[test]
    fn unitary_complete_rank_deficient_family() {
        // all three columns equal: a single direction to map
        let x = CVec3::new(c(0.6, 0.0), c(0.0, 0.8), ZERO);
        let y = CVec3::new(ZERO, c(0.0, -1.0), ZERO);
        let u = unitary_complete(&[x, x, x], &[y, y, y], 1e-9, 1e-10).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        assert!((u.mul_vec(&x) - y).norm() < 1e-12);
    }

    fn arb_parts() -> impl Strategy<Value = [f64; 9]> {
        proptest::array::uniform9(-1.0f64..1.0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn schur_product_of_psd_is_psd(p in arb_parts(), q in arb_parts()) {
            let x = gram_psd(p, 0.0);
            let y = gram_psd(q, 0.0);
            prop_assert!(schur_product(&x, &y).min_eigenvalue() >= -1e-10);
        }
    }

    proptest! {
        #[test]
        fn eig_contract(parts in arb_parts()) {
            let m = herm_from(parts);
            let e = herm_eig3(&m);
            let norm = m.frobenius_norm().max(1e-300);
            prop_assert!(e.values[0] >= e.values[1] && e.values[1] >= e.values[2]);
            for k in 0..3 {
                let mv = m.as_mat().mul_vec(&e.vectors[k]);
                let lv = e.vectors[k].scale(c(e.values[k], 0.0));
                prop_assert!((mv - lv).norm() <= 1e-12 * norm);
                for l in 0..3 {
                    let ip = e.vectors[k].dot(&e.vectors[l]);
                    let expect = if k == l { 1.0 } else { 0.0 };
                    prop_assert!((ip - c(expect, 0.0)).norm() <= 1e-12);
                }
            }
            prop_assert!(e.reconstruct().sub(&m).frobenius_norm() <= 1e-11 * norm);
        }

        #[test]
        fn psd_project_idempotent(parts in arb_parts()) {
            let p = psd_project(&herm_from(parts));
            prop_assert!(psd_project(&p).sub(&p).frobenius_norm() <= 1e-12);
            prop_assert!(p.min_eigenvalue() >= -1e-12);
        }

        #[test]
        fn det3_multiplicative(p in proptest::array::uniform18(-1.0f64..1.0),
                               q in proptest::array::uniform18(-1.0f64..1.0)) {
            let a = CMat3::from_fn(|i, j| c(p[2 * (3 * i + j)], p[2 * (3 * i + j) + 1]));
            let b = CMat3::from_fn(|i, j| c(q[2 * (3 * i + j)], q[2 * (3 * i + j) + 1]));
            let lhs = det3(&(a * b));
            let rhs = det3(&a) * det3(&b);
            let scale = (a.frobenius_norm() * b.frobenius_norm()).powi(3).max(1e-300);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * scale.max(rhs.norm()));
        }
    }
}
