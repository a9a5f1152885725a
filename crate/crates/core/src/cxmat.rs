//! Complex scalar and 2x2 complex matrix algebra.
//!
//! Every channel, codeword and receiver quantity in the simulator is either a
//! [`Cx`], a length-2 [`Vec2`] or a [`Mat2`]. The Alamouti-structured family
//! `[[h1, h2], [h2*, -h1*]]` gets its own type because receivers rely on its
//! orthogonality, `A^H A = (|h1|^2 + |h2|^2) I`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex sample.
pub type Cx = Complex64;

/// Column 2-vector of complex samples.
pub type Vec2 = [Cx; 2];

pub const ZERO: Cx = Cx::new(0.0, 0.0);
pub const ONE: Cx = Cx::new(1.0, 0.0);

/// Absolute floor applied to every scale-relative tolerance.
pub const TOL_FLOOR: f64 = 1e-14;

/// Symmetry tolerance accepted by [`hermitian_eig2`], relative to the
/// Frobenius norm of the input.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Cx; 2]; 2]);

impl Mat2 {
    pub const fn new(m00: Cx, m01: Cx, m10: Cx, m11: Cx) -> Self {
        Mat2([[m00, m01], [m10, m11]])
    }

    pub const fn zero() -> Self {
        Mat2([[ZERO; 2]; 2])
    }

    pub const fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diag(d0: Cx, d1: Cx) -> Self {
        Mat2([[d0, ZERO], [ZERO, d1]])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Cx {
        self.0[row][col]
    }

    #[inline]
    pub fn row(&self, row: usize) -> Vec2 {
        self.0[row]
    }

    #[inline]
    pub fn col(&self, col: usize) -> Vec2 {
        [self.0[0][col], self.0[1][col]]
    }

    /// Conjugate transpose.
    #[inline]
    pub fn adjoint(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    #[inline]
    pub fn transpose(&self) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    /// Sum of squared entry magnitudes.
    #[inline]
    pub fn frob_norm_sq(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, k: f64) -> Mat2 {
        let m = &self.0;
        Mat2([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    #[inline]
    fn mul(self, b: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &b.0;
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl Mul<Vec2> for Mat2 {
    type Output = Vec2;

    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, b: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &b.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, b: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &b.0);
        Mat2([[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]])
    }
}

pub fn adjoint(m: &Mat2) -> Mat2 {
    m.adjoint()
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    *a * *b
}

pub fn mat_vec(m: &Mat2, v: &Vec2) -> Vec2 {
    *m * *v
}

pub fn frob_norm_sq(m: &Mat2) -> f64 {
    m.frob_norm_sq()
}

/// Inner product `u^H v`.
#[inline]
pub fn inner(u: &Vec2, v: &Vec2) -> Cx {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

#[inline]
pub fn norm_sq(v: &Vec2) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

/// Alamouti-structured matrix `[[h1, h2], [h2*, -h1*]]`, stored by its two
/// defining entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlamoutiMat {
    pub h1: Cx,
    pub h2: Cx,
}

impl AlamoutiMat {
    /// `|h1|^2 + |h2|^2`, the gain of `A^H A`.
    #[inline]
    pub fn gain(&self) -> f64 {
        self.h1.norm_sqr() + self.h2.norm_sqr()
    }

    #[inline]
    pub fn to_mat(&self) -> Mat2 {
        Mat2([[self.h1, self.h2], [self.h2.conj(), -self.h1.conj()]])
    }

    /// `A^H v` without materializing the matrix.
    #[inline]
    pub fn adjoint_mul(&self, v: &Vec2) -> Vec2 {
        // A^H = [[h1*, h2], [h2*, -h1]]
        [self.h1.conj() * v[0] + self.h2 * v[1], self.h2.conj() * v[0] - self.h1 * v[1]]
    }
}

pub fn alamouti_matrix(h1: Cx, h2: Cx) -> AlamoutiMat {
    AlamoutiMat { h1, h2 }
}

/// Eigendecomposition of a 2x2 Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eig2 {
    /// Descending.
    pub values: [f64; 2],
    /// Orthonormal; `vectors[k]` pairs with `values[k]`.
    pub vectors: [Vec2; 2],
}

/// Closed-form eigendecomposition of a Hermitian 2x2 matrix.
///
/// A repeated eigenvalue with zero off-diagonal returns the canonical basis.
pub fn hermitian_eig2(m: &Mat2) -> Result<Eig2> {
    let tol = (HERMITIAN_TOL * m.frob_norm_sq().sqrt()).max(TOL_FLOOR);
    let asym = (m.get(0, 1) - m.get(1, 0).conj()).norm();
    if asym > tol || m.get(0, 0).im.abs() > tol || m.get(1, 1).im.abs() > tol {
        return Err(Error::NonHermitianInput { asymmetry: asym.max(m.get(0, 0).im.abs()).max(m.get(1, 1).im.abs()) });
    }

    let p = m.get(0, 0).re;
    let r = m.get(1, 1).re;
    // average the two off-diagonal estimates so tiny asymmetry is symmetrized away
    let q = (m.get(0, 1) + m.get(1, 0).conj()) * 0.5;

    let mean = 0.5 * (p + r);
    let half_gap = 0.5 * (p - r);
    let d = half_gap.hypot(q.norm());
    let values = [mean + d, mean - d];

    if q.norm_sqr() == 0.0 {
        let vectors = if p >= r { [[ONE, ZERO], [ZERO, ONE]] } else { [[ZERO, ONE], [ONE, ZERO]] };
        return Ok(Eig2 { values, vectors });
    }

    // Pick the better-conditioned of the two null-space representations.
    let v = if p >= r { [Cx::new(values[0] - r, 0.0), q.conj()] } else { [q, Cx::new(values[0] - p, 0.0)] };
    let n = norm_sq(&v).sqrt();
    let v1 = [v[0] / n, v[1] / n];
    let v2 = [-v1[1].conj(), v1[0].conj()];
    Ok(Eig2 { values, vectors: [v1, v2] })
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use proptest::prelude::*;

    pub fn cx() -> impl Strategy<Value = Cx> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| Cx::new(re, im))
    }

    pub fn mat2() -> impl Strategy<Value = Mat2> {
        (cx(), cx(), cx(), cx()).prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d))
    }

    pub fn close(a: &Mat2, b: &Mat2, rel: f64) -> bool {
        let scale = a.frob_norm_sq().sqrt().max(b.frob_norm_sq().sqrt()).max(TOL_FLOOR);
        (*a - *b).frob_norm_sq().sqrt() <= rel * scale
    }
}
