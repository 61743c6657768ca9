//! Dimension-2 complex linear algebra kernel.
//!
//! Everything here is closed-form: eigenvalues come from the quadratic
//! formula, the Sylvester solve is algebraic in the eigenbasis, and inverses
//! go through the adjugate. No iteration, no allocation.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
#[cfg_attr(feature = "std", allow(unused_imports))]
use num_traits::Float;

/// Default relative tolerance for Hermiticity checks.
pub const DEFAULT_TOL_HERM: f64 = 1e-9;
/// Default relative tolerance for positive-definiteness checks.
pub const DEFAULT_TOL_PD: f64 = 1e-9;
/// Default relative determinant-magnitude guard for `inverse`.
pub const DEFAULT_TOL_DET: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgebraError {
    /// The input was expected to be Hermitian but is not within tolerance.
    NotHermitian { residual: f64 },
    /// The input was expected to be positive-definite; carries the offending
    /// eigenvalue (relative to the largest).
    NotPositiveDefinite { min_eigenvalue: f64 },
    /// The Sylvester system X*eta + eta*X = rhs is singular (an eigenvalue
    /// pair sum of eta underflows).
    SingularSystem { eigenvalue_sum: f64 },
    /// Matrix inversion hit the determinant-magnitude guard.
    SingularMatrix { det_magnitude: f64 },
}

impl fmt::Display for AlgebraError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraError::NotHermitian { residual } => {
                write!(f, "matrix is not Hermitian (residual {residual:e})")
            }
            AlgebraError::NotPositiveDefinite { min_eigenvalue } => {
                write!(f, "matrix is not positive-definite (min eigenvalue {min_eigenvalue:e})")
            }
            AlgebraError::SingularSystem { eigenvalue_sum } => {
                write!(f, "Sylvester system is singular (eigenvalue sum {eigenvalue_sum:e})")
            }
            AlgebraError::SingularMatrix { det_magnitude } => {
                write!(f, "matrix is numerically singular (|det| {det_magnitude:e})")
            }
        }
    }
}

impl core::error::Error for AlgebraError {}

/// A two-component complex amplitude vector.
///
/// No normalization invariant is imposed: non-Hermitian evolution changes
/// the naive norm by design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector2C {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl Vector2C {
    pub const fn new(c1: Complex64, c2: Complex64) -> Self {
        Self { c1, c2 }
    }

    pub fn from_reals(c1: f64, c2: f64) -> Self {
        Self::new(Complex64::new(c1, 0.0), Complex64::new(c2, 0.0))
    }

    /// Basis vector (1, 0): the Bloch-sphere north pole.
    pub fn north() -> Self {
        Self::from_reals(1.0, 0.0)
    }

    /// Inner product `<self|other>` (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.c1.conj() * other.c1 + self.c2.conj() * other.c2
    }

    pub fn norm_sq(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self::new(self.c1 * a, self.c2 * a)
    }

    pub fn scale_re(&self, a: f64) -> Self {
        Self::new(self.c1 * a, self.c2 * a)
    }

    pub fn normalized(&self) -> Self {
        self.scale_re(1.0 / self.norm())
    }

    /// The orthonormal complement `(-conj(c2), conj(c1))` of a unit vector.
    pub fn perp(&self) -> Self {
        Self::new(-self.c2.conj(), self.c1.conj())
    }

    /// Normalized Bloch vector `(<sx>, <sy>, <sz>) / <1>` of the spinor.
    pub fn bloch(&self) -> [f64; 3] {
        let n = self.norm_sq();
        let cross = self.c1.conj() * self.c2;
        [2.0 * cross.re / n, 2.0 * cross.im / n, (self.c1.norm_sqr() - self.c2.norm_sqr()) / n]
    }

    pub fn max_abs(&self) -> f64 {
        self.c1.norm().max(self.c2.norm())
    }
}

impl Add for Vector2C {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.c1 + rhs.c1, self.c2 + rhs.c2)
    }
}

impl Sub for Vector2C {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.c1 - rhs.c1, self.c2 - rhs.c2)
    }
}

/// A 2x2 complex matrix in row-major entry form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2C {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

impl Matrix2C {
    pub const fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub fn from_reals(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(
            Complex64::new(a11, 0.0),
            Complex64::new(a12, 0.0),
            Complex64::new(a21, 0.0),
            Complex64::new(a22, 0.0),
        )
    }

    pub fn zero() -> Self {
        Self::from_reals(0.0, 0.0, 0.0, 0.0)
    }

    pub fn identity() -> Self {
        Self::from_reals(1.0, 0.0, 0.0, 1.0)
    }

    pub fn diag(d1: Complex64, d2: Complex64) -> Self {
        Self::new(d1, Complex64::ZERO, Complex64::ZERO, d2)
    }

    pub fn pauli_x() -> Self {
        Self::from_reals(0.0, 1.0, 1.0, 0.0)
    }

    pub fn pauli_y() -> Self {
        Self::new(
            Complex64::ZERO,
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::ZERO,
        )
    }

    pub fn pauli_z() -> Self {
        Self::from_reals(1.0, 0.0, 0.0, -1.0)
    }

    /// Rank-1 operator `|u><v|`.
    pub fn outer(u: &Vector2C, v: &Vector2C) -> Self {
        Self::new(
            u.c1 * v.c1.conj(),
            u.c1 * v.c2.conj(),
            u.c2 * v.c1.conj(),
            u.c2 * v.c2.conj(),
        )
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }

    pub fn conj_entries(&self) -> Self {
        Self::new(self.a11.conj(), self.a12.conj(), self.a21.conj(), self.a22.conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Adjugate: `adj(M) * M = det(M) * I`, entries are a shuffle of `M`'s.
    pub fn adjugate(&self) -> Self {
        Self::new(self.a22, -self.a12, -self.a21, self.a11)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self::new(self.a11 * a, self.a12 * a, self.a21 * a, self.a22 * a)
    }

    pub fn scale_re(&self, a: f64) -> Self {
        Self::new(self.a11 * a, self.a12 * a, self.a21 * a, self.a22 * a)
    }

    pub fn mul_vec(&self, v: &Vector2C) -> Vector2C {
        Vector2C::new(
            self.a11 * v.c1 + self.a12 * v.c2,
            self.a21 * v.c1 + self.a22 * v.c2,
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.a11
            .norm()
            .max(self.a12.norm())
            .max(self.a21.norm())
            .max(self.a22.norm())
    }

    /// Max-entry magnitude of `M - M^dag`.
    pub fn herm_residual(&self) -> f64 {
        let d12 = (self.a12 - self.a21.conj()).norm();
        (2.0 * self.a11.im.abs()).max(2.0 * self.a22.im.abs()).max(d12)
    }

    /// Entrywise Hermiticity test at relative tolerance `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.herm_residual() <= tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// `(M + M^dag) / 2`; removes roundoff drift from an analytically
    /// Hermitian matrix.
    pub fn hermitized(&self) -> Self {
        let off = (self.a12 + self.a21.conj()).scale(0.5);
        fn re(z: Complex64) -> Complex64 {
            Complex64::new(z.re, 0.0)
        }
        Self::new(re(self.a11), off, off.conj(), re(self.a22))
    }

    /// Inverse with a determinant-magnitude guard relative to the entry scale.
    pub fn inverse(&self, tol_det: f64) -> Result<Self, AlgebraError> {
        let det = self.det();
        let scale = self.max_abs();
        let guard = tol_det * (scale * scale).max(f64::MIN_POSITIVE);
        if det.norm() < guard {
            return Err(AlgebraError::SingularMatrix { det_magnitude: det.norm() });
        }
        Ok(self.adjugate().scale(det.inv()))
    }

    pub fn is_finite(&self) -> bool {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for Matrix2C {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.a11 + rhs.a11,
            self.a12 + rhs.a12,
            self.a21 + rhs.a21,
            self.a22 + rhs.a22,
        )
    }
}

impl Sub for Matrix2C {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.a11 - rhs.a11,
            self.a12 - rhs.a12,
            self.a21 - rhs.a21,
            self.a22 - rhs.a22,
        )
    }
}

impl Mul for Matrix2C {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.a11 * rhs.a11 + self.a12 * rhs.a21,
            self.a11 * rhs.a12 + self.a12 * rhs.a22,
            self.a21 * rhs.a11 + self.a22 * rhs.a21,
            self.a21 * rhs.a12 + self.a22 * rhs.a22,
        )
    }
}

impl Neg for Matrix2C {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale_re(-1.0)
    }
}

/// Eigendecomposition of a Hermitian 2x2 matrix.
#[derive(Debug, Clone, Copy)]
pub struct HermEigen {
    /// Eigenvalues in ascending order.
    pub values: [f64; 2],
    /// Matching orthonormal eigenvectors.
    pub vectors: [Vector2C; 2],
}

/// Hermitian eigendecomposition via the quadratic formula.
///
/// Fails with `NotHermitian` if the input violates the entrywise Hermiticity
/// tolerance `tol_herm` (relative).
pub fn herm_eigen(m: &Matrix2C, tol_herm: f64) -> Result<HermEigen, AlgebraError> {
    if !m.is_hermitian(tol_herm) {
        return Err(AlgebraError::NotHermitian { residual: m.herm_residual() });
    }
    let a = m.a11.re;
    let d = m.a22.re;
    let b = (m.a12 + m.a21.conj()).scale(0.5);
    let mean = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let r = (half_diff * half_diff + b.norm_sqr()).sqrt();
    let values = [mean - r, mean + r];

    let vectors = if b.norm() == 0.0 {
        if a <= d {
            [Vector2C::from_reals(1.0, 0.0), Vector2C::from_reals(0.0, 1.0)]
        } else {
            [Vector2C::from_reals(0.0, 1.0), Vector2C::from_reals(1.0, 0.0)]
        }
    } else {
        // Eigenvector for the larger eigenvalue: (b, r - half_diff); the
        // second component is computed cancellation-free when half_diff <= 0,
        // otherwise via r - half_diff = |b|^2 / (r + half_diff).
        let second = if half_diff <= 0.0 {
            r - half_diff
        } else {
            b.norm_sqr() / (r + half_diff)
        };
        let v_hi = Vector2C::new(b, Complex64::new(second, 0.0)).normalized();
        [v_hi.perp(), v_hi]
    };
    Ok(HermEigen { values, vectors })
}

/// The unique positive-definite Hermitian square root of `rho`.
///
/// This is the root that is continuous at `rho = 1`; all other square roots
/// differ by unitary rotations and are rejected. Fails with
/// `NotPositiveDefinite` when the smaller eigenvalue drops below
/// `tol_pd * max_eigenvalue`.
pub fn positive_sqrt(rho: &Matrix2C, tol_pd: f64) -> Result<Matrix2C, AlgebraError> {
    let eig = herm_eigen(rho, DEFAULT_TOL_HERM)?;
    let [lo, hi] = eig.values;
    if hi <= 0.0 || lo <= tol_pd * hi {
        return Err(AlgebraError::NotPositiveDefinite { min_eigenvalue: lo });
    }
    let p_lo = Matrix2C::outer(&eig.vectors[0], &eig.vectors[0]);
    let p_hi = Matrix2C::outer(&eig.vectors[1], &eig.vectors[1]);
    Ok(p_lo.scale_re(lo.sqrt()) + p_hi.scale_re(hi.sqrt()))
}

/// Solves `X * eta + eta * X = rhodot` for Hermitian `X` given Hermitian
/// positive-definite `eta`: the derivative of a matrix square root.
pub fn sylvester_sqrt_derivative(
    eta: &Matrix2C,
    rhodot: &Matrix2C,
) -> Result<Matrix2C, AlgebraError> {
    let eig = herm_eigen(eta, DEFAULT_TOL_HERM)?;
    let [lo, hi] = eig.values;
    if lo + hi <= f64::MIN_POSITIVE / f64::EPSILON {
        return Err(AlgebraError::SingularSystem { eigenvalue_sum: lo + hi });
    }
    let v = &eig.vectors;
    // rhodot in the eigenbasis of eta.
    let mut x = Matrix2C::zero();
    let mut entries = [[Complex64::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mij = v[i].inner(&rhodot.mul_vec(&v[j]));
            let denom = eig.values[i] + eig.values[j];
            if denom <= f64::MIN_POSITIVE / f64::EPSILON {
                return Err(AlgebraError::SingularSystem { eigenvalue_sum: denom });
            }
            entries[i][j] = mij / denom;
        }
    }
    for i in 0..2 {
        for j in 0..2 {
            x = x + Matrix2C::outer(&v[i], &v[j]).scale(entries[i][j]);
        }
    }
    Ok(x.hermitized())
}

/// The unitary polar factor `Q` of an invertible matrix `U = Q P`
/// (`P` Hermitian positive-definite).
///
/// Built from two singular dyads: the dominant left singular vector of `U`
/// and, through the adjugate `adj(U)^dag` (whose dominant dyad is `U`'s
/// subdominant one), its partner. Each dyad is phase-invariant, so the
/// construction stays accurate for arbitrarily large singular-value ratios,
/// where forming `(U^dag U)^{-1/2}` loses the small singular direction to
/// roundoff entirely.
///
/// Requires `det(U)` to be real and positive up to roundoff (exact for
/// propagators of traceless generators under real-positive gauge
/// rescaling). The determinant itself is never evaluated: at large
/// singular-value spread it cancels entirely in f64, so any phase taken
/// from it would be noise.
pub fn polar_unitary(u: &Matrix2C) -> Result<Matrix2C, AlgebraError> {
    // The polar factor is scale-invariant; normalize so squared entries
    // cannot overflow.
    let scale = u.max_abs();
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(AlgebraError::SingularMatrix { det_magnitude: 0.0 });
    }
    let u = &u.scale_re(1.0 / scale);
    let uud = *u * u.adjoint();
    let eig = herm_eigen(&uud.hermitized(), 1.0)?;
    let w1 = eig.vectors[1];
    let sigma1 = eig.values[1].max(0.0).sqrt();
    if sigma1 <= 0.0 {
        return Err(AlgebraError::SingularMatrix { det_magnitude: 0.0 });
    }
    let v1 = u.adjoint().mul_vec(&w1);
    let n1 = v1.norm();
    if n1 == 0.0 {
        return Err(AlgebraError::SingularMatrix { det_magnitude: 0.0 });
    }
    let v1 = v1.scale_re(1.0 / n1);

    let w2 = w1.perp();
    // adj(U) w2 = (det(U)/sigma2) v2 with a positive real coefficient under
    // the det precondition, so normalizing fixes the dyad pairing.
    let v2 = u.adjugate().mul_vec(&w2);
    let n2 = v2.norm();
    if n2 == 0.0 {
        return Err(AlgebraError::SingularMatrix { det_magnitude: 0.0 });
    }
    let v2 = v2.scale_re(1.0 / n2);
    Ok(Matrix2C::outer(&w1, &v1) + Matrix2C::outer(&w2, &v2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &Matrix2C, b: &Matrix2C) -> f64 {
        (*a - *b).max_abs()
    }

    #[test]
    fn eigen_identity() {
        let e = herm_eigen(&Matrix2C::identity(), 1e-9).unwrap();
        assert_eq!(e.values, [1.0, 1.0]);
        // any orthonormal basis is acceptable
        assert!((e.vectors[0].inner(&e.vectors[1])).norm() < 1e-14);
        assert!((e.vectors[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_pauli_x() {
        let e = herm_eigen(&Matrix2C::pauli_x(), 1e-9).unwrap();
        assert_eq!(e.values, [-1.0, 1.0]);
        let inv_sqrt2 = 0.5f64.sqrt();
        // v_+ = (1, 1)/sqrt(2) up to phase
        let overlap = e.vectors[1]
            .inner(&Vector2C::from_reals(inv_sqrt2, inv_sqrt2))
            .norm();
        assert!((overlap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = Matrix2C::from_reals(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(
            herm_eigen(&m, 1e-9),
            Err(AlgebraError::NotHermitian { .. })
        ));
    }

    #[test]
    fn sqrt_trivial_cases() {
        let id = positive_sqrt(&Matrix2C::identity(), 1e-9).unwrap();
        assert!(max_diff(&id, &Matrix2C::identity()) < 1e-15);
        let s = positive_sqrt(&Matrix2C::from_reals(4.0, 0.0, 0.0, 1.0), 1e-9).unwrap();
        assert!(max_diff(&s, &Matrix2C::from_reals(2.0, 0.0, 0.0, 1.0)) < 1e-15);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = Matrix2C::from_reals(1.0, 0.0, 0.0, -1.0);
        assert!(matches!(
            positive_sqrt(&m, 1e-9),
            Err(AlgebraError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn sylvester_identity_eta() {
        let m = Matrix2C::new(c(1.0, 0.0), c(0.5, 0.25), c(0.5, -0.25), c(-2.0, 0.0));
        let x = sylvester_sqrt_derivative(&Matrix2C::identity(), &m).unwrap();
        assert!(max_diff(&x, &m.scale_re(0.5)) < 1e-15);
    }

    #[test]
    fn sylvester_diag_eta() {
        let eta = Matrix2C::from_reals(2.0, 0.0, 0.0, 1.0);
        let rhs = Matrix2C::from_reals(0.0, 3.0, 3.0, 0.0);
        let x = sylvester_sqrt_derivative(&eta, &rhs).unwrap();
        assert!(max_diff(&x, &Matrix2C::pauli_x()) < 1e-14);
    }

    #[test]
    fn inverse_guard() {
        let m = Matrix2C::from_reals(1.0, 2.0, 0.5, 1.0);
        assert!(matches!(
            m.inverse(DEFAULT_TOL_DET),
            Err(AlgebraError::SingularMatrix { .. })
        ));
    }

    #[test]
    fn polar_of_unitary_is_identity_map() {
        // U = exp(i phi n.sigma) rough sample: a rotation-like unitary
        let u = Matrix2C::new(c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0));
        let q = polar_unitary(&u).unwrap();
        assert!(max_diff(&q, &u) < 1e-14);
    }

    #[test]
    fn polar_extreme_singular_ratio() {
        // U = W diag(s, 1/s) V^dag with s = 1e140: the naive (U^dag U)^{-1/2}
        // route has no information about the small direction at f64.
        let s = 1e140;
        let w = Matrix2C::new(c(0.8, 0.0), c(-0.6, 0.0), c(0.6, 0.0), c(0.8, 0.0));
        let v = Matrix2C::new(c(0.28, 0.0), c(-0.96, 0.0), c(0.96, 0.0), c(0.28, 0.0));
        let u = w * Matrix2C::from_reals(s, 0.0, 0.0, 1.0 / s) * v.adjoint();
        let q = polar_unitary(&u).unwrap();
        let expect = w * v.adjoint();
        assert!(max_diff(&q, &expect) < 1e-13);
        let unit = q * q.adjoint();
        assert!(max_diff(&unit, &Matrix2C::identity()) < 1e-14);
    }

    fn arb_complex(mag: f64) -> impl Strategy<Value = Complex64> {
        (prop::num::f64::NORMAL, prop::num::f64::NORMAL)
            .prop_map(move |(a, b)| c(a.rem_euclid(2.0) - 1.0, b.rem_euclid(2.0) - 1.0).scale(mag))
    }

    fn arb_hermitian() -> impl Strategy<Value = Matrix2C> {
        (arb_complex(1.0), arb_complex(1.0), arb_complex(1.0), arb_complex(1.0)).prop_map(
            |(a, b, cc, d)| {
                let m = Matrix2C::new(a, b, cc, d);
                (m + m.adjoint()).scale_re(0.5)
            },
        )
    }

    proptest! {
        #[test]
        fn eigen_reconstructs(m in arb_hermitian()) {
            let e = herm_eigen(&m, 1e-9).unwrap();
            let rebuilt = Matrix2C::outer(&e.vectors[0], &e.vectors[0]).scale_re(e.values[0])
                + Matrix2C::outer(&e.vectors[1], &e.vectors[1]).scale_re(e.values[1]);
            prop_assert!(max_diff(&rebuilt, &m) <= 1e-12 * m.max_abs().max(1.0));
            let ortho = e.vectors[0].inner(&e.vectors[1]).norm();
            prop_assert!(ortho < 1e-12);
        }

        #[test]
        fn sqrt_multiplies_back(m in arb_hermitian(), shift in 0.1f64..4.0) {
            // make it positive definite with bounded condition number
            let rho = m * m + Matrix2C::identity().scale_re(shift);
            let eta = positive_sqrt(&rho, 1e-9).unwrap();
            prop_assert!(eta.is_hermitian(1e-12));
            prop_assert!(max_diff(&(eta * eta), &rho) <= 1e-10 * rho.max_abs().max(1.0));
        }

        #[test]
        fn sqrt_idempotent_composition(m in arb_hermitian(), shift in 0.1f64..4.0) {
            let rho = m * m + Matrix2C::identity().scale_re(shift);
            let eta = positive_sqrt(&rho, 1e-9).unwrap();
            let again = positive_sqrt(&(eta * eta), 1e-9).unwrap();
            prop_assert!(max_diff(&again, &eta) <= 1e-10 * eta.max_abs().max(1.0));
        }

        #[test]
        fn inverse_times_self(m in arb_hermitian(), off in arb_complex(1.0)) {
            let mm = m + Matrix2C::new(Complex64::ZERO, off, -off, Complex64::ZERO);
            prop_assume!(mm.det().norm() >= 1e-8);
            let inv = mm.inverse(DEFAULT_TOL_DET).unwrap();
            prop_assert!(max_diff(&(inv * mm), &Matrix2C::identity()) <= 1e-12 * (1.0 + mm.max_abs()));
        }

        #[test]
        fn sylvester_odd_in_rhs(m in arb_hermitian(), shift in 0.2f64..4.0, rhs in arb_hermitian()) {
            let eta = positive_sqrt(&(m * m + Matrix2C::identity().scale_re(shift)), 1e-9).unwrap();
            let x = sylvester_sqrt_derivative(&eta, &rhs).unwrap();
            let xneg = sylvester_sqrt_derivative(&eta, &(-rhs)).unwrap();
            prop_assert!(max_diff(&x, &(-xneg)) <= 1e-13 * (1.0 + x.max_abs()));
            // residual of the defining equation
            let resid = x * eta + eta * x - rhs;
            prop_assert!(resid.max_abs() <= 1e-10 * (1.0 + rhs.max_abs()));
        }

        #[test]
        fn polar_is_unitary(m in arb_hermitian(), off in arb_complex(0.5)) {
            let u = m + Matrix2C::new(Complex64::ZERO, off, -off.conj(), Complex64::ZERO)
                + Matrix2C::identity().scale_re(2.0);
            prop_assume!(u.det().norm() > 1e-6);
            // rotate det to the positive real axis, as in gauged propagators
            let det = u.det();
            let u = u.scale((det.norm() / det).sqrt());
            let q = polar_unitary(&u).unwrap();
            prop_assert!(max_diff(&(q * q.adjoint()), &Matrix2C::identity()) < 1e-12);
            // Q^dag U must be Hermitian positive (the polar P factor)
            let p = q.adjoint() * u;
            prop_assert!(p.is_hermitian(1e-10));
        }
    }
}
