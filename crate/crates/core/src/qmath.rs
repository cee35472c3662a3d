//! Two-level complex linear algebra.
//!
//! Everything in the crate lives in a two-dimensional Hilbert space, so the
//! types here are small `Copy` values with the handful of operations the
//! protocol and the PT machinery need. State vectors are deliberately allowed
//! to be unnormalized: non-Hermitian evolution changes the Hermitian norm, and
//! every probability-producing routine normalizes explicitly.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

/// Absolute tolerance used by the algebraic identity checks.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Shorthand for a real-valued complex number.
#[inline]
pub fn re(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

/// Amplitude pair `a0|0⟩ + a1|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVec {
    pub a0: Complex,
    pub a1: Complex,
}

impl StateVec {
    pub const fn new(a0: Complex, a1: Complex) -> Self {
        Self { a0, a1 }
    }

    pub fn real(a0: f64, a1: f64) -> Self {
        Self::new(re(a0), re(a1))
    }

    pub fn zero() -> Self {
        Self::new(ZERO, ZERO)
    }

    pub fn conj(self) -> Self {
        Self::new(self.a0.conj(), self.a1.conj())
    }

    pub fn scale(self, k: Complex) -> Self {
        Self::new(self.a0 * k, self.a1 * k)
    }

    /// Plain bilinear dot product `uᵀ·v` (no conjugation).
    pub fn dot(self, v: StateVec) -> Complex {
        self.a0 * v.a0 + self.a1 * v.a1
    }

    /// Squared Hermitian norm.
    pub fn norm_sqr(self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }

    pub fn is_zero(self) -> bool {
        self.norm_sqr() == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.a0.is_finite() && self.a1.is_finite()
    }

    /// Rescales to unit Hermitian norm.
    pub fn normalized(self) -> Result<Self> {
        let n = self.norm_sqr();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(re(1.0 / n.sqrt())))
    }

    /// Outer product `u·vᵀ` (no conjugation).
    pub fn outer(self, v: StateVec) -> Mat2 {
        Mat2::new(self.a0 * v.a0, self.a0 * v.a1, self.a1 * v.a0, self.a1 * v.a1)
    }
}

impl Add for StateVec {
    type Output = StateVec;
    fn add(self, o: StateVec) -> StateVec {
        StateVec::new(self.a0 + o.a0, self.a1 + o.a1)
    }
}

impl Sub for StateVec {
    type Output = StateVec;
    fn sub(self, o: StateVec) -> StateVec {
        StateVec::new(self.a0 - o.a0, self.a1 - o.a1)
    }
}

impl Neg for StateVec {
    type Output = StateVec;
    fn neg(self) -> StateVec {
        StateVec::new(-self.a0, -self.a1)
    }
}

impl fmt::Display for StateVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a0, self.a1)
    }
}

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2 {
    pub m00: Complex,
    pub m01: Complex,
    pub m10: Complex,
    pub m11: Complex,
}

impl Mat2 {
    pub const fn new(m00: Complex, m01: Complex, m10: Complex, m11: Complex) -> Self {
        Self { m00, m01, m10, m11 }
    }

    pub fn real(m00: f64, m01: f64, m10: f64, m11: f64) -> Self {
        Self::new(re(m00), re(m01), re(m10), re(m11))
    }

    pub fn identity() -> Self {
        Self::real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn zero() -> Self {
        Self::real(0.0, 0.0, 0.0, 0.0)
    }

    pub fn diag(d0: Complex, d1: Complex) -> Self {
        Self::new(d0, ZERO, ZERO, d1)
    }

    /// Hadamard gate, maps the computational basis onto the diagonal one.
    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::real(h, h, h, -h)
    }

    /// Parity operator `[[0,1],[1,0]]`.
    pub fn parity() -> Self {
        Self::real(0.0, 1.0, 1.0, 0.0)
    }

    pub fn entries(&self) -> [Complex; 4] {
        [self.m00, self.m01, self.m10, self.m11]
    }

    pub fn scale(self, k: Complex) -> Self {
        Self::new(self.m00 * k, self.m01 * k, self.m10 * k, self.m11 * k)
    }

    pub fn transpose(self) -> Self {
        Self::new(self.m00, self.m10, self.m01, self.m11)
    }

    pub fn conj(self) -> Self {
        Self::new(self.m00.conj(), self.m01.conj(), self.m10.conj(), self.m11.conj())
    }

    pub fn dagger(self) -> Self {
        self.conj().transpose()
    }

    pub fn trace(self) -> Complex {
        self.m00 + self.m11
    }

    pub fn det(self) -> Complex {
        self.m00 * self.m11 - self.m01 * self.m10
    }

    pub fn inverse(self) -> Result<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return Err(Error::Domain("singular matrix has no inverse".into()));
        }
        let k = d.inv();
        Ok(Self::new(self.m11 * k, -self.m01 * k, -self.m10 * k, self.m00 * k))
    }

    /// Commutator `[A, B] = AB − BA`.
    pub fn commutator(self, other: Mat2) -> Mat2 {
        self * other - other * self
    }

    /// Largest entry modulus.
    pub fn max_abs(self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(self) -> bool {
        self.entries().iter().all(|z| z.is_finite())
    }

    /// Matrix exponential by scaling and squaring of the Taylor series.
    ///
    /// Independent of any closed form; used as a reference for the PT
    /// evolution operator.
    pub fn exp(self) -> Mat2 {
        let norm = self.max_abs() * 2.0;
        let mut squarings = 0u32;
        let mut scaled = self;
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
            scaled = self.scale(re(0.5f64.powi(squarings as i32)));
        }
        let mut sum = Mat2::identity();
        let mut term = Mat2::identity();
        for k in 1..=30 {
            term = (term * scaled).scale(re(1.0 / k as f64));
            sum = sum + term;
            if term.max_abs() < 1e-18 {
                break;
            }
        }
        for _ in 0..squarings {
            sum = sum * sum;
        }
        sum
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.m00 + o.m00, self.m01 + o.m01, self.m10 + o.m10, self.m11 + o.m11)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.m00 - o.m00, self.m01 - o.m01, self.m10 - o.m10, self.m11 - o.m11)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.m00 * o.m00 + self.m01 * o.m10,
            self.m00 * o.m01 + self.m01 * o.m11,
            self.m10 * o.m00 + self.m11 * o.m10,
            self.m10 * o.m01 + self.m11 * o.m11,
        )
    }
}

impl Mul<StateVec> for Mat2 {
    type Output = StateVec;
    fn mul(self, v: StateVec) -> StateVec {
        mat_apply(&self, v)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.m00, self.m01, self.m10, self.m11)
    }
}

/// Matrix-vector product.
pub fn mat_apply(m: &Mat2, v: StateVec) -> StateVec {
    StateVec::new(m.m00 * v.a0 + m.m01 * v.a1, m.m10 * v.a0 + m.m11 * v.a1)
}

/// Hermitian inner product `⟨u|v⟩`, conjugate-linear in `u`.
pub fn herm_inner(u: StateVec, v: StateVec) -> Complex {
    u.conj().dot(v)
}

/// Orthogonal projector `v v† / ⟨v|v⟩` onto the ray of `v`.
pub fn herm_projector(v: StateVec) -> Result<Mat2> {
    let n = v.norm_sqr();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(v.outer(v.conj()).scale(re(1.0 / n)))
}

/// Entrywise comparison with an absolute tolerance.
pub trait ApproxEq {
    /// Largest absolute entrywise difference.
    fn max_abs_diff(&self, other: &Self) -> f64;

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

impl ApproxEq for Complex {
    fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl ApproxEq for StateVec {
    fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.a0 - other.a0).norm().max((self.a1 - other.a1).norm())
    }
}

impl ApproxEq for Mat2 {
    fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }
}

impl ApproxEq for f64 {
    fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).abs()
    }
}

/// Free-function form of [`ApproxEq::approx_eq`].
pub fn approx_eq<T: ApproxEq>(a: &T, b: &T, tol: f64) -> bool {
    a.approx_eq(b, tol)
}
