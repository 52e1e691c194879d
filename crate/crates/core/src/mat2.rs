//! Fixed-size complex 2x2 algebra.
//!
//! [`Mat2`] is the value type of every operator in the crate: the coin, the
//! two step matrices, ordered path products and path sums. [`Spinor`] is a
//! chirality vector `(left, right)`.

use std::ops::{AddAssign, Neg};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{Cx, Real};

/// Row-major complex 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2<T> {
    pub a: Cx<T>,
    pub b: Cx<T>,
    pub c: Cx<T>,
    pub d: Cx<T>,
}

/// Two-component chirality vector `(psi_L, psi_R)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Spinor<T> {
    pub l: Cx<T>,
    pub r: Cx<T>,
}

impl<T: Real> Mat2<T> {
    pub const fn new(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_real(a: T, b: T, c: T, d: T) -> Self {
        let z = T::zero();
        Self::new(
            Complex::new(a, z),
            Complex::new(b, z),
            Complex::new(c, z),
            Complex::new(d, z),
        )
    }

    pub fn zero() -> Self {
        Self::new(Cx::zero(), Cx::zero(), Cx::zero(), Cx::zero())
    }

    pub fn identity() -> Self {
        Self::new(Cx::one(), Cx::zero(), Cx::zero(), Cx::one())
    }

    pub fn diag(d0: Cx<T>, d1: Cx<T>) -> Self {
        Self::new(d0, Cx::zero(), Cx::zero(), d1)
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> [Cx<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn entry(&self, row: usize, col: usize) -> Cx<T> {
        self.entries()[2 * row + col]
    }

    /// Matrix product `self * rhs`.
    #[inline]
    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    #[inline]
    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            a: self.a + rhs.a,
            b: self.b + rhs.b,
            c: self.c + rhs.c,
            d: self.d + rhs.d,
        }
    }

    #[inline]
    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            a: self.a - rhs.a,
            b: self.b - rhs.b,
            c: self.c - rhs.c,
            d: self.d - rhs.d,
        }
    }

    #[inline]
    pub fn scale(&self, z: Cx<T>) -> Self {
        Self {
            a: z * self.a,
            b: z * self.b,
            c: z * self.c,
            d: z * self.d,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: self.c.conj(),
            c: self.b.conj(),
            d: self.d.conj(),
        }
    }

    /// `A v`
    #[inline]
    pub fn apply(&self, v: &Spinor<T>) -> Spinor<T> {
        Spinor {
            l: self.a * v.l + self.b * v.r,
            r: self.c * v.l + self.d * v.r,
        }
    }

    /// `A^n` by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> Cx<T> {
        self.a + self.d
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> T {
        self.entries()
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.sub(other).max_abs()
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries()
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |s, x| s + x)
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| crate::scalar::is_finite(*z))
    }

    /// Deviation of `self^H self` from the identity, as `(row, col, |dev|)` of
    /// the worst entry.
    pub fn unitarity_defect(&self) -> (usize, usize, T) {
        let g = self.adjoint().mul(self).sub(&Self::identity());
        let mut worst = (0, 0, T::zero());
        for (i, z) in g.entries().iter().enumerate() {
            let v = z.norm();
            if v > worst.2 || v.is_nan() {
                worst = (i / 2, i % 2, v);
            }
        }
        worst
    }
}

impl<T: Real> Spinor<T> {
    pub const fn new(l: Cx<T>, r: Cx<T>) -> Self {
        Self { l, r }
    }

    pub fn zero() -> Self {
        Self::new(Cx::zero(), Cx::zero())
    }

    /// `|v_1|^2 + |v_2|^2`
    #[inline]
    pub fn norm_sq(&self) -> T {
        self.l.norm_sqr() + self.r.norm_sqr()
    }

    /// `<self, other>`, conjugate-linear in `self`.
    #[inline]
    pub fn inner(&self, other: &Self) -> Cx<T> {
        self.l.conj() * other.l + self.r.conj() * other.r
    }

    #[inline]
    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(self.l + rhs.l, self.r + rhs.r)
    }

    #[inline]
    pub fn scale(&self, z: Cx<T>) -> Self {
        Self::new(z * self.l, z * self.r)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.l - other.l).norm().max((self.r - other.r).norm())
    }
}

impl<T: Real> AddAssign for Mat2<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = Mat2::add(self, &rhs);
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-Cx::one())
    }
}

/// Values that can stand in for the step matrices of a walk.
///
/// Implemented by [`Mat2`] (the quantum walk) and by `Complex<T>` (the
/// commutative reduction where each step matrix becomes a scalar weight), so
/// every path-sum identity can be evaluated in both settings by the same code.
pub trait StepOperator<T: Real>: Copy + Send + Sync + std::fmt::Debug {
    fn zero_op() -> Self;
    fn identity_op() -> Self;
    /// `self * rhs`
    fn compose(&self, rhs: &Self) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn scaled(&self, z: Cx<T>) -> Self;
    /// Entrywise max modulus of `self - other`.
    fn distance(&self, other: &Self) -> T;
    fn magnitude(&self) -> T;
}

impl<T: Real> StepOperator<T> for Mat2<T> {
    fn zero_op() -> Self {
        Mat2::zero()
    }
    fn identity_op() -> Self {
        Mat2::identity()
    }
    #[inline]
    fn compose(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    #[inline]
    fn plus(&self, rhs: &Self) -> Self {
        Mat2::add(self, rhs)
    }
    #[inline]
    fn scaled(&self, z: Cx<T>) -> Self {
        self.scale(z)
    }
    fn distance(&self, other: &Self) -> T {
        self.max_abs_diff(other)
    }
    fn magnitude(&self) -> T {
        self.max_abs()
    }
}

impl<T: Real> StepOperator<T> for Cx<T> {
    fn zero_op() -> Self {
        Complex::zero()
    }
    fn identity_op() -> Self {
        Complex::one()
    }
    #[inline]
    fn compose(&self, rhs: &Self) -> Self {
        *self * *rhs
    }
    #[inline]
    fn plus(&self, rhs: &Self) -> Self {
        *self + *rhs
    }
    #[inline]
    fn scaled(&self, z: Cx<T>) -> Self {
        z * *self
    }
    fn distance(&self, other: &Self) -> T {
        (*self - *other).norm()
    }
    fn magnitude(&self) -> T {
        self.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use proptest::prelude::*;

    fn m(v: [f64; 8]) -> Mat2<f64> {
        Mat2::new(
            cx(v[0], v[1]),
            cx(v[2], v[3]),
            cx(v[4], v[5]),
            cx(v[6], v[7]),
        )
    }

    fn arb_mat() -> impl Strategy<Value = Mat2<f64>> {
        prop::array::uniform8(-2.0f64..2.0).prop_map(m)
    }

    #[test]
    fn identity_is_neutral() {
        let a = m([1.0, 2.0, -0.5, 0.25, 3.0, -1.0, 0.0, 7.0]);
        assert_eq!(Mat2::identity().mul(&a), a);
        assert_eq!(a.mul(&Mat2::identity()), a);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let a = m([0.3, 0.1, -0.2, 0.4, 0.5, -0.6, 0.7, 0.05]);
        let mut acc = Mat2::identity();
        for n in 0..20u64 {
            assert!(a.pow(n).max_abs_diff(&acc) < 1e-13, "n = {n}");
            acc = a.mul(&acc);
        }
    }

    #[test]
    fn apply_and_norm() {
        let v = Spinor::new(cx(1.0, 1.0), cx(0.0, -2.0));
        assert_eq!(v.norm_sq(), 6.0);
        let a = Mat2::from_real(0.0, 1.0, 1.0, 0.0);
        assert_eq!(a.apply(&v), Spinor::new(cx(0.0, -2.0), cx(1.0, 1.0)));
    }

    #[test]
    fn unitarity_defect_names_worst_entry() {
        let a = Mat2::<f64>::from_real(1.0, 0.0, 0.0, 2.0);
        let (r, c, dev) = a.unitarity_defect();
        assert_eq!((r, c), (1, 1));
        assert!((dev - 3.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn adjoint_is_involution(a in arb_mat()) {
            prop_assert_eq!(a.adjoint().adjoint(), a);
        }

        #[test]
        fn adjoint_reverses_products(a in arb_mat(), b in arb_mat()) {
            let lhs = a.mul(&b).adjoint();
            let rhs = b.adjoint().mul(&a.adjoint());
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-14);
        }

        #[test]
        fn product_is_associative(a in arb_mat(), b in arb_mat(), c in arb_mat()) {
            let lhs = a.mul(&b).mul(&c);
            let rhs = a.mul(&b.mul(&c));
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }
    }
}
