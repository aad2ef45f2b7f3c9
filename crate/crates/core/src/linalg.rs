//! Dense 2×2 complex matrices, which is all the model ever needs.

use crate::real::{Cx, Real};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2<T> {
    pub a: [[Cx<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(a00: Cx<T>, a01: Cx<T>, a10: Cx<T>, a11: Cx<T>) -> Self {
        Self { a: [[a00, a01], [a10, a11]] }
    }

    pub fn from_real(a00: T, a01: T, a10: T, a11: T) -> Self {
        let c = |x| Cx::new(x, T::zero());
        Self::new(c(a00), c(a01), c(a10), c(a11))
    }

    pub fn zero() -> Self {
        Self::from_real(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Self::from_real(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn sigma_x() -> Self {
        Self::from_real(T::zero(), T::one(), T::one(), T::zero())
    }

    pub fn sigma_y() -> Self {
        let i = Cx::<T>::i();
        Self::new(Cx::new(T::zero(), T::zero()), -i, i, Cx::new(T::zero(), T::zero()))
    }

    pub fn sigma_z() -> Self {
        Self::from_real(T::one(), T::zero(), T::zero(), -T::one())
    }

    pub fn trace(&self) -> Cx<T> {
        self.a[0][0] + self.a[1][1]
    }

    pub fn det(&self) -> Cx<T> {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    pub fn adjoint(&self) -> Self {
        let a = &self.a;
        Self::new(a[0][0].conj(), a[1][0].conj(), a[0][1].conj(), a[1][1].conj())
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        let a = &self.a;
        Self::new(a[0][0] * s, a[0][1] * s, a[1][0] * s, a[1][1] * s)
    }

    /// Inverse, or `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == T::zero() || !d.norm().is_finite() {
            return None;
        }
        let a = &self.a;
        Some(Self::new(a[1][1], -a[0][1], -a[1][0], a[0][0]).scale(d.inv()))
    }

    pub fn apply(&self, v: [Cx<T>; 2]) -> [Cx<T>; 2] {
        let a = &self.a;
        [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.a.iter().flatten().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn dist(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let (a, b) = (self.a, o.a);
        Self::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(Cx::new(-T::one(), T::zero()))
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.a, o.a);
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// `u† v` for 2-spinors.
pub fn inner<T: Real>(u: [Cx<T>; 2], v: [Cx<T>; 2]) -> Cx<T> {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

pub fn norm2<T: Real>(v: [Cx<T>; 2]) -> T {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}
