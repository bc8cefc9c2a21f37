use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::algebra::{AlgebraElement, GradedAlgebra};
use crate::rational::Rational;

/// A commutative coefficient ring given by a context object. Elements do not
/// carry their ring, so algebra-valued coefficients need the algebra at hand.
pub trait CoefficientRing {
    type Elem: Clone + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, r: &Rational) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// `Some(c)` when `a = c * 1`.
    fn as_scalar(&self, a: &Self::Elem) -> Option<Rational>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    #[allow(clippy::wrong_self_convention)]
    fn from_scalar(&self, r: &Rational) -> Self::Elem {
        self.scale(&self.one(), r)
    }

    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        self.is_zero(&self.sub(a, b))
    }
}

/// The rationals.
#[derive(Clone, Copy, Debug, Default)]
pub struct Scalars;

impl CoefficientRing for Scalars {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn scale(&self, a: &Rational, r: &Rational) -> Rational {
        a * r
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn as_scalar(&self, a: &Rational) -> Option<Rational> {
        Some(a.clone())
    }
}

impl CoefficientRing for GradedAlgebra {
    type Elem = AlgebraElement;

    fn zero(&self) -> AlgebraElement {
        GradedAlgebra::zero(self)
    }
    fn one(&self) -> AlgebraElement {
        GradedAlgebra::one(self)
    }
    fn add(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        a + b
    }
    fn neg(&self, a: &AlgebraElement) -> AlgebraElement {
        -a
    }
    fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
        self.mul_unchecked(a, b)
    }
    fn scale(&self, a: &AlgebraElement, r: &Rational) -> AlgebraElement {
        a.scale(r)
    }
    fn is_zero(&self, a: &AlgebraElement) -> bool {
        a.is_zero()
    }
    fn as_scalar(&self, a: &AlgebraElement) -> Option<Rational> {
        self.is_scalar(a).then(|| self.unit_coefficient(a))
    }
}
