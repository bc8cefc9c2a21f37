use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::ring::CoefficientRing;
use crate::algebra::{AlgebraElement, GradedAlgebra};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};

/// Algebra-valued Laurent polynomial in z. `valid_from = Some(v)` means the
/// coefficients of `z^k` are known exactly only for `k >= v`; `None` means
/// the element is exact in every degree.
#[derive(Clone, Debug, PartialEq)]
pub struct ZLaurentElement {
    dim: usize,
    terms: BTreeMap<i64, AlgebraElement>,
    valid_from: Option<i64>,
}

impl ZLaurentElement {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
            valid_from: None,
        }
    }

    /// `a z^k`.
    pub fn monomial(a: AlgebraElement, k: i64) -> Self {
        let mut out = Self::zero(a.dim());
        out.insert(k, a);
        out
    }

    pub fn constant(a: AlgebraElement) -> Self {
        Self::monomial(a, 0)
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (i64, AlgebraElement)>) -> Self {
        let mut out = Self::zero(dim);
        for (k, a) in terms {
            out.insert(k, a);
        }
        out
    }

    fn insert(&mut self, k: i64, a: AlgebraElement) {
        assert_eq!(a.dim(), self.dim, "coefficient dimension mismatch");
        let sum = match self.terms.remove(&k) {
            Some(old) => &old + &a,
            None => a,
        };
        if !sum.is_zero() {
            self.terms.insert(k, sum);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<i64, AlgebraElement> {
        &self.terms
    }

    pub fn valid_from(&self) -> Option<i64> {
        self.valid_from
    }

    pub fn is_exact(&self) -> bool {
        self.valid_from.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest z-power with a known nonzero coefficient.
    pub fn top(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn bottom(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Coefficient of `z^k`; asking below the validity bound is an error.
    pub fn coefficient(&self, k: i64) -> Result<AlgebraElement> {
        if let Some(v) = self.valid_from {
            if k < v {
                return Err(Error::Window {
                    exponent: k,
                    valid_from: v,
                });
            }
        }
        Ok(self
            .terms
            .get(&k)
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(self.dim)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, a) in &other.terms {
            out.insert(*k, a.clone());
        }
        out.valid_from = max_opt(self.valid_from, other.valid_from);
        out.drop_invalid();
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, a)| (*k, -a)).collect(),
            valid_from: self.valid_from,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self {
                terms: BTreeMap::new(),
                ..self.clone()
            };
        }
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, a)| (*k, a.scale(r))).collect(),
            valid_from: self.valid_from,
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, a)| (e + k, a.clone())).collect(),
            valid_from: self.valid_from.map(|v| v + k),
        }
    }

    /// Applies a linear map to every coefficient.
    pub fn map_classes(&self, dim: usize, f: impl Fn(&AlgebraElement) -> AlgebraElement) -> Self {
        let mut out = Self::zero(dim);
        for (k, a) in &self.terms {
            out.insert(*k, f(a));
        }
        out.valid_from = self.valid_from;
        out
    }

    /// Highest exponent the complete element can carry.
    fn upper(&self) -> Option<i64> {
        match (self.top(), self.valid_from) {
            (t, None) => t,
            (None, Some(v)) => Some(v - 1),
            (Some(t), Some(v)) => Some(t.max(v - 1)),
        }
    }

    pub fn mul(&self, algebra: &GradedAlgebra, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                out.insert(i + j, algebra.mul_unchecked(a, b));
            }
        }
        let mut bound = None;
        if let (Some(v), Some(u)) = (self.valid_from, other.upper()) {
            bound = max_opt(bound, Some(v + u));
        }
        if let (Some(v), Some(u)) = (other.valid_from, self.upper()) {
            bound = max_opt(bound, Some(v + u));
        }
        out.valid_from = bound;
        out.drop_invalid();
        out
    }

    /// Marks everything below `z^v` as unknown.
    pub fn with_validity(mut self, v: Option<i64>) -> Self {
        self.valid_from = max_opt(self.valid_from, v);
        self.drop_invalid();
        self
    }

    /// Forgets everything below `z^z_min`.
    pub fn truncate_below(&self, z_min: i64) -> Self {
        if self.bottom().is_none_or(|b| b >= z_min) {
            return self.clone();
        }
        Self {
            dim: self.dim,
            terms: self.terms.range(z_min..).map(|(k, a)| (*k, a.clone())).collect(),
            valid_from: max_opt(self.valid_from, Some(z_min)),
        }
    }

    /// Drops stored terms below the validity bound.
    fn drop_invalid(&mut self) {
        if let Some(v) = self.valid_from {
            self.terms = self.terms.split_off(&v);
        }
    }

    /// The part with exponents `>= k` (exact if the input was known there).
    pub fn part_from(&self, k: i64) -> Result<Self> {
        if let Some(v) = self.valid_from {
            if k < v {
                return Err(Error::Window {
                    exponent: k,
                    valid_from: v,
                });
            }
        }
        Ok(Self {
            dim: self.dim,
            terms: self.terms.range(k..).map(|(e, a)| (*e, a.clone())).collect(),
            valid_from: None,
        })
    }

    pub fn display(&self, algebra: &GradedAlgebra) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(k, a)| format!("({})z^{k}", algebra.display(a)))
            .collect();
        let mut s = parts.join(" + ");
        if let Some(v) = self.valid_from {
            s.push_str(&format!(" + O(z^{})", v - 1));
        }
        s
    }
}

fn max_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// `u + a z` over `algebra`.
pub fn linear_factor(algebra: &GradedAlgebra, u: &AlgebraElement, a: &Rational) -> ZLaurentElement {
    let mut out = ZLaurentElement::constant(u.clone());
    out.insert(1, algebra.one().scale(a));
    out
}

/// `1 / (c + a z) = sum_k (-1)^k c^k / a^(k+1) z^(-k-1)`, a finite sum for nilpotent `c`.
pub fn nilpotent_reciprocal(algebra: &GradedAlgebra, c: &AlgebraElement, a: i64) -> Result<ZLaurentElement> {
    if a == 0 {
        return Err(Error::Domain("1/(c + 0 z) has no Laurent expansion in 1/z".into()));
    }
    if c.dim() != algebra.dim() {
        return Err(Error::Conformance {
            expected: algebra.dim(),
            found: c.dim(),
        });
    }
    if !algebra.is_nilpotent(c) {
        return Err(Error::Domain(format!(
            "class {} is not nilpotent",
            algebra.display(c)
        )));
    }
    let a = rat(a);
    let mut out = ZLaurentElement::zero(algebra.dim());
    let mut power = algebra.one();
    let mut denom = a.clone();
    let mut k = 0i64;
    while !power.is_zero() {
        let sign = if k % 2 == 0 { Rational::one() } else { -Rational::one() };
        out.insert(-k - 1, power.scale(&(sign / &denom)));
        power = algebra.mul_unchecked(&power, c);
        denom *= &a;
        k += 1;
    }
    Ok(out)
}

/// Coefficient ring of z-Laurent elements over a fixed algebra; products are
/// cut off below `z_min`.
#[derive(Clone, Copy, Debug)]
pub struct ZLaurentRing<'a> {
    pub algebra: &'a GradedAlgebra,
    pub z_min: i64,
}

impl<'a> ZLaurentRing<'a> {
    pub fn new(algebra: &'a GradedAlgebra, z_min: i64) -> Self {
        Self { algebra, z_min }
    }
}

impl CoefficientRing for ZLaurentRing<'_> {
    type Elem = ZLaurentElement;

    fn zero(&self) -> ZLaurentElement {
        ZLaurentElement::zero(self.algebra.dim())
    }
    fn one(&self) -> ZLaurentElement {
        ZLaurentElement::constant(self.algebra.one())
    }
    fn add(&self, a: &ZLaurentElement, b: &ZLaurentElement) -> ZLaurentElement {
        a.add(b)
    }
    fn neg(&self, a: &ZLaurentElement) -> ZLaurentElement {
        a.neg()
    }
    fn mul(&self, a: &ZLaurentElement, b: &ZLaurentElement) -> ZLaurentElement {
        a.mul(self.algebra, b).truncate_below(self.z_min)
    }
    fn scale(&self, a: &ZLaurentElement, r: &Rational) -> ZLaurentElement {
        a.scale(r)
    }
    fn is_zero(&self, a: &ZLaurentElement) -> bool {
        a.is_zero() && a.is_exact()
    }
    fn as_scalar(&self, a: &ZLaurentElement) -> Option<Rational> {
        if !a.is_exact() || a.terms.keys().any(|&k| k != 0) {
            return None;
        }
        let c = a.coefficient(0).ok()?;
        self.algebra
            .is_scalar(&c)
            .then(|| self.algebra.unit_coefficient(&c))
    }
}
