use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::policy::{Exponent, TruncationPolicy};
use super::ring::{CoefficientRing, Scalars};
use crate::error::{Error, Result};
use crate::rational::{factorial_q, format_rational, rat, Rational};

/// Truncated multivariate power series in Novikov variables. Every stored
/// exponent is admissible under `policy` and no stored coefficient is zero.
#[derive(Clone, Debug)]
pub struct NovikovSeries<E> {
    terms: BTreeMap<Exponent, E>,
    policy: TruncationPolicy,
}

pub type ScalarSeries = NovikovSeries<Rational>;

impl<E: Clone> NovikovSeries<E> {
    pub fn zero(policy: TruncationPolicy) -> Self {
        Self {
            terms: BTreeMap::new(),
            policy,
        }
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    pub fn nvars(&self) -> usize {
        self.policy.nvars()
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, E> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &[u32]) -> Option<&E> {
        self.terms.get(e)
    }

    pub fn constant_exponent(&self) -> Exponent {
        vec![0; self.nvars()]
    }

    pub fn map_coeffs<F: Clone>(&self, f: impl Fn(&E) -> F) -> NovikovSeries<F> {
        NovikovSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), f(c))).collect(),
            policy: self.policy.clone(),
        }
    }

    /// Like [`map_coeffs`](Self::map_coeffs) but drops coefficients the ring
    /// considers zero.
    pub fn map_in<R: CoefficientRing>(&self, ring: &R, f: impl Fn(&Exponent, &E) -> R::Elem) -> NovikovSeries<R::Elem> {
        let mut out = NovikovSeries::zero(self.policy.clone());
        for (e, c) in &self.terms {
            out.add_term(ring, e.clone(), f(e, c));
        }
        out
    }

    /// Order of the series: least weight of a stored term.
    pub fn order(&self) -> Option<u64> {
        self.terms.keys().map(|e| self.policy.weight(e)).min()
    }

    /// Restricts to terms of weight at most `n` under a policy of order `n`.
    pub fn truncated(&self, n: u32) -> Self {
        let policy = self.policy.with_order(n);
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| policy.admits(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
            policy,
        }
    }

    pub fn with_policy(&self, policy: TruncationPolicy) -> Result<Self> {
        if policy.nvars() != self.nvars() {
            return Err(Error::Config("policy change must keep the variable count".into()));
        }
        Ok(Self {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| policy.admits(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
            policy,
        })
    }
}

impl<E: Clone> NovikovSeries<E> {
    pub fn constant<R: CoefficientRing<Elem = E>>(ring: &R, c: E, policy: TruncationPolicy) -> Self {
        let mut s = Self::zero(policy);
        let e = s.constant_exponent();
        s.add_term(ring, e, c);
        s
    }

    pub fn one<R: CoefficientRing<Elem = E>>(ring: &R, policy: TruncationPolicy) -> Self {
        Self::constant(ring, ring.one(), policy)
    }

    pub fn monomial<R: CoefficientRing<Elem = E>>(ring: &R, e: Exponent, c: E, policy: TruncationPolicy) -> Self {
        let mut s = Self::zero(policy);
        s.add_term(ring, e, c);
        s
    }

    /// The variable `y_i` itself.
    pub fn variable<R: CoefficientRing<Elem = E>>(ring: &R, i: usize, policy: TruncationPolicy) -> Self {
        let mut e = vec![0; policy.nvars()];
        e[i] = 1;
        Self::monomial(ring, e, ring.one(), policy)
    }

    /// Adds `c * y^e`, silently dropping inadmissible exponents.
    pub fn add_term<R: CoefficientRing<Elem = E>>(&mut self, ring: &R, e: Exponent, c: E) {
        assert_eq!(e.len(), self.nvars(), "exponent length mismatch");
        if !self.policy.admits(&e) || ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let sum = ring.add(old, &c);
                if ring.is_zero(&sum) {
                    self.terms.remove(&e);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn constant_term<R: CoefficientRing<Elem = E>>(&self, ring: &R) -> E {
        self.terms
            .get(&self.constant_exponent())
            .cloned()
            .unwrap_or_else(|| ring.zero())
    }

    pub fn coefficient_or_zero<R: CoefficientRing<Elem = E>>(&self, ring: &R, e: &[u32]) -> E {
        self.terms.get(e).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn is_zero_in<R: CoefficientRing<Elem = E>>(&self, ring: &R) -> bool {
        self.terms.values().all(|c| ring.is_zero(c))
    }

    pub fn add<R: CoefficientRing<Elem = E>>(&self, ring: &R, other: &Self) -> Result<Self> {
        self.policy.check_compatible(&other.policy)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(ring, e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg<R: CoefficientRing<Elem = E>>(&self, ring: &R) -> Self {
        self.map_coeffs(|c| ring.neg(c))
    }

    pub fn sub<R: CoefficientRing<Elem = E>>(&self, ring: &R, other: &Self) -> Result<Self> {
        self.add(ring, &other.neg(ring))
    }

    pub fn scale<R: CoefficientRing<Elem = E>>(&self, ring: &R, r: &Rational) -> Self {
        let mut out = Self::zero(self.policy.clone());
        for (e, c) in &self.terms {
            out.add_term(ring, e.clone(), ring.scale(c, r));
        }
        out
    }

    /// Multiplies every coefficient by a ring element.
    pub fn scale_by<R: CoefficientRing<Elem = E>>(&self, ring: &R, a: &E) -> Self {
        let mut out = Self::zero(self.policy.clone());
        for (e, c) in &self.terms {
            out.add_term(ring, e.clone(), ring.mul(c, a));
        }
        out
    }

    pub fn mul<R: CoefficientRing<Elem = E>>(&self, ring: &R, other: &Self) -> Result<Self> {
        self.policy.check_compatible(&other.policy)?;
        let max = self.policy.max_weight as u64;
        let mut out = Self::zero(self.policy.clone());
        for (e1, c1) in &self.terms {
            let w1 = self.policy.weight(e1);
            for (e2, c2) in &other.terms {
                if w1 + self.policy.weight(e2) > max {
                    continue;
                }
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(ring, e, ring.mul(c1, c2));
            }
        }
        Ok(out)
    }

    pub fn pow<R: CoefficientRing<Elem = E>>(&self, ring: &R, n: u32) -> Result<Self> {
        let mut acc = Self::one(ring, self.policy.clone());
        for _ in 0..n {
            acc = acc.mul(ring, self)?;
        }
        Ok(acc)
    }

    /// Number of powers of a series without constant term that survive truncation.
    fn power_bound(&self) -> u32 {
        self.policy.max_weight / self.policy.min_weight()
    }

    /// Formal exponential; `self` must have no constant term.
    pub fn exp<R: CoefficientRing<Elem = E>>(&self, ring: &R) -> Result<Self> {
        if !ring.is_zero(&self.constant_term(ring)) {
            return Err(Error::Domain("exp needs a series without constant term".into()));
        }
        let mut out = Self::one(ring, self.policy.clone());
        let mut term = out.clone();
        for k in 1..=self.power_bound() {
            term = term.mul(ring, self)?.scale(ring, &Rational::new(1.into(), k.into()));
            if term.is_empty() {
                break;
            }
            out = out.add(ring, &term)?;
        }
        Ok(out)
    }

    /// Formal logarithm; `self` must have constant term 1.
    pub fn log<R: CoefficientRing<Elem = E>>(&self, ring: &R) -> Result<Self> {
        let c0 = self.constant_term(ring);
        if ring.as_scalar(&c0) != Some(Rational::one()) {
            return Err(Error::Domain("log needs constant term 1".into()));
        }
        let one = Self::one(ring, self.policy.clone());
        let u = self.sub(ring, &one)?;
        let mut out = Self::zero(self.policy.clone());
        let mut power = one;
        for k in 1..=self.power_bound() {
            power = power.mul(ring, &u)?;
            if power.is_empty() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            out = out.add(ring, &power.scale(ring, &Rational::new(sign.into(), k.into())))?;
        }
        Ok(out)
    }

    /// `1/f` through the geometric series `(1/c) sum_k (1 - f/c)^k`, where the
    /// constant term of `f` is the scalar `c != 0`.
    pub fn reciprocal<R: CoefficientRing<Elem = E>>(&self, ring: &R) -> Result<Self> {
        let c = ring
            .as_scalar(&self.constant_term(ring))
            .filter(|c| !c.is_zero())
            .ok_or_else(|| Error::Domain("reciprocal needs an invertible scalar constant term".into()))?;
        let c_inv = c.recip();
        let one = Self::one(ring, self.policy.clone());
        let u = one.sub(ring, &self.scale(ring, &c_inv))?;
        let mut out = one.clone();
        let mut power = one;
        for _ in 1..=self.power_bound() {
            power = power.mul(ring, &u)?;
            if power.is_empty() {
                break;
            }
            out = out.add(ring, &power)?;
        }
        Ok(out.scale(ring, &c_inv))
    }

    /// `y_i d/dy_i`.
    pub fn euler_derive<R: CoefficientRing<Elem = E>>(&self, ring: &R, i: usize) -> Result<Self> {
        if i >= self.nvars() {
            return Err(Error::UnknownVariable {
                index: i,
                count: self.nvars(),
            });
        }
        Ok(self.map_in(ring, |e, c| ring.scale(c, &rat(e[i] as i64))))
    }

    /// `sum_i m_i y_i d/dy_i`: scales the `y^b` coefficient by `m . b`.
    pub fn euler_weighted<R: CoefficientRing<Elem = E>>(&self, ring: &R, m: &[i64]) -> Result<Self> {
        if m.len() != self.nvars() {
            return Err(Error::Config("weight vector length must match variable count".into()));
        }
        Ok(self.map_in(ring, |e, c| ring.scale(c, &rat(pairing(m, e)))))
    }

    /// Substitutes scalar series `images[i]` (no constant terms) for the
    /// variables: `f(images)`.
    pub fn substitute<R: CoefficientRing<Elem = E>>(&self, ring: &R, images: &[ScalarSeries]) -> Result<Self> {
        if images.len() != self.nvars() {
            return Err(Error::Config("one image per variable required".into()));
        }
        let policy = images
            .first()
            .map(|s| s.policy.clone())
            .unwrap_or_else(|| self.policy.clone());
        for img in images {
            policy.check_compatible(&img.policy)?;
            if !img.constant_term(&Scalars).is_zero() {
                return Err(Error::Domain("substituted series must have no constant term".into()));
            }
        }
        let mut powers: Vec<Vec<ScalarSeries>> = images
            .iter()
            .map(|_| vec![ScalarSeries::one(&Scalars, policy.clone())])
            .collect();
        let mut out = Self::zero(policy.clone());
        for (e, c) in &self.terms {
            let mut prod = ScalarSeries::one(&Scalars, policy.clone());
            for (i, &a) in e.iter().enumerate() {
                while powers[i].len() <= a as usize {
                    let next = powers[i].last().unwrap().mul(&Scalars, &images[i])?;
                    powers[i].push(next);
                }
                prod = prod.mul(&Scalars, &powers[i][a as usize])?;
                if prod.is_empty() {
                    break;
                }
            }
            for (pe, pc) in &prod.terms {
                out.add_term(ring, pe.clone(), ring.scale(c, pc));
            }
        }
        Ok(out)
    }
}

impl ScalarSeries {
    /// Single-variable series from coefficients `c_0, c_1, ...`.
    pub fn from_coeffs(coeffs: &[Rational], policy: TruncationPolicy) -> Self {
        let mut s = Self::zero(policy);
        for (k, c) in coeffs.iter().enumerate() {
            s.add_term(&Scalars, vec![k as u32], c.clone());
        }
        s
    }

    /// `c_k` for a single-variable series.
    pub fn coeff1(&self, k: u32) -> Rational {
        self.coefficient(&[k]).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mono: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(a, _)| **a > 0)
                .map(|(a, n)| if *a == 1 { n.clone() } else { format!("{n}^{a}") })
                .collect();
            if mono.is_empty() {
                parts.push(format_rational(c));
            } else if c.is_one() {
                parts.push(mono.join("*"));
            } else {
                parts.push(format!("{}*{}", format_rational(c), mono.join("*")));
            }
        }
        parts.join(" + ")
    }
}

impl<E: PartialEq> PartialEq for NovikovSeries<E> {
    fn eq(&self, other: &Self) -> bool {
        self.policy == other.policy && self.terms == other.terms
    }
}

/// `m . e` for an integer vector and an exponent.
pub fn pairing(m: &[i64], e: &[u32]) -> i64 {
    m.iter().zip(e).map(|(a, b)| a * *b as i64).sum()
}

/// `exp(c y)` truncated, handy in tests and oracles.
pub fn exp_linear(c: &Rational, policy: TruncationPolicy) -> ScalarSeries {
    let n = policy.max_weight / policy.weights[0];
    let coeffs: Vec<Rational> = (0..=n)
        .map(|k| {
            let mut p = Rational::one();
            for _ in 0..k {
                p *= c;
            }
            p / factorial_q(k as u64)
        })
        .collect();
    ScalarSeries::from_coeffs(&coeffs, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn p1(n: u32) -> TruncationPolicy {
        TruncationPolicy::uniform(1, n)
    }

    fn s(coeffs: &[i64], n: u32) -> ScalarSeries {
        ScalarSeries::from_coeffs(&coeffs.iter().map(|&c| rat(c)).collect::<Vec<_>>(), p1(n))
    }

    #[test]
    fn product_truncates() {
        let f = s(&[1, 1], 2);
        let g = s(&[1, -1], 2);
        assert_eq!(f.mul(&Scalars, &g).unwrap(), s(&[1, 0, -1], 2));
    }

    #[test]
    fn two_variable_monomials_multiply() {
        let pol = TruncationPolicy::uniform(2, 4);
        let a = ScalarSeries::monomial(&Scalars, vec![1, 0], rat(1), pol.clone());
        let b = ScalarSeries::monomial(&Scalars, vec![0, 1], rat(1), pol.clone());
        let ab = a.mul(&Scalars, &b).unwrap();
        assert_eq!(ab, ScalarSeries::monomial(&Scalars, vec![1, 1], rat(1), pol));
    }

    #[test]
    fn incompatible_policies_are_rejected() {
        let err = s(&[1, 1], 2).mul(&Scalars, &s(&[1, 1], 3)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn exp_and_log() {
        assert_eq!(ScalarSeries::zero(p1(4)).exp(&Scalars).unwrap(), s(&[1], 4));
        let e = s(&[0, 6], 4).exp(&Scalars).unwrap();
        assert_eq!(e.coeff1(2), rat(18));
        let f = s(&[0, 2, 15], 6);
        assert_eq!(f.exp(&Scalars).unwrap().log(&Scalars).unwrap(), f);
        assert!(matches!(s(&[1, 1], 3).exp(&Scalars), Err(Error::Domain(_))));
        assert!(matches!(s(&[2, 1], 3).log(&Scalars), Err(Error::Domain(_))));
    }

    #[test]
    fn reciprocal_geometric() {
        let r = s(&[1, 1], 5).reciprocal(&Scalars).unwrap();
        assert_eq!(r, s(&[1, -1, 1, -1, 1, -1], 5));
        let r = s(&[1, 24], 2).reciprocal(&Scalars).unwrap();
        assert_eq!(r.coeff1(2), rat(576));
        let r = s(&[2, 1], 3).reciprocal(&Scalars).unwrap();
        assert_eq!(r.coeff1(0), ratio(1, 2));
        assert_eq!(r.coeff1(1), ratio(-1, 4));
        assert!(s(&[0, 1], 3).reciprocal(&Scalars).is_err());
    }

    #[test]
    fn euler_derivative() {
        let f = s(&[1, 0, 1], 3);
        assert_eq!(f.euler_derive(&Scalars, 0).unwrap(), s(&[0, 0, 2], 3));
        assert!(s(&[1], 3).euler_derive(&Scalars, 0).unwrap().is_empty());
        assert!(matches!(
            f.euler_derive(&Scalars, 1),
            Err(Error::UnknownVariable { index: 1, count: 1 })
        ));
    }

    #[test]
    fn delta_operator_on_exponential() {
        // (4 y d/dy - 1) exp(24 y): coefficient of y^k is (4k - 1) 24^k / k!
        let f = exp_linear(&rat(24), p1(3));
        let delta = f
            .euler_weighted(&Scalars, &[4])
            .unwrap()
            .sub(&Scalars, &f)
            .unwrap();
        assert_eq!(delta.coeff1(0), rat(-1));
        assert_eq!(delta.coeff1(1), rat(3 * 24));
        assert_eq!(delta.coeff1(2), rat(7 * 24 * 24 / 2));
    }

    #[test]
    fn substitution() {
        // f(y) = y + y^2 at y = q - q^2
        let f = s(&[0, 1, 1], 4);
        let img = s(&[0, 1, -1], 4);
        let out = f.substitute(&Scalars, &[img]).unwrap();
        // (q - q^2) + (q - q^2)^2 = q - q^2 + q^2 - 2q^3 + q^4
        assert_eq!(out, s(&[0, 1, 0, -2, 1], 4));
    }
}
