use std::collections::BTreeMap;

use super::novikov::ScalarSeries;
use super::policy::TruncationPolicy;
use super::ring::Scalars;
use crate::error::Result;
use crate::rational::Rational;

/// Laurent polynomial in x whose coefficients are truncated Novikov series.
/// Finitely many x-powers occur because every coefficient is truncated.
#[derive(Clone, Debug, PartialEq)]
pub struct XLaurentSeries {
    terms: BTreeMap<i64, ScalarSeries>,
    policy: TruncationPolicy,
}

impl XLaurentSeries {
    pub fn zero(policy: TruncationPolicy) -> Self {
        Self {
            terms: BTreeMap::new(),
            policy,
        }
    }

    /// `x^k * s`.
    pub fn monomial(k: i64, s: ScalarSeries) -> Self {
        let mut out = Self::zero(s.policy().clone());
        out.add_at(k, s).expect("monomial policy matches itself");
        out
    }

    pub fn one(policy: TruncationPolicy) -> Self {
        Self::monomial(0, ScalarSeries::one(&Scalars, policy))
    }

    pub fn policy(&self) -> &TruncationPolicy {
        &self.policy
    }

    pub fn terms(&self) -> &BTreeMap<i64, ScalarSeries> {
        &self.terms
    }

    /// Adds `x^k * s`.
    pub fn add_at(&mut self, k: i64, s: ScalarSeries) -> Result<()> {
        self.policy.check_compatible(s.policy())?;
        let sum = match self.terms.remove(&k) {
            Some(old) => old.add(&Scalars, &s)?,
            None => s,
        };
        if !sum.is_empty() {
            self.terms.insert(k, sum);
        }
        Ok(())
    }

    /// Adds `c x^k y^e`.
    pub fn add_term(&mut self, k: i64, e: Vec<u32>, c: Rational) -> Result<()> {
        let s = ScalarSeries::monomial(&Scalars, e, c, self.policy.clone());
        self.add_at(k, s)
    }

    /// Coefficient of `x^k`.
    pub fn x_coefficient(&self, k: i64) -> ScalarSeries {
        self.terms
            .get(&k)
            .cloned()
            .unwrap_or_else(|| ScalarSeries::zero(self.policy.clone()))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (k, s) in &other.terms {
            out.add_at(*k, s.clone())?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.policy.check_compatible(&other.policy)?;
        let mut out = Self::zero(self.policy.clone());
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                out.add_at(i + j, a.mul(&Scalars, b)?)?;
            }
        }
        Ok(out)
    }

    /// `[self^0, self^1, ..., self^n]`.
    pub fn powers(&self, n: u32) -> Result<Vec<Self>> {
        let mut out = vec![Self::one(self.policy.clone())];
        for _ in 0..n {
            let next = out.last().unwrap().mul(self)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        Ok(self.powers(n)?.pop().unwrap())
    }

    /// The substitution `x -> x^-1`.
    pub fn inverted(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, s)| (-k, s.clone())).collect(),
            policy: self.policy.clone(),
        }
    }

    /// Flattened `(x-exponent, Novikov exponent, coefficient)` triples.
    pub fn entries(&self) -> Vec<(i64, Vec<u32>, Rational)> {
        let mut out = Vec::new();
        for (k, s) in &self.terms {
            for (e, c) in s.terms() {
                out.push((*k, e.clone(), c.clone()));
            }
        }
        out
    }
}
