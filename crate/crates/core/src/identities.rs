//! Lagrange inversion for simple-pole Laurent series, the exponential
//! (Bell polynomial) identity, and the round trip `g -> W -> g`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::periods::{complete_degree, compare, proper_potential_from_g, IdentityCheck};
use crate::rational::{format_rational, rat, ratio, Rational};
use crate::series::{pairing, ScalarSeries, Scalars, TruncationPolicy};

/// `f(x) = x^-1 + sum_{k>=0} f_k x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplePoleLaurent {
    pub tail: Vec<Rational>,
    /// Highest `k` for which `f_k` is known; `None` when the tail is exact.
    pub precision: Option<usize>,
}

impl SimplePoleLaurent {
    /// Exact series with finitely many tail terms.
    pub fn new(tail: Vec<Rational>) -> Self {
        Self { tail, precision: None }
    }

    pub fn truncated(tail: Vec<Rational>, precision: usize) -> Self {
        Self {
            tail,
            precision: Some(precision),
        }
    }

    pub fn tail_coefficient(&self, k: usize) -> Rational {
        self.tail.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    fn require(&self, k: usize, what: &str) -> Result<()> {
        match self.precision {
            Some(p) if k > p => Err(Error::Truncation {
                what: what.to_string(),
                needed: k as u64,
                available: p as u64,
            }),
            _ => Ok(()),
        }
    }

    /// `x f(x) = 1 + sum_k f_k x^(k+1)` truncated at degree `n`.
    fn regular_part(&self, n: u32) -> ScalarSeries {
        let policy = TruncationPolicy::uniform(1, n);
        let mut p = ScalarSeries::one(&Scalars, policy);
        for (k, c) in self.tail.iter().enumerate() {
            p.add_term(&Scalars, vec![k as u32 + 1], c.clone());
        }
        p
    }
}

/// Series in `u = omega^-1`: `sum_k c_k u^k`.
pub type OmegaSeries = ScalarSeries;

/// Composition inverse `g(omega) = sum_{k>0} (1/k) [f^k]_{x^-1} omega^-k`, to `omega^-order`.
pub fn lagrange_invert(f: &SimplePoleLaurent, order: u32) -> Result<OmegaSeries> {
    if order >= 2 {
        f.require(order as usize - 2, "Lagrange inversion")?;
    }
    let policy = TruncationPolicy::uniform(1, order);
    let mut g = OmegaSeries::zero(policy);
    if order == 0 {
        return Ok(g);
    }
    let p = f.regular_part(order - 1);
    let mut power = ScalarSeries::one(&Scalars, p.policy().clone());
    for k in 1..=order {
        power = power.mul(&Scalars, &p)?;
        // [f^k]_{x^-1} = [(x f)^k]_{x^(k-1)}
        let c = power.coeff1(k - 1);
        g.add_term(&Scalars, vec![k], c / rat(k as i64));
    }
    Ok(g)
}

/// `f(g(omega))` as `omega_coefficient * omega + sum_{k=0}^{order} tail_k omega^-k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Composite {
    pub omega_coefficient: Rational,
    pub tail: Vec<Rational>,
}

impl Composite {
    /// Whether the composite is exactly `omega` to the computed order.
    pub fn is_identity(&self) -> bool {
        self.omega_coefficient.is_one() && self.tail.iter().all(Zero::is_zero)
    }
}

/// `f(g(omega)) = g^-1 + sum_k f_k g^k` for `g = g_1 u + g_2 u^2 + ...`, `g_1 != 0`.
/// Needs `g` to order `order + 2` and `f_k` for `k <= order`.
pub fn compose(f: &SimplePoleLaurent, g: &OmegaSeries, order: u32) -> Result<Composite> {
    if g.nvars() != 1 {
        return Err(Error::Config("compose expects a series in one variable".into()));
    }
    if !g.constant_term(&Scalars).is_zero() || g.coeff1(1).is_zero() {
        return Err(Error::Domain("compose needs g = g_1/omega + ... with g_1 != 0".into()));
    }
    let available = g.policy().max_weight / g.policy().weights[0];
    if available < order + 2 {
        return Err(Error::Truncation {
            what: "compose".into(),
            needed: order as u64 + 2,
            available: available as u64,
        });
    }
    f.require(order as usize, "compose")?;
    let policy = TruncationPolicy::uniform(1, order + 1);
    // g / u, known to u^(order+1)
    let mut h = ScalarSeries::zero(policy.clone());
    for (e, c) in g.terms() {
        h.add_term(&Scalars, vec![e[0] - 1], c.clone());
    }
    let r = h.reciprocal(&Scalars)?;
    let mut tail: Vec<Rational> = (0..=order).map(|k| r.coeff1(k + 1)).collect();
    let g = g.truncated(order).with_policy(policy.clone())?;
    let mut power = ScalarSeries::one(&Scalars, policy);
    for k in 0..=order as usize {
        let fk = f.tail_coefficient(k);
        if !fk.is_zero() {
            for j in 0..=order {
                tail[j as usize] += &fk * power.coeff1(j);
            }
        }
        power = power.mul(&Scalars, &g)?;
    }
    Ok(Composite {
        omega_coefficient: r.coeff1(0),
        tail,
    })
}

/// `exp(sum_{k>0} (1/k)[f^k]_{x^k} y^k) = sum_{k>0} (1/k)[f^k]_{x^(k-1)} y^(k-1)`
/// for a polynomial `f` with constant term 1, compared to `y^order`.
pub fn bell_identity_check(f: &[Rational], order: u32) -> Result<IdentityCheck> {
    if f.first().map(|c| c.is_one()) != Some(true) {
        return Err(Error::Domain("the Bell identity needs constant term 1".into()));
    }
    let xpolicy = TruncationPolicy::uniform(1, order);
    let fx = ScalarSeries::from_coeffs(f, xpolicy.clone()).truncated(order);
    let ypolicy = TruncationPolicy::uniform(1, order);
    let mut inner = ScalarSeries::zero(ypolicy.clone());
    let mut rhs = ScalarSeries::zero(ypolicy.clone());
    let mut power = ScalarSeries::one(&Scalars, xpolicy);
    for k in 1..=order + 1 {
        power = power.mul(&Scalars, &fx)?;
        let kq = rat(k as i64);
        if k <= order {
            inner.add_term(&Scalars, vec![k], power.coeff1(k) / &kq);
        }
        rhs.add_term(&Scalars, vec![k - 1], power.coeff1(k - 1) / &kq);
    }
    let lhs = inner.exp(&Scalars)?;
    compare("Bell identity", &lhs, &rhs)
}

/// `g(y) = sum_{k>0} (1/k) [W^k]_{x^0} y^k` for `W = x exp(g(y(q)))`.
/// Several variables are first collapsed to `s^(D.beta)` with `m = 1`.
pub fn roundtrip_g_w(g: &ScalarSeries, m: &[i64]) -> Result<IdentityCheck> {
    let (g1, m1) = if g.nvars() == 1 {
        (g.clone(), m[0])
    } else {
        (collapse(g, m)?, 1)
    };
    let w = proper_potential_from_g(&g1, &[m1])?;
    let policy = g1.policy().clone();
    let top = policy.max_weight / policy.weights[0];
    let complete = complete_degree(&policy, &[m1])?;
    if (top as u64) * (m1 as u64) > complete {
        return Err(Error::Truncation {
            what: "round trip g -> W -> g".into(),
            needed: top as u64 * m1 as u64,
            available: complete,
        });
    }
    let powers = w.w.powers(top * m1 as u32)?;
    let mut back = ScalarSeries::zero(policy);
    for j in 1..=top {
        let n = j * m1 as u32;
        let c: Rational = powers[n as usize]
            .x_coefficient(0)
            .terms()
            .values()
            .fold(Rational::zero(), |a, b| a + b);
        back.add_term(&Scalars, vec![j], c / rat(n as i64));
    }
    compare("g = sum (1/k)[W^k]_(x^0) y^k", &back, &g1)
}

/// `g(y) -> g(s)` with `y^beta -> s^(m . beta)`, for positive `m`.
fn collapse(g: &ScalarSeries, m: &[i64]) -> Result<ScalarSeries> {
    if m.iter().any(|&x| x <= 0) {
        return Err(Error::Unsupported("collapsing to one variable needs every m_i > 0".into()));
    }
    let policy = g.policy();
    let mut top = 0;
    for e in policy.exponents() {
        top = top.max(pairing(m, &e));
    }
    let mut out = ScalarSeries::zero(TruncationPolicy::uniform(1, top as u32));
    for (e, c) in g.terms() {
        out.add_term(&Scalars, vec![pairing(m, e) as u32], c.clone());
    }
    Ok(out)
}

/// Outcome of a randomized suite.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub cases: usize,
    pub order: u32,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6))
}

pub fn random_simple_pole(rng: &mut ChaCha8Rng, tail_len: usize) -> SimplePoleLaurent {
    SimplePoleLaurent::new((0..tail_len).map(|_| random_rational(rng)).collect())
}

fn describe(v: &[Rational]) -> String {
    v.iter().map(format_rational).collect::<Vec<_>>().join(", ")
}

/// `compose(f, lagrange_invert(f)) = omega` to `omega^-order` for random `f`
/// with six tail terms.
pub fn lagrange_suite(seed: u64, cases: usize, order: u32) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let f = random_simple_pole(&mut rng, 6);
        let g = lagrange_invert(&f, order + 2)?;
        let c = compose(&f, &g, order)?;
        if !c.is_identity() {
            failures.push(format!("f tail [{}]", describe(&f.tail)));
        }
    }
    Ok(SuiteReport {
        name: "lagrange".into(),
        seed,
        cases,
        order,
        failures,
    })
}

/// Bell identity for random polynomials with constant term 1.
pub fn bell_suite(seed: u64, cases: usize, order: u32) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let len = rng.gen_range(1..=order as usize + 1);
        let mut f = vec![Rational::one()];
        f.extend((1..len).map(|_| random_rational(&mut rng)));
        let check = bell_identity_check(&f, order)?;
        if !check.holds {
            failures.push(format!("f [{}]", describe(&f)));
        }
    }
    Ok(SuiteReport {
        name: "bell".into(),
        seed,
        cases,
        order,
        failures,
    })
}

/// Random `g` with four rational coefficients and `m` in `1..=5`.
pub fn random_g(rng: &mut ChaCha8Rng, order: u32) -> (ScalarSeries, i64) {
    let mut coeffs = vec![Rational::zero()];
    coeffs.extend((0..4).map(|_| random_rational(rng)));
    let m = rng.gen_range(1..=5);
    (ScalarSeries::from_coeffs(&coeffs, TruncationPolicy::uniform(1, order)), m)
}

pub fn roundtrip_suite(seed: u64, cases: usize, order: u32) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..cases {
        let (g, m) = random_g(&mut rng, order);
        let check = roundtrip_g_w(&g, &[m])?;
        if !check.holds {
            failures.push(format!("m = {m}, g = {}", g.display(&["y".to_string()])));
        }
    }
    Ok(SuiteReport {
        name: "roundtrip".into(),
        seed,
        cases,
        order,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(coeffs: &[i64], n: u32) -> OmegaSeries {
        let c: Vec<Rational> = coeffs.iter().map(|&x| rat(x)).collect();
        ScalarSeries::from_coeffs(&c, TruncationPolicy::uniform(1, n))
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(lagrange_invert(&SimplePoleLaurent::new(vec![]), 6).unwrap(), u(&[0, 1], 6));
        let ones = lagrange_invert(&SimplePoleLaurent::new(vec![rat(1)]), 6).unwrap();
        assert_eq!(ones, u(&[0, 1, 1, 1, 1, 1, 1], 6));
        let g = lagrange_invert(&SimplePoleLaurent::new(vec![rat(0), rat(1)]), 6).unwrap();
        assert_eq!(g, u(&[0, 1, 0, 1, 0, 2], 6));
    }

    #[test]
    fn compose_examples() {
        let f = SimplePoleLaurent::new(vec![rat(1)]);
        let c = compose(&f, &lagrange_invert(&f, 10).unwrap(), 8).unwrap();
        assert!(c.is_identity());
        let id = compose(&SimplePoleLaurent::new(vec![]), &u(&[0, 1], 5), 3).unwrap();
        assert!(id.is_identity());
        assert!(compose(&f, &u(&[0, 0, 1], 5), 3).is_err());
        assert!(matches!(compose(&f, &u(&[0, 1], 4), 3), Err(Error::Truncation { .. })));
    }

    #[test]
    fn precision_is_enforced() {
        let f = SimplePoleLaurent::truncated(vec![rat(1), rat(2)], 1);
        assert!(lagrange_invert(&f, 3).is_ok());
        assert!(matches!(lagrange_invert(&f, 4), Err(Error::Truncation { .. })));
    }

    #[test]
    fn bell_examples() {
        assert!(bell_identity_check(&[rat(1), rat(1)], 10).unwrap().holds);
        assert!(bell_identity_check(&[rat(1)], 10).unwrap().holds);
        assert!(bell_identity_check(&[rat(2)], 4).is_err());
    }

    #[test]
    fn roundtrip_examples() {
        let g = ScalarSeries::from_coeffs(&[rat(0), rat(2), rat(15)], TruncationPolicy::uniform(1, 3));
        assert!(roundtrip_g_w(&g, &[3]).unwrap().holds);
        let zero = ScalarSeries::zero(TruncationPolicy::uniform(1, 3));
        assert!(roundtrip_g_w(&zero, &[2]).unwrap().holds);
    }

    #[test]
    fn suites_pass() {
        assert!(lagrange_suite(1, 5, 10).unwrap().passed());
        assert!(bell_suite(1, 5, 12).unwrap().passed());
        assert!(roundtrip_suite(1, 5, 6).unwrap().passed());
    }
}
