//! Quantum, regularized and classical periods, the proper Landau-Ginzburg
//! potential, and the checks relating them.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::catalog::{InvariantKey, InvariantKind, InvariantTable, JSource, PairGeometry, POINT, POINT_TAU_D};
use crate::error::{Error, Result};
use crate::pipeline::{is_trivial, mirror_data, projective_j, tau_d, Direction, GExtraction, MirrorChange};
use crate::rational::{factorial_q, rat, Rational};
use crate::series::{pairing, Exponent, ScalarSeries, Scalars, TruncationPolicy, XLaurentSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodKind {
    Quantum,
    Regularized,
    Classical,
}

/// A series in the bookkeeping variable `t`, `q^beta = t^(D.beta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodSeries {
    pub kind: PeriodKind,
    /// `coefficients[d]` is the coefficient of `t^d`.
    pub coefficients: Vec<Rational>,
    /// Contributions of the individual curve classes.
    pub per_beta: BTreeMap<Exponent, Rational>,
    /// Whether the quantum side includes insertions of the mirror map in D.
    pub deformed: bool,
}

impl PeriodSeries {
    pub fn coefficient(&self, d: usize) -> Rational {
        self.coefficients.get(d).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest degree covered.
    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    /// Nonzero `(degree, coefficient)` pairs.
    pub fn nonzero(&self) -> Vec<(usize, Rational)> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(d, c)| (d, c.clone()))
            .collect()
    }
}

/// Largest `n` such that every class with `m . beta <= n` is admitted.
/// Requires every `m_i > 0`.
pub fn complete_degree(policy: &TruncationPolicy, m: &[i64]) -> Result<u64> {
    if let Some(i) = m.iter().position(|&x| x <= 0) {
        return Err(Error::Truncation {
            what: format!("x^0 coefficients with m_{i} = {} <= 0", m[i]),
            needed: u64::MAX,
            available: policy.max_weight as u64,
        });
    }
    let mut n = 0u64;
    loop {
        let next = n + 1;
        if !classes_of_degree(m, next).iter().all(|b| policy.admits(b)) {
            return Ok(n);
        }
        n = next;
        if n > 64 * policy.max_weight as u64 + 64 {
            return Ok(n);
        }
    }
}

/// All `beta >= 0` with `m . beta = n`, for positive `m`.
fn classes_of_degree(m: &[i64], n: u64) -> Vec<Exponent> {
    fn go(m: &[i64], left: i64, cur: &mut Exponent, out: &mut Vec<Exponent>) {
        let i = cur.len();
        if i == m.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut b = 0;
        while b * m[i] <= left {
            cur.push(b as u32);
            go(m, left - b * m[i], cur, out);
            cur.pop();
            b += 1;
        }
    }
    let mut out = Vec::new();
    go(m, n as i64, &mut Vec::new(), &mut out);
    out
}

fn aggregate(kind: PeriodKind, per_beta: BTreeMap<Exponent, Rational>, m: &[i64], order: usize, deformed: bool) -> PeriodSeries {
    let mut coefficients = vec![Rational::zero(); order + 1];
    coefficients[0] = Rational::one();
    for (beta, c) in &per_beta {
        let d = pairing(m, beta);
        if d >= 0 && (d as usize) <= order {
            coefficients[d as usize] += c;
        }
    }
    PeriodSeries {
        kind,
        coefficients,
        per_beta,
        deformed,
    }
}

/// One-point invariants of a projective space from its closed-form J-function,
/// `<[pt] psi^((n+1)d - 2)>_d = 1/(d!)^(n+1)`, as table rows.
pub fn projective_table(geometry: &PairGeometry) -> Result<InvariantTable> {
    let JSource::ClosedFormProjective { dim, hyperplane } = &geometry.j_source else {
        return Err(Error::MissingSource(format!("geometry `{}` is not a projective space", geometry.name)));
    };
    let algebra = &geometry.ambient;
    let j = projective_j(algebra, hyperplane, *dim, &geometry.policy)?;
    let mut table = InvariantTable::new();
    for (beta, x) in j.terms() {
        let d = beta[0] as i64;
        if d == 0 {
            continue;
        }
        let a = (*dim as i64 + 1) * d - 2;
        let v = algebra.unit_coefficient(&x.coefficient(-a - 1)?);
        table.insert(
            InvariantKey {
                kind: InvariantKind::X,
                class: beta.clone(),
                psi_power: a as u32,
                insertion: POINT.into(),
            },
            v,
        )?;
    }
    Ok(table)
}

/// The table of X point invariants used for the quantum period.
pub fn point_invariants(geometry: &PairGeometry) -> Result<InvariantTable> {
    match (&geometry.invariants, &geometry.j_source) {
        (Some(t), _) if t.has_rows(InvariantKind::X, POINT) => Ok(t.clone()),
        (_, JSource::ClosedFormProjective { .. }) => projective_table(geometry),
        _ => Err(Error::MissingSource(format!(
            "geometry `{}` needs X point invariants for its quantum period",
            geometry.name
        ))),
    }
}

/// `G(t) = 1 + sum_beta <[pt] psi^(d-2)>_beta t^d`, `d = D.beta >= 2`. When the
/// mirror map in D is nonzero the `pt;tauD` rows are added and the series is
/// marked as deformed.
pub fn quantum_period(geometry: &PairGeometry) -> Result<PeriodSeries> {
    let tau = tau_d(geometry)?;
    let deformed = !is_trivial(&tau, geometry);
    let table = point_invariants(geometry)?;
    let mut insertions = vec![POINT];
    if deformed {
        if !table.has_rows(InvariantKind::X, POINT_TAU_D) {
            return Err(Error::ExternalDataRequired(format!(
                "geometry `{}` needs X rows with insertion `{POINT_TAU_D}`",
                geometry.name
            )));
        }
        insertions.push(POINT_TAU_D);
    }
    let mut per_beta: BTreeMap<Exponent, Rational> = BTreeMap::new();
    for ins in insertions {
        for (class, a, v) in table.rows(InvariantKind::X, ins) {
            let d = geometry.degree(class);
            if d >= 2 && a as i64 == d - 2 && geometry.policy.admits(class) {
                *per_beta.entry(class.to_vec()).or_insert_with(Rational::zero) += v;
            }
        }
    }
    let order = max_degree(geometry);
    Ok(aggregate(PeriodKind::Quantum, per_beta, &geometry.m_vector, order, deformed))
}

/// Largest `D.beta` among admitted classes.
fn max_degree(geometry: &PairGeometry) -> usize {
    geometry
        .policy
        .exponents()
        .iter()
        .map(|b| geometry.degree(b))
        .max()
        .unwrap_or(0)
        .max(0) as usize
}

/// Multiplies the degree-d coefficient by `d!`.
pub fn regularize(g: &PeriodSeries) -> Result<PeriodSeries> {
    if g.kind != PeriodKind::Quantum {
        return Err(Error::Domain(format!("regularize expects a quantum period, got {:?}", g.kind)));
    }
    let coefficients = g
        .coefficients
        .iter()
        .enumerate()
        .map(|(d, c)| c * factorial_q(d as u64))
        .collect();
    Ok(PeriodSeries {
        kind: PeriodKind::Regularized,
        coefficients,
        per_beta: g.per_beta.clone(),
        deformed: g.deformed,
    })
}

/// `W = x exp(g(y(q)))` with `q^beta -> t^beta x^(-D.beta)`.
#[derive(Clone, Debug)]
pub struct ProperPotential {
    pub w: XLaurentSeries,
    pub g_used: ScalarSeries,
    pub change_used: MirrorChange,
    /// `exp(g(y(q)))` as a series in q.
    pub exp_g: ScalarSeries,
}

impl ProperPotential {
    pub fn m(&self) -> &[i64] {
        &self.change_used.m
    }

    /// `(x-exponent, t-degree, coefficient)` with classes of equal degree summed.
    pub fn aggregated(&self) -> Vec<(i64, i64, Rational)> {
        let mut acc: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
        for (k, beta, c) in self.w.entries() {
            *acc.entry((pairing(self.m(), &beta), k)).or_insert_with(Rational::zero) += c;
        }
        acc.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|((d, k), c)| (k, d, c))
            .collect()
    }
}

/// W for a given `g` and `m`.
pub fn proper_potential_from_g(g: &ScalarSeries, m: &[i64]) -> Result<ProperPotential> {
    let change = MirrorChange::new(g.clone(), m.to_vec(), Direction::Inverse)?;
    let y = change.images()?;
    let exp_g = g.substitute(&Scalars, &y)?.exp(&Scalars)?;
    let mut w = XLaurentSeries::zero(g.policy().clone());
    for (beta, c) in exp_g.terms() {
        w.add_term(1 - pairing(m, beta), beta.clone(), c.clone())?;
    }
    Ok(ProperPotential {
        w,
        g_used: g.clone(),
        change_used: change,
        exp_g,
    })
}

/// Runs the mirror pipeline and builds W.
pub fn proper_potential(geometry: &PairGeometry) -> Result<ProperPotential> {
    let data = mirror_data(geometry)?;
    proper_potential_from_g(&data.extraction.g, &geometry.m_vector)
}

/// Also returns the g-extraction report.
pub fn proper_potential_with_report(geometry: &PairGeometry) -> Result<(ProperPotential, GExtraction)> {
    let data = mirror_data(geometry)?;
    let w = proper_potential_from_g(&data.extraction.g, &geometry.m_vector)?;
    Ok((w, data.extraction))
}

fn check_theta_range(w: &ProperPotential, n: u32) -> Result<()> {
    let policy = w.w.policy();
    let complete = complete_degree(policy, w.m())?;
    if (n as u64) > complete {
        return Err(Error::Truncation {
            what: format!("[W^{n}]_(x^0)"),
            needed: n as u64,
            available: complete,
        });
    }
    Ok(())
}

/// `[W^n]_{x^0}` as a series in the curve-class variables.
pub fn theta_coefficient(w: &ProperPotential, n: u32) -> Result<ScalarSeries> {
    check_theta_range(w, n)?;
    Ok(w.w.pow(n)?.x_coefficient(0))
}

/// The same coefficient read off `exp(n G(q))` at `D.beta = n`, using
/// `W^n = x^n exp(G)^n`.
pub fn theta_coefficient_q_route(w: &ProperPotential, n: u32) -> Result<ScalarSeries> {
    check_theta_range(w, n)?;
    let power = w.exp_g.pow(&Scalars, n)?;
    let mut out = ScalarSeries::zero(power.policy().clone());
    for (beta, c) in power.terms() {
        if pairing(w.m(), beta) == n as i64 {
            out.add_term(&Scalars, beta.clone(), c.clone());
        }
    }
    Ok(out)
}

fn total(s: &ScalarSeries) -> Rational {
    s.terms().values().fold(Rational::zero(), |acc, c| acc + c)
}

/// `pi_W(t) = 1 + sum_{n>=1} [W^n]_{x^0} t^n` up to the largest complete degree.
pub fn classical_period(w: &ProperPotential) -> Result<PeriodSeries> {
    let order = complete_degree(w.w.policy(), w.m())? as usize;
    let mut per_beta = BTreeMap::new();
    let powers = w.w.powers(order as u32)?;
    for p in powers.iter().skip(1) {
        for (beta, c) in p.x_coefficient(0).terms() {
            *per_beta.entry(beta.clone()).or_insert_with(Rational::zero) += c;
        }
    }
    let out = aggregate(PeriodKind::Classical, per_beta, w.m(), order, false);
    debug_assert!(powers
        .iter()
        .enumerate()
        .skip(1)
        .all(|(n, p)| total(&p.x_coefficient(0)) == out.coefficient(n)));
    Ok(out)
}

/// One row of the period comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodRow {
    pub degree: usize,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub classical: Rational,
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub regularized_quantum: Rational,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodReport {
    pub geometry: String,
    pub rows: Vec<PeriodRow>,
    pub first_mismatch: Option<usize>,
    /// Quantum side includes insertions of the mirror map in D.
    pub deformed: bool,
    /// The table entry changed by the negative control.
    pub perturbed: Option<String>,
}

impl PeriodReport {
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Compares the classical period of W with the regularized quantum period.
/// With `negative_control` one X point invariant (the one of least degree) is
/// increased by 1 on the quantum side.
pub fn verify_period_theorem(geometry: &PairGeometry, negative_control: bool) -> Result<PeriodReport> {
    let w = proper_potential(geometry)?;
    let classical = classical_period(&w)?;
    let mut quantum_geometry = geometry.clone();
    let mut perturbed = None;
    if negative_control {
        let table = point_invariants(geometry)?;
        let m = geometry.m_vector.clone();
        let (table, key) = table.perturbed(|c| pairing(&m, c).max(0) as u64)?;
        perturbed = Some(format!(
            "{} {} psi^{} {}",
            key.kind,
            crate::catalog::format_class(&key.class),
            key.psi_power,
            key.insertion
        ));
        quantum_geometry = quantum_geometry.with_invariants(table)?;
        quantum_geometry.j_source = JSource::InvariantTable;
    }
    let quantum = regularize(&quantum_period(&quantum_geometry)?)?;
    let top = classical.order().min(quantum.order());
    let rows: Vec<PeriodRow> = (0..=top)
        .map(|d| {
            let (c, q) = (classical.coefficient(d), quantum.coefficient(d));
            PeriodRow {
                degree: d,
                matches: c == q,
                classical: c,
                regularized_quantum: q,
            }
        })
        .collect();
    let first_mismatch = rows.iter().find(|r| !r.matches).map(|r| r.degree);
    Ok(PeriodReport {
        geometry: geometry.name.clone(),
        rows,
        first_mismatch,
        deformed: quantum.deformed,
        perturbed,
    })
}

/// A coefficient-wise comparison of two series.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
    /// First differing class with both sides, as `p/q` strings.
    pub first_difference: Option<(Exponent, String, String)>,
}

pub(crate) fn compare(name: &str, lhs: &ScalarSeries, rhs: &ScalarSeries) -> Result<IdentityCheck> {
    let diff = lhs.sub(&Scalars, rhs)?;
    let first_difference = diff.terms().keys().next().map(|e| {
        let side = |s: &ScalarSeries| crate::rational::format_rational(&s.coefficient_or_zero(&Scalars, e));
        (e.clone(), side(lhs), side(rhs))
    });
    Ok(IdentityCheck {
        name: name.to_string(),
        holds: first_difference.is_none(),
        first_difference,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DeltaReport {
    pub geometry: String,
    pub checks: Vec<IdentityCheck>,
}

impl DeltaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// `sum_i m_i y_i d/dy_i`, assembled from the single-variable derivatives.
fn weighted_euler(f: &ScalarSeries, m: &[i64]) -> Result<ScalarSeries> {
    let mut out = ScalarSeries::zero(f.policy().clone());
    for (i, mi) in m.iter().enumerate() {
        out = out.add(&Scalars, &f.euler_derive(&Scalars, i)?.scale(&Scalars, &rat(*mi)))?;
    }
    Ok(out)
}

/// Checks the identities behind `1 + sum_beta e_beta q^beta = exp(g(y(q)))`,
/// where `e_beta` are the coefficients of W and `a_beta = e_beta / (D.beta - 1)`:
///
/// * `e^{-g} A(q(y)) - e^{-g} + 1 = R` with `A = sum a_beta q^beta` and
///   `R = sum_beta g_beta (D.beta)/(D.beta - 1) y^beta`;
/// * `(E - 1)` of the left side equals `(E g) e^{-g} (1 + sum e_beta q(y)^beta)`,
///   with `E = sum_i m_i y_i d/dy_i`;
/// * `(E - 1) R = E g`;
/// * `1 + sum e_beta q(y)^beta = exp(g(y))`.
pub fn delta_d_check(geometry: &PairGeometry) -> Result<DeltaReport> {
    let w = proper_potential(geometry)?;
    delta_d_check_from(&geometry.name, &w)
}

pub fn delta_d_check_from(name: &str, w: &ProperPotential) -> Result<DeltaReport> {
    let m = w.m();
    let g = &w.g_used;
    let policy = g.policy().clone();
    let one = ScalarSeries::one(&Scalars, policy.clone());
    let mut a = ScalarSeries::zero(policy.clone());
    let mut e_series = one.clone();
    for (beta, c) in w.exp_g.terms() {
        if beta.iter().all(|&b| b == 0) {
            continue;
        }
        let d = pairing(m, beta);
        if d == 1 {
            return Err(Error::Unsupported(format!("class {beta:?} with D.beta = 1 in W")));
        }
        a.add_term(&Scalars, beta.clone(), c / rat(d - 1));
        e_series.add_term(&Scalars, beta.clone(), c.clone());
    }
    let mut r = ScalarSeries::zero(policy.clone());
    for (beta, c) in g.terms() {
        let d = pairing(m, beta);
        if d == 1 {
            return Err(Error::Unsupported(format!("class {beta:?} with D.beta = 1 in g")));
        }
        r.add_term(&Scalars, beta.clone(), c * rat(d) / rat(d - 1));
    }
    let q_of_y = w.change_used.reversed().images()?;
    let exp_minus_g = g.neg(&Scalars).exp(&Scalars)?;
    let a_y = a.substitute(&Scalars, &q_of_y)?;
    let e_y = e_series.sub(&Scalars, &one)?.substitute(&Scalars, &q_of_y)?.add(&Scalars, &one)?;
    let pre = exp_minus_g
        .mul(&Scalars, &a_y)?
        .sub(&Scalars, &exp_minus_g)?
        .add(&Scalars, &one)?;
    let eg = weighted_euler(g, m)?;
    let lhs2 = weighted_euler(&pre, m)?.sub(&Scalars, &pre)?;
    let rhs2 = eg.mul(&Scalars, &exp_minus_g)?.mul(&Scalars, &e_y)?;
    let lhs3 = weighted_euler(&r, m)?.sub(&Scalars, &r)?;
    let checks = vec![
        compare("coefficient identity", &pre, &r)?,
        compare("delta_D applied", &lhs2, &rhs2)?,
        compare("delta_D on the g side", &lhs3, &eg)?,
        compare("exp(g) from W", &e_y, &g.exp(&Scalars)?)?,
    ];
    Ok(DeltaReport {
        geometry: name.to_string(),
        checks,
    })
}
