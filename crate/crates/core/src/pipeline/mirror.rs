use num_traits::{One, Zero};
use serde::Serialize;

use super::ifunction::{closed_form_i, relative_i, z_coefficient, IFunction, RelativeSeries};
use super::local::tau_d;
use super::relative::{RelativeElement, RelativeRing};
use crate::algebra::AlgebraElement;
use crate::catalog::{JSource, PairGeometry};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};
use crate::series::{CoefficientRing, Exponent, ScalarSeries, Scalars};

/// The I-function a geometry is built from: the toric hypergeometric series
/// or the relative I-function with the mirror map in D imposed.
pub fn geometry_i_function(geometry: &PairGeometry) -> Result<IFunction> {
    match geometry.j_source {
        JSource::ToricHypergeometric => closed_form_i(geometry),
        _ => relative_i(geometry, &tau_d(geometry)?),
    }
}

/// `I = I_1 z + I_0 + O(1/z)` split and normalized to `J = I / I_1`.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub i1: RelativeSeries,
    pub i0: RelativeSeries,
    pub j_body: RelativeSeries,
    /// `[J]_{z^0}` without the symbolic `sum_i p_i log y_i` part.
    pub tau: RelativeSeries,
    pub prefactor: Vec<AlgebraElement>,
    /// Whether `I_1 = 1`, in which case `J = I` and `tau = I_0`.
    pub i1_is_one: bool,
}

pub fn split_and_normalize(geometry: &PairGeometry, i: &IFunction) -> Result<Normalized> {
    let ring = RelativeRing::new(geometry);
    let i1 = z_coefficient(geometry, &i.body, 1)?;
    let i0 = z_coefficient(geometry, &i.body, 0)?;
    if ring.as_scalar(&i1.constant_term(&ring)) != Some(Rational::one()) {
        return Err(Error::Domain(format!(
            "the z^1 coefficient of the I-function of `{}` must start with 1",
            geometry.name
        )));
    }
    let one = RelativeSeries::one(&ring, i1.policy().clone());
    let i1_is_one = i1.sub(&ring, &one)?.is_zero_in(&ring);
    let j_body = if i1_is_one {
        i.body.clone()
    } else {
        i.body.mul(&ring, &i1.reciprocal(&ring)?)?
    };
    let tau = z_coefficient(geometry, &j_body, 0)?;
    Ok(Normalized {
        i1,
        i0,
        j_body,
        tau,
        prefactor: i.prefactor.clone(),
        i1_is_one,
    })
}

/// Checks `J = z + tau + O(1/z)`: the z^1 coefficient is 1 and nothing
/// survives in higher powers of z.
pub fn check_string_shape(geometry: &PairGeometry, n: &Normalized) -> Result<()> {
    let ring = RelativeRing::new(geometry);
    let j1 = z_coefficient(geometry, &n.j_body, 1)?;
    let one = RelativeSeries::one(&ring, j1.policy().clone());
    if !j1.sub(&ring, &one)?.is_zero_in(&ring) {
        return Err(Error::Domain("the z^1 coefficient of J is not 1".into()));
    }
    for (e, x) in n.j_body.terms() {
        for (contact, a) in x.components() {
            let visible = ring.visible(*contact, a);
            if let Some((k, _)) = visible.terms().iter().find(|(k, c)| **k >= 2 && !c.is_zero()) {
                return Err(Error::Domain(format!("J has a z^{k} term at {e:?} in contact {contact}")));
            }
        }
    }
    Ok(())
}

/// A component of the mirror map that does not enter `g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContactEntry {
    pub beta: Exponent,
    pub contact: i64,
    /// Class on D (or on X for contact 0).
    pub class: String,
    /// Coefficient of the unit class.
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub unit: Rational,
}

/// `g(y) = sum_{d>=2}` of the `[1]_{-d}` coefficients of the mirror map,
/// plus the components kept out of it.
#[derive(Clone, Debug)]
pub struct GExtraction {
    pub g: ScalarSeries,
    /// `[.]_{-1}` components, excluded from `g`.
    pub contact_minus_one: Vec<ContactEntry>,
    /// Components of contact `>= 0` at nonzero curve classes.
    pub nonnegative: Vec<ContactEntry>,
}

pub fn extract_g(geometry: &PairGeometry, tau: &RelativeSeries) -> Result<GExtraction> {
    let ring = RelativeRing::new(geometry);
    let mut g = ScalarSeries::zero(tau.policy().clone());
    let mut contact_minus_one = Vec::new();
    let mut nonnegative = Vec::new();
    for (beta, x) in tau.terms() {
        let zero_class = beta.iter().all(|&b| b == 0);
        for (contact, a) in x.components() {
            let class = ring.visible_class(*contact, &a.coefficient(0)?);
            let alg = if *contact == 0 { &geometry.ambient } else { &geometry.divisor };
            if class.is_zero() {
                continue;
            }
            let entry = || ContactEntry {
                beta: beta.clone(),
                contact: *contact,
                class: alg.display(&class),
                unit: alg.unit_coefficient(&class),
            };
            match *contact {
                c if c <= -2 => {
                    if !alg.is_scalar(&class) {
                        return Err(Error::Domain(format!(
                            "mirror map component at {beta:?}, contact {c} is {} rather than a multiple of 1",
                            alg.display(&class)
                        )));
                    }
                    g.add_term(&Scalars, beta.clone(), alg.unit_coefficient(&class));
                }
                -1 => contact_minus_one.push(entry()),
                _ if !zero_class => nonnegative.push(entry()),
                _ => {}
            }
        }
    }
    Ok(GExtraction {
        g,
        contact_minus_one,
        nonnegative,
    })
}

/// All stages up to `g` for a geometry.
#[derive(Clone, Debug)]
pub struct MirrorData {
    pub i: IFunction,
    pub normalized: Normalized,
    pub extraction: GExtraction,
}

pub fn mirror_data(geometry: &PairGeometry) -> Result<MirrorData> {
    let i = geometry_i_function(geometry)?;
    let normalized = split_and_normalize(geometry, &i)?;
    check_string_shape(geometry, &normalized)?;
    let extraction = extract_g(geometry, &normalized.tau)?;
    Ok(MirrorData {
        i,
        normalized,
        extraction,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `q_i = y_i exp(m_i g(y))`.
    Forward,
    /// `y_i(q)`, solving the forward relation.
    Inverse,
}

/// The change of variables `log q_i = log y_i + m_i g(y)`.
#[derive(Clone, Debug)]
pub struct MirrorChange {
    pub g: ScalarSeries,
    pub m: Vec<i64>,
    pub direction: Direction,
}

impl MirrorChange {
    pub fn new(g: ScalarSeries, m: Vec<i64>, direction: Direction) -> Result<Self> {
        if m.len() != g.nvars() {
            return Err(Error::Config(format!(
                "m has {} entries, g has {} variables",
                m.len(),
                g.nvars()
            )));
        }
        if !g.constant_term(&Scalars).is_zero() {
            return Err(Error::Domain("g must have no constant term".into()));
        }
        Ok(Self { g, m, direction })
    }

    pub fn reversed(&self) -> Self {
        let direction = match self.direction {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        };
        Self {
            direction,
            ..self.clone()
        }
    }

    /// Images of the variables under the substitution in `direction`.
    pub fn images(&self) -> Result<Vec<ScalarSeries>> {
        match self.direction {
            Direction::Forward => self.forward_images(),
            Direction::Inverse => self.inverse_images(),
        }
    }

    fn variables(&self) -> Vec<ScalarSeries> {
        (0..self.g.nvars())
            .map(|i| ScalarSeries::variable(&Scalars, i, self.g.policy().clone()))
            .collect()
    }

    fn forward_images(&self) -> Result<Vec<ScalarSeries>> {
        self.variables()
            .into_iter()
            .zip(&self.m)
            .map(|(y, m)| y.mul(&Scalars, &self.g.scale(&Scalars, &rat(*m)).exp(&Scalars)?))
            .collect()
    }

    /// Fixed-point iteration `y_i <- q_i exp(-m_i g(y))` from `y = q`; each
    /// step fixes one more order.
    fn inverse_images(&self) -> Result<Vec<ScalarSeries>> {
        let q = self.variables();
        let policy = self.g.policy();
        let steps = policy.max_weight / policy.min_weight() + 1;
        let mut y = q.clone();
        for _ in 0..steps {
            let gy = self.g.substitute(&Scalars, &y)?;
            let next = q
                .iter()
                .zip(&self.m)
                .map(|(qi, m)| qi.mul(&Scalars, &gy.scale(&Scalars, &rat(-m)).exp(&Scalars)?))
                .collect::<Result<Vec<_>>>()?;
            if next == y {
                break;
            }
            y = next;
        }
        Ok(y)
    }
}

/// `y(q)` for the given change.
pub fn invert_mirror_map(change: &MirrorChange) -> Result<Vec<ScalarSeries>> {
    let inverse = MirrorChange {
        direction: Direction::Inverse,
        ..change.clone()
    };
    inverse.images()
}

/// Scalar series of the unit coefficient at `z^0` in one contact component.
pub fn contact_series(geometry: &PairGeometry, s: &RelativeSeries, contact: i64) -> Result<ScalarSeries> {
    let ring = RelativeRing::new(geometry);
    let mut out = ScalarSeries::zero(s.policy().clone());
    for (beta, x) in s.terms() {
        if let Some(a) = x.component(contact) {
            let class = ring.visible_class(contact, &a.coefficient(0)?);
            let alg = if contact == 0 { &geometry.ambient } else { &geometry.divisor };
            out.add_term(&Scalars, beta.clone(), alg.unit_coefficient(&class));
        }
    }
    Ok(out)
}

/// `[1]_n` times a rational, as a relative element.
pub fn unit_component(geometry: &PairGeometry, contact: i64, c: &Rational) -> RelativeElement {
    RelativeElement::single(
        contact,
        crate::series::ZLaurentElement::constant(geometry.ambient.one().scale(c)),
    )
}
