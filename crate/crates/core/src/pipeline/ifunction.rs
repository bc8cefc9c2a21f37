use num_traits::One;

use super::relative::{RelativeElement, RelativeRing};
use crate::algebra::{AlgebraElement, GradedAlgebra};
use crate::catalog::{InvariantKind, JSource, PairGeometry, POINT, POINT_TAU_D};
use crate::error::{Error, Result};
use crate::rational::{factorial_q, rat, Rational};
use crate::series::{
    linear_factor, nilpotent_reciprocal, pairing, CoefficientRing, Exponent, NovikovSeries, TruncationPolicy,
    ZLaurentElement, ZLaurentRing,
};

/// Novikov series with relative-state-space coefficients.
pub type RelativeSeries = NovikovSeries<RelativeElement>;

/// Novikov series with z-Laurent coefficients in the ambient algebra.
pub type AmbientSeries = NovikovSeries<ZLaurentElement>;

/// An I-function `exp(sum_i p_i log y_i / z) * body`. The exponential
/// prefactor is kept symbolic; `body` carries all Novikov dependence.
#[derive(Clone, Debug)]
pub struct IFunction {
    pub prefactor: Vec<AlgebraElement>,
    pub body: RelativeSeries,
    /// Whether the last Novikov variable is the extension variable `x_1`.
    pub extended: bool,
}

impl IFunction {
    /// `[body]_{z^k}`, as a series whose coefficients are pure `z^0` elements.
    pub fn z_coefficient(&self, geometry: &PairGeometry, k: i64) -> Result<RelativeSeries> {
        z_coefficient(geometry, &self.body, k)
    }
}

pub(crate) fn z_coefficient(geometry: &PairGeometry, body: &RelativeSeries, k: i64) -> Result<RelativeSeries> {
    let ring = RelativeRing::new(geometry);
    let mut out = RelativeSeries::zero(body.policy().clone());
    for (e, x) in body.terms() {
        let mut el = RelativeElement::zero();
        for (n, a) in x.components() {
            let c = a.coefficient(k)?;
            el = ring.add(&el, &RelativeElement::single(*n, ZLaurentElement::constant(c)));
        }
        out.add_term(&ring, e.clone(), el);
    }
    Ok(out)
}

/// `prod_{a <= 0}(u + az) / prod_{a <= c}(u + az)`: `1 / prod_{a=1}^c (u + az)`
/// for `c > 0` and `prod_{c < a <= 0}(u + az)` for `c < 0`.
pub fn hypergeometric_factor(algebra: &GradedAlgebra, u: &AlgebraElement, c: i64) -> Result<ZLaurentElement> {
    let mut out = ZLaurentElement::constant(algebra.one());
    if c > 0 {
        for a in 1..=c {
            out = out.mul(algebra, &nilpotent_reciprocal(algebra, u, a)?);
        }
    } else {
        for a in (c + 1)..=0 {
            out = out.mul(algebra, &linear_factor(algebra, u, &rat(a)));
        }
    }
    Ok(out)
}

/// The relative modification `prod_{a <= c}(D + az) / prod_{a <= 0}(D + az)`.
/// For `c < 0` the `a = 0` factor `1/D` cannot be expanded; it is returned
/// as `true` in the second slot and must cancel against the J-coefficient.
pub fn relative_modification(
    algebra: &GradedAlgebra,
    d: &AlgebraElement,
    c: i64,
) -> Result<(ZLaurentElement, bool)> {
    let mut out = ZLaurentElement::constant(algebra.one());
    if c >= 0 {
        for a in 1..=c {
            out = out.mul(algebra, &linear_factor(algebra, d, &rat(a)));
        }
        Ok((out, false))
    } else {
        for a in (c + 1)..0 {
            out = out.mul(algebra, &nilpotent_reciprocal(algebra, d, a)?);
        }
        Ok((out, true))
    }
}

/// Divides every coefficient by `d`; fails if some coefficient is not a multiple.
fn cancel_divisor(algebra: &GradedAlgebra, x: &ZLaurentElement, d: &AlgebraElement) -> Result<ZLaurentElement> {
    let mut terms = Vec::new();
    for (k, a) in x.terms() {
        let q = algebra.divide(a, d).ok_or_else(|| Error::Cancellation {
            class: algebra.display(a),
        })?;
        terms.push((*k, q));
    }
    Ok(ZLaurentElement::from_terms(algebra.dim(), terms).with_validity(x.valid_from()))
}

/// Closed-form J-function body of projective space,
/// `z sum_d y^d / prod_{k=1}^d (H + kz)^(n+1)`.
pub fn projective_j(algebra: &GradedAlgebra, hyperplane: &AlgebraElement, n: u32, policy: &TruncationPolicy) -> Result<AmbientSeries> {
    let zr = ZLaurentRing::new(algebra, policy.z_min);
    let mut out = AmbientSeries::zero(policy.clone());
    let mut term = ZLaurentElement::monomial(algebra.one(), 1);
    let mut d = 0u32;
    while policy.admits(&[d]) {
        out.add_term(&zr, vec![d], term.clone());
        d += 1;
        let r = nilpotent_reciprocal(algebra, hyperplane, d as i64)?;
        for _ in 0..=n {
            term = term.mul(algebra, &r);
        }
    }
    Ok(out)
}

/// J-function body of X with the mirror map in D imposed.
pub fn j_function(geometry: &PairGeometry, tau_d: &AmbientSeries) -> Result<AmbientSeries> {
    let algebra = &geometry.ambient;
    let zr = ZLaurentRing::new(algebra, geometry.policy.z_min);
    let deformed = !tau_d.is_zero_in(&zr);
    match &geometry.j_source {
        JSource::ClosedFormProjective { dim, hyperplane } => {
            if deformed {
                return Err(Error::ExternalDataRequired(format!(
                    "closed-form J of `{}` has no insertions of the mirror map in D; supply `{POINT_TAU_D}` rows",
                    geometry.name
                )));
            }
            projective_j(algebra, hyperplane, *dim, &geometry.policy)
        }
        JSource::InvariantTable => {
            let table = geometry.invariants()?;
            let mut out = AmbientSeries::zero(geometry.policy.clone());
            out.add_term(&zr, vec![0; geometry.nvars()], ZLaurentElement::monomial(algebra.one(), 1));
            let mut insertions = vec![POINT];
            if deformed {
                if !table.has_rows(InvariantKind::X, POINT_TAU_D) {
                    return Err(Error::ExternalDataRequired(format!(
                        "geometry `{}` needs X rows with insertion `{POINT_TAU_D}`",
                        geometry.name
                    )));
                }
                insertions.push(POINT_TAU_D);
                out = out.add(&zr, tau_d)?;
            }
            for ins in insertions {
                for (class, a, v) in table.rows(InvariantKind::X, ins) {
                    let z = ZLaurentElement::monomial(algebra.one().scale(v), -(a as i64) - 1);
                    out.add_term(&zr, class.to_vec(), z.truncate_below(geometry.policy.z_min));
                }
            }
            Ok(out)
        }
        JSource::ToricHypergeometric => Err(Error::Unsupported(
            "toric geometries provide an I-function directly, not a J-function".into(),
        )),
    }
}

/// Per-class terms `T_beta(z)` before the contact-order bookkeeping: the
/// J-coefficient times the relative modification (J-function route), or the
/// toric hypergeometric term with the relative divisor's factor cancelled.
fn base_terms(geometry: &PairGeometry, tau_d: &AmbientSeries) -> Result<Vec<(Exponent, ZLaurentElement)>> {
    let algebra = &geometry.ambient;
    let mut out = Vec::new();
    if let JSource::ToricHypergeometric = geometry.j_source {
        let toric = geometry.toric.as_ref().ok_or_else(|| {
            Error::MissingSource(format!("geometry `{}` has no toric data", geometry.name))
        })?;
        for beta in geometry.policy.exponents() {
            let mut term = ZLaurentElement::monomial(algebra.one(), 1);
            for div in &toric.divisors {
                let f = hypergeometric_factor(algebra, &div.class, pairing(&div.pairing, &beta))?;
                term = term.mul(algebra, &f);
            }
            for bundle in &toric.bundles {
                let lb = pairing(&bundle.pairing, &beta);
                if lb < 0 {
                    return Err(Error::Unsupported(format!(
                        "bundle `{}` has negative degree {lb} on {beta:?}",
                        bundle.label
                    )));
                }
                for k in 1..=lb {
                    term = term.mul(algebra, &linear_factor(algebra, &bundle.class, &rat(k)));
                }
            }
            if !(term.is_zero() && term.is_exact()) {
                out.push((beta, term));
            }
        }
        return Ok(out);
    }
    let j = j_function(geometry, tau_d)?;
    for (beta, jb) in j.terms() {
        let c = geometry.degree(beta);
        let (modif, divide) = relative_modification(algebra, &geometry.divisor_class, c)?;
        let jb = if divide {
            cancel_divisor(algebra, jb, &geometry.divisor_class)?
        } else {
            jb.clone()
        };
        out.push((beta.clone(), jb.mul(algebra, &modif)));
    }
    Ok(out)
}

fn assemble(geometry: &PairGeometry, base: Vec<(Exponent, ZLaurentElement)>, extended: bool) -> Result<IFunction> {
    let algebra = &geometry.ambient;
    let z_min = geometry.policy.z_min;
    let d = &geometry.divisor_class;
    let policy = if extended {
        geometry.policy.extended(geometry.policy.min_weight())
    } else {
        geometry.policy.clone()
    };
    let ext_geometry;
    let geom = if extended {
        ext_geometry = PairGeometry {
            policy: policy.clone(),
            ..geometry.clone()
        };
        &ext_geometry
    } else {
        geometry
    };
    let ring = RelativeRing::new(geom);
    let mut body = RelativeSeries::zero(policy.clone());
    let kmax = if extended { policy.max_weight / policy.min_weight() } else { 0 };
    for (beta, t) in base {
        let c = geometry.degree(&beta);
        for k in 0..=kmax as i64 {
            let mut e = beta.clone();
            if extended {
                e.push(k as u32);
            }
            if !policy.admits(&e) {
                break;
            }
            let mut term = t.shift(-k).scale(&factorial_q(k as u64).recip());
            if c > k {
                term = term.mul(algebra, &nilpotent_reciprocal(algebra, d, c - k)?);
            }
            let el = RelativeElement::single(k - c, term.truncate_below(z_min));
            body.add_term(&ring, e, el);
        }
    }
    let mut prefactor = geometry.prefactor.clone();
    if extended {
        prefactor.push(algebra.zero());
    }
    Ok(IFunction {
        prefactor,
        body,
        extended,
    })
}

/// Hypergeometric I-function of a toric pair.
pub fn closed_form_i(geometry: &PairGeometry) -> Result<IFunction> {
    if geometry.toric.is_none() {
        return Err(Error::MissingSource(format!("geometry `{}` has no toric data", geometry.name)));
    }
    let zero = AmbientSeries::zero(geometry.policy.clone());
    let toric_only = PairGeometry {
        j_source: JSource::ToricHypergeometric,
        ..geometry.clone()
    };
    assemble(geometry, base_terms(&toric_only, &zero)?, false)
}

/// Relative I-function
/// `sum_beta J_beta(tau_D) y^beta prod_{a<=D.beta}(D+az)/prod_{a<=0}(D+az) [1/(D + (D.beta) z)] [1]_{-D.beta}`.
pub fn relative_i(geometry: &PairGeometry, tau_d: &AmbientSeries) -> Result<IFunction> {
    assemble(geometry, base_terms(geometry, tau_d)?, false)
}

/// `{1}`-extended I-function: an extra variable `x_1` (last coordinate) with
/// terms `x_1^k / (z^k k!)`, contact `-D.beta + k` and the factor
/// `1/(D + (D.beta - k) z)` when `D.beta > k`.
pub fn extended_i(geometry: &PairGeometry, tau_d: &AmbientSeries) -> Result<IFunction> {
    assemble(geometry, base_terms(geometry, tau_d)?, true)
}

/// The unit coefficient of `[body]_{z^k}` in contact `n` at `beta`.
pub fn unit_entry(geometry: &PairGeometry, body: &RelativeSeries, beta: &[u32], n: i64, k: i64) -> Result<Rational> {
    let ring = RelativeRing::new(geometry);
    let Some(x) = body.coefficient(beta) else {
        return Ok(Rational::from_integer(0.into()));
    };
    let Some(a) = x.component(n) else {
        return Ok(Rational::from_integer(0.into()));
    };
    let c = ring.visible_class(n, &a.coefficient(k)?);
    let alg = if n == 0 { &geometry.ambient } else { &geometry.divisor };
    Ok(alg.unit_coefficient(&c))
}

/// Whether the unit class is the whole `z^0`-free constant, i.e. the element is `1`.
pub fn is_unit(x: &RelativeElement, ring: &RelativeRing<'_>) -> bool {
    ring.as_scalar(x).is_some_and(|c| c.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::projective_space;
    use crate::catalog::builtin;
    use crate::rational::factorial;

    fn dual() -> GradedAlgebra {
        GradedAlgebra::new("dual", vec!["1".into(), "u".into()], vec![0, 1], 0, Some(1), &[]).unwrap()
    }

    #[test]
    fn hypergeometric_small_cases() {
        let a = dual();
        let u = a.basis(1);
        assert_eq!(hypergeometric_factor(&a, &u, 0).unwrap(), ZLaurentElement::constant(a.one()));
        assert_eq!(hypergeometric_factor(&a, &u, -1).unwrap(), ZLaurentElement::constant(u.clone()));
        let want = ZLaurentElement::from_terms(2, [(-1, a.one()), (-2, -&u)]);
        assert_eq!(hypergeometric_factor(&a, &u, 1).unwrap(), want);
    }

    #[test]
    fn hypergeometric_multiply_back() {
        let p3 = projective_space(3);
        for label in ["H", "H2"] {
            let u = p3.class(label).unwrap();
            for c in 1..=6i64 {
                let mut prod = hypergeometric_factor(&p3, &u, c).unwrap();
                for a in 1..=c {
                    prod = prod.mul(&p3, &linear_factor(&p3, &u, &rat(a)));
                }
                assert_eq!(prod, ZLaurentElement::constant(p3.one()), "{label} c={c}");
            }
        }
    }

    fn unit0(g: &PairGeometry, i: &IFunction, beta: &[u32], n: i64, k: i64) -> Rational {
        unit_entry(g, &i.body, beta, n, k).unwrap()
    }

    #[test]
    fn quartic_relative_coefficients() {
        let g = builtin("p3_quartic").unwrap();
        let zero = AmbientSeries::zero(g.policy.clone());
        let i = relative_i(&g, &zero).unwrap();
        assert_eq!(unit0(&g, &i, &[0], 0, 1), rat(1));
        for d in 1..=3u64 {
            // (4d - 1)! / (d!)^4
            let want = Rational::new(factorial(4 * d - 1), factorial(d).pow(4));
            assert_eq!(unit0(&g, &i, &[d as u32], -4 * d as i64, 0), want);
        }
        assert_eq!(unit0(&g, &i, &[1], -4, 0), rat(6));
        assert_eq!(unit0(&g, &i, &[2], -8, 0), rat(315));
    }

    #[test]
    fn blp3_i1_coefficients() {
        let g = builtin("blp3_k3").unwrap();
        let i = closed_form_i(&g).unwrap();
        let expected = [
            ([0u32, 0u32], 0i64, 1i64),
            ([1, 0], 1, 24),
            ([1, 1], 0, 120),
            ([2, 0], 2, 2520),
            ([2, 1], 1, 22680),
            ([2, 2], 0, 113400),
        ];
        for (beta, n, v) in expected {
            assert_eq!(unit0(&g, &i, &beta, n, 1), rat(v), "{beta:?}");
        }
        assert_eq!(unit0(&g, &i, &[0, 1], -1, 0), rat(1));
    }

    #[test]
    fn extended_columns() {
        let g = builtin("p3_quartic").unwrap();
        let zero = AmbientSeries::zero(g.policy.clone());
        let rel = relative_i(&g, &zero).unwrap();
        let ext = extended_i(&g, &zero).unwrap();
        for (e, x) in rel.body.terms() {
            let mut e2 = e.clone();
            e2.push(0);
            assert_eq!(ext.body.coefficient(&e2), Some(x));
        }
        assert_eq!(unit_entry(&g, &ext.body, &[0, 1], 1, 0).unwrap(), rat(1));
        assert_eq!(unit_entry(&g, &ext.body, &[0, 2], 2, -1).unwrap(), Rational::new(1.into(), 2.into()));
    }
}
