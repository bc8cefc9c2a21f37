use num_traits::Zero;

use super::ifunction::{hypergeometric_factor, AmbientSeries};
use crate::algebra::{AlgebraElement, GradedAlgebra};
use crate::catalog::{InvariantKind, PairGeometry, TauDSource, POINT};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};
use crate::series::{Exponent, ZLaurentElement, ZLaurentRing};

/// `H*(Y)` for `Y = P(O_D + N_D)`, presented as `H*(D)[h0] / (h0^2 - c_1(N) h0)`
/// with basis `delta_i` followed by `delta_i h0`.
#[derive(Clone, Debug)]
pub struct LocalModel {
    pub algebra: GradedAlgebra,
    divisor_dim: usize,
}

impl LocalModel {
    pub fn new(geometry: &PairGeometry) -> Result<Self> {
        let d = &geometry.divisor;
        let n = d.dim();
        let c1n = geometry.normal_class()?;
        let mut labels: Vec<String> = d.labels().to_vec();
        labels.extend(d.labels().iter().map(|l| if l == "1" { "h0".to_string() } else { format!("{l}*h0") }));
        let mut degrees: Vec<u32> = d.degrees().to_vec();
        degrees.extend(d.degrees().iter().map(|g| g + 1));
        let mut products = Vec::new();
        for i in 0..n {
            for j in i..n {
                let prod = d.multiply(&d.basis(i), &d.basis(j))?;
                let twisted = d.multiply(&prod, &c1n)?;
                for k in 0..n {
                    let c = prod.coefficient(k);
                    if !c.is_zero() {
                        products.push((i, j, k, c.clone()));
                        products.push((i, n + j, n + k, c.clone()));
                        products.push((n + i, j, n + k, c.clone()));
                    }
                    let t = twisted.coefficient(k);
                    if !t.is_zero() {
                        products.push((n + i, n + j, n + k, t.clone()));
                    }
                }
            }
        }
        let point = d.point_index().map(|p| n + p);
        let algebra = GradedAlgebra::new(
            format!("Y({})", d.name()),
            labels,
            degrees,
            d.unit_index(),
            point,
            &products,
        )?;
        Ok(Self {
            algebra,
            divisor_dim: n,
        })
    }

    pub fn h0(&self) -> AlgebraElement {
        self.algebra.basis(self.divisor_dim)
    }

    /// `delta` viewed in `H*(Y)`.
    pub fn lift(&self, delta: &AlgebraElement) -> AlgebraElement {
        let mut out = self.algebra.zero();
        for i in 0..self.divisor_dim {
            out = &out + &self.algebra.basis(i).scale(delta.coefficient(i));
        }
        out
    }

    /// Writes `x = delta h0`; `None` when `x` is not a multiple of `h0`.
    pub fn split_h0(&self, x: &AlgebraElement) -> Option<AlgebraElement> {
        if (0..self.divisor_dim).any(|i| !x.coefficient(i).is_zero()) {
            return None;
        }
        let mut delta = AlgebraElement::zero(self.divisor_dim);
        for i in 0..self.divisor_dim {
            delta = &delta + &AlgebraElement::basis(self.divisor_dim, i).scale(x.coefficient(self.divisor_dim + i));
        }
        Some(delta)
    }
}

/// The `k = c_1(N) . beta` slice of the I-function of `(Y, D_0)`,
/// `J_{D,beta}(z) y^beta prod_{a<=0}(h0+az) / prod_{a<=k}(h0+az) [1]_0`,
/// with values in `H*(Y)`. Other slices take values in `H*(D_0)` and vanish
/// after restriction. `J_D` is read from the `D` point rows of the invariant
/// table; a divisor whose invariants vanish for dimension reasons may omit them.
pub fn i_function_yd0(geometry: &PairGeometry) -> Result<(LocalModel, AmbientSeries)> {
    let model = LocalModel::new(geometry)?;
    let y = &model.algebra;
    let policy = geometry.policy.clone();
    let z_min = policy.z_min;
    let zr = ZLaurentRing::new(y, z_min);
    let mut j_d: Vec<(Exponent, ZLaurentElement)> = vec![(vec![0; geometry.nvars()], ZLaurentElement::monomial(y.one(), 1))];
    match (&geometry.invariants, &geometry.tau_d_source) {
        (Some(table), _) if table.has_rows(InvariantKind::D, POINT) => {
            for (class, a, v) in table.rows(InvariantKind::D, POINT) {
                j_d.push((class.to_vec(), ZLaurentElement::monomial(y.one().scale(v), -(a as i64) - 1)));
            }
        }
        (_, TauDSource::Zero(_)) => {}
        _ => {
            return Err(Error::MissingSource(format!(
                "geometry `{}` needs D point rows for the J-function of the divisor",
                geometry.name
            )))
        }
    }
    let h0 = model.h0();
    let mut out = AmbientSeries::zero(policy.clone());
    for (beta, jb) in j_d {
        if !policy.admits(&beta) {
            continue;
        }
        let k = geometry.degree(&beta);
        let term = jb.mul(y, &hypergeometric_factor(y, &h0, k)?);
        out.add_term(&zr, beta, term.truncate_below(z_min));
    }
    Ok((model, out))
}

/// Mirror map in D, `sum_{k>=0} [I_(Y,D_0) - z]_{z^k} z^k`, with every
/// `delta h0` rewritten as the ambient class `iota_* delta`. Divisors declared
/// with vanishing invariants still go through the computation with `J_D = z`.
pub fn tau_d(geometry: &PairGeometry) -> Result<AmbientSeries> {
    let ambient = &geometry.ambient;
    let mut out = AmbientSeries::zero(geometry.policy.clone());
    let zr = ZLaurentRing::new(ambient, geometry.policy.z_min);
    let (model, local) = i_function_yd0(geometry)?;
    for (beta, x) in local.terms() {
        let mut x = x.part_from(0)?;
        if beta.iter().all(|&b| b == 0) {
            x = x.sub(&ZLaurentElement::monomial(model.algebra.one(), 1));
        }
        let mut terms = Vec::new();
        for (k, c) in x.terms() {
            let delta = model.split_h0(c).ok_or_else(|| {
                Error::Unsupported(format!(
                    "mirror map in D at {beta:?}, z^{k}: class {} is not a multiple of h0",
                    model.algebra.display(c)
                ))
            })?;
            let pushed = geometry.restriction.pushforward(&delta, ambient, &geometry.divisor)?;
            terms.push((*k, pushed));
        }
        out.add_term(&zr, beta.clone(), ZLaurentElement::from_terms(ambient.dim(), terms));
    }
    Ok(out)
}

/// Top z-term of the mirror map in D produced by one divisor invariant
/// `c = <[pt] psi^a>^D_beta`: `c (-1)^(n-1) (n-1)! z^(n-2-a) [D]`, `n = -c_1(N).beta`.
/// Returns the z-exponent and the coefficient of `[D]`.
pub fn single_invariant_prediction(c: &Rational, n: i64, psi_power: u32) -> (i64, Rational) {
    let mut v = c.clone();
    for j in 1..n {
        v *= rat(-j);
    }
    (n - 2 - psi_power as i64, v)
}

/// Whether the series vanishes identically.
pub fn is_trivial(tau: &AmbientSeries, geometry: &PairGeometry) -> bool {
    tau.is_zero_in(&ZLaurentRing::new(&geometry.ambient, geometry.policy.z_min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin, InvariantTable};

    #[test]
    fn calabi_yau_divisors_have_trivial_mirror_map() {
        for name in ["p2_cubic", "p3_quartic"] {
            let g = builtin(name).unwrap();
            assert!(is_trivial(&tau_d(&g).unwrap(), &g), "{name}");
        }
    }

    #[test]
    fn local_algebra_relation() {
        let g = builtin("p3_quartic").unwrap();
        let m = LocalModel::new(&g).unwrap();
        let h0 = m.h0();
        let c1n = m.lift(&g.normal_class().unwrap());
        let lhs = m.algebra.multiply(&h0, &h0).unwrap();
        assert_eq!(lhs, m.algebra.multiply(&c1n, &h0).unwrap());
    }

    #[test]
    fn local_i_function_leading_term() {
        let g = builtin("p3_quartic").unwrap();
        let (m, i) = i_function_yd0(&g).unwrap();
        assert_eq!(i.coefficient(&[0]), Some(&ZLaurentElement::monomial(m.algebra.one(), 1)));
        assert_eq!(i.len(), 1);
    }

    #[test]
    fn single_divisor_invariant_gives_minus_divisor() {
        let g = builtin("p3_quartic").unwrap();
        let mut g = g.clone();
        g.m_vector = vec![-1];
        g.tau_d_source = TauDSource::FromDivisorInvariants;
        let table = InvariantTable::from_csv("kind,class,psi_power,insertion,value\nD,2,0,pt,1\n").unwrap();
        let g = g.with_invariants(table).unwrap();
        let tau = tau_d(&g).unwrap();
        let want = ZLaurentElement::constant(g.divisor_class.scale(&rat(-1)));
        assert_eq!(tau.coefficient(&[2]), Some(&want));
        assert_eq!(tau.len(), 1);
        assert_eq!(single_invariant_prediction(&rat(1), 2, 0), (0, rat(-1)));
    }
}
