use std::collections::BTreeMap;

use crate::algebra::{AlgebraElement, GradedAlgebra};
use crate::catalog::PairGeometry;
use crate::rational::Rational;
use crate::series::{CoefficientRing, ZLaurentElement, ZLaurentRing};

/// Element of the relative state space: contact order `n` maps to a
/// z-Laurent coefficient. Classes are stored as ambient lifts; for `n != 0`
/// only their restriction to D is meaningful.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativeElement {
    components: BTreeMap<i64, ZLaurentElement>,
}

impl RelativeElement {
    pub fn zero() -> Self {
        Self {
            components: BTreeMap::new(),
        }
    }

    /// `[a]_n`.
    pub fn single(contact: i64, a: ZLaurentElement) -> Self {
        let mut components = BTreeMap::new();
        components.insert(contact, a);
        Self { components }
    }

    pub fn components(&self) -> &BTreeMap<i64, ZLaurentElement> {
        &self.components
    }

    pub fn component(&self, contact: i64) -> Option<&ZLaurentElement> {
        self.components.get(&contact)
    }

    pub fn contacts(&self) -> impl Iterator<Item = i64> + '_ {
        self.components.keys().copied()
    }

    /// Applies `f` to every z-Laurent coefficient.
    pub fn map(&self, f: impl Fn(i64, &ZLaurentElement) -> ZLaurentElement) -> Self {
        Self {
            components: self.components.iter().map(|(n, a)| (*n, f(*n, a))).collect(),
        }
    }
}

/// Ring structure on [`RelativeElement`]s of a fixed pair.
///
/// `[a]_i * [b]_j = [a b]_{i+j}`, times `D` when one contact is negative and
/// `i + j > 0`. With a right factor `[1]_j`, `j >= 0`, this reproduces the
/// known product rule for the relative state space; for two non-negative
/// contacts it is the plain cup product.
#[derive(Clone, Copy, Debug)]
pub struct RelativeRing<'a> {
    pub geometry: &'a PairGeometry,
    pub z_min: i64,
}

impl<'a> RelativeRing<'a> {
    pub fn new(geometry: &'a PairGeometry) -> Self {
        Self {
            geometry,
            z_min: geometry.policy.z_min,
        }
    }

    fn zring(&self) -> ZLaurentRing<'a> {
        ZLaurentRing::new(&self.geometry.ambient, self.z_min)
    }

    fn ambient(&self) -> &'a GradedAlgebra {
        &self.geometry.ambient
    }

    /// The class as seen in the state space: restricted to D for `n != 0`.
    pub fn visible(&self, contact: i64, a: &ZLaurentElement) -> ZLaurentElement {
        if contact == 0 {
            a.clone()
        } else {
            let r = &self.geometry.restriction;
            a.map_classes(self.geometry.divisor.dim(), |c| {
                r.apply(c).expect("ambient classes conform to the restriction map")
            })
        }
    }

    /// `visible` applied to a single algebra class.
    pub fn visible_class(&self, contact: i64, a: &AlgebraElement) -> AlgebraElement {
        if contact == 0 {
            a.clone()
        } else {
            self.geometry
                .restriction
                .apply(a)
                .expect("ambient classes conform to the restriction map")
        }
    }

    fn vanishes(&self, contact: i64, a: &ZLaurentElement) -> bool {
        self.visible(contact, a).is_zero()
    }

    fn insert(&self, out: &mut RelativeElement, contact: i64, a: ZLaurentElement) {
        let sum = match out.components.remove(&contact) {
            Some(old) => old.add(&a),
            None => a,
        };
        if !(self.vanishes(contact, &sum) && sum.is_exact()) {
            out.components.insert(contact, sum);
        }
    }

    /// Algebra part of a component, restricted when the contact is nonzero.
    pub fn display(&self, x: &RelativeElement) -> String {
        if x.components.is_empty() {
            return "0".into();
        }
        x.components
            .iter()
            .map(|(n, a)| {
                let alg = if *n == 0 { self.ambient() } else { &self.geometry.divisor };
                format!("[{}]_{n}", self.visible(*n, a).display(alg))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl CoefficientRing for RelativeRing<'_> {
    type Elem = RelativeElement;

    fn zero(&self) -> RelativeElement {
        RelativeElement::zero()
    }

    fn one(&self) -> RelativeElement {
        RelativeElement::single(0, ZLaurentElement::constant(self.ambient().one()))
    }

    fn add(&self, a: &RelativeElement, b: &RelativeElement) -> RelativeElement {
        let mut out = a.clone();
        for (n, x) in &b.components {
            self.insert(&mut out, *n, x.clone());
        }
        out
    }

    fn neg(&self, a: &RelativeElement) -> RelativeElement {
        a.map(|_, x| x.neg())
    }

    fn mul(&self, a: &RelativeElement, b: &RelativeElement) -> RelativeElement {
        let zr = self.zring();
        let d = ZLaurentElement::constant(self.geometry.divisor_class.clone());
        let mut out = RelativeElement::zero();
        for (i, x) in &a.components {
            for (j, y) in &b.components {
                let s = i + j;
                let mut p = zr.mul(x, y);
                if (*i < 0 || *j < 0) && s > 0 {
                    p = zr.mul(&p, &d);
                }
                self.insert(&mut out, s, p);
            }
        }
        out
    }

    fn scale(&self, a: &RelativeElement, r: &Rational) -> RelativeElement {
        let mut out = RelativeElement::zero();
        for (n, x) in &a.components {
            self.insert(&mut out, *n, x.scale(r));
        }
        out
    }

    fn is_zero(&self, a: &RelativeElement) -> bool {
        a.components
            .iter()
            .all(|(n, x)| self.vanishes(*n, x) && x.is_exact())
    }

    fn as_scalar(&self, a: &RelativeElement) -> Option<Rational> {
        if a.components.keys().any(|&n| n != 0) {
            return None;
        }
        match a.components.get(&0) {
            Some(x) => self.zring().as_scalar(x),
            None => Some(Rational::from_integer(0.into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::rational::rat;

    #[test]
    fn product_rule_cases() {
        let g = builtin("p3_quartic").unwrap();
        let ring = RelativeRing::new(&g);
        let a = &g.ambient;
        let h = ZLaurentElement::constant(a.class("H").unwrap());
        let one = ZLaurentElement::constant(a.one());
        // [H]_{-1} * [1]_2 = [H D]_1
        let p = ring.mul(&RelativeElement::single(-1, h.clone()), &RelativeElement::single(2, one.clone()));
        let hd = a.multiply(&a.class("H").unwrap(), &g.divisor_class).unwrap();
        assert_eq!(p, RelativeElement::single(1, ZLaurentElement::constant(hd)));
        // [H]_{-2} * [1]_1 = [H]_{-1}
        let p = ring.mul(&RelativeElement::single(-2, h.clone()), &RelativeElement::single(1, one.clone()));
        assert_eq!(p, RelativeElement::single(-1, h.clone()));
        // [H]_1 * [1]_2 = [H]_3
        let p = ring.mul(&RelativeElement::single(1, h.clone()), &RelativeElement::single(2, one));
        assert_eq!(p, RelativeElement::single(3, h));
    }

    #[test]
    fn nonzero_contacts_compare_after_restriction() {
        let g = builtin("p3_quartic").unwrap();
        let ring = RelativeRing::new(&g);
        let h3 = ZLaurentElement::constant(g.ambient.class("H3").unwrap());
        assert!(ring.is_zero(&RelativeElement::single(-4, h3.clone())));
        assert!(!ring.is_zero(&RelativeElement::single(0, h3)));
        let two = ring.scale(&ring.one(), &rat(2));
        assert_eq!(ring.as_scalar(&two), Some(rat(2)));
    }
}
