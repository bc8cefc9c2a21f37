use std::sync::OnceLock;

use proptest::prelude::*;
use relmirror::rational::{rat, Rational};
use relmirror::{builtin, projective_space, AlgebraElement, GradedAlgebra, PairGeometry};

fn blowup() -> &'static PairGeometry {
    static G: OnceLock<PairGeometry> = OnceLock::new();
    G.get_or_init(|| builtin("blp3_k3").unwrap())
}

/// `int_{Bl_pt P^4} (h - E)^a h^b` from the blow-up rules: `h^4 = 1`,
/// `E^4 = -1`, mixed monomials `h^i E^j` with `i, j > 0` vanish.
fn blowup_integral(a: u32, b: u32) -> Rational {
    assert_eq!(a + b, 4);
    let mut total = Rational::from_integer(0.into());
    for j in 0..=a {
        let binom = relmirror::rational::binomial(a as u64, j as u64);
        let sign = if j % 2 == 0 { rat(1) } else { rat(-1) };
        let term = match (j, a - j + b) {
            (0, 4) => rat(1),
            (4, 0) => rat(-1),
            _ => rat(0),
        };
        total += Rational::from_integer(binom) * sign * term;
    }
    total
}

fn monomial(alg: &GradedAlgebra, a: u32, b: u32) -> AlgebraElement {
    let h_big = alg.class("H").unwrap();
    let h = alg.class("h").unwrap();
    let x = alg.power(&h_big, a).unwrap();
    alg.multiply(&x, &alg.power(&h, b).unwrap()).unwrap()
}

#[test]
fn blowup_intersection_numbers_match_oracle() {
    let g = builtin("blp3_k3").unwrap();
    let alg = &g.ambient;
    for a in 0..=4 {
        let v = alg.integrate(&monomial(alg, a, 4 - a)).unwrap();
        assert_eq!(v, blowup_integral(a, 4 - a), "H^{a} h^{}", 4 - a);
    }
    assert_eq!(alg.multiply(&alg.class("h").unwrap(), &alg.class("h").unwrap()).unwrap(), alg.class("Hh").unwrap());
}

#[test]
fn projective_space_products() {
    let p3 = projective_space(3);
    let h = p3.class("H").unwrap();
    let h2 = p3.class("H2").unwrap();
    assert_eq!(p3.multiply(&h, &h2).unwrap(), p3.class("H3").unwrap());
    assert!(p3.multiply(&h2, &h2).unwrap().is_zero());
    assert_eq!(p3.integrate(&p3.class("H3").unwrap()).unwrap(), rat(1));
    assert_eq!(p3.integrate(&h).unwrap(), rat(0));
}

#[test]
fn conformance_and_missing_point() {
    let p3 = projective_space(3);
    let p2 = projective_space(2);
    assert!(p3.multiply(&p3.one(), &p2.one()).is_err());
    let no_point = GradedAlgebra::new("dual", vec!["1".into(), "u".into()], vec![0, 1], 0, None, &[]).unwrap();
    assert!(no_point.integrate(&no_point.one()).is_err());
}

#[test]
fn restrictions() {
    let g = builtin("p3_quartic").unwrap();
    let r = &g.restriction;
    assert_eq!(r.apply(&g.ambient.one()).unwrap(), g.divisor.one());
    let h2 = r.apply(&g.ambient.class("H2").unwrap()).unwrap();
    assert!(g.divisor.multiply(&h2, &h2).unwrap().is_zero());
    let b = builtin("blp3_k3").unwrap();
    let rh = b.restriction.apply(&b.ambient.class("H").unwrap()).unwrap();
    assert_eq!(rh, b.restriction.apply(&b.ambient.class("h").unwrap()).unwrap());
}

#[test]
fn catalog_algebras_are_valid() {
    for name in relmirror::catalog::BUILTIN_NAMES {
        let g = builtin(name).unwrap();
        for alg in [&g.ambient, &g.divisor] {
            alg.validate().unwrap();
            for i in 0..alg.dim() {
                if alg.degree(i) >= 1 {
                    let idx = alg.nilpotency_index(&alg.basis(i)).unwrap();
                    assert!(idx <= alg.top_degree() + 1, "{name} {}", alg.labels()[i]);
                }
            }
        }
        g.restriction.validate(&g.ambient, &g.divisor).unwrap();
    }
}

fn element(dim: usize) -> impl Strategy<Value = AlgebraElement> {
    prop::collection::vec((-6i64..=6, 1i64..=4), dim).prop_map(move |v| {
        let mut out = AlgebraElement::zero(dim);
        for (i, (n, d)) in v.into_iter().enumerate() {
            out = &out + &AlgebraElement::basis(dim, i).scale(&relmirror::rational::ratio(n, d));
        }
        out
    })
}

proptest! {
    #[test]
    fn blowup_ring_axioms(a in element(8), b in element(8), c in element(8)) {
        let alg = &blowup().ambient;
        let ab = alg.multiply(&a, &b).unwrap();
        prop_assert_eq!(&ab, &alg.multiply(&b, &a).unwrap());
        let left = alg.multiply(&ab, &c).unwrap();
        let right = alg.multiply(&a, &alg.multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let dist = alg.multiply(&a, &(&b + &c)).unwrap();
        prop_assert_eq!(dist, &ab + &alg.multiply(&a, &c).unwrap());
    }

    #[test]
    fn restriction_is_multiplicative(a in element(8), b in element(8)) {
        let g = blowup();
        let r = &g.restriction;
        let lhs = r.apply(&g.ambient.multiply(&a, &b).unwrap()).unwrap();
        let rhs = g.divisor.multiply(&r.apply(&a).unwrap(), &r.apply(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
