use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use relmirror::catalog::{InvariantTable, TauDSource};
use relmirror::pipeline::*;
use relmirror::rational::{factorial, rat, ratio, Rational};
use relmirror::{builtin, projective_space, CoefficientRing, Error, ScalarSeries, Scalars, TruncationPolicy};

fn frac(n: BigInt, d: BigInt) -> Rational {
    Rational::new(n, d)
}

/// `(m d - 1)! / (d!)^(n+1)`.
fn hypersurface_g(m: u64, n: u32, d: u64) -> Rational {
    frac(factorial(m * d - 1), factorial(d).pow(n + 1))
}

/// Complete homogeneous symmetric polynomial `h_j(1, 1/2, ..., 1/c)`.
fn complete_homogeneous(j: usize, c: i64) -> Rational {
    let mut h = vec![Rational::zero(); j + 1];
    h[0] = rat(1);
    for a in 1..=c {
        let x = ratio(1, a);
        for k in 1..=j {
            let prev = h[k - 1].clone();
            h[k] += &x * prev;
        }
    }
    h[j].clone()
}

#[test]
fn hypergeometric_factor_matches_symmetric_functions() {
    let p3 = projective_space(3);
    let h = p3.class("H").unwrap();
    for c in 1..=6i64 {
        let f = hypergeometric_factor(&p3, &h, c).unwrap();
        let lead = frac(BigInt::from(1), factorial(c as u64));
        let mut power = p3.one();
        for j in 0..=3usize {
            let sign = if j % 2 == 0 { rat(1) } else { rat(-1) };
            let want = power.scale(&(sign * &lead * complete_homogeneous(j, c)));
            assert_eq!(f.coefficient(-c - j as i64).unwrap(), want, "c={c} j={j}");
            power = p3.multiply(&power, &h).unwrap();
        }
        assert!(f.coefficient(-c - 4).unwrap().is_zero());
    }
    for c in 1..=4i64 {
        let f = hypergeometric_factor(&p3, &h, -c).unwrap();
        let mut top = h.clone();
        for a in 1..c {
            top = top.scale(&rat(-a));
        }
        assert_eq!(f.coefficient(c - 1).unwrap(), top);
        assert!(f.coefficient(c).unwrap().is_zero());
    }
}

#[test]
fn projective_j_leading_coefficients() {
    let p2 = projective_space(2);
    let h = p2.class("H").unwrap();
    let j = projective_j(&p2, &h, 2, &TruncationPolicy::uniform(1, 4)).unwrap();
    for d in 0..=4u64 {
        let c = j.coefficient(&[d as u32]).unwrap();
        let want = frac(BigInt::from(1), factorial(d).pow(3));
        assert_eq!(c.coefficient(1 - 3 * d as i64).unwrap(), p2.one().scale(&want), "d={d}");
    }
}

#[test]
fn hypersurface_mirror_maps() {
    for (name, m, n, dmax) in [("p3_quartic", 4u64, 3u32, 5u64), ("p2_cubic", 3, 2, 6)] {
        let g = builtin(name).unwrap().with_order((m * dmax) as u32);
        let data = mirror_data(&g).unwrap();
        assert!(data.normalized.i1_is_one, "{name}");
        check_string_shape(&g, &data.normalized).unwrap();
        for d in 1..=dmax {
            assert_eq!(data.extraction.g.coeff1(d as u32), hypersurface_g(m, n, d), "{name} d={d}");
            let contact = -((m * d) as i64);
            assert_eq!(unit_entry(&g, &data.i.body, &[d as u32], contact, 0).unwrap(), hypersurface_g(m, n, d));
        }
        assert!(data.extraction.contact_minus_one.is_empty());
    }
}

#[test]
fn blowup_i1_matches_closed_form() {
    let g = builtin("blp3_k3").unwrap();
    let data = mirror_data(&g).unwrap();
    let ring = RelativeRing::new(&g);
    let order = g.policy.max_weight;
    for d1 in 0..=order {
        for d0 in 0..=order - d1 {
            let x = data.normalized.i1.coefficient(&[d1, d0]);
            if d0 > d1 {
                assert!(x.is_none(), "({d1},{d0})");
                continue;
            }
            let want = frac(factorial((4 * d1 + d0) as u64), factorial(d1 as u64).pow(4) * factorial(d0 as u64));
            let x = x.unwrap();
            assert_eq!(x.contacts().collect::<Vec<_>>(), vec![(d1 - d0) as i64]);
            let n = (d1 - d0) as i64;
            let c = ring.visible_class(n, &x.component(n).unwrap().coefficient(0).unwrap());
            let alg = if n == 0 { &g.ambient } else { &g.divisor };
            assert_eq!(c, alg.one().scale(&want), "({d1},{d0})");
        }
    }
    check_string_shape(&g, &data.normalized).unwrap();
}

#[test]
fn calabi_yau_divisors_have_trivial_tau() {
    for name in relmirror::catalog::BUILTIN_NAMES {
        let g = builtin(name).unwrap();
        assert!(is_trivial(&tau_d(&g).unwrap(), &g), "{name}");
    }
}

#[test]
fn divisor_invariants_drive_tau() {
    let base = builtin("p3_quartic").unwrap();
    let mut g = base.clone();
    g.m_vector = vec![-1];
    g.tau_d_source = TauDSource::FromDivisorInvariants;
    assert!(matches!(tau_d(&g), Err(Error::MissingSource(_))));
    for d in 2..=3u32 {
        for a in 0..=(d - 2) {
            let c = ratio(3, 2);
            let csv = format!("kind,class,psi_power,insertion,value\nD,{d},{a},pt,3/2\n");
            let g = g.with_invariants(InvariantTable::from_csv(&csv).unwrap()).unwrap();
            let tau = tau_d(&g).unwrap();
            let (k, v) = single_invariant_prediction(&c, d as i64, a);
            let x = tau.coefficient(&[d]).unwrap();
            assert_eq!(x.coefficient(k).unwrap(), g.divisor_class.scale(&v), "d={d} a={a}");
            assert_eq!(x.top(), Some(k));
            assert_eq!(tau.len(), 1);
        }
    }
}

#[test]
fn extended_i_adds_contact_columns() {
    let g = builtin("p3_quartic").unwrap();
    let tau = tau_d(&g).unwrap();
    let rel = relative_i(&g, &tau).unwrap();
    let ext = extended_i(&g, &tau).unwrap();
    assert!(ext.extended && !rel.extended);
    assert_eq!(ext.prefactor.len(), rel.prefactor.len() + 1);
    for k in 1..=3u32 {
        let want = frac(BigInt::from(1), factorial(k as u64));
        assert_eq!(unit_entry(&g, &ext.body, &[0, k], k as i64, 1 - k as i64).unwrap(), want);
    }
    for (e, x) in rel.body.terms() {
        let mut e = e.clone();
        e.push(0);
        assert_eq!(ext.body.coefficient(&e), Some(x));
    }
}

#[test]
fn closed_form_needs_toric_data() {
    let g = builtin("blp3_k3").unwrap();
    let tau = tau_d(&g).unwrap();
    assert_eq!(relative_i(&g, &tau).unwrap().body, closed_form_i(&g).unwrap().body);
    let g = builtin("p3_quartic").unwrap();
    assert!(matches!(closed_form_i(&g), Err(Error::MissingSource(_))));
}

#[test]
fn local_model_is_a_ring() {
    let g = builtin("p2_cubic").unwrap();
    let m = LocalModel::new(&g).unwrap();
    let h0 = m.h0();
    let c1n = m.lift(&g.normal_class().unwrap());
    assert_eq!(m.algebra.multiply(&h0, &h0).unwrap(), m.algebra.multiply(&c1n, &h0).unwrap());
    let x = m.algebra.multiply(&m.lift(&g.divisor.class("pt").unwrap()), &h0).unwrap();
    assert_eq!(m.split_h0(&x), Some(g.divisor.class("pt").unwrap()));
    assert_eq!(m.split_h0(&m.algebra.one()), None);
}

#[test]
fn unit_component_round_trip() {
    let g = builtin("p3_quartic").unwrap();
    let ring = RelativeRing::new(&g);
    for n in [-3i64, 0, 2] {
        let x = unit_component(&g, n, &rat(5));
        assert_eq!(x.contacts().collect::<Vec<_>>(), vec![n]);
        assert_eq!(ring.as_scalar(&x), if n == 0 { Some(rat(5)) } else { None });
    }
}

fn g_series() -> impl Strategy<Value = (ScalarSeries, i64)> {
    (prop::collection::vec((-6i64..=6, 1i64..=4), 1..5), 1i64..=4).prop_map(|(cs, m)| {
        let mut coeffs = vec![rat(0)];
        coeffs.extend(cs.into_iter().map(|(n, d)| ratio(n, d)));
        (ScalarSeries::from_coeffs(&coeffs, TruncationPolicy::uniform(1, 5)), m)
    })
}

proptest! {
    #[test]
    fn mirror_inversion_round_trip((g, m) in g_series()) {
        let change = MirrorChange::new(g, vec![m], Direction::Forward).unwrap();
        let q_of_y = change.images().unwrap();
        let y_of_q = invert_mirror_map(&change).unwrap();
        let id = ScalarSeries::variable(&Scalars, 0, TruncationPolicy::uniform(1, 5));
        prop_assert_eq!(q_of_y[0].substitute(&Scalars, &y_of_q).unwrap(), id.clone());
        prop_assert_eq!(y_of_q[0].substitute(&Scalars, &q_of_y).unwrap(), id);
    }
}
