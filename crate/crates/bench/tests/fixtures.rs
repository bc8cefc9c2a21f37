use relmirror::periods::complete_degree;
use relmirror::pipeline::mirror_data;
use relmirror_bench::{fixture, CASES, PERIOD_CASES};

#[test]
fn fixtures_load_with_requested_order() {
    for (name, order) in CASES {
        let g = fixture(name, order).unwrap();
        assert_eq!(g.policy.max_weight, order, "{name}");
        assert!(mirror_data(&g).is_ok(), "{name}");
    }
    assert!(fixture("unknown", 4).is_err());
}

#[test]
fn period_fixtures_have_positive_m() {
    for (name, order) in PERIOD_CASES {
        let g = fixture(name, order).unwrap();
        assert!(complete_degree(&g.policy, &g.m_vector).unwrap() >= order as u64);
    }
}
