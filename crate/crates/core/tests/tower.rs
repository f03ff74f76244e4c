use rk_core::numverify::DoubleDouble;
use rk_core::{build_tower, tower_report, Rational, TowerOptions};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[test]
fn identical_inputs_give_identical_towers() {
    let opts = TowerOptions { mult2_samples: 2, ..Default::default() };
    let a = tower_report(&build_tower::<f64>(&q(2, 1), &q(3, 1), 5, &opts).unwrap());
    let b = tower_report(&build_tower::<f64>(&q(2, 1), &q(3, 1), 5, &opts).unwrap());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn consecutive_levels_are_not_isomorphic_at_one_two() {
    let opts = TowerOptions { mult2_samples: 2, ..Default::default() };
    let r = tower_report(&build_tower::<DoubleDouble>(&q(1, 1), &q(2, 1), 6, &opts).unwrap());
    assert!(r.consecutive_distinct);
    assert!(r.all_verified, "{:?}", r.edges.iter().map(|e| &e.status).collect::<Vec<_>>());
}

#[test]
fn every_sample_point_verifies_at_depth_eight() {
    let opts = TowerOptions { mult2_samples: 2, ..Default::default() };
    for (h, k) in [(q(3, 2), q(5, 1)), (q(1, 1), q(2, 1)), (q(2, 1), q(3, 1)), (q(5, 1), q(7, 1)), (q(1, 1), q(1, 2))] {
        let t = build_tower::<f64>(&h, &k, 8, &opts).unwrap();
        for e in &t.edges {
            assert!(e.status.verified, "({h}, {k}) edge {}: {:?}", e.source, e.status);
            assert!(e.status.image_squarefree && e.status.delta_nonzero);
        }
    }
}
