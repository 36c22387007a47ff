//! Randomized property tests for the group kernel and the occupation
//! estimator.

use proptest::prelude::*;

use levy_sym::group::{
    act, base_point, distance, exp_tangent, project, transporter, Element, GroupId,
};
use levy_sym::simulate::occupation_time;

fn group_id() -> impl Strategy<Value = GroupId> {
    prop_oneof![Just(GroupId::Sl2r), Just(GroupId::Su2)]
}

/// Random element at modest radius: numerically tame, still generic.
fn element(group: GroupId) -> impl Strategy<Value = Element<f64>> {
    let dim = group.space_dim();
    (
        prop::collection::vec(-2.0f64..2.0, dim),
        prop::collection::vec(-2.0f64..2.0, dim),
    )
        .prop_map(move |(v, w)| {
            exp_tangent(group, &v).multiply(&exp_tangent(group, &w)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms((g, h, k) in group_id().prop_flat_map(|id| (element(id), element(id), element(id)))) {
        let gh_k = g.multiply(&h).unwrap().multiply(&k).unwrap();
        let g_hk = g.multiply(&h.multiply(&k).unwrap()).unwrap();
        prop_assert!(gh_k.max_entry_distance(&g_hk) < 1e-9);

        let e = Element::<f64>::identity(g.group);
        let gg = g.multiply(&g.inverse()).unwrap();
        prop_assert!(gg.max_entry_distance(&e) < 1e-9);

        // det = 1 for SL2R, unit norm for SU2
        prop_assert!((g.constraint_value() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn distance_is_invariant_under_the_action(
        (g, p_lift, q_lift) in group_id().prop_flat_map(|id| (element(id), element(id), element(id)))
    ) {
        let p = project(&p_lift);
        let q = project(&q_lift);
        let d = distance(&p, &q).unwrap();
        prop_assert!(d >= 0.0);
        let d_moved = distance(&act(&g, &p).unwrap(), &act(&g, &q).unwrap()).unwrap();
        // cartan-radial extraction resolves to about sqrt(eps) near 0
        prop_assert!((d - d_moved).abs() < 1e-6, "{d} vs {d_moved}");
    }

    #[test]
    fn transporter_moves_base_to_target(lift in group_id().prop_flat_map(element)) {
        let group = lift.group;
        let m = base_point::<f64>(group);
        let p = project(&lift);
        let tau = transporter(&m, &p).unwrap();
        let moved = act(&tau, &m).unwrap();
        prop_assert!(distance(&moved, &p).unwrap() < 1e-6);
    }

    #[test]
    fn occupation_time_is_bounded_and_monotone(
        distances in prop::collection::vec(0.0f64..5.0, 2..60),
        step in 1e-3f64..1.0,
        r in 0.1f64..4.0,
    ) {
        let total = (distances.len() - 1) as f64 * step;
        let occ = occupation_time(&distances, step, r);
        prop_assert!(occ >= 0.0 && occ <= total + 1e-12, "occ {occ} of {total}");
        // monotone in the ball radius
        let occ_bigger = occupation_time(&distances, step, r + 0.5);
        prop_assert!(occ_bigger >= occ - 1e-12);
        // everything inside a huge ball
        let occ_all = occupation_time(&distances, step, 100.0);
        prop_assert!((occ_all - total).abs() < 1e-9);
    }
}
