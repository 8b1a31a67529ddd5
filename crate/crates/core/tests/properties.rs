//! Property-based tests for the algebraic and metric structure: monoid laws,
//! partitions, canonical forms, quotient-metric identities, and serialization
//! round-trips.

mod common;

use proptest::prelude::*;

use common::{close, Rng};
use pdiag::{
    make_space, wasserstein, Diagram, ExtReal, PNorm, Point, Space, TruncatedDiagram,
};

fn arb_halfplane_entry() -> impl Strategy<Value = (f64, f64, u64)> {
    (-5.0f64..5.0, 0.05f64..6.0, 1u64..3).prop_map(|(b, gap, m)| (b, gap, m))
}

fn arb_entries() -> impl Strategy<Value = Vec<(f64, f64, u64)>> {
    prop::collection::vec(arb_halfplane_entry(), 0..5)
}

fn build(space: &Space, entries: &[(f64, f64, u64)]) -> Diagram {
    Diagram::new(
        space,
        entries
            .iter()
            .map(|&(b, gap, m)| (Point::coords([b, b + gap]), m)),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn addition_is_associative_and_commutative(
        xs in arb_entries(), ys in arb_entries(), zs in arb_entries()
    ) {
        let s = make_space("halfplane:linf").unwrap();
        let (a, b, c) = (build(&s, &xs), build(&s, &ys), build(&s, &zs));
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(
            a.add(&b).unwrap().add(&c).unwrap(),
            a.add(&b.add(&c).unwrap()).unwrap()
        );
        let zero = Diagram::empty(&s);
        prop_assert_eq!(a.add(&zero).unwrap(), a);
    }

    #[test]
    fn upper_and_lower_parts_partition(xs in arb_entries(), delta in 0.1f64..4.0) {
        let s = make_space("halfplane:linf").unwrap();
        let a = build(&s, &xs);
        let (u, l) = a.split_at(&s, delta).unwrap();
        prop_assert_eq!(u.add(&l).unwrap(), a.clone());
        for (pt, _) in u.entries() {
            prop_assert!(s.dist_to_subset(pt).unwrap().value() >= delta);
        }
        for (pt, _) in l.entries() {
            prop_assert!(s.dist_to_subset(pt).unwrap().value() < delta);
        }
    }

    #[test]
    fn diagram_json_round_trip(xs in arb_entries()) {
        let s = make_space("halfplane:l2").unwrap();
        let a = build(&s, &xs);
        let v = a.to_json(&s).unwrap();
        prop_assert_eq!(Diagram::from_json(&s, &v).unwrap(), a.clone());
        let t = TruncatedDiagram::new(a, ExtReal::new(0.5).unwrap(), PNorm::TWO);
        let v = t.to_json(&s).unwrap();
        prop_assert_eq!(TruncatedDiagram::from_json(&s, &v).unwrap(), t);
    }

    #[test]
    fn persistence_norm_decreases_in_p(xs in arb_entries()) {
        let s = make_space("halfplane:l2").unwrap();
        let a = build(&s, &xs);
        let norms: Vec<f64> = [PNorm::ONE, PNorm::new(1.5).unwrap(), PNorm::TWO,
                               PNorm::new(3.0).unwrap(), PNorm::Infinity]
            .iter()
            .map(|&p| a.persistence_norm(&s, p).unwrap().value())
            .collect();
        for w in norms.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0));
        }
    }

    #[test]
    fn quotient_metric_identities(
        b1 in -5.0f64..5.0, g1 in 0.05f64..6.0,
        b2 in -5.0f64..5.0, g2 in 0.05f64..6.0,
    ) {
        let s = make_space("halfplane:l1").unwrap();
        let x = Point::coords([b1, b1 + g1]);
        let y = Point::coords([b2, b2 + g2]);
        // re-quotienting with q <= p collapses to the p-quotient
        for (q, p) in [(PNorm::ONE, PNorm::TWO), (PNorm::ONE, PNorm::Infinity),
                       (PNorm::TWO, PNorm::Infinity), (PNorm::TWO, PNorm::TWO)] {
            let sq = s.with_quotient_ground(q);
            let lhs = sq.quotient_dist(p, &x, &y).unwrap().value();
            let rhs = s.quotient_dist(p, &x, &y).unwrap().value();
            prop_assert!(close(lhs, rhs, 1e-12), "(d_q)_p = {lhs} vs d_p = {rhs}");
        }
        // d_p is monotone decreasing in p
        let d1 = s.quotient_dist(PNorm::ONE, &x, &y).unwrap();
        let d2 = s.quotient_dist(PNorm::TWO, &x, &y).unwrap();
        let di = s.quotient_dist(PNorm::Infinity, &x, &y).unwrap();
        prop_assert!(di <= d2 && d2 <= d1);
        // symmetry holds exactly
        prop_assert_eq!(
            s.quotient_dist(PNorm::TWO, &x, &y).unwrap(),
            s.quotient_dist(PNorm::TWO, &y, &x).unwrap()
        );
    }

    #[test]
    fn projection_achieves_the_subset_distance(
        b in -5.0f64..5.0, g in 0.05f64..6.0
    ) {
        for spec in ["halfplane:l1", "halfplane:l2", "halfplane:linf"] {
            let s = make_space(spec).unwrap();
            let x = Point::coords([b, b + g]);
            let (a, r) = s.project_to_subset(&x).unwrap();
            prop_assert!(s.in_subset(&a).unwrap());
            // the witness distance, the recomputed distance, and the closed
            // form agree bit-exactly
            prop_assert_eq!(r, s.dist(&x, &a).unwrap());
            prop_assert_eq!(r, s.dist_to_subset(&x).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn persistence_norm_equals_distance_to_zero(xs in arb_entries(), seed in 0u64..1000) {
        let mut rng = Rng::new(seed);
        let spec = ["halfplane:l1", "halfplane:l2", "halfplane:linf"][rng.int(3) as usize];
        let s = make_space(spec).unwrap();
        let a = build(&s, &xs);
        let zero = Diagram::empty(&s);
        for p in [PNorm::ONE, PNorm::TWO, PNorm::Infinity] {
            let norm = a.persistence_norm(&s, p).unwrap().value();
            let w = wasserstein(&s, &a, &zero, p).unwrap().value.value();
            prop_assert!(close(norm, w, 1e-9), "p={p}: {norm} vs {w}");
        }
    }
}

/// The geodesic wrapper enforces the constant-speed contract on every
/// built-in that claims the capability.
#[test]
fn geodesic_constant_speed_across_builtins() {
    let mut rng = Rng::new(7);
    for spec in ["halfplane:l1", "halfplane:l2", "halfplane:linf", "pointed_euclidean:3", "ray", "wedge_circles", "wedge_intervals"] {
        let s = make_space(spec).unwrap();
        if !s.capabilities().geodesic {
            continue;
        }
        for _ in 0..200 {
            let x = common::sample_point(&s, &mut rng);
            let y = common::sample_point(&s, &mut rng);
            let d = s.dist(&x, &y).unwrap().value();
            let (t0, t1) = {
                let a = rng.unit();
                let b = rng.unit();
                (a.min(b), a.max(b))
            };
            let g0 = s.geodesic_point(&x, &y, t0).unwrap();
            let g1 = s.geodesic_point(&x, &y, t1).unwrap();
            let got = s.dist(&g0, &g1).unwrap().value();
            assert!(
                close(got, (t1 - t0) * d, 1e-9),
                "{spec}: segment [{t0},{t1}] of d={d} measured {got}"
            );
        }
    }
}
