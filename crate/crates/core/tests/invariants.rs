//! Random sweeps for the per-module invariants that the acceptance suite
//! does not already cover at scale: matchings returned by the solver,
//! oracle agreement on the wedge spaces, tie enumeration, retraction
//! continuity, and diagnostics witnesses.

mod common;

use common::{close, sample_diagram, sample_point, Rng};
use pdiag::{
    card_mismatch_lower_bound, diagnose_set, distinct_geodesics, local_noncompactness_witnesses,
    make_space, retract_diagram, straight_line_retraction, wasserstein, wasserstein_bruteforce,
    Diagram, PNorm, Point, TruncatedDiagram,
};

const SWEEP_PS: [PNorm; 4] = [PNorm::ONE, PNorm::TWO, PNorm::Finite(3.0), PNorm::Infinity];

#[test]
fn ground_metric_axioms_on_every_builtin() {
    let mut rng = Rng::new(3);
    for spec in [
        "halfplane:l1",
        "halfplane:l2",
        "halfplane:linf",
        "pointed_euclidean:2",
        "ray",
        "wedge_circles",
        "wedge_intervals",
    ] {
        let s = make_space(spec).unwrap();
        let mut scale = 1.0f64;
        for _ in 0..10_000 {
            let x = sample_point(&s, &mut rng);
            let y = sample_point(&s, &mut rng);
            let z = sample_point(&s, &mut rng);
            let xy = s.dist(&x, &y).unwrap();
            let yx = s.dist(&y, &x).unwrap();
            assert_eq!(xy, yx, "{spec}: symmetry");
            assert!(s.dist(&x, &x).unwrap().is_zero(), "{spec}: identity");
            let yz = s.dist(&y, &z).unwrap().value();
            let xz = s.dist(&x, &z).unwrap().value();
            scale = scale.max(xz);
            assert!(
                xz <= xy.value() + yz + 1e-9 * scale,
                "{spec}: triangle {xz} > {} + {yz}",
                xy.value()
            );
        }
    }
}

#[test]
fn single_dot_diagrams_realize_the_quotient_metric() {
    let mut rng = Rng::new(5);
    for spec in ["halfplane:l1", "halfplane:l2", "halfplane:linf", "ray", "wedge_circles"] {
        let s = make_space(spec).unwrap();
        for i in 0..300 {
            let x = sample_point(&s, &mut rng);
            let y = sample_point(&s, &mut rng);
            let p = SWEEP_PS[i % SWEEP_PS.len()];
            let a = Diagram::from_points(&s, [x.clone()]).unwrap();
            let b = Diagram::from_points(&s, [y.clone()]).unwrap();
            let w = wasserstein(&s, &a, &b, p).unwrap().value.value();
            let q = s.quotient_dist(p, &x, &y).unwrap().value();
            assert!(close(w, q, 1e-12), "{spec} p={p}: W = {w} vs d_p = {q}");
        }
    }
}

#[test]
fn solver_matchings_validate_and_reproduce_the_value() {
    let mut rng = Rng::new(11);
    for spec in ["halfplane:linf", "wedge_circles", "ray"] {
        let s = make_space(spec).unwrap();
        for i in 0..150 {
            let a = sample_diagram(&s, &mut rng, 4);
            let b = sample_diagram(&s, &mut rng, 4);
            let p = SWEEP_PS[i % SWEEP_PS.len()];
            let r = wasserstein(&s, &a, &b, p).unwrap();
            let m = r.matching.expect("witness always present");
            m.validate(&s).unwrap();
            assert_eq!(m.cost(&s, p).unwrap(), r.value);
            assert!(r.optimal, "{spec} is distance minimizing");
        }
    }
}

#[test]
fn oracle_agreement_on_the_wedge_spaces() {
    let mut rng = Rng::new(23);
    for spec in ["wedge_circles", "wedge_intervals"] {
        let s = make_space(spec).unwrap();
        for i in 0..200 {
            let a = sample_diagram(&s, &mut rng, 3);
            let b = sample_diagram(&s, &mut rng, 3);
            let p = SWEEP_PS[i % SWEEP_PS.len()];
            let fast = wasserstein(&s, &a, &b, p).unwrap();
            let brute = wasserstein_bruteforce(&s, &a, &b, p).unwrap();
            assert!(
                close(fast.value.value(), brute.value.value(), 1e-9),
                "{spec} i={i} p={p}: {} vs {}",
                fast.value,
                brute.value
            );
        }
    }
}

#[test]
fn cardinality_bound_never_exceeds_the_distance() {
    let mut rng = Rng::new(31);
    let s = make_space("halfplane:l2").unwrap();
    for i in 0..200 {
        let a = sample_diagram(&s, &mut rng, 4);
        let b = sample_diagram(&s, &mut rng, 4);
        if b.cardinality() >= a.cardinality() {
            continue;
        }
        let p = SWEEP_PS[i % SWEEP_PS.len()];
        let bound = card_mismatch_lower_bound(&s, &a, &b, p).unwrap().value();
        let w = wasserstein(&s, &a, &b, p).unwrap().value.value();
        assert!(bound <= w + 1e-9 * w.max(1.0), "i={i}: bound {bound} > W {w}");
    }
}

#[test]
fn tie_enumeration_returns_only_optima() {
    let mut rng = Rng::new(47);
    let s = make_space("halfplane:l2").unwrap();
    for i in 0..60 {
        let a = sample_diagram(&s, &mut rng, 3);
        let b = sample_diagram(&s, &mut rng, 3);
        let p = SWEEP_PS[i % SWEEP_PS.len()];
        let best = wasserstein(&s, &a, &b, p).unwrap().value.value();
        let paths = distinct_geodesics(&s, &a, &b, p, 16).unwrap();
        assert!(!paths.is_empty());
        for g in &paths {
            g.matching().validate(&s).unwrap();
            let c = g.matching().cost(&s, p).unwrap().value();
            assert!((c - best).abs() <= 1e-12 * best.max(1.0), "cost {c} vs best {best}");
        }
    }
}

#[test]
fn retraction_images_converge_with_the_inputs() {
    let s = make_space("pointed_euclidean:2").unwrap();
    let h = straight_line_retraction(&s).unwrap();
    let mut rng = Rng::new(53);
    let alpha = sample_diagram(&s, &mut rng, 4);
    let mut spreads = Vec::new();
    for delta in [0.1, 0.01, 0.001] {
        // perturb every dot by under delta in the sup norm
        let perturbed = Diagram::new(
            &s,
            alpha.entries().iter().map(|(pt, m)| {
                let c = pt.as_coords().unwrap();
                let moved: Vec<f64> =
                    c.iter().map(|&v| v + rng.range(-0.4, 0.4) * delta).collect();
                (Point::coords(moved), *m)
            }),
        )
        .unwrap();
        let before = wasserstein(&s, &alpha, &perturbed, PNorm::Infinity).unwrap().value;
        assert!(before.value() < delta);
        let img_a = retract_diagram(&s, &h, &alpha, 0.5).unwrap();
        let img_b = retract_diagram(&s, &h, &perturbed, 0.5).unwrap();
        spreads.push(wasserstein(&s, &img_a, &img_b, PNorm::Infinity).unwrap().value.value());
    }
    assert!(spreads.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{spreads:?}");
    assert!(spreads[2] < 1e-3, "{spreads:?}");
}

#[test]
fn diagnostics_cover_finite_families_exactly() {
    let mut rng = Rng::new(61);
    let s = make_space("halfplane:linf").unwrap();
    let family: Vec<TruncatedDiagram> = (0..6)
        .map(|_| TruncatedDiagram::exact(sample_diagram(&s, &mut rng, 5), PNorm::TWO))
        .collect();
    let report = diagnose_set(&s, &family, PNorm::TWO, &[2.0, 1.0, 0.5, 0.1], 1.0).unwrap();
    // finite exact families satisfy all three conditions
    assert!(report.uniformly_upper_finite);
    assert!(report.upper_totally_bounded);
    assert!(report.uniformly_p_vanishing);
    assert!(report.relatively_compact_certified());
    for scale in &report.scales {
        assert!(scale.covering_radius <= scale.net_radius);
        // every far dot is within the radius of some center
        for item in &family {
            for (pt, _) in item.head.upper_part(&s, scale.epsilon).unwrap().entries() {
                let nearest = scale
                    .net_centers
                    .iter()
                    .map(|c| s.dist(pt, c).unwrap().value())
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest <= scale.net_radius + 1e-12);
            }
        }
        // the vanishing witness does bound the lower mass
        let delta = scale.vanishing_delta.unwrap();
        for item in &family {
            let norm = item
                .head
                .lower_part(&s, delta)
                .unwrap()
                .persistence_norm(&s, PNorm::TWO)
                .unwrap();
            assert!(norm.value() < scale.epsilon);
        }
    }
}

#[test]
fn witness_families_verified_by_the_solver_small() {
    let s = make_space("halfplane:linf").unwrap();
    let mut rng = Rng::new(71);
    // around a nonempty center too, not just around zero
    let alpha = Diagram::from_points(&s, [sample_point(&s, &mut rng)]).unwrap();
    let eps = 0.5 * s
        .dist_to_subset(&alpha.entries()[0].0)
        .unwrap()
        .value()
        .min(1.0);
    for p in [PNorm::ONE, PNorm::TWO] {
        let ws = local_noncompactness_witnesses(&s, &alpha, eps, p, 8).unwrap();
        for (i, bn) in ws.iter().enumerate() {
            let to_center = wasserstein(&s, bn, &alpha, p).unwrap().value.value();
            assert!(to_center < eps, "p={p} n={} dist {to_center}", i + 1);
            for bk in ws.iter().skip(i + 1) {
                let sep = wasserstein(&s, bn, bk, p).unwrap().value.value();
                assert!(sep >= eps / 4.0 - 1e-12, "p={p} separation {sep}");
            }
        }
    }
}

#[test]
fn truncated_brackets_contain_the_represented_distance() {
    // two truncations of the same underlying diagram at different depths:
    // their reported distance differs from zero by at most the error bound
    let (s, t40) = pdiag::circles_truncation(40).unwrap();
    let (_, t80) = pdiag::circles_truncation(80).unwrap();
    let r = pdiag::wasserstein_truncated(&s, &t40, &t80, PNorm::ONE).unwrap();
    // the true distance between the represented (identical) diagrams is zero
    assert!(r.value.value() <= r.error_bound.value());
}
