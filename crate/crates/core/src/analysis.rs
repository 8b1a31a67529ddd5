//! Compactness diagnostics, the symmetric-product embedding, local
//! non-compactness witnesses, and the gallery series.
//!
//! Total boundedness of a family of diagrams is equivalent to three
//! conditions: a uniform bound on the number of dots far from `A`, total
//! boundedness of the set of those dots, and (for finite p) a uniform
//! vanishing of the mass near `A`. The diagnostics here certify witnesses
//! for those conditions at the sampled scales — no claim is made beyond the
//! scales actually checked. On a complete space the same witnesses certify
//! relative compactness.

use serde_json::{json, Value};

use crate::diagram::{Diagram, TruncatedDiagram};
use crate::ext::{ExtReal, PNorm};
use crate::matching::card_mismatch_lower_bound;
use crate::solver;
use crate::space::{Point, Space};
use crate::{Error, Result};

/// Witnesses gathered at one scale of the schedule.
#[derive(Clone, Debug)]
pub struct ScaleDiagnostics {
    pub epsilon: f64,
    /// Uniform bound on `|u_eps|` across the family, tails included;
    /// `None` when an infinity-tail makes the count uncertifiable here.
    pub upper_count: Option<u64>,
    /// Greedy net centers covering the dots at distance `>= eps` from `A`.
    pub net_centers: Vec<Point>,
    /// Target covering radius (`eps` times the radius factor).
    pub net_radius: f64,
    /// Radius actually achieved by the centers.
    pub covering_radius: f64,
    /// Whether the net covers everything the bounds allow at this scale.
    pub net_certified: bool,
    /// A `delta` with `W_p(lower part at delta, 0) < eps` across the family.
    pub vanishing_delta: Option<f64>,
}

/// Per-condition summary over the whole schedule.
#[derive(Clone, Debug)]
pub struct DiagnosticsReport {
    pub p: PNorm,
    pub scales: Vec<ScaleDiagnostics>,
    pub uniformly_upper_finite: bool,
    pub upper_totally_bounded: bool,
    pub uniformly_p_vanishing: bool,
    /// The space is complete, so the witnesses above also certify relative
    /// compactness of the family.
    pub complete_space: bool,
}

impl DiagnosticsReport {
    pub fn relatively_compact_certified(&self) -> bool {
        self.complete_space
            && self.uniformly_upper_finite
            && self.upper_totally_bounded
            && self.uniformly_p_vanishing
    }

    pub fn to_json(&self, space: &Space) -> Value {
        json!({
            "p": self.p,
            "complete_space": self.complete_space,
            "uniformly_upper_finite": self.uniformly_upper_finite,
            "upper_totally_bounded": self.upper_totally_bounded,
            "uniformly_p_vanishing": self.uniformly_p_vanishing,
            "relatively_compact_certified": self.relatively_compact_certified(),
            "scales": self.scales.iter().map(|s| json!({
                "epsilon": s.epsilon,
                "upper_count": s.upper_count,
                "net_radius": s.net_radius,
                "covering_radius": s.covering_radius,
                "net_certified": s.net_certified,
                "net_centers": s.net_centers.iter()
                    .map(|p| space.point_to_json(p)).collect::<Vec<_>>(),
                "vanishing_delta": s.vanishing_delta,
            })).collect::<Vec<_>>(),
        })
    }
}

/// How many tail dots a bound `tau` permits at distance `>= eps` from `A`.
fn tail_allowance(p: PNorm, tau: ExtReal, eps: f64) -> Option<u64> {
    if tau.is_zero() {
        return Some(0);
    }
    if tau.is_infinite() {
        return None;
    }
    match p {
        PNorm::Infinity => {
            if tau.value() < eps {
                Some(0)
            } else {
                None // arbitrarily many dots of height below tau could hide here
            }
        }
        PNorm::Finite(q) => {
            let ratio = tau.value() / eps;
            Some(ratio.powf(q).floor() as u64)
        }
    }
}

/// Certifies the total-boundedness conditions for a family of (truncated)
/// diagrams at the given strictly decreasing scales.
pub fn diagnose_set(
    space: &Space,
    family: &[TruncatedDiagram],
    p: PNorm,
    eps_schedule: &[f64],
    net_radius_factor: f64,
) -> Result<DiagnosticsReport> {
    if eps_schedule.is_empty() {
        return Err(Error::InvalidArgument("empty scale schedule".to_string()));
    }
    if !eps_schedule.windows(2).all(|w| w[0] > w[1]) || *eps_schedule.last().unwrap() <= 0.0 {
        return Err(Error::InvalidArgument(
            "scale schedule must be strictly decreasing and positive".to_string(),
        ));
    }
    if net_radius_factor.is_nan() || net_radius_factor <= 0.0 {
        return Err(Error::InvalidArgument("net radius factor must be positive".to_string()));
    }
    for item in family {
        item.head.check_space(space)?;
        if !item.tail_bound.is_zero() && item.tail_exponent != p {
            return Err(Error::InvalidArgument(format!(
                "tail bound certified for p = {}, requested p = {}",
                item.tail_exponent, p
            )));
        }
    }

    let mut scales = Vec::with_capacity(eps_schedule.len());
    for &eps in eps_schedule {
        // uniform upper finiteness witness
        let mut upper_count = Some(0u64);
        for item in family {
            let heads = item.head.upper_part(space, eps)?.cardinality();
            match tail_allowance(p, item.tail_bound, eps) {
                Some(extra) => {
                    upper_count = upper_count.map(|m| m.max(heads + extra));
                }
                None => upper_count = None,
            }
        }

        // greedy farthest-point net over the dots at distance >= eps
        let mut support: Vec<Point> = Vec::new();
        for item in family {
            for (pt, _) in item.head.upper_part(space, eps)?.entries() {
                if !support.iter().any(|q| q == pt) {
                    support.push(pt.clone());
                }
            }
        }
        support.sort_by(Point::key_cmp);
        let radius = eps * net_radius_factor;
        let (net_centers, covering_radius) = greedy_net(space, &support, radius)?;

        // uniform p-vanishing witness: walk a geometric delta grid
        let mut vanishing_delta = None;
        'grid: for j in 1..=48u32 {
            let delta = eps / f64::powi(2.0, j as i32);
            for item in family {
                let head_lower = item
                    .head
                    .lower_part(space, delta)?
                    .persistence_norm(space, p)?;
                let bound = p.norm2(head_lower, item.tail_bound);
                if bound.value() >= eps {
                    continue 'grid;
                }
            }
            vanishing_delta = Some(delta);
            break;
        }

        scales.push(ScaleDiagnostics {
            epsilon: eps,
            net_certified: upper_count.is_some(),
            upper_count,
            net_centers,
            net_radius: radius,
            covering_radius,
            vanishing_delta,
        });
    }

    Ok(DiagnosticsReport {
        p,
        uniformly_upper_finite: scales.iter().all(|s| s.upper_count.is_some()),
        upper_totally_bounded: scales.iter().all(|s| s.net_certified),
        uniformly_p_vanishing: scales.iter().all(|s| s.vanishing_delta.is_some()),
        complete_space: space.capabilities().complete,
        scales,
    })
}

/// Greedy farthest-point net: centers are added while some point lies beyond
/// the radius. Deterministic (seeded at the canonical least point); the
/// result is a 2-approximation of the optimal net of that radius.
fn greedy_net(space: &Space, points: &[Point], radius: f64) -> Result<(Vec<Point>, f64)> {
    if points.is_empty() {
        return Ok((Vec::new(), 0.0));
    }
    let mut centers: Vec<Point> = vec![points[0].clone()];
    let mut nearest: Vec<ExtReal> = points
        .iter()
        .map(|pt| space.dist(pt, &points[0]))
        .collect::<Result<_>>()?;
    loop {
        let (far_idx, far_dist) = nearest
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map(|(i, d)| (i, *d))
            .unwrap();
        if far_dist.value() <= radius {
            return Ok((centers, far_dist.value()));
        }
        let center = points[far_idx].clone();
        for (slot, pt) in nearest.iter_mut().zip(points) {
            *slot = (*slot).min(space.dist(pt, &center)?);
        }
        centers.push(center);
    }
}

/// A diagram of cardinality at most `n` written as a `2n`-tuple over a
/// pointed space, padded with the base point. The quotient by coordinate
/// permutations carries the p-product metric, and the embedding is isometric
/// for `W_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricTuple {
    space_id: String,
    n: u64,
    slots: Vec<(Point, u64)>,
}

impl SymmetricTuple {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Slot payloads with multiplicities, in canonical order; they sum to `2n`.
    pub fn slots(&self) -> &[(Point, u64)] {
        &self.slots
    }
}

pub fn embed_symmetric(
    space: &Space,
    alpha: &Diagram,
    n: u64,
    base: &Point,
) -> Result<SymmetricTuple> {
    alpha.check_space(space)?;
    let pointed_base = space.base_point().ok_or_else(|| Error::CapabilityMissing {
        space: space.id().to_string(),
        capability: "base point (pointed space)",
    })?;
    if *base != pointed_base {
        return Err(Error::InvalidArgument(format!(
            "base {base:?} is not the base point of {}",
            space.id()
        )));
    }
    let card = alpha.cardinality();
    if card > n {
        return Err(Error::CardinalityCap { got: card, cap: n });
    }
    let mut slots: Vec<(Point, u64)> = alpha.entries().to_vec();
    slots.push((pointed_base, 2 * n - card));
    slots.sort_by(|(a, _), (b, _)| a.key_cmp(b));
    Ok(SymmetricTuple {
        space_id: space.id().to_string(),
        n,
        slots,
    })
}

/// The quotient metric on `2n`-tuples modulo permutation: the least p-norm
/// of slot distances over all slot bijections. Agrees with `W_p` through
/// the embedding.
pub fn symmetric_dist(
    space: &Space,
    u: &SymmetricTuple,
    v: &SymmetricTuple,
    p: PNorm,
) -> Result<ExtReal> {
    if u.space_id != space.id() || v.space_id != space.id() {
        return Err(Error::SpaceMismatch {
            left: u.space_id.clone(),
            right: v.space_id.clone(),
        });
    }
    if u.n != v.n {
        return Err(Error::InvalidArgument(format!(
            "tuples of different sizes: {} vs {}",
            u.n, v.n
        )));
    }
    let supply: Vec<u64> = u.slots.iter().map(|&(_, m)| m).collect();
    let demand: Vec<u64> = v.slots.iter().map(|&(_, m)| m).collect();
    let mut cost = vec![vec![ExtReal::ZERO; demand.len()]; supply.len()];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = space.dist(&u.slots[i].0, &v.slots[j].0)?;
        }
    }
    let total = 2 * u.n;
    match p {
        PNorm::Infinity => {
            match solver::bottleneck_transport(&supply, &demand, |i, j| {
                cost[i][j].is_finite().then(|| cost[i][j].value())
            }) {
                None => Ok(ExtReal::INFINITY),
                Some(out) => Ok(out
                    .shipments
                    .iter()
                    .map(|s| cost[s.row][s.col])
                    .fold(ExtReal::ZERO, ExtReal::max)),
            }
        }
        finite => {
            let out = solver::min_cost_transport(&supply, &demand, |i, j| {
                cost[i][j].is_finite().then(|| finite.pow(cost[i][j]).value())
            });
            if out.routed < total {
                return Ok(ExtReal::INFINITY);
            }
            Ok(finite.root(
                out.shipments
                    .iter()
                    .map(|s| {
                        ExtReal::from_nonneg(finite.pow(cost[s.row][s.col]).value() * s.amount as f64)
                    })
                    .sum(),
            ))
        }
    }
}

/// An infinite family inside the `eps`-ball of `alpha` whose members stay
/// pairwise `eps/4`-separated (`p` finite) or exactly `d(x, A)` apart
/// (`p` infinite): the witness that no diagram has a compact neighborhood
/// when `A` is approachable.
pub fn local_noncompactness_witnesses(
    space: &Space,
    alpha: &Diagram,
    eps: f64,
    p: PNorm,
    count: u64,
) -> Result<Vec<Diagram>> {
    alpha.check_space(space)?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if count == 0 || count > 40 {
        return Err(Error::InvalidArgument(
            "witness count must lie in 1..=40".to_string(),
        ));
    }
    for (pt, _) in alpha.entries() {
        if space.dist_to_subset(pt)?.value() <= eps {
            return Err(Error::InvalidArgument(format!(
                "eps = {eps} must be below the least subset distance of the support"
            )));
        }
    }
    let approach = |r: f64| -> Result<Point> {
        space.point_at_subset_distance(r).ok_or_else(|| Error::CapabilityMissing {
            space: space.id().to_string(),
            capability: "an approach sequence to the subset (the subset is isolated or not exposed)",
        })
    };

    let mut out = Vec::with_capacity(count as usize);
    match p {
        PNorm::Infinity => {
            // a single dot at height 0.6 eps, repeated n times: all members
            // are d(x, A) apart from alpha and from each other
            let x = approach(0.6 * eps)?;
            let sep = space.dist_to_subset(&x)?.value();
            debug_assert!(sep > 0.0 && sep < eps);
            for n in 1..=count {
                out.push(alpha.add(&Diagram::new(space, [(x.clone(), n)])?)?);
            }
        }
        PNorm::Finite(q) => {
            // dots sink toward A geometrically while their multiplicities
            // double fast enough that the masses stay eps/4 apart
            let mut added = Vec::with_capacity(count as usize);
            for n in 1..=count {
                let r = eps * f64::powf(2.0, -((n as f64) + 0.5) / q);
                let x = approach(r)?;
                let extra = Diagram::new(space, [(x, 1u64 << n)])?;
                out.push(alpha.add(&extra)?);
                added.push(extra);
            }
            // certify the construction: the canonical matching keeps each
            // member inside the eps-ball, and the cardinality-gap bound
            // keeps members eps/4 apart
            for (i, beta) in out.iter().enumerate() {
                let to_alpha = added[i].persistence_norm(space, p)?;
                if to_alpha.value() >= eps {
                    return Err(Error::InvalidArgument(format!(
                        "construction failed: member {} is not inside the eps-ball",
                        i + 1
                    )));
                }
                for other in out.iter().skip(i + 1) {
                    let sep = card_mismatch_lower_bound(space, other, beta, p)?;
                    if sep.value() < eps / 4.0 - 1e-12 {
                        return Err(Error::InvalidArgument(format!(
                            "construction failed: members closer than eps/4 ({})",
                            sep.value()
                        )));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Partial sums of the wedge-of-circles series: the `W_1`-distance from the
/// truncated diagram to zero is `sum_{k<=N} pi/k^2`, and the discarded tail
/// is below `pi/N` by integral comparison. The full series sums to `pi^3/6`.
/// Only `p = 1` has this closed form; other exponents are rejected.
pub fn circles_partial(n_terms: u64, p: PNorm) -> Result<(f64, f64)> {
    if p != PNorm::ONE {
        return Err(Error::InvalidExponent(format!(
            "the circles series has its closed form at p = 1 only, got p = {p}"
        )));
    }
    if n_terms == 0 {
        return Err(Error::InvalidArgument("need at least one term".to_string()));
    }
    let partial: f64 = (1..=n_terms)
        .map(|k| std::f64::consts::PI / (k as f64 * k as f64))
        .sum();
    Ok((partial, std::f64::consts::PI / n_terms as f64))
}

/// The `N`-term truncation of the circles diagram as a certified
/// `TruncatedDiagram` on `wedge_circles`.
pub fn circles_truncation(n_terms: u64) -> Result<(Space, TruncatedDiagram)> {
    if n_terms == 0 {
        return Err(Error::InvalidArgument("need at least one term".to_string()));
    }
    let space = crate::space::make_space("wedge_circles")?;
    let points = (1..=n_terms).map(|k| {
        let kf = k as f64;
        Point::arc(k, std::f64::consts::PI / (kf * kf * kf))
    });
    let head = Diagram::from_points(&space, points)?;
    let (_, tail) = circles_partial(n_terms, PNorm::ONE)?;
    let trunc = TruncatedDiagram::new(head, ExtReal::new(tail)?, PNorm::ONE);
    Ok((space, trunc))
}
