//! Matchings between diagrams, p-costs, and exact Wasserstein distances.
//!
//! A matching pairs the dots of two diagrams, letting dots pair with points
//! of the subset `A` instead; pairs inside `A x A` carry no cost and are never
//! stored. The p-Wasserstein distance is the infimum of matching p-costs.
//!
//! The solver works on the augmented instance: rows are the dots of `alpha`
//! plus one slot per dot of `beta` standing for "comes from `A`", columns
//! symmetrically, with `A`-to-`A` cells free. On distance-minimizing spaces
//! the infimum is attained and the reported matching is optimal; elsewhere
//! the solver prices deletions at `d(x, A)` and reports the true infimum with
//! `optimal = false`.

use std::cmp::Ordering;

use serde_json::{json, Value};

use crate::diagram::{Diagram, TruncatedDiagram};
use crate::ext::{ExtReal, PNorm};
use crate::solver;
use crate::space::{Point, Space};
use crate::{Error, Result};

/// One side of a matched pair.
#[derive(Clone, Debug, PartialEq)]
pub enum MatchEnd {
    /// A dot of the diagram (off `A`).
    Free(Point),
    /// A concrete nearest point of `A` witnessing the deletion cost.
    Anchor(Point),
    /// The subset `A` as a whole, when no nearest point exists; the pair
    /// costs `d(x, A)`.
    Subset,
}

impl MatchEnd {
    fn rank(&self) -> u8 {
        match self {
            MatchEnd::Free(_) => 0,
            MatchEnd::Anchor(_) => 1,
            MatchEnd::Subset => 2,
        }
    }

    fn key_cmp(&self, other: &MatchEnd) -> Ordering {
        match (self, other) {
            (MatchEnd::Free(a), MatchEnd::Free(b))
            | (MatchEnd::Anchor(a), MatchEnd::Anchor(b)) => a.key_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }

    fn is_free(&self) -> bool {
        matches!(self, MatchEnd::Free(_))
    }

    fn to_json(&self, space: &Space) -> Value {
        match self {
            MatchEnd::Free(p) | MatchEnd::Anchor(p) => space.point_to_json(p),
            MatchEnd::Subset => Value::String("A".into()),
        }
    }

    fn from_json(space: &Space, v: &Value) -> Result<MatchEnd> {
        if v.as_str() == Some("A") {
            return Ok(MatchEnd::Subset);
        }
        let p = space.point_from_json(v)?;
        Ok(if space.in_subset(&p)? {
            MatchEnd::Anchor(p)
        } else {
            MatchEnd::Free(p)
        })
    }
}

/// A matching in the normal form: off-`A` pairs, deletions, and creations,
/// with no stored `A`-to-`A` pairs. Carries its declared marginals.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    space_id: String,
    pairs: Vec<(MatchEnd, MatchEnd, u64)>,
    alpha: Diagram,
    beta: Diagram,
}

impl Matching {
    pub fn new(
        space: &Space,
        pairs: Vec<(MatchEnd, MatchEnd, u64)>,
        alpha: Diagram,
        beta: Diagram,
    ) -> Result<Matching> {
        let m = Matching {
            space_id: space.id().to_string(),
            pairs: canonical_pairs(pairs),
            alpha,
            beta,
        };
        m.validate(space)?;
        Ok(m)
    }

    pub fn pairs(&self) -> &[(MatchEnd, MatchEnd, u64)] {
        &self.pairs
    }

    pub fn marginals(&self) -> (&Diagram, &Diagram) {
        (&self.alpha, &self.beta)
    }

    /// Checks the normal form and both marginal conditions.
    pub fn validate(&self, space: &Space) -> Result<()> {
        if self.space_id != space.id() {
            return Err(Error::SpaceMismatch {
                left: self.space_id.clone(),
                right: space.id().to_string(),
            });
        }
        self.alpha.check_space(space)?;
        self.beta.check_space(space)?;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (a, b, mult) in &self.pairs {
            if *mult == 0 {
                return Err(Error::InvalidMatching("zero multiplicity pair".into()));
            }
            if !a.is_free() && !b.is_free() {
                return Err(Error::InvalidMatching(
                    "pairs inside the subset must not be stored".into(),
                ));
            }
            for (end, bucket) in [(a, &mut left), (b, &mut right)] {
                match end {
                    MatchEnd::Free(p) => {
                        if space.in_subset(p)? {
                            return Err(Error::InvalidMatching(format!(
                                "{p:?} marked as a diagram dot but lies in the subset"
                            )));
                        }
                        bucket.push((p.clone(), *mult));
                    }
                    MatchEnd::Anchor(p) => {
                        if !space.in_subset(p)? {
                            return Err(Error::InvalidMatching(format!(
                                "anchor {p:?} does not lie in the subset"
                            )));
                        }
                    }
                    MatchEnd::Subset => {}
                }
            }
        }
        let left = Diagram::new(space, left)?;
        let right = Diagram::new(space, right)?;
        if left != self.alpha || right != self.beta {
            return Err(Error::InvalidMatching(
                "marginals do not match the declared diagrams".into(),
            ));
        }
        Ok(())
    }

    /// `||(d(x_i, y_i))_i||_p` over the stored pairs.
    pub fn cost(&self, space: &Space, p: PNorm) -> Result<ExtReal> {
        self.validate(space)?;
        let mut dists = Vec::with_capacity(self.pairs.len());
        for (a, b, mult) in &self.pairs {
            dists.push((pair_dist(space, a, b)?, *mult));
        }
        Ok(p.weighted_norm(dists))
    }

    /// The same matching read in the other direction.
    pub fn transposed(&self) -> Matching {
        Matching {
            space_id: self.space_id.clone(),
            pairs: canonical_pairs(
                self.pairs
                    .iter()
                    .map(|(a, b, m)| (b.clone(), a.clone(), *m))
                    .collect(),
            ),
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
        }
    }

    pub fn to_json(&self, space: &Space) -> Result<Value> {
        self.validate(space)?;
        Ok(Value::Array(
            self.pairs
                .iter()
                .map(|(a, b, mult)| {
                    json!({ "a": a.to_json(space), "b": b.to_json(space), "mult": mult })
                })
                .collect(),
        ))
    }

    /// Parses pair data and validates it against the given marginals.
    pub fn from_json(
        space: &Space,
        v: &Value,
        alpha: Diagram,
        beta: Diagram,
    ) -> Result<Matching> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::InvalidMatching("expected a JSON array".into()))?;
        let mut pairs = Vec::with_capacity(items.len());
        for item in items {
            let a = item
                .get("a")
                .ok_or_else(|| Error::InvalidMatching("pair missing `a`".into()))?;
            let b = item
                .get("b")
                .ok_or_else(|| Error::InvalidMatching("pair missing `b`".into()))?;
            let mult = item.get("mult").map_or(Some(1), Value::as_u64).ok_or_else(|| {
                Error::InvalidMatching("`mult` must be a positive integer".into())
            })?;
            pairs.push((
                MatchEnd::from_json(space, a)?,
                MatchEnd::from_json(space, b)?,
                mult,
            ));
        }
        Matching::new(space, pairs, alpha, beta)
    }
}

fn canonical_pairs(mut pairs: Vec<(MatchEnd, MatchEnd, u64)>) -> Vec<(MatchEnd, MatchEnd, u64)> {
    pairs.sort_by(|(a1, b1, _), (a2, b2, _)| a1.key_cmp(a2).then_with(|| b1.key_cmp(b2)));
    pairs.dedup_by(|next, prev| {
        if prev.0 == next.0 && prev.1 == next.1 {
            prev.2 += next.2;
            true
        } else {
            false
        }
    });
    pairs
}

fn pair_dist(space: &Space, a: &MatchEnd, b: &MatchEnd) -> Result<ExtReal> {
    match (a, b) {
        (MatchEnd::Free(x), MatchEnd::Free(y)) | (MatchEnd::Free(x), MatchEnd::Anchor(y)) => {
            space.dist(x, y)
        }
        (MatchEnd::Anchor(x), MatchEnd::Free(y)) => space.dist(x, y),
        (MatchEnd::Free(x), MatchEnd::Subset) | (MatchEnd::Subset, MatchEnd::Free(x)) => {
            space.dist_to_subset(x)
        }
        _ => Err(Error::InvalidMatching(
            "pairs inside the subset carry no cost and must not be stored".into(),
        )),
    }
}

/// The outcome of a Wasserstein computation.
#[derive(Clone, Debug)]
pub struct WassersteinResult {
    pub value: ExtReal,
    pub matching: Option<Matching>,
    /// Zero for exact finite inputs; the sum of tail bounds for truncations.
    pub error_bound: ExtReal,
    /// Whether `value` is attained by `matching` (true on distance-minimizing
    /// spaces; false when a deletion was priced at an unattained infimum).
    pub optimal: bool,
}

/// How a deletion is represented in the reported matching.
fn subset_end(space: &Space, x: &Point) -> MatchEnd {
    if space.capabilities().distance_minimizing {
        if let Ok((a, _)) = space.project_to_subset(x) {
            return MatchEnd::Anchor(a);
        }
    }
    MatchEnd::Subset
}

/// Exact p-Wasserstein distance between finite diagrams, with an explicit
/// matching. Infinite values are a result, not an error.
pub fn wasserstein(
    space: &Space,
    alpha: &Diagram,
    beta: &Diagram,
    p: PNorm,
) -> Result<WassersteinResult> {
    alpha.check_space(space)?;
    beta.check_space(space)?;
    alpha.check_same_space(beta)?;

    // identical diagrams: the identity matching is already optimal
    if alpha == beta {
        let pairs = alpha
            .entries()
            .iter()
            .map(|(pt, m)| (MatchEnd::Free(pt.clone()), MatchEnd::Free(pt.clone()), *m))
            .collect();
        return Ok(WassersteinResult {
            value: ExtReal::ZERO,
            matching: Some(Matching::new(space, pairs, alpha.clone(), beta.clone())?),
            error_bound: ExtReal::ZERO,
            optimal: true,
        });
    }

    // solve in a canonical orientation so the distance is exactly symmetric
    if diagram_key_cmp(alpha, beta) == Ordering::Greater {
        let mut result = wasserstein(space, beta, alpha, p)?;
        result.matching = result.matching.map(|m| m.transposed());
        return Ok(result);
    }

    // For p = 1 the triangle inequality makes matching shared dots to each
    // other optimal, so they can be cancelled up front. (Not sound for p > 1.)
    let mut fixed_pairs: Vec<(MatchEnd, MatchEnd, u64)> = Vec::new();
    let (a_entries, b_entries) = if p == PNorm::ONE {
        let (a, b, common) = cancel_common(alpha, beta);
        for (pt, m) in common {
            fixed_pairs.push((MatchEnd::Free(pt.clone()), MatchEnd::Free(pt), m));
        }
        (a, b)
    } else {
        (alpha.entries().to_vec(), beta.entries().to_vec())
    };

    let card_a: u64 = a_entries.iter().map(|&(_, m)| m).sum();
    let card_b: u64 = b_entries.iter().map(|&(_, m)| m).sum();

    // rows: dots of alpha plus the A-source supplying beta's creations;
    // cols: dots of beta plus the A-sink absorbing alpha's deletions
    let mut supply: Vec<u64> = a_entries.iter().map(|&(_, m)| m).collect();
    supply.push(card_b);
    let mut demand: Vec<u64> = b_entries.iter().map(|&(_, m)| m).collect();
    demand.push(card_a);
    let na = a_entries.len();
    let nb = b_entries.len();

    let ground = |i: usize, j: usize| -> Result<ExtReal> {
        Ok(match (i < na, j < nb) {
            (true, true) => space.dist(&a_entries[i].0, &b_entries[j].0)?,
            (true, false) => space.dist_to_subset(&a_entries[i].0)?,
            (false, true) => space.dist_to_subset(&b_entries[j].0)?,
            (false, false) => ExtReal::ZERO,
        })
    };

    // materialize up front so solver closures stay infallible
    let mut cost = vec![vec![ExtReal::ZERO; nb + 1]; na + 1];
    for (i, row) in cost.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = ground(i, j)?;
        }
    }

    let outcome = match p {
        PNorm::Infinity => solver::bottleneck_transport(&supply, &demand, |i, j| {
            let d = cost[i][j];
            d.is_finite().then(|| d.value())
        }),
        finite => {
            let out = solver::min_cost_transport(&supply, &demand, |i, j| {
                let d = cost[i][j];
                d.is_finite().then(|| finite.pow(d).value())
            });
            (out.routed == card_a + card_b).then_some(out)
        }
    };

    let shipments = match outcome {
        Some(out) => out.shipments,
        None => {
            // no finite-cost routing exists, so every matching is infinite;
            // the all-deletions matching is then itself optimal
            let mut pairs = fixed_pairs;
            for (pt, m) in &a_entries {
                pairs.push((MatchEnd::Free(pt.clone()), subset_end(space, pt), *m));
            }
            for (pt, m) in &b_entries {
                pairs.push((subset_end(space, pt), MatchEnd::Free(pt.clone()), *m));
            }
            let matching = Matching::new(space, pairs, alpha.clone(), beta.clone())?;
            return Ok(WassersteinResult {
                value: ExtReal::INFINITY,
                matching: Some(matching),
                error_bound: ExtReal::ZERO,
                optimal: true,
            });
        }
    };

    let mut pairs = fixed_pairs;
    let mut used_subset = false;
    for s in shipments {
        let pair = match (s.row < na, s.col < nb) {
            (true, true) => (
                MatchEnd::Free(a_entries[s.row].0.clone()),
                MatchEnd::Free(b_entries[s.col].0.clone()),
            ),
            (true, false) => {
                let end = subset_end(space, &a_entries[s.row].0);
                used_subset |= end == MatchEnd::Subset;
                (MatchEnd::Free(a_entries[s.row].0.clone()), end)
            }
            (false, true) => {
                let end = subset_end(space, &b_entries[s.col].0);
                used_subset |= end == MatchEnd::Subset;
                (end, MatchEnd::Free(b_entries[s.col].0.clone()))
            }
            (false, false) => continue, // free A-to-A slack
        };
        pairs.push((pair.0, pair.1, s.amount));
    }
    let matching = Matching::new(space, pairs, alpha.clone(), beta.clone())?;
    let value = matching.cost(space, p)?;
    Ok(WassersteinResult {
        value,
        matching: Some(matching),
        error_bound: ExtReal::ZERO,
        optimal: !used_subset,
    })
}

fn diagram_key_cmp(a: &Diagram, b: &Diagram) -> Ordering {
    let (xs, ys) = (a.entries(), b.entries());
    for ((p, m), (q, n)) in xs.iter().zip(ys) {
        match p.key_cmp(q).then(m.cmp(n)) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    xs.len().cmp(&ys.len())
}

type Entries = Vec<(Point, u64)>;

/// (remaining alpha, remaining beta, shared part)
fn cancel_common(alpha: &Diagram, beta: &Diagram) -> (Entries, Entries, Entries) {
    let mut a_rest = Vec::new();
    let mut b_rest = Vec::new();
    let mut common = Vec::new();
    let (a, b) = (alpha.entries(), beta.entries());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.key_cmp(&b[j].0) {
            Ordering::Less => {
                a_rest.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                b_rest.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let shared = a[i].1.min(b[j].1);
                common.push((a[i].0.clone(), shared));
                if a[i].1 > shared {
                    a_rest.push((a[i].0.clone(), a[i].1 - shared));
                }
                if b[j].1 > shared {
                    b_rest.push((b[j].0.clone(), b[j].1 - shared));
                }
                i += 1;
                j += 1;
            }
        }
    }
    a_rest.extend_from_slice(&a[i..]);
    b_rest.extend_from_slice(&b[j..]);
    (a_rest, b_rest, common)
}

pub const DEFAULT_BRUTE_CAP: u64 = 10;

/// Exhaustive minimum over all assignments of the augmented instance. The
/// independent oracle for the flow solver; capped at small cardinalities.
pub fn wasserstein_bruteforce(
    space: &Space,
    alpha: &Diagram,
    beta: &Diagram,
    p: PNorm,
) -> Result<WassersteinResult> {
    wasserstein_bruteforce_with_cap(space, alpha, beta, p, DEFAULT_BRUTE_CAP)
}

pub fn wasserstein_bruteforce_with_cap(
    space: &Space,
    alpha: &Diagram,
    beta: &Diagram,
    p: PNorm,
    cap: u64,
) -> Result<WassersteinResult> {
    let inst = BruteInstance::build(space, alpha, beta, cap)?;
    let (value_pow, assignment) = inst.solve(p);
    let (matching, used_subset) = inst.assemble(space, alpha, beta, &assignment)?;
    let value = match p {
        PNorm::Infinity => ExtReal::new(value_pow).unwrap_or(ExtReal::INFINITY),
        finite => finite.root(
            ExtReal::new(value_pow).unwrap_or(ExtReal::INFINITY),
        ),
    };
    Ok(WassersteinResult {
        value,
        matching: Some(matching),
        error_bound: ExtReal::ZERO,
        optimal: value.is_infinite() || !used_subset,
    })
}

/// Up to `limit` distinct optimal matchings, by exhaustive enumeration of
/// assignments tied with the optimum (within `1e-12`).
pub fn optimal_matchings(
    space: &Space,
    alpha: &Diagram,
    beta: &Diagram,
    p: PNorm,
    limit: usize,
) -> Result<Vec<Matching>> {
    let inst = BruteInstance::build(space, alpha, beta, DEFAULT_BRUTE_CAP)?;
    let (best_pow, _) = inst.solve(p);
    if !best_pow.is_finite() {
        return Ok(Vec::new());
    }
    let best_value = match p {
        PNorm::Infinity => best_pow,
        finite => finite.root(ExtReal::from_nonneg(best_pow)).value(),
    };
    let bound_pow = match p {
        PNorm::Infinity => best_value + 1e-12,
        finite => finite.pow(ExtReal::from_nonneg(best_value + 1e-12)).value(),
    };
    let mut matchings: Vec<Matching> = Vec::new();
    let size = inst.size;
    if size == 0 {
        let (m, _) = inst.assemble(space, alpha, beta, &[])?;
        return Ok(vec![m]);
    }
    let mut assignment = vec![usize::MAX; size];
    let mut used = vec![false; size];
    let mut stack_cost = vec![0.0f64; size + 1];
    let mut depth = 0usize;
    let mut next_col = vec![0usize; size];
    // iterative DFS over assignments in lexicographic order
    while matchings.len() < limit {
        if depth == size {
            let total = stack_cost[depth];
            let val = match p {
                PNorm::Infinity => total,
                finite => finite.root(ExtReal::from_nonneg(total)).value(),
            };
            if (val - best_value).abs() <= 1e-12 * best_value.max(1.0) {
                let (m, _) = inst.assemble(space, alpha, beta, &assignment)?;
                if !matchings.contains(&m) {
                    matchings.push(m);
                }
            }
            depth -= 1;
            used[assignment[depth]] = false;
            continue;
        }
        let mut advanced = false;
        while next_col[depth] < size {
            let j = next_col[depth];
            next_col[depth] += 1;
            if used[j] {
                continue;
            }
            let c = inst.cost_pow(p, depth, j);
            let total = match p {
                PNorm::Infinity => stack_cost[depth].max(c),
                _ => stack_cost[depth] + c,
            };
            if total <= bound_pow {
                assignment[depth] = j;
                used[j] = true;
                depth += 1;
                stack_cost[depth] = total;
                if depth < size {
                    next_col[depth] = 0;
                }
                advanced = true;
                break;
            }
        }
        if !advanced {
            if depth == 0 {
                break;
            }
            next_col[depth] = 0;
            depth -= 1;
            used[assignment[depth]] = false;
        }
    }
    Ok(matchings)
}

struct BruteInstance {
    xs: Vec<Point>,
    ys: Vec<Point>,
    size: usize,
    /// ground distances over the augmented square
    dist: Vec<Vec<ExtReal>>,
}

impl BruteInstance {
    fn build(space: &Space, alpha: &Diagram, beta: &Diagram, cap: u64) -> Result<BruteInstance> {
        alpha.check_space(space)?;
        beta.check_space(space)?;
        let total = alpha.cardinality() + beta.cardinality();
        if total > cap {
            return Err(Error::CardinalityCap { got: total, cap });
        }
        let expand = |d: &Diagram| -> Vec<Point> {
            d.entries()
                .iter()
                .flat_map(|(pt, m)| std::iter::repeat_n(pt.clone(), *m as usize))
                .collect()
        };
        let xs = expand(alpha);
        let ys = expand(beta);
        let (m, n) = (xs.len(), ys.len());
        let size = m + n;
        let mut dist = vec![vec![ExtReal::ZERO; size]; size];
        for i in 0..size {
            for j in 0..size {
                dist[i][j] = match (i < m, j < n) {
                    (true, true) => space.dist(&xs[i], &ys[j])?,
                    (true, false) => space.dist_to_subset(&xs[i])?,
                    (false, true) => space.dist_to_subset(&ys[j])?,
                    (false, false) => ExtReal::ZERO,
                };
            }
        }
        Ok(BruteInstance { xs, ys, size, dist })
    }

    fn cost_pow(&self, p: PNorm, i: usize, j: usize) -> f64 {
        match p {
            PNorm::Infinity => self.dist[i][j].value(),
            finite => finite.pow(self.dist[i][j]).value(),
        }
    }

    /// Exact optimum over all assignments by subset dynamic programming,
    /// with a deterministic reconstructed assignment.
    fn solve(&self, p: PNorm) -> (f64, Vec<usize>) {
        let size = self.size;
        if size == 0 {
            return (0.0, Vec::new());
        }
        let full = 1usize << size;
        let combine = |acc: f64, c: f64| match p {
            PNorm::Infinity => acc.max(c),
            _ => acc + c,
        };
        let mut dp = vec![f64::INFINITY; full];
        dp[0] = 0.0;
        for mask in 1..full {
            let row = (mask as u32).count_ones() as usize - 1;
            let mut best = f64::INFINITY;
            let mut rest = mask;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let prev = dp[mask ^ (1 << j)];
                if prev.is_finite() {
                    let cand = combine(prev, self.cost_pow(p, row, j));
                    if cand < best {
                        best = cand;
                    }
                }
            }
            dp[mask] = best;
        }
        let mut assignment = vec![usize::MAX; size];
        let mut mask = full - 1;
        for row in (0..size).rev() {
            let mut chosen = usize::MAX;
            let mut rest = mask;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let prev = dp[mask ^ (1 << j)];
                if prev.is_finite() && combine(prev, self.cost_pow(p, row, j)) == dp[mask] {
                    chosen = j;
                    break;
                }
            }
            if chosen == usize::MAX {
                // unreachable optimum means the value is infinite; fall back
                // to pairing slots in order
                chosen = mask.trailing_zeros() as usize;
            }
            assignment[row] = chosen;
            mask ^= 1 << chosen;
        }
        (dp[full - 1], assignment)
    }

    fn assemble(
        &self,
        space: &Space,
        alpha: &Diagram,
        beta: &Diagram,
        assignment: &[usize],
    ) -> Result<(Matching, bool)> {
        let (m, n) = (self.xs.len(), self.ys.len());
        let mut pairs = Vec::new();
        let mut used_subset = false;
        for (i, &j) in assignment.iter().enumerate() {
            let pair = match (i < m, j < n) {
                (true, true) => (
                    MatchEnd::Free(self.xs[i].clone()),
                    MatchEnd::Free(self.ys[j].clone()),
                ),
                (true, false) => {
                    let end = subset_end(space, &self.xs[i]);
                    used_subset |= end == MatchEnd::Subset;
                    (MatchEnd::Free(self.xs[i].clone()), end)
                }
                (false, true) => {
                    let end = subset_end(space, &self.ys[j]);
                    used_subset |= end == MatchEnd::Subset;
                    (end, MatchEnd::Free(self.ys[j].clone()))
                }
                (false, false) => continue,
            };
            pairs.push((pair.0, pair.1, 1));
        }
        Ok((
            Matching::new(space, pairs, alpha.clone(), beta.clone())?,
            used_subset,
        ))
    }
}

/// Wasserstein distance between truncated diagrams: the head distance with a
/// triangle-inequality error bracket from the two tail bounds.
pub fn wasserstein_truncated(
    space: &Space,
    alpha: &TruncatedDiagram,
    beta: &TruncatedDiagram,
    p: PNorm,
) -> Result<WassersteinResult> {
    for t in [alpha, beta] {
        if t.tail_exponent != p && !t.tail_bound.is_zero() {
            return Err(Error::InvalidArgument(format!(
                "tail bound certified for p = {}, requested p = {}",
                t.tail_exponent, p
            )));
        }
    }
    let mut result = wasserstein(space, &alpha.head, &beta.head, p)?;
    result.error_bound = alpha.tail_bound + beta.tail_bound;
    Ok(result)
}

/// Lower bound on `W_p(alpha, beta)` from the cardinality gap: the trailing
/// `|alpha| - |beta|` dots nearest to `A` must be deleted by any matching.
pub fn card_mismatch_lower_bound(
    space: &Space,
    alpha: &Diagram,
    beta: &Diagram,
    p: PNorm,
) -> Result<ExtReal> {
    alpha.check_space(space)?;
    beta.check_space(space)?;
    let (ca, cb) = (alpha.cardinality(), beta.cardinality());
    if cb >= ca {
        return Err(Error::InvalidArgument(format!(
            "requires |beta| < |alpha|, got {cb} >= {ca}"
        )));
    }
    let mut dists: Vec<(ExtReal, u64)> = Vec::with_capacity(alpha.entries().len());
    for (pt, m) in alpha.entries() {
        dists.push((space.dist_to_subset(pt)?, *m));
    }
    dists.sort_by_key(|&(d, _)| d);
    let mut need = ca - cb;
    let mut tail = Vec::new();
    for (d, m) in dists {
        if need == 0 {
            break;
        }
        let take = m.min(need);
        tail.push((d, take));
        need -= take;
    }
    Ok(p.weighted_norm(tail))
}

/// Deletion costs of the single dot of the wedge-of-intervals gallery
/// instance: matching the glue point to the k-th anchor costs `1 + 1/k`,
/// so the infimum 1 is approached but never attained.
pub fn infimum_gap_demo(k_max: u64) -> Result<Vec<(u64, f64)>> {
    let space = crate::space::make_space("wedge_intervals")?;
    let wedge = Point::arc(1, 0.0);
    let mut out = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let anchor = Point::arc(k, 1.0 + 1.0 / k as f64);
        out.push((k, space.dist(&wedge, &anchor)?.value()));
    }
    Ok(out)
}
