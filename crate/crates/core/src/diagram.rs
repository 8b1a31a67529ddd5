//! Persistence diagrams: finite formal sums of points off the subset `A`,
//! with positive integer multiplicities.
//!
//! Diagrams form a commutative monoid under addition. They are kept in a
//! canonical form (entries sorted, duplicates merged) so equality is decidable
//! and deterministic. Countable diagrams are represented by a finite head plus
//! a certified tail bound ([`TruncatedDiagram`]): every computation on the
//! essentially p-finite diagrams factors through such truncations, with the
//! bound feeding straight into error brackets.

use serde_json::{json, Value};

use crate::ext::{ExtReal, PNorm};
use crate::space::{Point, Space};
use crate::{Error, Result};

/// A finite persistence diagram in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagram {
    space_id: String,
    entries: Vec<(Point, u64)>,
}

impl Diagram {
    pub fn empty(space: &Space) -> Diagram {
        Diagram {
            space_id: space.id().to_string(),
            entries: Vec::new(),
        }
    }

    /// Builds a diagram, validating every point against the space and
    /// rejecting points of `A` (the quotient identifies them with zero).
    pub fn new<I>(space: &Space, points: I) -> Result<Diagram>
    where
        I: IntoIterator<Item = (Point, u64)>,
    {
        let mut entries: Vec<(Point, u64)> = Vec::new();
        for (point, mult) in points {
            space.validate(&point)?;
            if mult == 0 {
                return Err(Error::InvalidDiagram(
                    "multiplicities must be positive".to_string(),
                ));
            }
            if space.in_subset(&point)? {
                return Err(Error::InvalidDiagram(format!(
                    "point {point:?} lies in the distinguished subset"
                )));
            }
            entries.push((point, mult));
        }
        canonicalize(&mut entries);
        Ok(Diagram {
            space_id: space.id().to_string(),
            entries,
        })
    }

    /// Convenience constructor with unit multiplicities.
    pub fn from_points<I>(space: &Space, points: I) -> Result<Diagram>
    where
        I: IntoIterator<Item = Point>,
    {
        Diagram::new(space, points.into_iter().map(|p| (p, 1)))
    }

    pub fn space_id(&self) -> &str {
        &self.space_id
    }

    pub fn entries(&self) -> &[(Point, u64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total number of dots, counted with multiplicity.
    pub fn cardinality(&self) -> u64 {
        self.entries.iter().map(|&(_, m)| m).sum()
    }

    /// Monoid addition: multiset union with summed multiplicities.
    pub fn add(&self, other: &Diagram) -> Result<Diagram> {
        self.check_same_space(other)?;
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        canonicalize(&mut entries);
        Ok(Diagram {
            space_id: self.space_id.clone(),
            entries,
        })
    }

    /// The entries at subset-distance `>= delta`.
    pub fn upper_part(&self, space: &Space, delta: f64) -> Result<Diagram> {
        self.split_at(space, delta).map(|(upper, _)| upper)
    }

    /// The entries at subset-distance `< delta` (all diagram points are off
    /// `A` by construction, so membership needs no second check).
    pub fn lower_part(&self, space: &Space, delta: f64) -> Result<Diagram> {
        self.split_at(space, delta).map(|(_, lower)| lower)
    }

    /// Splits into (upper, lower) parts at scale `delta`; their sum is `self`.
    pub fn split_at(&self, space: &Space, delta: f64) -> Result<(Diagram, Diagram)> {
        self.check_space(space)?;
        if delta.is_nan() || delta <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "scale must be positive, got {delta}"
            )));
        }
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for (point, mult) in &self.entries {
            if space.dist_to_subset(point)?.value() >= delta {
                upper.push((point.clone(), *mult));
            } else {
                lower.push((point.clone(), *mult));
            }
        }
        Ok((
            Diagram { space_id: self.space_id.clone(), entries: upper },
            Diagram { space_id: self.space_id.clone(), entries: lower },
        ))
    }

    /// `||(d(x_i, A))_i||_p` with multiplicity. Coincides with the Wasserstein
    /// distance to the empty diagram.
    pub fn persistence_norm(&self, space: &Space, p: PNorm) -> Result<ExtReal> {
        self.check_space(space)?;
        let mut dists = Vec::with_capacity(self.entries.len());
        for (point, mult) in &self.entries {
            dists.push((space.dist_to_subset(point)?, *mult));
        }
        Ok(p.weighted_norm(dists))
    }

    pub(crate) fn check_space(&self, space: &Space) -> Result<()> {
        if self.space_id != space.id() {
            return Err(Error::SpaceMismatch {
                left: self.space_id.clone(),
                right: space.id().to_string(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_same_space(&self, other: &Diagram) -> Result<()> {
        if self.space_id != other.space_id {
            return Err(Error::SpaceMismatch {
                left: self.space_id.clone(),
                right: other.space_id.clone(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self, space: &Space) -> Result<Value> {
        self.check_space(space)?;
        let points: Vec<Value> = self
            .entries
            .iter()
            .map(|(pt, mult)| json!({ "pt": space.point_to_json(pt), "mult": mult }))
            .collect();
        Ok(json!({ "space": self.space_id, "points": points }))
    }

    pub fn from_json(space: &Space, v: &Value) -> Result<Diagram> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidDiagram("expected a JSON object".to_string()))?;
        if let Some(id) = obj.get("space").and_then(Value::as_str) {
            if id != space.id() {
                return Err(Error::SpaceMismatch {
                    left: id.to_string(),
                    right: space.id().to_string(),
                });
            }
        }
        let points = obj
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidDiagram("missing `points` array".to_string()))?;
        let mut entries = Vec::with_capacity(points.len());
        for item in points {
            let pt = item
                .get("pt")
                .ok_or_else(|| Error::InvalidDiagram("point entry missing `pt`".to_string()))?;
            let mult = item.get("mult").map_or(Some(1), Value::as_u64).ok_or_else(|| {
                Error::InvalidDiagram("`mult` must be a positive integer".to_string())
            })?;
            entries.push((space.point_from_json(pt)?, mult));
        }
        Diagram::new(space, entries)
    }
}

fn canonicalize(entries: &mut Vec<(Point, u64)>) {
    entries.sort_by(|(a, _), (b, _)| a.key_cmp(b));
    entries.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 += b.1;
            true
        } else {
            false
        }
    });
}

/// A countable diagram known through a finite head and a certified tail:
/// the represented diagram differs from `head` by a remainder at
/// p-Wasserstein distance at most `tail_bound` from zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedDiagram {
    pub head: Diagram,
    pub tail_bound: ExtReal,
    pub tail_exponent: PNorm,
}

impl TruncatedDiagram {
    pub fn new(head: Diagram, tail_bound: ExtReal, tail_exponent: PNorm) -> TruncatedDiagram {
        TruncatedDiagram { head, tail_bound, tail_exponent }
    }

    /// An exact finite diagram viewed as a truncation with zero tail.
    pub fn exact(head: Diagram, p: PNorm) -> TruncatedDiagram {
        TruncatedDiagram::new(head, ExtReal::ZERO, p)
    }

    pub fn to_json(&self, space: &Space) -> Result<Value> {
        let mut v = self.head.to_json(space)?;
        if !self.tail_bound.is_zero() {
            v["tail"] = json!({
                "p": self.tail_exponent,
                "bound": self.tail_bound.value(),
            });
        }
        Ok(v)
    }

    pub fn from_json(space: &Space, v: &Value) -> Result<TruncatedDiagram> {
        let head = Diagram::from_json(space, v)?;
        match v.get("tail") {
            None => Ok(TruncatedDiagram::exact(head, PNorm::Infinity)),
            Some(tail) => {
                let p: PNorm = serde_json::from_value(tail.get("p").cloned().ok_or_else(
                    || Error::InvalidDiagram("tail missing `p`".to_string()),
                )?)
                .map_err(|e| Error::InvalidDiagram(format!("tail exponent: {e}")))?;
                let bound = tail
                    .get("bound")
                    .and_then(Value::as_f64)
                    .ok_or_else(|| Error::InvalidDiagram("tail missing `bound`".to_string()))?;
                Ok(TruncatedDiagram::new(head, ExtReal::new(bound)?, p))
            }
        }
    }
}

/// One scale of an essential-p-finiteness witness report.
#[derive(Clone, Debug)]
pub struct PFiniteScale {
    pub epsilon: f64,
    /// `|u_eps(head)|`, always finite for truncated data.
    pub upper_count: u64,
    /// Bound on the p-norm of the part below `eps`, head plus tail.
    pub lower_norm_bound: ExtReal,
}

/// Documents the finiteness witnesses of a truncated diagram at the given
/// scales. The represented diagram is essentially p-finite by construction;
/// this report records the numbers that certify it.
pub fn check_essentially_p_finite(
    space: &Space,
    diagram: &TruncatedDiagram,
    epsilons: &[f64],
) -> Result<Vec<PFiniteScale>> {
    diagram.head.check_space(space)?;
    let p = diagram.tail_exponent;
    let mut out = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let (upper, lower) = diagram.head.split_at(space, eps)?;
        let head_lower = lower.persistence_norm(space, p)?;
        out.push(PFiniteScale {
            epsilon: eps,
            upper_count: upper.cardinality(),
            lower_norm_bound: p.norm2(head_lower, diagram.tail_bound),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::make_space;

    fn pt(b: f64, d: f64) -> Point {
        Point::coords([b, d])
    }

    #[test]
    fn addition_merges_multiplicities() {
        let s = make_space("halfplane:linf").unwrap();
        let a = Diagram::from_points(&s, [pt(0.0, 2.0)]).unwrap();
        let sum = a.add(&a).unwrap();
        assert_eq!(sum.entries(), &[(pt(0.0, 2.0), 2)]);
        assert_eq!(sum.cardinality(), 2);

        let zero = Diagram::empty(&s);
        assert_eq!(a.add(&zero).unwrap(), a);

        let b = Diagram::from_points(&s, [pt(1.0, 3.0)]).unwrap();
        let ab = a.add(&b).unwrap();
        assert_eq!(ab.entries().len(), 2);
        assert_eq!(ab, b.add(&a).unwrap());
    }

    #[test]
    fn construction_rejects_subset_points_and_zero_multiplicity() {
        let s = make_space("halfplane:linf").unwrap();
        assert!(matches!(
            Diagram::from_points(&s, [pt(3.0, 3.0)]),
            Err(Error::InvalidDiagram(_))
        ));
        assert!(matches!(
            Diagram::new(&s, [(pt(0.0, 2.0), 0)]),
            Err(Error::InvalidDiagram(_))
        ));
    }

    #[test]
    fn space_mismatch_is_an_error() {
        let s1 = make_space("halfplane:linf").unwrap();
        let s2 = make_space("halfplane:l1").unwrap();
        let a = Diagram::from_points(&s1, [pt(0.0, 2.0)]).unwrap();
        let b = Diagram::from_points(&s2, [pt(0.0, 2.0)]).unwrap();
        assert!(matches!(a.add(&b), Err(Error::SpaceMismatch { .. })));
        assert!(matches!(
            a.persistence_norm(&s2, PNorm::ONE),
            Err(Error::SpaceMismatch { .. })
        ));
    }

    #[test]
    fn upper_lower_partition() {
        let s = make_space("halfplane:linf").unwrap();
        let a = Diagram::from_points(&s, [pt(0.0, 2.0), pt(0.0, 8.0)]).unwrap();
        let (u, l) = a.split_at(&s, 2.0).unwrap();
        assert_eq!(u.entries(), &[(pt(0.0, 8.0), 1)]);
        assert_eq!(l.entries(), &[(pt(0.0, 2.0), 1)]);
        assert_eq!(u.add(&l).unwrap(), a);

        // every entry at distance >= delta for small delta
        let (u, l) = a.split_at(&s, 1e-9).unwrap();
        assert_eq!(u, a);
        assert!(l.is_empty());

        let zero = Diagram::empty(&s);
        let (u, l) = zero.split_at(&s, 1.0).unwrap();
        assert!(u.is_empty() && l.is_empty());
    }

    #[test]
    fn persistence_norm_values() {
        let s = make_space("halfplane:linf").unwrap();
        let a = Diagram::from_points(&s, [pt(0.0, 2.0), pt(0.0, 4.0)]).unwrap();
        assert_eq!(a.persistence_norm(&s, PNorm::ONE).unwrap().value(), 3.0);
        assert_eq!(a.persistence_norm(&s, PNorm::Infinity).unwrap().value(), 2.0);
        let zero = Diagram::empty(&s);
        assert!(zero.persistence_norm(&s, PNorm::TWO).unwrap().is_zero());
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let s = make_space("halfplane:linf").unwrap();
        let a = Diagram::new(&s, [(pt(0.0, 2.0), 3), (pt(-1.5, f64::INFINITY), 1)]).unwrap();
        let v = a.to_json(&s).unwrap();
        let back = Diagram::from_json(&s, &v).unwrap();
        assert_eq!(a, back);

        let t = TruncatedDiagram::new(a, ExtReal::new(0.25).unwrap(), PNorm::ONE);
        let v = t.to_json(&s).unwrap();
        let back = TruncatedDiagram::from_json(&s, &v).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn p_finiteness_witnesses() {
        let s = make_space("halfplane:linf").unwrap();
        let head = Diagram::from_points(&s, [pt(0.0, 2.0)]).unwrap();
        let t = TruncatedDiagram::new(head, ExtReal::new(0.1).unwrap(), PNorm::ONE);
        let report = check_essentially_p_finite(&s, &t, &[1.0]).unwrap();
        assert_eq!(report[0].upper_count, 1);
        assert!(report[0].lower_norm_bound.value() <= 0.1 + 1e-15);

        let zero = TruncatedDiagram::exact(Diagram::empty(&s), PNorm::ONE);
        let report = check_essentially_p_finite(&s, &zero, &[1.0, 0.5]).unwrap();
        assert!(report.iter().all(|r| r.upper_count == 0 && r.lower_norm_bound.is_zero()));
    }
}
