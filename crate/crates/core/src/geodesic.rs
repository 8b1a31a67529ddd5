//! Geodesics in diagram space, path lengths, the comparison inequality, and
//! lifted deformation retractions.
//!
//! An optimal matching induces a geodesic: move every matched pair along a
//! constant-speed geodesic of the underlying space, all at once. Deleted dots
//! slide to their nearest point of `A` and vanish there. When two distinct
//! optimal matchings exist, the induced geodesics differ, so geodesics are
//! not unique.
//!
//! Moving the dots one at a time instead (each pair on its own time slice)
//! also realizes the distance, but only for p = 1; that construction is
//! [`sequential_geodesic`]. For p > 1 the cardinality-constrained spaces fail
//! to be length spaces at all, and the l1 half-plane example documents it.

use crate::diagram::Diagram;
use crate::ext::{ExtReal, PNorm};
use crate::matching::{wasserstein, MatchEnd, Matching, WassersteinResult};
use crate::space::{Point, Space};
use crate::{Error, Result};

/// Anything evaluable as a path of diagrams over `[0, 1]`.
pub trait DiagramPath {
    fn space(&self) -> &Space;
    fn exponent(&self) -> PNorm;
    fn eval(&self, t: f64) -> Result<Diagram>;
}

/// A constant-speed geodesic from an optimal matching.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    space: Space,
    p: PNorm,
    matching: Matching,
    /// matched pairs with deletions resolved to concrete points of `A`
    tracks: Vec<(Point, Point, u64)>,
    length: ExtReal,
}

impl GeodesicPath {
    pub fn length(&self) -> ExtReal {
        self.length
    }

    pub fn matching(&self) -> &Matching {
        &self.matching
    }
}

impl DiagramPath for GeodesicPath {
    fn space(&self) -> &Space {
        &self.space
    }

    fn exponent(&self) -> PNorm {
        self.p
    }

    fn eval(&self, t: f64) -> Result<Diagram> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("t must lie in [0,1], got {t}")));
        }
        let mut points = Vec::new();
        for (x, y, mult) in &self.tracks {
            let pt = self.space.geodesic_point(x, y, t)?;
            if !self.space.in_subset(&pt)? {
                points.push((pt, *mult));
            }
        }
        Diagram::new(&self.space, points)
    }
}

fn require_geodesic_caps(space: &Space) -> Result<()> {
    let caps = space.capabilities();
    if !caps.geodesic {
        return Err(Error::CapabilityMissing {
            space: space.id().to_string(),
            capability: "geodesics",
        });
    }
    if !caps.distance_minimizing {
        return Err(Error::CapabilityMissing {
            space: space.id().to_string(),
            capability: "distance minimizing subset",
        });
    }
    Ok(())
}

fn resolve_tracks(space: &Space, matching: &Matching) -> Result<Vec<(Point, Point, u64)>> {
    let mut tracks = Vec::with_capacity(matching.pairs().len());
    for (a, b, mult) in matching.pairs() {
        let pair = match (a, b) {
            (MatchEnd::Free(x), MatchEnd::Free(y))
            | (MatchEnd::Free(x), MatchEnd::Anchor(y))
            | (MatchEnd::Anchor(x), MatchEnd::Free(y)) => (x.clone(), y.clone()),
            _ => {
                return Err(Error::CapabilityMissing {
                    space: space.id().to_string(),
                    capability: "nearest-point projection for every matched pair",
                })
            }
        };
        tracks.push((pair.0, pair.1, *mult));
    }
    Ok(tracks)
}

fn path_from_result(
    space: &Space,
    p: PNorm,
    result: WassersteinResult,
) -> Result<GeodesicPath> {
    if result.value.is_infinite() {
        return Err(Error::InfiniteDistance(
            "no geodesic between diagrams at infinite distance".to_string(),
        ));
    }
    let matching = result.matching.expect("solver always returns a witness");
    let tracks = resolve_tracks(space, &matching)?;
    Ok(GeodesicPath {
        space: space.clone(),
        p,
        matching,
        tracks,
        length: result.value,
    })
}

/// The geodesic from `alpha` to `beta` induced by an optimal matching.
pub fn geodesic(space: &Space, alpha: &Diagram, beta: &Diagram, p: PNorm) -> Result<GeodesicPath> {
    require_geodesic_caps(space)?;
    let result = wasserstein(space, alpha, beta, p)?;
    path_from_result(space, p, result)
}

/// Up to `max_count` geodesics induced by distinct optimal matchings.
/// Paths whose midpoints differ witness non-uniqueness of geodesics.
pub fn distinct_geodesics(
    space: &Space,
    alpha: &Diagram,
    beta: &Diagram,
    p: PNorm,
    max_count: usize,
) -> Result<Vec<GeodesicPath>> {
    require_geodesic_caps(space)?;
    let matchings = crate::matching::optimal_matchings(space, alpha, beta, p, max_count)?;
    let mut paths = Vec::with_capacity(matchings.len());
    for matching in matchings {
        let value = matching.cost(space, p)?;
        if value.is_infinite() {
            continue;
        }
        let tracks = resolve_tracks(space, &matching)?;
        paths.push(GeodesicPath {
            space: space.clone(),
            p,
            matching,
            tracks,
            length: value,
        });
    }
    Ok(paths)
}

/// Length of a path along the uniform `n`-partition: the sum of Wasserstein
/// distances between consecutive samples. Nondecreasing under refinement,
/// and equal to `W_p(alpha, beta)` on geodesics.
pub fn path_length(path: &dyn DiagramPath, n: usize) -> Result<ExtReal> {
    if n == 0 {
        return Err(Error::InvalidArgument("partition size must be >= 1".to_string()));
    }
    let space = path.space();
    let p = path.exponent();
    let mut total = ExtReal::ZERO;
    let mut prev = path.eval(0.0)?;
    for i in 1..=n {
        let next = path.eval(i as f64 / n as f64)?;
        total = total + wasserstein(space, &prev, &next, p)?.value;
        prev = next;
    }
    Ok(total)
}

/// The move-one-dot-at-a-time geodesic for `W_1`: pairs are traversed on
/// consecutive time slices proportional to their lengths, dots off `A` first.
/// Stays inside the cardinality-constrained space at every time.
#[derive(Clone, Debug)]
pub struct SequentialPath {
    space: Space,
    /// legs in traversal order, with cumulative fractions of total length
    legs: Vec<(Point, Point, u64, f64, f64)>,
    length: ExtReal,
}

impl SequentialPath {
    pub fn length(&self) -> ExtReal {
        self.length
    }
}

impl DiagramPath for SequentialPath {
    fn space(&self) -> &Space {
        &self.space
    }

    fn exponent(&self) -> PNorm {
        PNorm::ONE
    }

    fn eval(&self, t: f64) -> Result<Diagram> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("t must lie in [0,1], got {t}")));
        }
        let mut points = Vec::new();
        for &(ref x, ref y, mult, start, end) in &self.legs {
            let pt = if t >= end {
                y.clone()
            } else if t <= start {
                x.clone()
            } else {
                self.space.geodesic_point(x, y, (t - start) / (end - start))?
            };
            if !self.space.in_subset(&pt)? {
                points.push((pt, mult));
            }
        }
        Diagram::new(&self.space, points)
    }
}

/// Builds the sequential `W_1` geodesic from an optimal matching.
pub fn sequential_geodesic(
    space: &Space,
    alpha: &Diagram,
    beta: &Diagram,
) -> Result<SequentialPath> {
    require_geodesic_caps(space)?;
    let result = wasserstein(space, alpha, beta, PNorm::ONE)?;
    if result.value.is_infinite() {
        return Err(Error::InfiniteDistance(
            "no geodesic between diagrams at infinite distance".to_string(),
        ));
    }
    let matching = result.matching.expect("solver always returns a witness");
    let mut tracks = resolve_tracks(space, &matching)?;
    // dots of alpha move before dots created from A
    tracks.sort_by_key(|(x, _, _)| space.in_subset(x).unwrap_or(false));
    // multiplicities move one copy at a time
    let mut singles: Vec<(Point, Point)> = Vec::new();
    for (x, y, mult) in tracks {
        for _ in 0..mult {
            singles.push((x.clone(), y.clone()));
        }
    }
    let total = result.value.value();
    let mut legs = Vec::with_capacity(singles.len());
    let mut acc = 0.0;
    for (x, y) in singles {
        let d = space.dist(&x, &y)?.value();
        if d == 0.0 {
            // stationary dots occupy no time slice and only flip at the end
            legs.push((x, y, 1, 1.0, 1.0));
            continue;
        }
        let start = acc / total;
        acc += d;
        let end = (acc / total).min(1.0);
        legs.push((x, y, 1, start, end));
    }
    Ok(SequentialPath {
        space: space.clone(),
        legs,
        length: result.value,
    })
}

/// The nonnegative-curvature comparison residual at `W_2`:
///
/// `W2(xi, g(t))^2 - [ t W2(xi, beta)^2 + (1-t) W2(xi, alpha)^2
///                     - t(1-t) W2(alpha, beta)^2 ]`
///
/// Nonnegative (up to float noise) on spaces flagged `nonneg_curvature`.
/// Exponents other than 2 are rejected, not approximated.
pub fn alexandrov_residual(
    space: &Space,
    alpha: &Diagram,
    beta: &Diagram,
    xi: &Diagram,
    t: f64,
    p: PNorm,
) -> Result<f64> {
    if p != PNorm::TWO {
        return Err(Error::InvalidExponent(format!(
            "the comparison inequality is a W_2 statement, got p = {p}"
        )));
    }
    if !space.capabilities().nonneg_curvature {
        return Err(Error::CapabilityMissing {
            space: space.id().to_string(),
            capability: "nonnegative curvature",
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t must lie in [0,1], got {t}")));
    }
    let path = geodesic(space, alpha, beta, PNorm::TWO)?;
    let mid = path.eval(t)?;
    let w = |a: &Diagram, b: &Diagram| -> Result<f64> {
        let v = wasserstein(space, a, b, PNorm::TWO)?.value;
        if v.is_infinite() {
            return Err(Error::InfiniteDistance(
                "comparison requires finite distances".to_string(),
            ));
        }
        Ok(v.value())
    };
    let d_mid = w(xi, &mid)?;
    let d_b = w(xi, beta)?;
    let d_a = w(xi, alpha)?;
    let d_ab = path.length().value();
    Ok(d_mid * d_mid - (t * d_b * d_b + (1.0 - t) * d_a * d_a - t * (1.0 - t) * d_ab * d_ab))
}

/// Applies a deformation retraction `H` of a pointed space dotwise:
/// `alpha` maps to the sum of `H(x_i, t)`, dots landing at the base point
/// vanishing. `H` must satisfy `H(x, 0) = x`, `H(x, 1) = x0`, `H(x0, s) = x0`.
pub fn retract_diagram<H>(space: &Space, retraction: H, alpha: &Diagram, t: f64) -> Result<Diagram>
where
    H: Fn(&Point, f64) -> Result<Point>,
{
    alpha.check_space(space)?;
    if space.base_point().is_none() {
        return Err(Error::CapabilityMissing {
            space: space.id().to_string(),
            capability: "base point (pointed space)",
        });
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("t must lie in [0,1], got {t}")));
    }
    let mut points = Vec::new();
    for (x, mult) in alpha.entries() {
        let image = retraction(x, t)?;
        space.validate(&image)?;
        if !space.in_subset(&image)? {
            points.push((image, *mult));
        }
    }
    Diagram::new(space, points)
}

/// The straight-line contraction of a pointed geodesic space: each point
/// slides along a geodesic to the base point. Lipschitz at the base with
/// constant 1, so it lifts to every `W_p`.
pub fn straight_line_retraction(space: &Space) -> Result<impl Fn(&Point, f64) -> Result<Point> + '_> {
    let base = space.base_point().ok_or_else(|| Error::CapabilityMissing {
        space: space.id().to_string(),
        capability: "base point (pointed space)",
    })?;
    if !space.capabilities().geodesic {
        return Err(Error::CapabilityMissing {
            space: space.id().to_string(),
            capability: "geodesics",
        });
    }
    Ok(move |x: &Point, t: f64| space.geodesic_point(x, &base, t))
}
