//! Metric pairs `(X, d, A)` and the built-in example spaces.
//!
//! A metric pair is a set with an extended pseudometric and a distinguished
//! closed subset `A`. Points of `A` are "free": deleting a diagram point costs
//! its distance to `A`. Built-ins:
//!
//! * `halfplane:l1 | l2 | linf` — birth/death pairs `(b, d)` with `b <= d`,
//!   ground metric the q-norm, `A` the diagonal. Under `linf`, coordinates may
//!   be infinite (points such as `(b, inf)` are admitted and `(b, inf)` is at
//!   finite distance from `(b', inf)`); under `l1`/`l2` an infinite coordinate
//!   makes every distance to a distinct point infinite.
//! * `pointed_euclidean:<k>` — `R^k` with the Euclidean metric, `A` the origin
//!   (or a custom base point).
//! * `ray` — `[0, inf)` with `|x - y|`, `A = {0}`.
//! * `wedge_circles` — circles of radius `n` glued at a point, arc-length
//!   metric; the gallery space with an essentially-finite diagram at
//!   `W_1`-distance `pi^3/6` from the empty diagram.
//! * `wedge_intervals` — intervals `[0, 1 + 1/k]` glued at `0` with
//!   `A = {1 + 1/k}`; the gallery space on which no optimal matching exists.
//!
//! User spaces implement [`SpaceKernel`] and wrap with [`Space::from_kernel`];
//! closedness of `A` is an unchecked contract on such spaces.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::ext::{ExtReal, PNorm};
use crate::{Error, Result};

/// A point of some space: an opaque coordinate payload.
#[derive(Clone, PartialEq)]
pub enum Point {
    /// Coordinate vector: `[b, d]` for half-planes, `[x1..xk]` for Euclidean
    /// space, `[x]` for the ray. Entries may be `±inf` where the space allows.
    Coords(Vec<f64>),
    /// A point on one arm of a wedge: arc index (1-based) and a position along
    /// the arm (an angle for circle arms, a length for interval arms).
    Arc { arc: u64, pos: f64 },
}

impl Point {
    pub fn coords(values: impl Into<Vec<f64>>) -> Point {
        // normalize -0.0 so canonical ordering is bitwise-stable
        Point::Coords(values.into().into_iter().map(|v| v + 0.0).collect())
    }

    pub fn arc(arc: u64, pos: f64) -> Point {
        Point::Arc { arc, pos: pos + 0.0 }
    }

    pub fn as_coords(&self) -> Option<&[f64]> {
        match self {
            Point::Coords(c) => Some(c),
            _ => None,
        }
    }

    /// Total order used for canonical forms and deterministic tie-breaking.
    pub fn key_cmp(&self, other: &Point) -> Ordering {
        match (self, other) {
            (Point::Coords(a), Point::Coords(b)) => {
                for (x, y) in a.iter().zip(b.iter()) {
                    match x.total_cmp(y) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                a.len().cmp(&b.len())
            }
            (Point::Arc { arc: a, pos: s }, Point::Arc { arc: b, pos: t }) => {
                a.cmp(b).then(s.total_cmp(t))
            }
            (Point::Coords(_), Point::Arc { .. }) => Ordering::Less,
            (Point::Arc { .. }, Point::Coords(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Coords(c) => write!(f, "{c:?}"),
            Point::Arc { arc, pos } => write!(f, "(arc {arc}, {pos})"),
        }
    }
}

/// What a space can do, beyond measuring distances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Capabilities {
    /// Every point at finite distance from `A` has a nearest point in `A`.
    /// Exactly the condition under which optimal matchings are attained.
    pub distance_minimizing: bool,
    /// Constant-speed geodesics between points at finite distance.
    pub geodesic: bool,
    /// Distances are infima of path lengths.
    pub length_space: bool,
    /// Satisfies the nonnegative-curvature comparison inequality along
    /// geodesics (flat and positively curved spaces qualify).
    pub nonneg_curvature: bool,
    /// Cauchy sequences converge; lets total boundedness certify relative
    /// compactness.
    pub complete: bool,
}

/// The behavior of one metric pair. Implementations must keep `dist`
/// symmetric, zero on the diagonal of `X x X`, and triangle-consistent.
pub trait SpaceKernel: Send + Sync {
    /// Canonical spec string; doubles as the compatibility tag on diagrams.
    fn id(&self) -> &str;
    fn capabilities(&self) -> Capabilities;
    fn validate(&self, x: &Point) -> Result<()>;
    fn dist(&self, x: &Point, y: &Point) -> ExtReal;
    fn dist_to_subset(&self, x: &Point) -> ExtReal;
    fn in_subset(&self, x: &Point) -> bool;

    /// Nearest point of `A` together with the achieved distance, when the
    /// space is distance minimizing and the distance is finite. Ties break to
    /// the lexicographically smallest payload.
    fn project_to_subset(&self, x: &Point) -> Option<(Point, ExtReal)>;

    /// Constant-speed geodesic: `g(0) = x`, `g(1) = y`,
    /// `d(g(s), g(t)) = |s - t| d(x, y)`. `None` when unavailable.
    fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Option<Point>;

    /// The base point of a pointed space (`A` a single point).
    fn base_point(&self) -> Option<Point> {
        None
    }

    /// A point at subset-distance exactly `r`, when `A` is approachable at
    /// that scale. Powers the local-noncompactness constructions.
    fn point_at_subset_distance(&self, _r: f64) -> Option<Point> {
        None
    }

    fn point_to_json(&self, x: &Point) -> Value {
        default_point_to_json(x)
    }

    fn point_from_json(&self, v: &Value) -> Result<Point> {
        default_point_from_json(self.id(), v)
    }
}

fn num_to_json(v: f64) -> Value {
    if v == f64::INFINITY {
        Value::String("inf".into())
    } else if v == f64::NEG_INFINITY {
        Value::String("-inf".into())
    } else {
        json!(v)
    }
}

fn num_from_json(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) if s == "inf" => Some(f64::INFINITY),
        Value::String(s) if s == "-inf" => Some(f64::NEG_INFINITY),
        _ => None,
    }
}

fn default_point_to_json(x: &Point) -> Value {
    match x {
        Point::Coords(c) => Value::Array(c.iter().map(|&v| num_to_json(v)).collect()),
        Point::Arc { arc, pos } => json!({ "arc": arc, "pos": pos }),
    }
}

fn default_point_from_json(space: &str, v: &Value) -> Result<Point> {
    let bad = |reason: &str| Error::InvalidPoint {
        space: space.to_string(),
        reason: reason.to_string(),
    };
    match v {
        Value::Array(items) => {
            let coords = items
                .iter()
                .map(num_from_json)
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| bad("coordinates must be numbers or \"inf\"/\"-inf\""))?;
            Ok(Point::coords(coords))
        }
        Value::Object(map) => {
            let arc = map
                .get("arc")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad("missing positive integer field `arc`"))?;
            let pos = map
                .get("pos")
                .or_else(|| map.get("theta"))
                .and_then(num_from_json)
                .ok_or_else(|| bad("missing numeric field `pos`/`theta`"))?;
            Ok(Point::arc(arc, pos))
        }
        _ => Err(bad("expected coordinate array or {arc, ...} object")),
    }
}

/// A metric pair. Cheap to clone; all operations are pure.
#[derive(Clone)]
pub struct Space {
    kernel: Arc<dyn SpaceKernel>,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({})", self.id())
    }
}

impl Space {
    pub fn from_kernel(kernel: Arc<dyn SpaceKernel>) -> Space {
        Space { kernel }
    }

    pub fn id(&self) -> &str {
        self.kernel.id()
    }

    pub fn capabilities(&self) -> Capabilities {
        self.kernel.capabilities()
    }

    pub fn validate(&self, x: &Point) -> Result<()> {
        self.kernel.validate(x)
    }

    /// Ground distance `d(x, y)`.
    pub fn dist(&self, x: &Point, y: &Point) -> Result<ExtReal> {
        self.validate(x)?;
        self.validate(y)?;
        Ok(self.kernel.dist(x, y))
    }

    /// `d(x, A) = inf over a in A of d(x, a)`.
    pub fn dist_to_subset(&self, x: &Point) -> Result<ExtReal> {
        self.validate(x)?;
        Ok(self.kernel.dist_to_subset(x))
    }

    pub fn in_subset(&self, x: &Point) -> Result<bool> {
        self.validate(x)?;
        Ok(self.kernel.in_subset(x))
    }

    /// Whether `x` lies in the open δ-offset of `A`, i.e. `d(x, A) < δ`.
    pub fn in_offset(&self, delta: f64, x: &Point) -> Result<bool> {
        if delta.is_nan() || delta <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "offset radius must be positive, got {delta}"
            )));
        }
        Ok(self.dist_to_subset(x)?.value() < delta)
    }

    /// Nearest point of `A` and its distance.
    pub fn project_to_subset(&self, x: &Point) -> Result<(Point, ExtReal)> {
        self.validate(x)?;
        if !self.capabilities().distance_minimizing {
            return Err(Error::CapabilityMissing {
                space: self.id().to_string(),
                capability: "distance minimizing subset",
            });
        }
        if self.kernel.dist_to_subset(x).is_infinite() {
            return Err(Error::InfiniteDistance(format!(
                "point {x:?} is at infinite distance from the subset"
            )));
        }
        self.kernel.project_to_subset(x).ok_or_else(|| Error::CapabilityMissing {
            space: self.id().to_string(),
            capability: "nearest-point projection",
        })
    }

    /// Quotient metric `d_p(x, y) = min(d(x, y), ||(d(x,A), d(y,A))||_p)`.
    pub fn quotient_dist(&self, p: PNorm, x: &Point, y: &Point) -> Result<ExtReal> {
        let d = self.dist(x, y)?;
        let via = p.norm2(self.kernel.dist_to_subset(x), self.kernel.dist_to_subset(y));
        Ok(d.min(via))
    }

    /// `d_p(x, [A])`, the distance to the collapsed class of `A` in `X/A`.
    /// Equals `d(x, A)` for every `p`.
    pub fn quotient_dist_to_class(&self, _p: PNorm, x: &Point) -> Result<ExtReal> {
        self.dist_to_subset(x)
    }

    pub fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("t must lie in [0,1], got {t}")));
        }
        self.validate(x)?;
        self.validate(y)?;
        if !self.capabilities().geodesic {
            return Err(Error::CapabilityMissing {
                space: self.id().to_string(),
                capability: "geodesics",
            });
        }
        if self.kernel.dist(x, y).is_infinite() {
            return Err(Error::InfiniteDistance(format!(
                "no geodesic between {x:?} and {y:?} at infinite distance"
            )));
        }
        // endpoints are returned bit-exactly
        if t == 0.0 {
            return Ok(x.clone());
        }
        if t == 1.0 {
            return Ok(y.clone());
        }
        self.kernel.geodesic_point(x, y, t).ok_or_else(|| Error::CapabilityMissing {
            space: self.id().to_string(),
            capability: "geodesics",
        })
    }

    pub fn base_point(&self) -> Option<Point> {
        self.kernel.base_point()
    }

    pub fn point_at_subset_distance(&self, r: f64) -> Option<Point> {
        self.kernel.point_at_subset_distance(r)
    }

    pub fn point_to_json(&self, x: &Point) -> Value {
        self.kernel.point_to_json(x)
    }

    pub fn point_from_json(&self, v: &Value) -> Result<Point> {
        let p = self.kernel.point_from_json(v)?;
        self.validate(&p)?;
        Ok(p)
    }

    /// The same underlying set with ground metric replaced by the quotient
    /// metric `d_q`. Distances to `A`, membership, and projections are
    /// unchanged; `(d_q)_p = d_p` and `W_p[d_q] = W_p[d]` for `q <= p`.
    pub fn with_quotient_ground(&self, q: PNorm) -> Space {
        Space::from_kernel(Arc::new(QuotientGround {
            id: format!("{}/d_{}", self.id(), q),
            inner: self.clone(),
            q,
        }))
    }
}

/// Builds one of the built-in spaces from its spec string.
pub fn make_space(spec: &str) -> Result<Space> {
    let malformed = |reason: String| Error::MalformedSpaceSpec {
        spec: spec.to_string(),
        reason,
    };
    let mut parts = spec.split(':');
    let head = parts.next().unwrap_or_default();
    match head {
        "halfplane" => {
            let ground = match parts.next() {
                Some("l1") => Ground::L1,
                Some("l2") => Ground::L2,
                Some("linf") => Ground::LInf,
                other => {
                    return Err(malformed(format!(
                        "ground metric must be one of l1, l2, linf; got `{}`",
                        other.unwrap_or("")
                    )))
                }
            };
            Ok(Space::from_kernel(Arc::new(HalfPlane::new(ground))))
        }
        "pointed_euclidean" => {
            let dim: usize = parts
                .next()
                .ok_or_else(|| malformed("missing dimension".into()))?
                .parse()
                .map_err(|_| malformed("dimension must be a positive integer".into()))?;
            if dim == 0 {
                return Err(malformed("dimension must be positive".into()));
            }
            Ok(Space::from_kernel(Arc::new(PointedEuclidean::origin(dim))))
        }
        "ray" => Ok(Space::from_kernel(Arc::new(Ray))),
        "wedge_circles" => Ok(Space::from_kernel(Arc::new(WedgeCircles))),
        "wedge_intervals" => Ok(Space::from_kernel(Arc::new(WedgeIntervals))),
        _ => Err(Error::UnknownSpace(spec.to_string())),
    }
}

/// Difference of two extended coordinates. Two infinities of the same sign
/// are at distance zero from each other.
fn coord_diff(a: f64, b: f64) -> ExtReal {
    if a == b {
        ExtReal::ZERO
    } else {
        ExtReal::from_nonneg((a - b).abs())
    }
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if a == b {
        a
    } else {
        a + (b - a) * t
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ground {
    L1,
    L2,
    LInf,
}

struct HalfPlane {
    ground: Ground,
    id: String,
}

impl HalfPlane {
    fn new(ground: Ground) -> HalfPlane {
        let id = match ground {
            Ground::L1 => "halfplane:l1",
            Ground::L2 => "halfplane:l2",
            Ground::LInf => "halfplane:linf",
        };
        HalfPlane { ground, id: id.to_string() }
    }

    fn coords<'p>(&self, x: &'p Point) -> &'p [f64] {
        x.as_coords().expect("validated half-plane point")
    }
}

impl SpaceKernel for HalfPlane {
    fn id(&self) -> &str {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            distance_minimizing: true,
            geodesic: true,
            length_space: true,
            // only the Euclidean ground metric satisfies the comparison
            // inequality; l1/linf balls are not round enough
            nonneg_curvature: self.ground == Ground::L2,
            complete: true,
        }
    }

    fn validate(&self, x: &Point) -> Result<()> {
        let bad = |reason: String| Error::InvalidPoint {
            space: self.id.clone(),
            reason,
        };
        let c = x
            .as_coords()
            .ok_or_else(|| bad("expected a [birth, death] pair".into()))?;
        if c.len() != 2 {
            return Err(bad(format!("expected 2 coordinates, got {}", c.len())));
        }
        if c[0].is_nan() || c[1].is_nan() {
            return Err(bad("coordinates must not be NaN".into()));
        }
        if c[0] > c[1] {
            return Err(bad(format!("birth must not exceed death: ({}, {})", c[0], c[1])));
        }
        Ok(())
    }

    fn dist(&self, x: &Point, y: &Point) -> ExtReal {
        let (a, b) = (self.coords(x), self.coords(y));
        if a == b {
            return ExtReal::ZERO;
        }
        match self.ground {
            Ground::LInf => coord_diff(a[0], b[0]).max(coord_diff(a[1], b[1])),
            Ground::L1 | Ground::L2 => {
                if !a.iter().chain(b).all(|v| v.is_finite()) {
                    return ExtReal::INFINITY;
                }
                let (dx, dy) = ((a[0] - b[0]).abs(), (a[1] - b[1]).abs());
                match self.ground {
                    Ground::L1 => ExtReal::from_nonneg(dx + dy),
                    _ => ExtReal::from_nonneg(dx.hypot(dy)),
                }
            }
        }
    }

    fn dist_to_subset(&self, x: &Point) -> ExtReal {
        let c = self.coords(x);
        if c[0] == c[1] {
            return ExtReal::ZERO;
        }
        if !c[0].is_finite() || !c[1].is_finite() {
            return ExtReal::INFINITY;
        }
        // mirror the arithmetic of `dist` against the projection point, so
        // the witness distance agrees bit for bit
        match self.ground {
            Ground::L1 => ExtReal::from_nonneg(c[1] - c[0]),
            Ground::L2 => {
                let m = (c[0] + c[1]) / 2.0;
                ExtReal::from_nonneg((c[0] - m).abs().hypot((c[1] - m).abs()))
            }
            Ground::LInf => {
                let m = (c[0] + c[1]) / 2.0;
                ExtReal::from_nonneg((c[0] - m).abs().max((c[1] - m).abs()))
            }
        }
    }

    fn in_subset(&self, x: &Point) -> bool {
        let c = self.coords(x);
        c[0] == c[1]
    }

    fn project_to_subset(&self, x: &Point) -> Option<(Point, ExtReal)> {
        let c = self.coords(x);
        if !c[0].is_finite() || !c[1].is_finite() {
            return None;
        }
        let r = self.dist_to_subset(x);
        let t = match self.ground {
            // every (t, t) with t in [b, d] is nearest under l1; the
            // lexicographically smallest is (b, b)
            Ground::L1 => c[0],
            Ground::L2 | Ground::LInf => (c[0] + c[1]) / 2.0,
        };
        Some((Point::coords([t, t]), r))
    }

    fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Option<Point> {
        let (a, b) = (self.coords(x), self.coords(y));
        Some(Point::coords([lerp(a[0], b[0], t), lerp(a[1], b[1], t)]))
    }

    fn point_at_subset_distance(&self, r: f64) -> Option<Point> {
        if !r.is_finite() || r < 0.0 {
            return None;
        }
        let death = match self.ground {
            Ground::L1 => r,
            Ground::L2 => r * std::f64::consts::SQRT_2,
            Ground::LInf => 2.0 * r,
        };
        Some(Point::coords([0.0, death]))
    }
}

struct PointedEuclidean {
    dim: usize,
    base: Vec<f64>,
    id: String,
}

impl PointedEuclidean {
    fn origin(dim: usize) -> PointedEuclidean {
        PointedEuclidean {
            dim,
            base: vec![0.0; dim],
            id: format!("pointed_euclidean:{dim}"),
        }
    }

    /// A pointed Euclidean space with a custom base point.
    pub fn with_base(base: Vec<f64>) -> PointedEuclidean {
        let dim = base.len();
        let id = if base.iter().all(|&v| v == 0.0) {
            format!("pointed_euclidean:{dim}")
        } else {
            format!("pointed_euclidean:{dim}:{}", json!(base))
        };
        PointedEuclidean { dim, base, id }
    }

    fn coords<'p>(&self, x: &'p Point) -> &'p [f64] {
        x.as_coords().expect("validated euclidean point")
    }
}

impl SpaceKernel for PointedEuclidean {
    fn id(&self) -> &str {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            distance_minimizing: true,
            geodesic: true,
            length_space: true,
            nonneg_curvature: true,
            complete: true,
        }
    }

    fn validate(&self, x: &Point) -> Result<()> {
        let bad = |reason: String| Error::InvalidPoint {
            space: self.id.clone(),
            reason,
        };
        let c = x.as_coords().ok_or_else(|| bad("expected a coordinate vector".into()))?;
        if c.len() != self.dim {
            return Err(bad(format!("expected {} coordinates, got {}", self.dim, c.len())));
        }
        if c.iter().any(|v| v.is_nan()) {
            return Err(bad("coordinates must not be NaN".into()));
        }
        Ok(())
    }

    fn dist(&self, x: &Point, y: &Point) -> ExtReal {
        let (a, b) = (self.coords(x), self.coords(y));
        if a == b {
            return ExtReal::ZERO;
        }
        if !a.iter().chain(b).all(|v| v.is_finite()) {
            return ExtReal::INFINITY;
        }
        let s: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
        ExtReal::from_nonneg(s.sqrt())
    }

    fn dist_to_subset(&self, x: &Point) -> ExtReal {
        self.dist(x, &Point::Coords(self.base.clone()))
    }

    fn in_subset(&self, x: &Point) -> bool {
        self.coords(x) == self.base.as_slice()
    }

    fn project_to_subset(&self, x: &Point) -> Option<(Point, ExtReal)> {
        Some((Point::coords(self.base.clone()), self.dist_to_subset(x)))
    }

    fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Option<Point> {
        let (a, b) = (self.coords(x), self.coords(y));
        Some(Point::coords(
            a.iter().zip(b).map(|(&u, &v)| lerp(u, v, t)).collect::<Vec<_>>(),
        ))
    }

    fn base_point(&self) -> Option<Point> {
        Some(Point::coords(self.base.clone()))
    }

    fn point_at_subset_distance(&self, r: f64) -> Option<Point> {
        if !r.is_finite() || r < 0.0 {
            return None;
        }
        let mut c = self.base.clone();
        c[0] += r;
        Some(Point::coords(c))
    }
}

struct Ray;

impl SpaceKernel for Ray {
    fn id(&self) -> &str {
        "ray"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            distance_minimizing: true,
            geodesic: true,
            length_space: true,
            nonneg_curvature: true,
            complete: true,
        }
    }

    fn validate(&self, x: &Point) -> Result<()> {
        let bad = |reason: String| Error::InvalidPoint {
            space: "ray".to_string(),
            reason,
        };
        let c = x.as_coords().ok_or_else(|| bad("expected [x]".into()))?;
        if c.len() != 1 {
            return Err(bad(format!("expected 1 coordinate, got {}", c.len())));
        }
        if c[0].is_nan() || c[0] < 0.0 {
            return Err(bad(format!("coordinate must be >= 0, got {}", c[0])));
        }
        Ok(())
    }

    fn dist(&self, x: &Point, y: &Point) -> ExtReal {
        let (a, b) = (x.as_coords().unwrap()[0], y.as_coords().unwrap()[0]);
        coord_diff(a, b)
    }

    fn dist_to_subset(&self, x: &Point) -> ExtReal {
        ExtReal::from_nonneg(x.as_coords().unwrap()[0])
    }

    fn in_subset(&self, x: &Point) -> bool {
        x.as_coords().unwrap()[0] == 0.0
    }

    fn project_to_subset(&self, x: &Point) -> Option<(Point, ExtReal)> {
        Some((Point::coords([0.0]), self.dist_to_subset(x)))
    }

    fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Option<Point> {
        let (a, b) = (x.as_coords().unwrap()[0], y.as_coords().unwrap()[0]);
        Some(Point::coords([lerp(a, b, t)]))
    }

    fn base_point(&self) -> Option<Point> {
        Some(Point::coords([0.0]))
    }

    fn point_at_subset_distance(&self, r: f64) -> Option<Point> {
        (r.is_finite() && r >= 0.0).then(|| Point::coords([r]))
    }
}

const TAU: f64 = 2.0 * PI;

/// Wedge of circles of radius `n`, arc-length metric, glued at angle 0.
struct WedgeCircles;

impl WedgeCircles {
    fn parts(&self, x: &Point) -> (u64, f64) {
        match *x {
            Point::Arc { arc, pos } => (arc, pos),
            _ => unreachable!("validated wedge point"),
        }
    }

    fn to_base(&self, arc: u64, theta: f64) -> f64 {
        let n = arc as f64;
        (n * theta).min(n * (TAU - theta))
    }

    /// Canonical payload: angles in `[0, 2pi)`, the glue point on arc 1.
    fn canonical(arc: u64, theta: f64) -> Point {
        let theta = theta.rem_euclid(TAU);
        if theta == 0.0 {
            Point::arc(1, 0.0)
        } else {
            Point::arc(arc, theta)
        }
    }
}

impl SpaceKernel for WedgeCircles {
    fn id(&self) -> &str {
        "wedge_circles"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            distance_minimizing: true,
            geodesic: true,
            length_space: true,
            // the glue point branches, which rules out curvature bounds
            nonneg_curvature: false,
            complete: true,
        }
    }

    fn validate(&self, x: &Point) -> Result<()> {
        let bad = |reason: String| Error::InvalidPoint {
            space: "wedge_circles".to_string(),
            reason,
        };
        match *x {
            Point::Arc { arc, pos } => {
                if arc == 0 {
                    return Err(bad("arc index is 1-based".into()));
                }
                if !pos.is_finite() || !(0.0..TAU).contains(&pos) {
                    return Err(bad(format!("angle must lie in [0, 2pi), got {pos}")));
                }
                if pos == 0.0 && arc != 1 {
                    return Err(bad("the glue point is canonically (arc 1, 0)".into()));
                }
                Ok(())
            }
            _ => Err(bad("expected an {arc, theta} point".into())),
        }
    }

    fn dist(&self, x: &Point, y: &Point) -> ExtReal {
        let ((n, theta), (m, phi)) = (self.parts(x), self.parts(y));
        if theta == 0.0 || phi == 0.0 || n != m {
            return ExtReal::from_nonneg(self.to_base(n, theta) + self.to_base(m, phi));
        }
        let gap = (theta - phi).abs();
        let n_f = n as f64;
        ExtReal::from_nonneg((n_f * gap).min(n_f * (TAU - gap)))
    }

    fn dist_to_subset(&self, x: &Point) -> ExtReal {
        let (n, theta) = self.parts(x);
        ExtReal::from_nonneg(self.to_base(n, theta))
    }

    fn in_subset(&self, x: &Point) -> bool {
        self.parts(x).1 == 0.0
    }

    fn project_to_subset(&self, x: &Point) -> Option<(Point, ExtReal)> {
        Some((Point::arc(1, 0.0), self.dist_to_subset(x)))
    }

    fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Option<Point> {
        let ((n, theta), (m, phi)) = (self.parts(x), self.parts(y));
        if theta != 0.0 && phi != 0.0 && n == m {
            let n_f = n as f64;
            let gap = (phi - theta).abs();
            // shorter way around; tie breaks to the direct segment
            let pos = if n_f * gap <= n_f * (TAU - gap) {
                lerp(theta, phi, t)
            } else {
                let dir = if phi > theta { -1.0 } else { 1.0 };
                theta + dir * (TAU - gap) * t
            };
            return Some(Self::canonical(n, pos));
        }
        // through the glue point: contract the first leg, then grow the second
        let (l1, l2) = (self.to_base(n, theta), self.to_base(m, phi));
        let total = l1 + l2;
        if total == 0.0 {
            return Some(Self::canonical(n, theta));
        }
        let s = t * total;
        let toward_zero = |arc: u64, ang: f64| -> bool {
            let a = arc as f64;
            a * ang <= a * (TAU - ang)
        };
        if s <= l1 {
            // still on the first arm, moving toward the glue point
            let n_f = n as f64;
            let pos = if toward_zero(n, theta) { theta - s / n_f } else { theta + s / n_f };
            Some(Self::canonical(n, pos))
        } else {
            let m_f = m as f64;
            let r = (s - l1) / m_f;
            let pos = if toward_zero(m, phi) { r } else { TAU - r };
            Some(Self::canonical(m, pos))
        }
    }

    fn base_point(&self) -> Option<Point> {
        Some(Point::arc(1, 0.0))
    }

    fn point_at_subset_distance(&self, r: f64) -> Option<Point> {
        if !r.is_finite() || r < 0.0 {
            return None;
        }
        if r == 0.0 {
            return Some(Point::arc(1, 0.0));
        }
        // pick an arm long enough that the angle stays in the short range
        let arc = (r / PI).ceil() as u64 + 1;
        Some(Point::arc(arc, r / arc as f64))
    }

    fn point_to_json(&self, x: &Point) -> Value {
        match *x {
            Point::Arc { arc, pos } => json!({ "arc": arc, "theta": pos }),
            _ => default_point_to_json(x),
        }
    }
}

/// Wedge of intervals `[0, 1 + 1/k]` glued at 0, with `A = {1 + 1/k}`.
/// The distance from the glue point to `A` is 1 but no point of `A` achieves
/// it, so the subset is not distance minimizing.
struct WedgeIntervals;

impl WedgeIntervals {
    fn parts(&self, x: &Point) -> (u64, f64) {
        match *x {
            Point::Arc { arc, pos } => (arc, pos),
            _ => unreachable!("validated wedge point"),
        }
    }

    fn anchor(arc: u64) -> f64 {
        1.0 + 1.0 / arc as f64
    }

    fn canonical(arc: u64, pos: f64) -> Point {
        if pos == 0.0 {
            Point::arc(1, 0.0)
        } else {
            Point::arc(arc, pos)
        }
    }
}

impl SpaceKernel for WedgeIntervals {
    fn id(&self) -> &str {
        "wedge_intervals"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            distance_minimizing: false,
            geodesic: true,
            length_space: true,
            nonneg_curvature: false,
            complete: true,
        }
    }

    fn validate(&self, x: &Point) -> Result<()> {
        let bad = |reason: String| Error::InvalidPoint {
            space: "wedge_intervals".to_string(),
            reason,
        };
        match *x {
            Point::Arc { arc, pos } => {
                if arc == 0 {
                    return Err(bad("arc index is 1-based".into()));
                }
                if !pos.is_finite() || !(0.0..=Self::anchor(arc)).contains(&pos) {
                    return Err(bad(format!(
                        "position must lie in [0, {}], got {pos}",
                        Self::anchor(arc)
                    )));
                }
                if pos == 0.0 && arc != 1 {
                    return Err(bad("the glue point is canonically (arc 1, 0)".into()));
                }
                Ok(())
            }
            _ => Err(bad("expected an {arc, pos} point".into())),
        }
    }

    fn dist(&self, x: &Point, y: &Point) -> ExtReal {
        let ((k, s), (j, u)) = (self.parts(x), self.parts(y));
        // same arm directly, otherwise through the glue point
        ExtReal::from_nonneg(if k == j { (s - u).abs() } else { s + u })
    }

    fn dist_to_subset(&self, x: &Point) -> ExtReal {
        let (k, s) = self.parts(x);
        // own anchor, or any other arm's anchor through the glue point
        // (the latter is an infimum, approached as the arm index grows)
        let own = Self::anchor(k) - s;
        ExtReal::from_nonneg(own.min(s + 1.0))
    }

    fn in_subset(&self, x: &Point) -> bool {
        let (k, s) = self.parts(x);
        s == Self::anchor(k)
    }

    fn project_to_subset(&self, _x: &Point) -> Option<(Point, ExtReal)> {
        None
    }

    fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Option<Point> {
        let ((k, s), (j, u)) = (self.parts(x), self.parts(y));
        if s == 0.0 {
            return Some(Self::canonical(j, u * t));
        }
        if u == 0.0 {
            return Some(Self::canonical(k, s * (1.0 - t)));
        }
        if k == j {
            return Some(Self::canonical(k, lerp(s, u, t)));
        }
        // through the glue point
        let w = t * (s + u);
        if w <= s {
            Some(Self::canonical(k, s - w))
        } else {
            Some(Self::canonical(j, w - s))
        }
    }

    fn point_at_subset_distance(&self, r: f64) -> Option<Point> {
        // a point near the first arm's anchor: d = min(r, 3 - r) = r for
        // r <= 1; there is no point at distance 0 off A
        (r > 0.0 && r <= 1.0).then(|| Point::arc(1, 2.0 - r))
    }
}

struct QuotientGround {
    id: String,
    inner: Space,
    q: PNorm,
}

impl SpaceKernel for QuotientGround {
    fn id(&self) -> &str {
        &self.id
    }

    fn capabilities(&self) -> Capabilities {
        let mut caps = self.inner.capabilities();
        // paths of the inner space need not stay geodesic for d_q
        caps.geodesic = false;
        caps.length_space = false;
        caps.nonneg_curvature = false;
        caps
    }

    fn validate(&self, x: &Point) -> Result<()> {
        self.inner.validate(x)
    }

    fn dist(&self, x: &Point, y: &Point) -> ExtReal {
        let d = self.inner.kernel.dist(x, y);
        let via = self.q.norm2(
            self.inner.kernel.dist_to_subset(x),
            self.inner.kernel.dist_to_subset(y),
        );
        d.min(via)
    }

    fn dist_to_subset(&self, x: &Point) -> ExtReal {
        // d_q(x, A) = d(x, A): the detour through A cannot beat going to A
        self.inner.kernel.dist_to_subset(x)
    }

    fn in_subset(&self, x: &Point) -> bool {
        self.inner.kernel.in_subset(x)
    }

    fn project_to_subset(&self, x: &Point) -> Option<(Point, ExtReal)> {
        // a nearest point for d is nearest for d_q as well
        self.inner.kernel.project_to_subset(x)
    }

    fn geodesic_point(&self, _x: &Point, _y: &Point, _t: f64) -> Option<Point> {
        None
    }

    fn base_point(&self) -> Option<Point> {
        self.inner.kernel.base_point()
    }

    fn point_at_subset_distance(&self, r: f64) -> Option<Point> {
        self.inner.kernel.point_at_subset_distance(r)
    }

    fn point_to_json(&self, x: &Point) -> Value {
        self.inner.kernel.point_to_json(x)
    }

    fn point_from_json(&self, v: &Value) -> Result<Point> {
        self.inner.kernel.point_from_json(v)
    }
}

/// A pointed Euclidean space with an explicit base point.
pub fn pointed_euclidean_with_base(base: Vec<f64>) -> Result<Space> {
    if base.is_empty() {
        return Err(Error::MalformedSpaceSpec {
            spec: "pointed_euclidean".to_string(),
            reason: "base point must have positive dimension".to_string(),
        });
    }
    if base.iter().any(|v| !v.is_finite()) {
        return Err(Error::MalformedSpaceSpec {
            spec: "pointed_euclidean".to_string(),
            reason: "base point must be finite".to_string(),
        });
    }
    Ok(Space::from_kernel(Arc::new(PointedEuclidean::with_base(base))))
}
