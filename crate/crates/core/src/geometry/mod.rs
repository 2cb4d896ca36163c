//! Planar polygon kernel.
//!
//! Everything downstream (semantic maps, matching terms, user placement and
//! subspace extraction) is expressed with the types in this module. Lengths
//! are meters, areas square meters.
//!
//! Boolean operations are delegated to [`geo`]'s overlay engine; results are
//! converted back into hole-free [`PolygonSet`]s by cutting every hole open
//! along a vertical line. The rasterizer in [`raster`] is an independent
//! scanline implementation and is what the test suites compare against.

mod measure;
mod offset;
mod polygon;
mod pose;
pub mod raster;
mod set;

pub use measure::{
    aligned_boundary_length, aligned_segment_length, clearance_ok, point_segment_distance, polygon_distance,
    segment_distance, TANGENT_TOLERANCE_DEG,
};
pub use offset::{offset_path, sample_closed_path, sample_segment, ClosedPath};
pub use polygon::Polygon;
pub use pose::Pose;
pub use raster::{rasterize, GridSpec, OccupancyGrid};
pub use set::{area, boolean, transform, BoolOp, PolygonSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Areas below this are treated as empty.
pub const AREA_EPS: f64 = 1e-6;
/// Distance tolerance for coincidence tests.
pub const DIST_EPS: f64 = 1e-3;
/// Coordinates must stay within this many meters of the origin.
pub const COORD_BOUND: f64 = 1000.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coordinate ({0}, {1}) is not finite or exceeds {COORD_BOUND} m")]
    BadCoordinate(f64, f64),
    #[error("polygon needs at least 3 distinct vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon area {0:.3e} m² is degenerate")]
    Degenerate(f64),
    #[error("polygon is self-intersecting (edges {0} and {1})")]
    SelfIntersecting(usize, usize),
    #[error("segment is shorter than {DIST_EPS} m")]
    ShortSegment,
}

/// A point in the plane, serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

#[allow(clippy::should_implement_trait)]
impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_valid(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.x.abs() <= COORD_BOUND && self.y.abs() <= COORD_BOUND
    }

    pub fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        self.sub(o).norm()
    }

    /// Rotates by +90°.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Point2,
    pub max: Point2,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: Point2::new(f64::INFINITY, f64::INFINITY),
        max: Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    };

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point2>) -> Aabb {
        pts.into_iter().fold(Aabb::EMPTY, |b, p| b.include(*p))
    }

    pub fn include(self, p: Point2) -> Aabb {
        Aabb {
            min: Point2::new(self.min.x.min(p.x), self.min.y.min(p.y)),
            max: Point2::new(self.max.x.max(p.x), self.max.y.max(p.y)),
        }
    }

    pub fn union(self, o: Aabb) -> Aabb {
        Aabb {
            min: Point2::new(self.min.x.min(o.min.x), self.min.y.min(o.min.y)),
            max: Point2::new(self.max.x.max(o.max.x), self.max.y.max(o.max.y)),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Point2 {
        self.min.lerp(self.max, 0.5)
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn expand(self, d: f64) -> Aabb {
        Aabb {
            min: Point2::new(self.min.x - d, self.min.y - d),
            max: Point2::new(self.max.x + d, self.max.y + d),
        }
    }

    /// True when the boxes overlap or are within `slack` of each other.
    pub fn intersects(&self, o: &Aabb, slack: f64) -> bool {
        self.min.x <= o.max.x + slack
            && o.min.x <= self.max.x + slack
            && self.min.y <= o.max.y + slack
            && o.min.y <= self.max.y + slack
    }

    pub fn contains(&self, p: Point2, slack: f64) -> bool {
        p.x >= self.min.x - slack && p.x <= self.max.x + slack && p.y >= self.min.y - slack && p.y <= self.max.y + slack
    }
}

/// Directed line segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub fn new(a: Point2, b: Point2) -> Result<Self, GeometryError> {
        if a.dist(b) <= 1e-6 {
            return Err(GeometryError::ShortSegment);
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.lerp(self.b, 0.5)
    }

    pub fn direction(&self) -> Point2 {
        let d = self.b.sub(self.a);
        d.scale(1.0 / d.norm())
    }

    pub fn transformed(&self, pose: &Pose) -> Segment {
        Segment {
            a: pose.apply(self.a),
            b: pose.apply(self.b),
        }
    }
}
