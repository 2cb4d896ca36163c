use serde::{Deserialize, Serialize};

use super::measure::{point_segment_distance, segments_intersect};
use super::{Aabb, GeometryError, Point2, Pose, Segment, AREA_EPS};

/// Simple polygon without holes, vertices stored counter-clockwise.
///
/// Serializes as its vertex list; deserialization re-validates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point2>", into = "Vec<Point2>")]
pub struct Polygon {
    vertices: Vec<Point2>,
    bbox: Aabb,
    convex: bool,
}

impl Polygon {
    /// Validates and normalizes a vertex ring.
    ///
    /// Repeated consecutive vertices (and an explicit closing vertex) are
    /// dropped and clockwise rings are reversed.
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if let Some(p) = vertices.iter().find(|p| !p.is_valid()) {
            return Err(GeometryError::BadCoordinate(p.x, p.y));
        }
        let mut ring = dedup_ring(vertices);
        if ring.len() < 3 {
            return Err(GeometryError::TooFewVertices(ring.len()));
        }
        let signed = signed_area(&ring);
        if signed.abs() <= AREA_EPS {
            return Err(GeometryError::Degenerate(signed.abs()));
        }
        if signed < 0.0 {
            ring.reverse();
        }
        check_simple(&ring)?;
        Ok(Self::from_ring_unchecked(ring))
    }

    /// Builds a polygon from a ring that is already known to be simple.
    /// Orientation is still normalized.
    pub(crate) fn from_ring_unchecked(mut ring: Vec<Point2>) -> Self {
        if signed_area(&ring) < 0.0 {
            ring.reverse();
        }
        let bbox = Aabb::from_points(&ring);
        let convex = ring_is_convex(&ring);
        Self {
            vertices: ring,
            bbox,
            convex,
        }
    }

    /// Axis-aligned rectangle from two opposite corners.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        let (x0, x1) = (x0.min(x1), x0.max(x1));
        let (y0, y1) = (y0.min(y1), y0.max(y1));
        Self::from_ring_unchecked(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    /// Rectangle in an arbitrary frame: `center + s*u + t*v` for
    /// `s ∈ [s0, s1]`, `t ∈ [t0, t1]`, with `u`, `v` orthonormal.
    pub fn oriented_rect(center: Point2, u: Point2, v: Point2, s: (f64, f64), t: (f64, f64)) -> Self {
        let at = |a: f64, b: f64| center.add(u.scale(a)).add(v.scale(b));
        Self::from_ring_unchecked(vec![at(s.0, t.0), at(s.1, t.0), at(s.1, t.1), at(s.0, t.1)])
    }

    /// Regular polygon inscribed in a circle.
    pub fn regular(center: Point2, radius: f64, sides: usize) -> Self {
        let ring = (0..sides)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / sides as f64;
                Point2::new(center.x + radius * a.cos(), center.y + radius * a.sin())
            })
            .collect();
        Self::from_ring_unchecked(ring)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices).abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn segments(&self) -> Vec<Segment> {
        self.edges().map(|(a, b)| Segment { a, b }).collect()
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point2 {
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a2 = 0.0;
        for (p, q) in self.edges() {
            let c = p.cross(q);
            a2 += c;
            cx += (p.x + q.x) * c;
            cy += (p.y + q.y) * c;
        }
        Point2::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }

    /// Distance from `p` to the polygon boundary.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Strict interior test by crossing number (boundary points are
    /// classified arbitrarily).
    pub fn contains_interior(&self, p: Point2) -> bool {
        if !self.bbox.contains(p, 0.0) {
            return false;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Closed containment: interior or within `tol` of the boundary.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        if !self.bbox.contains(p, tol) {
            return false;
        }
        self.contains_interior(p) || self.boundary_distance(p) <= tol
    }

    pub fn transformed(&self, pose: &Pose) -> Polygon {
        Self::from_ring_unchecked(self.vertices.iter().map(|p| pose.apply(*p)).collect())
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub(crate) fn to_geo(&self) -> geo::Polygon<f64> {
        let coords: Vec<geo::Coord<f64>> = self.vertices.iter().map(|p| geo::Coord { x: p.x, y: p.y }).collect();
        geo::Polygon::new(geo::LineString::new(coords), vec![])
    }
}

fn ring_is_convex(ring: &[Point2]) -> bool {
    let n = ring.len();
    (0..n).all(|i| {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        let c = ring[(i + 2) % n];
        b.sub(a).cross(c.sub(b)) >= -1e-12
    })
}

impl TryFrom<Vec<Point2>> for Polygon {
    type Error = GeometryError;

    fn try_from(v: Vec<Point2>) -> Result<Self, Self::Error> {
        Polygon::new(v)
    }
}

impl From<Polygon> for Vec<Point2> {
    fn from(p: Polygon) -> Self {
        p.vertices
    }
}

pub(crate) fn signed_area(ring: &[Point2]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        s += ring[i].cross(ring[(i + 1) % n]);
    }
    0.5 * s
}

fn dedup_ring(mut v: Vec<Point2>) -> Vec<Point2> {
    v.dedup_by(|a, b| a.dist(*b) <= 1e-9);
    while v.len() > 1 && v[0].dist(v[v.len() - 1]) <= 1e-9 {
        v.pop();
    }
    v
}

fn check_simple(ring: &[Point2]) -> Result<(), GeometryError> {
    let n = ring.len();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        for j in (i + 1)..n {
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Adjacent edges share one vertex; they may only fold back onto each other.
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                let u = p.sub(shared);
                let w = q.sub(shared);
                if u.cross(w).abs() <= 1e-12 * u.norm() * w.norm() && u.dot(w) > 0.0 {
                    return Err(GeometryError::SelfIntersecting(i, j));
                }
            } else if segments_intersect(a, b, c, d) {
                return Err(GeometryError::SelfIntersecting(i, j));
            }
        }
    }
    Ok(())
}
