use geo::{Area, BooleanOps};
use serde::{Deserialize, Serialize};

use super::{Aabb, Point2, Polygon, Pose, AREA_EPS};

/// A region made of pairwise interior-disjoint simple polygons.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolygonSet {
    polygons: Vec<Polygon>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    Intersect,
    Union,
    Difference,
}

impl PolygonSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Wraps polygons the caller guarantees to be interior-disjoint.
    pub fn from_disjoint(polygons: Vec<Polygon>) -> Self {
        Self { polygons }
    }

    /// Unions arbitrary (possibly overlapping) polygons.
    pub fn from_union<I: IntoIterator<Item = Polygon>>(polys: I) -> Self {
        let mut acc: Option<geo::MultiPolygon<f64>> = None;
        for p in polys {
            let g = geo::MultiPolygon::new(vec![p.to_geo()]);
            acc = Some(match acc {
                None => g,
                Some(a) => a.union(&g),
            });
        }
        acc.map(|g| Self::from_geo(&g)).unwrap_or_default()
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn into_polygons(self) -> Vec<Polygon> {
        self.polygons
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub fn area(&self) -> f64 {
        self.polygons.iter().map(Polygon::area).sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.polygons.iter().map(Polygon::perimeter).sum()
    }

    pub fn bbox(&self) -> Aabb {
        self.polygons.iter().fold(Aabb::EMPTY, |b, p| b.union(p.bbox()))
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.polygons.iter().any(|poly| poly.contains(p, tol))
    }

    pub fn contains_interior(&self, p: Point2) -> bool {
        self.polygons.iter().any(|poly| poly.contains_interior(p))
    }

    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.polygons
            .iter()
            .map(|poly| poly.boundary_distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn transformed(&self, pose: &Pose) -> PolygonSet {
        Self {
            polygons: self.polygons.iter().map(|p| p.transformed(pose)).collect(),
        }
    }

    pub fn intersection(&self, other: &PolygonSet) -> PolygonSet {
        boolean(BoolOp::Intersect, self, other)
    }

    pub fn union(&self, other: &PolygonSet) -> PolygonSet {
        boolean(BoolOp::Union, self, other)
    }

    pub fn difference(&self, other: &PolygonSet) -> PolygonSet {
        boolean(BoolOp::Difference, self, other)
    }

    /// `area(self ∩ other)` without materializing a hole-free result.
    ///
    /// Both sets are interior-disjoint, so the area is the sum over component
    /// pairs; convex pairs are clipped directly.
    pub fn intersection_area(&self, other: &PolygonSet) -> f64 {
        if self.is_empty() || other.is_empty() || !self.bbox().intersects(&other.bbox(), 0.0) {
            return 0.0;
        }
        let mut total = 0.0;
        for a in &self.polygons {
            for b in &other.polygons {
                total += pair_intersection_area(a, b);
            }
        }
        total
    }

    /// `area(self \ other)` without materializing a hole-free result.
    pub fn difference_area(&self, other: &PolygonSet) -> f64 {
        (self.area() - self.intersection_area(other)).max(0.0)
    }

    pub(crate) fn to_geo(&self) -> geo::MultiPolygon<f64> {
        geo::MultiPolygon::new(self.polygons.iter().map(Polygon::to_geo).collect())
    }

    pub(crate) fn from_geo(mp: &geo::MultiPolygon<f64>) -> PolygonSet {
        let mut out = Vec::new();
        for p in &mp.0 {
            decompose(p, &mut out, 0);
        }
        Self { polygons: out }
    }
}

impl From<Polygon> for PolygonSet {
    fn from(p: Polygon) -> Self {
        Self { polygons: vec![p] }
    }
}

/// Sum of component areas.
pub fn area(s: &PolygonSet) -> f64 {
    s.area()
}

/// Boolean operation; slivers below [`AREA_EPS`] are dropped.
pub fn boolean(op: BoolOp, a: &PolygonSet, b: &PolygonSet) -> PolygonSet {
    match op {
        BoolOp::Intersect if a.is_empty() || b.is_empty() => return PolygonSet::empty(),
        BoolOp::Difference if a.is_empty() => return PolygonSet::empty(),
        BoolOp::Difference if b.is_empty() => return a.clone(),
        BoolOp::Union if a.is_empty() => return b.clone(),
        BoolOp::Union if b.is_empty() => return a.clone(),
        BoolOp::Intersect if !a.bbox().intersects(&b.bbox(), 0.0) => return PolygonSet::empty(),
        BoolOp::Difference if !a.bbox().intersects(&b.bbox(), 0.0) => return a.clone(),
        _ => {}
    }
    let (ga, gb) = (a.to_geo(), b.to_geo());
    let r = match op {
        BoolOp::Intersect => ga.intersection(&gb),
        BoolOp::Union => ga.union(&gb),
        BoolOp::Difference => ga.difference(&gb),
    };
    PolygonSet::from_geo(&r)
}

/// Applies a rigid motion to every component.
pub fn transform(s: &PolygonSet, p: &Pose) -> PolygonSet {
    s.transformed(p)
}

fn pair_intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    if !a.bbox().intersects(&b.bbox(), 0.0) {
        return 0.0;
    }
    // Clipping by a convex window gives the exact area even for a
    // non-convex subject: any bridging edges run along the window and cancel.
    if b.is_convex() {
        return convex_clip_area(a.vertices(), b.vertices());
    }
    if a.is_convex() {
        return convex_clip_area(b.vertices(), a.vertices());
    }
    a.to_geo().intersection(&b.to_geo()).unsigned_area()
}

/// Area of `subject ∩ clip` for counter-clockwise rings with `clip` convex.
pub(crate) fn convex_clip_area(subject: &[Point2], clip: &[Point2]) -> f64 {
    let ring = clip_ring(subject, clip);
    if ring.len() < 3 {
        return 0.0;
    }
    super::polygon::signed_area(&ring).abs()
}

/// Sutherland–Hodgman: `subject` clipped by the convex counter-clockwise
/// window `clip`. Bridging edges may appear for a non-convex subject.
pub(crate) fn clip_ring(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut poly = subject.to_vec();
    let mut next = Vec::with_capacity(subject.len() + clip.len());
    let n = clip.len();
    for i in 0..n {
        if poly.is_empty() {
            break;
        }
        let (p, q) = (clip[i], clip[(i + 1) % n]);
        let e = q.sub(p);
        let side = |x: Point2| e.cross(x.sub(p));
        next.clear();
        let mut prev = poly[poly.len() - 1];
        let mut sp = side(prev);
        for &cur in &poly {
            let sc = side(cur);
            if sc >= 0.0 {
                if sp < 0.0 {
                    next.push(prev.lerp(cur, sp / (sp - sc)));
                }
                next.push(cur);
            } else if sp >= 0.0 {
                next.push(prev.lerp(cur, sp / (sp - sc)));
            }
            prev = cur;
            sp = sc;
        }
        std::mem::swap(&mut poly, &mut next);
    }
    poly
}

fn ring_points(ls: &geo::LineString<f64>) -> Vec<Point2> {
    let mut pts: Vec<Point2> = ls.0.iter().map(|c| Point2::new(c.x, c.y)).collect();
    if pts.len() > 1 && pts[0] == pts[pts.len() - 1] {
        pts.pop();
    }
    pts.dedup();
    pts
}

/// Cuts holes open with vertical lines until every piece is simple.
fn decompose(p: &geo::Polygon<f64>, out: &mut Vec<Polygon>, depth: usize) {
    if p.unsigned_area() < AREA_EPS {
        return;
    }
    let Some(hole) = p.interiors().first() else {
        let ring = ring_points(p.exterior());
        if ring.len() >= 3 {
            out.push(Polygon::from_ring_unchecked(ring));
        }
        return;
    };
    if depth > 64 {
        // Unreachable for sane inputs: every cut strictly reduces the hole count.
        let ring = ring_points(p.exterior());
        if ring.len() >= 3 {
            out.push(Polygon::from_ring_unchecked(ring));
        }
        return;
    }
    let hb = Aabb::from_points(&ring_points(hole));
    let cut = 0.5 * (hb.min.x + hb.max.x);
    let outer = Aabb::from_points(&ring_points(p.exterior())).expand(1.0);
    let left = Polygon::rect(outer.min.x, outer.min.y, cut, outer.max.y).to_geo();
    let right = Polygon::rect(cut, outer.min.y, outer.max.x, outer.max.y).to_geo();
    for half in [left, right] {
        for piece in p.intersection(&half).0 {
            decompose(&piece, out, depth + 1);
        }
    }
}
