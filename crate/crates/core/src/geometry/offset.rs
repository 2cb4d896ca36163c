use geo::{Area, BooleanOps};

use super::{Point2, Polygon, Segment};

/// Closed polyline; the last point connects back to the first.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedPath {
    pub points: Vec<Point2>,
}

impl ClosedPath {
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..n).map(|i| self.points[i].dist(self.points[(i + 1) % n])).sum()
    }
}

/// Maximum sagitta of the polygonal arcs used for rounded corners.
const ARC_SAGITTA: f64 = 1e-4;

/// Outer boundary of `poly ⊕ disk(d)`: edges pushed out by `d`, joined by
/// round arcs.
pub fn offset_path(poly: &Polygon, d: f64) -> ClosedPath {
    assert!(d > 0.0, "offset distance must be positive");
    let sides = ((std::f64::consts::PI / (1.0 - ARC_SAGITTA / d).clamp(-1.0, 1.0).acos()).ceil() as usize).max(32);
    let mut parts = vec![poly.to_geo()];
    for (a, b) in poly.edges() {
        let u = b.sub(a);
        let n = Point2::new(u.y, -u.x).scale(d / u.norm());
        parts.push(Polygon::from_ring_unchecked(vec![a, b, b.add(n), a.add(n)]).to_geo());
    }
    for v in poly.vertices() {
        parts.push(Polygon::regular(*v, d, sides).to_geo());
    }
    let mut acc = geo::MultiPolygon::new(vec![parts.remove(0)]);
    for p in parts {
        acc = acc.union(&geo::MultiPolygon::new(vec![p]));
    }
    let outer = acc
        .0
        .iter()
        .max_by(|a, b| a.unsigned_area().total_cmp(&b.unsigned_area()))
        .expect("offset of a valid polygon is non-empty");
    let mut pts: Vec<Point2> = outer.exterior().0.iter().map(|c| Point2::new(c.x, c.y)).collect();
    if pts.len() > 1 && pts[0] == pts[pts.len() - 1] {
        pts.pop();
    }
    let ring = Polygon::from_ring_unchecked(pts);
    let mut pts = ring.vertices().to_vec();
    let start = pts
        .iter()
        .enumerate()
        .min_by(|(_, p), (_, q)| p.y.total_cmp(&q.y).then(p.x.total_cmp(&q.x)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    pts.rotate_left(start);
    ClosedPath { points: pts }
}

/// Points every `step` meters of arc length along a closed path, starting
/// at its first vertex. Yields `floor(length / step)` points.
pub fn sample_closed_path(path: &ClosedPath, step: f64) -> Vec<Point2> {
    let total = path.length();
    let count = (total / step + 1e-9).floor() as usize;
    let n = path.points.len();
    let mut out = Vec::with_capacity(count);
    let mut edge = 0;
    let mut edge_start = 0.0;
    for k in 0..count {
        let s = k as f64 * step;
        loop {
            let a = path.points[edge % n];
            let b = path.points[(edge + 1) % n];
            let len = a.dist(b);
            if s <= edge_start + len || edge + 1 >= n {
                let t = if len > 0.0 {
                    ((s - edge_start) / len).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                out.push(a.lerp(b, t));
                break;
            }
            edge_start += len;
            edge += 1;
        }
    }
    out
}

/// Points every `step` meters along a segment, both endpoints included when
/// the length is a multiple of `step`.
pub fn sample_segment(seg: &Segment, step: f64) -> Vec<Point2> {
    let len = seg.length();
    let count = (len / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|k| seg.a.lerp(seg.b, (k as f64 * step / len).min(1.0)))
        .collect()
}
