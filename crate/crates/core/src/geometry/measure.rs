use super::set::{clip_ring, convex_clip_area};
use super::{Aabb, Point2, Polygon, PolygonSet, Segment};

/// Two boundary pieces count as aligned only if their directions differ by
/// at most this many degrees (undirected).
pub const TANGENT_TOLERANCE_DEG: f64 = 10.0;

/// Boundary sampling pitch for alignment measures.
const SAMPLE_PITCH: f64 = 0.01;

/// Disk polygons used for exact clearance checks.
const DISK_SIDES: usize = 96;

/// Overlap below this does not violate clearance.
const CLEARANCE_AREA_TOL: f64 = 1e-4;

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    b.sub(a).cross(c.sub(a))
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) - 1e-12
        && p.x <= a.x.max(b.x) + 1e-12
        && p.y >= a.y.min(b.y) - 1e-12
        && p.y <= a.y.max(b.y) + 1e-12
}

/// Closed segment intersection test (touching counts).
pub(crate) fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

pub fn segment_distance(s: &Segment, t: &Segment) -> f64 {
    if segments_intersect(s.a, s.b, t.a, t.b) {
        return 0.0;
    }
    point_segment_distance(s.a, t.a, t.b)
        .min(point_segment_distance(s.b, t.a, t.b))
        .min(point_segment_distance(t.a, s.a, s.b))
        .min(point_segment_distance(t.b, s.a, s.b))
}

/// Euclidean distance between two closed polygons (0 when they overlap or touch).
pub fn polygon_distance(a: &Polygon, b: &Polygon) -> f64 {
    if a.vertices().iter().any(|p| b.contains_interior(*p)) || b.vertices().iter().any(|p| a.contains_interior(*p)) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (p, q) in a.edges() {
        for (r, s) in b.edges() {
            let d = segment_distance(&Segment { a: p, b: q }, &Segment { a: r, b: s });
            best = best.min(d);
        }
    }
    best
}

/// Length of the segments in `a` that lie within `eps` of, and run parallel
/// (within [`TANGENT_TOLERANCE_DEG`]) to, some segment of `b`.
///
/// A sample only counts if its perpendicular foot lands on the matching
/// segment, so collinear neighbours that merely end nearby contribute
/// nothing. `a` is sampled at 1 cm.
pub fn aligned_segment_length(a: &[Segment], b: &[Segment], eps: f64) -> f64 {
    let sin_tol = TANGENT_TOLERANCE_DEG.to_radians().sin();
    let b_info: Vec<(Segment, Point2, f64, Aabb)> = b
        .iter()
        .filter(|s| s.length() > 1e-9)
        .map(|s| {
            let len = s.length();
            let bb = Aabb::from_points([&s.a, &s.b]).expand(eps);
            (*s, s.b.sub(s.a).scale(1.0 / len), len, bb)
        })
        .collect();
    let mut total = 0.0;
    for sa in a {
        let len = sa.length();
        if len <= 1e-12 {
            continue;
        }
        let u = sa.b.sub(sa.a).scale(1.0 / len);
        let seg_box = Aabb::from_points([&sa.a, &sa.b]);
        let candidates: Vec<&(Segment, Point2, f64, Aabb)> = b_info
            .iter()
            .filter(|(_, v, _, bb)| u.cross(*v).abs() <= sin_tol && bb.intersects(&seg_box, 0.0))
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let n = (len / SAMPLE_PITCH).ceil().max(1.0) as usize;
        let piece = len / n as f64;
        for k in 0..n {
            let m = sa.a.add(u.scale((k as f64 + 0.5) * piece));
            let hit = candidates.iter().any(|(sb, v, lb, bb)| {
                if !bb.contains(m, 0.0) {
                    return false;
                }
                let rel = m.sub(sb.a);
                let t = rel.dot(*v);
                t >= -1e-9 && t <= lb + 1e-9 && rel.cross(*v).abs() <= eps
            });
            if hit {
                total += piece;
            }
        }
    }
    total
}

/// Length of `a`'s boundary aligned with `b`'s boundary (see
/// [`aligned_segment_length`]). Never exceeds `a.perimeter()`.
pub fn aligned_boundary_length(a: &Polygon, b: &Polygon, eps: f64) -> f64 {
    aligned_segment_length(&a.segments(), &b.segments(), eps).min(a.perimeter())
}

/// True iff the disk around `center` overlaps `forbidden` by less than 1e-4 m².
pub fn clearance_ok(center: Point2, radius: f64, forbidden: &PolygonSet) -> bool {
    let disk_box = Aabb {
        min: Point2::new(center.x - radius, center.y - radius),
        max: Point2::new(center.x + radius, center.y + radius),
    };
    let square = [
        disk_box.min,
        Point2::new(disk_box.max.x, disk_box.min.y),
        disk_box.max,
        Point2::new(disk_box.min.x, disk_box.max.y),
    ];
    let mut disk: Option<Polygon> = None;
    let mut overlap = 0.0;
    for poly in forbidden.polygons() {
        if !poly.bbox().intersects(&disk_box, 0.0) {
            continue;
        }
        if !poly.contains_interior(center) && poly.boundary_distance(center) >= radius {
            continue;
        }
        let disk = disk.get_or_insert_with(|| Polygon::regular(center, radius, DISK_SIDES));
        overlap += if poly.is_convex() {
            convex_clip_area(disk.vertices(), poly.vertices())
        } else {
            // Trim to the disk's box first so the many-sided clip stays cheap.
            convex_clip_area(&clip_ring(poly.vertices(), &square), disk.vertices())
        };
        if overlap >= CLEARANCE_AREA_TOL {
            return false;
        }
    }
    true
}
