//! The five matching terms, each a ratio in `[0, 1]`.
//!
//! Geometric terms compare the whole floorplans; interaction terms compare
//! the selected targets. Denominators are host-referenced, except the
//! semantic ratio which is relative to the overlapping footprint.

use crate::floorplan::SemanticMap;
use crate::geometry::{aligned_boundary_length, aligned_segment_length, Polygon, PolygonSet, Pose, Segment, AREA_EPS};

pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if den <= AREA_EPS {
        0.0
    } else {
        (num / den).clamp(0.0, 1.0)
    }
}

/// Area of the footprint overlap, `host boundary ∩ pose(client boundary)`.
pub fn overlap_area(host: &SemanticMap, client: &SemanticMap, pose: &Pose) -> f64 {
    host.boundary.intersection_area(&client.boundary.transformed(pose))
}

pub(crate) fn class_match_area(host: &[PolygonSet], client: &[PolygonSet], pose: &Pose) -> f64 {
    host.iter()
        .zip(client)
        .map(|(h, c)| h.intersection_area(&c.transformed(pose)))
        .sum()
}

/// Semantic match ratio: share of the overlapping footprint where both
/// plans carry the same label class.
pub fn psi_g_sem(host: &SemanticMap, client: &SemanticMap, pose: &Pose) -> f64 {
    let ov = overlap_area(host, client, pose);
    if ov <= AREA_EPS {
        return 0.0;
    }
    let h: Vec<PolygonSet> = host.class_sets().into_iter().map(|(_, s)| s).collect();
    let c: Vec<PolygonSet> = client.class_sets().into_iter().map(|(_, s)| s).collect();
    ratio(class_match_area(&h, &c, pose), ov)
}

/// Matched space size ratio: share of the host footprint covered by the client.
pub fn psi_g_size(host: &SemanticMap, client: &SemanticMap, pose: &Pose) -> f64 {
    ratio(overlap_area(host, client, pose), host.boundary.area())
}

/// Horizontal boundary sync: share of the host table's outline running
/// alongside the client table's outline. Zero when either table is missing.
pub fn psi_i_hor(host_table: Option<&Polygon>, client_table: Option<&Polygon>, pose: &Pose, eps: f64) -> f64 {
    match (host_table, client_table) {
        (Some(h), Some(c)) => ratio(aligned_boundary_length(h, &c.transformed(pose), eps), h.perimeter()),
        _ => 0.0,
    }
}

/// Vertical surface sync: share of the host wall face lying alongside any
/// client wall face.
pub fn psi_i_ver(host_face: Option<&Segment>, client_faces: &[Segment], pose: &Pose, eps: f64) -> f64 {
    let Some(h) = host_face else { return 0.0 };
    let moved: Vec<Segment> = client_faces.iter().map(|s| s.transformed(pose)).collect();
    ratio(aligned_segment_length(std::slice::from_ref(h), &moved, eps), h.length())
}

/// Movable floor sync: share of the host's movable floor covered by the
/// client's movable floor.
pub fn psi_i_mov(host: &SemanticMap, client: &SemanticMap, pose: &Pose) -> f64 {
    ratio(
        host.movable_floor
            .intersection_area(&client.movable_floor.transformed(pose)),
        host.movable_floor.area(),
    )
}
