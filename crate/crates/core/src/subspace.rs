//! Interactable subspace extraction and allocation.
//!
//! After matching, each client's transformed plan is compared with the host
//! label by label. Four markers sweep outward from the client's position
//! until they hit semantically unmatched area; the rectangle they span,
//! clipped to the compatible area, is that client's subspace.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::floorplan::{Context, SemanticMap};
use crate::geometry::{Point2, Polygon, PolygonSet, Pose, Segment, AREA_EPS};

/// Overlap above which a marker counts as colliding, m².
pub const MARKER_COLLISION_AREA: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SubspaceError {
    #[error("invalid subspace config: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SubspaceConfig {
    /// Initial marker length l_m.
    pub marker_length: f64,
    pub marker_thickness: f64,
    /// Distance from the user to the marker's outer edge before any travel.
    pub marker_start: f64,
    pub marker_step: f64,
    /// Interactable area that triggers marker widening, m².
    pub a_min: f64,
}

impl Default for SubspaceConfig {
    fn default() -> Self {
        Self {
            marker_length: 0.6,
            marker_thickness: 0.1,
            marker_start: 0.3,
            marker_step: 0.1,
            a_min: 4.0,
        }
    }
}

impl SubspaceConfig {
    pub fn validate(&self) -> Result<(), SubspaceError> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !(self.marker_length >= 0.6 && self.marker_length.is_finite()) {
            return Err(SubspaceError::Config("marker_length must be at least 0.6".into()));
        }
        if !pos(self.marker_thickness) || !pos(self.marker_step) || !pos(self.marker_start) {
            return Err(SubspaceError::Config(
                "marker thickness, start and step must be positive".into(),
            ));
        }
        if self.marker_thickness > self.marker_start {
            return Err(SubspaceError::Config(
                "marker_thickness must not exceed marker_start".into(),
            ));
        }
        if !(self.a_min >= 0.0 && self.a_min.is_finite()) {
            return Err(SubspaceError::Config("a_min must be non-negative".into()));
        }
        Ok(())
    }
}

/// Host/client label comparison for one client pose, in host coordinates.
#[derive(Clone, Debug)]
pub struct MatchedArea {
    /// Host boundary ∩ transformed client boundary.
    pub footprint: PolygonSet,
    /// Where both plans carry compatible labels.
    pub compatible: PolygonSet,
    /// Footprint minus compatible.
    pub unmatched: PolygonSet,
    /// Obstacles present in both plans.
    pub matched_obstacle: PolygonSet,
    /// Compatible minus matched obstacles.
    pub interactable: PolygonSet,
}

/// Compares `host` with `client` moved by `pose`. Labels are compatible when
/// they fall in the same matching class; in the table context a chair also
/// matches floor, since either can hold a standing or seated user.
pub fn matched_area(host: &SemanticMap, client: &SemanticMap, pose: &Pose) -> MatchedArea {
    let c = |s: &PolygonSet| s.transformed(pose);
    let host_obstacle;
    let client_obstacle;
    let mut free_pairs: Vec<(&PolygonSet, PolygonSet)> = vec![
        (&host.table, c(&client.table)),
        (&host.wall, c(&client.wall)),
        (&host.floor, c(&client.floor)),
    ];
    if host.context == Context::Table {
        free_pairs.push((&host.chair, c(&client.chair)));
        free_pairs.push((&host.chair, c(&client.floor)));
        free_pairs.push((&host.floor, c(&client.chair)));
        host_obstacle = host.obstacle.clone();
        client_obstacle = c(&client.obstacle);
    } else {
        host_obstacle = merged(&host.obstacle, &host.chair);
        client_obstacle = c(&merged(&client.obstacle, &client.chair));
    }
    let mut free = Vec::new();
    for (h, cl) in &free_pairs {
        free.extend(h.intersection(cl).into_polygons());
    }
    let matched_obstacle = host_obstacle.intersection(&client_obstacle);
    let interactable = PolygonSet::from_disjoint(free);
    let compatible = PolygonSet::from_disjoint(
        interactable
            .polygons()
            .iter()
            .chain(matched_obstacle.polygons())
            .cloned()
            .collect(),
    );
    let footprint = host.boundary.intersection(&client.boundary.transformed(pose));
    let unmatched = footprint.difference(&compatible);
    MatchedArea {
        footprint,
        compatible,
        unmatched,
        matched_obstacle,
        interactable,
    }
}

fn merged(a: &PolygonSet, b: &PolygonSet) -> PolygonSet {
    PolygonSet::from_disjoint(a.polygons().iter().chain(b.polygons()).cloned().collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Up,
    Down,
    Left,
    Right,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Up, Side::Down, Side::Left, Side::Right];

    /// Outward direction and lateral axis in a frame rotated by `theta`.
    fn axes(self, theta: f64) -> (Point2, Point2) {
        let r = Pose::new(0.0, 0.0, theta);
        let u = r.rotate(Point2::new(1.0, 0.0));
        let v = r.rotate(Point2::new(0.0, 1.0));
        match self {
            Side::Right => (u, v),
            Side::Left => (u.scale(-1.0), v),
            Side::Up => (v, u),
            Side::Down => (v.scale(-1.0), u),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkerSweep {
    pub side: Side,
    pub length: f64,
    pub thickness: f64,
    pub start: f64,
    pub step: f64,
    /// Distance travelled before stopping.
    pub travel: f64,
}

impl MarkerSweep {
    /// Distance from the user to the marker's outer edge at its final position.
    pub fn extent(&self) -> f64 {
        self.start + self.travel
    }

    /// Marker rectangle after `travel`.
    pub fn marker_at(&self, position: Point2, theta: f64, travel: f64) -> Polygon {
        let (d, l) = self.side.axes(theta);
        let h = 0.5 * self.length;
        Polygon::oriented_rect(
            position,
            d,
            l,
            (self.start - self.thickness + travel, self.start + travel),
            (-h, h),
        )
    }

    pub fn final_marker(&self, position: Point2, theta: f64) -> Polygon {
        self.marker_at(position, theta, self.travel)
    }
}

/// One marker width tried during extraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthTrial {
    pub marker_length: f64,
    pub interactable_area: f64,
    pub obstacle_area: f64,
    /// Every final marker is clear of unmatched area.
    pub sound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Subspace {
    pub owner: String,
    pub position: Point2,
    /// Rotation of the sweep frame (the client's matched rotation).
    pub frame_theta: f64,
    pub region: PolygonSet,
    pub interactable_area: f64,
    pub obstacle_area: f64,
    /// Unmatched area inside the region.
    pub unmatched_area: f64,
    pub sweeps: Vec<MarkerSweep>,
    pub trials: Vec<WidthTrial>,
}

fn overlaps(marker: &PolygonSet, set: &PolygonSet) -> bool {
    marker.intersection_area(set) > MARKER_COLLISION_AREA
}

fn sweep(
    side: Side,
    length: f64,
    position: Point2,
    theta: f64,
    area: &MatchedArea,
    cfg: &SubspaceConfig,
    max_steps: usize,
) -> MarkerSweep {
    let mut s = MarkerSweep {
        side,
        length,
        thickness: cfg.marker_thickness,
        start: cfg.marker_start,
        step: cfg.marker_step,
        travel: 0.0,
    };
    for n in 1..=max_steps {
        let t = n as f64 * cfg.marker_step;
        let m: PolygonSet = s.marker_at(position, theta, t).into();
        if overlaps(&m, &area.unmatched) || m.difference_area(&area.footprint) > MARKER_COLLISION_AREA {
            break;
        }
        s.travel = t;
    }
    s
}

struct Extraction {
    region: PolygonSet,
    interactable: f64,
    obstacle: f64,
    unmatched: f64,
    sweeps: Vec<MarkerSweep>,
    sound: bool,
}

fn extract_with(
    length: f64,
    position: Point2,
    theta: f64,
    area: &MatchedArea,
    cfg: &SubspaceConfig,
    max_steps: usize,
) -> Extraction {
    let sweeps: Vec<MarkerSweep> = Side::ALL
        .iter()
        .map(|s| sweep(*s, length, position, theta, area, cfg, max_steps))
        .collect();
    let ext = |side: Side| sweeps.iter().find(|s| s.side == side).expect("four sides").extent();
    let r = Pose::new(0.0, 0.0, theta);
    let rect = Polygon::oriented_rect(
        position,
        r.rotate(Point2::new(1.0, 0.0)),
        r.rotate(Point2::new(0.0, 1.0)),
        (-ext(Side::Left), ext(Side::Right)),
        (-ext(Side::Down), ext(Side::Up)),
    );
    let region = PolygonSet::from(rect).intersection(&area.compatible);
    let unmatched = region.intersection_area(&area.unmatched);
    let obstacle = region.intersection_area(&area.matched_obstacle) + unmatched;
    let sound = sweeps
        .iter()
        .all(|s| !overlaps(&s.final_marker(position, theta).into(), &area.unmatched));
    Extraction {
        interactable: (region.area() - obstacle).max(0.0),
        obstacle,
        unmatched,
        region,
        sweeps,
        sound,
    }
}

/// Extracts the subspace for a client placed at `position`.
///
/// Sweeps run with the initial marker length; while the result offers at
/// least `a_min` of interactable area the markers are widened step by step,
/// and the qualifying width with the least obstacle area wins.
pub fn extract_subspace(
    owner: &str,
    area: &MatchedArea,
    position: Point2,
    frame_theta: f64,
    cfg: &SubspaceConfig,
) -> Subspace {
    let bb = area.footprint.bbox();
    let reach = if bb.is_empty() { 0.0 } else { bb.diagonal() };
    let max_steps = (reach / cfg.marker_step).ceil() as usize + 1;
    let mut trials = Vec::new();
    let mut best: Option<Extraction> = None;
    let first = extract_with(cfg.marker_length, position, frame_theta, area, cfg, max_steps);
    trials.push(WidthTrial {
        marker_length: cfg.marker_length,
        interactable_area: first.interactable,
        obstacle_area: first.obstacle,
        sound: first.sound,
    });
    if first.interactable >= cfg.a_min {
        let mut n = 1;
        loop {
            let length = cfg.marker_length + n as f64 * cfg.marker_step;
            if length > reach + cfg.marker_length {
                break;
            }
            let e = extract_with(length, position, frame_theta, area, cfg, max_steps);
            trials.push(WidthTrial {
                marker_length: length,
                interactable_area: e.interactable,
                obstacle_area: e.obstacle,
                sound: e.sound,
            });
            if e.interactable < cfg.a_min {
                break;
            }
            if e.sound && e.obstacle < best.as_ref().map_or(f64::INFINITY, |b| b.obstacle) - AREA_EPS {
                best = Some(e);
            }
            n += 1;
        }
    }
    let chosen = match best {
        Some(b) if b.obstacle < first.obstacle - AREA_EPS || !first.sound => b,
        _ => first,
    };
    Subspace {
        owner: owner.to_string(),
        position,
        frame_theta,
        interactable_area: chosen.interactable,
        obstacle_area: chosen.obstacle,
        unmatched_area: chosen.unmatched,
        region: chosen.region,
        sweeps: chosen.sweeps,
        trials,
    }
}

/// Boundary walls of one client's subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceWalls {
    pub owner: String,
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualSpace {
    pub host: String,
    pub context: Context,
    pub subspaces: Vec<Subspace>,
    pub walls: Vec<SubspaceWalls>,
}

impl MutualSpace {
    pub fn wall_count(&self) -> usize {
        self.walls.iter().map(|w| w.segments.len()).sum()
    }
}

/// Tolerance for treating a subspace edge as lying on the target.
const TARGET_EDGE_TOL: f64 = 0.05;

/// Places the subspaces in the host plan and traces boundary walls around
/// each, leaving out stretches that run along or through the shared target.
pub fn allocate(host: &str, context: Context, subspaces: Vec<Subspace>, target: Option<&Polygon>) -> MutualSpace {
    let walls = subspaces
        .iter()
        .map(|s| SubspaceWalls {
            owner: s.owner.clone(),
            segments: s
                .region
                .polygons()
                .iter()
                .flat_map(|p| p.segments())
                .flat_map(|e| open_pieces(&e, target))
                .collect(),
        })
        .collect();
    MutualSpace {
        host: host.to_string(),
        context,
        subspaces,
        walls,
    }
}

/// Parts of `e` that are not on or inside `target`.
fn open_pieces(e: &Segment, target: Option<&Polygon>) -> Vec<Segment> {
    let Some(t) = target else {
        return vec![*e];
    };
    let len = e.length();
    if len <= 1e-9 {
        return Vec::new();
    }
    let d = e.direction();
    let mut cuts = vec![0.0, 1.0];
    for (a, b) in t.edges() {
        // proper crossings
        let r = b.sub(a);
        let den = d.scale(len).cross(r);
        if den.abs() > 1e-12 {
            let w = a.sub(e.a);
            let s = w.cross(r) / den;
            let u = w.cross(d.scale(len)) / den;
            if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&u) {
                cuts.push(s);
            }
        }
        // target vertices close to the edge
        let rel = a.sub(e.a);
        let s = rel.dot(d) / len;
        if (0.0..=1.0).contains(&s) && rel.cross(d).abs() <= TARGET_EDGE_TOL {
            cuts.push(s);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut out: Vec<Segment> = Vec::new();
    for w in cuts.windows(2) {
        let mid = e.a.lerp(e.b, 0.5 * (w[0] + w[1]));
        if t.contains(mid, TARGET_EDGE_TOL) {
            continue;
        }
        let piece = Segment {
            a: e.a.lerp(e.b, w[0]),
            b: e.a.lerp(e.b, w[1]),
        };
        match out.last_mut() {
            Some(last) if last.b.dist(piece.a) < 1e-9 => last.b = piece.b,
            _ => out.push(piece),
        }
    }
    out.retain(|s| s.length() > 1e-6);
    out
}
