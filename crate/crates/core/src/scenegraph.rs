//! Object-centred scene graphs and per-client target selection.
//!
//! A graph is built around one table (or wall): every chair or obstacle
//! whose outline comes within the personal-area distance of the centre
//! object becomes a neighbour, tagged with the compass direction it lies in.
//! Client tables are scored against the host's graph under all four quarter
//! turns; walls are picked by how much free floor lies in front of them.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::floorplan::{Context, Floorplan, LabeledRegion, SemanticLabel, SemanticMap};
use crate::geometry::{polygon_distance, Point2, Polygon, PolygonSet};

/// Neighbour cut-off: intimate distance 0.45 m plus a 0.15 m margin.
pub const PERSONAL_AREA: f64 = 0.6;

/// Depth of the floor band in front of a wall used to rank walls.
pub const WALL_BAND_DEPTH: f64 = 1.0;

/// Target id used for the floor context, where the whole movable floor is the target.
pub const MOVABLE_FLOOR_ID: &str = "movable-floor";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneGraphError {
    #[error("unknown region `{0}`")]
    UnknownRegion(String),
    #[error("region `{0}` is neither a table nor a wall")]
    NotACenter(String),
    #[error("no {context} target in floorplan `{plan}`")]
    TargetNotFound { plan: String, context: Context },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Affordance {
    Sittable,
    Obstacle,
    Surface,
}

impl Affordance {
    pub fn of(label: SemanticLabel) -> Affordance {
        match label {
            SemanticLabel::Chair => Affordance::Sittable,
            SemanticLabel::Table | SemanticLabel::Wall => Affordance::Surface,
            SemanticLabel::Obstacle | SemanticLabel::Floor => Affordance::Obstacle,
        }
    }
}

/// Oriented bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Obb {
    pub center: Point2,
    pub half_extents: [f64; 2],
    /// Direction of the first half-extent axis, radians.
    pub angle: f64,
}

impl Obb {
    /// Minimum-area enclosing rectangle (rotating calipers over the hull).
    pub fn of(poly: &Polygon) -> Obb {
        let hull = convex_hull(poly.vertices());
        let mut best: Option<(f64, Obb)> = None;
        let n = hull.len();
        for i in 0..n {
            let e = hull[(i + 1) % n].sub(hull[i]);
            let len = e.norm();
            if len < 1e-12 {
                continue;
            }
            let u = e.scale(1.0 / len);
            let v = u.perp();
            let (mut s0, mut s1, mut t0, mut t1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for p in &hull {
                let s = p.dot(u);
                let t = p.dot(v);
                s0 = s0.min(s);
                s1 = s1.max(s);
                t0 = t0.min(t);
                t1 = t1.max(t);
            }
            let area = (s1 - s0) * (t1 - t0);
            if best.as_ref().is_none_or(|(a, _)| area < *a - 1e-12) {
                let c = u.scale(0.5 * (s0 + s1)).add(v.scale(0.5 * (t0 + t1)));
                best = Some((
                    area,
                    Obb {
                        center: c,
                        half_extents: [0.5 * (s1 - s0), 0.5 * (t1 - t0)],
                        angle: u.y.atan2(u.x),
                    },
                ));
            }
        }
        best.map(|(_, o)| o).expect("polygon has a non-degenerate hull")
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let u = Point2::new(self.angle.cos(), self.angle.sin());
        let d = p.sub(self.center);
        d.dot(u).abs() <= self.half_extents[0] + tol && d.dot(u.perp()).abs() <= self.half_extents[1] + tol
    }
}

fn convex_hull(pts: &[Point2]) -> Vec<Point2> {
    let mut p = pts.to_vec();
    p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: Point2, a: Point2, b: Point2| a.sub(o).cross(b.sub(o));
    let mut lower: Vec<Point2> = Vec::new();
    for &q in &p {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], q) <= 0.0 {
            lower.pop();
        }
        lower.push(q);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &q in p.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], q) <= 0.0 {
            upper.pop();
        }
        upper.push(q);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectNode {
    pub region_id: String,
    pub label: SemanticLabel,
    pub affordance: Affordance,
    pub obb: Obb,
}

impl ObjectNode {
    fn of(r: &LabeledRegion) -> Self {
        Self {
            region_id: r.id.clone(),
            label: r.label,
            affordance: Affordance::of(r.label),
            obb: Obb::of(&r.shape),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    N,
    E,
    S,
    W,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::N, Direction::E, Direction::S, Direction::W];

    /// Dominant axis of `d`; diagonal ties go to the earlier of N, E, S, W.
    pub fn of(d: Point2) -> Direction {
        let mut cands = Vec::with_capacity(2);
        if d.y.abs() >= d.x.abs() {
            cands.push(if d.y >= 0.0 { Direction::N } else { Direction::S });
        }
        if d.x.abs() >= d.y.abs() {
            cands.push(if d.x >= 0.0 { Direction::E } else { Direction::W });
        }
        cands.into_iter().min().expect("at least one axis dominates")
    }

    /// Rotates counter-clockwise by `k` quarter turns.
    pub fn rotated(self, k: u8) -> Direction {
        // CCW order: E -> N -> W -> S -> E
        let ccw = [Direction::E, Direction::N, Direction::W, Direction::S];
        let i = ccw.iter().position(|d| *d == self).expect("listed");
        ccw[(i + k as usize) % 4]
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphEdge {
    pub from: String,
    pub to: String,
    pub direction: Direction,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneGraph {
    pub center: ObjectNode,
    pub neighbors: Vec<GraphEdge>,
    /// Neighbour nodes, parallel to `neighbors`.
    pub nodes: Vec<ObjectNode>,
}

impl SceneGraph {
    /// The same graph after rotating the whole space by `k` quarter turns CCW.
    pub fn rotated(&self, k: u8) -> SceneGraph {
        let mut g = self.clone();
        for e in &mut g.neighbors {
            e.direction = e.direction.rotated(k);
        }
        g
    }

    /// Dominant neighbour affordance in `d`; `None` when the side is empty.
    /// Sittable wins ties.
    pub fn dominant(&self, d: Direction) -> Option<Affordance> {
        let (mut sit, mut obs) = (0, 0);
        for (e, n) in self.neighbors.iter().zip(&self.nodes) {
            if e.direction != d {
                continue;
            }
            match n.affordance {
                Affordance::Sittable => sit += 1,
                _ => obs += 1,
            }
        }
        match (sit, obs) {
            (0, 0) => None,
            (s, o) if s >= o => Some(Affordance::Sittable),
            _ => Some(Affordance::Obstacle),
        }
    }
}

/// Builds the graph centred on `center_region` (a table or wall).
pub fn build_graph(fp: &Floorplan, center_region: &str) -> Result<SceneGraph, SceneGraphError> {
    let center = fp
        .region(center_region)
        .ok_or_else(|| SceneGraphError::UnknownRegion(center_region.to_string()))?;
    if !matches!(center.label, SemanticLabel::Table | SemanticLabel::Wall) {
        return Err(SceneGraphError::NotACenter(center_region.to_string()));
    }
    let cnode = ObjectNode::of(center);
    let mut neighbors = Vec::new();
    let mut nodes = Vec::new();
    for r in &fp.regions {
        if r.id == center.id || !matches!(r.label, SemanticLabel::Chair | SemanticLabel::Obstacle) {
            continue;
        }
        if !r.shape.bbox().intersects(&center.shape.bbox(), PERSONAL_AREA) {
            continue;
        }
        let gap = polygon_distance(&center.shape, &r.shape);
        if gap > PERSONAL_AREA {
            continue;
        }
        let node = ObjectNode::of(r);
        neighbors.push(GraphEdge {
            from: center.id.clone(),
            to: r.id.clone(),
            direction: Direction::of(node.obb.center.sub(cnode.obb.center)),
            gap,
        });
        nodes.push(node);
    }
    Ok(SceneGraph {
        center: cnode,
        neighbors,
        nodes,
    })
}

/// Directional agreement in `[0, 1]`: a quarter point for every compass
/// direction where both graphs have the same dominant neighbour affordance
/// (or both have none).
pub fn match_score(host: &SceneGraph, client: &SceneGraph) -> f64 {
    Direction::ALL
        .iter()
        .filter(|d| host.dominant(**d) == client.dominant(**d))
        .count() as f64
        * 0.25
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSelection {
    pub region_id: String,
    /// Quarter turns (CCW) applied to the client before matching.
    pub rotation: u8,
    pub score: f64,
}

impl TargetSelection {
    pub fn rotation_radians(&self) -> f64 {
        f64::from(self.rotation) * std::f64::consts::FRAC_PI_2
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetPair {
    pub host: TargetSelection,
    pub client: TargetSelection,
}

/// One (client table, rotation) candidate with its score.
#[derive(Clone, Debug, PartialEq)]
pub struct TableCandidate {
    pub region_id: String,
    pub rotation: u8,
    pub score: f64,
    pub area: f64,
}

fn largest<'a>(it: impl Iterator<Item = &'a LabeledRegion>) -> Option<&'a LabeledRegion> {
    it.min_by(|a, b| b.shape.area().total_cmp(&a.shape.area()).then_with(|| a.id.cmp(&b.id)))
}

/// Host table: the designated one, or else the largest (ties by id).
pub fn host_table(fp: &Floorplan, designated: Option<&str>) -> Result<String, SceneGraphError> {
    match designated {
        Some(id) => match fp.region(id) {
            Some(r) if r.label == SemanticLabel::Table => Ok(id.to_string()),
            Some(_) => Err(SceneGraphError::NotACenter(id.to_string())),
            None => Err(SceneGraphError::UnknownRegion(id.to_string())),
        },
        None => largest(fp.regions_labeled(SemanticLabel::Table))
            .map(|r| r.id.clone())
            .ok_or(SceneGraphError::TargetNotFound {
                plan: fp.id.clone(),
                context: Context::Table,
            }),
    }
}

/// Every client table under every quarter turn, scored against `host_graph`.
pub fn enumerate_table_candidates(host_graph: &SceneGraph, client: &Floorplan) -> Vec<TableCandidate> {
    let mut out = Vec::new();
    for t in client.regions_labeled(SemanticLabel::Table) {
        let g = build_graph(client, &t.id).expect("table is a valid centre");
        for k in 0..4u8 {
            out.push(TableCandidate {
                region_id: t.id.clone(),
                rotation: k,
                score: match_score(host_graph, &g.rotated(k)),
                area: t.shape.area(),
            });
        }
    }
    out
}

fn table_order(a: &TableCandidate, b: &TableCandidate) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| b.area.total_cmp(&a.area))
        .then_with(|| a.region_id.cmp(&b.region_id))
        .then_with(|| a.rotation.cmp(&b.rotation))
}

/// Free floor inside the band of depth [`WALL_BAND_DEPTH`] in front of a wall.
pub fn wall_band_area(fp: &Floorplan, floor: &PolygonSet, wall_id: &str) -> Option<f64> {
    let f = fp.wall_face(wall_id)?;
    let band = Polygon::oriented_rect(
        f.face.a,
        f.face.direction(),
        f.normal,
        (0.0, f.face.length()),
        (0.0, WALL_BAND_DEPTH),
    );
    Some(PolygonSet::from(band).intersection_area(floor))
}

/// Wall with the widest adjacent free floor, or the designated one.
pub fn best_wall(fp: &Floorplan, designated: Option<&str>) -> Result<(String, f64), SceneGraphError> {
    let floor = SemanticMap::build(fp, Context::Wall).floor;
    if let Some(id) = designated {
        let r = fp
            .region(id)
            .ok_or_else(|| SceneGraphError::UnknownRegion(id.to_string()))?;
        if r.label != SemanticLabel::Wall {
            return Err(SceneGraphError::NotACenter(id.to_string()));
        }
        let a = wall_band_area(fp, &floor, id).ok_or_else(|| SceneGraphError::NotACenter(id.to_string()))?;
        return Ok((id.to_string(), a));
    }
    fp.regions_labeled(SemanticLabel::Wall)
        .filter_map(|r| wall_band_area(fp, &floor, &r.id).map(|a| (r, a)))
        .min_by(|(ra, a), (rb, b)| {
            b.total_cmp(a)
                .then_with(|| rb.shape.area().total_cmp(&ra.shape.area()))
                .then_with(|| ra.id.cmp(&rb.id))
        })
        .map(|(r, a)| (r.id.clone(), a))
        .ok_or(SceneGraphError::TargetNotFound {
            plan: fp.id.clone(),
            context: Context::Wall,
        })
}

/// Picks the host's and the client's interaction targets for `context`.
///
/// `host_designated` names the host object chosen by the host user; when
/// absent the largest table (table context) or the wall with the widest free
/// band (wall context) is used.
pub fn select_target(
    host: &Floorplan,
    client: &Floorplan,
    context: Context,
    host_designated: Option<&str>,
) -> Result<TargetPair, SceneGraphError> {
    match context {
        Context::Table => {
            let host_id = host_table(host, host_designated)?;
            let hg = build_graph(host, &host_id)?;
            let best = enumerate_table_candidates(&hg, client)
                .into_iter()
                .min_by(table_order)
                .ok_or(SceneGraphError::TargetNotFound {
                    plan: client.id.clone(),
                    context,
                })?;
            Ok(TargetPair {
                host: TargetSelection {
                    region_id: host_id,
                    rotation: 0,
                    score: 1.0,
                },
                client: TargetSelection {
                    region_id: best.region_id,
                    rotation: best.rotation,
                    score: best.score,
                },
            })
        }
        Context::Wall => {
            let (host_id, _) = best_wall(host, host_designated)?;
            let (client_id, band) = best_wall(client, None)?;
            let hn = host.wall_face(&host_id).expect("selected wall has a face").normal;
            let cf = client.wall_face(&client_id).expect("selected wall has a face");
            let turn = (hn.y.atan2(hn.x) - cf.normal.y.atan2(cf.normal.x)) / std::f64::consts::FRAC_PI_2;
            let rotation = (turn.round() as i64).rem_euclid(4) as u8;
            let depth_area = cf.face.length() * WALL_BAND_DEPTH;
            Ok(TargetPair {
                host: TargetSelection {
                    region_id: host_id,
                    rotation: 0,
                    score: 1.0,
                },
                client: TargetSelection {
                    region_id: client_id,
                    rotation,
                    score: (band / depth_area).clamp(0.0, 1.0),
                },
            })
        }
        Context::Floor => {
            let floor_target = || TargetSelection {
                region_id: MOVABLE_FLOOR_ID.to_string(),
                rotation: 0,
                score: 1.0,
            };
            Ok(TargetPair {
                host: floor_target(),
                client: floor_target(),
            })
        }
    }
}
