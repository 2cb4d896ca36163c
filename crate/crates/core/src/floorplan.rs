//! Semantic floorplans: the JSON model, validation, and the per-context
//! label decomposition every other stage consumes.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point2, Polygon, PolygonSet, Pose, Segment, DIST_EPS};

/// Overlap tolerance used when validating region layouts.
const LAYOUT_AREA_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticLabel {
    Table,
    Wall,
    Chair,
    Obstacle,
    /// Implicit: whatever part of the boundary no region covers.
    Floor,
}

impl fmt::Display for SemanticLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SemanticLabel::Table => "table",
            SemanticLabel::Wall => "wall",
            SemanticLabel::Chair => "chair",
            SemanticLabel::Obstacle => "obstacle",
            SemanticLabel::Floor => "floor",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Host,
    Home,
    Office,
}

/// Collaboration context chosen by the host.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Context {
    Table,
    Wall,
    Floor,
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Context::Table => "table",
            Context::Wall => "wall",
            Context::Floor => "floor",
        })
    }
}

impl FromStr for Context {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(Context::Table),
            "wall" => Ok(Context::Wall),
            "floor" => Ok(Context::Floor),
            other => Err(format!("unknown context `{other}` (expected table, wall or floor)")),
        }
    }
}

#[derive(Debug, Error)]
pub enum FloorplanError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("invalid floorplan, region `{region}`: {reason}")]
    Invalid { region: String, reason: String },
    #[error("point ({x:.3}, {y:.3}) is outside the floorplan boundary")]
    OutOfBounds { x: f64, y: f64 },
}

fn invalid(region: &str, reason: impl Into<String>) -> FloorplanError {
    FloorplanError::Invalid {
        region: region.to_string(),
        reason: reason.into(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabeledRegion {
    pub id: String,
    pub label: SemanticLabel,
    pub shape: Polygon,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FloorplanDoc", into = "FloorplanDoc")]
pub struct Floorplan {
    pub id: String,
    pub kind: SpaceKind,
    pub boundary: Polygon,
    pub regions: Vec<LabeledRegion>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FloorplanDoc {
    id: String,
    kind: SpaceKind,
    boundary: Vec<Point2>,
    #[serde(default)]
    regions: Vec<RegionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionDoc {
    id: String,
    label: SemanticLabel,
    polygon: Vec<Point2>,
}

impl TryFrom<FloorplanDoc> for Floorplan {
    type Error = FloorplanError;

    fn try_from(doc: FloorplanDoc) -> Result<Self, FloorplanError> {
        let boundary = Polygon::new(doc.boundary).map_err(|e| invalid("boundary", e.to_string()))?;
        let mut regions = Vec::with_capacity(doc.regions.len());
        for r in doc.regions {
            let shape = Polygon::new(r.polygon).map_err(|e| invalid(&r.id, e.to_string()))?;
            regions.push(LabeledRegion {
                id: r.id,
                label: r.label,
                shape,
            });
        }
        Self::new(doc.id, doc.kind, boundary, regions)
    }
}

impl From<Floorplan> for FloorplanDoc {
    fn from(fp: Floorplan) -> Self {
        FloorplanDoc {
            id: fp.id,
            kind: fp.kind,
            boundary: fp.boundary.vertices().to_vec(),
            regions: fp
                .regions
                .into_iter()
                .map(|r| RegionDoc {
                    polygon: r.shape.vertices().to_vec(),
                    id: r.id,
                    label: r.label,
                })
                .collect(),
        }
    }
}

/// Inner face of a wall region: the long side that faces the room.
#[derive(Clone, Debug, PartialEq)]
pub struct WallFace {
    pub region_id: String,
    pub face: Segment,
    /// Unit normal pointing from the wall into the room.
    pub normal: Point2,
}

impl Floorplan {
    /// Parses and validates the JSON form.
    pub fn from_json(text: &str) -> Result<Self, FloorplanError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: FloorplanDoc = serde_path_to_error::deserialize(de).map_err(|e| FloorplanError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        Self::try_from(doc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, FloorplanError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| FloorplanError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("floorplan serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }

    /// Builds a floorplan and enforces every layout invariant.
    pub fn new(
        id: String,
        kind: SpaceKind,
        boundary: Polygon,
        regions: Vec<LabeledRegion>,
    ) -> Result<Self, FloorplanError> {
        let a = boundary.area();
        if !(4.0..=200.0).contains(&a) {
            return Err(invalid("boundary", format!("area {a:.2} m² outside [4, 200]")));
        }
        let outline: PolygonSet = boundary.clone().into();
        let mut seen = HashSet::new();
        for r in &regions {
            if r.id.is_empty() {
                return Err(invalid("", "empty region id"));
            }
            if !seen.insert(r.id.as_str()) {
                return Err(invalid(&r.id, "duplicate region id"));
            }
            if r.label == SemanticLabel::Floor {
                return Err(invalid(&r.id, "floor is implicit and cannot be a region label"));
            }
            if r.shape.vertices().iter().any(|p| !boundary.contains(*p, DIST_EPS)) {
                return Err(invalid(&r.id, "region extends outside the boundary"));
            }
            let shape: PolygonSet = r.shape.clone().into();
            if shape.difference_area(&outline) > LAYOUT_AREA_TOL {
                return Err(invalid(&r.id, "region extends outside the boundary"));
            }
        }
        for (i, r) in regions.iter().enumerate() {
            for q in &regions[i + 1..] {
                if !r.shape.bbox().intersects(&q.shape.bbox(), 0.0) {
                    continue;
                }
                let ov = PolygonSet::from(r.shape.clone()).intersection_area(&q.shape.clone().into());
                if ov > LAYOUT_AREA_TOL {
                    return Err(invalid(&r.id, format!("overlaps region `{}` by {ov:.4} m²", q.id)));
                }
            }
        }
        Ok(Self {
            id,
            kind,
            boundary,
            regions,
        })
    }

    pub fn region(&self, id: &str) -> Option<&LabeledRegion> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn regions_labeled(&self, label: SemanticLabel) -> impl Iterator<Item = &LabeledRegion> {
        self.regions.iter().filter(move |r| r.label == label)
    }

    /// Union of all regions with `label` (regions are disjoint already).
    pub fn label_set(&self, label: SemanticLabel) -> PolygonSet {
        PolygonSet::from_disjoint(self.regions_labeled(label).map(|r| r.shape.clone()).collect())
    }

    /// Room-facing side of a wall region, if `region_id` names a wall.
    pub fn wall_face(&self, region_id: &str) -> Option<WallFace> {
        let r = self.region(region_id).filter(|r| r.label == SemanticLabel::Wall)?;
        let centroid = r.shape.centroid();
        let face = r
            .shape
            .segments()
            .into_iter()
            .filter(|s| self.boundary.boundary_distance(s.midpoint()) > DIST_EPS)
            .max_by(|a, b| a.length().total_cmp(&b.length()))?;
        let mut normal = face.direction().perp();
        if normal.dot(face.midpoint().sub(centroid)) < 0.0 {
            normal = normal.scale(-1.0);
        }
        Some(WallFace {
            region_id: r.id.clone(),
            face,
            normal,
        })
    }

    /// The same layout moved rigidly by `pose`.
    pub fn transformed(&self, pose: &Pose) -> Floorplan {
        Floorplan {
            id: self.id.clone(),
            kind: self.kind,
            boundary: self.boundary.transformed(pose),
            regions: self
                .regions
                .iter()
                .map(|r| LabeledRegion {
                    id: r.id.clone(),
                    label: r.label,
                    shape: r.shape.transformed(pose),
                })
                .collect(),
        }
    }

    pub fn wall_faces(&self) -> Vec<WallFace> {
        self.regions_labeled(SemanticLabel::Wall)
            .filter_map(|r| self.wall_face(&r.id))
            .collect()
    }
}

/// Label classes compared by the semantic match ratio. Chairs form their
/// own class only in the table context; elsewhere they merge with obstacles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatchClass {
    Table,
    Wall,
    Floor,
    Chair,
    Obstacle,
}

/// Per-label decomposition of a floorplan for one collaboration context.
#[derive(Clone, Debug)]
pub struct SemanticMap {
    pub context: Context,
    pub boundary: PolygonSet,
    pub table: PolygonSet,
    pub wall: PolygonSet,
    pub chair: PolygonSet,
    pub obstacle: PolygonSet,
    pub floor: PolygonSet,
    /// Where users may stand: floor, plus chairs in the table context.
    pub movable_floor: PolygonSet,
}

impl SemanticMap {
    pub fn build(fp: &Floorplan, context: Context) -> Self {
        let boundary: PolygonSet = fp.boundary.clone().into();
        let table = fp.label_set(SemanticLabel::Table);
        let wall = fp.label_set(SemanticLabel::Wall);
        let chair = fp.label_set(SemanticLabel::Chair);
        let obstacle = fp.label_set(SemanticLabel::Obstacle);
        let occupied = PolygonSet::from_disjoint(fp.regions.iter().map(|r| r.shape.clone()).collect());
        let floor = boundary.difference(&occupied);
        let movable_floor = match context {
            Context::Table => {
                PolygonSet::from_disjoint(floor.polygons().iter().chain(chair.polygons()).cloned().collect())
            }
            Context::Wall | Context::Floor => floor.clone(),
        };
        Self {
            context,
            boundary,
            table,
            wall,
            chair,
            obstacle,
            floor,
            movable_floor,
        }
    }

    pub fn label_set(&self, label: SemanticLabel) -> &PolygonSet {
        match label {
            SemanticLabel::Table => &self.table,
            SemanticLabel::Wall => &self.wall,
            SemanticLabel::Chair => &self.chair,
            SemanticLabel::Obstacle => &self.obstacle,
            SemanticLabel::Floor => &self.floor,
        }
    }

    /// Whether chairs are sittable (user-instantiable) in this context.
    pub fn chairs_sittable(&self) -> bool {
        self.context == Context::Table
    }

    /// Regions where no user may stand.
    pub fn forbidden(&self) -> PolygonSet {
        let mut polys: Vec<Polygon> = Vec::new();
        polys.extend(self.table.polygons().iter().cloned());
        polys.extend(self.wall.polygons().iter().cloned());
        polys.extend(self.obstacle.polygons().iter().cloned());
        if !self.chairs_sittable() {
            polys.extend(self.chair.polygons().iter().cloned());
        }
        PolygonSet::from_disjoint(polys)
    }

    /// Label sets grouped into the classes compared during matching.
    pub fn class_sets(&self) -> Vec<(MatchClass, PolygonSet)> {
        let mut out = vec![
            (MatchClass::Table, self.table.clone()),
            (MatchClass::Wall, self.wall.clone()),
            (MatchClass::Floor, self.floor.clone()),
        ];
        if self.chairs_sittable() {
            out.push((MatchClass::Chair, self.chair.clone()));
            out.push((MatchClass::Obstacle, self.obstacle.clone()));
        } else {
            let merged = PolygonSet::from_disjoint(
                self.obstacle
                    .polygons()
                    .iter()
                    .chain(self.chair.polygons())
                    .cloned()
                    .collect(),
            );
            out.push((MatchClass::Obstacle, merged));
        }
        out
    }

    /// Label at `p`, resolving shared edges by wall > table > obstacle > chair > floor.
    pub fn label_at(&self, p: Point2) -> Result<SemanticLabel, FloorplanError> {
        if !self.boundary.contains(p, DIST_EPS) {
            return Err(FloorplanError::OutOfBounds { x: p.x, y: p.y });
        }
        for label in [
            SemanticLabel::Wall,
            SemanticLabel::Table,
            SemanticLabel::Obstacle,
            SemanticLabel::Chair,
        ] {
            if self.label_set(label).contains(p, 1e-9) {
                return Ok(label);
            }
        }
        Ok(SemanticLabel::Floor)
    }
}

/// Free-function form of [`SemanticMap::build`].
pub fn semantic_map(fp: &Floorplan, context: Context) -> SemanticMap {
    SemanticMap::build(fp, context)
}
