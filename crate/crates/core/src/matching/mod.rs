//! Context-aware spatial matching.
//!
//! The objective is a weighted sum of five ratios: two geometric terms
//! (semantic agreement and overlap size) and three interaction terms, one
//! per collaboration context (table outline, wall face, movable floor).
//! [`optimize_pose`] searches for the client pose that maximizes it.

mod optimizer;
mod terms;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::floorplan::{Context, Floorplan, SemanticMap};
use crate::geometry::{Polygon, PolygonSet, Pose, Segment, AREA_EPS};
use crate::scenegraph::{select_target, SceneGraphError, TargetPair};

pub use optimizer::optimize_pose;
pub use terms::{overlap_area, psi_g_sem, psi_g_size, psi_i_hor, psi_i_mov, psi_i_ver};

/// Default boundary-alignment tolerance, meters.
pub const BOUNDARY_EPS: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error(transparent)]
    Target(#[from] SceneGraphError),
    #[error("no pose of `{client}` overlaps host `{host}` within the search bounds")]
    NoOverlap { host: String, client: String },
    #[error("invalid match config: {0}")]
    Config(String),
}

/// Weights ω₁…ω₅ for ψ_G,sem, ψ_G,size, ψ_I,hor, ψ_I,ver, ψ_I,mov.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
    pub w5: f64,
}

impl ContextWeights {
    pub const SA_TABLE: ContextWeights = ContextWeights::new(10.0, 10.0, 100.0, 0.0, 0.0);
    pub const SA_WALL: ContextWeights = ContextWeights::new(10.0, 10.0, 0.0, 100.0, 0.0);
    pub const SA_FLOOR: ContextWeights = ContextWeights::new(10.0, 10.0, 0.0, 0.0, 100.0);
    /// Geometric terms only; used by both baselines.
    pub const GEOMETRIC: ContextWeights = ContextWeights::new(10.0, 10.0, 0.0, 0.0, 0.0);

    pub const fn new(w1: f64, w2: f64, w3: f64, w4: f64, w5: f64) -> Self {
        Self { w1, w2, w3, w4, w5 }
    }

    /// The context-specific preset.
    pub fn for_context(context: Context) -> Self {
        match context {
            Context::Table => Self::SA_TABLE,
            Context::Wall => Self::SA_WALL,
            Context::Floor => Self::SA_FLOOR,
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.w1, self.w2, self.w3, self.w4, self.w5]
    }

    pub fn validate(&self) -> Result<(), MatchError> {
        if self.as_array().iter().all(|w| w.is_finite() && *w >= 0.0) {
            Ok(())
        } else {
            Err(MatchError::Config("weights must be finite and non-negative".into()))
        }
    }
}

/// The five term values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Terms {
    pub g_sem: f64,
    pub g_size: f64,
    pub i_hor: f64,
    pub i_ver: f64,
    pub i_mov: f64,
}

impl Terms {
    pub fn as_array(&self) -> [f64; 5] {
        [self.g_sem, self.g_size, self.i_hor, self.i_ver, self.i_mov]
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self {
            g_sem: a[0],
            g_size: a[1],
            i_hor: a[2],
            i_ver: a[3],
            i_mov: a[4],
        }
    }

    /// Σ wᵢψᵢ, summed in term order.
    pub fn weighted(&self, w: &ContextWeights) -> f64 {
        self.as_array()
            .iter()
            .zip(w.as_array())
            .fold(0.0, |acc, (psi, w)| acc + w * psi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotationMode {
    QuarterTurns,
    Continuous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MatchConfig {
    pub rotation_mode: RotationMode,
    pub population: usize,
    pub generations: usize,
    pub seed: u64,
    /// Boundary-alignment tolerance ε_b, meters.
    pub boundary_eps: f64,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            rotation_mode: RotationMode::QuarterTurns,
            population: 20,
            generations: 30,
            seed: 0,
            boundary_eps: BOUNDARY_EPS,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<(), MatchError> {
        if self.population < 8 {
            return Err(MatchError::Config("population must be at least 8".into()));
        }
        if self.generations < 20 {
            return Err(MatchError::Config("generations must be at least 20".into()));
        }
        if !(self.boundary_eps > 0.0 && self.boundary_eps <= 0.5) {
            return Err(MatchError::Config("boundary_eps must be in (0, 0.5]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub pose: Pose,
    pub objective: f64,
    pub terms: Terms,
    pub host_target: String,
    pub client_target: String,
    /// Non-fatal problems, e.g. a missing interaction target.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub(crate) struct Side {
    pub(crate) map: SemanticMap,
    pub(crate) classes: Vec<PolygonSet>,
    pub(crate) table: Option<Polygon>,
    pub(crate) wall_faces: Vec<Segment>,
}

impl Side {
    fn new(fp: &Floorplan, context: Context) -> Self {
        let map = SemanticMap::build(fp, context);
        let classes = map.class_sets().into_iter().map(|(_, s)| s).collect();
        Self {
            map,
            classes,
            table: None,
            wall_faces: Vec::new(),
        }
    }
}

/// A host/client pair prepared for repeated objective evaluation.
pub struct MatchProblem {
    pub context: Context,
    pub host_id: String,
    pub client_id: String,
    pub targets: TargetPair,
    pub(crate) host: Side,
    pub(crate) client: Side,
    pub(crate) eps: f64,
    warnings: Vec<String>,
}

impl MatchProblem {
    /// Prepares matching for already selected targets.
    pub fn new(host: &Floorplan, client: &Floorplan, context: Context, targets: TargetPair, eps: f64) -> Self {
        let mut h = Side::new(host, context);
        let mut c = Side::new(client, context);
        let mut warnings = Vec::new();
        match context {
            Context::Table => {
                h.table = host.region(&targets.host.region_id).map(|r| r.shape.clone());
                c.table = client.region(&targets.client.region_id).map(|r| r.shape.clone());
                if h.table.is_none() || c.table.is_none() {
                    warnings.push("table target missing; horizontal sync is 0".into());
                }
            }
            Context::Wall => {
                h.wall_faces = host
                    .wall_face(&targets.host.region_id)
                    .map(|f| f.face)
                    .into_iter()
                    .collect();
                c.wall_faces = client.wall_faces().into_iter().map(|f| f.face).collect();
                if h.wall_faces.is_empty() {
                    warnings.push("wall target missing; vertical sync is 0".into());
                }
            }
            Context::Floor => {}
        }
        Self {
            context,
            host_id: host.id.clone(),
            client_id: client.id.clone(),
            targets,
            host: h,
            client: c,
            eps,
            warnings,
        }
    }

    /// Selects targets for `context` and prepares the pair.
    pub fn with_targets(
        host: &Floorplan,
        client: &Floorplan,
        context: Context,
        host_designated: Option<&str>,
        eps: f64,
    ) -> Result<Self, MatchError> {
        let targets = select_target(host, client, context, host_designated)?;
        Ok(Self::new(host, client, context, targets, eps))
    }

    pub fn host_map(&self) -> &SemanticMap {
        &self.host.map
    }

    pub fn client_map(&self) -> &SemanticMap {
        &self.client.map
    }

    pub fn host_table(&self) -> Option<&Polygon> {
        self.host.table.as_ref()
    }

    pub fn client_table(&self) -> Option<&Polygon> {
        self.client.table.as_ref()
    }

    pub fn host_wall_face(&self) -> Option<&Segment> {
        self.host.wall_faces.first()
    }

    /// Terms at `pose`; terms whose weight is zero are skipped (left at 0)
    /// unless `all` is set. Returns `None` when the footprints do not overlap.
    pub(crate) fn terms_at(&self, pose: &Pose, w: &ContextWeights, all: bool) -> Option<Terms> {
        let ov = self
            .host
            .map
            .boundary
            .intersection_area(&self.client.map.boundary.transformed(pose));
        if ov <= AREA_EPS {
            return None;
        }
        let mut t = Terms {
            g_size: terms::ratio(ov, self.host.map.boundary.area()),
            ..Terms::default()
        };
        if all || w.w1 > 0.0 {
            t.g_sem = terms::ratio(
                terms::class_match_area(&self.host.classes, &self.client.classes, pose),
                ov,
            );
        }
        if all || w.w3 > 0.0 {
            t.i_hor = psi_i_hor(self.host.table.as_ref(), self.client.table.as_ref(), pose, self.eps);
        }
        if all || w.w4 > 0.0 {
            t.i_ver = psi_i_ver(self.host.wall_faces.first(), &self.client.wall_faces, pose, self.eps);
        }
        if all || w.w5 > 0.0 {
            t.i_mov = psi_i_mov(&self.host.map, &self.client.map, pose);
        }
        Some(t)
    }

    /// Objective at `pose`: Σ wᵢψᵢ, or −1 when the footprints do not overlap.
    pub fn score(&self, pose: &Pose, w: &ContextWeights) -> f64 {
        self.terms_at(pose, w, false).map_or(-1.0, |t| t.weighted(w))
    }

    fn result(&self, pose: Pose, w: &ContextWeights) -> MatchResult {
        let terms = self.terms_at(&pose, w, true).unwrap_or_default();
        MatchResult {
            pose,
            objective: terms.weighted(w),
            terms,
            host_target: self.targets.host.region_id.clone(),
            client_target: self.targets.client.region_id.clone(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Evaluates every term at a fixed pose (no search).
pub fn objective(problem: &MatchProblem, pose: &Pose, weights: &ContextWeights) -> MatchResult {
    problem.result(*pose, weights)
}

#[cfg(test)]
mod tests;
