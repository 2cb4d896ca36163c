//! End-to-end runs of the five methods on one host and its clients.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::floorplan::{Context, Floorplan, SemanticMap};
use crate::geometry::{Polygon, PolygonSet, Pose};
use crate::matching::{optimize_pose, ContextWeights, MatchError, MatchProblem, MatchResult};
use crate::placement::{place_users, Owner, Placement, PlacementConfig, TargetGeometry, UserRegion};
use crate::subspace::{allocate, extract_subspace, matched_area, MatchedArea, MutualSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "SA-Table")]
    SaTable,
    #[serde(rename = "SA-Wall")]
    SaWall,
    #[serde(rename = "SA-Floor")]
    SaFloor,
    #[serde(rename = "S-ISA")]
    SIsa,
    #[serde(rename = "S-TI")]
    STi,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::SaTable,
        Method::SaWall,
        Method::SaFloor,
        Method::SIsa,
        Method::STi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::SaTable => "SA-Table",
            Method::SaWall => "SA-Wall",
            Method::SaFloor => "SA-Floor",
            Method::SIsa => "S-ISA",
            Method::STi => "S-TI",
        }
    }

    /// Collaboration context; the baselines work on the open floor.
    pub fn context(self) -> Context {
        match self {
            Method::SaTable => Context::Table,
            Method::SaWall => Context::Wall,
            Method::SaFloor | Method::SIsa | Method::STi => Context::Floor,
        }
    }

    pub fn weights(self) -> ContextWeights {
        match self {
            Method::SaTable => ContextWeights::SA_TABLE,
            Method::SaWall => ContextWeights::SA_WALL,
            Method::SaFloor => ContextWeights::SA_FLOOR,
            Method::SIsa | Method::STi => ContextWeights::GEOMETRIC,
        }
    }

    /// Whether the method allocates per-client subspaces.
    pub fn uses_subspaces(self) -> bool {
        self != Method::STi
    }

    /// The subspace-allocation method for a context.
    pub fn for_context(context: Context) -> Method {
        match context {
            Context::Table => Method::SaTable,
            Context::Wall => Method::SaWall,
            Context::Floor => Method::SaFloor,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method `{s}` (expected SA-Table, SA-Wall, SA-Floor, S-ISA or S-TI)"))
    }
}

type CacheKey = (String, String, Context, [u64; 5]);

/// Memoized pose optimization, shared across methods and combinations.
/// Results only depend on the pair, the context and the weights.
#[derive(Default)]
pub struct MatchCache {
    inner: Mutex<HashMap<CacheKey, Result<MatchResult, MatchError>>>,
}

impl MatchCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(
        &self,
        host: &Floorplan,
        client: &Floorplan,
        context: Context,
        weights: &ContextWeights,
        cfg: &RunConfig,
    ) -> Result<MatchResult, MatchError> {
        let key = (
            host.id.clone(),
            client.id.clone(),
            context,
            weights.as_array().map(f64::to_bits),
        );
        if let Some(r) = self.inner.lock().expect("cache lock").get(&key) {
            return r.clone();
        }
        let r = match_pair(host, client, context, weights, cfg);
        self.inner.lock().expect("cache lock").insert(key, r.clone());
        r
    }
}

/// Target selection plus pose optimization for one pair.
pub fn match_pair(
    host: &Floorplan,
    client: &Floorplan,
    context: Context,
    weights: &ContextWeights,
    cfg: &RunConfig,
) -> Result<MatchResult, MatchError> {
    let problem = MatchProblem::with_targets(
        host,
        client,
        context,
        cfg.host_target.as_deref(),
        cfg.matching.boundary_eps,
    )?;
    optimize_pose(&problem, weights, &cfg.matching)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AreaMetrics {
    pub total_interactable: f64,
    pub total_obstacle: f64,
    pub per_client_interactable: Vec<f64>,
    pub per_client_obstacle: Vec<f64>,
}

/// Label-wise intersection of every participating space (S-TI).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionSpace {
    pub footprint: PolygonSet,
    pub table: PolygonSet,
    pub wall: PolygonSet,
    pub floor: PolygonSet,
    pub obstacle: PolygonSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub method: Method,
    pub host: String,
    pub clients: Vec<String>,
    pub n_hosts: usize,
    pub success: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    pub matches: Vec<MatchResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<Placement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutual_space: Option<MutualSpace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection: Option<IntersectionSpace>,
    pub metrics: AreaMetrics,
}

impl RunOutcome {
    fn new(method: Method, host: &Floorplan, clients: &[Floorplan], n_hosts: usize) -> Self {
        Self {
            method,
            host: host.id.clone(),
            clients: clients.iter().map(|c| c.id.clone()).collect(),
            n_hosts,
            success: false,
            failure: None,
            matches: Vec::new(),
            placement: None,
            mutual_space: None,
            intersection: None,
            metrics: AreaMetrics::default(),
        }
    }

    fn fail(mut self, why: impl Into<String>) -> Self {
        self.success = false;
        self.failure = Some(why.into());
        self
    }
}

/// Runs `method` for one host, its clients and `n_hosts` host users.
/// Failures at any stage are reported in the outcome, not as errors.
pub fn run_method(
    method: Method,
    host: &Floorplan,
    clients: &[Floorplan],
    n_hosts: usize,
    cfg: &RunConfig,
    cache: &MatchCache,
) -> RunOutcome {
    let mut out = RunOutcome::new(method, host, clients, n_hosts);
    let context = method.context();
    let weights = cfg.weights.unwrap_or_else(|| method.weights());
    for c in clients {
        match cache.get(host, c, context, &weights, cfg) {
            Ok(m) => out.matches.push(m),
            Err(e) => return out.fail(format!("matching `{}`: {e}", c.id)),
        }
    }
    let pcfg = PlacementConfig {
        n_hosts,
        n_clients: clients.len(),
        ..cfg.placement.clone()
    };
    if method.uses_subspaces() {
        run_subspaces(out, context, host, clients, &pcfg, cfg)
    } else {
        run_intersection(out, host, clients, &pcfg)
    }
}

fn host_target(
    host: &Floorplan,
    map: &SemanticMap,
    context: Context,
    target_id: &str,
) -> Option<(TargetGeometry, Option<crate::geometry::Polygon>)> {
    match context {
        Context::Table => {
            let t = host.region(target_id)?.shape.clone();
            Some((TargetGeometry::Table(t.clone()), Some(t)))
        }
        Context::Wall => {
            let f = host.wall_face(target_id)?;
            let shape = host.region(target_id)?.shape.clone();
            Some((
                TargetGeometry::Wall {
                    face: f.face,
                    normal: f.normal,
                },
                Some(shape),
            ))
        }
        Context::Floor => Some((TargetGeometry::Floor(map.movable_floor.clone()), None)),
    }
}

fn run_subspaces(
    mut out: RunOutcome,
    context: Context,
    host: &Floorplan,
    clients: &[Floorplan],
    pcfg: &PlacementConfig,
    cfg: &RunConfig,
) -> RunOutcome {
    let hmap = SemanticMap::build(host, context);
    let Some((target, target_shape)) = host_target(host, &hmap, context, &out.matches[0].host_target) else {
        return out.fail("host target has no usable geometry");
    };
    let areas: Vec<MatchedArea> = clients
        .iter()
        .zip(&out.matches)
        .map(|(c, m)| matched_area(&hmap, &SemanticMap::build(c, context), &m.pose))
        .collect();
    let host_forbidden = PolygonSet::from_disjoint(
        hmap.forbidden()
            .into_polygons()
            .into_iter()
            .chain(exterior(&hmap).into_polygons())
            .collect(),
    );
    let sittable = |within: Option<&PolygonSet>| match (context, within) {
        (Context::Table, None) => hmap.chair.clone(),
        (Context::Table, Some(w)) => hmap.chair.intersection(w),
        _ => PolygonSet::empty(),
    };
    let mut regions = vec![(
        Owner::Host,
        UserRegion {
            allowed: hmap.movable_floor.clone(),
            forbidden: host_forbidden.clone(),
            sittable: sittable(None),
            within: None,
        },
    )];
    for (k, a) in areas.iter().enumerate() {
        regions.push((
            Owner::Client(k),
            UserRegion {
                allowed: a.compatible.intersection(&hmap.movable_floor),
                forbidden: PolygonSet::from_disjoint(
                    host_forbidden
                        .polygons()
                        .iter()
                        .chain(a.unmatched.polygons())
                        .cloned()
                        .collect(),
                ),
                sittable: sittable(Some(&a.compatible)),
                within: Some(a.compatible.clone()),
            },
        ));
    }
    let placement = place_users(&target, &regions, pcfg);
    if !placement.success {
        out.placement = Some(placement);
        return out.fail("placement: no feasible assignment");
    }
    let mut subspaces = Vec::with_capacity(clients.len());
    let mut interactable_parts = Vec::new();
    for (k, (c, a)) in clients.iter().zip(&areas).enumerate() {
        let pos = placement.positions[pcfg.n_hosts + k];
        let s = extract_subspace(&c.id, a, pos, out.matches[k].pose.theta(), &cfg.subspace);
        interactable_parts.extend(s.region.intersection(&a.interactable).into_polygons());
        out.metrics.per_client_interactable.push(s.interactable_area);
        out.metrics.per_client_obstacle.push(s.obstacle_area);
        subspaces.push(s);
    }
    out.metrics.total_interactable = PolygonSet::from_union(interactable_parts).area();
    out.metrics.total_obstacle = out.metrics.per_client_obstacle.iter().sum();
    out.mutual_space = Some(allocate(&host.id, context, subspaces, target_shape.as_ref()));
    out.placement = Some(placement);
    out.success = true;
    out
}

/// Host bounding box with a margin wider than any personal disk.
fn frame(hmap: &SemanticMap) -> PolygonSet {
    let b = hmap.boundary.bbox().expand(1.0);
    Polygon::rect(b.min.x, b.min.y, b.max.x, b.max.y).into()
}

/// Everything around the host room, so personal disks cannot leave it.
fn exterior(hmap: &SemanticMap) -> PolygonSet {
    frame(hmap).difference(&hmap.boundary)
}

fn run_intersection(
    mut out: RunOutcome,
    host: &Floorplan,
    clients: &[Floorplan],
    pcfg: &PlacementConfig,
) -> RunOutcome {
    let context = Context::Floor;
    let hmap = SemanticMap::build(host, context);
    let merged = |m: &SemanticMap| {
        PolygonSet::from_disjoint(
            m.obstacle
                .polygons()
                .iter()
                .chain(m.chair.polygons())
                .cloned()
                .collect(),
        )
    };
    let mut footprint = hmap.boundary.clone();
    let mut table = hmap.table.clone();
    let mut wall = hmap.wall.clone();
    let mut floor = hmap.floor.clone();
    let mut obstacle = merged(&hmap);
    for (c, m) in clients.iter().zip(&out.matches) {
        let cm = SemanticMap::build(c, context);
        let t = |s: &PolygonSet| s.transformed(&m.pose);
        footprint = footprint.intersection(&t(&cm.boundary));
        table = table.intersection(&t(&cm.table));
        wall = wall.intersection(&t(&cm.wall));
        floor = floor.intersection(&t(&cm.floor));
        obstacle = obstacle.intersection(&t(&merged(&cm)));
    }
    let matched = table.area() + wall.area() + floor.area() + obstacle.area();
    let unmatched = (footprint.area() - matched).max(0.0);
    let interactable = table.area() + wall.area() + floor.area();
    let total_obstacle = obstacle.area() + unmatched;
    let region = UserRegion {
        allowed: floor.clone(),
        forbidden: frame(&hmap).difference(&floor),
        sittable: PolygonSet::empty(),
        within: None,
    };
    let mut regions = vec![(Owner::Host, region.clone())];
    regions.extend((0..clients.len()).map(|k| (Owner::Client(k), region.clone())));
    let placement = place_users(&TargetGeometry::Floor(floor.clone()), &regions, pcfg);
    out.intersection = Some(IntersectionSpace {
        footprint,
        table,
        wall,
        floor,
        obstacle,
    });
    let ok = placement.success;
    out.placement = Some(placement);
    if !ok {
        return out.fail("placement: no feasible assignment in the common intersection");
    }
    out.metrics = AreaMetrics {
        total_interactable: interactable,
        total_obstacle,
        per_client_interactable: vec![interactable; clients.len()],
        per_client_obstacle: vec![total_obstacle; clients.len()],
    };
    out.success = true;
    out
}

/// The pose of every client, in client order.
pub fn client_poses(outcome: &RunOutcome) -> Vec<Pose> {
    outcome.matches.iter().map(|m| m.pose).collect()
}
