//! User instantiation: candidate sampling around the interaction target,
//! personal-space filtering, and joint position selection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::floorplan::Context;
use crate::geometry::{
    clearance_ok, offset_path, point_segment_distance, sample_closed_path, sample_segment, Point2, Polygon, PolygonSet,
    Segment,
};

/// Square-containment tolerance, m².
const SQUARE_TOL: f64 = 1e-4;
/// Successive personal-diameter inflations used to thin candidate sets.
const PRUNE_START: f64 = 1.5;
const PRUNE_BACKOFF: f64 = 0.9;
const PRUNE_MIN_KEEP: usize = 10;
/// Work budget (domain entries scanned) for the exact search.
const SEARCH_BUDGET: u64 = 2_000_000;
/// Candidates per user considered by pair moves.
const PAIR_MOVE_TOP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlacementError {
    #[error("invalid placement config: {0}")]
    Config(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlacementConfig {
    pub d_step: f64,
    pub personal_diameter: f64,
    pub surface_offset: f64,
    pub n_hosts: usize,
    pub n_clients: usize,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        Self {
            d_step: 0.2,
            personal_diameter: 0.6,
            surface_offset: 0.45,
            n_hosts: 1,
            n_clients: 1,
        }
    }
}

impl PlacementConfig {
    pub fn validate(&self) -> Result<(), PlacementError> {
        if !(self.d_step > 0.0 && self.d_step <= 0.5) {
            return Err(PlacementError::Config("d_step must be in (0, 0.5]".into()));
        }
        if !(self.personal_diameter >= 0.3 && self.personal_diameter.is_finite()) {
            return Err(PlacementError::Config("personal_diameter must be at least 0.3".into()));
        }
        if !(self.surface_offset > 0.0 && self.surface_offset.is_finite()) {
            return Err(PlacementError::Config("surface_offset must be positive".into()));
        }
        if !(1..=3).contains(&self.n_hosts) {
            return Err(PlacementError::Config("n_hosts must be 1, 2 or 3".into()));
        }
        Ok(())
    }

    pub fn n_users(&self) -> usize {
        self.n_hosts + self.n_clients
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Host,
    Client(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub position: Point2,
    pub owner: Owner,
    pub on_sittable: bool,
}

/// Interaction target in host coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetGeometry {
    Table(Polygon),
    Wall {
        face: Segment,
        normal: Point2,
    },
    /// Grid over the given region.
    Floor(PolygonSet),
}

impl TargetGeometry {
    pub fn context(&self) -> Context {
        match self {
            TargetGeometry::Table(_) => Context::Table,
            TargetGeometry::Wall { .. } => Context::Wall,
            TargetGeometry::Floor(_) => Context::Floor,
        }
    }
}

/// Where one class of user may be instantiated.
#[derive(Clone, Debug, Default)]
pub struct UserRegion {
    /// Candidate centres must lie in this region.
    pub allowed: PolygonSet,
    /// The personal disk must stay clear of this region.
    pub forbidden: PolygonSet,
    /// Chairs the user may sit on (table context).
    pub sittable: PolygonSet,
    /// When set, the personal square must lie inside this region.
    pub within: Option<PolygonSet>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub owners: Vec<Owner>,
    pub positions: Vec<Point2>,
    pub success: bool,
    /// Smallest centre distance among placed users; absent below two users.
    pub min_pairwise_gap: Option<f64>,
    /// Sum of target distances.
    pub cost: f64,
}

impl Placement {
    fn failed(owners: Vec<Owner>) -> Self {
        Self {
            owners,
            positions: Vec::new(),
            success: false,
            min_pairwise_gap: None,
            cost: 0.0,
        }
    }
}

/// The user list: hosts first, then clients in order.
pub fn users(cfg: &PlacementConfig) -> Vec<Owner> {
    let mut v = vec![Owner::Host; cfg.n_hosts];
    v.extend((0..cfg.n_clients).map(Owner::Client));
    v
}

/// Raw sample positions for a target, before any per-user filtering.
pub fn sample_points(target: &TargetGeometry, cfg: &PlacementConfig) -> Vec<Point2> {
    match target {
        TargetGeometry::Table(t) => sample_closed_path(&offset_path(t, cfg.surface_offset), cfg.d_step),
        TargetGeometry::Wall { face, normal } => {
            let off = normal.scale(cfg.surface_offset);
            sample_segment(
                &Segment {
                    a: face.a.add(off),
                    b: face.b.add(off),
                },
                cfg.d_step,
            )
        }
        TargetGeometry::Floor(region) => {
            let bb = region.bbox();
            if bb.is_empty() {
                return Vec::new();
            }
            let nx = (bb.width() / cfg.d_step + 1e-9).floor() as usize;
            let ny = (bb.height() / cfg.d_step + 1e-9).floor() as usize;
            let mut out = Vec::new();
            for j in 0..=ny {
                for i in 0..=nx {
                    let p = Point2::new(bb.min.x + i as f64 * cfg.d_step, bb.min.y + j as f64 * cfg.d_step);
                    if region.contains(p, 1e-9) {
                        out.push(p);
                    }
                }
            }
            out
        }
    }
}

/// Sample positions restricted to each owner's allowed region.
pub fn sample_candidates(
    target: &TargetGeometry,
    regions: &[(Owner, UserRegion)],
    cfg: &PlacementConfig,
) -> Vec<Candidate> {
    let pts = sample_points(target, cfg);
    let mut out = Vec::new();
    for (owner, r) in regions {
        for p in &pts {
            if r.allowed.contains(*p, 1e-9) {
                out.push(Candidate {
                    position: *p,
                    owner: *owner,
                    on_sittable: r.sittable.contains(*p, 1e-9),
                });
            }
        }
    }
    out
}

fn personal_square(p: Point2, side: f64) -> PolygonSet {
    let h = 0.5 * side;
    Polygon::rect(p.x - h, p.y - h, p.x + h, p.y + h).into()
}

fn admissible(p: Point2, r: &UserRegion, diameter: f64, square: f64) -> bool {
    if !clearance_ok(p, 0.5 * diameter, &r.forbidden) {
        return false;
    }
    match &r.within {
        Some(w) => personal_square(p, square).difference_area(w) <= SQUARE_TOL,
        None => true,
    }
}

/// Keeps candidates whose personal disk is clear of the owner's forbidden set.
pub fn filter_candidates(
    cands: &[Candidate],
    regions: &[(Owner, UserRegion)],
    cfg: &PlacementConfig,
) -> Vec<Candidate> {
    cands
        .iter()
        .filter(|c| {
            regions
                .iter()
                .find(|(o, _)| *o == c.owner)
                .is_some_and(|(_, r)| admissible(c.position, r, cfg.personal_diameter, cfg.personal_diameter))
        })
        .copied()
        .collect()
}

/// Distance from a position to the interaction target; floor targets use
/// the centroid of the user's own candidates.
fn target_cost(target: &TargetGeometry, p: Point2, own_centroid: Point2) -> f64 {
    match target {
        TargetGeometry::Table(t) => {
            if t.contains_interior(p) {
                0.0
            } else {
                t.boundary_distance(p)
            }
        }
        TargetGeometry::Wall { face, .. } => point_segment_distance(p, face.a, face.b),
        TargetGeometry::Floor(_) => p.dist(own_centroid),
    }
}

/// One user's options, sorted by cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Pool {
    pub positions: Vec<Point2>,
    pub costs: Vec<f64>,
    /// Users with equal `group` share an identical pool and cost function.
    pub group: usize,
}

impl Pool {
    pub fn new(mut items: Vec<(Point2, f64)>, group: usize) -> Self {
        items.sort_by(|a, b| {
            a.1.total_cmp(&b.1)
                .then(a.0.y.total_cmp(&b.0.y))
                .then(a.0.x.total_cmp(&b.0.x))
        });
        Self {
            positions: items.iter().map(|i| i.0).collect(),
            costs: items.iter().map(|i| i.1).collect(),
            group,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Chosen index into each pool and the total cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub choice: Vec<usize>,
    pub cost: f64,
}

/// Picks one position per pool with pairwise distances ≥ `min_gap`,
/// minimizing total cost: greedy insertion, budgeted branch and bound,
/// then single and pair moves. Deterministic.
pub fn assign(pools: &[Pool], min_gap: f64) -> Option<Assignment> {
    if pools.iter().any(Pool::is_empty) {
        return None;
    }
    if pools.is_empty() {
        return Some(Assignment {
            choice: Vec::new(),
            cost: 0.0,
        });
    }
    let mut best = greedy(pools, min_gap);
    let mut bb = BranchAndBound::new(pools, min_gap, best.as_ref().map_or(f64::INFINITY, |a| a.cost));
    bb.run();
    if let Some(found) = bb.best {
        best = Some(found);
    }
    best.map(|a| local_moves(pools, min_gap, a))
}

fn compatible(pools: &[Pool], choice: &[Option<usize>], u: usize, i: usize, min_gap: f64) -> bool {
    let p = pools[u].positions[i];
    choice
        .iter()
        .enumerate()
        .all(|(v, c)| v == u || c.is_none_or(|j| p.dist(pools[v].positions[j]) >= min_gap))
}

fn total(pools: &[Pool], choice: &[usize]) -> f64 {
    choice.iter().enumerate().map(|(u, &i)| pools[u].costs[i]).sum()
}

fn greedy(pools: &[Pool], min_gap: f64) -> Option<Assignment> {
    let mut order: Vec<usize> = (0..pools.len()).collect();
    order.sort_by_key(|&u| (pools[u].len(), u));
    let mut choice: Vec<Option<usize>> = vec![None; pools.len()];
    for u in order {
        let i = (0..pools[u].len()).find(|&i| compatible(pools, &choice, u, i, min_gap))?;
        choice[u] = Some(i);
    }
    let choice: Vec<usize> = choice.into_iter().map(|c| c.expect("assigned")).collect();
    Some(Assignment {
        cost: total(pools, &choice),
        choice,
    })
}

struct BranchAndBound<'a> {
    pools: &'a [Pool],
    min_gap: f64,
    /// Rank of each user among users of the same group.
    rank: Vec<usize>,
    bound: f64,
    best: Option<Assignment>,
    work: u64,
}

impl<'a> BranchAndBound<'a> {
    fn new(pools: &'a [Pool], min_gap: f64, bound: f64) -> Self {
        let rank = (0..pools.len())
            .map(|u| (0..u).filter(|&v| pools[v].group == pools[u].group).count())
            .collect();
        Self {
            pools,
            min_gap,
            rank,
            bound,
            best: None,
            work: 0,
        }
    }

    fn run(&mut self) {
        let domains: Vec<Vec<u32>> = self.pools.iter().map(|p| (0..p.len() as u32).collect()).collect();
        let mut choice = vec![None; self.pools.len()];
        self.descend(&domains, &mut choice, 0.0);
    }

    fn descend(&mut self, domains: &[Vec<u32>], choice: &mut Vec<Option<usize>>, cost: f64) {
        if self.work > SEARCH_BUDGET {
            return;
        }
        // Most constrained unassigned user next.
        let Some(u) = (0..self.pools.len())
            .filter(|&u| choice[u].is_none())
            .min_by_key(|&u| (domains[u].len(), u))
        else {
            if cost < self.bound - 1e-12 {
                self.bound = cost;
                self.best = Some(Assignment {
                    choice: choice.iter().map(|c| c.expect("complete")).collect(),
                    cost,
                });
            }
            return;
        };
        for &i in &domains[u] {
            let i = i as usize;
            let here = cost + self.pools[u].costs[i];
            let p = self.pools[u].positions[i];
            let mut next: Vec<Vec<u32>> = Vec::with_capacity(domains.len());
            let mut lower = here;
            let mut dead = false;
            for (v, dom) in domains.iter().enumerate() {
                if v == u || choice[v].is_some() {
                    next.push(Vec::new());
                    continue;
                }
                let same = self.pools[v].group == self.pools[u].group;
                let after = self.rank[v] > self.rank[u];
                self.work += dom.len() as u64;
                let kept: Vec<u32> = dom
                    .iter()
                    .copied()
                    .filter(|&j| {
                        if same && ((after && j as usize <= i) || (!after && j as usize >= i)) {
                            return false;
                        }
                        p.dist(self.pools[v].positions[j as usize]) >= self.min_gap
                    })
                    .collect();
                match kept.first() {
                    None => {
                        dead = true;
                        break;
                    }
                    Some(&j) => lower += self.pools[v].costs[j as usize],
                }
                next.push(kept);
            }
            if dead || lower >= self.bound - 1e-12 {
                continue;
            }
            choice[u] = Some(i);
            self.descend(&next, choice, here);
            choice[u] = None;
            if self.work > SEARCH_BUDGET {
                return;
            }
        }
    }
}

fn local_moves(pools: &[Pool], min_gap: f64, mut a: Assignment) -> Assignment {
    loop {
        let mut improved = false;
        let mut choice: Vec<Option<usize>> = a.choice.iter().map(|&c| Some(c)).collect();
        for u in 0..pools.len() {
            let cur = choice[u].expect("assigned");
            if let Some(i) = (0..cur).find(|&i| compatible(pools, &choice, u, i, min_gap)) {
                choice[u] = Some(i);
                improved = true;
            }
        }
        for u in 0..pools.len() {
            for v in (u + 1)..pools.len() {
                let (cu, cv) = (choice[u].expect("assigned"), choice[v].expect("assigned"));
                let now = pools[u].costs[cu] + pools[v].costs[cv];
                let mut best: Option<(f64, usize, usize)> = None;
                let mut rest = choice.clone();
                rest[u] = None;
                rest[v] = None;
                for i in 0..pools[u].len().min(PAIR_MOVE_TOP) {
                    if !compatible(pools, &rest, u, i, min_gap) {
                        continue;
                    }
                    for j in 0..pools[v].len().min(PAIR_MOVE_TOP) {
                        let c = pools[u].costs[i] + pools[v].costs[j];
                        if c >= now - 1e-12 || best.is_some_and(|b| c >= b.0) {
                            continue;
                        }
                        if pools[u].positions[i].dist(pools[v].positions[j]) >= min_gap
                            && compatible(pools, &rest, v, j, min_gap)
                        {
                            best = Some((c, i, j));
                        }
                    }
                }
                if let Some((_, i, j)) = best {
                    choice[u] = Some(i);
                    choice[v] = Some(j);
                    improved = true;
                }
            }
        }
        let c: Vec<usize> = choice.into_iter().map(|c| c.expect("assigned")).collect();
        let cost = total(pools, &c);
        if !improved || cost >= a.cost - 1e-12 {
            return a;
        }
        a = Assignment { choice: c, cost };
    }
}

/// Joint selection of one position per user.
///
/// Candidate sets are first thinned by re-filtering with an inflated
/// personal diameter; if the thinned sets admit no assignment the full
/// sets are searched.
pub fn select_positions(
    cands: &[Candidate],
    regions: &[(Owner, UserRegion)],
    target: &TargetGeometry,
    cfg: &PlacementConfig,
) -> Placement {
    let owners = users(cfg);
    let keep = PRUNE_MIN_KEEP.max(3 * owners.len());
    let mut by_owner: Vec<(Owner, Vec<Point2>)> = Vec::new();
    for o in &owners {
        if by_owner.iter().any(|(b, _)| b == o) {
            continue;
        }
        let pts: Vec<Point2> = cands.iter().filter(|c| c.owner == *o).map(|c| c.position).collect();
        if pts.is_empty() {
            return Placement::failed(owners);
        }
        by_owner.push((*o, pts));
    }
    let costs: Vec<Vec<f64>> = by_owner
        .iter()
        .map(|(_, pts)| {
            let n = pts.len() as f64;
            let c = pts.iter().fold(Point2::default(), |a, p| a.add(*p)).scale(1.0 / n);
            pts.iter().map(|p| target_cost(target, *p, c)).collect()
        })
        .collect();
    let region_of = |o: &Owner| regions.iter().find(|(r, _)| r == o).map(|(_, r)| r);
    let build = |mask: &dyn Fn(usize, Point2) -> bool| -> Vec<Pool> {
        owners
            .iter()
            .map(|o| {
                let g = by_owner.iter().position(|(b, _)| b == o).expect("listed");
                let items = by_owner[g]
                    .1
                    .iter()
                    .zip(&costs[g])
                    .filter(|(p, _)| mask(g, **p))
                    .map(|(p, c)| (*p, *c))
                    .collect();
                Pool::new(items, g)
            })
            .collect()
    };
    let full = build(&|_, _| true);
    let mut factor = PRUNE_START;
    while factor > 1.0 {
        let d = cfg.personal_diameter * factor;
        let pools = build(&|g, p| region_of(&by_owner[g].0).is_none_or(|r| clearance_ok(p, 0.5 * d, &r.forbidden)));
        if pools.iter().all(|p| p.len() >= keep) {
            if let Some(a) = assign(&pools, cfg.personal_diameter) {
                return finish(owners, &pools, a);
            }
            break;
        }
        factor *= PRUNE_BACKOFF;
    }
    match assign(&full, cfg.personal_diameter) {
        Some(a) => finish(owners, &full, a),
        None => Placement::failed(owners),
    }
}

fn finish(owners: Vec<Owner>, pools: &[Pool], a: Assignment) -> Placement {
    let positions: Vec<Point2> = a
        .choice
        .iter()
        .enumerate()
        .map(|(u, &i)| pools[u].positions[i])
        .collect();
    let mut gap: Option<f64> = None;
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            let d = positions[i].dist(positions[j]);
            gap = Some(gap.map_or(d, |g| g.min(d)));
        }
    }
    Placement {
        owners,
        positions,
        success: true,
        min_pairwise_gap: gap,
        cost: a.cost,
    }
}

/// Samples, filters and selects in one go.
pub fn place_users(target: &TargetGeometry, regions: &[(Owner, UserRegion)], cfg: &PlacementConfig) -> Placement {
    let cands = filter_candidates(&sample_candidates(target, regions, cfg), regions, cfg);
    select_positions(&cands, regions, target, cfg)
}
