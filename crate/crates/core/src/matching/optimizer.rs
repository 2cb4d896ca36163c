//! Seeded population search over client poses.
//!
//! The search variable is `u`, where the client's bounding-box centre lands
//! in host coordinates, plus the rotation angle in continuous mode. In
//! quarter-turn mode each of the four rotations gets its own differential
//! evolution run, starting with the rotation suggested by target selection.
//! The best pose is refined by a compass pattern search and then by snapping
//! nearby vertex coordinates onto each other.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ContextWeights, MatchConfig, MatchError, MatchProblem, MatchResult, RotationMode};
use crate::floorplan::Context;
use crate::geometry::{Aabb, Point2, Pose};

const DE_F: f64 = 0.7;
const DE_CR: f64 = 0.9;
const POLISH_STEP: f64 = 0.25;
const POLISH_MIN_STEP: f64 = 0.002;
const POLISH_ANGLE_STEP: f64 = 0.05;
const POLISH_MAX_EVALS: usize = 240;
const SNAP_RADIUS: f64 = 0.6;
const SNAP_ROUNDS: usize = 4;
const SNAP_MAX_PER_AXIS: usize = 24;

struct Search<'a> {
    problem: &'a MatchProblem,
    weights: &'a ContextWeights,
    center: Point2,
    best: Option<(f64, Pose)>,
    evals: usize,
}

impl Search<'_> {
    fn pose(&self, u: Point2, theta: f64) -> Pose {
        let r = Pose::new(0.0, 0.0, theta).rotate(self.center);
        Pose::new(u.x - r.x, u.y - r.y, theta)
    }

    fn eval(&mut self, x: &[f64], theta: f64) -> f64 {
        let theta = if x.len() > 2 { x[2] } else { theta };
        let pose = self.pose(Point2::new(x[0], x[1]), theta);
        let f = self.problem.score(&pose, self.weights);
        self.evals += 1;
        if self.best.as_ref().is_none_or(|(b, _)| f > *b) {
            self.best = Some((f, pose));
        }
        f
    }
}

/// Finds the client pose maximizing the weighted objective.
///
/// Deterministic for a given `cfg.seed`. The returned objective is the best
/// value among every pose evaluated during the search.
pub fn optimize_pose(
    problem: &MatchProblem,
    weights: &ContextWeights,
    cfg: &MatchConfig,
) -> Result<MatchResult, MatchError> {
    cfg.validate()?;
    weights.validate()?;
    let client_box = problem.client.map.boundary.bbox();
    let host_box = problem.host.map.boundary.bbox();
    let mut s = Search {
        problem,
        weights,
        center: client_box.center(),
        best: None,
        evals: 0,
    };
    let k0 = problem.targets.client.rotation;
    match cfg.rotation_mode {
        RotationMode::QuarterTurns => {
            for i in 0..4u8 {
                let k = (k0 + i) % 4;
                let theta = f64::from(k) * FRAC_PI_2;
                let (hw, hh) = if k.is_multiple_of(2) {
                    (0.5 * client_box.width(), 0.5 * client_box.height())
                } else {
                    (0.5 * client_box.height(), 0.5 * client_box.width())
                };
                let lo = vec![host_box.min.x - hw, host_box.min.y - hh];
                let hi = vec![host_box.max.x + hw, host_box.max.y + hh];
                let seeds: Vec<Vec<f64>> = seed_positions(problem, &s, theta)
                    .into_iter()
                    .map(|u| vec![u.x, u.y])
                    .collect();
                let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, u64::from(k)));
                let x = differential_evolution(&mut s, theta, &lo, &hi, seeds, cfg, &mut rng);
                polish(&mut s, x, theta, &lo, &hi);
            }
        }
        RotationMode::Continuous => {
            let r = 0.5 * client_box.diagonal();
            let lo = vec![host_box.min.x - r, host_box.min.y - r, 0.0];
            let hi = vec![host_box.max.x + r, host_box.max.y + r, TAU];
            let mut seeds = Vec::new();
            for i in 0..4u8 {
                let theta = f64::from((k0 + i) % 4) * FRAC_PI_2;
                seeds.extend(
                    seed_positions(problem, &s, theta)
                        .into_iter()
                        .map(|u| vec![u.x, u.y, theta]),
                );
            }
            seeds.truncate(cfg.population / 2);
            let mut rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, 4));
            let x = differential_evolution(&mut s, 0.0, &lo, &hi, seeds, cfg, &mut rng);
            polish(&mut s, x, 0.0, &lo, &hi);
        }
    }
    match s.best {
        Some((f, pose)) if f >= 0.0 => {
            let res = problem.result(pose, weights);
            debug_assert!((res.objective - f).abs() <= 1e-9);
            Ok(res)
        }
        _ => Err(MatchError::NoOverlap {
            host: problem.host_id.clone(),
            client: problem.client_id.clone(),
        }),
    }
}

fn mix(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(k.wrapping_mul(0xBF58_476D_1CE4_E5B9))
}

/// Heuristic starting points: target onto target, footprint centre onto
/// footprint centre and corner onto corner.
fn seed_positions(problem: &MatchProblem, s: &Search<'_>, theta: f64) -> Vec<Point2> {
    let rot = Pose::new(0.0, 0.0, theta);
    // u that carries client point p onto host point q
    let align = |q: Point2, p: Point2| q.sub(rot.rotate(p.sub(s.center)));
    let mut out = Vec::new();
    match problem.context {
        Context::Table => {
            if let (Some(h), Some(c)) = (&problem.host.table, &problem.client.table) {
                out.push(align(h.bbox().center(), c.bbox().center()));
            }
        }
        Context::Wall => {
            if let Some(h) = problem.host.wall_faces.first() {
                let hn = h.direction();
                for c in &problem.client.wall_faces {
                    let cd = rot.rotate(c.direction());
                    if hn.cross(cd).abs() < 1e-6 {
                        out.push(align(h.midpoint(), c.midpoint()));
                    }
                }
                out.truncate(3);
            }
        }
        Context::Floor => {
            out.push(align(
                problem.host.map.movable_floor.bbox().center(),
                problem.client.map.movable_floor.bbox().center(),
            ));
        }
    }
    let hb = problem.host.map.boundary.bbox();
    out.push(hb.center());
    let cb = rotated_box(&problem.client.map.boundary.bbox(), &rot, s.center);
    for (hx, cx) in [(hb.min.x, cb.min.x), (hb.max.x, cb.max.x)] {
        for (hy, cy) in [(hb.min.y, cb.min.y), (hb.max.y, cb.max.y)] {
            out.push(Point2::new(hx - cx, hy - cy));
        }
    }
    out
}

/// Client box after rotating about its centre, expressed relative to that centre.
fn rotated_box(b: &Aabb, rot: &Pose, c: Point2) -> Aabb {
    let corners = [
        b.min,
        Point2::new(b.max.x, b.min.y),
        b.max,
        Point2::new(b.min.x, b.max.y),
    ];
    let pts: Vec<Point2> = corners.iter().map(|p| rot.rotate(p.sub(c))).collect();
    Aabb::from_points(&pts)
}

fn differential_evolution(
    s: &mut Search<'_>,
    theta: f64,
    lo: &[f64],
    hi: &[f64],
    seeds: Vec<Vec<f64>>,
    cfg: &MatchConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let dim = lo.len();
    let np = cfg.population;
    let clamp = |x: &mut Vec<f64>| {
        for d in 0..dim {
            x[d] = x[d].clamp(lo[d], hi[d]);
        }
    };
    let mut pop: Vec<Vec<f64>> = seeds.into_iter().take(np).collect();
    for x in &mut pop {
        clamp(x);
    }
    while pop.len() < np {
        pop.push((0..dim).map(|d| rng.random_range(lo[d]..=hi[d])).collect());
    }
    let mut fit: Vec<f64> = pop.iter().map(|x| s.eval(x, theta)).collect();
    for _ in 0..cfg.generations {
        for i in 0..np {
            let mut pick = |avoid: &[usize]| loop {
                let r = rng.random_range(0..np);
                if !avoid.contains(&r) {
                    break r;
                }
            };
            let r1 = pick(&[i]);
            let r2 = pick(&[i, r1]);
            let r3 = pick(&[i, r1, r2]);
            let jrand = rng.random_range(0..dim);
            let mut trial = pop[i].clone();
            for d in 0..dim {
                if d == jrand || rng.random::<f64>() < DE_CR {
                    let v = pop[r1][d] + DE_F * (pop[r2][d] - pop[r3][d]);
                    // Out-of-bounds components restart between the parent and the bound.
                    trial[d] = if v < lo[d] {
                        lo[d] + rng.random::<f64>() * (pop[i][d] - lo[d])
                    } else if v > hi[d] {
                        hi[d] - rng.random::<f64>() * (hi[d] - pop[i][d])
                    } else {
                        v
                    };
                }
            }
            let f = s.eval(&trial, theta);
            if f >= fit[i] {
                pop[i] = trial;
                fit[i] = f;
            }
        }
    }
    let best = (0..np).fold(0, |b, i| if fit[i] > fit[b] { i } else { b });
    pop.swap_remove(best)
}

/// Compass search followed by coordinate snapping.
fn polish(s: &mut Search<'_>, mut x: Vec<f64>, theta: f64, lo: &[f64], hi: &[f64]) {
    let dim = x.len();
    let mut fx = s.eval(&x, theta);
    let mut step = POLISH_STEP;
    let mut evals = 0;
    while step >= POLISH_MIN_STEP && evals < POLISH_MAX_EVALS {
        let mut improved = false;
        for d in 0..dim {
            let h = if d == 2 {
                step * POLISH_ANGLE_STEP / POLISH_STEP
            } else {
                step
            };
            for sign in [1.0, -1.0] {
                let mut y = x.clone();
                y[d] = (y[d] + sign * h).clamp(lo[d], hi[d]);
                let fy = s.eval(&y, theta);
                evals += 1;
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    for _ in 0..SNAP_ROUNDS {
        let th = if dim > 2 { x[2] } else { theta };
        let pose = s.pose(Point2::new(x[0], x[1]), th);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for axis in 0..2 {
            for delta in snap_deltas(s.problem, &pose, axis) {
                let mut y = x.clone();
                y[axis] = (y[axis] + delta).clamp(lo[axis], hi[axis]);
                let fy = s.eval(&y, theta);
                if fy > fx && best.as_ref().is_none_or(|(b, _)| fy > *b) {
                    best = Some((fy, y));
                }
            }
        }
        match best {
            Some((fy, y)) => {
                x = y;
                fx = fy;
            }
            None => break,
        }
    }
}

/// Small translations along `axis` that make a client key coordinate
/// coincide with a host key coordinate.
fn snap_deltas(problem: &MatchProblem, pose: &Pose, axis: usize) -> Vec<f64> {
    let coord = |p: Point2| if axis == 0 { p.x } else { p.y };
    let mut host: Vec<f64> = problem
        .host
        .map
        .boundary
        .polygons()
        .iter()
        .flat_map(|p| p.vertices().iter().map(|v| coord(*v)))
        .collect();
    let mut client: Vec<f64> = problem
        .client
        .map
        .boundary
        .polygons()
        .iter()
        .flat_map(|p| p.vertices().iter().map(|v| coord(pose.apply(*v))))
        .collect();
    if let (Some(h), Some(c)) = (&problem.host.table, &problem.client.table) {
        host.extend(h.vertices().iter().map(|v| coord(*v)));
        client.extend(c.vertices().iter().map(|v| coord(pose.apply(*v))));
    }
    if let Some(h) = problem.host.wall_faces.first() {
        host.extend([coord(h.a), coord(h.b)]);
        for f in &problem.client.wall_faces {
            client.extend([coord(pose.apply(f.a)), coord(pose.apply(f.b))]);
        }
    }
    let mut deltas: Vec<f64> = host
        .iter()
        .flat_map(|h| client.iter().map(move |c| h - c))
        .filter(|d| d.abs() > 1e-9 && d.abs() < SNAP_RADIUS)
        .collect();
    deltas.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
    deltas.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    deltas.truncate(SNAP_MAX_PER_AXIS);
    deltas
}
