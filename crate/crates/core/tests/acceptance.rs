//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::path::Path;
use std::time::Instant;

use mutualspace::config::RunConfig;
use mutualspace::corpus::Corpus;
use mutualspace::evaluation::{
    aggregate, format_table, outcome_path, report_csv, run_sweep, AggregateRow, Condition, MetricsRecord, Sweep,
};
use mutualspace::floorplan::{Context, Floorplan, SemanticLabel, SemanticMap};
use mutualspace::geometry::{Point2, Polygon, PolygonSet, Pose, Segment};
use mutualspace::matching::{optimize_pose, ContextWeights, MatchConfig, MatchProblem, BOUNDARY_EPS};
use mutualspace::pipeline::{MatchCache, Method, RunOutcome};
use mutualspace::placement::{assign, Pool};
use mutualspace::subspace::matched_area;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CELL: f64 = 0.01;

type Verdict = (bool, String);

// ---------------------------------------------------------------- oracles

/// Even-odd point-in-ring test.
fn inside(ring: &[Point2], p: Point2) -> bool {
    let mut c = false;
    let n = ring.len();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) && p.x < a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y) {
            c = !c;
        }
    }
    c
}

/// Cell centres of a `CELL` grid covering `[min, max]`.
fn grid(min: Point2, max: Point2) -> impl Iterator<Item = Point2> {
    let nx = ((max.x - min.x) / CELL).ceil() as usize;
    let ny = ((max.y - min.y) / CELL).ceil() as usize;
    (0..ny).flat_map(move |j| {
        (0..nx).map(move |i| Point2::new(min.x + (i as f64 + 0.5) * CELL, min.y + (j as f64 + 0.5) * CELL))
    })
}

/// Label of the raw plan at `p`; `None` outside the boundary.
fn label_at(fp: &Floorplan, p: Point2) -> Option<SemanticLabel> {
    if !inside(fp.boundary.vertices(), p) {
        return None;
    }
    Some(
        fp.regions
            .iter()
            .find(|r| inside(r.shape.vertices(), p))
            .map_or(SemanticLabel::Floor, |r| r.label),
    )
}

fn class(l: SemanticLabel, ctx: Context) -> SemanticLabel {
    if l == SemanticLabel::Chair && ctx != Context::Table {
        SemanticLabel::Obstacle
    } else {
        l
    }
}

fn movable(l: SemanticLabel, ctx: Context) -> bool {
    l == SemanticLabel::Floor || (l == SemanticLabel::Chair && ctx == Context::Table)
}

/// (sem, size, mov) by classifying grid cells of the raw plans.
fn raster_area_terms(host: &Floorplan, client: &Floorplan, pose: &Pose, ctx: Context) -> (f64, f64, f64) {
    let inv = pose.inverse();
    let bb = host.boundary.bbox();
    let (mut host_n, mut ov, mut same, mut hmov, mut both_mov) = (0usize, 0usize, 0usize, 0usize, 0usize);
    for q in grid(bb.min, bb.max) {
        let Some(h) = label_at(host, q) else { continue };
        host_n += 1;
        let hm = movable(h, ctx);
        hmov += usize::from(hm);
        let Some(c) = label_at(client, inv.apply(q)) else {
            continue;
        };
        ov += 1;
        same += usize::from(class(h, ctx) == class(c, ctx));
        both_mov += usize::from(hm && movable(c, ctx));
    }
    let r = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    (r(same, ov), r(ov, host_n), r(both_mov, hmov))
}

/// Share of `a`'s length whose 1 mm samples have a perpendicular foot on a
/// parallel (≤ 10°) segment of `b` within `eps`.
fn sampled_alignment(a: &[Segment], b: &[Segment], eps: f64) -> f64 {
    let (mut hit, mut total) = (0.0, 0.0);
    for s in a {
        let len = s.length();
        let n = (len / 0.001).ceil() as usize;
        let u = s.b.sub(s.a).scale(1.0 / len);
        for k in 0..n {
            let m = s.a.add(u.scale((k as f64 + 0.5) * len / n as f64));
            total += len / n as f64;
            let ok = b.iter().any(|t| {
                let tl = t.length();
                let v = t.b.sub(t.a).scale(1.0 / tl);
                let rel = m.sub(t.a);
                let along = rel.dot(v);
                u.cross(v).abs() <= 10f64.to_radians().sin() && along >= 0.0 && along <= tl && rel.cross(v).abs() <= eps
            });
            if ok {
                hit += len / n as f64;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        hit / total
    }
}

// ---------------------------------------------------------------- criteria

fn star(rng: &mut ChaCha8Rng, center: Point2) -> Polygon {
    let n = rng.random_range(5..=12u32);
    let pts = (0..n)
        .map(|i| {
            let a = (f64::from(i) + rng.random_range(0.0..0.8)) * TAU / f64::from(n);
            let r = rng.random_range(0.6..2.0);
            Point2::new(center.x + r * a.cos(), center.y + r * a.sin())
        })
        .collect();
    Polygon::new(pts).expect("star polygon is simple")
}

fn c1_geometry() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_rel, mut worst_ie) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let a = star(&mut rng, Point2::new(0.0, 0.0));
        let shift = Point2::new(rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8));
        let b = star(&mut rng, shift);
        let (sa, sb): (PolygonSet, PolygonSet) = (a.clone().into(), b.clone().into());
        let inter = sa.intersection(&sb).area();
        let uni = sa.union(&sb).area();
        let diff = sa.difference(&sb).area();
        let bb = a.bbox().union(b.bbox());
        let (mut ri, mut ru, mut rd) = (0usize, 0usize, 0usize);
        for q in grid(bb.min, bb.max) {
            let (ia, ib) = (inside(a.vertices(), q), inside(b.vertices(), q));
            ri += usize::from(ia && ib);
            ru += usize::from(ia || ib);
            rd += usize::from(ia && !ib);
        }
        let cell = CELL * CELL;
        for (got, cells) in [(inter, ri), (uni, ru), (diff, rd)] {
            let want = cells as f64 * cell;
            worst_rel = worst_rel.max((got - want).abs() / want.max(0.25));
        }
        worst_ie = worst_ie.max((uni - (a.area() + b.area() - inter)).abs());
    }
    (
        worst_rel <= 0.02 && worst_ie <= 1e-4,
        format!(
            "worst relative deviation {:.3}%, worst inclusion-exclusion gap {worst_ie:.2e} m²",
            100.0 * worst_rel
        ),
    )
}

fn quick_cfg(seed: u64) -> MatchConfig {
    MatchConfig {
        population: 8,
        generations: 20,
        seed,
        ..MatchConfig::default()
    }
}

fn c2_terms(corpus: &Corpus) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let clients: Vec<&Floorplan> = corpus.homes.iter().chain(&corpus.offices).collect();
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    for term in ["sem", "size", "mov", "hor", "ver"] {
        let (ctx, w) = match term {
            "hor" => (Context::Table, ContextWeights::SA_TABLE),
            "ver" => (Context::Wall, ContextWeights::SA_WALL),
            _ => (Context::Floor, ContextWeights::SA_FLOOR),
        };
        for s in 0..20u64 {
            let host = &corpus.hosts[rng.random_range(0..corpus.hosts.len())];
            let client = clients[rng.random_range(0..clients.len())];
            let ctx = if ["sem", "size", "mov"].contains(&term) {
                [Context::Table, Context::Wall, Context::Floor][s as usize % 3]
            } else {
                ctx
            };
            let p = MatchProblem::with_targets(host, client, ctx, None, BOUNDARY_EPS).expect("targets");
            let base = optimize_pose(&p, &w, &quick_cfg(s)).expect("optimizes").pose;
            let pose = if rng.random_bool(0.5) {
                base
            } else {
                Pose::new(
                    base.tx + rng.random_range(-0.15..0.15),
                    base.ty + rng.random_range(-0.15..0.15),
                    base.theta(),
                )
            };
            let hm = SemanticMap::build(host, ctx);
            let cm = SemanticMap::build(client, ctx);
            let (got, want) = match term {
                "sem" | "size" | "mov" => {
                    let (sem, size, mov) = raster_area_terms(host, client, &pose, ctx);
                    match term {
                        "sem" => (mutualspace::matching::psi_g_sem(&hm, &cm, &pose), sem),
                        "size" => (mutualspace::matching::psi_g_size(&hm, &cm, &pose), size),
                        _ => (mutualspace::matching::psi_i_mov(&hm, &cm, &pose), mov),
                    }
                }
                "hor" => {
                    let (h, c) = (
                        p.host_table().expect("host table"),
                        p.client_table().expect("client table"),
                    );
                    let got = mutualspace::matching::psi_i_hor(Some(h), Some(c), &pose, BOUNDARY_EPS);
                    let moved = c.transformed(&pose);
                    (got, sampled_alignment(&h.segments(), &moved.segments(), BOUNDARY_EPS))
                }
                _ => {
                    let h = p.host_wall_face().expect("host wall");
                    let faces: Vec<Segment> = client.wall_faces().iter().map(|f| f.face).collect();
                    let got = mutualspace::matching::psi_i_ver(Some(h), &faces, &pose, BOUNDARY_EPS);
                    let moved: Vec<Segment> = faces.iter().map(|f| f.transformed(&pose)).collect();
                    (got, sampled_alignment(std::slice::from_ref(h), &moved, BOUNDARY_EPS))
                }
            };
            let e = worst.entry(term).or_insert(0.0);
            *e = e.max((got - want).abs());
        }
    }
    let max = worst.values().copied().fold(0.0, f64::max);
    let detail = worst
        .iter()
        .map(|(k, v)| format!("{k} {v:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    (max <= 0.02, format!("worst |ψ − oracle| per term: {detail}"))
}

fn c3_self_match(corpus: &Corpus) -> Verdict {
    let cfg = MatchConfig {
        population: 32,
        generations: 100,
        seed: 3,
        ..MatchConfig::default()
    };
    let mut worst = (f64::INFINITY, f64::INFINITY);
    let mut bad = Vec::new();
    for p in corpus.all() {
        let prob = MatchProblem::with_targets(p, p, Context::Floor, None, BOUNDARY_EPS).expect("targets");
        let r = optimize_pose(&prob, &ContextWeights::SA_FLOOR, &cfg).expect("optimizes");
        worst = (worst.0.min(r.terms.g_sem), worst.1.min(r.terms.i_mov));
        if r.terms.g_sem < 0.99 || r.terms.i_mov < 0.99 {
            bad.push(p.id.clone());
        }
    }
    (
        bad.is_empty(),
        format!(
            "14 plans, min ψ_G,sem {:.4}, min ψ_I,mov {:.4}{}",
            worst.0,
            worst.1,
            failed_list(&bad)
        ),
    )
}

fn failed_list(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        format!("; below threshold: {}", bad.join(", "))
    }
}

fn c4_rigid_motion(corpus: &Corpus) -> Verdict {
    let pairs = [
        ("meeting-room-1", "home-1", Method::SaFloor),
        ("meeting-room-2", "office-3", Method::SaTable),
        ("meeting-room-3", "home-4", Method::SaWall),
        ("meeting-room-4", "office-5", Method::SaFloor),
        ("meeting-room-1", "office-2", Method::SaTable),
    ];
    let cfg = MatchConfig::default();
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (h, c, m) in pairs {
        let host = corpus.find(h).expect("host");
        let client = corpus.find(c).expect("client");
        let turned = client.transformed(&Pose::new(3.0, -1.0, FRAC_PI_2));
        let solve = |cl: &Floorplan| {
            let p = MatchProblem::with_targets(host, cl, m.context(), None, BOUNDARY_EPS).expect("targets");
            optimize_pose(&p, &m.weights(), &cfg).expect("optimizes").objective
        };
        let (a, b) = (solve(client), solve(&turned));
        worst = worst.max((a - b).abs());
        parts.push(format!("{h}/{c} {a:.3}"));
    }
    (worst < 1e-2, format!("max |ΔO| {worst:.2e} over {}", parts.join(", ")))
}

fn c5_placement() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut agree, mut worst_ratio, mut gap_ok, mut feasible) = (0, 1.0f64, true, 0);
    for _ in 0..100 {
        let n = rng.random_range(1..=3);
        let span = rng.random_range(2..=8);
        let pools: Vec<Pool> = (0..n)
            .map(|g| {
                let m = rng.random_range(1..=15);
                let items = (0..m)
                    .map(|_| {
                        let p = Point2::new(
                            0.2 * f64::from(rng.random_range(0..span)),
                            0.2 * f64::from(rng.random_range(0..span)),
                        );
                        (p, rng.random_range(0.0..1.0))
                    })
                    .collect();
                Pool::new(items, g)
            })
            .collect();
        let got = assign(&pools, 0.6);
        let best = brute_force(&pools, 0.6);
        if got.is_some() == best.is_some() {
            agree += 1;
        }
        if let (Some(g), Some(b)) = (&got, best) {
            feasible += 1;
            worst_ratio = worst_ratio.max(if b > 0.0 { g.cost / b } else { 1.0 + g.cost });
            let pts: Vec<Point2> = g
                .choice
                .iter()
                .enumerate()
                .map(|(u, &i)| pools[u].positions[i])
                .collect();
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    gap_ok &= pts[i].dist(pts[j]) >= 0.6;
                }
            }
        }
    }
    (
        agree == 100 && worst_ratio <= 1.1 && gap_ok,
        format!(
            "feasibility agrees on {agree}/100 ({feasible} feasible), worst cost/optimum {worst_ratio:.4}, gaps ≥ 0.6 m: {gap_ok}"
        ),
    )
}

fn brute_force(pools: &[Pool], gap: f64) -> Option<f64> {
    fn go(pools: &[Pool], gap: f64, chosen: &mut Vec<Point2>, cost: f64, best: &mut Option<f64>) {
        let u = chosen.len();
        if u == pools.len() {
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
            return;
        }
        for (p, c) in pools[u].positions.iter().zip(&pools[u].costs) {
            if chosen.iter().all(|q| q.dist(*p) >= gap) {
                chosen.push(*p);
                go(pools, gap, chosen, cost + c, best);
                chosen.pop();
            }
        }
    }
    let mut best = None;
    go(pools, gap, &mut Vec::new(), 0.0, &mut best);
    best
}

fn c6_subspaces(corpus: &Corpus, out: &Path) -> Verdict {
    let (mut checked, mut bad) = (0usize, Vec::new());
    let (mut worst_sq, mut worst_fp, mut worst_un) = (0.0f64, 0.0f64, 0.0f64);
    for m in Method::ALL.into_iter().filter(|m| m.uses_subspaces()) {
        for combo in mutualspace::evaluation::enumerate_condition(corpus, Condition::C2) {
            for h in 1..=3 {
                let path = outcome_path(out, m, &combo, h);
                let o: RunOutcome = serde_json::from_str(&std::fs::read_to_string(&path).expect("outcome file"))
                    .expect("outcome parses");
                let Some(ms) = o.mutual_space.as_ref().filter(|_| o.success) else {
                    continue;
                };
                let host = corpus.find(&o.host).expect("host");
                let hmap = SemanticMap::build(host, m.context());
                for (k, s) in ms.subspaces.iter().enumerate() {
                    let client = corpus.find(&o.clients[k]).expect("client");
                    let pose = o.matches[k].pose;
                    let p = s.position;
                    let square: PolygonSet = Polygon::rect(p.x - 0.3, p.y - 0.3, p.x + 0.3, p.y + 0.3).into();
                    let footprint: PolygonSet = PolygonSet::from(host.boundary.clone())
                        .intersection(&client.boundary.transformed(&pose).into());
                    let area = matched_area(&hmap, &SemanticMap::build(client, m.context()), &pose);
                    let sq = square.difference_area(&s.region);
                    let fp = s.region.difference_area(&footprint);
                    let un = s.region.intersection_area(&area.unmatched);
                    worst_sq = worst_sq.max(sq);
                    worst_fp = worst_fp.max(fp);
                    worst_un = worst_un.max(un);
                    checked += 1;
                    if sq > 1e-4 || fp > 1e-4 || un > 0.05 {
                        bad.push(format!("{m} {} h{h} C{}", combo.id, k + 1));
                    }
                }
            }
        }
    }
    (
        bad.is_empty() && checked > 0,
        format!(
            "{checked} subspaces; worst square outside {worst_sq:.1e} m², outside footprint {worst_fp:.1e} m², unmatched inside {worst_un:.3} m²{}",
            failed_list(&bad)
        ),
    )
}

fn cell(rows: &[AggregateRow], m: Method, c: Condition, h: usize) -> &AggregateRow {
    rows.iter()
        .find(|r| r.method == m && r.condition == c && r.n_hosts == h)
        .expect("cell present")
}

fn c7_success(rows: &[AggregateRow]) -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for m in [Method::SaFloor, Method::SIsa] {
        let min = rows
            .iter()
            .filter(|r| r.method == m)
            .map(|r| r.success_rate())
            .fold(1.0, f64::min);
        ok &= min == 1.0;
        notes.push(format!("{m} min {:.1}%", 100.0 * min));
    }
    let rate = |c, h| cell(rows, Method::STi, c, h).success_rate();
    for h in 1..=3 {
        ok &= rate(Condition::C2, h) >= rate(Condition::C4, h) && rate(Condition::C4, h) >= rate(Condition::C6, h);
    }
    for c in Condition::ALL {
        ok &= rate(c, 1) >= rate(c, 2) && rate(c, 2) >= rate(c, 3);
    }
    ok &= rate(Condition::C6, 1) == 0.0;
    let grid: Vec<String> = Condition::ALL
        .iter()
        .map(|&c| {
            format!(
                "{c} [{}]",
                (1..=3)
                    .map(|h| format!("{:.1}", 100.0 * rate(c, h)))
                    .collect::<Vec<_>>()
                    .join(" ")
            )
        })
        .collect();
    notes.push(format!("S-TI % by H1..H3: {}", grid.join(", ")));
    (ok, notes.join("; "))
}

fn mean(s: Option<mutualspace::evaluation::Stats>) -> Option<f64> {
    s.map(|s| s.mean)
}

fn c8_areas(rows: &[AggregateRow]) -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for m in [Method::SaTable, Method::SaWall, Method::SaFloor] {
        let a = mean(cell(rows, m, Condition::C2, 1).total_interactable);
        let b = mean(cell(rows, m, Condition::C6, 1).total_interactable);
        ok &= matches!((a, b), (Some(a), Some(b)) if b > a);
        notes.push(format!("{m} {} → {}", fmt(a), fmt(b)));
    }
    let a = mean(cell(rows, Method::STi, Condition::C2, 1).total_interactable);
    let b = mean(cell(rows, Method::STi, Condition::C4, 1).total_interactable);
    ok &= matches!((a, b), (Some(a), Some(b)) if b < a);
    notes.push(format!("S-TI C2→C4 {} → {}", fmt(a), fmt(b)));
    for c in Condition::ALL {
        let Some(sti) = mean(cell(rows, Method::STi, c, 1).total_obstacle) else {
            continue;
        };
        for m in [Method::SaTable, Method::SaWall, Method::SaFloor] {
            if let Some(sa) = mean(cell(rows, m, c, 1).total_obstacle) {
                ok &= sa < sti;
            }
        }
        notes.push(format!("{c} obstacle S-TI {sti:.2}"));
    }
    (ok, notes.join("; "))
}

fn fmt(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.2}"))
}

fn c10_per_client(rows: &[AggregateRow]) -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for m in Method::ALL.into_iter().filter(|m| m.uses_subspaces()) {
        for c in [Condition::C2, Condition::C4] {
            let v = mean(cell(rows, m, c, 1).client_interactable);
            ok &= v.is_some_and(|v| v > 3.0);
            notes.push(format!("{m} {c} {}", fmt(v)));
        }
    }
    (ok, notes.join(", "))
}

fn files_under(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).expect("readable dir") {
            let p = e.expect("entry").path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(root).expect("under root").display().to_string();
                out.insert(rel, std::fs::read(&p).expect("readable file"));
            }
        }
    }
    out
}

fn c2_only(records: &[MetricsRecord]) -> Vec<MetricsRecord> {
    records
        .iter()
        .filter(|r| r.condition == Condition::C2)
        .cloned()
        .collect()
}

fn c9_determinism(corpus: &Corpus, cfg: &RunConfig, first: &[MetricsRecord], first_dir: &Path) -> Verdict {
    let dir = tempfile::tempdir().expect("tempdir");
    let sweep = Sweep {
        conditions: vec![Condition::C2],
        out_dir: Some(dir.path().to_path_buf()),
        ..Sweep::default()
    };
    let second = run_sweep(corpus, &sweep, cfg, &MatchCache::new()).expect("second sweep");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    report_csv(&aggregate(&c2_only(first)), &a).expect("csv");
    report_csv(&aggregate(&second), &b).expect("csv");
    let csv_same = std::fs::read(&a).expect("csv") == std::fs::read(&b).expect("csv");
    let json_second: BTreeMap<String, Vec<u8>> = files_under(dir.path())
        .into_iter()
        .filter(|(k, _)| k.ends_with(".json"))
        .collect();
    let json_first: BTreeMap<String, Vec<u8>> = files_under(first_dir)
        .into_iter()
        .filter(|(k, _)| k.contains("/H1-C2/") && k.ends_with(".json"))
        .collect();
    let json_same = json_first == json_second;
    (
        csv_same && json_same && !json_first.is_empty(),
        format!(
            "CSV identical: {csv_same}; {} JSON outputs identical: {json_same}",
            json_first.len()
        ),
    )
}

// ---------------------------------------------------------------- driver

fn main() {
    let corpus = Corpus::bundled();
    let cfg = RunConfig::default();
    let mut results: Vec<(u32, &str, Verdict, f64)> = Vec::new();
    let mut run = |n: u32, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        let secs = t.elapsed().as_secs_f64();
        println!(
            "criterion {n:>2} {} {name}: {} [{secs:.1} s]",
            if v.0 { "PASS" } else { "FAIL" },
            v.1
        );
        results.push((n, name, v, secs));
    };

    run(1, "geometry oracle", &mut c1_geometry);
    run(2, "ψ-term oracle", &mut || c2_terms(&corpus));
    run(3, "self-match optimum", &mut || c3_self_match(&corpus));
    run(4, "rigid-motion invariance", &mut || c4_rigid_motion(&corpus));
    run(5, "placement oracle", &mut c5_placement);

    let t = Instant::now();
    let dir = tempfile::tempdir().expect("tempdir");
    let sweep = Sweep {
        out_dir: Some(dir.path().to_path_buf()),
        ..Sweep::default()
    };
    let records = run_sweep(&corpus, &sweep, &cfg, &MatchCache::new()).expect("full sweep");
    let rows = aggregate(&records);
    println!(
        "full sweep: {} runs in {:.1} s",
        records.len(),
        t.elapsed().as_secs_f64()
    );
    print!("{}", format_table(&rows));

    run(6, "subspace invariants", &mut || c6_subspaces(&corpus, dir.path()));
    run(7, "success-rate trends", &mut || c7_success(&rows));
    run(8, "area trends", &mut || c8_areas(&rows));
    run(9, "determinism", &mut || {
        c9_determinism(&corpus, &cfg, &records, dir.path())
    });
    run(10, "per-client floor", &mut || c10_per_client(&rows));

    let failed: Vec<u32> = results.iter().filter(|r| !r.2 .0).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
