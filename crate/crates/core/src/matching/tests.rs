use proptest::prelude::*;

use super::*;
use crate::floorplan::{LabeledRegion, SemanticLabel, SpaceKind};
use crate::geometry::{raster, Point2};
use crate::scenegraph::TargetSelection;

fn rect_region(id: &str, label: SemanticLabel, r: (f64, f64, f64, f64)) -> LabeledRegion {
    LabeledRegion {
        id: id.into(),
        label,
        shape: Polygon::rect(r.0, r.1, r.2, r.3),
    }
}

fn plan(id: &str, w: f64, h: f64, regions: Vec<LabeledRegion>) -> Floorplan {
    Floorplan::new(id.into(), SpaceKind::Home, Polygon::rect(0.0, 0.0, w, h), regions).unwrap()
}

fn floor_targets() -> TargetPair {
    let t = TargetSelection {
        region_id: crate::scenegraph::MOVABLE_FLOOR_ID.into(),
        rotation: 0,
        score: 1.0,
    };
    TargetPair {
        host: t.clone(),
        client: t,
    }
}

fn meeting_room() -> Floorplan {
    plan(
        "room",
        6.0,
        5.0,
        vec![
            rect_region("wall-s", SemanticLabel::Wall, (0.0, 0.0, 6.0, 0.1)),
            rect_region("wall-n", SemanticLabel::Wall, (0.0, 4.9, 6.0, 5.0)),
            rect_region("table", SemanticLabel::Table, (2.0, 2.0, 4.0, 3.0)),
            rect_region("chair-1", SemanticLabel::Chair, (2.3, 1.3, 2.7, 1.7)),
            rect_region("chair-2", SemanticLabel::Chair, (3.3, 3.3, 3.7, 3.7)),
            rect_region("shelf", SemanticLabel::Obstacle, (5.3, 1.0, 5.9, 3.0)),
        ],
    )
}

const POSE_ID: Pose = Pose::IDENTITY;

#[test]
fn sem_examples() {
    let host = SemanticMap::build(&meeting_room(), Context::Floor);
    let s = psi_g_sem(&host, &host, &POSE_ID);
    assert!((s - 1.0).abs() < 1e-6, "{s}");

    let h = SemanticMap::build(
        &plan(
            "h",
            4.0,
            4.0,
            vec![rect_region("t", SemanticLabel::Table, (1.0, 1.5, 3.0, 2.5))],
        ),
        Context::Floor,
    );
    let c = SemanticMap::build(&plan("c", 2.0, 2.0, vec![]), Context::Floor);
    let centred = Pose::new(1.0, 1.0, 0.0);
    assert!((psi_g_sem(&h, &c, &centred) - 0.5).abs() < 1e-9);
    assert_eq!(psi_g_sem(&h, &c, &Pose::new(10.0, 0.0, 0.0)), 0.0);
}

#[test]
fn size_examples() {
    let big = SemanticMap::build(&plan("b", 4.0, 4.0, vec![]), Context::Floor);
    let small = SemanticMap::build(&plan("s", 2.0, 2.0, vec![]), Context::Floor);
    assert!((psi_g_size(&small, &big, &Pose::new(-1.0, -1.0, 0.0)) - 1.0).abs() < 1e-9);
    assert!((psi_g_size(&big, &small, &Pose::new(1.0, 1.0, 0.0)) - 0.25).abs() < 1e-9);
    assert_eq!(psi_g_size(&big, &small, &Pose::new(7.0, 0.0, 0.0)), 0.0);
}

#[test]
fn hor_examples() {
    let host = Polygon::rect(0.0, 0.0, 2.0, 1.0);
    assert!((psi_i_hor(Some(&host), Some(&host), &POSE_ID, BOUNDARY_EPS) - 1.0).abs() < 1e-6);
    let side = Polygon::rect(2.0, 0.0, 3.0, 1.0);
    assert!((psi_i_hor(Some(&host), Some(&side), &POSE_ID, BOUNDARY_EPS) - 1.0 / 6.0).abs() < 1e-3);
    let shifted = Pose::new(0.2, 0.2, 0.0);
    assert_eq!(psi_i_hor(Some(&host), Some(&host), &shifted, BOUNDARY_EPS), 0.0);
    assert_eq!(psi_i_hor(Some(&host), None, &POSE_ID, BOUNDARY_EPS), 0.0);
}

#[test]
fn ver_examples() {
    let seg = |ax, ay, bx, by| Segment::new(Point2::new(ax, ay), Point2::new(bx, by)).unwrap();
    let h3 = seg(0.0, 0.1, 3.0, 0.1);
    assert!((psi_i_ver(Some(&h3), &[h3], &POSE_ID, BOUNDARY_EPS) - 1.0).abs() < 1e-6);
    let h4 = seg(0.0, 0.1, 4.0, 0.1);
    let half = seg(1.0, 0.1, 3.0, 0.1);
    assert!((psi_i_ver(Some(&h4), &[half], &POSE_ID, BOUNDARY_EPS) - 0.5).abs() < 1e-3);
    let perp = seg(2.0, -1.0, 2.0, 1.0);
    assert_eq!(psi_i_ver(Some(&h4), &[perp], &POSE_ID, BOUNDARY_EPS), 0.0);
    assert_eq!(psi_i_ver(None, &[h4], &POSE_ID, BOUNDARY_EPS), 0.0);
}

#[test]
fn mov_examples() {
    let a = SemanticMap::build(&plan("a", 4.0, 2.0, vec![]), Context::Floor);
    assert!((psi_i_mov(&a, &a, &POSE_ID) - 1.0).abs() < 1e-9);
    let b = SemanticMap::build(&plan("b", 2.0, 2.0, vec![]), Context::Floor);
    assert!((psi_i_mov(&a, &b, &POSE_ID) - 0.5).abs() < 1e-9);
    assert_eq!(psi_i_mov(&a, &b, &Pose::new(0.0, 9.0, 0.0)), 0.0);
}

#[test]
fn objective_arithmetic() {
    let ones = Terms::from_array([1.0; 5]);
    assert_eq!(ones.weighted(&ContextWeights::SA_TABLE), 120.0);
    assert_eq!(ones.weighted(&ContextWeights::new(0.0, 0.0, 0.0, 0.0, 0.0)), 0.0);
    let t = Terms {
        g_sem: 0.8,
        g_size: 0.5,
        ..Terms::default()
    };
    assert!((t.weighted(&ContextWeights::GEOMETRIC) - 13.0).abs() < 1e-12);
}

#[test]
fn objective_matches_term_sum() {
    let fp = meeting_room();
    let p = MatchProblem::with_targets(&fp, &fp, Context::Table, None, BOUNDARY_EPS).unwrap();
    let r = objective(&p, &Pose::new(0.3, -0.2, 0.0), &ContextWeights::SA_TABLE);
    assert!((r.objective - r.terms.weighted(&ContextWeights::SA_TABLE)).abs() < 1e-9);
    let id = objective(&p, &POSE_ID, &ContextWeights::SA_TABLE);
    assert!((id.objective - 120.0).abs() < 1e-3, "{:?}", id.terms);
}

#[test]
fn presets_are_the_published_weights() {
    assert_eq!(ContextWeights::SA_TABLE.as_array(), [10.0, 10.0, 100.0, 0.0, 0.0]);
    assert_eq!(ContextWeights::SA_WALL.as_array(), [10.0, 10.0, 0.0, 100.0, 0.0]);
    assert_eq!(ContextWeights::SA_FLOOR.as_array(), [10.0, 10.0, 0.0, 0.0, 100.0]);
    assert_eq!(ContextWeights::GEOMETRIC.as_array(), [10.0, 10.0, 0.0, 0.0, 0.0]);
}

#[test]
fn config_bounds_are_enforced() {
    let bad = MatchConfig {
        population: 4,
        ..MatchConfig::default()
    };
    assert!(bad.validate().is_err());
    let bad = MatchConfig {
        generations: 5,
        ..MatchConfig::default()
    };
    assert!(bad.validate().is_err());
    assert!(MatchConfig::default().validate().is_ok());
}

#[test]
fn self_match_recovers_identity() {
    let fp = meeting_room();
    let p = MatchProblem::new(&fp, &fp, Context::Floor, floor_targets(), BOUNDARY_EPS);
    let r = optimize_pose(&p, &ContextWeights::SA_FLOOR, &MatchConfig::default()).unwrap();
    assert!(r.terms.g_sem >= 0.999, "{:?}", r);
    assert!(r.terms.i_mov >= 0.999, "{:?}", r);
}

#[test]
fn translated_client_reaches_same_objective() {
    let fp = meeting_room();
    let moved = fp.transformed(&Pose::new(1.0, 0.0, 0.0));
    let cfg = MatchConfig::default();
    let w = ContextWeights::SA_TABLE;
    let a = optimize_pose(
        &MatchProblem::with_targets(&fp, &fp, Context::Table, None, BOUNDARY_EPS).unwrap(),
        &w,
        &cfg,
    )
    .unwrap();
    let b = optimize_pose(
        &MatchProblem::with_targets(&fp, &moved, Context::Table, None, BOUNDARY_EPS).unwrap(),
        &w,
        &cfg,
    )
    .unwrap();
    assert!(
        (a.objective - b.objective).abs() < 1e-3,
        "{} vs {}",
        a.objective,
        b.objective
    );
}

#[test]
fn rotated_client_reaches_same_objective() {
    let fp = meeting_room();
    let moved = fp.transformed(&Pose::new(3.0, -2.0, std::f64::consts::FRAC_PI_2));
    let cfg = MatchConfig::default();
    let w = ContextWeights::SA_WALL;
    let a = optimize_pose(
        &MatchProblem::with_targets(&fp, &fp, Context::Wall, None, BOUNDARY_EPS).unwrap(),
        &w,
        &cfg,
    )
    .unwrap();
    let b = optimize_pose(
        &MatchProblem::with_targets(&fp, &moved, Context::Wall, None, BOUNDARY_EPS).unwrap(),
        &w,
        &cfg,
    )
    .unwrap();
    assert!(
        (a.objective - b.objective).abs() < 1e-2,
        "{} vs {}",
        a.objective,
        b.objective
    );
}

#[test]
fn disjoint_semantics_keep_sem_near_zero() {
    let host = plan("floor-only", 4.0, 4.0, vec![]);
    let client = plan(
        "table-only",
        3.0,
        3.0,
        vec![rect_region("t", SemanticLabel::Table, (0.0, 0.0, 3.0, 3.0))],
    );
    let p = MatchProblem::new(&host, &client, Context::Floor, floor_targets(), BOUNDARY_EPS);
    let r = optimize_pose(&p, &ContextWeights::GEOMETRIC, &MatchConfig::default()).unwrap();
    // Coarse grid oracle over the same bounds.
    let hm = SemanticMap::build(&host, Context::Floor);
    let cm = SemanticMap::build(&client, Context::Floor);
    let mut best = 0.0f64;
    for i in 0..=14 {
        for j in 0..=14 {
            let pose = Pose::new(-3.0 + 0.5 * i as f64, -3.0 + 0.5 * j as f64, 0.0);
            best = best.max(psi_g_sem(&hm, &cm, &pose));
        }
    }
    assert!(best < 1e-9);
    assert!(r.terms.g_sem < 1e-6);
}

#[test]
fn no_overlap_is_a_match_failure() {
    // With bounds tied to the host box a pose always overlaps; force the
    // failure through a zero-area intersection instead.
    let host = plan("h", 4.0, 4.0, vec![]);
    let p = MatchProblem::new(&host, &host, Context::Floor, floor_targets(), BOUNDARY_EPS);
    assert_eq!(p.score(&Pose::new(5.0, 0.0, 0.0), &ContextWeights::SA_FLOOR), -1.0);
}

#[test]
fn optimizer_is_deterministic() {
    let fp = meeting_room();
    let other = plan(
        "other",
        5.0,
        4.0,
        vec![
            rect_region("t", SemanticLabel::Table, (1.0, 1.0, 2.5, 2.0)),
            rect_region("c", SemanticLabel::Chair, (1.5, 2.3, 1.9, 2.7)),
        ],
    );
    let p = MatchProblem::with_targets(&fp, &other, Context::Table, None, BOUNDARY_EPS).unwrap();
    let cfg = MatchConfig {
        seed: 7,
        ..MatchConfig::default()
    };
    let a = optimize_pose(&p, &ContextWeights::SA_TABLE, &cfg).unwrap();
    let b = optimize_pose(&p, &ContextWeights::SA_TABLE, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn continuous_mode_finds_overlap() {
    let fp = meeting_room();
    let p = MatchProblem::new(&fp, &fp, Context::Floor, floor_targets(), BOUNDARY_EPS);
    let cfg = MatchConfig {
        rotation_mode: RotationMode::Continuous,
        ..MatchConfig::default()
    };
    let r = optimize_pose(&p, &ContextWeights::SA_FLOOR, &cfg).unwrap();
    assert!(r.terms.i_mov > 0.9, "{:?}", r.terms);
}

/// Raster recomputation of the area-based terms.
fn raster_terms(host: &SemanticMap, client: &SemanticMap, pose: &Pose) -> (f64, f64, f64) {
    let spec = raster::GridSpec::covering(host.boundary.bbox(), 0.01);
    let grid = |s: &PolygonSet| raster::rasterize_on(s, spec);
    let both = |a: &raster::OccupancyGrid, b: &raster::OccupancyGrid| {
        a.bits().iter().zip(b.bits()).filter(|(x, y)| **x && **y).count() as f64
    };
    let hb = grid(&host.boundary);
    let cb = grid(&client.boundary.transformed(pose));
    let ov = both(&hb, &cb);
    let mut matched = 0.0;
    for ((_, h), (_, c)) in host.class_sets().iter().zip(client.class_sets().iter()) {
        matched += both(&grid(h), &grid(&c.transformed(pose)));
    }
    let hm = grid(&host.movable_floor);
    let cm = grid(&client.movable_floor.transformed(pose));
    let sem = if ov > 0.0 { matched / ov } else { 0.0 };
    (sem, ov / hb.count() as f64, both(&hm, &cm) / hm.count() as f64)
}

/// Brute-force aligned length: every 1 cm sample of `a` against every
/// segment of `b`, no prefiltering.
fn brute_aligned(a: &[Segment], b: &[Segment], eps: f64) -> f64 {
    let mut total = 0.0;
    for s in a {
        let len = s.length();
        let n = (len / 0.01).round().max(1.0) as usize;
        let d = s.direction();
        for k in 0..n {
            let m = s.a.lerp(s.b, (k as f64 + 0.5) / n as f64);
            let ok = b.iter().any(|t| {
                let e = t.direction();
                let rel = m.sub(t.a);
                let along = rel.dot(e);
                d.cross(e).abs() <= 10f64.to_radians().sin()
                    && (0.0..=t.length()).contains(&along)
                    && rel.cross(e).abs() <= eps
            });
            if ok {
                total += len / n as f64;
            }
        }
    }
    total
}

#[test]
fn terms_agree_with_raster_oracle() {
    let host = meeting_room();
    let client = plan(
        "c",
        5.0,
        4.0,
        vec![
            rect_region("t", SemanticLabel::Table, (1.0, 1.0, 3.0, 2.0)),
            rect_region("w", SemanticLabel::Wall, (0.0, 3.9, 5.0, 4.0)),
            rect_region("ch", SemanticLabel::Chair, (1.2, 2.2, 1.6, 2.6)),
            rect_region("o", SemanticLabel::Obstacle, (4.0, 0.5, 4.8, 1.5)),
        ],
    );
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    use rand::{Rng, SeedableRng};
    for ctx in [Context::Table, Context::Wall, Context::Floor] {
        let p = MatchProblem::with_targets(&host, &client, ctx, None, BOUNDARY_EPS).unwrap();
        for _ in 0..7 {
            let pose = Pose::new(
                rng.random_range(-1.0..2.0),
                rng.random_range(-1.0..2.0),
                f64::from(rng.random_range(0..4)) * std::f64::consts::FRAC_PI_2,
            );
            let t = objective(&p, &pose, &ContextWeights::SA_TABLE).terms;
            let (sem, size, mov) = raster_terms(p.host_map(), p.client_map(), &pose);
            assert!((t.g_sem - sem).abs() < 0.02, "{ctx} sem {} vs {sem}", t.g_sem);
            assert!((t.g_size - size).abs() < 0.02, "{ctx} size {} vs {size}", t.g_size);
            assert!((t.i_mov - mov).abs() < 0.02, "{ctx} mov {} vs {mov}", t.i_mov);
            if let (Some(h), Some(c)) = (p.host_table(), p.client_table()) {
                let moved = c.transformed(&pose);
                let hor = brute_aligned(&h.segments(), &moved.segments(), BOUNDARY_EPS) / h.perimeter();
                assert!((t.i_hor - hor).abs() < 0.02);
            }
            if let Some(h) = p.host_wall_face() {
                let faces: Vec<Segment> = client.wall_faces().iter().map(|f| f.face.transformed(&pose)).collect();
                let ver = brute_aligned(std::slice::from_ref(h), &faces, BOUNDARY_EPS) / h.length();
                assert!((t.i_ver - ver).abs() < 0.02);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn terms_stay_in_unit_interval(tx in -7.0f64..7.0, ty in -6.0f64..6.0, theta in 0.0f64..std::f64::consts::TAU) {
        let fp = meeting_room();
        let p = MatchProblem::with_targets(&fp, &fp, Context::Table, None, BOUNDARY_EPS).unwrap();
        let r = objective(&p, &Pose::new(tx, ty, theta), &ContextWeights::SA_TABLE);
        for v in r.terms.as_array() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn objective_is_monotone_in_each_term(
        base in prop::array::uniform5(0.0f64..1.0),
        w in prop::array::uniform5(0.0f64..100.0),
        i in 0usize..5,
        bump in 0.0f64..1.0,
    ) {
        let weights = ContextWeights::new(w[0], w[1], w[2], w[3], w[4]);
        let mut up = base;
        up[i] = (up[i] + bump).min(1.0);
        prop_assert!(Terms::from_array(up).weighted(&weights) >= Terms::from_array(base).weighted(&weights));
    }
}
