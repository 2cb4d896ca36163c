//! The authored evaluation corpus: four meeting rooms (hosts), five home
//! rooms and five offices (clients).

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::floorplan::{Floorplan, FloorplanError, LabeledRegion, SemanticLabel, SpaceKind};
use crate::geometry::{Point2, Polygon};

/// Thickness of the wall ring lining each room.
pub const WALL_THICKNESS: f64 = 0.1;
/// Largest furniture displacement applied by a non-zero corpus seed.
pub const JITTER: f64 = 0.05;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Floorplan(#[from] FloorplanError),
    #[error("corpus directory `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus needs at least one host, one home and one office; found {hosts}, {homes}, {offices}")]
    Shape { hosts: usize, homes: usize, offices: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub hosts: Vec<Floorplan>,
    pub homes: Vec<Floorplan>,
    pub offices: Vec<Floorplan>,
}

impl Corpus {
    /// The canonical authored corpus.
    pub fn bundled() -> Corpus {
        generate(0)
    }

    pub fn all(&self) -> impl Iterator<Item = &Floorplan> {
        self.hosts.iter().chain(&self.homes).chain(&self.offices)
    }

    pub fn find(&self, id: &str) -> Option<&Floorplan> {
        self.all().find(|p| p.id == id)
    }

    /// Groups plans by kind, each group sorted by id.
    pub fn from_plans(plans: Vec<Floorplan>) -> Corpus {
        let mut c = Corpus {
            hosts: Vec::new(),
            homes: Vec::new(),
            offices: Vec::new(),
        };
        for p in plans {
            match p.kind {
                SpaceKind::Host => c.hosts.push(p),
                SpaceKind::Home => c.homes.push(p),
                SpaceKind::Office => c.offices.push(p),
            }
        }
        for g in [&mut c.hosts, &mut c.homes, &mut c.offices] {
            g.sort_by(|a, b| a.id.cmp(&b.id));
        }
        c
    }

    /// Loads every `*.json` plan in `dir`.
    pub fn load(dir: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
        let dir = dir.as_ref();
        let io = |source| CorpusError::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(io)?
            .collect::<Result<Vec<_>, _>>()
            .map_err(io)?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        let plans = paths.iter().map(Floorplan::load).collect::<Result<Vec<_>, _>>()?;
        Ok(Corpus::from_plans(plans))
    }

    /// Writes one `<id>.json` per plan.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), CorpusError> {
        let dir = dir.as_ref();
        let io = |source| CorpusError::Io {
            path: dir.display().to_string(),
            source,
        };
        std::fs::create_dir_all(dir).map_err(io)?;
        for p in self.all() {
            p.save(dir.join(format!("{}.json", p.id))).map_err(io)?;
        }
        Ok(())
    }

    pub fn check_shape(&self) -> Result<(), CorpusError> {
        if self.hosts.is_empty() || self.homes.is_empty() || self.offices.is_empty() {
            return Err(CorpusError::Shape {
                hosts: self.hosts.len(),
                homes: self.homes.len(),
                offices: self.offices.len(),
            });
        }
        Ok(())
    }
}

/// The authored corpus; seed 0 is canonical, other seeds nudge furniture
/// by up to [`JITTER`] while keeping every plan valid.
pub fn generate(seed: u64) -> Corpus {
    let mut plans = vec![
        meeting_room_1(),
        meeting_room_2(),
        meeting_room_3(),
        meeting_room_4(),
        home_1(),
        home_2(),
        home_3(),
        home_4(),
        home_5(),
        office_1(),
        office_2(),
        office_3(),
        office_4(),
        office_5(),
    ];
    if seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        plans = plans.into_iter().map(|p| jitter(p, &mut rng)).collect();
    }
    Corpus::from_plans(plans)
}

fn jitter(plan: Floorplan, rng: &mut ChaCha8Rng) -> Floorplan {
    let mut regions = plan.regions.clone();
    for i in 0..regions.len() {
        if regions[i].label == SemanticLabel::Wall {
            continue;
        }
        let d = Point2::new(rng.random_range(-JITTER..=JITTER), rng.random_range(-JITTER..=JITTER));
        let old = regions[i].shape.clone();
        regions[i].shape = Polygon::new(old.vertices().iter().map(|p| p.add(d)).collect()).expect("translated polygon");
        let trial = Floorplan::new(plan.id.clone(), plan.kind, plan.boundary.clone(), regions.clone());
        if trial.is_err() {
            regions[i].shape = old;
        }
    }
    Floorplan::new(plan.id, plan.kind, plan.boundary, regions).expect("jittered plan stays valid")
}

struct Room {
    id: &'static str,
    kind: SpaceKind,
    w: f64,
    h: f64,
    regions: Vec<LabeledRegion>,
}

impl Room {
    /// A `w`×`h` room whose south-west corner is the origin, lined with walls.
    fn new(id: &'static str, kind: SpaceKind, w: f64, h: f64) -> Room {
        let t = WALL_THICKNESS;
        let mut r = Room {
            id,
            kind,
            w,
            h,
            regions: Vec::new(),
        };
        r.add("wall-south", SemanticLabel::Wall, Polygon::rect(0.0, 0.0, w, t));
        r.add("wall-north", SemanticLabel::Wall, Polygon::rect(0.0, h - t, w, h));
        r.add("wall-west", SemanticLabel::Wall, Polygon::rect(0.0, t, t, h - t));
        r.add("wall-east", SemanticLabel::Wall, Polygon::rect(w - t, t, w, h - t));
        r
    }

    fn add(&mut self, id: &str, label: SemanticLabel, shape: Polygon) -> &mut Self {
        self.regions.push(LabeledRegion {
            id: id.to_string(),
            label,
            shape,
        });
        self
    }

    fn table(&mut self, id: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> &mut Self {
        self.add(id, SemanticLabel::Table, Polygon::rect(x0, y0, x1, y1))
    }

    fn obstacle(&mut self, id: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> &mut Self {
        self.add(id, SemanticLabel::Obstacle, Polygon::rect(x0, y0, x1, y1))
    }

    /// A 0.5 m square seat centred on (x, y).
    fn chair(&mut self, id: &str, x: f64, y: f64) -> &mut Self {
        self.add(
            id,
            SemanticLabel::Chair,
            Polygon::rect(x - 0.25, y - 0.25, x + 0.25, y + 0.25),
        )
    }

    fn shape(&mut self, id: &str, label: SemanticLabel, pts: &[(f64, f64)]) -> &mut Self {
        let poly = Polygon::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).expect("authored polygon");
        self.add(id, label, poly)
    }

    fn build(&mut self) -> Floorplan {
        let boundary = Polygon::rect(0.0, 0.0, self.w, self.h);
        Floorplan::new(
            self.id.to_string(),
            self.kind,
            boundary,
            std::mem::take(&mut self.regions),
        )
        .unwrap_or_else(|e| panic!("authored plan {} is invalid: {e}", self.id))
    }
}

fn octagon(cx: f64, cy: f64, r: f64) -> Vec<(f64, f64)> {
    (0..8)
        .map(|i| {
            let a = PI / 8.0 + i as f64 * PI / 4.0;
            (cx + r * a.cos(), cy + r * a.sin())
        })
        .collect()
}

fn meeting_room_1() -> Floorplan {
    let mut r = Room::new("meeting-room-1", SpaceKind::Host, 6.0, 5.0);
    r.table("table", 1.8, 1.9, 4.2, 3.1);
    for (i, x) in [2.3, 3.0, 3.7].into_iter().enumerate() {
        r.chair(&format!("chair-s{}", i + 1), x, 1.55);
        r.chair(&format!("chair-n{}", i + 1), x, 3.45);
    }
    r.obstacle("cabinet", 0.1, 4.4, 1.0, 4.9)
        .obstacle("plant", 5.5, 0.1, 5.9, 0.5);
    r.build()
}

fn meeting_room_2() -> Floorplan {
    let mut r = Room::new("meeting-room-2", SpaceKind::Host, 7.5, 5.0);
    r.table("table", 2.0, 1.9, 5.5, 3.1);
    for (i, x) in [2.5, 3.3, 4.2, 5.0].into_iter().enumerate() {
        r.chair(&format!("chair-s{}", i + 1), x, 1.55);
        r.chair(&format!("chair-n{}", i + 1), x, 3.45);
    }
    r.chair("chair-w", 1.65, 2.5).chair("chair-e", 5.85, 2.5);
    r.obstacle("tv-console", 6.9, 1.5, 7.4, 3.5)
        .obstacle("credenza", 2.5, 4.45, 5.0, 4.9);
    r.build()
}

/// The smallest host: a round table for four.
fn meeting_room_3() -> Floorplan {
    let mut r = Room::new("meeting-room-3", SpaceKind::Host, 4.5, 4.0);
    r.shape("table", SemanticLabel::Table, &octagon(2.25, 2.0, 0.6));
    r.chair("chair-n", 2.25, 2.95)
        .chair("chair-s", 2.25, 1.05)
        .chair("chair-e", 3.2, 2.0)
        .chair("chair-w", 1.3, 2.0);
    r.obstacle("cabinet", 0.1, 3.4, 0.7, 3.9)
        .obstacle("plant", 3.9, 0.1, 4.4, 0.6);
    r.build()
}

/// Telepresence layout: a crescent table facing a display wall.
fn meeting_room_4() -> Floorplan {
    let mut r = Room::new("meeting-room-4", SpaceKind::Host, 7.0, 6.0);
    let (cx, cy) = (3.5, 4.3);
    let arc = |rad: f64| -> Vec<(f64, f64)> {
        (0..=7)
            .map(|i| {
                let a = (200.0 + 20.0 * i as f64).to_radians();
                (cx + rad * a.cos(), cy + rad * a.sin())
            })
            .collect()
    };
    let mut table = arc(2.4);
    table.extend(arc(1.6).into_iter().rev());
    r.shape("table", SemanticLabel::Table, &table);
    for (i, deg) in [210.0_f64, 240.0, 270.0, 300.0, 330.0].into_iter().enumerate() {
        let a = deg.to_radians();
        r.chair(&format!("chair-{}", i + 1), cx + 2.85 * a.cos(), cy + 2.85 * a.sin());
    }
    r.obstacle("display", 1.5, 5.5, 5.5, 5.9);
    r.obstacle("camera-rack", 6.3, 0.1, 6.9, 0.7);
    r.build()
}

fn home_1() -> Floorplan {
    let mut r = Room::new("home-1", SpaceKind::Home, 5.0, 4.0);
    r.obstacle("sofa", 1.0, 0.1, 3.4, 0.95)
        .table("coffee-table", 1.5, 1.5, 2.9, 2.1)
        .chair("armchair", 3.9, 1.8)
        .obstacle("tv-stand", 1.2, 3.5, 3.2, 3.9);
    r.build()
}

fn home_2() -> Floorplan {
    let mut r = Room::new("home-2", SpaceKind::Home, 4.5, 4.5);
    r.shape(
        "counter",
        SemanticLabel::Obstacle,
        &[(0.1, 3.8), (3.8, 3.8), (3.8, 2.0), (4.4, 2.0), (4.4, 4.4), (0.1, 4.4)],
    );
    r.table("dining-table", 1.2, 1.5, 2.8, 2.5);
    r.chair("chair-s1", 1.6, 1.15)
        .chair("chair-s2", 2.4, 1.15)
        .chair("chair-n1", 1.6, 2.85)
        .chair("chair-n2", 2.4, 2.85);
    r.build()
}

fn home_3() -> Floorplan {
    let mut r = Room::new("home-3", SpaceKind::Home, 4.0, 4.5);
    r.obstacle("bed", 0.1, 2.4, 1.7, 4.4)
        .table("desk", 2.7, 0.1, 3.9, 0.7)
        .chair("desk-chair", 3.3, 1.05)
        .obstacle("wardrobe", 3.3, 2.5, 3.9, 4.4);
    r.build()
}

fn home_4() -> Floorplan {
    let mut r = Room::new("home-4", SpaceKind::Home, 6.0, 4.0);
    r.obstacle("bed", 4.2, 2.0, 5.9, 3.9)
        .obstacle("sofa", 0.1, 0.8, 0.9, 2.8)
        .table("coffee-table", 1.3, 1.3, 2.1, 2.3)
        .table("dining-table", 3.0, 0.3, 3.8, 1.1)
        .chair("chair-1", 2.6, 0.7)
        .chair("chair-2", 4.2, 0.7);
    r.build()
}

fn home_5() -> Floorplan {
    let mut r = Room::new("home-5", SpaceKind::Home, 5.5, 5.0);
    r.shape(
        "sectional",
        SemanticLabel::Obstacle,
        &[(0.1, 0.1), (2.6, 0.1), (2.6, 0.9), (0.9, 0.9), (0.9, 2.6), (0.1, 2.6)],
    );
    r.table("coffee-table", 1.4, 1.4, 2.2, 2.0)
        .table("dining-table", 3.3, 2.6, 4.5, 3.6)
        .chair("chair-w", 2.95, 3.1)
        .chair("chair-e", 4.85, 3.1)
        .chair("chair-s", 3.9, 2.25)
        .obstacle("bookshelf", 0.1, 4.5, 1.9, 4.9);
    r.build()
}

fn office_1() -> Floorplan {
    let mut r = Room::new("office-1", SpaceKind::Office, 4.0, 5.0);
    r.table("desk", 1.0, 4.2, 2.8, 4.9)
        .chair("desk-chair", 1.9, 3.75)
        .obstacle("bookshelf", 3.5, 1.0, 3.9, 3.5);
    r.shape("round-table", SemanticLabel::Table, &octagon(1.4, 1.6, 0.5));
    r.chair("guest-1", 1.4, 0.75).chair("guest-2", 2.25, 1.6);
    r.build()
}

fn office_2() -> Floorplan {
    let mut r = Room::new("office-2", SpaceKind::Office, 6.0, 5.0);
    r.table("desk-1", 0.1, 3.9, 1.7, 4.6)
        .chair("chair-1", 0.9, 3.45)
        .table("desk-2", 4.3, 3.9, 5.9, 4.6)
        .chair("chair-2", 5.1, 3.45)
        .obstacle("cabinets", 2.2, 4.5, 3.8, 4.9)
        .table("side-table", 2.5, 1.2, 3.5, 2.0)
        .obstacle("printer", 5.3, 0.1, 5.9, 0.6);
    r.build()
}

fn office_3() -> Floorplan {
    let mut r = Room::new("office-3", SpaceKind::Office, 5.0, 4.0);
    r.table("table", 1.5, 1.5, 3.5, 2.5);
    r.chair("chair-s1", 2.0, 1.15)
        .chair("chair-s2", 3.0, 1.15)
        .chair("chair-n1", 2.0, 2.85)
        .chair("chair-n2", 3.0, 2.85);
    r.obstacle("whiteboard", 1.5, 3.75, 3.5, 3.9);
    r.build()
}

fn office_4() -> Floorplan {
    let mut r = Room::new("office-4", SpaceKind::Office, 5.5, 4.5);
    r.shape(
        "l-desk",
        SemanticLabel::Table,
        &[(3.4, 2.6), (5.4, 2.6), (5.4, 4.4), (4.7, 4.4), (4.7, 3.3), (3.4, 3.3)],
    );
    r.chair("desk-chair", 4.2, 2.2)
        .obstacle("sofa", 0.1, 0.1, 2.2, 0.9)
        .table("coffee-table", 0.6, 1.3, 1.6, 1.9)
        .obstacle("cabinet", 0.1, 3.9, 1.5, 4.4);
    r.build()
}

fn office_5() -> Floorplan {
    let mut r = Room::new("office-5", SpaceKind::Office, 5.0, 5.0);
    r.table("desk-block-w", 1.4, 1.8, 2.4, 3.2)
        .table("desk-block-e", 2.6, 1.8, 3.6, 3.2);
    r.chair("chair-1", 1.05, 2.15)
        .chair("chair-2", 1.05, 2.85)
        .chair("chair-3", 3.95, 2.15)
        .chair("chair-4", 3.95, 2.85)
        .obstacle("printer", 4.3, 0.1, 4.9, 0.7)
        .obstacle("shelves", 0.1, 4.5, 2.0, 4.9);
    r.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{Context, SemanticMap};

    #[test]
    fn has_fig3_inventory() {
        let c = Corpus::bundled();
        assert_eq!((c.hosts.len(), c.homes.len(), c.offices.len()), (4, 5, 5));
        c.check_shape().unwrap();
    }

    #[test]
    fn every_client_has_table_walls_and_chair() {
        let c = Corpus::bundled();
        for p in c.homes.iter().chain(&c.offices) {
            for label in [SemanticLabel::Table, SemanticLabel::Wall, SemanticLabel::Chair] {
                assert!(p.regions_labeled(label).count() >= 1, "{} lacks {label}", p.id);
            }
        }
    }

    #[test]
    fn meeting_room_1_counts() {
        let c = Corpus::bundled();
        let m = c.find("meeting-room-1").unwrap();
        assert_eq!(m.regions_labeled(SemanticLabel::Table).count(), 1);
        assert!(m.regions_labeled(SemanticLabel::Chair).count() >= 4);
        assert_eq!(m.regions_labeled(SemanticLabel::Wall).count(), 4);
    }

    #[test]
    fn labels_partition_every_plan() {
        for p in Corpus::bundled().all() {
            let m = SemanticMap::build(p, Context::Table);
            let sum: f64 = [&m.table, &m.wall, &m.chair, &m.obstacle, &m.floor]
                .iter()
                .map(|s| s.area())
                .sum();
            assert!(
                (sum - p.boundary.area()).abs() < 1e-3,
                "{}: {sum} vs {}",
                p.id,
                p.boundary.area()
            );
        }
    }

    #[test]
    fn jitter_is_deterministic_and_valid() {
        let a = generate(7);
        assert_eq!(a, generate(7));
        assert_ne!(a, generate(0));
        for (p, q) in a.all().zip(Corpus::bundled().all()) {
            assert_eq!(p.regions.len(), q.regions.len());
            assert_eq!(p.boundary, q.boundary);
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = Corpus::bundled();
        c.save(dir.path()).unwrap();
        assert_eq!(Corpus::load(dir.path()).unwrap(), c);
    }

    #[test]
    fn bundled_files_match_the_generator() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus");
        assert_eq!(Corpus::load(dir).unwrap(), Corpus::bundled());
    }
}
