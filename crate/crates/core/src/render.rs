//! Deterministic SVG views of floorplans and mutual spaces.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::floorplan::{Floorplan, SemanticLabel, SemanticMap};
use crate::geometry::{Aabb, Point2, Polygon, PolygonSet, Segment};
use crate::pipeline::RunOutcome;
use crate::placement::Owner;
use crate::subspace::matched_area;

/// Pixels per meter.
const SCALE: f64 = 80.0;
const MARGIN: f64 = 20.0;
/// Drawn thickness of subspace walls, meters.
const WALL_STROKE: f64 = 0.05;
const UNMATCHED: &str = "#9e9e9e";
const CLIENT_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// A run together with the plans it refers to, so it renders on its own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub host: Floorplan,
    pub clients: Vec<Floorplan>,
    pub outcome: RunOutcome,
}

pub fn label_color(label: SemanticLabel) -> &'static str {
    match label {
        SemanticLabel::Table => "#c8a165",
        SemanticLabel::Wall => "#4d4d4d",
        SemanticLabel::Chair => "#e8c547",
        SemanticLabel::Obstacle => "#b0544f",
        SemanticLabel::Floor => "#f4f1ea",
    }
}

fn client_color(k: usize) -> &'static str {
    CLIENT_COLORS[k % CLIENT_COLORS.len()]
}

struct Canvas {
    bb: Aabb,
    out: String,
}

impl Canvas {
    fn new(bb: Aabb) -> Canvas {
        let w = bb.width() * SCALE + 2.0 * MARGIN;
        let h = bb.height() * SCALE + 2.0 * MARGIN;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
        );
        Canvas { bb, out }
    }

    fn px(&self, p: Point2) -> (f64, f64) {
        (
            (p.x - self.bb.min.x) * SCALE + MARGIN,
            (self.bb.max.y - p.y) * SCALE + MARGIN,
        )
    }

    fn polygon(&mut self, poly: &Polygon, attrs: &str) {
        let pts: Vec<String> = poly
            .vertices()
            .iter()
            .map(|p| {
                let (x, y) = self.px(*p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(self.out, r#"<polygon points="{}" {attrs}/>"#, pts.join(" "));
    }

    fn set(&mut self, set: &PolygonSet, attrs: &str) {
        for p in set.polygons() {
            self.polygon(p, attrs);
        }
    }

    fn segment(&mut self, s: &Segment, attrs: &str) {
        let (x1, y1) = self.px(s.a);
        let (x2, y2) = self.px(s.b);
        let _ = writeln!(
            self.out,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {attrs}/>"#
        );
    }

    fn marker(&mut self, p: Point2, label: &str, color: &str) {
        let (x, y) = self.px(p);
        let r = 0.3 * SCALE;
        let _ = writeln!(
            self.out,
            r#"<circle class="user" cx="{x:.2}" cy="{y:.2}" r="{r:.2}" fill="{color}" fill-opacity="0.25" stroke="{color}" stroke-width="1.5"/>"#
        );
        let _ = writeln!(
            self.out,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="13" text-anchor="middle">{label}</text>"#,
            y + 4.5
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn draw_plan(c: &mut Canvas, fp: &Floorplan) {
    c.polygon(
        &fp.boundary,
        &format!(
            r#"class="boundary" fill="{}" stroke="black" stroke-width="1""#,
            label_color(SemanticLabel::Floor)
        ),
    );
    for r in &fp.regions {
        c.polygon(
            &r.shape,
            &format!(r#"class="{}" fill="{}" stroke="none""#, r.label, label_color(r.label)),
        );
    }
}

/// One plan, labels only.
pub fn render_plan(fp: &Floorplan) -> String {
    let mut c = Canvas::new(fp.boundary.bbox());
    draw_plan(&mut c, fp);
    c.finish()
}

/// Host plan overlaid with transformed client outlines, unmatched areas,
/// subspaces, their walls and the placed users.
pub fn render_scene(scene: &Scene) -> String {
    let o = &scene.outcome;
    let context = o.method.context();
    let mut c = Canvas::new(scene.host.boundary.bbox());
    draw_plan(&mut c, &scene.host);
    let hmap = SemanticMap::build(&scene.host, context);
    let unmatched_attrs = format!(r#"class="unmatched" fill="{UNMATCHED}" fill-opacity="0.55" stroke="none""#);
    if let Some(ix) = &o.intersection {
        let matched = ix.table.union(&ix.wall).union(&ix.floor).union(&ix.obstacle);
        c.set(&ix.footprint.difference(&matched), &unmatched_attrs);
    } else {
        for (cl, m) in scene.clients.iter().zip(&o.matches) {
            let area = matched_area(&hmap, &SemanticMap::build(cl, context), &m.pose);
            c.set(&area.unmatched, &unmatched_attrs);
        }
    }
    for (k, (cl, m)) in scene.clients.iter().zip(&o.matches).enumerate() {
        c.polygon(
            &cl.boundary.transformed(&m.pose),
            &format!(
                r#"class="client-outline" fill="none" stroke="{}" stroke-width="1.5" stroke-dasharray="6 4""#,
                client_color(k)
            ),
        );
    }
    if let Some(ms) = &o.mutual_space {
        for (k, s) in ms.subspaces.iter().enumerate() {
            c.set(
                &s.region,
                &format!(
                    r#"class="subspace" fill="{0}" fill-opacity="0.15" stroke="{0}" stroke-width="0.5""#,
                    client_color(k)
                ),
            );
        }
        let stroke = WALL_STROKE * SCALE;
        for (k, w) in ms.walls.iter().enumerate() {
            for s in &w.segments {
                c.segment(
                    s,
                    &format!(
                        r#"class="subspace-wall" stroke="{}" stroke-width="{stroke:.1}" stroke-linecap="square""#,
                        client_color(k)
                    ),
                );
            }
        }
    }
    if let Some(p) = &o.placement {
        let mut h = 0;
        for (owner, pos) in p.owners.iter().zip(&p.positions) {
            match owner {
                Owner::Host => {
                    h += 1;
                    c.marker(*pos, &format!("H{h}"), "black");
                }
                Owner::Client(k) => c.marker(*pos, &format!("C{}", k + 1), client_color(*k)),
            }
        }
    }
    c.finish()
}
