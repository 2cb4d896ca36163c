//! Scanline rasterizer used as an independent area oracle.
//!
//! Shares nothing with the overlay engine behind [`super::boolean`]: cells
//! are marked by an even-odd crossing count at each row's center line.

use super::{Aabb, Point2, PolygonSet};

/// Placement of a regular grid. Cell `(i, j)` has its center at
/// `origin + ((i + 0.5) * cell, (j + 0.5) * cell)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub origin: Point2,
    pub cell: f64,
    pub cols: usize,
    pub rows: usize,
}

impl GridSpec {
    /// Smallest grid with cell-aligned origin covering `bbox`.
    pub fn covering(bbox: Aabb, cell: f64) -> GridSpec {
        assert!((0.001..=0.1).contains(&cell), "cell size must be in [0.001, 0.1] m");
        if bbox.is_empty() {
            return GridSpec {
                origin: Point2::default(),
                cell,
                cols: 0,
                rows: 0,
            };
        }
        let ox = (bbox.min.x / cell).floor() * cell;
        let oy = (bbox.min.y / cell).floor() * cell;
        let cols = ((bbox.max.x - ox) / cell).ceil() as usize;
        let rows = ((bbox.max.y - oy) / cell).ceil() as usize;
        GridSpec {
            origin: Point2::new(ox, oy),
            cell,
            cols,
            rows,
        }
    }

    pub fn center(&self, i: usize, j: usize) -> Point2 {
        Point2::new(
            self.origin.x + (i as f64 + 0.5) * self.cell,
            self.origin.y + (j as f64 + 0.5) * self.cell,
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    pub spec: GridSpec,
    bits: Vec<bool>,
}

impl OccupancyGrid {
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[j * self.spec.cols + i]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.spec.cell * self.spec.cell
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

/// Rasterizes `s` onto a grid covering its bounding box.
pub fn rasterize(s: &PolygonSet, cell: f64) -> OccupancyGrid {
    rasterize_on(s, GridSpec::covering(s.bbox(), cell))
}

/// Rasterizes `s` onto a caller-provided grid; parts outside are ignored.
pub fn rasterize_on(s: &PolygonSet, spec: GridSpec) -> OccupancyGrid {
    let mut bits = vec![false; spec.cols * spec.rows];
    let mut xs = Vec::new();
    for poly in s.polygons() {
        let bb = poly.bbox();
        let j0 = (((bb.min.y - spec.origin.y) / spec.cell - 0.5).floor().max(0.0)) as usize;
        let j1 = (((bb.max.y - spec.origin.y) / spec.cell).ceil().max(0.0) as usize).min(spec.rows);
        for j in j0..j1 {
            let y = spec.origin.y + (j as f64 + 0.5) * spec.cell;
            xs.clear();
            for (a, b) in poly.edges() {
                if (a.y <= y && y < b.y) || (b.y <= y && y < a.y) {
                    xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
                }
            }
            xs.sort_by(f64::total_cmp);
            for pair in xs.chunks_exact(2) {
                // Cells whose center x lies in [pair[0], pair[1]).
                let lo = ((pair[0] - spec.origin.x) / spec.cell - 0.5).ceil().max(0.0) as usize;
                let hi = (((pair[1] - spec.origin.x) / spec.cell - 0.5).ceil().max(0.0) as usize).min(spec.cols);
                for i in lo..hi {
                    bits[j * spec.cols + i] = true;
                }
            }
        }
    }
    OccupancyGrid { spec, bits }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Polygon;

    #[test]
    fn unit_square_count() {
        let g = rasterize(&Polygon::rect(0.0, 0.0, 1.0, 1.0).into(), 0.01);
        assert!((g.count() as i64 - 10_000).abs() <= 200);
    }

    #[test]
    fn empty_set_has_no_cells() {
        assert_eq!(rasterize(&PolygonSet::empty(), 0.01).count(), 0);
    }

    #[test]
    fn triangle_area_close() {
        let t = Polygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(0.0, 1.3),
        ])
        .unwrap();
        let g = rasterize(&t.into(), 0.01);
        assert!((g.area() - 1.3).abs() / 1.3 < 0.02);
    }
}
