//! Uniform-grid spatial index over element hit regions.
//!
//! Each element contributes one or more [`HitShape`]s (a glyph contributes one
//! stroke per segment). Shapes are bucketed into square cells; shapes that
//! would span too many cells go into an overflow list scanned on every
//! query. [`SpatialIndex::sync`] re-buckets only elements whose shapes
//! changed since the last sync.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::{hit_shapes, HitShape, TextMetrics};
use crate::model::{Document, ElementId, Point, Rect};

const DEFAULT_CELL: f64 = 64.0;
const MAX_CELLS_PER_SHAPE: i64 = 256;

type Cell = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct ShapeRef {
    id: ElementId,
    index: u32,
}

#[derive(Clone, Debug)]
pub struct SpatialIndex {
    cell_size: f64,
    metrics: TextMetrics,
    cells: HashMap<Cell, Vec<ShapeRef>>,
    overflow: Vec<ShapeRef>,
    shapes: HashMap<ElementId, Vec<HitShape>>,
}

impl SpatialIndex {
    pub fn new(metrics: TextMetrics) -> Self {
        Self::with_cell_size(metrics, DEFAULT_CELL)
    }

    pub fn with_cell_size(metrics: TextMetrics, cell_size: f64) -> Self {
        assert!(cell_size > 0.0, "cell size must be positive");
        SpatialIndex {
            cell_size,
            metrics,
            cells: HashMap::new(),
            overflow: Vec::new(),
            shapes: HashMap::new(),
        }
    }

    pub fn build(doc: &Document, metrics: &TextMetrics) -> Self {
        let mut index = Self::new(*metrics);
        index.sync(doc);
        index
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    /// Brings the index up to date with `doc`. Returns how many elements
    /// were inserted, moved or removed.
    pub fn sync(&mut self, doc: &Document) -> usize {
        let mut touched = 0;
        let live: HashSet<ElementId> = doc.elements().map(|e| e.id()).collect();
        let stale: Vec<ElementId> = self.shapes.keys().filter(|id| !live.contains(id)).copied().collect();
        for id in stale {
            self.remove(id);
            touched += 1;
        }
        for e in doc.elements() {
            let shapes = hit_shapes(doc, e, &self.metrics);
            if self.shapes.get(&e.id()) != Some(&shapes) {
                self.remove(e.id());
                self.insert(e.id(), shapes);
                touched += 1;
            }
        }
        touched
    }

    fn cell_of(&self, p: Point) -> Cell {
        (
            (p.x / self.cell_size).floor() as i64,
            (p.y / self.cell_size).floor() as i64,
        )
    }

    fn cell_range(&self, r: &Rect) -> (Cell, Cell) {
        (
            self.cell_of(Point::new(r.x, r.y)),
            self.cell_of(Point::new(r.right(), r.bottom())),
        )
    }

    fn span((lo, hi): (Cell, Cell)) -> i64 {
        (hi.0 - lo.0 + 1).saturating_mul(hi.1 - lo.1 + 1)
    }

    fn insert(&mut self, id: ElementId, shapes: Vec<HitShape>) {
        for (i, shape) in shapes.iter().enumerate() {
            let sref = ShapeRef { id, index: i as u32 };
            let range = self.cell_range(&shape.bounds());
            if Self::span(range) > MAX_CELLS_PER_SHAPE {
                self.overflow.push(sref);
                continue;
            }
            let ((x0, y0), (x1, y1)) = range;
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    self.cells.entry((cx, cy)).or_default().push(sref);
                }
            }
        }
        self.shapes.insert(id, shapes);
    }

    fn remove(&mut self, id: ElementId) {
        let Some(shapes) = self.shapes.remove(&id) else {
            return;
        };
        for shape in &shapes {
            let range = self.cell_range(&shape.bounds());
            if Self::span(range) > MAX_CELLS_PER_SHAPE {
                continue;
            }
            let ((x0, y0), (x1, y1)) = range;
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    if let Some(bucket) = self.cells.get_mut(&(cx, cy)) {
                        bucket.retain(|s| s.id != id);
                        if bucket.is_empty() {
                            self.cells.remove(&(cx, cy));
                        }
                    }
                }
            }
        }
        self.overflow.retain(|s| s.id != id);
    }

    /// Calls `f` for every shape whose cells meet `area`; a shape may be
    /// reported more than once.
    fn candidates(&self, area: &Rect, mut f: impl FnMut(ShapeRef, &HitShape)) {
        let range = self.cell_range(area);
        let ((x0, y0), (x1, y1)) = range;
        let mut visit = |bucket: &Vec<ShapeRef>| {
            for s in bucket {
                f(*s, &self.shapes[&s.id][s.index as usize]);
            }
        };
        if Self::span(range) as usize > self.cells.len() {
            for (cell, bucket) in &self.cells {
                if (x0..=x1).contains(&cell.0) && (y0..=y1).contains(&cell.1) {
                    visit(bucket);
                }
            }
        } else {
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    if let Some(bucket) = self.cells.get(&(cx, cy)) {
                        visit(bucket);
                    }
                }
            }
        }
        for s in &self.overflow {
            f(*s, &self.shapes[&s.id][s.index as usize]);
        }
    }

    /// Topmost (highest id, i.e. latest created) element under `p`.
    pub fn hit_test(&self, p: Point, tolerance: f64) -> Option<ElementId> {
        let tolerance = tolerance.max(0.0);
        let probe = Rect::new(p.x - tolerance, p.y - tolerance, 2.0 * tolerance, 2.0 * tolerance);
        let mut best: Option<ElementId> = None;
        self.candidates(&probe, |s, shape| {
            if best.is_some_and(|b| b >= s.id) {
                return;
            }
            if shape.hit(p, tolerance) {
                best = Some(s.id);
            }
        });
        best
    }

    /// Every element whose hit region touches `r`.
    pub fn rect_select(&self, r: &Rect) -> BTreeSet<ElementId> {
        let mut out = BTreeSet::new();
        self.candidates(r, |s, shape| {
            if !out.contains(&s.id) && shape.intersects(r) {
                out.insert(s.id);
            }
        });
        out
    }
}

/// One-off hit test. Builds a fresh index, so callers issuing many queries
/// should keep a [`SpatialIndex`] instead.
pub fn hit_test(doc: &Document, m: &TextMetrics, p: Point, tolerance: f64) -> Option<ElementId> {
    SpatialIndex::build(doc, m).hit_test(p, tolerance)
}

/// One-off rectangle selection; see [`hit_test`].
pub fn rect_select(doc: &Document, m: &TextMetrics, r: &Rect) -> BTreeSet<ElementId> {
    SpatialIndex::build(doc, m).rect_select(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ConnectionKind;

    fn sample() -> (Document, [ElementId; 4]) {
        let mut doc = Document::new();
        let a = doc.create_class(Point::new(0.0, 0.0), Some("A"));
        let b = doc.create_class(Point::new(300.0, 0.0), Some("B"));
        let c = doc.create_connection(a, b).unwrap();
        doc.set_connection_kind(c, ConnectionKind::Association).unwrap();
        let g = doc
            .create_glyph(vec![
                Point::new(0.0, 200.0),
                Point::new(100.0, 200.0),
                Point::new(100.0, 300.0),
            ])
            .unwrap();
        (doc, [a, b, c, g])
    }

    #[test]
    fn point_queries() {
        let (doc, [a, _, c, g]) = sample();
        let m = TextMetrics::default();
        let idx = SpatialIndex::build(&doc, &m);
        assert_eq!(idx.hit_test(Point::new(40.0, 32.0), 4.0), Some(a));
        assert_eq!(idx.hit_test(Point::new(150.0, 34.0), 4.0), Some(c));
        assert_eq!(idx.hit_test(Point::new(150.0, 40.0), 4.0), None);
        assert_eq!(idx.hit_test(Point::new(103.0, 250.0), 4.0), Some(g));
        assert_eq!(idx.hit_test(Point::new(-1.0, -1.0), 0.0), None);
    }

    #[test]
    fn later_element_wins_overlap() {
        let mut doc = Document::new();
        doc.create_class(Point::new(0.0, 0.0), None);
        let top = doc.create_class(Point::new(20.0, 20.0), None);
        assert_eq!(
            hit_test(&doc, &TextMetrics::default(), Point::new(50.0, 50.0), 4.0),
            Some(top)
        );
    }

    #[test]
    fn rect_queries() {
        let (doc, ids) = sample();
        let m = TextMetrics::default();
        let all = rect_select(&doc, &m, &Rect::new(-1000.0, -1000.0, 5000.0, 5000.0));
        assert_eq!(all, ids.into_iter().collect());
        let probe = rect_select(&doc, &m, &Rect::new(40.0, 32.0, 0.0, 0.0));
        assert_eq!(probe, BTreeSet::from([ids[0]]));
    }

    #[test]
    fn sync_tracks_moves_and_deletes() {
        let (mut doc, [a, b, c, _]) = sample();
        let m = TextMetrics::default();
        let mut idx = SpatialIndex::build(&doc, &m);
        assert_eq!(idx.sync(&doc), 0);
        doc.translate_elements([b], Point::new(0.0, 500.0)).unwrap();
        // b moved and the connection re-routed
        assert_eq!(idx.sync(&doc), 2);
        assert_eq!(idx.hit_test(Point::new(340.0, 532.0), 0.0), Some(b));
        doc.delete_elements([a]).unwrap();
        assert_eq!(idx.sync(&doc), 2);
        assert_eq!(idx.hit_test(Point::new(40.0, 32.0), 0.0), None);
        assert!(!idx.rect_select(&Rect::new(-1e9, -1e9, 2e9, 2e9)).contains(&c));
    }

    #[test]
    fn huge_shapes_go_to_overflow() {
        let mut doc = Document::new();
        let g = doc
            .create_glyph(vec![Point::new(-1e6, 0.0), Point::new(1e6, 1e6)])
            .unwrap();
        let idx = SpatialIndex::build(&doc, &TextMetrics::default());
        assert_eq!(idx.overflow.len(), 1);
        assert_eq!(idx.hit_test(Point::new(0.0, 5e5), 1.0), Some(g));
    }
}
