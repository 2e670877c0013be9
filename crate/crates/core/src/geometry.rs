//! Derived geometry: class auto-sizing, connection routing, hit regions and
//! the viewport transform. Everything here is a pure function of the
//! document plus [`TextMetrics`]; nothing is stored back into the model.

use crate::model::{ClassBox, Connection, ConnectionKind, Document, Element, Point, Rect, StickyNote};

pub mod spatial;

pub use spatial::{hit_test, rect_select, SpatialIndex};

/// Fixed, font-independent text measurements in world units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TextMetrics {
    pub char_width: f64,
    pub line_height: f64,
    pub padding: f64,
}

impl Default for TextMetrics {
    fn default() -> Self {
        TextMetrics {
            char_width: 8.0,
            line_height: 16.0,
            padding: 8.0,
        }
    }
}

pub const MIN_CLASS_WIDTH: f64 = 80.0;
pub const INTERFACE_MARKER: &str = "«interface»";
/// Side of the square note icon.
pub const NOTE_ICON_SIZE: f64 = 16.0;
/// Default pick tolerance for strokes and connection lines.
pub const DEFAULT_HIT_TOLERANCE: f64 = 4.0;

fn text_width(line: &str, m: &TextMetrics) -> f64 {
    line.chars().count() as f64 * m.char_width
}

/// Number of text rows in the name compartment.
pub fn name_rows(cls: &ClassBox) -> usize {
    if cls.is_interface {
        2
    } else {
        1
    }
}

/// Box size grows with the longest line and the number of lines. Two extra
/// rows separate the name, variable and method compartments.
pub fn class_bounds(cls: &ClassBox, m: &TextMetrics) -> Rect {
    let marker = cls.is_interface.then_some(INTERFACE_MARKER);
    let longest = std::iter::once(cls.name.as_str())
        .chain(marker)
        .chain(cls.variables.iter().map(String::as_str))
        .chain(cls.methods.iter().map(String::as_str))
        .map(|l| text_width(l, m))
        .fold(0.0, f64::max);
    let width = MIN_CLASS_WIDTH.max(m.padding * 2.0 + longest);
    let rows = name_rows(cls) + cls.variables.len() + cls.methods.len() + 2;
    let height = m.padding * 2.0 + m.line_height * rows as f64;
    Rect::new(cls.origin.x, cls.origin.y, width, height)
}

/// Note extent: the icon square, or the auto-sized body when expanded.
pub fn note_bounds(note: &StickyNote, m: &TextMetrics, expanded: bool) -> Rect {
    if !expanded {
        return Rect::new(note.origin.x, note.origin.y, NOTE_ICON_SIZE, NOTE_ICON_SIZE);
    }
    let lines: Vec<&str> = note.text.split('\n').collect();
    let longest = lines.iter().map(|l| text_width(l, m)).fold(0.0, f64::max);
    Rect::new(
        note.origin.x,
        note.origin.y,
        MIN_CLASS_WIDTH.max(m.padding * 2.0 + longest),
        m.padding * 2.0 + m.line_height * lines.len() as f64,
    )
}

/// Arrow-end symbol drawn at the target of a connection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoration {
    None,
    OpenArrow,
    HollowDiamond,
    HollowTriangle,
}

impl Decoration {
    pub fn for_kind(kind: ConnectionKind) -> Self {
        match kind {
            ConnectionKind::Generic => Decoration::None,
            ConnectionKind::Association => Decoration::OpenArrow,
            ConnectionKind::Aggregation => Decoration::HollowDiamond,
            ConnectionKind::Inheritance => Decoration::HollowTriangle,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RouteResult {
    pub source_anchor: Point,
    pub target_anchor: Point,
    pub label_anchor: Point,
    pub decoration: Decoration,
    pub label: &'static str,
    /// False for generic connections, whose label only shows when highlighted.
    pub label_at_rest: bool,
    /// The boxes overlap, so the anchors fell back to the box centers.
    pub degenerate: bool,
}

/// Point where the ray from the center of `r` toward `toward` leaves `r`.
fn clip_to_boundary(r: &Rect, toward: Point) -> Point {
    let c = r.center();
    let (dx, dy) = (toward.x - c.x, toward.y - c.y);
    let (hw, hh) = (r.width / 2.0, r.height / 2.0);
    // Snap the dominant coordinate onto the edge so the anchor satisfies the
    // boundary equation exactly.
    if dx.abs() * hh >= dy.abs() * hw {
        let x = if dx >= 0.0 { r.right() } else { r.x };
        Point::new(x, c.y + dy * (hw / dx.abs()))
    } else {
        let y = if dy >= 0.0 { r.bottom() } else { r.y };
        Point::new(c.x + dx * (hh / dy.abs()), y)
    }
}

/// Straight center-to-center segment clipped to both boxes. The label sits
/// at the segment midpoint, one line height along the segment's left-hand
/// normal `(-dy, dx)`.
pub fn route_connection(conn: &Connection, src: Rect, dst: Rect, m: &TextMetrics) -> RouteResult {
    let (sc, dc) = (src.center(), dst.center());
    let degenerate = src.overlaps(&dst) || sc == dc;
    let (source_anchor, target_anchor) = if degenerate {
        (sc, dc)
    } else {
        (clip_to_boundary(&src, dc), clip_to_boundary(&dst, sc))
    };
    let (dx, dy) = (target_anchor.x - source_anchor.x, target_anchor.y - source_anchor.y);
    let len = dx.hypot(dy);
    let normal = if len > 0.0 {
        Point::new(-dy / len, dx / len)
    } else {
        Point::new(0.0, 1.0)
    };
    let mid = Point::new(
        (source_anchor.x + target_anchor.x) / 2.0,
        (source_anchor.y + target_anchor.y) / 2.0,
    );
    RouteResult {
        source_anchor,
        target_anchor,
        label_anchor: Point::new(mid.x + normal.x * m.line_height, mid.y + normal.y * m.line_height),
        decoration: Decoration::for_kind(conn.kind),
        label: conn.kind.name(),
        label_at_rest: conn.kind != ConnectionKind::Generic,
        degenerate,
    }
}

/// Routes a connection of `doc`. None if an endpoint is not a class.
pub fn route_in(doc: &Document, conn: &Connection, m: &TextMetrics) -> Option<RouteResult> {
    let src = class_bounds(doc.class(conn.source)?, m);
    let dst = class_bounds(doc.class(conn.target)?, m);
    Some(route_connection(conn, src, dst, m))
}

/// Pickable region pieces of an element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HitShape {
    Area(Rect),
    Stroke(Point, Point),
}

impl HitShape {
    pub fn bounds(&self) -> Rect {
        match *self {
            HitShape::Area(r) => r,
            HitShape::Stroke(a, b) => Rect::from_corners(a, b),
        }
    }

    /// Areas need containment; strokes accept anything within `tolerance`.
    pub fn hit(&self, p: Point, tolerance: f64) -> bool {
        match *self {
            HitShape::Area(r) => r.contains(p),
            HitShape::Stroke(a, b) => segment_distance(p, a, b) <= tolerance,
        }
    }

    pub fn intersects(&self, r: &Rect) -> bool {
        match *self {
            HitShape::Area(a) => a.intersects(r),
            HitShape::Stroke(a, b) => segment_intersects_rect(a, b, r),
        }
    }
}

/// Hit region of an element in its at-rest display state (notes are icons
/// unless pinned open). Empty for a connection with a missing endpoint.
pub fn hit_shapes(doc: &Document, element: &Element, m: &TextMetrics) -> Vec<HitShape> {
    match element {
        Element::Class(c) => vec![HitShape::Area(class_bounds(c, m))],
        Element::Note(n) => vec![HitShape::Area(note_bounds(n, m, n.pinned_open))],
        Element::Connection(c) => route_in(doc, c, m)
            .map(|r| vec![HitShape::Stroke(r.source_anchor, r.target_anchor)])
            .unwrap_or_default(),
        Element::Glyph(g) => g.points().windows(2).map(|w| HitShape::Stroke(w[0], w[1])).collect(),
    }
}

/// Bounding box of an element's drawn extent in its at-rest state.
pub fn element_bounds(doc: &Document, element: &Element, m: &TextMetrics) -> Option<Rect> {
    hit_shapes(doc, element, m)
        .iter()
        .map(HitShape::bounds)
        .reduce(|a, b| a.union(&b))
}

/// Union of all element bounds; None for an empty document.
pub fn content_bounds(doc: &Document, m: &TextMetrics) -> Option<Rect> {
    doc.elements()
        .filter_map(|e| element_bounds(doc, e, m))
        .reduce(|a, b| a.union(&b))
}

pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(Point::new(a.x + t * dx, a.y + t * dy))
}

/// Liang-Barsky clip; touching the border counts.
pub fn segment_intersects_rect(a: Point, b: Point, r: &Rect) -> bool {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (p, q) in [
        (-dx, a.x - r.x),
        (dx, r.right() - a.x),
        (-dy, a.y - r.y),
        (dy, r.bottom() - a.y),
    ] {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

pub const ZOOM_MIN: f64 = 0.10;
pub const ZOOM_MAX: f64 = 5.00;

/// Screen mapping `screen = world * zoom + pan`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    zoom: f64,
    pub pan: Point,
}

impl Default for Viewport {
    fn default() -> Self {
        Viewport {
            zoom: 1.0,
            pan: Point::default(),
        }
    }
}

impl Viewport {
    pub fn new(zoom: f64, pan: Point) -> Self {
        let mut v = Viewport { zoom: 1.0, pan };
        v.set_zoom(zoom);
        v
    }

    pub fn zoom(&self) -> f64 {
        self.zoom
    }

    /// Clamps into `[0.10, 5.00]`. NaN leaves the zoom unchanged.
    pub fn set_zoom(&mut self, zoom: f64) -> f64 {
        if !zoom.is_nan() {
            self.zoom = zoom.clamp(ZOOM_MIN, ZOOM_MAX);
        }
        self.zoom
    }

    pub fn world_to_screen(&self, p: Point) -> Point {
        Point::new(p.x * self.zoom + self.pan.x, p.y * self.zoom + self.pan.y)
    }

    pub fn screen_to_world(&self, p: Point) -> Point {
        Point::new((p.x - self.pan.x) / self.zoom, (p.y - self.pan.y) / self.zoom)
    }
}
