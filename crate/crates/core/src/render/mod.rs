//! Device-independent drawing: scenes, pagination and export.
//!
//! [`render_scene`] turns a document snapshot into a flat list of
//! [`DrawCmd`]s in world units. The SVG and PNG back ends in [`svg`] and
//! [`raster`] consume the same list, as does the page renderer.

use std::collections::BTreeSet;

use crate::geometry::{
    class_bounds, name_rows, note_bounds, route_in, Decoration, RouteResult, TextMetrics, INTERFACE_MARKER,
};
use crate::model::{ClassBox, Connection, Document, Element, ElementId, Glyph, Point, Rect, StickyNote};

pub mod page;
pub mod raster;
pub mod svg;

pub use page::{page_overlay, paginate, render_page, Orientation, PageIndex, PagePlan, PageSetup, PageSize};
pub use raster::export_raster;
pub use svg::export_vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Color(pub u8, pub u8, pub u8);

impl Color {
    pub const BLACK: Color = Color(0, 0, 0);
    pub const WHITE: Color = Color(255, 255, 255);
    pub const GRAY: Color = Color(128, 128, 128);
    pub const DARK_GRAY: Color = Color(64, 64, 64);
    pub const HIGHLIGHT: Color = Color(30, 110, 230);
    pub const NOTE: Color = Color(255, 244, 160);
    pub const INK: Color = Color(170, 30, 30);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Style {
    /// Outline (or text) color.
    pub color: Color,
    /// Zero means no outline.
    pub stroke_width: f64,
    pub fill: Option<Color>,
    pub dashed: bool,
}

impl Style {
    pub const fn stroke(color: Color, width: f64) -> Self {
        Style {
            color,
            stroke_width: width,
            fill: None,
            dashed: false,
        }
    }

    pub const fn filled(color: Color, fill: Color, width: f64) -> Self {
        Style {
            color,
            stroke_width: width,
            fill: Some(fill),
            dashed: false,
        }
    }

    pub const fn text(color: Color) -> Self {
        Style::stroke(color, 0.0)
    }

    pub const fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    Line {
        from: Point,
        to: Point,
    },
    Polyline(Vec<Point>),
    Rect(Rect),
    Polygon(Vec<Point>),
    /// One line of monospace text. `origin` is the top-left of the line box,
    /// `size` its height; each character advances `size / 2`.
    Text {
        origin: Point,
        content: String,
        size: f64,
    },
    /// Restrict subsequent commands to a rectangle, or lift the restriction.
    Clip(Option<Rect>),
}

/// What a command depicts, for consumers that need to map drawing back to
/// the model (hit feedback, tests, page assembly).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tag {
    None,
    Element(ElementId),
    /// Text label of a connection.
    Label(ElementId),
    /// Selection outline.
    Highlight(ElementId),
    PageKeyCell {
        row: usize,
        col: usize,
        current: bool,
    },
    PageBoundary {
        row: usize,
        col: usize,
    },
    PrintRegion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DrawCmd {
    pub prim: Primitive,
    pub style: Style,
    pub tag: Tag,
}

impl DrawCmd {
    pub fn new(prim: Primitive, style: Style, tag: Tag) -> Self {
        DrawCmd { prim, style, tag }
    }

    /// Extent of the command, None for clip markers and empty shapes.
    pub fn bounds(&self) -> Option<Rect> {
        match &self.prim {
            Primitive::Line { from, to } => Some(Rect::from_corners(*from, *to)),
            Primitive::Polyline(pts) | Primitive::Polygon(pts) => Rect::bounding(pts),
            Primitive::Rect(r) => Some(*r),
            Primitive::Text { origin, content, size } => Some(Rect::new(
                origin.x,
                origin.y,
                content.chars().count() as f64 * size / 2.0,
                *size,
            )),
            Primitive::Clip(_) => None,
        }
    }

    /// Applies the similarity `p -> p * scale + offset`.
    pub fn transformed(&self, scale: f64, offset: Point) -> DrawCmd {
        let f = |p: &Point| Point::new(p.x * scale + offset.x, p.y * scale + offset.y);
        let fr = |r: &Rect| {
            Rect::new(
                r.x * scale + offset.x,
                r.y * scale + offset.y,
                r.width * scale,
                r.height * scale,
            )
        };
        let prim = match &self.prim {
            Primitive::Line { from, to } => Primitive::Line {
                from: f(from),
                to: f(to),
            },
            Primitive::Polyline(pts) => Primitive::Polyline(pts.iter().map(f).collect()),
            Primitive::Polygon(pts) => Primitive::Polygon(pts.iter().map(f).collect()),
            Primitive::Rect(r) => Primitive::Rect(fr(r)),
            Primitive::Text { origin, content, size } => Primitive::Text {
                origin: f(origin),
                content: content.clone(),
                size: size * scale,
            },
            Primitive::Clip(r) => Primitive::Clip(r.as_ref().map(fr)),
        };
        DrawCmd {
            prim,
            style: Style {
                stroke_width: self.style.stroke_width * scale,
                ..self.style
            },
            tag: self.tag,
        }
    }
}

/// Transient presentation state that affects drawing but is not part of
/// the document.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ViewState {
    pub selected: BTreeSet<ElementId>,
    pub hover: Option<ElementId>,
    /// Expand every note (the modifier-key browse mode).
    pub notes_expanded_all: bool,
}

impl ViewState {
    pub fn is_highlighted(&self, id: ElementId) -> bool {
        self.selected.contains(&id) || self.hover == Some(id)
    }
}

const OUTLINE: f64 = 1.0;
const HIGHLIGHT_GAP: f64 = 3.0;

/// Draws the document in z order (creation order).
pub fn render_scene(doc: &Document, m: &TextMetrics, view: &ViewState) -> Vec<DrawCmd> {
    let mut out = Vec::new();
    for e in doc.elements() {
        match e {
            Element::Class(c) => draw_class(&mut out, c, m),
            Element::Connection(c) => draw_connection(&mut out, doc, c, m, view),
            Element::Note(n) => draw_note(&mut out, n, m, view),
            Element::Glyph(g) => draw_glyph(&mut out, g),
        }
        if view.selected.contains(&e.id()) {
            draw_highlight(&mut out, doc, e, m, view);
        }
    }
    out
}

fn text_cmd(out: &mut Vec<DrawCmd>, origin: Point, content: &str, m: &TextMetrics, tag: Tag) {
    out.push(DrawCmd::new(
        Primitive::Text {
            origin,
            content: content.to_owned(),
            size: m.line_height,
        },
        Style::text(Color::BLACK),
        tag,
    ));
}

fn draw_class(out: &mut Vec<DrawCmd>, c: &ClassBox, m: &TextMetrics) {
    let tag = Tag::Element(c.id);
    let r = class_bounds(c, m);
    out.push(DrawCmd::new(
        Primitive::Rect(r),
        Style::filled(Color::BLACK, Color::WHITE, OUTLINE),
        tag,
    ));
    let centered = |s: &str| r.x + (r.width - s.chars().count() as f64 * m.char_width) / 2.0;
    let mut y = r.y + m.padding;
    if c.is_interface {
        text_cmd(out, Point::new(centered(INTERFACE_MARKER), y), INTERFACE_MARKER, m, tag);
        y += m.line_height;
    }
    text_cmd(out, Point::new(centered(&c.name), y), &c.name, m, tag);
    y = r.y + m.padding + m.line_height * name_rows(c) as f64;
    for lines in [&c.variables, &c.methods] {
        let sep = y + m.line_height / 2.0;
        out.push(DrawCmd::new(
            Primitive::Line {
                from: Point::new(r.x, sep),
                to: Point::new(r.right(), sep),
            },
            Style::stroke(Color::BLACK, OUTLINE),
            tag,
        ));
        y += m.line_height;
        for line in lines {
            text_cmd(out, Point::new(r.x + m.padding, y), line, m, tag);
            y += m.line_height;
        }
    }
}

fn decoration(route: &RouteResult) -> (Option<Primitive>, Point) {
    let (tip, tail) = (route.target_anchor, route.source_anchor);
    let len = tip.distance(tail);
    if len == 0.0 || route.decoration == Decoration::None {
        return (None, tip);
    }
    let u = Point::new((tip.x - tail.x) / len, (tip.y - tail.y) / len);
    let n = Point::new(-u.y, u.x);
    let at = |back: f64, side: f64| Point::new(tip.x - u.x * back + n.x * side, tip.y - u.y * back + n.y * side);
    match route.decoration {
        Decoration::None => (None, tip),
        Decoration::OpenArrow => (Some(Primitive::Polyline(vec![at(10.0, 5.0), tip, at(10.0, -5.0)])), tip),
        Decoration::HollowTriangle => (
            Some(Primitive::Polygon(vec![tip, at(12.0, 6.0), at(12.0, -6.0)])),
            at(12.0, 0.0),
        ),
        Decoration::HollowDiamond => (
            Some(Primitive::Polygon(vec![
                tip,
                at(8.0, 5.0),
                at(16.0, 0.0),
                at(8.0, -5.0),
            ])),
            at(16.0, 0.0),
        ),
    }
}

fn draw_connection(out: &mut Vec<DrawCmd>, doc: &Document, c: &Connection, m: &TextMetrics, view: &ViewState) {
    let Some(route) = route_in(doc, c, m) else {
        return;
    };
    let tag = Tag::Element(c.id);
    let (symbol, line_end) = decoration(&route);
    out.push(DrawCmd::new(
        Primitive::Line {
            from: route.source_anchor,
            to: line_end,
        },
        Style::stroke(Color::BLACK, OUTLINE),
        tag,
    ));
    if let Some(symbol) = symbol {
        let style = match symbol {
            Primitive::Polygon(_) => Style::filled(Color::BLACK, Color::WHITE, OUTLINE),
            _ => Style::stroke(Color::BLACK, OUTLINE),
        };
        out.push(DrawCmd::new(symbol, style, tag));
    }
    if route.label_at_rest || view.is_highlighted(c.id) {
        let w = route.label.chars().count() as f64 * m.char_width;
        let origin = Point::new(
            route.label_anchor.x - w / 2.0,
            route.label_anchor.y - m.line_height / 2.0,
        );
        text_cmd(out, origin, route.label, m, Tag::Label(c.id));
    }
}

/// Whether a note shows its body in the given view.
pub fn note_expanded(n: &StickyNote, view: &ViewState) -> bool {
    n.pinned_open || view.notes_expanded_all || view.is_highlighted(n.id)
}

fn draw_note(out: &mut Vec<DrawCmd>, n: &StickyNote, m: &TextMetrics, view: &ViewState) {
    let tag = Tag::Element(n.id);
    let expanded = note_expanded(n, view);
    let r = note_bounds(n, m, expanded);
    out.push(DrawCmd::new(
        Primitive::Rect(r),
        Style::filled(Color::DARK_GRAY, Color::NOTE, OUTLINE),
        tag,
    ));
    if expanded {
        for (i, line) in n.text.split('\n').enumerate() {
            text_cmd(
                out,
                Point::new(r.x + m.padding, r.y + m.padding + m.line_height * i as f64),
                line,
                m,
                tag,
            );
        }
    } else {
        // Folded corner and two ruled lines.
        let fold = r.width / 4.0;
        out.push(DrawCmd::new(
            Primitive::Polyline(vec![
                Point::new(r.right() - fold, r.y),
                Point::new(r.right() - fold, r.y + fold),
                Point::new(r.right(), r.y + fold),
            ]),
            Style::stroke(Color::DARK_GRAY, OUTLINE),
            tag,
        ));
        for frac in [0.5, 0.75] {
            let y = r.y + r.height * frac;
            out.push(DrawCmd::new(
                Primitive::Line {
                    from: Point::new(r.x + 3.0, y),
                    to: Point::new(r.right() - 3.0, y),
                },
                Style::stroke(Color::DARK_GRAY, OUTLINE),
                tag,
            ));
        }
    }
}

fn draw_glyph(out: &mut Vec<DrawCmd>, g: &Glyph) {
    out.push(DrawCmd::new(
        Primitive::Polyline(g.points().to_vec()),
        Style::stroke(Color::INK, 2.0),
        Tag::Element(g.id),
    ));
}

fn draw_highlight(out: &mut Vec<DrawCmd>, doc: &Document, e: &Element, m: &TextMetrics, view: &ViewState) {
    let tag = Tag::Highlight(e.id());
    let style = Style::stroke(Color::HIGHLIGHT, 1.5).dashed();
    let bounds = match e {
        Element::Class(c) => class_bounds(c, m),
        Element::Note(n) => note_bounds(n, m, note_expanded(n, view)),
        Element::Glyph(g) => match Rect::bounding(g.points()) {
            Some(r) => r,
            None => return,
        },
        Element::Connection(c) => {
            if let Some(route) = route_in(doc, c, m) {
                out.push(DrawCmd::new(
                    Primitive::Line {
                        from: route.source_anchor,
                        to: route.target_anchor,
                    },
                    Style::stroke(Color::HIGHLIGHT, 3.0),
                    tag,
                ));
            }
            return;
        }
    };
    out.push(DrawCmd::new(Primitive::Rect(bounds.inflate(HIGHLIGHT_GAP)), style, tag));
}

/// Output canvas for the exporters: the area to show and its unit size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub bounds: Rect,
    /// Drawing units per inch: 96 for world units, 72 for page points.
    pub units_per_inch: f64,
}

pub const WORLD_UNITS_PER_INCH: f64 = 96.0;
pub const POINTS_PER_INCH: f64 = 72.0;

impl Frame {
    pub fn world(bounds: Rect) -> Self {
        Frame {
            bounds,
            units_per_inch: WORLD_UNITS_PER_INCH,
        }
    }

    /// Tight box around every command plus a small margin; a zero-size
    /// frame at the origin for an empty list.
    pub fn fit(cmds: &[DrawCmd]) -> Self {
        let bounds = cmds
            .iter()
            .filter_map(DrawCmd::bounds)
            .reduce(|a, b| a.union(&b))
            .map(|r| r.inflate(8.0))
            .unwrap_or_default();
        Frame::world(bounds)
    }
}
