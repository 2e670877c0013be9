//! Brute-force reference implementations written from the geometric rules,
//! independent of the library's own code paths.

use minuml::model::{ClassBox, ConnectionKind, Document, Element, ElementId, Point, Rect};
use rand::Rng;

pub const CHAR_W: f64 = 8.0;
pub const LINE_H: f64 = 16.0;
pub const PAD: f64 = 8.0;

pub fn class_rect(c: &ClassBox) -> Rect {
    let mut lines: Vec<&str> = vec![&c.name];
    if c.is_interface {
        lines.push("«interface»");
    }
    lines.extend(c.variables.iter().map(String::as_str));
    lines.extend(c.methods.iter().map(String::as_str));
    let widest = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0) as f64;
    let rows = c.variables.len() + c.methods.len() + if c.is_interface { 2 } else { 1 } + 2;
    Rect {
        x: c.origin.x,
        y: c.origin.y,
        width: f64::max(80.0, 2.0 * PAD + CHAR_W * widest),
        height: 2.0 * PAD + LINE_H * rows as f64,
    }
}

pub fn note_rect(doc: &Document, id: ElementId) -> Rect {
    let n = doc.note(id).unwrap();
    if !n.pinned_open {
        return Rect {
            x: n.origin.x,
            y: n.origin.y,
            width: 16.0,
            height: 16.0,
        };
    }
    let lines: Vec<&str> = n.text.split('\n').collect();
    let widest = lines.iter().map(|l| l.chars().count()).max().unwrap_or(0) as f64;
    Rect {
        x: n.origin.x,
        y: n.origin.y,
        width: f64::max(80.0, 2.0 * PAD + CHAR_W * widest),
        height: 2.0 * PAD + LINE_H * lines.len() as f64,
    }
}

fn center(r: &Rect) -> Point {
    Point::new(r.x + r.width / 2.0, r.y + r.height / 2.0)
}

fn strictly_overlap(a: &Rect, b: &Rect) -> bool {
    a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height && b.y < a.y + a.height
}

/// Where the ray from the center of `r` toward `p` crosses the border.
pub fn exit_point(r: &Rect, p: Point) -> Point {
    let c = center(r);
    let (dx, dy) = (p.x - c.x, p.y - c.y);
    let tx = if dx == 0.0 {
        f64::INFINITY
    } else {
        (r.width / 2.0) / dx.abs()
    };
    let ty = if dy == 0.0 {
        f64::INFINITY
    } else {
        (r.height / 2.0) / dy.abs()
    };
    let t = tx.min(ty);
    Point::new(c.x + t * dx, c.y + t * dy)
}

/// Segment endpoints of a connection, or None when an endpoint is missing.
pub fn connection_segment(doc: &Document, id: ElementId) -> Option<(Point, Point)> {
    let c = doc.connection(id)?;
    let a = class_rect(doc.class(c.source)?);
    let b = class_rect(doc.class(c.target)?);
    let (ca, cb) = (center(&a), center(&b));
    if strictly_overlap(&a, &b) || ca == cb {
        Some((ca, cb))
    } else {
        Some((exit_point(&a, cb), exit_point(&b, ca)))
    }
}

pub fn dist_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let (vx, vy) = (b.x - a.x, b.y - a.y);
    let (wx, wy) = (p.x - a.x, p.y - a.y);
    let len2 = vx * vx + vy * vy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((wx * vx + wy * vy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.x + t * vx - p.x, a.y + t * vy - p.y);
    (qx * qx + qy * qy).sqrt()
}

fn inside(r: &Rect, p: Point) -> bool {
    p.x >= r.x && p.x <= r.x + r.width && p.y >= r.y && p.y <= r.y + r.height
}

pub fn element_hit(doc: &Document, e: &Element, p: Point, tol: f64) -> bool {
    match e {
        Element::Class(c) => inside(&class_rect(c), p),
        Element::Note(n) => inside(&note_rect(doc, n.id), p),
        Element::Connection(c) => connection_segment(doc, c.id).is_some_and(|(a, b)| dist_to_segment(p, a, b) <= tol),
        Element::Glyph(g) => g.points().windows(2).any(|w| dist_to_segment(p, w[0], w[1]) <= tol),
    }
}

/// Linear scan: the hit with the highest id (topmost) wins.
pub fn hit_test(doc: &Document, p: Point, tol: f64) -> Option<ElementId> {
    let mut all: Vec<&Element> = doc.elements().collect();
    all.reverse();
    all.into_iter().find(|e| element_hit(doc, e, p, tol)).map(|e| e.id())
}

/// The editor's pathological document: 250 freehand glyphs over a diagram
/// of 11 classes and 10 connections.
pub fn glyph_heavy_document(rng: &mut impl Rng) -> Document {
    let mut doc = Document::new();
    let mut classes = Vec::new();
    for i in 0..11 {
        let origin = Point::new(
            (i % 4) as f64 * 260.0 + rng.gen_range(0.0..40.0),
            (i / 4) as f64 * 220.0,
        );
        let id = doc.create_class(origin, Some(&format!("Class{i}")));
        doc.edit_class(
            id,
            &format!("Class{i}"),
            i == 3,
            vec!["x: int".into(); i % 4],
            vec!["run()".into(); i % 3],
        )
        .unwrap();
        classes.push(id);
    }
    let mut made = 0;
    while made < 10 {
        let (a, b) = (classes[rng.gen_range(0..11)], classes[rng.gen_range(0..11)]);
        if a != b {
            let c = doc.create_connection(a, b).unwrap();
            doc.set_connection_kind(c, ConnectionKind::ALL[made % 4]).unwrap();
            made += 1;
        }
    }
    for _ in 0..250 {
        let mut p = Point::new(rng.gen_range(-50.0..1100.0), rng.gen_range(-50.0..700.0));
        let mut pts = vec![p];
        for _ in 0..rng.gen_range(4..40) {
            p = Point::new(p.x + rng.gen_range(-12.0..12.0), p.y + rng.gen_range(-12.0..12.0));
            pts.push(p);
        }
        doc.create_glyph(pts).unwrap();
    }
    doc
}
