#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use minuml::commands::Command;
use minuml::model::{ConnectionKind, Document, ElementId, Point};
use minuml::persistence;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

pub fn fixture(name: &str) -> Document {
    persistence::parse(&std::fs::read(fixture_path(name)).unwrap()).unwrap()
}

/// Coordinates mix round numbers with full-precision values so
/// serialization is exercised on awkward floats too.
pub fn coord(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..4) {
        0 => rng.gen_range(-2000..2000) as f64,
        1 => rng.gen_range(-2000.0..2000.0),
        2 => rng.gen_range(-8000..8000) as f64 / 4.0,
        _ => rng.gen_range(-1.0..1.0) * 1e-7,
    }
}

pub fn point(rng: &mut impl Rng) -> Point {
    Point::new(coord(rng), coord(rng))
}

const PIECES: &[&str] = &[
    "a",
    "Dog",
    "x: int",
    "<",
    ">",
    "&",
    "\"",
    "'",
    " ",
    "  ",
    "\t",
    "\n",
    "\r",
    "\u{1}",
    "é",
    "«»",
    "日本",
    "🦀",
    "foo(bar: String): void",
    "&amp;",
    "]]>",
    "List<T>",
];

pub fn text(rng: &mut impl Rng) -> String {
    let n = rng.gen_range(0..6);
    (0..n).map(|_| *PIECES.choose(rng).unwrap()).collect()
}

pub fn lines(rng: &mut impl Rng) -> Vec<String> {
    let n = rng.gen_range(0..4);
    (0..n).map(|_| text(rng)).collect()
}

fn ids_of(doc: &Document) -> Vec<ElementId> {
    doc.elements().map(|e| e.id()).collect()
}

fn class_ids(doc: &Document) -> Vec<ElementId> {
    doc.classes().map(|c| c.id).collect()
}

/// An existing id of the requested kind most of the time, occasionally a
/// stale or never-allocated one so error paths run too.
fn pick(rng: &mut impl Rng, ids: &[ElementId]) -> ElementId {
    if ids.is_empty() || rng.gen_ratio(1, 20) {
        ElementId(rng.gen_range(1..200))
    } else {
        *ids.choose(rng).unwrap()
    }
}

fn subset(rng: &mut impl Rng, ids: &[ElementId]) -> Vec<ElementId> {
    let k = rng.gen_range(0..=ids.len().min(6));
    let mut v: Vec<ElementId> = ids.choose_multiple(rng, k).copied().collect();
    if rng.gen_ratio(1, 30) {
        v.push(ElementId(9999));
    }
    v
}

/// Builds a document through the model API: `classes` classes, up to
/// `connections` connections, plus some notes and glyphs.
pub fn document(rng: &mut impl Rng, classes: usize, connections: usize, extras: usize) -> Document {
    let mut doc = Document::new();
    for _ in 0..classes {
        let name = if rng.gen_bool(0.7) { Some(text(rng)) } else { None };
        let id = doc.create_class(point(rng), name.as_deref());
        if rng.gen_bool(0.6) {
            let name = doc.class(id).unwrap().name.clone();
            doc.edit_class(id, &name, rng.gen_bool(0.2), lines(rng), lines(rng))
                .unwrap();
        }
    }
    let cls = class_ids(&doc);
    if cls.len() >= 2 {
        for _ in 0..connections {
            let (a, b) = (*cls.choose(rng).unwrap(), *cls.choose(rng).unwrap());
            if a == b {
                continue;
            }
            let c = doc.create_connection(a, b).unwrap();
            let kind = *ConnectionKind::ALL.choose(rng).unwrap();
            doc.set_connection_kind(c, kind).unwrap();
        }
    }
    for _ in 0..extras {
        if rng.gen_bool(0.5) {
            let n = doc.create_note(point(rng), &text(rng));
            if rng.gen_bool(0.3) {
                let t = doc.note(n).unwrap().text.clone();
                doc.edit_note(n, &t, true).unwrap();
            }
        } else {
            let pts = (0..rng.gen_range(2..6)).map(|_| point(rng)).collect();
            doc.create_glyph(pts).unwrap();
        }
    }
    if rng.gen_bool(0.3) && !doc.is_empty() {
        let ids = ids_of(&doc);
        let victims = subset(rng, &ids);
        let victims: Vec<_> = victims.into_iter().filter(|id| doc.contains(*id)).collect();
        doc.delete_elements(victims).unwrap();
    }
    doc
}

pub fn random_document(rng: &mut impl Rng) -> Document {
    let classes = rng.gen_range(0..12);
    let connections = rng.gen_range(0..16);
    let extras = rng.gen_range(0..6);
    document(rng, classes, connections, extras)
}

/// A command that fits the current document most of the time.
pub fn command(rng: &mut impl Rng, doc: &Document) -> Command {
    let all = ids_of(doc);
    let cls = class_ids(doc);
    let conns: Vec<ElementId> = doc.connections().map(|c| c.id).collect();
    let notes: Vec<ElementId> = doc.elements().filter_map(|e| doc.note(e.id()).map(|n| n.id)).collect();
    match rng.gen_range(0..100) {
        0..=19 => Command::CreateClass {
            origin: point(rng),
            name: rng.gen_bool(0.5).then(|| text(rng)),
        },
        20..=29 => Command::EditClass {
            id: pick(rng, &cls),
            name: text(rng),
            is_interface: rng.gen_bool(0.3),
            variables: lines(rng),
            methods: lines(rng),
        },
        30..=44 => Command::CreateConnection {
            source: pick(rng, &cls),
            target: pick(rng, &cls),
        },
        45..=51 => Command::SetConnectionKind {
            id: pick(rng, &conns),
            kind: *ConnectionKind::ALL.choose(rng).unwrap(),
        },
        52..=57 => Command::CreateNote {
            origin: point(rng),
            text: text(rng),
        },
        58..=61 => Command::EditNote {
            id: pick(rng, &notes),
            text: text(rng),
            pinned_open: rng.gen_bool(0.5),
        },
        62..=67 => Command::CreateGlyph {
            points: (0..rng.gen_range(1..6)).map(|_| point(rng)).collect(),
        },
        68..=79 => Command::Translate {
            ids: subset(rng, &all),
            delta: point(rng),
        },
        80..=91 => Command::Delete { ids: subset(rng, &all) },
        92..=96 => {
            let classes = rng.gen_range(0..4);
            Command::PasteInsert {
                fragment: document(rng, classes, 3, 1),
                offset: point(rng),
            }
        }
        _ => {
            let classes = rng.gen_range(0..5);
            Command::LoadDocument {
                document: document(rng, classes, 4, 2),
            }
        }
    }
}
