//! Copy, cut, paste and drag-and-drop payloads.
//!
//! A payload carries the copied content in up to three flavors. Connections
//! are never copied on their own; a connection rides along exactly when both
//! of its classes are part of the selection. Dragging builds the same payload
//! and dropping pastes it.

use std::collections::BTreeSet;

use crate::codegen;
use crate::commands::{Command, CommandStack};
use crate::error::{Error, Result};
use crate::geometry::TextMetrics;
use crate::model::{Document, Element, ElementId, Point, Vector};
use crate::persistence::{self, Preferences};
use crate::render::{self, svg, Frame, ViewState};

pub const STRUCTURED_FLAVOR: &str = "application/x-minuml+xml";
pub const CODE_FLAVOR: &str = "text/plain";
pub const IMAGE_FLAVOR: &str = "image/svg+xml";

/// Offset applied to a paste without an explicit anchor.
pub const PASTE_OFFSET: Vector = Vector { x: 16.0, y: 16.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct Payload {
    /// Canonical `.muml` bytes of the copied sub-document.
    pub structured: Vec<u8>,
    /// Skeleton code for the copied classes; `None` when no class was copied.
    pub code_text: Option<String>,
    /// SVG picture of the copied elements.
    pub vector_image: Option<Vec<u8>>,
}

impl Payload {
    /// The bytes of one flavor, looked up by MIME type.
    pub fn flavor(&self, mime: &str) -> Option<&[u8]> {
        match mime {
            STRUCTURED_FLAVOR => Some(&self.structured),
            CODE_FLAVOR => self.code_text.as_deref().map(str::as_bytes),
            IMAGE_FLAVOR => self.vector_image.as_deref(),
            _ => None,
        }
    }

    pub fn flavors(&self) -> Vec<&'static str> {
        [STRUCTURED_FLAVOR, CODE_FLAVOR, IMAGE_FLAVOR]
            .into_iter()
            .filter(|f| self.flavor(f).is_some())
            .collect()
    }

    pub fn fragment(&self) -> Result<Document> {
        persistence::parse(&self.structured)
    }
}

/// The ids a copy of `selection` actually takes: selected classes, notes
/// and glyphs, plus every connection between two selected classes.
pub fn effective_selection(doc: &Document, selection: &BTreeSet<ElementId>) -> Result<BTreeSet<ElementId>> {
    if let Some(&missing) = selection.iter().find(|id| !doc.contains(**id)) {
        return Err(Error::IdMismatch(missing));
    }
    let mut out: BTreeSet<ElementId> = selection
        .iter()
        .copied()
        .filter(|id| doc.connection(*id).is_none())
        .collect();
    let closure: Vec<ElementId> = doc
        .connections()
        .filter(|c| out.contains(&c.source) && out.contains(&c.target))
        .map(|c| c.id)
        .collect();
    if out.is_empty() {
        return Err(Error::EmptyEffectiveSelection);
    }
    out.extend(closure);
    Ok(out)
}

fn fragment_of(doc: &Document, ids: &BTreeSet<ElementId>) -> Document {
    let elements = ids.iter().filter_map(|id| doc.get(*id).cloned()).collect();
    Document::from_parts(elements, doc.next_id(), doc.name_counter())
}

pub fn build_payload(doc: &Document, selection: &BTreeSet<ElementId>, prefs: &Preferences) -> Result<Payload> {
    let ids = effective_selection(doc, selection)?;
    let fragment = fragment_of(doc, &ids);
    let code_text = if fragment.classes().next().is_some() {
        Some(codegen::clipboard_code(doc, &ids, prefs)?)
    } else {
        None
    };
    let scene = render::render_scene(&fragment, &TextMetrics::default(), &ViewState::default());
    let vector_image = Some(svg::export_vector(&scene, &Frame::fit(&scene)));
    Ok(Payload {
        structured: persistence::serialize(&fragment),
        code_text,
        vector_image,
    })
}

pub fn drag_payload(doc: &Document, selection: &BTreeSet<ElementId>, prefs: &Preferences) -> Result<Payload> {
    build_payload(doc, selection, prefs)
}

fn top_left(fragment: &Document) -> Option<Point> {
    let mut corners = fragment.elements().filter_map(|e| match e {
        Element::Class(c) => Some(c.origin),
        Element::Note(n) => Some(n.origin),
        Element::Glyph(g) => {
            let r = crate::model::Rect::bounding(g.points())?;
            Some(Point::new(r.x, r.y))
        }
        Element::Connection(_) => None,
    });
    let first = corners.next()?;
    Some(corners.fold(first, |a, b| Point::new(a.x.min(b.x), a.y.min(b.y))))
}

/// The command a paste executes. With an anchor, the top-left corner of
/// the pasted content lands on it; without one, content is shifted by
/// [`PASTE_OFFSET`] from where it was copied.
pub fn paste_command(payload: &Payload, anchor: Option<Point>) -> Result<Command> {
    Ok(fragment_command(payload.fragment()?, anchor))
}

/// [`paste_command`] for an already parsed structured flavor.
pub fn fragment_command(fragment: Document, anchor: Option<Point>) -> Command {
    let offset = match (anchor, top_left(&fragment)) {
        (Some(a), Some(tl)) => a - tl,
        _ => PASTE_OFFSET,
    };
    Command::PasteInsert { fragment, offset }
}

/// Pastes as a single undoable command and returns the new ids.
pub fn paste(
    stack: &mut CommandStack,
    doc: &mut Document,
    payload: &Payload,
    anchor: Option<Point>,
) -> Result<Vec<ElementId>> {
    let cmd = paste_command(payload, anchor)?;
    stack.execute(doc, cmd)
}

pub fn drop_payload(
    stack: &mut CommandStack,
    doc: &mut Document,
    payload: &Payload,
    anchor: Option<Point>,
) -> Result<Vec<ElementId>> {
    paste(stack, doc, payload, anchor)
}

/// Copies `selection`, then removes it with one Delete command.
pub fn cut(
    stack: &mut CommandStack,
    doc: &mut Document,
    selection: &BTreeSet<ElementId>,
    prefs: &Preferences,
) -> Result<Payload> {
    let payload = build_payload(doc, selection, prefs)?;
    stack.execute(
        doc,
        Command::Delete {
            ids: selection.iter().copied().collect(),
        },
    )?;
    Ok(payload)
}
