//! Undo/redo over a [`Document`].
//!
//! Every edit goes through [`CommandStack::execute`], which applies the
//! command and records the exact before/after state of the elements it
//! touched. Undo restores the before state and redo restores the after
//! state, so ids allocated on first execution survive any undo/redo
//! interleaving. History depth is unbounded.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{ConnectionKind, Document, Element, ElementId, Point, Vector};

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    CreateClass {
        origin: Point,
        name: Option<String>,
    },
    EditClass {
        id: ElementId,
        name: String,
        is_interface: bool,
        variables: Vec<String>,
        methods: Vec<String>,
    },
    CreateConnection {
        source: ElementId,
        target: ElementId,
    },
    SetConnectionKind {
        id: ElementId,
        kind: ConnectionKind,
    },
    CreateNote {
        origin: Point,
        text: String,
    },
    EditNote {
        id: ElementId,
        text: String,
        pinned_open: bool,
    },
    CreateGlyph {
        points: Vec<Point>,
    },
    /// One continuous drag arrives as one command.
    Translate {
        ids: Vec<ElementId>,
        delta: Vector,
    },
    Delete {
        ids: Vec<ElementId>,
    },
    /// Inserts a copy of `fragment` under fresh ids, shifted by `offset`.
    /// Connections are remapped onto the inserted copies.
    PasteInsert {
        fragment: Document,
        offset: Vector,
    },
    /// Replaces the whole document; undo brings the previous one back.
    LoadDocument {
        document: Document,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CreateClass { .. } => "create class",
            Command::EditClass { .. } => "edit class",
            Command::CreateConnection { .. } => "create connection",
            Command::SetConnectionKind { .. } => "set connection kind",
            Command::CreateNote { .. } => "create note",
            Command::EditNote { .. } => "edit note",
            Command::CreateGlyph { .. } => "create glyph",
            Command::Translate { .. } => "move",
            Command::Delete { .. } => "delete",
            Command::PasteInsert { .. } => "paste",
            Command::LoadDocument { .. } => "load",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
struct ElementChange {
    id: ElementId,
    before: Option<Element>,
    after: Option<Element>,
}

#[derive(Clone, Debug, PartialEq)]
enum Effect {
    Elements {
        changes: Vec<ElementChange>,
        counters_before: (u64, u64),
        counters_after: (u64, u64),
    },
    Replace {
        before: Box<Document>,
        after: Box<Document>,
    },
}

impl Effect {
    fn revert(&self, doc: &mut Document) {
        match self {
            Effect::Elements {
                changes,
                counters_before,
                ..
            } => {
                for ch in changes.iter().rev() {
                    restore(doc, ch.id, ch.before.as_ref());
                }
                doc.set_counters(*counters_before);
            }
            Effect::Replace { before, .. } => *doc = (**before).clone(),
        }
    }

    fn reapply(&self, doc: &mut Document) {
        match self {
            Effect::Elements {
                changes,
                counters_after,
                ..
            } => {
                for ch in changes {
                    restore(doc, ch.id, ch.after.as_ref());
                }
                doc.set_counters(*counters_after);
            }
            Effect::Replace { after, .. } => *doc = (**after).clone(),
        }
    }
}

fn restore(doc: &mut Document, id: ElementId, state: Option<&Element>) {
    match state {
        Some(e) => doc.put(e.clone()),
        None => {
            doc.take(id);
        }
    }
}

/// A command together with the state it captured when first applied.
#[derive(Clone, Debug, PartialEq)]
pub struct Executed {
    pub command: Command,
    effect: Effect,
}

#[derive(Clone, Debug, Default)]
pub struct CommandStack {
    undo: Vec<Executed>,
    redo: Vec<Executed>,
}

impl CommandStack {
    pub fn new() -> Self {
        Self::default()
    }

    /// Applies `cmd`, pushes it on the undo list and clears the redo list.
    /// Returns the ids of elements the command created, in id order. On
    /// error neither the document nor the stack changes.
    pub fn execute(&mut self, doc: &mut Document, cmd: Command) -> Result<Vec<ElementId>> {
        let (effect, created) = apply(doc, &cmd)?;
        self.undo.push(Executed { command: cmd, effect });
        self.redo.clear();
        Ok(created)
    }

    pub fn undo(&mut self, doc: &mut Document) -> bool {
        match self.undo.pop() {
            Some(ex) => {
                ex.effect.revert(doc);
                self.redo.push(ex);
                true
            }
            None => false,
        }
    }

    pub fn redo(&mut self, doc: &mut Document) -> bool {
        match self.redo.pop() {
            Some(ex) => {
                ex.effect.reapply(doc);
                self.undo.push(ex);
                true
            }
            None => false,
        }
    }

    pub fn can_undo(&self) -> bool {
        !self.undo.is_empty()
    }

    pub fn can_redo(&self) -> bool {
        !self.redo.is_empty()
    }

    /// `(undo_count, redo_count)`.
    pub fn history_depth(&self) -> (usize, usize) {
        (self.undo.len(), self.redo.len())
    }

    /// Name of the command the next undo would revert.
    pub fn undo_label(&self) -> Option<&'static str> {
        self.undo.last().map(|e| e.command.name())
    }

    pub fn redo_label(&self) -> Option<&'static str> {
        self.redo.last().map(|e| e.command.name())
    }
}

fn snapshot(doc: &Document, ids: &BTreeSet<ElementId>) -> Vec<(ElementId, Option<Element>)> {
    ids.iter().map(|id| (*id, doc.get(*id).cloned())).collect()
}

fn changes_since(doc: &Document, before: Vec<(ElementId, Option<Element>)>) -> Vec<ElementChange> {
    before
        .into_iter()
        .map(|(id, before)| ElementChange {
            id,
            after: doc.get(id).cloned(),
            before,
        })
        .collect()
}

fn created(doc: &Document, ids: &[ElementId]) -> Vec<ElementChange> {
    ids.iter()
        .map(|id| ElementChange {
            id: *id,
            before: None,
            after: doc.get(*id).cloned(),
        })
        .collect()
}

fn apply(doc: &mut Document, cmd: &Command) -> Result<(Effect, Vec<ElementId>)> {
    let counters_before = doc.counters();
    let (changes, new_ids) = match cmd {
        Command::CreateClass { origin, name } => {
            let id = doc.create_class(*origin, name.as_deref());
            (created(doc, &[id]), vec![id])
        }
        Command::EditClass {
            id,
            name,
            is_interface,
            variables,
            methods,
        } => {
            let before = snapshot(doc, &BTreeSet::from([*id]));
            doc.edit_class(*id, name, *is_interface, variables.clone(), methods.clone())?;
            (changes_since(doc, before), vec![])
        }
        Command::CreateConnection { source, target } => {
            let id = doc.create_connection(*source, *target)?;
            (created(doc, &[id]), vec![id])
        }
        Command::SetConnectionKind { id, kind } => {
            let before = snapshot(doc, &BTreeSet::from([*id]));
            doc.set_connection_kind(*id, *kind)?;
            (changes_since(doc, before), vec![])
        }
        Command::CreateNote { origin, text } => {
            let id = doc.create_note(*origin, text);
            (created(doc, &[id]), vec![id])
        }
        Command::EditNote { id, text, pinned_open } => {
            let before = snapshot(doc, &BTreeSet::from([*id]));
            doc.edit_note(*id, text, *pinned_open)?;
            (changes_since(doc, before), vec![])
        }
        Command::CreateGlyph { points } => {
            let id = doc.create_glyph(points.clone())?;
            (created(doc, &[id]), vec![id])
        }
        Command::Translate { ids, delta } => {
            let set: BTreeSet<ElementId> = ids.iter().copied().collect();
            if let Some(&missing) = set.iter().find(|id| !doc.contains(**id)) {
                return Err(Error::IdMismatch(missing));
            }
            let before = snapshot(doc, &set);
            doc.translate_elements(set, *delta)?;
            (changes_since(doc, before), vec![])
        }
        Command::Delete { ids } => {
            let record = doc.delete_elements(ids.iter().copied())?;
            let changes = record
                .removed
                .into_iter()
                .map(|e| ElementChange {
                    id: e.id(),
                    before: Some(e),
                    after: None,
                })
                .collect();
            (changes, vec![])
        }
        Command::PasteInsert { fragment, offset } => {
            let ids = paste_fragment(doc, fragment, *offset);
            (created(doc, &ids), ids)
        }
        Command::LoadDocument { document } => {
            let before = Box::new(std::mem::replace(doc, document.clone()));
            let effect = Effect::Replace {
                before,
                after: Box::new(document.clone()),
            };
            return Ok((effect, vec![]));
        }
    };
    Ok((
        Effect::Elements {
            changes,
            counters_before,
            counters_after: doc.counters(),
        },
        new_ids,
    ))
}

/// Inserts the fragment's elements under fresh ids: shapes first, then
/// connections, each group in id order. Connections whose endpoints are not
/// both part of the fragment are dropped.
fn paste_fragment(doc: &mut Document, fragment: &Document, offset: Vector) -> Vec<ElementId> {
    let mut remap = std::collections::BTreeMap::new();
    let mut out = Vec::new();
    for e in fragment.elements().filter(|e| e.as_connection().is_none()) {
        let mut copy = e.clone();
        copy.translate(offset);
        let new_id = doc.insert_fresh(copy);
        remap.insert(e.id(), new_id);
        out.push(new_id);
    }
    for c in fragment.connections() {
        if let (Some(&source), Some(&target)) = (remap.get(&c.source), remap.get(&c.target)) {
            if source == target {
                continue;
            }
            let mut copy = c.clone();
            copy.source = source;
            copy.target = target;
            out.push(doc.insert_fresh(Element::Connection(copy)));
        }
    }
    out
}
