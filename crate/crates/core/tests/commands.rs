mod common;

use std::collections::BTreeSet;

use minuml::commands::{Command, CommandStack};
use minuml::model::{Document, ElementId, Point};
use minuml::persistence::serialize;
use proptest::prelude::*;

/// Runs `n` random commands, returning the snapshots after each successful one.
fn run(seed: u64, n: usize) -> (Document, CommandStack, Vec<Vec<u8>>, Vec<Vec<ElementId>>) {
    let mut rng = common::rng(seed);
    let mut doc = Document::new();
    let mut stack = CommandStack::new();
    let mut snaps = vec![serialize(&doc)];
    let mut created = Vec::new();
    for _ in 0..n {
        let cmd = common::command(&mut rng, &doc);
        let before = serialize(&doc);
        let depth = stack.history_depth();
        match stack.execute(&mut doc, cmd) {
            Ok(ids) => {
                snaps.push(serialize(&doc));
                created.push(ids);
            }
            Err(_) => {
                assert_eq!(serialize(&doc), before, "a failed command changed the document");
                assert_eq!(stack.history_depth(), depth);
            }
        }
    }
    (doc, stack, snaps, created)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_prefix_is_restored(seed in any::<u64>(), n in 0usize..120) {
        let (mut doc, mut stack, snaps, _) = run(seed, n);
        for expected in snaps.iter().rev().skip(1) {
            prop_assert!(stack.undo(&mut doc));
            prop_assert_eq!(&serialize(&doc), expected);
        }
        prop_assert!(!stack.undo(&mut doc));
        for expected in snaps.iter().skip(1) {
            prop_assert!(stack.redo(&mut doc));
            prop_assert_eq!(&serialize(&doc), expected);
        }
        prop_assert!(!stack.redo(&mut doc));
    }

    #[test]
    fn ids_survive_undo_redo(seed in any::<u64>(), n in 1usize..80, back in 1usize..20) {
        let (mut doc, mut stack, _, created) = run(seed, n);
        let final_doc = doc.clone();
        let back = back.min(created.len());
        for _ in 0..back {
            stack.undo(&mut doc);
        }
        for _ in 0..back {
            stack.redo(&mut doc);
        }
        prop_assert_eq!(&doc, &final_doc);
        // Nothing ran after the last command, so everything it created is live
        // again under its original id.
        let live: BTreeSet<ElementId> = doc.elements().map(|e| e.id()).collect();
        prop_assert!(created.last().into_iter().flatten().all(|id| live.contains(id)));
    }

    #[test]
    fn new_command_clears_redo(seed in any::<u64>(), n in 2usize..60) {
        let (mut doc, mut stack, _, _) = run(seed, n);
        if stack.undo(&mut doc) {
            stack.execute(&mut doc, Command::CreateClass { origin: Point::new(0.0, 0.0), name: None }).unwrap();
            prop_assert!(!stack.can_redo());
        }
    }
}

#[test]
fn ids_are_never_reused_after_undo() {
    let mut doc = Document::new();
    let mut stack = CommandStack::new();
    let a = stack
        .execute(
            &mut doc,
            Command::CreateClass {
                origin: Point::new(0.0, 0.0),
                name: None,
            },
        )
        .unwrap();
    stack.undo(&mut doc);
    let b = stack
        .execute(
            &mut doc,
            Command::CreateClass {
                origin: Point::new(0.0, 0.0),
                name: None,
            },
        )
        .unwrap();
    // The undone allocation is rolled back with the document, so the id is
    // free again and the default name matches too.
    assert_eq!(a, b);
    assert_eq!(doc.class(b[0]).unwrap().name, "Class1");
}

#[test]
fn delete_cascades_and_undo_restores_connections() {
    let mut doc = Document::new();
    let mut stack = CommandStack::new();
    let a = doc.create_class(Point::new(0.0, 0.0), Some("A"));
    let b = doc.create_class(Point::new(200.0, 0.0), Some("B"));
    let c = doc.create_class(Point::new(0.0, 200.0), Some("C"));
    let ab = doc.create_connection(a, b).unwrap();
    let ca = doc.create_connection(c, a).unwrap();
    let bc = doc.create_connection(b, c).unwrap();
    let before = serialize(&doc);
    stack.execute(&mut doc, Command::Delete { ids: vec![a] }).unwrap();
    let left: BTreeSet<_> = doc.elements().map(|e| e.id()).collect();
    assert_eq!(left, [b, c, bc].into());
    stack.undo(&mut doc);
    assert_eq!(serialize(&doc), before);
    assert!(doc.connection(ab).is_some() && doc.connection(ca).is_some());
}

#[test]
fn load_is_undoable() {
    let mut doc = Document::new();
    doc.create_class(Point::new(1.0, 1.0), Some("Old"));
    let before = serialize(&doc);
    let mut stack = CommandStack::new();
    let mut other = Document::new();
    other.create_note(Point::new(0.0, 0.0), "new");
    stack
        .execute(
            &mut doc,
            Command::LoadDocument {
                document: other.clone(),
            },
        )
        .unwrap();
    assert_eq!(doc, other);
    assert_eq!(
        stack.undo_label(),
        Some(Command::LoadDocument { document: other }.name())
    );
    stack.undo(&mut doc);
    assert_eq!(serialize(&doc), before);
}
