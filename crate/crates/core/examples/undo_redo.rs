//! Every edit goes through the command stack, so any prefix can be undone
//! exactly, including connections removed along with a deleted class.

use minuml::commands::{Command, CommandStack};
use minuml::model::{Document, Point};
use minuml::persistence::serialize;

fn main() -> minuml::Result<()> {
    let mut doc = Document::new();
    let mut stack = CommandStack::new();
    let start = serialize(&doc);

    let a = stack.execute(
        &mut doc,
        Command::CreateClass {
            origin: Point::new(0.0, 0.0),
            name: Some("Order".into()),
        },
    )?[0];
    let b = stack.execute(
        &mut doc,
        Command::CreateClass {
            origin: Point::new(300.0, 0.0),
            name: Some("Item".into()),
        },
    )?[0];
    stack.execute(&mut doc, Command::CreateConnection { source: a, target: b })?;
    stack.execute(
        &mut doc,
        Command::Translate {
            ids: vec![a, b],
            delta: Point::new(10.0, 25.0),
        },
    )?;
    let before_delete = serialize(&doc);

    stack.execute(&mut doc, Command::Delete { ids: vec![b] })?;
    println!("after delete: {} elements", doc.len());
    println!("undo {:?}", stack.undo_label());
    stack.undo(&mut doc);
    assert_eq!(serialize(&doc), before_delete);
    println!("restored: {} elements, connection back", doc.len());

    while stack.undo(&mut doc) {}
    assert_eq!(serialize(&doc), start);
    let (undo, redo) = stack.history_depth();
    println!("fully undone: undo={undo} redo={redo}");

    // A failed command leaves both the document and the history alone.
    let err = stack.execute(&mut doc, Command::Delete { ids: vec![a] }).unwrap_err();
    println!("rejected: {err}");
    Ok(())
}
