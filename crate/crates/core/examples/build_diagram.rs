//! Builds a small diagram through the model API and checks its invariants.

use minuml::model::{ConnectionKind, Document, Element, Point};

fn main() -> minuml::Result<()> {
    let mut doc = Document::new();
    let animal = doc.create_class(Point::new(40.0, 40.0), Some("Animal"));
    doc.edit_class(
        animal,
        "Animal",
        false,
        vec!["- name: String".into()],
        vec!["+ speak(): String".into()],
    )?;
    let dog = doc.create_class(Point::new(40.0, 200.0), None);
    println!("default name: {}", doc.class(dog).unwrap().name);
    doc.edit_class(dog, "Dog", false, vec![], vec!["+ fetch(): void".into()])?;

    let c = doc.create_connection(dog, animal)?;
    doc.set_connection_kind(c, ConnectionKind::Inheritance)?;
    doc.create_note(Point::new(240.0, 40.0), "every dog is an animal");
    doc.create_glyph(vec![
        Point::new(0.0, 0.0),
        Point::new(20.0, 10.0),
        Point::new(30.0, 30.0),
    ])?;

    // Connections need two distinct classes.
    println!("self loop: {}", doc.create_connection(dog, dog).unwrap_err());

    for e in doc.elements() {
        let what = match e {
            Element::Class(c) => format!("class {}", c.name),
            Element::Connection(c) => format!("{} {} -> {}", c.kind.name(), c.source.get(), c.target.get()),
            Element::Note(n) => format!("note {:?}", n.text),
            Element::Glyph(g) => format!("glyph of {} points", g.points().len()),
        };
        println!("{:>3} {what}", e.id().get());
    }
    println!("violations: {}", doc.violations().len());
    Ok(())
}
