//! Emits Java and C++ skeletons for a diagram. Pass a .muml path to use
//! your own file.

use minuml::codegen::{emit, emit_document, CodegenTarget};
use minuml::model::{ConnectionKind, Document, Point};
use minuml::persistence;

fn sample() -> minuml::Result<Document> {
    let mut doc = Document::new();
    let shape = doc.create_class(Point::new(0.0, 0.0), Some("Shape"));
    doc.edit_class(shape, "Shape", true, vec![], vec!["+ area(): double".into()])?;
    let circle = doc.create_class(Point::new(0.0, 200.0), Some("Circle"));
    doc.edit_class(
        circle,
        "Circle",
        false,
        vec!["- radius: double".into()],
        vec!["+ area(): double".into()],
    )?;
    let canvas = doc.create_class(Point::new(300.0, 0.0), Some("Canvas"));
    let inh = doc.create_connection(circle, shape)?;
    doc.set_connection_kind(inh, ConnectionKind::Inheritance)?;
    let agg = doc.create_connection(canvas, shape)?;
    doc.set_connection_kind(agg, ConnectionKind::Aggregation)?;
    Ok(doc)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let doc = match std::env::args().nth(1) {
        Some(path) => persistence::parse(&std::fs::read(path)?)?,
        None => sample()?,
    };
    println!("// ---- Java ----\n{}", emit_document(&doc, CodegenTarget::Java));
    println!("// ---- C++ ----\n{}", emit_document(&doc, CodegenTarget::Cpp));

    // Selections must carry both ends of every selected connection.
    let first_conn = doc.connections().next().map(|c| c.id);
    if let Some(c) = first_conn {
        println!("{}", emit(&doc, Some(&[c].into()), CodegenTarget::Java).unwrap_err());
    }
    Ok(())
}
