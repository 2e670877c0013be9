//! Renders a diagram to SVG and PNG in the system temp directory.

use minuml::geometry::TextMetrics;
use minuml::model::{ConnectionKind, Document, Point, Rect};
use minuml::render::{export_raster, export_vector, render_scene, Frame, ViewState};

fn main() -> minuml::Result<()> {
    let mut doc = Document::new();
    let a = doc.create_class(Point::new(0.0, 0.0), Some("Library"));
    let b = doc.create_class(Point::new(260.0, 120.0), Some("Book"));
    let c = doc.create_connection(a, b)?;
    doc.set_connection_kind(c, ConnectionKind::Aggregation)?;
    let g = doc.create_connection(b, a)?;
    doc.create_note(Point::new(0.0, 200.0), "pinned notes print open");

    // The generic connection's label only shows while it is selected.
    let view = ViewState {
        selected: [g].into(),
        ..ViewState::default()
    };
    let scene = render_scene(&doc, &TextMetrics::default(), &view);
    let dir = std::env::temp_dir();

    let svg = export_vector(&scene, &Frame::fit(&scene));
    std::fs::write(dir.join("library.svg"), &svg).expect("write svg");
    let png = export_raster(&scene, &Frame::fit(&scene), 144.0)?;
    std::fs::write(dir.join("library.png"), &png).expect("write png");
    println!("svg {} bytes, png {} bytes in {}", svg.len(), png.len(), dir.display());

    let crop = Frame::world(Rect::new(0.0, 0.0, 120.0, 80.0));
    let thumb = export_raster(&scene, &crop, 48.0)?;
    println!("cropped thumbnail {} bytes", thumb.len());
    Ok(())
}
