//! Hit testing and rubber-band selection through the spatial index, plus the
//! zoom-clamped viewport that maps screen clicks into world space.

use minuml::geometry::{SpatialIndex, TextMetrics, Viewport};
use minuml::model::{Document, Point, Rect};

fn main() -> minuml::Result<()> {
    let mut doc = Document::new();
    let a = doc.create_class(Point::new(0.0, 0.0), Some("Left"));
    let b = doc.create_class(Point::new(300.0, 0.0), Some("Right"));
    let c = doc.create_connection(a, b)?;
    let stroke = doc.create_glyph(vec![Point::new(100.0, 100.0), Point::new(200.0, 140.0)])?;

    let mut index = SpatialIndex::build(&doc, &TextMetrics::default());
    let mut view = Viewport::default();
    println!("zoom 100 clamps to {}", view.set_zoom(100.0));
    view.set_zoom(2.0);

    for screen in [
        Point::new(20.0, 20.0),
        Point::new(400.0, 64.0),
        Point::new(300.0, 240.0),
        Point::new(2000.0, 0.0),
    ] {
        let world = view.screen_to_world(screen);
        println!(
            "click {screen:?} -> world {world:?} -> {:?}",
            index.hit_test(world, 3.0)
        );
    }

    let picked = index.rect_select(&Rect::new(-10.0, -10.0, 500.0, 100.0));
    println!("rectangle picks {picked:?} (connection {c:?}, not the stroke {stroke:?})");

    doc.translate_elements([b], Point::new(0.0, 400.0))?;
    println!("re-bucketed {} elements", index.sync(&doc));
    println!("old spot now: {:?}", index.hit_test(Point::new(320.0, 20.0), 0.0));
    Ok(())
}
