//! Copy, cut and paste between two documents. A copy carries the structured
//! fragment, code text and an SVG picture.

use minuml::clipboard::{build_payload, cut, paste};
use minuml::commands::CommandStack;
use minuml::model::{Document, Point};
use minuml::persistence::Preferences;

fn main() -> minuml::Result<()> {
    let mut source = Document::new();
    let user = source.create_class(Point::new(0.0, 0.0), Some("User"));
    let role = source.create_class(Point::new(200.0, 0.0), Some("Role"));
    let audit = source.create_class(Point::new(400.0, 0.0), Some("Audit"));
    source.create_connection(user, role)?;
    source.create_connection(role, audit)?;

    // Only the User-Role edge has both ends selected, so only it is copied.
    let payload = build_payload(&source, &[user, role].into(), &Preferences::default())?;
    for flavor in payload.flavors() {
        println!("offered: {flavor}");
    }
    println!("{}", payload.code_text.as_deref().unwrap_or(""));

    let mut target = Document::new();
    let mut stack = CommandStack::new();
    let ids = paste(&mut stack, &mut target, &payload, None)?;
    println!("pasted as {ids:?}");
    let ids = paste(&mut stack, &mut target, &payload, Some(Point::new(0.0, 300.0)))?;
    println!("pasted again at the cursor as {ids:?}");

    let mut src_stack = CommandStack::new();
    cut(&mut src_stack, &mut source, &[audit].into(), &Preferences::default())?;
    println!("after cut the source has {} elements", source.len());
    src_stack.undo(&mut source);
    println!("after undo it has {} again", source.len());
    Ok(())
}
