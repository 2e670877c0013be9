//! Saves a diagram in the canonical file format, reads it back and shows how
//! damaged input is reported.

use minuml::model::{Document, Point};
use minuml::persistence::{parse, serialize, serialize_to_string};

fn main() -> minuml::Result<()> {
    let mut doc = Document::new();
    let id = doc.create_class(Point::new(12.5, 40.0), Some("Ledger"));
    doc.edit_class(
        id,
        "Ledger",
        false,
        vec!["- entries: List<Entry>".into()],
        vec!["+ total(): Money".into()],
    )?;
    doc.create_note(Point::new(200.0, 40.0), "amounts in cents & \"exact\"");

    let text = serialize_to_string(&doc);
    print!("{text}");
    let back = parse(text.as_bytes())?;
    assert_eq!(serialize(&back), text.as_bytes());
    println!("round trip: identical bytes");

    let path = std::env::temp_dir().join("ledger.muml");
    std::fs::write(&path, &text).expect("write temp file");
    println!("wrote {}", path.display());

    for broken in [
        &text[..text.len() / 2],
        "<minuml format_version=\"2\" next_id=\"1\" name_counter=\"1\"/>",
    ] {
        println!("rejected: {}", parse(broken.as_bytes()).unwrap_err());
    }
    Ok(())
}
