mod common;

use minuml::codegen::CodegenTarget;
use minuml::model::{Document, Point};
use minuml::persistence::{self, load_prefs, parse, parse_unchecked, save_prefs, serialize, Preferences};
use minuml::render::{Orientation, PageSize};
use minuml::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parse_inverts_serialize(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let doc = common::random_document(&mut rng);
        let bytes = serialize(&doc);
        let back = parse(&bytes).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize(&back), bytes);
    }
}

#[test]
fn fixture_is_canonical() {
    let path = common::fixture_path("movie_rental.muml");
    let bytes = std::fs::read(path).unwrap();
    assert_eq!(serialize(&parse(&bytes).unwrap()), bytes);
}

fn parse_err(text: &str) -> Error {
    parse(text.as_bytes()).unwrap_err()
}

#[test]
fn truncated_file_reports_a_line() {
    let bytes = std::fs::read(common::fixture_path("movie_rental.muml")).unwrap();
    let cut = &bytes[..bytes.len() / 2];
    assert!(matches!(parse(cut), Err(Error::Parse { line, .. }) if line > 1));
}

#[test]
fn rejections() {
    let head = r#"<minuml format_version="1" next_id="9" name_counter="1">"#;
    let dangling = format!(
        r#"{head}<class id="1" name="A" interface="false" x="0" y="0"/><connection id="2" source="1" target="7" kind="generic"/></minuml>"#
    );
    assert!(matches!(parse_err(&dangling), Error::Integrity(m) if m.contains("connection 2")));
    assert!(parse_unchecked(dangling.as_bytes()).is_ok());

    let future = r#"<minuml format_version="2" next_id="1" name_counter="1"/>"#;
    assert_eq!(parse_err(future), Error::UnsupportedVersion(2));

    let nan = format!(r#"{head}<class id="1" name="A" interface="false" x="NaN" y="0"/></minuml>"#);
    assert!(matches!(parse_err(&nan), Error::Parse { context: Some(c), .. } if c == "class 1"));

    let dup =
        format!(r#"{head}<note id="1" x="0" y="0" pinned="false"/><note id="1" x="0" y="0" pinned="false"/></minuml>"#);
    assert!(matches!(parse_err(&dup), Error::Parse { .. }));

    let behind =
        r#"<minuml format_version="1" next_id="1" name_counter="1"><note id="4" x="0" y="0" pinned="false"/></minuml>"#;
    assert!(matches!(parse_err(behind), Error::Integrity(_)));

    let short_glyph = format!(r#"{head}<glyph id="1"><point x="0" y="0"/></glyph></minuml>"#);
    assert!(matches!(parse_err(&short_glyph), Error::Parse { .. }));

    assert!(matches!(parse(b"\xff\xfe"), Err(Error::Parse { .. })));
    assert!(matches!(parse(b""), Err(Error::Parse { .. })));
}

#[test]
fn control_characters_survive() {
    let mut doc = Document::new();
    doc.create_note(Point::new(0.0, 0.0), "bell\u{7} tab\t cr\r nul\u{0} end ");
    let id = doc.create_class(Point::new(-0.0, 1e-300), Some("  spaced  "));
    doc.edit_class(id, "  spaced  ", false, vec!["".into(), " ".into()], vec!["\n".into()])
        .unwrap();
    assert_eq!(parse(&serialize(&doc)).unwrap(), doc);
}

#[test]
fn preferences_round_trip_and_warn() {
    let prefs = Preferences {
        code_language: CodegenTarget::Cpp,
        page_size: PageSize::A4,
        orientation: Orientation::Landscape,
    };
    let loaded = load_prefs(Some(&save_prefs(&prefs)));
    assert_eq!(loaded.prefs, prefs);
    assert!(loaded.warnings.is_empty());

    let messy = load_prefs(Some(
        "# comment\ncode_language = C++\npage_size=legal\ncolour=red\njunk\n",
    ));
    assert_eq!(messy.prefs.code_language, CodegenTarget::Cpp);
    assert_eq!(messy.prefs.page_size, PageSize::Letter);
    assert_eq!(messy.warnings.len(), 3);
    assert_eq!(load_prefs(None).prefs, Preferences::default());
}

#[test]
fn prefs_path_honours_override() {
    // Only this test touches the variable in this binary.
    std::env::set_var("MINUML_CONFIG", "/tmp/somewhere/minuml.cfg");
    assert_eq!(
        persistence::prefs_path().unwrap(),
        std::path::PathBuf::from("/tmp/somewhere/minuml.cfg")
    );
    let loaded = persistence::load_prefs_file();
    assert_eq!(loaded.prefs, Preferences::default());
    std::env::remove_var("MINUML_CONFIG");
}
