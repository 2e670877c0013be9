//! `.muml` document files and the preferences file.
//!
//! Documents are written in one canonical form: elements in id order,
//! attributes in a fixed order, one element per line, LF line endings and
//! no trailing whitespace. `serialize` output is therefore usable as a
//! byte-level identity for documents. See `docs/file-format.md` for the
//! schema.

use std::path::PathBuf;

use crate::codegen::CodegenTarget;
use crate::error::{Error, Result};
use crate::model::{ClassBox, Connection, ConnectionKind, Document, Element, ElementId, Glyph, Point, StickyNote};
use crate::render::{Orientation, PageSize};
use crate::xml::{self, Node};

pub const FORMAT_VERSION: u32 = 1;
pub const FILE_EXTENSION: &str = "muml";

fn num(v: f64) -> String {
    format!("{v}")
}

pub fn serialize(doc: &Document) -> Vec<u8> {
    serialize_to_string(doc).into_bytes()
}

pub fn serialize_to_string(doc: &Document) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    write_document(&mut out, 0, doc);
    out
}

/// Writes the `<minuml>` element at `indent`; the session protocol embeds
/// documents this way.
pub(crate) fn write_document(out: &mut String, indent: usize, doc: &Document) {
    xml::open_tag(
        out,
        indent,
        "minuml",
        &[
            ("format_version", FORMAT_VERSION.to_string()),
            ("next_id", doc.next_id().to_string()),
            ("name_counter", doc.name_counter().to_string()),
        ],
    );
    if doc.is_empty() {
        out.push_str("/>\n");
        return;
    }
    out.push_str(">\n");
    for e in doc.elements() {
        write_element(out, indent + 2, e);
    }
    close(out, indent, "minuml");
}

fn close(out: &mut String, indent: usize, name: &str) {
    out.extend(std::iter::repeat_n(' ', indent));
    out.push_str("</");
    out.push_str(name);
    out.push_str(">\n");
}

fn write_element(out: &mut String, indent: usize, e: &Element) {
    match e {
        Element::Class(c) => {
            let attrs = [
                ("id", c.id.to_string()),
                ("name", c.name.clone()),
                ("interface", c.is_interface.to_string()),
                ("x", num(c.origin.x)),
                ("y", num(c.origin.y)),
            ];
            if c.variables.is_empty() && c.methods.is_empty() {
                xml::leaf(out, indent, "class", &attrs, "");
                return;
            }
            xml::open_tag(out, indent, "class", &attrs);
            out.push_str(">\n");
            for v in &c.variables {
                member(out, indent + 2, "variable", v);
            }
            for m in &c.methods {
                member(out, indent + 2, "method", m);
            }
            close(out, indent, "class");
        }
        Element::Connection(c) => xml::leaf(
            out,
            indent,
            "connection",
            &[
                ("id", c.id.to_string()),
                ("source", c.source.to_string()),
                ("target", c.target.to_string()),
                ("kind", c.kind.name().to_owned()),
            ],
            "",
        ),
        Element::Note(n) => xml::leaf(
            out,
            indent,
            "note",
            &[
                ("id", n.id.to_string()),
                ("x", num(n.origin.x)),
                ("y", num(n.origin.y)),
                ("pinned", n.pinned_open.to_string()),
            ],
            &n.text,
        ),
        Element::Glyph(g) => {
            xml::open_tag(out, indent, "glyph", &[("id", g.id.to_string())]);
            out.push_str(">\n");
            for p in g.points() {
                xml::leaf(out, indent + 2, "point", &[("x", num(p.x)), ("y", num(p.y))], "");
            }
            close(out, indent, "glyph");
        }
    }
}

// Member lines always get an open/close pair, even when empty.
fn member(out: &mut String, indent: usize, tag: &str, line: &str) {
    xml::open_tag(out, indent, tag, &[]);
    out.push('>');
    xml::escape_text(line, out);
    out.push_str("</");
    out.push_str(tag);
    out.push_str(">\n");
}

/// Parses a document and checks every model invariant. On any failure no
/// document is produced.
pub fn parse(bytes: &[u8]) -> Result<Document> {
    let doc = parse_unchecked(bytes)?;
    if let Some(v) = doc.violations().first() {
        return Err(Error::Integrity(v.to_string()));
    }
    Ok(doc)
}

pub fn parse_str(text: &str) -> Result<Document> {
    parse(text.as_bytes())
}

/// Syntax-level parse only: the result may break model invariants (for
/// example a connection to a missing class). Used by validators that want to
/// report every violation instead of stopping at the first.
pub fn parse_unchecked(bytes: &[u8]) -> Result<Document> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|b| **b == b'\n').count() + 1;
        Error::parse(line, None, "file is not valid UTF-8")
    })?;
    document_from_node(&xml::parse(text)?)
}

pub(crate) fn document_from_node(root: &Node) -> Result<Document> {
    if root.name != "minuml" {
        return Err(root.error("root element must be <minuml>"));
    }
    root.expect_attrs(&["format_version", "next_id", "name_counter"])?;
    let version: u32 = root.parsed("format_version")?;
    if version > FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    if version == 0 {
        return Err(root.error("format_version must be at least 1"));
    }
    let next_id: u64 = root.parsed("next_id")?;
    let name_counter: u64 = root.parsed("name_counter")?;
    let mut elements: Vec<Element> = Vec::with_capacity(root.children.len());
    for node in &root.children {
        let e = read_element(node)?;
        if elements.iter().any(|x| x.id() == e.id()) {
            return Err(node.error(format!("duplicate element id {}", e.id())));
        }
        elements.push(e);
    }
    Ok(Document::from_parts(elements, next_id, name_counter))
}

fn id_attr(node: &Node, key: &str) -> Result<ElementId> {
    let id: u64 = node.parsed(key)?;
    if id == 0 {
        return Err(node.error(format!("`{key}` must be a positive id")));
    }
    Ok(ElementId(id))
}

fn no_children(node: &Node) -> Result<()> {
    match node.children.first() {
        Some(c) => Err(c.error(format!("unexpected element inside <{}>", node.name))),
        None => Ok(()),
    }
}

fn read_element(node: &Node) -> Result<Element> {
    let id = id_attr(node, "id")?;
    element_body(node, id).map_err(|mut e| {
        if let Error::Parse { context, .. } = &mut e {
            *context = Some(format!("{} {}", node.name, id));
        }
        e
    })
}

fn element_body(node: &Node, id: ElementId) -> Result<Element> {
    match node.name.as_str() {
        "class" => {
            node.expect_attrs(&["id", "name", "interface", "x", "y"])?;
            let name = node.required("name")?.to_owned();
            let mut cls = ClassBox {
                id,
                name,
                is_interface: node.flag("interface")?,
                variables: Vec::new(),
                methods: Vec::new(),
                origin: Point::new(node.coord("x")?, node.coord("y")?),
            };
            for child in &node.children {
                child.expect_attrs(&[])?;
                no_children(child)?;
                match child.name.as_str() {
                    "variable" => cls.variables.push(child.text.clone()),
                    "method" => cls.methods.push(child.text.clone()),
                    other => return Err(child.error(format!("unknown class member <{other}>"))),
                }
            }
            Ok(Element::Class(cls))
        }
        "connection" => {
            node.expect_attrs(&["id", "source", "target", "kind"])?;
            no_children(node)?;
            let kind = node.required("kind")?;
            let kind = ConnectionKind::from_name(kind)
                .ok_or_else(|| node.error(format!("unknown connection kind {kind:?}")))?;
            Ok(Element::Connection(Connection {
                id,
                source: id_attr(node, "source")?,
                target: id_attr(node, "target")?,
                kind,
            }))
        }
        "note" => {
            node.expect_attrs(&["id", "x", "y", "pinned"])?;
            no_children(node)?;
            Ok(Element::Note(StickyNote {
                id,
                origin: Point::new(node.coord("x")?, node.coord("y")?),
                text: node.text.clone(),
                pinned_open: node.flag("pinned")?,
            }))
        }
        "glyph" => {
            node.expect_attrs(&["id"])?;
            let mut points = Vec::with_capacity(node.children.len());
            for child in &node.children {
                if child.name != "point" {
                    return Err(child.error(format!("unknown glyph member <{}>", child.name)));
                }
                child.expect_attrs(&["x", "y"])?;
                points.push(Point::new(child.coord("x")?, child.coord("y")?));
            }
            Glyph::new(id, points)
                .map(Element::Glyph)
                .map_err(|e| node.error(e.to_string()))
        }
        other => Err(node.error(format!("unknown element <{other}>"))),
    }
}

/// User preferences, stored as `key=value` lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Preferences {
    pub code_language: CodegenTarget,
    pub page_size: PageSize,
    pub orientation: Orientation,
}

/// Result of reading a preferences file: lines that could not be used are
/// reported in `warnings` and otherwise skipped.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LoadedPrefs {
    pub prefs: Preferences,
    pub warnings: Vec<String>,
}

pub const PREFS_FILE_NAME: &str = "minuml.cfg";

/// Where preferences live: `$MINUML_CONFIG` if set, otherwise
/// `minuml/minuml.cfg` under `$XDG_CONFIG_HOME` (default `~/.config`).
pub fn prefs_path() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("MINUML_CONFIG").filter(|p| !p.is_empty()) {
        return Some(PathBuf::from(p));
    }
    let base = match std::env::var_os("XDG_CONFIG_HOME").filter(|p| !p.is_empty()) {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from(std::env::var_os("HOME")?).join(".config"),
    };
    Some(base.join("minuml").join(PREFS_FILE_NAME))
}

/// Loads preferences from [`prefs_path`]. A missing file gives the
/// defaults; an unreadable one gives the defaults plus a warning.
pub fn load_prefs_file() -> LoadedPrefs {
    let Some(path) = prefs_path() else {
        return LoadedPrefs::default();
    };
    match std::fs::read_to_string(&path) {
        Ok(text) => load_prefs(Some(&text)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => LoadedPrefs::default(),
        Err(e) => {
            let mut loaded = LoadedPrefs::default();
            let msg = format!("cannot read {}: {e}", path.display());
            log::warn!("{msg}");
            loaded.warnings.push(msg);
            loaded
        }
    }
}

/// `None` (no file) gives the defaults.
pub fn load_prefs(text: Option<&str>) -> LoadedPrefs {
    let mut loaded = LoadedPrefs::default();
    let Some(text) = text else {
        return loaded;
    };
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            warn(&mut loaded, n + 1, format!("not a key=value line: {line:?}"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim().to_ascii_lowercase());
        let ok = match key {
            "code_language" => CodegenTarget::from_name(&value).map(|v| loaded.prefs.code_language = v),
            "page_size" => PageSize::from_name(&value).map(|v| loaded.prefs.page_size = v),
            "orientation" => Orientation::from_name(&value).map(|v| loaded.prefs.orientation = v),
            _ => {
                warn(&mut loaded, n + 1, format!("unknown key {key:?}"));
                continue;
            }
        };
        if ok.is_none() {
            warn(&mut loaded, n + 1, format!("bad value {value:?} for {key}"));
        }
    }
    loaded
}

fn warn(loaded: &mut LoadedPrefs, line: usize, msg: String) {
    let msg = format!("preferences line {line}: {msg}");
    log::warn!("{msg}");
    loaded.warnings.push(msg);
}

pub fn save_prefs(prefs: &Preferences) -> String {
    format!(
        "# minuml preferences\ncode_language={}\npage_size={}\norientation={}\n",
        prefs.code_language.name(),
        prefs.page_size.name(),
        prefs.orientation.name()
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_form() {
        let bytes = serialize(&Document::new());
        assert_eq!(
            std::str::from_utf8(&bytes).unwrap(),
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<minuml format_version=\"1\" next_id=\"1\" name_counter=\"1\"/>\n"
        );
        assert_eq!(serialize(&parse(&bytes).unwrap()), bytes);
    }

    #[test]
    fn canonical_layout() {
        let mut doc = Document::new();
        let a = doc.create_class(Point::new(100.0, 50.5), Some("Dog"));
        let b = doc.create_class(Point::new(0.0, 0.0), None);
        doc.edit_class(
            a,
            "Dog",
            false,
            vec!["name: String".into(), "".into()],
            vec!["bark()".into()],
        )
        .unwrap();
        let c = doc.create_connection(a, b).unwrap();
        doc.set_connection_kind(c, ConnectionKind::Inheritance).unwrap();
        doc.create_note(Point::new(10.0, 10.0), "a < b\nsecond");
        doc.create_glyph(vec![Point::new(0.0, 0.0), Point::new(1.25, -2.0)])
            .unwrap();
        let text = serialize_to_string(&doc);
        let expected = r#"<?xml version="1.0" encoding="UTF-8"?>
<minuml format_version="1" next_id="6" name_counter="2">
  <class id="1" name="Dog" interface="false" x="100" y="50.5">
    <variable>name: String</variable>
    <variable></variable>
    <method>bark()</method>
  </class>
  <class id="2" name="Class1" interface="false" x="0" y="0"/>
  <connection id="3" source="1" target="2" kind="inheritance"/>
  <note id="4" x="10" y="10" pinned="false">a &lt; b&#10;second</note>
  <glyph id="5">
    <point x="0" y="0"/>
    <point x="1.25" y="-2"/>
  </glyph>
</minuml>
"#;
        assert_eq!(text, expected);
        assert!(text.lines().all(|l| l == l.trim_end()));
        assert_eq!(parse_str(&text).unwrap(), doc);
    }

    #[test]
    fn dangling_connection_is_an_integrity_error() {
        let text = r#"<minuml format_version="1" next_id="4" name_counter="1">
  <class id="1" name="A" interface="false" x="0" y="0"/>
  <connection id="3" source="1" target="99" kind="generic"/>
</minuml>"#;
        assert!(matches!(parse_str(text), Err(Error::Integrity(m)) if m.contains("99")));
        assert_eq!(parse_unchecked(text.as_bytes()).unwrap().violations().len(), 1);
    }

    #[test]
    fn version_guard() {
        let text = r#"<minuml format_version="2" next_id="1" name_counter="1"/>"#;
        assert_eq!(parse_str(text), Err(Error::UnsupportedVersion(2)));
    }

    #[test]
    fn malformed_input_names_the_element() {
        let text = "<minuml format_version=\"1\" next_id=\"3\" name_counter=\"1\">\n  <class id=\"1\" name=\"A\" interface=\"maybe\" x=\"0\" y=\"0\"/>\n</minuml>";
        match parse_str(text) {
            Err(Error::Parse { line, context, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(context.as_deref(), Some("class 1"));
            }
            other => panic!("{other:?}"),
        }
        let truncated = "<minuml format_version=\"1\" next_id=\"3\" name_counter=\"1\">\n  <class id=\"1\" na";
        assert!(matches!(parse_str(truncated), Err(Error::Parse { .. })));
        let nan = "<minuml format_version=\"1\" next_id=\"3\" name_counter=\"1\">\n<note id=\"1\" x=\"NaN\" y=\"0\" pinned=\"false\"/></minuml>";
        assert!(matches!(parse_str(nan), Err(Error::Parse { .. })));
    }

    #[test]
    fn prefs_defaults_and_overrides() {
        assert_eq!(load_prefs(None).prefs, Preferences::default());
        let d = Preferences::default();
        assert_eq!(d.code_language, CodegenTarget::Java);
        assert_eq!(d.page_size, PageSize::Letter);
        assert_eq!(d.orientation, Orientation::Portrait);

        let loaded = load_prefs(Some("code_language=cpp\n"));
        assert_eq!(loaded.prefs.code_language, CodegenTarget::Cpp);

        let loaded = load_prefs(Some(
            "page_size=a4\n!!garbage!!\norientation = landscape\ncode_language=cobol\n",
        ));
        assert_eq!(loaded.prefs.page_size, PageSize::A4);
        assert_eq!(loaded.prefs.orientation, Orientation::Landscape);
        assert_eq!(loaded.prefs.code_language, CodegenTarget::Java);
        assert_eq!(loaded.warnings.len(), 2);
    }

    #[test]
    fn prefs_round_trip() {
        let p = Preferences {
            code_language: CodegenTarget::Cpp,
            page_size: PageSize::A4,
            orientation: Orientation::Landscape,
        };
        let loaded = load_prefs(Some(&save_prefs(&p)));
        assert_eq!(loaded.prefs, p);
        assert!(loaded.warnings.is_empty());
    }
}
