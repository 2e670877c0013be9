//! Engine side of the editor session protocol.
//!
//! An editor front end holds no document state of its own. It sends one
//! request per user action and redraws from the response, which carries the
//! document snapshot, derived geometry, the selection and the history
//! depths. Messages are XML elements in the same vocabulary as `.muml`
//! files, framed as a decimal byte count, a newline, then the message
//! bytes. `docs/session-protocol.md` lists every message.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use crate::clipboard::{self, Payload, CODE_FLAVOR, IMAGE_FLAVOR, STRUCTURED_FLAVOR};
use crate::codegen::{self, CodegenTarget};
use crate::commands::{Command, CommandStack};
use crate::error::{Error, Result};
use crate::geometry::{self, Decoration, SpatialIndex, TextMetrics, Viewport};
use crate::model::{ConnectionKind, Document, Element, ElementId, Point, Rect, Vector};
use crate::persistence::{self, Preferences};
use crate::render::{self, svg, Frame, Orientation, PageIndex, PageSetup, PageSize, ViewState};
use crate::xml::{self, Node};

/// Frames larger than this are rejected before reading the body.
pub const MAX_FRAME_LEN: usize = 64 * 1024 * 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SelectMode {
    #[default]
    Replace,
    Add,
    Remove,
    Toggle,
}

impl SelectMode {
    pub fn name(self) -> &'static str {
        match self {
            SelectMode::Replace => "replace",
            SelectMode::Add => "add",
            SelectMode::Remove => "remove",
            SelectMode::Toggle => "toggle",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            SelectMode::Replace,
            SelectMode::Add,
            SelectMode::Remove,
            SelectMode::Toggle,
        ]
        .into_iter()
        .find(|m| m.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Request {
    /// Any document edit, including loading a whole document.
    Execute(Command),
    /// Pastes a structured clipboard flavor. With an anchor the content's
    /// top-left corner lands there; otherwise it is offset by (+16, +16).
    Paste {
        fragment: Document,
        anchor: Option<Point>,
    },
    Undo,
    Redo,
    Snapshot,
    /// Writes the document to `path`, or to the session's file when absent.
    /// A session with no file just returns the document.
    Save {
        path: Option<PathBuf>,
    },
    Select {
        ids: Vec<ElementId>,
        mode: SelectMode,
    },
    SelectRect {
        rect: Rect,
        mode: SelectMode,
    },
    HitTest {
        point: Point,
        tolerance: f64,
    },
    Copy,
    Cut,
    Render {
        hover: Option<ElementId>,
        notes_expanded_all: bool,
    },
    SetZoom(f64),
    Codegen(CodegenTarget),
    Pages {
        size: PageSize,
        orientation: Orientation,
        region: Option<Rect>,
        fit_one_page: bool,
    },
}

impl Request {
    pub fn op(&self) -> &'static str {
        match self {
            Request::Execute(cmd) => match cmd {
                Command::CreateClass { .. } => "create-class",
                Command::EditClass { .. } => "edit-class",
                Command::CreateConnection { .. } => "create-connection",
                Command::SetConnectionKind { .. } => "set-kind",
                Command::CreateNote { .. } => "create-note",
                Command::EditNote { .. } => "edit-note",
                Command::CreateGlyph { .. } => "create-glyph",
                Command::Translate { .. } => "translate",
                Command::Delete { .. } => "delete",
                Command::PasteInsert { .. } => "paste-insert",
                Command::LoadDocument { .. } => "load",
            },
            Request::Paste { .. } => "paste",
            Request::Undo => "undo",
            Request::Redo => "redo",
            Request::Snapshot => "snapshot",
            Request::Save { .. } => "save",
            Request::Select { .. } => "select",
            Request::SelectRect { .. } => "select-rect",
            Request::HitTest { .. } => "hit-test",
            Request::Copy => "copy",
            Request::Cut => "cut",
            Request::Render { .. } => "render",
            Request::SetZoom(_) => "set-zoom",
            Request::Codegen(_) => "codegen",
            Request::Pages { .. } => "pages",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Ok,
    Error { code: String, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    Class,
    Note,
    Glyph,
}

impl ShapeKind {
    fn name(self) -> &'static str {
        match self {
            ShapeKind::Class => "class",
            ShapeKind::Note => "note",
            ShapeKind::Glyph => "glyph",
        }
    }
}

/// Derived layout of one element, so the front end never recomputes it.
#[derive(Clone, Debug, PartialEq)]
pub enum ElementGeometry {
    /// Resting bounds: notes are given as their icon unless pinned open.
    Shape {
        id: ElementId,
        kind: ShapeKind,
        bounds: Rect,
    },
    Route {
        id: ElementId,
        kind: ConnectionKind,
        source_anchor: Point,
        target_anchor: Point,
        label_anchor: Point,
        decoration: Decoration,
        label_at_rest: bool,
        degenerate: bool,
    },
}

impl ElementGeometry {
    pub fn id(&self) -> ElementId {
        match self {
            ElementGeometry::Shape { id, .. } | ElementGeometry::Route { id, .. } => *id,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanInfo {
    pub rows: usize,
    pub cols: usize,
    pub scale: f64,
    pub region: Rect,
    pub pages: Vec<(PageIndex, Rect)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Response {
    pub status: Status,
    pub created: Vec<ElementId>,
    pub undo_depth: usize,
    pub redo_depth: usize,
    pub selection: BTreeSet<ElementId>,
    pub zoom: f64,
    /// Present when the request changed the document or asked for it.
    pub document: Option<Document>,
    /// Present together with `document`.
    pub geometry: Vec<ElementGeometry>,
    /// Topmost element under a hit-test probe.
    pub hit: Option<ElementId>,
    pub clipboard: Option<Payload>,
    pub image: Option<String>,
    pub code: Option<String>,
    pub plan: Option<PlanInfo>,
}

/// One open document with its history, selection and view.
#[derive(Debug)]
pub struct Session {
    pub doc: Document,
    pub stack: CommandStack,
    pub selection: BTreeSet<ElementId>,
    pub viewport: Viewport,
    pub prefs: Preferences,
    pub metrics: TextMetrics,
    /// File the document was opened from or last saved to.
    pub path: Option<PathBuf>,
    index: SpatialIndex,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(Document::new(), Preferences::default())
    }
}

#[derive(Default)]
struct Extras {
    created: Vec<ElementId>,
    include_document: bool,
    hit: Option<ElementId>,
    clipboard: Option<Payload>,
    image: Option<String>,
    code: Option<String>,
    plan: Option<PlanInfo>,
}

impl Session {
    pub fn new(doc: Document, prefs: Preferences) -> Self {
        let metrics = TextMetrics::default();
        let index = SpatialIndex::build(&doc, &metrics);
        Session {
            doc,
            stack: CommandStack::new(),
            selection: BTreeSet::new(),
            viewport: Viewport::default(),
            prefs,
            metrics,
            path: None,
            index,
        }
    }

    pub fn handle(&mut self, req: Request) -> Response {
        let mut extras = Extras::default();
        let status = match self.apply(req, &mut extras) {
            Ok(()) => Status::Ok,
            Err(e) => Status::Error {
                code: e.code().to_owned(),
                message: e.to_string(),
            },
        };
        let (undo_depth, redo_depth) = self.stack.history_depth();
        let (document, geometry) = if extras.include_document {
            (Some(self.doc.clone()), geometry_of(&self.doc, &self.metrics))
        } else {
            (None, Vec::new())
        };
        Response {
            status,
            created: extras.created,
            undo_depth,
            redo_depth,
            selection: self.selection.clone(),
            zoom: self.viewport.zoom(),
            document,
            geometry,
            hit: extras.hit,
            clipboard: extras.clipboard,
            image: extras.image,
            code: extras.code,
            plan: extras.plan,
        }
    }

    /// Decodes one message, handles it and encodes the reply. Undecodable
    /// messages get an error response, carrying the request id when the
    /// root element is readable enough to show one.
    pub fn handle_message(&mut self, message: &[u8]) -> Vec<u8> {
        let reply = match decode_request(message) {
            Ok((id, req)) => encode_response(id, &self.handle(req)),
            Err(e) => {
                let mut resp = self.handle(Request::Snapshot);
                resp.status = Status::Error {
                    code: e.code().to_owned(),
                    message: e.to_string(),
                };
                resp.document = None;
                resp.geometry.clear();
                encode_response(recover_id(message), &resp)
            }
        };
        reply.into_bytes()
    }

    /// Serves framed requests until the reader is exhausted.
    pub fn serve(&mut self, input: &mut impl BufRead, output: &mut impl Write) -> Result<()> {
        while let Some(message) = read_frame(input)? {
            let reply = self.handle_message(&message);
            write_frame(output, &reply).map_err(|e| Error::Protocol(e.to_string()))?;
            output.flush().map_err(|e| Error::Protocol(e.to_string()))?;
        }
        Ok(())
    }

    fn changed(&mut self, extras: &mut Extras) {
        self.index.sync(&self.doc);
        self.selection.retain(|id| self.doc.contains(*id));
        extras.include_document = true;
    }

    fn apply(&mut self, req: Request, extras: &mut Extras) -> Result<()> {
        match req {
            Request::Execute(cmd) => {
                extras.created = self.stack.execute(&mut self.doc, cmd)?;
                self.changed(extras);
            }
            Request::Paste { fragment, anchor } => {
                let cmd = clipboard::fragment_command(fragment, anchor);
                extras.created = self.stack.execute(&mut self.doc, cmd)?;
                self.changed(extras);
                self.selection = extras.created.iter().copied().collect();
            }
            Request::Undo => {
                if self.stack.undo(&mut self.doc) {
                    self.changed(extras);
                }
            }
            Request::Redo => {
                if self.stack.redo(&mut self.doc) {
                    self.changed(extras);
                }
            }
            Request::Snapshot => extras.include_document = true,
            Request::Save { path } => {
                if let Some(p) = path.or_else(|| self.path.clone()) {
                    std::fs::write(&p, persistence::serialize(&self.doc))
                        .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                    self.path = Some(p);
                }
                extras.include_document = true;
            }
            Request::Select { ids, mode } => {
                if let Some(missing) = ids.iter().find(|id| !self.doc.contains(**id)) {
                    return Err(Error::IdMismatch(*missing));
                }
                self.select(ids, mode);
            }
            Request::SelectRect { rect, mode } => {
                let hits = self.index.rect_select(&rect);
                self.select(hits.into_iter().collect(), mode);
            }
            Request::HitTest { point, tolerance } => extras.hit = self.index.hit_test(point, tolerance),
            Request::Copy => {
                extras.clipboard = Some(clipboard::build_payload(&self.doc, &self.selection, &self.prefs)?);
            }
            Request::Cut => {
                let payload = clipboard::cut(&mut self.stack, &mut self.doc, &self.selection, &self.prefs)?;
                extras.clipboard = Some(payload);
                self.changed(extras);
            }
            Request::Render {
                hover,
                notes_expanded_all,
            } => {
                let view = ViewState {
                    selected: self.selection.clone(),
                    hover,
                    notes_expanded_all,
                };
                let scene = render::render_scene(&self.doc, &self.metrics, &view);
                extras.image = Some(svg::export_vector_string(&scene, &Frame::fit(&scene)));
            }
            Request::SetZoom(z) => {
                self.viewport.set_zoom(z);
            }
            Request::Codegen(target) => extras.code = Some(codegen::emit_document(&self.doc, target)),
            Request::Pages {
                size,
                orientation,
                region,
                fit_one_page,
            } => {
                let setup = PageSetup::new(size, orientation);
                let plan = render::paginate(&self.doc, &self.metrics, &setup, region, fit_one_page)?;
                extras.plan = Some(PlanInfo {
                    rows: plan.rows,
                    cols: plan.cols,
                    scale: plan.scale,
                    region: plan.region,
                    pages: plan.pages.iter().map(|p| (p.index, p.source)).collect(),
                });
            }
        }
        Ok(())
    }

    fn select(&mut self, ids: Vec<ElementId>, mode: SelectMode) {
        match mode {
            SelectMode::Replace => self.selection = ids.into_iter().collect(),
            SelectMode::Add => self.selection.extend(ids),
            SelectMode::Remove => {
                for id in ids {
                    self.selection.remove(&id);
                }
            }
            SelectMode::Toggle => {
                for id in ids {
                    if !self.selection.remove(&id) {
                        self.selection.insert(id);
                    }
                }
            }
        }
    }
}

pub fn geometry_of(doc: &Document, m: &TextMetrics) -> Vec<ElementGeometry> {
    doc.elements()
        .filter_map(|e| {
            let id = e.id();
            let kind = match e {
                Element::Connection(c) => {
                    let r = geometry::route_in(doc, c, m)?;
                    return Some(ElementGeometry::Route {
                        id,
                        kind: c.kind,
                        source_anchor: r.source_anchor,
                        target_anchor: r.target_anchor,
                        label_anchor: r.label_anchor,
                        decoration: r.decoration,
                        label_at_rest: r.label_at_rest,
                        degenerate: r.degenerate,
                    });
                }
                Element::Class(_) => ShapeKind::Class,
                Element::Note(_) => ShapeKind::Note,
                Element::Glyph(_) => ShapeKind::Glyph,
            };
            let bounds = geometry::element_bounds(doc, e, m)?;
            Some(ElementGeometry::Shape { id, kind, bounds })
        })
        .collect()
}

// Framing.

pub fn encode_frame(message: &[u8]) -> Vec<u8> {
    let mut out = format!("{}\n", message.len()).into_bytes();
    out.extend_from_slice(message);
    out
}

pub fn write_frame(w: &mut impl Write, message: &[u8]) -> std::io::Result<()> {
    w.write_all(&encode_frame(message))
}

/// Reads one frame. `Ok(None)` means the stream ended cleanly between frames.
pub fn read_frame(r: &mut impl BufRead) -> Result<Option<Vec<u8>>> {
    let io = |e: std::io::Error| Error::Protocol(e.to_string());
    let mut header = Vec::new();
    let n = r.read_until(b'\n', &mut header).map_err(io)?;
    if n == 0 {
        return Ok(None);
    }
    if header.pop() != Some(b'\n') {
        return Err(Error::Protocol("stream ended inside a frame header".into()));
    }
    let digits = std::str::from_utf8(&header)
        .ok()
        .filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()));
    let len: usize = digits
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Protocol(format!("bad frame header {:?}", String::from_utf8_lossy(&header))))?;
    if len > MAX_FRAME_LEN {
        return Err(Error::Protocol(format!("frame of {len} bytes exceeds the limit")));
    }
    let mut body = vec![0; len];
    r.read_exact(&mut body)
        .map_err(|_| Error::Protocol("stream ended inside a frame body".into()))?;
    Ok(Some(body))
}

// Message encoding.

fn num(v: f64) -> String {
    format!("{v}")
}

fn ids_attr<'a>(ids: impl IntoIterator<Item = &'a ElementId>) -> String {
    ids.into_iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn rect_attrs(r: &Rect) -> [(&'static str, String); 4] {
    [
        ("x", num(r.x)),
        ("y", num(r.y)),
        ("width", num(r.width)),
        ("height", num(r.height)),
    ]
}

fn decoration_name(d: Decoration) -> &'static str {
    match d {
        Decoration::None => "none",
        Decoration::OpenArrow => "open-arrow",
        Decoration::HollowDiamond => "hollow-diamond",
        Decoration::HollowTriangle => "hollow-triangle",
    }
}

fn decoration_from_name(s: &str) -> Option<Decoration> {
    [
        Decoration::None,
        Decoration::OpenArrow,
        Decoration::HollowDiamond,
        Decoration::HollowTriangle,
    ]
    .into_iter()
    .find(|d| decoration_name(*d) == s)
}

/// Writes `name` with `attrs`, optional child lines `body` (already
/// indented) and text content. Elements cannot carry both.
fn element(out: &mut String, indent: usize, name: &str, attrs: &[(&str, String)], body: &str, text: &str) {
    if body.is_empty() {
        xml::leaf(out, indent, name, attrs, text);
    } else {
        xml::open_tag(out, indent, name, attrs);
        out.push_str(">\n");
        out.push_str(body);
        out.extend(std::iter::repeat_n(' ', indent));
        out.push_str("</");
        out.push_str(name);
        out.push_str(">\n");
    }
}

pub fn encode_request(id: Option<u64>, req: &Request) -> String {
    let mut attrs: Vec<(&str, String)> = Vec::new();
    if let Some(id) = id {
        attrs.push(("id", id.to_string()));
    }
    attrs.push(("op", req.op().to_owned()));
    let mut body = String::new();
    let mut text = "";
    match req {
        Request::Execute(cmd) => match cmd {
            Command::CreateClass { origin, name } => {
                attrs.extend([("x", num(origin.x)), ("y", num(origin.y))]);
                if let Some(n) = name {
                    attrs.push(("name", n.clone()));
                }
            }
            Command::EditClass {
                id,
                name,
                is_interface,
                variables,
                methods,
            } => {
                attrs.extend([
                    ("target", id.to_string()),
                    ("name", name.clone()),
                    ("interface", is_interface.to_string()),
                ]);
                for (tag, lines) in [("variable", variables), ("method", methods)] {
                    for line in lines {
                        xml::open_tag(&mut body, 2, tag, &[]);
                        body.push('>');
                        xml::escape_text(line, &mut body);
                        body.push_str(&format!("</{tag}>\n"));
                    }
                }
            }
            Command::CreateConnection { source, target } => {
                attrs.extend([("source", source.to_string()), ("target", target.to_string())]);
            }
            Command::SetConnectionKind { id, kind } => {
                attrs.extend([("target", id.to_string()), ("kind", kind.name().to_owned())]);
            }
            Command::CreateNote { origin, text: t } => {
                attrs.extend([("x", num(origin.x)), ("y", num(origin.y))]);
                text = t;
            }
            Command::EditNote {
                id,
                text: t,
                pinned_open,
            } => {
                attrs.extend([("target", id.to_string()), ("pinned", pinned_open.to_string())]);
                text = t;
            }
            Command::CreateGlyph { points } => {
                for p in points {
                    xml::leaf(&mut body, 2, "point", &[("x", num(p.x)), ("y", num(p.y))], "");
                }
            }
            Command::Translate { ids, delta } => {
                attrs.extend([("ids", ids_attr(ids)), ("dx", num(delta.x)), ("dy", num(delta.y))]);
            }
            Command::Delete { ids } => attrs.push(("ids", ids_attr(ids))),
            Command::PasteInsert { fragment, offset } => {
                attrs.extend([("dx", num(offset.x)), ("dy", num(offset.y))]);
                persistence::write_document(&mut body, 2, fragment);
            }
            Command::LoadDocument { document } => persistence::write_document(&mut body, 2, document),
        },
        Request::Paste { fragment, anchor } => {
            if let Some(a) = anchor {
                attrs.extend([("x", num(a.x)), ("y", num(a.y))]);
            }
            persistence::write_document(&mut body, 2, fragment);
        }
        Request::Undo | Request::Redo | Request::Snapshot | Request::Copy | Request::Cut => {}
        Request::Save { path } => {
            if let Some(p) = path {
                attrs.push(("path", p.to_string_lossy().into_owned()));
            }
        }
        Request::Select { ids, mode } => attrs.extend([("ids", ids_attr(ids)), ("mode", mode.name().to_owned())]),
        Request::SelectRect { rect, mode } => {
            attrs.extend(rect_attrs(rect));
            attrs.push(("mode", mode.name().to_owned()));
        }
        Request::HitTest { point, tolerance } => {
            attrs.extend([("x", num(point.x)), ("y", num(point.y)), ("tolerance", num(*tolerance))]);
        }
        Request::Render {
            hover,
            notes_expanded_all,
        } => {
            if let Some(h) = hover {
                attrs.push(("hover", h.to_string()));
            }
            attrs.push(("expand-notes", notes_expanded_all.to_string()));
        }
        Request::SetZoom(z) => attrs.push(("value", num(*z))),
        Request::Codegen(t) => attrs.push(("language", t.name().to_owned())),
        Request::Pages {
            size,
            orientation,
            region,
            fit_one_page,
        } => {
            attrs.extend([
                ("page-size", size.name().to_owned()),
                ("orientation", orientation.name().to_owned()),
                ("fit", fit_one_page.to_string()),
            ]);
            if let Some(r) = region {
                attrs.extend(rect_attrs(r));
            }
        }
    }
    let mut out = String::new();
    element(&mut out, 0, "request", &attrs, &body, text);
    out
}

fn parse_root(message: &[u8], expected: &str) -> Result<Node> {
    let text = std::str::from_utf8(message).map_err(|_| Error::Protocol("message is not valid UTF-8".into()))?;
    let root = xml::parse(text)?;
    if root.name != expected {
        return Err(root.error(format!("expected <{expected}>, found <{}>", root.name)));
    }
    Ok(root)
}

fn recover_id(message: &[u8]) -> Option<u64> {
    parse_root(message, "request")
        .ok()
        .and_then(|n| message_id(&n).ok().flatten())
}

fn message_id(node: &Node) -> Result<Option<u64>> {
    node.attr("id").map(|_| node.parsed("id")).transpose()
}

fn ids_from(node: &Node, key: &str) -> Result<Vec<ElementId>> {
    let raw = node.required(key)?;
    raw.split_whitespace()
        .map(|s| match s.parse::<u64>() {
            Ok(v) if v > 0 => Ok(ElementId(v)),
            _ => Err(node.error(format!("`{key}` holds a bad id {s:?}"))),
        })
        .collect()
}

fn id_from(node: &Node, key: &str) -> Result<ElementId> {
    match node.parsed::<u64>(key)? {
        0 => Err(node.error(format!("`{key}` must be a positive id"))),
        v => Ok(ElementId(v)),
    }
}

fn point_from(node: &Node, x: &str, y: &str) -> Result<Point> {
    Ok(Point::new(node.coord(x)?, node.coord(y)?))
}

fn rect_from(node: &Node) -> Result<Rect> {
    Ok(Rect {
        x: node.coord("x")?,
        y: node.coord("y")?,
        width: node.coord("width")?,
        height: node.coord("height")?,
    })
}

fn embedded_document(node: &Node) -> Result<Document> {
    match node.children.as_slice() {
        [doc] => persistence::document_from_node(doc),
        _ => Err(node.error("expected exactly one <minuml> element")),
    }
}

fn mode_from(node: &Node) -> Result<SelectMode> {
    match node.attr("mode") {
        None => Ok(SelectMode::Replace),
        Some(m) => SelectMode::from_name(m).ok_or_else(|| node.error(format!("unknown selection mode {m:?}"))),
    }
}

fn allow(node: &Node, keys: &[&str]) -> Result<()> {
    let mut all = vec!["id", "op"];
    all.extend_from_slice(keys);
    node.expect_attrs(&all)
}

pub fn decode_request(message: &[u8]) -> Result<(Option<u64>, Request)> {
    let node = parse_root(message, "request")?;
    let id = message_id(&node)?;
    let op = node.required("op")?;
    let n = &node;
    let req = match op {
        "create-class" => {
            allow(n, &["x", "y", "name"])?;
            Request::Execute(Command::CreateClass {
                origin: point_from(n, "x", "y")?,
                name: n.attr("name").map(str::to_owned),
            })
        }
        "edit-class" => {
            allow(n, &["target", "name", "interface"])?;
            let (mut variables, mut methods) = (Vec::new(), Vec::new());
            for child in &n.children {
                match child.name.as_str() {
                    "variable" => variables.push(child.text.clone()),
                    "method" => methods.push(child.text.clone()),
                    other => return Err(child.error(format!("unknown class member <{other}>"))),
                }
            }
            Request::Execute(Command::EditClass {
                id: id_from(n, "target")?,
                name: n.required("name")?.to_owned(),
                is_interface: n.flag("interface")?,
                variables,
                methods,
            })
        }
        "create-connection" => {
            allow(n, &["source", "target"])?;
            Request::Execute(Command::CreateConnection {
                source: id_from(n, "source")?,
                target: id_from(n, "target")?,
            })
        }
        "set-kind" => {
            allow(n, &["target", "kind"])?;
            let kind = n.required("kind")?;
            Request::Execute(Command::SetConnectionKind {
                id: id_from(n, "target")?,
                kind: ConnectionKind::from_name(kind)
                    .ok_or_else(|| n.error(format!("unknown connection kind {kind:?}")))?,
            })
        }
        "create-note" => {
            allow(n, &["x", "y"])?;
            Request::Execute(Command::CreateNote {
                origin: point_from(n, "x", "y")?,
                text: n.text.clone(),
            })
        }
        "edit-note" => {
            allow(n, &["target", "pinned"])?;
            Request::Execute(Command::EditNote {
                id: id_from(n, "target")?,
                text: n.text.clone(),
                pinned_open: n.flag("pinned")?,
            })
        }
        "create-glyph" => {
            allow(n, &[])?;
            let points = n
                .children
                .iter()
                .map(|c| {
                    if c.name != "point" {
                        return Err(c.error(format!("unknown glyph member <{}>", c.name)));
                    }
                    point_from(c, "x", "y")
                })
                .collect::<Result<_>>()?;
            Request::Execute(Command::CreateGlyph { points })
        }
        "translate" => {
            allow(n, &["ids", "dx", "dy"])?;
            Request::Execute(Command::Translate {
                ids: ids_from(n, "ids")?,
                delta: Vector::new(n.coord("dx")?, n.coord("dy")?),
            })
        }
        "delete" => {
            allow(n, &["ids"])?;
            Request::Execute(Command::Delete {
                ids: ids_from(n, "ids")?,
            })
        }
        "paste-insert" => {
            allow(n, &["dx", "dy"])?;
            Request::Execute(Command::PasteInsert {
                fragment: embedded_document(n)?,
                offset: Vector::new(n.coord("dx")?, n.coord("dy")?),
            })
        }
        "load" => {
            allow(n, &[])?;
            let document = embedded_document(n)?;
            if let Some(v) = document.violations().first() {
                return Err(Error::Integrity(v.to_string()));
            }
            Request::Execute(Command::LoadDocument { document })
        }
        "paste" => {
            allow(n, &["x", "y"])?;
            let anchor = match (n.attr("x"), n.attr("y")) {
                (None, None) => None,
                _ => Some(point_from(n, "x", "y")?),
            };
            Request::Paste {
                fragment: embedded_document(n)?,
                anchor,
            }
        }
        "undo" | "redo" | "snapshot" | "copy" | "cut" => {
            allow(n, &[])?;
            match op {
                "undo" => Request::Undo,
                "redo" => Request::Redo,
                "snapshot" => Request::Snapshot,
                "copy" => Request::Copy,
                _ => Request::Cut,
            }
        }
        "save" => {
            allow(n, &["path"])?;
            Request::Save {
                path: n.attr("path").map(PathBuf::from),
            }
        }
        "select" => {
            allow(n, &["ids", "mode"])?;
            Request::Select {
                ids: ids_from(n, "ids")?,
                mode: mode_from(n)?,
            }
        }
        "select-rect" => {
            allow(n, &["x", "y", "width", "height", "mode"])?;
            Request::SelectRect {
                rect: rect_from(n)?,
                mode: mode_from(n)?,
            }
        }
        "hit-test" => {
            allow(n, &["x", "y", "tolerance"])?;
            Request::HitTest {
                point: point_from(n, "x", "y")?,
                tolerance: match n.attr("tolerance") {
                    Some(_) => n.coord("tolerance")?,
                    None => geometry::DEFAULT_HIT_TOLERANCE,
                },
            }
        }
        "render" => {
            allow(n, &["hover", "expand-notes"])?;
            Request::Render {
                hover: n.attr("hover").map(|_| id_from(n, "hover")).transpose()?,
                notes_expanded_all: match n.attr("expand-notes") {
                    Some(_) => n.flag("expand-notes")?,
                    None => false,
                },
            }
        }
        "set-zoom" => {
            allow(n, &["value"])?;
            Request::SetZoom(n.coord("value")?)
        }
        "codegen" => {
            allow(n, &["language"])?;
            let lang = n.required("language")?;
            Request::Codegen(
                CodegenTarget::from_name(lang).ok_or_else(|| n.error(format!("unknown language {lang:?}")))?,
            )
        }
        "pages" => {
            allow(n, &["page-size", "orientation", "fit", "x", "y", "width", "height"])?;
            let size = match n.attr("page-size") {
                Some(s) => PageSize::from_name(s).ok_or_else(|| n.error(format!("unknown page size {s:?}")))?,
                None => PageSize::default(),
            };
            let orientation = match n.attr("orientation") {
                Some(s) => Orientation::from_name(s).ok_or_else(|| n.error(format!("unknown orientation {s:?}")))?,
                None => Orientation::default(),
            };
            let region = match n.attr("x") {
                Some(_) => Some(rect_from(n)?),
                None => None,
            };
            Request::Pages {
                size,
                orientation,
                region,
                fit_one_page: match n.attr("fit") {
                    Some(_) => n.flag("fit")?,
                    None => false,
                },
            }
        }
        other => return Err(Error::Protocol(format!("unknown op {other:?}"))),
    };
    Ok((id, req))
}

pub fn encode_response(id: Option<u64>, resp: &Response) -> String {
    let mut attrs: Vec<(&str, String)> = Vec::new();
    if let Some(id) = id {
        attrs.push(("id", id.to_string()));
    }
    let mut error_text = String::new();
    match &resp.status {
        Status::Ok => attrs.push(("status", "ok".into())),
        Status::Error { code, message } => {
            attrs.extend([("status", "error".into()), ("error", code.clone())]);
            error_text = message.clone();
        }
    }
    attrs.extend([
        ("created", ids_attr(&resp.created)),
        ("undo", resp.undo_depth.to_string()),
        ("redo", resp.redo_depth.to_string()),
        ("selection", ids_attr(&resp.selection)),
        ("zoom", num(resp.zoom)),
    ]);
    if let Some(h) = resp.hit {
        attrs.push(("hit", h.to_string()));
    }
    let mut body = String::new();
    if !error_text.is_empty() {
        xml::leaf(&mut body, 2, "message", &[], &error_text);
    }
    if let Some(doc) = &resp.document {
        persistence::write_document(&mut body, 2, doc);
        let mut geo = String::new();
        for g in &resp.geometry {
            match g {
                ElementGeometry::Shape { id, kind, bounds } => {
                    let mut a = vec![("id", id.to_string()), ("kind", kind.name().to_owned())];
                    a.extend(rect_attrs(bounds));
                    xml::leaf(&mut geo, 4, "shape", &a, "");
                }
                ElementGeometry::Route {
                    id,
                    kind,
                    source_anchor: s,
                    target_anchor: t,
                    label_anchor: l,
                    decoration,
                    label_at_rest,
                    degenerate,
                } => xml::leaf(
                    &mut geo,
                    4,
                    "route",
                    &[
                        ("id", id.to_string()),
                        ("kind", kind.name().to_owned()),
                        ("sx", num(s.x)),
                        ("sy", num(s.y)),
                        ("tx", num(t.x)),
                        ("ty", num(t.y)),
                        ("lx", num(l.x)),
                        ("ly", num(l.y)),
                        ("decoration", decoration_name(*decoration).to_owned()),
                        ("label-at-rest", label_at_rest.to_string()),
                        ("degenerate", degenerate.to_string()),
                    ],
                    "",
                ),
            }
        }
        element(&mut body, 2, "geometry", &[], &geo, "");
    }
    if let Some(p) = &resp.clipboard {
        let mut flavors = String::new();
        for mime in p.flavors() {
            let bytes = p.flavor(mime).unwrap_or_default();
            let text = String::from_utf8_lossy(bytes);
            xml::leaf(&mut flavors, 4, "flavor", &[("type", mime.to_owned())], &text);
        }
        element(&mut body, 2, "clipboard", &[], &flavors, "");
    }
    if let Some(svg) = &resp.image {
        xml::leaf(&mut body, 2, "image", &[("type", IMAGE_FLAVOR.to_owned())], svg);
    }
    if let Some(code) = &resp.code {
        xml::leaf(&mut body, 2, "code", &[], code);
    }
    if let Some(plan) = &resp.plan {
        let mut pages = String::new();
        for (idx, r) in &plan.pages {
            let mut a = vec![("row", idx.row.to_string()), ("col", idx.col.to_string())];
            a.extend(rect_attrs(r));
            xml::leaf(&mut pages, 4, "page", &a, "");
        }
        let mut a = vec![
            ("rows", plan.rows.to_string()),
            ("cols", plan.cols.to_string()),
            ("scale", num(plan.scale)),
        ];
        a.extend(rect_attrs(&plan.region));
        element(&mut body, 2, "plan", &a, &pages, "");
    }
    let mut out = String::new();
    element(&mut out, 0, "response", &attrs, &body, "");
    out
}

pub fn decode_response(message: &[u8]) -> Result<(Option<u64>, Response)> {
    let node = parse_root(message, "response")?;
    let id = message_id(&node)?;
    let optional_ids = |key: &str| -> Result<Vec<ElementId>> {
        match node.attr(key) {
            Some(_) => ids_from(&node, key),
            None => Ok(Vec::new()),
        }
    };
    let mut resp = Response {
        status: Status::Ok,
        created: optional_ids("created")?,
        undo_depth: node.parsed("undo")?,
        redo_depth: node.parsed("redo")?,
        selection: optional_ids("selection")?.into_iter().collect(),
        zoom: node.coord("zoom")?,
        document: None,
        geometry: Vec::new(),
        hit: node.attr("hit").map(|_| id_from(&node, "hit")).transpose()?,
        clipboard: None,
        image: None,
        code: None,
        plan: None,
    };
    let mut message = String::new();
    for child in &node.children {
        match child.name.as_str() {
            "message" => message = child.text.clone(),
            "minuml" => resp.document = Some(persistence::document_from_node(child)?),
            "geometry" => {
                for g in &child.children {
                    resp.geometry.push(geometry_from(g)?);
                }
            }
            "clipboard" => {
                let mut payload = Payload {
                    structured: Vec::new(),
                    code_text: None,
                    vector_image: None,
                };
                for f in &child.children {
                    let bytes = f.text.clone().into_bytes();
                    match f.required("type")? {
                        STRUCTURED_FLAVOR => payload.structured = bytes,
                        CODE_FLAVOR => payload.code_text = Some(f.text.clone()),
                        IMAGE_FLAVOR => payload.vector_image = Some(bytes),
                        other => return Err(f.error(format!("unknown flavor {other:?}"))),
                    }
                }
                resp.clipboard = Some(payload);
            }
            "image" => resp.image = Some(child.text.clone()),
            "code" => resp.code = Some(child.text.clone()),
            "plan" => {
                let pages = child
                    .children
                    .iter()
                    .map(|p| {
                        Ok((
                            PageIndex {
                                row: p.parsed("row")?,
                                col: p.parsed("col")?,
                            },
                            rect_from(p)?,
                        ))
                    })
                    .collect::<Result<_>>()?;
                resp.plan = Some(PlanInfo {
                    rows: child.parsed("rows")?,
                    cols: child.parsed("cols")?,
                    scale: child.coord("scale")?,
                    region: rect_from(child)?,
                    pages,
                });
            }
            other => return Err(child.error(format!("unknown response part <{other}>"))),
        }
    }
    match node.required("status")? {
        "ok" => {}
        "error" => {
            resp.status = Status::Error {
                code: node.required("error")?.to_owned(),
                message,
            }
        }
        other => return Err(node.error(format!("unknown status {other:?}"))),
    }
    Ok((id, resp))
}

fn geometry_from(g: &Node) -> Result<ElementGeometry> {
    let id = id_from(g, "id")?;
    match g.name.as_str() {
        "shape" => {
            let kind = match g.required("kind")? {
                "class" => ShapeKind::Class,
                "note" => ShapeKind::Note,
                "glyph" => ShapeKind::Glyph,
                other => return Err(g.error(format!("unknown shape kind {other:?}"))),
            };
            Ok(ElementGeometry::Shape {
                id,
                kind,
                bounds: rect_from(g)?,
            })
        }
        "route" => {
            let kind = g.required("kind")?;
            let decoration = g.required("decoration")?;
            Ok(ElementGeometry::Route {
                id,
                kind: ConnectionKind::from_name(kind).ok_or_else(|| g.error(format!("unknown kind {kind:?}")))?,
                source_anchor: point_from(g, "sx", "sy")?,
                target_anchor: point_from(g, "tx", "ty")?,
                label_anchor: point_from(g, "lx", "ly")?,
                decoration: decoration_from_name(decoration)
                    .ok_or_else(|| g.error(format!("unknown decoration {decoration:?}")))?,
                label_at_rest: g.flag("label-at-rest")?,
                degenerate: g.flag("degenerate")?,
            })
        }
        other => Err(g.error(format!("unknown geometry <{other}>"))),
    }
}
