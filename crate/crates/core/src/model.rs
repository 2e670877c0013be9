//! Document data model.
//!
//! A [`Document`] is an id-keyed store of classes, connections, sticky notes
//! and glyphs. Ids are allocated from a monotone counter and never reused, and
//! every connection must join two distinct live classes. Deleting a class
//! takes its incident connections with it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// Identifier of an element, unique within its document. Zero is never allocated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u64);

impl ElementId {
    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A position in world units (y grows downward).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Displacements share the point representation.
pub type Vector = Point;

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn offset(self, d: Vector) -> Point {
        Point::new(self.x + d.x, self.y + d.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Vector;

    fn sub(self, other: Point) -> Vector {
        Point::new(self.x - other.x, self.y - other.y)
    }
}

/// Axis-aligned rectangle; width and height are never negative.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    /// Builds a rectangle from origin and size, normalizing negative extents.
    pub fn new(x: f64, y: f64, width: f64, height: f64) -> Self {
        let (x, width) = if width < 0.0 { (x + width, -width) } else { (x, width) };
        let (y, height) = if height < 0.0 {
            (y + height, -height)
        } else {
            (y, height)
        };
        Rect { x, y, width, height }
    }

    pub fn from_corners(a: Point, b: Point) -> Self {
        Rect {
            x: a.x.min(b.x),
            y: a.y.min(b.y),
            width: (a.x - b.x).abs(),
            height: (a.y - b.y).abs(),
        }
    }

    pub fn right(&self) -> f64 {
        self.x + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.height
    }

    pub fn center(&self) -> Point {
        Point::new(self.x + self.width / 2.0, self.y + self.height / 2.0)
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    /// Inclusive containment: points on the border are inside.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x && p.x <= self.right() && p.y >= self.y && p.y <= self.bottom()
    }

    /// Touching rectangles intersect.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.x <= other.right() && other.x <= self.right() && self.y <= other.bottom() && other.y <= self.bottom()
    }

    /// True when the interiors overlap (shared edges do not count).
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x < other.right() && other.x < self.right() && self.y < other.bottom() && other.y < self.bottom()
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect::from_corners(
            Point::new(self.x.min(other.x), self.y.min(other.y)),
            Point::new(self.right().max(other.right()), self.bottom().max(other.bottom())),
        )
    }

    pub fn inflate(&self, by: f64) -> Rect {
        Rect {
            x: self.x - by,
            y: self.y - by,
            width: (self.width + 2.0 * by).max(0.0),
            height: (self.height + 2.0 * by).max(0.0),
        }
    }

    pub fn translate(&self, d: Vector) -> Rect {
        Rect {
            x: self.x + d.x,
            y: self.y + d.y,
            ..*self
        }
    }

    /// Bounding box of a non-empty point sequence.
    pub fn bounding(points: &[Point]) -> Option<Rect> {
        let first = *points.first()?;
        let (mut lo, mut hi) = (first, first);
        for p in &points[1..] {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        Some(Rect::from_corners(lo, hi))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassBox {
    pub id: ElementId,
    pub name: String,
    pub is_interface: bool,
    pub variables: Vec<String>,
    pub methods: Vec<String>,
    /// Top-left corner.
    pub origin: Point,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum ConnectionKind {
    #[default]
    Generic,
    Association,
    Aggregation,
    Inheritance,
}

impl ConnectionKind {
    pub const ALL: [ConnectionKind; 4] = [
        ConnectionKind::Generic,
        ConnectionKind::Association,
        ConnectionKind::Aggregation,
        ConnectionKind::Inheritance,
    ];

    /// Lowercase name, used both as the diagram label and in files.
    pub fn name(self) -> &'static str {
        match self {
            ConnectionKind::Generic => "generic",
            ConnectionKind::Association => "association",
            ConnectionKind::Aggregation => "aggregation",
            ConnectionKind::Inheritance => "inheritance",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        ConnectionKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Directed edge between two classes. Its geometry is always derived.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    pub id: ElementId,
    pub source: ElementId,
    pub target: ElementId,
    pub kind: ConnectionKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StickyNote {
    pub id: ElementId,
    pub origin: Point,
    pub text: String,
    /// Show expanded even when not selected or hovered.
    pub pinned_open: bool,
}

/// Freehand stroke. Only ever moved as a whole; its points are never edited.
#[derive(Clone, Debug, PartialEq)]
pub struct Glyph {
    pub id: ElementId,
    points: Vec<Point>,
}

impl Glyph {
    pub fn new(id: ElementId, points: Vec<Point>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints(points.len()));
        }
        Ok(Glyph { id, points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    fn translate(&mut self, d: Vector) {
        for p in &mut self.points {
            *p = p.offset(d);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Class(ClassBox),
    Connection(Connection),
    Note(StickyNote),
    Glyph(Glyph),
}

impl Element {
    pub fn id(&self) -> ElementId {
        match self {
            Element::Class(c) => c.id,
            Element::Connection(c) => c.id,
            Element::Note(n) => n.id,
            Element::Glyph(g) => g.id,
        }
    }

    pub(crate) fn set_id(&mut self, id: ElementId) {
        match self {
            Element::Class(c) => c.id = id,
            Element::Connection(c) => c.id = id,
            Element::Note(n) => n.id = id,
            Element::Glyph(g) => g.id = id,
        }
    }

    pub fn as_class(&self) -> Option<&ClassBox> {
        match self {
            Element::Class(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_connection(&self) -> Option<&Connection> {
        match self {
            Element::Connection(c) => Some(c),
            _ => None,
        }
    }

    /// Rigid translation. Connections have no position of their own.
    pub(crate) fn translate(&mut self, d: Vector) {
        match self {
            Element::Class(c) => c.origin = c.origin.offset(d),
            Element::Note(n) => n.origin = n.origin.offset(d),
            Element::Glyph(g) => g.translate(d),
            Element::Connection(_) => {}
        }
    }
}

/// Everything removed by one [`Document::delete_elements`] call, ordered by id.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct DeletionRecord {
    pub removed: Vec<Element>,
}

impl DeletionRecord {
    pub fn ids(&self) -> BTreeSet<ElementId> {
        self.removed.iter().map(Element::id).collect()
    }
}

/// A broken model invariant, as reported by [`Document::violations`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    DanglingEndpoint { connection: ElementId, endpoint: ElementId },
    SelfLoop { connection: ElementId },
    ReservedId,
    IdCounterBehind { next_id: u64, max_id: u64 },
    EmptyClassName { class: ElementId },
    ShortGlyph { glyph: ElementId, points: usize },
    NameCounterZero,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DanglingEndpoint { connection, endpoint } => write!(
                f,
                "connection {connection}: endpoint {endpoint} does not resolve to a class"
            ),
            Violation::SelfLoop { connection } => {
                write!(f, "connection {connection}: source and target are the same class")
            }
            Violation::ReservedId => write!(f, "element uses reserved id 0"),
            Violation::IdCounterBehind { next_id, max_id } => {
                write!(f, "next_id {next_id} is not above the largest id {max_id}")
            }
            Violation::EmptyClassName { class } => write!(f, "class {class}: empty name"),
            Violation::ShortGlyph { glyph, points } => {
                write!(f, "glyph {glyph}: {points} point(s), at least 2 required")
            }
            Violation::NameCounterZero => write!(f, "name_counter must be positive"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    elements: BTreeMap<ElementId, Element>,
    next_id: u64,
    name_counter: u64,
}

impl Default for Document {
    fn default() -> Self {
        Document::new()
    }
}

impl Document {
    pub fn new() -> Self {
        Document {
            elements: BTreeMap::new(),
            next_id: 1,
            name_counter: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn name_counter(&self) -> u64 {
        self.name_counter
    }

    /// Elements in id order, which is also creation and z order.
    pub fn elements(&self) -> impl Iterator<Item = &Element> + '_ {
        self.elements.values()
    }

    pub fn get(&self, id: ElementId) -> Option<&Element> {
        self.elements.get(&id)
    }

    pub fn contains(&self, id: ElementId) -> bool {
        self.elements.contains_key(&id)
    }

    pub fn class(&self, id: ElementId) -> Option<&ClassBox> {
        self.get(id).and_then(Element::as_class)
    }

    pub fn connection(&self, id: ElementId) -> Option<&Connection> {
        self.get(id).and_then(Element::as_connection)
    }

    pub fn note(&self, id: ElementId) -> Option<&StickyNote> {
        match self.get(id)? {
            Element::Note(n) => Some(n),
            _ => None,
        }
    }

    pub fn glyph(&self, id: ElementId) -> Option<&Glyph> {
        match self.get(id)? {
            Element::Glyph(g) => Some(g),
            _ => None,
        }
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassBox> + '_ {
        self.elements().filter_map(Element::as_class)
    }

    pub fn connections(&self) -> impl Iterator<Item = &Connection> + '_ {
        self.elements().filter_map(Element::as_connection)
    }

    /// Connections with `id` as source or target, in id order.
    pub fn incident_connections(&self, id: ElementId) -> impl Iterator<Item = &Connection> + '_ {
        self.connections().filter(move |c| c.source == id || c.target == id)
    }

    fn allocate_id(&mut self) -> ElementId {
        let id = ElementId(self.next_id);
        self.next_id += 1;
        id
    }

    fn default_name(&mut self) -> String {
        let name = format!("Class{}", self.name_counter);
        self.name_counter += 1;
        name
    }

    pub fn create_class(&mut self, origin: Point, name: Option<&str>) -> ElementId {
        let name = match name {
            Some(n) if !n.is_empty() => n.to_owned(),
            _ => self.default_name(),
        };
        let id = self.allocate_id();
        self.elements.insert(
            id,
            Element::Class(ClassBox {
                id,
                name,
                is_interface: false,
                variables: Vec::new(),
                methods: Vec::new(),
                origin,
            }),
        );
        id
    }

    pub fn edit_class(
        &mut self,
        id: ElementId,
        name: &str,
        is_interface: bool,
        variables: Vec<String>,
        methods: Vec<String>,
    ) -> Result<()> {
        if self.class(id).is_none() {
            return Err(Error::IdMismatch(id));
        }
        let name = if name.is_empty() {
            self.default_name()
        } else {
            name.to_owned()
        };
        if let Some(Element::Class(c)) = self.elements.get_mut(&id) {
            c.name = name;
            c.is_interface = is_interface;
            c.variables = variables;
            c.methods = methods;
        }
        Ok(())
    }

    pub fn create_connection(&mut self, source: ElementId, target: ElementId) -> Result<ElementId> {
        for end in [source, target] {
            if self.class(end).is_none() {
                return Err(Error::DanglingEndpoint(end));
            }
        }
        if source == target {
            return Err(Error::SelfLoopRejected(source));
        }
        let id = self.allocate_id();
        self.elements.insert(
            id,
            Element::Connection(Connection {
                id,
                source,
                target,
                kind: ConnectionKind::Generic,
            }),
        );
        Ok(id)
    }

    pub fn set_connection_kind(&mut self, id: ElementId, kind: ConnectionKind) -> Result<()> {
        match self.elements.get_mut(&id) {
            Some(Element::Connection(c)) => {
                c.kind = kind;
                Ok(())
            }
            _ => Err(Error::IdMismatch(id)),
        }
    }

    pub fn create_note(&mut self, origin: Point, text: &str) -> ElementId {
        let id = self.allocate_id();
        self.elements.insert(
            id,
            Element::Note(StickyNote {
                id,
                origin,
                text: text.to_owned(),
                pinned_open: false,
            }),
        );
        id
    }

    pub fn edit_note(&mut self, id: ElementId, text: &str, pinned_open: bool) -> Result<()> {
        match self.elements.get_mut(&id) {
            Some(Element::Note(n)) => {
                n.text = text.to_owned();
                n.pinned_open = pinned_open;
                Ok(())
            }
            _ => Err(Error::IdMismatch(id)),
        }
    }

    pub fn create_glyph(&mut self, points: Vec<Point>) -> Result<ElementId> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints(points.len()));
        }
        let id = self.allocate_id();
        self.elements.insert(id, Element::Glyph(Glyph::new(id, points)?));
        Ok(id)
    }

    /// Shifts classes, notes and glyphs by `delta`. Connection ids are
    /// accepted and ignored since their geometry follows their classes.
    /// Fails without changing anything if any id is unknown.
    pub fn translate_elements(&mut self, ids: impl IntoIterator<Item = ElementId>, delta: Vector) -> Result<()> {
        let ids: BTreeSet<ElementId> = ids.into_iter().collect();
        if let Some(&missing) = ids.iter().find(|id| !self.contains(**id)) {
            return Err(Error::IdMismatch(missing));
        }
        for id in ids {
            if let Some(e) = self.elements.get_mut(&id) {
                e.translate(delta);
            }
        }
        Ok(())
    }

    /// Removes `ids` plus every connection incident to a removed class.
    /// Fails without changing anything if any id is unknown.
    pub fn delete_elements(&mut self, ids: impl IntoIterator<Item = ElementId>) -> Result<DeletionRecord> {
        let mut doomed: BTreeSet<ElementId> = ids.into_iter().collect();
        if let Some(&missing) = doomed.iter().find(|id| !self.contains(**id)) {
            return Err(Error::IdMismatch(missing));
        }
        let cascade: Vec<ElementId> = self
            .connections()
            .filter(|c| {
                [c.source, c.target]
                    .iter()
                    .any(|end| doomed.contains(end) && self.class(*end).is_some())
            })
            .map(|c| c.id)
            .collect();
        doomed.extend(cascade);
        let removed = doomed.into_iter().filter_map(|id| self.elements.remove(&id)).collect();
        Ok(DeletionRecord { removed })
    }

    /// Every broken invariant, in a stable order. Empty for a healthy document.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.name_counter == 0 {
            out.push(Violation::NameCounterZero);
        }
        if self.elements.contains_key(&ElementId(0)) {
            out.push(Violation::ReservedId);
        }
        if let Some(max) = self.elements.keys().next_back() {
            if self.next_id <= max.0 {
                out.push(Violation::IdCounterBehind {
                    next_id: self.next_id,
                    max_id: max.0,
                });
            }
        }
        for e in self.elements() {
            match e {
                Element::Class(c) if c.name.is_empty() => out.push(Violation::EmptyClassName { class: c.id }),
                Element::Connection(c) => {
                    for end in [c.source, c.target] {
                        if self.class(end).is_none() {
                            out.push(Violation::DanglingEndpoint {
                                connection: c.id,
                                endpoint: end,
                            });
                        }
                    }
                    if c.source == c.target {
                        out.push(Violation::SelfLoop { connection: c.id });
                    }
                }
                Element::Glyph(g) if g.points.len() < 2 => out.push(Violation::ShortGlyph {
                    glyph: g.id,
                    points: g.points.len(),
                }),
                _ => {}
            }
        }
        out
    }

    // Raw access for the command engine, the file reader and paste. These
    // bypass validation; callers restore invariants themselves.

    pub(crate) fn from_parts(elements: Vec<Element>, next_id: u64, name_counter: u64) -> Self {
        Document {
            elements: elements.into_iter().map(|e| (e.id(), e)).collect(),
            next_id,
            name_counter,
        }
    }

    pub(crate) fn counters(&self) -> (u64, u64) {
        (self.next_id, self.name_counter)
    }

    pub(crate) fn set_counters(&mut self, (next_id, name_counter): (u64, u64)) {
        self.next_id = next_id;
        self.name_counter = name_counter;
    }

    pub(crate) fn put(&mut self, element: Element) {
        self.elements.insert(element.id(), element);
    }

    pub(crate) fn take(&mut self, id: ElementId) -> Option<Element> {
        self.elements.remove(&id)
    }

    /// Inserts a copy of `element` under a freshly allocated id.
    pub(crate) fn insert_fresh(&mut self, mut element: Element) -> ElementId {
        let id = self.allocate_id();
        element.set_id(id);
        self.elements.insert(id, element);
        id
    }
}
