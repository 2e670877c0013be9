//! Java and C++ skeleton generation.
//!
//! Member lines are free text. [`parse_member`] recognises the common
//! informal styles (`name : Type`, `Type name`, a bare `name`, and
//! `name(params) : Ret` / `Ret name(params)` for methods). Anything else is
//! carried through as a comment next to a placeholder member, so generation
//! never fails on member text.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::LazyLock;

use regex::Regex;

use crate::error::{Error, Result};
use crate::model::{ClassBox, Connection, ConnectionKind, Document, ElementId};
use crate::persistence::Preferences;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum CodegenTarget {
    #[default]
    Java,
    Cpp,
}

impl CodegenTarget {
    pub fn name(self) -> &'static str {
        match self {
            CodegenTarget::Java => "java",
            CodegenTarget::Cpp => "cpp",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "java" => Some(CodegenTarget::Java),
            "cpp" | "c++" => Some(CodegenTarget::Cpp),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Param {
    pub name: Option<String>,
    pub type_name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemberSig {
    pub raw: String,
    pub name: Option<String>,
    pub type_name: Option<String>,
    /// `Some` only when a parenthesised parameter list was written.
    pub params: Option<Vec<Param>>,
    pub is_method: bool,
}

impl MemberSig {
    pub fn parsed(&self) -> bool {
        self.name.is_some()
    }
}

const IDENT: &str = r"[A-Za-z_$][\w$]*";
// Qualified name with up to two levels of generic arguments, array
// brackets and pointer/reference suffixes.
const TYPE: &str = r"[A-Za-z_$][\w$]*(?:(?:\.|::)[A-Za-z_$][\w$]*)*(?:<(?:[^<>()]|<[^<>()]*>)*>)?(?:\[\])*[*&]*";

struct Grammar {
    name_colon_type: Regex,
    type_space_name: Regex,
    type_star_name: Regex,
    bare: Regex,
    type_only: Regex,
    method_uml: Regex,
    method_c: Regex,
}

static GRAMMAR: LazyLock<Grammar> = LazyLock::new(|| {
    let re = |s: String| Regex::new(&s).expect("static member grammar");
    Grammar {
        name_colon_type: re(format!(r"^({IDENT})\s*:\s*({TYPE})$")),
        type_space_name: re(format!(r"^({TYPE})\s+({IDENT})$")),
        type_star_name: re(format!(r"^({TYPE})\s*([*&]+)\s*({IDENT})$")),
        bare: re(format!(r"^({IDENT})$")),
        type_only: re(format!(r"^{TYPE}$")),
        method_uml: re(format!(r"^({IDENT})\s*\(([^()]*)\)\s*(?::\s*({TYPE}))?$")),
        method_c: re(format!(r"^({TYPE})\s+({IDENT})\s*\(([^()]*)\)$")),
    }
});

const PRIMITIVES: &[&str] = &[
    "int", "long", "short", "byte", "char", "float", "double", "boolean", "bool", "void", "unsigned", "string",
];

/// Name and type of a `name : Type`, `Type name` or `Type *name` fragment.
fn typed_name(g: &Grammar, s: &str) -> Option<(String, String)> {
    if let Some(c) = g.name_colon_type.captures(s) {
        return Some((c[1].to_owned(), c[2].to_owned()));
    }
    if let Some(c) = g.type_star_name.captures(s) {
        return Some((c[3].to_owned(), format!("{}{}", &c[1], &c[2])));
    }
    if let Some(c) = g.type_space_name.captures(s) {
        return Some((c[2].to_owned(), c[1].to_owned()));
    }
    None
}

fn split_params(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '<' => depth += 1,
            '>' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_params(g: &Grammar, s: &str) -> Option<Vec<Param>> {
    if s.trim().is_empty() {
        return Some(Vec::new());
    }
    split_params(s)
        .into_iter()
        .map(|p| {
            let p = p.trim();
            if let Some((name, ty)) = typed_name(g, p) {
                return Some(Param {
                    name: Some(name),
                    type_name: Some(ty),
                });
            }
            // A lone word reads as a type when it looks like one.
            if g.bare.is_match(p) {
                let looks_like_type = PRIMITIVES.contains(&p) || p.starts_with(char::is_uppercase);
                return Some(if looks_like_type {
                    Param {
                        name: None,
                        type_name: Some(p.to_owned()),
                    }
                } else {
                    Param {
                        name: Some(p.to_owned()),
                        type_name: None,
                    }
                });
            }
            if g.type_only.is_match(p) {
                return Some(Param {
                    name: None,
                    type_name: Some(p.to_owned()),
                });
            }
            None
        })
        .collect()
}

/// Best-effort reading of one member line. Never fails; an unrecognised
/// line comes back with only `raw` set.
pub fn parse_member(line: &str, is_method: bool) -> MemberSig {
    let g = &*GRAMMAR;
    let mut sig = MemberSig {
        raw: line.to_owned(),
        name: None,
        type_name: None,
        params: None,
        is_method,
    };
    let mut s = line.trim();
    if let Some(rest) = s.strip_prefix(['+', '-', '#', '~']) {
        s = rest.trim_start();
    }
    s = s.strip_suffix(';').unwrap_or(s).trim_end();

    if is_method {
        if let Some(c) = g.method_uml.captures(s) {
            if let Some(params) = parse_params(g, &c[2]) {
                sig.name = Some(c[1].to_owned());
                sig.params = Some(params);
                sig.type_name = c.get(3).map(|m| m.as_str().to_owned());
            }
        } else if let Some(c) = g.method_c.captures(s) {
            if let Some(params) = parse_params(g, &c[3]) {
                sig.type_name = Some(c[1].to_owned());
                sig.name = Some(c[2].to_owned());
                sig.params = Some(params);
            }
        } else if g.bare.is_match(s) {
            sig.name = Some(s.to_owned());
        }
    } else if let Some((name, ty)) = typed_name(g, s) {
        sig.name = Some(name);
        sig.type_name = Some(ty);
    } else if g.bare.is_match(s) {
        sig.name = Some(s.to_owned());
    }
    sig
}

/// Comment text on a single line.
fn comment_text(s: &str) -> String {
    s.replace(['\r', '\n'], " ").trim_end().to_owned()
}

/// Field name derived from a class name: lower camel, identifier-safe.
fn field_name(class_name: &str) -> String {
    let mut out: String = class_name
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if let Some(first) = out.chars().next() {
        let lower: String = first.to_lowercase().collect();
        out.replace_range(..first.len_utf8(), &lower);
    }
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, '_');
    }
    out
}

const HEADER: &str = "// Generated by minuml. Skeleton only: member text is copied as written and not checked.\n";

/// Connections and classes a generation run covers.
struct Scope<'a> {
    classes: Vec<&'a ClassBox>,
    connections: Vec<&'a Connection>,
}

fn scope_for<'a>(doc: &'a Document, selection: Option<&BTreeSet<ElementId>>) -> Result<Scope<'a>> {
    let Some(sel) = selection else {
        return Ok(Scope {
            classes: doc.classes().collect(),
            connections: doc.connections().collect(),
        });
    };
    let mut scope = Scope {
        classes: Vec::new(),
        connections: Vec::new(),
    };
    for id in sel {
        match doc.get(*id) {
            None => return Err(Error::IdMismatch(*id)),
            Some(e) => {
                if let Some(c) = e.as_class() {
                    scope.classes.push(c);
                } else if let Some(c) = e.as_connection() {
                    if !sel.contains(&c.source) || !sel.contains(&c.target) {
                        return Err(Error::SelectionNotClosed(c.id));
                    }
                    scope.connections.push(c);
                }
            }
        }
    }
    Ok(scope)
}

/// Generates one compilation unit for the whole document.
pub fn emit_document(doc: &Document, target: CodegenTarget) -> String {
    emit(doc, None, target).expect("whole-document scope is always closed")
}

/// Generates code for `selection` (all of `doc` when `None`). Notes and
/// glyphs in the selection are ignored; a selected connection whose classes
/// are not both selected is an error.
pub fn emit(doc: &Document, selection: Option<&BTreeSet<ElementId>>, target: CodegenTarget) -> Result<String> {
    let scope = scope_for(doc, selection)?;
    let names: BTreeMap<ElementId, &ClassBox> = scope.classes.iter().map(|c| (c.id, *c)).collect();
    let mut out = String::from(HEADER);
    for cls in &scope.classes {
        let outgoing: Vec<(&Connection, &ClassBox)> = scope
            .connections
            .iter()
            .filter(|c| c.source == cls.id)
            .filter_map(|c| names.get(&c.target).map(|t| (*c, *t)))
            .collect();
        out.push('\n');
        match target {
            CodegenTarget::Java => java_class(&mut out, cls, &outgoing),
            CodegenTarget::Cpp => cpp_class(&mut out, cls, &outgoing),
        }
    }
    Ok(out)
}

/// Code flavor for the clipboard, in the user's preferred language.
pub fn clipboard_code(doc: &Document, selection: &BTreeSet<ElementId>, prefs: &Preferences) -> Result<String> {
    emit(doc, Some(selection), prefs.code_language)
}

struct Members {
    /// (type, name, kind) for association/aggregation targets.
    relations: Vec<(String, String, ConnectionKind)>,
    generic: Vec<String>,
    variables: Vec<MemberSig>,
    methods: Vec<MemberSig>,
}

fn collect_members(cls: &ClassBox, outgoing: &[(&Connection, &ClassBox)]) -> Members {
    let variables: Vec<MemberSig> = cls.variables.iter().map(|v| parse_member(v, false)).collect();
    let mut taken: BTreeSet<String> = variables.iter().filter_map(|v| v.name.clone()).collect();
    let mut relations = Vec::new();
    let mut generic = Vec::new();
    for (conn, target) in outgoing {
        match conn.kind {
            ConnectionKind::Association | ConnectionKind::Aggregation => {
                let base = field_name(&target.name);
                let mut name = base.clone();
                let mut n = 2;
                while taken.contains(&name) {
                    name = format!("{base}{n}");
                    n += 1;
                }
                taken.insert(name.clone());
                relations.push((target.name.clone(), name, conn.kind));
            }
            ConnectionKind::Generic => generic.push(target.name.clone()),
            ConnectionKind::Inheritance => {}
        }
    }
    Members {
        relations,
        generic,
        variables,
        methods: cls.methods.iter().map(|m| parse_member(m, true)).collect(),
    }
}

fn params_text(params: &[Param], default_type: &str) -> String {
    params
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let ty = p.type_name.as_deref().unwrap_or(default_type);
            match &p.name {
                Some(n) => format!("{ty} {n}"),
                None => format!("{ty} arg{}", i + 1),
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn java_class(out: &mut String, cls: &ClassBox, outgoing: &[(&Connection, &ClassBox)]) {
    let parents: Vec<&ClassBox> = outgoing
        .iter()
        .filter(|(c, _)| c.kind == ConnectionKind::Inheritance)
        .map(|(_, t)| *t)
        .collect();
    let mut header = String::new();
    if cls.is_interface {
        let _ = write!(header, "interface {}", cls.name);
        let ifaces: Vec<&str> = parents
            .iter()
            .filter(|p| p.is_interface)
            .map(|p| p.name.as_str())
            .collect();
        if !ifaces.is_empty() {
            let _ = write!(header, " extends {}", ifaces.join(", "));
        }
        for p in parents.iter().filter(|p| !p.is_interface) {
            let _ = write!(header, " /* extends {} */", p.name);
        }
    } else {
        let _ = write!(header, "class {}", cls.name);
        let mut supers = parents.iter().filter(|p| !p.is_interface);
        if let Some(first) = supers.next() {
            let _ = write!(header, " extends {}", first.name);
        }
        for extra in supers {
            let _ = write!(header, " /* extends {} */", extra.name);
        }
        let ifaces: Vec<&str> = parents
            .iter()
            .filter(|p| p.is_interface)
            .map(|p| p.name.as_str())
            .collect();
        if !ifaces.is_empty() {
            let _ = write!(header, " implements {}", ifaces.join(", "));
        }
    }
    let _ = writeln!(out, "{header} {{");

    let m = collect_members(cls, outgoing);
    let mut unparsed = 0;
    let mut body: Vec<String> = Vec::new();
    for name in &m.generic {
        body.push(format!("// related to {}", comment_text(name)));
    }
    for (ty, name, kind) in &m.relations {
        if cls.is_interface {
            body.push(format!("// {kind}: {ty} {name}"));
        } else {
            body.push(format!("private {ty} {name}; // {kind}"));
        }
    }
    for v in &m.variables {
        if cls.is_interface {
            body.push(format!("// {}", comment_text(&v.raw)));
            continue;
        }
        match (&v.name, &v.type_name) {
            (Some(n), Some(t)) => body.push(format!("private {t} {n};")),
            (Some(n), None) => body.push(format!("private Object {n}; /* TODO: type */")),
            _ => {
                unparsed += 1;
                body.push(format!("// {}", comment_text(&v.raw)));
                body.push(format!("/* TODO */ private Object unparsed{unparsed};"));
            }
        }
    }
    let mut methods: Vec<String> = Vec::new();
    for sig in &m.methods {
        let (prefix, name) = match &sig.name {
            Some(n) => (String::new(), n.clone()),
            None => {
                unparsed += 1;
                (
                    format!("// {}\n    /* TODO */ ", comment_text(&sig.raw)),
                    format!("unparsed{unparsed}"),
                )
            }
        };
        let ret = sig.type_name.as_deref().unwrap_or("void");
        let params = params_text(sig.params.as_deref().unwrap_or(&[]), "Object");
        if cls.is_interface {
            methods.push(format!("{prefix}{ret} {name}({params});"));
        } else {
            methods.push(format!("{prefix}public {ret} {name}({params}) {{\n    }}"));
        }
    }
    write_body(out, &body, &methods);
    out.push_str("}\n");
}

fn cpp_class(out: &mut String, cls: &ClassBox, outgoing: &[(&Connection, &ClassBox)]) {
    let bases: Vec<String> = outgoing
        .iter()
        .filter(|(c, _)| c.kind == ConnectionKind::Inheritance)
        .map(|(_, t)| format!("public {}", t.name))
        .collect();
    if bases.is_empty() {
        let _ = writeln!(out, "class {} {{", cls.name);
    } else {
        let _ = writeln!(out, "class {} : {} {{", cls.name, bases.join(", "));
    }
    out.push_str("public:\n");

    let m = collect_members(cls, outgoing);
    let mut unparsed = 0;
    let mut body: Vec<String> = Vec::new();
    if cls.is_interface {
        body.push(format!("virtual ~{}() = default;", cls.name));
    }
    for name in &m.generic {
        body.push(format!("// related to {}", comment_text(name)));
    }
    for (ty, name, kind) in &m.relations {
        body.push(format!("{ty}* {name}; // {kind}"));
    }
    for v in &m.variables {
        match (&v.name, &v.type_name) {
            (Some(n), Some(t)) => body.push(format!("{t} {n};")),
            (Some(n), None) => body.push(format!("void* {n}; /* TODO: type */")),
            _ => {
                unparsed += 1;
                body.push(format!("// {}", comment_text(&v.raw)));
                body.push(format!("/* TODO */ void* unparsed{unparsed};"));
            }
        }
    }
    let mut methods: Vec<String> = Vec::new();
    for sig in &m.methods {
        let (prefix, name) = match &sig.name {
            Some(n) => (String::new(), n.clone()),
            None => {
                unparsed += 1;
                (
                    format!("// {}\n    /* TODO */ ", comment_text(&sig.raw)),
                    format!("unparsed{unparsed}"),
                )
            }
        };
        let ret = sig.type_name.as_deref().unwrap_or("void");
        let params = params_text(sig.params.as_deref().unwrap_or(&[]), "void*");
        if cls.is_interface {
            methods.push(format!("{prefix}virtual {ret} {name}({params}) = 0;"));
        } else {
            methods.push(format!("{prefix}{ret} {name}({params});"));
        }
    }
    write_body(out, &body, &methods);
    out.push_str("};\n");
}

fn write_body(out: &mut String, fields: &[String], methods: &[String]) {
    for line in fields {
        let _ = writeln!(out, "    {line}");
    }
    if !fields.is_empty() && !methods.is_empty() {
        out.push('\n');
    }
    for line in methods {
        let _ = writeln!(out, "    {line}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Point;

    #[test]
    fn member_examples() {
        let s = parse_member("balance: int", false);
        assert_eq!(
            (s.name.as_deref(), s.type_name.as_deref()),
            (Some("balance"), Some("int"))
        );
        let s = parse_member("getName()", true);
        assert_eq!(s.name.as_deref(), Some("getName"));
        assert_eq!(s.params, Some(vec![]));
        assert_eq!(s.type_name, None);
        let s = parse_member("???", false);
        assert!(s.name.is_none());
        assert_eq!(s.raw, "???");
    }

    #[test]
    fn field_names() {
        assert_eq!(field_name("Movie"), "movie");
        assert_eq!(field_name("XMLFileClass"), "xMLFileClass");
        assert_eq!(field_name("2nd Copy"), "_2nd_Copy");
    }

    fn dog_animal() -> Document {
        let mut doc = Document::new();
        let animal = doc.create_class(Point::new(0.0, 0.0), Some("Animal"));
        let dog = doc.create_class(Point::new(0.0, 200.0), Some("Dog"));
        let c = doc.create_connection(dog, animal).unwrap();
        doc.set_connection_kind(c, ConnectionKind::Inheritance).unwrap();
        doc
    }

    #[test]
    fn inheritance_maps_to_extends() {
        let doc = dog_animal();
        let java = emit_document(&doc, CodegenTarget::Java);
        assert!(java.contains("class Dog extends Animal {"), "{java}");
        let cpp = emit_document(&doc, CodegenTarget::Cpp);
        assert!(cpp.contains("class Dog : public Animal {"), "{cpp}");
    }

    #[test]
    fn empty_document_is_header_only() {
        assert_eq!(emit_document(&Document::new(), CodegenTarget::Java), HEADER);
        assert_eq!(emit_document(&Document::new(), CodegenTarget::Cpp), HEADER);
    }

    #[test]
    fn interface_keyword() {
        let mut doc = Document::new();
        let i = doc.create_class(Point::default(), Some("Shape"));
        doc.edit_class(i, "Shape", true, vec![], vec!["area(): double".into()])
            .unwrap();
        let java = emit_document(&doc, CodegenTarget::Java);
        assert!(java.contains("interface Shape {\n    double area();\n}"), "{java}");
        let cpp = emit_document(&doc, CodegenTarget::Cpp);
        assert!(cpp.contains("virtual double area() = 0;"), "{cpp}");
    }

    #[test]
    fn open_selection_is_rejected() {
        let doc = dog_animal();
        let sel = BTreeSet::from([ElementId(2), ElementId(3)]);
        assert_eq!(
            emit(&doc, Some(&sel), CodegenTarget::Java),
            Err(Error::SelectionNotClosed(ElementId(3)))
        );
    }

    #[test]
    fn clipboard_language_follows_prefs() {
        let doc = dog_animal();
        let sel = BTreeSet::from([ElementId(1)]);
        let java = clipboard_code(&doc, &sel, &Preferences::default()).unwrap();
        assert!(java.contains("class Animal {"));
        assert!(!java.contains("Dog"));
        let prefs = Preferences {
            code_language: CodegenTarget::Cpp,
            ..Preferences::default()
        };
        let cpp = clipboard_code(&doc, &sel, &prefs).unwrap();
        assert!(cpp.contains("class Animal {\npublic:\n};"), "{cpp}");
    }
}
