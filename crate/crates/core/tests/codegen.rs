mod common;

use std::process::Command as Process;

use minuml::codegen::{emit, emit_document, parse_member, CodegenTarget, Param};
use minuml::model::{ConnectionKind, Document, Point};
use minuml::Error;
use proptest::prelude::*;

type Params<'a> = Option<&'a [(Option<&'a str>, Option<&'a str>)]>;

/// (line, is_method, name, type, params). `name == None` means unparsed.
type Row = (
    &'static str,
    bool,
    Option<&'static str>,
    Option<&'static str>,
    Params<'static>,
);

const TABLE: &[Row] = &[
    ("name: String", false, Some("name"), Some("String"), None),
    ("String name", false, Some("name"), Some("String"), None),
    ("int count;", false, Some("count"), Some("int"), None),
    ("- balance : double", false, Some("balance"), Some("double"), None),
    ("+ items: List<Item>", false, Some("items"), Some("List<Item>"), None),
    (
        "Map<String, List<Int>> index",
        false,
        Some("index"),
        Some("Map<String, List<Int>>"),
        None,
    ),
    ("char *buf", false, Some("buf"), Some("char*"), None),
    ("Node* next", false, Some("next"), Some("Node*"), None),
    ("int[] scores", false, Some("scores"), Some("int[]"), None),
    (
        "java.util.Date created",
        false,
        Some("created"),
        Some("java.util.Date"),
        None,
    ),
    ("std::string label", false, Some("label"), Some("std::string"), None),
    ("count", false, Some("count"), None, None),
    ("the customer's address", false, None, None, None),
    ("", false, None, None, None),
    ("x: int = 0", false, None, None, None),
    ("getName(): String", true, Some("getName"), Some("String"), Some(&[])),
    (
        "setName(name: String): void",
        true,
        Some("setName"),
        Some("void"),
        Some(&[(Some("name"), Some("String"))]),
    ),
    ("void run()", true, Some("run"), Some("void"), Some(&[])),
    (
        "int add(int a, int b)",
        true,
        Some("add"),
        Some("int"),
        Some(&[(Some("a"), Some("int")), (Some("b"), Some("int"))]),
    ),
    (
        "+ find(id: int, name: String): Customer;",
        true,
        Some("find"),
        Some("Customer"),
        Some(&[(Some("id"), Some("int")), (Some("name"), Some("String"))]),
    ),
    ("start()", true, Some("start"), None, Some(&[])),
    (
        "draw(Graphics)",
        true,
        Some("draw"),
        None,
        Some(&[(None, Some("Graphics"))]),
    ),
    (
        "move(dx, dy)",
        true,
        Some("move"),
        None,
        Some(&[(Some("dx"), None), (Some("dy"), None)]),
    ),
    (
        "put(Map<K, V> m): void",
        true,
        Some("put"),
        Some("void"),
        Some(&[(Some("m"), Some("Map<K, V>"))]),
    ),
    (
        "List<Movie> findAll()",
        true,
        Some("findAll"),
        Some("List<Movie>"),
        Some(&[]),
    ),
    ("reset", true, Some("reset"), None, None),
    ("calculate the total", true, None, None, None),
    ("compute(x: int", true, None, None, None),
    ("static int max(int a, int b)", true, None, None, None),
    (
        "String[] split(String sep, int limit)",
        true,
        Some("split"),
        Some("String[]"),
        Some(&[(Some("sep"), Some("String")), (Some("limit"), Some("int"))]),
    ),
];

#[test]
fn member_grammar_table() {
    assert_eq!(TABLE.len(), 30);
    for (line, is_method, name, ty, params) in TABLE {
        let sig = parse_member(line, *is_method);
        assert_eq!(sig.name.as_deref(), *name, "name of {line:?}");
        assert_eq!(sig.parsed(), name.is_some(), "{line:?}");
        if name.is_none() {
            continue;
        }
        assert_eq!(sig.type_name.as_deref(), *ty, "type of {line:?}");
        let expected: Option<Vec<Param>> = params.map(|ps| {
            ps.iter()
                .map(|(n, t)| Param {
                    name: n.map(str::to_owned),
                    type_name: t.map(str::to_owned),
                })
                .collect()
        });
        assert_eq!(sig.params, expected, "params of {line:?}");
        assert_eq!(sig.raw, *line);
    }
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(common::golden_path(name)).unwrap()
}

#[test]
fn movie_rental_java_golden() {
    let doc = common::fixture("movie_rental.muml");
    assert_eq!(emit_document(&doc, CodegenTarget::Java), golden("movie_rental.java"));
}

#[test]
fn movie_rental_cpp_golden() {
    let doc = common::fixture("movie_rental.muml");
    assert_eq!(emit_document(&doc, CodegenTarget::Cpp), golden("movie_rental.cpp"));
}

fn tool_available(name: &str) -> bool {
    Process::new(name)
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

/// Syntax-only check with a C++ compiler when one is installed. The
/// generated code names types it does not define, so a prelude declares
/// them first.
#[test]
fn cpp_golden_compiles_when_a_compiler_is_available() {
    if !tool_available("g++") {
        eprintln!("skipped: g++ not found");
        return;
    }
    let doc = common::fixture("movie_rental.muml");
    let mut src = String::from(
        "#include <string>\ntemplate <class T> struct List {};\nusing String = std::string;\nstruct Date {};\n\
         struct XMLFileClass {};\nstruct StudioReviewTableRowClass {};\nusing boolean = bool;\n",
    );
    for c in doc.classes() {
        src.push_str(&format!("class {};\n", c.name));
    }
    src.push_str(&golden("movie_rental.cpp"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("movie_rental.cpp");
    std::fs::write(&path, src).unwrap();
    let out = Process::new("g++")
        .args(["-std=c++17", "-fsyntax-only"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn java_golden_parses_when_a_compiler_is_available() {
    if !tool_available("javac") {
        eprintln!("skipped: javac not found");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("MovieRental.java");
    std::fs::write(&path, golden("movie_rental.java")).unwrap();
    // -proc:only stops after parsing and annotation processing, so missing
    // types and return statements are not reported.
    let out = Process::new("javac")
        .args(["-proc:only", "-d"])
        .arg(dir.path())
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn dog_extends_animal() {
    let mut doc = Document::new();
    let dog = doc.create_class(Point::new(0.0, 0.0), Some("Dog"));
    let animal = doc.create_class(Point::new(0.0, 200.0), Some("Animal"));
    let c = doc.create_connection(dog, animal).unwrap();
    doc.set_connection_kind(c, ConnectionKind::Inheritance).unwrap();
    assert!(emit_document(&doc, CodegenTarget::Java).contains("class Dog extends Animal {"));
    assert!(emit_document(&doc, CodegenTarget::Cpp).contains("class Dog : public Animal {"));
}

#[test]
fn open_selection_is_rejected() {
    let mut doc = Document::new();
    let a = doc.create_class(Point::new(0.0, 0.0), Some("A"));
    let b = doc.create_class(Point::new(0.0, 200.0), Some("B"));
    let c = doc.create_connection(a, b).unwrap();
    assert_eq!(
        emit(&doc, Some(&[a, c].into()), CodegenTarget::Java),
        Err(Error::SelectionNotClosed(c))
    );
    assert!(emit(&doc, Some(&[a, b, c].into()), CodegenTarget::Java).is_ok());
}

fn ident() -> impl Strategy<Value = String> {
    "[A-Z][A-Za-z0-9_]{0,10}"
}

proptest! {
    /// Every class is declared exactly once under its own name, in id order.
    #[test]
    fn names_are_preserved(names in prop::collection::vec(ident(), 1..8), iface in prop::collection::vec(any::<bool>(), 8)) {
        let mut doc = Document::new();
        for (i, n) in names.iter().enumerate() {
            let id = doc.create_class(Point::new(i as f64 * 100.0, 0.0), Some(n));
            doc.edit_class(id, n, iface[i], vec![], vec![]).unwrap();
        }
        for target in [CodegenTarget::Java, CodegenTarget::Cpp] {
            let code = emit_document(&doc, target);
            let mut last = 0;
            for c in doc.classes() {
                let keyword = if c.is_interface && target == CodegenTarget::Java { "interface" } else { "class" };
                let decl = format!("\n{keyword} {} ", c.name);
                let at = code[last..].find(&decl).map(|p| p + last);
                prop_assert!(at.is_some(), "{} missing from\n{}", decl, code);
                last = at.unwrap() + 1;
            }
        }
    }

    /// Each inheritance connection shows up exactly once in the class header.
    #[test]
    fn inheritance_is_counted(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let mut doc = common::document(&mut rng, 8, 14, 0);
        // Give classes plain identifier names so headers are easy to read back.
        let ids: Vec<_> = doc.classes().map(|c| c.id).collect();
        for (i, id) in ids.iter().enumerate() {
            let c = doc.class(*id).unwrap().clone();
            doc.edit_class(*id, &format!("C{i}"), c.is_interface, vec![], vec![]).unwrap();
        }
        let java = emit_document(&doc, CodegenTarget::Java);
        let cpp = emit_document(&doc, CodegenTarget::Cpp);
        for c in doc.classes() {
            let parents = doc.connections().filter(|x| x.source == c.id && x.kind == ConnectionKind::Inheritance).count();
            let cpp_header = cpp.lines().find(|l| l.starts_with(&format!("class {} ", c.name))).unwrap();
            prop_assert_eq!(cpp_header.matches("public ").count(), parents);
            let kw = if c.is_interface { "interface" } else { "class" };
            let java_header = java.lines().find(|l| l.starts_with(&format!("{kw} {} ", c.name))).unwrap();
            let listed = java_header
                .split(|ch: char| !(ch.is_alphanumeric() || ch == '_'))
                .filter(|w| w.starts_with('C') && *w != c.name && w[1..].chars().all(|d| d.is_ascii_digit()))
                .count();
            prop_assert_eq!(listed, parents, "{}", java_header);
            // Extra class parents are commented out; only one real `extends`.
            let real = java_header.matches(" extends ").count() - java_header.matches("/* extends ").count();
            prop_assert!(real <= 1, "{}", java_header);
        }
    }
}

#[test]
fn second_class_parent_is_commented_in_java() {
    let mut doc = Document::new();
    let b = doc.create_class(Point::new(0.0, 0.0), Some("Walker"));
    let a = doc.create_class(Point::new(200.0, 0.0), Some("Swimmer"));
    let c = doc.create_class(Point::new(100.0, 200.0), Some("Duck"));
    for parent in [a, b] {
        let conn = doc.create_connection(c, parent).unwrap();
        doc.set_connection_kind(conn, ConnectionKind::Inheritance).unwrap();
    }
    let java = emit_document(&doc, CodegenTarget::Java);
    assert!(
        java.contains("class Duck extends Swimmer /* extends Walker */ {"),
        "{java}"
    );
    let cpp = emit_document(&doc, CodegenTarget::Cpp);
    assert!(cpp.contains("class Duck : public Swimmer, public Walker {"), "{cpp}");
}
