//! Small XML subset shared by the document format and the session protocol:
//! elements, attributes, text, comments and a prolog. No namespaces, DTDs or
//! CDATA. Character references may encode any code point, which is what lets
//! member lines carry control characters verbatim.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Node {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
    pub text: String,
    pub line: usize,
}

impl Node {
    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.line, Some(format!("<{}>", self.name)), message)
    }

    pub fn required(&self, key: &str) -> Result<&str> {
        self.attr(key)
            .ok_or_else(|| self.err(format!("missing attribute `{key}`")))
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.required(key)?;
        raw.parse()
            .map_err(|_| self.err(format!("attribute `{key}` has invalid value {raw:?}")))
    }

    pub fn coord(&self, key: &str) -> Result<f64> {
        let v: f64 = self.parsed(key)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.err(format!("attribute `{key}` must be a finite number")))
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.required(key)? {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(self.err(format!("attribute `{key}` must be true or false, got {other:?}"))),
        }
    }

    /// Rejects attributes outside `allowed`.
    pub fn expect_attrs(&self, allowed: &[&str]) -> Result<()> {
        match self.attrs.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(self.err(format!("unexpected attribute `{k}`"))),
            None => Ok(()),
        }
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        self.err(message)
    }
}

pub(crate) fn escape_text(s: &str, out: &mut String) {
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c if c.is_control() => out.push_str(&format!("&#{};", c as u32)),
            c => out.push(c),
        }
    }
}

pub(crate) fn escape_attr(s: &str, out: &mut String) {
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("&quot;"),
            c => escape_text(c.encode_utf8(&mut [0; 4]), out),
        }
    }
}

/// Writes `<name k="v" ...` (unterminated) to `out`.
pub(crate) fn open_tag(out: &mut String, indent: usize, name: &str, attrs: &[(&str, String)]) {
    out.extend(std::iter::repeat_n(' ', indent));
    out.push('<');
    out.push_str(name);
    for (k, v) in attrs {
        out.push(' ');
        out.push_str(k);
        out.push_str("=\"");
        escape_attr(v, out);
        out.push('"');
    }
}

/// A whole element on one line: self-closing when `text` is empty.
pub(crate) fn leaf(out: &mut String, indent: usize, name: &str, attrs: &[(&str, String)], text: &str) {
    open_tag(out, indent, name, attrs);
    if text.is_empty() {
        out.push_str("/>\n");
    } else {
        out.push('>');
        escape_text(text, out);
        out.push_str("</");
        out.push_str(name);
        out.push_str(">\n");
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.line, None, message)
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn eof(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn advance(&mut self, n: usize) {
        self.line += self.src[self.pos..self.pos + n].matches('\n').count();
        self.pos += n;
    }

    fn skip_ws(&mut self) {
        let n = self.rest().len() - self.rest().trim_start().len();
        self.advance(n);
    }

    fn skip_until(&mut self, end: &str) -> Result<()> {
        match self.rest().find(end) {
            Some(i) => {
                self.advance(i + end.len());
                Ok(())
            }
            None => Err(self.err(format!("unterminated construct, expected `{end}`"))),
        }
    }

    fn skip_misc(&mut self) -> Result<()> {
        loop {
            self.skip_ws();
            if self.rest().starts_with("<?") {
                self.skip_until("?>")?;
            } else if self.rest().starts_with("<!--") {
                self.skip_until("-->")?;
            } else {
                return Ok(());
            }
        }
    }

    fn name(&mut self) -> Result<String> {
        let n = self
            .rest()
            .find(|c: char| !(c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')))
            .unwrap_or(self.rest().len());
        if n == 0 {
            return Err(self.err("expected a name"));
        }
        let name = self.rest()[..n].to_owned();
        self.advance(n);
        Ok(name)
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.rest().starts_with(s) {
            self.advance(s.len());
            Ok(())
        } else if self.eof() {
            Err(self.err(format!("unexpected end of input, expected `{s}`")))
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn element(&mut self, depth: usize) -> Result<Node> {
        if depth > 64 {
            return Err(self.err("elements nested too deeply"));
        }
        let line = self.line;
        self.expect("<")?;
        let name = self.name()?;
        let mut attrs: Vec<(String, String)> = Vec::new();
        loop {
            self.skip_ws();
            if self.rest().starts_with("/>") {
                self.advance(2);
                return Ok(Node {
                    name,
                    attrs,
                    children: Vec::new(),
                    text: String::new(),
                    line,
                });
            }
            if self.rest().starts_with('>') {
                self.advance(1);
                break;
            }
            if self.eof() {
                return Err(self.err(format!("unexpected end of input inside <{name}>")));
            }
            let key = self.name()?;
            self.skip_ws();
            self.expect("=")?;
            self.skip_ws();
            let quote = match self.rest().chars().next() {
                Some(q @ ('"' | '\'')) => q,
                _ => return Err(self.err("expected a quoted attribute value")),
            };
            self.advance(1);
            let end = self
                .rest()
                .find(quote)
                .ok_or_else(|| self.err("unterminated attribute value"))?;
            let raw = &self.rest()[..end];
            if raw.contains('<') {
                return Err(self.err("`<` inside attribute value"));
            }
            let value = unescape(raw).map_err(|m| self.err(m))?;
            self.advance(end + 1);
            if attrs.iter().any(|(k, _)| *k == key) {
                return Err(self.err(format!("duplicate attribute `{key}`")));
            }
            attrs.push((key, value));
        }
        let mut children = Vec::new();
        let mut text = String::new();
        loop {
            let i = self
                .rest()
                .find('<')
                .ok_or_else(|| self.err(format!("unexpected end of input inside <{name}>")))?;
            text.push_str(&unescape(&self.rest()[..i]).map_err(|m| self.err(m))?);
            self.advance(i);
            if self.rest().starts_with("</") {
                self.advance(2);
                let close = self.name()?;
                if close != name {
                    return Err(self.err(format!("</{close}> does not close <{name}>")));
                }
                self.skip_ws();
                self.expect(">")?;
                break;
            } else if self.rest().starts_with("<!--") {
                self.skip_until("-->")?;
            } else {
                children.push(self.element(depth + 1)?);
            }
        }
        if !children.is_empty() && text.trim().is_empty() {
            text.clear();
        }
        Ok(Node {
            name,
            attrs,
            children,
            text,
            line,
        })
    }
}

fn unescape(raw: &str) -> std::result::Result<String, String> {
    if !raw.contains('&') {
        return Ok(raw.to_owned());
    }
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(i) = rest.find('&') {
        out.push_str(&rest[..i]);
        rest = &rest[i + 1..];
        let end = rest.find(';').ok_or("unterminated entity reference")?;
        let entity = &rest[..end];
        let ch = match entity {
            "amp" => '&',
            "lt" => '<',
            "gt" => '>',
            "quot" => '"',
            "apos" => '\'',
            _ => {
                let code = if let Some(hex) = entity.strip_prefix("#x") {
                    u32::from_str_radix(hex, 16).ok()
                } else if let Some(dec) = entity.strip_prefix('#') {
                    dec.parse().ok()
                } else {
                    None
                };
                code.and_then(char::from_u32)
                    .ok_or_else(|| format!("unknown entity `&{entity};`"))?
            }
        };
        out.push(ch);
        rest = &rest[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Parses a single root element, allowing a prolog and comments around it.
pub(crate) fn parse(src: &str) -> Result<Node> {
    let mut r = Reader { src, pos: 0, line: 1 };
    r.skip_misc()?;
    if r.eof() {
        return Err(r.err("empty input"));
    }
    let root = r.element(0)?;
    r.skip_misc()?;
    if !r.eof() {
        return Err(r.err("content after the root element"));
    }
    Ok(root)
}
