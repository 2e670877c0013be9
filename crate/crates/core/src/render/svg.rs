//! SVG 1.1 output. The writer is deterministic: numbers are printed with at
//! most three decimals and elements follow command order.

use std::fmt::Write as _;

use super::{Color, DrawCmd, Frame, Primitive, Style};
use crate::model::Point;
use crate::xml::escape_attr;

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_owned()
    } else {
        s.to_owned()
    }
}

fn hex(c: Color) -> String {
    format!("#{:02x}{:02x}{:02x}", c.0, c.1, c.2)
}

fn paint(style: &Style, out: &mut String, closed: bool) {
    let fill = match style.fill {
        Some(c) if closed => hex(c),
        _ => "none".to_owned(),
    };
    let _ = write!(out, " fill=\"{fill}\"");
    if style.stroke_width > 0.0 {
        let _ = write!(
            out,
            " stroke=\"{}\" stroke-width=\"{}\"",
            hex(style.color),
            num(style.stroke_width)
        );
        if style.dashed {
            out.push_str(" stroke-dasharray=\"4 3\"");
        }
    } else {
        out.push_str(" stroke=\"none\"");
    }
}

fn points(pts: &[Point]) -> String {
    pts.iter()
        .map(|p| format!("{},{}", num(p.x), num(p.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Text content safe for SVG: XML 1.0 cannot carry control characters.
fn svg_text(s: &str) -> String {
    let cleaned: String = s.chars().map(|c| if c.is_control() { '\u{fffd}' } else { c }).collect();
    let mut out = String::new();
    escape_attr(&cleaned, &mut out);
    out
}

pub fn export_vector(cmds: &[DrawCmd], frame: &Frame) -> Vec<u8> {
    export_vector_string(cmds, frame).into_bytes()
}

pub fn export_vector_string(cmds: &[DrawCmd], frame: &Frame) -> String {
    let b = frame.bounds;
    let px = super::WORLD_UNITS_PER_INCH / frame.units_per_inch;
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\"",
        num(b.width * px),
        num(b.height * px),
        num(b.x),
        num(b.y),
        num(b.width),
        num(b.height)
    );
    if cmds.is_empty() {
        out.push_str("/>\n");
        return out;
    }
    out.push_str(">\n");
    let mut clips = 0usize;
    let mut open_group = false;
    for cmd in cmds {
        let indent = if open_group { "    " } else { "  " };
        match &cmd.prim {
            Primitive::Clip(rect) => {
                if open_group {
                    out.push_str("  </g>\n");
                    open_group = false;
                }
                if let Some(r) = rect {
                    clips += 1;
                    let _ = writeln!(
                        out,
                        "  <clipPath id=\"clip{clips}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>",
                        num(r.x),
                        num(r.y),
                        num(r.width),
                        num(r.height)
                    );
                    let _ = writeln!(out, "  <g clip-path=\"url(#clip{clips})\">");
                    open_group = true;
                }
                continue;
            }
            Primitive::Line { from, to } => {
                let _ = write!(
                    out,
                    "{indent}<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"",
                    num(from.x),
                    num(from.y),
                    num(to.x),
                    num(to.y)
                );
                paint(&cmd.style, &mut out, false);
            }
            Primitive::Polyline(pts) => {
                let _ = write!(out, "{indent}<polyline points=\"{}\"", points(pts));
                paint(&cmd.style, &mut out, false);
            }
            Primitive::Polygon(pts) => {
                let _ = write!(out, "{indent}<polygon points=\"{}\"", points(pts));
                paint(&cmd.style, &mut out, true);
            }
            Primitive::Rect(r) => {
                let _ = write!(
                    out,
                    "{indent}<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"",
                    num(r.x),
                    num(r.y),
                    num(r.width),
                    num(r.height)
                );
                paint(&cmd.style, &mut out, true);
            }
            Primitive::Text { origin, content, size } => {
                let chars = content.chars().count();
                let _ = write!(
                    out,
                    "{indent}<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"{}\" fill=\"{}\" xml:space=\"preserve\"",
                    num(origin.x),
                    num(origin.y + size * 0.75),
                    num(size * 0.8),
                    hex(cmd.style.color)
                );
                if chars > 0 {
                    let _ = write!(
                        out,
                        " textLength=\"{}\" lengthAdjust=\"spacingAndGlyphs\"",
                        num(chars as f64 * size / 2.0)
                    );
                }
                let _ = writeln!(out, ">{}</text>", svg_text(content));
                continue;
            }
        }
        out.push_str("/>\n");
    }
    if open_group {
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}
