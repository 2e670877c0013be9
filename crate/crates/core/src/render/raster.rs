//! PNG output through tiny-skia. Text uses the public-domain 8x8 bitmap font,
//! scaled to the text run's character cell, so output does not depend on
//! installed fonts.

use font8x8::UnicodeFonts;
use tiny_skia::{FillRule, Mask, Paint, PathBuilder, Pixmap, Stroke, StrokeDash, Transform};

use super::{Color, DrawCmd, Frame, Primitive, Style};
use crate::error::{Error, Result};
use crate::model::{Point, Rect};

pub const MAX_RASTER_SIDE: u64 = 16384;

fn glyph_bitmap(c: char) -> [u8; 8] {
    font8x8::BASIC_FONTS
        .get(c)
        .or_else(|| font8x8::LATIN_FONTS.get(c))
        .or_else(|| font8x8::GREEK_FONTS.get(c))
        .or_else(|| font8x8::BOX_FONTS.get(c))
        .or_else(|| font8x8::BLOCK_FONTS.get(c))
        .or_else(|| font8x8::MISC_FONTS.get(c))
        .or_else(|| font8x8::BASIC_FONTS.get('?'))
        .unwrap_or([0; 8])
}

fn paint_for(c: Color) -> Paint<'static> {
    let mut p = Paint::default();
    p.set_color_rgba8(c.0, c.1, c.2, 255);
    p.anti_alias = true;
    p
}

fn stroke_for(style: &Style) -> Stroke {
    Stroke {
        width: style.stroke_width as f32,
        dash: if style.dashed {
            StrokeDash::new(vec![4.0, 3.0], 0.0)
        } else {
            None
        },
        ..Stroke::default()
    }
}

fn path_from(points: &[Point], close: bool) -> Option<tiny_skia::Path> {
    let mut pb = PathBuilder::new();
    let (first, rest) = points.split_first()?;
    pb.move_to(first.x as f32, first.y as f32);
    for p in rest {
        pb.line_to(p.x as f32, p.y as f32);
    }
    if close {
        pb.close();
    }
    pb.finish()
}

fn rect_path(r: &Rect) -> Option<tiny_skia::Path> {
    let rect = tiny_skia::Rect::from_xywh(r.x as f32, r.y as f32, r.width as f32, r.height as f32)?;
    Some(PathBuilder::from_rect(rect))
}

fn text_path(origin: Point, content: &str, size: f64) -> Option<tiny_skia::Path> {
    let dot = size / 16.0;
    let top = origin.y + size * 0.25;
    let mut pb = PathBuilder::new();
    for (i, ch) in content.chars().enumerate() {
        let left = origin.x + i as f64 * size / 2.0;
        for (row, bits) in glyph_bitmap(ch).iter().enumerate() {
            for col in 0..8 {
                if bits & (1 << col) != 0 {
                    if let Some(r) = tiny_skia::Rect::from_xywh(
                        (left + col as f64 * dot) as f32,
                        (top + row as f64 * dot) as f32,
                        dot as f32,
                        dot as f32,
                    ) {
                        pb.push_rect(r);
                    }
                }
            }
        }
    }
    pb.finish()
}

/// Pixel size of `frame` at `dpi`.
pub fn raster_size(frame: &Frame, dpi: f64) -> Result<(u32, u32)> {
    if !(dpi > 0.0 && dpi.is_finite()) {
        return Err(Error::InvalidDpi(dpi));
    }
    let k = dpi / frame.units_per_inch;
    let side = |v: f64| ((v * k).ceil().max(1.0)).min(u64::MAX as f64) as u64;
    let (width, height) = (side(frame.bounds.width), side(frame.bounds.height));
    if width > MAX_RASTER_SIDE || height > MAX_RASTER_SIDE {
        return Err(Error::RasterTooLarge { width, height });
    }
    Ok((width as u32, height as u32))
}

/// Renders onto a white canvas covering `frame`.
pub fn render_pixmap(cmds: &[DrawCmd], frame: &Frame, dpi: f64) -> Result<Pixmap> {
    let (w, h) = raster_size(frame, dpi)?;
    let mut pixmap = Pixmap::new(w, h).expect("dimensions checked above");
    pixmap.fill(tiny_skia::Color::WHITE);
    let k = (dpi / frame.units_per_inch) as f32;
    let transform = Transform::from_translate(-frame.bounds.x as f32, -frame.bounds.y as f32).post_scale(k, k);
    let mut mask: Option<Mask> = None;
    for cmd in cmds {
        let style = &cmd.style;
        let clip = mask.as_ref();
        match &cmd.prim {
            Primitive::Clip(None) => mask = None,
            Primitive::Clip(Some(r)) => {
                mask = Mask::new(w, h).map(|mut m| {
                    if let Some(path) = rect_path(r) {
                        m.fill_path(&path, FillRule::Winding, false, transform);
                    }
                    m
                });
            }
            Primitive::Text { origin, content, size } => {
                if let Some(path) = text_path(*origin, content, *size) {
                    pixmap.fill_path(&path, &paint_for(style.color), FillRule::Winding, transform, clip);
                }
            }
            prim => {
                let (path, closed) = match prim {
                    Primitive::Line { from, to } => (path_from(&[*from, *to], false), false),
                    Primitive::Polyline(pts) => (path_from(pts, false), false),
                    Primitive::Polygon(pts) => (path_from(pts, true), true),
                    Primitive::Rect(r) => (rect_path(r), true),
                    _ => (None, false),
                };
                let Some(path) = path else { continue };
                if let (true, Some(fill)) = (closed, style.fill) {
                    pixmap.fill_path(&path, &paint_for(fill), FillRule::Winding, transform, clip);
                }
                if style.stroke_width > 0.0 {
                    pixmap.stroke_path(&path, &paint_for(style.color), &stroke_for(style), transform, clip);
                }
            }
        }
    }
    Ok(pixmap)
}

pub fn export_raster(cmds: &[DrawCmd], frame: &Frame, dpi: f64) -> Result<Vec<u8>> {
    let pixmap = render_pixmap(cmds, frame, dpi)?;
    Ok(pixmap.encode_png().expect("PNG encoding of an in-memory pixmap"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::Tag;

    #[test]
    fn empty_list_gives_a_valid_png() {
        let png = export_raster(&[], &Frame::fit(&[]), 96.0).unwrap();
        assert_eq!(&png[..8], b"\x89PNG\r\n\x1a\n");
        let back = Pixmap::decode_png(&png).unwrap();
        assert_eq!((back.width(), back.height()), (1, 1));
    }

    #[test]
    fn size_limit() {
        let frame = Frame::world(Rect::new(0.0, 0.0, 20000.0, 10.0));
        assert_eq!(
            export_raster(&[], &frame, 96.0),
            Err(Error::RasterTooLarge {
                width: 20000,
                height: 10
            })
        );
        assert_eq!(raster_size(&frame, 48.0).unwrap(), (10000, 5));
        assert!(matches!(raster_size(&frame, 0.0), Err(Error::InvalidDpi(_))));
    }

    #[test]
    fn filled_rect_paints_pixels() {
        let cmd = DrawCmd::new(
            Primitive::Rect(Rect::new(2.0, 2.0, 6.0, 6.0)),
            Style::filled(Color::BLACK, Color::BLACK, 0.0),
            Tag::None,
        );
        let pm = render_pixmap(&[cmd], &Frame::world(Rect::new(0.0, 0.0, 10.0, 10.0)), 96.0).unwrap();
        let px = |x, y| pm.pixel(x, y).unwrap();
        assert_eq!(px(5, 5).red(), 0);
        assert_eq!(px(0, 0).red(), 255);
    }

    #[test]
    fn clip_limits_drawing() {
        let cmds = [
            DrawCmd::new(
                Primitive::Clip(Some(Rect::new(0.0, 0.0, 5.0, 10.0))),
                Style::text(Color::BLACK),
                Tag::None,
            ),
            DrawCmd::new(
                Primitive::Rect(Rect::new(0.0, 0.0, 10.0, 10.0)),
                Style::filled(Color::BLACK, Color::BLACK, 0.0),
                Tag::None,
            ),
            DrawCmd::new(Primitive::Clip(None), Style::text(Color::BLACK), Tag::None),
        ];
        let pm = render_pixmap(&cmds, &Frame::world(Rect::new(0.0, 0.0, 10.0, 10.0)), 96.0).unwrap();
        assert_eq!(pm.pixel(2, 5).unwrap().red(), 0);
        assert_eq!(pm.pixel(8, 5).unwrap().red(), 255);
    }
}
