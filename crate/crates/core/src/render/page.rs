//! Pagination: splitting a world-space print region into a grid of pages,
//! or shrinking it onto one page, and drawing individual pages with a
//! position key in the bottom margin.

use super::{render_scene, Color, DrawCmd, Primitive, Style, Tag, ViewState};
use crate::error::{Error, Result};
use crate::geometry::{content_bounds, TextMetrics};
use crate::model::{Document, Point, Rect};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum PageSize {
    #[default]
    Letter,
    A4,
}

impl PageSize {
    /// Portrait width and height in points.
    pub fn dimensions(self) -> (f64, f64) {
        match self {
            PageSize::Letter => (612.0, 792.0),
            PageSize::A4 => (595.0, 842.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PageSize::Letter => "letter",
            PageSize::A4 => "a4",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "letter" => Some(PageSize::Letter),
            "a4" => Some(PageSize::A4),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    #[default]
    Portrait,
    Landscape,
}

impl Orientation {
    pub fn name(self) -> &'static str {
        match self {
            Orientation::Portrait => "portrait",
            Orientation::Landscape => "landscape",
        }
    }

    /// Accepts the full names and the one-letter forms `p` and `l`.
    pub fn from_name(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "portrait" | "p" => Some(Orientation::Portrait),
            "landscape" | "l" => Some(Orientation::Landscape),
            _ => None,
        }
    }
}

pub const DEFAULT_MARGIN: f64 = 36.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PageSetup {
    pub size: PageSize,
    pub orientation: Orientation,
    /// Uniform margin in points.
    pub margin: f64,
    pub world_units_per_point: f64,
}

impl Default for PageSetup {
    fn default() -> Self {
        PageSetup::new(PageSize::Letter, Orientation::Portrait)
    }
}

impl PageSetup {
    pub fn new(size: PageSize, orientation: Orientation) -> Self {
        PageSetup {
            size,
            orientation,
            margin: DEFAULT_MARGIN,
            world_units_per_point: 1.0,
        }
    }

    /// Page width and height in points after orientation.
    pub fn page_dimensions(&self) -> (f64, f64) {
        let (w, h) = self.size.dimensions();
        match self.orientation {
            Orientation::Portrait => (w, h),
            Orientation::Landscape => (h, w),
        }
    }

    /// Printable area inside the margins, in points.
    pub fn printable_points(&self) -> (f64, f64) {
        let (w, h) = self.page_dimensions();
        (w - 2.0 * self.margin, h - 2.0 * self.margin)
    }

    /// Printable area in world units at scale 1.
    pub fn printable_world(&self) -> (f64, f64) {
        let (w, h) = self.printable_points();
        (w * self.world_units_per_point, h * self.world_units_per_point)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PageIndex {
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageSpec {
    pub index: PageIndex,
    /// World-space area printed on this page.
    pub source: Rect,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PagePlan {
    pub setup: PageSetup,
    pub region: Rect,
    pub rows: usize,
    pub cols: usize,
    /// World-to-print scale: 1 when tiling, at most 1 when fitting to a page.
    pub scale: f64,
    /// Row-major.
    pub pages: Vec<PageSpec>,
}

impl PagePlan {
    pub fn page_count(&self) -> usize {
        self.pages.len()
    }

    pub fn page(&self, index: PageIndex) -> Result<&PageSpec> {
        if index.row >= self.rows || index.col >= self.cols {
            return Err(Error::IndexOutOfRange {
                row: index.row,
                col: index.col,
            });
        }
        Ok(&self.pages[index.row * self.cols + index.col])
    }

    /// `"{cols}x{rows}"`.
    pub fn grid_label(&self) -> String {
        format!("{}x{}", self.cols, self.rows)
    }

    /// Page canvas for the exporters, in points.
    pub fn page_frame(&self) -> super::Frame {
        let (w, h) = self.setup.page_dimensions();
        super::Frame {
            bounds: Rect::new(0.0, 0.0, w, h),
            units_per_inch: super::POINTS_PER_INCH,
        }
    }
}

// Pages a span needs; tiny overshoot from float error does not add a page.
fn pages_needed(span: f64, per_page: f64) -> usize {
    ((span / per_page) - 1e-9).ceil().max(1.0) as usize
}

/// Plans the print job. Without a region the whole content is printed with
/// a margin of one padding unit around it.
pub fn paginate(
    doc: &Document,
    m: &TextMetrics,
    setup: &PageSetup,
    region: Option<Rect>,
    fit_one_page: bool,
) -> Result<PagePlan> {
    let region = match region {
        Some(r) if r.width > 0.0 && r.height > 0.0 && r.x.is_finite() && r.y.is_finite() => r,
        Some(_) => return Err(Error::InvalidRegion),
        None => content_bounds(doc, m)
            .ok_or(Error::EmptyPrintRegion)?
            .inflate(m.padding),
    };
    let (pw, ph) = setup.printable_world();
    if fit_one_page {
        let scale = (pw / region.width).min(ph / region.height).min(1.0);
        return Ok(PagePlan {
            setup: *setup,
            region,
            rows: 1,
            cols: 1,
            scale,
            pages: vec![PageSpec {
                index: PageIndex { row: 0, col: 0 },
                source: region,
            }],
        });
    }
    let cols = pages_needed(region.width, pw);
    let rows = pages_needed(region.height, ph);
    let mut pages = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        let y = region.y + row as f64 * ph;
        let height = if row + 1 == rows { region.bottom() - y } else { ph };
        for col in 0..cols {
            let x = region.x + col as f64 * pw;
            let width = if col + 1 == cols { region.right() - x } else { pw };
            pages.push(PageSpec {
                index: PageIndex { row, col },
                source: Rect { x, y, width, height },
            });
        }
    }
    Ok(PagePlan {
        setup: *setup,
        region,
        rows,
        cols,
        scale: 1.0,
        pages,
    })
}

const KEY_CELL_MAX: f64 = 8.0;

/// Draws one page in page coordinates (points, origin at the top-left of
/// the sheet): the clipped slice of the diagram plus the position key.
pub fn render_page(plan: &PagePlan, index: PageIndex, doc: &Document, m: &TextMetrics) -> Result<Vec<DrawCmd>> {
    let spec = plan.page(index)?;
    let setup = &plan.setup;
    let factor = plan.scale / setup.world_units_per_point;
    let offset = Point::new(
        setup.margin - spec.source.x * factor,
        setup.margin - spec.source.y * factor,
    );
    let printable = Rect::new(
        setup.margin,
        setup.margin,
        spec.source.width * factor,
        spec.source.height * factor,
    );
    let mut out = vec![DrawCmd::new(
        Primitive::Clip(Some(printable)),
        Style::text(Color::BLACK),
        Tag::None,
    )];
    out.extend(
        render_scene(doc, m, &ViewState::default())
            .into_iter()
            .filter(|c| c.bounds().is_none_or(|b| b.intersects(&spec.source)))
            .map(|c| c.transformed(factor, offset)),
    );
    out.push(DrawCmd::new(
        Primitive::Clip(None),
        Style::text(Color::BLACK),
        Tag::None,
    ));
    page_key(&mut out, plan, index);
    Ok(out)
}

fn page_key(out: &mut Vec<DrawCmd>, plan: &PagePlan, current: PageIndex) {
    let setup = &plan.setup;
    let (page_w, page_h) = setup.page_dimensions();
    let (avail_w, _) = setup.printable_points();
    let avail_h = (setup.margin - 8.0).max(2.0);
    let cell = KEY_CELL_MAX
        .min(avail_w / plan.cols as f64)
        .min(avail_h / plan.rows as f64);
    let (key_w, key_h) = (cell * plan.cols as f64, cell * plan.rows as f64);
    let x0 = (page_w - key_w) / 2.0;
    let y0 = page_h - setup.margin + (setup.margin - key_h) / 2.0;
    for row in 0..plan.rows {
        for col in 0..plan.cols {
            let is_current = PageIndex { row, col } == current;
            let style = if is_current {
                Style::filled(Color::BLACK, Color::BLACK, 0.5)
            } else {
                Style::stroke(Color::BLACK, 0.5)
            };
            out.push(DrawCmd::new(
                Primitive::Rect(Rect::new(x0 + col as f64 * cell, y0 + row as f64 * cell, cell, cell)),
                style,
                Tag::PageKeyCell {
                    row,
                    col,
                    current: is_current,
                },
            ));
        }
    }
}

/// Page boundaries (dashed gray) and the print region outline (solid, darker)
/// in world units, for overlaying on the editing canvas.
pub fn page_overlay(plan: &PagePlan) -> Vec<DrawCmd> {
    let mut out: Vec<DrawCmd> = plan
        .pages
        .iter()
        .map(|p| {
            DrawCmd::new(
                Primitive::Rect(p.source),
                Style::stroke(Color::GRAY, 1.0).dashed(),
                Tag::PageBoundary {
                    row: p.index.row,
                    col: p.index.col,
                },
            )
        })
        .collect();
    out.push(DrawCmd::new(
        Primitive::Rect(plan.region),
        Style::stroke(Color::DARK_GRAY, 2.0),
        Tag::PrintRegion,
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printable_area() {
        let s = PageSetup::default();
        assert_eq!(s.printable_points(), (540.0, 720.0));
        let l = PageSetup::new(PageSize::A4, Orientation::Landscape);
        assert_eq!(l.page_dimensions(), (842.0, 595.0));
        assert_eq!(l.printable_points(), (770.0, 523.0));
    }

    #[test]
    fn small_content_is_one_page() {
        let mut doc = Document::new();
        doc.create_class(Point::new(10.0, 10.0), None);
        let plan = paginate(&doc, &TextMetrics::default(), &PageSetup::default(), None, false).unwrap();
        assert_eq!((plan.cols, plan.rows), (1, 1));
        assert_eq!(plan.region, Rect::new(2.0, 2.0, 96.0, 80.0));
    }

    #[test]
    fn empty_document_has_nothing_to_print() {
        let doc = Document::new();
        let m = TextMetrics::default();
        assert_eq!(
            paginate(&doc, &m, &PageSetup::default(), None, false),
            Err(Error::EmptyPrintRegion)
        );
        assert_eq!(
            paginate(
                &doc,
                &m,
                &PageSetup::default(),
                Some(Rect::new(0.0, 0.0, 0.0, 5.0)),
                false
            ),
            Err(Error::InvalidRegion)
        );
    }

    #[test]
    fn out_of_range_page() {
        let doc = Document::new();
        let plan = paginate(
            &doc,
            &TextMetrics::default(),
            &PageSetup::default(),
            Some(Rect::new(0.0, 0.0, 10.0, 10.0)),
            false,
        )
        .unwrap();
        assert_eq!(
            render_page(&plan, PageIndex { row: 0, col: 1 }, &doc, &TextMetrics::default()),
            Err(Error::IndexOutOfRange { row: 0, col: 1 })
        );
    }

    #[test]
    fn fit_never_upscales() {
        let doc = Document::new();
        let m = TextMetrics::default();
        let small = paginate(
            &doc,
            &m,
            &PageSetup::default(),
            Some(Rect::new(0.0, 0.0, 50.0, 50.0)),
            true,
        )
        .unwrap();
        assert_eq!(small.scale, 1.0);
        let big = paginate(
            &doc,
            &m,
            &PageSetup::default(),
            Some(Rect::new(0.0, 0.0, 1080.0, 100.0)),
            true,
        )
        .unwrap();
        assert_eq!(big.scale, 0.5);
        assert_eq!(big.page_count(), 1);
    }
}
