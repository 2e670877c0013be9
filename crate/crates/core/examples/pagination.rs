//! Splits a wide diagram over several sheets and writes one SVG per page.

use minuml::geometry::TextMetrics;
use minuml::model::{Document, Point};
use minuml::render::{export_vector, paginate, render_page, Orientation, PageSetup, PageSize};

fn main() -> minuml::Result<()> {
    let mut doc = Document::new();
    let mut prev = None;
    for i in 0..12 {
        let id = doc.create_class(Point::new(i as f64 * 140.0, (i % 3) as f64 * 300.0), None);
        if let Some(p) = prev {
            doc.create_connection(p, id)?;
        }
        prev = Some(id);
    }
    let m = TextMetrics::default();
    let setup = PageSetup::new(PageSize::A4, Orientation::Landscape);

    let plan = paginate(&doc, &m, &setup, None, false)?;
    println!(
        "{} pages ({}), scale {}",
        plan.page_count(),
        plan.grid_label(),
        plan.scale
    );
    let dir = std::env::temp_dir();
    for (n, page) in plan.pages.iter().enumerate() {
        let cmds = render_page(&plan, page.index, &doc, &m)?;
        let path = dir.join(format!("wide-page-{}.svg", n + 1));
        std::fs::write(&path, export_vector(&cmds, &plan.page_frame())).expect("write page");
        println!("row {} col {} -> {}", page.index.row, page.index.col, path.display());
    }

    let fit = paginate(&doc, &m, &setup, None, true)?;
    println!("fit to one page: {} at scale {:.3}", fit.grid_label(), fit.scale);
    Ok(())
}
