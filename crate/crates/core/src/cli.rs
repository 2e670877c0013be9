//! Command-line front end. Each subcommand composes library calls; output
//! on stdout is one summary line followed by `key=value` lines.
//!
//! Exit status: 0 success, 1 failure (for `validate`: the file breaks a
//! model invariant), 2 usage error or unreadable input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::codegen::{self, CodegenTarget};
use crate::error::Error;
use crate::geometry::TextMetrics;
use crate::model::{Document, Rect};
use crate::persistence::{self, Preferences};
use crate::render::{self, svg, Frame, Orientation, PageSetup, PageSize, ViewState};
use crate::session::Session;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "minuml",
    version,
    about = "Minimal UML class diagrams: validate, export and paginate .muml files"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a diagram file against every model invariant.
    Validate { path: PathBuf },
    /// Write code skeletons or a picture of the diagram.
    Export {
        path: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: PathBuf,
        /// World-space rectangle `x,y,w,h` to draw instead of the whole diagram.
        #[arg(long, value_parser = parse_region)]
        region: Option<Rect>,
        /// Raster resolution for png.
        #[arg(long, default_value_t = 96.0)]
        dpi: f64,
    },
    /// Split the diagram into printable pages, one SVG file per page.
    Pages {
        path: PathBuf,
        #[arg(long, value_parser = parse_page_size)]
        page_size: Option<PageSize>,
        #[arg(long, value_parser = parse_orientation)]
        orientation: Option<Orientation>,
        #[arg(long)]
        fit_one_page: bool,
        #[arg(long, value_parser = parse_region)]
        region: Option<Rect>,
    },
    /// Run an editor session over framed messages on stdin/stdout.
    Serve { path: Option<PathBuf> },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Java,
    Cpp,
    Svg,
    Png,
}

fn parse_region(s: &str) -> Result<Rect, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("expected x,y,w,h numbers, got {s:?}"))?;
    match parts.as_slice() {
        &[x, y, w, h] if parts.iter().all(|v| v.is_finite()) && w > 0.0 && h > 0.0 => Ok(Rect::new(x, y, w, h)),
        [_, _, _, _] => Err("region needs finite values and a positive width and height".into()),
        _ => Err(format!("expected four comma-separated numbers, got {s:?}")),
    }
}

fn parse_page_size(s: &str) -> Result<PageSize, String> {
    PageSize::from_name(s).ok_or_else(|| format!("unknown page size {s:?} (letter or a4)"))
}

fn parse_orientation(s: &str) -> Result<Orientation, String> {
    Orientation::from_name(s).ok_or_else(|| format!("unknown orientation {s:?} (p or l)"))
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: i32, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "minuml: {msg}");
        code
    }
}

/// Runs the CLI with `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut io = Io { out, err };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(io.err, "{shown}");
                EXIT_USAGE
            } else {
                let _ = write!(io.out, "{shown}");
                EXIT_OK
            };
        }
    };
    let loaded = persistence::load_prefs_file();
    for w in &loaded.warnings {
        let _ = writeln!(io.err, "minuml: warning: {w}");
    }
    let prefs = loaded.prefs;
    match cli.command {
        Cmd::Validate { path } => validate(&mut io, &path),
        Cmd::Export {
            path,
            format,
            out,
            region,
            dpi,
        } => export(&mut io, &path, format, &out, region, dpi),
        Cmd::Pages {
            path,
            page_size,
            orientation,
            fit_one_page,
            region,
        } => {
            let setup = PageSetup::new(
                page_size.unwrap_or(prefs.page_size),
                orientation.unwrap_or(prefs.orientation),
            );
            pages(&mut io, &path, setup, fit_one_page, region)
        }
        Cmd::Serve { path } => serve(&mut io, path.as_deref(), prefs),
    }
}

fn read(io: &mut Io, path: &Path) -> Result<Vec<u8>, i32> {
    std::fs::read(path).map_err(|e| io.fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn load(io: &mut Io, path: &Path) -> Result<Document, i32> {
    let bytes = read(io, path)?;
    persistence::parse(&bytes).map_err(|e| io.fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn validate(io: &mut Io, path: &Path) -> i32 {
    let bytes = match read(io, path) {
        Ok(b) => b,
        Err(code) => return code,
    };
    let doc = match persistence::parse_unchecked(&bytes) {
        Ok(doc) => doc,
        Err(e) => {
            let _ = writeln!(io.out, "unreadable\nerror={e}");
            return EXIT_USAGE;
        }
    };
    let violations = doc.violations();
    let _ = writeln!(
        io.out,
        "{}\nelements={}\nviolations={}",
        if violations.is_empty() { "valid" } else { "invalid" },
        doc.len(),
        violations.len()
    );
    for v in &violations {
        let _ = writeln!(io.out, "violation={v}");
    }
    if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn write_file(io: &mut Io, path: &Path, bytes: &[u8]) -> Result<(), i32> {
    std::fs::write(path, bytes).map_err(|e| io.fail(EXIT_FAILURE, format!("cannot write {}: {e}", path.display())))
}

fn export(io: &mut Io, path: &Path, format: Format, out: &Path, region: Option<Rect>, dpi: f64) -> i32 {
    let doc = match load(io, path) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let mut extra = Vec::new();
    let bytes = match format {
        Format::Java => codegen::emit_document(&doc, CodegenTarget::Java).into_bytes(),
        Format::Cpp => codegen::emit_document(&doc, CodegenTarget::Cpp).into_bytes(),
        Format::Svg | Format::Png => {
            let scene = render::render_scene(&doc, &TextMetrics::default(), &ViewState::default());
            let frame = match region {
                Some(r) => Frame::world(r),
                None => Frame::fit(&scene),
            };
            if let Format::Svg = format {
                svg::export_vector(&scene, &frame)
            } else {
                match render::raster::raster_size(&frame, dpi) {
                    Ok((w, h)) => extra.push(format!("width={w}\nheight={h}")),
                    Err(e @ Error::InvalidDpi(_)) => return io.fail(EXIT_USAGE, e),
                    Err(e) => return io.fail(EXIT_FAILURE, e),
                }
                match render::export_raster(&scene, &frame, dpi) {
                    Ok(png) => png,
                    Err(e) => return io.fail(EXIT_FAILURE, e),
                }
            }
        }
    };
    if let Err(code) = write_file(io, out, &bytes) {
        return code;
    }
    let name = format!("{format:?}").to_ascii_lowercase();
    let _ = writeln!(
        io.out,
        "exported\nformat={name}\nfile={}\nbytes={}",
        out.display(),
        bytes.len()
    );
    for line in extra {
        let _ = writeln!(io.out, "{line}");
    }
    EXIT_OK
}

fn pages(io: &mut Io, path: &Path, setup: PageSetup, fit: bool, region: Option<Rect>) -> i32 {
    let doc = match load(io, path) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let m = TextMetrics::default();
    let plan = match render::paginate(&doc, &m, &setup, region, fit) {
        Ok(p) => p,
        Err(e @ (Error::EmptyPrintRegion | Error::InvalidRegion)) => return io.fail(EXIT_USAGE, e),
        Err(e) => return io.fail(EXIT_FAILURE, e),
    };
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "diagram".into());
    let mut files = Vec::new();
    for (n, page) in plan.pages.iter().enumerate() {
        let cmds = match render::render_page(&plan, page.index, &doc, &m) {
            Ok(c) => c,
            Err(e) => return io.fail(EXIT_FAILURE, e),
        };
        let file = PathBuf::from(format!("{stem}-page-{}.svg", n + 1));
        if let Err(code) = write_file(io, &file, &svg::export_vector(&cmds, &plan.page_frame())) {
            return code;
        }
        files.push(file);
    }
    let r = plan.region;
    let _ = writeln!(
        io.out,
        "{}\npages={}\nscale={}\nregion={},{},{},{}\npage_size={}\norientation={}",
        plan.grid_label(),
        plan.page_count(),
        plan.scale,
        r.x,
        r.y,
        r.width,
        r.height,
        setup.size.name(),
        setup.orientation.name()
    );
    for f in files {
        let _ = writeln!(io.out, "file={}", f.display());
    }
    EXIT_OK
}

fn serve(io: &mut Io, path: Option<&Path>, prefs: Preferences) -> i32 {
    let doc = match path {
        Some(p) => match load(io, p) {
            Ok(d) => d,
            Err(code) => return code,
        },
        None => Document::new(),
    };
    let mut session = Session::new(doc, prefs);
    session.path = path.map(Path::to_path_buf);
    let stdin = std::io::stdin();
    match session.serve(&mut stdin.lock(), &mut io.out) {
        Ok(()) => EXIT_OK,
        Err(e) => io.fail(EXIT_FAILURE, e),
    }
}
