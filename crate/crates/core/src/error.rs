use thiserror::Error;

use crate::model::ElementId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("element {0} does not exist or has the wrong kind for this operation")]
    IdMismatch(ElementId),
    #[error("connection endpoint {0} is not a class in this document")]
    DanglingEndpoint(ElementId),
    #[error("a connection cannot join class {0} to itself")]
    SelfLoopRejected(ElementId),
    #[error("a glyph needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("connection {0} is selected but one of its classes is not")]
    SelectionNotClosed(ElementId),
    #[error("nothing to copy once connections are filtered out")]
    EmptyEffectiveSelection,
    #[error("parse error at line {line}{}: {message}", context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    Parse {
        line: usize,
        context: Option<String>,
        message: String,
    },
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("nothing to print: the document is empty and no region was given")]
    EmptyPrintRegion,
    #[error("invalid print region: width and height must be positive")]
    InvalidRegion,
    #[error("page ({row}, {col}) is outside the page plan")]
    IndexOutOfRange { row: usize, col: usize },
    #[error("raster of {width}x{height} pixels exceeds the 16384x16384 limit")]
    RasterTooLarge { width: u64, height: u64 },
    #[error("resolution must be a positive number of dots per inch, got {0}")]
    InvalidDpi(f64),
    #[error("malformed session message: {0}")]
    Protocol(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name, used by the session protocol.
    pub fn code(&self) -> &'static str {
        match self {
            Error::IdMismatch(_) => "id-mismatch",
            Error::DanglingEndpoint(_) => "dangling-endpoint",
            Error::SelfLoopRejected(_) => "self-loop",
            Error::TooFewPoints(_) => "too-few-points",
            Error::SelectionNotClosed(_) => "selection-not-closed",
            Error::EmptyEffectiveSelection => "empty-selection",
            Error::Parse { .. } => "parse",
            Error::UnsupportedVersion(_) => "unsupported-version",
            Error::Integrity(_) => "integrity",
            Error::EmptyPrintRegion => "empty-print-region",
            Error::InvalidRegion => "invalid-region",
            Error::IndexOutOfRange { .. } => "index-out-of-range",
            Error::RasterTooLarge { .. } => "raster-too-large",
            Error::InvalidDpi(_) => "invalid-dpi",
            Error::Protocol(_) => "protocol",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn parse(line: usize, context: Option<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            context,
            message: message.into(),
        }
    }
}
