use oamlos::beam::BeamError;
use oamlos::channel::ChannelError;
use oamlos::geometry::GeometryError;
use oamlos::link::LinkError;
use std::path::PathBuf;
use thiserror::Error;

/// Malformed scenario or manifest text.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}:{line}:{column}: {message}")]
pub struct ParseError {
    pub path: String,
    /// One-based; zero when the parser gave no location.
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    /// Builds the error from a byte span into `text`.
    pub fn at_span(path: &str, text: &str, span: Option<std::ops::Range<usize>>, message: impl Into<String>) -> Self {
        let (line, column) = match span {
            Some(s) => {
                let before = &text[..s.start.min(text.len())];
                let line = before.matches('\n').count() + 1;
                let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
                (line, column)
            }
            None => (0, 0),
        };
        Self { path: path.to_string(), line, column, message: message.into().trim_end().to_string() }
    }
}

/// A well-formed scenario that breaks one of its invariants.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invariant violated: {invariant} ({detail})")]
pub struct ValidationError {
    pub invariant: &'static str,
    pub detail: String,
}

impl ValidationError {
    pub fn new(invariant: &'static str, detail: impl Into<String>) -> Self {
        Self { invariant, detail: detail.into() }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Beam(#[from] BeamError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("non-finite value {value} in column {column}")]
    NonFinite { column: String, value: f64 },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("manifest: {0}")]
    Manifest(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Short category printed with every diagnostic.
    pub fn category(&self) -> &'static str {
        match self {
            Self::Parse(_) => "parse",
            Self::Validation(_) => "validation",
            Self::Io { .. } | Self::Csv(_) => "io",
            Self::Beam(_) | Self::Geometry(_) | Self::Channel(_) | Self::Link(_) | Self::NonFinite { .. } => "compute",
            Self::Manifest(_) => "manifest",
        }
    }

    /// Process exit code; 2 is left to the argument parser.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "parse" => 3,
            "validation" => 4,
            "io" => 5,
            "compute" => 6,
            _ => 7,
        }
    }
}
