//! Plain-text snapshot and curve files, CSV result tables and the run
//! manifest.

mod curves;
mod results;
mod snapshot;
mod text;

pub use curves::{curves_to_string, parse_curves, read_curves, write_curves, CurveFile, CurveRecord};
pub use results::{read_manifest, read_results, results_to_string, write_manifest, write_results, Manifest};
pub use snapshot::{parse_snapshot, read_snapshot, snapshot_to_string, write_snapshot, Snapshot};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl IoError {
    /// `true` for malformed content, as opposed to I/O failures.
    pub fn is_format(&self) -> bool {
        matches!(self, IoError::Format { .. } | IoError::Json(_))
    }
}

/// Shortest decimal form is not used for reals: 17 significant digits in
/// scientific notation round-trip every double.
pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}
