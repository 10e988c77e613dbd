use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no data lines")]
    NoData,
    #[error("empty session list")]
    NoSessions,
    #[error("session {session}: page index {index} outside 1..={page_count}")]
    PageOutOfRange {
        session: usize,
        index: usize,
        page_count: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("vectors must have equal length >= 2 (got {left} and {right})")]
    VectorLength { left: usize, right: usize },
    #[error("ACV undefined for a bicluster with {rows} row(s) and {cols} column(s)")]
    DegenerateBicluster { rows: usize, cols: usize },
    #[error("index {index} out of range for axis of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("overlap degree needs at least two biclusters, got {0}")]
    TooFewBiclusters(usize),
    #[error("requested {k} clusters for {points} points")]
    TooManyClusters { k: usize, points: usize },
    #[error("negative fitness {0}")]
    NegativeFitness(f64),
    #[error("invalid configuration: {0}")]
    Config(String),
}
