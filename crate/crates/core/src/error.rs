use thiserror::Error;

/// Errors raised by graph, operator, filter and network routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("signals or operators live on different graph signal spaces ({0})")]
    SpaceMismatch(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("node {node} has zero degree; the normalized Laplacian is undefined")]
    IsolatedNode { node: usize },

    #[error("{0} requires an undirected graph")]
    DirectedGraph(&'static str),

    #[error("operator is (numerically) singular at z = {re}{im:+}i: {detail}")]
    Singular { re: f64, im: f64, detail: String },

    #[error("operator is not normal; generic and continuous filters need a normal operator (use entire or holomorphic filters instead)")]
    NonNormal,

    #[error("eigensolver failed to converge (residual {residual:e})")]
    EigenSolver { residual: f64 },

    #[error("contour is invalid: {0}")]
    Contour(String),

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("layer {layer}: {detail}")]
    Layer { layer: usize, detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(context: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context: context.into(),
            expected,
            found,
        }
    }

    pub(crate) fn singular(z: (f64, f64), detail: impl Into<String>) -> Self {
        Error::Singular {
            re: z.0,
            im: z.1,
            detail: detail.into(),
        }
    }

    /// True for errors caused by numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::EigenSolver { .. } | Error::NonNormal | Error::Contour(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
