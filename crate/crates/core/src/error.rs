use thiserror::Error;

pub type Result<T, E = GdftError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GdftError {
    #[error("group too large: order {order} exceeds cap {cap}")]
    GroupTooLarge { order: usize, cap: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("unknown group family `{0}`")]
    UnknownFamily(String),

    #[error("parameter {param} out of supported range for {family}")]
    BadParameter { family: String, param: i64 },

    #[error("subgroup is not normal")]
    NotNormal,

    #[error("no qualifying triple (N, H, K) for group of order {order}; fall back to the naive DFT")]
    NoTriple { order: usize },

    #[error("strategy `{strategy}` is not applicable to group {group}: {reason}")]
    NotApplicable {
        strategy: String,
        group: String,
        reason: String,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("input support outside HK: {} offending elements (first: {:?})", .0.len(), .0.first())]
    SupportOutside(Vec<usize>),

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<GdftError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GdftError {
    pub fn context(self, context: impl Into<String>) -> Self {
        GdftError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping context wrappers.
    pub fn root(&self) -> &GdftError {
        match self {
            GdftError::Context { source, .. } => source.root(),
            other => other,
        }
    }
}
