use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {detail}")]
    Shape { op: &'static str, detail: String },

    #[error("orientation mismatch in {op}: expected a {expected} hypervector")]
    Orientation { op: &'static str, expected: &'static str },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("sample of entry ({k}, {l}) at t = {t} is not finite")]
    NonFiniteSample { k: usize, l: usize, t: f64 },

    #[error("w^H v = 0: the starting vectors cannot be normalized")]
    DegenerateStart,

    #[error("serious breakdown at iteration {iteration}: cond(beta) = {condition:e}")]
    SeriousBreakdown {
        iteration: usize,
        condition: f64,
        /// The completed prefix, still usable for a shorter resolvent.
        partial: Box<crate::lanczos::LanczosResult>,
    },

    #[error("singular matrix in continued fraction at depth {depth} (cond estimate {condition:e})")]
    ResolventSingular { depth: usize, condition: f64 },

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("step size underflow at t = {t}")]
    Stiff { t: f64 },

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn shape(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Shape { op, detail: detail.into() }
    }
}
