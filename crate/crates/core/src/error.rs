use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sequence is not log-convex at index {index}: m_n^2 > m_(n-1) m_(n+1)")]
    NotLogConvex { index: usize },

    #[error("sequence violates (k+l)!/m_(k+l) <= k!/m_k * l!/m_l at k={k}, l={l}")]
    NotFactorialSubmultiplicative { k: usize, l: usize },

    #[error("sum of 1/t_k does not converge ({0})")]
    DivergentProduct(String),

    #[error("weight violates {property} at t={t}")]
    WeightInvariant { property: &'static str, t: f64 },

    #[error("weight is not admissible: {0}")]
    Inadmissible(String),

    #[error("log-weight is identically zero; use the Fejer kernel for this weight")]
    DegenerateWeight,

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("shift by {t} moves mass outside the window [-{half_width}, {half_width}]")]
    ShiftOutOfWindow { t: f64, half_width: f64 },

    #[error("function has non-negligible mass near the window edge (fraction {fraction:.3e})")]
    WindowTail { fraction: f64 },

    #[error("insufficient smoothness for derivative order {order} (tail fraction {fraction:.3e})")]
    InsufficientSmoothness { order: usize, fraction: f64 },

    #[error("operation not available on this backend: {0}")]
    BackendMismatch(String),

    #[error("kernel has no certification for r=1")]
    UncertifiedKernel,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
