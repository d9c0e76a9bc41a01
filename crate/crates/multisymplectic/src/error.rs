use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("distribution is not transverse at the sampled point (base rank {rank} < {m})")]
    NotTransverse { rank: usize, m: usize },

    #[error("chart has no jet metadata; contact operations need velocity pairings")]
    MissingJetMeta,

    #[error("direction {name} is not in the kernel at a sampled point (residual {residual:.3e})")]
    NotInKernel { name: String, residual: f64 },

    #[error(
        "form is not invariant along {name}: coefficient derivative {residual:.3e} exceeds {tol:.3e}"
    )]
    NonProjectable {
        name: String,
        residual: f64,
        tol: f64,
    },

    #[error("direction {name} fails the weak-kernel test (residual {residual:.3e})")]
    NotWeakKernel { name: String, residual: f64 },

    #[error("{0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),
}
