use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the range the model is defined on.
    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The likelihood vanishes at every grid node, so the posterior cannot be
    /// normalized.
    #[error("degenerate evidence: likelihood of counts {counts:?} is zero on the whole grid")]
    DegenerateEvidence { counts: [u64; 4] },

    #[error("confidence interval did not converge: best mass {best_mass} for target {target} (tau {tau})")]
    Convergence {
        target: f64,
        tau: f64,
        best_mass: f64,
        best_a: f64,
        best_b: f64,
    },

    /// A failure inside one sweep cell, tagged with its coordinates.
    #[error("cell alpha={alpha}, nu={nu}, phi={phi}: {source}")]
    Cell {
        alpha: f64,
        nu: u64,
        phi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for this error: validation 2, computation 3, I/O 4.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain { .. } | Error::Argument(_) | Error::Config { .. } => 2,
            Error::DegenerateEvidence { .. } | Error::Convergence { .. } => 3,
            Error::Cell { source, .. } => source.exit_code(),
            Error::Io(_) => 4,
        }
    }
}
