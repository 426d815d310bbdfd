use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("imaginary residual {residual:e} exceeds tolerance for a real field")]
    HermitianViolation { residual: f64 },

    #[error("axis {axis} out of range for a {dims}-dimensional grid")]
    AxisOutOfRange { axis: usize, dims: usize },

    #[error("grid with n = {n} does not resolve frequency {frequency} (need n > {})", 2 * frequency)]
    UnderResolved { n: usize, frequency: usize },

    #[error("shrinkage parameter must be nonnegative, got {0}")]
    NegativeLambda(f64),

    #[error("time step must be positive, got {0}")]
    NonpositiveDt(f64),

    #[error("invalid shrinkage schedule: {0}")]
    InvalidSchedule(String),

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("equation requires a two-dimensional grid")]
    NotTwoDimensional,

    #[error("unknown initial condition `{0}`")]
    UnknownInitialSpec(String),

    #[error("invalid equation parameters: {0}")]
    InvalidParams(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("solver failed at step {step}: {source}")]
    Solver {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed spectrum dump at line {line}: {message}")]
    Dump { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn at_step(self, step: usize) -> Self {
        match self {
            e @ Error::Solver { .. } => e,
            e => Error::Solver {
                step,
                source: Box::new(e),
            },
        }
    }

    /// Config problems map to exit code 1, everything else to 2.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}
