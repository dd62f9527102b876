use thiserror::Error;

/// A fractional power of a negative value was requested.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("imaginary state: {quantity} = {value:e} < 0 at cell ({i}, {j})")]
pub struct ImaginaryState {
    pub i: usize,
    pub j: usize,
    pub value: f64,
    pub quantity: &'static str,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("field does not match grid: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Imaginary(#[from] ImaginaryState),
    #[error("empty mass series")]
    EmptySeries,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    /// `origin` is `line N` for config files or `command line` for flags.
    #[error("config error at {origin}, field `{field}`: {message}")]
    Config {
        origin: String,
        field: String,
        message: String,
    },
    #[error("malformed csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
