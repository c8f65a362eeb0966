use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("singular transform: {0}")]
    Singular(String),
    #[error("membership check failed: {0}")]
    Membership(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }

    /// True for errors that map to the usage/parse exit code.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::Parse { .. } | Error::InvalidParameter(_) => true,
            Error::Context { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub trait Context<T> {
    fn context(self, ctx: impl Into<String>) -> Result<T>;
}

impl<T, E: Into<Error>> Context<T> for std::result::Result<T, E> {
    fn context(self, ctx: impl Into<String>) -> Result<T> {
        self.map_err(|e| Error::Context { context: ctx.into(), source: Box::new(e.into()) })
    }
}
