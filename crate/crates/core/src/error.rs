use thiserror::Error;

/// Everything that can go wrong across the pipeline.
///
/// Errors split into two families: *validation* errors (bad input: malformed
/// configs, malformed relation strings, out-of-range parameters) and *runtime*
/// errors (I/O and serialization failures while doing otherwise-valid work).
/// The CLI maps the former to exit code 1 and the latter to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sentence {raw:?} tokenizes to nothing")]
    EmptySentence { raw: String },

    #[error("token {token:?} in sentence {raw:?} contains non-alphanumeric characters")]
    NonAlphanumericToken { raw: String, token: String },

    #[error("sentence distribution has no entries")]
    EmptyDistribution,

    #[error("sentence weight {value} at index {index} is invalid: weight must be finite and non-negative")]
    InvalidWeight { index: usize, value: f64 },

    #[error("sentence distribution needs at least one strictly positive weight")]
    NoPositiveWeight,

    #[error("corpus has {len} token(s); at least 2 are required to form training pairs")]
    CorpusTooShort { len: usize },

    #[error("invalid value for {field}: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("negative sampling requested {requested} noise draws but the vocabulary has only {vocab} words")]
    TooManyNoiseDraws { requested: usize, vocab: usize },

    #[error("syntax error at position {position}: {message}")]
    RelationSyntax { position: usize, message: String },

    #[error("invalid relation: {message}")]
    RelationInvalid { message: String },

    #[error("word {word:?} is not in the vocabulary")]
    UnknownWord { word: String },

    #[error("vector for {name:?} has zero norm; cosine is undefined")]
    ZeroNorm { name: String },

    #[error("word {word:?} has an empty context set")]
    EmptyContext { word: String },

    #[error("scatter output requires 2-dimensional vectors, but the model has dim = {dim}; retrain with dim = 2 or emit CSV/JSON instead")]
    ScatterDimension { dim: usize },

    #[error("failed to read config {path}: {message}")]
    ConfigRead { path: String, message: String },

    #[error("failed to parse config {path}: {message}")]
    ConfigParse { path: String, message: String },

    #[error("experiment {name:?}: {source}")]
    Experiment {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("failed to serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach an experiment name to an error bubbling out of a pipeline stage.
    pub fn in_experiment(self, name: &str) -> Error {
        Error::Experiment {
            name: name.to_string(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by bad user input rather than failures of the
    /// machinery itself. Used by the CLI to pick the exit code.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Io(_) | Error::Json(_) => false,
            Error::Experiment { source, .. } => source.is_validation(),
            _ => true,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
