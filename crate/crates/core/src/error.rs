use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("dangling vertex index {index} in {context} (structure has {vertices} vertices)")]
    DanglingVertex {
        index: usize,
        vertices: usize,
        context: String,
    },

    #[error("unknown label '{label}' in {context}")]
    UnknownLabel { label: String, context: String },

    #[error("invalid vertex {0}")]
    InvalidVertex(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("transient component: {0}")]
    TransientComponent(String),

    #[error("finite language, λ undefined")]
    FiniteLanguage,

    #[error("not almost semisimple at tolerance {tolerance:e} after {iterations} iterations")]
    NotAlmostSemisimple { tolerance: f64, iterations: usize },

    #[error("structure is not semisimple (period {period}); build power_graph(Γ, {period}) first")]
    NotSemisimple { period: usize },

    #[error("vertex {0} does not lie in a maximal component")]
    NotMaximal(usize),

    #[error("enumeration budget exceeded: {required} paths needed, budget is {budget}")]
    BudgetExceeded { required: String, budget: u64 },

    #[error("empty sphere: no paths of length {0} from the initial vertex")]
    EmptySphere(usize),

    #[error("matrix for '{letter}' has determinant {det}, expected 1")]
    NonUnitDeterminant { letter: String, det: f64 },

    #[error("letter '{0}' has no image under the action")]
    UnmappedLetter(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage {
            stage,
            source: Box::new(source),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}
