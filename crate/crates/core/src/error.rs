use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// `offset` is 1-based and counts characters.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("duplicate variable `{0}` in context")]
    DuplicateVariable(String),

    #[error("variable index {index} outside a context of {len} variables")]
    VariableOutOfRange { index: usize, len: usize },

    #[error("contexts with {0} variables are not supported (max 64)")]
    TooManyVariables(usize),

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),

    #[error("model has no worlds")]
    EmptyModel,

    #[error("order is not antisymmetric: `{0}` and `{1}` are mutually related")]
    NotAntisymmetric(String, String),

    #[error("valuation of `{var}` is not persistent: `{from}` below `{to}`")]
    NotPersistent {
        var: String,
        from: String,
        to: String,
    },

    #[error("model is not rooted")]
    NotRooted,

    #[error("model is not tree-like")]
    NotATree,

    #[error("formula is not NNIL: {0}")]
    NotNnil(String),

    #[error("contexts differ: {0} vs {1} variables")]
    ContextMismatch(usize, usize),

    #[error("set of nodes is not an upset")]
    NotAnUpset,

    #[error("tree is not a node of the universal model")]
    NotInUniversalModel,

    #[error("`{sub}` is not a submodel of the given model: {reason}")]
    NotASubmodel { sub: String, reason: String },

    #[error("bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("resource guard exceeded: {0}")]
    ResourceGuard(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
