use std::path::PathBuf;

#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("validation failed:\n{}", report.join("\n"))]
    Validation { report: Vec<String> },

    #[error("stage '{stage}' failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("service call to '{endpoint}' failed after {attempts} attempts: {message}")]
    Service {
        endpoint: String,
        attempts: u32,
        message: String,
    },

    #[error("malformed service response from '{endpoint}': {message}")]
    Protocol { endpoint: String, message: String },

    #[error("{0}")]
    Geometry(String),

    #[error("no assets for category '{0}'")]
    EmptyCategory(String),

    #[error("{0}")]
    Bench(String),

    #[error("file '{path}': {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("image: {0}")]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code: 2 validation, 3 stage failure, 4 service failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. } => 2,
            Error::Service { .. } | Error::Protocol { .. } => 4,
            Error::Stage { source, .. } => match source.as_ref() {
                Error::Service { .. } | Error::Protocol { .. } => 4,
                _ => 3,
            },
            _ => 3,
        }
    }

    pub fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
