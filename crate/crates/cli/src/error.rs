use euler_attractor::attractor::AttractorError;
use euler_attractor::decomp::DecompError;
use euler_attractor::density::DensityError;
use euler_attractor::json::JsonError;
use euler_attractor::mproots::RootError;
use euler_attractor::szego::SzegoError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    code: i32,
    message: String,
}

#[derive(Serialize)]
struct ErrorDocument<'a> {
    error: ErrorBody<'a>,
}

impl CliError {
    /// 1 usage, 2 validation, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
        }
    }

    /// Single-line JSON for stderr.
    pub fn to_json(&self) -> String {
        let doc = ErrorDocument {
            error: ErrorBody {
                kind: self.kind(),
                code: self.exit_code(),
                message: self.to_string(),
            },
        };
        serde_json::to_string(&doc)
            .unwrap_or_else(|_| format!("{{\"error\":{{\"code\":{}}}}}", self.exit_code()))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(format!("json: {e}"))
    }
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<RootError> for CliError {
    fn from(e: RootError) -> Self {
        match e {
            RootError::InvalidDegree | RootError::PrecisionTooLow { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<AttractorError> for CliError {
    fn from(e: AttractorError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SzegoError> for CliError {
    fn from(e: SzegoError) -> Self {
        match e {
            SzegoError::DegenerateFit { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<DecompError> for CliError {
    fn from(e: DecompError) -> Self {
        match e {
            DecompError::QuadratureNotConverged { .. } | DecompError::Precision(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<DensityError> for CliError {
    fn from(e: DensityError) -> Self {
        match e {
            DensityError::Roots(r) => r.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
