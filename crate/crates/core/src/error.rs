use thiserror::Error;

use crate::expr::ParseError;
use crate::jet::JetError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("Levi form {levi:e} is not positive: chart is not strongly pseudoconvex here")]
    NotPseudoconvex { levi: f64 },
    #[error("frame is degenerate (condition number {condition:e})")]
    DegenerateFrame { condition: f64 },
    #[error("generating field leaves the contact distribution (residual {residual:e})")]
    ContactViolation { residual: f64 },
    #[error("gauge function is not real (imaginary part {imag:e})")]
    NonRealGauge { imag: f64 },
    #[error("operator is not defined on bidegree {0}")]
    UndefinedOnBidegree(&'static str),
    #[error("prerequisite failed: {0}")]
    PrerequisiteFailed(String),
    #[error("operation needs target dimension {expected}, got {actual}")]
    WrongDimension { expected: usize, actual: usize },
    #[error("second fundamental form is not symmetric (asymmetry {asymmetry:e})")]
    NonSymmetric { asymmetry: f64 },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("domain box leaves the chart: {0}")]
    DomainOutOfChart(String),
    #[error("immersion component {component} is not real (imaginary part {imag:e})")]
    NonRealImmersion { component: usize, imag: f64 },
    #[error("chart file: {field}: {message}")]
    ChartParse { field: String, message: String },
    #[error("expression `{field}`: {source}")]
    Expr {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error("invalid configuration for `{field}`: {message}")]
    Config { field: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
