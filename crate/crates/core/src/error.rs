use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed spec: {0}")]
    MalformedSpec(String),

    #[error("no positive bubble parameters: left-null residual {residual:e} exceeds {tol:e}")]
    NoBubbleParameters { residual: f64, tol: f64 },

    #[error("boundary coefficients admit no common center: y0N spread {spread:e} (mean {mean})")]
    IncompatibleBoundaryCoefficients { mean: f64, spread: f64, per_row: Vec<f64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular point: |y - center| = {distance:e}")]
    SingularPoint { distance: f64 },

    #[error("bad bracket: min w = {min_w:e} below -{tol_w:e} already at lambda = {lambda}")]
    BadBracket { lambda: f64, min_w: f64, tol_w: f64 },

    #[error("stencil leaves the domain at {point:?} (h = {h})")]
    StencilOutOfDomain { point: Vec<f64>, h: f64 },

    #[error("quadratic for t has no real root: sigma^2 = {sigma2}, d^2 = {d2}")]
    NoRealRoot { sigma2: f64, d2: f64 },

    #[error("least-squares fit did not converge after {iterations} iterations (rms {rms:e})")]
    FitDiverged { iterations: usize, rms: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepFailure { t: f64, h: f64 },

    #[error("component {component} lost positivity at r = {r}")]
    PositivityLoss { r: f64, component: usize },

    #[error("shooting failed after {iterations} iterations (residual {residual:e})")]
    ShootFailed { iterations: usize, residual: f64 },

    #[error("no zero crossing before t = {horizon}")]
    HorizonExceeded { horizon: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable identifier used in CLI error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedSpec(_) => "MalformedSpec",
            Error::NoBubbleParameters { .. } => "NoBubbleParameters",
            Error::IncompatibleBoundaryCoefficients { .. } => "IncompatibleBoundaryCoefficients",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::SingularPoint { .. } => "SingularPoint",
            Error::BadBracket { .. } => "BadBracket",
            Error::StencilOutOfDomain { .. } => "StencilOutOfDomain",
            Error::NoRealRoot { .. } => "NoRealRoot",
            Error::FitDiverged { .. } => "FitDiverged",
            Error::StepFailure { .. } => "StepFailure",
            Error::PositivityLoss { .. } => "PositivityLoss",
            Error::ShootFailed { .. } => "ShootFailed",
            Error::HorizonExceeded { .. } => "HorizonExceeded",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
            Error::Csv(_) => "Csv",
        }
    }

    /// Whether the error stems from bad input (as opposed to a failed check).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::MalformedSpec(_)
                | Error::InvalidArgument(_)
                | Error::SingularPoint { .. }
                | Error::BadBracket { .. }
                | Error::StencilOutOfDomain { .. }
                | Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
        )
    }
}
