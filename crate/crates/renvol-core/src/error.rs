use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("metric is singular or not positive definite at the requested point ({detail})")]
    SingularMetric { detail: String },
    #[error("point outside the chart domain: {detail}")]
    OutOfDomain { detail: String },
    #[error("differentiation scheme cannot reach order {requested} (supported {supported})")]
    DifferentiationFailure { requested: usize, supported: usize },
    #[error("operation requires dimension {required}, metric has dimension {actual}")]
    UnsupportedDimension { required: String, actual: usize },
    #[error("embedding is degenerate at the requested parameter point ({detail})")]
    DegenerateImmersion { detail: String },
    #[error("corner faces are tangential: |cos θ₀| = {cos_theta:.6} exceeds margin")]
    TangentialFaces { cos_theta: f64 },
    #[error("series fit failed: {detail}")]
    FitFailure { detail: String },
    #[error("quadrature refinement did not contract (estimates {coarse:.3e} -> {fine:.3e})")]
    QuadratureDivergence { coarse: f64, fine: f64 },
    #[error("Richardson extrapolation diverged: {detail}")]
    ExtrapolationDivergence { detail: String },
    #[error("geodesic normal flow reaches a caustic within width {width}")]
    CausticReached { width: f64 },
    #[error("ODE solve failed: {detail}")]
    OdeSolveFailure { detail: String },
    #[error("solver failed: {detail}")]
    SolveFailure { detail: String },
    #[error("Jacobi uniqueness hypothesis violated: |L̊|² = {value:.4} > 3")]
    HypothesisViolated { value: f64 },
    #[error("unsupported configuration: {detail}")]
    Unsupported { detail: String },
    #[error("configuration error: {detail}")]
    Config { detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
