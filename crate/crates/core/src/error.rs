use thiserror::Error;

/// Errors raised by the exact and numeric layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by the zero polynomial")]
    ZeroPolynomialDivisor,
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeros,
    #[error("discriminant of a constant polynomial")]
    ConstantPolynomial,
    #[error("pole at specialization point: {0}")]
    Pole(String),
    #[error("curve polynomial must have degree 5 or 6, got {0}")]
    WrongDegree(usize),
    #[error("curve polynomial is not squarefree")]
    NotSquarefree,
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("splitting does not multiply to the curve polynomial")]
    SplittingMismatch,
    #[error("splitting factor of degree {0} (must be at most 2)")]
    SplittingDegree(usize),
    #[error("delta = det(g_ij) vanishes; the Richelot construction degenerates")]
    DeltaZero,
    #[error("zero twist")]
    ZeroTwist,
    #[error("field {0} does not contain i")]
    NoImaginaryUnit(String),
    #[error("invalid Mumford pair: {0}")]
    InvalidMumford(String),
    #[error("Mumford arithmetic needs an odd-degree (quintic) model")]
    EvenDegreeModel,
    #[error("classes live on different curves")]
    CurveMismatch,
    #[error("{0} does not divide the curve polynomial")]
    NotADivisor(String),
    #[error("lambda = 0 is a pole of the Lax matrix")]
    LaxPole,
    #[error("x = y (l2 = 0): the xi chart is singular")]
    XiChartSingular,
    #[error("z = 0 is a pole of the spectral chart")]
    SpectralPole,
    #[error("state violates a constraint: {0}")]
    Constraint(String),
    #[error("point is off the curve (relative residual {0:e})")]
    OffCurve(f64),
    #[error("no admissible splitting: {0}")]
    NoSplitting(String),
    #[error("tower depth must be at least 2, got {0}")]
    TowerDepth(usize),
    #[error("tower depth {0} exceeds the cap {1}")]
    TowerDepthCap(usize, usize),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("no samples to evaluate")]
    NoSamples,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
