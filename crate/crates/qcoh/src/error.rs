use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("quotient ring is not finite dimensional below degree cap {0}")]
    NotFiniteDimensional(u32),
    #[error("relations make 1 vanish")]
    InconsistentRelations,
    #[error("generator map does not send relation {0} to zero")]
    NotAHomomorphism(usize),
    #[error("operands live in different cohomology rings")]
    RingMismatch,
    #[error("operands have different truncation boxes")]
    BoxMismatch,
    #[error("constant term not admissible: {0}")]
    BadConstantTerm(String),
    #[error("composition needs degrees outside the box")]
    BoxOverflow,
    #[error("factor {0} has no invertible part")]
    NonInvertibleFactor(String),
    #[error("expansion of {0} needs a finite window")]
    UnboundedExpansion(String),
    #[error("elimination at degree {0:?} needs hbar powers outside the window")]
    WindowTooSmall(Vec<u32>),
    #[error("connection matrix keeps hbar terms after gauge fixing: {0}")]
    GaugeResidual(String),
    #[error("matrix is not hbar free")]
    NotHbarFree,
    #[error("mixed partials of the mirror map disagree at degree {0:?}")]
    InconsistentJacobian(Vec<u32>),
    #[error("no operators found within the given bounds")]
    NoOperatorsFound,
    #[error("stratum {0} is underdetermined")]
    Underdetermined(String),
    #[error("stratum {0} is inconsistent")]
    Inconsistent(String),
    #[error("u3 order too low for the requested Q order")]
    OrderTooLow,
    #[error("zero constant term in a localization denominator")]
    ZeroDenominator,
    #[error("fixed point iteration did not become stationary")]
    NotConverged,
    #[error("singular matrix")]
    Singular,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotFiniteDimensional(_) => "NotFiniteDimensional",
            Error::InconsistentRelations => "InconsistentRelations",
            Error::NotAHomomorphism(_) => "NotAHomomorphism",
            Error::RingMismatch => "RingMismatch",
            Error::BoxMismatch => "BoxMismatch",
            Error::BadConstantTerm(_) => "BadConstantTerm",
            Error::BoxOverflow => "BoxOverflow",
            Error::NonInvertibleFactor(_) => "NonInvertibleFactor",
            Error::UnboundedExpansion(_) => "UnboundedExpansion",
            Error::WindowTooSmall(_) => "WindowTooSmall",
            Error::GaugeResidual(_) => "GaugeResidual",
            Error::NotHbarFree => "NotHbarFree",
            Error::InconsistentJacobian(_) => "InconsistentJacobian",
            Error::NoOperatorsFound => "NoOperatorsFound",
            Error::Underdetermined(_) => "Underdetermined",
            Error::Inconsistent(_) => "Inconsistent",
            Error::OrderTooLow => "OrderTooLow",
            Error::ZeroDenominator => "ZeroDenominator",
            Error::NotConverged => "NotConverged",
            Error::Singular => "Singular",
            Error::Invalid(_) => "Invalid",
        }
    }
}
