use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("spectral parameter {0} lies on [0, ∞); shift it off the axis by iε")]
    LambdaOnPositiveAxis(Complex64),
    #[error("argument {0} outside the domain Re z > 0")]
    DomainError(Complex64),
    #[error("Green's function is singular on the diagonal in dimension {0}")]
    DiagonalSingularity(usize),
    #[error("dimension 2 bound requires an estimate of the constant c₂")]
    MissingC2,
    #[error("stencil half-width {half_width} reaches the diagonal at r = {r}")]
    StencilTouchesDiagonal { r: f64, half_width: f64 },
    #[error("potential has unbounded support and no usable tail bound")]
    UnboundedSupportWithoutTail,
    #[error("operation requires dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("operation requires a radial potential")]
    NotRadial,
    #[error("dimension {0} is not supported here")]
    DimensionUnsupported(usize),
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("iteration left the search region at {0}")]
    DivergedOutOfRegion(Complex64),
    #[error("no eigenvalue found for coupling {beta}")]
    EmptySpectrum { beta: f64 },
    #[error("no determinant root inside the search region")]
    NoRootInRegion,
    #[error("inequality arguments must be non-negative")]
    NegativeInput,
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

impl Error {
    /// Stable machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::LambdaOnPositiveAxis(_) => "lambda_on_positive_axis",
            Error::DomainError(_) => "domain_error",
            Error::DiagonalSingularity(_) => "diagonal_singularity",
            Error::MissingC2 => "missing_c2",
            Error::StencilTouchesDiagonal { .. } => "stencil_touches_diagonal",
            Error::UnboundedSupportWithoutTail => "unbounded_support_without_tail",
            Error::WrongDimension { .. } => "wrong_dimension",
            Error::NotRadial => "not_radial",
            Error::DimensionUnsupported(_) => "dimension_unsupported",
            Error::NoConvergence { .. } => "no_convergence",
            Error::DivergedOutOfRegion(_) => "diverged_out_of_region",
            Error::EmptySpectrum { .. } => "empty_spectrum",
            Error::NoRootInRegion => "no_root_in_region",
            Error::NegativeInput => "negative_input",
            Error::InvalidInput(_) => "invalid_input",
        }
    }

    /// Whether the error reports a numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::DivergedOutOfRegion(_)
                | Error::EmptySpectrum { .. }
                | Error::NoRootInRegion
        )
    }
}
