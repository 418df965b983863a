use thiserror::Error;

/// Errors produced anywhere in the pricing pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PricingError {
    /// An input field failed validation. `field` names the offending input.
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: String },

    /// The per-period standard deviation is too small for the closed forms.
    #[error("degenerate volatility: per-period standard deviation {0:e} is below 1e-12")]
    DegenerateVolatility(f64),

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {intervals} intervals")]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    /// Second cumulant was not positive, which means the moments are corrupted.
    #[error("non-positive variance {0:e} computed from moments")]
    NonPositiveVariance(f64),

    #[error("path count {paths} is below the required minimum {min}")]
    PathCount { paths: u64, min: u64 },

    #[error("unsupported expansion order {0}; only 0 and 1 are implemented")]
    UnsupportedOrder(u32),
}

impl PricingError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        PricingError::InvalidInput {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            PricingError::InvalidInput { .. }
                | PricingError::PathCount { .. }
                | PricingError::UnsupportedOrder(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, PricingError>;
