//! Pricing of monthly-sum options: the payoff `max(sum of capped monthly
//! returns, 0)` under a constant-volatility Black-Scholes market.
//!
//! The closed-form engine replaces capped simple returns by capped log
//! returns, matches the first three cumulants of the horizon log return, and
//! prices the result as an at-the-money call plus a first Edgeworth
//! correction. Quadrature and Monte-Carlo oracles check every stage.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discrepancy;
pub mod edgeworth;
pub mod error;
pub mod market;
pub mod moments;
pub mod montecarlo;
pub mod normal;
pub mod par;
pub mod pricer;
pub mod quadrature;
pub mod stats;
pub mod validation;

pub use edgeworth::{CumulantSet, EdgeworthParams, MonthlyCumulants};
pub use error::{PricingError, Result};
pub use market::{ContractSpec, MarketParams};
pub use moments::{MomentMethod, MomentSet, TruncationGeometry};
pub use montecarlo::{McConfig, McResult};
pub use pricer::{price_ms, price_ms_with, ExpansionOrder, PriceBreakdown, PricerConfig};
