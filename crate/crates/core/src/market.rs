//! Market and contract inputs.
//!
//! All rates, yields and volatilities are annualized decimal fractions with
//! continuous compounding. Cap and floor apply to each period's simple return.

use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// Constant-volatility Black-Scholes market observed on an evenly spaced grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarketParams {
    pub rate: f64,
    pub dividend_yield: f64,
    pub volatility: f64,
    /// Term in years.
    pub term: f64,
    /// Number of return periods (months) over the term.
    pub periods: u32,
}

impl MarketParams {
    pub fn new(rate: f64, dividend_yield: f64, volatility: f64, term: f64, periods: u32) -> Result<Self> {
        let market = Self {
            rate,
            dividend_yield,
            volatility,
            term,
            periods,
        };
        market.validate()?;
        Ok(market)
    }

    /// One-year monthly market: `T = 1`, `N = 12`.
    pub fn annual_monthly(rate: f64, dividend_yield: f64, volatility: f64) -> Result<Self> {
        Self::new(rate, dividend_yield, volatility, 1.0, 12)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rate.is_finite() {
            return Err(PricingError::invalid("rate", "must be finite"));
        }
        if !self.dividend_yield.is_finite() {
            return Err(PricingError::invalid("div", "must be finite"));
        }
        if !(self.volatility.is_finite() && self.volatility > 0.0) {
            return Err(PricingError::invalid("vol", format!("must be > 0, got {}", self.volatility)));
        }
        if !(self.term.is_finite() && self.term > 0.0) {
            return Err(PricingError::invalid("term", format!("must be > 0, got {}", self.term)));
        }
        if self.periods == 0 {
            return Err(PricingError::invalid("months", "must be >= 1"));
        }
        Ok(())
    }

    /// Length of one period, `T / N`.
    pub fn dt(&self) -> f64 {
        self.term / f64::from(self.periods)
    }

    /// Risk-neutral drift of log returns, `r - y - sigma^2 / 2`.
    pub fn drift(&self) -> f64 {
        self.rate - self.dividend_yield - 0.5 * self.volatility * self.volatility
    }

    /// Mean of one period's log return.
    pub fn period_mean(&self) -> f64 {
        self.drift() * self.dt()
    }

    /// Standard deviation of one period's log return.
    pub fn period_stdev(&self) -> f64 {
        self.volatility * self.dt().sqrt()
    }

    pub fn discount(&self) -> f64 {
        (-self.rate * self.term).exp()
    }
}

/// Per-period cap and optional floor on simple returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractSpec {
    cap: f64,
    floor: Option<f64>,
}

impl ContractSpec {
    pub fn new(cap: f64, floor: Option<f64>) -> Result<Self> {
        if !cap.is_finite() || cap <= -1.0 {
            return Err(PricingError::invalid("cap", format!("must be finite and > -1, got {cap}")));
        }
        if let Some(floor) = floor {
            if !floor.is_finite() || floor <= -1.0 {
                return Err(PricingError::invalid(
                    "floor",
                    format!("must be finite and > -1, got {floor}"),
                ));
            }
            if floor >= cap {
                return Err(PricingError::invalid(
                    "floor",
                    format!("floor {floor} must be below cap {cap} (floor >= cap)"),
                ));
            }
        }
        Ok(Self { cap, floor })
    }

    pub fn capped(cap: f64) -> Result<Self> {
        Self::new(cap, None)
    }

    pub fn collared(cap: f64, floor: f64) -> Result<Self> {
        Self::new(cap, Some(floor))
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn floor(&self) -> Option<f64> {
        self.floor
    }

    /// Cap on log returns, `ln(1 + cap)`.
    pub fn log_cap(&self) -> f64 {
        self.cap.ln_1p()
    }

    pub fn log_floor(&self) -> Option<f64> {
        self.floor.map(f64::ln_1p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monthly_grid_derivations() {
        let m = MarketParams::annual_monthly(0.03, 0.02, 0.2).unwrap();
        assert_eq!(m.dt(), 1.0 / 12.0);
        assert_eq!(m.drift(), 0.03 - 0.02 - 0.5 * 0.2 * 0.2);
        assert!((m.period_mean() + 8.333_333_333e-4).abs() < 1e-12);
        assert!((m.period_stdev() - 0.057_735_026_918_962_58).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_market() {
        assert!(MarketParams::new(0.03, 0.02, 0.0, 1.0, 12).is_err());
        assert!(MarketParams::new(0.03, 0.02, 0.2, -1.0, 12).is_err());
        assert!(MarketParams::new(0.03, 0.02, 0.2, 1.0, 0).is_err());
        assert!(MarketParams::new(f64::NAN, 0.02, 0.2, 1.0, 12).is_err());
    }

    #[test]
    fn contract_invariants() {
        let c = ContractSpec::capped(0.025).unwrap();
        assert!((c.log_cap() - (1.025f64).ln()).abs() < 1e-16);
        assert!(ContractSpec::capped(-1.0).is_err());
        assert!(ContractSpec::capped(f64::INFINITY).is_err());
        let err = ContractSpec::collared(0.025, 0.05).unwrap_err();
        match err {
            PricingError::InvalidInput { field, reason } => {
                assert_eq!(field, "floor");
                assert!(reason.contains("floor >= cap"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(ContractSpec::collared(0.025, 0.025).is_err());
        assert!(ContractSpec::collared(0.025, -1.5).is_err());
        let c = ContractSpec::collared(0.025, -0.025).unwrap();
        assert!((c.log_floor().unwrap() - (0.975f64).ln()).abs() < 1e-16);
    }
}
