//! Closed-form valuation of the monthly-sum option.
//!
//! The log-capped payoff `max(exp(sum r~) - 1, 0)` is an at-the-money call on
//! the capped underlying. Its horizon log return is approximated by a Gaussian
//! plus the `H3` Edgeworth term, giving `MS = MS0 + MS1`.

use serde::{Deserialize, Serialize};

use crate::edgeworth::{aggregate, cumulants_from_moments, printed_epsilon1, EdgeworthParams};
use crate::error::{PricingError, Result};
use crate::market::{ContractSpec, MarketParams};
use crate::moments::{moment_set, MomentMethod};
use crate::normal::{cnd, pdf, INV_SQRT_2PI};
use crate::quadrature::{integrate, Tolerance};

/// Half-width of the correction integral's domain, in horizon standard deviations.
pub const CORRECTION_CLIP_SIGMAS: f64 = 12.0;
const CORRECTION_REL_TOL: f64 = 1e-10;

/// Number of Edgeworth terms kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ExpansionOrder {
    /// Gaussian term only.
    Leading,
    /// Gaussian plus the `H3` skew correction.
    #[default]
    FirstCorrection,
}

impl ExpansionOrder {
    pub fn as_u32(self) -> u32 {
        match self {
            ExpansionOrder::Leading => 0,
            ExpansionOrder::FirstCorrection => 1,
        }
    }
}

impl TryFrom<u32> for ExpansionOrder {
    type Error = PricingError;

    fn try_from(order: u32) -> Result<Self> {
        match order {
            0 => Ok(ExpansionOrder::Leading),
            1 => Ok(ExpansionOrder::FirstCorrection),
            n => Err(PricingError::UnsupportedOrder(n)),
        }
    }
}

/// How the first correction is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionMethod {
    #[default]
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PricerConfig {
    pub order: ExpansionOrder,
    pub moments: MomentMethod,
    pub correction: CorrectionMethod,
    /// Use the appendix formulas as printed (moments, `eps1`, correction closed form).
    pub printed_formulas: bool,
}

impl PricerConfig {
    pub fn with_order(order: ExpansionOrder) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }
}

/// Price per unit notional with its Edgeworth components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceBreakdown {
    pub ms0: f64,
    pub ms1: f64,
    pub total: f64,
    pub order: u32,
    pub edgeworth: EdgeworthParams,
}

fn check_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(PricingError::invalid(field, format!("must be > 0, got {value}")))
    }
}

fn d1_d2(spot: f64, strike: f64, vol: f64, rate: f64, yield_: f64, term: f64) -> (f64, f64) {
    let sd = vol * term.sqrt();
    let d1 = ((spot / strike).ln() + (rate - yield_ + 0.5 * vol * vol) * term) / sd;
    (d1, d1 - sd)
}

fn check_bs_inputs(spot: f64, strike: f64, vol: f64, term: f64) -> Result<()> {
    check_positive("spot", spot)?;
    check_positive("strike", strike)?;
    check_positive("vol", vol)?;
    check_positive("term", term)
}

/// Black-Scholes European call with continuous dividend yield.
pub fn bs_call(spot: f64, strike: f64, vol: f64, rate: f64, yield_: f64, term: f64) -> Result<f64> {
    check_bs_inputs(spot, strike, vol, term)?;
    let (d1, d2) = d1_d2(spot, strike, vol, rate, yield_, term);
    Ok(spot * (-yield_ * term).exp() * cnd(d1) - strike * (-rate * term).exp() * cnd(d2))
}

/// Black-Scholes European put with continuous dividend yield.
pub fn bs_put(spot: f64, strike: f64, vol: f64, rate: f64, yield_: f64, term: f64) -> Result<f64> {
    check_bs_inputs(spot, strike, vol, term)?;
    let (d1, d2) = d1_d2(spot, strike, vol, rate, yield_, term);
    Ok(strike * (-rate * term).exp() * cnd(-d2) - spot * (-yield_ * term).exp() * cnd(-d1))
}

/// Leading-order price: an ATM call with volatility `v` and yield `y_eff`, per unit spot.
pub fn ms_leading(ep: &EdgeworthParams, market: &MarketParams) -> Result<f64> {
    bs_call(1.0, 1.0, ep.v, market.rate, ep.y_eff, ep.term)
}

#[inline]
fn hermite3(z: f64) -> f64 {
    z * (z * z - 3.0)
}

/// First correction by adaptive quadrature of `e^{-rT} int_0^inf (e^x - 1) psi1(x) dx`.
pub fn ms_correction_quadrature(ep: &EdgeworthParams, market: &MarketParams) -> Result<f64> {
    if ep.epsilon1 == 0.0 {
        return Ok(0.0);
    }
    let (mean, sd) = (ep.mean(), ep.stdev());
    check_positive("v", sd)?;
    let lo = (mean - CORRECTION_CLIP_SIGMAS * sd).max(0.0);
    let hi = mean + CORRECTION_CLIP_SIGMAS * sd;
    let integrand = |x: f64| {
        let z = (x - mean) / sd;
        x.exp_m1() * pdf(z) * hermite3(z) / sd
    };
    let tol = Tolerance::new(CORRECTION_REL_TOL, 1e-17 * sd);
    let body = integrate(integrand, lo, hi, tol)?;
    Ok(market.discount() * ep.epsilon1 * body.value)
}

/// `int_0^inf (e^x - 1) phi_{a,b}(x) H3((x - a)/b) dx` with `a = nu T`, `b = v sqrt(T)`.
fn correction_integral(ep: &EdgeworthParams) -> f64 {
    let (nu, v, t) = (ep.nu, ep.v, ep.term);
    let b = v * t.sqrt();
    t * INV_SQRT_2PI * (v * v - nu) * (-0.5 * nu * nu * t / (v * v)).exp()
        + b.powi(3) * ((nu + 0.5 * v * v) * t).exp() * cnd((nu / v + v) * t.sqrt())
}

/// First correction in closed form.
pub fn ms_correction_closed(ep: &EdgeworthParams, market: &MarketParams) -> Result<f64> {
    if ep.epsilon1 == 0.0 {
        return Ok(0.0);
    }
    check_positive("v", ep.v)?;
    Ok(market.discount() * ep.epsilon1 * correction_integral(ep))
}

/// The appendix closed form as printed: exponent `-nu^2 T / v^2` without the half.
pub fn ms_correction_printed(ep: &EdgeworthParams, market: &MarketParams) -> Result<f64> {
    if ep.epsilon1 == 0.0 {
        return Ok(0.0);
    }
    check_positive("v", ep.v)?;
    let (nu, v, t) = (ep.nu, ep.v, ep.term);
    let integral = t * INV_SQRT_2PI * (v * v - nu) * (-nu * nu * t / (v * v)).exp()
        + (v * v * t).powf(1.5) * ((nu + 0.5 * v * v) * t).exp() * cnd((nu / v + v) * t.sqrt());
    Ok(market.discount() * ep.epsilon1 * integral)
}

/// Edgeworth parameters of the horizon distribution for a contract.
pub fn edgeworth_params(market: &MarketParams, contract: &ContractSpec, config: &PricerConfig) -> Result<EdgeworthParams> {
    let method = if config.printed_formulas {
        MomentMethod::PrintedClosedForm
    } else {
        config.moments
    };
    let moments = moment_set(market, contract, method)?;
    let iotas = cumulants_from_moments(&moments)?;
    let mut ep = aggregate(&iotas, market.periods, market.term, market.rate);
    if config.printed_formulas {
        ep.epsilon1 = printed_epsilon1(&iotas, market.periods);
    }
    Ok(ep)
}

/// Prices with the default configuration at the requested order.
pub fn price_ms(contract: &ContractSpec, market: &MarketParams, order: ExpansionOrder) -> Result<PriceBreakdown> {
    price_ms_with(contract, market, &PricerConfig::with_order(order))
}

/// Full pipeline: moments, cumulants, Edgeworth parameters, then `MS0` and `MS1`.
pub fn price_ms_with(contract: &ContractSpec, market: &MarketParams, config: &PricerConfig) -> Result<PriceBreakdown> {
    market.validate()?;
    let ep = edgeworth_params(market, contract, config)?;
    let order = config.order.as_u32();
    // Every capped log return is <= 0, so the payoff is zero almost surely.
    if contract.log_cap() <= 0.0 {
        return Ok(PriceBreakdown {
            ms0: 0.0,
            ms1: 0.0,
            total: 0.0,
            order,
            edgeworth: ep,
        });
    }
    let ms0 = ms_leading(&ep, market)?;
    let ms1 = match config.order {
        ExpansionOrder::Leading => 0.0,
        ExpansionOrder::FirstCorrection => match (config.correction, config.printed_formulas) {
            (CorrectionMethod::Quadrature, _) => ms_correction_quadrature(&ep, market)?,
            (CorrectionMethod::ClosedForm, false) => ms_correction_closed(&ep, market)?,
            (CorrectionMethod::ClosedForm, true) => ms_correction_printed(&ep, market)?,
        },
    };
    Ok(PriceBreakdown {
        ms0,
        ms1,
        total: ms0 + ms1,
        order,
        edgeworth: ep,
    })
}
