//! Monthly cumulants, their aggregation over the term, and the matched
//! Edgeworth parameters of the horizon log-return distribution.

use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};
use crate::moments::MomentSet;

/// First three cumulants of one period's capped log return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonthlyCumulants {
    pub iota1: f64,
    pub iota2: f64,
    pub iota3: f64,
}

/// Period and horizon cumulants. Horizon cumulants are `N` times the period ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantSet {
    pub iota1: f64,
    pub iota2: f64,
    pub iota3: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub periods: u32,
}

impl CumulantSet {
    pub fn new(monthly: MonthlyCumulants, periods: u32) -> Self {
        let n = f64::from(periods);
        Self {
            iota1: monthly.iota1,
            iota2: monthly.iota2,
            iota3: monthly.iota3,
            kappa1: n * monthly.iota1,
            kappa2: n * monthly.iota2,
            kappa3: n * monthly.iota3,
            periods,
        }
    }
}

/// Parameters of the two-term Edgeworth density of the horizon log return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeworthParams {
    /// Annualized drift, `nu T = kappa1`.
    pub nu: f64,
    /// Annualized volatility, `v^2 T = kappa2`.
    pub v: f64,
    /// Coefficient of `H3`, `6 eps1 (v^2 T)^{3/2} = kappa3`.
    pub epsilon1: f64,
    /// Effective dividend yield `r - nu - v^2 / 2`.
    pub y_eff: f64,
    pub term: f64,
}

impl EdgeworthParams {
    /// Mean of the horizon log return.
    pub fn mean(&self) -> f64 {
        self.nu * self.term
    }

    /// Standard deviation of the horizon log return.
    pub fn stdev(&self) -> f64 {
        self.v * self.term.sqrt()
    }

    /// Same distribution with the skew term dropped.
    pub fn gaussian(&self) -> Self {
        Self {
            epsilon1: 0.0,
            ..*self
        }
    }
}

/// `iota1 = I1`, `iota2 = I2 - I1^2`, `iota3 = I3 - 3 I1 I2 + 2 I1^3`.
pub fn cumulants_from_moments(m: &MomentSet) -> Result<MonthlyCumulants> {
    let iota2 = m.i2 - m.i1 * m.i1;
    if !(iota2 > 0.0) {
        return Err(PricingError::NonPositiveVariance(iota2));
    }
    Ok(MonthlyCumulants {
        iota1: m.i1,
        iota2,
        iota3: m.i3 - 3.0 * m.i1 * m.i2 + 2.0 * m.i1.powi(3),
    })
}

/// Scales period cumulants to the horizon and matches `(nu, v, eps1)`.
pub fn aggregate(iotas: &MonthlyCumulants, periods: u32, term: f64, rate: f64) -> EdgeworthParams {
    let c = CumulantSet::new(*iotas, periods);
    let nu = c.kappa1 / term;
    let v = (c.kappa2 / term).sqrt();
    EdgeworthParams {
        nu,
        v,
        epsilon1: c.kappa3 / (6.0 * c.kappa2.powf(1.5)),
        y_eff: rate - nu - 0.5 * v * v,
        term,
    }
}

/// `eps1` with the denominator printed as `6 sqrt(v^2 T)`, for adjudication only.
pub fn printed_epsilon1(iotas: &MonthlyCumulants, periods: u32) -> f64 {
    let n = f64::from(periods);
    n * iotas.iota3 / (6.0 * (n * iotas.iota2).sqrt())
}
