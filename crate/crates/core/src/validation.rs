//! Oracle-equivalence suite: closed forms against quadrature over a parameter grid.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::discrepancy::{DiscrepancyLog, DiscrepancyRecord, FormulaId, ParamTuple};
use crate::edgeworth::{aggregate, cumulants_from_moments, printed_epsilon1, CumulantSet, EdgeworthParams};
use crate::error::Result;
use crate::market::{ContractSpec, MarketParams};
use crate::moments::{moment_closed, moment_quadrature, printed, MomentSet, Provenance};
use crate::normal::pdf;
use crate::par;
use crate::pricer::{ms_correction_closed, ms_correction_printed, ms_correction_quadrature};
use crate::quadrature::{integrate, Tolerance};

pub const MOMENT_TOLERANCE: f64 = 1e-9;
pub const CORRECTION_TOLERANCE: f64 = 1e-8;
/// Floor on the reference magnitude in relative errors.
pub const REL_ERR_FLOOR: f64 = 1e-12;

/// Cartesian parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationGrid {
    pub vols: Vec<f64>,
    pub caps: Vec<f64>,
    pub floors: Vec<Option<f64>>,
    pub rates: Vec<f64>,
    pub divs: Vec<f64>,
    pub term: f64,
    pub months: u32,
}

impl Default for ValidationGrid {
    /// 8 vols x 5 caps x 5 floor settings x 3 rates x 2 yields = 1200 tuples.
    fn default() -> Self {
        Self {
            vols: (1..=8).map(|i| 0.05 * f64::from(i)).collect(),
            caps: vec![0.005, 0.01, 0.025, 0.05, 0.10],
            floors: vec![None, Some(-0.10), Some(-0.05), Some(-0.025), Some(0.0)],
            rates: vec![0.0, 0.03, 0.06],
            divs: vec![0.0, 0.02],
            term: 1.0,
            months: 12,
        }
    }
}

impl ValidationGrid {
    pub fn points(&self) -> Result<Vec<(MarketParams, ContractSpec)>> {
        let mut out = Vec::new();
        for &vol in &self.vols {
            for &cap in &self.caps {
                for &floor in &self.floors {
                    for &rate in &self.rates {
                        for &div in &self.divs {
                            let market = MarketParams::new(rate, div, vol, self.term, self.months)?;
                            out.push((market, ContractSpec::new(cap, floor)?));
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ValidateOptions {
    /// Check the printed appendix formulas instead of the corrected ones.
    pub printed_formulas: bool,
    /// Overrides every per-formula tolerance.
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Failure {
    pub params: ParamTuple,
    pub value: f64,
    pub reference: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaReport {
    pub formula: FormulaId,
    pub checks: usize,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub failures: Vec<Failure>,
}

impl FormulaReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug)]
pub struct ValidationReport {
    pub formulas: Vec<FormulaReport>,
    pub discrepancies: DiscrepancyLog,
    pub tuples: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.formulas.iter().all(FormulaReport::passed)
    }

    pub fn formula(&self, id: FormulaId) -> Option<&FormulaReport> {
        self.formulas.iter().find(|r| r.formula == id)
    }

    pub fn failing(&self) -> Vec<FormulaId> {
        self.formulas.iter().filter(|r| !r.passed()).map(|r| r.formula).collect()
    }
}

/// One formula evaluated at one point, in both forms, with its reference.
#[derive(Debug, Clone, Copy)]
struct Evaluation {
    formula: FormulaId,
    printed: f64,
    corrected: f64,
    reference: f64,
}

pub fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(REL_ERR_FLOOR)
}

/// `int (x - a)^3 psi1(x) dx / eps1` by quadrature, which should equal `6 b^3`.
fn skew_term_third_moment(ep: &EdgeworthParams) -> Result<f64> {
    let b = ep.stdev();
    let integrand = |z: f64| z.powi(3) * z * (z * z - 3.0) * pdf(z);
    let q = integrate(integrand, -12.0, 12.0, Tolerance::new(1e-13, 1e-16))?;
    Ok(b.powi(3) * q.value)
}

fn evaluate_point(market: &MarketParams, contract: &ContractSpec) -> Result<Vec<Evaluation>> {
    let floored = contract.floor().is_some();
    let mut out = Vec::with_capacity(5);
    let mut quad = [0.0; 3];
    for n in 1..=3u32 {
        let q = moment_quadrature(n, market, contract)?;
        quad[n as usize - 1] = q;
        out.push(Evaluation {
            formula: FormulaId::moment(n, floored),
            printed: printed::moment(n, market, contract)?,
            corrected: moment_closed(n, market, contract)?,
            reference: q,
        });
    }
    let moments = MomentSet {
        i1: quad[0],
        i2: quad[1],
        i3: quad[2],
        provenance: Provenance::Quadrature,
    };
    let iotas = cumulants_from_moments(&moments)?;
    let ep = aggregate(&iotas, market.periods, market.term, market.rate);
    let kappa3 = CumulantSet::new(iotas, market.periods).kappa3;
    out.push(Evaluation {
        formula: FormulaId::Epsilon1,
        printed: printed_epsilon1(&iotas, market.periods),
        corrected: ep.epsilon1,
        reference: kappa3 / skew_term_third_moment(&ep)?,
    });
    out.push(Evaluation {
        formula: FormulaId::Ms1Closed,
        printed: ms_correction_printed(&ep, market)?,
        corrected: ms_correction_closed(&ep, market)?,
        reference: ms_correction_quadrature(&ep, market)?,
    });
    Ok(out)
}

fn default_tolerance(id: FormulaId) -> f64 {
    match id {
        FormulaId::Ms1Closed => CORRECTION_TOLERANCE,
        _ => MOMENT_TOLERANCE,
    }
}

/// Runs every check on every grid point.
///
/// A formula fails when the checked form (printed or corrected, per options)
/// misses the quadrature reference by more than its tolerance at any point.
/// Independently of the mode, a discrepancy record is appended wherever the
/// printed and corrected forms differ by more than that tolerance.
pub fn run_validation(grid: &ValidationGrid, opts: &ValidateOptions) -> Result<ValidationReport> {
    let points = grid.points()?;
    let evaluated = par::map_slice(&points, |(m, c)| evaluate_point(m, c));
    let mut reports: BTreeMap<FormulaId, FormulaReport> = BTreeMap::new();
    let log = DiscrepancyLog::new();
    for ((market, contract), evals) in points.iter().zip(evaluated) {
        let params = ParamTuple::new(market, contract);
        for e in evals? {
            let tol = opts.tolerance.unwrap_or_else(|| default_tolerance(e.formula));
            let value = if opts.printed_formulas { e.printed } else { e.corrected };
            let err = rel_err(value, e.reference);
            let report = reports.entry(e.formula).or_insert_with(|| FormulaReport {
                formula: e.formula,
                checks: 0,
                max_rel_err: 0.0,
                tolerance: tol,
                failures: Vec::new(),
            });
            report.checks += 1;
            report.max_rel_err = report.max_rel_err.max(err);
            if !(err <= tol) {
                report.failures.push(Failure {
                    params,
                    value,
                    reference: e.reference,
                    rel_err: err,
                });
            }
            if (e.printed - e.corrected).abs() / e.reference.abs().max(REL_ERR_FLOOR) > tol {
                log.append(DiscrepancyRecord {
                    formula: e.formula,
                    params,
                    printed: e.printed,
                    corrected: e.corrected,
                    quadrature: e.reference,
                });
            }
        }
    }
    Ok(ValidationReport {
        formulas: reports.into_values().collect(),
        discrepancies: log,
        tuples: points.len(),
    })
}
