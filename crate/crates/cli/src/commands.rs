use msum::montecarlo::{simulate_both, McResult};
use msum::pricer::{price_ms_with, CorrectionMethod, PriceBreakdown};
use msum::validation::{run_validation, ValidateOptions, ValidationGrid, ValidationReport};
use msum::{ContractSpec, ExpansionOrder, MarketParams, PricerConfig};
use serde::{Deserialize, Serialize};

use crate::cli::{Axis, Correction, Format, McArgs, PriceArgs, SweepArgs, ValidateArgs};
use crate::config::{mc_config, FileConfig, ModelInputs};
use crate::output::{csv_table, emit, json, num, opt_num};
use crate::CliError;

pub const SWEEP_HEADER: [&str; 7] = ["axis", "axis_value", "ms0", "ms0_plus_ms1", "mc_mean", "mc_stderr", "msln_mc_mean"];
const PRICE_HEADER: [&str; 8] = ["ms0", "ms1", "total", "order", "nu", "v", "eps1", "y_eff"];
const MC_HEADER: [&str; 7] = ["mc_mean", "mc_stderr", "msln_mc_mean", "msln_mc_stderr", "paths", "seed", "antithetic"];
const MAX_SWEEP_POINTS: usize = 100_000;

/// Inputs echoed into every JSON record so it can be re-priced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputsRecord {
    pub cap: f64,
    pub floor: Option<f64>,
    pub vol: f64,
    pub rate: f64,
    pub div: f64,
    pub term: f64,
    pub months: u32,
}

impl From<&ModelInputs> for InputsRecord {
    fn from(m: &ModelInputs) -> Self {
        Self {
            cap: m.cap,
            floor: m.floor,
            vol: m.vol,
            rate: m.rate,
            div: m.div,
            term: m.term,
            months: m.months,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceRecord {
    pub ms0: f64,
    pub ms1: f64,
    pub total: f64,
    pub order: u32,
    pub nu: f64,
    pub v: f64,
    pub eps1: f64,
    pub y_eff: f64,
    pub inputs: InputsRecord,
}

impl PriceRecord {
    fn new(b: &PriceBreakdown, inputs: &ModelInputs) -> Self {
        Self {
            ms0: b.ms0,
            ms1: b.ms1,
            total: b.total,
            order: b.order,
            nu: b.edgeworth.nu,
            v: b.edgeworth.v,
            eps1: b.edgeworth.epsilon1,
            y_eff: b.edgeworth.y_eff,
            inputs: inputs.into(),
        }
    }

    fn csv_row(&self) -> Vec<String> {
        vec![
            num(self.ms0),
            num(self.ms1),
            num(self.total),
            self.order.to_string(),
            num(self.nu),
            num(self.v),
            num(self.eps1),
            num(self.y_eff),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McRecord {
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub msln_mc_mean: f64,
    pub msln_mc_stderr: f64,
    pub paths: u64,
    pub seed: u64,
    pub antithetic: bool,
    pub inputs: InputsRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: &'static str,
    pub axis_value: f64,
    pub ms0: f64,
    pub ms0_plus_ms1: f64,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub msln_mc_mean: Option<f64>,
}

fn pricer_config(order: ExpansionOrder, correction: Correction, printed: bool) -> PricerConfig {
    PricerConfig {
        order,
        correction: match correction {
            Correction::Quadrature => CorrectionMethod::Quadrature,
            Correction::Closed => CorrectionMethod::ClosedForm,
        },
        printed_formulas: printed,
        ..PricerConfig::default()
    }
}

pub fn price(args: &PriceArgs) -> Result<(), CliError> {
    let file = FileConfig::load(&args.model)?;
    let inputs = ModelInputs::resolve(&args.model, &file);
    let (market, contract) = (inputs.market()?, inputs.contract()?);
    let order = ExpansionOrder::try_from(args.order.or(file.order).unwrap_or(1))?;
    let config = pricer_config(order, args.correction, args.model.printed_formulas);
    let breakdown = price_ms_with(&contract, &market, &config)?;
    let record = PriceRecord::new(&breakdown, &inputs);
    let text = match args.output.format.unwrap_or(Format::Json) {
        Format::Json => json(&record)?,
        Format::Csv => csv_table(&PRICE_HEADER, &[record.csv_row()]),
    };
    emit(&text, args.output.out.as_deref())
}

pub fn mc(args: &McArgs) -> Result<(), CliError> {
    let file = FileConfig::load(&args.model)?;
    let inputs = ModelInputs::resolve(&args.model, &file);
    let (market, contract) = (inputs.market()?, inputs.contract()?);
    let cfg = mc_config(args.mc_paths, &args.mc, &file);
    let (ms, msln) = simulate_both(&contract, &market, &cfg)?;
    let record = McRecord {
        mc_mean: ms.mean,
        mc_stderr: ms.stderr,
        msln_mc_mean: msln.mean,
        msln_mc_stderr: msln.stderr,
        paths: ms.paths_used,
        seed: cfg.seed,
        antithetic: cfg.antithetic,
        inputs: (&inputs).into(),
    };
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => json(&record)?,
        Format::Csv => csv_table(
            &MC_HEADER,
            &[vec![
                num(record.mc_mean),
                num(record.mc_stderr),
                num(record.msln_mc_mean),
                num(record.msln_mc_stderr),
                record.paths.to_string(),
                record.seed.to_string(),
                record.antithetic.to_string(),
            ]],
        ),
    };
    emit(&text, args.output.out.as_deref())
}

/// Grid `from, from + step, ...` up to `to` inclusive (with a 1e-9 step slack).
pub fn sweep_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite()) {
        return Err(CliError::input("from/to: must be finite"));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(CliError::input(format!("step: must be > 0, got {step}")));
    }
    if !(from < to) {
        return Err(CliError::input(format!("from: sweep grid is empty (from {from} must be < to {to})")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    if count > MAX_SWEEP_POINTS {
        return Err(CliError::input(format!("step: grid of {count} points exceeds {MAX_SWEEP_POINTS}")));
    }
    Ok((0..count).map(|k| from + step * k as f64).collect())
}

fn apply_axis(base: &ModelInputs, axis: Axis, value: f64) -> Result<ModelInputs, CliError> {
    let mut m = *base;
    match axis {
        Axis::Vol => m.vol = value,
        Axis::Cap => m.cap = value,
        Axis::Floor => m.floor = Some(value),
        Axis::Rate => m.rate = value,
        Axis::Div => m.div = value,
        Axis::Months => {
            let rounded = value.round();
            if (value - rounded).abs() > 1e-9 || rounded < 1.0 || rounded > f64::from(u32::MAX) {
                return Err(CliError::input(format!("months: sweep value {value} is not a positive integer")));
            }
            // monthly periods: the term follows the period count
            m.months = rounded as u32;
            m.term = rounded / 12.0;
        }
    }
    Ok(m)
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let file = FileConfig::load(&args.model)?;
    let base = ModelInputs::resolve(&args.model, &file);
    let grid = sweep_grid(args.from, args.to, args.step)?;
    let points: Vec<(f64, MarketParams, ContractSpec)> = grid
        .iter()
        .map(|&value| {
            let inputs = apply_axis(&base, args.axis, value)?;
            Ok((value, inputs.market()?, inputs.contract()?))
        })
        .collect::<Result<_, CliError>>()?;
    let config = pricer_config(ExpansionOrder::FirstCorrection, args.correction, args.model.printed_formulas);
    let mc_cfg = args.mc_paths.or(file.mc_paths).map(|paths| mc_config(Some(paths), &args.mc, &file));
    let results = msum::par::map_slice(&points, |(value, market, contract)| {
        let price = price_ms_with(contract, market, &config)?;
        let sim: Option<(McResult, McResult)> = match &mc_cfg {
            Some(cfg) => Some(simulate_both(contract, market, cfg)?),
            None => None,
        };
        Ok::<_, msum::PricingError>(SweepRow {
            axis: args.axis.name(),
            axis_value: *value,
            ms0: price.ms0,
            ms0_plus_ms1: price.total,
            mc_mean: sim.map(|s| s.0.mean),
            mc_stderr: sim.map(|s| s.0.stderr),
            msln_mc_mean: sim.map(|s| s.1.mean),
        })
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.axis.to_string(),
                        num(r.axis_value),
                        num(r.ms0),
                        num(r.ms0_plus_ms1),
                        opt_num(r.mc_mean),
                        opt_num(r.mc_stderr),
                        opt_num(r.msln_mc_mean),
                    ]
                })
                .collect();
            csv_table(&SWEEP_HEADER, &cells)
        }
    };
    emit(&text, args.output.out.as_deref())
}

#[derive(Serialize)]
struct FormulaSummary<'a> {
    formula: &'a str,
    checks: usize,
    max_rel_err: f64,
    tolerance: f64,
    failures: usize,
    passed: bool,
}

#[derive(Serialize)]
struct ValidateSummary<'a> {
    passed: bool,
    tuples: usize,
    printed_formulas: bool,
    discrepancy_records: usize,
    formulas: Vec<FormulaSummary<'a>>,
}

const FAILURES_SHOWN: usize = 5;

fn describe_failures(report: &ValidationReport) -> String {
    let mut msg = String::new();
    for f in report.formulas.iter().filter(|f| !f.passed()) {
        msg.push_str(&format!(
            "FAIL {}: {} of {} tuples exceed tolerance {:e} (max rel err {:e})\n",
            f.formula,
            f.failures.len(),
            f.checks,
            f.tolerance,
            f.max_rel_err
        ));
        for fail in f.failures.iter().take(FAILURES_SHOWN) {
            msg.push_str(&format!(
                "  {} value={:e} reference={:e} rel_err={:e}\n",
                fail.params, fail.value, fail.reference, fail.rel_err
            ));
        }
        if f.failures.len() > FAILURES_SHOWN {
            msg.push_str(&format!("  ... {} more\n", f.failures.len() - FAILURES_SHOWN));
        }
    }
    msg
}

pub fn validate(args: &ValidateArgs) -> Result<(), CliError> {
    if let Some(tol) = args.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::input(format!("tol: must be > 0, got {tol}")));
        }
    }
    let opts = ValidateOptions {
        printed_formulas: args.printed_formulas,
        tolerance: args.tol,
    };
    let report = run_validation(&ValidationGrid::default(), &opts)?;
    if let Some(path) = &args.discrepancy_log {
        let mut buf = Vec::new();
        report
            .discrepancies
            .write_jsonl(&mut buf)
            .map_err(|e| CliError::numerical(format!("discrepancy log: {e}")))?;
        emit(&String::from_utf8_lossy(&buf), Some(path))?;
    }
    let text = match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => json(&ValidateSummary {
            passed: report.passed(),
            tuples: report.tuples,
            printed_formulas: args.printed_formulas,
            discrepancy_records: report.discrepancies.records().len(),
            formulas: report
                .formulas
                .iter()
                .map(|f| FormulaSummary {
                    formula: f.formula.as_str(),
                    checks: f.checks,
                    max_rel_err: f.max_rel_err,
                    tolerance: f.tolerance,
                    failures: f.failures.len(),
                    passed: f.passed(),
                })
                .collect(),
        })?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .formulas
                .iter()
                .map(|f| {
                    vec![
                        f.formula.to_string(),
                        f.checks.to_string(),
                        num(f.max_rel_err),
                        num(f.tolerance),
                        if f.passed() { "pass" } else { "fail" }.to_string(),
                    ]
                })
                .collect();
            csv_table(&["formula", "checks", "max_rel_err", "tolerance", "status"], &rows)
        }
    };
    emit(&text, args.output.out.as_deref())?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::validation(describe_failures(&report)))
    }
}
