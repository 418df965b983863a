//! Machine-readable log of formulas whose printed and corrected forms disagree.
//!
//! One JSON object per line: formula id, parameter tuple, printed-form value,
//! corrected-form value, and the quadrature reference.

use std::fmt;
use std::io::{self, Write};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::market::{ContractSpec, MarketParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FormulaId {
    #[serde(rename = "I1_cap")]
    I1Cap,
    #[serde(rename = "I2_cap")]
    I2Cap,
    #[serde(rename = "I3_cap")]
    I3Cap,
    #[serde(rename = "I1_capfloor")]
    I1CapFloor,
    #[serde(rename = "I2_capfloor")]
    I2CapFloor,
    #[serde(rename = "I3_capfloor")]
    I3CapFloor,
    #[serde(rename = "eps1")]
    Epsilon1,
    #[serde(rename = "MS1_closed")]
    Ms1Closed,
}

impl FormulaId {
    pub const ALL: [FormulaId; 8] = [
        FormulaId::I1Cap,
        FormulaId::I2Cap,
        FormulaId::I3Cap,
        FormulaId::I1CapFloor,
        FormulaId::I2CapFloor,
        FormulaId::I3CapFloor,
        FormulaId::Epsilon1,
        FormulaId::Ms1Closed,
    ];

    pub fn moment(n: u32, floored: bool) -> FormulaId {
        match (n, floored) {
            (1, false) => FormulaId::I1Cap,
            (2, false) => FormulaId::I2Cap,
            (3, false) => FormulaId::I3Cap,
            (1, true) => FormulaId::I1CapFloor,
            (2, true) => FormulaId::I2CapFloor,
            (3, true) => FormulaId::I3CapFloor,
            _ => panic!("moment order {n} has no formula id"),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaId::I1Cap => "I1_cap",
            FormulaId::I2Cap => "I2_cap",
            FormulaId::I3Cap => "I3_cap",
            FormulaId::I1CapFloor => "I1_capfloor",
            FormulaId::I2CapFloor => "I2_capfloor",
            FormulaId::I3CapFloor => "I3_capfloor",
            FormulaId::Epsilon1 => "eps1",
            FormulaId::Ms1Closed => "MS1_closed",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Inputs identifying one evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamTuple {
    pub vol: f64,
    pub cap: f64,
    pub floor: Option<f64>,
    pub rate: f64,
    pub div: f64,
    pub term: f64,
    pub months: u32,
}

impl ParamTuple {
    pub fn new(market: &MarketParams, contract: &ContractSpec) -> Self {
        Self {
            vol: market.volatility,
            cap: contract.cap(),
            floor: contract.floor(),
            rate: market.rate,
            div: market.dividend_yield,
            term: market.term,
            months: market.periods,
        }
    }
}

impl fmt::Display for ParamTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vol={} cap={} ", self.vol, self.cap)?;
        match self.floor {
            Some(fl) => write!(f, "floor={fl} ")?,
            None => write!(f, "floor=none ")?,
        }
        write!(
            f,
            "rate={} div={} term={} months={}",
            self.rate, self.div, self.term, self.months
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRecord {
    pub formula: FormulaId,
    pub params: ParamTuple,
    pub printed: f64,
    pub corrected: f64,
    pub quadrature: f64,
}

/// Append-only record store; all appends go through one lock.
#[derive(Debug, Default)]
pub struct DiscrepancyLog {
    records: Mutex<Vec<DiscrepancyRecord>>,
}

impl DiscrepancyLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append(&self, record: DiscrepancyRecord) {
        self.records.lock().expect("discrepancy log poisoned").push(record);
    }

    pub fn records(&self) -> Vec<DiscrepancyRecord> {
        self.records.lock().expect("discrepancy log poisoned").clone()
    }

    pub fn is_empty(&self) -> bool {
        self.records.lock().expect("discrepancy log poisoned").is_empty()
    }

    /// Formula ids present in the log, sorted and deduplicated.
    pub fn formulas(&self) -> Vec<FormulaId> {
        let mut ids: Vec<_> = self.records().iter().map(|r| r.formula).collect();
        ids.sort();
        ids.dedup();
        ids
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for record in self.records() {
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}
