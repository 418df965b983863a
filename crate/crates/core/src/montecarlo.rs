//! Reproducible Monte-Carlo valuation of the exact and log-approximated payoffs.
//!
//! Every path owns a ChaCha8 stream selected by `(key, path index)`, so a path
//! sees the same normals whatever thread evaluates it. Paths are grouped into
//! fixed-size chunks whose statistics are merged in chunk order, which makes
//! the result bit-identical across thread counts.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};
use crate::market::{ContractSpec, MarketParams};
use crate::normal::inverse_cnd;
use crate::par;
use crate::stats::{k_statistics, EmpiricalCumulants, RunningMoments};

/// Samples per reduction chunk. Part of the reproducibility contract.
pub const CHUNK: usize = 1024;

/// Minimum path count for [`empirical_cumulants`].
pub const MIN_CUMULANT_PATHS: u64 = 10_000;

// Key offset for the log payoff when random numbers are not shared.
const MSLN_KEY_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub paths: u64,
    pub seed: u64,
    /// Pair every draw `z` with `-z` and average the pair into one sample.
    pub antithetic: bool,
    /// Drive the exact and log payoffs with the same normals.
    pub common_random_numbers: bool,
}

impl McConfig {
    pub fn new(paths: u64, seed: u64) -> Self {
        Self {
            paths,
            seed,
            antithetic: false,
            common_random_numbers: true,
        }
    }

    pub fn antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn common_random_numbers(mut self, on: bool) -> Self {
        self.common_random_numbers = on;
        self
    }

    /// Independent samples entering the mean: paths, or path pairs if antithetic.
    fn samples(&self) -> u64 {
        if self.antithetic {
            self.paths / 2
        } else {
            self.paths
        }
    }

    fn check(&self) -> Result<()> {
        let min = if self.antithetic { 4 } else { 2 };
        if self.paths < min {
            return Err(PricingError::PathCount { paths: self.paths, min });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    /// Discounted price estimate per unit notional.
    pub mean: f64,
    pub stderr: f64,
    pub paths_used: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_cumulants: Option<EmpiricalCumulants>,
}

/// Per-period quantities shared by all paths.
#[derive(Debug, Clone, Copy)]
struct PathModel {
    mean: f64,
    stdev: f64,
    cap: f64,
    floor: f64,
    log_cap: f64,
    log_floor: f64,
    periods: usize,
}

impl PathModel {
    fn new(market: &MarketParams, contract: &ContractSpec) -> Self {
        Self {
            mean: market.period_mean(),
            stdev: market.period_stdev(),
            cap: contract.cap(),
            floor: contract.floor().unwrap_or(f64::NEG_INFINITY),
            log_cap: contract.log_cap(),
            log_floor: contract.log_floor().unwrap_or(f64::NEG_INFINITY),
            periods: market.periods as usize,
        }
    }

    /// Exact payoff `max(sum clamp(R - 1), 0)`, log payoff
    /// `max(exp(sum clamp(ln R)) - 1, 0)`, and the capped log-return sum.
    fn evaluate(&self, normals: &[f64], sign: f64) -> (f64, f64, f64) {
        let mut simple = 0.0;
        let mut log_sum = 0.0;
        for &z in normals {
            let log_ret = self.mean + self.stdev * sign * z;
            simple += log_ret.exp_m1().min(self.cap).max(self.floor);
            log_sum += log_ret.min(self.log_cap).max(self.log_floor);
        }
        (simple.max(0.0), log_sum.exp_m1().max(0.0), log_sum)
    }
}

fn path_stream(key: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// Uniform on the open interval `(0, 1)` from 53 random bits.
#[inline]
fn open_uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn fill_normals(key: u64, index: u64, out: &mut [f64]) {
    let mut rng = path_stream(key, index);
    for z in out.iter_mut() {
        *z = inverse_cnd(open_uniform(&mut rng));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Payoff {
    Exact,
    Log,
}

#[derive(Default, Clone, Copy)]
struct ChunkStats {
    exact: RunningMoments,
    log: RunningMoments,
}

/// Runs `samples` samples in fixed chunks. `keys` gives the stream key used
/// for the exact and the log payoff; equal keys share draws.
fn run_chunks(model: &PathModel, samples: u64, antithetic: bool, keys: (u64, u64), wanted: (bool, bool)) -> ChunkStats {
    let n_chunks = samples.div_ceil(CHUNK as u64) as usize;
    let shared = keys.0 == keys.1;
    let partials = par::map_indexed(n_chunks, |chunk| {
        let start = chunk as u64 * CHUNK as u64;
        let end = (start + CHUNK as u64).min(samples);
        let mut z = vec![0.0; model.periods];
        let mut z_log = vec![0.0; model.periods];
        let mut stats = ChunkStats::default();
        for index in start..end {
            fill_normals(keys.0, index, &mut z);
            let log_draws = if shared {
                &z
            } else {
                fill_normals(keys.1, index, &mut z_log);
                &z_log
            };
            let (mut exact, _, _) = model.evaluate(&z, 1.0);
            let (_, mut log, _) = model.evaluate(log_draws, 1.0);
            if antithetic {
                exact = 0.5 * (exact + model.evaluate(&z, -1.0).0);
                log = 0.5 * (log + model.evaluate(log_draws, -1.0).1);
            }
            if wanted.0 {
                stats.exact.push(exact);
            }
            if wanted.1 {
                stats.log.push(log);
            }
        }
        stats
    });
    partials.iter().fold(ChunkStats::default(), |mut acc, p| {
        acc.exact.merge(&p.exact);
        acc.log.merge(&p.log);
        acc
    })
}

fn finish(moments: &RunningMoments, discount: f64, cfg: &McConfig) -> McResult {
    let stderr = if moments.m2 > 0.0 { discount * moments.stderr() } else { 0.0 };
    McResult {
        mean: discount * moments.mean,
        stderr,
        paths_used: if cfg.antithetic { 2 * moments.count } else { moments.count },
        empirical_cumulants: None,
    }
}

fn keys_for(cfg: &McConfig) -> (u64, u64) {
    let log_key = if cfg.common_random_numbers {
        cfg.seed
    } else {
        cfg.seed ^ MSLN_KEY_SALT
    };
    (cfg.seed, log_key)
}

fn simulate(contract: &ContractSpec, market: &MarketParams, cfg: &McConfig, payoff: Payoff) -> Result<McResult> {
    market.validate()?;
    cfg.check()?;
    let model = PathModel::new(market, contract);
    let keys = keys_for(cfg);
    // a single payoff always reads its own key's draws
    let keys = match payoff {
        Payoff::Exact => (keys.0, keys.0),
        Payoff::Log => (keys.1, keys.1),
    };
    let wanted = (payoff == Payoff::Exact, payoff == Payoff::Log);
    let stats = run_chunks(&model, cfg.samples(), cfg.antithetic, keys, wanted);
    let moments = match payoff {
        Payoff::Exact => stats.exact,
        Payoff::Log => stats.log,
    };
    Ok(finish(&moments, market.discount(), cfg))
}

/// Monte-Carlo price of the exact payoff on capped simple returns.
pub fn simulate_ms(contract: &ContractSpec, market: &MarketParams, cfg: &McConfig) -> Result<McResult> {
    simulate(contract, market, cfg, Payoff::Exact)
}

/// Monte-Carlo price of the payoff on capped log returns.
pub fn simulate_msln(contract: &ContractSpec, market: &MarketParams, cfg: &McConfig) -> Result<McResult> {
    simulate(contract, market, cfg, Payoff::Log)
}

/// Both payoffs in one pass: `(exact, log)`. Identical to calling
/// [`simulate_ms`] and [`simulate_msln`] separately with the same config.
pub fn simulate_both(contract: &ContractSpec, market: &MarketParams, cfg: &McConfig) -> Result<(McResult, McResult)> {
    market.validate()?;
    cfg.check()?;
    let model = PathModel::new(market, contract);
    let stats = run_chunks(&model, cfg.samples(), cfg.antithetic, keys_for(cfg), (true, true));
    let d = market.discount();
    Ok((finish(&stats.exact, d, cfg), finish(&stats.log, d, cfg)))
}

/// k-statistics of the capped log-return sum over independent paths.
///
/// Antithetic pairing is ignored here since the estimators assume independent
/// samples.
pub fn empirical_cumulants(contract: &ContractSpec, market: &MarketParams, cfg: &McConfig) -> Result<EmpiricalCumulants> {
    market.validate()?;
    if cfg.paths < MIN_CUMULANT_PATHS {
        return Err(PricingError::PathCount {
            paths: cfg.paths,
            min: MIN_CUMULANT_PATHS,
        });
    }
    let model = PathModel::new(market, contract);
    let key = keys_for(cfg).1;
    let n_chunks = cfg.paths.div_ceil(CHUNK as u64) as usize;
    let chunks = par::map_indexed(n_chunks, |chunk| {
        let start = chunk as u64 * CHUNK as u64;
        let end = (start + CHUNK as u64).min(cfg.paths);
        let mut z = vec![0.0; model.periods];
        (start..end)
            .map(|index| {
                fill_normals(key, index, &mut z);
                model.evaluate(&z, 1.0).2
            })
            .collect::<Vec<f64>>()
    });
    let sums: Vec<f64> = chunks.into_iter().flatten().collect();
    Ok(k_statistics(&sums))
}
