use std::io::Write;

use serde::{Deserialize, Serialize};

use rmcount::oracle::OracleResult;
use rmcount::{EstimateResult, RateLowerBound, SampleBudget};

use crate::config::RunConfig;
use crate::error::CliResult;

pub const TOOL: &str = "rmcount";

/// Summary of a (possibly median-of-T) estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub k: usize,
    pub constraint: String,
    pub log2_z_hat: f64,
    /// Estimate in `a.bcd×10^e` form.
    pub z_hat: String,
    pub rate: f64,
    pub converged: bool,
    /// Schedule steps summed over replicas.
    pub steps: u64,
    pub exact_count: Option<u128>,
    pub exact_rate: Option<f64>,
    pub runs: Vec<EstimateResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub weight: usize,
    /// `exact`, `estimate`, `mirror` or `trivial`.
    pub source: String,
    pub exact: Option<u128>,
    pub exact_rate: Option<f64>,
    pub log2_estimate: Option<f64>,
    pub rate: Option<f64>,
    pub converged: Option<bool>,
    pub steps: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightsReport {
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub mode: String,
    pub entries: Vec<WeightEntry>,
    /// Largest `|rate - exact_rate|` over estimated weights with `A(w) > 0`.
    pub max_rate_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub budget: SampleBudget,
    pub n: Option<usize>,
    pub beta_star: Option<f64>,
    pub total_samples: u128,
    pub tau: u64,
    pub projected_chain_steps: f64,
    pub steps_per_second: f64,
    pub projected_seconds: f64,
    /// Same projection with `n` doubled and `beta* = (2n)^2`.
    pub doubled_n_total_samples: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub m: usize,
    pub r: usize,
    pub reading: String,
    pub bound: RateLowerBound,
    /// Value under the other reading of the first branch.
    pub alternate: RateLowerBound,
    pub published: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub m: usize,
    pub r: usize,
    pub constraint: String,
    pub tau: u64,
    pub t: usize,
    pub delta: f64,
    pub published_z_hat: f64,
    pub published_rate: f64,
    pub estimate: Option<EstimateReport>,
    pub exact_count: Option<u128>,
    pub exact_rate: Option<f64>,
    /// `|Z_hat - Z|`.
    pub abs_error: Option<f64>,
    /// `rate(Z_hat) - rate(Z)`.
    pub rate_gap: Option<f64>,
    pub published_rate_gap: Option<f64>,
    pub lower_bound: Option<f64>,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: String,
    pub rows: Vec<TableRow>,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Payload {
    Estimate(EstimateReport),
    Oracle(OracleResult),
    Weights(WeightsReport),
    Budget(BudgetReport),
    LowerBound(LowerBoundReport),
    Table(TableReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub wall_ms: u64,
    pub warnings: Vec<String>,
    pub result: Payload,
}

impl RunRecord {
    pub fn new(config: RunConfig, result: Payload, wall_ms: u64, warnings: Vec<String>) -> Self {
        RunRecord {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.content_hash(),
            config,
            wall_ms,
            warnings,
            result,
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(s: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// CSV projection; estimate-like results use the fixed run schema.
    pub fn write_csv<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::Writer::from_writer(out);
        let c = &self.config;
        match &self.result {
            Payload::Estimate(e) => w.serialize(CsvRow::from_estimate(e, c, self.wall_ms))?,
            Payload::Oracle(o) => w.serialize(CsvRow {
                m: o.m,
                r: o.r,
                constraint: o.constraint.clone().unwrap_or_default(),
                exact_z: o.exact_count,
                exact_rate: o.exact_rate,
                wall_ms: self.wall_ms,
                ..CsvRow::empty(c)
            })?,
            Payload::Weights(report) => {
                for e in &report.entries {
                    w.serialize(CsvRow {
                        m: report.m,
                        r: report.r,
                        constraint: format!("weight:{}", e.weight),
                        log2_z_hat: e.log2_estimate,
                        z_hat: e.log2_estimate.map(f64::exp2),
                        rate: e.rate,
                        exact_z: e.exact,
                        exact_rate: e.exact_rate,
                        steps: e.steps,
                        converged: e.converged,
                        wall_ms: self.wall_ms,
                        ..CsvRow::empty(c)
                    })?;
                }
            }
            Payload::Table(t) => {
                for row in &t.rows {
                    w.serialize(TableCsvRow::from_row(&t.table, row, c.seed))?;
                }
            }
            Payload::Budget(b) => w.serialize(b.budget_csv())?,
            Payload::LowerBound(lb) => w.serialize(LowerBoundCsvRow {
                m: lb.m,
                r: lb.r,
                reading: lb.reading.clone(),
                first_branch: lb.bound.first_branch,
                second_branch: lb.bound.second_branch,
                value: lb.bound.value,
                alternate_value: lb.alternate.value,
                published: lb.published,
            })?,
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// One line of the run CSV:
/// `m,r,constraint,tau,t,delta,seed,log2_Z_hat,Z_hat,rate,exact_Z,exact_rate,steps,converged,wall_ms`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub m: usize,
    pub r: usize,
    pub constraint: String,
    pub tau: u64,
    pub t: usize,
    pub delta: f64,
    pub seed: u64,
    #[serde(rename = "log2_Z_hat")]
    pub log2_z_hat: Option<f64>,
    #[serde(rename = "Z_hat")]
    pub z_hat: Option<f64>,
    pub rate: Option<f64>,
    #[serde(rename = "exact_Z")]
    pub exact_z: Option<u128>,
    pub exact_rate: Option<f64>,
    pub steps: Option<u64>,
    pub converged: Option<bool>,
    pub wall_ms: u64,
}

impl CsvRow {
    fn empty(c: &RunConfig) -> Self {
        CsvRow {
            m: c.m.unwrap_or(0),
            r: c.r.unwrap_or(0),
            constraint: String::new(),
            tau: c.tau,
            t: c.t,
            delta: c.delta,
            seed: c.seed,
            log2_z_hat: None,
            z_hat: None,
            rate: None,
            exact_z: None,
            exact_rate: None,
            steps: None,
            converged: None,
            wall_ms: 0,
        }
    }

    fn from_estimate(e: &EstimateReport, c: &RunConfig, wall_ms: u64) -> Self {
        CsvRow {
            m: e.m,
            r: e.r,
            constraint: e.constraint.clone(),
            log2_z_hat: Some(e.log2_z_hat),
            z_hat: Some(e.log2_z_hat.exp2()),
            rate: Some(e.rate),
            exact_z: e.exact_count,
            exact_rate: e.exact_rate,
            steps: Some(e.steps),
            converged: Some(e.converged),
            wall_ms,
            ..CsvRow::empty(c)
        }
    }
}

/// Run schema plus table diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableCsvRow {
    pub table: String,
    pub m: usize,
    pub r: usize,
    pub constraint: String,
    pub tau: u64,
    pub t: usize,
    pub delta: f64,
    pub seed: u64,
    #[serde(rename = "log2_Z_hat")]
    pub log2_z_hat: Option<f64>,
    #[serde(rename = "Z_hat")]
    pub z_hat: Option<f64>,
    pub rate: Option<f64>,
    #[serde(rename = "exact_Z")]
    pub exact_z: Option<u128>,
    pub exact_rate: Option<f64>,
    pub steps: Option<u64>,
    pub converged: Option<bool>,
    pub wall_ms: u64,
    #[serde(rename = "published_Z_hat")]
    pub published_z_hat: f64,
    pub published_rate: f64,
    pub abs_error: Option<f64>,
    pub rate_gap: Option<f64>,
    pub published_rate_gap: Option<f64>,
    pub lower_bound: Option<f64>,
}

impl TableCsvRow {
    fn from_row(table: &str, row: &TableRow, seed: u64) -> Self {
        let est = row.estimate.as_ref();
        TableCsvRow {
            table: table.to_string(),
            m: row.m,
            r: row.r,
            constraint: row.constraint.clone(),
            tau: row.tau,
            t: row.t,
            delta: row.delta,
            seed,
            log2_z_hat: est.map(|e| e.log2_z_hat),
            z_hat: est.map(|e| e.log2_z_hat.exp2()),
            rate: est.map(|e| e.rate),
            exact_z: row.exact_count,
            exact_rate: row.exact_rate,
            steps: est.map(|e| e.steps),
            converged: est.map(|e| e.converged),
            wall_ms: row.wall_ms,
            published_z_hat: row.published_z_hat,
            published_rate: row.published_rate,
            abs_error: row.abs_error,
            rate_gap: row.rate_gap,
            published_rate_gap: row.published_rate_gap,
            lower_bound: row.lower_bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BudgetCsvRow {
    pub ell: u64,
    pub epsilon: f64,
    pub t_star: u64,
    pub total_samples: u128,
    pub projected_chain_steps: f64,
    pub projected_seconds: f64,
    pub doubled_n_total_samples: Option<u128>,
}

impl BudgetReport {
    fn budget_csv(&self) -> BudgetCsvRow {
        BudgetCsvRow {
            ell: self.budget.ell,
            epsilon: self.budget.epsilon,
            t_star: self.budget.t_star,
            total_samples: self.total_samples,
            projected_chain_steps: self.projected_chain_steps,
            projected_seconds: self.projected_seconds,
            doubled_n_total_samples: self.doubled_n_total_samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCsvRow {
    pub m: usize,
    pub r: usize,
    pub reading: String,
    pub first_branch: f64,
    pub second_branch: f64,
    pub value: f64,
    pub alternate_value: f64,
    pub published: Option<f64>,
}

/// Re-serializes every row of a run CSV; used to check round-trips.
pub fn reserialize_run_csv(text: &str) -> CliResult<String> {
    reserialize::<CsvRow>(text)
}

pub fn reserialize_table_csv(text: &str) -> CliResult<String> {
    reserialize::<TableCsvRow>(text)
}

fn reserialize<T: Serialize + for<'de> Deserialize<'de>>(text: &str) -> CliResult<String> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rd.deserialize::<T>() {
            w.serialize(row?)?;
        }
        w.flush()?;
    }
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}
