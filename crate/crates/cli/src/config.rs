use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rmcount::{
    AdaptiveOrdering, Constraint, EstimatorConfig, InitMode, LowerBoundReading, Schedule, DEFAULT_EXHAUSTIVE_K,
    EXTENDED_EXHAUSTIVE_K,
};

pub const DEFAULT_TAU: u64 = 10_000;
pub const DEFAULT_T: usize = 100;
pub const DEFAULT_DELTA: f64 = 0.001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Estimate,
    Oracle,
    Weights,
    Budget,
    LowerBound,
    ReproduceTable,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WeightsMode {
    #[default]
    Exact,
    Estimate,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub reuse_chain: bool,
    pub warm_start: bool,
    pub literal_alg3_order: bool,
    pub no_log_lb: bool,
    pub allow_k29: bool,
    pub long: bool,
}

/// Everything needed to rerun a command; echoed into every record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<Constraint>,
    pub tau: u64,
    pub t: usize,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_star: Option<f64>,
    pub seed: u64,
    pub replicas: usize,
    pub init: InitMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell_max: Option<u64>,
    pub output_format: OutputFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    /// Worker threads; 0 means one per core.
    pub parallelism: usize,
    pub flags: Flags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights_mode: Option<WeightsMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps_per_second: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exact: bool,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        RunConfig {
            command,
            m: None,
            r: None,
            constraint: None,
            tau: DEFAULT_TAU,
            t: DEFAULT_T,
            delta: DEFAULT_DELTA,
            beta_star: None,
            seed: 0,
            replicas: 1,
            init: InitMode::default(),
            ell_max: None,
            output_format: OutputFormat::Json,
            output_path: None,
            parallelism: 0,
            flags: Flags::default(),
            weights_mode: None,
            weights: None,
            ell: None,
            n: None,
            epsilon: None,
            steps_per_second: None,
            table: None,
            betas: None,
            exact: false,
        }
    }

    pub fn estimator_config(&self) -> EstimatorConfig {
        EstimatorConfig {
            t: self.t,
            tau: self.tau,
            init: self.init,
            reuse_chain: self.flags.reuse_chain,
            warm_start: self.flags.warm_start,
            ordering: if self.flags.literal_alg3_order {
                AdaptiveOrdering::IncrementThenDraw
            } else {
                AdaptiveOrdering::DrawThenIncrement
            },
            ell_max: self.ell_max,
        }
    }

    pub fn schedule(&self) -> Schedule {
        match self.beta_star {
            Some(beta_star) => Schedule::Fixed { beta_star },
            None => Schedule::Adaptive { delta: self.delta },
        }
    }

    pub fn exhaustive_bound(&self) -> usize {
        if self.flags.allow_k29 {
            EXTENDED_EXHAUSTIVE_K
        } else {
            DEFAULT_EXHAUSTIVE_K
        }
    }

    pub fn lower_bound_reading(&self) -> LowerBoundReading {
        if self.flags.no_log_lb {
            LowerBoundReading::Count
        } else {
            LowerBoundReading::Log2
        }
    }

    /// Content hash in the style of a git blob id, over the canonical JSON.
    pub fn content_hash(&self) -> String {
        let body = serde_json::to_string(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(format!("blob {}\0", body.len()).as_bytes());
        h.update(body.as_bytes());
        hex::encode(h.finalize())
    }
}
