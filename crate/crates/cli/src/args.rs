use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use rmcount::{Constraint, InitMode};

use crate::config::{CommandKind, OutputFormat, RunConfig, WeightsMode, DEFAULT_DELTA, DEFAULT_T, DEFAULT_TAU};

#[derive(Debug, Parser)]
#[command(name = "rmcount", version, about = "Estimate sizes of constrained subcodes of Reed-Muller codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Write the record here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "RMCOUNT_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Suppress the summary on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub r: usize,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Metropolis steps per chain.
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: u64,
    /// Samples per schedule step.
    #[arg(long, short = 't', default_value_t = DEFAULT_T)]
    pub t: usize,
    /// Stopping precision of the adaptive schedule.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent replicas; the median is reported.
    #[arg(long, short = 'T', default_value_t = 1)]
    pub replicas: usize,
    /// Starting codeword of each chain (zero | random).
    #[arg(long, default_value_t = InitMode::Zero)]
    pub init: InitMode,
    /// Iteration cap for the adaptive schedule (default 4 n^3).
    #[arg(long)]
    pub ell_max: Option<u64>,
    /// Take each step's samples from one long chain.
    #[arg(long)]
    pub reuse_chain: bool,
    /// Start each step's chains from the previous step's final states.
    #[arg(long)]
    pub warm_start: bool,
    /// Increment beta before drawing each step's samples.
    #[arg(long)]
    pub literal_alg3_order: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the number of constrained codewords.
    Estimate {
        #[command(flatten)]
        code: CodeArgs,
        /// rll:<d> | weight:<w>
        #[arg(long)]
        constraint: Constraint,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Use the fixed schedule up to this beta instead of the adaptive one.
        #[arg(long)]
        beta_star: Option<f64>,
        /// Also compute the exact count by enumeration.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        allow_k29: bool,
    },
    /// Exact count (with a constraint) or weight enumerator (without).
    Oracle {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        constraint: Option<Constraint>,
        /// Report Z_beta at these inverse temperatures.
        #[arg(long = "beta", value_delimiter = ',')]
        betas: Vec<f64>,
        #[arg(long)]
        allow_k29: bool,
    },
    /// Weight enumerator, exact or estimated.
    Weights {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value_t = WeightsMode::Exact)]
        mode: WeightsMode,
        /// Weights to estimate (default: even weights from d to n/2).
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<usize>>,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        allow_k29: bool,
    },
    /// Sample budget t* = ceil(16 e^2 ell / eps^2) and runtime projection.
    Budget {
        #[arg(long)]
        ell: Option<u64>,
        /// Blocklength; with --beta-star (default n^2) sets ell = ceil(beta* n).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        beta_star: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: u64,
        #[arg(long)]
        steps_per_second: Option<f64>,
    },
    /// Analytic lower bound on the RLL(1) subcode rate.
    LowerBound {
        #[command(flatten)]
        code: CodeArgs,
        /// Read the first branch without the logarithm.
        #[arg(long)]
        no_log_lb: bool,
    },
    /// Rerun every row of a reference table (I, II, III, IV).
    ReproduceTable {
        table: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short = 'T', default_value_t = 1)]
        replicas: usize,
        #[arg(long, default_value_t = InitMode::Zero)]
        init: InitMode,
        /// Run the long rows (table IV).
        #[arg(long)]
        long: bool,
        #[arg(long)]
        allow_k29: bool,
        #[arg(long)]
        no_log_lb: bool,
    },
}

fn apply_sampling(c: &mut RunConfig, s: SamplingArgs) {
    c.tau = s.tau;
    c.t = s.t;
    c.delta = s.delta;
    c.seed = s.seed;
    c.replicas = s.replicas;
    c.init = s.init;
    c.ell_max = s.ell_max;
    c.flags.reuse_chain = s.reuse_chain;
    c.flags.warm_start = s.warm_start;
    c.flags.literal_alg3_order = s.literal_alg3_order;
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        let mut c = match self.command {
            Command::Estimate {
                code,
                constraint,
                sampling,
                beta_star,
                exact,
                allow_k29,
            } => {
                let mut c = RunConfig::new(CommandKind::Estimate);
                c.m = Some(code.m);
                c.r = Some(code.r);
                c.constraint = Some(constraint);
                apply_sampling(&mut c, sampling);
                c.beta_star = beta_star;
                c.exact = exact;
                c.flags.allow_k29 = allow_k29;
                c
            }
            Command::Oracle {
                code,
                constraint,
                betas,
                allow_k29,
            } => {
                let mut c = RunConfig::new(CommandKind::Oracle);
                c.m = Some(code.m);
                c.r = Some(code.r);
                c.constraint = constraint;
                c.betas = (!betas.is_empty()).then_some(betas);
                c.flags.allow_k29 = allow_k29;
                c
            }
            Command::Weights {
                code,
                mode,
                weights,
                sampling,
                allow_k29,
            } => {
                let mut c = RunConfig::new(CommandKind::Weights);
                c.m = Some(code.m);
                c.r = Some(code.r);
                c.weights_mode = Some(mode);
                c.weights = weights;
                apply_sampling(&mut c, sampling);
                c.flags.allow_k29 = allow_k29;
                c
            }
            Command::Budget {
                ell,
                n,
                beta_star,
                epsilon,
                tau,
                steps_per_second,
            } => {
                let mut c = RunConfig::new(CommandKind::Budget);
                c.ell = ell;
                c.n = n;
                c.beta_star = beta_star;
                c.epsilon = Some(epsilon);
                c.tau = tau;
                c.steps_per_second = steps_per_second;
                c
            }
            Command::LowerBound { code, no_log_lb } => {
                let mut c = RunConfig::new(CommandKind::LowerBound);
                c.m = Some(code.m);
                c.r = Some(code.r);
                c.flags.no_log_lb = no_log_lb;
                c
            }
            Command::ReproduceTable {
                table,
                seed,
                replicas,
                init,
                long,
                allow_k29,
                no_log_lb,
            } => {
                let mut c = RunConfig::new(CommandKind::ReproduceTable);
                c.table = Some(table);
                c.seed = seed;
                c.replicas = replicas;
                c.init = init;
                c.flags.long = long;
                c.flags.allow_k29 = allow_k29;
                c.flags.no_log_lb = no_log_lb;
                c
            }
        };
        c.output_format = self.format;
        c.output_path = self.output;
        c.parallelism = self.threads;
        c
    }
}
