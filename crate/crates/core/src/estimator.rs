//! Partition-function and constrained-count estimation.
//!
//! `Z_{beta*}` is written as `2^k * prod_i Z_{beta_i} / Z_{beta_{i-1}}` over a
//! cooling schedule with step `1/n`; each ratio is the mean of
//! `exp(-(beta_i - beta_{i-1}) E(c))` for `c ~ p_{beta_{i-1}}`, estimated from
//! `t` independent chains. Everything is accumulated as `log2`.

use std::f64::consts::E as EULER;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constraint::EnergyFunction;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::gibbs::{default_init, ChainState, InitMode, Metropolis};
use crate::rm::{binomial_prefix_sum, RmCode};
use crate::rng::RngStream;

/// `beta_0 = 0, beta_i = min(i/n, beta*)`, `len = ceil(beta* n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingSchedule {
    pub n: usize,
    pub beta_star: f64,
    pub len: u64,
}

impl CoolingSchedule {
    pub fn new(n: usize, beta_star: f64) -> Result<Self> {
        if !(beta_star > 0.0 && beta_star.is_finite()) {
            return Err(Error::Parameter(format!("beta* must be finite and > 0, got {beta_star}")));
        }
        let len = (beta_star * n as f64 - 1e-9).ceil().max(1.0) as u64;
        Ok(CoolingSchedule { n, beta_star, len })
    }

    pub fn step(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn beta(&self, i: u64) -> f64 {
        if i >= self.len {
            self.beta_star
        } else {
            (i as f64 / self.n as f64).min(self.beta_star)
        }
    }
}

/// Per-step sample count for a `(1 +- eps)` estimate with probability 3/4,
/// using the variance ratio bound `B = e^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBudget {
    pub ell: u64,
    pub epsilon: f64,
    pub b: f64,
    /// `ceil(16 B ell / epsilon^2)` samples per schedule step.
    pub t_star: u64,
}

impl SampleBudget {
    /// Samples over the whole schedule, `t* * ell`.
    pub fn total_samples(&self) -> u128 {
        self.t_star as u128 * self.ell as u128
    }
}

pub fn sample_budget(ell: u64, epsilon: f64) -> Result<SampleBudget> {
    if ell == 0 {
        return Err(Error::parameter("schedule length must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Parameter(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let b = EULER * EULER;
    let t_star = (16.0 * b * ell as f64 / (epsilon * epsilon)).ceil() as u64;
    Ok(SampleBudget {
        ell,
        epsilon,
        b,
        t_star,
    })
}

/// Where the adaptive loop draws its samples relative to the `beta` update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdaptiveOrdering {
    /// Draw at the current `beta`, then increment (matches the ratio identity).
    #[default]
    DrawThenIncrement,
    /// Increment `beta` first, then draw at the new value.
    IncrementThenDraw,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Schedule {
    /// Fixed schedule up to `beta_star`.
    Fixed { beta_star: f64 },
    /// Run until `|curr - prev| <= delta`.
    Adaptive { delta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Samples per schedule step.
    pub t: usize,
    /// Metropolis steps per chain.
    pub tau: u64,
    pub init: InitMode,
    /// Draw the `t` samples of a step from one chain (burn-in `tau`, then
    /// spaced `tau / t` apart) instead of `t` independent chains.
    pub reuse_chain: bool,
    /// Start step `i`'s chains from step `i-1`'s final states.
    pub warm_start: bool,
    pub ordering: AdaptiveOrdering,
    /// Iteration cap for the adaptive loop; `None` means `4 n^3`.
    pub ell_max: Option<u64>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            t: 100,
            tau: 10_000,
            init: InitMode::Zero,
            reuse_chain: false,
            warm_start: false,
            ordering: AdaptiveOrdering::DrawThenIncrement,
            ell_max: None,
        }
    }
}

impl EstimatorConfig {
    pub fn with_samples(t: usize, tau: u64) -> Self {
        EstimatorConfig {
            t,
            tau,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::parameter("t must be at least 1"));
        }
        if self.tau == 0 {
            return Err(Error::parameter("tau must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub k: usize,
    /// `log2` of the estimate.
    pub log2_estimate: f64,
    /// `log2_estimate / n`.
    pub rate: f64,
    /// Per-step sample means `Y_i`.
    pub ratio_trace: Vec<f64>,
    pub steps_used: u64,
    pub samples_per_step: usize,
    pub tau: u64,
    pub seed: u64,
    /// Inverse temperature reached (`beta*` or the adaptive stopping point).
    pub final_beta: f64,
    /// Mean energy of the last step's samples.
    pub terminal_mean_energy: f64,
    /// False when the adaptive loop hit its iteration cap.
    pub converged: bool,
    /// First step at which all `t` samples had zero energy.
    pub first_all_zero_step: Option<u64>,
}

impl EstimateResult {
    /// The estimate as a float (may overflow to infinity for huge codes).
    pub fn estimate(&self) -> f64 {
        self.log2_estimate.exp2()
    }
}

impl fmt::Display for EstimateResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RM({},{}): Z_hat = {} (log2 {:.4}), rate {:.4}, {} steps{}",
            self.m,
            self.r,
            format_sci(self.log2_estimate),
            self.log2_estimate,
            self.rate,
            self.steps_used,
            if self.converged { "" } else { " [not converged]" }
        )
    }
}

/// `2^log2` in `a.bcd×10^e` form, without overflowing for large exponents.
pub fn format_sci(log2: f64) -> String {
    let log10 = log2 * std::f64::consts::LOG10_2;
    if log10.abs() < 6.0 {
        let v = log2.exp2();
        return format!("{}", (v * 1000.0).round() / 1000.0);
    }
    let mut exp = log10.floor();
    let mut mantissa = 10f64.powf(log10 - exp);
    if (mantissa * 1000.0).round() >= 10_000.0 {
        mantissa /= 10.0;
        exp += 1.0;
    }
    format!("{mantissa:.3}×10^{exp}")
}

/// Draws the `t` samples of one schedule step.
struct StepSampler<'a, E> {
    code: &'a RmCode,
    energy: &'a E,
    config: &'a EstimatorConfig,
    stream: RngStream,
    warm: Option<Vec<BitVector>>,
}

impl<'a, E: EnergyFunction> StepSampler<'a, E> {
    fn new(code: &'a RmCode, energy: &'a E, config: &'a EstimatorConfig, stream: RngStream) -> Self {
        StepSampler {
            code,
            energy,
            config,
            stream,
            warm: None,
        }
    }

    fn draw(&mut self, step: u64, beta: f64) -> Vec<u32> {
        let stream = self.stream.child(step);
        let (code, energy, config) = (self.code, self.energy, self.config);
        if config.reuse_chain {
            let mut g = stream.generator();
            let init = match &self.warm {
                Some(prev) => prev[0].clone(),
                None => default_init(code, config.init, &mut g),
            };
            let mut kernel = Metropolis::new(code, energy, beta);
            let mut state = ChainState::new(init, energy);
            kernel.run(&mut state, config.tau, &mut g);
            let spacing = (config.tau / config.t as u64).max(1);
            let mut energies = Vec::with_capacity(config.t);
            for j in 0..config.t {
                if j > 0 {
                    kernel.run(&mut state, spacing, &mut g);
                }
                energies.push(state.energy());
            }
            if config.warm_start {
                self.warm = Some(vec![state.into_codeword()]);
            }
            return energies;
        }

        let warm = self.warm.take();
        let outcomes: Vec<(u32, BitVector)> = (0..config.t)
            .into_par_iter()
            .map(|j| {
                let mut g = stream.child(j as u64).generator();
                let init = match &warm {
                    Some(prev) => prev[j].clone(),
                    None => default_init(code, config.init, &mut g),
                };
                let mut state = ChainState::new(init, energy);
                Metropolis::new(code, energy, beta).run(&mut state, config.tau, &mut g);
                (state.energy(), state.into_codeword())
            })
            .collect();
        let energies = outcomes.iter().map(|(e, _)| *e).collect();
        if config.warm_start {
            self.warm = Some(outcomes.into_iter().map(|(_, c)| c).collect());
        }
        energies
    }
}

/// Sample means of `X = exp(-dbeta E)` and of `1 - X`, the latter computed
/// with `expm1` so it stays accurate when `Y` is close to 1.
fn step_means(energies: &[u32], dbeta: f64) -> (f64, f64) {
    let t = energies.len() as f64;
    let y = energies.iter().map(|&e| (-dbeta * e as f64).exp()).sum::<f64>() / t;
    let one_minus_y = energies.iter().map(|&e| -(-dbeta * e as f64).exp_m1()).sum::<f64>() / t;
    (y, one_minus_y)
}

fn mean_energy(energies: &[u32]) -> f64 {
    energies.iter().map(|&e| e as f64).sum::<f64>() / energies.len() as f64
}

fn base_result(code: &RmCode, config: &EstimatorConfig, seed: u64) -> EstimateResult {
    EstimateResult {
        m: code.m(),
        r: code.r(),
        n: code.n(),
        k: code.k(),
        log2_estimate: code.k() as f64,
        rate: code.rate(),
        ratio_trace: Vec::new(),
        steps_used: 0,
        samples_per_step: config.t,
        tau: config.tau,
        seed,
        final_beta: 0.0,
        terminal_mean_energy: f64::NAN,
        converged: true,
        first_all_zero_step: None,
    }
}

fn run_fixed<E: EnergyFunction>(
    code: &RmCode,
    energy: &E,
    beta_star: f64,
    config: &EstimatorConfig,
    seed: u64,
    stream: RngStream,
) -> Result<EstimateResult> {
    config.validate()?;
    let schedule = CoolingSchedule::new(code.n(), beta_star)?;
    let mut result = base_result(code, config, seed);
    let mut sampler = StepSampler::new(code, energy, config, stream);
    let mut log2_z = code.k() as f64;
    for i in 1..=schedule.len {
        let (prev_beta, beta) = (schedule.beta(i - 1), schedule.beta(i));
        let energies = sampler.draw(i - 1, prev_beta);
        let (y, _) = step_means(&energies, beta - prev_beta);
        debug_assert!((EULER.recip() - 1e-12..=1.0).contains(&y));
        log2_z += y.log2();
        result.ratio_trace.push(y);
        if result.first_all_zero_step.is_none() && energies.iter().all(|&e| e == 0) {
            result.first_all_zero_step = Some(i);
        }
        result.terminal_mean_energy = mean_energy(&energies);
    }
    result.steps_used = schedule.len;
    result.final_beta = schedule.beta_star;
    result.log2_estimate = log2_z;
    result.rate = log2_z / code.n() as f64;
    Ok(result)
}

fn run_adaptive<E: EnergyFunction>(
    code: &RmCode,
    energy: &E,
    delta: f64,
    config: &EstimatorConfig,
    seed: u64,
    stream: RngStream,
) -> Result<EstimateResult> {
    config.validate()?;
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Parameter(format!("delta must be > 0, got {delta}")));
    }
    let n = code.n();
    let dbeta = 1.0 / n as f64;
    let ell_max = config.ell_max.unwrap_or(4 * (n as u64).pow(3));
    let log2_delta = delta.log2();

    let mut result = base_result(code, config, seed);
    let mut sampler = StepSampler::new(code, energy, config, stream);
    let mut log2_curr = code.k() as f64;
    let mut converged = false;
    let mut iter = 0u64;
    while iter < ell_max {
        let draw_beta = match config.ordering {
            AdaptiveOrdering::DrawThenIncrement => iter as f64 * dbeta,
            AdaptiveOrdering::IncrementThenDraw => (iter + 1) as f64 * dbeta,
        };
        let energies = sampler.draw(iter, draw_beta);
        iter += 1;
        let (y, one_minus_y) = step_means(&energies, dbeta);
        let log2_prev = log2_curr;
        log2_curr += y.log2();
        result.ratio_trace.push(y);
        result.terminal_mean_energy = mean_energy(&energies);
        if result.first_all_zero_step.is_none() && energies.iter().all(|&e| e == 0) {
            result.first_all_zero_step = Some(iter);
        }
        // |curr - prev| = prev (1 - Y)
        if one_minus_y == 0.0 || log2_prev + one_minus_y.log2() <= log2_delta {
            converged = true;
            break;
        }
    }
    result.steps_used = iter;
    result.final_beta = iter as f64 * dbeta;
    result.converged = converged;
    result.log2_estimate = log2_curr;
    result.rate = log2_curr / n as f64;
    Ok(result)
}

/// Runs one estimate from an explicit root stream.
pub fn estimate_with_stream<E: EnergyFunction>(
    code: &RmCode,
    energy: &E,
    schedule: Schedule,
    config: &EstimatorConfig,
    seed: u64,
    stream: RngStream,
) -> Result<EstimateResult> {
    match schedule {
        Schedule::Fixed { beta_star } => run_fixed(code, energy, beta_star, config, seed, stream),
        Schedule::Adaptive { delta } => run_adaptive(code, energy, delta, config, seed, stream),
    }
}

/// Replica `i` of a seed uses stream `seed / i`; a single estimate is replica 0.
fn replica_stream(seed: u64, replica: u64) -> RngStream {
    RngStream::new(seed).child(replica)
}

/// Estimate of `Z_{beta*}` over the fixed schedule of length `ceil(beta* n)`.
pub fn estimate_fixed_schedule<E: EnergyFunction>(
    code: &RmCode,
    energy: &E,
    beta_star: f64,
    config: &EstimatorConfig,
    seed: u64,
) -> Result<EstimateResult> {
    run_fixed(code, energy, beta_star, config, seed, replica_stream(seed, 0))
}

/// Adaptive estimate that stops once the running product settles within `delta`.
pub fn estimate_adaptive<E: EnergyFunction>(
    code: &RmCode,
    energy: &E,
    delta: f64,
    config: &EstimatorConfig,
    seed: u64,
) -> Result<EstimateResult> {
    run_adaptive(code, energy, delta, config, seed, replica_stream(seed, 0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MedianEstimate {
    pub log2_median: f64,
    pub rate: f64,
    pub replicas: Vec<EstimateResult>,
}

/// Median of `values` (mean of the two central values for even length).
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Median of `replicas` independent estimates, taken on `log2` values.
pub fn median_amplify<E: EnergyFunction>(
    code: &RmCode,
    energy: &E,
    schedule: Schedule,
    config: &EstimatorConfig,
    replicas: usize,
    seed: u64,
) -> Result<MedianEstimate> {
    if replicas == 0 {
        return Err(Error::parameter("need at least one replica"));
    }
    let runs = (0..replicas as u64)
        .map(|i| estimate_with_stream(code, energy, schedule, config, seed, replica_stream(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    let logs: Vec<f64> = runs.iter().map(|r| r.log2_estimate).collect();
    let log2_median = median(&logs);
    Ok(MedianEstimate {
        log2_median,
        rate: log2_median / code.n() as f64,
        replicas: runs,
    })
}

/// How to read the first branch of the RLL(1) rate lower bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerBoundReading {
    /// `log2 C(m-1, <= r-1) / 2^m`.
    #[default]
    Log2,
    /// `C(m-1, <= r-1) / 2^m`, without the logarithm.
    Count,
}

impl FromStr for LowerBoundReading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log2" => Ok(LowerBoundReading::Log2),
            "count" | "no-log" => Ok(LowerBoundReading::Count),
            other => Err(Error::Parameter(format!("unknown lower-bound reading {other:?} (log2|count)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateLowerBound {
    pub first_branch: f64,
    pub second_branch: f64,
    pub value: f64,
}

/// Lower bound on the rate of the largest `(1,inf)`-RLL subcode of RM(m,r):
/// `max(first, R - 3/8 - 1/(4 * 2^{m-1}))` with `R = k / 2^m`.
pub fn rll_rate_lower_bound(m: usize, r: usize, reading: LowerBoundReading) -> Result<RateLowerBound> {
    if r == 0 || r > m {
        return Err(Error::Parameter(format!("need 1 <= r <= m, got m={m}, r={r}")));
    }
    let n = (1u64 << m) as f64;
    let count = binomial_prefix_sum(m - 1, r - 1) as f64;
    let first_branch = match reading {
        LowerBoundReading::Log2 => count.log2() / n,
        LowerBoundReading::Count => count / n,
    };
    let rate = binomial_prefix_sum(m, r) as f64 / n;
    let second_branch = rate - 3.0 / 8.0 - 1.0 / (4.0 * (n / 2.0));
    Ok(RateLowerBound {
        first_branch,
        second_branch,
        value: first_branch.max(second_branch),
    })
}
