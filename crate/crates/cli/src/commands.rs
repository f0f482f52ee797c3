use std::collections::HashMap;
use std::time::Instant;

use rmcount::estimator::format_sci;
use rmcount::oracle::{rate_of_count, OracleResult};
use rmcount::reference::{self, ReferenceRow};
use rmcount::{
    exact_constrained_count, median_amplify, rll_rate_lower_bound, sample_budget, weight_enumerator,
    weight_enumerator_via_dual, Constraint, CoolingSchedule, EnergyHistogram, LowerBoundReading, RmCode,
};

use crate::config::{CommandKind, RunConfig, WeightsMode};
use crate::error::{CliError, CliResult};
use crate::record::{
    BudgetReport, EstimateReport, LowerBoundReport, Payload, RunRecord, TableReport, TableRow, WeightEntry,
    WeightsReport,
};

/// Assumed chain throughput for runtime projections.
pub const DEFAULT_STEPS_PER_SECOND: f64 = 1e7;

fn code_of(c: &RunConfig) -> CliResult<RmCode> {
    let m = c.m.ok_or_else(|| CliError::Usage("--m is required".into()))?;
    let r = c.r.ok_or_else(|| CliError::Usage("--r is required".into()))?;
    Ok(RmCode::new(m, r)?)
}

fn constraint_of(c: &RunConfig) -> CliResult<Constraint> {
    c.constraint
        .ok_or_else(|| CliError::Usage(format!("--constraint is required ({})", rmcount::constraint::CONSTRAINT_GRAMMAR)))
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

pub fn run(config: RunConfig) -> CliResult<RunRecord> {
    let start = Instant::now();
    let mut warnings = Vec::new();
    let payload = match config.command {
        CommandKind::Estimate => Payload::Estimate(estimate(&config, &mut warnings)?),
        CommandKind::Oracle => Payload::Oracle(oracle(&config)?),
        CommandKind::Weights => Payload::Weights(weights(&config, &mut warnings)?),
        CommandKind::Budget => Payload::Budget(budget(&config)?),
        CommandKind::LowerBound => Payload::LowerBound(lower_bound(&config)?),
        CommandKind::ReproduceTable => Payload::Table(reproduce_table(&config, &mut warnings)?),
    };
    Ok(RunRecord::new(config, payload, elapsed_ms(start), warnings))
}

/// Median-of-`replicas` estimate for one code and constraint.
pub fn estimate_report(
    code: &RmCode,
    constraint: Constraint,
    config: &RunConfig,
    exact: Option<u128>,
) -> CliResult<EstimateReport> {
    constraint.validate(code.n())?;
    let est = median_amplify(
        code,
        &constraint,
        config.schedule(),
        &config.estimator_config(),
        config.replicas,
        config.seed,
    )?;
    Ok(EstimateReport {
        m: code.m(),
        r: code.r(),
        n: code.n(),
        k: code.k(),
        constraint: constraint.to_string(),
        log2_z_hat: est.log2_median,
        z_hat: format_sci(est.log2_median),
        rate: est.rate,
        converged: est.replicas.iter().all(|r| r.converged),
        steps: est.replicas.iter().map(|r| r.steps_used).sum(),
        exact_count: exact,
        exact_rate: exact.map(|z| rate_of_count(z, code.n())).filter(|r| r.is_finite()),
        runs: est.replicas,
    })
}

fn non_convergence_warning(report: &EstimateReport) -> Option<String> {
    (!report.converged).then(|| {
        format!(
            "RM({},{}) {}: iteration cap reached before the estimate settled",
            report.m, report.r, report.constraint
        )
    })
}

fn estimate(config: &RunConfig, warnings: &mut Vec<String>) -> CliResult<EstimateReport> {
    let code = code_of(config)?;
    let constraint = constraint_of(config)?;
    let exact = if config.exact {
        Some(exact_constrained_count(&code, &constraint, config.exhaustive_bound())?)
    } else {
        None
    };
    let report = estimate_report(&code, constraint, config, exact)?;
    warnings.extend(non_convergence_warning(&report));
    Ok(report)
}

fn oracle(config: &RunConfig) -> CliResult<OracleResult> {
    let code = code_of(config)?;
    let bound = config.exhaustive_bound();
    let mut result = OracleResult {
        m: code.m(),
        r: code.r(),
        constraint: None,
        exact_count: None,
        exact_rate: None,
        weight_enumerator: None,
        partition_values: Vec::new(),
    };
    match config.constraint {
        Some(c) => {
            c.validate(code.n())?;
            let hist = EnergyHistogram::compute(&code, &c, bound)?;
            let z = hist.zero_count() as u128;
            result.constraint = Some(c.to_string());
            result.exact_count = Some(z);
            result.exact_rate = Some(rate_of_count(z, code.n())).filter(|r| r.is_finite());
            for &beta in config.betas.as_deref().unwrap_or(&[]) {
                result.partition_values.push((beta, hist.partition_function(beta)));
            }
        }
        None => result.weight_enumerator = Some(weight_enumerator(&code, bound)?),
    }
    Ok(result)
}

/// Exact enumerator by direct enumeration, or through the dual code.
pub fn exact_weights(code: &RmCode, bound: usize) -> CliResult<Vec<u128>> {
    if code.k() <= bound {
        Ok(weight_enumerator(code, bound)?)
    } else {
        Ok(weight_enumerator_via_dual(code, bound)?)
    }
}

/// Weights swept in estimate mode: even `w` in `[2^{m-r}, 2^{m-1}]`
/// (every `w` in `[1, n/2]` for the full space).
pub fn sweep_weights(code: &RmCode) -> Vec<usize> {
    let n = code.n();
    if code.r() == code.m() {
        return (1..=n / 2).collect();
    }
    (code.min_distance()..=n / 2).step_by(2).collect()
}

fn weights(config: &RunConfig, warnings: &mut Vec<String>) -> CliResult<WeightsReport> {
    let code = code_of(config)?;
    let n = code.n();
    let mode = config.weights_mode.unwrap_or_default();
    let bound = config.exhaustive_bound();
    let exact = match mode {
        WeightsMode::Exact => Some(exact_weights(&code, bound)?),
        WeightsMode::Estimate => exact_weights(&code, bound).ok(),
    };
    let entry = |w: usize, source: &str| WeightEntry {
        weight: w,
        source: source.to_string(),
        exact: exact.as_ref().map(|a| a[w]),
        exact_rate: exact.as_ref().map(|a| rate_of_count(a[w], n)).filter(|r| r.is_finite()),
        log2_estimate: None,
        rate: None,
        converged: None,
        steps: None,
    };

    let mut entries: Vec<WeightEntry> = Vec::new();
    let mut max_gap: Option<f64> = None;
    match mode {
        WeightsMode::Exact => entries.extend((0..=n).map(|w| entry(w, "exact"))),
        WeightsMode::Estimate => {
            let targets = match &config.weights {
                Some(ws) => ws.clone(),
                None => sweep_weights(&code),
            };
            let mut estimated: HashMap<usize, WeightEntry> = HashMap::new();
            for &w in &targets {
                if w > n {
                    return Err(CliError::Usage(format!("weight {w} exceeds n = {n}")));
                }
                let report = estimate_report(&code, Constraint::ConstantWeight(w), config, None)?;
                warnings.extend(non_convergence_warning(&report));
                let mut e = entry(w, "estimate");
                e.log2_estimate = Some(report.log2_z_hat);
                e.rate = Some(report.rate);
                e.converged = Some(report.converged);
                e.steps = Some(report.steps);
                if let (Some(exact_rate), Some(rate)) = (e.exact_rate, e.rate) {
                    let gap = (rate - exact_rate).abs();
                    max_gap = Some(max_gap.map_or(gap, |g: f64| g.max(gap)));
                }
                estimated.insert(w, e);
            }
            // A(w) = A(n - w) for RM codes.
            let mirrored: Vec<WeightEntry> = estimated
                .values()
                .filter(|e| !estimated.contains_key(&(n - e.weight)))
                .map(|e| WeightEntry {
                    source: "mirror".to_string(),
                    weight: n - e.weight,
                    exact: exact.as_ref().map(|a| a[n - e.weight]),
                    ..e.clone()
                })
                .collect();
            entries.extend(estimated.into_values());
            entries.extend(mirrored);
            entries.sort_by_key(|e| e.weight);
        }
    }
    Ok(WeightsReport {
        m: code.m(),
        r: code.r(),
        n,
        mode: match mode {
            WeightsMode::Exact => "exact".into(),
            WeightsMode::Estimate => "estimate".into(),
        },
        entries,
        max_rate_gap: max_gap,
    })
}

fn budget(config: &RunConfig) -> CliResult<BudgetReport> {
    let epsilon = config.epsilon.unwrap_or(1.0);
    let ell_for = |n: usize, beta_star: f64| CoolingSchedule::new(n, beta_star).map(|s| s.len);
    let (ell, n, beta_star) = match (config.ell, config.n) {
        (Some(ell), _) => (ell, config.n, config.beta_star),
        (None, Some(n)) => {
            let beta_star = config.beta_star.unwrap_or((n * n) as f64);
            (ell_for(n, beta_star)?, Some(n), Some(beta_star))
        }
        (None, None) => return Err(CliError::Usage("budget needs --ell or --n".into())),
    };
    let b = sample_budget(ell, epsilon)?;
    let total = b.total_samples();
    let steps_per_second = config.steps_per_second.unwrap_or(DEFAULT_STEPS_PER_SECOND);
    let projected_chain_steps = total as f64 * config.tau as f64;
    let doubled = match n {
        Some(n) if config.ell.is_none() => {
            let ell2 = ell_for(2 * n, (4 * n * n) as f64)?;
            Some(sample_budget(ell2, epsilon)?.total_samples())
        }
        _ => None,
    };
    Ok(BudgetReport {
        budget: b,
        n,
        beta_star,
        total_samples: total,
        tau: config.tau,
        projected_chain_steps,
        steps_per_second,
        projected_seconds: projected_chain_steps / steps_per_second,
        doubled_n_total_samples: doubled,
    })
}

fn published_lower_bound(m: usize, r: usize) -> Option<f64> {
    reference::TABLE_II
        .iter()
        .find(|row| (row.m, row.r) == (m, r))
        .and_then(|row| row.lower_bound)
}

fn lower_bound(config: &RunConfig) -> CliResult<LowerBoundReport> {
    let m = config.m.ok_or_else(|| CliError::Usage("--m is required".into()))?;
    let r = config.r.ok_or_else(|| CliError::Usage("--r is required".into()))?;
    let reading = config.lower_bound_reading();
    let other = match reading {
        LowerBoundReading::Log2 => LowerBoundReading::Count,
        LowerBoundReading::Count => LowerBoundReading::Log2,
    };
    Ok(LowerBoundReport {
        m,
        r,
        reading: reading_name(reading).into(),
        bound: rll_rate_lower_bound(m, r, reading)?,
        alternate: rll_rate_lower_bound(m, r, other)?,
        published: published_lower_bound(m, r),
    })
}

fn reading_name(r: LowerBoundReading) -> &'static str {
    match r {
        LowerBoundReading::Log2 => "log2",
        LowerBoundReading::Count => "count",
    }
}

/// Runs one reference row with its own `(tau, t, delta)`.
pub fn run_reference_row(
    row: &ReferenceRow,
    config: &RunConfig,
    exact_cache: &mut HashMap<(usize, usize, Constraint), Option<u128>>,
) -> CliResult<TableRow> {
    let start = Instant::now();
    let code = RmCode::new(row.m, row.r)?;
    let bound = config.exhaustive_bound();
    let exact = *exact_cache
        .entry((row.m, row.r, row.constraint))
        .or_insert_with(|| exact_constrained_count(&code, &row.constraint, bound).ok());
    let row_config = RunConfig {
        tau: row.tau,
        t: row.t,
        delta: row.delta,
        beta_star: None,
        ..config.clone()
    };
    let est = estimate_report(&code, row.constraint, &row_config, exact)?;
    let n = code.n() as f64;
    let lower_bound = (row.constraint == Constraint::Rll(1) && row.lower_bound.is_some())
        .then(|| rll_rate_lower_bound(row.m, row.r, config.lower_bound_reading()).map(|b| b.value))
        .transpose()?;
    Ok(TableRow {
        m: row.m,
        r: row.r,
        constraint: row.constraint.to_string(),
        tau: row.tau,
        t: row.t,
        delta: row.delta,
        published_z_hat: row.z_hat,
        published_rate: row.published_rate(),
        exact_count: exact,
        exact_rate: exact.map(|z| rate_of_count(z, code.n())).filter(|r| r.is_finite()),
        abs_error: exact.map(|z| (est.log2_z_hat.exp2() - z as f64).abs()),
        rate_gap: exact.map(|z| est.rate - (z as f64).log2() / n),
        published_rate_gap: Some(est.rate - row.published_rate()),
        lower_bound,
        estimate: Some(est),
        wall_ms: elapsed_ms(start),
    })
}

fn reproduce_table(config: &RunConfig, warnings: &mut Vec<String>) -> CliResult<TableReport> {
    let name = config
        .table
        .clone()
        .ok_or_else(|| CliError::Usage("reproduce-table needs a table (I, II, III or IV)".into()))?;
    let rows = reference::table(&name).ok_or_else(|| CliError::Usage(format!("unknown table {name:?}")))?;
    let long_only = name.eq_ignore_ascii_case("IV") || name == "4";
    if long_only && !config.flags.long {
        warnings.push("table IV rows need --long (tau = 5e5 on a length-512 code); skipped".into());
        return Ok(TableReport {
            table: name.to_ascii_uppercase(),
            rows: Vec::new(),
            skipped: rows.len(),
        });
    }
    let mut cache = HashMap::new();
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let r = run_reference_row(row, config, &mut cache)?;
        if let Some(w) = r.estimate.as_ref().and_then(non_convergence_warning) {
            warnings.push(w);
        }
        out.push(r);
    }
    Ok(TableReport {
        table: name.to_ascii_uppercase(),
        rows: out,
        skipped: 0,
    })
}

/// Short human-readable summary for the terminal.
pub fn summarize(record: &RunRecord) -> String {
    let mut s = String::new();
    match &record.result {
        Payload::Estimate(e) => {
            s += &format!(
                "RM({},{}) {}: Z_hat = {} (log2 {:.4}), rate {:.4}, {} steps",
                e.m, e.r, e.constraint, e.z_hat, e.log2_z_hat, e.rate, e.steps
            );
            if let (Some(z), Some(rate)) = (e.exact_count, e.exact_rate) {
                s += &format!("; exact Z = {z}, rate {rate:.4}");
            }
        }
        Payload::Oracle(o) => match (&o.exact_count, &o.weight_enumerator) {
            (Some(z), _) => {
                s += &format!("RM({},{}) {}: Z = {z}", o.m, o.r, o.constraint.as_deref().unwrap_or(""));
                if let Some(rate) = o.exact_rate {
                    s += &format!(", rate {rate:.4}");
                }
            }
            (None, Some(a)) => {
                let nz: Vec<String> =
                    a.iter().enumerate().filter(|(_, &v)| v > 0).map(|(w, v)| format!("A({w})={v}")).collect();
                s += &format!("RM({},{}): {}", o.m, o.r, nz.join(" "));
            }
            _ => {}
        },
        Payload::Weights(w) => {
            s += &format!("RM({},{}) weights ({}):", w.m, w.r, w.mode);
            for e in w.entries.iter().filter(|e| e.exact.is_some_and(|v| v > 0) || e.rate.is_some()) {
                s += &format!("\n  w={:>4} {:>8}", e.weight, e.source);
                if let Some(r) = e.rate {
                    s += &format!("  rate {r:.4}");
                }
                if let Some(v) = e.exact {
                    s += &format!("  exact {v}");
                }
            }
            if let Some(g) = w.max_rate_gap {
                s += &format!("\n  max rate gap {g:.4}");
            }
        }
        Payload::Budget(b) => {
            s += &format!(
                "ell = {}, epsilon = {}, t* = {}, total samples = {}, ~{:.3e} chain steps (~{:.3e} s)",
                b.budget.ell, b.budget.epsilon, b.budget.t_star, b.total_samples, b.projected_chain_steps,
                b.projected_seconds
            );
            if let Some(d) = b.doubled_n_total_samples {
                s += &format!("; doubling n gives {d} samples");
            }
        }
        Payload::LowerBound(lb) => {
            s += &format!(
                "RM({},{}) RLL(1) rate lower bound ({}): {:.4} [first {:.4}, second {:.4}; other reading {:.4}]",
                lb.m, lb.r, lb.reading, lb.bound.value, lb.bound.first_branch, lb.bound.second_branch,
                lb.alternate.value
            );
        }
        Payload::Table(t) => {
            s += &format!("table {}: {} rows", t.table, t.rows.len());
            for r in &t.rows {
                let e = r.estimate.as_ref();
                s += &format!(
                    "\n  RM({},{}) {} tau={} t={} delta={}: Z_hat {} rate {:.4} | published rate {:.4}",
                    r.m,
                    r.r,
                    r.constraint,
                    r.tau,
                    r.t,
                    r.delta,
                    e.map_or("-".into(), |e| e.z_hat.clone()),
                    e.map_or(f64::NAN, |e| e.rate),
                    r.published_rate
                );
                if let (Some(z), Some(rate)) = (r.exact_count, r.exact_rate) {
                    s += &format!(" | Z {z} rate {rate:.4}");
                }
                if let Some(lb) = r.lower_bound {
                    s += &format!(" | LB {lb:.4}");
                }
            }
        }
    }
    for w in &record.warnings {
        s += &format!("\nwarning: {w}");
    }
    s
}
