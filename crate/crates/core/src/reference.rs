//! Published benchmark rows: parameters, estimates and exact counts for the
//! RLL and constant-weight experiments on small and moderate RM codes.

use serde::Serialize;

use crate::constraint::Constraint;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub m: usize,
    pub r: usize,
    pub constraint: Constraint,
    pub tau: u64,
    pub t: usize,
    pub delta: f64,
    /// Published estimate.
    pub z_hat: f64,
    /// Published rate of the estimate.
    pub rate_hat: f64,
    /// Exact count, when brute force is feasible.
    pub exact: Option<u128>,
    /// Published RLL(1) rate lower bound, where listed.
    pub lower_bound: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
const fn row(
    m: usize,
    r: usize,
    constraint: Constraint,
    tau: u64,
    t: usize,
    delta: f64,
    z_hat: f64,
    rate_hat: f64,
    exact: Option<u128>,
    lower_bound: Option<f64>,
) -> ReferenceRow {
    ReferenceRow {
        m,
        r,
        constraint,
        tau,
        t,
        delta,
        z_hat,
        rate_hat,
        exact,
        lower_bound,
    }
}

const RLL1: Constraint = Constraint::Rll(1);
const RLL2: Constraint = Constraint::Rll(2);

/// RLL(1) subcodes with exact counts.
pub const TABLE_I: [ReferenceRow; 8] = [
    row(4, 2, RLL1, 5_000, 50, 0.1, 80.0, 0.3951, Some(83), None),
    row(5, 2, RLL1, 10_000, 50, 0.1, 278.446, 0.2538, Some(259), None),
    row(5, 3, RLL1, 10_000, 10, 0.001, 126490.0, 0.5296, Some(89172), None),
    row(6, 1, RLL1, 10_000, 10, 0.001, 5.551, 0.0386, Some(4), None),
    row(6, 2, RLL1, 10_000, 10, 0.001, 997.7, 0.1557, Some(803), None),
    row(7, 2, RLL1, 10_000, 5, 0.1, 3128.4, 0.0907, Some(2467), None),
    row(7, 2, RLL1, 10_000, 100, 0.001, 2515.5, 0.0883, Some(2467), None),
    row(8, 1, RLL1, 100_000, 10, 0.001, 5.3787, 0.0095, Some(4), None),
];

/// RLL(1) subcodes of moderate-length codes, with the analytic lower bound.
pub const TABLE_II: [ReferenceRow; 7] = [
    row(7, 3, RLL1, 10_000, 100, 0.001, 2.926e8, 0.1678, None, Some(0.1211)),
    row(7, 4, RLL1, 10_000, 100, 0.001, 1.199e18, 0.4692, None, Some(0.3945)),
    row(7, 5, RLL1, 10_000, 100, 0.001, 2.676e24, 0.6340, None, Some(0.5586)),
    row(8, 2, RLL1, 100_000, 10, 0.1, 1.255e4, 0.0526, None, Some(0.0312)),
    row(8, 3, RLL1, 100_000, 10, 0.1, 5.249e10, 0.1391, None, Some(0.1133)),
    row(8, 4, RLL1, 100_000, 10, 0.1, 5.754e25, 0.3343, None, Some(0.2598)),
    row(8, 5, RLL1, 100_000, 10, 0.1, 3.464e42, 0.5520, None, Some(0.4785)),
];

/// RLL(2) subcodes; all rows use `tau = 10^4, t = 100, delta = 0.001`.
/// Published rates are not listed, so `rate_hat` is derived from `z_hat`.
pub const TABLE_III: [ReferenceRow; 9] = [
    row(4, 1, RLL2, 10_000, 100, 0.001, 1.101, f64::NAN, Some(1), None),
    row(4, 2, RLL2, 10_000, 100, 0.001, 36.614, f64::NAN, Some(37), None),
    row(4, 3, RLL2, 10_000, 100, 0.001, 350.743, f64::NAN, Some(303), None),
    row(5, 2, RLL2, 10_000, 100, 0.001, 87.025, f64::NAN, Some(81), None),
    row(5, 3, RLL2, 10_000, 100, 0.001, 4998.2, f64::NAN, Some(4917), None),
    row(5, 4, RLL2, 10_000, 100, 0.001, 1.271e5, f64::NAN, None, None),
    row(6, 2, RLL2, 10_000, 100, 0.001, 184.473, f64::NAN, Some(177), None),
    row(6, 3, RLL2, 10_000, 100, 0.001, 6.663e4, f64::NAN, None, None),
    row(7, 2, RLL2, 10_000, 100, 0.001, 357.672, f64::NAN, None, None),
];

/// Selected weight-enumerator entries of RM(9,4).
pub const TABLE_IV: [ReferenceRow; 3] = [
    row(9, 4, Constraint::ConstantWeight(76), 500_000, 1, 0.001, 4.079e22, 0.1467, None, None),
    row(9, 4, Constraint::ConstantWeight(80), 500_000, 1, 0.001, 2.991e23, 0.1523, None, None),
    row(9, 4, Constraint::ConstantWeight(84), 500_000, 1, 0.001, 1.429e25, 0.1632, None, None),
];

/// Parameters for weight-enumerator sweeps.
pub const WEIGHT_SWEEP_TAU: u64 = 10_000;
pub const WEIGHT_SWEEP_T: usize = 100;
pub const WEIGHT_SWEEP_DELTA: f64 = 0.001;

impl ReferenceRow {
    pub fn n(&self) -> usize {
        1 << self.m
    }

    /// Published rate, or the one implied by the published estimate.
    pub fn published_rate(&self) -> f64 {
        if self.rate_hat.is_nan() {
            self.implied_rate()
        } else {
            self.rate_hat
        }
    }

    /// `log2(z_hat) / n`.
    pub fn implied_rate(&self) -> f64 {
        self.z_hat.log2() / self.n() as f64
    }

    pub fn exact_rate(&self) -> Option<f64> {
        self.exact.map(|z| (z as f64).log2() / self.n() as f64)
    }
}

pub fn table(name: &str) -> Option<&'static [ReferenceRow]> {
    match name.to_ascii_uppercase().as_str() {
        "I" | "1" => Some(&TABLE_I),
        "II" | "2" => Some(&TABLE_II),
        "III" | "3" => Some(&TABLE_III),
        "IV" | "4" => Some(&TABLE_IV),
        _ => None,
    }
}
