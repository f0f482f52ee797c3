//! Exact brute-force computations on enumerable codes.
//!
//! Codewords are visited in Gray-code order of the message, so each step
//! costs a single generator-row xor. The message space is split into
//! contiguous Gray-code segments that run in parallel; each segment starts
//! from its own boundary codeword and the per-segment histograms are summed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constraint::EnergyFunction;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::rm::{binomial, checked_binomial, RmCode};

/// Default bound on `k` for materialising the full Gibbs vector.
pub const GIBBS_VECTOR_K: usize = 16;

const SEGMENT_LOG2: usize = 16;

#[inline]
fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

/// Calls `visit` on every codeword exactly once, in Gray-code message order.
pub fn for_each_codeword<F: FnMut(&BitVector)>(code: &RmCode, mut visit: F) {
    let total = 1u64 << code.k();
    let mut c = BitVector::zeros(code.n());
    visit(&c);
    let g = code.generator();
    for i in 1..total {
        c.xor_assign_unchecked(g.row(i.trailing_zeros() as usize));
        visit(&c);
    }
}

/// Histogram of `value(c)` over all codewords; `value` must be `< bins`.
fn codeword_histogram<F>(code: &RmCode, bins: usize, value: F) -> Vec<u64>
where
    F: Fn(&BitVector) -> usize + Sync,
{
    let total = 1u64 << code.k();
    let seg_len = 1u64 << SEGMENT_LOG2.min(code.k());
    let segments = total / seg_len;
    let g = code.generator();
    (0..segments)
        .into_par_iter()
        .map(|s| {
            let mut hist = vec![0u64; bins];
            let start = s * seg_len;
            let mut c = code.encode_index(gray(start));
            hist[value(&c)] += 1;
            for i in start + 1..start + seg_len {
                c.xor_assign_unchecked(g.row(i.trailing_zeros() as usize));
                hist[value(&c)] += 1;
            }
            hist
        })
        .reduce(
            || vec![0u64; bins],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Counts of codewords per energy level `0..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyHistogram {
    counts: Vec<u64>,
}

impl EnergyHistogram {
    pub fn compute<E: EnergyFunction>(code: &RmCode, energy: &E, bound: usize) -> Result<Self> {
        code.check_exhaustive(bound)?;
        let n = code.n();
        let counts = codeword_histogram(code, n + 1, |c| (energy.energy(c) as usize).min(n));
        Ok(EnergyHistogram { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of zero-energy codewords.
    pub fn zero_count(&self) -> u64 {
        self.counts[0]
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// `Z_beta = sum_E h(E) exp(-beta E)`.
    pub fn partition_function(&self, beta: f64) -> f64 {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &h)| h > 0)
            .map(|(e, &h)| h as f64 * (-beta * e as f64).exp())
            .sum()
    }

    /// Mean of `exp(-delta * E)` under `p_beta`, i.e. `Z_{beta+delta} / Z_beta`.
    pub fn expected_factor(&self, beta: f64, delta: f64) -> f64 {
        self.partition_function(beta + delta) / self.partition_function(beta)
    }
}

/// `|C ∩ A|` by exhaustive enumeration.
pub fn exact_constrained_count<E: EnergyFunction>(code: &RmCode, constraint: &E, bound: usize) -> Result<u128> {
    code.check_exhaustive(bound)?;
    let hist = codeword_histogram(code, 2, |c| constraint.is_satisfied(c) as usize);
    Ok(hist[1] as u128)
}

/// `A(w)` for `w = 0..=n`.
pub fn weight_enumerator(code: &RmCode, bound: usize) -> Result<Vec<u128>> {
    code.check_exhaustive(bound)?;
    let hist = codeword_histogram(code, code.n() + 1, |c| c.weight());
    Ok(hist.into_iter().map(u128::from).collect())
}

/// `A(w)` from the dual code's enumerator via the MacWilliams identity,
/// `A(w) = 2^{-k'} sum_j B(j) K_w(j)` with `RM(m,r)^perp = RM(m, m-r-1)`.
///
/// Only the dual is enumerated, so this reaches codes whose own dimension is
/// far beyond the exhaustive bound (RM(6,3) through RM(6,2)).
pub fn weight_enumerator_via_dual(code: &RmCode, bound: usize) -> Result<Vec<u128>> {
    let (m, r, n) = (code.m(), code.r(), code.n());
    if r == m {
        return Ok((0..=n).map(|w| binomial(n, w)).collect());
    }
    let dual = RmCode::new(m, m - r - 1)?;
    let b = weight_enumerator(&dual, bound)?;
    let overflow = || Error::Resource(format!("MacWilliams transform for n = {n} overflows 128-bit arithmetic"));
    let binom = |a: usize, k: usize| {
        checked_binomial(a, k).and_then(|v| i128::try_from(v).ok()).ok_or_else(overflow)
    };
    let mut a = Vec::with_capacity(n + 1);
    for w in 0..=n {
        let mut total: i128 = 0;
        for (j, &bj) in b.iter().enumerate() {
            if bj == 0 {
                continue;
            }
            // Krawtchouk polynomial K_w(j) = sum_s (-1)^s C(j,s) C(n-j,w-s).
            let mut kw: i128 = 0;
            for s in 0..=w.min(j) {
                if w - s > n - j {
                    continue;
                }
                let term = binom(j, s)?.checked_mul(binom(n - j, w - s)?).ok_or_else(overflow)?;
                kw = if s % 2 == 0 { kw.checked_add(term) } else { kw.checked_sub(term) }.ok_or_else(overflow)?;
            }
            let bj = i128::try_from(bj).map_err(|_| overflow())?;
            total = total.checked_add(bj.checked_mul(kw).ok_or_else(overflow)?).ok_or_else(overflow)?;
        }
        let scale = 1i128 << dual.k();
        debug_assert!(total >= 0 && total % scale == 0);
        a.push((total / scale) as u128);
    }
    Ok(a)
}

pub fn exact_partition_function<E: EnergyFunction>(
    code: &RmCode,
    constraint: &E,
    beta: f64,
    bound: usize,
) -> Result<f64> {
    Ok(EnergyHistogram::compute(code, constraint, bound)?.partition_function(beta))
}

/// The Gibbs distribution over all codewords, indexed by message.
#[derive(Clone, Debug)]
pub struct GibbsDistribution {
    pub codewords: Vec<BitVector>,
    pub energies: Vec<u32>,
    pub probabilities: Vec<f64>,
}

impl GibbsDistribution {
    /// Position of `c` in `codewords`, if present.
    pub fn index_of(&self, c: &BitVector) -> Option<usize> {
        self.codewords.iter().position(|x| x == c)
    }
}

/// `p_beta(c) ∝ exp(-beta E(c))` over the code. Use `beta = f64::INFINITY`
/// for the uniform distribution on zero-energy codewords.
pub fn exact_gibbs_distribution<E: EnergyFunction>(
    code: &RmCode,
    constraint: &E,
    beta: f64,
    bound: usize,
) -> Result<GibbsDistribution> {
    code.check_exhaustive(bound)?;
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::Parameter(format!("beta must be >= 0, got {beta}")));
    }
    let codewords: Vec<BitVector> = (0..1u64 << code.k()).map(|i| code.encode_index(i)).collect();
    let energies: Vec<u32> = codewords.iter().map(|c| constraint.energy(c)).collect();
    let weights: Vec<f64> = energies
        .iter()
        .map(|&e| {
            if beta.is_infinite() {
                if e == 0 { 1.0 } else { 0.0 }
            } else {
                (-beta * e as f64).exp()
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    if z == 0.0 {
        return Err(Error::parameter("no codeword has zero energy; limit distribution undefined"));
    }
    Ok(GibbsDistribution {
        codewords,
        energies,
        probabilities: weights.into_iter().map(|w| w / z).collect(),
    })
}

/// Exact quantities for one code/constraint pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub m: usize,
    pub r: usize,
    pub constraint: Option<String>,
    /// `|C ∩ A|` (absent for a pure weight-enumerator run).
    pub exact_count: Option<u128>,
    pub exact_rate: Option<f64>,
    pub weight_enumerator: Option<Vec<u128>>,
    /// `(beta, Z_beta)` pairs.
    pub partition_values: Vec<(f64, f64)>,
}

pub fn rate_of_count(count: u128, n: usize) -> f64 {
    if count == 0 {
        f64::NEG_INFINITY
    } else {
        (count as f64).log2() / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::Constraint;
    use crate::rm::DEFAULT_EXHAUSTIVE_K;
    use std::collections::BTreeSet;

    const B: usize = DEFAULT_EXHAUSTIVE_K;

    #[test]
    fn gray_enumeration_visits_each_codeword_once() {
        let code = RmCode::new(3, 1).unwrap();
        let mut seen = Vec::new();
        for_each_codeword(&code, |c| seen.push(c.clone()));
        let via_gray: BTreeSet<BitVector> = seen.iter().cloned().collect();
        assert_eq!(seen.len(), 16);
        assert_eq!(via_gray.len(), 16);
        let via_rowspace: BTreeSet<BitVector> = (0..16).map(|i| code.encode_index(i)).collect();
        assert_eq!(via_gray, via_rowspace);
    }

    #[test]
    fn segmented_histogram_matches_sequential() {
        let code = RmCode::new(5, 3).unwrap(); // 2^26 codewords, 1024 segments
        let c = Constraint::Rll(1);
        let par = EnergyHistogram::compute(&code, &c, B).unwrap();
        assert_eq!(par.total(), 1 << 26);
        assert_eq!(par.zero_count(), 89172);
        let small = RmCode::new(4, 2).unwrap();
        let mut seq = vec![0u64; 17];
        for_each_codeword(&small, |x| seq[c.energy(x) as usize] += 1);
        assert_eq!(EnergyHistogram::compute(&small, &c, B).unwrap().counts(), seq.as_slice());
    }

    #[test]
    fn small_weight_enumerators() {
        let a = weight_enumerator(&RmCode::new(3, 1).unwrap(), B).unwrap();
        let mut expected = vec![0u128; 9];
        expected[0] = 1;
        expected[4] = 14;
        expected[8] = 1;
        assert_eq!(a, expected);
        for m in 1..=6 {
            let a = weight_enumerator(&RmCode::new(m, 0).unwrap(), B).unwrap();
            assert_eq!(a[0], 1);
            assert_eq!(a[1 << m], 1);
            assert_eq!(a.iter().sum::<u128>(), 2);
        }
        let a42 = weight_enumerator(&RmCode::new(4, 2).unwrap(), B).unwrap();
        assert_eq!(a42[4], 140);
    }

    #[test]
    fn dual_transform_matches_enumeration() {
        for (m, r) in [(3, 1), (4, 1), (4, 2), (5, 1), (5, 2), (5, 3), (4, 4), (3, 0)] {
            let code = RmCode::new(m, r).unwrap();
            assert_eq!(
                weight_enumerator_via_dual(&code, B).unwrap(),
                weight_enumerator(&code, B).unwrap(),
                "RM({m},{r})"
            );
        }
        let a63 = weight_enumerator_via_dual(&RmCode::new(6, 3).unwrap(), B).unwrap();
        assert_eq!(a63.iter().sum::<u128>(), 1 << 42);
        assert_eq!(a63[8], flat_count_63());
        assert!(matches!(
            weight_enumerator_via_dual(&RmCode::new(8, 6).unwrap(), B),
            Err(Error::Resource(_))
        ));
    }

    /// Minimum-weight codewords of RM(6,3): 3-flats of F_2^6,
    /// `2^3 * [6 choose 3]_2 = 8 * 1395`.
    fn flat_count_63() -> u128 {
        8 * 1395
    }

    #[test]
    fn constrained_counts() {
        let rll1 = Constraint::Rll(1);
        assert_eq!(exact_constrained_count(&RmCode::new(4, 2).unwrap(), &rll1, B).unwrap(), 83);
        assert_eq!(exact_constrained_count(&RmCode::new(6, 1).unwrap(), &rll1, B).unwrap(), 4);
        assert_eq!(exact_constrained_count(&RmCode::new(8, 1).unwrap(), &rll1, B).unwrap(), 4);
        let rll2 = Constraint::Rll(2);
        assert_eq!(exact_constrained_count(&RmCode::new(4, 1).unwrap(), &rll2, B).unwrap(), 1);
        assert_eq!(exact_constrained_count(&RmCode::new(4, 2).unwrap(), &rll2, B).unwrap(), 37);
        assert!(matches!(
            exact_constrained_count(&RmCode::new(7, 2).unwrap(), &rll1, B),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn partition_function_values() {
        let code = RmCode::new(3, 1).unwrap();
        let c = Constraint::Rll(1);
        assert_eq!(exact_partition_function(&code, &c, 0.0, B).unwrap(), 16.0);
        let mut hist = [0u64; 9];
        for i in 0..16 {
            hist[c.energy(&code.encode_index(i)) as usize] += 1;
        }
        let direct: f64 = hist.iter().enumerate().map(|(e, &h)| h as f64 * (-(e as f64)).exp()).sum();
        let z1 = exact_partition_function(&code, &c, 1.0, B).unwrap();
        assert!((z1 - direct).abs() < 1e-12 * direct);

        let z = exact_constrained_count(&code, &c, B).unwrap() as f64;
        let z100 = exact_partition_function(&code, &c, 100.0, B).unwrap();
        assert!(z100 >= z && z100 - z <= 16.0 * (-100f64).exp());
    }

    #[test]
    fn partition_function_monotone_and_log_convex() {
        let code = RmCode::new(4, 2).unwrap();
        let hist = EnergyHistogram::compute(&code, &Constraint::Rll(1), B).unwrap();
        let betas: Vec<f64> = (0..60).map(|i| i as f64 * 0.1).collect();
        let logz: Vec<f64> = betas.iter().map(|&b| hist.partition_function(b).ln()).collect();
        for w in logz.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
        for w in logz.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] >= -1e-9);
        }
    }

    #[test]
    fn gibbs_distribution_limits() {
        let code = RmCode::new(3, 1).unwrap();
        let c = Constraint::Rll(1);
        let uniform = exact_gibbs_distribution(&code, &c, 0.0, GIBBS_VECTOR_K).unwrap();
        assert!(uniform.probabilities.iter().all(|&p| (p - 1.0 / 16.0).abs() < 1e-15));
        let p3 = exact_gibbs_distribution(&code, &c, 3.0, GIBBS_VECTOR_K).unwrap();
        assert!((p3.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let limit = exact_gibbs_distribution(&code, &c, f64::INFINITY, GIBBS_VECTOR_K).unwrap();
        let z = exact_constrained_count(&code, &c, B).unwrap() as f64;
        for (p, &e) in limit.probabilities.iter().zip(&limit.energies) {
            let expected = if e == 0 { 1.0 / z } else { 0.0 };
            assert!((p - expected).abs() < 1e-15);
        }
        let far = exact_gibbs_distribution(&code, &c, 60.0, GIBBS_VECTOR_K).unwrap();
        for (a, b) in far.probabilities.iter().zip(&limit.probabilities) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
