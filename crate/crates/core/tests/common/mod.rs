//! Exact small-code references built directly from the definitions.
#![allow(dead_code)]

use std::collections::HashMap;

use rmcount::{BitVector, EnergyFunction, RmCode};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Every codeword of `code`, indexed by message.
pub fn codewords(code: &RmCode) -> Vec<BitVector> {
    (0..1u64 << code.k()).map(|i| code.encode_index(i)).collect()
}

pub fn index_map(words: &[BitVector]) -> HashMap<BitVector, usize> {
    words.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect()
}

/// Metropolis transition matrix over the whole code: propose `x + d` for a
/// uniform `d` among the minimum-weight codewords, accept with
/// `min(1, exp(-beta dE))`.
pub fn transition_matrix<E: EnergyFunction>(code: &RmCode, energy: &E, beta: f64) -> Vec<Vec<f64>> {
    let words = codewords(code);
    let index = index_map(&words);
    let delta = code.enumerate_min_weight_codewords(32).unwrap();
    let size = words.len();
    let mut q = vec![vec![0.0; size]; size];
    for (i, x) in words.iter().enumerate() {
        let ex = energy.energy(x) as f64;
        for d in &delta {
            let y = x.xor(d).unwrap();
            let j = index[&y];
            let ey = energy.energy(&y) as f64;
            let accept = (-beta * (ey - ex)).exp().min(1.0);
            q[i][j] += accept / delta.len() as f64;
        }
        let leave: f64 = (0..size).filter(|&j| j != i).map(|j| q[i][j]).sum();
        q[i][i] = 1.0 - leave;
    }
    q
}

/// `exp(-beta E) / Z` over the code, in message order.
pub fn gibbs<E: EnergyFunction>(code: &RmCode, energy: &E, beta: f64) -> Vec<f64> {
    let w: Vec<f64> = codewords(code)
        .iter()
        .map(|c| (-beta * energy.energy(c) as f64).exp())
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Pearson statistic of `observed` against `expected` probabilities, and the
/// p-value with `bins - 1` degrees of freedom (bins with zero expectation
/// must be empty and are skipped).
pub fn chi_square(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut bins = 0usize;
    for (&o, &p) in observed.iter().zip(expected) {
        if p == 0.0 {
            assert_eq!(o, 0, "mass on a zero-probability bin");
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        bins += 1;
    }
    let dist = ChiSquared::new((bins - 1) as f64).unwrap();
    (stat, 1.0 - dist.cdf(stat))
}

pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
