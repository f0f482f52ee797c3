//! Reed-Muller codes RM(m, r): construction, encoding and minimum-weight
//! codeword sampling.
//!
//! Evaluation point `z = (z_1, ..., z_m)` sits at coordinate
//! `j = sum_i z_i 2^{m-i}`, i.e. `z_1` is the most significant bit of the
//! coordinate index and `z_m` toggles fastest.

use itertools::Itertools;
use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{sample_full_rank_masks, BitMatrix, BitVector};

/// Largest supported number of variables (blocklength 2^20).
pub const MAX_M: usize = 20;

/// Default bound on `k` for exhaustive enumeration.
pub const DEFAULT_EXHAUSTIVE_K: usize = 26;

/// Raised bound that admits RM(7,2) (`k = 29`).
pub const EXTENDED_EXHAUSTIVE_K: usize = 29;

/// `C(n, k)`, or `None` if it does not fit in a `u128`.
pub fn checked_binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k as u128 {
        // acc * (n-i) / (i+1) is exact; cancel the common factor first.
        let den = i + 1;
        let g = gcd(acc, den);
        acc = (acc / g).checked_mul((n as u128 - i) / (den / g))?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn binomial(n: usize, k: usize) -> u128 {
    checked_binomial(n, k).expect("binomial coefficient overflows u128")
}

/// `sum_{i=0}^{r} C(m, i)`.
pub fn binomial_prefix_sum(m: usize, r: usize) -> u128 {
    (0..=r.min(m)).map(|i| binomial(m, i)).sum()
}

#[derive(Clone, Debug)]
pub struct RmCode {
    m: usize,
    r: usize,
    generator: BitMatrix,
    /// Variable subsets (0-based) in generator row order.
    monomials: Vec<Vec<usize>>,
}

impl RmCode {
    pub fn new(m: usize, r: usize) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(Error::Parameter(format!("m must be in 1..={MAX_M}, got {m}")));
        }
        if r > m {
            return Err(Error::Parameter(format!("r must satisfy 0 <= r <= m, got r={r}, m={m}")));
        }
        let n = 1usize << m;
        let monomials: Vec<Vec<usize>> = (0..=r)
            .flat_map(|deg| (0..m).combinations(deg))
            .collect();
        let rows = monomials
            .iter()
            .map(|s| {
                // Variable x_{i+1} is bit (m-1-i) of the coordinate index.
                let mask = s.iter().fold(0usize, |acc, &i| acc | 1 << (m - 1 - i));
                let mut row = BitVector::zeros(n);
                for j in (0..n).filter(|j| j & mask == mask) {
                    row.set(j, true);
                }
                row
            })
            .collect();
        let generator = BitMatrix::from_rows(n, rows)?;
        Ok(RmCode {
            m,
            r,
            generator,
            monomials,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Blocklength `2^m`.
    pub fn n(&self) -> usize {
        1 << self.m
    }

    /// Dimension.
    pub fn k(&self) -> usize {
        self.monomials.len()
    }

    /// Minimum distance `2^{m-r}`.
    pub fn min_distance(&self) -> usize {
        1 << (self.m - self.r)
    }

    /// `k / n`.
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn monomials(&self) -> &[Vec<usize>] {
        &self.monomials
    }

    pub fn encode(&self, message: &BitVector) -> Result<BitVector> {
        if message.len() != self.k() {
            return Err(Error::dimension("message length", self.k(), message.len()));
        }
        self.generator.vec_mul(message)
    }

    /// Encodes the message whose bits are the low `k` bits of `index`
    /// (bit `i` selects generator row `i`).
    pub fn encode_index(&self, index: u64) -> BitVector {
        let mut c = BitVector::zeros(self.n());
        let mut rest = index;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            c.xor_assign_unchecked(self.generator.row(i));
        }
        c
    }

    /// Membership test by Gaussian elimination against the generator.
    pub fn contains(&self, x: &BitVector) -> bool {
        if x.len() != self.n() {
            return false;
        }
        let mut rows = self.generator.rows().to_vec();
        rows.push(x.clone());
        BitMatrix::from_rows(self.n(), rows)
            .map(|m| m.rank() == self.k())
            .unwrap_or(false)
    }

    /// A uniformly random codeword (encoding of a uniform message).
    pub fn random_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        let message = BitVector::random(self.k(), rng);
        self.generator
            .vec_mul(&message)
            .expect("message length equals k")
    }

    pub fn check_exhaustive(&self, bound: usize) -> Result<()> {
        if self.k() > bound {
            return Err(Error::Resource(format!(
                "RM({},{}) has k = {} > exhaustive bound {}; enumeration needs 2^{} codewords",
                self.m,
                self.r,
                self.k(),
                bound,
                self.k()
            )));
        }
        Ok(())
    }

    /// All codewords of weight exactly `2^{m-r}`, by full enumeration.
    pub fn enumerate_min_weight_codewords(&self, bound: usize) -> Result<Vec<BitVector>> {
        self.check_exhaustive(bound)?;
        let target = self.min_distance();
        let mut out = Vec::new();
        crate::oracle::for_each_codeword(self, |c| {
            if c.weight() == target {
                out.push(c.clone());
            }
        });
        out.sort();
        Ok(out)
    }

    /// Characteristic vector of a uniformly random `(m-r)`-dimensional affine
    /// subspace of `F_2^m`, i.e. a uniform minimum-weight codeword.
    pub fn sample_min_weight_codeword<R: Rng + ?Sized>(&self, rng: &mut R) -> BitVector {
        let mut sampler = MinWeightSampler::new(self);
        let mut out = BitVector::zeros(self.n());
        sampler.sample_into(rng, &mut out);
        out
    }
}

/// Reusable scratch for drawing affine subspaces `H = {x A + b}`.
#[derive(Clone, Debug)]
pub struct MinWeightSampler {
    m: usize,
    basis: Vec<u64>,
}

impl MinWeightSampler {
    pub fn new(code: &RmCode) -> Self {
        MinWeightSampler {
            m: code.m,
            basis: vec![0; code.m - code.r],
        }
    }

    /// Draws `A` (full-rank, by rejection) and `b`, then calls `visit` on each
    /// of the `2^{m-r}` points of `H` in Gray-code order of `x`.
    #[inline]
    pub fn sample_points<R: Rng + ?Sized, F: FnMut(usize)>(&mut self, rng: &mut R, mut visit: F) {
        sample_full_rank_masks(self.m, rng, &mut self.basis);
        let offset_mask = (1u64 << self.m) - 1;
        let mut z = (rng.next_u64() & offset_mask) as usize;
        visit(z);
        let count = 1usize << self.basis.len();
        for i in 1..count {
            z ^= self.basis[i.trailing_zeros() as usize] as usize;
            visit(z);
        }
    }

    /// Clears `out` and writes the characteristic vector of a fresh subspace.
    pub fn sample_into<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut BitVector) {
        out.clear();
        self.sample_points(rng, |z| out.flip(z));
    }
}
