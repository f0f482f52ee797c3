//! Bit-packed vectors and matrices over GF(2).
//!
//! Bit `i` of a [`BitVector`] lives in word `i / 64` at bit position `i % 64`
//! (least significant first). Bits at positions `>= len` are always zero.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD_BITS {
        0 => u64::MAX,
        rem => (1u64 << rem) - 1,
    }
}

/// A packed binary word of fixed length.
#[derive(PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl Clone for BitVector {
    fn clone(&self) -> Self {
        BitVector {
            len: self.len,
            words: self.words.clone(),
        }
    }

    // Reuses the existing allocation.
    fn clone_from(&mut self, source: &Self) {
        self.len = source.len;
        self.words.clone_from(&source.words);
    }
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.mask_tail();
        v
    }

    /// The unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from raw words, clearing anything beyond `len`.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Result<Self> {
        let expected = words_for(len);
        if words.len() != expected {
            return Err(Error::dimension("word count", expected, words.len()));
        }
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Ok(BitVector { len, words })
    }

    /// Uniformly random vector; consumes one `u64` per word.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = BitVector {
            len,
            words: (0..words_for(len)).map(|_| rng.next_u64()).collect(),
        };
        v.mask_tail();
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let bit = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= bit;
        } else {
            self.words[i / WORD_BITS] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Hamming weight.
    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::dimension("xor operand length", self.len, other.len));
        }
        self.xor_assign_unchecked(other);
        Ok(())
    }

    #[inline]
    pub(crate) fn xor_assign_unchecked(&mut self, other: &BitVector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub(crate) fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn complement(&self) -> BitVector {
        let mut out = BitVector {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.mask_tail();
        out
    }

    /// Indices of set bits in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    fn mask_tail(&mut self) {
        let mask = tail_mask(self.len);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    /// Parses a string of `0`/`1` characters; spaces and underscores are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parameter(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BitVector::from_bits(&bits))
    }
}

/// Dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        BitMatrix {
            cols: n,
            rows: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// An empty (0 x cols) matrix.
    pub fn empty(cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::dimension("matrix row length", cols, bad.len()));
        }
        Ok(BitMatrix { cols, rows })
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        BitMatrix {
            cols,
            rows: (0..rows).map(|_| BitVector::random(cols, rng)).collect(),
        }
    }

    #[inline]
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    /// Row rank over GF(2). Works on a scratch copy.
    pub fn rank(&self) -> usize {
        let mut scratch: Vec<Vec<u64>> = self.rows.iter().map(|r| r.words.clone()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == scratch.len() {
                break;
            }
            let (w, bit) = (col / WORD_BITS, 1u64 << (col % WORD_BITS));
            let Some(pivot) = (rank..scratch.len()).find(|&i| scratch[i][w] & bit != 0) else {
                continue;
            };
            scratch.swap(rank, pivot);
            let (head, tail) = scratch.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            for row in tail.iter_mut().filter(|row| row[w] & bit != 0) {
                for (a, b) in row.iter_mut().zip(pivot_row) {
                    *a ^= b;
                }
            }
            rank += 1;
        }
        rank
    }

    /// True when `rank == num_rows`. The empty matrix counts as full rank.
    pub fn is_full_row_rank(&self) -> bool {
        self.rank() == self.rows.len()
    }

    /// Row vector times matrix: the GF(2) sum of the rows selected by `x`.
    pub fn vec_mul(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.rows.len() {
            return Err(Error::dimension("vector length vs matrix rows", self.rows.len(), x.len()));
        }
        let mut out = BitVector::zeros(self.cols);
        for i in x.ones_iter() {
            out.xor_assign_unchecked(&self.rows[i]);
        }
        Ok(out)
    }
}

/// `x · M` over GF(2).
pub fn mat_vec_mul(x: &BitVector, m: &BitMatrix) -> Result<BitVector> {
    m.vec_mul(x)
}

/// True when the rows, read as bit masks, are linearly independent.
pub(crate) fn masks_independent(rows: &[u64]) -> bool {
    let mut basis = [0u64; 64];
    for &row in rows {
        let mut v = row;
        while v != 0 {
            let lead = 63 - v.leading_zeros() as usize;
            if basis[lead] == 0 {
                basis[lead] = v;
                break;
            }
            v ^= basis[lead];
        }
        if v == 0 {
            return false;
        }
    }
    true
}

/// Rejection-samples `out.len()` linearly independent `cols`-bit masks.
///
/// Each round fills every row with one masked `u64` draw, which matches the
/// draw pattern of [`BitVector::random`] for `cols <= 64`. Returns the number of
/// rounds used (0 when `out` is empty).
pub(crate) fn sample_full_rank_masks<R: Rng + ?Sized>(
    cols: usize,
    rng: &mut R,
    out: &mut [u64],
) -> u32 {
    debug_assert!(cols <= 64 && out.len() <= cols);
    if out.is_empty() {
        return 0;
    }
    let mask = tail_mask(cols);
    let mut rounds = 0;
    loop {
        rounds += 1;
        for row in out.iter_mut() {
            *row = rng.next_u64() & mask;
        }
        if masks_independent(out) {
            return rounds;
        }
    }
}

/// Uniform full-rank `rows x cols` matrix together with the number of
/// rejection rounds it took.
pub fn sample_full_rank_matrix_with_rounds<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<(BitMatrix, u32)> {
    if rows > cols {
        return Err(Error::Parameter(format!(
            "a {rows}x{cols} matrix cannot have full row rank"
        )));
    }
    if rows == 0 {
        return Ok((BitMatrix::empty(cols), 0));
    }
    if cols <= WORD_BITS {
        let mut masks = vec![0u64; rows];
        let rounds = sample_full_rank_masks(cols, rng, &mut masks);
        let rows = masks
            .into_iter()
            .map(|w| BitVector { len: cols, words: vec![w] })
            .collect();
        return Ok((BitMatrix { cols, rows }, rounds));
    }
    let mut rounds = 0;
    loop {
        rounds += 1;
        let m = BitMatrix::random(rows, cols, rng);
        if m.is_full_row_rank() {
            return Ok((m, rounds));
        }
    }
}

/// Uniform sample from the full-rank `rows x cols` matrices over GF(2).
pub fn sample_full_rank_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Result<BitMatrix> {
    sample_full_rank_matrix_with_rounds(rows, cols, rng).map(|(m, _)| m)
}

/// Probability that a uniformly random `rows x cols` matrix has full row rank,
/// `prod_{i=0}^{rows-1} (1 - 2^{i - cols})`. For square matrices this is
/// `prod_{i=1}^{rows} (1 - 2^{-i})`.
pub fn full_rank_probability(rows: usize, cols: usize) -> f64 {
    (0..rows)
        .map(|i| 1.0 - 2f64.powi(i as i32 - cols as i32))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn xor_examples() {
        assert_eq!(bv("1010").xor(&bv("0110")).unwrap(), bv("1100"));
        let x = bv("1011_0011_1");
        assert!(x.xor(&x).unwrap().is_zero());
        assert_eq!(x.xor(&BitVector::zeros(9)).unwrap(), x);
        assert!(matches!(
            bv("10").xor(&bv("101")),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(BitVector::zeros(16).weight(), 0);
        assert_eq!(BitVector::ones(16).weight(), 16);
        assert_eq!(bv("1011 0000").weight(), 3);
        assert_eq!(BitVector::ones(130).weight(), 130);
    }

    #[test]
    fn tail_stays_masked() {
        let v = BitVector::ones(70);
        assert_eq!(v.words()[1], 0b11_1111);
        assert_eq!(v.complement().weight(), 0);
        let w = BitVector::from_words(3, vec![u64::MAX]).unwrap();
        assert_eq!(w.weight(), 3);
    }

    #[test]
    fn display_roundtrip() {
        let s = "0110100111";
        assert_eq!(bv(s).to_string(), s);
        assert!("01x".parse::<BitVector>().is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
        let m = BitMatrix::from_rows(4, vec![bv("1011"), bv("1011")]).unwrap();
        assert_eq!(m.rank(), 1);
        let empty = BitMatrix::empty(5);
        assert_eq!(empty.rank(), 0);
        assert!(empty.is_full_row_rank());
        assert_eq!(BitMatrix::zeros(3, 3).rank(), 0);
    }

    #[test]
    fn rank_does_not_mutate() {
        let m = BitMatrix::from_rows(3, vec![bv("110"), bv("011"), bv("101")]).unwrap();
        let copy = m.clone();
        assert_eq!(m.rank(), 2);
        assert_eq!(m, copy);
    }

    #[test]
    fn mat_vec_examples() {
        let m = BitMatrix::from_rows(4, vec![bv("1010"), bv("0110")]).unwrap();
        assert_eq!(mat_vec_mul(&bv("11"), &m).unwrap(), bv("1100"));
        assert_eq!(mat_vec_mul(&bv("00"), &m).unwrap(), BitVector::zeros(4));
        assert_eq!(mat_vec_mul(&bv("01"), &m).unwrap(), bv("0110"));
        assert!(mat_vec_mul(&bv("1"), &m).is_err());
    }

    #[test]
    fn full_rank_sampler_edges() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (m, rounds) = sample_full_rank_matrix_with_rounds(0, 5, &mut rng).unwrap();
        assert_eq!((m.num_rows(), m.num_cols(), rounds), (0, 5, 0));
        assert!(sample_full_rank_matrix(4, 3, &mut rng).is_err());
        for _ in 0..200 {
            let m = sample_full_rank_matrix(3, 5, &mut rng).unwrap();
            assert_eq!(m.rank(), 3);
            let wide = sample_full_rank_matrix(4, 100, &mut rng).unwrap();
            assert_eq!(wide.rank(), 4);
        }
    }

    #[test]
    fn full_rank_probability_values() {
        assert!((full_rank_probability(3, 3) - 0.328125).abs() < 1e-15);
        let limit = full_rank_probability(60, 60);
        assert!((limit - 0.288788).abs() < 1e-6);
    }
}
