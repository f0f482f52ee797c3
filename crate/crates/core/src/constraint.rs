//! Constraints and their energy functions.
//!
//! An energy function maps a word to a nonnegative integer that is zero
//! exactly on the words satisfying the constraint.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Anything usable as the energy of a Gibbs distribution over codewords.
///
/// Implementations must return 0 exactly on constrained words and must not
/// exceed the blocklength.
pub trait EnergyFunction: Send + Sync {
    fn energy(&self, x: &BitVector) -> u32;

    fn is_satisfied(&self, x: &BitVector) -> bool {
        self.energy(x) == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Constraint {
    /// `(d, inf)`-RLL: at least `d` zeros between successive ones.
    Rll(usize),
    /// Hamming weight exactly `w`.
    ConstantWeight(usize),
}

impl Constraint {
    pub fn rll(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::parameter("RLL parameter d must be at least 1"));
        }
        Ok(Constraint::Rll(d))
    }

    pub fn weight(w: usize) -> Self {
        Constraint::ConstantWeight(w)
    }

    /// Checks the constraint parameters against blocklength `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            Constraint::Rll(0) => Err(Error::parameter("RLL parameter d must be at least 1")),
            Constraint::ConstantWeight(w) if w > n => Err(Error::Parameter(format!(
                "weight {w} outside [0, {n}]"
            ))),
            _ => Ok(()),
        }
    }
}

impl EnergyFunction for Constraint {
    #[inline]
    fn energy(&self, x: &BitVector) -> u32 {
        match *self {
            Constraint::Rll(d) => rll_violations(x.words(), d),
            Constraint::ConstantWeight(w) => (x.weight() as i64 - w as i64).unsigned_abs() as u32,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Rll(d) => write!(f, "rll:{d}"),
            Constraint::ConstantWeight(w) => write!(f, "weight:{w}"),
        }
    }
}

pub const CONSTRAINT_GRAMMAR: &str = "rll:<d> (d >= 1) | weight:<w> (w >= 0)";

impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("cannot parse constraint {s:?}; expected {CONSTRAINT_GRAMMAR}"));
        let (kind, value) = s.trim().split_once(':').ok_or_else(bad)?;
        let value: usize = value.trim().parse().map_err(|_| bad())?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "rll" => Constraint::rll(value).map_err(|_| bad()),
            "weight" | "w" => Ok(Constraint::ConstantWeight(value)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Constraint {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Constraint> for String {
    fn from(c: Constraint) -> String {
        c.to_string()
    }
}

/// Word `i` of the word-packed vector `x` shifted down by `s` positions,
/// i.e. bit `j` of the result is `x_{j+s}`.
#[inline]
fn shifted_word(words: &[u64], i: usize, s: usize) -> u64 {
    let (q, rem) = (s / 64, s % 64);
    let lo = words.get(i + q).copied().unwrap_or(0);
    if rem == 0 {
        return lo;
    }
    let hi = words.get(i + q + 1).copied().unwrap_or(0);
    (lo >> rem) | (hi << (64 - rem))
}

/// Number of positions `j` with `x_j = 1` and a one among `x_{j+1..=j+d}`.
#[inline]
fn rll_violations(words: &[u64], d: usize) -> u32 {
    let mut total = 0;
    for (i, &w) in words.iter().enumerate() {
        if w == 0 {
            continue;
        }
        let mut ahead = 0u64;
        for s in 1..=d {
            ahead |= shifted_word(words, i, s);
        }
        total += (w & ahead).count_ones();
    }
    total
}

/// RLL energy: count of 1-positions followed by another 1 within `d` places.
pub fn energy_rll(x: &BitVector, d: usize) -> Result<u32> {
    if d == 0 {
        return Err(Error::parameter("RLL parameter d must be at least 1"));
    }
    Ok(rll_violations(x.words(), d))
}

/// `|w_H(x) - w|`.
pub fn energy_weight(x: &BitVector, w: usize) -> Result<u32> {
    let c = Constraint::ConstantWeight(w);
    c.validate(x.len())?;
    Ok(c.energy(x))
}

pub fn is_satisfied(x: &BitVector, c: &Constraint) -> bool {
    c.is_satisfied(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    /// Direct reading of the RLL definition: every gap between consecutive
    /// ones holds at least `d` zeros.
    fn in_rll_set(x: &BitVector, d: usize) -> bool {
        let ones: Vec<usize> = x.ones_iter().collect();
        ones.windows(2).all(|p| p[1] - p[0] > d)
    }

    #[test]
    fn rll_examples() {
        let alt: BitVector = "01".repeat(40).parse().unwrap();
        assert_eq!(energy_rll(&alt, 1).unwrap(), 0);
        assert_eq!(energy_rll(&bv("1100 0000"), 1).unwrap(), 1);
        for n in [1, 2, 16, 63, 64, 65, 200] {
            assert_eq!(energy_rll(&BitVector::ones(n), 1).unwrap(), n as u32 - 1);
        }
        assert_eq!(energy_rll(&bv("0011"), 2).unwrap(), 1);
        assert!(energy_rll(&bv("0011"), 0).is_err());
    }

    #[test]
    fn rll_across_word_boundary() {
        let mut x = BitVector::zeros(130);
        x.set(63, true);
        x.set(64, true);
        assert_eq!(energy_rll(&x, 1).unwrap(), 1);
        x.set(64, false);
        x.set(66, true);
        assert_eq!(energy_rll(&x, 2).unwrap(), 0);
        assert_eq!(energy_rll(&x, 3).unwrap(), 1);
        x.set(129, true);
        x.set(127, true);
        assert_eq!(energy_rll(&x, 2).unwrap(), 1);
        assert_eq!(energy_rll(&x, 70).unwrap(), 3);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(energy_weight(&bv("1010 1010"), 4).unwrap(), 0);
        assert_eq!(energy_weight(&BitVector::zeros(16), 4).unwrap(), 4);
        assert_eq!(energy_weight(&BitVector::ones(16), 6).unwrap(), 10);
        assert!(energy_weight(&BitVector::ones(16), 17).is_err());
    }

    #[test]
    fn satisfaction_examples() {
        assert!(is_satisfied(&bv("0101"), &Constraint::Rll(1)));
        assert!(!is_satisfied(&bv("0110"), &Constraint::Rll(1)));
        assert!(is_satisfied(&bv("1111 1111 0000"), &Constraint::ConstantWeight(8)));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("rll:2".parse::<Constraint>().unwrap(), Constraint::Rll(2));
        assert_eq!("weight:80".parse::<Constraint>().unwrap(), Constraint::ConstantWeight(80));
        assert_eq!(Constraint::Rll(1).to_string(), "rll:1");
        for bad in ["rll:0", "rll", "rll:x", "foo:3", "weight:-1", ""] {
            let err = bad.parse::<Constraint>().unwrap_err().to_string();
            assert!(err.contains("rll:<d>"), "{bad}: {err}");
        }
        assert_eq!(String::from(Constraint::ConstantWeight(4)), "weight:4");
    }

    #[test]
    fn zero_set_matches_definition_exhaustively() {
        for n in 1..=20usize {
            for bits in 0..(1u64 << n) {
                let x = BitVector::from_words(n, vec![bits]).unwrap();
                for d in 1..=3 {
                    let e = energy_rll(&x, d).unwrap();
                    assert_eq!(e == 0, in_rll_set(&x, d), "x={x} d={d}");
                    assert!(e as usize <= n.saturating_sub(1));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn clearing_a_one_never_increases_rll_energy(
            bits in proptest::collection::vec(any::<bool>(), 1..300),
            d in 1usize..5,
            pick in any::<proptest::sample::Index>(),
        ) {
            let x = BitVector::from_bits(&bits);
            let ones: Vec<usize> = x.ones_iter().collect();
            prop_assume!(!ones.is_empty());
            let mut y = x.clone();
            y.set(ones[pick.index(ones.len())], false);
            prop_assert!(energy_rll(&y, d).unwrap() <= energy_rll(&x, d).unwrap());
        }

        #[test]
        fn complement_symmetry_for_weight(
            bits in proptest::collection::vec(any::<bool>(), 1..300),
            w_frac in 0.0f64..=1.0,
        ) {
            let x = BitVector::from_bits(&bits);
            let n = x.len();
            let w = (w_frac * n as f64).round() as usize;
            let lhs = energy_weight(&x.complement(), w).unwrap() as i64;
            prop_assert_eq!(lhs, (n as i64 - x.weight() as i64 - w as i64).abs());
            prop_assert!(energy_weight(&x, w).unwrap() as usize <= w.max(n - w));
        }
    }
}
