//! Nearest-neighbour Metropolis chain on RM codewords.
//!
//! A move adds a uniformly random minimum-weight codeword to the current
//! state and is accepted with probability `min(1, exp(-beta * dE))`. The
//! proposal is symmetric and the minimum-weight codewords span the code, so
//! the chain targets `p_beta(c) ∝ exp(-beta E(c))` on the code.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constraint::{Constraint, EnergyFunction};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::rm::{MinWeightSampler, RmCode};

#[derive(Clone, Debug, PartialEq)]
pub struct GibbsParams<E = Constraint> {
    pub beta: f64,
    pub constraint: E,
}

impl<E> GibbsParams<E> {
    pub fn new(beta: f64, constraint: E) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Parameter(format!("beta must be finite and >= 0, got {beta}")));
        }
        Ok(GibbsParams { beta, constraint })
    }
}

/// A codeword plus its cached energy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainState {
    codeword: BitVector,
    energy: u32,
}

impl ChainState {
    pub fn new<E: EnergyFunction>(codeword: BitVector, energy: &E) -> Self {
        let e = energy.energy(&codeword);
        ChainState { codeword, energy: e }
    }

    pub fn codeword(&self) -> &BitVector {
        &self.codeword
    }

    pub fn energy(&self) -> u32 {
        self.energy
    }

    pub fn into_codeword(self) -> BitVector {
        self.codeword
    }
}

/// How a fresh chain picks its starting codeword.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    /// The all-zero codeword.
    #[default]
    Zero,
    /// Encoding of a uniformly random message.
    Random,
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitMode::Zero => "zero",
            InitMode::Random => "random",
        })
    }
}

impl FromStr for InitMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(InitMode::Zero),
            "random" => Ok(InitMode::Random),
            other => Err(Error::Parameter(format!("unknown init mode {other:?} (zero|random)"))),
        }
    }
}

pub fn default_init<R: Rng + ?Sized>(code: &RmCode, mode: InitMode, rng: &mut R) -> BitVector {
    match mode {
        InitMode::Zero => BitVector::zeros(code.n()),
        InitMode::Random => code.random_codeword(rng),
    }
}

/// A reusable Metropolis kernel for one code, energy and inverse temperature.
pub struct Metropolis<'a, E> {
    energy: &'a E,
    beta: f64,
    proposals: MinWeightSampler,
    candidate: BitVector,
    proposed: u64,
    accepted: u64,
}

impl<'a, E: EnergyFunction> Metropolis<'a, E> {
    pub fn new(code: &RmCode, energy: &'a E, beta: f64) -> Self {
        Metropolis {
            energy,
            beta,
            proposals: MinWeightSampler::new(code),
            candidate: BitVector::zeros(code.n()),
            proposed: 0,
            accepted: 0,
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn set_beta(&mut self, beta: f64) {
        self.beta = beta;
    }

    /// One propose/accept step. Returns whether the move was taken.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&mut self, state: &mut ChainState, rng: &mut R) -> bool {
        let Metropolis {
            energy,
            beta,
            proposals,
            candidate,
            ..
        } = self;
        candidate.clone_from(&state.codeword);
        proposals.sample_points(rng, |z| candidate.flip(z));
        let new_energy = energy.energy(candidate);
        self.proposed += 1;

        let accept = if new_energy <= state.energy || *beta == 0.0 {
            true
        } else {
            let delta = (new_energy - state.energy) as f64;
            rng.random::<f64>() < (-*beta * delta).exp()
        };
        if accept {
            std::mem::swap(&mut state.codeword, candidate);
            state.energy = new_energy;
            self.accepted += 1;
        }
        accept
    }

    pub fn run<R: Rng + ?Sized>(&mut self, state: &mut ChainState, tau: u64, rng: &mut R) {
        for _ in 0..tau {
            self.step(state, rng);
        }
    }

    /// Fraction of proposals accepted so far.
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

pub fn metropolis_step<E: EnergyFunction, R: Rng + ?Sized>(
    state: &ChainState,
    code: &RmCode,
    params: &GibbsParams<E>,
    rng: &mut R,
) -> ChainState {
    let mut next = state.clone();
    Metropolis::new(code, &params.constraint, params.beta).step(&mut next, rng);
    next
}

/// Runs `tau` Metropolis steps from `init` and returns the final codeword.
pub fn run_chain<E: EnergyFunction, R: Rng + ?Sized>(
    code: &RmCode,
    params: &GibbsParams<E>,
    tau: u64,
    init: BitVector,
    rng: &mut R,
) -> Result<BitVector> {
    if init.len() != code.n() {
        return Err(Error::dimension("initial codeword length", code.n(), init.len()));
    }
    let mut state = ChainState::new(init, &params.constraint);
    Metropolis::new(code, &params.constraint, params.beta).run(&mut state, tau, rng);
    Ok(state.into_codeword())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn tau_zero_returns_init() {
        let code = RmCode::new(4, 2).unwrap();
        let mut g = RngStream::new(1).generator();
        let init = code.random_codeword(&mut g);
        let params = GibbsParams::new(1.0, Constraint::Rll(1)).unwrap();
        assert_eq!(run_chain(&code, &params, 0, init.clone(), &mut g).unwrap(), init);
    }

    #[test]
    fn beta_zero_always_moves() {
        let code = RmCode::new(4, 2).unwrap();
        let c = Constraint::Rll(1);
        let mut g = RngStream::new(2).generator();
        let mut kernel = Metropolis::new(&code, &c, 0.0);
        let mut state = ChainState::new(BitVector::ones(16), &c);
        for _ in 0..500 {
            assert!(kernel.step(&mut state, &mut g));
        }
    }

    #[test]
    fn downhill_moves_always_accepted() {
        // From the all-one word (max RLL energy) every proposal lowers energy
        // or keeps it, so even a huge beta accepts.
        let code = RmCode::new(5, 2).unwrap();
        let c = Constraint::Rll(1);
        let mut g = RngStream::new(3).generator();
        let mut kernel = Metropolis::new(&code, &c, 1e6);
        for _ in 0..200 {
            let mut state = ChainState::new(BitVector::ones(32), &c);
            assert!(kernel.step(&mut state, &mut g));
            assert!(state.energy() < 31);
        }
    }

    #[test]
    fn uphill_acceptance_rate_matches_formula() {
        // RM(2,0) = {0000, 1111}; from 0000 the only proposal is 1111 with
        // RLL(1) energy 3, so beta = 2 accepts with probability e^-6.
        let code = RmCode::new(2, 0).unwrap();
        let c = Constraint::Rll(1);
        let mut g = RngStream::new(4).generator();
        let mut kernel = Metropolis::new(&code, &c, 2.0);
        let trials = 2_000_000;
        let mut taken = 0u32;
        for _ in 0..trials {
            let mut state = ChainState::new(BitVector::zeros(4), &c);
            taken += kernel.step(&mut state, &mut g) as u32;
        }
        let p = (-6f64).exp();
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        let observed = taken as f64 / trials as f64;
        assert!((observed - p).abs() < 4.0 * se, "observed {observed}, expected {p}");
    }

    #[test]
    fn states_stay_in_code_and_cache_is_coherent() {
        let code = RmCode::new(4, 2).unwrap();
        for c in [Constraint::Rll(1), Constraint::Rll(2), Constraint::ConstantWeight(6)] {
            let mut g = RngStream::new(5).generator();
            let mut kernel = Metropolis::new(&code, &c, 1.5);
            let mut state = ChainState::new(code.random_codeword(&mut g), &c);
            for _ in 0..300 {
                kernel.step(&mut state, &mut g);
                assert!(code.contains(state.codeword()));
                assert_eq!(state.energy(), c.energy(state.codeword()));
            }
        }
    }

    #[test]
    fn init_modes() {
        let code = RmCode::new(4, 2).unwrap();
        let mut g = RngStream::new(6).generator();
        assert!(default_init(&code, InitMode::Zero, &mut g).is_zero());
        let a = default_init(&code, InitMode::Random, &mut RngStream::new(7).generator());
        let b = default_init(&code, InitMode::Random, &mut RngStream::new(7).generator());
        assert_eq!(a, b);
        assert!(code.contains(&a));

        // RM(m,m) is the whole space: each coordinate is a fair coin.
        let full = RmCode::new(3, 3).unwrap();
        let mut counts = [0u32; 8];
        let draws = 40_000;
        for _ in 0..draws {
            let x = default_init(&full, InitMode::Random, &mut g);
            for j in x.ones_iter() {
                counts[j] += 1;
            }
        }
        let sd = (draws as f64 * 0.25).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 / 2.0).abs() < 4.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn metropolis_step_is_deterministic() {
        let code = RmCode::new(5, 3).unwrap();
        let params = GibbsParams::new(0.7, Constraint::Rll(1)).unwrap();
        let start = ChainState::new(BitVector::zeros(32), &params.constraint);
        let a = metropolis_step(&start, &code, &params, &mut RngStream::new(8).child(1).generator());
        let b = metropolis_step(&start, &code, &params, &mut RngStream::new(8).child(1).generator());
        assert_eq!(a, b);
        assert!(GibbsParams::new(-1.0, Constraint::Rll(1)).is_err());
    }
}
