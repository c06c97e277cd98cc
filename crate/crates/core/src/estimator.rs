//! Simulation estimate of `d(t)`: run the chain `N` times from every state,
//! compare empirical end-point frequencies pairwise and threshold at 1/4.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::StateSpace;
use crate::circuit::ChainCircuit;
use crate::dyadic::DyadicChain;
use crate::{Error, Rational, Result};

/// Anything that moves a state index given a word of random bits.
pub trait Stepper: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `n` in the run count `48 n / delta^2`.
    fn state_bits(&self) -> usize;

    fn random_bits(&self) -> usize;

    /// `None` when the step leaves the state space.
    fn next(&self, x: usize, r: u64) -> Option<usize>;
}

impl Stepper for DyadicChain {
    fn len(&self) -> usize {
        DyadicChain::len(self)
    }

    fn state_bits(&self) -> usize {
        bits_for(DyadicChain::len(self))
    }

    fn random_bits(&self) -> usize {
        self.bits()
    }

    #[inline]
    fn next(&self, x: usize, r: u64) -> Option<usize> {
        Some(DyadicChain::next(self, x, r))
    }
}

/// A circuit rule restricted to an enumerated state space.
#[derive(Clone, Debug)]
pub struct CircuitChain {
    pub circuit: ChainCircuit,
    pub space: StateSpace,
}

impl Stepper for CircuitChain {
    fn len(&self) -> usize {
        self.space.len()
    }

    fn state_bits(&self) -> usize {
        self.circuit.state_bits()
    }

    fn random_bits(&self) -> usize {
        self.circuit.random_bits()
    }

    #[inline]
    fn next(&self, x: usize, r: u64) -> Option<usize> {
        self.space.index_of(self.circuit.step(self.space.states()[x], r))
    }
}

/// `ceil(log2 size)`, at least 1.
pub fn bits_for(size: usize) -> usize {
    (usize::BITS - size.saturating_sub(1).leading_zeros()).max(1) as usize
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorConfig {
    pub delta: f64,
    /// Runs per start state.
    pub runs: u64,
    pub seed: u64,
    pub t: u64,
}

impl EstimatorConfig {
    /// `N = ceil(48 n / delta^2)`.
    pub fn runs_for(n: usize, delta: f64) -> u64 {
        libm::ceil(48.0 * n as f64 / (delta * delta)) as u64
    }

    pub fn with_default_runs(n: usize, delta: f64, seed: u64, t: u64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.25) {
            return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1/4]")));
        }
        Ok(Self { delta, runs: Self::runs_for(n, delta), seed, t })
    }
}

/// End-point counts: `counts[x][z]` runs from `x` stopped at `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalProfile {
    pub runs: u64,
    pub t: u64,
    pub seed: u64,
    pub counts: Vec<Vec<u64>>,
}

impl EmpiricalProfile {
    pub fn frequency(&self, x: usize, z: usize) -> f64 {
        self.counts[x][z] as f64 / self.runs as f64
    }

    /// `M_xy = 1/2 sum_z |f_xz - f_yz|`, exactly.
    pub fn m(&self, x: usize, y: usize) -> Rational {
        let diff: u64 = self.counts[x].iter().zip(&self.counts[y]).map(|(a, b)| a.abs_diff(*b)).sum();
        Rational::new(BigInt::from(diff), BigInt::from(2 * self.runs))
    }

    /// `max_{x,y} M_xy` with the lexicographically first maximizing pair.
    pub fn d_hat(&self) -> (Rational, usize, usize) {
        let n = self.counts.len();
        let mut best = (0u64, 0, 0);
        for x in 0..n {
            for y in x + 1..n {
                let diff: u64 = self.counts[x].iter().zip(&self.counts[y]).map(|(a, b)| a.abs_diff(*b)).sum();
                if diff > best.0 {
                    best = (diff, x, y);
                }
            }
        }
        (Rational::new(BigInt::from(best.0), BigInt::from(2 * self.runs)), best.1, best.2)
    }
}

/// Stream for trial `trial` from start `x`: stream id `x << 32 | trial`, so
/// every (seed, x, trial, step) gets its own words regardless of schedule.
fn trial_rng(base: &ChaCha8Rng, x: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(((x as u64) << 32) | trial);
    rng.set_word_pos(0);
    rng
}

fn simulate_from<S: Stepper + ?Sized>(chain: &S, x: usize, config: &EstimatorConfig, base: &ChaCha8Rng) -> Result<Vec<u64>> {
    let mut row = alloc::vec![0u64; chain.len()];
    let wide = chain.random_bits() > 32;
    for trial in 0..config.runs {
        let mut rng = trial_rng(base, x, trial);
        let mut z = x;
        for _ in 0..config.t {
            let r = if wide { rng.next_u64() } else { u64::from(rng.next_u32()) };
            z = chain.next(z, r).ok_or_else(|| Error::InvalidParameter(format!("run from state {x} left the state space")))?;
        }
        row[z] += 1;
    }
    Ok(row)
}

/// `N` independent `t`-step runs from every state.
pub fn simulate_frequencies<S: Stepper + ?Sized>(chain: &S, config: &EstimatorConfig) -> Result<EmpiricalProfile> {
    if config.runs == 0 {
        return Err(Error::InvalidParameter("runs must be positive".into()));
    }
    if config.runs > u64::from(u32::MAX) || chain.len() > u32::MAX as usize {
        return Err(Error::ResourceCap { what: "runs per state", limit: u64::from(u32::MAX), got: config.runs });
    }
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    #[cfg(feature = "parallel")]
    let counts: Result<Vec<Vec<u64>>> = {
        use rayon::prelude::*;
        (0..chain.len()).into_par_iter().map(|x| simulate_from(chain, x, config, &base)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let counts: Result<Vec<Vec<u64>>> = (0..chain.len()).map(|x| simulate_from(chain, x, config, &base)).collect();
    Ok(EmpiricalProfile { runs: config.runs, t: config.t, seed: config.seed, counts: counts? })
}

pub fn estimate_d(profile: &EmpiricalProfile) -> Rational {
    profile.d_hat().0
}

/// Accepts (declares "mixed by time t") iff `d_hat(t) <= 1/4`.
pub fn gtc_decide_by_sampling<S: Stepper + ?Sized>(chain: &S, config: &EstimatorConfig) -> Result<(bool, EmpiricalProfile)> {
    let profile = simulate_frequencies(chain, config)?;
    let accept = estimate_d(&profile) <= crate::rational(1, 4);
    Ok((accept, profile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{to_matrix, TransitionMatrix};
    use crate::matrix::Matrix;
    use crate::rational;
    use crate::circuit::{Gate, GateList};

    fn coin() -> CircuitChain {
        let rule = GateList::new(2, alloc::vec![Gate::Xor(0, 1)], alloc::vec![2]).unwrap();
        CircuitChain { circuit: ChainCircuit::new(1, 1, rule).unwrap(), space: StateSpace::full(1) }
    }

    fn sticky() -> DyadicChain {
        let data = [(3, 4), (1, 4), (1, 4), (3, 4)].iter().map(|&(a, b)| rational(a, b)).collect();
        let p = TransitionMatrix::from_probabilities(StateSpace::full(1), Matrix::from_rows(2, data)).unwrap();
        DyadicChain::exact_from(&p).unwrap()
    }

    #[test]
    fn identity_and_zero_time_stay_put() {
        let id = CircuitChain { circuit: ChainCircuit::identity(2, 3), space: StateSpace::full(2) };
        let cfg = EstimatorConfig { delta: 0.1, runs: 50, seed: 1, t: 7 };
        let profile = simulate_frequencies(&id, &cfg).unwrap();
        for x in 0..4 {
            assert_eq!(profile.frequency(x, x), 1.0);
        }
        assert_eq!(estimate_d(&profile), rational(1, 1));
        let cfg = EstimatorConfig { t: 0, ..cfg };
        let profile = simulate_frequencies(&coin(), &cfg).unwrap();
        assert_eq!(profile.frequency(1, 1), 1.0);
    }

    #[test]
    fn fair_coin_frequency_band() {
        let cfg = EstimatorConfig { delta: 0.1, runs: 100_000, seed: 2024, t: 1 };
        let profile = simulate_frequencies(&coin(), &cfg).unwrap();
        let f = profile.frequency(0, 0);
        assert!((0.494..=0.506).contains(&f), "{f}");
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let cfg = EstimatorConfig { delta: 0.1, runs: 2_000, seed: 77, t: 3 };
        let a = simulate_frequencies(&sticky(), &cfg).unwrap();
        let b = simulate_frequencies(&sticky(), &cfg).unwrap();
        assert_eq!(a, b);
        let c = simulate_frequencies(&sticky(), &EstimatorConfig { seed: 78, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn d_hat_extremes() {
        let equal = EmpiricalProfile { runs: 4, t: 1, seed: 0, counts: alloc::vec![alloc::vec![2, 2], alloc::vec![2, 2]] };
        assert_eq!(estimate_d(&equal), rational(0, 1));
        let apart = EmpiricalProfile { runs: 4, t: 1, seed: 0, counts: alloc::vec![alloc::vec![4, 0], alloc::vec![0, 4]] };
        assert_eq!(estimate_d(&apart), rational(1, 1));
        assert_eq!(apart.m(0, 1), apart.m(1, 0));
    }

    #[test]
    fn circuit_simulation_matches_matrix() {
        // Monte Carlo rows against the exact matrix, 4 sigma per entry.
        let chain = coin();
        let p = to_matrix(&chain.circuit, &chain.space).unwrap();
        let cfg = EstimatorConfig { delta: 0.1, runs: 100_000, seed: 5, t: 1 };
        let profile = simulate_frequencies(&chain, &cfg).unwrap();
        for x in 0..2 {
            for z in 0..2 {
                let q = crate::Scalar::to_f64(p.entry(x, z));
                let sigma = libm::sqrt(q * (1.0 - q) / cfg.runs as f64);
                assert!((profile.frequency(x, z) - q).abs() <= 4.0 * sigma + 1e-12);
            }
        }
    }

    #[test]
    fn run_count_formula() {
        assert_eq!(EstimatorConfig::runs_for(1, 0.1), 4800);
        assert_eq!(EstimatorConfig::with_default_runs(6, 0.1, 0, 1).unwrap().runs, 28_800);
        assert!(EstimatorConfig::with_default_runs(6, 0.3, 0, 1).is_err());
    }

    #[test]
    fn decision_accepts_a_chain_at_stationarity() {
        let cfg = EstimatorConfig { delta: 0.1, runs: 500, seed: 3, t: 1 };
        for seed in 0..20 {
            let (accept, _) = gtc_decide_by_sampling(&coin(), &EstimatorConfig { seed, ..cfg.clone() }).unwrap();
            assert!(accept);
        }
    }
}
