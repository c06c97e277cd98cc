//! From convergence instances to statistical distance: samplers for
//! `P^t(x, .)` and `P^tau(x, .)`, and the distinguishing game played on
//! the two rows of `P^t` that differ most.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::decide::exact_backend;
use super::PromiseInstance;
use crate::circuit::{ChainCircuit, CircuitBuilder, SamplerCircuit, Wire, MAX_WIDTH};
use crate::dyadic::DEFAULT_BITS;
use crate::matrix::Matrix;
use crate::mixing::{default_cap, max_row_distance, tau};
use crate::sd::Label;
use crate::{rational, Error, Rational, Result, Scalar};

/// Sampler that runs `circuit` for `steps` steps from `start`, step `i`
/// reading input bits `i m .. (i + 1) m`. The input is padded to `width`
/// bits when that is wider.
pub fn unroll(circuit: &ChainCircuit, start: u64, steps: u64, width: usize) -> Result<SamplerCircuit> {
    let (n, m) = (circuit.state_bits(), circuit.random_bits());
    let needed = (steps as usize).saturating_mul(m);
    let width = width.max(needed);
    if width > MAX_WIDTH || steps > MAX_WIDTH as u64 * 64 {
        return Err(Error::ResourceCap { what: "unrolled sampler input bits", limit: MAX_WIDTH as u64, got: width as u64 });
    }
    let mut b = CircuitBuilder::new(width.max(1));
    let mut state: Vec<Wire> = (0..n).map(|i| b.constant((start >> i) & 1 == 1)).collect();
    for step in 0..steps as usize {
        let mut inputs = state.clone();
        inputs.extend((0..m).map(|j| b.input(step * m + j)));
        state = b.inline(circuit.rule(), &inputs);
    }
    Ok(SamplerCircuit::new(b.finish(state)?))
}

/// `(1/4 + delta - 1/k)^2 > 1/4 - delta + 1/k`.
pub fn szk_condition(delta: &Rational, k: u64) -> bool {
    let inv = rational(1, k as i64);
    let c = rational(1, 4) + delta - &inv;
    let s = rational(1, 4) - delta + &inv;
    c > Rational::from_integer(0.into()) && &c * &c > s
}

/// Output of [`gptcs_to_sd`].
#[derive(Clone, Debug, PartialEq)]
pub struct SdInstance {
    /// Samples `P^t(x, .)`.
    pub c: SamplerCircuit,
    /// Samples `P^tau(x, .)`.
    pub c_prime: SamplerCircuit,
    pub t: u64,
    /// `tau(1/k)`.
    pub tau: u64,
    pub k: u64,
    /// `1/4 - delta + 1/k`: YES instances land at or below it.
    pub s: Rational,
    /// `1/4 + delta - 1/k`: NO instances land above it.
    pub c_threshold: Rational,
    /// Whether `k` satisfies [`szk_condition`].
    pub szk_regime: bool,
}

pub fn gptcs_to_sd(instance: &PromiseInstance, k: u64) -> Result<SdInstance> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k = {k} must be at least 2")));
    }
    let p = instance.matrix()?;
    let cap = default_cap(p.len()).max(instance.t_max.unwrap_or(0));
    let eps = rational(1, k as i64);
    let tau_k = if exact_backend(p.len(), 0) {
        tau::<Rational>(&p, &eps, cap)?
    } else {
        tau::<f64>(&p, &Scalar::to_f64(&eps), cap)?
    };
    let (circuit, space) = instance.circuit_form(DEFAULT_BITS)?;
    let start = space.states()[instance.x];
    let width = (instance.t.max(tau_k) as usize).saturating_mul(circuit.random_bits());
    let c = unroll(&circuit, start, instance.t, width)?;
    let c_prime = unroll(&circuit, start, tau_k, width)?;
    let quarter = rational(1, 4);
    Ok(SdInstance {
        c,
        c_prime,
        t: instance.t,
        tau: tau_k,
        k,
        s: &quarter - &instance.delta + &eps,
        c_threshold: &quarter + &instance.delta - &eps,
        szk_regime: szk_condition(&instance.delta, k),
    })
}

/// Who picks the pair of start states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoamPairProver {
    /// The pair maximizing `d_tv(P^t(x, .), P^t(y, .))`, by enumeration.
    Honest,
    Fixed(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GptcCoamTranscript {
    pub x: usize,
    pub y: usize,
    /// `false`: sampled from row `x`.
    pub coin: bool,
    pub sample: usize,
    pub label: Label,
    pub accept: bool,
}

/// The rows of `P^t`, prepared once for many rounds.
#[derive(Clone, Debug)]
pub struct GptcCoam {
    rows: Matrix<f64>,
    exact: Option<Matrix<Rational>>,
    honest: (usize, usize),
}

impl GptcCoam {
    pub fn new(instance: &PromiseInstance) -> Result<Self> {
        let p = instance.matrix()?;
        let exact = exact_backend(p.len(), instance.t).then(|| p.to_scalar::<Rational>().pow(instance.t));
        let rows = match &exact {
            Some(m) => m.map(|v| Scalar::to_f64(v)),
            None => p.to_scalar::<f64>().pow(instance.t),
        };
        let honest = match &exact {
            Some(m) => {
                let (_, x, y) = max_row_distance(m);
                (x, y)
            }
            None => {
                let (_, x, y) = max_row_distance(&rows);
                (x, y)
            }
        };
        Ok(Self { rows, exact, honest })
    }

    pub fn pair(&self, prover: CoamPairProver) -> Result<(usize, usize)> {
        match prover {
            CoamPairProver::Honest => Ok(self.honest),
            CoamPairProver::Fixed(x, y) if x < self.rows.dim() && y < self.rows.dim() => Ok((x, y)),
            CoamPairProver::Fixed(x, y) => Err(Error::InvalidParameter(format!("pair ({x}, {y}) outside {} states", self.rows.dim()))),
        }
    }

    fn label(&self, x: usize, y: usize, z: usize) -> Label {
        let greater = match &self.exact {
            Some(m) => m.get(x, z) > m.get(y, z),
            None => self.rows.get(x, z) > self.rows.get(y, z),
        };
        if greater { Label::First } else { Label::Second }
    }

    /// Exact acceptance with honest labels on the chosen pair,
    /// `1/2 + d_tv/2`; `None` when only the float rows are available.
    pub fn acceptance_exact(&self, prover: CoamPairProver) -> Result<Option<Rational>> {
        let (x, y) = self.pair(prover)?;
        Ok(self.exact.as_ref().map(|m| {
            let mut hits = Rational::from_integer(BigInt::from(0));
            for z in 0..m.dim() {
                hits += if self.label(x, y, z) == Label::First { m.get(x, z) } else { m.get(y, z) };
            }
            hits / BigInt::from(2)
        }))
    }

    pub fn acceptance(&self, prover: CoamPairProver) -> Result<f64> {
        if let Some(v) = self.acceptance_exact(prover)? {
            return Ok(Scalar::to_f64(&v));
        }
        let (x, y) = self.pair(prover)?;
        let hits: f64 = (0..self.rows.dim())
            .map(|z| if self.label(x, y, z) == Label::First { *self.rows.get(x, z) } else { *self.rows.get(y, z) })
            .sum();
        Ok(hits / 2.0)
    }

    pub fn round(&self, prover: CoamPairProver, seed: u64) -> Result<GptcCoamTranscript> {
        let (x, y) = self.pair(prover)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coin: bool = rng.random();
        let row = self.rows.row(if coin { y } else { x });
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut sample = row.len() - 1;
        for (z, &q) in row.iter().enumerate() {
            acc += q;
            if u < acc {
                sample = z;
                break;
            }
        }
        let label = self.label(x, y, sample);
        let accept = label == if coin { Label::Second } else { Label::First };
        Ok(GptcCoamTranscript { x, y, coin, sample, label, accept })
    }
}

/// One round of the composed protocol with its own seed.
pub fn gptc_coam_round(instance: &PromiseInstance, prover: CoamPairProver, seed: u64) -> Result<GptcCoamTranscript> {
    GptcCoam::new(instance)?.round(prover, seed)
}

/// `1/2 + d/2` as a rational, for reports.
pub fn gptc_coam_acceptance(distance: &Rational) -> Rational {
    (<Rational as One>::one() + distance) / BigInt::from(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{to_matrix, StateSpace, TransitionMatrix};
    use crate::reductions::{sd_to_chain, ChainSpec, Kind};
    use crate::sd::{circuit_distribution, SdPair};

    fn lazy_cycle() -> PromiseInstance {
        // 4-cycle, stay 1/2, step either way 1/4.
        let mut data = alloc::vec![rational(0, 1); 16];
        for x in 0..4 {
            data[x * 4 + x] = rational(1, 2);
            data[x * 4 + (x + 1) % 4] = rational(1, 4);
            data[x * 4 + (x + 3) % 4] = rational(1, 4);
        }
        let p = TransitionMatrix::from_probabilities(StateSpace::full(2), Matrix::from_rows(4, data)).unwrap();
        PromiseInstance::new(Kind::Gptcs, ChainSpec::Matrix(p), 0, 2, Some(100), rational(1, 1), rational(1, 10)).unwrap()
    }

    #[test]
    fn unrolled_sampler_is_the_matrix_row() {
        let inst = lazy_cycle();
        let p = inst.matrix().unwrap();
        let (circuit, space) = inst.circuit_form(DEFAULT_BITS).unwrap();
        assert_eq!(to_matrix(&circuit, &space).unwrap().probs(), p.probs());
        for steps in 0..4 {
            let s = unroll(&circuit, 0, steps, 0).unwrap();
            let dist = circuit_distribution(&s).unwrap();
            let row = p.probs().pow(steps);
            assert_eq!(dist.mass(), row.row(0));
        }
    }

    #[test]
    fn equal_times_give_identical_samplers() {
        let mut inst = lazy_cycle();
        let sd = gptcs_to_sd(&inst, 5).unwrap();
        inst.t = sd.tau;
        let same = gptcs_to_sd(&inst, 5).unwrap();
        assert_eq!(same.c, same.c_prime);
        assert_eq!(SdPair::new(&same.c, &same.c_prime).unwrap().tv(), rational(0, 1));
        assert!(!szk_condition(&rational(1, 10), 5));
        assert!(szk_condition(&rational(1, 5), 20));
    }

    #[test]
    fn coam_game_on_sampler_chain() {
        let c = SamplerCircuit::identity(1);
        let zero = SamplerCircuit::constant(1, 0);
        let inst = sd_to_chain(&c, &zero, 4, 1, Some(4), rational(1, 1), rational(1, 10)).unwrap();
        let game = GptcCoam::new(&inst).unwrap();
        let (x, y) = game.pair(CoamPairProver::Honest).unwrap();
        let d = max_row_distance(&inst.matrix().unwrap().probs().pow(1)).0;
        assert_eq!(game.acceptance_exact(CoamPairProver::Honest).unwrap().unwrap(), gptc_coam_acceptance(&d));
        let accepted = (0..4000).filter(|&s| game.round(CoamPairProver::Fixed(x, y), s).unwrap().accept).count();
        let expect = game.acceptance(CoamPairProver::Honest).unwrap();
        let sigma = libm::sqrt(expect * (1.0 - expect) / 4000.0);
        assert!((accepted as f64 / 4000.0 - expect).abs() <= 4.0 * sigma + 1e-12, "{accepted} vs {expect}");
    }
}
