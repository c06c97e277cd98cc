//! Chain on `[m] x {0,1}^n` whose distance from stationarity after `t`
//! steps is `1/2 ((m-2)/m)^(t-1) d_tv(mu1, mu2)`: from `(z, y)`, `Y` is
//! redrawn from `mu1` when `z = 1`, from `mu2` when `z = 2`, kept otherwise,
//! and `Z` is redrawn uniformly.
//!
//! State `(z, y)` is stored as `(z - 1) | y << ceil(log2 m)`.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{ChainSpec, Kind, PromiseInstance};
use crate::chain::{StateSpace, TransitionMatrix};
use crate::circuit::{mask, ChainCircuit, CircuitBuilder, SamplerCircuit, SamplerTable, Wire};
use crate::estimator::bits_for;
use crate::matrix::Matrix;
use crate::{Error, Rational, Result};

/// Largest closure built.
const STATE_CAP: usize = 1 << 12;

fn check_pair(c: &SamplerCircuit, c_prime: &SamplerCircuit, m: u64) -> Result<()> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!("m = {m} must be at least 3")));
    }
    if c.input_width() != c_prime.input_width() {
        return Err(Error::WidthMismatch { expected: c.input_width(), got: c_prime.input_width() });
    }
    if c.output_width() != c_prime.output_width() {
        return Err(Error::WidthMismatch { expected: c.output_width(), got: c_prime.output_width() });
    }
    if bits_for(m as usize) + c.output_width() > crate::chain::STATE_BITS_CAP {
        return Err(Error::ResourceCap {
            what: "state bits of the sampler chain",
            limit: crate::chain::STATE_BITS_CAP as u64,
            got: (bits_for(m as usize) + c.output_width()) as u64,
        });
    }
    Ok(())
}

/// Encoded state `(z, y)`, `z` in `1..=m`.
pub fn sd_state(m: u64, z: u64, y: u64) -> u64 {
    (z - 1) | y << bits_for(m as usize)
}

/// The chain as an exact matrix on the states reachable from `(1, 0^n)`,
/// which is the start (index 0).
pub fn sd_to_chain(
    c: &SamplerCircuit,
    c_prime: &SamplerCircuit,
    m: u64,
    t: u64,
    t_max: Option<u64>,
    gap: Rational,
    delta: Rational,
) -> Result<PromiseInstance> {
    check_pair(c, c_prime, m)?;
    let zb = bits_for(m as usize);
    let width = zb + c.output_width();
    let tables = [SamplerTable::build(c)?, SamplerTable::build(c_prime)?];
    let supports: [Vec<(u64, u64)>; 2] = [tables[0].counts().collect(), tables[1].counts().collect()];

    let successors = |s: u64| -> Vec<(u64, u64)> {
        let (z, y) = (s & mask(zb), s >> zb);
        match z {
            0 | 1 => supports[z as usize].clone(),
            _ => alloc::vec![(y, 1)],
        }
    };
    let mut seen = BTreeSet::from([0u64]);
    let mut queue = VecDeque::from([0u64]);
    while let Some(s) = queue.pop_front() {
        for (y, _) in successors(s) {
            for z in 0..m {
                let next = z | y << zb;
                if seen.insert(next) {
                    if seen.len() > STATE_CAP {
                        return Err(Error::ResourceCap { what: "sampler chain states", limit: STATE_CAP as u64, got: seen.len() as u64 });
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    let space = StateSpace::new(width, seen.into_iter().collect())?;
    let n = space.len();
    let mut probs = Matrix::from_rows(n, alloc::vec![Rational::zero(); n * n]);
    for (i, &s) in space.states().iter().enumerate() {
        let z = s & mask(zb);
        let den = if z < 2 { BigInt::from(m) << c.input_width() } else { BigInt::from(m) };
        for (y, count) in successors(s) {
            let p = Rational::new(BigInt::from(count), den.clone());
            for z2 in 0..m {
                let j = space.index_of(z2 | y << zb).expect("closure contains every successor");
                probs.set(i, j, p.clone());
            }
        }
    }
    let p = TransitionMatrix::from_probabilities(space, probs)?;
    PromiseInstance::new(Kind::Gptcs, ChainSpec::Matrix(p), 0, t, t_max, gap, delta)
}

/// Gate-list rule for the same chain when `m` is a power of two; the space
/// equals the one of [`sd_to_chain`]. Randomness: `log2 m` bits for the new
/// `Z`, then the samplers' input.
pub fn sd_chain_circuit(c: &SamplerCircuit, c_prime: &SamplerCircuit, m: u64, space: &StateSpace) -> Result<ChainCircuit> {
    check_pair(c, c_prime, m)?;
    if !m.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("uniform choice from [{m}] is not dyadic; m must be a power of two")));
    }
    let zb = m.trailing_zeros() as usize;
    let (k, n) = (c.input_width(), c.output_width());
    let mut b = CircuitBuilder::new(zb + n + zb + k);
    let z: Vec<Wire> = (0..zb).map(|i| b.input(i)).collect();
    let y: Vec<Wire> = (0..n).map(|i| b.input(zb + i)).collect();
    let rz: Vec<Wire> = (0..zb).map(|i| b.input(zb + n + i)).collect();
    let rs: Vec<Wire> = (0..k).map(|i| b.input(2 * zb + n + i)).collect();
    let first = b.inline(c.gate_list(), &rs);
    let second = b.inline(c_prime.gate_list(), &rs);
    let is_first = b.eq_const(&z, 0);
    let is_second = b.eq_const(&z, 1);
    let mut outputs = rz;
    for i in 0..n {
        let kept = b.mux(is_second, y[i], second[i]);
        outputs.push(b.mux(is_first, kept, first[i]));
    }
    let circuit = ChainCircuit::new(zb + n, zb + k, b.finish(outputs)?)?;
    if space.width() != zb + n {
        return Err(Error::WidthMismatch { expected: zb + n, got: space.width() });
    }
    Ok(circuit)
}

/// `1/2 ((m-2)/m)^(t-1) delta`.
pub fn closed_form_distance(m: u64, t: u64, distance: &Rational) -> Result<Rational> {
    if m < 3 || t == 0 {
        return Err(Error::InvalidParameter(format!("need m >= 3 and t >= 1, got m = {m}, t = {t}")));
    }
    if *distance < Rational::zero() || *distance > Rational::one() {
        return Err(Error::InvalidParameter(format!("distance {distance} outside [0, 1]")));
    }
    let ratio = Rational::new(BigInt::from(m - 2), BigInt::from(m));
    let exponent = i32::try_from(t - 1).map_err(|_| Error::InvalidParameter(format!("t = {t} too large")))?;
    Ok(ratio.pow(exponent) * distance / BigInt::from(2))
}
