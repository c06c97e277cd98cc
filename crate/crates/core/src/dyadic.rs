//! Chains whose probabilities are multiples of `2^-bits`, the only ones a
//! circuit with uniform random bits can express.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::chain::{StateSpace, TransitionMatrix};
use crate::circuit::{mask, ChainCircuit, CircuitBuilder, Wire};
use crate::matrix::Matrix;
use crate::{Error, Rational, Result};

/// Fractional bits used when rounding weighted chains.
pub const DEFAULT_BITS: usize = 30;

/// Row `x` as `(next, weight)` with weights summing to `2^bits`; a random
/// word `r` picks the first entry whose running total exceeds it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicChain {
    space: StateSpace,
    bits: usize,
    rows: Vec<Vec<(usize, u64)>>,
    cumulative: Vec<Vec<u64>>,
}

impl DyadicChain {
    fn from_rows(space: StateSpace, bits: usize, rows: Vec<Vec<(usize, u64)>>) -> Self {
        let cumulative = rows
            .iter()
            .map(|row| {
                let mut acc = 0;
                row.iter()
                    .map(|&(_, w)| {
                        acc += w;
                        acc
                    })
                    .collect()
            })
            .collect();
        Self { space, bits, rows, cumulative }
    }

    /// Rounds every entry down to a multiple of `2^-bits`, keeps nonzero
    /// entries at one unit or more, and hands the leftover to the largest
    /// entry of the row (smallest index on ties).
    pub fn round(p: &TransitionMatrix, bits: usize) -> Result<Self> {
        if !(1..=62).contains(&bits) {
            return Err(Error::InvalidParameter(format!("rounding bits {bits} outside 1..=62")));
        }
        let unit = BigInt::one() << bits;
        let total = 1u64 << bits;
        let mut rows = Vec::with_capacity(p.len());
        for x in 0..p.len() {
            let mut row: Vec<(usize, u64)> = Vec::new();
            for (y, entry) in p.probs().row(x).iter().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                let scaled = (entry * Rational::from_integer(unit.clone())).floor().to_integer();
                row.push((y, scaled.to_u64().unwrap_or(0).max(1)));
            }
            if row.len() as u64 > total {
                return Err(Error::InvalidParameter(format!("row {x} has more entries than 2^{bits}")));
            }
            let sum: u64 = row.iter().map(|e| e.1).sum();
            let big = (0..row.len()).max_by(|&i, &j| row[i].1.cmp(&row[j].1).then(j.cmp(&i))).expect("rows are nonempty");
            if sum <= total {
                row[big].1 += total - sum;
            } else {
                // Only possible through the one-unit floor; take the excess
                // from the largest entries.
                let mut excess = sum - total;
                let mut order: Vec<usize> = (0..row.len()).collect();
                order.sort_by(|&i, &j| row[j].1.cmp(&row[i].1).then(i.cmp(&j)));
                for i in order {
                    let take = excess.min(row[i].1 - 1);
                    row[i].1 -= take;
                    excess -= take;
                    if excess == 0 {
                        break;
                    }
                }
            }
            rows.push(row);
        }
        Ok(Self::from_rows(p.space().clone(), bits, rows))
    }

    /// Exact conversion; every entry must already be `k / 2^j`.
    pub fn exact_from(p: &TransitionMatrix) -> Result<Self> {
        let mut bits = 0usize;
        for x in 0..p.len() {
            for (y, e) in p.probs().row(x).iter().enumerate() {
                let den = e.denom();
                let j = den.bits().saturating_sub(1) as usize;
                if *den != BigInt::one() << j || j > 62 {
                    return Err(Error::NotDyadic { row: x, col: y, value: e.to_string() });
                }
                bits = bits.max(j);
            }
        }
        let bits = bits.max(1);
        let unit = Rational::from_integer(BigInt::one() << bits);
        let rows = (0..p.len())
            .map(|x| {
                p.probs()
                    .row(x)
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| !e.is_zero())
                    .map(|(y, e)| (y, (e * &unit).to_integer().to_u64().expect("fits")))
                    .collect()
            })
            .collect();
        Ok(Self::from_rows(p.space().clone(), bits, rows))
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, x: usize) -> &[(usize, u64)] {
        &self.rows[x]
    }

    /// Next state index for random word `r` (low `bits` bits are used).
    #[inline]
    pub fn next(&self, x: usize, r: u64) -> usize {
        let r = r & mask(self.bits);
        let cum = &self.cumulative[x];
        let i = cum.partition_point(|&c| c <= r);
        self.rows[x][i].0
    }

    pub fn to_matrix(&self) -> TransitionMatrix {
        let n = self.len();
        let den = BigInt::one() << self.bits;
        let mut m = Matrix::zeros(n);
        for (x, row) in self.rows.iter().enumerate() {
            for &(y, w) in row {
                let g = BigInt::from(w).gcd(&den);
                m.set(x, y, Rational::new_raw(BigInt::from(w) / &g, &den / &g));
            }
        }
        TransitionMatrix::from_probabilities(self.space.clone(), m).expect("rows sum to one by construction")
    }

    /// Gate-list rule over index-encoded states: state bits are
    /// `ceil(log2 |Omega|)`, randomness is `bits` wide. Codes past the last
    /// state stay put.
    pub fn to_circuit(&self) -> Result<(ChainCircuit, StateSpace)> {
        let n_states = self.len();
        let width = (usize::BITS - n_states.saturating_sub(1).leading_zeros()).max(1) as usize;
        let m = self.bits;
        let mut b = CircuitBuilder::new(width + m);
        let state: Vec<Wire> = (0..width).map(|i| b.input(i)).collect();
        let random: Vec<Wire> = (0..m).map(|i| b.input(width + i)).collect();
        let zero = b.constant(false);
        let mut out = alloc::vec![zero; width];
        let mut known = zero;
        for (x, row) in self.rows.iter().enumerate() {
            let here = b.eq_const(&state, x as u64);
            known = b.or(known, here);
            let mut lo = 0u64;
            for &(y, w) in row {
                let hi = lo + w;
                let below_hi = b.lt_const(&random, hi);
                let below_lo = b.lt_const(&random, lo);
                let above_lo = b.not(below_lo);
                let in_range = b.and(below_hi, above_lo);
                let fire = b.and(here, in_range);
                for (i, slot) in out.iter_mut().enumerate() {
                    if (y >> i) & 1 == 1 {
                        *slot = b.or(*slot, fire);
                    }
                }
                lo = hi;
            }
        }
        let stay = b.not(known);
        for (i, slot) in out.iter_mut().enumerate() {
            let keep = b.and(stay, state[i]);
            *slot = b.or(*slot, keep);
        }
        let circuit = ChainCircuit::new(width, m, b.finish(out)?)?;
        let space = StateSpace::new(width, (0..n_states as u64).collect())?;
        Ok((circuit, space))
    }
}
