//! Weighted hypercube walk built from a CNF formula: unit edges, and a
//! self loop of weight `n` at falsifying assignments or `n^d` at satisfying
//! ones. Unsatisfiable formulas give the lazy walk; a satisfying
//! assignment becomes a trap that slows mixing.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;

use super::{ChainSpec, Kind, PromiseInstance};
use crate::chain::{StateSpace, TransitionMatrix, Weights, STATE_BITS_CAP};
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    /// DIMACS form: `v` or `-v`, variables counted from 1.
    pub fn from_dimacs(lit: i64) -> Result<Self> {
        if lit == 0 {
            return Err(Error::InvalidParameter("literal 0 is not a variable".into()));
        }
        Ok(Self { var: (lit.unsigned_abs() - 1) as usize, negated: lit < 0 })
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated { -v } else { v }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    pub fn new(vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::InvalidParameter("formula has no clauses".into()));
        }
        if vars == 0 || vars > 63 {
            return Err(Error::InvalidParameter(format!("variable count {vars} outside 1..=63")));
        }
        for (i, clause) in clauses.iter().enumerate() {
            if let Some(l) = clause.iter().find(|l| l.var >= vars) {
                return Err(Error::InvalidParameter(format!("clause {i} mentions variable {} of {vars}", l.var + 1)));
            }
        }
        Ok(Self { vars, clauses })
    }

    pub fn from_dimacs(vars: usize, clauses: &[Vec<i64>]) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| c.iter().map(|&l| Literal::from_dimacs(l)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(vars, clauses)
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Bit `i` of `assignment` is variable `i + 1`.
    pub fn eval(&self, assignment: u64) -> bool {
        self.clauses
            .iter()
            .all(|clause| clause.iter().any(|l| ((assignment >> l.var) & 1 == 1) != l.negated))
    }

    pub fn satisfying(&self) -> Vec<u64> {
        (0..1u64 << self.vars).filter(|&a| self.eval(a)).collect()
    }

    /// `clauses` clauses of `width` distinct variables with random signs.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, vars: usize, clauses: usize, width: usize) -> Self {
        let width = width.min(vars).max(1);
        let clauses = (0..clauses.max(1))
            .map(|_| {
                let mut picked: Vec<usize> = Vec::with_capacity(width);
                while picked.len() < width {
                    let v = rng.random_range(0..vars);
                    if !picked.contains(&v) {
                        picked.push(v);
                    }
                }
                picked.sort_unstable();
                picked.into_iter().map(|var| Literal { var, negated: rng.random() }).collect()
            })
            .collect();
        Self::new(vars, clauses).expect("random formula is well formed")
    }
}

/// `ceil(n (ln n + ln(4 / (1 - 4 delta))))`, at least 1.
pub fn unsat_yes_time(n: usize, delta: &Rational) -> u64 {
    let delta = delta.to_f64().unwrap_or(0.0);
    let n = n as f64;
    let t = libm::ceil(n * (libm::log(n) + libm::log(4.0 / (1.0 - 4.0 * delta))));
    (t as u64).max(1)
}

/// GPTC instance on `{0,1}^n` with `x = 0^n`, `t` from [`unsat_yes_time`]
/// and `t_max = 32 n^(2d+1)`.
pub fn unsat_to_chain(psi: &CnfFormula, d: u32, delta: Rational, gap: Rational) -> Result<PromiseInstance> {
    let n = psi.vars();
    if n > STATE_BITS_CAP {
        return Err(Error::ResourceCap { what: "formula variables", limit: STATE_BITS_CAP as u64, got: n as u64 });
    }
    if d < 2 {
        return Err(Error::InvalidParameter(format!("trap exponent d = {d} must be at least 2")));
    }
    let trap = BigInt::from(n).pow(d);
    let mut triples = Vec::new();
    for y in 0..1u64 << n {
        for i in 0..n {
            let z = y ^ (1 << i);
            if y < z {
                triples.push((y as usize, z as usize, Rational::from_integer(BigInt::from(1))));
            }
        }
        let loop_weight = if psi.eval(y) { trap.clone() } else { BigInt::from(n) };
        triples.push((y as usize, y as usize, Rational::from_integer(loop_weight)));
    }
    let weights = Weights::new(1 << n, triples)?;
    let p = TransitionMatrix::from_weights(StateSpace::full(n), weights)?;
    let t_max = (BigInt::from(n).pow(2 * d + 1) * 32u32)
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter("t_max = 32 n^(2d+1) overflows 64 bits".into()))?;
    let t = unsat_yes_time(n, &delta);
    PromiseInstance::new(Kind::Gptc, ChainSpec::Matrix(p), 0, t, Some(t_max), gap, delta)
}
