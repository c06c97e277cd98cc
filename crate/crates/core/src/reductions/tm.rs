//! Configuration-graph chain of a small space-bounded machine. Successive
//! configurations are joined by edges of a heavy weight `w`, every state
//! carries a loop of weight `w`, the reject configuration is joined to the
//! start by weight `w` and to the accept configuration by weight 1. An
//! accepting run leaves the graph connected through heavy edges; a
//! rejecting one cuts it at the unit edge.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::{ChainSpec, Kind, PromiseInstance};
use crate::chain::{StateSpace, TransitionMatrix, Weights};
use crate::estimator::bits_for;
use crate::{rational, Error, Rational, Result};

/// Rounding used when the gadget is checked as a dyadic chain. The unit
/// edge has probability about `1/w`, far below `2^-30`.
pub const TM_ROUNDING_BITS: usize = 62;

/// Configurations allowed in the state space.
const CONFIG_CAP: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Stay,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub next: usize,
    pub write: bool,
    pub movement: Move,
}

/// One tape of `cells` bits; control state 0 starts. The rule is chosen by
/// the control state, whether the head sits on the last cell, and the
/// scanned bit: `rules[state][at_last][bit]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyMachine {
    pub name: String,
    pub states: usize,
    pub accept: usize,
    pub reject: usize,
    pub cells: usize,
    pub rules: Vec<[[Rule; 2]; 2]>,
}

const HALT: Rule = Rule { next: 0, write: false, movement: Move::Stay };

impl ToyMachine {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.states < 3 || self.accept == 0 || self.reject == 0 || self.accept == self.reject {
            return bad(format!("machine {:?} needs a start state 0 and distinct accept and reject states", self.name));
        }
        if self.accept >= self.states || self.reject >= self.states || self.rules.len() != self.states {
            return bad(format!("machine {:?} has {} states but {} rule rows", self.name, self.states, self.rules.len()));
        }
        if self.cells == 0 || self.cells > 16 {
            return bad(format!("tape length {} outside 1..=16", self.cells));
        }
        if let Some(r) = self.rules.iter().flatten().flatten().find(|r| r.next >= self.states) {
            return bad(format!("rule moves to undefined state {}", r.next));
        }
        Ok(())
    }

    fn head_bits(&self) -> usize {
        bits_for(self.cells)
    }

    fn state_bits(&self) -> usize {
        bits_for(self.states)
    }

    /// Width of an encoded configuration `head | state << h | tape << (h + q)`.
    pub fn config_bits(&self) -> usize {
        self.head_bits() + self.state_bits() + self.cells
    }

    pub fn encode(&self, head: usize, state: usize, tape: u64) -> u64 {
        let (h, q) = (self.head_bits(), self.state_bits());
        head as u64 | (state as u64) << h | tape << (h + q)
    }

    pub fn decode(&self, config: u64) -> (usize, usize, u64) {
        let (h, q) = (self.head_bits(), self.state_bits());
        let head = (config & ((1 << h) - 1)) as usize;
        let state = ((config >> h) & ((1 << q) - 1)) as usize;
        (head, state, config >> (h + q))
    }

    pub fn accept_config(&self) -> u64 {
        self.encode(0, self.accept, 0)
    }

    pub fn reject_config(&self) -> u64 {
        self.encode(0, self.reject, 0)
    }

    pub fn start_config(&self, input: &[bool]) -> Result<u64> {
        if input.len() > self.cells {
            return Err(Error::InvalidParameter(format!("input of {} bits exceeds {} cells", input.len(), self.cells)));
        }
        let tape = input.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (b as u64) << i);
        Ok(self.encode(0, 0, tape))
    }

    /// Successor configuration, `None` on halting ones. Entering the accept
    /// or reject state lands on the canonical configuration of that state.
    pub fn step(&self, config: u64) -> Result<Option<u64>> {
        let (head, state, tape) = self.decode(config);
        if state == self.accept || state == self.reject {
            return Ok(None);
        }
        let bit = (tape >> head) & 1;
        let rule = self.rules[state][(head + 1 == self.cells) as usize][bit as usize];
        if rule.next == self.accept {
            return Ok(Some(self.accept_config()));
        }
        if rule.next == self.reject {
            return Ok(Some(self.reject_config()));
        }
        let tape = (tape & !(1 << head)) | (rule.write as u64) << head;
        let head = match rule.movement {
            Move::Stay => Some(head),
            Move::Left => head.checked_sub(1),
            Move::Right => Some(head + 1).filter(|&h| h < self.cells),
        }
        .ok_or_else(|| Error::InvalidParameter(format!("machine {:?} moves its head off the {}-cell tape", self.name, self.cells)))?;
        Ok(Some(self.encode(head, rule.next, tape)))
    }

    /// Accepts iff the first cell holds 1.
    pub fn first_bit(cells: usize) -> Self {
        let decide = |bit: usize| Rule { next: if bit == 1 { 1 } else { 2 }, write: bit == 1, movement: Move::Stay };
        let row = [[decide(0), decide(1)], [decide(0), decide(1)]];
        Self::with_rows("first-bit", cells, 1, 2, alloc::vec![row, [[HALT; 2]; 2], [[HALT; 2]; 2]])
    }

    /// Scans right; accepts at the first 1, rejects at the end of the tape.
    pub fn contains_one(cells: usize) -> Self {
        let scan = Rule { next: 0, write: false, movement: Move::Right };
        let acc = Rule { next: 1, write: true, movement: Move::Stay };
        let rej = Rule { next: 2, write: false, movement: Move::Stay };
        Self::with_rows("contains-one", cells, 1, 2, alloc::vec![[[scan, acc], [rej, acc]], [[HALT; 2]; 2], [[HALT; 2]; 2]])
    }

    /// Accepts iff the tape holds an odd number of ones. States 0 and 1
    /// track the parity so far.
    pub fn parity(cells: usize) -> Self {
        let row = |parity: usize| -> [[Rule; 2]; 2] {
            let go = |bit: usize| Rule { next: parity ^ bit, write: bit == 1, movement: Move::Right };
            let end = |bit: usize| Rule { next: if parity ^ bit == 1 { 2 } else { 3 }, write: bit == 1, movement: Move::Stay };
            [[go(0), go(1)], [end(0), end(1)]]
        };
        Self::with_rows("parity", cells, 2, 3, alloc::vec![row(0), row(1), [[HALT; 2]; 2], [[HALT; 2]; 2]])
    }

    pub fn builtin(name: &str, cells: usize) -> Result<Self> {
        match name {
            "first-bit" => Ok(Self::first_bit(cells)),
            "contains-one" => Ok(Self::contains_one(cells)),
            "parity" => Ok(Self::parity(cells)),
            _ => Err(Error::InvalidParameter(format!("unknown machine {name:?} (first-bit, contains-one, parity)"))),
        }
    }

    fn with_rows(name: &str, cells: usize, accept: usize, reject: usize, rules: Vec<[[Rule; 2]; 2]>) -> Self {
        Self { name: name.into(), states: rules.len(), accept, reject, cells, rules }
    }
}

/// The instance plus the quantities its guarantees are stated in.
#[derive(Clone, Debug, PartialEq)]
pub struct TmGadget {
    pub instance: PromiseInstance,
    pub accepted: bool,
    /// Configuration bits, the `n` of `2^(3n)`.
    pub n: usize,
    /// Degree bound: most configuration neighbours plus 2.
    pub degree: u64,
    pub w: u64,
    /// Machine steps until halting.
    pub steps: usize,
    pub start: usize,
    pub accept: usize,
    pub reject: usize,
}

impl TmGadget {
    /// `10 D^3 2^(3n) / (1 - 4 delta)`, exactly.
    pub fn yes_bound(&self) -> Rational {
        scaled(self.degree, self.n, &self.instance.delta, 10)
    }
}

fn scaled(degree: u64, n: usize, delta: &Rational, factor: u64) -> Rational {
    let top = BigInt::from(factor) * BigInt::from(degree).pow(3) * (BigInt::one() << (3 * n));
    Rational::from_integer(top) / (Rational::one() - delta * BigInt::from(4))
}

fn to_u64(v: &Rational, what: &str) -> Result<u64> {
    v.ceil().to_integer().to_u64().ok_or_else(|| Error::InvalidParameter(format!("{what} = {v} overflows 64 bits")))
}

/// GTC instance from the run of `machine` on `input`; `t` and `w` as in the
/// module notes with `c` the gap factor.
pub fn tm_to_chain(machine: &ToyMachine, input: &[bool], gap: Rational, delta: Rational) -> Result<TmGadget> {
    machine.validate()?;
    let start = machine.start_config(input)?;
    let mut path = alloc::vec![start];
    let mut seen = BTreeSet::from([start]);
    while let Some(next) = machine.step(*path.last().expect("path is nonempty"))? {
        if !seen.insert(next) {
            return Err(Error::InvalidParameter(format!("machine {:?} loops forever on this input", machine.name)));
        }
        if seen.len() > CONFIG_CAP {
            return Err(Error::ResourceCap { what: "machine configurations", limit: CONFIG_CAP as u64, got: seen.len() as u64 });
        }
        path.push(next);
    }
    let (acc, rej) = (machine.accept_config(), machine.reject_config());
    let accepted = *path.last().expect("path is nonempty") == acc;
    seen.insert(acc);
    seen.insert(rej);
    let space = StateSpace::new(machine.config_bits(), seen.into_iter().collect())?;
    let index = |c: u64| space.index_of(c).expect("configuration is in the space");

    let mut neighbours: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for pair in path.windows(2) {
        let (a, b) = (index(pair[0]), index(pair[1]));
        neighbours.entry(a).or_default().insert(b);
        neighbours.entry(b).or_default().insert(a);
    }
    let degree = neighbours.values().map(|s| s.len() as u64).max().unwrap_or(0) + 2;
    let n = machine.config_bits();
    let w_exact = scaled(degree, n, &delta, 1000) * &gap;
    let w = to_u64(&w_exact, "w")?;
    let t = to_u64(&scaled(degree, n, &delta, 10), "t")?;

    let heavy = Rational::from_integer(BigInt::from(w));
    let mut triples: Vec<(usize, usize, Rational)> = Vec::new();
    for pair in path.windows(2) {
        triples.push((index(pair[0]), index(pair[1]), heavy.clone()));
    }
    triples.push((index(rej), index(start), heavy.clone()));
    triples.push((index(rej), index(acc), rational(1, 1)));
    for x in 0..space.len() {
        triples.push((x, x, heavy.clone()));
    }
    let (s, a, r) = (index(start), index(acc), index(rej));
    let weights = Weights::new(space.len(), triples)?;
    let p = TransitionMatrix::from_weights(space, weights)?;
    let instance = PromiseInstance::new(Kind::Gtc, ChainSpec::Matrix(p), s, t, None, gap, delta)?;
    Ok(TmGadget { instance, accepted, n, degree, w, steps: path.len() - 1, start: s, accept: a, reject: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::check_ergodic;

    #[test]
    fn builtins_decide_correctly() {
        let cases: [(&str, &[bool], bool); 6] = [
            ("first-bit", &[true, false], true),
            ("first-bit", &[false, true], false),
            ("contains-one", &[false, false, true], true),
            ("contains-one", &[false, false, false], false),
            ("parity", &[true, true, true], true),
            ("parity", &[true, false, true], false),
        ];
        for (name, input, expected) in cases {
            let m = ToyMachine::builtin(name, 3).unwrap();
            let g = tm_to_chain(&m, input, rational(1, 1), rational(1, 10)).unwrap();
            assert_eq!(g.accepted, expected, "{name} on {input:?}");
            assert!(check_ergodic(&g.instance.matrix().unwrap()));
        }
    }

    #[test]
    fn trivial_machine_weights() {
        // One step to accept: path start - acc, plus rej. D = 1 + 2.
        let m = ToyMachine::first_bit(1);
        let g = tm_to_chain(&m, &[true], rational(1, 1), rational(0, 1)).unwrap();
        assert_eq!((g.steps, g.degree, g.instance.space().len()), (1, 3, 3));
        let n = m.config_bits();
        assert_eq!(g.instance.t, 10 * 27 << (3 * n));
        assert_eq!(g.w, 1000 * 27 << (3 * n));
        // pi_min >= 1 / (D 2^n): the lightest state still holds a loop of w.
        let p = g.instance.matrix().unwrap();
        let degrees = p.weights().unwrap().degrees().to_vec();
        let total: Rational = degrees.iter().sum();
        let pi_min = degrees.iter().min().unwrap() / &total;
        assert!(pi_min >= Rational::new(BigInt::one(), BigInt::from(g.degree) << n));
    }

    #[test]
    fn head_leaving_the_tape_is_an_error() {
        let mut m = ToyMachine::contains_one(2);
        m.rules[0][1][0] = Rule { next: 0, write: false, movement: Move::Right };
        assert!(tm_to_chain(&m, &[false, false], rational(1, 1), rational(0, 1)).is_err());
        let mut spin = ToyMachine::first_bit(2);
        spin.rules[0][0][0] = Rule { next: 0, write: false, movement: Move::Stay };
        assert!(tm_to_chain(&spin, &[false], rational(1, 1), rational(0, 1)).is_err());
    }
}
