//! The three convergence-testing promise problems, the gadgets that produce
//! hard instances of them, and brute-force deciders used as ground truth.

use alloc::format;

use num_traits::One;

use crate::chain::{to_matrix, StateSpace, TransitionMatrix};
use crate::circuit::ChainCircuit;
use crate::dyadic::DyadicChain;
use crate::{rational, Error, Rational, Result};

mod decide;
mod sd_chain;
mod szk;
mod tm;
mod unsat;

pub use decide::{exact_decide, exact_decide_with, Decision, DecideMode, Measure, Verdict, EXACT_STATES_CAP, FLOAT_STATES_CAP};
pub use sd_chain::{closed_form_distance, sd_chain_circuit, sd_state, sd_to_chain};
pub use szk::{
    gptc_coam_acceptance, gptc_coam_round, gptcs_to_sd, szk_condition, unroll, CoamPairProver, GptcCoam, GptcCoamTranscript,
    SdInstance,
};
pub use tm::{tm_to_chain, Move, Rule, TmGadget, ToyMachine, TM_ROUNDING_BITS};
pub use unsat::{unsat_to_chain, unsat_yes_time, CnfFormula, Literal};

/// Largest `t` or `t_max` accepted for the unary-time problems.
pub const UNARY_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Mixing from the given start, polynomial time bound.
    Gptcs,
    /// Worst-start mixing, polynomial time bound.
    Gptc,
    /// Worst-start mixing, time in binary.
    Gtc,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Gptcs => "GPTCS",
            Kind::Gptc => "GPTC",
            Kind::Gtc => "GTC",
        }
    }

    /// `t` and `t_max` are unary: their size bounds the work allowed.
    pub fn is_unary(self) -> bool {
        !matches!(self, Kind::Gtc)
    }
}

impl core::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GPTCS" => Ok(Kind::Gptcs),
            "GPTC" => Ok(Kind::Gptc),
            "GTC" => Ok(Kind::Gtc),
            other => Err(Error::InvalidParameter(format!("unknown problem kind {other:?} (GPTCS, GPTC or GTC)"))),
        }
    }
}

/// How the chain of an instance is given.
#[derive(Clone, Debug, PartialEq)]
pub enum ChainSpec {
    Matrix(TransitionMatrix),
    Circuit { circuit: ChainCircuit, space: StateSpace },
}

impl ChainSpec {
    pub fn space(&self) -> &StateSpace {
        match self {
            ChainSpec::Matrix(p) => p.space(),
            ChainSpec::Circuit { space, .. } => space,
        }
    }

    pub fn matrix(&self) -> Result<TransitionMatrix> {
        match self {
            ChainSpec::Matrix(p) => Ok(p.clone()),
            ChainSpec::Circuit { circuit, space } => to_matrix(circuit, space),
        }
    }
}

/// `(C, x, t, t_max)` together with the gap parameters `c` and `delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct PromiseInstance {
    pub kind: Kind,
    pub chain: ChainSpec,
    /// Start state, as an index into the chain's state space.
    pub x: usize,
    pub t: u64,
    /// Absent exactly for GTC.
    pub t_max: Option<u64>,
    pub c: Rational,
    pub delta: Rational,
}

impl PromiseInstance {
    pub fn new(kind: Kind, chain: ChainSpec, x: usize, t: u64, t_max: Option<u64>, c: Rational, delta: Rational) -> Result<Self> {
        if x >= chain.space().len() {
            return Err(Error::InvalidParameter(format!("start index {x} outside {} states", chain.space().len())));
        }
        if t == 0 {
            return Err(Error::InvalidParameter("t must be positive".into()));
        }
        match (kind, t_max) {
            (Kind::Gtc, Some(_)) => return Err(Error::InvalidParameter("GTC instances carry no t_max".into())),
            (Kind::Gptcs | Kind::Gptc, None) => {
                return Err(Error::InvalidParameter(format!("{} instances need t_max", kind.name())))
            }
            (_, Some(0)) => return Err(Error::InvalidParameter("t_max must be positive".into())),
            _ => {}
        }
        if c < Rational::one() {
            return Err(Error::InvalidParameter(format!("gap factor c = {c} must be at least 1")));
        }
        if delta < rational(0, 1) || delta >= rational(1, 4) {
            return Err(Error::InvalidParameter(format!("delta = {delta} must lie in [0, 1/4)")));
        }
        Ok(Self { kind, chain, x, t, t_max, c, delta })
    }

    pub fn space(&self) -> &StateSpace {
        self.chain.space()
    }

    pub fn matrix(&self) -> Result<TransitionMatrix> {
        self.chain.matrix()
    }

    /// Refuses unary times above [`UNARY_CAP`].
    pub fn check_work_budget(&self) -> Result<()> {
        if !self.kind.is_unary() {
            return Ok(());
        }
        for (what, v) in [("t", self.t), ("t_max", self.t_max.unwrap_or(0))] {
            if v > UNARY_CAP {
                return Err(Error::ResourceCap {
                    what: if what == "t" { "unary t" } else { "unary t_max" },
                    limit: UNARY_CAP,
                    got: v,
                });
            }
        }
        Ok(())
    }

    /// Same instance over the chain rounded to `bits` fractional bits.
    pub fn rounded(&self, bits: usize) -> Result<Self> {
        let p = DyadicChain::round(&self.matrix()?, bits)?.to_matrix();
        Ok(Self { chain: ChainSpec::Matrix(p), ..self.clone() })
    }

    /// A circuit for the chain: the given one, else the dyadic matrix
    /// compiled exactly, else the matrix rounded to `bits`. The start index
    /// carries over unchanged in the last two cases.
    pub fn circuit_form(&self, bits: usize) -> Result<(ChainCircuit, StateSpace)> {
        match &self.chain {
            ChainSpec::Circuit { circuit, space } => Ok((circuit.clone(), space.clone())),
            ChainSpec::Matrix(p) => {
                let d = match DyadicChain::exact_from(p) {
                    Ok(d) => d,
                    Err(Error::NotDyadic { .. }) => DyadicChain::round(p, bits)?,
                    Err(e) => return Err(e),
                };
                d.to_circuit()
            }
        }
    }
}
