//! Brute-force classification of promise instances.
//!
//! Distances to stationarity are non-increasing in time, so a single power
//! settles each side: YES iff the distance at `t - 1` is at most
//! `1/4 - delta`, NO iff the distance at `floor(c t)` exceeds `1/4 + delta`.

use alloc::format;
use alloc::string::String;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{Kind, PromiseInstance};
use crate::chain::{converges, stationary, TransitionMatrix};
use crate::matrix::PowerLadder;
use crate::mixing::{max_row_distance, tau, tv_distance};
use crate::{rational, Error, Rational, Result, Scalar};

/// Largest chain handled by [`DecideMode::Exact`].
pub const EXACT_STATES_CAP: usize = 64;
/// Largest chain handled in floating point.
pub const FLOAT_STATES_CAP: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    PromiseViolated,
    /// Neither condition holds; any answer is allowed.
    Gap,
}

impl Decision {
    pub fn name(&self) -> &'static str {
        match self {
            Decision::Yes => "YES",
            Decision::No => "NO",
            Decision::PromiseViolated => "PROMISE_VIOLATED",
            Decision::Gap => "GAP",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecideMode {
    /// Rationals on small chains, `f64` otherwise.
    Auto,
    Exact,
    Float,
}

/// A distance at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    pub t: u64,
    pub value: f64,
    /// Present when computed in rational arithmetic.
    pub exact: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub decision: Decision,
    pub exact: bool,
    pub reason: Option<String>,
    /// `tau(1/4)` when a `t_max` was checked.
    pub tau_quarter: Option<u64>,
    /// Distance at `t - 1`.
    pub before_t: Option<Measure>,
    /// Distance at `floor(c t)`.
    pub at_ct: Option<Measure>,
}

/// Rational arithmetic pays off only while denominators stay small.
pub(crate) fn exact_backend(states: usize, exponent: u64) -> bool {
    states <= 16 && exponent <= 256
}

pub fn exact_decide(instance: &PromiseInstance) -> Result<Verdict> {
    exact_decide_with(instance, DecideMode::Auto)
}

pub fn exact_decide_with(instance: &PromiseInstance, mode: DecideMode) -> Result<Verdict> {
    let p = instance.matrix()?;
    let ct = (&instance.c * Rational::from_integer(BigInt::from(instance.t)))
        .floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter("c t overflows 64 bits".into()))?;
    let exact = match mode {
        DecideMode::Exact => {
            if p.len() > EXACT_STATES_CAP {
                return Err(Error::ResourceCap { what: "states for exact decision", limit: EXACT_STATES_CAP as u64, got: p.len() as u64 });
            }
            true
        }
        DecideMode::Float => false,
        DecideMode::Auto => exact_backend(p.len(), ct),
    };
    if !exact && p.len() > FLOAT_STATES_CAP {
        return Err(Error::ResourceCap { what: "states for decision", limit: FLOAT_STATES_CAP as u64, got: p.len() as u64 });
    }
    if exact {
        classify::<Rational>(instance, &p, ct, |v| Some(v.clone()))
    } else {
        classify::<f64>(instance, &p, ct, |_| None)
    }
}

fn violated(exact: bool, reason: String, tau_quarter: Option<u64>) -> Verdict {
    Verdict { decision: Decision::PromiseViolated, exact, reason: Some(reason), tau_quarter, before_t: None, at_ct: None }
}

fn classify<S: Scalar>(
    instance: &PromiseInstance,
    p: &TransitionMatrix,
    ct: u64,
    to_exact: impl Fn(&S) -> Option<Rational>,
) -> Result<Verdict> {
    if !converges(p) {
        return Ok(violated(S::EXACT, "chain is not ergodic: P^t(x, .) does not converge to one limit".into(), None));
    }
    let quarter = S::from_rational(&rational(1, 4));
    let tau_quarter = match instance.t_max {
        Some(t_max) => match tau::<S>(p, &quarter, t_max) {
            Ok(v) => Some(v),
            Err(Error::Unresolved { last_d, .. }) => {
                return Ok(violated(S::EXACT, format!("tau(1/4) exceeds t_max = {t_max} (d(t_max) = {last_d})"), None));
            }
            Err(e) => return Err(e),
        },
        None => None,
    };
    let pi = match instance.kind {
        Kind::Gptcs => Some(stationary::<S>(p)?),
        _ => None,
    };
    let mut ladder = PowerLadder::new(p.to_scalar::<S>());
    let mut distance = |s: u64| -> Result<S> {
        let m = ladder.power(s);
        match &pi {
            Some(pi) => tv_distance(m.row(instance.x), pi.mass()),
            None => Ok(max_row_distance(&m).0),
        }
    };
    let measure = |t: u64, v: &S| Measure { t, value: v.to_f64(), exact: to_exact(v) };
    let before = distance(instance.t - 1)?;
    let after = distance(ct)?;
    let low = S::from_rational(&(rational(1, 4) - &instance.delta));
    let high = S::from_rational(&(rational(1, 4) + &instance.delta));
    let decision = if before <= low {
        Decision::Yes
    } else if after > high {
        Decision::No
    } else {
        Decision::Gap
    };
    Ok(Verdict {
        decision,
        exact: S::EXACT,
        reason: None,
        tau_quarter,
        before_t: Some(measure(instance.t - 1, &before)),
        at_ct: Some(measure(ct, &after)),
    })
}
