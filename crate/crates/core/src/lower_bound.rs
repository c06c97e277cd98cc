//! Hash-based lower-bound protocol certifying `N(t) >= N~`.
//!
//! V sends `g: {0,1}^n -> {0,1}^a`; P names `c` outputs `w` with `g(w) = 0`;
//! V sends `h: {0,1}^k -> {0,1}^b`; P names `d` preimages under each circuit
//! of every `w` with `h(r) = 0`. V accepts iff every item checks out.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;

use crate::hash::AffineHash;
use crate::sd::{check_delta, SdPair};
use crate::{Error, Rational, Result};

/// The two Chebyshev constants behind the quotas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Constants {
    pub k1: u64,
    pub k2: u64,
}

impl Constants {
    /// The original constants 54 and 5000.
    pub const PAPER: Self = Self { k1: 54, k2: 5000 };
    /// Small constants whose quotas fit domains of a few thousand points.
    pub const DESK: Self = Self { k1: 6, k2: 50 };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Paper,
    Desk,
}

impl Profile {
    pub fn constants(self) -> Constants {
        match self {
            Profile::Paper => Constants::PAPER,
            Profile::Desk => Constants::DESK,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Paper => "paper",
            Profile::Desk => "desk",
        }
    }
}

impl core::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Profile::Paper),
            "desk" => Ok(Profile::Desk),
            _ => Err(Error::InvalidParameter(alloc::format!("unknown profile {s:?}; expected paper or desk"))),
        }
    }
}

/// How `delta_1`, `delta_2` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaMode {
    /// Largest values `<= delta` making both logarithms integers.
    Integral,
    /// `delta_1 = delta_2 = delta`, logarithms rounded down.
    Simplified,
}

/// Which `delta` divides `K2` in the second quota.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotaReading {
    /// `floor((1 - delta_2/2) K2 / delta_2^4)`
    Matched,
    /// `floor((1 - delta_2/2) K2 / delta^4)`
    Plain,
}

/// Everything the verifier fixes before the first message.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolParams {
    pub delta: Rational,
    pub constants: Constants,
    pub n_tilde: u64,
    pub t: u64,
    /// Width of `g`.
    pub a: u32,
    /// Width of `h`.
    pub b: u32,
    pub delta1: f64,
    pub delta2: f64,
    /// Number of outputs the prover must name.
    pub c_count: u64,
    /// Number of preimages per output and circuit.
    pub d_count: u64,
    /// `true` when `delta^2 N~ < K1`, so the prover lists `N~` members of the
    /// set outright.
    pub exact_outputs: bool,
    /// `true` when `delta^4 t < K2`, so every preimage is listed.
    pub exact_preimages: bool,
}

/// Largest `a >= 0` with `2^a <= x`, for `x >= 1`.
fn floor_log2(x: &Rational) -> u32 {
    let mut a = 0u32;
    let mut power = Rational::from_integer(BigInt::from(2));
    while power <= *x {
        power *= Rational::from_integer(BigInt::from(2));
        a += 1;
    }
    a
}

impl ProtocolParams {
    pub fn new(
        delta: &Rational,
        n_tilde: u64,
        t: u64,
        constants: Constants,
        mode: DeltaMode,
        reading: QuotaReading,
    ) -> Result<Self> {
        check_delta(delta, &Rational::one())?;
        if t == 0 {
            return Err(Error::InvalidParameter("threshold t must be at least 1".into()));
        }
        let d = crate::Scalar::to_f64(delta);
        let delta2_sq = delta * delta;
        let x = &delta2_sq * Rational::from_integer(BigInt::from(n_tilde)) / Rational::from_integer(BigInt::from(constants.k1));
        let y = &delta2_sq * &delta2_sq * Rational::from_integer(BigInt::from(t))
            / Rational::from_integer(BigInt::from(constants.k2));
        let one = Rational::one();

        let exact_outputs = x < one;
        let (a, delta1, c_count) = if exact_outputs {
            (0, d, n_tilde)
        } else {
            let a = floor_log2(&x);
            match mode {
                DeltaMode::Integral => {
                    let per_bucket = n_tilde as f64 / libm::ldexp(1.0, a as i32);
                    let d1 = libm::sqrt(constants.k1 as f64 / per_bucket);
                    (a, d1, libm::floor((1.0 - d1 / 2.0) * per_bucket) as u64)
                }
                DeltaMode::Simplified => (a, d, libm::floor((1.0 - d / 2.0) * constants.k1 as f64 / (d * d)) as u64),
            }
        };

        let exact_preimages = y < one;
        let (b, delta2, d_count) = if exact_preimages {
            (0, d, t)
        } else {
            let b = floor_log2(&y);
            let (d2, scale) = match mode {
                DeltaMode::Integral => {
                    let per_bucket = t as f64 / libm::ldexp(1.0, b as i32);
                    (libm::pow(constants.k2 as f64 / per_bucket, 0.25), per_bucket)
                }
                DeltaMode::Simplified => (d, constants.k2 as f64 / libm::pow(d, 4.0)),
            };
            let scale = match reading {
                QuotaReading::Matched => scale,
                QuotaReading::Plain => constants.k2 as f64 / libm::pow(d, 4.0),
            };
            (b, d2, libm::floor((1.0 - d2 / 2.0) * scale) as u64)
        };

        Ok(Self {
            delta: delta.clone(),
            constants,
            n_tilde,
            t,
            a,
            b,
            delta1,
            delta2,
            c_count,
            d_count,
            exact_outputs,
            exact_preimages,
        })
    }

    /// Integral mode with the matched quota reading.
    pub fn standard(delta: &Rational, n_tilde: u64, t: u64, profile: Profile) -> Result<Self> {
        Self::new(delta, n_tilde, t, profile.constants(), DeltaMode::Integral, QuotaReading::Matched)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prover {
    /// Names members of `S = {w : both counts >= t}` in ascending order.
    Honest,
    /// Names the hashed outputs with the most shared preimages, whether or
    /// not they clear `t`. Since every check is a conjunction, sending the
    /// most valid items is the best a cheater can do.
    Greedy,
}

/// Why the verifier rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    TooFewOutputs,
    OutputHash,
    TooFewPreimages,
    PreimageHash,
    PreimageMismatch,
}

/// One four-message execution.
#[derive(Clone, Debug, PartialEq)]
pub struct LbTranscript {
    pub g: AffineHash,
    pub outputs: Vec<u64>,
    pub h: AffineHash,
    /// For each named output, preimages under `C` then under `C'`.
    pub preimages: Vec<(Vec<u64>, Vec<u64>)>,
    pub accept: bool,
    pub rejection: Option<Rejection>,
}

fn hashed_preimages(list: &[u64], h: &AffineHash, quota: u64) -> Vec<u64> {
    list.iter().copied().filter(|&r| h.apply(r) == 0).take(quota as usize).collect()
}

fn verify(pair: &SdPair, params: &ProtocolParams, tr: &LbTranscript) -> core::result::Result<(), Rejection> {
    if (tr.outputs.len() as u64) < params.c_count {
        return Err(Rejection::TooFewOutputs);
    }
    if tr.outputs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Rejection::TooFewOutputs);
    }
    if tr.outputs.iter().any(|&w| tr.g.apply(w) != 0) {
        return Err(Rejection::OutputHash);
    }
    for (&w, (left, right)) in tr.outputs.iter().zip(&tr.preimages) {
        for (list, table) in [(left, pair.left()), (right, pair.right())] {
            if (list.len() as u64) < params.d_count || list.windows(2).any(|p| p[0] >= p[1]) {
                return Err(Rejection::TooFewPreimages);
            }
            if list.iter().any(|&r| tr.h.apply(r) != 0) {
                return Err(Rejection::PreimageHash);
            }
            if list.iter().any(|&r| r >= pair.domain() || table.output(r) != w) {
                return Err(Rejection::PreimageMismatch);
            }
        }
    }
    Ok(())
}

/// One round against the chosen prover.
pub fn lower_bound_round<R: Rng + ?Sized>(pair: &SdPair, params: &ProtocolParams, prover: Prover, rng: &mut R) -> LbTranscript {
    let g = AffineHash::random(rng, pair.output_width(), params.a as usize);
    let overlap = pair.overlap();
    let mut candidates: Vec<(u64, u64)> = overlap
        .iter()
        .filter(|(&w, _)| g.apply(w) == 0)
        .map(|(&w, &f)| (w, f))
        .collect();
    match prover {
        Prover::Honest => candidates.retain(|&(_, f)| f >= params.t),
        Prover::Greedy => candidates.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0))),
    }
    candidates.truncate(params.c_count as usize);
    let mut outputs: Vec<u64> = candidates.into_iter().map(|(w, _)| w).collect();
    outputs.sort_unstable();

    let h = AffineHash::random(rng, pair.input_width(), params.b as usize);
    let preimages = outputs
        .iter()
        .map(|&w| {
            (
                hashed_preimages(pair.left().preimages(w), &h, params.d_count),
                hashed_preimages(pair.right().preimages(w), &h, params.d_count),
            )
        })
        .collect();
    let mut tr = LbTranscript { g, outputs, h, preimages, accept: false, rejection: None };
    match verify(pair, params, &tr) {
        Ok(()) => tr.accept = true,
        Err(r) => tr.rejection = Some(r),
    }
    tr
}

/// Odd repetition count making a majority vote err with probability at
/// most `delta / (20 n)`, from `exp(-k/18)` for per-round error `1/3`.
pub fn repetitions(n: usize, delta: &Rational) -> u64 {
    let d = crate::Scalar::to_f64(delta);
    let k = libm::ceil(18.0 * libm::log(20.0 * n.max(1) as f64 / d)) as u64;
    k.max(1) | 1
}

/// Majority vote over `reps` independent rounds.
pub fn amplified_lower_bound<R: Rng + ?Sized>(
    pair: &SdPair,
    params: &ProtocolParams,
    prover: Prover,
    reps: u64,
    rng: &mut R,
) -> (bool, u64) {
    let mut accepted = 0;
    for _ in 0..reps {
        if lower_bound_round(pair, params, prover, rng).accept {
            accepted += 1;
        }
    }
    (2 * accepted > reps, accepted)
}

/// `true` iff `N(t) >= N~` (completeness side of the promise).
pub fn is_yes(pair: &SdPair, t: u64, n_tilde: u64) -> bool {
    crate::sd::preimage_profile(pair, t) >= n_tilde
}

/// `true` iff `N(ceil((1 - delta) t)) < (1 - delta) N~`.
pub fn is_no(pair: &SdPair, t: u64, n_tilde: u64, delta: &Rational) -> bool {
    let shrink = Rational::one() - delta;
    let relaxed = (&shrink * Rational::from_integer(BigInt::from(t))).ceil().to_integer();
    let relaxed = u64::try_from(relaxed).unwrap_or(0);
    let n = crate::sd::preimage_profile(pair, relaxed.max(1));
    Rational::from_integer(BigInt::from(n)) < shrink * Rational::from_integer(BigInt::from(n_tilde))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::SamplerCircuit;
    use crate::rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn paper_quotas_follow_the_formulas() {
        for (num, den) in [(1, 2), (1, 3), (1, 5), (1, 10)] {
            let delta = rational(num, den);
            let d = num as f64 / den as f64;
            for n_tilde in [1_000u64, 54_321, 1 << 20] {
                for t in [100_000u64, 1 << 22, 987_654_321] {
                    let p = ProtocolParams::standard(&delta, n_tilde, t, Profile::Paper).unwrap();
                    if !p.exact_outputs {
                        // a = log(delta_1^2 N~ / 54) exactly, with delta_1 <= delta the largest such.
                        let two_a = p.delta1 * p.delta1 * n_tilde as f64 / 54.0;
                        assert!((two_a - libm::ldexp(1.0, p.a as i32)).abs() < 1e-9 * two_a);
                        assert!(p.delta1 <= d + 1e-12);
                        assert!(libm::sqrt(54.0 * libm::ldexp(1.0, p.a as i32 + 1) / n_tilde as f64) > d);
                        let c = libm::floor((1.0 - p.delta1 / 2.0) * (54.0 / (p.delta1 * p.delta1)));
                        assert_eq!(p.c_count as f64, c);
                    }
                    if !p.exact_preimages {
                        let two_b = libm::pow(p.delta2, 4.0) * t as f64 / 5000.0;
                        assert!((two_b - libm::ldexp(1.0, p.b as i32)).abs() < 1e-9 * two_b);
                        assert!(p.delta2 <= d + 1e-12);
                        let dq = libm::floor((1.0 - p.delta2 / 2.0) * (5000.0 / libm::pow(p.delta2, 4.0)));
                        assert!((p.d_count as f64 - dq).abs() <= 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn simplified_mode_uses_delta() {
        let p = ProtocolParams::new(&rational(1, 3), 10_000, 1 << 20, Constants::PAPER, DeltaMode::Simplified, QuotaReading::Matched)
            .unwrap();
        assert_eq!(p.delta1, 1.0 / 3.0);
        assert_eq!(p.c_count, ((1.0 - 1.0 / 6.0) * 54.0 * 9.0f64).floor() as u64);
        assert_eq!(p.d_count, ((1.0 - 1.0 / 6.0) * 5000.0 * 81.0f64).floor() as u64);
    }

    #[test]
    fn plain_reading_differs_only_in_second_quota() {
        let delta = rational(1, 2);
        let matched = ProtocolParams::new(&delta, 500, 100_000, Constants::DESK, DeltaMode::Integral, QuotaReading::Matched).unwrap();
        let plain = ProtocolParams::new(&delta, 500, 100_000, Constants::DESK, DeltaMode::Integral, QuotaReading::Plain).unwrap();
        assert_eq!(matched.c_count, plain.c_count);
        assert_eq!(plain.d_count, ((1.0 - plain.delta2 / 2.0) * 50.0 * 16.0f64).floor() as u64);
    }

    #[test]
    fn tiny_targets_list_exactly() {
        let p = ProtocolParams::standard(&rational(1, 3), 4, 3, Profile::Desk).unwrap();
        assert!(p.exact_outputs && p.exact_preimages);
        assert_eq!((p.a, p.b, p.c_count, p.d_count), (0, 0, 4, 3));
    }

    #[test]
    fn degenerate_hash_decides_exactly() {
        // Identity vs identity on 3 bits: every output has one preimage.
        let id = SamplerCircuit::identity(3);
        let pair = SdPair::new(&id, &id).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n_tilde in 1..=9 {
            let p = ProtocolParams::standard(&rational(1, 2), n_tilde, 1, Profile::Desk).unwrap();
            assert_eq!(p.a, 0);
            for prover in [Prover::Honest, Prover::Greedy] {
                let tr = lower_bound_round(&pair, &p, prover, &mut rng);
                assert_eq!(tr.accept, 8 >= p.c_count, "N~ = {n_tilde}");
            }
        }
    }

    #[test]
    fn transcripts_verify_independently() {
        let id = SamplerCircuit::identity(4);
        let zero = SamplerCircuit::constant(4, 0);
        let pair = SdPair::new(&id, &zero).unwrap();
        let p = ProtocolParams::standard(&rational(1, 2), 1, 1, Profile::Desk).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tr = lower_bound_round(&pair, &p, Prover::Honest, &mut rng);
        assert!(tr.accept);
        assert_eq!(tr.outputs, [0]);
        let mut forged = tr.clone();
        forged.preimages[0].0 = alloc::vec![3];
        assert_eq!(verify(&pair, &p, &forged), Err(Rejection::PreimageMismatch));
    }

    #[test]
    fn repetition_count_is_odd_and_single_round_matches() {
        assert_eq!(repetitions(7, &rational(1, 2)) % 2, 1);
        assert!(repetitions(7, &rational(1, 2)) >= 18 * 5);
        let id = SamplerCircuit::identity(3);
        let pair = SdPair::new(&id, &id).unwrap();
        let p = ProtocolParams::standard(&rational(1, 2), 8, 1, Profile::Desk).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(2);
        let mut b = ChaCha8Rng::seed_from_u64(2);
        let single = lower_bound_round(&pair, &p, Prover::Honest, &mut a).accept;
        assert_eq!(amplified_lower_bound(&pair, &p, Prover::Honest, 1, &mut b).0, single);
    }
}
