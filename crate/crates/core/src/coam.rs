//! Protocol showing two samplers are close: the prover claims the level
//! counts `N_i = N(ceil((1 - delta)^-i))`, each claim is certified by the
//! lower-bound protocol, and the verifier checks
//! `sum_i (N~_i - N~_{i+1})(1 - delta)^-i >= (1 - delta)^2 2^k`.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::lower_bound::{amplified_lower_bound, repetitions, Profile, Prover, ProtocolParams};
use crate::sd::{check_delta, level_counts, level_threshold, quantization_levels, threshold_count, SdPair};
use crate::{rational, Error, Rational, Result};

/// Claim strategies. All but `Honest` try to make far samplers look close.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Claims {
    Honest,
    /// `N~_i = ceil(N_i / (1 - delta))`.
    InflateAll,
    /// Inflate level `j` only.
    InflateOne(usize),
    /// `N~_i = N_{i-1}`, `N~_0 = N_0`.
    ShiftLevels,
    /// `N~_i = N_0` for `i < keep`, then 0.
    ZeroOutTail { keep: usize },
    Custom(Vec<u64>),
}

impl Claims {
    /// The adversarial suite used by soundness tests.
    pub fn adversarial_suite(levels: usize) -> Vec<Claims> {
        let mut suite = alloc::vec![Claims::InflateAll, Claims::ShiftLevels];
        for j in [0, 1, 2, levels / 2] {
            suite.push(Claims::InflateOne(j));
        }
        for keep in [1, 2, 4, levels / 2, levels] {
            suite.push(Claims::ZeroOutTail { keep });
        }
        suite
    }

    /// Concrete claims `N~_0 .. N~_L` given the true counts `N_0 .. N_{L+1}`.
    pub fn resolve(&self, truth: &[u64], delta: &Rational) -> Vec<u64> {
        let levels = truth.len() - 1;
        let inflate = |n: u64| -> u64 {
            let v = (Rational::from_integer(BigInt::from(n)) / (Rational::one() - delta)).ceil().to_integer();
            u64::try_from(v).unwrap_or(u64::MAX)
        };
        match self {
            Claims::Honest => truth[..levels].to_vec(),
            Claims::InflateAll => truth[..levels].iter().map(|&n| inflate(n)).collect(),
            Claims::InflateOne(j) => {
                let mut c = truth[..levels].to_vec();
                if let Some(x) = c.get_mut(*j) {
                    *x = inflate(*x).max(*x + 1);
                }
                c
            }
            Claims::ShiftLevels => (0..levels).map(|i| truth[i.saturating_sub(1)]).collect(),
            Claims::ZeroOutTail { keep } => (0..levels).map(|i| if i < *keep { truth[0] } else { 0 }).collect(),
            Claims::Custom(c) => c.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoamConfig {
    pub delta: Rational,
    pub profile: Profile,
    /// Rounds per lower-bound majority vote; `None` picks the count that
    /// drives each certificate's error to `delta / (20 n)`.
    pub repetitions: Option<u64>,
}

impl CoamConfig {
    pub fn new(delta: Rational, profile: Profile) -> Self {
        Self { delta, profile, repetitions: None }
    }
}

/// Record of one execution.
#[derive(Clone, Debug, PartialEq)]
pub struct CoamTranscript {
    pub claims: Vec<u64>,
    /// `(level, threshold, claim, rounds accepted, rounds run, passed)` per
    /// certified level.
    pub certificates: Vec<(usize, u64, u64, u64, u64, bool)>,
    pub weighted_sum: Rational,
    pub threshold: Rational,
    pub malformed: bool,
    pub accept: bool,
}

/// `sum_{i=0}^{L} (c_i - c_{i+1})(1 - delta)^-i` with `c_{L+1} = 0`.
pub fn weighted_claim_sum(claims: &[u64], delta: &Rational) -> Rational {
    let step = Rational::one() / (Rational::one() - delta);
    let mut theta = Rational::one();
    let mut sum = Rational::zero();
    for (i, &c) in claims.iter().enumerate() {
        let next = claims.get(i + 1).copied().unwrap_or(0);
        sum += Rational::from_integer(BigInt::from(c) - BigInt::from(next)) * &theta;
        theta *= &step;
    }
    sum
}

pub fn coam_sd_round<R: Rng + ?Sized>(pair: &SdPair, config: &CoamConfig, claims: &Claims, rng: &mut R) -> Result<CoamTranscript> {
    let delta = &config.delta;
    check_delta(delta, &rational(1, 3))?;
    let levels = quantization_levels(pair.input_width(), delta);
    let truth = level_counts(pair, delta, levels);
    let claimed = claims.resolve(&truth, delta);
    let threshold = {
        let s = Rational::one() - delta;
        &s * &s * Rational::from_integer(BigInt::from(pair.domain()))
    };
    let mut tr = CoamTranscript {
        claims: claimed.clone(),
        certificates: Vec::new(),
        weighted_sum: Rational::zero(),
        threshold,
        malformed: false,
        accept: false,
    };
    if claimed.len() as u64 != levels + 1 || claimed.windows(2).any(|w| w[1] > w[0]) {
        tr.malformed = true;
        return Ok(tr);
    }
    let reps = config.repetitions.unwrap_or_else(|| repetitions(pair.output_width(), delta));
    let prover = if *claims == Claims::Honest { Prover::Honest } else { Prover::Greedy };
    let limit = pair.domain() + 1;
    for (i, &claim) in claimed.iter().enumerate() {
        if claim == 0 {
            continue;
        }
        let t = threshold_count(&level_threshold(i as u64, delta), limit);
        let params = ProtocolParams::standard(delta, claim, t, config.profile)?;
        let (passed, accepted) = amplified_lower_bound(pair, &params, prover, reps, rng);
        tr.certificates.push((i, t, claim, accepted, reps, passed));
        if !passed {
            return Ok(tr);
        }
    }
    tr.weighted_sum = weighted_claim_sum(&claimed, delta);
    tr.accept = tr.weighted_sum >= tr.threshold;
    Ok(tr)
}

/// Fraction helper for reports: accepted / total.
pub fn acceptance_rate(accepted: u64, total: u64) -> Result<f64> {
    if total == 0 {
        return Err(Error::InvalidParameter(format!("no rounds run ({accepted} accepted)")));
    }
    Ok(accepted as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::SamplerCircuit;
    use crate::sd::quantized_sandwich;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config(delta: Rational) -> CoamConfig {
        CoamConfig { delta, profile: Profile::Desk, repetitions: Some(3) }
    }

    #[test]
    fn identical_samplers_are_accepted() {
        let id = SamplerCircuit::identity(3);
        let pair = SdPair::new(&id, &id).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tr = coam_sd_round(&pair, &config(rational(1, 5)), &Claims::Honest, &mut rng).unwrap();
        assert!(tr.accept, "{tr:?}");
        // Left side equals the exact lower sandwich value.
        let s = quantized_sandwich(&pair, &rational(1, 5)).unwrap();
        assert_eq!(tr.weighted_sum, s.lower);
        assert!(tr.weighted_sum >= (Rational::one() - rational(1, 5)) * Rational::from_integer(8.into()));
    }

    #[test]
    fn far_samplers_resist_the_suite() {
        let id = SamplerCircuit::identity(3);
        let zero = SamplerCircuit::constant(3, 0);
        let pair = SdPair::new(&id, &zero).unwrap();
        let delta = rational(1, 5);
        let levels = quantization_levels(3, &delta) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut all = Claims::adversarial_suite(levels);
        all.push(Claims::Honest);
        for claims in all {
            let tr = coam_sd_round(&pair, &config(delta.clone()), &claims, &mut rng).unwrap();
            assert!(!tr.accept, "{claims:?} accepted");
        }
    }

    #[test]
    fn malformed_claims_are_rejected() {
        let id = SamplerCircuit::identity(2);
        let pair = SdPair::new(&id, &id).unwrap();
        let delta = rational(1, 3);
        let levels = quantization_levels(2, &delta) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut increasing = alloc::vec![0u64; levels + 1];
        increasing[levels] = 4;
        for claims in [Claims::Custom(increasing), Claims::Custom(alloc::vec![4])] {
            let tr = coam_sd_round(&pair, &config(delta.clone()), &claims, &mut rng).unwrap();
            assert!(tr.malformed && !tr.accept);
        }
    }

    #[test]
    fn claim_resolution() {
        let truth = [8, 4, 2, 0, 0];
        let d = rational(1, 2);
        assert_eq!(Claims::Honest.resolve(&truth, &d), [8, 4, 2, 0]);
        assert_eq!(Claims::InflateAll.resolve(&truth, &d), [16, 8, 4, 0]);
        assert_eq!(Claims::InflateOne(1).resolve(&truth, &d), [8, 8, 2, 0]);
        assert_eq!(Claims::ShiftLevels.resolve(&truth, &d), [8, 8, 4, 2]);
        assert_eq!(Claims::ZeroOutTail { keep: 2 }.resolve(&truth, &d), [8, 8, 0, 0]);
        assert_eq!(weighted_claim_sum(&[8, 4, 2, 0], &d), rational(4 + 2 * 2 + 2 * 4, 1));
    }
}
