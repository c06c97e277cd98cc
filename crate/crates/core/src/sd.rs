//! Statistical distance between sampler circuits: the preimage profile
//! `N(t)`, its quantized form, the two-message distinguishing protocol and
//! XOR amplification.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

use crate::chain::Distribution;
use crate::circuit::{CircuitBuilder, SamplerCircuit, SamplerTable, Wire, MAX_WIDTH};
use crate::{rational, Error, Rational, Result};

/// Exact `p(w) = |C^{-1}(w)| / 2^k` over all `2^n` outputs.
pub fn circuit_distribution(c: &SamplerCircuit) -> Result<Distribution<Rational>> {
    let n = c.output_width();
    if n > crate::circuit::ENUMERATION_CAP {
        return Err(Error::ResourceCap { what: "sampler output width", limit: crate::circuit::ENUMERATION_CAP as u64, got: n as u64 });
    }
    let table = SamplerTable::build(c)?;
    let den = BigInt::one() << table.input_width();
    let mut mass = alloc::vec![Rational::zero(); 1usize << n];
    for (w, count) in table.counts() {
        mass[w as usize] = Rational::new(BigInt::from(count), den.clone());
    }
    Ok(Distribution::from_vec_unchecked(mass))
}

/// Two samplers over the same input and output widths, fully tabulated.
#[derive(Clone, Debug)]
pub struct SdPair {
    left: SamplerTable,
    right: SamplerTable,
    /// `f(w) = min(|C^{-1}(w)|, |C'^{-1}(w)|)`, nonzero entries only.
    overlap: BTreeMap<u64, u64>,
}

impl SdPair {
    pub fn new(c: &SamplerCircuit, c_prime: &SamplerCircuit) -> Result<Self> {
        if c.input_width() != c_prime.input_width() {
            return Err(Error::WidthMismatch { expected: c.input_width(), got: c_prime.input_width() });
        }
        if c.output_width() != c_prime.output_width() {
            return Err(Error::WidthMismatch { expected: c.output_width(), got: c_prime.output_width() });
        }
        let left = SamplerTable::build(c)?;
        let right = SamplerTable::build(c_prime)?;
        let overlap = left
            .counts()
            .filter_map(|(w, a)| {
                let b = right.preimage_count(w);
                (b > 0).then_some((w, a.min(b)))
            })
            .collect();
        Ok(Self { left, right, overlap })
    }

    pub fn left(&self) -> &SamplerTable {
        &self.left
    }

    pub fn right(&self) -> &SamplerTable {
        &self.right
    }

    /// `k`: both samplers read `k` uniform bits.
    pub fn input_width(&self) -> usize {
        self.left.input_width()
    }

    pub fn output_width(&self) -> usize {
        self.left.output_width()
    }

    pub fn domain(&self) -> u64 {
        1u64 << self.input_width()
    }

    /// Outputs hit by either sampler, ascending.
    pub fn support(&self) -> BTreeSet<u64> {
        self.left.counts().chain(self.right.counts()).map(|(w, _)| w).collect()
    }

    pub fn overlap(&self) -> &BTreeMap<u64, u64> {
        &self.overlap
    }

    /// Direct `d_tv(p, p')` from the two count tables.
    pub fn tv(&self) -> Rational {
        let mut diff = 0u64;
        for w in self.support() {
            diff += self.left.preimage_count(w).abs_diff(self.right.preimage_count(w));
        }
        Rational::new(BigInt::from(diff), BigInt::from(2u64) * BigInt::from(self.domain()))
    }

    pub fn p(&self, w: u64) -> Rational {
        Rational::new(BigInt::from(self.left.preimage_count(w)), BigInt::from(self.domain()))
    }

    pub fn p_prime(&self, w: u64) -> Rational {
        Rational::new(BigInt::from(self.right.preimage_count(w)), BigInt::from(self.domain()))
    }
}

/// `N(t) = #{w : |C^{-1}(w)| >= t and |C'^{-1}(w)| >= t}`.
pub fn preimage_profile(pair: &SdPair, t: u64) -> u64 {
    pair.overlap.values().filter(|&&f| f >= t).count() as u64
}

/// `N(1), ..., N(2^k + 1)` (the last entry is always 0).
pub fn profile_table(pair: &SdPair) -> Vec<u64> {
    let top = pair.domain() as usize + 1;
    let mut hist = alloc::vec![0u64; top + 1];
    for &f in pair.overlap.values() {
        hist[f as usize] += 1;
    }
    let mut table = alloc::vec![0u64; top];
    let mut running = 0;
    for t in (1..=top).rev() {
        running += hist[t];
        table[t - 1] = running;
    }
    table
}

/// `sum_{t=1}^{2^k} t (N(t) - N(t+1))`.
pub fn profile_sum(pair: &SdPair) -> u128 {
    let table = profile_table(pair);
    table.windows(2).enumerate().map(|(i, w)| (i as u128 + 1) * u128::from(w[0] - w[1])).sum()
}

/// `1 - 2^-k * sum_t t (N(t) - N(t+1))`.
pub fn distance_via_profile(pair: &SdPair) -> Rational {
    let sum = BigInt::from(profile_sum(pair));
    Rational::one() - Rational::new(sum, BigInt::from(pair.domain()))
}

/// Number of quantization levels: `ceil(e n / delta)`.
pub fn quantization_levels(n: usize, delta: &Rational) -> u64 {
    let d = crate::Scalar::to_f64(delta);
    libm::ceil(core::f64::consts::E * n as f64 / d) as u64
}

/// `(1 - delta)^-i`.
pub fn level_threshold(i: u64, delta: &Rational) -> Rational {
    let base = Rational::one() / (Rational::one() - delta);
    num_traits::pow(base, i as usize)
}

/// A threshold rounded up to a preimage count, saturating past `limit`.
pub fn threshold_count(theta: &Rational, limit: u64) -> u64 {
    let c = theta.ceil().to_integer();
    if c > BigInt::from(limit) {
        limit
    } else {
        u64::try_from(c).unwrap_or(limit)
    }
}

/// Both sides of the quantized identity together with the levels used.
#[derive(Clone, Debug, PartialEq)]
pub struct Sandwich {
    pub lower: Rational,
    pub upper: Rational,
    /// `N_i = N(ceil((1 - delta)^-i))` for `i = 0..=levels + 1`.
    pub counts: Vec<u64>,
    pub levels: u64,
}

pub(crate) fn check_delta(delta: &Rational, max: &Rational) -> Result<()> {
    if *delta <= Rational::zero() || delta > max {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, {max}]")));
    }
    Ok(())
}

/// Level counts `N_0 .. N_{levels+1}` for a pair.
pub fn level_counts(pair: &SdPair, delta: &Rational, levels: u64) -> Vec<u64> {
    let limit = pair.domain() + 1;
    (0..=levels + 1)
        .map(|i| preimage_profile(pair, threshold_count(&level_threshold(i, delta), limit)))
        .collect()
}

/// `sum_i (N_i - N_{i+1})(1-delta)^-i <= (1 - d_tv) 2^k <= sum_i (N_i - N_{i+1})(1-delta)^-(i+1)`,
/// summed over `i = 0..=ceil(e k / delta)`.
pub fn quantized_sandwich(pair: &SdPair, delta: &Rational) -> Result<Sandwich> {
    check_delta(delta, &rational(1, 3))?;
    let levels = quantization_levels(pair.input_width(), delta);
    let counts = level_counts(pair, delta, levels);
    let mut lower = Rational::zero();
    let mut upper = Rational::zero();
    let mut theta = Rational::one();
    let step = Rational::one() / (Rational::one() - delta);
    for i in 0..=levels as usize {
        let next = &theta * &step;
        let gap = Rational::from_integer(BigInt::from(counts[i] - counts[i + 1]));
        lower += &gap * &theta;
        upper += &gap * &next;
        theta = next;
    }
    Ok(Sandwich { lower, upper, counts, levels })
}

/// The prover's answer in the distinguishing game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// "The sample came from `C`."
    First,
    /// "The sample came from `C'`."
    Second,
}

/// `C` if `p(x) > p'(x)`, `C'` otherwise.
pub fn honest_label(pair: &SdPair, x: u64) -> Label {
    if pair.left.preimage_count(x) > pair.right.preimage_count(x) {
        Label::First
    } else {
        Label::Second
    }
}

/// Exact acceptance of a labeling strategy:
/// `1/2 (sum_{s(x)=C} p(x) + sum_{s(x)=C'} p'(x))`.
pub fn am_acceptance(pair: &SdPair, strategy: impl Fn(u64) -> Label) -> Rational {
    let mut hits = 0u64;
    for x in pair.support() {
        hits += match strategy(x) {
            Label::First => pair.left.preimage_count(x),
            Label::Second => pair.right.preimage_count(x),
        };
    }
    Rational::new(BigInt::from(hits), BigInt::from(2u64) * BigInt::from(pair.domain()))
}

/// Acceptance of the honest prover, which equals `1/2 + d_tv / 2`.
pub fn honest_am_acceptance(pair: &SdPair) -> Rational {
    am_acceptance(pair, |x| honest_label(pair, x))
}

/// Best acceptance over every labeling of `{0,1}^n`, found by enumeration.
pub fn best_am_acceptance(pair: &SdPair) -> Result<Rational> {
    let n = pair.output_width();
    if n > 4 {
        return Err(Error::ResourceCap { what: "output width for strategy enumeration", limit: 4, got: n as u64 });
    }
    let outputs = 1u64 << n;
    let mut best = Rational::zero();
    for labels in 0..1u64 << outputs {
        let acc = am_acceptance(pair, |x| if labels >> x & 1 == 1 { Label::Second } else { Label::First });
        if acc > best {
            best = acc;
        }
    }
    Ok(best)
}

/// One execution of the distinguishing game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmTranscript {
    /// Verifier's coin: `false` samples from `C`, `true` from `C'`.
    pub coin: bool,
    pub input: u64,
    pub sample: u64,
    pub label: Label,
    pub accept: bool,
}

pub fn am_sd_round<R: Rng + ?Sized>(pair: &SdPair, strategy: impl Fn(u64) -> Label, rng: &mut R) -> AmTranscript {
    let coin: bool = rng.random();
    let input = rng.random::<u64>() & (pair.domain() - 1);
    let sample = if coin { pair.right.output(input) } else { pair.left.output(input) };
    let label = strategy(sample);
    let accept = label == if coin { Label::Second } else { Label::First };
    AmTranscript { coin, input, sample, label, accept }
}

/// XOR amplification: both outputs are `k` samples, sample `i` from
/// `C_{b_i}`, with `b_1 .. b_k` uniform subject to `b_1 xor .. xor b_k = sigma`
/// (`sigma = 0` for the first circuit, `1` for the second). The distance
/// becomes exactly `d_tv^k`.
///
/// Input layout: `k` blocks of the original input, then `b_1 .. b_{k-1}`.
pub fn amplify_distance(c: &SamplerCircuit, c_prime: &SamplerCircuit, k: usize) -> Result<(SamplerCircuit, SamplerCircuit)> {
    if k == 0 {
        return Err(Error::InvalidParameter("amplification power must be at least 1".into()));
    }
    if c.input_width() != c_prime.input_width() || c.output_width() != c_prime.output_width() {
        return Err(Error::WidthMismatch { expected: c.input_width(), got: c_prime.input_width() });
    }
    let (w, n) = (c.input_width(), c.output_width());
    let inputs = k * w + k - 1;
    if inputs > MAX_WIDTH || k * n > MAX_WIDTH {
        return Err(Error::ResourceCap { what: "amplified circuit width", limit: MAX_WIDTH as u64, got: inputs.max(k * n) as u64 });
    }
    let build = |sigma: bool| -> Result<SamplerCircuit> {
        let mut b = CircuitBuilder::new(inputs);
        let mut selectors: Vec<Wire> = (0..k - 1).map(|i| b.input(k * w + i)).collect();
        let mut parity = b.constant(sigma);
        for &s in &selectors {
            parity = b.xor(parity, s);
        }
        selectors.push(parity);
        let mut outputs = Vec::with_capacity(k * n);
        for (i, &sel) in selectors.iter().enumerate() {
            let block: Vec<Wire> = (0..w).map(|j| b.input(i * w + j)).collect();
            let first = b.inline(c.gate_list(), &block);
            let second = b.inline(c_prime.gate_list(), &block);
            for (&x, &y) in first.iter().zip(&second) {
                outputs.push(b.mux(sel, x, y));
            }
        }
        Ok(SamplerCircuit::new(b.finish(outputs)?))
    };
    Ok((build(false)?, build(true)?))
}

/// Least `k` with `(c/s)^k > 3`; `s = 0` needs only `k = 1`.
pub fn xor_amplification_power(c: &Rational, s: &Rational) -> Result<u32> {
    if *s < Rational::zero() || c <= s || *c > Rational::one() {
        return Err(Error::InvalidParameter(format!("need 0 <= s < c <= 1, got c = {c}, s = {s}")));
    }
    if s.is_zero() {
        return Ok(1);
    }
    let ratio = c / s;
    let three = rational(3, 1);
    let mut power = ratio.clone();
    let mut k = 1;
    while power <= three {
        power *= &ratio;
        k += 1;
    }
    Ok(k)
}

/// `gcd`-reduced `count / 2^k` helper used by reports.
pub fn dyadic(count: u64, bits: usize) -> Rational {
    let den = BigInt::one() << bits;
    let num = BigInt::from(count);
    let g = num.gcd(&den);
    Rational::new_raw(num / &g, den / g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, GateList};
    use crate::mixing::tv_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Values 0 and 1 map to 0; 2 and 3 are fixed.
    fn merge_low() -> SamplerCircuit {
        let g = GateList::new(2, alloc::vec![Gate::And(0, 1)], alloc::vec![2, 1]).unwrap();
        SamplerCircuit::new(g)
    }

    #[test]
    fn distribution_examples() {
        let id = circuit_distribution(&SamplerCircuit::identity(2)).unwrap();
        assert!(id.mass().iter().all(|p| *p == rational(1, 4)));
        let zero = circuit_distribution(&SamplerCircuit::constant(2, 0)).unwrap();
        assert_eq!(zero.mass(), &[rational(1, 1), rational(0, 1), rational(0, 1), rational(0, 1)]);
        let m = circuit_distribution(&merge_low()).unwrap();
        assert_eq!(m.mass(), &[rational(1, 2), rational(0, 1), rational(1, 4), rational(1, 4)]);
    }

    #[test]
    fn profile_examples() {
        let id = SamplerCircuit::identity(2);
        let zero = SamplerCircuit::constant(2, 0);
        let same = SdPair::new(&id, &id).unwrap();
        assert_eq!(preimage_profile(&same, 1), 4);
        assert_eq!(preimage_profile(&same, 2), 0);
        assert_eq!(profile_sum(&same), 4);
        assert_eq!(distance_via_profile(&same), rational(0, 1));

        let mixed = SdPair::new(&id, &zero).unwrap();
        assert_eq!(preimage_profile(&mixed, 1), 1);
        assert_eq!(profile_sum(&mixed), 1);
        assert_eq!(distance_via_profile(&mixed), rational(3, 4));
        assert_eq!(mixed.tv(), rational(3, 4));
    }

    #[test]
    fn sandwich_examples() {
        let id = SamplerCircuit::identity(2);
        let zero = SamplerCircuit::constant(2, 0);
        let mixed = SdPair::new(&id, &zero).unwrap();
        let s = quantized_sandwich(&mixed, &rational(1, 3)).unwrap();
        assert!(s.lower <= rational(1, 1) && rational(1, 1) <= s.upper);
        let same = SdPair::new(&id, &id).unwrap();
        let s = quantized_sandwich(&same, &rational(1, 5)).unwrap();
        assert!(s.lower <= rational(4, 1) && rational(4, 1) <= s.upper);
        assert!(quantized_sandwich(&same, &rational(1, 2)).is_err());
        assert_eq!(*s.counts.last().unwrap(), 0);
    }

    #[test]
    fn honest_acceptance_is_half_plus_half_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let a = SamplerCircuit::random(&mut rng, 3, 6);
            let b = SamplerCircuit::random(&mut rng, 3, 6);
            let pair = SdPair::new(&a, &b).unwrap();
            let honest = honest_am_acceptance(&pair);
            assert_eq!(honest, rational(1, 2) + pair.tv() / rational(2, 1));
            assert_eq!(best_am_acceptance(&pair).unwrap(), honest);
        }
    }

    #[test]
    fn identical_samplers_give_a_fair_game() {
        let id = SamplerCircuit::identity(2);
        let pair = SdPair::new(&id, &id).unwrap();
        for labels in 0..16u64 {
            let acc = am_acceptance(&pair, |x| if labels >> x & 1 == 1 { Label::Second } else { Label::First });
            assert_eq!(acc, rational(1, 2));
        }
    }

    #[test]
    fn round_transcript_is_consistent() {
        let pair = SdPair::new(&SamplerCircuit::identity(2), &SamplerCircuit::constant(2, 0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let tr = am_sd_round(&pair, |x| honest_label(&pair, x), &mut rng);
            let expected = if tr.coin { pair.right().output(tr.input) } else { pair.left().output(tr.input) };
            assert_eq!(tr.sample, expected);
            assert_eq!(tr.accept, (tr.label == Label::Second) == tr.coin);
        }
    }

    #[test]
    fn amplification_examples() {
        let id = SamplerCircuit::identity(2);
        let zero = SamplerCircuit::constant(2, 0);
        for (k, expect) in [(1, rational(3, 4)), (2, rational(9, 16)), (3, rational(27, 64))] {
            let (a, b) = amplify_distance(&id, &zero, k).unwrap();
            let pa = circuit_distribution(&a).unwrap();
            let pb = circuit_distribution(&b).unwrap();
            assert_eq!(tv_distance(pa.mass(), pb.mass()).unwrap(), expect, "k = {k}");
        }
        // Disjoint supports stay disjoint.
        let one = SamplerCircuit::constant(2, 3);
        let (a, b) = amplify_distance(&zero, &one, 2).unwrap();
        assert_eq!(SdPair::new(&a, &b).unwrap().tv(), rational(1, 1));
    }

    #[test]
    fn amplification_power_examples() {
        assert_eq!(xor_amplification_power(&rational(1, 2), &rational(1, 4)).unwrap(), 2);
        assert_eq!(xor_amplification_power(&rational(3, 4), &rational(1, 4)).unwrap(), 2);
        assert_eq!(xor_amplification_power(&rational(1, 1), &rational(0, 1)).unwrap(), 1);
        assert_eq!(xor_amplification_power(&rational(9, 10), &rational(1, 2)).unwrap(), 2);
        assert!(xor_amplification_power(&rational(1, 4), &rational(1, 2)).is_err());
    }

    #[test]
    fn level_thresholds_round_up() {
        let d = rational(1, 3);
        assert_eq!(threshold_count(&level_threshold(0, &d), 100), 1);
        assert_eq!(threshold_count(&level_threshold(1, &d), 100), 2);
        assert_eq!(threshold_count(&level_threshold(2, &d), 100), 3);
        assert_eq!(threshold_count(&level_threshold(3, &d), 100), 4);
        assert_eq!(quantization_levels(2, &d), 17);
        assert_eq!(dyadic(2, 3), rational(1, 4));
    }
}
