use mixgap_core::chain::{evolve, stationary, to_matrix, Distribution, StateSpace, TransitionMatrix, Weights};
use mixgap_core::circuit::{ChainCircuit, GateList, SamplerCircuit};
use mixgap_core::coam::weighted_claim_sum;
use mixgap_core::matrix::Matrix;
use mixgap_core::mixing::{d_curve, d_of_t, max_row_distance, min_row_overlap, tv_distance};
use mixgap_core::reductions::{closed_form_distance, exact_decide, sd_to_chain, Decision, PromiseInstance};
use mixgap_core::sd::{profile_sum, quantized_sandwich, SdPair};
use mixgap_core::{rational, Rational, Scalar};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_chain(seed: u64) -> TransitionMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=3);
    let m = rng.random_range(1..=3);
    let gates = rng.random_range(2..10);
    let circuit = ChainCircuit::new(n, m, GateList::random(&mut rng, n + m, gates, n)).unwrap();
    to_matrix(&circuit, &StateSpace::full(n)).unwrap()
}

fn random_weighted(seed: u64) -> TransitionMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=6usize);
    let mut triples = Vec::new();
    for x in 0..n {
        triples.push((x, x, rational(rng.random_range(1..5), 1)));
        triples.push((x, (x + 1) % n, rational(rng.random_range(1..5), 1)));
        if rng.random_bool(0.3) {
            triples.push((x, rng.random_range(0..n), rational(1, 1)));
        }
    }
    let space = StateSpace::new(3, (0..n as u64).collect()).unwrap();
    TransitionMatrix::from_weights(space, Weights::new(n, triples).unwrap()).unwrap()
}

fn random_pair(seed: u64, width: usize) -> (SamplerCircuit, SamplerCircuit) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g1 = rng.random_range(0..8);
    let g2 = rng.random_range(0..8);
    (SamplerCircuit::random(&mut rng, width, g1), SamplerCircuit::random(&mut rng, width, g2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn powers_compose(seed in any::<u64>(), a in 0u64..6, b in 0u64..6) {
        let p = random_chain(seed).to_scalar::<Rational>();
        prop_assert_eq!(p.pow(a + b), p.pow(a).mul(&p.pow(b)));
    }

    #[test]
    fn rows_stay_stochastic(seed in any::<u64>(), t in 0u64..12) {
        let p = random_chain(seed).to_scalar::<Rational>().pow(t);
        for row in p.rows() {
            prop_assert_eq!(row.iter().sum::<Rational>(), rational(1, 1));
        }
    }

    #[test]
    fn distance_never_increases(seed in any::<u64>()) {
        let curve = d_curve::<Rational>(&random_chain(seed), 24);
        for w in curve.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn float_backend_tracks_rationals(seed in any::<u64>(), t in 0u64..20) {
        let p = random_weighted(seed);
        let exact = Scalar::to_f64(&d_of_t::<Rational>(&p, t));
        prop_assert!((d_of_t::<f64>(&p, t) - exact).abs() <= 1e-12);
        let overlap = min_row_overlap(&p.to_scalar::<f64>().pow(t)).0;
        prop_assert!((1.0 - overlap - exact).abs() <= 1e-12);
    }

    #[test]
    fn tv_is_a_metric(seed in any::<u64>()) {
        let p = random_chain(seed).to_scalar::<Rational>().pow(2);
        let n = p.dim();
        for x in 0..n {
            prop_assert_eq!(tv_distance(p.row(x), p.row(x)).unwrap(), rational(0, 1));
            for y in 0..n {
                let dxy = tv_distance(p.row(x), p.row(y)).unwrap();
                prop_assert_eq!(&dxy, &tv_distance(p.row(y), p.row(x)).unwrap());
                prop_assert!(dxy <= rational(1, 1));
                for z in 0..n {
                    let via = tv_distance(p.row(x), p.row(z)).unwrap() + tv_distance(p.row(z), p.row(y)).unwrap();
                    prop_assert!(dxy <= via);
                }
            }
        }
    }

    #[test]
    fn stationary_is_invariant(seed in any::<u64>()) {
        let p = random_weighted(seed);
        let pi = stationary::<Rational>(&p).unwrap();
        prop_assert_eq!(evolve(&p, &pi, 1).unwrap(), pi);
    }

    #[test]
    fn identity_never_mixes(n in 1usize..4, t in 0u64..10) {
        let p = to_matrix(&ChainCircuit::identity(n, 2), &StateSpace::full(n)).unwrap();
        prop_assert_eq!(d_of_t::<Rational>(&p, t), rational(1, 1));
    }

    #[test]
    fn profile_identity_holds(seed in any::<u64>(), width in 1usize..=4) {
        let (c, c2) = random_pair(seed, width);
        let pair = SdPair::new(&c, &c2).unwrap();
        let lhs = Rational::from_integer(BigInt::from(profile_sum(&pair)));
        let rhs = (rational(1, 1) - pair.tv()) * BigInt::from(1u64 << width);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sandwich_brackets_the_overlap(seed in any::<u64>(), width in 1usize..=4, k in 0usize..3) {
        let delta = [rational(1, 3), rational(1, 5), rational(1, 10)][k].clone();
        let (c, c2) = random_pair(seed, width);
        let pair = SdPair::new(&c, &c2).unwrap();
        let s = quantized_sandwich(&pair, &delta).unwrap();
        let mid = (rational(1, 1) - pair.tv()) * BigInt::from(1u64 << width);
        prop_assert!(s.lower <= mid && mid <= s.upper);
        prop_assert_eq!(weighted_claim_sum(&s.counts[..s.counts.len() - 1], &delta), s.lower);
    }

    #[test]
    fn sampler_chain_follows_closed_form(seed in any::<u64>(), m in 3u64..=6, t in 1u64..8) {
        let (c, c2) = random_pair(seed, 2);
        let delta = SdPair::new(&c, &c2).unwrap().tv();
        let inst = sd_to_chain(&c, &c2, m, 1, Some(m), rational(1, 1), rational(0, 1)).unwrap();
        let p = inst.matrix().unwrap();
        let pi = stationary::<Rational>(&p).unwrap();
        let row = evolve(&p, &Distribution::point(p.len(), 0), t).unwrap();
        prop_assert_eq!(tv_distance(row.mass(), pi.mass()).unwrap(), closed_form_distance(m, t, &delta).unwrap());
    }

    #[test]
    fn decisions_are_stable_under_tiny_delta_shifts(seed in any::<u64>(), t in 1u64..6, base in 1i64..24) {
        let p = random_weighted(seed);
        let shift = rational(1, 1_000_000_000);
        let delta = rational(base, 100);
        let mut seen = Vec::new();
        for d in [&delta - &shift, delta.clone(), &delta + &shift] {
            let inst = PromiseInstance::new(
                mixgap_core::reductions::Kind::Gptc,
                mixgap_core::reductions::ChainSpec::Matrix(p.clone()),
                0, t, Some(1000), rational(1, 1), d,
            ).unwrap();
            seen.push(exact_decide(&inst).unwrap().decision);
        }
        prop_assert!(!(seen.contains(&Decision::Yes) && seen.contains(&Decision::No)), "{:?}", seen);
    }
}

#[test]
fn worst_pair_ties_go_to_the_smallest_pair() {
    let m = Matrix::<Rational>::identity(3);
    let (d, x, y) = max_row_distance(&m);
    assert_eq!((d, x, y), (rational(1, 1), 0, 1));
}
