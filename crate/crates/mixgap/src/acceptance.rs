//! The twelve acceptance criteria as one battery, shared by
//! `mixgap suite acceptance` and the `acceptance` test target.
//!
//! Every criterion draws its randomness from `ChaCha8Rng::seed_from_u64(seed)`
//! on stream `id`, so a run is reproducible from the seed alone.

use std::time::Instant;

use mixgap_core::chain::{evolve, stationary, to_matrix, Distribution, StateSpace, TransitionMatrix, Trajectory, Weights};
use mixgap_core::circuit::{ChainCircuit, Gate, GateList, SamplerCircuit};
use mixgap_core::dyadic::DyadicChain;
use mixgap_core::estimator::{bits_for, simulate_frequencies, EstimatorConfig, Stepper};
use mixgap_core::lower_bound::{is_no, is_yes, lower_bound_round, Profile, Prover, ProtocolParams};
use mixgap_core::matrix::{Matrix, PowerLadder};
use mixgap_core::mixing::{conductance, d_curve, d_of_t, min_row_overlap, tau, tau_from, tv_distance};
use mixgap_core::reductions::{
    closed_form_distance, exact_decide, gptcs_to_sd, sd_to_chain, szk_condition, tm_to_chain, unsat_to_chain, unsat_yes_time,
    CnfFormula, Decision, ToyMachine,
};
use mixgap_core::sd::{
    am_sd_round, amplify_distance, best_am_acceptance, distance_via_profile, honest_am_acceptance, honest_label, profile_sum,
    quantized_sandwich, SdPair,
};
use mixgap_core::{rational, Error, Rational, Result, Scalar};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::io::format_decimal;

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "preimage-profile identity"),
    (2, "quantized sandwich"),
    (3, "distinguishing-game acceptance"),
    (4, "sampler chain closed form"),
    (5, "unsatisfiability gadget"),
    (6, "space-bounded machine gadget"),
    (7, "conductance bound"),
    (8, "monotone distance"),
    (9, "sampling estimator"),
    (10, "set lower-bound protocol"),
    (11, "xor amplification"),
    (12, "convergence to statistical distance"),
];

/// Failures tagged with this prefix come from the literal `1/2 + d_tv`
/// acceptance target of criterion 3, which the distinguishing game cannot
/// meet: its honest acceptance is `1/2 + d_tv/2`.
pub const LITERAL_TAG: &str = "literal 1/2 + d_tv";

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub checks: u64,
    pub failures: Vec<String>,
    pub note: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!(
            "criterion {}: {verdict} {} ({} checks, {} failed, {:.2}s)",
            self.id,
            self.name,
            self.checks,
            self.failures.len(),
            self.seconds
        );
        if !self.note.is_empty() {
            s.push_str(&format!("; {}", self.note));
        }
        if let Some(first) = self.failures.first() {
            s.push_str(&format!("; first failure: {first}"));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "pass": self.pass,
            "checks": self.checks,
            "failures": self.failures.iter().take(20).collect::<Vec<_>>(),
            "failure_count": self.failures.len(),
            "note": self.note,
            "seconds": format_decimal(self.seconds),
        })
    }
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Runs the selected criteria (all when `only` is empty), calling `on`
/// after each one.
pub fn run(seed: u64, only: &[u32], mut on: impl FnMut(&Outcome)) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter(|(id, _)| only.is_empty() || only.contains(id))
        .map(|&(id, _)| {
            let o = criterion(id, seed);
            on(&o);
            o
        })
        .collect()
}

pub fn criterion(id: u32, seed: u64) -> Outcome {
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown");
    let start = Instant::now();
    let mut tally = Tally::default();
    let result = match id {
        1 => c1(seed, &mut tally),
        2 => c2(seed, &mut tally),
        3 => c3(seed, &mut tally),
        4 => c4(seed, &mut tally),
        5 => c5(seed, &mut tally),
        6 => c6(&mut tally),
        7 => c7(seed, &mut tally),
        8 => c8(seed, &mut tally),
        9 => c9(seed, &mut tally),
        10 => c10(seed, &mut tally),
        11 => c11(seed, &mut tally),
        12 => c12(seed, &mut tally),
        _ => Err(Error::InvalidParameter(format!("no criterion {id}"))),
    };
    let seconds = start.elapsed().as_secs_f64();
    let note = match result {
        Ok(note) => note,
        Err(e) => {
            tally.failures.push(format!("error: {e}"));
            String::new()
        }
    };
    let mut out = Outcome { id, name, pass: false, checks: tally.checks, failures: tally.failures, note, seconds };
    let limit = match id {
        1 => Some(60.0),
        9 => Some(300.0),
        _ => None,
    };
    if let Some(limit) = limit {
        out.checks += 1;
        if seconds >= limit {
            out.failures.push(format!("runtime {seconds:.1}s exceeds {limit}s"));
        }
    }
    out.pass = out.failures.is_empty();
    out
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn q(v: &Rational) -> String {
    v.to_string()
}

// ---------------------------------------------------------------------------
// Sampler corpora

fn random_pair(rng: &mut ChaCha8Rng, width: usize) -> (SamplerCircuit, SamplerCircuit) {
    let g1 = rng.random_range(0..10);
    let g2 = rng.random_range(0..10);
    (SamplerCircuit::random(rng, width, g1), SamplerCircuit::random(rng, width, g2))
}

/// Identical, disjoint and constant pairs.
fn edge_pairs() -> Vec<(SamplerCircuit, SamplerCircuit)> {
    let id = SamplerCircuit::identity;
    let k = SamplerCircuit::constant;
    vec![
        (id(1), id(1)),
        (id(3), id(3)),
        (id(4), id(4)),
        (k(1, 0), k(1, 1)),
        (k(2, 0), k(2, 3)),
        (k(4, 5), k(4, 10)),
        (k(2, 1), k(2, 1)),
        (k(3, 0), k(3, 0)),
        (id(2), k(2, 3)),
        (id(4), k(4, 0)),
    ]
}

/// 100 random pairs with `n <= 4` followed by the edge cases.
fn sampler_corpus(seed: u64, stream: u64) -> Vec<(SamplerCircuit, SamplerCircuit)> {
    let mut rng = rng_for(seed, stream);
    let mut pairs: Vec<_> = (0..100).map(|i| random_pair(&mut rng, 1 + i % 4)).collect();
    pairs.extend(edge_pairs());
    pairs
}

// ---------------------------------------------------------------------------
// 1-3: statistical distance identities and the distinguishing game

fn c1(seed: u64, tally: &mut Tally) -> Result<String> {
    for (i, (c, c2)) in sampler_corpus(seed, 100).iter().enumerate() {
        let pair = SdPair::new(c, c2)?;
        let d = pair.tv();
        let lhs = Rational::from_integer(BigInt::from(profile_sum(&pair)));
        let rhs = (rational(1, 1) - &d) * BigInt::from(pair.domain());
        tally.check(lhs == rhs, || format!("pair {i}: sum_t N(t) = {} but (1 - d_tv) 2^n = {}", q(&lhs), q(&rhs)));
        let via = distance_via_profile(&pair);
        tally.check(via == d, || format!("pair {i}: profile distance {} vs d_tv {}", q(&via), q(&d)));
    }
    Ok("110 pairs, rational arithmetic".into())
}

fn c2(seed: u64, tally: &mut Tally) -> Result<String> {
    let deltas = [rational(1, 3), rational(1, 5), rational(1, 10)];
    for (i, (c, c2)) in sampler_corpus(seed, 100).iter().enumerate() {
        let pair = SdPair::new(c, c2)?;
        let mid = (rational(1, 1) - pair.tv()) * BigInt::from(pair.domain());
        for delta in &deltas {
            let s = quantized_sandwich(&pair, delta)?;
            tally.check(s.lower <= mid && mid <= s.upper, || {
                format!("pair {i}, delta {}: {} <= {} <= {} fails", q(delta), q(&s.lower), q(&mid), q(&s.upper))
            });
        }
    }
    Ok("110 pairs x 3 deltas".into())
}

fn c3(seed: u64, tally: &mut Tally) -> Result<String> {
    const ROUNDS: u64 = 100_000;
    let half = rational(1, 2);
    let mut literal_hits = 0;
    let mut small = 0;
    let corpus = sampler_corpus(seed, 100);
    for (i, (c, c2)) in corpus.iter().enumerate() {
        let pair = SdPair::new(c, c2)?;
        let d = pair.tv();
        let honest = honest_am_acceptance(&pair);
        let game_value = &half + &d / BigInt::from(2);
        tally.check(honest == game_value, || format!("pair {i}: honest {} vs 1/2 + d_tv/2 = {}", q(&honest), q(&game_value)));
        let literal = &half + &d;
        if honest == literal {
            literal_hits += 1;
        }
        tally.check(honest == literal, || format!("{LITERAL_TAG}: pair {i}: honest {} vs {}", q(&honest), q(&literal)));
        if pair.output_width() <= 3 {
            small += 1;
            let best = best_am_acceptance(&pair)?;
            tally.check(best <= honest, || format!("pair {i}: a labeling reaches {} above honest {}", q(&best), q(&honest)));
        }
    }
    let mut mc = 0;
    for (i, (c, c2)) in corpus.iter().enumerate() {
        let pair = SdPair::new(c, c2)?;
        let d = pair.tv();
        if d == rational(0, 1) || d == rational(1, 1) || mc == 3 {
            continue;
        }
        mc += 1;
        let exact = honest_am_acceptance(&pair).to_f64();
        let mut rng = rng_for(seed, 300 + i as u64);
        let hits = (0..ROUNDS).filter(|_| am_sd_round(&pair, |x| honest_label(&pair, x), &mut rng).accept).count();
        let freq = hits as f64 / ROUNDS as f64;
        let sigma = (exact * (1.0 - exact) / ROUNDS as f64).sqrt();
        tally.check((freq - exact).abs() <= 4.0 * sigma, || {
            format!("pair {i}: {ROUNDS} rounds accept {freq} vs exact {exact} (4 sigma = {})", 4.0 * sigma)
        });
    }
    Ok(format!(
        "honest = 1/2 + d_tv/2 on all {} pairs; literal 1/2 + d_tv holds on {literal_hits} (those with d_tv = 0); \
         {small} pairs brute-forced; {mc} pairs simulated",
        corpus.len()
    ))
}

// ---------------------------------------------------------------------------
// 4: sampler chain

fn c4(seed: u64, tally: &mut Tally) -> Result<String> {
    let mut rng = rng_for(seed, 4);
    let pairs: Vec<_> = (0..20).map(|i| random_pair(&mut rng, 1 + i % 2)).collect();
    let quarter = rational(1, 4);
    for (i, (c, c2)) in pairs.iter().enumerate() {
        let delta = SdPair::new(c, c2)?.tv();
        for m in 3..=8u64 {
            let inst = sd_to_chain(c, c2, m, 1, Some(m), rational(1, 1), rational(0, 1))?;
            let p = inst.matrix()?;
            let pi = stationary::<Rational>(&p)?;
            let pi_f = stationary::<f64>(&p)?;
            let mut row = Distribution::<Rational>::point(p.len(), inst.x);
            let mut row_f = Distribution::<f64>::point(p.len(), inst.x);
            for t in 1..=20u64 {
                row = evolve(&p, &row, 1)?;
                row_f = evolve(&p, &row_f, 1)?;
                let want = closed_form_distance(m, t, &delta)?;
                let got = tv_distance(row.mass(), pi.mass())?;
                tally.check(got == want, || format!("pair {i}, m {m}, t {t}: distance {} vs {}", q(&got), q(&want)));
                let got_f = tv_distance(row_f.mass(), pi_f.mass())?;
                let err = (got_f - want.to_f64()).abs();
                tally.check(err <= 1e-12, || format!("pair {i}, m {m}, t {t}: float error {err:e}"));
            }
            let mixed = tau::<Rational>(&p, &quarter, m);
            tally.check(mixed.is_ok(), || format!("pair {i}, m {m}: tau(1/4) > m ({mixed:?})"));
        }
    }
    Ok("20 pairs x m 3..8 x t 1..20".into())
}

// ---------------------------------------------------------------------------
// 5: unsatisfiability gadget

fn formulas(rng: &mut ChaCha8Rng, want_sat: bool) -> Vec<CnfFormula> {
    (0..20)
        .map(|i| {
            let n = 4 + i % 5;
            let clauses = if want_sat { n } else { 10 * n };
            loop {
                let f = CnfFormula::random(rng, n, clauses, 3);
                if f.satisfying().is_empty() != want_sat {
                    break f;
                }
            }
        })
        .collect()
}

/// `d(t)` is computed exactly while the chain has at most this many states.
const C5_EXACT_STATES: usize = 32;

fn c5(seed: u64, tally: &mut Tally) -> Result<String> {
    let mut rng = rng_for(seed, 5);
    let delta = rational(1, 10);
    let low = rational(1, 4) - &delta;
    let unsat = formulas(&mut rng, false);
    let sat = formulas(&mut rng, true);
    for (i, f) in unsat.iter().enumerate() {
        let n = f.vars();
        let bound = unsat_yes_time(n, &delta);
        let nf = n as f64;
        let formula = (nf * (nf.ln() + (4.0 / (1.0 - 4.0 * delta.to_f64())).ln())).ceil() as u64;
        tally.check(bound == formula.max(1), || format!("yes time {bound} vs formula {formula}"));
        for d in [2u32, 3] {
            let p = unsat_to_chain(f, d, delta.clone(), rational(1, 1))?.matrix()?;
            let mixed = if p.len() <= C5_EXACT_STATES {
                tau::<Rational>(&p, &low, bound)
            } else {
                tau::<f64>(&p, &low.to_f64(), bound)
            };
            tally.check(mixed.is_ok(), || format!("unsat formula {i} (n {n}, d {d}): tau(1/4 - delta) > {bound}"));
        }
    }
    for (i, f) in sat.iter().enumerate() {
        let n = f.vars();
        for d in [2u32, 3] {
            let p = unsat_to_chain(f, d, delta.clone(), rational(1, 1))?.matrix()?;
            let trap = (n as u64).pow(d - 1);
            let horizon = trap / 4;
            if p.len() <= C5_EXACT_STATES {
                let mut traj = Trajectory::<Rational>::new(&p);
                for t in 1..=horizon {
                    let overlap = min_row_overlap(traj.advance()).0;
                    let dist = rational(1, 1) - overlap;
                    let bound = rational(1, 1) - rational(2 * t as i64, trap as i64 + 1);
                    tally.check(dist >= bound, || format!("sat formula {i} (n {n}, d {d}), t {t}: d = {} < {}", q(&dist), q(&bound)));
                }
            } else {
                let mut traj = Trajectory::<f64>::new(&p);
                for t in 1..=horizon {
                    let overlap = min_row_overlap(traj.advance()).0;
                    let allowed = 2.0 * t as f64 / (trap + 1) as f64;
                    tally.check(overlap <= allowed + 1e-12, || {
                        format!("sat formula {i} (n {n}, d {d}), t {t}: 1 - d = {overlap} > {allowed}")
                    });
                }
            }
            let cap = 32 * (n as u64).pow(2 * d + 1);
            let mixed = tau::<f64>(&p, &0.25, cap);
            tally.check(mixed.is_ok(), || format!("sat formula {i} (n {n}, d {d}): tau(1/4) > {cap}"));
        }
    }
    Ok(format!(
        "20 unsatisfiable and 20 satisfiable formulas, n 4..8, d 2 and 3; rationals up to {C5_EXACT_STATES} states, f64 above"
    ))
}

// ---------------------------------------------------------------------------
// 6: machine gadget

type MachineCase = (&'static str, usize, &'static [bool], &'static [bool]);

const MACHINES: [MachineCase; 6] = [
    ("first-bit", 3, &[true, false, false], &[false, true, true]),
    ("first-bit", 4, &[true, true, false, true], &[false, false, false, true]),
    ("contains-one", 3, &[false, false, true], &[false, false, false]),
    ("contains-one", 4, &[false, true, false, false], &[false, false, false, false]),
    ("parity", 3, &[true, true, true], &[true, false, true]),
    ("parity", 4, &[true, false, false, false], &[true, true, false, false]),
];

fn c6(tally: &mut Tally) -> Result<String> {
    let delta = rational(1, 10);
    let low = (rational(1, 4) - &delta).to_f64();
    let high = (rational(1, 4) + &delta).to_f64();
    let mut worst_ratio = f64::INFINITY;
    for (name, cells, yes_input, no_input) in MACHINES {
        let machine = ToyMachine::builtin(name, cells)?;
        tally.check(machine.config_bits() <= 12, || format!("{name}/{cells}: {} configuration bits", machine.config_bits()));
        for c in [1i64, 4, 16] {
            let label = format!("{name}/{cells}, c {c}");
            let yes = tm_to_chain(&machine, yes_input, rational(c, 1), delta.clone())?;
            let no = tm_to_chain(&machine, no_input, rational(c, 1), delta.clone())?;
            tally.check(yes.accepted && !no.accepted, || format!("{label}: inputs do not split accept/reject"));
            let yes_p = yes.instance.matrix()?;
            let no_p = no.instance.matrix()?;

            let bound = yes.yes_bound().ceil().to_integer();
            let bound = u64::try_from(bound).unwrap_or(u64::MAX);
            let tau_yes = tau::<f64>(&yes_p, &low, bound);
            tally.check(tau_yes.is_ok(), || format!("{label}: tau(1/4 - delta) > {bound}"));

            let w = no.w;
            let mut ladder = PowerLadder::new(no_p.to_scalar::<f64>());
            let mut level = 0;
            while (1u64 << level) <= w / 8 {
                let t = 1u64 << level;
                let overlap = min_row_overlap(ladder.level(level)).0;
                let allowed = 2.0 * t as f64 / w as f64;
                tally.check(overlap <= allowed * (1.0 + 1e-9), || format!("{label}, t {t}: 1 - d = {overlap:e} > 2t/w = {allowed:e}"));
                level += 1;
            }

            let tau_no = tau::<f64>(&no_p, &high, w.saturating_mul(64));
            match (tau_yes, tau_no) {
                (Ok(ty), Ok(tn)) => {
                    worst_ratio = worst_ratio.min(tn as f64 / (c as f64 * ty as f64));
                    tally.check(tn >= c as u64 * ty, || format!("{label}: tau_NO {tn} < c tau_YES = {}", c as u64 * ty));
                }
                (_, Err(e)) => tally.check(false, || format!("{label}: tau_NO unresolved ({e})")),
                _ => {}
            }
        }
    }
    Ok(format!(
        "6 machines x c in 1, 4, 16; f64 matrix powers (weights near 1e12 rule out rationals); \
         smallest tau_NO / (c tau_YES) = {}",
        format_decimal(worst_ratio)
    ))
}

// ---------------------------------------------------------------------------
// 7: conductance

fn weighted(size: usize, triples: Vec<(usize, usize, Rational)>) -> Result<TransitionMatrix> {
    let space = StateSpace::new(bits_for(size), (0..size as u64).collect())?;
    TransitionMatrix::from_weights(space, Weights::new(size, triples)?)
}

fn lazy_hypercube(n: usize) -> Result<TransitionMatrix> {
    let mut triples = Vec::new();
    for x in 0..1usize << n {
        triples.push((x, x, rational(n as i64, 1)));
        for i in 0..n {
            let y = x ^ (1 << i);
            if x < y {
                triples.push((x, y, rational(1, 1)));
            }
        }
    }
    weighted(1 << n, triples)
}

fn lazy_cycle(n: usize) -> Result<TransitionMatrix> {
    let mut triples = Vec::new();
    for x in 0..n {
        triples.push((x, x, rational(2, 1)));
        triples.push((x, (x + 1) % n, rational(1, 1)));
    }
    weighted(n, triples)
}

/// Connected random graph; every loop carries the vertex's other weight,
/// so `P(x, x) >= 1/2`.
fn random_lazy(rng: &mut ChaCha8Rng, n: usize) -> Result<TransitionMatrix> {
    let mut edges: Vec<(usize, usize, i64)> = (1..n).map(|y| (rng.random_range(0..y), y, rng.random_range(1..5))).collect();
    for _ in 0..n {
        let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
        if x != y {
            edges.push((x, y, rng.random_range(1..5)));
        }
    }
    let mut other = vec![0i64; n];
    for &(x, y, w) in &edges {
        other[x] += w;
        other[y] += w;
    }
    let mut triples: Vec<_> = edges.into_iter().map(|(x, y, w)| (x, y, rational(w, 1))).collect();
    triples.extend((0..n).map(|x| (x, x, rational(other[x], 1))));
    weighted(n, triples)
}

fn weighted_corpus(seed: u64) -> Result<Vec<(String, TransitionMatrix)>> {
    let mut out = Vec::new();
    for n in 2..=4 {
        out.push((format!("hypercube {n}"), lazy_hypercube(n)?));
    }
    for n in [3usize, 5, 8, 12, 17, 24] {
        out.push((format!("cycle {n}"), lazy_cycle(n)?));
    }
    let mut rng = rng_for(seed, 7);
    for i in 0..4 {
        let n = 3 + i % 2;
        let f = loop {
            let f = CnfFormula::random(&mut rng, n, n, 2);
            if !f.satisfying().is_empty() {
                break f;
            }
        };
        out.push((format!("trap walk {i} (n {n})"), unsat_to_chain(&f, 2, rational(1, 10), rational(1, 1))?.matrix()?));
    }
    for i in 0..8 {
        let n = rng.random_range(4..=16);
        out.push((format!("random lazy {i} ({n} states)"), random_lazy(&mut rng, n)?));
    }
    Ok(out)
}

fn c7(seed: u64, tally: &mut Tally) -> Result<String> {
    let corpus = weighted_corpus(seed)?;
    for (name, p) in &corpus {
        let report = conductance(p)?;
        tally.check(report.exact, || format!("{name}: conductance not exact"));
        for eps in [rational(1, 8), rational(1, 4)] {
            let bound = report.bound(eps.to_f64())?;
            let cap = bound.floor() as u64;
            let mixed = tau::<Rational>(p, &eps, cap);
            tally.check(mixed.is_ok(), || format!("{name}, eps {}: tau > bound {bound}", q(&eps)));
        }
    }
    Ok(format!("{} weighted chains up to 24 states", corpus.len()))
}

// ---------------------------------------------------------------------------
// 8: monotonicity

fn chain_corpus(seed: u64) -> Result<Vec<(String, TransitionMatrix)>> {
    let mut out = weighted_corpus(seed)?;
    let mut rng = rng_for(seed, 8);
    for i in 0..12 {
        let n = 1 + i % 4;
        let m = 1 + i % 3;
        let gates = rng.random_range(2..12);
        let circuit = ChainCircuit::new(n, m, GateList::random(&mut rng, n + m, gates, n))?;
        out.push((format!("random circuit {i}"), to_matrix(&circuit, &StateSpace::full(n))?));
    }
    for i in 0..6 {
        let (c, c2) = random_pair(&mut rng, 1 + i % 2);
        let m = 3 + i as u64;
        let inst = sd_to_chain(&c, &c2, m, 1, Some(m), rational(1, 1), rational(0, 1))?;
        out.push((format!("sampler chain {i}"), inst.matrix()?));
    }
    for (name, cells, yes, no) in MACHINES.iter().take(2) {
        let machine = ToyMachine::builtin(name, *cells)?;
        for input in [yes, no] {
            let g = tm_to_chain(&machine, input, rational(1, 1), rational(1, 10))?;
            out.push((format!("{name}/{cells} on {input:?}"), g.instance.matrix()?));
        }
    }
    Ok(out)
}

fn c8(seed: u64, tally: &mut Tally) -> Result<String> {
    let corpus = chain_corpus(seed)?;
    for (name, p) in &corpus {
        let curve = d_curve::<Rational>(p, 64);
        for (t, w) in curve.windows(2).enumerate() {
            tally.check(w[1] <= w[0], || format!("{name}: d({}) = {} > d({t}) = {}", t + 1, q(&w[1]), q(&w[0])));
        }
    }
    Ok(format!("{} chains, t 0..64, rational arithmetic", corpus.len()))
}

// ---------------------------------------------------------------------------
// 9: estimator

fn dyadic_matrix(size: usize, rows: Vec<Vec<i64>>, den: i64) -> Result<TransitionMatrix> {
    let data = rows.into_iter().flatten().map(|v| rational(v, den)).collect();
    let space = StateSpace::new(bits_for(size), (0..size as u64).collect())?;
    TransitionMatrix::from_probabilities(space, Matrix::from_rows(size, data))
}

fn random_dyadic(rng: &mut ChaCha8Rng, size: usize, den: i64) -> Result<TransitionMatrix> {
    let rows = (0..size)
        .map(|x| {
            let mut row = vec![0i64; size];
            row[x] = den / 2;
            for _ in 0..den / 2 {
                row[rng.random_range(0..size)] += 1;
            }
            row
        })
        .collect();
    dyadic_matrix(size, rows, den)
}

fn c9(seed: u64, tally: &mut Tally) -> Result<String> {
    const SEEDS: u64 = 200;
    let mut rng = rng_for(seed, 9);
    let chains = vec![
        ("two-state", dyadic_matrix(2, vec![vec![3, 1], vec![1, 3]], 4)?, 1u64),
        ("lazy 4-cycle", dyadic_matrix(4, vec![vec![2, 1, 0, 1], vec![1, 2, 1, 0], vec![0, 1, 2, 1], vec![1, 0, 1, 2]], 4)?, 2),
        ("random 8-state", random_dyadic(&mut rng, 8, 16)?, 2),
        ("random 16-state", random_dyadic(&mut rng, 16, 32)?, 1),
    ];
    let mut notes = Vec::new();
    for (name, p, t) in &chains {
        let stepper = DyadicChain::exact_from(p)?;
        let exact = d_of_t::<Rational>(p, *t).to_f64();
        for delta in [0.05, 0.1] {
            let mut good = 0;
            for s in 0..SEEDS {
                let run_seed = seed.wrapping_mul(1_000_003).wrapping_add(s);
                let cfg = EstimatorConfig::with_default_runs(stepper.state_bits(), delta, run_seed, *t)?;
                let d_hat = simulate_frequencies(&stepper, &cfg)?.d_hat().0.to_f64();
                if (d_hat - exact).abs() <= delta {
                    good += 1;
                }
            }
            let frac = good as f64 / SEEDS as f64;
            tally.check(frac >= 0.75, || format!("{name}, delta {delta}: {good}/{SEEDS} estimates within delta"));
            notes.push(format!("{name}/{delta}: {good}/{SEEDS}"));
        }
    }
    Ok(notes.join(", "))
}

// ---------------------------------------------------------------------------
// 10: lower-bound protocol

fn projection(inputs: usize, outputs: usize) -> Result<SamplerCircuit> {
    Ok(SamplerCircuit::new(GateList::new(inputs, Vec::new(), (0..outputs as u32).collect())?))
}

/// Low 8 of 14 bits, except that the top output bit is `r7 & r8 & r9`: half
/// the outputs keep 112 preimages, the other half 16.
fn thinned_projection() -> Result<SamplerCircuit> {
    let gates = vec![Gate::And(7, 8), Gate::And(14, 9)];
    let outputs = (0..7).chain([15]).collect();
    Ok(SamplerCircuit::new(GateList::new(14, gates, outputs)?))
}

fn acceptance_over_seeds(pair: &SdPair, params: &ProtocolParams, prover: Prover, seed: u64, stream: u64) -> f64 {
    let accepted = (0..1000u64)
        .filter(|&s| {
            let mut rng = rng_for(seed ^ (stream << 32), s);
            lower_bound_round(pair, params, prover, &mut rng).accept
        })
        .count();
    accepted as f64 / 1000.0
}

fn paper_quotas_match(tally: &mut Tally) -> Result<()> {
    let k = Profile::Paper.constants();
    for (num, den) in [(1, 2), (1, 3), (1, 5), (1, 10)] {
        let delta = rational(num, den);
        let d = delta.to_f64();
        for n_tilde in [1_000u64, 54_321, 1 << 20] {
            for t in [100_000u64, 1 << 22, 987_654_321] {
                let p = ProtocolParams::standard(&delta, n_tilde, t, Profile::Paper)?;
                let label = format!("delta {num}/{den}, N~ {n_tilde}, t {t}");
                if !p.exact_outputs {
                    let two_a = p.delta1 * p.delta1 * n_tilde as f64 / k.k1 as f64;
                    let scale = (p.a as f64).exp2();
                    let maximal = (k.k1 as f64 * 2.0 * scale / n_tilde as f64).sqrt() > d;
                    tally.check((two_a - scale).abs() <= 1e-9 * scale && p.delta1 <= d + 1e-12 && maximal, || {
                        format!("{label}: 2^a = {scale} but delta1^2 N~ / K1 = {two_a}")
                    });
                    let c = ((1.0 - p.delta1 / 2.0) * (n_tilde as f64 / scale)).floor() as u64;
                    tally.check(p.c_count == c, || format!("{label}: c = {} vs {c}", p.c_count));
                }
                if !p.exact_preimages {
                    let two_b = p.delta2.powi(4) * t as f64 / k.k2 as f64;
                    let scale = (p.b as f64).exp2();
                    tally.check((two_b - scale).abs() <= 1e-9 * scale && p.delta2 <= d + 1e-12, || {
                        format!("{label}: 2^b = {scale} but delta2^4 t / K2 = {two_b}")
                    });
                    let dq = ((1.0 - p.delta2 / 2.0) * (t as f64 / scale)).floor() as u64;
                    tally.check(p.d_count == dq, || format!("{label}: d = {} vs {dq}", p.d_count));
                }
            }
        }
    }
    Ok(())
}

fn c10(seed: u64, tally: &mut Tally) -> Result<String> {
    let delta = rational(1, 2);
    let families = [
        ("thinned projection", SdPair::new(&projection(14, 8)?, &thinned_projection()?)?, 64u64, 128u64, 300u64),
        ("hashed projection", SdPair::new(&projection(18, 6)?, &projection(18, 6)?)?, 4096, 64, 160),
    ];
    let mut notes = Vec::new();
    for (i, (name, pair, t, yes_n, no_n)) in families.iter().enumerate() {
        tally.check(is_yes(pair, *t, *yes_n), || format!("{name}: N(t) < {yes_n}, not a YES instance"));
        tally.check(is_no(pair, *t, *no_n, &delta), || format!("{name}: N~ = {no_n} is not a NO instance"));
        let yes_params = ProtocolParams::standard(&delta, *yes_n, *t, Profile::Desk)?;
        let no_params = ProtocolParams::standard(&delta, *no_n, *t, Profile::Desk)?;
        let fits = yes_params.c_count <= 1 << pair.output_width() && yes_params.d_count <= pair.domain();
        tally.check(fits, || format!("{name}: quotas do not fit the domain"));
        let yes_rate = acceptance_over_seeds(pair, &yes_params, Prover::Honest, seed, 2 * i as u64);
        let no_rate = acceptance_over_seeds(pair, &no_params, Prover::Greedy, seed, 2 * i as u64 + 1);
        tally.check(yes_rate >= 2.0 / 3.0, || format!("{name}: YES accepted {yes_rate}"));
        tally.check(no_rate <= 1.0 / 3.0, || format!("{name}: NO accepted {no_rate}"));
        notes.push(format!("{name}: YES {yes_rate}, NO {no_rate}"));
    }
    paper_quotas_match(tally)?;
    notes.push("paper-profile quotas checked on 36 parameter sets".into());
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------------------
// 11-12: amplification and the reduction to statistical distance

fn c11(seed: u64, tally: &mut Tally) -> Result<String> {
    let mut rng = rng_for(seed, 11);
    for i in 0..20 {
        let (c, c2) = random_pair(&mut rng, 1 + i % 3);
        let d = SdPair::new(&c, &c2)?.tv();
        for k in 1..=3usize {
            let (a, b) = amplify_distance(&c, &c2, k)?;
            let got = SdPair::new(&a, &b)?.tv();
            let want = num_traits::pow(d.clone(), k);
            tally.check(got == want, || format!("pair {i}, k {k}: {} vs {}^{k}", q(&got), q(&d)));
        }
    }
    Ok("20 pairs, k 1..3".into())
}

/// Pairs of 1- and 2-bit samplers with disjoint supports.
fn disjoint_pairs() -> Result<Vec<(SamplerCircuit, SamplerCircuit)>> {
    let k = SamplerCircuit::constant;
    // (r0 op r1, fixed high bit)
    let tagged = |high: bool, op: Option<Gate>| -> Result<SamplerCircuit> {
        let mut gates = vec![Gate::Const(high)];
        let low = match op {
            Some(g) => {
                gates.push(g);
                3
            }
            None => 0,
        };
        Ok(SamplerCircuit::new(GateList::new(2, gates, vec![low, 2])?))
    };
    Ok(vec![
        (k(1, 0), k(1, 1)),
        (k(1, 1), k(1, 0)),
        (k(2, 0), k(2, 3)),
        (k(2, 1), k(2, 2)),
        (tagged(false, None)?, tagged(true, None)?),
        (tagged(true, None)?, tagged(false, None)?),
        (tagged(false, Some(Gate::Xor(0, 1)))?, tagged(true, Some(Gate::And(0, 1)))?),
        (tagged(true, Some(Gate::Or(0, 1)))?, tagged(false, None)?),
        (k(2, 2), tagged(false, Some(Gate::Xor(0, 1)))?),
        (tagged(true, Some(Gate::And(0, 1)))?, k(2, 0)),
    ])
}

fn c12(seed: u64, tally: &mut Tally) -> Result<String> {
    let delta = rational(1, 5);
    let k = 20u64;
    let m = 4u64;
    tally.check(szk_condition(&delta, k), || "k = 20 does not satisfy the gap condition at delta = 1/5".into());
    for (i, (c, c2)) in disjoint_pairs()?.iter().enumerate() {
        let inst = sd_to_chain(c, c2, m, 1, Some(m), rational(1, 1), delta.clone())?;
        let v = exact_decide(&inst)?;
        tally.check(v.decision == Decision::No, || format!("NO pair {i}: decided {}", v.decision.name()));
        let sd = gptcs_to_sd(&inst, k)?;
        let d = SdPair::new(&sd.c, &sd.c_prime)?.tv();
        tally.check(d > sd.c_threshold, || format!("NO pair {i}: d_tv {} <= {}", q(&d), q(&sd.c_threshold)));
    }
    let id = SamplerCircuit::identity;
    let kc = SamplerCircuit::constant;
    let mut yes_pairs =
        vec![(id(1), id(1)), (id(1), kc(1, 0)), (kc(1, 0), kc(1, 1)), (kc(1, 1), id(1)), (kc(1, 0), kc(1, 0)), (id(2), kc(2, 0))];
    let mut rng = rng_for(seed, 12);
    while yes_pairs.len() < 10 {
        yes_pairs.push(random_pair(&mut rng, 1 + yes_pairs.len() % 2));
    }
    let target = rational(1, 20);
    for (i, (c, c2)) in yes_pairs.iter().enumerate() {
        let probe = sd_to_chain(c, c2, m, 1, Some(m), rational(1, 1), delta.clone())?;
        let t = tau_from::<Rational>(&probe.matrix()?, probe.x, &target, 64)? + 1;
        let inst = sd_to_chain(c, c2, m, t, Some(m), rational(1, 1), delta.clone())?;
        let v = exact_decide(&inst)?;
        tally.check(v.decision == Decision::Yes, || format!("YES pair {i} (t {t}): decided {}", v.decision.name()));
        let sd = gptcs_to_sd(&inst, k)?;
        let d = SdPair::new(&sd.c, &sd.c_prime)?.tv();
        tally.check(d <= sd.s, || format!("YES pair {i}: d_tv {} > {}", q(&d), q(&sd.s)));
    }
    Ok("10 NO and 10 YES instances, m = 4, delta = 1/5, k = 20".into())
}
