//! Total variation distance, `d(t)`, mixing times and conductance.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::chain::{stationary, Distribution, TransitionMatrix, Trajectory};
use crate::matrix::{Matrix, PowerLadder};
use crate::{Error, Rational, Result, Scalar};

/// Largest state space on which conductance is computed by enumerating
/// every subset.
pub const CONDUCTANCE_CAP: usize = 24;

/// `1/2 * sum |mu - nu|`.
pub fn tv_distance<S: Scalar>(mu: &[S], nu: &[S]) -> Result<S> {
    if mu.len() != nu.len() {
        return Err(Error::SpaceMismatch { left: mu.len(), right: nu.len() });
    }
    Ok(tv_unchecked(mu, nu))
}

pub fn tv_between<S: Scalar>(mu: &Distribution<S>, nu: &Distribution<S>) -> Result<S> {
    tv_distance(mu.mass(), nu.mass())
}

fn tv_unchecked<S: Scalar>(mu: &[S], nu: &[S]) -> S {
    let mut sum = S::zero();
    for (a, b) in mu.iter().zip(nu) {
        sum = sum.add(&a.sub(b).abs());
    }
    sum.mul(&S::half())
}

/// Worst pair of rows: `(distance, x, y)` with `x < y`, ties going to the
/// lexicographically smallest pair. A single row gives `(0, 0, 0)`.
pub fn max_row_distance<S: Scalar>(m: &Matrix<S>) -> (S, usize, usize) {
    let n = m.dim();
    let best_from = |x: usize| {
        let mut best = (S::zero(), x, x);
        for y in x + 1..n {
            let d = tv_unchecked(m.row(x), m.row(y));
            if d > best.0 {
                best = (d, x, y);
            }
        }
        best
    };
    #[cfg(feature = "parallel")]
    let per_row: Vec<(S, usize, usize)> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(best_from).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_row: Vec<(S, usize, usize)> = (0..n).map(best_from).collect();
    let mut best = (S::zero(), 0, 0);
    for candidate in per_row {
        if candidate.0 > best.0 {
            best = candidate;
        }
    }
    best
}

/// `1 - d` for a power matrix, as `min_{x<y} sum_z min(P(x,z), P(y,z))`.
/// Only nonnegative terms are summed, so in `f64` the value keeps its
/// relative accuracy when `d` is within rounding of 1. A single row gives
/// `(1, 0, 0)`.
pub fn min_row_overlap<S: Scalar>(m: &Matrix<S>) -> (S, usize, usize) {
    let n = m.dim();
    let mut best = (S::one(), 0, 0);
    for x in 0..n {
        for y in x + 1..n {
            let mut sum = S::zero();
            for (a, b) in m.row(x).iter().zip(m.row(y)) {
                sum = sum.add(if a < b { a } else { b });
            }
            if sum < best.0 {
                best = (sum, x, y);
            }
        }
    }
    best
}

/// `d(t) = max_{x,y} d_tv(P^t(x,.), P^t(y,.))`.
pub fn d_of_t<S: Scalar>(p: &TransitionMatrix, t: u64) -> S {
    let pt = p.to_scalar::<S>().pow(t);
    max_row_distance(&pt).0
}

/// `d(0), d(1), ..., d(horizon)`.
pub fn d_curve<S: Scalar>(p: &TransitionMatrix, horizon: u64) -> Vec<S> {
    let mut traj = Trajectory::<S>::new(p);
    let mut out = Vec::with_capacity(horizon as usize + 1);
    out.push(max_row_distance(traj.current()).0);
    for _ in 0..horizon {
        out.push(max_row_distance(traj.advance()).0);
    }
    out
}

/// Default search cap `10 |Omega|^3`.
pub fn default_cap(states: usize) -> u64 {
    10 * (states as u64).pow(3)
}

/// Least `t <= cap` with `dist(t) <= eps`, for `dist` non-increasing in `t`.
/// Doubling scan, then binary search.
fn first_at_most<S: Scalar>(cap: u64, eps: &S, mut dist: impl FnMut(u64) -> S) -> Result<u64> {
    if dist(0) <= *eps {
        return Ok(0);
    }
    let mut lo = 0u64;
    let mut hi = 1u64;
    loop {
        if hi >= cap {
            hi = cap;
            let d = dist(hi);
            if d <= *eps {
                break;
            }
            return Err(Error::Unresolved { cap, last_d: d.to_f64() });
        }
        if dist(hi) <= *eps {
            break;
        }
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if dist(mid) <= *eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn check_eps<S: Scalar>(eps: &S) -> Result<()> {
    if *eps <= S::zero() || *eps >= S::one() {
        return Err(Error::InvalidParameter(format!("eps = {} must lie in (0, 1)", eps.to_f64())));
    }
    Ok(())
}

/// `tau(eps) = min { t : d(t) <= eps }`, searched up to `cap`.
pub fn tau<S: Scalar>(p: &TransitionMatrix, eps: &S, cap: u64) -> Result<u64> {
    check_eps(eps)?;
    let mut ladder = PowerLadder::new(p.to_scalar::<S>());
    first_at_most(cap, eps, |t| max_row_distance(&ladder.power(t)).0)
}

/// `tau_x(eps) = min { t : d_tv(P^t(x,.), pi) <= eps }`.
pub fn tau_from<S: Scalar>(p: &TransitionMatrix, x: usize, eps: &S, cap: u64) -> Result<u64> {
    check_eps(eps)?;
    if x >= p.len() {
        return Err(Error::InvalidParameter(format!("state index {x} outside {} states", p.len())));
    }
    let pi = stationary::<S>(p)?;
    let mut ladder = PowerLadder::new(p.to_scalar::<S>());
    first_at_most(cap, eps, |t| tv_unchecked(ladder.power(t).row(x), pi.mass()))
}

/// Distance curve plus mixing times read off it.
#[derive(Clone, Debug)]
pub struct MixingProfile<S> {
    /// `d(0..=horizon)`.
    pub d_values: Vec<S>,
    /// `(eps, tau(eps))`; `None` when not reached within the horizon.
    pub tau_table: Vec<(S, Option<u64>)>,
    /// `tau_x[x][k]` for `eps = tau_table[k].0`.
    pub tau_x: Vec<Vec<Option<u64>>>,
}

impl<S: Scalar> MixingProfile<S> {
    pub fn compute(p: &TransitionMatrix, horizon: u64, eps: &[S]) -> Result<Self> {
        for e in eps {
            check_eps(e)?;
        }
        let pi = stationary::<S>(p)?;
        let n = p.len();
        let mut traj = Trajectory::<S>::new(p);
        let mut d_values = Vec::new();
        let mut tau_table: Vec<(S, Option<u64>)> = eps.iter().map(|e| (e.clone(), None)).collect();
        let mut tau_x = alloc::vec![alloc::vec![None; eps.len()]; n];
        loop {
            let t = traj.time();
            let current = traj.current();
            let d = max_row_distance(current).0;
            for (e, slot) in tau_table.iter_mut() {
                if slot.is_none() && d <= *e {
                    *slot = Some(t);
                }
            }
            for (x, row) in tau_x.iter_mut().enumerate() {
                let dx = tv_unchecked(current.row(x), pi.mass());
                for (k, slot) in row.iter_mut().enumerate() {
                    if slot.is_none() && dx <= eps[k] {
                        *slot = Some(t);
                    }
                }
            }
            d_values.push(d);
            if t == horizon {
                break;
            }
            traj.advance();
        }
        Ok(Self { d_values, tau_table, tau_x })
    }
}

/// Outcome of a conductance computation.
#[derive(Clone, Debug, PartialEq)]
pub struct ConductanceReport {
    /// `Phi`, or an upper bound on it when `exact` is false.
    pub phi: Rational,
    /// A minimizing set, as sorted state indices.
    pub witness: Vec<usize>,
    pub pi_min: Rational,
    /// `true` when every subset was examined.
    pub exact: bool,
}

impl ConductanceReport {
    /// Mixing-time bound at `eps`.
    pub fn bound(&self, eps: f64) -> Result<f64> {
        conductance_mixing_bound(self, eps)
    }
}

/// `(2 / Phi^2) ln(2 / (pi_min eps))`.
pub fn conductance_mixing_bound(report: &ConductanceReport, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must lie in (0, 1)")));
    }
    let phi = Scalar::to_f64(&report.phi);
    let pi_min = Scalar::to_f64(&report.pi_min);
    if phi <= 0.0 || pi_min <= 0.0 {
        return Err(Error::InvalidParameter("conductance and pi_min must be positive".into()));
    }
    Ok(2.0 / (phi * phi) * libm::log(2.0 / (pi_min * eps)))
}

/// Weights scaled to a common integer denominator.
struct IntegerGraph {
    adjacency: Vec<Vec<(usize, i128)>>,
    degree: Vec<i128>,
    total: i128,
}

impl IntegerGraph {
    fn new(p: &TransitionMatrix) -> Result<Self> {
        let weights = p.weights().ok_or(Error::MissingWeights)?;
        let n = weights.size();
        let mut lcm = BigInt::one();
        for (_, _, w) in weights.edges() {
            lcm = lcm.lcm(w.denom());
        }
        let to_int = |w: &Rational| -> Result<i128> {
            (w * Rational::from_integer(lcm.clone()))
                .to_integer()
                .to_i128()
                .filter(|v| *v < 1i128 << 100)
                .ok_or(Error::ResourceCap { what: "scaled edge weight bits", limit: 100, got: 128 })
        };
        let mut adjacency = alloc::vec![Vec::new(); n];
        let mut degree = alloc::vec![0i128; n];
        for (x, y, w) in weights.edges() {
            let w = to_int(w)?;
            degree[x] += w;
            if x != y {
                degree[y] += w;
                adjacency[x].push((y, w));
                adjacency[y].push((x, w));
            }
        }
        let total = degree.iter().sum();
        Ok(Self { adjacency, degree, total })
    }

    fn cut(&self, set: &[bool]) -> (i128, i128) {
        let mut cross = 0;
        let mut volume = 0;
        for (x, &inside) in set.iter().enumerate() {
            if inside {
                volume += self.degree[x];
                for &(y, w) in &self.adjacency[x] {
                    if !set[y] {
                        cross += w;
                    }
                }
            }
        }
        (cross, volume)
    }
}

/// `a/b < c/d` for positive denominators, falling back to big integers on
/// overflow.
fn ratio_less(a: i128, b: i128, c: i128, d: i128) -> bool {
    match (a.checked_mul(d), c.checked_mul(b)) {
        (Some(l), Some(r)) => l < r,
        _ => BigInt::from(a) * BigInt::from(d) < BigInt::from(c) * BigInt::from(b),
    }
}

fn pi_min(p: &TransitionMatrix) -> Result<Rational> {
    let w = p.weights().ok_or(Error::MissingWeights)?;
    let total: Rational = w.degrees().iter().sum();
    let min = w.degrees().iter().min().cloned().unwrap_or_else(<Rational as Zero>::zero);
    Ok(min / total)
}

fn report(p: &TransitionMatrix, best: (i128, i128, Vec<usize>), exact: bool) -> Result<ConductanceReport> {
    let (cross, denom, witness) = best;
    Ok(ConductanceReport {
        phi: Rational::new(BigInt::from(cross), BigInt::from(denom)),
        witness,
        pi_min: pi_min(p)?,
        exact,
    })
}

/// Exact `Phi = min_A cross(A) / min(vol A, vol A^c)` over every proper
/// nonempty `A`. Each set and its complement score the same, so only sets
/// missing the last state are visited (in Gray-code order); ties go to the
/// numerically smallest membership mask.
pub fn conductance(p: &TransitionMatrix) -> Result<ConductanceReport> {
    let graph = IntegerGraph::new(p)?;
    let n = p.len();
    if n > CONDUCTANCE_CAP {
        return Err(Error::ResourceCap { what: "states for exact conductance", limit: CONDUCTANCE_CAP as u64, got: n as u64 });
    }
    if n < 2 {
        return Err(Error::InvalidParameter("conductance needs at least two states".into()));
    }
    let free = n - 1;
    let mut inside = alloc::vec![false; n];
    let (mut cross, mut volume) = (0i128, 0i128);
    let mut best: Option<(i128, i128, u32)> = None;
    let mut mask = 0u32;
    for step in 1u32..(1 << free) {
        let v = step.trailing_zeros() as usize;
        let entering = !inside[v];
        let mut delta = 0i128;
        for &(u, w) in &graph.adjacency[v] {
            if inside[u] {
                delta -= w;
            } else {
                delta += w;
            }
        }
        inside[v] = entering;
        mask ^= 1 << v;
        if entering {
            cross += delta;
            volume += graph.degree[v];
        } else {
            cross -= delta;
            volume -= graph.degree[v];
        }
        let denom = volume.min(graph.total - volume);
        if denom == 0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bc, bd, bm)) => {
                ratio_less(cross, denom, bc, bd) || (!ratio_less(bc, bd, cross, denom) && mask < bm)
            }
        };
        if better {
            best = Some((cross, denom, mask));
        }
    }
    let (c, d, m) = best.ok_or_else(|| Error::InvalidParameter("no cut with positive volume".into()))?;
    let witness = (0..n).filter(|&x| m >> x & 1 == 1).collect();
    report(p, (c, d, witness), true)
}

/// Minimum of `Phi_A` over the supplied sets only: an upper bound on `Phi`,
/// exact when the family covers every subset.
pub fn conductance_of_cuts(p: &TransitionMatrix, cuts: &[Vec<usize>]) -> Result<ConductanceReport> {
    let graph = IntegerGraph::new(p)?;
    let n = p.len();
    let mut best: Option<(i128, i128, Vec<usize>)> = None;
    for cut in cuts {
        let mut set = alloc::vec![false; n];
        for &x in cut {
            if x >= n {
                return Err(Error::InvalidParameter(format!("cut member {x} outside {n} states")));
            }
            set[x] = true;
        }
        let count = set.iter().filter(|b| **b).count();
        if count == 0 || count == n {
            return Err(Error::InvalidParameter("cuts must be proper and nonempty".into()));
        }
        let (cross, volume) = graph.cut(&set);
        let denom = volume.min(graph.total - volume);
        if denom == 0 {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&x| set[x]).collect();
        let better = match &best {
            None => true,
            Some((bc, bd, _)) => ratio_less(cross, denom, *bc, *bd),
        };
        if better {
            best = Some((cross, denom, members));
        }
    }
    let best = best.ok_or_else(|| Error::InvalidParameter("no usable cut supplied".into()))?;
    report(p, best, false)
}

/// `Phi_A` for one set.
pub fn cut_ratio(p: &TransitionMatrix, set: &[usize]) -> Result<Rational> {
    Ok(conductance_of_cuts(p, &[set.to_vec()])?.phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{StateSpace, Weights};
    use crate::rational;

    fn explicit(rows: &[&[(i64, i64)]]) -> TransitionMatrix {
        let n = rows.len();
        let width = (usize::BITS - (n.max(2) - 1).leading_zeros()) as usize;
        let space = StateSpace::new(width, (0..n as u64).collect()).unwrap();
        let data = rows.iter().flat_map(|r| r.iter().map(|&(a, b)| rational(a, b))).collect();
        TransitionMatrix::from_probabilities(space, Matrix::from_rows(n, data)).unwrap()
    }

    fn weighted(n: usize, edges: &[(usize, usize, i64)]) -> TransitionMatrix {
        let width = (usize::BITS - (n.max(2) - 1).leading_zeros()) as usize;
        let space = StateSpace::new(width, (0..n as u64).collect()).unwrap();
        let w = Weights::new(n, edges.iter().map(|&(x, y, w)| (x, y, rational(w, 1)))).unwrap();
        TransitionMatrix::from_weights(space, w).unwrap()
    }

    fn sticky() -> TransitionMatrix {
        explicit(&[&[(3, 4), (1, 4)], &[(1, 4), (3, 4)]])
    }

    #[test]
    fn tv_examples() {
        let a = [rational(3, 4), rational(1, 4)];
        let b = [rational(1, 4), rational(3, 4)];
        assert_eq!(tv_distance(&a, &a).unwrap(), rational(0, 1));
        assert_eq!(tv_distance(&a, &b).unwrap(), rational(1, 2));
        let p = [rational(1, 1), rational(0, 1)];
        let q = [rational(0, 1), rational(1, 1)];
        assert_eq!(tv_distance(&p, &q).unwrap(), rational(1, 1));
        assert!(tv_distance(&a, &a[..1]).is_err());
    }

    #[test]
    fn d_of_t_examples() {
        let cycle = explicit(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        let coin = explicit(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]);
        assert_eq!(d_of_t::<Rational>(&coin, 0), rational(1, 1));
        assert_eq!(d_of_t::<Rational>(&coin, 1), rational(0, 1));
        for t in 0..6 {
            assert_eq!(d_of_t::<Rational>(&cycle, t), rational(1, 1));
        }
        // Eigenvalue 1/2: d(t) = 2^-t.
        for t in 0..10u32 {
            assert_eq!(d_of_t::<Rational>(&sticky(), t as u64), rational(1, 1 << t));
        }
    }

    #[test]
    fn tau_examples() {
        let coin = explicit(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]);
        assert_eq!(tau(&coin, &rational(1, 4), 100).unwrap(), 1);
        assert_eq!(tau(&sticky(), &rational(1, 4), 100).unwrap(), 2);
        assert_eq!(tau(&sticky(), &0.25f64, 100).unwrap(), 2);
        let cycle = explicit(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        assert!(matches!(tau(&cycle, &rational(1, 4), 40), Err(Error::Unresolved { cap: 40, .. })));
    }

    #[test]
    fn tau_search_agrees_with_scan() {
        let p = explicit(&[
            &[(7, 8), (1, 8), (0, 1)],
            &[(1, 16), (7, 8), (1, 16)],
            &[(0, 1), (1, 8), (7, 8)],
        ]);
        let curve = d_curve::<Rational>(&p, 200);
        for (num, den) in [(1, 2), (1, 4), (1, 8), (1, 100)] {
            let eps = rational(num, den);
            let scanned = curve.iter().position(|d| *d <= eps).unwrap() as u64;
            assert_eq!(tau(&p, &eps, 1000).unwrap(), scanned);
        }
    }

    #[test]
    fn tau_from_examples() {
        // d_tv(P^t(0,.), pi) = 2^-t / 2.
        assert_eq!(tau_from(&sticky(), 0, &rational(1, 4), 100).unwrap(), 1);
        let single = explicit(&[&[(1, 1)]]);
        assert_eq!(tau_from(&single, 0, &rational(1, 4), 10).unwrap(), 0);
    }

    #[test]
    fn profile_is_consistent() {
        let p = explicit(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(1, 4), (1, 2), (1, 4)],
            &[(0, 1), (1, 2), (1, 2)],
        ]);
        let eps = [rational(1, 2), rational(1, 4), rational(1, 8)];
        let profile = MixingProfile::compute(&p, 40, &eps).unwrap();
        assert_eq!(profile.d_values[0], rational(1, 1));
        for w in profile.d_values.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for (k, (e, t)) in profile.tau_table.iter().enumerate() {
            assert_eq!(t.unwrap(), tau(&p, e, 100).unwrap());
            for x in 0..3 {
                assert!(profile.tau_x[x][k].unwrap() <= t.unwrap());
                assert_eq!(profile.tau_x[x][k].unwrap(), tau_from(&p, x, e, 100).unwrap());
            }
        }
    }

    #[test]
    fn conductance_examples() {
        let single_edge = weighted(2, &[(0, 1, 1)]);
        let report = conductance(&single_edge).unwrap();
        assert_eq!(report.phi, rational(1, 1));
        assert_eq!(report.witness, [0]);

        let looped = weighted(2, &[(0, 1, 1), (0, 0, 1), (1, 1, 1)]);
        let report = conductance(&looped).unwrap();
        assert_eq!(report.phi, rational(1, 2));
        assert_eq!(report.pi_min, rational(1, 2));
        let bound = report.bound(0.25).unwrap();
        assert!((bound - 8.0 * libm::log(16.0)).abs() < 1e-12);
        assert!(tau(&looped, &0.25f64, 100).unwrap() as f64 <= bound);
        assert!(conductance_mixing_bound(&report, 2.0).is_err());
    }

    #[test]
    fn conductance_needs_weights() {
        assert_eq!(conductance(&sticky()).unwrap_err(), Error::MissingWeights);
    }

    #[test]
    fn lazy_hypercube_conductance_is_one_over_2n() {
        for n in 1..=4usize {
            let size = 1 << n;
            let mut edges = Vec::new();
            for x in 0..size {
                edges.push((x, x, n as i64));
                for i in 0..n {
                    let y = x ^ (1 << i);
                    if x < y {
                        edges.push((x, y, 1));
                    }
                }
            }
            let p = weighted(size, &edges);
            let report = conductance(&p).unwrap();
            assert_eq!(report.phi, rational(1, 2 * n as i64), "n = {n}");
            // Half-cube cut along the first coordinate attains it.
            let half: Vec<usize> = (0..size).filter(|x| x & 1 == 0).collect();
            assert_eq!(cut_ratio(&p, &half).unwrap(), report.phi);
        }
    }

    #[test]
    fn cuts_mode_matches_exact_with_all_subsets() {
        let p = weighted(4, &[(0, 1, 3), (1, 2, 1), (2, 3, 2), (3, 0, 1), (0, 0, 2), (2, 2, 5)]);
        let all: Vec<Vec<usize>> = (1u32..15).map(|m| (0..4).filter(|&x| m >> x & 1 == 1).collect()).collect();
        let exact = conductance(&p).unwrap();
        let cuts = conductance_of_cuts(&p, &all).unwrap();
        assert_eq!(exact.phi, cuts.phi);
        assert!(exact.exact && !cuts.exact);
        assert!(conductance_of_cuts(&p, &[alloc::vec![0, 1, 2]]).unwrap().phi >= exact.phi);
    }
}
