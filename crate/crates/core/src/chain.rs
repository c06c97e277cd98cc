//! State spaces, exact transition matrices and distributions.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec::Vec;

use crate::circuit::{Bits, ChainCircuit};
use crate::matrix::{Matrix, SparseRows};
use crate::{Error, Rational, Result, Scalar};

/// Default cap on randomness bits enumerated exactly.
pub const RANDOMNESS_CAP: usize = 20;
/// Default cap on state bits for exact work.
pub const STATE_BITS_CAP: usize = 14;

/// An ordered set of distinct `width`-bit states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    width: usize,
    states: Vec<u64>,
    index: BTreeMap<u64, usize>,
}

impl StateSpace {
    pub fn new(width: usize, states: Vec<u64>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (i, &s) in states.iter().enumerate() {
            if width < 64 && s >> width != 0 {
                return Err(Error::InvalidParameter(format!(
                    "state {s:#x} does not fit in {width} bits"
                )));
            }
            if index.insert(s, i).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate state {s:#x}")));
            }
        }
        Ok(Self { width, states, index })
    }

    /// All of `{0,1}^width` in numeric order.
    pub fn full(width: usize) -> Self {
        Self::new(width, (0..1u64 << width).collect()).expect("full cube has distinct states")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, index: usize) -> Bits {
        Bits::new(self.states[index], self.width)
    }

    pub fn index_of(&self, state: u64) -> Option<usize> {
        self.index.get(&state).copied()
    }
}

/// Breadth-first closure of `root` under every randomness string; the root
/// gets index 0.
pub fn reachable_states(circuit: &ChainCircuit, root: Bits) -> Result<StateSpace> {
    reachable_states_capped(circuit, root, RANDOMNESS_CAP)
}

pub fn reachable_states_capped(
    circuit: &ChainCircuit,
    root: Bits,
    randomness_cap: usize,
) -> Result<StateSpace> {
    if root.width != circuit.state_bits() {
        return Err(Error::WidthMismatch { expected: circuit.state_bits(), got: root.width });
    }
    if circuit.random_bits() > randomness_cap {
        return Err(Error::ResourceCap {
            what: "randomness bits",
            limit: randomness_cap as u64,
            got: circuit.random_bits() as u64,
        });
    }
    let mut seen = BTreeMap::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(root.value, 0usize);
    order.push(root.value);
    queue.push_back(root.value);
    while let Some(x) = queue.pop_front() {
        circuit.for_each_successor(x, |_, y| {
            if !seen.contains_key(&y) {
                seen.insert(y, order.len());
                order.push(y);
                queue.push_back(y);
            }
        });
    }
    StateSpace::new(circuit.state_bits(), order)
}

/// Symmetric edge weights of a reversible walk. A loop `w_xx` counts once
/// toward `d_x`; an edge `w_xy` counts toward both endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights {
    edges: BTreeMap<(usize, usize), Rational>,
    degrees: Vec<Rational>,
}

impl Weights {
    /// Accumulates `(x, y, w)` triples; repeated pairs add up.
    pub fn new(size: usize, triples: impl IntoIterator<Item = (usize, usize, Rational)>) -> Result<Self> {
        let mut edges: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (x, y, w) in triples {
            if x >= size || y >= size {
                return Err(Error::InvalidParameter(format!("edge ({x}, {y}) outside {size} states")));
            }
            if w < Rational::zero() {
                return Err(Error::InvalidParameter(format!("negative weight on ({x}, {y})")));
            }
            let key = (x.min(y), x.max(y));
            *edges.entry(key).or_insert_with(Rational::zero) += w;
        }
        edges.retain(|_, w| !Scalar::is_zero(w));
        let mut degrees = alloc::vec![Rational::zero(); size];
        for (&(x, y), w) in &edges {
            degrees[x] += w;
            if x != y {
                degrees[y] += w;
            }
        }
        Ok(Self { edges, degrees })
    }

    pub fn size(&self) -> usize {
        self.degrees.len()
    }

    pub fn weight(&self, x: usize, y: usize) -> Rational {
        self.edges.get(&(x.min(y), x.max(y))).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self, x: usize) -> &Rational {
        &self.degrees[x]
    }

    pub fn degrees(&self) -> &[Rational] {
        &self.degrees
    }

    /// Each unordered pair once, `x <= y`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.edges.iter().map(|(&(x, y), w)| (x, y, w))
    }
}

/// Exact row-stochastic matrix over a state space.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    space: StateSpace,
    probs: Matrix<Rational>,
    weights: Option<Weights>,
}

impl TransitionMatrix {
    /// Validates entries in `[0, 1]` and rows summing to exactly 1.
    pub fn from_probabilities(space: StateSpace, probs: Matrix<Rational>) -> Result<Self> {
        if probs.dim() != space.len() {
            return Err(Error::SpaceMismatch { left: probs.dim(), right: space.len() });
        }
        for (i, row) in probs.rows().enumerate() {
            let mut sum = Rational::zero();
            for (j, p) in row.iter().enumerate() {
                if *p < Rational::zero() || *p > Rational::one() {
                    return Err(Error::InvalidParameter(format!("entry ({i}, {j}) = {p} outside [0, 1]")));
                }
                sum += p;
            }
            if sum != Rational::one() {
                return Err(Error::InvalidParameter(format!("row {i} sums to {sum}, not 1")));
            }
        }
        Ok(Self { space, probs, weights: None })
    }

    /// Random walk `P(x, y) = w_xy / d_x`.
    pub fn from_weights(space: StateSpace, weights: Weights) -> Result<Self> {
        let n = space.len();
        if weights.size() != n {
            return Err(Error::SpaceMismatch { left: weights.size(), right: n });
        }
        if let Some(x) = weights.degrees().iter().position(|d| d.is_zero()) {
            return Err(Error::InvalidParameter(format!("state {x} has zero weighted degree")));
        }
        let mut probs = Matrix::zeros(n);
        for (x, y, w) in weights.edges() {
            probs.set(x, y, w / weights.degree(x));
            if x != y {
                probs.set(y, x, w / weights.degree(y));
            }
        }
        Ok(Self { space, probs, weights: Some(weights) })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn probs(&self) -> &Matrix<Rational> {
        &self.probs
    }

    pub fn weights(&self) -> Option<&Weights> {
        self.weights.as_ref()
    }

    pub fn entry(&self, x: usize, y: usize) -> &Rational {
        self.probs.get(x, y)
    }

    /// The matrix in the requested backend.
    pub fn to_scalar<S: Scalar>(&self) -> Matrix<S> {
        self.probs.map(S::from_rational)
    }

    /// Successor indices of `x` with positive probability.
    pub fn successors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.probs.row(x).iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(j, _)| j)
    }

    /// `P(x, x) >= 1/2` for every state.
    pub fn is_lazy(&self) -> bool {
        let half = crate::rational(1, 2);
        (0..self.len()).all(|x| *self.entry(x, x) >= half)
    }
}

/// `to_matrix`: `P(x, y) = #{r : C(x, r) = y} / 2^m`, exactly.
pub fn to_matrix(circuit: &ChainCircuit, space: &StateSpace) -> Result<TransitionMatrix> {
    if circuit.state_bits() != space.width() {
        return Err(Error::WidthMismatch { expected: space.width(), got: circuit.state_bits() });
    }
    let m = circuit.random_bits();
    if m > RANDOMNESS_CAP {
        return Err(Error::ResourceCap { what: "randomness bits", limit: RANDOMNESS_CAP as u64, got: m as u64 });
    }
    let n = space.len();
    let mut counts = alloc::vec![0u64; n * n];
    for (i, &x) in space.states().iter().enumerate() {
        let mut escaped = None;
        circuit.for_each_successor(x, |_, y| match space.index_of(y) {
            Some(j) => counts[i * n + j] += 1,
            None => escaped = Some(y),
        });
        if let Some(y) = escaped {
            return Err(Error::Closure { state: y });
        }
    }
    let den = num_bigint::BigInt::from(1u64) << m;
    let probs = Matrix::from_rows(
        n,
        counts
            .into_iter()
            .map(|c| Rational::new(num_bigint::BigInt::from(c), den.clone()))
            .collect(),
    );
    Ok(TransitionMatrix { space: space.clone(), probs, weights: None })
}

/// A probability vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<S> {
    mass: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    /// Checks nonnegativity and total mass (exactly 1, or within `2^-50`).
    pub fn new(mass: Vec<S>) -> Result<Self> {
        let mut total = S::zero();
        for (i, p) in mass.iter().enumerate() {
            if *p < S::zero() {
                return Err(Error::InvalidParameter(format!("negative mass at {i}")));
            }
            total = total.add(p);
        }
        let ok = if S::EXACT {
            total == S::one()
        } else {
            libm::fabs(total.to_f64() - 1.0) <= libm::ldexp(1.0, -50)
        };
        if !ok {
            return Err(Error::InvalidParameter(format!("mass sums to {}", total.to_f64())));
        }
        Ok(Self { mass })
    }

    pub fn point(size: usize, at: usize) -> Self {
        let mut mass = alloc::vec![S::zero(); size];
        mass[at] = S::one();
        Self { mass }
    }

    pub fn uniform(size: usize) -> Self {
        let p = S::from_ratio(1, size as u64);
        Self { mass: alloc::vec![p; size] }
    }

    pub(crate) fn from_vec_unchecked(mass: Vec<S>) -> Self {
        Self { mass }
    }

    pub fn mass(&self) -> &[S] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Distribution<T> {
        Distribution { mass: self.mass.iter().map(f).collect() }
    }
}

/// `evolve`: `start * P^t` by repeated squaring of `P`.
pub fn evolve<S: Scalar>(p: &TransitionMatrix, start: &Distribution<S>, t: u64) -> Result<Distribution<S>> {
    if start.len() != p.len() {
        return Err(Error::SpaceMismatch { left: start.len(), right: p.len() });
    }
    let mut result = start.mass.clone();
    let mut square: Matrix<S> = p.to_scalar();
    let mut t = t;
    while t > 0 {
        if t & 1 == 1 {
            result = square.left_apply(&result);
        }
        t >>= 1;
        if t > 0 {
            square = square.mul(&square);
        }
    }
    Ok(Distribution { mass: result })
}

/// Successive powers `P^0, P^1, P^2, ...`, one sparse product per step.
pub struct Trajectory<S> {
    step: SparseRows<S>,
    current: Matrix<S>,
    time: u64,
}

impl<S: Scalar> Trajectory<S> {
    pub fn new(p: &TransitionMatrix) -> Self {
        let base: Matrix<S> = p.to_scalar();
        Self { step: base.sparse(), current: Matrix::identity(base.dim()), time: 0 }
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn current(&self) -> &Matrix<S> {
        &self.current
    }

    pub fn advance(&mut self) -> &Matrix<S> {
        self.current = self.current.mul_sparse(&self.step);
        self.time += 1;
        &self.current
    }
}

/// Strongly connected components of the support digraph, in an arbitrary
/// but deterministic order.
fn components(p: &TransitionMatrix) -> Vec<usize> {
    let n = p.len();
    let adj: Vec<Vec<usize>> = (0..n).map(|x| p.successors(x).collect()).collect();
    let mut radj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for (x, succ) in adj.iter().enumerate() {
        for &y in succ {
            radj[y].push(x);
        }
    }
    // Kosaraju, iterative.
    let mut visited = alloc::vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        if visited[s] {
            continue;
        }
        let mut stack = alloc::vec![(s, 0usize)];
        visited[s] = true;
        while let Some(&mut (x, ref mut next)) = stack.last_mut() {
            if *next < adj[x].len() {
                let y = adj[x][*next];
                *next += 1;
                if !visited[y] {
                    visited[y] = true;
                    stack.push((y, 0));
                }
            } else {
                order.push(x);
                stack.pop();
            }
        }
    }
    let mut comp = alloc::vec![usize::MAX; n];
    let mut count = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = alloc::vec![s];
        comp[s] = count;
        while let Some(x) = stack.pop() {
            for &y in &radj[x] {
                if comp[y] == usize::MAX {
                    comp[y] = count;
                    stack.push(y);
                }
            }
        }
        count += 1;
    }
    comp
}

fn closed_classes(p: &TransitionMatrix, comp: &[usize]) -> Vec<usize> {
    let count = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut leaks = alloc::vec![false; count];
    for x in 0..p.len() {
        for y in p.successors(x) {
            if comp[x] != comp[y] {
                leaks[comp[x]] = true;
            }
        }
    }
    (0..count).filter(|&c| !leaks[c]).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Irreducible (support digraph strongly connected) and aperiodic (gcd of
/// cycle lengths is 1).
pub fn check_ergodic(p: &TransitionMatrix) -> bool {
    let n = p.len();
    if n == 0 {
        return false;
    }
    let comp = components(p);
    if comp.iter().any(|&c| c != comp[0]) {
        return false;
    }
    period(p, &comp, 0) == 1
}

/// Period of the class of `root`: gcd over in-class edges of
/// `level(x) + 1 - level(y)` for BFS levels.
fn period(p: &TransitionMatrix, comp: &[usize], root: usize) -> u64 {
    let class = comp[root];
    let mut level = alloc::vec![u64::MAX; p.len()];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for y in p.successors(x) {
            if comp[y] == class && level[y] == u64::MAX {
                level[y] = level[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let mut period = 0;
    for x in (0..p.len()).filter(|&x| comp[x] == class) {
        for y in p.successors(x).filter(|&y| comp[y] == class) {
            period = gcd(period, (level[x] + 1).abs_diff(level[y]));
        }
    }
    period
}

/// `P^t(x, .)` converges to one limit from every start: a single closed
/// class, and that class aperiodic. Transient states are allowed, unlike
/// [`check_ergodic`].
pub fn converges(p: &TransitionMatrix) -> bool {
    if p.is_empty() {
        return false;
    }
    let comp = components(p);
    let closed = closed_classes(p, &comp);
    if closed.len() != 1 {
        return false;
    }
    let root = comp.iter().position(|&c| c == closed[0]).expect("class is nonempty");
    period(p, &comp, root) == 1
}

/// `true` iff exactly one closed communicating class exists, i.e. the
/// stationary distribution is unique.
pub fn has_unique_stationary(p: &TransitionMatrix) -> bool {
    let comp = components(p);
    closed_classes(p, &comp).len() == 1
}

/// Unique stationary distribution. Weighted chains use `d_x / sum_y d_y`;
/// otherwise `pi P = pi, sum pi = 1` is solved by elimination.
pub fn stationary<S: Scalar>(p: &TransitionMatrix) -> Result<Distribution<S>> {
    if !has_unique_stationary(p) {
        return Err(Error::PromiseViolation(
            "chain has more than one closed class, so no unique stationary distribution".into(),
        ));
    }
    if let Some(w) = p.weights() {
        let total: Rational = w.degrees().iter().sum();
        return Ok(Distribution { mass: w.degrees().iter().map(|d| S::from_rational(&(d / &total))).collect() });
    }
    let n = p.len();
    let probs: Matrix<S> = p.to_scalar();
    // Rows of the system: (P^T - I) pi = 0, last row replaced by sum pi = 1.
    let mut a: Vec<Vec<S>> = (0..n)
        .map(|i| {
            let mut row: Vec<S> = (0..n).map(|j| probs.get(j, i).clone()).collect();
            row[i] = row[i].sub(&S::one());
            row.push(S::zero());
            row
        })
        .collect();
    if let Some(last) = a.last_mut() {
        *last = alloc::vec![S::one(); n + 1];
    }
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .max_by(|&r1, &r2| {
                if S::EXACT {
                    // First nonzero pivot keeps rational growth predictable.
                    r2.cmp(&r1)
                } else {
                    a[r1][col].abs().partial_cmp(&a[r2][col].abs()).unwrap_or(core::cmp::Ordering::Equal)
                }
            })
            .ok_or_else(|| Error::PromiseViolation("singular stationary system".into()))?;
        a.swap(col, pivot);
        let inv = S::one().div(&a[col][col]);
        for j in col..=n {
            a[col][j] = a[col][j].mul(&inv);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in col..=n {
                let v = a[col][j].mul(&factor);
                a[r][j] = a[r][j].sub(&v);
            }
        }
    }
    let mass: Vec<S> = a.into_iter().map(|row| row[n].clone()).collect();
    if !S::EXACT {
        let moved = probs.left_apply(&mass);
        let residual: f64 = moved.iter().zip(&mass).map(|(x, y)| libm::fabs(x.sub(y).to_f64())).sum();
        if residual > 1e-12 {
            return Err(Error::PromiseViolation(format!("stationary residual {residual:e} too large")));
        }
    }
    Ok(Distribution { mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, Gate, GateList};
    use crate::rational;

    pub(crate) fn xor_chain() -> ChainCircuit {
        ChainCircuit::new(1, 1, GateList::new(2, alloc::vec![Gate::Xor(0, 1)], alloc::vec![2]).unwrap()).unwrap()
    }

    fn and_chain() -> ChainCircuit {
        ChainCircuit::new(1, 1, GateList::new(2, alloc::vec![Gate::And(0, 1)], alloc::vec![2]).unwrap()).unwrap()
    }

    fn explicit(rows: &[&[(i64, i64)]]) -> TransitionMatrix {
        let n = rows.len();
        let width = (usize::BITS - (n.max(2) - 1).leading_zeros()) as usize;
        let space = StateSpace::new(width, (0..n as u64).collect()).unwrap();
        let data = rows.iter().flat_map(|r| r.iter().map(|&(a, b)| rational(a, b))).collect();
        TransitionMatrix::from_probabilities(space, Matrix::from_rows(n, data)).unwrap()
    }

    #[test]
    fn reachability_examples() {
        let id = ChainCircuit::identity(2, 1);
        assert_eq!(reachable_states(&id, "10".parse().unwrap()).unwrap().states(), &[1]);
        let xor = xor_chain();
        assert_eq!(reachable_states(&xor, "0".parse().unwrap()).unwrap().len(), 2);
        // y = (x0 XOR r0, 0): bit 1 is never set.
        let mut b = CircuitBuilder::new(3);
        let flip = b.xor(0, 2);
        let zero = b.constant(false);
        let c = ChainCircuit::new(2, 1, b.finish(alloc::vec![flip, zero]).unwrap()).unwrap();
        let space = reachable_states(&c, "00".parse().unwrap()).unwrap();
        assert_eq!(space.states(), &[0b00, 0b01]);
    }

    #[test]
    fn randomness_cap_is_enforced() {
        let wide = ChainCircuit::identity(1, 21);
        let err = reachable_states(&wide, "0".parse().unwrap()).unwrap_err();
        assert!(matches!(err, Error::ResourceCap { .. }));
    }

    #[test]
    fn to_matrix_examples() {
        let xor = xor_chain();
        let p = to_matrix(&xor, &StateSpace::full(1)).unwrap();
        assert!(p.probs().rows().flatten().all(|e| *e == rational(1, 2)));

        let p = to_matrix(&and_chain(), &StateSpace::full(1)).unwrap();
        assert_eq!(p.probs().row(0), &[rational(1, 1), rational(0, 1)]);
        assert_eq!(p.probs().row(1), &[rational(1, 2), rational(1, 2)]);

        let id = to_matrix(&ChainCircuit::identity(2, 2), &StateSpace::full(2)).unwrap();
        assert_eq!(*id.probs(), Matrix::identity(4));
    }

    #[test]
    fn to_matrix_reports_escape() {
        let xor = xor_chain();
        let only_zero = StateSpace::new(1, alloc::vec![0]).unwrap();
        assert_eq!(to_matrix(&xor, &only_zero).unwrap_err(), Error::Closure { state: 1 });
    }

    #[test]
    fn evolve_examples() {
        let p = to_matrix(&xor_chain(), &StateSpace::full(1)).unwrap();
        let start = Distribution::<Rational>::point(2, 0);
        assert_eq!(evolve(&p, &start, 0).unwrap(), start);
        assert_eq!(evolve(&p, &start, 1).unwrap().mass(), &[rational(1, 2), rational(1, 2)]);
    }

    #[test]
    fn stationary_examples() {
        let p = to_matrix(&xor_chain(), &StateSpace::full(1)).unwrap();
        let pi = stationary::<Rational>(&p).unwrap();
        assert_eq!(pi.mass(), &[rational(1, 2), rational(1, 2)]);

        let w = Weights::new(
            2,
            [(0, 0, rational(3, 1)), (1, 1, rational(1, 1)), (0, 1, rational(1, 1))],
        )
        .unwrap();
        let p = TransitionMatrix::from_weights(StateSpace::full(1), w).unwrap();
        let pi = stationary::<Rational>(&p).unwrap();
        assert_eq!(pi.mass(), &[rational(2, 3), rational(1, 3)]);
        // Elimination oracle agrees with the degree formula.
        let unweighted = TransitionMatrix::from_probabilities(p.space().clone(), p.probs().clone()).unwrap();
        assert_eq!(stationary::<Rational>(&unweighted).unwrap(), pi);
        let approx = stationary::<f64>(&unweighted).unwrap();
        assert!((approx.mass()[0] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_rejects_two_closed_classes() {
        let p = explicit(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        assert!(matches!(stationary::<f64>(&p), Err(Error::PromiseViolation(_))));
    }

    #[test]
    fn ergodicity_examples() {
        assert!(!check_ergodic(&explicit(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]])));
        assert!(check_ergodic(&to_matrix(&xor_chain(), &StateSpace::full(1)).unwrap()));
        assert!(!check_ergodic(&explicit(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]])));
        // Only 2-cycles through state 0: period 2.
        let p = explicit(&[
            &[(0, 1), (1, 2), (1, 2)],
            &[(1, 1), (0, 1), (0, 1)],
            &[(1, 1), (0, 1), (0, 1)],
        ]);
        assert!(!check_ergodic(&p));
        let q = explicit(&[
            &[(0, 1), (1, 1), (0, 1)],
            &[(1, 2), (0, 1), (1, 2)],
            &[(1, 1), (0, 1), (0, 1)],
        ]);
        assert!(check_ergodic(&q));
    }

    #[test]
    fn trajectory_matches_pow() {
        let p = explicit(&[&[(3, 4), (1, 4)], &[(1, 4), (3, 4)]]);
        let mut traj = Trajectory::<Rational>::new(&p);
        for _ in 0..5 {
            traj.advance();
        }
        assert_eq!(*traj.current(), p.probs().pow(5));
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(alloc::vec![rational(1, 2), rational(1, 3)]).is_err());
        assert!(Distribution::new(alloc::vec![0.5f64, 0.5]).is_ok());
        assert!(Distribution::new(alloc::vec![-0.5f64, 1.5]).is_err());
    }
}
