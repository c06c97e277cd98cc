//! Gate-list boolean circuits.
//!
//! Wires are numbered inputs first; gate `i` defines wire `inputs + i` and may
//! only read wires with smaller numbers. Evaluation is bit-sliced: 64 input
//! assignments travel through the gate list at once, one per lane of a `u64`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::{Error, Result};

pub type Wire = u32;

/// Widest input or output a circuit may have; values are packed into `u64`.
pub const MAX_WIDTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    And(Wire, Wire),
    Or(Wire, Wire),
    Xor(Wire, Wire),
    Not(Wire),
    Const(bool),
}

impl Gate {
    fn operands(&self) -> impl Iterator<Item = Wire> {
        let (a, b) = match *self {
            Gate::And(a, b) | Gate::Or(a, b) | Gate::Xor(a, b) => (Some(a), Some(b)),
            Gate::Not(a) => (Some(a), None),
            Gate::Const(_) => (None, None),
        };
        a.into_iter().chain(b)
    }

    #[inline]
    fn apply(&self, wires: &[u64]) -> u64 {
        match *self {
            Gate::And(a, b) => wires[a as usize] & wires[b as usize],
            Gate::Or(a, b) => wires[a as usize] | wires[b as usize],
            Gate::Xor(a, b) => wires[a as usize] ^ wires[b as usize],
            Gate::Not(a) => !wires[a as usize],
            Gate::Const(false) => 0,
            Gate::Const(true) => u64::MAX,
        }
    }
}

/// A validated gate list with `inputs` input wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateList {
    inputs: usize,
    gates: Vec<Gate>,
    outputs: Vec<Wire>,
}

const LANE_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

impl GateList {
    pub fn new(inputs: usize, gates: Vec<Gate>, outputs: Vec<Wire>) -> Result<Self> {
        if inputs > MAX_WIDTH {
            return Err(Error::InvalidCircuit(format!("{inputs} inputs exceed {MAX_WIDTH}")));
        }
        if outputs.len() > MAX_WIDTH {
            return Err(Error::InvalidCircuit(format!(
                "{} outputs exceed {MAX_WIDTH}",
                outputs.len()
            )));
        }
        for (i, gate) in gates.iter().enumerate() {
            let wire = inputs + i;
            if let Some(bad) = gate.operands().find(|&w| w as usize >= wire) {
                return Err(Error::InvalidCircuit(format!(
                    "gate {i} (wire {wire}) reads wire {bad}, which is not defined before it"
                )));
            }
        }
        let total = inputs + gates.len();
        if let Some(bad) = outputs.iter().find(|&&w| w as usize >= total) {
            return Err(Error::InvalidCircuit(format!(
                "output references wire {bad}, but only {total} wires exist"
            )));
        }
        Ok(Self { inputs, gates, outputs })
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[Wire] {
        &self.outputs
    }

    pub fn output_width(&self) -> usize {
        self.outputs.len()
    }

    fn run_lanes(&self, wires: &mut Vec<u64>) {
        wires.truncate(self.inputs);
        for gate in &self.gates {
            let v = gate.apply(wires);
            wires.push(v);
        }
    }

    /// Evaluates on one input assignment (bit `i` of `input` drives wire `i`).
    pub fn eval(&self, input: u64) -> u64 {
        let mut wires: Vec<u64> = (0..self.inputs)
            .map(|i| if (input >> i) & 1 == 1 { u64::MAX } else { 0 })
            .collect();
        wires.reserve(self.gates.len());
        self.run_lanes(&mut wires);
        self.outputs
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &w)| acc | ((wires[w as usize] & 1) << j))
    }

    /// Calls `f(free, output)` for every assignment of the input bits above
    /// `fixed_width`, with the low `fixed_width` bits held at `fixed`.
    /// `free` is the value of the enumerated bits, shifted down to bit 0.
    pub fn for_each_output(&self, fixed: u64, fixed_width: usize, mut f: impl FnMut(u64, u64)) {
        assert!(fixed_width <= self.inputs);
        let free_width = self.inputs - fixed_width;
        let lanes: u64 = if free_width >= 6 { 64 } else { 1 << free_width };
        let blocks: u64 = if free_width >= 6 { 1 << (free_width - 6) } else { 1 };
        let mut wires: Vec<u64> = Vec::with_capacity(self.inputs + self.gates.len());
        for block in 0..blocks {
            wires.clear();
            for i in 0..fixed_width {
                wires.push(if (fixed >> i) & 1 == 1 { u64::MAX } else { 0 });
            }
            for f_bit in 0..free_width {
                let word = if f_bit < 6 {
                    LANE_PATTERNS[f_bit]
                } else if (block >> (f_bit - 6)) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                };
                wires.push(word);
            }
            self.run_lanes(&mut wires);
            for lane in 0..lanes {
                let out = self
                    .outputs
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (j, &w)| acc | (((wires[w as usize] >> lane) & 1) << j));
                f((block << 6) | lane, out);
            }
        }
    }

    /// A random gate list, handy for property tests and corpora.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        inputs: usize,
        gate_count: usize,
        output_width: usize,
    ) -> Self {
        let mut gates = Vec::with_capacity(gate_count);
        for i in 0..gate_count {
            let wires = (inputs + i) as Wire;
            let pick = |rng: &mut R| rng.random_range(0..wires.max(1));
            let gate = if wires == 0 {
                Gate::Const(rng.random())
            } else {
                match rng.random_range(0..9u8) {
                    0 | 1 => Gate::And(pick(rng), pick(rng)),
                    2 | 3 => Gate::Or(pick(rng), pick(rng)),
                    4 | 5 | 6 => Gate::Xor(pick(rng), pick(rng)),
                    7 => Gate::Not(pick(rng)),
                    _ => Gate::Const(rng.random()),
                }
            };
            gates.push(gate);
        }
        let total = (inputs + gate_count) as Wire;
        let outputs = (0..output_width).map(|_| rng.random_range(0..total)).collect();
        Self::new(inputs, gates, outputs).expect("random gate lists are well formed")
    }
}

/// Incremental construction of gate lists.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    inputs: usize,
    gates: Vec<Gate>,
    constants: [Option<Wire>; 2],
}

impl CircuitBuilder {
    pub fn new(inputs: usize) -> Self {
        Self { inputs, gates: Vec::new(), constants: [None, None] }
    }

    pub fn input(&self, i: usize) -> Wire {
        assert!(i < self.inputs, "input {i} out of range");
        i as Wire
    }

    fn push(&mut self, gate: Gate) -> Wire {
        self.gates.push(gate);
        (self.inputs + self.gates.len() - 1) as Wire
    }

    pub fn constant(&mut self, value: bool) -> Wire {
        if let Some(w) = self.constants[value as usize] {
            return w;
        }
        let w = self.push(Gate::Const(value));
        self.constants[value as usize] = Some(w);
        w
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(Gate::And(a, b))
    }

    pub fn or(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(Gate::Or(a, b))
    }

    pub fn xor(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(Gate::Xor(a, b))
    }

    pub fn not(&mut self, a: Wire) -> Wire {
        self.push(Gate::Not(a))
    }

    /// `if select { when_one } else { when_zero }`
    pub fn mux(&mut self, select: Wire, when_zero: Wire, when_one: Wire) -> Wire {
        let not_select = self.not(select);
        let zero_branch = self.and(when_zero, not_select);
        let one_branch = self.and(when_one, select);
        self.or(zero_branch, one_branch)
    }

    /// Wire that is 1 iff the little-endian `bits` equal `value`.
    pub fn eq_const(&mut self, bits: &[Wire], value: u64) -> Wire {
        if bits.len() < 64 && value >> bits.len() != 0 {
            return self.constant(false);
        }
        let mut acc = self.constant(true);
        for (i, &bit) in bits.iter().enumerate() {
            let literal = if (value >> i) & 1 == 1 { bit } else { self.not(bit) };
            acc = self.and(acc, literal);
        }
        acc
    }

    /// Wire that is 1 iff the little-endian `bits`, read as an unsigned
    /// integer, are strictly below `value`.
    pub fn lt_const(&mut self, bits: &[Wire], value: u64) -> Wire {
        if bits.len() < 64 && value >= 1u64 << bits.len() {
            return self.constant(true);
        }
        let mut less = self.constant(false);
        for (i, &bit) in bits.iter().enumerate() {
            let not_bit = self.not(bit);
            less = if (value >> i) & 1 == 1 {
                self.or(not_bit, less)
            } else {
                self.and(not_bit, less)
            };
        }
        less
    }

    /// Copies `sub` into this circuit with its inputs driven by `inputs`;
    /// returns the wires carrying its outputs.
    pub fn inline(&mut self, sub: &GateList, inputs: &[Wire]) -> Vec<Wire> {
        assert_eq!(inputs.len(), sub.inputs(), "inline input count");
        let mut map: Vec<Wire> = inputs.to_vec();
        for gate in sub.gates() {
            let m = |w: Wire| map[w as usize];
            let wire = match *gate {
                Gate::And(a, b) => self.and(m(a), m(b)),
                Gate::Or(a, b) => self.or(m(a), m(b)),
                Gate::Xor(a, b) => self.xor(m(a), m(b)),
                Gate::Not(a) => self.not(m(a)),
                Gate::Const(v) => self.constant(v),
            };
            map.push(wire);
        }
        sub.outputs().iter().map(|&w| map[w as usize]).collect()
    }

    pub fn finish(self, outputs: Vec<Wire>) -> Result<GateList> {
        GateList::new(self.inputs, self.gates, outputs)
    }
}

/// A fixed-width bit-string. Character `i` of the text form is bit `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bits {
    pub value: u64,
    pub width: usize,
}

impl Bits {
    pub fn new(value: u64, width: usize) -> Self {
        debug_assert!(width <= MAX_WIDTH);
        Self { value: value & mask(width), width }
    }

    pub fn zeros(width: usize) -> Self {
        Self { value: 0, width }
    }
}

pub(crate) fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.width {
            f.write_str(if (self.value >> i) & 1 == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_WIDTH {
            return Err(Error::InvalidParameter(format!("bit-string longer than {MAX_WIDTH}")));
        }
        let mut value = 0;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => value |= 1 << i,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "bit-string contains {other:?}; only 0 and 1 are allowed"
                    )))
                }
            }
        }
        Ok(Self { value, width: s.len() })
    }
}

/// A chain rule `C: {0,1}^n x {0,1}^m -> {0,1}^n`. State bits occupy wires
/// `0..n`, randomness wires `n..n+m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainCircuit {
    rule: GateList,
    state_bits: usize,
    random_bits: usize,
}

impl ChainCircuit {
    pub fn new(state_bits: usize, random_bits: usize, rule: GateList) -> Result<Self> {
        if rule.inputs() != state_bits + random_bits {
            return Err(Error::InvalidCircuit(format!(
                "rule has {} inputs, expected n + m = {}",
                rule.inputs(),
                state_bits + random_bits
            )));
        }
        if rule.output_width() != state_bits {
            return Err(Error::InvalidCircuit(format!(
                "rule has {} outputs, expected n = {state_bits}",
                rule.output_width()
            )));
        }
        Ok(Self { rule, state_bits, random_bits })
    }

    pub fn state_bits(&self) -> usize {
        self.state_bits
    }

    pub fn random_bits(&self) -> usize {
        self.random_bits
    }

    pub fn rule(&self) -> &GateList {
        &self.rule
    }

    /// Next state on raw values; out-of-range bits are ignored.
    #[inline]
    pub fn step(&self, state: u64, randomness: u64) -> u64 {
        let n = self.state_bits;
        let input = (state & mask(n)) | ((randomness & mask(self.random_bits)) << n);
        self.rule.eval(input)
    }

    /// Enumerates `C(state, r)` for every randomness string `r`.
    pub fn for_each_successor(&self, state: u64, f: impl FnMut(u64, u64)) {
        self.rule.for_each_output(state, self.state_bits, f)
    }

    /// Identity rule on `n` bits with `m` ignored random bits.
    pub fn identity(state_bits: usize, random_bits: usize) -> Self {
        let rule = GateList::new(
            state_bits + random_bits,
            Vec::new(),
            (0..state_bits as Wire).collect(),
        )
        .expect("identity is well formed");
        Self { rule, state_bits, random_bits }
    }
}

/// `eval_circuit`: the next state `C(x, r)`, with width checks.
pub fn eval_circuit(circuit: &ChainCircuit, state: Bits, randomness: Bits) -> Result<Bits> {
    if state.width != circuit.state_bits {
        return Err(Error::WidthMismatch { expected: circuit.state_bits, got: state.width });
    }
    if randomness.width != circuit.random_bits {
        return Err(Error::WidthMismatch { expected: circuit.random_bits, got: randomness.width });
    }
    Ok(Bits::new(circuit.step(state.value, randomness.value), circuit.state_bits))
}

/// A sampler `C: {0,1}^k -> {0,1}^n` fed with uniform input bits; it induces
/// `p(w) = |C^{-1}(w)| / 2^k`. The usual case is `k = n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplerCircuit {
    gates: GateList,
}

impl SamplerCircuit {
    pub fn new(gates: GateList) -> Self {
        Self { gates }
    }

    pub fn input_width(&self) -> usize {
        self.gates.inputs()
    }

    pub fn output_width(&self) -> usize {
        self.gates.output_width()
    }

    pub fn gate_list(&self) -> &GateList {
        &self.gates
    }

    #[inline]
    pub fn eval(&self, input: u64) -> u64 {
        self.gates.eval(input)
    }

    pub fn identity(width: usize) -> Self {
        Self::new(
            GateList::new(width, Vec::new(), (0..width as Wire).collect())
                .expect("identity is well formed"),
        )
    }

    pub fn constant(width: usize, value: u64) -> Self {
        let mut b = CircuitBuilder::new(width);
        let outputs = (0..width).map(|i| b.constant((value >> i) & 1 == 1)).collect();
        Self::new(b.finish(outputs).expect("constant is well formed"))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, width: usize, gate_count: usize) -> Self {
        Self::new(GateList::random(rng, width, gate_count, width))
    }
}

/// Full evaluation table of a sampler: its output for every input.
#[derive(Clone, Debug)]
pub struct SamplerTable {
    input_width: usize,
    output_width: usize,
    outputs: Vec<u64>,
    preimages: BTreeMap<u64, Vec<u64>>,
}

/// Inputs are enumerated exhaustively up to this width.
pub const ENUMERATION_CAP: usize = 24;

impl SamplerTable {
    pub fn build(circuit: &SamplerCircuit) -> Result<Self> {
        let k = circuit.input_width();
        if k > ENUMERATION_CAP {
            return Err(Error::ResourceCap {
                what: "sampler input width",
                limit: ENUMERATION_CAP as u64,
                got: k as u64,
            });
        }
        let mut outputs = alloc::vec![0u64; 1usize << k];
        circuit.gates.for_each_output(0, 0, |input, out| {
            if (input as usize) < outputs.len() {
                outputs[input as usize] = out;
            }
        });
        let mut preimages: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for (input, &out) in outputs.iter().enumerate() {
            preimages.entry(out).or_default().push(input as u64);
        }
        Ok(Self { input_width: k, output_width: circuit.output_width(), outputs, preimages })
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn output_width(&self) -> usize {
        self.output_width
    }

    #[inline]
    pub fn output(&self, input: u64) -> u64 {
        self.outputs[input as usize]
    }

    /// Inputs mapping to `output`, ascending.
    pub fn preimages(&self, output: u64) -> &[u64] {
        self.preimages.get(&output).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn preimage_count(&self, output: u64) -> u64 {
        self.preimages(output).len() as u64
    }

    /// `(output, |C^{-1}(output)|)` for outputs with nonzero count, ascending.
    pub fn counts(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.preimages.iter().map(|(&w, v)| (w, v.len() as u64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use rand::SeedableRng;

    fn xor_chain() -> ChainCircuit {
        ChainCircuit::new(1, 1, GateList::new(2, alloc::vec![Gate::Xor(0, 1)], alloc::vec![2]).unwrap())
            .unwrap()
    }

    #[test]
    fn identity_returns_state() {
        let c = ChainCircuit::identity(3, 2);
        for x in 0..8 {
            for r in 0..4 {
                let out = eval_circuit(&c, Bits::new(x, 3), Bits::new(r, 2)).unwrap();
                assert_eq!(out.value, x);
            }
        }
    }

    #[test]
    fn constant_zero_circuit() {
        let mut b = CircuitBuilder::new(3);
        let z = b.constant(false);
        let c = ChainCircuit::new(2, 1, b.finish(alloc::vec![z, z]).unwrap()).unwrap();
        for x in 0..4 {
            assert_eq!(eval_circuit(&c, Bits::new(x, 2), Bits::new(1, 1)).unwrap().value, 0);
        }
    }

    #[test]
    fn xor_truth_table() {
        let c = xor_chain();
        let out = eval_circuit(&c, "1".parse().unwrap(), "1".parse().unwrap()).unwrap();
        assert_eq!(out, "0".parse().unwrap());
        assert_eq!(c.step(0, 1), 1);
        assert_eq!(c.step(1, 0), 1);
    }

    #[test]
    fn width_mismatch_is_reported() {
        let c = xor_chain();
        let err = eval_circuit(&c, "10".parse().unwrap(), "1".parse().unwrap()).unwrap_err();
        assert_eq!(err, Error::WidthMismatch { expected: 1, got: 2 });
    }

    #[test]
    fn rejects_forward_references() {
        assert!(GateList::new(2, alloc::vec![Gate::And(0, 2)], alloc::vec![2]).is_err());
        assert!(GateList::new(2, alloc::vec![Gate::And(0, 1)], alloc::vec![3]).is_err());
    }

    #[test]
    fn bit_sliced_enumeration_matches_scalar_eval() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for inputs in [1usize, 3, 6, 7, 9] {
            let g = GateList::random(&mut rng, inputs, 20, 4);
            for fixed_width in 0..=inputs.min(2) {
                let fixed = 0b10 & mask(fixed_width);
                let mut seen = 0u64;
                g.for_each_output(fixed, fixed_width, |free, out| {
                    assert_eq!(out, g.eval(fixed | (free << fixed_width)));
                    seen += 1;
                });
                assert_eq!(seen, 1 << (inputs - fixed_width));
            }
        }
    }

    #[test]
    fn comparators_match_integers() {
        for value in 0..20u64 {
            let mut b = CircuitBuilder::new(4);
            let bits: Vec<Wire> = (0..4).map(|i| b.input(i)).collect();
            let lt = b.lt_const(&bits, value);
            let eq = b.eq_const(&bits, value);
            let g = b.finish(alloc::vec![lt, eq]).unwrap();
            for x in 0..16u64 {
                let out = g.eval(x);
                assert_eq!(out & 1 == 1, x < value, "{x} < {value}");
                assert_eq!(out >> 1 == 1, x == value, "{x} == {value}");
            }
        }
    }

    #[test]
    fn bits_text_round_trip() {
        let b: Bits = "0110".parse().unwrap();
        assert_eq!(b.value, 0b0110);
        assert_eq!(b.width, 4);
        assert_eq!(b.to_string(), "0110");
        assert!("01a".parse::<Bits>().is_err());
    }

    #[test]
    fn sampler_table_counts() {
        let t = SamplerTable::build(&SamplerCircuit::constant(2, 0)).unwrap();
        assert_eq!(t.preimage_count(0), 4);
        assert_eq!(t.counts().count(), 1);
    }
}
