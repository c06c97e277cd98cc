//! JSON file formats: circuits, samplers, matrices and promise instances.
//!
//! Canonical files are pretty-printed with sorted keys, rationals as
//! reduced `[numerator, denominator]` pairs and bit-strings written
//! least-significant bit first. Loading a canonical file and storing it
//! again reproduces it byte for byte.

use std::path::Path;
use std::str::FromStr;

use mixgap_core::chain::{StateSpace, TransitionMatrix, Weights};
use mixgap_core::circuit::{Bits, ChainCircuit, Gate, GateList, SamplerCircuit, Wire};
use mixgap_core::estimator::bits_for;
use mixgap_core::matrix::Matrix;
use mixgap_core::reductions::{ChainSpec, Kind, PromiseInstance};
use mixgap_core::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

/// `value` with 15 significant digits: positional for moderate exponents,
/// scientific otherwise.
pub fn format_decimal(value: f64) -> String {
    if value.is_nan() {
        return "NaN".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{value:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-5..15).contains(&exp) {
        return format!("{sign}{mantissa}e{exp}");
    }
    if exp < 0 {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    } else {
        let (int, frac) = digits.split_at(exp as usize + 1);
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

/// `"a/b"`, or `"a"` for integers.
pub fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"a/b"`, `"a"`, or a decimal such as `"0.125"` or `"1e-3"`, exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (body, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, body) = match body.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = BigInt::from_str(&format!("{int}{frac}0")).ok()? / BigInt::from(10);
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(digits);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

fn integer_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn big_from_json(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => BigInt::from_str(s).ok(),
        _ => None,
    }
}

/// `[numerator, denominator]`, reduced; numbers beyond 64 bits become strings.
pub fn rational_json(r: &Rational) -> Value {
    json!([integer_json(r.numer()), integer_json(r.denom())])
}

/// Accepts `[num, den]`, a JSON number, or a string understood by [`parse_rational`].
pub fn rational_from_json(v: &Value, field: &str) -> CliResult<Rational> {
    let bad = || CliError::schema(field, format!("expected a rational (\"a/b\", decimal or [num, den]), got {v}"));
    match v {
        Value::Array(pair) if pair.len() == 2 => {
            let n = big_from_json(&pair[0]).ok_or_else(bad)?;
            let d = big_from_json(&pair[1]).ok_or_else(bad)?;
            if d.is_zero() {
                return Err(CliError::schema(field, "zero denominator"));
            }
            Ok(Rational::new(n, d))
        }
        Value::Number(n) => parse_rational(&n.to_string()).ok_or_else(bad),
        Value::String(s) => parse_rational(s).ok_or_else(bad),
        _ => Err(bad()),
    }
}

pub fn rational_arg(text: &str, flag: &str) -> CliResult<Rational> {
    parse_rational(text).ok_or_else(|| CliError::Usage(format!("{flag}: cannot read {text:?} as a rational (try 1/4 or 0.25)")))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> CliResult<&'a Value> {
    obj.get(key).ok_or_else(|| CliError::schema(join(path, key), "missing"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn object<'a>(v: &'a Value, path: &str) -> CliResult<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| CliError::schema(if path.is_empty() { "(document)" } else { path }, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| CliError::schema(path, "expected an array"))
}

fn uint(v: &Value, path: &str) -> CliResult<u64> {
    match v {
        Value::Number(n) => n.as_u64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
    .ok_or_else(|| CliError::schema(path, format!("expected a non-negative integer, got {v}")))
}

fn small(v: &Value, path: &str) -> CliResult<usize> {
    let n = uint(v, path)?;
    usize::try_from(n).map_err(|_| CliError::schema(path, "too large"))
}

pub fn bits_from_str(s: &str, path: &str) -> CliResult<Bits> {
    Bits::from_str(s).map_err(|e| CliError::schema(path, e.to_string()))
}

fn bits_json(v: &Value, path: &str) -> CliResult<Bits> {
    bits_from_str(v.as_str().ok_or_else(|| CliError::schema(path, "expected a bit-string such as \"0110\""))?, path)
}

// ---------------------------------------------------------------------------
// Circuits

fn gate_json(g: &Gate) -> Value {
    match *g {
        Gate::And(a, b) => json!({"op": "AND", "a": a, "b": b}),
        Gate::Or(a, b) => json!({"op": "OR", "a": a, "b": b}),
        Gate::Xor(a, b) => json!({"op": "XOR", "a": a, "b": b}),
        Gate::Not(a) => json!({"op": "NOT", "a": a}),
        Gate::Const(v) => json!({"op": "CONST", "value": v}),
    }
}

/// Reads a gate list over `inputs` input wires. NAND, NOR, XNOR and
/// MUX (`s ? b : a`) are expanded into the core gate set; later wire
/// numbers in the file keep referring to the file's own gates.
fn gate_list_from_json(obj: &Map<String, Value>, inputs: usize, path: &str) -> CliResult<GateList> {
    let gates_path = join(path, "gates");
    let file_gates = array(field(obj, "gates", path)?, &gates_path)?;
    let mut map: Vec<Wire> = (0..inputs as Wire).collect();
    let mut gates: Vec<Gate> = Vec::new();
    for (i, g) in file_gates.iter().enumerate() {
        let here = format!("{gates_path}[{i}]");
        let go = object(g, &here)?;
        let op = field(go, "op", &here)?.as_str().ok_or_else(|| CliError::schema(join(&here, "op"), "expected a string"))?;
        let operand = |key: &str| -> CliResult<Wire> {
            let p = join(&here, key);
            let w = small(field(go, key, &here)?, &p)?;
            map.get(w).copied().ok_or_else(|| CliError::schema(p, format!("wire {w} is not defined before gate {i}")))
        };
        let next = (inputs + gates.len()) as Wire;
        let new: Vec<Gate> = match op.to_ascii_uppercase().as_str() {
            "AND" => vec![Gate::And(operand("a")?, operand("b")?)],
            "OR" => vec![Gate::Or(operand("a")?, operand("b")?)],
            "XOR" => vec![Gate::Xor(operand("a")?, operand("b")?)],
            "NOT" => vec![Gate::Not(operand("a")?)],
            "CONST" => {
                let p = join(&here, "value");
                let v = match field(go, "value", &here)? {
                    Value::Bool(b) => *b,
                    Value::Number(n) if n.as_u64() == Some(0) => false,
                    Value::Number(n) if n.as_u64() == Some(1) => true,
                    other => return Err(CliError::schema(p, format!("expected true/false, got {other}"))),
                };
                vec![Gate::Const(v)]
            }
            "NAND" => vec![Gate::And(operand("a")?, operand("b")?), Gate::Not(next)],
            "NOR" => vec![Gate::Or(operand("a")?, operand("b")?), Gate::Not(next)],
            "XNOR" => vec![Gate::Xor(operand("a")?, operand("b")?), Gate::Not(next)],
            "MUX" => {
                let (s, a, b) = (operand("s")?, operand("a")?, operand("b")?);
                vec![Gate::Not(s), Gate::And(a, next), Gate::And(b, s), Gate::Or(next + 1, next + 2)]
            }
            other => {
                return Err(CliError::schema(
                    join(&here, "op"),
                    format!("unknown gate {other:?}; expected AND, OR, XOR, NOT, CONST, NAND, NOR, XNOR or MUX"),
                ))
            }
        };
        gates.extend(new);
        map.push((inputs + gates.len() - 1) as Wire);
    }
    let out_path = join(path, "outputs");
    let outputs = array(field(obj, "outputs", path)?, &out_path)?
        .iter()
        .enumerate()
        .map(|(j, w)| {
            let p = format!("{out_path}[{j}]");
            let w = small(w, &p)?;
            map.get(w).copied().ok_or_else(|| CliError::schema(p, format!("wire {w} does not exist")))
        })
        .collect::<CliResult<Vec<Wire>>>()?;
    GateList::new(inputs, gates, outputs).map_err(|e| CliError::schema(path_or_doc(path), e.to_string()))
}

fn path_or_doc(path: &str) -> &str {
    if path.is_empty() {
        "(document)"
    } else {
        path
    }
}

fn gates_json(g: &GateList) -> (Value, Value) {
    (Value::Array(g.gates().iter().map(gate_json).collect()), json!(g.outputs()))
}

/// `{"n", "m", "gates", "outputs"}`: state wires `0..n`, randomness `n..n+m`.
pub fn chain_circuit_from_json(v: &Value, path: &str) -> CliResult<ChainCircuit> {
    let obj = object(v, path)?;
    let n = small(field(obj, "n", path)?, &join(path, "n"))?;
    let m = small(field(obj, "m", path)?, &join(path, "m"))?;
    let rule = gate_list_from_json(obj, n + m, path)?;
    if rule.output_width() != n {
        return Err(CliError::schema(join(path, "outputs"), format!("a chain rule needs exactly n = {n} outputs, got {}", rule.output_width())));
    }
    ChainCircuit::new(n, m, rule).map_err(|e| CliError::schema(path_or_doc(path), e.to_string()))
}

pub fn chain_circuit_json(c: &ChainCircuit) -> Value {
    let (gates, outputs) = gates_json(c.rule());
    json!({"n": c.state_bits(), "m": c.random_bits(), "gates": gates, "outputs": outputs})
}

/// `{"inputs", "gates", "outputs"}`; `{"n", ...}` with `n` uniform input
/// wires is read the same way.
pub fn sampler_from_json(v: &Value, path: &str) -> CliResult<SamplerCircuit> {
    let obj = object(v, path)?;
    let inputs = match (obj.get("inputs"), obj.get("n")) {
        (Some(k), _) => small(k, &join(path, "inputs"))?,
        (None, Some(n)) => small(n, &join(path, "n"))? + obj.get("m").map(|m| small(m, &join(path, "m"))).transpose()?.unwrap_or(0),
        (None, None) => return Err(CliError::schema(join(path, "inputs"), "missing")),
    };
    Ok(SamplerCircuit::new(gate_list_from_json(obj, inputs, path)?))
}

pub fn sampler_json(c: &SamplerCircuit) -> Value {
    let (gates, outputs) = gates_json(c.gate_list());
    json!({"inputs": c.input_width(), "gates": gates, "outputs": outputs})
}

// ---------------------------------------------------------------------------
// Matrices

fn states_from_json(v: &Value, path: &str) -> CliResult<StateSpace> {
    let list = array(v, path)?;
    let mut width = None;
    let mut states = Vec::with_capacity(list.len());
    for (i, s) in list.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let b = bits_json(s, &p)?;
        match width {
            None => width = Some(b.width),
            Some(w) if w != b.width => return Err(CliError::schema(p, format!("width {} differs from the first state's {w}", b.width))),
            _ => {}
        }
        states.push(b.value);
    }
    StateSpace::new(width.unwrap_or(0), states).map_err(|e| CliError::schema(path, e.to_string()))
}

fn states_json(space: &StateSpace) -> Value {
    Value::Array((0..space.len()).map(|i| json!(space.state(i).to_string())).collect())
}

/// States `0..n` numbered in `ceil(log2 n)` bits.
pub fn indexed_space(n: usize) -> CliResult<StateSpace> {
    StateSpace::new(bits_for(n), (0..n as u64).collect()).map_err(|e| CliError::schema("states", e.to_string()))
}

/// `{"states", "rows": [[[num, den], ...], ...]}` or `{"states"?, "weights": [[x, y, w], ...]}`.
/// Weighted edges name states by index and are symmetric.
pub fn matrix_from_json(v: &Value, path: &str) -> CliResult<TransitionMatrix> {
    let obj = object(v, path)?;
    let states_path = join(path, "states");
    match (obj.get("rows"), obj.get("weights")) {
        (Some(_), Some(_)) => Err(CliError::schema(path_or_doc(path), "give either rows or weights, not both")),
        (Some(rows), None) => {
            let rows_path = join(path, "rows");
            let rows = array(rows, &rows_path)?;
            let space = match obj.get("states") {
                Some(s) => states_from_json(s, &states_path)?,
                None => indexed_space(rows.len())?,
            };
            let n = space.len();
            if rows.len() != n {
                return Err(CliError::schema(rows_path, format!("{} rows for {n} states", rows.len())));
            }
            let mut data = Vec::with_capacity(n * n);
            for (i, row) in rows.iter().enumerate() {
                let rp = format!("{rows_path}[{i}]");
                let row = array(row, &rp)?;
                if row.len() != n {
                    return Err(CliError::schema(rp, format!("{} entries for {n} states", row.len())));
                }
                for (j, e) in row.iter().enumerate() {
                    data.push(rational_from_json(e, &format!("{rp}[{j}]"))?);
                }
            }
            TransitionMatrix::from_probabilities(space, Matrix::from_rows(n, data))
                .map_err(|e| CliError::schema(rows_path, e.to_string()))
        }
        (None, Some(weights)) => {
            let wp = join(path, "weights");
            let list = array(weights, &wp)?;
            let mut triples = Vec::with_capacity(list.len());
            for (i, t) in list.iter().enumerate() {
                let tp = format!("{wp}[{i}]");
                let t = array(t, &tp)?;
                if t.len() != 3 {
                    return Err(CliError::schema(tp, "expected [x, y, w]"));
                }
                triples.push((small(&t[0], &format!("{tp}[0]"))?, small(&t[1], &format!("{tp}[1]"))?, rational_from_json(&t[2], &format!("{tp}[2]"))?));
            }
            let space = match obj.get("states") {
                Some(s) => states_from_json(s, &states_path)?,
                None => indexed_space(triples.iter().map(|t| t.0.max(t.1) + 1).max().unwrap_or(0))?,
            };
            let w = Weights::new(space.len(), triples).map_err(|e| CliError::schema(wp.clone(), e.to_string()))?;
            TransitionMatrix::from_weights(space, w).map_err(|e| CliError::schema(wp, e.to_string()))
        }
        (None, None) => Err(CliError::schema(join(path, "rows"), "missing (or give weights)")),
    }
}

/// Weighted chains keep their weights; others are written as rows.
pub fn matrix_json(p: &TransitionMatrix) -> Value {
    match p.weights() {
        Some(w) => json!({
            "states": states_json(p.space()),
            "weights": w.edges().map(|(x, y, w)| json!([x, y, rational_json(w)])).collect::<Vec<_>>(),
        }),
        None => json!({
            "states": states_json(p.space()),
            "rows": p.probs().rows().map(|r| r.iter().map(rational_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Instances

/// A promise instance with the record of how it was made.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub instance: PromiseInstance,
    /// `{"gadget", "params"}` for generated instances.
    pub provenance: Option<Value>,
}

fn chain_json(chain: &ChainSpec) -> Value {
    match chain {
        ChainSpec::Matrix(p) => json!({"matrix": matrix_json(p)}),
        ChainSpec::Circuit { circuit, space } => json!({"circuit": chain_circuit_json(circuit), "states": states_json(space)}),
    }
}

fn chain_from_json(v: &Value, path: &str) -> CliResult<ChainSpec> {
    let obj = object(v, path)?;
    match (obj.get("matrix"), obj.get("circuit")) {
        (Some(m), None) => Ok(ChainSpec::Matrix(matrix_from_json(m, &join(path, "matrix"))?)),
        (None, Some(c)) => {
            let circuit = chain_circuit_from_json(c, &join(path, "circuit"))?;
            let sp = join(path, "states");
            let space = states_from_json(field(obj, "states", path)?, &sp)?;
            if space.width() != circuit.state_bits() {
                return Err(CliError::schema(sp, format!("states are {} bits wide, the circuit has n = {}", space.width(), circuit.state_bits())));
            }
            Ok(ChainSpec::Circuit { circuit, space })
        }
        _ => Err(CliError::schema(path, "expected exactly one of \"matrix\" or \"circuit\"")),
    }
}

fn time_json(t: u64) -> Value {
    json!(t)
}

pub fn instance_from_json(v: &Value) -> CliResult<InstanceFile> {
    let obj = object(v, "")?;
    let kind_v = field(obj, "kind", "")?;
    let kind = Kind::from_str(kind_v.as_str().ok_or_else(|| CliError::schema("kind", "expected a string"))?)
        .map_err(|e| CliError::schema("kind", e.to_string()))?;
    let chain = chain_from_json(field(obj, "chain", "")?, "chain")?;
    let x_bits = bits_json(field(obj, "x", "")?, "x")?;
    let space = chain.space();
    if x_bits.width != space.width() {
        return Err(CliError::schema("x", format!("start is {} bits wide, states are {}", x_bits.width, space.width())));
    }
    let x = space.index_of(x_bits.value).ok_or_else(|| CliError::schema("x", format!("start {x_bits} is not one of the listed states")))?;
    let t = uint(field(obj, "t", "")?, "t").map_err(|e| match e {
        CliError::Schema { field, message, .. } => {
            CliError::Schema { path: String::new(), field, message: format!("{message} (times up to 2^64 - 1 are supported)") }
        }
        other => other,
    })?;
    let t_max = match (kind, obj.get("t_max")) {
        (Kind::Gtc, Some(_)) => return Err(CliError::schema("t_max", "GTC instances carry no t_max")),
        (Kind::Gtc, None) => None,
        (_, Some(v)) => Some(uint(v, "t_max")?),
        (_, None) => return Err(CliError::schema("t_max", format!("missing; {} instances need t_max", kind.name()))),
    };
    let c = rational_from_json(field(obj, "c", "")?, "c")?;
    let delta = rational_from_json(field(obj, "delta", "")?, "delta")?;
    let provenance = obj.get("provenance").cloned();
    let instance = PromiseInstance::new(kind, chain, x, t, t_max, c, delta).map_err(|e| CliError::schema("(instance)", e.to_string()))?;
    Ok(InstanceFile { instance, provenance })
}

pub fn instance_json(file: &InstanceFile) -> Value {
    let inst = &file.instance;
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(inst.kind.name()));
    obj.insert("chain".into(), chain_json(&inst.chain));
    obj.insert("x".into(), json!(inst.space().state(inst.x).to_string()));
    obj.insert("t".into(), time_json(inst.t));
    if let Some(t_max) = inst.t_max {
        obj.insert("t_max".into(), time_json(t_max));
    }
    obj.insert("c".into(), rational_json(&inst.c));
    obj.insert("delta".into(), rational_json(&inst.delta));
    if let Some(p) = &file.provenance {
        obj.insert("provenance".into(), p.clone());
    }
    Value::Object(obj)
}

// ---------------------------------------------------------------------------
// Files

/// Pretty JSON with sorted keys and a trailing newline.
pub fn canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema {
        path: path.display().to_string(),
        field: "(document)".into(),
        message: format!("not valid JSON: {e}"),
    })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn load<T>(path: &Path, parse: impl FnOnce(&Value) -> CliResult<T>) -> CliResult<T> {
    let v = read_json(path)?;
    parse(&v).map_err(|e| e.in_file(&path.display().to_string()))
}

pub fn load_chain_circuit(path: &Path) -> CliResult<ChainCircuit> {
    load(path, |v| chain_circuit_from_json(v, ""))
}

pub fn load_sampler(path: &Path) -> CliResult<SamplerCircuit> {
    load(path, |v| sampler_from_json(v, ""))
}

pub fn load_matrix(path: &Path) -> CliResult<TransitionMatrix> {
    load(path, |v| matrix_from_json(v, ""))
}

pub fn load_instance(path: &Path) -> CliResult<InstanceFile> {
    load(path, instance_from_json)
}

/// DIMACS CNF: optional `c` comment lines, a `p cnf <vars> <clauses>`
/// header, then clauses terminated by `0`.
pub fn parse_dimacs(text: &str) -> CliResult<(usize, Vec<Vec<i64>>)> {
    let mut vars = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(CliError::schema(format!("line {}", lineno + 1), "expected `p cnf <vars> <clauses>`"));
            }
            vars = Some(parts[1].parse().map_err(|_| CliError::schema(format!("line {}", lineno + 1), "bad variable count"))?);
            continue;
        }
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| CliError::schema(format!("line {}", lineno + 1), format!("bad literal {tok:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let vars = vars.ok_or_else(|| CliError::schema("p", "missing `p cnf` header"))?;
    Ok((vars, clauses))
}

/// `true` when `r` is `k / 2^j` for some `j`.
pub fn is_dyadic(r: &Rational) -> bool {
    let d = r.denom();
    d.is_positive() && (d & (d - BigInt::one())).is_zero()
}
