use mixgap::io::{
    canonical, chain_circuit_from_json, chain_circuit_json, format_decimal, instance_from_json, instance_json, is_dyadic,
    matrix_from_json, matrix_json, parse_dimacs, parse_rational, rational_json, sampler_from_json, sampler_json, InstanceFile,
};
use mixgap::report;
use mixgap_core::circuit::SamplerCircuit;
use mixgap_core::reductions::{sd_to_chain, tm_to_chain, unsat_to_chain, CnfFormula, ToyMachine};
use mixgap_core::rational;
use serde_json::{json, Value};

fn reparse_is_identical(text: &str, read: impl Fn(&Value) -> Value) {
    let v: Value = serde_json::from_str(text).unwrap();
    assert_eq!(canonical(&read(&v)), text);
}

#[test]
fn decimals_keep_fifteen_significant_digits() {
    assert_eq!(format_decimal(0.25), "0.250000000000000");
    assert_eq!(format_decimal(1.0 / 3.0), "0.333333333333333");
    assert_eq!(format_decimal(123.0), "123.000000000000");
    assert_eq!(format_decimal(0.0), "0.00000000000000");
    assert_eq!(format_decimal(1e20), "1.00000000000000e20");
    assert_eq!(format_decimal(-2.5e-7), "-2.50000000000000e-7");
    assert_eq!(format_decimal(f64::NAN), "NaN");
}

#[test]
fn rationals_parse_exactly() {
    assert_eq!(parse_rational("1/4"), Some(rational(1, 4)));
    assert_eq!(parse_rational("0.1"), Some(rational(1, 10)));
    assert_eq!(parse_rational("2.5e-1"), Some(rational(1, 4)));
    assert_eq!(parse_rational("-3"), Some(rational(-3, 1)));
    assert_eq!(parse_rational("6/8"), Some(rational(3, 4)));
    assert_eq!(parse_rational("1/0"), None);
    assert_eq!(parse_rational("abc"), None);
    assert_eq!(rational_json(&rational(6, 8)), json!([3, 4]));
}

#[test]
fn dyadic_test_rejects_thirds() {
    assert!(is_dyadic(&rational(3, 8)));
    assert!(is_dyadic(&rational(2, 1)));
    assert!(!is_dyadic(&rational(1, 3)));
}

#[test]
fn sd_chain_instance_round_trips() {
    let inst = sd_to_chain(&SamplerCircuit::identity(1), &SamplerCircuit::constant(1, 0), 4, 3, Some(4), rational(2, 1), rational(1, 10))
        .unwrap();
    let file = InstanceFile { instance: inst, provenance: Some(json!({"gadget": "sd-chain", "params": {"m": 4}})) };
    let text = canonical(&instance_json(&file));
    let back = instance_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(back, file);
    reparse_is_identical(&text, |v| instance_json(&instance_from_json(v).unwrap()));
}

#[test]
fn weighted_and_gtc_instances_round_trip() {
    let psi = CnfFormula::from_dimacs(3, &[vec![1, -2], vec![2, 3]]).unwrap();
    let unsat = unsat_to_chain(&psi, 2, rational(1, 10), rational(1, 1)).unwrap();
    let machine = ToyMachine::builtin("parity", 3).unwrap();
    let tm = tm_to_chain(&machine, &[true, false, true], rational(4, 1), rational(1, 10)).unwrap().instance;
    for inst in [unsat, tm] {
        let text = canonical(&instance_json(&InstanceFile { instance: inst, provenance: None }));
        reparse_is_identical(&text, |v| instance_json(&instance_from_json(v).unwrap()));
    }
}

#[test]
fn matrices_and_circuits_round_trip() {
    let m = json!({"weights": [[0, 0, 2], [0, 1, [1, 2]], [1, 1, 3]]});
    let p = matrix_from_json(&m, "").unwrap();
    let text = canonical(&matrix_json(&p));
    reparse_is_identical(&text, |v| matrix_json(&matrix_from_json(v, "").unwrap()));

    let rows = json!({"rows": [[[1, 2], [1, 2]], ["1/4", "3/4"]]});
    let text = canonical(&matrix_json(&matrix_from_json(&rows, "").unwrap()));
    reparse_is_identical(&text, |v| matrix_json(&matrix_from_json(v, "").unwrap()));

    let c = json!({"n": 2, "m": 1, "gates": [{"op": "XOR", "a": 0, "b": 2}], "outputs": [3, 1]});
    let text = canonical(&chain_circuit_json(&chain_circuit_from_json(&c, "").unwrap()));
    reparse_is_identical(&text, |v| chain_circuit_json(&chain_circuit_from_json(v, "").unwrap()));
}

#[test]
fn extended_gates_desugar() {
    // wire 3 = NAND(0, 1), wire 4 = MUX(s = 2, a = 0, b = 3), wire 5 = XNOR(3, 4)
    let v = json!({
        "inputs": 3,
        "gates": [
            {"op": "NAND", "a": 0, "b": 1},
            {"op": "MUX", "s": 2, "a": 0, "b": 3},
            {"op": "XNOR", "a": 3, "b": 4},
            {"op": "NOR", "a": 0, "b": 1},
        ],
        "outputs": [3, 4, 5, 6],
    });
    let c = sampler_from_json(&v, "").unwrap();
    for x in 0..8u64 {
        let (a, b, s) = (x & 1 == 1, x >> 1 & 1 == 1, x >> 2 & 1 == 1);
        let nand = !(a && b);
        let mux = if s { nand } else { a };
        let xnor = nand == mux;
        let nor = !(a || b);
        let want = nand as u64 | (mux as u64) << 1 | (xnor as u64) << 2 | (nor as u64) << 3;
        assert_eq!(c.eval(x), want, "input {x:03b}");
    }
    let again = sampler_from_json(&sampler_json(&c), "").unwrap();
    assert_eq!(again, c);
}

#[test]
fn schema_errors_name_the_field() {
    let bad_gate = json!({"inputs": 1, "gates": [{"op": "AND", "a": 0, "b": 5}], "outputs": [1]});
    let e = sampler_from_json(&bad_gate, "").unwrap_err().to_string();
    assert!(e.contains("gates[0].b"), "{e}");
    let no_tmax = json!({"kind": "GPTC", "chain": {"matrix": {"rows": [[[1, 1]]]}}, "x": "0", "t": 1, "c": 1, "delta": 0});
    let e = instance_from_json(&no_tmax).unwrap_err().to_string();
    assert!(e.contains("t_max"), "{e}");
    let gtc_tmax = json!({"kind": "GTC", "chain": {"matrix": {"rows": [[[1, 1]]]}}, "x": "0", "t": 1, "t_max": 3, "c": 1, "delta": 0});
    assert!(instance_from_json(&gtc_tmax).unwrap_err().to_string().contains("t_max"));
}

#[test]
fn big_gtc_times_are_accepted() {
    let v = json!({"kind": "GTC", "chain": {"matrix": {"rows": [[[1, 1]]]}}, "x": "0", "t": "18446744073709551615", "c": 1, "delta": 0});
    assert_eq!(instance_from_json(&v).unwrap().instance.t, u64::MAX);
}

#[test]
fn dimacs_headers_and_comments() {
    let (vars, clauses) = parse_dimacs("c example\np cnf 3 2\n1 -2 0\n2 3\n0\n").unwrap();
    assert_eq!(vars, 3);
    assert_eq!(clauses, vec![vec![1, -2], vec![2, 3]]);
    assert!(parse_dimacs("1 2 0\n").is_err());
}

#[test]
fn numbers_carry_provenance() {
    assert_eq!(report::exact(&rational(1, 4)), json!({"value": "0.250000000000000", "exact": "1/4", "provenance": "exact"}));
    let e = report::estimated(&rational(3, 4), 1000, 7);
    assert_eq!(e["provenance"], "estimated(1000, 7)");
}
