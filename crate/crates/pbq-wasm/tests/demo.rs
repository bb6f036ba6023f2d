use pbq_wasm::{cas_table, pauli_weights, qrom_costs};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn qrom_sweep_contains_the_optimum() {
    let v = parse(qrom_costs(64, 4));
    assert_eq!(v["optimal_lambda"], 8);
    let sweep = v["sweep"].as_array().unwrap();
    assert_eq!(sweep.len(), 7);
    let best = sweep.iter().min_by_key(|r| r["t_count"].as_u64().unwrap()).unwrap();
    assert_eq!(best["lambda"], 8);
    assert!(parse(qrom_costs(0, 4))["error"].is_string());
}

#[test]
fn spin_flip_weights() {
    let v = parse(pauli_weights(4, 1, 1, 0, 1));
    assert_eq!((v["om"].as_u64(), v["sm"].as_u64()), (Some(1), Some(4)));
    assert!(parse(pauli_weights(4, 4, 0, 0, 0))["error"].is_string());
}

#[test]
fn cas_rows_sum_to_determinants() {
    let v = parse(cas_table(6, 6));
    let total: u128 = v["spins"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["two_s"].as_u64().unwrap() as u128 + 1) * r["csfs"].as_str().unwrap().parse::<u128>().unwrap())
        .sum();
    assert_eq!(total.to_string(), v["determinants"].as_str().unwrap());
    assert_eq!(v["determinants"], "924");
}
