//! Browser demo: QROM lookup costs, OM/SM Pauli weights and CAS sizes.
//!
//! Every export returns a JSON string; failures come back as `{"error": ...}`.

use pbq::encoding::{pauli_weight, Ordering};
use pbq::qrom::{cost_model, optimal_lambda, Variant};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(r: pbq::Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// SELECT and SELECTSWAP T counts for every power-of-two `lambda`.
#[wasm_bindgen]
pub fn qrom_costs(n: u32, beta: u32) -> String {
    respond((|| {
        let (n, beta) = (n as u64, beta as u64);
        let best = optimal_lambda(n, beta)?;
        let select = cost_model(Variant::Select, n, beta, 1)?;
        let mut sweep = Vec::new();
        let mut lambda = 1;
        while lambda <= n.max(1).next_power_of_two() {
            let c = cost_model(Variant::SelectSwap, n, beta, lambda)?;
            sweep.push(json!({ "lambda": lambda, "t_count": c.t_count, "qubits": c.qubit_count }));
            lambda *= 2;
        }
        Ok(json!({ "optimal_lambda": best, "select_t": select.t_count, "select_qubits": select.qubit_count, "sweep": sweep }))
    })())
}

/// Jordan-Wigner string length of `a^dag_{p sigma} a_{q rho}` in both orderings.
#[wasm_bindgen]
pub fn pauli_weights(n: u32, p: u32, q: u32, sigma: u32, rho: u32) -> String {
    respond((|| {
        let (n, p, q, s, r) = (n as usize, p as usize, q as usize, sigma as usize, rho as usize);
        if p >= n || q >= n || s > 1 || r > 1 {
            return Err(pbq::Error::Validation("orbital or spin index out of range".into()));
        }
        let (om, delta) = pauli_weight(p, q, s, r, Ordering::Om, n)?;
        let (sm, _) = pauli_weight(p, q, s, r, Ordering::Sm, n)?;
        Ok(json!({ "om": om, "sm": sm, "delta": delta }))
    })())
}

/// Spin-adapted CAS dimensions for every allowed total spin, plus the
/// determinant count they add up to.
#[wasm_bindgen]
pub fn cas_table(n: u32, eta: u32) -> String {
    respond((|| {
        if n > 30 || eta > 2 * n {
            return Err(pbq::Error::Validation(format!("need N <= 30 and eta <= 2N, got N={n}, eta={eta}")));
        }
        let rows: Vec<Value> = (0..=eta)
            .filter(|s| (eta - s).is_multiple_of(2))
            .map(|s| (s, pbq::pbham::cas_dimension(n, eta, s)))
            .filter(|&(_, d)| d > 0)
            .map(|(s, d)| json!({ "two_s": s, "csfs": d.to_string() }))
            .collect();
        let determinants: u128 = (0..eta as u128).fold(1, |acc, i| acc * (2 * n as u128 - i) / (i + 1));
        Ok(json!({ "spins": rows, "determinants": determinants.to_string() }))
    })())
}
