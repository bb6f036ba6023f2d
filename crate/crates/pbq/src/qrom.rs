//! Data-access oracles: select (unary iteration), logarithmic fanout and
//! SELECTSWAP, with their closed-form cost models.
//!
//! The select-part cost of SELECTSWAP is evaluated on the `N/lambda`-entry
//! q-register, i.e. `4(N/l)log(N/l) - 4(N/l) + 7 l beta` T gates.

use crate::circuit::{Circuit, Gate};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataTable {
    pub entries: Vec<u64>,
    pub beta: u32,
}

impl DataTable {
    pub fn new(entries: Vec<u64>, beta: u32) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("data table is empty".into()));
        }
        if beta == 0 || beta > 63 {
            return Err(Error::Validation(format!("word size {beta} out of range")));
        }
        if let Some(w) = entries.iter().find(|&&w| w >> beta != 0) {
            return Err(Error::Validation(format!("word {w} does not fit in {beta} bits")));
        }
        Ok(DataTable { entries, beta })
    }

    pub fn padded_len(&self) -> usize {
        self.entries.len().next_power_of_two()
    }

    pub fn word(&self, j: usize) -> u64 {
        self.entries.get(j).copied().unwrap_or(0)
    }
}

pub fn log2_exact(n: u64) -> u32 {
    n.trailing_zeros()
}

/// Unary-iteration body: for each index value `j`, compute the AND of the
/// (possibly negated) index bits into a flag and apply `body(j, flag)`.
fn unary_iterate(
    circ: &mut Circuit,
    index: &[usize],
    anc: &[usize],
    n_entries: usize,
    mut body: impl FnMut(&mut Circuit, usize, Option<usize>) -> Result<()>,
) -> Result<()> {
    let n = index.len();
    for j in 0..n_entries {
        let flips: Vec<usize> = (0..n).filter(|&b| j >> b & 1 == 0).map(|b| index[b]).collect();
        for &q in &flips {
            circ.push(Gate::x(q))?;
        }
        let flag = match n {
            0 => None,
            1 => Some(index[0]),
            _ => {
                let mut ladder = Vec::new();
                circ.push(Gate::toffoli(index[0], index[1], anc[0]))?;
                ladder.push(Gate::toffoli(index[0], index[1], anc[0]));
                for k in 2..n {
                    let g = Gate::toffoli(anc[k - 2], index[k], anc[k - 1]);
                    circ.push(g.clone())?;
                    ladder.push(g);
                }
                let f = anc[n - 2];
                body(circ, j, Some(f))?;
                for g in ladder.into_iter().rev() {
                    circ.push(g)?;
                }
                for &q in &flips {
                    circ.push(Gate::x(q))?;
                }
                continue;
            }
        };
        body(circ, j, flag)?;
        for &q in &flips {
            circ.push(Gate::x(q))?;
        }
    }
    Ok(())
}

fn index_bits(len: usize) -> usize {
    len.next_power_of_two().trailing_zeros() as usize
}

/// `|j>|0> -> |j>|D(j)>` with one CX per set data bit.
pub fn build_select_oracle(d: &DataTable) -> Result<Circuit> {
    let n = index_bits(d.entries.len());
    let mut circ = Circuit::new();
    let index = circ.add_register("index", n)?;
    let value = circ.add_register("value", d.beta as usize)?;
    let anc = circ.add_register("anc", n.saturating_sub(1))?;
    unary_iterate(&mut circ, &index, &anc, d.padded_len(), |c, j, flag| {
        let w = d.word(j);
        for (b, &v) in value.iter().enumerate() {
            if w >> b & 1 == 1 {
                match flag {
                    Some(f) => c.push(Gate::cx(f, v))?,
                    None => c.push(Gate::x(v))?,
                }
            }
        }
        Ok(())
    })?;
    Ok(circ)
}

fn doubling_tree(targets: &[usize]) -> Vec<Gate> {
    let beta = targets.len();
    let mut gates = Vec::new();
    let mut span = 1;
    while span < beta {
        for i in 0..span {
            if i + span < beta {
                gates.push(Gate::cx(targets[i], targets[i + span]));
            }
        }
        span *= 2;
    }
    gates
}

/// Copy one control onto `beta` targets with `2 beta - 1` CX gates.
pub fn build_fanout(beta: usize) -> Result<Circuit> {
    if beta == 0 {
        return Err(Error::Validation("fanout needs at least one target".into()));
    }
    let mut circ = Circuit::new();
    let c = circ.add_register("index", 1)?[0];
    let t = circ.add_register("value", beta)?;
    let tree = doubling_tree(&t);
    for g in tree.iter().rev() {
        circ.push(g.adjoint())?;
    }
    circ.push(Gate::cx(c, t[0]))?;
    circ.extend(tree)?;
    Ok(circ)
}

/// SELECTSWAP lookup with multiplexing factor `lambda` (a power of two
/// dividing the padded table length). Block 0 of `value` receives `D(j)`;
/// the other `lambda - 1` blocks form the `garbage` register.
pub fn build_selectswap(d: &DataTable, lambda: usize) -> Result<Circuit> {
    let len = d.padded_len();
    if lambda == 0 || !lambda.is_power_of_two() || lambda > len {
        return Err(Error::Validation(format!("lambda={lambda} must be a power of two in 1..={len}")));
    }
    let beta = d.beta as usize;
    let r_bits = lambda.trailing_zeros() as usize;
    let q_entries = len / lambda;
    let q_bits = index_bits(q_entries);
    let mut circ = Circuit::new();
    let index = circ.add_register("index", r_bits + q_bits)?;
    let value = circ.add_register("value", beta)?;
    let garbage = circ.add_register("garbage", beta * (lambda - 1))?;
    let anc = circ.add_register("anc", q_bits.saturating_sub(1))?;
    let block = |i: usize, b: usize| if i == 0 { value[b] } else { garbage[(i - 1) * beta + b] };
    let (r_reg, q_reg) = index.split_at(r_bits);
    unary_iterate(&mut circ, q_reg, &anc, q_entries, |c, q, flag| {
        for r in 0..lambda {
            let w = d.word(q * lambda + r);
            for b in 0..beta {
                if w >> b & 1 == 1 {
                    match flag {
                        Some(f) => c.push(Gate::cx(f, block(r, b)))?,
                        None => c.push(Gate::x(block(r, b)))?,
                    }
                }
            }
        }
        Ok(())
    })?;
    for (t, &ctrl) in r_reg.iter().enumerate() {
        let step = 1 << t;
        for i in (0..lambda).step_by(2 * step) {
            for b in 0..beta {
                circ.push(Gate::fredkin(ctrl, block(i, b), block(i + step, b)))?;
            }
        }
    }
    Ok(circ)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Select,
    #[serde(rename = "selectswap")]
    SelectSwap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCost {
    pub t_count: u64,
    pub clifford_count: u64,
    pub qubit_count: u64,
    pub depth: u64,
    pub lambda: u64,
}

pub fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Select-part T and Clifford counts on `m` entries (power of two).
fn select_part(m: u64) -> (u64, u64) {
    let l = log2_exact(m) as u64;
    if m <= 1 {
        return (0, 0);
    }
    (4 * m * l - 4 * m, (6 * (4 * l)).saturating_sub(24))
}

/// Closed-form oracle costs; `n` is padded to a power of two.
pub fn cost_model(kind: Variant, n: u64, beta: u64, lambda: u64) -> Result<OracleCost> {
    if n == 0 || beta == 0 {
        return Err(Error::Validation("cost model needs N >= 1 and beta >= 1".into()));
    }
    let n = n.next_power_of_two();
    let logn = log2_exact(n) as u64;
    match kind {
        Variant::Select => {
            let (t, c) = select_part(n);
            Ok(OracleCost {
                t_count: t,
                clifford_count: n * beta + c,
                qubit_count: 2 * logn + beta,
                depth: n * (2 * logn.saturating_sub(1) + 3),
                lambda: 1,
            })
        }
        Variant::SelectSwap => {
            if lambda == 0 || !lambda.is_power_of_two() || lambda > n {
                return Err(Error::Validation(format!("lambda={lambda} must be a power of two dividing {n}")));
            }
            let m = n / lambda;
            let (t, c) = select_part(m);
            let logm = log2_exact(m) as u64;
            let logl = log2_exact(lambda) as u64;
            Ok(OracleCost {
                t_count: t + 7 * lambda * beta,
                clifford_count: n * beta + c + 10 * lambda * beta,
                qubit_count: lambda * beta + ceil_log2(m) + ceil_log2(lambda) + 1,
                depth: m * (2 * logm.saturating_sub(1) + 3) + beta * logl,
                lambda,
            })
        }
    }
}

/// The power-of-two `lambda` minimizing the SELECTSWAP T count (smallest on ties).
pub fn optimal_lambda(n: u64, beta: u64) -> Result<u64> {
    let padded = n.max(1).next_power_of_two();
    let mut best = (u64::MAX, 1);
    let mut lambda = 1;
    while lambda <= padded {
        let c = cost_model(Variant::SelectSwap, padded, beta, lambda)?;
        if c.t_count < best.0 {
            best = (c.t_count, lambda);
        }
        lambda *= 2;
    }
    Ok(best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{count_resources, unitary_of, CostModel, GateKind};

    fn read(circ: &Circuit, reg: &str, state: u128) -> u64 {
        let r = circ.register(reg).unwrap();
        ((state >> r.start) & ((1u128 << r.len) - 1)) as u64
    }

    #[test]
    fn select_loads_table() {
        let d = DataTable::new(vec![1, 2, 3, 0], 2).unwrap();
        let c = build_select_oracle(&d).unwrap();
        let out = c.simulate_basis(2).unwrap();
        assert_eq!(read(&c, "value", out), 3);
        assert_eq!(read(&c, "index", out), 2);
        assert_eq!(read(&c, "anc", out), 0);
    }

    #[test]
    fn zero_table_has_no_value_gates() {
        let d = DataTable::new(vec![0; 8], 3).unwrap();
        let c = build_select_oracle(&d).unwrap();
        let value = c.qubits_of("value");
        assert!(c.gates.iter().all(|g| g.targets.iter().all(|t| !value.contains(t))));
    }

    #[test]
    fn compute_toffolis_match_formula() {
        for n in [4u64, 8, 16] {
            let d = DataTable::new((0..n).map(|j| j % 4).collect(), 2).unwrap();
            let c = build_select_oracle(&d).unwrap();
            let toff = c.gates.iter().filter(|g| g.kind == GateKind::X && g.controls.len() == 2).count() as u64;
            let cost = cost_model(Variant::Select, n, 2, 1).unwrap();
            assert_eq!(toff / 2, cost.t_count / 4);
        }
    }

    #[test]
    fn fanout_counts() {
        for (beta, depth) in [(1, 1), (4, 5), (8, 7), (5, 7)] {
            let c = build_fanout(beta).unwrap();
            assert_eq!(c.gates.len(), 2 * beta - 1);
            let r = count_resources(&c, &CostModel::default()).unwrap();
            assert_eq!(r.depth_estimate, depth);
            for ctrl in 0..2u128 {
                for t in 0..(1u128 << beta) {
                    let out = c.simulate_basis(ctrl | t << 1).unwrap();
                    let want = if ctrl == 1 { t ^ ((1 << beta) - 1) } else { t };
                    assert_eq!(out, ctrl | want << 1);
                }
            }
        }
    }

    #[test]
    fn selectswap_example_and_degenerate_case() {
        let d = DataTable::new(vec![1, 2, 3, 0], 2).unwrap();
        let c = build_selectswap(&d, 2).unwrap();
        for j in 0..4u128 {
            assert_eq!(read(&c, "value", c.simulate_basis(j).unwrap()), d.word(j as usize));
        }
        let s1 = build_selectswap(&d, 1).unwrap();
        let s0 = build_select_oracle(&d).unwrap();
        assert_eq!(unitary_of(&s1).unwrap(), unitary_of(&s0).unwrap());
        assert!(build_selectswap(&d, 3).is_err());
        assert!(build_selectswap(&d, 8).is_err());
    }

    #[test]
    fn fredkin_census_matches_formula() {
        let d = DataTable::new((0..16).map(|j| j % 8).collect(), 3).unwrap();
        for lambda in [1usize, 2, 4, 8] {
            let c = build_selectswap(&d, lambda).unwrap();
            let fredkins = c.gates.iter().filter(|g| g.kind == GateKind::Swap && g.controls.len() == 1).count();
            assert_eq!(fredkins, 3 * (lambda - 1));
        }
    }

    #[test]
    fn cost_examples() {
        let c = cost_model(Variant::Select, 8, 4, 1).unwrap();
        assert_eq!((c.t_count, c.clifford_count, c.qubit_count), (64, 80, 10));
        let s = cost_model(Variant::SelectSwap, 16, 2, 2).unwrap();
        assert_eq!((s.t_count, s.qubit_count), (92, 9));
        assert_eq!(optimal_lambda(64, 4).unwrap(), 8);
        assert_eq!(optimal_lambda(4, 4).unwrap(), 1);
        assert!(cost_model(Variant::SelectSwap, 16, 2, 3).is_err());
    }
}
