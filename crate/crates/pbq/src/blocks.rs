//! Block-encoding circuits for factorized Hamiltonians.
//!
//! A one-body operator `sum_l sum_mu f_lmu T^mu(v_lmu)` is written as a
//! linear combination of Majorana pair products: with `U` the Givens network
//! taking `a^dag_0` to `sum_p v_p a^dag_p` in both spin sectors,
//! `T^mu(v) = U T^mu_00 U^dag` and every `T^mu_00` is a sum of two terms
//! `-(i/2) kappa g_A g_B` (plus the identity for `mu = 0`). PREP loads the
//! square roots of the branch weights, SELECT applies `i g~_A g~_B` with the
//! rotated Majoranas, and a phase oracle restores signs and powers of `i`.
//!
//! Internally the system register uses the spin-major layout so that a
//! controlled block swap moves the beta sector onto the alpha sector; the
//! orbital-major layout wraps SELECT in a fermionic swap network.
//!
//! Flag convention: an encoding succeeds when every ancilla register reads 0.

use crate::circuit::{quantize_angle, Circuit, Gate, GateKind};
use crate::encoding::{Letter, Ordering, PauliString};
use crate::factorize::{chebyshev_form, givens_schedule, FactorMode, GivensSchedule, OneBodyFactors, SpinSeed, TwoBodyFactors};
use crate::qrom::ceil_log2;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub const SYSTEM: &str = "system";
pub const L_REG: &str = "l";
pub const MU_REG: &str = "mu";
pub const SPIN_REG: &str = "s";
pub const ID_REG: &str = "id";
pub const RHO_REG: &str = "r";
pub const LEAF_REG: &str = "leaf";
pub const COMB_REG: &str = "comb";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleMode {
    Exact,
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Angle word size; used for discretization and for the cost model.
    pub bits: u32,
    pub mode: AngleMode,
    pub layout: Ordering,
    /// Minimum width of the `l` register, so that several encodings can
    /// share ancillas.
    pub index_bits: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { bits: 10, mode: AngleMode::Exact, layout: Ordering::Sm, index_bits: 0 }
    }
}

impl BuildOptions {
    pub fn validate(&self) -> Result<()> {
        if self.bits == 0 || self.bits > 52 {
            return Err(Error::Validation(format!("angle bits {} out of range 1..=52", self.bits)));
        }
        Ok(())
    }

    fn angle(&self, t: f64) -> f64 {
        match self.mode {
            AngleMode::Exact => t,
            AngleMode::Discrete => quantize_angle(t, self.bits),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockEncoding {
    pub circuit: Circuit,
    pub zeta: f64,
    /// Multiple of the identity added classically: `H = zeta * block + offset`.
    pub offset: f64,
    pub anc_registers: Vec<String>,
    pub encoded_dim: usize,
    pub layout: Ordering,
    pub verified: bool,
}

impl BlockEncoding {
    pub fn system_qubits(&self) -> Vec<usize> {
        self.circuit.qubits_of(SYSTEM)
    }

    pub fn anc_qubits(&self) -> Vec<usize> {
        self.anc_registers.iter().flat_map(|r| self.circuit.qubits_of(r)).collect()
    }
}

/// Givens schedules for every `(l, mu)` factor, for both seed sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleSet {
    pub n_orbitals: usize,
    pub n_l: usize,
    /// Indexed `l * 4 + mu`.
    pub alpha: Vec<Option<GivensSchedule>>,
    pub beta: Vec<Option<GivensSchedule>>,
    /// Whether any factor vector is complex (adds a phase layer to every network).
    pub complex: bool,
}

pub fn schedules_for(f: &OneBodyFactors) -> Result<ScheduleSet> {
    if f.mode != FactorMode::PerComponent {
        return Err(Error::Unsupported("SELECT circuits need per-component factors".into()));
    }
    let n_l = f.rank().max(1);
    let mut alpha = vec![None; n_l * 4];
    let mut beta = vec![None; n_l * 4];
    for t in &f.terms {
        let mu = t.mu.expect("per-component term");
        alpha[t.l * 4 + mu] = Some(givens_schedule(&t.v, Ordering::Sm, SpinSeed::Alpha)?);
        beta[t.l * 4 + mu] = Some(givens_schedule(&t.v, Ordering::Sm, SpinSeed::Beta)?);
    }
    let complex = alpha.iter().flatten().any(|s| !s.phases.is_empty());
    Ok(ScheduleSet { n_orbitals: f.n_orbitals, n_l, alpha, beta, complex })
}

fn push_ctrl(c: &mut Circuit, g: Gate, pos: &[usize], neg: &[usize]) -> Result<()> {
    for &q in neg {
        c.push(Gate::x(q))?;
    }
    let ctrls: Vec<usize> = pos.iter().chain(neg).copied().collect();
    c.push(g.controlled(&ctrls))?;
    for &q in neg {
        c.push(Gate::x(q))?;
    }
    Ok(())
}

/// Exact global phase `i^k` from Clifford gates (`S X S X = i`).
fn global_phase(c: &mut Circuit, q: usize, k: u8) -> Result<()> {
    for _ in 0..k % 4 {
        c.extend([Gate::s(q), Gate::x(q), Gate::s(q), Gate::x(q)])?;
    }
    Ok(())
}

/// Phase `i^k` on the basis state `pattern` of `qubits` (little-endian).
fn phase_on_pattern(c: &mut Circuit, qubits: &[usize], pattern: usize, k: u8, spare: usize) -> Result<()> {
    let k = k % 4;
    if k == 0 {
        return Ok(());
    }
    let Some((&t, rest)) = qubits.split_last() else {
        return global_phase(c, spare, k);
    };
    let flips: Vec<usize> = qubits.iter().enumerate().filter(|(b, _)| pattern >> b & 1 == 0).map(|(_, &q)| q).collect();
    for &q in &flips {
        c.push(Gate::x(q))?;
    }
    let g = match k {
        1 => Gate::s(t),
        2 => Gate::z(t),
        _ => Gate::sdg(t),
    };
    c.push(g.controlled(rest))?;
    for &q in &flips {
        c.push(Gate::x(q))?;
    }
    Ok(())
}

fn ry_gates(q: usize, rz: Gate) -> Vec<Gate> {
    vec![Gate::sdg(q), Gate::h(q), rz, Gate::h(q), Gate::s(q)]
}

/// Real amplitudes `sqrt(w_j / sum w)` on `qubits` by a cascade of
/// multiplexed Y rotations, most significant qubit first.
fn grover_rudolph(c: &mut Circuit, qubits: &[usize], weights: &[f64], opts: &BuildOptions) -> Result<()> {
    let n = qubits.len();
    debug_assert_eq!(weights.len(), 1 << n);
    for k in (0..n).rev() {
        let select = &qubits[k + 1..];
        let table: Vec<f64> = (0..1usize << (n - k - 1))
            .map(|h| {
                let (mut p0, mut p1) = (0.0, 0.0);
                for (j, w) in weights.iter().enumerate() {
                    if j >> (k + 1) == h {
                        if j >> k & 1 == 0 {
                            p0 += w;
                        } else {
                            p1 += w;
                        }
                    }
                }
                opts.angle(2.0 * p1.sqrt().atan2(p0.sqrt()))
            })
            .collect();
        let rz = if select.is_empty() {
            Gate::rz(qubits[k], table[0])
        } else {
            Gate::new(GateKind::MultiplexedRz { select: select.to_vec(), table, bits: opts.bits }, vec![qubits[k]])
        };
        c.extend(ry_gates(qubits[k], rz))?;
    }
    Ok(())
}

/// `exp(-i t_j/2 P)` with `t_j` read from the select register.
fn pauli_rotation(c: &mut Circuit, p: &PauliString, select: &[usize], table: Vec<f64>, bits: u32) -> Result<()> {
    let support = p.support();
    let &last = support.last().ok_or_else(|| Error::Layout("rotation about the identity".into()))?;
    let mut pre = Vec::new();
    for &q in &support {
        match p.letter(q) {
            Letter::X => pre.push(Gate::h(q)),
            Letter::Y => {
                pre.push(Gate::sdg(q));
                pre.push(Gate::h(q));
            }
            _ => {}
        }
    }
    for w in support.windows(2) {
        pre.push(Gate::cx(w[0], w[1]));
    }
    c.extend(pre.iter().cloned())?;
    if select.is_empty() {
        c.push(Gate::rz(last, table[0]))?;
    } else {
        c.push(Gate::new(GateKind::MultiplexedRz { select: select.to_vec(), table, bits }, vec![last]))?;
    }
    c.extend(pre.iter().rev().map(Gate::adjoint))
}

fn blank(c: &Circuit) -> Circuit {
    Circuit { n_qubits: c.n_qubits, registers: c.registers.clone(), gates: Vec::new() }
}

/// The multiplexed Givens network `sum_{l,mu} |l mu><l mu| (x) U_{l mu}` on one
/// spin sector of the spin-major system register.
fn network(layout: &Circuit, set: &ScheduleSet, seed: SpinSeed, opts: &BuildOptions) -> Result<Circuit> {
    let n = set.n_orbitals;
    let mut select = layout.qubits_of(L_REG);
    let l_pad = 1usize << select.len();
    select.extend(layout.qubits_of(MU_REG));
    let schedules = match seed {
        SpinSeed::Alpha => &set.alpha,
        SpinSeed::Beta => &set.beta,
    };
    let reference = GivensSchedule {
        thetas: vec![0.0; n.saturating_sub(1)],
        phases: if set.complex { vec![0.0; n] } else { Vec::new() },
        ordering: Ordering::Sm,
        spin_seed: seed,
        chain: (0..n).map(|p| (p, seed.sigma())).collect(),
        n_orbitals: n,
    };
    let slots = reference.rotations(n)?;
    let mut tables = vec![vec![0.0; l_pad * 4]; slots.len()];
    for l in 0..set.n_l {
        for mu in 0..4 {
            let Some(s) = &schedules[l * 4 + mu] else { continue };
            let mut s = s.clone();
            if set.complex && s.phases.is_empty() {
                s.phases = vec![0.0; n];
            }
            let rots = s.rotations(n)?;
            if rots.len() != slots.len() {
                return Err(Error::Layout("Givens schedules disagree in length".into()));
            }
            for (k, r) in rots.iter().enumerate() {
                if r.pauli != slots[k].pauli {
                    return Err(Error::Layout("Givens schedules disagree in structure".into()));
                }
                tables[k][l + l_pad * mu] = r.angle;
            }
        }
    }
    let mut c = blank(layout);
    for (slot, table) in slots.iter().zip(tables) {
        let table = table.into_iter().map(|t| opts.angle(t)).collect();
        pauli_rotation(&mut c, &slot.pauli, &select, table, opts.bits)?;
    }
    Ok(c)
}

fn layout_circuit(n: usize, lbits: usize) -> Result<Circuit> {
    let mut c = Circuit::new();
    c.add_register(SYSTEM, 2 * n)?;
    c.add_register(L_REG, lbits)?;
    c.add_register(MU_REG, 2)?;
    c.add_register(SPIN_REG, 1)?;
    c.add_register(ID_REG, 1)?;
    c.add_register(RHO_REG, 1)?;
    Ok(c)
}

fn lbits_for(f: &OneBodyFactors, opts: &BuildOptions) -> usize {
    (ceil_log2(f.rank().max(1) as u64) as usize).max(opts.index_bits)
}

fn prep_qubits(c: &Circuit) -> Vec<usize> {
    [L_REG, MU_REG, SPIN_REG, ID_REG].iter().flat_map(|r| c.qubits_of(r)).collect()
}

/// Branch `(mu, s)`: spin of the second Majorana, Majorana flavors and the
/// sign `kappa` of `-(i/2) kappa g_A g_B` in `T^mu_00`.
struct Branch {
    xa: u8,
    yb: u8,
    kappa_negative: bool,
}

fn branch(mu: usize, s: usize) -> Branch {
    let rho = if mu == 1 || mu == 2 { 1 - s } else { s };
    Branch {
        xa: (mu == 2 && s == 1) as u8,
        yb: if mu == 2 && rho == 1 { 0 } else { 1 },
        kappa_negative: !matches!((mu, s), (3, 1) | (2, 1)),
    }
}

/// PREP weights over `|l mu s id>` (little-endian in that order) and their sum.
pub fn prep_weights(f: &OneBodyFactors, lbits: usize) -> Result<(Vec<f64>, f64)> {
    let l_pad = 1usize << lbits;
    let idx = |l: usize, mu: usize, s: usize, id: usize| l + l_pad * (mu + 4 * (s + 2 * id));
    let mut w = vec![0.0; l_pad * 16];
    for t in &f.terms {
        let mu = t.mu.ok_or_else(|| Error::Unsupported("PREP needs per-component factors".into()))?;
        if t.l >= l_pad {
            return Err(Error::Layout(format!("factor index l={} does not fit {lbits} bits", t.l)));
        }
        for s in 0..2 {
            w[idx(t.l, mu, s, 0)] += t.f.abs() / 2.0;
        }
    }
    w[idx(0, 0, 0, 1)] = f.identity_coefficient().abs();
    let zeta: f64 = w.iter().sum();
    if !(zeta > 0.0) {
        return Err(Error::Validation("all LCU weights are zero".into()));
    }
    Ok((w, zeta))
}

fn prep_on(c: &mut Circuit, f: &OneBodyFactors, opts: &BuildOptions) -> Result<f64> {
    let q = prep_qubits(c);
    let lbits = c.qubits_of(L_REG).len();
    let (w, zeta) = prep_weights(f, lbits)?;
    grover_rudolph(c, &q, &w, opts)?;
    Ok(zeta)
}

/// State preparation over the branch registers of the one-body layout.
pub fn build_prep(f: &OneBodyFactors, opts: &BuildOptions) -> Result<Circuit> {
    opts.validate()?;
    let mut c = layout_circuit(f.n_orbitals, lbits_for(f, opts))?;
    prep_on(&mut c, f, opts)?;
    Ok(c)
}

/// Controlled swap of the two spin blocks of a spin-major register:
/// identity for control `|0>`, `prod_p SWAP[p, p+N]` for control `|1>`.
/// The network is an involution, so it serves as both `S+` and `S-`.
pub fn build_spin_swap(n_system_qubits: usize) -> Result<Circuit> {
    if n_system_qubits % 2 == 1 {
        return Err(Error::Layout(format!("spin swap needs an even register, got {n_system_qubits}")));
    }
    let mut c = Circuit::new();
    let sys = c.add_register(SYSTEM, n_system_qubits)?;
    let ctrl = c.add_register("ctrl", 1)?[0];
    let n = n_system_qubits / 2;
    for p in 0..n {
        c.push(Gate::fredkin(ctrl, sys[p], sys[p + n]))?;
    }
    Ok(c)
}

/// The shared alpha-sector Givens network, multiplexed over `(l, mu)`.
pub fn build_cw00(set: &ScheduleSet, opts: &BuildOptions) -> Result<Circuit> {
    opts.validate()?;
    let lbits = (ceil_log2(set.n_l as u64) as usize).max(opts.index_bits);
    let layout = layout_circuit(set.n_orbitals, lbits)?;
    network(&layout, set, SpinSeed::Alpha, opts)
}

fn check_set(f: &OneBodyFactors, set: &ScheduleSet) -> Result<()> {
    if set.n_orbitals != f.n_orbitals {
        return Err(Error::Layout("schedule set and factors differ in orbital count".into()));
    }
    for t in &f.terms {
        let mu = t.mu.ok_or_else(|| Error::Unsupported("SELECT needs per-component factors".into()))?;
        if t.l >= set.n_l || set.alpha[t.l * 4 + mu].is_none() {
            return Err(Error::Validation(format!("missing Givens schedule for (l={}, mu={mu})", t.l)));
        }
    }
    Ok(())
}

/// Fermionic swaps taking the orbital-major qubit order to the spin-major one.
fn layout_conversion(n: usize) -> Vec<Gate> {
    let mut target: Vec<usize> = (0..2 * n)
        .map(|q| {
            let (p, s) = Ordering::Om.mode(q, n);
            Ordering::Sm.qubit(p, s, n)
        })
        .collect();
    let mut gates = Vec::new();
    for pass in 0..2 * n {
        for i in (pass % 2..2 * n - 1).step_by(2) {
            if target[i] > target[i + 1] {
                target.swap(i, i + 1);
                gates.push(Gate::swap(i, i + 1));
                gates.push(Gate::cz(i, i + 1));
            }
        }
    }
    gates
}

fn select_on(c: &mut Circuit, f: &OneBodyFactors, set: &ScheduleSet, opts: &BuildOptions, direct: bool) -> Result<()> {
    check_set(f, set)?;
    let n = f.n_orbitals;
    let conv = if opts.layout == Ordering::Om { layout_conversion(n) } else { Vec::new() };
    c.extend(conv.iter().cloned())?;

    let mu = c.qubits_of(MU_REG);
    let (s, id, r) = (c.qubits_of(SPIN_REG)[0], c.qubits_of(ID_REG)[0], c.qubits_of(RHO_REG)[0]);
    let rho_parity = [Gate::cx(s, r), Gate::cx(mu[0], r), Gate::cx(mu[1], r)];
    c.extend(rho_parity.iter().cloned())?;

    let ua = network(c, set, SpinSeed::Alpha, opts)?;
    let ub = if direct { Some(network(c, set, SpinSeed::Beta, opts)?) } else { None };

    // second Majorana (spin r) first, then the first one (spin s)
    for (ctrl, second) in [(r, true), (s, false)] {
        match &ub {
            None => {
                for p in 0..n {
                    c.push(Gate::fredkin(ctrl, p, p + n))?;
                }
                c.append(&ua.adjoint())?;
                seed(c, 0, &[], &[], ctrl, mu[0], mu[1], id, second)?;
                c.append(&ua)?;
                for p in 0..n {
                    c.push(Gate::fredkin(ctrl, p, p + n))?;
                }
            }
            Some(ub) => {
                c.append(&ua.adjoint())?;
                c.append(&ub.adjoint())?;
                seed(c, 0, &[], &[ctrl], ctrl, mu[0], mu[1], id, second)?;
                seed(c, n, &[ctrl], &[], ctrl, mu[0], mu[1], id, second)?;
                c.append(ub)?;
                c.append(&ua)?;
            }
        }
        // Jordan-Wigner string of the beta sector over every alpha qubit
        for p in 0..n {
            c.push(Gate::cz(ctrl, p))?;
        }
    }

    // phases sign(f) * kappa * i * (-i)^(xa + yb) per branch
    let pq = prep_qubits(c);
    let lbits = c.qubits_of(L_REG).len();
    let l_pad = 1usize << lbits;
    for t in &f.terms {
        let mu_t = t.mu.expect("checked");
        for sp in 0..2 {
            let b = branch(mu_t, sp);
            let k = (if t.f < 0.0 { 2 } else { 0 }) + (if b.kappa_negative { 2 } else { 0 }) + 1 + 3 * (b.xa + b.yb);
            phase_on_pattern(c, &pq, t.l + l_pad * (mu_t + 4 * sp), k % 4, 0)?;
        }
    }
    if f.identity_coefficient() < 0.0 {
        phase_on_pattern(c, &pq, l_pad * 8, 2, 0)?;
    }

    c.extend(rho_parity.iter().rev().cloned())?;
    c.extend(conv.iter().rev().cloned())?;
    Ok(())
}

/// Seed Majorana `g_{0, x}` on `q` (`X` or `X Z` up to phase), skipped on the
/// identity branch. The second Majorana has flavor 1 except for `mu = Y` with
/// a beta partner; the first has flavor 1 only for `mu = Y` with `s = 1`.
/// Both exceptions are the same `mu = Y, ctrl = 1` controlled `Z`.
#[allow(clippy::too_many_arguments)]
fn seed(c: &mut Circuit, q: usize, pos: &[usize], neg: &[usize], ctrl: usize, mu0: usize, mu1: usize, id: usize, second: bool) -> Result<()> {
    let mut ng = neg.to_vec();
    ng.push(id);
    if second {
        push_ctrl(c, Gate::z(q), pos, &ng)?;
    }
    if !neg.contains(&ctrl) {
        // mu = Y is (mu0, mu1) = (0, 1)
        let mut py = pos.to_vec();
        py.push(mu1);
        if !py.contains(&ctrl) {
            py.push(ctrl);
        }
        let mut ny = ng.clone();
        ny.push(mu0);
        push_ctrl(c, Gate::z(q), &py, &ny)?;
    }
    push_ctrl(c, Gate::x(q), pos, &ng)
}

fn build_select_impl(f: &OneBodyFactors, set: &ScheduleSet, opts: &BuildOptions, direct: bool) -> Result<Circuit> {
    opts.validate()?;
    let mut c = layout_circuit(f.n_orbitals, lbits_for(f, opts).max(ceil_log2(set.n_l as u64) as usize))?;
    select_on(&mut c, f, set, opts, direct)?;
    Ok(c)
}

/// Spin-swap SELECT: one shared alpha network retargeted to either spin
/// sector by controlled block swaps.
pub fn build_select(f: &OneBodyFactors, set: &ScheduleSet, opts: &BuildOptions) -> Result<Circuit> {
    build_select_impl(f, set, opts, false)
}

/// Baseline SELECT with separate alpha and beta networks.
pub fn build_select_direct(f: &OneBodyFactors, set: &ScheduleSet, opts: &BuildOptions) -> Result<Circuit> {
    build_select_impl(f, set, opts, true)
}

fn one_body_anc() -> Vec<String> {
    [L_REG, MU_REG, SPIN_REG, ID_REG, RHO_REG].iter().map(|s| s.to_string()).collect()
}

fn be_one_body_impl(f: &OneBodyFactors, set: &ScheduleSet, opts: &BuildOptions, direct: bool) -> Result<BlockEncoding> {
    opts.validate()?;
    let lbits = lbits_for(f, opts).max(ceil_log2(set.n_l as u64) as usize);
    let mut c = layout_circuit(f.n_orbitals, lbits)?;
    let zeta = prep_on(&mut c, f, opts)?;
    let prep = c.clone();
    select_on(&mut c, f, set, opts, direct)?;
    c.append(&prep.adjoint())?;
    Ok(BlockEncoding {
        circuit: c,
        zeta,
        offset: 0.0,
        anc_registers: one_body_anc(),
        encoded_dim: 1 << (2 * f.n_orbitals),
        layout: opts.layout,
        verified: false,
    })
}

/// `PREP^dag SELECT PREP`; the block times `zeta` is the one-body operator.
pub fn build_be_one_body(f: &OneBodyFactors, set: &ScheduleSet, opts: &BuildOptions) -> Result<BlockEncoding> {
    be_one_body_impl(f, set, opts, false)
}

pub fn build_be_one_body_direct(f: &OneBodyFactors, set: &ScheduleSet, opts: &BuildOptions) -> Result<BlockEncoding> {
    be_one_body_impl(f, set, opts, true)
}

/// `2|0><0| - 1` on the ancillas, `-1` realized as `(XZ)^2`.
fn reflection(c: &mut Circuit, anc: &[usize]) -> Result<()> {
    let (&t, rest) = anc.split_last().ok_or_else(|| Error::Composition("encoding has no ancilla".into()))?;
    for &q in anc {
        c.push(Gate::x(q))?;
    }
    c.push(Gate::z(t).controlled(rest))?;
    for &q in anc {
        c.push(Gate::x(q))?;
    }
    global_phase(c, t, 2)
}

/// Walk operator `R U` (time order: `U`, then the reflection).
pub fn build_walk(be: &BlockEncoding) -> Result<Circuit> {
    let mut c = be.circuit.clone();
    reflection(&mut c, &be.anc_qubits())?;
    Ok(c)
}

/// `U^dag R U`, whose block is `T_2(H/zeta) = 2(H/zeta)^2 - 1` for any
/// Hermitian block. Refuses unverified encodings unless `force` is set.
pub fn build_qubitization_step(be: &BlockEncoding, force: bool) -> Result<Circuit> {
    if !be.verified && !force {
        return Err(Error::Composition("qubitization step needs a verified block encoding".into()));
    }
    let mut c = build_walk(be)?;
    c.append(&be.circuit.adjoint())?;
    Ok(c)
}

fn controlled_on_pattern(c: &mut Circuit, sub: &Circuit, qubits: &[usize], pattern: usize) -> Result<()> {
    let flips: Vec<usize> = qubits.iter().enumerate().filter(|(b, _)| pattern >> b & 1 == 0).map(|(_, &q)| q).collect();
    for &q in &flips {
        c.push(Gate::x(q))?;
    }
    for g in &sub.gates {
        c.push(g.clone().controlled(qubits))?;
    }
    for &q in &flips {
        c.push(Gate::x(q))?;
    }
    Ok(())
}

/// Two-body encoding: an outer LCU over leaves `m` with weights `a_m^2 / 2`
/// and signs `s_m` selecting the qubitization step of leaf `m`. The block
/// times `zeta` plus `offset` reproduces `sum_m s_m h_m^2`.
pub fn build_be_two_body(f: &TwoBodyFactors, opts: &BuildOptions) -> Result<BlockEncoding> {
    opts.validate()?;
    let cheb = chebyshev_form(f);
    if cheb.terms.is_empty() {
        return Err(Error::Validation("two-body factorization has no nonzero leaves".into()));
    }
    let lbits = cheb
        .terms
        .iter()
        .map(|t| ceil_log2(f.leaves[t.leaf].factors.rank().max(1) as u64) as usize)
        .max()
        .unwrap_or(0)
        .max(opts.index_bits);
    let leaf_opts = BuildOptions { index_bits: lbits, ..*opts };
    let mut steps = Vec::new();
    for t in &cheb.terms {
        let factors = &f.leaves[t.leaf].factors;
        let be = build_be_one_body(factors, &schedules_for(factors)?, &leaf_opts)?;
        steps.push(build_qubitization_step(&be, true)?);
    }
    let mut c = blank(&steps[0]);
    let leaf = c.add_register(LEAF_REG, ceil_log2(cheb.terms.len() as u64) as usize)?;
    let mut weights = vec![0.0; 1 << leaf.len()];
    for (m, t) in cheb.terms.iter().enumerate() {
        weights[m] = t.weight;
    }
    grover_rudolph(&mut c, &leaf, &weights, opts)?;
    let prep = c.clone();
    for (m, (t, step)) in cheb.terms.iter().zip(&steps).enumerate() {
        if t.sign < 0.0 {
            phase_on_pattern(&mut c, &leaf, m, 2, 0)?;
        }
        controlled_on_pattern(&mut c, step, &leaf, m)?;
    }
    c.append(&prep.adjoint())?;
    let mut anc = one_body_anc();
    anc.push(LEAF_REG.into());
    Ok(BlockEncoding {
        circuit: c,
        zeta: cheb.zeta,
        offset: cheb.offset,
        anc_registers: anc,
        encoded_dim: 1 << (2 * f.n_orbitals),
        layout: opts.layout,
        verified: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Combiner {
    /// `RY` with `cos^2(theta/2) = zeta0 / (zeta0 + zeta1)`.
    Weighted,
    /// Plain Hadamard; requires equal normalizations.
    Hadamard,
}

fn embed(target: &Circuit, sub: &Circuit) -> Result<Circuit> {
    let mut map = vec![usize::MAX; sub.n_qubits];
    for r in &sub.registers {
        let t = target
            .register(&r.name)
            .ok_or_else(|| Error::Composition(format!("register '{}' missing from the combined layout", r.name)))?;
        if t.len < r.len {
            return Err(Error::Composition(format!("register '{}' does not fit", r.name)));
        }
        for k in 0..r.len {
            map[r.start + k] = t.start + k;
        }
    }
    if map.contains(&usize::MAX) {
        return Err(Error::Composition("encoding has qubits outside its registers".into()));
    }
    sub.remapped(&map, target.n_qubits, target.registers.clone())
}

/// Sum of two encodings on the same system register with one extra ancilla.
/// Ancilla registers with equal names are shared (widened to the larger size).
pub fn add_encodings(u0: &BlockEncoding, u1: &BlockEncoding, combiner: Combiner) -> Result<BlockEncoding> {
    let s0 = u0.circuit.register(SYSTEM).ok_or_else(|| Error::Composition("first encoding has no system register".into()))?;
    let s1 = u1.circuit.register(SYSTEM).ok_or_else(|| Error::Composition("second encoding has no system register".into()))?;
    if s0.len != s1.len || u0.encoded_dim != u1.encoded_dim {
        return Err(Error::Composition(format!("system registers differ ({} vs {} qubits)", s0.len, s1.len)));
    }
    if u0.layout != u1.layout {
        return Err(Error::Composition("encodings use different qubit layouts".into()));
    }
    let (z0, z1) = (u0.zeta, u1.zeta);
    if !(z0 > 0.0 && z1 > 0.0) {
        return Err(Error::Composition("normalizations must be positive".into()));
    }
    let mut sizes: Vec<(String, usize)> = vec![(SYSTEM.into(), s0.len)];
    for be in [u0, u1] {
        for r in &be.circuit.registers {
            match sizes.iter_mut().find(|(n, _)| *n == r.name) {
                Some(e) => e.1 = e.1.max(r.len),
                None => sizes.push((r.name.clone(), r.len)),
            }
        }
    }
    let mut c = Circuit::new();
    for (name, len) in &sizes {
        c.add_register(name, *len)?;
    }
    let comb = c.add_register(COMB_REG, 1)?[0];
    let zeta = match combiner {
        Combiner::Weighted => z0 + z1,
        Combiner::Hadamard => {
            if (z0 - z1).abs() > 1e-12 * z0.max(z1) {
                return Err(Error::Composition(format!("Hadamard combiner needs equal normalizations, got {z0} and {z1}")));
            }
            2.0 * z0
        }
    };
    let v: Vec<Gate> = match combiner {
        Combiner::Weighted => ry_gates(comb, Gate::rz(comb, 2.0 * (z0 / (z0 + z1)).sqrt().acos())),
        Combiner::Hadamard => vec![Gate::h(comb)],
    };
    c.extend(v.iter().cloned())?;
    let (e0, e1) = (embed(&c, &u0.circuit)?, embed(&c, &u1.circuit)?);
    controlled_on_pattern(&mut c, &e0, &[comb], 0)?;
    controlled_on_pattern(&mut c, &e1, &[comb], 1)?;
    c.extend(v.iter().rev().map(Gate::adjoint))?;
    let mut anc: Vec<String> = Vec::new();
    for name in u0.anc_registers.iter().chain(&u1.anc_registers) {
        if !anc.contains(name) {
            anc.push(name.clone());
        }
    }
    anc.push(COMB_REG.into());
    Ok(BlockEncoding {
        circuit: c,
        zeta,
        offset: u0.offset + u1.offset,
        anc_registers: anc,
        encoded_dim: u0.encoded_dim,
        layout: u0.layout,
        verified: false,
    })
}
