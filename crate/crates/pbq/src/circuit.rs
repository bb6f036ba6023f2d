//! Gate-level circuit IR over named registers, statevector evaluation and a
//! Clifford+T cost model.

use crate::pbham::DenseOperator;
use crate::qrom;
use crate::{CMatrix, Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomCost {
    pub t: u64,
    pub clifford: u64,
    pub rotations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Swap,
    Rz(f64),
    /// `RZ(table[j])` on the target, `j` read little-endian from `select`.
    /// `bits` is the word size of the angle register that loads the table.
    MultiplexedRz { select: Vec<usize>, table: Vec<f64>, bits: u32 },
    /// Arbitrary unitary on the targets; for tests only.
    Custom { tag: String, matrix: CMatrix, cost: Option<CustomCost> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Gate { kind, targets, controls: Vec::new() }
    }

    pub fn controlled(mut self, controls: &[usize]) -> Self {
        self.controls.extend_from_slice(controls);
        self
    }

    pub fn h(q: usize) -> Self {
        Gate::new(GateKind::H, vec![q])
    }
    pub fn x(q: usize) -> Self {
        Gate::new(GateKind::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Gate::new(GateKind::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Gate::new(GateKind::Z, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Gate::new(GateKind::S, vec![q])
    }
    pub fn sdg(q: usize) -> Self {
        Gate::new(GateKind::Sdg, vec![q])
    }
    pub fn rz(q: usize, theta: f64) -> Self {
        Gate::new(GateKind::Rz(theta), vec![q])
    }
    pub fn cx(c: usize, t: usize) -> Self {
        Gate::x(t).controlled(&[c])
    }
    pub fn cz(c: usize, t: usize) -> Self {
        Gate::z(t).controlled(&[c])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(GateKind::Swap, vec![a, b])
    }
    pub fn toffoli(c0: usize, c1: usize, t: usize) -> Self {
        Gate::x(t).controlled(&[c0, c1])
    }
    pub fn fredkin(c: usize, a: usize, b: usize) -> Self {
        Gate::swap(a, b).controlled(&[c])
    }

    pub fn qubits(&self) -> Vec<usize> {
        let mut q: Vec<usize> = self.targets.iter().chain(&self.controls).copied().collect();
        if let GateKind::MultiplexedRz { select, .. } = &self.kind {
            q.extend_from_slice(select);
        }
        q
    }

    pub fn adjoint(&self) -> Gate {
        let kind = match &self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::MultiplexedRz { select, table, bits } => GateKind::MultiplexedRz {
                select: select.clone(),
                table: table.iter().map(|t| -t).collect(),
                bits: *bits,
            },
            GateKind::Custom { tag, matrix, cost } => GateKind::Custom {
                tag: format!("{tag}^dag"),
                matrix: matrix.adjoint(),
                cost: cost.clone(),
            },
            k => k.clone(),
        };
        Gate { kind, targets: self.targets.clone(), controls: self.controls.clone() }
    }

    fn name(&self) -> String {
        let base = match &self.kind {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Sdg => "Sdg",
            GateKind::T => "T",
            GateKind::Tdg => "Tdg",
            GateKind::Swap => "SWAP",
            GateKind::Rz(_) => "RZ",
            GateKind::MultiplexedRz { .. } => "MRZ",
            GateKind::Custom { .. } => "U",
        };
        match (&self.kind, self.controls.len()) {
            (_, 0) => base.to_string(),
            (GateKind::X, 1) => "CX".into(),
            (GateKind::Z, 1) => "CZ".into(),
            (GateKind::X, 2) => "Toffoli".into(),
            (GateKind::Swap, 1) => "Fredkin".into(),
            (_, k) => format!("C{k}{base}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub start: usize,
    pub len: usize,
}

impl Register {
    pub fn qubits(&self) -> Vec<usize> {
        (self.start..self.start + self.len).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub registers: Vec<Register>,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a register of `len` fresh qubits.
    pub fn add_register(&mut self, name: &str, len: usize) -> Result<Vec<usize>> {
        if self.register(name).is_some() {
            return Err(Error::Composition(format!("register '{name}' already exists")));
        }
        let r = Register { name: name.to_string(), start: self.n_qubits, len };
        self.n_qubits += len;
        let q = r.qubits();
        self.registers.push(r);
        Ok(q)
    }

    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    pub fn qubits_of(&self, name: &str) -> Vec<usize> {
        self.register(name).map(Register::qubits).unwrap_or_default()
    }

    pub fn check_gate(&self, g: &Gate) -> Result<()> {
        let qs = g.qubits();
        for (i, &q) in qs.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::Layout(format!("gate {} uses unallocated qubit {q}", g.name())));
            }
            if qs[..i].contains(&q) {
                return Err(Error::Layout(format!("gate {} uses qubit {q} twice", g.name())));
            }
        }
        let arity = match &g.kind {
            GateKind::Swap => 2,
            GateKind::Custom { matrix, .. } => {
                let k = g.targets.len();
                if matrix.nrows() != 1 << k || matrix.ncols() != 1 << k {
                    return Err(Error::Layout("custom matrix size does not match targets".into()));
                }
                k
            }
            _ => 1,
        };
        if g.targets.len() != arity {
            return Err(Error::Layout(format!("gate {} needs {arity} targets", g.name())));
        }
        match &g.kind {
            GateKind::Rz(t) if !t.is_finite() => Err(Error::Layout("RZ angle must be finite".into())),
            GateKind::MultiplexedRz { select, table, .. } => {
                if table.len() != 1 << select.len() {
                    return Err(Error::Layout("angle table size does not match select register".into()));
                }
                if table.iter().any(|t| !t.is_finite()) {
                    return Err(Error::Layout("angle table has non-finite entries".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        self.check_gate(&g)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Append the gates of `other`, which must live on the same qubits.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::Composition("appended circuit is wider".into()));
        }
        self.extend(other.gates.iter().cloned())
    }

    pub fn adjoint(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            registers: self.registers.clone(),
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    /// Every gate additionally controlled on `controls`.
    pub fn controlled(&self, controls: &[usize]) -> Result<Circuit> {
        let mut c = Circuit { n_qubits: self.n_qubits, registers: self.registers.clone(), gates: Vec::new() };
        for g in &self.gates {
            c.push(g.clone().controlled(controls))?;
        }
        Ok(c)
    }

    /// Relabel qubit `q` as `map[q]` inside a circuit of `n_qubits`.
    pub fn remapped(&self, map: &[usize], n_qubits: usize, registers: Vec<Register>) -> Result<Circuit> {
        let m = |q: &usize| map[*q];
        let mut c = Circuit { n_qubits, registers, gates: Vec::new() };
        for g in &self.gates {
            let kind = match &g.kind {
                GateKind::MultiplexedRz { select, table, bits } => GateKind::MultiplexedRz {
                    select: select.iter().map(m).collect(),
                    table: table.clone(),
                    bits: *bits,
                },
                k => k.clone(),
            };
            c.push(Gate { kind, targets: g.targets.iter().map(m).collect(), controls: g.controls.iter().map(m).collect() })?;
        }
        Ok(c)
    }

    pub fn dump(&self) -> String {
        let mut out = format!("QUBITS {}\n", self.n_qubits);
        for r in &self.registers {
            let _ = writeln!(out, "REG {} {} {}", r.name, r.start, r.len);
        }
        let list = |v: &[usize]| {
            if v.is_empty() {
                "-".to_string()
            } else {
                v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
            }
        };
        for g in &self.gates {
            let _ = write!(out, "GATE {} {} {}", g.name(), list(&g.targets), list(&g.controls));
            match &g.kind {
                GateKind::Rz(t) => {
                    let _ = write!(out, " {t:e}");
                }
                GateKind::MultiplexedRz { select, table, bits } => {
                    let angles: Vec<String> = table.iter().map(|t| format!("{t:e}")).collect();
                    let _ = write!(out, " sel={} bits={bits} {}", list(select), angles.join(","));
                }
                GateKind::Custom { tag, .. } => {
                    let _ = write!(out, " {tag}");
                }
                _ => {}
            }
            out.push('\n');
        }
        out
    }
}

/// Sequential composition. Registers are matched by name; names unique to `b`
/// are appended after the qubits of `a`.
pub fn compose(a: &Circuit, b: &Circuit) -> Result<Circuit> {
    let mut out = Circuit { n_qubits: a.n_qubits, registers: a.registers.clone(), gates: Vec::new() };
    let mut map = vec![usize::MAX; b.n_qubits];
    let named: usize = b.registers.iter().map(|r| r.len).sum();
    if named != b.n_qubits && b.n_qubits > a.n_qubits {
        return Err(Error::Composition("unnamed qubits in the second circuit exceed the first".into()));
    }
    if named != b.n_qubits {
        for (q, slot) in map.iter_mut().enumerate() {
            *slot = q;
        }
    }
    for r in &b.registers {
        match a.register(&r.name) {
            Some(ra) if ra.len == r.len => {
                for k in 0..r.len {
                    map[r.start + k] = ra.start + k;
                }
            }
            Some(_) => return Err(Error::Composition(format!("register '{}' differs in size", r.name))),
            None => {
                let q = out.add_register(&r.name, r.len)?;
                for k in 0..r.len {
                    map[r.start + k] = q[k];
                }
            }
        }
    }
    if map.contains(&usize::MAX) {
        return Err(Error::Composition("second circuit has qubits outside its registers".into()));
    }
    let n = out.n_qubits;
    let regs = out.registers.clone();
    out.gates = a.gates.clone();
    let rb = b.remapped(&map, n, regs)?;
    out.gates.extend(rb.gates);
    Ok(out)
}

fn fixed_matrix(kind: &GateKind) -> Option<[[C64; 2]; 2]> {
    let o = C64::new(0.0, 0.0);
    let r = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let t = C64::from_polar(1.0, PI / 4.0);
    Some(match kind {
        GateKind::H => [[h, h], [h, -h]],
        GateKind::X => [[o, r], [r, o]],
        GateKind::Y => [[o, -i], [i, o]],
        GateKind::Z => [[r, o], [o, -r]],
        GateKind::S => [[r, o], [o, i]],
        GateKind::Sdg => [[r, o], [o, -i]],
        GateKind::T => [[r, o], [o, t]],
        GateKind::Tdg => [[r, o], [o, t.conj()]],
        GateKind::Rz(th) => [[C64::from_polar(1.0, -th / 2.0), o], [o, C64::from_polar(1.0, th / 2.0)]],
        _ => return None,
    })
}

fn mask(qs: &[usize]) -> usize {
    qs.iter().fold(0, |m, q| m | 1 << q)
}

pub fn apply_gate(g: &Gate, state: &mut [C64]) {
    let dim = state.len();
    let cm = mask(&g.controls);
    match &g.kind {
        GateKind::Swap => {
            let (a, b) = (1 << g.targets[0], 1 << g.targets[1]);
            for i in 0..dim {
                if i & cm == cm && i & a != 0 && i & b == 0 {
                    state.swap(i, i ^ a ^ b);
                }
            }
        }
        GateKind::MultiplexedRz { select, table, .. } => {
            let tb = 1 << g.targets[0];
            for i in 0..dim {
                if i & cm != cm || i & tb != 0 {
                    continue;
                }
                let j = select.iter().enumerate().fold(0, |acc, (k, &q)| acc | ((i >> q) & 1) << k);
                let th = table[j];
                state[i] *= C64::from_polar(1.0, -th / 2.0);
                state[i | tb] *= C64::from_polar(1.0, th / 2.0);
            }
        }
        GateKind::Custom { matrix, .. } => {
            let k = g.targets.len();
            let tm = mask(&g.targets);
            let offs: Vec<usize> = (0..1usize << k)
                .map(|sub| (0..k).fold(0, |acc, b| acc | ((sub >> b) & 1) << g.targets[b]))
                .collect();
            let mut buf = vec![C64::new(0.0, 0.0); offs.len()];
            for i in 0..dim {
                if i & cm != cm || i & tm != 0 {
                    continue;
                }
                for (a, &o) in offs.iter().enumerate() {
                    buf[a] = state[i | o];
                }
                for (r, &o) in offs.iter().enumerate() {
                    state[i | o] = (0..offs.len()).map(|c| matrix[(r, c)] * buf[c]).sum();
                }
            }
        }
        kind => {
            let u = fixed_matrix(kind).expect("single-qubit gate");
            let tb = 1 << g.targets[0];
            for i in 0..dim {
                if i & cm == cm && i & tb == 0 {
                    let (a, b) = (state[i], state[i | tb]);
                    state[i] = u[0][0] * a + u[0][1] * b;
                    state[i | tb] = u[1][0] * a + u[1][1] * b;
                }
            }
        }
    }
}

impl Circuit {
    pub fn apply(&self, state: &mut [C64]) {
        assert_eq!(state.len(), 1 << self.n_qubits);
        for g in &self.gates {
            apply_gate(g, state);
        }
    }

    /// Output state for a computational basis input.
    pub fn apply_basis(&self, input: usize) -> Vec<C64> {
        let mut st = vec![C64::new(0.0, 0.0); 1 << self.n_qubits];
        st[input] = C64::new(1.0, 0.0);
        self.apply(&mut st);
        st
    }

    /// Classical simulation of a circuit made of (multi-)controlled X and SWAP gates.
    pub fn simulate_basis(&self, input: u128) -> Result<u128> {
        let mut s = input;
        for g in &self.gates {
            let cm: u128 = g.controls.iter().fold(0, |m, q| m | 1 << q);
            if s & cm != cm {
                continue;
            }
            match g.kind {
                GateKind::X => s ^= 1 << g.targets[0],
                GateKind::Swap => {
                    let (a, b) = (g.targets[0], g.targets[1]);
                    let (ba, bb) = ((s >> a) & 1, (s >> b) & 1);
                    if ba != bb {
                        s ^= (1 << a) | (1 << b);
                    }
                }
                _ => return Err(Error::Unsupported(format!("gate {} is not a classical permutation", g.name()))),
            }
        }
        Ok(s)
    }
}

pub fn unitary_of(c: &Circuit) -> Result<DenseOperator> {
    if c.n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "dense unitary needs at most {MAX_DENSE_QUBITS} qubits, circuit has {}",
            c.n_qubits
        )));
    }
    let dim = 1usize << c.n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let st = c.apply_basis(col);
        for (row, v) in st.into_iter().enumerate() {
            m[(row, col)] = v;
        }
    }
    Ok(DenseOperator::new(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToffoliRule {
    /// 7 T, 6 CX and 2 H.
    Exact7T,
    /// 4 T, 3 CX and 3 other Cliffords plus one ancilla.
    Ancilla4T,
    /// Relative-phase Toffoli: 4 T, 3 CX and 2 H; valid only where the phase is irrelevant.
    Conditional4T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FredkinRule {
    /// CX, Toffoli, CX.
    CxToffoliCx,
    /// Three Toffolis.
    ThreeToffoli,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub toffoli_rule: ToffoliRule,
    pub fredkin_rule: FredkinRule,
    /// T count of one arbitrary-angle rotation is `ceil(rz_c0 + rz_c1 * bits)`.
    pub rz_c0: f64,
    pub rz_c1: f64,
    /// Angle precision in bits for plain RZ gates.
    pub bits: u32,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { toffoli_rule: ToffoliRule::Exact7T, fredkin_rule: FredkinRule::CxToffoliCx, rz_c0: 4.0, rz_c1: 3.0, bits: 10 }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.rz_c0 >= 0.0 && self.rz_c1 >= 0.0 && self.rz_c0.is_finite() && self.rz_c1.is_finite()) || self.bits == 0 {
            return Err(Error::Validation("cost model parameters must be positive".into()));
        }
        Ok(())
    }

    pub fn rz_t(&self, bits: u32) -> u64 {
        (self.rz_c0 + self.rz_c1 * bits as f64).ceil() as u64
    }

    /// (T, Clifford, ancilla) of one Toffoli.
    pub fn toffoli(&self) -> (u64, u64, u64) {
        match self.toffoli_rule {
            ToffoliRule::Exact7T => (7, 8, 0),
            ToffoliRule::Ancilla4T => (4, 6, 1),
            ToffoliRule::Conditional4T => (4, 5, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ResourceReport {
    pub t_count: u64,
    pub clifford_count: u64,
    pub rotation_count: u64,
    pub toffoli_count: u64,
    pub qubit_count: u64,
    pub depth_estimate: u64,
    /// Sum over multiplexed rotations of table length times word size.
    pub angle_bits_loaded: u64,
    pub notes: String,
}

#[derive(Default)]
struct Tally {
    t: u64,
    cliff: u64,
    rot: u64,
    toff: u64,
    scratch: u64,
    angle_bits: u64,
}

impl Tally {
    fn toffolis(&mut self, k: u64, m: &CostModel) {
        let (t, c, a) = m.toffoli();
        self.toff += k;
        self.t += k * t;
        self.cliff += k * c;
        if k > 0 {
            self.scratch = self.scratch.max(a);
        }
    }

    /// Reduce `k` controls to one with an AND ladder (compute and uncompute).
    fn and_ladder(&mut self, k: u64, m: &CostModel) {
        if k > 1 {
            self.toffolis(2 * (k - 1), m);
            self.scratch = self.scratch.max(k - 1 + m.toffoli().2);
        }
    }
}

fn gate_cost(g: &Gate, m: &CostModel, tally: &mut Tally) -> Result<()> {
    let k = g.controls.len() as u64;
    match &g.kind {
        GateKind::Custom { tag, cost, .. } => {
            let c = cost.as_ref().ok_or_else(|| Error::Accounting(format!("custom gate '{tag}' has no declared cost")))?;
            tally.t += c.t;
            tally.cliff += c.clifford;
            tally.rot += c.rotations;
            tally.and_ladder(k, m);
        }
        GateKind::X | GateKind::Y | GateKind::Z => {
            let conj = if matches!(g.kind, GateKind::X) { 0 } else { 2 };
            match k {
                0 | 1 => tally.cliff += 1 + if k == 1 { conj } else { 0 },
                _ => {
                    tally.toffolis(2 * (k - 2) + 1, m);
                    tally.scratch = tally.scratch.max(k - 2);
                    tally.cliff += conj;
                }
            }
        }
        GateKind::H | GateKind::S | GateKind::Sdg | GateKind::T | GateKind::Tdg => {
            tally.and_ladder(k, m);
            match (&g.kind, k) {
                (GateKind::T | GateKind::Tdg, 0) => tally.t += 1,
                (GateKind::T | GateKind::Tdg, _) => {
                    tally.rot += 2;
                    tally.t += 2 * m.rz_t(m.bits);
                    tally.cliff += 2;
                }
                (_, 0) => tally.cliff += 1,
                (GateKind::H, _) => {
                    tally.t += 2;
                    tally.cliff += 5;
                }
                _ => {
                    tally.t += 3;
                    tally.cliff += 2;
                }
            }
        }
        GateKind::Swap => {
            tally.and_ladder(k, m);
            if k == 0 {
                tally.cliff += 3;
            } else {
                match m.fredkin_rule {
                    FredkinRule::CxToffoliCx => {
                        tally.cliff += 2;
                        tally.toffolis(1, m);
                    }
                    FredkinRule::ThreeToffoli => tally.toffolis(3, m),
                }
            }
        }
        GateKind::Rz(_) => {
            tally.and_ladder(k, m);
            let r = if k == 0 { 1 } else { 2 };
            tally.rot += r;
            tally.t += r * m.rz_t(m.bits);
            if k > 0 {
                tally.cliff += 2;
            }
        }
        GateKind::MultiplexedRz { select, table, bits } => {
            // angle register loaded by a select oracle, b controlled
            // fixed-angle rotations, then unloaded
            let oracle = qrom::cost_model(qrom::Variant::Select, table.len() as u64, *bits as u64, 1)?;
            tally.t += 2 * oracle.t_count;
            tally.cliff += 2 * oracle.clifford_count;
            tally.toff += 2 * (oracle.t_count / 4);
            tally.toffolis(2 * k, m);
            let b = *bits as u64;
            tally.rot += b;
            tally.t += b * m.rz_t(*bits);
            tally.angle_bits += table.len() as u64 * b;
            let work = oracle.qubit_count - select.len() as u64;
            tally.scratch = tally.scratch.max(work + k);
        }
    }
    Ok(())
}

pub fn count_resources(c: &Circuit, m: &CostModel) -> Result<ResourceReport> {
    m.validate()?;
    let mut tally = Tally::default();
    for g in &c.gates {
        gate_cost(g, m, &mut tally)?;
    }
    let mut ready = vec![0u64; c.n_qubits];
    let mut depth = 0;
    for g in &c.gates {
        let qs = g.qubits();
        let layer = qs.iter().map(|&q| ready[q]).max().unwrap_or(0) + 1;
        for q in qs {
            ready[q] = layer;
        }
        depth = depth.max(layer);
    }
    Ok(ResourceReport {
        t_count: tally.t,
        clifford_count: tally.cliff,
        rotation_count: tally.rot,
        toffoli_count: tally.toff,
        qubit_count: c.n_qubits as u64 + tally.scratch,
        depth_estimate: depth,
        angle_bits_loaded: tally.angle_bits,
        notes: format!(
            "toffoli={:?} fredkin={:?} rz_t(b)=ceil({}+{}*b) b={}; depth counts logical gates (ASAP)",
            m.toffoli_rule, m.fredkin_rule, m.rz_c0, m.rz_c1, m.bits
        ),
    })
}

/// Round every angle to the `bits`-bit grid on `[0, 4 pi)`.
pub fn quantize_angle(theta: f64, bits: u32) -> f64 {
    let step = 4.0 * PI / (1u64 << bits) as f64;
    let k = (theta.rem_euclid(4.0 * PI) / step).round();
    (k * step).rem_euclid(4.0 * PI)
}
