//! Integral containers, Hamiltonian assembly and the dense Fock-space oracle.
//!
//! The operator represented by an [`IntegralSet`] is
//!
//! ```text
//! H = sum_mu sum_pq H^mu_pq T^mu_pq
//!   + sum_{mu mu'} sum_pqrs C_{mu mu'} G^{mu mu'}_pqrs
//!       sum_{sigma rho tau nu} P^mu_{sigma rho} P^mu'_{tau nu}
//!       a^dag_{p sigma} a^dag_{r tau} a_{s nu} a_{q rho}
//! ```
//!
//! with `T^mu_pq = sum P^mu_{sigma rho} a^dag_{p sigma} a_{q rho}`. The two-body
//! part is given in normal order; [`assemble`] rewrites it as the product
//! `T^mu G T^mu'` and moves the contraction into the one-body blocks.

use crate::encoding::{pauli_matrix, Ordering, COMPONENT_LABELS};
use crate::linalg::{hermiticity_error, zeros};
use crate::{CMatrix, Error, Result, C64};
use std::fmt::Write as _;
use std::path::Path;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const MAX_DENSE_ORBITALS: usize = 6;
/// Hartree per wavenumber (CODATA 2018).
pub const HARTREE_PER_WAVENUMBER: f64 = 4.556_335_252_767e-6;

/// The identity and the three Pauli matrices, with spin matrices `s = P/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTable {
    pub p: [[[C64; 2]; 2]; 4],
}

impl Default for PauliTable {
    fn default() -> Self {
        PauliTable { p: [pauli_matrix(0), pauli_matrix(1), pauli_matrix(2), pauli_matrix(3)] }
    }
}

impl PauliTable {
    pub fn matrix(&self, mu: usize) -> CMatrix {
        CMatrix::from_fn(2, 2, |i, j| self.p[mu][i][j])
    }

    pub fn spin(&self, mu: usize) -> CMatrix {
        self.matrix(mu) * C64::new(0.5, 0.0)
    }

    /// `(1/2) Tr(P^k P^a P^b)`, the expansion coefficient of `P^a P^b` on `P^k`.
    pub fn product_coefficient(&self, k: usize, a: usize, b: usize) -> C64 {
        let m = self.matrix(k) * self.matrix(a) * self.matrix(b);
        m.trace() * 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Scalar,
    SpinOtherOrbit,
    SpinSameOrbit,
    SpinSpin,
}

/// Selector matrix of the two-body component grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionMatrix {
    pub c: [[f64; 4]; 4],
}

fn kd(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

impl Default for ContractionMatrix {
    fn default() -> Self {
        let mut c = [[0.0; 4]; 4];
        for (mu, row) in c.iter_mut().enumerate() {
            for (mup, x) in row.iter_mut().enumerate() {
                *x = match Self::sector(mu, mup) {
                    Sector::Scalar => kd(mu, 0) * kd(0, mup),
                    Sector::SpinOtherOrbit => kd(0, mu) * (1.0 - kd(mup, 0)),
                    Sector::SpinSameOrbit => kd(0, mup) * (1.0 - kd(mu, 0)),
                    Sector::SpinSpin => 1.0 - kd(0, mup) - kd(mu, 0) + kd(mu, 0) * kd(0, mup),
                };
            }
        }
        ContractionMatrix { c }
    }
}

impl ContractionMatrix {
    pub fn sector(mu: usize, mup: usize) -> Sector {
        match (mu, mup) {
            (0, 0) => Sector::Scalar,
            (0, _) => Sector::SpinOtherOrbit,
            (_, 0) => Sector::SpinSameOrbit,
            _ => Sector::SpinSpin,
        }
    }
}

/// Dense `G^{mu mu'}_{pqrs}` over the 4x4 component grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyTensor {
    n: usize,
    data: Vec<C64>,
}

impl TwoBodyTensor {
    pub fn zeros(n: usize) -> Self {
        TwoBodyTensor { n, data: vec![C64::new(0.0, 0.0); 16 * n.pow(4)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, mu: usize, mup: usize, p: usize, q: usize, r: usize, s: usize) -> usize {
        let n = self.n;
        ((((mu * 4 + mup) * n + p) * n + q) * n + r) * n + s
    }

    #[inline]
    pub fn get(&self, mu: usize, mup: usize, p: usize, q: usize, r: usize, s: usize) -> C64 {
        self.data[self.idx(mu, mup, p, q, r, s)]
    }

    #[inline]
    pub fn set(&mut self, mu: usize, mup: usize, p: usize, q: usize, r: usize, s: usize, v: C64) {
        let i = self.idx(mu, mup, p, q, r, s);
        self.data[i] = v;
    }

    pub fn add(&mut self, mu: usize, mup: usize, p: usize, q: usize, r: usize, s: usize, v: C64) {
        let i = self.idx(mu, mup, p, q, r, s);
        self.data[i] += v;
    }

    pub fn block_is_zero(&self, mu: usize, mup: usize) -> bool {
        let len = self.n.pow(4);
        let start = (mu * 4 + mup) * len;
        self.data[start..start + len].iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = ([usize; 6], C64)> + '_ {
        let n = self.n;
        self.data.iter().enumerate().filter(|(_, v)| v.norm() != 0.0).map(move |(i, v)| {
            let s = i % n;
            let r = (i / n) % n;
            let q = (i / n.pow(2)) % n;
            let p = (i / n.pow(3)) % n;
            let mup = (i / n.pow(4)) % 4;
            let mu = i / (4 * n.pow(4));
            ([mu, mup, p, q, r, s], *v)
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, k: f64) -> Self {
        TwoBodyTensor { n: self.n, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        TwoBodyTensor { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn add_tensor(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        TwoBodyTensor { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    /// Largest violation of `G^{mu' mu}_{srqp} = conj G^{mu mu'}_{pqrs}`, the
    /// condition for the normal-ordered operator to be Hermitian.
    pub fn hermiticity_error(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for ([mu, mup, p, q, r, s], v) in self.iter_nonzero() {
            let w = self.get(mup, mu, s, r, q, p);
            let e = (w - v.conj()).norm();
            if e > worst.0 {
                worst = (e, mu, mup);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockSymmetry {
    Hermitian,
    None,
}

/// Classical integrals of every Pauli-Breit term in an orthonormal orbital basis.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSet {
    pub n_orbitals: usize,
    pub one_body: [CMatrix; 4],
    pub two_body: TwoBodyTensor,
    pub metadata: Vec<String>,
}

impl IntegralSet {
    pub fn zeros(n: usize) -> Self {
        IntegralSet {
            n_orbitals: n,
            one_body: std::array::from_fn(|_| zeros(n)),
            two_body: TwoBodyTensor::zeros(n),
            metadata: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_orbitals;
        if n == 0 {
            return Err(Error::Validation("N must be positive".into()));
        }
        for (mu, m) in self.one_body.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Validation(format!("one-body block {} has wrong dimensions", COMPONENT_LABELS[mu])));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Validation(format!("one-body block {} has non-finite entries", COMPONENT_LABELS[mu])));
            }
            let e = hermiticity_error(m);
            if e > HERMITIAN_TOL {
                return Err(Error::Validation(format!(
                    "one-body block {} is not Hermitian (deviation {e:e})",
                    COMPONENT_LABELS[mu]
                )));
            }
        }
        if self.two_body.n() != n {
            return Err(Error::Validation("two-body tensor dimension differs from N".into()));
        }
        if self.two_body.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Validation("two-body tensor has non-finite entries".into()));
        }
        let (e, mu, mup) = self.two_body.hermiticity_error();
        if e > HERMITIAN_TOL {
            return Err(Error::Validation(format!(
                "two-body block ({},{}) is not Hermitian (deviation {e:e})",
                COMPONENT_LABELS[mu], COMPONENT_LABELS[mup]
            )));
        }
        Ok(())
    }
}

fn fmt_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Format { line, msg: msg.into() }
}

fn parse_index(tok: &str, n: usize, line: usize) -> Result<usize> {
    let v: usize = tok.parse().map_err(|_| fmt_err(line, format!("bad index '{tok}'")))?;
    if v >= n {
        return Err(fmt_err(line, format!("index {v} out of range for N={n}")));
    }
    Ok(v)
}

fn parse_float(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| fmt_err(line, format!("bad number '{tok}'")))?;
    if !v.is_finite() {
        return Err(fmt_err(line, format!("non-finite number '{tok}'")));
    }
    Ok(v)
}

fn parse_mu(tok: &str, line: usize) -> Result<usize> {
    crate::encoding::parse_component(tok).ok_or_else(|| fmt_err(line, format!("unknown component '{tok}'")))
}

#[derive(Clone, Copy)]
enum Block {
    One(usize),
    Two(usize, usize),
}

/// Set `slot` to `v`, or check agreement if an earlier entry already filled it.
fn put(slot: &mut C64, seen: bool, v: C64, line: usize) -> Result<()> {
    if seen && (*slot - v).norm() > HERMITIAN_TOL {
        return Err(fmt_err(line, "entry conflicts with a symmetry-implied value"));
    }
    *slot = v;
    Ok(())
}

/// Parse the line-oriented integral format. See the crate README for the grammar.
pub fn parse_integrals(text: &str) -> Result<IntegralSet> {
    let mut set: Option<IntegralSet> = None;
    let mut block: Option<(Block, BlockSymmetry)> = None;
    let mut seen_blocks: Vec<String> = Vec::new();
    let mut filled1: Vec<Vec<bool>> = Vec::new();
    let mut filled2: Vec<bool> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = t.split_whitespace().collect();
        let Some(s) = set.as_mut() else {
            if toks.len() != 3 || toks[0] != "PBINT" || toks[1] != "v1" {
                return Err(fmt_err(line, "expected header 'PBINT v1 N=<n>'"));
            }
            let n: usize = toks[2]
                .strip_prefix("N=")
                .and_then(|v| v.parse().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| fmt_err(line, "bad orbital count in header"))?;
            set = Some(IntegralSet::zeros(n));
            filled2 = vec![false; 16 * n.pow(4)];
            continue;
        };
        let n = s.n_orbitals;
        match toks[0] {
            "META" => {
                let rest = t[4..].trim().to_string();
                s.metadata.push(rest);
            }
            "BEGIN" => {
                let b = match (toks.get(1).copied(), toks.len()) {
                    (Some("ONEBODY"), 3) => Block::One(parse_mu(toks[2], line)?),
                    (Some("TWOBODY"), 4) => Block::Two(parse_mu(toks[2], line)?, parse_mu(toks[3], line)?),
                    _ => return Err(fmt_err(line, "expected 'BEGIN ONEBODY <mu>' or 'BEGIN TWOBODY <mu> <mu'>'")),
                };
                let key = toks[1..].join(" ");
                if seen_blocks.contains(&key) {
                    return Err(fmt_err(line, format!("duplicate block {key}")));
                }
                seen_blocks.push(key);
                filled1 = vec![vec![false; n]; n];
                block = Some((b, BlockSymmetry::None));
            }
            "SYMMETRY" => {
                let Some((_, sym)) = block.as_mut() else {
                    return Err(fmt_err(line, "SYMMETRY outside a block"));
                };
                *sym = match toks.get(1).copied() {
                    Some("hermitian") if toks.len() == 2 => BlockSymmetry::Hermitian,
                    Some("none") if toks.len() == 2 => BlockSymmetry::None,
                    _ => return Err(fmt_err(line, "expected 'SYMMETRY hermitian|none'")),
                };
            }
            _ => {
                let Some((b, sym)) = block else {
                    return Err(fmt_err(line, "entry outside a block"));
                };
                match b {
                    Block::One(mu) => {
                        if toks.len() != 4 {
                            return Err(fmt_err(line, "one-body entry needs 'p q re im'"));
                        }
                        let p = parse_index(toks[0], n, line)?;
                        let q = parse_index(toks[1], n, line)?;
                        let v = C64::new(parse_float(toks[2], line)?, parse_float(toks[3], line)?);
                        if filled1[p][q] && sym == BlockSymmetry::None {
                            return Err(fmt_err(line, "duplicate entry"));
                        }
                        put(&mut s.one_body[mu][(p, q)], filled1[p][q], v, line)?;
                        filled1[p][q] = true;
                        if sym == BlockSymmetry::Hermitian && p != q {
                            put(&mut s.one_body[mu][(q, p)], filled1[q][p], v.conj(), line)?;
                            filled1[q][p] = true;
                        }
                    }
                    Block::Two(mu, mup) => {
                        if toks.len() != 6 {
                            return Err(fmt_err(line, "two-body entry needs 'p q r s re im'"));
                        }
                        let mut ix = [0usize; 4];
                        for k in 0..4 {
                            ix[k] = parse_index(toks[k], n, line)?;
                        }
                        let [p, q, r, s_] = ix;
                        let v = C64::new(parse_float(toks[4], line)?, parse_float(toks[5], line)?);
                        let i0 = s.two_body.idx(mu, mup, p, q, r, s_);
                        if filled2[i0] && sym == BlockSymmetry::None {
                            return Err(fmt_err(line, "duplicate entry"));
                        }
                        let mut orbit = vec![((mu, mup, p, q, r, s_), v)];
                        if sym == BlockSymmetry::Hermitian {
                            orbit.push(((mup, mu, r, s_, p, q), v));
                            orbit.push(((mu, mup, q, p, s_, r), v.conj()));
                            orbit.push(((mup, mu, s_, r, q, p), v.conj()));
                        }
                        for ((a, b2, p, q, r, s_), w) in orbit {
                            let j = s.two_body.idx(a, b2, p, q, r, s_);
                            put(&mut s.two_body.data[j], filled2[j], w, line)?;
                            filled2[j] = true;
                        }
                    }
                }
            }
        }
    }
    let s = set.ok_or_else(|| fmt_err(0, "missing header"))?;
    s.validate()?;
    Ok(s)
}

pub fn load_integrals(path: impl AsRef<Path>) -> Result<IntegralSet> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_integrals(&text)
}

/// Canonical text form: Hermitian one-body blocks with `p <= q`, two-body
/// blocks written in full, nonzero entries only.
pub fn write_integrals(set: &IntegralSet) -> String {
    let n = set.n_orbitals;
    let mut out = format!("PBINT v1 N={n}\n");
    for m in &set.metadata {
        let _ = writeln!(out, "META {m}");
    }
    for mu in 0..4 {
        let b = &set.one_body[mu];
        if b.iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let _ = writeln!(out, "BEGIN ONEBODY {}\nSYMMETRY hermitian", COMPONENT_LABELS[mu]);
        for p in 0..n {
            for q in p..n {
                let z = b[(p, q)];
                if z.norm() != 0.0 {
                    let _ = writeln!(out, "{p} {q} {:e} {:e}", z.re, z.im);
                }
            }
        }
    }
    for mu in 0..4 {
        for mup in 0..4 {
            if set.two_body.block_is_zero(mu, mup) {
                continue;
            }
            let _ = writeln!(
                out,
                "BEGIN TWOBODY {} {}\nSYMMETRY none",
                COMPONENT_LABELS[mu], COMPONENT_LABELS[mup]
            );
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            let z = set.two_body.get(mu, mup, p, q, r, s);
                            if z.norm() != 0.0 {
                                let _ = writeln!(out, "{p} {q} {r} {s} {:e} {:e}", z.re, z.im);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// The Hamiltonian in product form: `sum H^mu T^mu + sum C T^mu G T^mu'`.
#[derive(Debug, Clone, PartialEq)]
pub struct PBHamiltonian {
    pub n_orbitals: usize,
    pub one_body_total: [CMatrix; 4],
    pub two_body: TwoBodyTensor,
}

impl PBHamiltonian {
    pub fn one_body_only(one_body: [CMatrix; 4]) -> Self {
        let n = one_body[0].nrows();
        PBHamiltonian { n_orbitals: n, one_body_total: one_body, two_body: TwoBodyTensor::zeros(n) }
    }

    pub fn one_body_part(&self) -> Self {
        Self::one_body_only(self.one_body_total.clone())
    }

    pub fn two_body_part(&self) -> Self {
        PBHamiltonian {
            n_orbitals: self.n_orbitals,
            one_body_total: std::array::from_fn(|_| zeros(self.n_orbitals)),
            two_body: self.two_body.clone(),
        }
    }
}

/// One-body blocks `K^k_ps = sum C G^{mu mu'}_{pqqs} (1/2)Tr(P^k P^mu P^mu')`
/// produced when the product form is normal ordered.
pub fn contraction_blocks(g: &TwoBodyTensor) -> [CMatrix; 4] {
    let n = g.n();
    let table = PauliTable::default();
    let cm = ContractionMatrix::default();
    let mut k: [CMatrix; 4] = std::array::from_fn(|_| zeros(n));
    for kappa in 0..4 {
        for mu in 0..4 {
            for mup in 0..4 {
                let coef = table.product_coefficient(kappa, mu, mup) * cm.c[mu][mup];
                if coef.norm() == 0.0 || g.block_is_zero(mu, mup) {
                    continue;
                }
                for p in 0..n {
                    for s in 0..n {
                        let mut acc = C64::new(0.0, 0.0);
                        for q in 0..n {
                            acc += g.get(mu, mup, p, q, q, s);
                        }
                        k[kappa][(p, s)] += coef * acc;
                    }
                }
            }
        }
    }
    k
}

pub fn assemble(integrals: &IntegralSet) -> Result<PBHamiltonian> {
    integrals.validate()?;
    let n = integrals.n_orbitals;
    for p in 0..n {
        let d = integrals.one_body[2][(p, p)];
        if d.norm() > HERMITIAN_TOL {
            return Err(Error::Unsupported(format!(
                "one-body Y block has diagonal element {d} at p={p}; only vanishing diagonal Y terms are supported"
            )));
        }
    }
    let cm = ContractionMatrix::default();
    let mut g = TwoBodyTensor::zeros(n);
    for ([mu, mup, p, q, r, s], v) in integrals.two_body.iter_nonzero() {
        g.set(mu, mup, p, q, r, s, v * cm.c[mu][mup]);
    }
    let k = contraction_blocks(&g);
    let one_body_total = std::array::from_fn(|mu| {
        let m = &integrals.one_body[mu] - &k[mu];
        (&m + m.adjoint()) * C64::new(0.5, 0.0)
    });
    Ok(PBHamiltonian { n_orbitals: n, one_body_total, two_body: g })
}

/// A dense operator on the `4^N` qubit basis of one ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub dim: usize,
    pub matrix: CMatrix,
}

impl DenseOperator {
    pub fn new(matrix: CMatrix) -> Self {
        DenseOperator { dim: matrix.nrows(), matrix }
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.matrix)
    }

    pub fn unitarity_error(&self) -> f64 {
        let id = CMatrix::identity(self.dim, self.dim);
        crate::linalg::max_abs_diff(&(self.matrix.adjoint() * &self.matrix), &id)
    }
}

/// `a_q` on basis state `s` under Jordan-Wigner: new state and sign.
#[inline]
pub fn annihilate(s: usize, q: usize) -> Option<(usize, f64)> {
    if s >> q & 1 == 0 {
        return None;
    }
    let sign = if (s & ((1 << q) - 1)).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
    Some((s ^ (1 << q), sign))
}

#[inline]
pub fn create(s: usize, q: usize) -> Option<(usize, f64)> {
    if s >> q & 1 == 1 {
        return None;
    }
    let sign = if (s & ((1 << q) - 1)).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
    Some((s ^ (1 << q), sign))
}

/// `a^dag_k a_l |s>`.
#[inline]
pub fn excite(s: usize, k: usize, l: usize) -> Option<(usize, f64)> {
    let (s1, g1) = annihilate(s, l)?;
    let (s2, g2) = create(s1, k)?;
    Some((s2, g1 * g2))
}

/// Mode coefficient matrix `h_{(p sigma),(q rho)} = sum_mu H^mu_pq P^mu_{sigma rho}`
/// indexed by qubit under `ord`.
pub fn spin_orbital_matrix(one_body: &[CMatrix; 4], ord: Ordering) -> CMatrix {
    let n = one_body[0].nrows();
    let mut h = zeros(2 * n);
    for mu in 0..4 {
        let pm = pauli_matrix(mu);
        for p in 0..n {
            for q in 0..n {
                let v = one_body[mu][(p, q)];
                if v.norm() == 0.0 {
                    continue;
                }
                for sg in 0..2 {
                    for rh in 0..2 {
                        h[(ord.qubit(p, sg, n), ord.qubit(q, rh, n))] += v * pm[sg][rh];
                    }
                }
            }
        }
    }
    h
}

fn check_dense_size(n: usize) -> Result<()> {
    if n > MAX_DENSE_ORBITALS {
        return Err(Error::ResourceLimit(format!(
            "dense Fock operator needs N <= {MAX_DENSE_ORBITALS}, got {n}"
        )));
    }
    Ok(())
}

/// Dense one-body operator `sum_kl h_kl a^dag_k a_l` for a mode matrix `h`.
pub fn dense_one_body(h: &CMatrix) -> DenseOperator {
    let modes = h.nrows();
    let dim = 1usize << modes;
    let mut m = CMatrix::zeros(dim, dim);
    for k in 0..modes {
        for l in 0..modes {
            let v = h[(k, l)];
            if v.norm() == 0.0 {
                continue;
            }
            for s in 0..dim {
                if let Some((t, g)) = excite(s, k, l) {
                    m[(t, s)] += v * g;
                }
            }
        }
    }
    DenseOperator::new(m)
}

/// Product-form two-body tensor over modes, `W_{klmn}` multiplying `E_kl E_mn`.
fn mode_tensor(g: &TwoBodyTensor, ord: Ordering) -> Vec<C64> {
    let n = g.n();
    let modes = 2 * n;
    let cm = ContractionMatrix::default();
    let mut w = vec![C64::new(0.0, 0.0); modes.pow(4)];
    for ([mu, mup, p, q, r, s], v) in g.iter_nonzero() {
        let v = v * cm.c[mu][mup];
        let (pa, pb) = (pauli_matrix(mu), pauli_matrix(mup));
        for sg in 0..2 {
            for rh in 0..2 {
                if pa[sg][rh].norm() == 0.0 {
                    continue;
                }
                for ta in 0..2 {
                    for nu in 0..2 {
                        if pb[ta][nu].norm() == 0.0 {
                            continue;
                        }
                        let k = ord.qubit(p, sg, n);
                        let l = ord.qubit(q, rh, n);
                        let m = ord.qubit(r, ta, n);
                        let nn = ord.qubit(s, nu, n);
                        w[((k * modes + l) * modes + m) * modes + nn] += v * pa[sg][rh] * pb[ta][nu];
                    }
                }
            }
        }
    }
    w
}

/// Dense Fock-space matrix of `h` in the qubit basis of `ord`.
pub fn build_dense(h: &PBHamiltonian, ord: Ordering) -> Result<DenseOperator> {
    let n = h.n_orbitals;
    check_dense_size(n)?;
    let mut m = dense_one_body(&spin_orbital_matrix(&h.one_body_total, ord)).matrix;
    let modes = 2 * n;
    let dim = 1usize << modes;
    let w = mode_tensor(&h.two_body, ord);
    if w.iter().any(|z| z.norm() != 0.0) {
        for s in 0..dim {
            for mm in 0..modes {
                for nn in 0..modes {
                    let Some((s1, g1)) = excite(s, mm, nn) else { continue };
                    for k in 0..modes {
                        for l in 0..modes {
                            let v = w[((k * modes + l) * modes + mm) * modes + nn];
                            if v.norm() == 0.0 {
                                continue;
                            }
                            if let Some((s2, g2)) = excite(s1, k, l) {
                                m[(s2, s)] += v * (g1 * g2);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(DenseOperator::new(m))
}

/// Dense matrix of the physical operator described by an [`IntegralSet`],
/// two-body part applied in normal order. Independent of [`assemble`].
pub fn build_dense_normal_ordered(set: &IntegralSet, ord: Ordering) -> Result<DenseOperator> {
    let n = set.n_orbitals;
    check_dense_size(n)?;
    let mut m = dense_one_body(&spin_orbital_matrix(&set.one_body, ord)).matrix;
    let modes = 2 * n;
    let dim = 1usize << modes;
    let w = mode_tensor(&set.two_body, ord);
    for k in 0..modes {
        for l in 0..modes {
            for mm in 0..modes {
                for nn in 0..modes {
                    let v = w[((k * modes + l) * modes + mm) * modes + nn];
                    if v.norm() == 0.0 {
                        continue;
                    }
                    // a^dag_k a^dag_m a_n a_l
                    for s in 0..dim {
                        let step = annihilate(s, l)
                            .and_then(|(s1, g1)| annihilate(s1, nn).map(|(s2, g2)| (s2, g1 * g2)))
                            .and_then(|(s2, g)| create(s2, mm).map(|(s3, g3)| (s3, g * g3)))
                            .and_then(|(s3, g)| create(s3, k).map(|(s4, g4)| (s4, g * g4)));
                        if let Some((t, g)) = step {
                            m[(t, s)] += v * g;
                        }
                    }
                }
            }
        }
    }
    Ok(DenseOperator::new(m))
}

/// Diagonal total `S_z` on the qubit basis.
pub fn total_sz(n: usize, ord: Ordering) -> DenseOperator {
    let dim = 1usize << (2 * n);
    let mut m = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        let mut sz = 0.0;
        for p in 0..n {
            sz += 0.5 * ((s >> ord.qubit(p, 0, n)) & 1) as f64;
            sz -= 0.5 * ((s >> ord.qubit(p, 1, n)) & 1) as f64;
        }
        m[(s, s)] = C64::new(sz, 0.0);
    }
    DenseOperator::new(m)
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of spin-adapted configurations of `eta` electrons in `n` orbitals
/// with total spin `two_s / 2`. Infeasible arguments give 0.
pub fn cas_dimension(n: u32, eta: u32, two_s: u32) -> u128 {
    if eta > 2 * n || two_s > eta || !(eta - two_s).is_multiple_of(2) || eta + two_s > 2 * n {
        return 0;
    }
    let a = ((eta - two_s) / 2) as u128;
    let b = ((2 * n - eta - two_s) / 2) as u128;
    let n1 = n as u128 + 1;
    (two_s as u128 + 1) * binom(n1, a) * binom(n1, b) / n1
}

/// Fermi golden-rule transition rate `2 pi |V|^2 rho` in atomic units.
pub fn golden_rule_rate(soc_element: f64, dos: f64) -> Result<f64> {
    if !dos.is_finite() || !soc_element.is_finite() {
        return Err(Error::Validation("golden-rule inputs must be finite".into()));
    }
    if dos < 0.0 {
        return Err(Error::Validation(format!("density of states must be nonnegative, got {dos}")));
    }
    Ok(2.0 * std::f64::consts::PI * soc_element * soc_element * dos)
}

pub fn wavenumber_to_hartree(cm: f64) -> f64 {
    cm * HARTREE_PER_WAVENUMBER
}

/// Seeded random integrals for tests, examples and the demo.
pub mod synthetic {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Random Hermitian `n x n` matrix with entries in `[-scale, scale]`.
    pub fn hermitian<R: Rng>(n: usize, scale: f64, rng: &mut R) -> CMatrix {
        let mut m = zeros(n);
        for p in 0..n {
            m[(p, p)] = C64::new(scale * (2.0 * rng.gen::<f64>() - 1.0), 0.0);
            for q in p + 1..n {
                let z = C64::new(2.0 * rng.gen::<f64>() - 1.0, 2.0 * rng.gen::<f64>() - 1.0) * scale;
                m[(p, q)] = z;
                m[(q, p)] = z.conj();
            }
        }
        m
    }

    /// Random one-body blocks for the listed components; the Y block always
    /// has a zero diagonal.
    pub fn one_body<R: Rng>(n: usize, components: &[usize], scale: f64, rng: &mut R) -> [CMatrix; 4] {
        std::array::from_fn(|mu| {
            if !components.contains(&mu) {
                return zeros(n);
            }
            let mut m = hermitian(n, scale, rng);
            if mu == 2 {
                for p in 0..n {
                    m[(p, p)] = C64::new(0.0, 0.0);
                }
            }
            m
        })
    }

    /// `G = sum_m lambda_m c_m c_m^T` with Hermitian per-component leaves
    /// `c_m` supported on `components`; Hermitian and pair-swap symmetric.
    pub fn low_rank_two_body<R: Rng>(
        n: usize,
        rank: usize,
        components: &[usize],
        scale: f64,
        rng: &mut R,
    ) -> TwoBodyTensor {
        let mut g = TwoBodyTensor::zeros(n);
        for _ in 0..rank {
            let lambda = scale * (2.0 * rng.gen::<f64>() - 1.0);
            let leaf: Vec<Option<CMatrix>> = (0..4)
                .map(|mu| components.contains(&mu).then(|| hermitian(n, 1.0, rng)))
                .collect();
            add_square(&mut g, &leaf, lambda);
        }
        g
    }

    /// Add `lambda * h (x) h` for a one-body leaf `h` given per component.
    pub fn add_square(g: &mut TwoBodyTensor, leaf: &[Option<CMatrix>], lambda: f64) {
        let n = g.n();
        for (mu, a) in leaf.iter().enumerate() {
            let Some(a) = a else { continue };
            for (mup, b) in leaf.iter().enumerate() {
                let Some(b) = b else { continue };
                for p in 0..n {
                    for q in 0..n {
                        for r in 0..n {
                            for s in 0..n {
                                g.add(mu, mup, p, q, r, s, a[(p, q)] * b[(r, s)] * lambda);
                            }
                        }
                    }
                }
            }
        }
    }

    pub fn integrals<R: Rng>(n: usize, one: &[usize], two: &[usize], rank: usize, rng: &mut R) -> IntegralSet {
        let mut set = IntegralSet::zeros(n);
        set.one_body = one_body(n, one, 1.0, rng);
        if rank > 0 {
            set.two_body = low_rank_two_body(n, rank, two, 0.5, rng);
        }
        set.metadata.push("synthetic".into());
        set
    }
}
