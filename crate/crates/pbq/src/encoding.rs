//! Jordan-Wigner encodings of ladder, Majorana and triplet-excitation operators.
//!
//! Mode `(p, sigma)` sits on qubit `2p + sigma` in orbital-major (OM) order and
//! on `sigma*N + p` in spin-major (SM) order. The annihilator is `(X + iY)/2`
//! on its own qubit, preceded by a Z on every lower qubit.

use crate::{CMatrix, Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    Om,
    Sm,
}

impl Ordering {
    pub fn qubit(self, p: usize, sigma: usize, n: usize) -> usize {
        debug_assert!(p < n && sigma < 2);
        match self {
            Ordering::Om => 2 * p + sigma,
            Ordering::Sm => sigma * n + p,
        }
    }

    /// Inverse of [`Ordering::qubit`].
    pub fn mode(self, q: usize, n: usize) -> (usize, usize) {
        match self {
            Ordering::Om => (q / 2, q % 2),
            Ordering::Sm => (q % n, q / n),
        }
    }
}

impl FromStr for Ordering {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "om" => Ok(Ordering::Om),
            "sm" => Ok(Ordering::Sm),
            _ => Err(Error::Validation(format!("unknown ordering '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Letter {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// `i^phase` times a tensor product of Hermitian Pauli letters, stored
/// symplectically as x/z bit masks. Qubit 0 is the first letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    phase: u8,
    x: Vec<u64>,
    z: Vec<u64>,
}

fn words(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, phase: 0, x: vec![0; words(n)], z: vec![0; words(n)] }
    }

    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut s = Self::identity(n);
        s.set(q, letter);
        s
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        let mut s = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            s.set(q, l);
        }
        s
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Phase as a power of `i`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_factor(&self) -> C64 {
        [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)]
            [self.phase as usize]
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn times_i_pow(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }

    pub fn letter(&self, q: usize) -> Letter {
        let (w, b) = (q / 64, q % 64);
        Letter::from_bits(self.x[w] >> b & 1 == 1, self.z[w] >> b & 1 == 1)
    }

    pub fn set(&mut self, q: usize, letter: Letter) {
        assert!(q < self.n, "qubit {q} out of range");
        let (w, b) = (q / 64, q % 64);
        let (x, z) = letter.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.letter(q) != Letter::I).collect()
    }

    fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones()).sum()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_multiple_of(2)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let s: u32 = (0..self.x.len())
            .map(|w| ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones())
            .sum();
        s.is_multiple_of(2)
    }

    /// Letter part as a string without phase, qubit 0 first.
    pub fn letters(&self) -> String {
        (0..self.n).map(|q| self.letter(q).as_char()).collect()
    }

    /// Dense `2^n x 2^n` matrix; basis index bit `q` is qubit `q`.
    pub fn to_matrix(&self) -> CMatrix {
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        let xm = self.x[0] as usize;
        let zm = self.z[0] as usize;
        // i^phase * i^{#Y} * X^x Z^z
        let base = PauliString::identity(0).with_phase((self.phase as u32 + self.y_count()) as u8 % 4);
        let pf = base.phase_factor();
        for col in 0..dim {
            let sign = if (col & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            m[(col ^ xm, col)] = pf * sign;
        }
        m
    }
}

impl Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.n, rhs.n, "qubit count mismatch");
        // Letters are i^{#Y} X^x Z^z; moving Z^z1 past X^x2 costs (-1)^{z1.x2}.
        let mut out = PauliString::identity(self.n);
        let mut anti = 0u32;
        for w in 0..self.x.len() {
            out.x[w] = self.x[w] ^ rhs.x[w];
            out.z[w] = self.z[w] ^ rhs.z[w];
            anti += (self.z[w] & rhs.x[w]).count_ones();
        }
        let k = self.phase as u32 + rhs.phase as u32 + self.y_count() + rhs.y_count() + 2 * anti;
        let k = (k + 4 * out.y_count() - out.y_count()) % 4;
        out.phase = k as u8;
        out
    }
}

impl Mul for PauliString {
    type Output = PauliString;
    fn mul(self, rhs: PauliString) -> PauliString {
        &self * &rhs
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{p}{}", self.letters())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Validation(format!("malformed Pauli string '{s}'"));
        let (sign, rest) = match s.chars().next() {
            Some('+') => (0u8, &s[1..]),
            Some('-') => (2u8, &s[1..]),
            _ => (0u8, s),
        };
        let (imag, rest) = match rest.strip_prefix('i') {
            Some(r) => (1u8, r),
            None => (0u8, rest),
        };
        let letters = rest
            .chars()
            .map(|ch| match ch {
                'I' => Ok(Letter::I),
                'X' => Ok(Letter::X),
                'Y' => Ok(Letter::Y),
                'Z' => Ok(Letter::Z),
                _ => Err(bad()),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(bad());
        }
        Ok(PauliString::from_letters(&letters).with_phase(sign + imag))
    }
}

/// Sum of Pauli strings with complex coefficients.
pub type PauliSum = Vec<(C64, PauliString)>;

pub fn sum_to_matrix(sum: &PauliSum, n_qubits: usize) -> CMatrix {
    let dim = 1usize << n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for (c, s) in sum {
        m += s.to_matrix() * *c;
    }
    m
}

fn check_mode(p: usize, sigma: usize, n: usize) -> Result<()> {
    if p >= n || sigma > 1 {
        return Err(Error::Validation(format!("mode (p={p}, sigma={sigma}) out of range for N={n}")));
    }
    Ok(())
}

fn z_chain(n_qubits: usize, below: usize) -> PauliString {
    let mut s = PauliString::identity(n_qubits);
    for q in 0..below {
        s.set(q, Letter::Z);
    }
    s
}

/// Jordan-Wigner image of `a_{p sigma}` (or its adjoint) as two strings.
pub fn encode_ladder(p: usize, sigma: usize, dagger: bool, ord: Ordering, n: usize) -> Result<PauliSum> {
    check_mode(p, sigma, n)?;
    let q = ord.qubit(p, sigma, n);
    let mut xs = z_chain(2 * n, q);
    xs.set(q, Letter::X);
    let mut ys = z_chain(2 * n, q);
    ys.set(q, Letter::Y);
    let yc = if dagger { C64::new(0.0, -0.5) } else { C64::new(0.0, 0.5) };
    Ok(vec![(C64::new(0.5, 0.0), xs), (yc, ys)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MajoranaIndex {
    pub p: usize,
    pub sigma: usize,
    pub x: usize,
}

impl MajoranaIndex {
    pub fn new(p: usize, sigma: usize, x: usize) -> Self {
        MajoranaIndex { p, sigma, x }
    }
}

/// `gamma_{p sigma 0} = Z..Z X`, `gamma_{p sigma 1} = -Z..Z Y`.
pub fn encode_majorana(m: MajoranaIndex, ord: Ordering, n: usize) -> Result<PauliString> {
    check_mode(m.p, m.sigma, n)?;
    if m.x > 1 {
        return Err(Error::Validation(format!("Majorana flavor {} out of range", m.x)));
    }
    let q = ord.qubit(m.p, m.sigma, n);
    let mut s = z_chain(2 * n, q);
    if m.x == 0 {
        s.set(q, Letter::X);
        Ok(s)
    } else {
        s.set(q, Letter::Y);
        Ok(s.with_phase(2))
    }
}

/// Single string for the product `gamma_a gamma_b`.
pub fn encode_majorana_pair(a: MajoranaIndex, b: MajoranaIndex, ord: Ordering, n: usize) -> Result<PauliString> {
    let ga = encode_majorana(a, ord, n)?;
    let gb = encode_majorana(b, ord, n)?;
    Ok(&ga * &gb)
}

/// Closed-form Pauli weight of a spin-orbital bilinear, and the OM/SM
/// difference `|(N-1)|sigma-rho| - |q-p||`.
pub fn pauli_weight(p: usize, q: usize, sigma: usize, rho: usize, ord: Ordering, n: usize) -> Result<(usize, usize)> {
    check_mode(p, sigma, n)?;
    check_mode(q, rho, n)?;
    if p == q && sigma == rho {
        return Err(Error::Validation("pauli_weight needs p != q or sigma != rho".into()));
    }
    let dp = p.abs_diff(q);
    let ds = sigma.abs_diff(rho);
    let w = match ord {
        Ordering::Sm => ds * n + dp,
        Ordering::Om => 2 * dp + ds,
    };
    let delta = ((n - 1) * ds).abs_diff(dp);
    Ok((w, delta))
}

/// The Pauli matrices with `P^0 = I`, indexed by component `mu` in 0..4 = {0, X, Y, Z}.
pub fn pauli_matrix(mu: usize) -> [[C64; 2]; 2] {
    let o = C64::new(0.0, 0.0);
    let r = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match mu {
        0 => [[r, o], [o, r]],
        1 => [[o, r], [r, o]],
        2 => [[o, -i], [i, o]],
        3 => [[r, o], [o, -r]],
        _ => panic!("component {mu} out of range"),
    }
}

pub const COMPONENT_LABELS: [&str; 4] = ["0", "X", "Y", "Z"];

pub fn parse_component(s: &str) -> Option<usize> {
    COMPONENT_LABELS.iter().position(|l| l.eq_ignore_ascii_case(s)).or(match s {
        "I" | "i" => Some(0),
        _ => None,
    })
}

/// One term `coef * gamma_{p sigma x} gamma_{q rho y}` of a triplet operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletTerm {
    pub coef: C64,
    pub sigma: usize,
    pub x: usize,
    pub rho: usize,
    pub y: usize,
}

/// Majorana form of the spin-adapted excitation
/// `sum_{sigma rho} (P^mu_{sigma rho}/2) a^dag_{p sigma} a_{q rho}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripletExpansion {
    pub mu: usize,
    pub terms: Vec<TripletTerm>,
}

impl TripletExpansion {
    pub fn encode(&self, p: usize, q: usize, ord: Ordering, n: usize) -> Result<PauliSum> {
        self.terms
            .iter()
            .map(|t| {
                let s = encode_majorana_pair(
                    MajoranaIndex::new(p, t.sigma, t.x),
                    MajoranaIndex::new(q, t.rho, t.y),
                    ord,
                    n,
                )?;
                Ok((t.coef, s))
            })
            .collect()
    }
}

pub fn triplet_to_majorana(mu: usize) -> Result<TripletExpansion> {
    if mu > 3 {
        return Err(Error::Validation(format!("component {mu} out of range")));
    }
    // a^dag a = (g0 + i g1)(g0 - i g1)/4 on the respective modes.
    let cx = [C64::new(1.0, 0.0), C64::new(0.0, 1.0)];
    let dy = [C64::new(1.0, 0.0), C64::new(0.0, -1.0)];
    let pm = pauli_matrix(mu);
    let mut terms = Vec::new();
    for sigma in 0..2 {
        for rho in 0..2 {
            let w = pm[sigma][rho];
            if w.norm() == 0.0 {
                continue;
            }
            for x in 0..2 {
                for y in 0..2 {
                    terms.push(TripletTerm { coef: w * cx[x] * dy[y] / 8.0, sigma, x, rho, y });
                }
            }
        }
    }
    Ok(TripletExpansion { mu, terms })
}

/// One row of the OM/SM weight comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightRow {
    pub p: usize,
    pub q: usize,
    pub sigma: usize,
    pub rho: usize,
    pub coupling: f64,
    pub om: usize,
    pub sm: usize,
    pub delta: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightComparison {
    pub rows: Vec<WeightRow>,
    pub om_aggregate: f64,
    pub sm_aggregate: f64,
    pub recommendation: String,
}

/// Coupling-weighted Pauli weights of every one-body bilinear under both
/// orderings. Number operators (`p = q`, `sigma = rho`) are skipped.
pub fn compare_encodings(one_body: &[CMatrix; 4]) -> Result<WeightComparison> {
    let n = one_body[0].nrows();
    let mut rows = Vec::new();
    let (mut om_agg, mut sm_agg) = (0.0, 0.0);
    for p in 0..n {
        for q in 0..n {
            for sigma in 0..2 {
                for rho in 0..2 {
                    if p == q && sigma == rho {
                        continue;
                    }
                    let coupling: f64 = (0..4)
                        .map(|mu| one_body[mu][(p, q)].norm() * pauli_matrix(mu)[sigma][rho].norm())
                        .sum();
                    if coupling == 0.0 {
                        continue;
                    }
                    let (om, delta) = pauli_weight(p, q, sigma, rho, Ordering::Om, n)?;
                    let (sm, _) = pauli_weight(p, q, sigma, rho, Ordering::Sm, n)?;
                    om_agg += coupling * om as f64;
                    sm_agg += coupling * sm as f64;
                    rows.push(WeightRow { p, q, sigma, rho, coupling, om, sm, delta });
                }
            }
        }
    }
    let recommendation = if rows.is_empty() {
        "no off-diagonal couplings; orderings are equivalent".to_string()
    } else if om_agg < sm_agg {
        "OM: spin mixing concentrates near the orbital diagonal".to_string()
    } else if sm_agg < om_agg {
        "SM: couplings are dominated by same-spin orbital hops".to_string()
    } else {
        "either: aggregates are equal".to_string()
    };
    Ok(WeightComparison { rows, om_aggregate: om_agg, sm_aggregate: sm_agg, recommendation })
}
