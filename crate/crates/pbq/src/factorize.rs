//! Spectral factorization of the one-body blocks, double factorization of the
//! two-body tensor and Givens schedules for the factor vectors.

use crate::encoding::{encode_majorana_pair, MajoranaIndex, Ordering, PauliString};
use crate::linalg::{eigh_by_magnitude, eigh_real_by_magnitude, outer, spectral_norm, zeros};
use crate::pbham::{PBHamiltonian, TwoBodyTensor};
use crate::{CMatrix, Error, Result, C64};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

/// Terms below this magnitude are dropped from factor lists (they still
/// count towards the reported truncation error).
pub const DROP_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorMode {
    PerComponent,
    SpinEmbedded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneBodyTerm {
    pub l: usize,
    /// Component for per-component factors, `None` for spin-embedded ones.
    pub mu: Option<usize>,
    pub f: f64,
    pub v: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneBodyFactors {
    pub mode: FactorMode,
    pub n_orbitals: usize,
    pub terms: Vec<OneBodyTerm>,
    /// Largest spectral norm of a discarded remainder over the blocks.
    pub epsilon: f64,
    /// Per block (four components, or one spin-embedded block).
    pub epsilon_per_block: Vec<f64>,
}

impl OneBodyFactors {
    /// Blocks rebuilt from the kept terms (per-component mode only).
    pub fn reconstruct(&self) -> [CMatrix; 4] {
        let n = self.n_orbitals;
        let mut out: [CMatrix; 4] = std::array::from_fn(|_| zeros(n));
        for t in &self.terms {
            if let Some(mu) = t.mu {
                out[mu] += outer(&t.v, &t.v) * C64::new(t.f, 0.0);
            }
        }
        out
    }

    /// Number of distinct `l` values per component.
    pub fn rank(&self) -> usize {
        self.terms.iter().map(|t| t.l + 1).max().unwrap_or(0)
    }

    /// LCU 1-norm of the one-body operator including its identity part.
    pub fn lcu_norm(&self) -> f64 {
        let spread: f64 = self.terms.iter().map(|t| t.f.abs()).sum();
        spread + self.identity_coefficient().abs()
    }

    /// Coefficient of the identity produced by `mu = 0` terms.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms.iter().filter(|t| t.mu == Some(0)).map(|t| t.f).sum()
    }
}

fn spin_embedded_matrix(blocks: &[CMatrix; 4]) -> CMatrix {
    // index 2p + sigma
    let n = blocks[0].nrows();
    let mut m = zeros(2 * n);
    for (mu, b) in blocks.iter().enumerate() {
        let pm = crate::encoding::pauli_matrix(mu);
        for p in 0..n {
            for q in 0..n {
                for s in 0..2 {
                    for r in 0..2 {
                        m[(2 * p + s, 2 * q + r)] += b[(p, q)] * pm[s][r];
                    }
                }
            }
        }
    }
    m
}

/// Spectral factors of one-body blocks, keeping `l` terms per block.
pub fn decompose_blocks(blocks: &[CMatrix; 4], mode: FactorMode, l: usize) -> Result<OneBodyFactors> {
    let n = blocks[0].nrows();
    let cap = match mode {
        FactorMode::PerComponent => n,
        FactorMode::SpinEmbedded => 2 * n,
    };
    if l > cap {
        return Err(Error::Validation(format!("truncation L={l} exceeds {cap}")));
    }
    let mut terms = Vec::new();
    let mut eps = Vec::new();
    let mut factor = |m: &CMatrix, mu: Option<usize>, what: &str| -> Result<()> {
        let mut rest = m.clone();
        let mut idx = 0;
        if m.iter().all(|z| z.norm() == 0.0) {
            eps.push(0.0);
            return Ok(());
        }
        for (f, v) in eigh_by_magnitude(m, what)?.into_iter().take(l) {
            if f.abs() <= DROP_TOL {
                continue;
            }
            rest -= outer(&v, &v) * C64::new(f, 0.0);
            terms.push(OneBodyTerm { l: idx, mu, f, v });
            idx += 1;
        }
        eps.push(spectral_norm(&rest));
        Ok(())
    };
    match mode {
        FactorMode::PerComponent => {
            for (mu, b) in blocks.iter().enumerate() {
                factor(b, Some(mu), &format!("one-body block {}", crate::encoding::COMPONENT_LABELS[mu]))?;
            }
        }
        FactorMode::SpinEmbedded => factor(&spin_embedded_matrix(blocks), None, "spin-embedded block")?,
    }
    let epsilon = eps.iter().copied().fold(0.0, f64::max);
    Ok(OneBodyFactors { mode, n_orbitals: n, terms, epsilon, epsilon_per_block: eps })
}

pub fn decompose_one_body(h: &PBHamiltonian, mode: FactorMode, l: usize) -> Result<OneBodyFactors> {
    decompose_blocks(&h.one_body_total, mode, l)
}

/// One squared one-body operator `s * h^2` of the double factorization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    pub lambda: f64,
    pub sign: f64,
    /// Per-component blocks of `sqrt|lambda| h` after inner truncation.
    pub blocks: Vec<Vec<Vec<C64>>>,
    pub factors: OneBodyFactors,
    /// LCU 1-norm of the leaf, the scale used by its block encoding.
    pub a: f64,
    pub spectral_norm: f64,
}

impl Leaf {
    pub fn block_matrices(&self) -> [CMatrix; 4] {
        std::array::from_fn(|mu| {
            let rows = &self.blocks[mu];
            CMatrix::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
        })
    }
}

fn to_rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoBodyFactors {
    pub n_orbitals: usize,
    pub leaves: Vec<Leaf>,
    pub a: Vec<f64>,
    /// Frobenius norm of the tensor residual with all kept leaves.
    pub epsilon: f64,
    /// Residual after each successive leaf.
    pub epsilon_history: Vec<f64>,
}

impl TwoBodyFactors {
    pub fn reconstruct(&self) -> TwoBodyTensor {
        let mut g = TwoBodyTensor::zeros(self.n_orbitals);
        for leaf in &self.leaves {
            let blocks: Vec<Option<CMatrix>> = leaf.block_matrices().into_iter().map(Some).collect();
            crate::pbham::synthetic::add_square(&mut g, &blocks, leaf.sign);
        }
        g
    }
}

/// Unitary `D` with `T_I = sum_k D_Ik B_k` for the Hermitian basis `B_k`.
fn hermitian_basis(n: usize) -> CMatrix {
    let k = 4 * n * n;
    let mut d = CMatrix::zeros(k, k);
    let s = FRAC_1_SQRT_2;
    for mu in 0..4 {
        let at = |p: usize, q: usize| mu * n * n + p * n + q;
        for p in 0..n {
            d[(at(p, p), at(p, p))] = C64::new(1.0, 0.0);
            for q in p + 1..n {
                d[(at(p, q), at(p, q))] = C64::new(s, 0.0);
                d[(at(p, q), at(q, p))] = C64::new(0.0, -s);
                d[(at(q, p), at(p, q))] = C64::new(s, 0.0);
                d[(at(q, p), at(q, p))] = C64::new(0.0, s);
            }
        }
    }
    d
}

fn supermatrix(g: &TwoBodyTensor) -> CMatrix {
    let n = g.n();
    let k = 4 * n * n;
    let mut m = CMatrix::zeros(k, k);
    for ([mu, mup, p, q, r, s], v) in g.iter_nonzero() {
        m[(mu * n * n + p * n + q, mup * n * n + r * n + s)] = v;
    }
    m
}

/// Double factorization with at most `m` leaves and `l` inner terms per
/// component, stopping at the first leaf count whose residual is `<= tol`.
pub fn double_factorize(h: &PBHamiltonian, m: usize, l: usize, tol: f64) -> Result<TwoBodyFactors> {
    double_factorize_tensor(&h.two_body, m, l, tol)
}

pub fn double_factorize_tensor(g: &TwoBodyTensor, m: usize, l: usize, tol: f64) -> Result<TwoBodyFactors> {
    let n = g.n();
    if m == 0 {
        return Err(Error::Validation("leaf count M must be at least 1".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::Validation("tolerance must be nonnegative".into()));
    }
    if l == 0 || l > n {
        return Err(Error::Validation(format!("inner rank L={l} must be in 1..={n}")));
    }
    let k = 4 * n * n;
    let d = hermitian_basis(n);
    let gm = supermatrix(g);
    let s = d.transpose() * &gm * &d;
    let scale = gm.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let asym = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| (s[(i, j)].im.abs()).max((s[(i, j)] - s[(j, i)]).norm()))
        .fold(0.0, f64::max);
    if asym > 1e-10 * scale {
        return Err(Error::Validation(format!(
            "two-body tensor is not symmetric under the (pq mu, rs mu') reshaping (deviation {asym:e})"
        )));
    }
    let sr = DMatrix::<f64>::from_fn(k, k, |i, j| s[(i, j)].re);
    let pairs = eigh_real_by_magnitude(&sr, "two-body supermatrix")?;

    let mut residual = gm.clone();
    let mut leaves = Vec::new();
    let mut history = Vec::new();
    let mut epsilon = frob(&residual);
    for (lambda, w) in pairs.into_iter().take(m) {
        if epsilon <= tol && !leaves.is_empty() {
            break;
        }
        if lambda.abs() <= DROP_TOL {
            log::warn!("dropping zero-norm leaf (lambda = {lambda:e})");
            continue;
        }
        let wc: Vec<C64> = w.iter().map(|&x| C64::new(x, 0.0)).collect();
        let c: Vec<C64> = (0..k).map(|i| (0..k).map(|j| d[(i, j)].conj() * wc[j]).sum::<C64>() * lambda.abs().sqrt()).collect();
        let blocks: [CMatrix; 4] = std::array::from_fn(|mu| {
            let mut b = CMatrix::from_fn(n, n, |p, q| c[mu * n * n + p * n + q]);
            b = (&b + b.adjoint()) * C64::new(0.5, 0.0);
            b
        });
        let factors = decompose_blocks(&blocks, FactorMode::PerComponent, l)?;
        let trunc = factors.reconstruct();
        let sign = lambda.signum();
        let flat: Vec<C64> = (0..k).map(|i| trunc[i / (n * n)][((i / n) % n, i % n)]).collect();
        for i in 0..k {
            for j in 0..k {
                residual[(i, j)] -= flat[i] * flat[j] * sign;
            }
        }
        epsilon = frob(&residual);
        history.push(epsilon);
        let a = factors.lcu_norm();
        let sn = leaf_spectral_norm(&factors);
        leaves.push(Leaf {
            lambda,
            sign,
            blocks: trunc.iter().map(to_rows).collect(),
            factors,
            a,
            spectral_norm: sn,
        });
    }
    let a = leaves.iter().map(|l| l.a).collect();
    Ok(TwoBodyFactors { n_orbitals: n, leaves, a, epsilon, epsilon_history: history })
}

fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral norm of the Fock-space one-body operator `sum h^mu T^mu`:
/// the sum of the positive (or the negative) single-particle eigenvalues.
fn leaf_spectral_norm(f: &OneBodyFactors) -> f64 {
    let blocks = f.reconstruct();
    let m = spin_embedded_matrix(&blocks);
    match eigh_by_magnitude(&m, "leaf") {
        Ok(pairs) => {
            let pos: f64 = pairs.iter().filter(|p| p.0 > 0.0).map(|p| p.0).sum();
            let neg: f64 = pairs.iter().filter(|p| p.0 < 0.0).map(|p| -p.0).sum();
            pos.max(neg)
        }
        Err(_) => f64::NAN,
    }
}

/// One term `sign * (a^2/2) * (T_2(h/a) + 1)` of the Chebyshev form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevTerm {
    pub leaf: usize,
    pub a: f64,
    pub sign: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevForm {
    pub terms: Vec<ChebyshevTerm>,
    /// `sum sign * a^2 / 2`, kept classically.
    pub offset: f64,
    /// `sum a^2 / 2`, the LCU normalization over the T_2 terms.
    pub zeta: f64,
}

pub fn chebyshev_form(f: &TwoBodyFactors) -> ChebyshevForm {
    let mut terms = Vec::new();
    for (i, leaf) in f.leaves.iter().enumerate() {
        if leaf.a <= DROP_TOL {
            log::warn!("dropping zero-norm leaf {i}");
            continue;
        }
        terms.push(ChebyshevTerm { leaf: i, a: leaf.a, sign: leaf.sign, weight: leaf.a * leaf.a / 2.0 });
    }
    let offset = terms.iter().map(|t| t.sign * t.weight).sum();
    let zeta = terms.iter().map(|t| t.weight).sum();
    ChebyshevForm { terms, offset, zeta }
}

/// `T_2(x) = 2x^2 - 1` of a square matrix.
pub fn chebyshev_t2(m: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(m.nrows(), m.ncols());
    m * m * C64::new(2.0, 0.0) - id
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinSeed {
    Alpha,
    Beta,
}

impl SpinSeed {
    pub fn sigma(self) -> usize {
        match self {
            SpinSeed::Alpha => 0,
            SpinSeed::Beta => 1,
        }
    }
}

/// Givens rotations taking `a^dag` of the first chain mode to `sum_p v_p a^dag_p`.
///
/// Rotation `k` acts on chain modes `k, k+1` as
/// `exp(-(theta_k/2)(g_{k,0} g_{k+1,0} + g_{k,1} g_{k+1,1}))`, applied in
/// increasing `k`; then each mode `p` picks up `exp(i phi_p n_p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GivensSchedule {
    pub thetas: Vec<f64>,
    /// Empty for real vectors.
    pub phases: Vec<f64>,
    pub ordering: Ordering,
    pub spin_seed: SpinSeed,
    /// Chain of `(p, sigma)` modes.
    pub chain: Vec<(usize, usize)>,
    pub n_orbitals: usize,
}

pub fn givens_schedule(v: &[C64], ord: Ordering, seed: SpinSeed) -> Result<GivensSchedule> {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Validation("Givens schedule of a zero vector".into()));
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Validation(format!("factor vector has norm {norm}, expected 1")));
    }
    givens_schedule_for_len(v, ord, seed)
}

fn givens_schedule_for_len(v: &[C64], ord: Ordering, seed: SpinSeed) -> Result<GivensSchedule> {
    let len = v.len();
    let chain: Vec<(usize, usize)> = (0..len).map(|p| (p, seed.sigma())).collect();
    let real = v.iter().all(|z| z.im.abs() <= 1e-14);
    let (r, phases): (Vec<f64>, Vec<f64>) = if real {
        (v.iter().map(|z| z.re).collect(), Vec::new())
    } else {
        (v.iter().map(|z| z.norm()).collect(), v.iter().map(|z| if z.norm() > 0.0 { z.arg() } else { 0.0 }).collect())
    };
    let mut thetas = vec![0.0; len.saturating_sub(1)];
    let mut tail: f64 = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    for k in 0..len.saturating_sub(1) {
        let rest = (tail * tail - r[k] * r[k]).max(0.0).sqrt();
        thetas[k] = if k + 2 == len { r[k + 1].atan2(r[k]) } else { rest.atan2(r[k]) };
        if k + 2 == len && tail == 0.0 {
            thetas[k] = 0.0;
        }
        tail = rest;
    }
    Ok(GivensSchedule { thetas, phases, ordering: ord, spin_seed: seed, chain, n_orbitals: len })
}

/// Schedule for a spin-embedded factor vector indexed `2p + sigma`: the chain
/// runs over all modes in the qubit order of `ord`.
pub fn givens_schedule_embedded(v: &[C64], ord: Ordering) -> Result<GivensSchedule> {
    let n = v.len() / 2;
    let chain: Vec<(usize, usize)> = (0..2 * n).map(|q| ord.mode(q, n)).collect();
    let w: Vec<C64> = chain.iter().map(|&(p, s)| v[2 * p + s]).collect();
    let mut sch = givens_schedule(&w, ord, SpinSeed::Alpha)?;
    sch.chain = chain;
    sch.n_orbitals = n;
    Ok(sch)
}

/// A Pauli rotation `exp(-i angle/2 P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliRotation {
    pub pauli: PauliString,
    pub angle: f64,
}

impl GivensSchedule {
    /// Rotations in time order on `2N` qubits. The letter strings depend only
    /// on the chain, never on the angles.
    pub fn rotations(&self, n: usize) -> Result<Vec<PauliRotation>> {
        let mut out = Vec::new();
        for (k, &theta) in self.thetas.iter().enumerate() {
            let (p, s) = self.chain[k];
            let (q, r) = self.chain[k + 1];
            for x in 0..2 {
                let g = encode_majorana_pair(MajoranaIndex::new(p, s, x), MajoranaIndex::new(q, r, x), self.ordering, n)?;
                // g = i^k L with k odd; exp(-(theta/2) i^k L) = exp(-i (+-theta)/2 L)
                let sign = if g.phase() == 1 { 1.0 } else { -1.0 };
                out.push(PauliRotation { pauli: g.with_phase(0), angle: sign * theta });
            }
        }
        for (i, &phi) in self.phases.iter().enumerate() {
            let (p, s) = self.chain[i];
            let q = self.ordering.qubit(p, s, n);
            out.push(PauliRotation {
                pauli: PauliString::single(2 * n, q, crate::encoding::Letter::Z),
                angle: phi,
            });
        }
        Ok(out)
    }

    /// Angles in the fixed slot layout used by multiplexed networks:
    /// `2(N-1)` Givens slots followed by `N` phase slots.
    pub fn slot_angles(&self, with_phases: bool) -> Vec<f64> {
        let mut out = Vec::new();
        for &t in &self.thetas {
            out.push(t);
            out.push(t);
        }
        if with_phases {
            if self.phases.is_empty() {
                out.extend(std::iter::repeat_n(0.0, self.chain.len()));
            } else {
                out.extend_from_slice(&self.phases);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::encode_majorana;
    use crate::linalg::{max_abs_diff, c};
    use crate::pbham::synthetic;

    fn pauli_exp(r: &PauliRotation) -> CMatrix {
        let p = r.pauli.to_matrix();
        let id = CMatrix::identity(p.nrows(), p.ncols());
        id * C64::new((r.angle / 2.0).cos(), 0.0) - p * C64::new(0.0, (r.angle / 2.0).sin())
    }

    fn schedule_unitary(s: &GivensSchedule, n: usize) -> CMatrix {
        let dim = 1 << (2 * n);
        let mut u = CMatrix::identity(dim, dim);
        for r in s.rotations(n).unwrap() {
            u = pauli_exp(&r) * u;
        }
        u
    }

    fn check_conjugation(v: &[C64], ord: Ordering, seed: SpinSeed) {
        let n = v.len();
        let s = givens_schedule(v, ord, seed).unwrap();
        let u = schedule_unitary(&s, n);
        let sg = seed.sigma();
        for x in 0..2 {
            let g0 = encode_majorana(MajoranaIndex::new(0, sg, x), ord, n).unwrap().to_matrix();
            let lhs = &u * g0 * u.adjoint();
            let mut rhs = CMatrix::zeros(lhs.nrows(), lhs.ncols());
            for (p, z) in v.iter().enumerate() {
                let g0p = encode_majorana(MajoranaIndex::new(p, sg, 0), ord, n).unwrap().to_matrix();
                let g1p = encode_majorana(MajoranaIndex::new(p, sg, 1), ord, n).unwrap().to_matrix();
                let (a, b) = if x == 0 { (z.re, -z.im) } else { (z.im, z.re) };
                rhs += g0p * c(a, 0.0) + g1p * c(b, 0.0);
            }
            assert!(max_abs_diff(&lhs, &rhs) < 1e-10);
        }
    }

    #[test]
    fn seed_vector_gives_zero_angles() {
        let v = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let s = givens_schedule(&v, Ordering::Om, SpinSeed::Alpha).unwrap();
        assert!(s.thetas.iter().all(|&t| t == 0.0));
        assert!(s.phases.is_empty());
    }

    #[test]
    fn two_entry_vector() {
        let v = vec![c(0.6, 0.0), c(-0.8, 0.0)];
        let s = givens_schedule(&v, Ordering::Sm, SpinSeed::Alpha).unwrap();
        assert_eq!(s.thetas.len(), 1);
        check_conjugation(&v, Ordering::Sm, SpinSeed::Alpha);
        check_conjugation(&v, Ordering::Om, SpinSeed::Beta);
    }

    #[test]
    fn random_vectors_conjugate_seed() {
        let mut rng = synthetic::rng(5);
        for trial in 0..6 {
            let m = synthetic::hermitian(3, 1.0, &mut rng);
            let pairs = eigh_by_magnitude(&m, "t").unwrap();
            let mut v = pairs[trial % 3].1.clone();
            if trial % 2 == 0 {
                v.iter_mut().for_each(|z| *z = c(z.re, 0.0));
                let nrm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                v.iter_mut().for_each(|z| *z /= nrm);
            }
            for ord in [Ordering::Om, Ordering::Sm] {
                for seed in [SpinSeed::Alpha, SpinSeed::Beta] {
                    check_conjugation(&v, ord, seed);
                }
            }
        }
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(givens_schedule(&[c(0.0, 0.0); 2], Ordering::Om, SpinSeed::Alpha).is_err());
    }

    #[test]
    fn one_body_full_rank_is_exact() {
        let mut rng = synthetic::rng(9);
        let blocks = synthetic::one_body(3, &[0, 1, 2, 3], 1.0, &mut rng);
        let f = decompose_blocks(&blocks, FactorMode::PerComponent, 3).unwrap();
        assert!(f.epsilon < 1e-12);
        assert!(f.terms.len() <= 12);
        let r = f.reconstruct();
        for mu in 0..4 {
            assert!(max_abs_diff(&r[mu], &blocks[mu]) < 1e-12);
        }
        let e = decompose_blocks(&blocks, FactorMode::SpinEmbedded, 6).unwrap();
        assert!(e.terms.len() <= 6 && e.epsilon < 1e-12);
        for t in f.terms.iter().chain(&e.terms) {
            let nrm: f64 = t.v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((nrm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_tensor_needs_one_leaf() {
        let mut rng = synthetic::rng(2);
        let leaf: Vec<Option<CMatrix>> = (0..4).map(|mu| (mu != 2).then(|| synthetic::hermitian(2, 1.0, &mut rng))).collect();
        let mut g = TwoBodyTensor::zeros(2);
        synthetic::add_square(&mut g, &leaf, -0.7);
        let f = double_factorize_tensor(&g, 5, 2, 1e-12).unwrap();
        assert_eq!(f.leaves.len(), 1);
        assert!(f.epsilon < 1e-12);
        assert_eq!(f.leaves[0].sign, -1.0);
        let rec = f.reconstruct();
        assert!(g.sub(&rec).frobenius_norm() < 1e-12);
    }

    #[test]
    fn single_z_leaf_has_a_equal_two() {
        let mut blocks: [CMatrix; 4] = std::array::from_fn(|_| zeros(2));
        blocks[3][(0, 0)] = c(2.0, 0.0);
        let f = decompose_blocks(&blocks, FactorMode::PerComponent, 2).unwrap();
        assert_eq!(f.lcu_norm(), 2.0);
        let t2 = chebyshev_t2(&CMatrix::identity(3, 3));
        assert_eq!(t2, CMatrix::identity(3, 3));
    }

    #[test]
    fn non_symmetric_tensor_rejected() {
        let mut g = TwoBodyTensor::zeros(2);
        g.set(0, 1, 0, 0, 0, 0, c(1.0, 0.0));
        assert!(matches!(double_factorize_tensor(&g, 2, 2, 0.0), Err(Error::Validation(_))));
    }
}
