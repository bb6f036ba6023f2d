//! Desk-scale verification: block extraction, block-encoding checks, phase
//! estimation on the qubitized walk and dense diagonalization.

use crate::blocks::{build_walk, BlockEncoding};
use crate::circuit::{unitary_of, Circuit, MAX_DENSE_QUBITS};
use crate::linalg::{eigh_ascending, hermiticity_error, max_abs_diff};
use crate::pbham::{DenseOperator, HERMITIAN_TOL};
use crate::{CMatrix, Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Statevector block extraction handles circuits up to this width.
pub const MAX_STATEVECTOR_QUBITS: usize = 22;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub max_abs_deviation: f64,
    pub tolerance_used: f64,
    pub zeta: f64,
    pub offset: f64,
    /// `None` for exact angles.
    pub b_bits: Option<u32>,
    /// `zeta` is at least the spectral norm of the encoded operator.
    pub norm_bound_holds: bool,
    pub passed: bool,
}

fn system_embedding(n_qubits: usize, anc: &[usize]) -> Result<Vec<usize>> {
    if anc.iter().any(|&q| q >= n_qubits) {
        return Err(Error::Layout("ancilla qubit out of range".into()));
    }
    let sys: Vec<usize> = (0..n_qubits).filter(|q| !anc.contains(q)).collect();
    Ok((0..1usize << sys.len())
        .map(|i| sys.iter().enumerate().fold(0, |acc, (b, &q)| acc | ((i >> b) & 1) << q))
        .collect())
}

/// `<0_anc| U |0_anc>` on the remaining qubits (in increasing order).
pub fn extract_block(u: &DenseOperator, anc_qubits: &[usize]) -> Result<DenseOperator> {
    let dim = u.matrix.nrows();
    if !dim.is_power_of_two() || u.matrix.ncols() != dim {
        return Err(Error::Layout(format!("operator of size {dim} is not a qubit operator")));
    }
    let n = dim.trailing_zeros() as usize;
    let emb = system_embedding(n, anc_qubits)?;
    let k = emb.len();
    Ok(DenseOperator::new(CMatrix::from_fn(k, k, |i, j| u.matrix[(emb[i], emb[j])])))
}

/// Block extraction by statevector simulation, one system column at a time.
pub fn extract_block_from_circuit(c: &Circuit, anc_qubits: &[usize]) -> Result<DenseOperator> {
    if c.n_qubits > MAX_STATEVECTOR_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "statevector simulation is limited to {MAX_STATEVECTOR_QUBITS} qubits, circuit has {}",
            c.n_qubits
        )));
    }
    let emb = system_embedding(c.n_qubits, anc_qubits)?;
    let k = emb.len();
    let mut m = CMatrix::zeros(k, k);
    for (j, &col) in emb.iter().enumerate() {
        let st = c.apply_basis(col);
        for (i, &row) in emb.iter().enumerate() {
            m[(i, j)] = st[row];
        }
    }
    Ok(DenseOperator::new(m))
}

/// `zeta * block + offset` as a dense operator.
pub fn encoded_operator(be: &BlockEncoding) -> Result<DenseOperator> {
    let block = extract_block_from_circuit(&be.circuit, &be.anc_qubits())?;
    let id = CMatrix::identity(block.dim, block.dim);
    Ok(DenseOperator::new(block.matrix * C64::new(be.zeta, 0.0) + id * C64::new(be.offset, 0.0)))
}

/// Compares `zeta * block + offset` with `h_ref` entrywise.
pub fn verify_block_encoding(be: &BlockEncoding, h_ref: &DenseOperator, tol: f64, b_bits: Option<u32>) -> Result<VerificationReport> {
    if h_ref.dim != be.encoded_dim {
        return Err(Error::Layout(format!("reference has dimension {}, encoding {}", h_ref.dim, be.encoded_dim)));
    }
    let enc = encoded_operator(be)?;
    let dev = max_abs_diff(&enc.matrix, &h_ref.matrix);
    let shifted = &h_ref.matrix - CMatrix::identity(h_ref.dim, h_ref.dim) * C64::new(be.offset, 0.0);
    let norm = crate::linalg::spectral_norm(&shifted);
    Ok(VerificationReport {
        max_abs_deviation: dev,
        tolerance_used: tol,
        zeta: be.zeta,
        offset: be.offset,
        b_bits,
        norm_bound_holds: be.zeta >= norm - tol.max(1e-9),
        passed: dev <= tol,
    })
}

/// Ascending eigenvalues with phase-fixed eigenvectors.
pub fn diagonalize(h: &DenseOperator) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let err = hermiticity_error(&h.matrix);
    if err > HERMITIAN_TOL {
        return Err(Error::Validation(format!("operator is not Hermitian (deviation {err:e})")));
    }
    let pairs = eigh_ascending(&h.matrix, "dense operator")?;
    Ok(pairs.into_iter().unzip())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpePeak {
    pub energy: f64,
    pub probability: f64,
    /// Measured phase as a fraction of a turn, folded into `[0, 1/2]`.
    pub phase: f64,
}

/// Orthonormal basis of the walk-invariant subspace generated by `v0`, and
/// the walk restricted to it.
fn krylov(walk: &Circuit, v0: Vec<C64>) -> (Vec<Vec<C64>>, CMatrix) {
    let dot = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>();
    let mut basis: Vec<Vec<C64>> = vec![v0];
    let mut images: Vec<Vec<C64>> = Vec::new();
    let mut k = 0;
    while k < basis.len() {
        let mut w = basis[k].clone();
        walk.apply(&mut w);
        images.push(w.clone());
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nrm = dot(&w, &w).re.sqrt();
        if nrm > 1e-9 {
            w.iter_mut().for_each(|x| *x /= nrm);
            basis.push(w);
        }
        k += 1;
    }
    let d = basis.len();
    let m = CMatrix::from_fn(d, d, |i, j| dot(&basis[i], &images[j]));
    (basis, m)
}

/// Textbook phase estimation with a `bits`-qubit phase register and exact
/// controlled powers of the walk `W = R U`. The walk acts on the subspace
/// generated by `|0_anc> (x) state`, where its eigenphases are
/// `+-arccos(E / zeta)`; the register is treated analytically.
/// Peaks are merged by energy and sorted by decreasing probability.
pub fn qpe(be: &BlockEncoding, state: &[C64], bits: u32) -> Result<Vec<QpePeak>> {
    if be.circuit.n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "phase estimation is limited to {MAX_DENSE_QUBITS} encoding qubits, circuit has {}",
            be.circuit.n_qubits
        )));
    }
    if bits == 0 || bits > 20 {
        return Err(Error::Validation(format!("phase register of {bits} bits out of range 1..=20")));
    }
    if state.len() != be.encoded_dim {
        return Err(Error::Layout(format!("state has length {}, expected {}", state.len(), be.encoded_dim)));
    }
    let nrm: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(nrm > 0.0) {
        return Err(Error::Validation("initial state is zero".into()));
    }
    let walk = build_walk(be)?;
    let emb = system_embedding(be.circuit.n_qubits, &be.anc_qubits())?;
    let mut v0 = vec![C64::new(0.0, 0.0); 1 << be.circuit.n_qubits];
    for (i, &e) in emb.iter().enumerate() {
        v0[e] = state[i] / nrm;
    }
    let (_, m) = krylov(&walk, v0);
    // the restricted walk is unitary; its Schur form is diagonal
    let schur = nalgebra::Schur::new(m.clone());
    let (q, t) = schur.unpack();
    let weights: Vec<(f64, f64)> = (0..t.nrows())
        .map(|k| {
            let theta = t[(k, k)].arg();
            // overlap of the start vector (first Krylov vector) with eigvec k
            (theta, q[(0, k)].norm_sqr())
        })
        .collect();
    let size = 1usize << bits;
    let mut probs = vec![0.0; size];
    for &(theta, w) in &weights {
        let phi = theta / (2.0 * PI);
        for (mm, p) in probs.iter_mut().enumerate() {
            let delta = phi - mm as f64 / size as f64;
            let num = (PI * delta * size as f64).sin();
            let den = (PI * delta).sin();
            let amp2 = if den.abs() < 1e-12 { 1.0 } else { (num / (size as f64 * den)).powi(2) };
            *p += w * amp2;
        }
    }
    let mut peaks: Vec<QpePeak> = Vec::new();
    for mm in 0..=size / 2 {
        let mut p = probs[mm];
        if mm != 0 && mm != size / 2 {
            p += probs[size - mm];
        }
        if p < 1e-12 {
            continue;
        }
        let phase = mm as f64 / size as f64;
        peaks.push(QpePeak { energy: be.zeta * (2.0 * PI * phase).cos() + be.offset, probability: p, phase });
    }
    peaks.sort_by(|a, b| b.probability.total_cmp(&a.probability).then(a.phase.total_cmp(&b.phase)));
    Ok(peaks)
}

/// Eigenvalues of the qubitization walk restricted to the invariant subspace
/// of `|0_anc> (x) state`.
pub fn walk_eigenvalues(be: &BlockEncoding, state: &[C64]) -> Result<Vec<C64>> {
    let walk = build_walk(be)?;
    let emb = system_embedding(be.circuit.n_qubits, &be.anc_qubits())?;
    let mut v0 = vec![C64::new(0.0, 0.0); 1 << be.circuit.n_qubits];
    for (i, &e) in emb.iter().enumerate() {
        v0[e] = state[i];
    }
    let (_, m) = krylov(&walk, v0);
    let (_, t) = nalgebra::Schur::new(m).unpack();
    Ok((0..t.nrows()).map(|k| t[(k, k)]).collect())
}

/// Dense unitary of a block encoding (small circuits only).
pub fn dense_unitary(be: &BlockEncoding) -> Result<DenseOperator> {
    unitary_of(&be.circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn identity_and_hadamard_blocks() {
        let id = DenseOperator::new(CMatrix::identity(4, 4));
        let b = extract_block(&id, &[1]).unwrap();
        assert_eq!(b.matrix, CMatrix::identity(2, 2));
        // H on the ancilla (qubit 0) tensor identity
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = CMatrix::zeros(4, 4);
        for s in 0..2 {
            m[(2 * s, 2 * s)] = c(h, 0.0);
            m[(2 * s, 2 * s + 1)] = c(h, 0.0);
            m[(2 * s + 1, 2 * s)] = c(h, 0.0);
            m[(2 * s + 1, 2 * s + 1)] = c(-h, 0.0);
        }
        let b = extract_block(&DenseOperator::new(m), &[0]).unwrap();
        assert!(max_abs_diff(&b.matrix, &(CMatrix::identity(2, 2) * c(h, 0.0))) < 1e-15);
    }

    #[test]
    fn diagonalize_examples() {
        let mut x = CMatrix::zeros(2, 2);
        x[(0, 1)] = c(1.0, 0.0);
        x[(1, 0)] = c(1.0, 0.0);
        let (e, _) = diagonalize(&DenseOperator::new(x)).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]));
        let (e, _) = diagonalize(&DenseOperator::new(d)).unwrap();
        assert_eq!(e, vec![-1.0, 2.0, 3.0]);
        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 1)] = c(1.0, 0.0);
        assert!(diagonalize(&DenseOperator::new(bad)).is_err());
    }

    fn spin_z_encoding() -> (BlockEncoding, DenseOperator) {
        use crate::blocks::{build_be_one_body, schedules_for, BuildOptions};
        use crate::factorize::{decompose_blocks, FactorMode};
        use crate::pbham::{build_dense, PBHamiltonian};
        // n_{0 alpha} - n_{0 beta} on one orbital, spectrum {-1, 0, 0, 1}
        let blocks: [CMatrix; 4] = std::array::from_fn(|mu| CMatrix::from_element(1, 1, c(if mu == 3 { 1.0 } else { 0.0 }, 0.0)));
        let f = decompose_blocks(&blocks, FactorMode::PerComponent, 1).unwrap();
        let be = build_be_one_body(&f, &schedules_for(&f).unwrap(), &BuildOptions::default()).unwrap();
        let h = build_dense(&PBHamiltonian::one_body_only(blocks), be.layout).unwrap();
        (be, h)
    }

    #[test]
    fn qpe_resolves_eigenstates() {
        let (be, h) = spin_z_encoding();
        let (vals, vecs) = diagonalize(&h).unwrap();
        for (e, v) in vals.iter().zip(&vecs) {
            let peaks = qpe(&be, v, 8).unwrap();
            assert!((peaks[0].energy - e).abs() <= be.zeta * PI / 256.0, "{e} vs {}", peaks[0].energy);
        }
    }

    #[test]
    fn qpe_splits_superpositions() {
        let (be, h) = spin_z_encoding();
        let (vals, vecs) = diagonalize(&h).unwrap();
        let (lo, hi) = (0, vals.len() - 1);
        let psi: Vec<C64> = vecs[lo].iter().zip(&vecs[hi]).map(|(a, b)| (a + b) / 2f64.sqrt()).collect();
        let peaks = qpe(&be, &psi, 10).unwrap();
        let mass = |e: f64| peaks.iter().filter(|p| (p.energy - e).abs() < 0.02).map(|p| p.probability).sum::<f64>();
        assert!((mass(vals[lo]) - 0.5).abs() < 0.02);
        assert!((mass(vals[hi]) - 0.5).abs() < 0.02);
    }

    #[test]
    fn verification_report_flags_wrong_reference() {
        let (be, h) = spin_z_encoding();
        assert!(verify_block_encoding(&be, &h, 1e-10, None).unwrap().passed);
        let wrong = DenseOperator::new(&h.matrix * c(2.0, 0.0));
        assert!(!verify_block_encoding(&be, &wrong, 1e-10, None).unwrap().passed);
    }
}
