//! Small dense helpers shared by the factorization and simulation code.

use crate::{CMatrix, Error, Result, C64};
use nalgebra::DMatrix;
use std::cmp::Ordering;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Rescale `v` so its first component above `tol` in modulus is real positive.
pub fn fix_phase(v: &mut [C64]) {
    let tol = 1e-12;
    if let Some(z) = v.iter().find(|z| z.norm() > tol).copied() {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

fn lex_cmp(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x
            .re
            .total_cmp(&y.re)
            .then_with(|| x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Eigenpairs of a Hermitian matrix sorted by |value| descending, ties broken
/// by lexicographic order of the phase-fixed eigenvectors.
pub fn eigh_by_magnitude(m: &CMatrix, what: &str) -> Result<Vec<(f64, Vec<C64>)>> {
    let mut pairs = eigh(m, what)?;
    pairs.sort_by(|a, b| {
        let (fa, fb) = (round_mag(a.0), round_mag(b.0));
        fb.total_cmp(&fa).then_with(|| lex_cmp(&a.1, &b.1))
    });
    Ok(pairs)
}

/// Eigenpairs sorted by value ascending.
pub fn eigh_ascending(m: &CMatrix, what: &str) -> Result<Vec<(f64, Vec<C64>)>> {
    let mut pairs = eigh(m, what)?;
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lex_cmp(&a.1, &b.1)));
    Ok(pairs)
}

// Magnitudes that agree to ~1e-12 relative count as ties.
fn round_mag(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return 0.0;
    }
    let scale = 10f64.powi(a.log10().floor() as i32 - 11);
    (a / scale).round() * scale
}

fn eigh(m: &CMatrix, what: &str) -> Result<Vec<(f64, Vec<C64>)>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::try_new(herm, 1e-15, 10_000)
        .ok_or_else(|| Error::Numeric(format!("eigensolver did not converge for {what}")))?;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
        fix_phase(&mut v);
        out.push((eig.eigenvalues[k], v));
    }
    Ok(out)
}

/// Real symmetric eigenpairs sorted by |value| descending with the same
/// determinism rules as the complex variant.
pub fn eigh_real_by_magnitude(m: &DMatrix<f64>, what: &str) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::try_new(sym, 1e-15, 10_000)
        .ok_or_else(|| Error::Numeric(format!("eigensolver did not converge for {what}")))?;
    let mut out: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-12).copied() {
                if first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (eig.eigenvalues[k], v)
        })
        .collect();
    out.sort_by(|a, b| {
        round_mag(b.0).total_cmp(&round_mag(a.0)).then_with(|| {
            a.1.iter()
                .zip(&b.1)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });
    Ok(out)
}

/// Largest singular value, via the Hermitian square.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let g = m.adjoint() * m;
    let eig = nalgebra::SymmetricEigen::new(g);
    eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x)).max(0.0).sqrt()
}

pub fn outer(v: &[C64], w: &[C64]) -> CMatrix {
    CMatrix::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_by_magnitude_with_sign_convention() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, -2.0), c(0.0, 2.0), c(1.0, 0.0)],
        );
        let pairs = eigh_by_magnitude(&m, "test").unwrap();
        assert!((pairs[0].0 - 3.0).abs() < 1e-12);
        assert!((pairs[1].0 + 1.0).abs() < 1e-12);
        for (_, v) in &pairs {
            assert!(v[0].im.abs() < 1e-14 && v[0].re > 0.0);
        }
    }

    #[test]
    fn spectral_norm_of_diag() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-3.0, 0.0), c(2.0, 0.0)]));
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-12);
    }
}
