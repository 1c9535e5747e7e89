//! Dense complex helpers shared by the state and operator types.
//!
//! Local operators are never embedded into the full space; they are applied
//! factor-wise through the offset tables of [`SubsystemLayout::offsets`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result, SubsystemLayout};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Offset tables for an ordered support and its complement.
pub(crate) struct Split {
    pub support: Vec<usize>,
    pub rest: Vec<usize>,
}

pub(crate) fn split_offsets(layout: &SubsystemLayout, support: &[String]) -> Result<Split> {
    let support_off = layout.offsets(support)?;
    let rest_off = layout.offsets(&layout.complement(support))?;
    Ok(Split { support: support_off, rest: rest_off })
}

fn check_square(op: &CMatrix, dim: usize) -> Result<()> {
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: op.nrows() });
    }
    Ok(())
}

/// `(op ⊗ 1) v` with `op` acting on the ordered `support`.
pub fn apply_local(layout: &SubsystemLayout, support: &[String], op: &CMatrix, v: &CVector) -> Result<CVector> {
    let sp = split_offsets(layout, support)?;
    check_square(op, sp.support.len())?;
    if v.len() != layout.total_dim() {
        return Err(Error::DimensionMismatch { expected: layout.total_dim(), actual: v.len() });
    }
    let mut out = CVector::zeros(v.len());
    let mut buf = CVector::zeros(sp.support.len());
    for &r in &sp.rest {
        for (k, &s) in sp.support.iter().enumerate() {
            buf[k] = v[s + r];
        }
        let y = op * &buf;
        for (k, &s) in sp.support.iter().enumerate() {
            out[s + r] = y[k];
        }
    }
    Ok(out)
}

/// `(op ⊗ 1) m` applied to every column of `m`.
pub fn apply_local_left(layout: &SubsystemLayout, support: &[String], op: &CMatrix, m: &CMatrix) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        let col = apply_local(layout, support, op, &m.column(c).into_owned())?;
        out.set_column(c, &col);
    }
    Ok(out)
}

/// `m (op ⊗ 1)`; row `r` of the product is `(opᵀ ⊗ 1)` applied to row `r`.
pub fn apply_local_right(layout: &SubsystemLayout, support: &[String], op: &CMatrix, m: &CMatrix) -> Result<CMatrix> {
    let opt = op.transpose();
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for r in 0..m.nrows() {
        let row = apply_local(layout, support, &opt, &m.row(r).transpose())?;
        out.set_row(r, &row.transpose());
    }
    Ok(out)
}

/// `(⟨a| ⊗ 1) v`: contracts the ordered `support` against the covector
/// `⟨a|`, leaving a vector over the complement in layout order.
pub fn contract(layout: &SubsystemLayout, support: &[String], a: &CVector, v: &CVector) -> Result<CVector> {
    let sp = split_offsets(layout, support)?;
    if a.len() != sp.support.len() {
        return Err(Error::DimensionMismatch { expected: sp.support.len(), actual: a.len() });
    }
    let mut out = CVector::zeros(sp.rest.len());
    for (j, &r) in sp.rest.iter().enumerate() {
        let mut acc = ZERO;
        for (k, &s) in sp.support.iter().enumerate() {
            acc += a[k].conj() * v[s + r];
        }
        out[j] = acc;
    }
    Ok(out)
}

/// Reduced matrix `Tr_rest |v⟩⟨v|` on the ordered `keep` labels.
pub fn reduce_pure(layout: &SubsystemLayout, keep: &[String], v: &CVector) -> Result<CMatrix> {
    reduce_outer(layout, keep, v, v)
}

/// Reduced matrix `Tr_rest |a⟩⟨b|` on the ordered `keep` labels.
pub fn reduce_outer(layout: &SubsystemLayout, keep: &[String], a: &CVector, b: &CVector) -> Result<CMatrix> {
    let sp = split_offsets(layout, keep)?;
    let d = sp.support.len();
    let mut out = CMatrix::zeros(d, d);
    for &r in &sp.rest {
        for (i, &si) in sp.support.iter().enumerate() {
            let ai = a[si + r];
            if ai == ZERO {
                continue;
            }
            for (j, &sj) in sp.support.iter().enumerate() {
                out[(i, j)] += ai * b[sj + r].conj();
            }
        }
    }
    Ok(out)
}

/// Reduced matrix `Tr_rest m` on the ordered `keep` labels.
pub fn reduce_mixed(layout: &SubsystemLayout, keep: &[String], m: &CMatrix) -> Result<CMatrix> {
    let sp = split_offsets(layout, keep)?;
    let d = sp.support.len();
    let mut out = CMatrix::zeros(d, d);
    for (i, &si) in sp.support.iter().enumerate() {
        for (j, &sj) in sp.support.iter().enumerate() {
            out[(i, j)] = sp.rest.iter().map(|&r| m[(si + r, sj + r)]).sum();
        }
    }
    Ok(out)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().sum()
}

/// Largest entry-wise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Spectral decomposition of a Hermitian matrix into distinct eigenvalues
/// and their eigenprojectors. Eigenvalues closer than `tol` are merged.
pub fn spectral_projectors(m: &CMatrix, tol: f64) -> Vec<(f64, CMatrix)> {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in order {
        let lambda = eig.eigenvalues[i];
        match groups.last_mut() {
            Some((l, members)) if (lambda - *l).abs() <= tol => members.push(i),
            _ => groups.push((lambda, vec![i])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let n = m.nrows();
            let mut p = CMatrix::zeros(n, n);
            let mut mean = 0.0;
            for &i in &members {
                let v = eig.eigenvectors.column(i);
                p += v * v.adjoint();
                mean += eig.eigenvalues[i];
            }
            (mean / members.len() as f64, p)
        })
        .collect()
}

pub fn outer(a: &CVector, b: &CVector) -> CMatrix {
    a * b.adjoint()
}

/// Kronecker product of two vectors, first factor most significant.
pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    let mut out = CVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn norm_sqr(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

/// Rows of `[re, im]` pairs, the external matrix format.
pub fn matrix_to_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn vector_to_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, actual: r.len() });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn vector_from_pairs(v: &[[f64; 2]]) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|p| C64::new(p[0], p[1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::labels;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn apply_local_matches_kronecker_embedding() {
        let layout = SubsystemLayout::new(["a", "b"], vec![2, 3]).unwrap();
        let op = CMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64, i as f64 - j as f64));
        let v = CVector::from_fn(6, |i, _| C64::new(i as f64 + 1.0, 0.5));
        let embedded = kron(&CMatrix::identity(2, 2), &op);
        let got = apply_local(&layout, &labels(&["b"]), &op, &v).unwrap();
        assert!((got - embedded * &v).norm() < 1e-12);
    }

    #[test]
    fn left_and_right_application() {
        let layout = SubsystemLayout::new(["a", "b"], vec![3, 2]).unwrap();
        let op = CMatrix::from_fn(3, 3, |i, j| C64::new(i as f64, j as f64));
        let m = CMatrix::from_fn(6, 6, |i, j| C64::new((i + 2 * j) as f64, (i * j) as f64));
        let embedded = kron(&op, &CMatrix::identity(2, 2));
        let l = apply_local_left(&layout, &labels(&["a"]), &op, &m).unwrap();
        let r = apply_local_right(&layout, &labels(&["a"]), &op, &m).unwrap();
        assert!(max_abs_diff(&l, &(&embedded * &m)) < 1e-12);
        assert!(max_abs_diff(&r, &(&m * &embedded)) < 1e-12);
    }

    #[test]
    fn spectral_groups_degenerate_eigenvalues() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(-1.0), c(1.0)]));
        let sp = spectral_projectors(&m, 1e-9);
        assert_eq!(sp.len(), 2);
        assert!((sp[0].0 + 1.0).abs() < 1e-12);
        assert!((trace(&sp[1].1).re - 2.0).abs() < 1e-12);
    }
}
