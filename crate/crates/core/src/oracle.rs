//! Brute-force reference implementations for tests.
//!
//! Everything here works on full-space matrices and decodes indices digit
//! by digit, sharing no index arithmetic with the production code paths.

use crate::linalg::{CMatrix, CVector, C64};
use crate::{BeableObservable, Ket, LocalOperator, SubsystemLayout};

fn decode(dims: &[usize], mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        digits[k] = index % dims[k];
        index /= dims[k];
    }
    digits
}

fn encode(dims: &[usize], digits: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
}

fn positions(layout: &SubsystemLayout, labels: &[String]) -> Vec<usize> {
    labels
        .iter()
        .map(|l| layout.labels().iter().position(|x| x == l).expect("label in layout"))
        .collect()
}

fn pick(digits: &[usize], pos: &[usize]) -> Vec<usize> {
    pos.iter().map(|&p| digits[p]).collect()
}

/// `|ψ⟩⟨ψ|` as a full matrix.
pub fn density(psi: &Ket) -> CMatrix {
    let a = psi.amplitudes();
    CMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj())
}

/// `op ⊗ 1` on the full space, `op` indexed in the order of `support`.
pub fn embed(layout: &SubsystemLayout, support: &[String], op: &CMatrix) -> CMatrix {
    let dims = layout.dims();
    let n = layout.total_dim();
    let pos = positions(layout, support);
    let sdims: Vec<usize> = pos.iter().map(|&p| dims[p]).collect();
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !pos.contains(k)).collect();
    CMatrix::from_fn(n, n, |i, j| {
        let di = decode(dims, i);
        let dj = decode(dims, j);
        if pick(&di, &rest) != pick(&dj, &rest) {
            return C64::new(0.0, 0.0);
        }
        op[(encode(&sdims, &pick(&di, &pos)), encode(&sdims, &pick(&dj, &pos)))]
    })
}

/// Partial trace keeping `keep`, result indexed in the order of `keep`.
pub fn partial_trace(layout: &SubsystemLayout, m: &CMatrix, keep: &[String]) -> CMatrix {
    let dims = layout.dims();
    let pos = positions(layout, keep);
    let kdims: Vec<usize> = pos.iter().map(|&p| dims[p]).collect();
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !pos.contains(k)).collect();
    let dk: usize = kdims.iter().product();
    let mut out = CMatrix::zeros(dk, dk);
    let n = layout.total_dim();
    for i in 0..n {
        let di = decode(dims, i);
        for j in 0..n {
            let dj = decode(dims, j);
            if pick(&di, &rest) == pick(&dj, &rest) {
                out[(encode(&kdims, &pick(&di, &pos)), encode(&kdims, &pick(&dj, &pos)))] += m[(i, j)];
            }
        }
    }
    out
}

fn trace(m: &CMatrix) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// `Tr(Q_i ρ)` for every beable value.
pub fn weights(psi: &Ket, beable: &BeableObservable) -> Vec<f64> {
    let rho = density(psi);
    beable
        .projectors()
        .iter()
        .map(|q| trace(&(embed(psi.layout(), q.support(), q.matrix()) * &rho)).re)
        .collect()
}

/// `w⁻¹ Tr_rest(ρ (1 ⊗ Q))` with `keep` in the given order.
pub fn conditional(psi: &Ket, q_support: &[String], q: &CMatrix, keep: &[String]) -> (f64, CMatrix) {
    let rho = density(psi);
    let qf = embed(psi.layout(), q_support, q);
    let w = trace(&(&qf * &rho)).re;
    let m = partial_trace(psi.layout(), &(&rho * &qf), keep);
    (w, m / C64::new(w, 0.0))
}

/// `Tr(C ρ)` with `C` on `support`.
pub fn expectation(layout: &SubsystemLayout, rho: &CMatrix, support: &[String], c: &CMatrix) -> f64 {
    trace(&(embed(layout, support, c) * rho)).re
}

/// `Σ_i Q_i ρ Q_i` on the full space.
pub fn decohered(psi: &Ket, beable: &BeableObservable) -> CMatrix {
    let rho = density(psi);
    let n = rho.nrows();
    beable.projectors().iter().fold(CMatrix::zeros(n, n), |acc, q| {
        let qf = embed(psi.layout(), q.support(), q.matrix());
        acc + &qf * &rho * &qf
    })
}

/// `Tr(ρ P₁P₂) − Tr(ρ_mix P₁P₂)`.
pub fn interference(psi: &Ket, beable: &BeableObservable, p1: &crate::Projector, p2: &crate::Projector) -> f64 {
    let layout = psi.layout();
    let joint = embed(layout, p1.support(), p1.matrix()) * embed(layout, p2.support(), p2.matrix());
    trace(&(&joint * density(psi))).re - trace(&(&joint * decohered(psi, beable))).re
}

/// `(Q ⊗ 1)|ψ⟩` normalized, with its weight.
pub fn branch(psi: &Ket, q_support: &[String], q: &CMatrix) -> (f64, CVector) {
    let v = embed(psi.layout(), q_support, q) * psi.amplitudes();
    let w = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    (w, v / C64::new(w.sqrt(), 0.0))
}

/// Random instances for property checks.
pub mod random {
    use rand::seq::SliceRandom;
    use rand::Rng;

    use crate::linalg::{CMatrix, CVector, C64};
    use crate::{BeableObservable, Ket, Observable, Projector, SubsystemLayout};

    fn c<R: Rng>(rng: &mut R) -> C64 {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }

    /// Layout with `factors` subsystems labelled `s0, s1, …`.
    pub fn layout<R: Rng>(rng: &mut R, factors: usize, max_dim: usize) -> SubsystemLayout {
        let dims = (0..factors).map(|_| rng.random_range(2..=max_dim)).collect();
        SubsystemLayout::new((0..factors).map(|k| format!("s{k}")), dims).unwrap()
    }

    pub fn ket<R: Rng>(rng: &mut R, layout: &SubsystemLayout) -> Ket {
        let v = CVector::from_fn(layout.total_dim(), |_, _| c(rng));
        Ket::normalized(layout.clone(), v).unwrap()
    }

    /// Orthonormal basis of `C^d` as the columns of a unitary.
    pub fn unitary<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
        CMatrix::from_fn(d, d, |_, _| c(rng)).qr().q()
    }

    /// A beable on `support` from a random basis split into 2..=d groups.
    pub fn beable<R: Rng>(rng: &mut R, layout: &SubsystemLayout, support: &[String]) -> BeableObservable {
        let d = layout.dim_of_set(support).unwrap();
        let u = unitary(rng, d);
        let mut idx: Vec<usize> = (0..d).collect();
        idx.shuffle(rng);
        let groups = rng.random_range(2..=d);
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); groups];
        for (k, &i) in idx.iter().enumerate() {
            buckets[if k < groups { k } else { rng.random_range(0..groups) }].push(i);
        }
        let projectors = buckets
            .iter()
            .map(|b| {
                let cols: Vec<CVector> = b.iter().map(|&i| u.column(i).into_owned()).collect();
                Projector::span(support.to_vec(), &cols).unwrap()
            })
            .collect();
        BeableObservable::new(projectors, None).unwrap()
    }

    pub fn hermitian<R: Rng>(rng: &mut R, support: &[String], d: usize) -> Observable {
        let a = CMatrix::from_fn(d, d, |_, _| c(rng));
        let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        Observable::new(support.to_vec(), h).unwrap()
    }

    pub fn unit_vector<R: Rng>(rng: &mut R, d: usize) -> CVector {
        let v = CVector::from_fn(d, |_, _| c(rng));
        let n = v.norm();
        v / C64::new(n, 0.0)
    }

    pub fn rank_one<R: Rng>(rng: &mut R, support: &[String], d: usize) -> Projector {
        Projector::rank_one(support.to_vec(), &unit_vector(rng, d)).unwrap()
    }

    /// A non-empty proper subset of the layout's labels, in random order.
    pub fn proper_subset<R: Rng>(rng: &mut R, layout: &SubsystemLayout) -> Vec<String> {
        let mut labels = layout.labels().to_vec();
        labels.shuffle(rng);
        let k = rng.random_range(1..labels.len());
        labels.truncate(k);
        labels
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::labels;

    #[test]
    fn decode_encode_roundtrip() {
        let dims = [2, 3, 4];
        for i in 0..24 {
            assert_eq!(encode(&dims, &decode(&dims, i)), i);
        }
        assert_eq!(decode(&dims, 5), vec![0, 1, 1]);
    }

    #[test]
    fn embed_identity_is_identity() {
        let l = SubsystemLayout::new(["a", "b"], vec![2, 3]).unwrap();
        let e = embed(&l, &labels(&["b"]), &CMatrix::identity(3, 3));
        assert_eq!(e, CMatrix::identity(6, 6));
    }
}
