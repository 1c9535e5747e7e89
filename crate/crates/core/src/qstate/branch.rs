use serde::Serialize;

use super::project;
use crate::linalg::{self, CMatrix, CVector};
use crate::{BeableObservable, DensityOperator, Error, Ket, Result, TAU_BRANCH};

/// One beable-labelled component of a composite pure state:
/// `|Ψ_i⟩ = w_i^{-1/2} (Q_i ⊗ 1)|Ψ⟩` with `w_i = ⟨Ψ|Q_i|Ψ⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    pub value_index: usize,
    pub weight: f64,
    pub ket: Ket,
}

/// Splits `psi` into one branch per beable value carrying weight above
/// [`TAU_BRANCH`]. Values at or below the threshold are dropped.
pub fn branch_decompose(psi: &Ket, beable: &BeableObservable) -> Result<Vec<Branch>> {
    beable.check_in(psi.layout())?;
    let mut branches = Vec::new();
    for (i, q) in beable.projectors().iter().enumerate() {
        let v = project(psi, q)?;
        let weight = linalg::norm_sqr(&v);
        if weight > TAU_BRANCH {
            let ket = Ket::from_parts(psi.layout().clone(), v.unscale(weight.sqrt()));
            branches.push(Branch { value_index: i, weight, ket });
        }
    }
    if branches.is_empty() {
        return Err(Error::DegenerateBranches);
    }
    Ok(branches)
}

/// `Σ_i w_i |Ψ_i⟩⟨Ψ_i|`, the state with the branch coherences removed.
pub fn decohered_mixture(branches: &[Branch]) -> Result<DensityOperator> {
    let first = branches.first().ok_or(Error::EmptyBranches)?;
    let layout = first.ket.layout();
    let d = layout.total_dim();
    let mut m = CMatrix::zeros(d, d);
    for b in branches {
        if b.ket.layout() != layout {
            return Err(Error::InvalidArgument("branch kets live on different layouts".into()));
        }
        m += linalg::outer(b.ket.amplitudes(), b.ket.amplitudes()).scale(b.weight);
    }
    Ok(DensityOperator::from_parts(layout.clone(), m))
}

/// `Σ_i √w_i |Ψ_i⟩`, unnormalized.
pub fn reconstruct(branches: &[Branch]) -> Result<CVector> {
    let first = branches.first().ok_or(Error::EmptyBranches)?;
    let mut v = CVector::zeros(first.ket.dim());
    for b in branches {
        v += b.ket.amplitudes().scale(b.weight.sqrt());
    }
    Ok(v)
}
