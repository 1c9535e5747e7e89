use super::{branch_decompose, disjoint};
use crate::linalg;
use crate::operator::LocalOperator;
use crate::{BeableObservable, Error, Ket, Projector, QuantumState, Result};

/// Probability of the joint occurrence `P₁P₂` of two events on disjoint
/// supports, clamped to `[0, 1]`.
pub fn coincidence_probability<S: QuantumState + ?Sized>(state: &S, p1: &Projector, p2: &Projector) -> Result<f64> {
    p1.check_in(state.layout())?;
    p2.check_in(state.layout())?;
    if !disjoint(p1.support(), p2.support()) {
        return Err(Error::InvalidArgument("coincidence projectors must act on distinct subsystems".into()));
    }
    let support: Vec<String> = p1.support().iter().chain(p2.support()).cloned().collect();
    let joint = linalg::kron(p1.matrix(), p2.matrix());
    Ok(state.expectation(&support, &joint)?.re.clamp(0.0, 1.0))
}

/// Difference between the coincidence probability in `psi` and in its
/// decohered mixture over the beable branches: the sum of the cross terms
/// `Σ_{i≠j} √(w_i w_j) ⟨Ψ_i|P₁P₂|Ψ_j⟩`.
///
/// The mixture side is evaluated branch by branch, `Σ_i w_i ⟨Ψ_i|P₁P₂|Ψ_i⟩`,
/// which equals `Tr(ρ_mix P₁P₂)` without forming the mixture.
pub fn interference_term(psi: &Ket, beable: &BeableObservable, p1: &Projector, p2: &Projector) -> Result<f64> {
    let coherent = coincidence_probability(psi, p1, p2)?;
    let branches = branch_decompose(psi, beable)?;
    let mut mixed = 0.0;
    for b in &branches {
        mixed += b.weight * coincidence_probability(&b.ket, p1, p2)?;
    }
    Ok(coherent - mixed.clamp(0.0, 1.0))
}
