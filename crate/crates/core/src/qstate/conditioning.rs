use super::{disjoint, ensure_possible, event_probability, project};
use crate::linalg::{self, CVector};
use crate::operator::LocalOperator;
use crate::{DensityOperator, Error, Ket, Projector, QuantumState, Result, SubsystemLayout};

fn keep_in_layout_order(layout: &SubsystemLayout, keep: &[String]) -> Result<Vec<String>> {
    layout.check_labels(keep)?;
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one subsystem".into()));
    }
    if keep.len() == layout.len() {
        return Err(Error::InvalidArgument("partial trace must trace out at least one subsystem".into()));
    }
    Ok(layout.labels().iter().filter(|l| keep.contains(l)).cloned().collect())
}

/// Reduced state on `keep` (a non-empty proper subset of the layout). The
/// result keeps the original factor order.
pub fn partial_trace<S: QuantumState + ?Sized>(state: &S, keep: &[String]) -> Result<DensityOperator> {
    let keep = keep_in_layout_order(state.layout(), keep)?;
    let m = state.reduced_matrix(&keep)?;
    Ok(DensityOperator::from_parts(state.layout().restrict(&keep)?, m))
}

/// `(w, w⁻¹ Tr_rest(ρ (Q ⊗ 1)))` on the `keep` labels, with `keep` disjoint
/// from the support of `q`.
pub fn conditional_state<S: QuantumState + ?Sized>(
    state: &S,
    q: &Projector,
    keep: &[String],
) -> Result<(f64, DensityOperator)> {
    let layout = state.layout();
    let keep = keep_in_layout_order(layout, keep)?;
    if !disjoint(&keep, q.support()) {
        return Err(Error::InvalidArgument("conditioned subsystems overlap the conditioning event".into()));
    }
    let weight = event_probability(state, q)?;
    ensure_possible(weight)?;
    let rho = state.to_density();
    let rq = linalg::apply_local_right(layout, q.support(), q.matrix(), rho.matrix())?;
    let m = linalg::reduce_mixed(layout, &keep, &rq)?.unscale(weight);
    Ok((weight, DensityOperator::from_parts(layout.restrict(&keep)?, m)))
}

/// Conditional state of everything outside `q`'s support given the
/// occurrence of `q`: `ρ' = w⁻¹ Tr_q(|Ψ⟩⟨Ψ| Q)`.
pub fn conditional_subsystem_state(psi: &Ket, q: &Projector) -> Result<(f64, DensityOperator)> {
    q.check_in(psi.layout())?;
    let layout = psi.layout();
    let keep = layout.complement(q.support());
    let keep = keep_in_layout_order(layout, &keep)?;
    let weight = event_probability(psi, q)?;
    ensure_possible(weight)?;
    // |Ψ⟩⟨Ψ|Q = |Ψ⟩⟨QΨ| for Hermitian Q
    let projected = project(psi, q)?;
    let m = linalg::reduce_outer(layout, &keep, psi.amplitudes(), &projected)?.unscale(weight);
    Ok((weight, DensityOperator::from_parts(layout.restrict(&keep)?, m)))
}

/// State after the ideal occurrence of `q`: `(Tr ρQ, QρQ / Tr ρQ)`.
pub fn luders_conditioning(rho: &DensityOperator, q: &Projector) -> Result<(f64, DensityOperator)> {
    let weight = event_probability(rho, q)?;
    ensure_possible(weight)?;
    let layout = rho.layout();
    let qr = linalg::apply_local_left(layout, q.support(), q.matrix(), rho.matrix())?;
    let qrq = linalg::apply_local_right(layout, q.support(), q.matrix(), &qr)?;
    Ok((weight, DensityOperator::from_parts(layout.clone(), qrq.unscale(weight))))
}

/// Relative state for a rank-one condition `|φ⟩⟨φ|`: contracts `psi` with
/// `⟨φ|` on φ's subsystems and normalizes the remainder.
pub fn everett_relative_state(psi: &Ket, phi: &Ket) -> Result<(f64, Ket)> {
    let layout = psi.layout();
    let support = phi.layout().labels();
    let expected = layout.restrict_ordered(support)?;
    if expected.dims() != phi.layout().dims() {
        return Err(Error::DimensionMismatch {
            expected: expected.total_dim(),
            actual: phi.layout().total_dim(),
        });
    }
    let rest = layout.complement(support);
    if rest.is_empty() {
        return Err(Error::InvalidArgument("relative state needs at least one uncontracted subsystem".into()));
    }
    let c: CVector = linalg::contract(layout, support, phi.amplitudes(), psi.amplitudes())?;
    let weight = linalg::norm_sqr(&c);
    ensure_possible(weight)?;
    let ket = Ket::from_parts(layout.restrict(&rest)?, c.unscale(weight.sqrt()));
    Ok((weight, ket))
}
