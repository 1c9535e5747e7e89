//! Closed-form quantities: branches and their weights, decohered mixtures,
//! partial traces, conditional subsystem states, Lüders conditioning,
//! coincidence probabilities and the interference between branches.

mod branch;
mod conditioning;
mod interference;

pub use branch::{branch_decompose, decohered_mixture, reconstruct, Branch};
pub use conditioning::{
    conditional_state, conditional_subsystem_state, everett_relative_state, luders_conditioning, partial_trace,
};
pub use interference::{coincidence_probability, interference_term};

use crate::linalg::{self, CVector};
use crate::operator::{LocalOperator, Projector};
use crate::{Error, Ket, QuantumState, Result};

/// `|a⟩ ⊗ |b⟩` over the concatenated layout.
pub fn tensor_product(a: &Ket, b: &Ket) -> Result<Ket> {
    let layout = a.layout().concat(b.layout())?;
    Ket::new(layout, linalg::kron_vec(a.amplitudes(), b.amplitudes()))
}

/// `Tr(ρ Q)` (or `⟨Ψ|Q|Ψ⟩`), clamped to `[0, 1]`.
pub fn event_probability<S: QuantumState + ?Sized>(state: &S, q: &Projector) -> Result<f64> {
    q.check_in(state.layout())?;
    let p = state.expectation(q.support(), q.matrix())?.re;
    Ok(p.clamp(0.0, 1.0))
}

/// `(Q ⊗ 1)|Ψ⟩`, unnormalized.
pub(crate) fn project(psi: &Ket, q: &Projector) -> Result<CVector> {
    q.check_in(psi.layout())?;
    linalg::apply_local(psi.layout(), q.support(), q.matrix(), psi.amplitudes())
}

pub(crate) fn disjoint(a: &[String], b: &[String]) -> bool {
    a.iter().all(|l| !b.contains(l))
}

fn ensure_possible(weight: f64) -> Result<()> {
    if weight <= crate::TAU_BRANCH {
        return Err(Error::ImpossibleCondition(weight));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::labels;
    use crate::linalg::C64;
    use crate::SubsystemLayout;
    use std::f64::consts::FRAC_1_SQRT_2;

    pub(crate) fn bell() -> Ket {
        let l = SubsystemLayout::qubits(["1", "2"]).unwrap();
        let a = CVector::from_vec(vec![
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(FRAC_1_SQRT_2, 0.0),
        ]);
        Ket::new(l, a).unwrap()
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = Ket::single("1", &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let one = Ket::single("2", &[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
        let k = tensor_product(&zero, &one).unwrap();
        assert_eq!(k.dim(), 4);
        for (i, z) in k.amplitudes().iter().enumerate() {
            let expected = if i == 1 { 1.0 } else { 0.0 };
            assert_eq!(*z, C64::new(expected, 0.0));
        }
        assert_eq!(k.layout().labels(), &labels(&["1", "2"])[..]);
    }

    #[test]
    fn tensor_of_superposition() {
        let h = FRAC_1_SQRT_2;
        let plus = Ket::single("1", &[C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
        let zero = Ket::single("2", &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let k = tensor_product(&plus, &zero).unwrap();
        let expected = [h, 0.0, h, 0.0];
        for (z, e) in k.amplitudes().iter().zip(expected) {
            assert!((z - C64::new(e, 0.0)).norm() < 1e-15);
        }
        assert!((k.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_rejects_duplicate_labels() {
        let a = Ket::single("1", &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(matches!(tensor_product(&a, &a), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn event_probabilities() {
        let q0 = Projector::basis(labels(&["2"]), 2, &[0]).unwrap();
        assert!((event_probability(&bell(), &q0).unwrap() - 0.5).abs() < 1e-15);
        let id = Projector::identity(labels(&["1", "2"]), 4).unwrap();
        assert!((event_probability(&bell(), &id).unwrap() - 1.0).abs() < 1e-15);
        let k01 = Ket::basis(SubsystemLayout::qubits(["1", "2"]).unwrap(), &[0, 1]).unwrap();
        assert_eq!(event_probability(&k01, &q0).unwrap(), 0.0);
        assert!((event_probability(&bell().density(), &q0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn event_probability_dimension_mismatch() {
        let q = Projector::basis(labels(&["2"]), 3, &[0]).unwrap();
        assert!(matches!(event_probability(&bell(), &q), Err(Error::DimensionMismatch { .. })));
        let q = Projector::basis(labels(&["9"]), 2, &[0]).unwrap();
        assert!(matches!(event_probability(&bell(), &q), Err(Error::UnknownLabel(_))));
    }
}
