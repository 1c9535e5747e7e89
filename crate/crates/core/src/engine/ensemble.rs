use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::operator::LocalOperator;
use crate::qstate::{conditional_state, event_probability};
use crate::rng::{domain, StreamKey};
use crate::{BeableObservable, Error, Ket, Observable, QuantumState, Result, TAU_BRANCH};

/// A simulated measurement result on one individual system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub observable: String,
    pub value: f64,
}

/// One member of a laboratory ensemble: its definite beable value and any
/// simulated measurement results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndividualSystem {
    pub beable_value: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub recorded_results: Vec<Record>,
}

/// `N` individual systems described by `state`, each tagged with a beable
/// value. Only tags and records are stored; subensembles carry no state.
#[derive(Debug, Clone)]
pub struct Ensemble {
    state: Ket,
    beable: BeableObservable,
    weights: Vec<f64>,
    members: Vec<IndividualSystem>,
    seed: u64,
}

/// Born weights `w_i = ⟨Ψ|Q_i|Ψ⟩` of every beable value, in value order.
pub fn beable_weights<S: QuantumState + ?Sized>(state: &S, beable: &BeableObservable) -> Result<Vec<f64>> {
    beable.check_in(state.layout())?;
    beable.projectors().iter().map(|q| event_probability(state, q)).collect()
}

/// Inverse-CDF draw from a finite distribution. Never returns an index of
/// zero weight.
pub(crate) fn draw_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last_positive = i;
        if u < acc {
            return i;
        }
    }
    last_positive
}

/// Draws the beable value of a single system described by `state`.
pub fn sample_beable_value<R: Rng + ?Sized>(state: &Ket, beable: &BeableObservable, rng: &mut R) -> Result<usize> {
    let weights = beable_weights(state, beable)?;
    Ok(draw_index(&weights, rng))
}

/// Samples `n` independent systems. Member `j` draws from stream `j` of
/// `(seed, BEABLE)`, so the result does not depend on the worker count.
pub fn build_ensemble(psi: &Ket, beable: &BeableObservable, n: usize, seed: u64) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
    }
    let weights = beable_weights(psi, beable)?;
    let key = StreamKey::new(seed, domain::BEABLE);
    let members = (0..n)
        .into_par_iter()
        .map(|j| IndividualSystem { beable_value: draw_index(&weights, &mut key.rng(j as u64)), recorded_results: Vec::new() })
        .collect();
    Ok(Ensemble { state: psi.clone(), beable: beable.clone(), weights, members, seed })
}

/// Mean and standard error of simulated `C₁` outcomes over one subensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubensembleAverage {
    pub value_index: usize,
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
}

impl Ensemble {
    pub fn state(&self) -> &Ket {
        &self.state
    }

    pub fn beable(&self) -> &BeableObservable {
        &self.beable
    }

    pub fn members(&self) -> &[IndividualSystem] {
        &self.members
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Theoretical weights the members were sampled from.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `N_i` per beable value.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.beable.len()];
        for m in &self.members {
            counts[m.beable_value] += 1;
        }
        counts
    }

    /// Indices of the members carrying beable value `i`.
    pub fn subensemble(&self, i: usize) -> Vec<usize> {
        self.members.iter().enumerate().filter(|(_, m)| m.beable_value == i).map(|(j, _)| j).collect()
    }

    /// Simulated ideal measurements of `c1` on subensemble `i`: returns
    /// `(member index, eigenvalue)` in member order. Member `j` draws from
    /// stream `j` of `key`.
    ///
    /// Each member is measured in the conditional state of `c1`'s
    /// subsystems relative to beable value `i`; the member's beable tag is
    /// not touched.
    pub fn sample_outcomes(&self, i: usize, c1: &Observable, key: StreamKey) -> Result<Vec<(usize, f64)>> {
        if i >= self.beable.len() {
            return Err(Error::InvalidArgument(format!("beable value {i} out of range")));
        }
        c1.check_in(self.state.layout())?;
        let subset = self.subensemble(i);
        if subset.is_empty() {
            return Err(Error::EmptySubensemble(i));
        }
        let (_, rho) = conditional_state(&self.state, self.beable.projector(i), c1.support())?;
        let spectrum = c1.spectrum();
        let born = spectrum
            .iter()
            .map(|(_, e)| rho.expectation(e.support(), e.matrix()).map(|z| z.re.max(0.0)))
            .collect::<Result<Vec<_>>>()?;
        Ok(subset
            .into_par_iter()
            .map(|j| (j, spectrum[draw_index(&born, &mut key.rng(j as u64))].0))
            .collect())
    }

    /// Measures subensemble `i` and appends the outcomes to each member's
    /// records under `observable_id`.
    pub fn measure_subensemble(
        &mut self,
        i: usize,
        observable_id: &str,
        c1: &Observable,
        key: StreamKey,
    ) -> Result<SubensembleAverage> {
        let outcomes = self.sample_outcomes(i, c1, key)?;
        for &(j, value) in &outcomes {
            self.members[j].recorded_results.push(Record { observable: observable_id.to_string(), value });
        }
        Ok(summarize(i, &outcomes))
    }
}

fn summarize(i: usize, outcomes: &[(usize, f64)]) -> SubensembleAverage {
    let n = outcomes.len();
    let mean = outcomes.iter().map(|&(_, v)| v).sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = outcomes.iter().map(|&(_, v)| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    SubensembleAverage { value_index: i, count: n, mean, stderr }
}

/// `⟨C₁ ⊗ 1⟩` over subensemble `i` from simulated ideal measurements.
pub fn subensemble_average(ensemble: &Ensemble, i: usize, c1: &Observable, key: StreamKey) -> Result<SubensembleAverage> {
    let outcomes = ensemble.sample_outcomes(i, c1, key)?;
    Ok(summarize(i, &outcomes))
}

/// Whether value `i` occurs with non-negligible probability.
pub(crate) fn occurs(weight: f64) -> bool {
    weight > TAU_BRANCH
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CVector, C64};
    use crate::rng::StreamKey;
    use crate::SubsystemLayout;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell() -> Ket {
        let l = SubsystemLayout::qubits(["1", "2"]).unwrap();
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        Ket::new(l, CVector::from_vec(vec![h, z, z, h])).unwrap()
    }

    fn weighted(w0: f64) -> Ket {
        let l = SubsystemLayout::qubits(["1", "2"]).unwrap();
        let z = C64::new(0.0, 0.0);
        Ket::new(l, CVector::from_vec(vec![C64::new(w0.sqrt(), 0.0), z, z, C64::new((1.0 - w0).sqrt(), 0.0)])).unwrap()
    }

    fn pointer() -> BeableObservable {
        BeableObservable::computational("2", 2).unwrap()
    }

    #[test]
    fn eigenstate_always_samples_its_value() {
        let psi = Ket::basis(SubsystemLayout::qubits(["1", "2"]).unwrap(), &[0, 1]).unwrap();
        for j in 0..200 {
            let mut rng = StreamKey::new(3, domain::BEABLE).rng(j);
            assert_eq!(sample_beable_value(&psi, &pointer(), &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn single_draws_follow_weights() {
        let psi = weighted(0.9);
        let n = 100_000;
        let key = StreamKey::new(11, domain::BEABLE);
        let hits = (0..n).filter(|&j| sample_beable_value(&psi, &pointer(), &mut key.rng(j)).unwrap() == 0).count();
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.9).abs() <= 3.0 * (0.09f64 / n as f64).sqrt(), "freq {freq}");
    }

    #[test]
    fn ensemble_counts() {
        assert!(build_ensemble(&bell(), &pointer(), 0, 1).is_err());
        let e = build_ensemble(&bell(), &pointer(), 1, 1).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e.members()[0].beable_value < 2);

        let e = build_ensemble(&bell(), &pointer(), 100_000, 5).unwrap();
        let c = e.counts();
        assert_eq!(c[0] + c[1], 100_000);
        assert!((c[0] as f64 / 1e5 - 0.5).abs() <= 4.8e-3);
        let again = build_ensemble(&bell(), &pointer(), 100_000, 5).unwrap();
        assert_eq!(again.members(), e.members());
    }

    #[test]
    fn ensemble_is_independent_of_thread_count() {
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = serial.install(|| build_ensemble(&bell(), &pointer(), 20_000, 99).unwrap());
        let b = wide.install(|| build_ensemble(&bell(), &pointer(), 20_000, 99).unwrap());
        assert_eq!(a.members(), b.members());
        let key = StreamKey::new(99, domain::MEASUREMENT);
        let x = Observable::pauli_x("1");
        let oa = serial.install(|| a.sample_outcomes(0, &x, key).unwrap());
        let ob = wide.install(|| b.sample_outcomes(0, &x, key).unwrap());
        assert_eq!(oa, ob);
    }

    #[test]
    fn subensemble_averages_on_bell() {
        let e = build_ensemble(&bell(), &pointer(), 100_000, 7).unwrap();
        let key = StreamKey::new(7, domain::MEASUREMENT);
        let z = subensemble_average(&e, 0, &Observable::pauli_z("1"), key).unwrap();
        assert_eq!(z.mean, 1.0);
        assert_eq!(z.stderr, 0.0);

        let id = Observable::identity(vec!["1".into()], 2).unwrap();
        let a = subensemble_average(&e, 1, &id, key).unwrap();
        assert_eq!((a.mean, a.stderr), (1.0, 0.0));

        let x = subensemble_average(&e, 0, &Observable::pauli_x("1"), key).unwrap();
        assert!(x.count > 45_000);
        assert!(x.mean.abs() <= 3.0 / (x.count as f64).sqrt(), "mean {}", x.mean);
    }

    #[test]
    fn measuring_records_results_and_keeps_tags() {
        let mut e = build_ensemble(&bell(), &pointer(), 1_000, 2).unwrap();
        let tags: Vec<usize> = e.members().iter().map(|m| m.beable_value).collect();
        let key = StreamKey::new(2, domain::MEASUREMENT);
        let avg = e.measure_subensemble(1, "sz", &Observable::pauli_z("1"), key).unwrap();
        assert_eq!(avg.mean, -1.0);
        for (m, t) in e.members().iter().zip(tags) {
            assert_eq!(m.beable_value, t);
            if t == 1 {
                assert_eq!(m.recorded_results, vec![Record { observable: "sz".into(), value: -1.0 }]);
            } else {
                assert!(m.recorded_results.is_empty());
            }
        }
    }

    #[test]
    fn empty_subensemble_is_an_error() {
        let psi = Ket::basis(SubsystemLayout::qubits(["1", "2"]).unwrap(), &[0, 0]).unwrap();
        let e = build_ensemble(&psi, &pointer(), 10, 1).unwrap();
        let key = StreamKey::new(1, domain::MEASUREMENT);
        assert!(matches!(
            subensemble_average(&e, 1, &Observable::pauli_z("1"), key),
            Err(Error::EmptySubensemble(1))
        ));
    }
}
