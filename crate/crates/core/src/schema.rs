//! JSON input documents: states, projectors, beables, observables and the
//! single-problem document used by the command-line verifications.
//!
//! Complex numbers are `[re, im]` pairs. Every error names the offending
//! field as a dotted path (`state.amplitudes[2]`).

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::linalg::{self, CMatrix, CVector, C64};
use crate::{BeableObservable, Error, Ket, Observable, Projector, Result, SubsystemLayout, SCHEMA_VERSION, TAU_ALG};

pub type Pair = [f64; 2];

/// Deserializes `text`, reporting the JSON path of the first failure.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::spec(if path == "." { "(document)".to_string() } else { path }, e.into_inner().to_string())
    })
}

fn at(path: &str, e: Error) -> Error {
    match e {
        Error::Spec { .. } => e,
        other => Error::spec(path, other.to_string()),
    }
}

fn pair(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSpec {
    pub labels: Vec<String>,
    /// Defaults to all qubits.
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
}

impl LayoutSpec {
    pub fn build(&self, path: &str) -> Result<SubsystemLayout> {
        let dims = self.dims.clone().unwrap_or_else(|| vec![2; self.labels.len()]);
        SubsystemLayout::new(self.labels.iter().cloned(), dims).map_err(|e| at(path, e))
    }
}

/// One basis term `amplitude |digits⟩`; the amplitude may be given directly
/// or as `sqrt(weight)·e^{i·phase}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    /// Digit per subsystem label.
    pub basis: BTreeMap<String, usize>,
    #[serde(default)]
    pub amplitude: Option<Pair>,
    #[serde(default)]
    pub weight: Option<f64>,
    #[serde(default)]
    pub phase: Option<f64>,
}

/// A branch of an Eq.-(1)-style sum `Σ √w_i e^{iφ_i} |Ψ_i⟩`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub weight: f64,
    #[serde(default)]
    pub phase: f64,
    pub ket: StateSpec,
}

/// Exactly one of the three forms must be present.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    #[serde(default)]
    pub amplitudes: Option<Vec<Pair>>,
    #[serde(default)]
    pub terms: Option<Vec<TermSpec>>,
    #[serde(default)]
    pub branches: Option<Vec<BranchSpec>>,
}

impl StateSpec {
    /// Builds and validates the state. Normalization is checked, never imposed.
    pub fn build(&self, layout: &SubsystemLayout, path: &str) -> Result<Ket> {
        let amps = self.amplitudes_in(layout, path)?;
        let n = linalg::norm_sqr(&amps);
        if (n - 1.0).abs() > TAU_ALG {
            return Err(Error::spec(path, format!("state is not normalized (squared norm {n})")));
        }
        Ket::new(layout.clone(), amps).map_err(|e| at(path, e))
    }

    fn amplitudes_in(&self, layout: &SubsystemLayout, path: &str) -> Result<CVector> {
        let forms = [self.amplitudes.is_some(), self.terms.is_some(), self.branches.is_some()];
        if forms.iter().filter(|&&f| f).count() != 1 {
            return Err(Error::spec(path, "give exactly one of `amplitudes`, `terms`, `branches`"));
        }
        let dim = layout.total_dim();
        if let Some(a) = &self.amplitudes {
            if a.len() != dim {
                return Err(Error::spec(
                    format!("{path}.amplitudes"),
                    format!("expected {dim} amplitudes for the layout, got {}", a.len()),
                ));
            }
            return Ok(CVector::from_iterator(dim, a.iter().map(pair)));
        }
        if let Some(terms) = &self.terms {
            let mut v = CVector::zeros(dim);
            for (k, t) in terms.iter().enumerate() {
                let tp = format!("{path}.terms[{k}]");
                v[term_index(layout, &t.basis, &tp)?] += term_amplitude(t, &tp)?;
            }
            return Ok(v);
        }
        let branches = self.branches.as_ref().expect("one form present");
        if branches.is_empty() {
            return Err(Error::spec(format!("{path}.branches"), "no branches"));
        }
        let mut v = CVector::zeros(dim);
        let mut total = 0.0;
        for (k, b) in branches.iter().enumerate() {
            let bp = format!("{path}.branches[{k}]");
            if !(b.weight >= 0.0 && b.weight <= 1.0) {
                return Err(Error::spec(format!("{bp}.weight"), format!("weight {} is outside [0, 1]", b.weight)));
            }
            total += b.weight;
            let ket = b.ket.build(layout, &format!("{bp}.ket"))?;
            v += ket.amplitudes() * C64::from_polar(b.weight.sqrt(), b.phase);
        }
        if (total - 1.0).abs() > TAU_ALG {
            return Err(Error::spec(format!("{path}.branches"), format!("branch weights sum to {total}, not 1")));
        }
        let n = linalg::norm_sqr(&v);
        if (n - 1.0).abs() > TAU_ALG {
            return Err(Error::spec(
                format!("{path}.branches"),
                format!("branch kets are not orthogonal: the sum has squared norm {n}"),
            ));
        }
        Ok(v)
    }
}

fn term_index(layout: &SubsystemLayout, basis: &BTreeMap<String, usize>, path: &str) -> Result<usize> {
    let bp = format!("{path}.basis");
    if let Some(l) = basis.keys().find(|l| !layout.contains(l)) {
        return Err(Error::spec(&bp, format!("unknown subsystem label `{l}`")));
    }
    let digits = layout
        .labels()
        .iter()
        .map(|l| basis.get(l).copied().ok_or_else(|| Error::spec(&bp, format!("missing digit for `{l}`"))))
        .collect::<Result<Vec<_>>>()?;
    layout.index_of_digits(&digits).map_err(|e| at(&bp, e))
}

fn term_amplitude(t: &TermSpec, path: &str) -> Result<C64> {
    match (t.amplitude, t.weight) {
        (Some(a), None) if t.phase.is_none() => Ok(pair(&a)),
        (None, Some(w)) if w >= 0.0 => Ok(C64::from_polar(w.sqrt(), t.phase.unwrap_or(0.0))),
        (None, Some(w)) => Err(Error::spec(format!("{path}.weight"), format!("negative weight {w}"))),
        _ => Err(Error::spec(path, "give either `amplitude` or `weight` (with optional `phase`)")),
    }
}

/// A projector on `support`: a list of joint basis indices, a list of
/// orthonormal vectors spanning its range, or an explicit matrix.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectorSpec {
    #[serde(default)]
    pub support: Option<Vec<String>>,
    #[serde(default)]
    pub basis: Option<Vec<usize>>,
    #[serde(default)]
    pub vectors: Option<Vec<Vec<Pair>>>,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<Pair>>>,
}

impl ProjectorSpec {
    /// `inherited` supplies the support when the spec omits it.
    pub fn build(&self, layout: &SubsystemLayout, inherited: Option<&[String]>, path: &str) -> Result<Projector> {
        let support = match (&self.support, inherited) {
            (Some(s), _) => s.clone(),
            (None, Some(s)) => s.to_vec(),
            (None, None) => return Err(Error::spec(format!("{path}.support"), "missing field `support`")),
        };
        layout.check_labels(&support).map_err(|e| at(&format!("{path}.support"), e))?;
        let dim = layout.dim_of_set(&support)?;
        let forms = [self.basis.is_some(), self.vectors.is_some(), self.matrix.is_some()];
        if forms.iter().filter(|&&f| f).count() != 1 {
            return Err(Error::spec(path, "give exactly one of `basis`, `vectors`, `matrix`"));
        }
        if let Some(b) = &self.basis {
            return Projector::basis(support, dim, b).map_err(|e| at(&format!("{path}.basis"), e));
        }
        if let Some(vs) = &self.vectors {
            let vp = format!("{path}.vectors");
            let vecs = vs
                .iter()
                .enumerate()
                .map(|(k, v)| {
                    if v.len() != dim {
                        return Err(Error::spec(format!("{vp}[{k}]"), format!("expected {dim} components, got {}", v.len())));
                    }
                    Ok(CVector::from_iterator(dim, v.iter().map(pair)))
                })
                .collect::<Result<Vec<_>>>()?;
            return Projector::span(support, &vecs).map_err(|e| at(&vp, e));
        }
        let mp = format!("{path}.matrix");
        let m = square_matrix(self.matrix.as_ref().expect("one form present"), dim, &mp)?;
        Projector::new(support, m).map_err(|e| at(&mp, e))
    }
}

fn square_matrix(rows: &[Vec<Pair>], dim: usize, path: &str) -> Result<CMatrix> {
    if rows.len() != dim {
        return Err(Error::spec(path, format!("expected {dim} rows, got {}", rows.len())));
    }
    if let Some((k, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(Error::spec(format!("{path}[{k}]"), format!("expected {dim} entries, got {}", r.len())));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| pair(&rows[i][j])))
}

/// A beable: its projectors (inheriting `support`), or the computational
/// basis of a single subsystem.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeableSpec {
    pub support: Vec<String>,
    #[serde(default)]
    pub projectors: Option<Vec<ProjectorSpec>>,
    #[serde(default)]
    pub computational: bool,
    #[serde(default)]
    pub value_names: Option<Vec<String>>,
}

impl BeableSpec {
    pub fn build(&self, layout: &SubsystemLayout, path: &str) -> Result<BeableObservable> {
        layout.check_labels(&self.support).map_err(|e| at(&format!("{path}.support"), e))?;
        let beable = match (&self.projectors, self.computational) {
            (Some(ps), false) => {
                let projectors = ps
                    .iter()
                    .enumerate()
                    .map(|(k, p)| {
                        let pp = format!("{path}.projectors[{k}]");
                        if p.support.as_ref().is_some_and(|s| s != &self.support) {
                            return Err(Error::spec(format!("{pp}.support"), "differs from the beable support"));
                        }
                        p.build(layout, Some(&self.support), &pp)
                    })
                    .collect::<Result<Vec<_>>>()?;
                BeableObservable::new(projectors, None)
            }
            (None, true) => {
                if self.support.len() != 1 {
                    return Err(Error::spec(
                        format!("{path}.computational"),
                        "computational beables act on exactly one subsystem",
                    ));
                }
                BeableObservable::computational(&self.support[0], layout.dim_of(&self.support[0])?)
            }
            _ => return Err(Error::spec(path, "give either `projectors` or `computational: true`")),
        }
        .map_err(|e| at(path, e))?;
        match &self.value_names {
            Some(names) => beable.with_value_names(names.clone()).map_err(|e| at(&format!("{path}.value_names"), e)),
            None => Ok(beable),
        }
    }
}

/// A Hermitian observable: explicit matrix, diagonal spectrum in the
/// computational basis, or a Pauli matrix on one qubit.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub support: Vec<String>,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<Pair>>>,
    #[serde(default)]
    pub diagonal: Option<Vec<f64>>,
    #[serde(default)]
    pub pauli: Option<String>,
}

impl ObservableSpec {
    pub fn build(&self, layout: &SubsystemLayout, path: &str) -> Result<Observable> {
        let sp = format!("{path}.support");
        layout.check_labels(&self.support).map_err(|e| at(&sp, e))?;
        let dim = layout.dim_of_set(&self.support)?;
        let forms = [self.matrix.is_some(), self.diagonal.is_some(), self.pauli.is_some()];
        if forms.iter().filter(|&&f| f).count() != 1 {
            return Err(Error::spec(path, "give exactly one of `matrix`, `diagonal`, `pauli`"));
        }
        if let Some(m) = &self.matrix {
            let mp = format!("{path}.matrix");
            return Observable::new(self.support.clone(), square_matrix(m, dim, &mp)?).map_err(|e| at(&mp, e));
        }
        if let Some(d) = &self.diagonal {
            let dp = format!("{path}.diagonal");
            if d.len() != dim {
                return Err(Error::spec(dp, format!("expected {dim} values, got {}", d.len())));
            }
            let m = CMatrix::from_fn(dim, dim, |i, j| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) });
            return Observable::new(self.support.clone(), m).map_err(|e| at(&dp, e));
        }
        let pp = format!("{path}.pauli");
        if dim != 2 || self.support.len() != 1 {
            return Err(Error::spec(pp, "Pauli observables act on a single qubit"));
        }
        let label = &self.support[0];
        match self.pauli.as_deref().expect("one form present") {
            "x" | "X" => Ok(Observable::pauli_x(label)),
            "y" | "Y" => Ok(Observable::pauli_y(label)),
            "z" | "Z" => Ok(Observable::pauli_z(label)),
            other => Err(Error::spec(pp, format!("unknown Pauli matrix `{other}` (expected x, y or z)"))),
        }
    }
}

pub(crate) fn check_schema(schema: u32) -> Result<()> {
    if schema != SCHEMA_VERSION {
        return Err(Error::spec("schema", format!("unsupported schema version {schema} (expected {SCHEMA_VERSION})")));
    }
    Ok(())
}

/// One state, one beable and optionally one observable.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub schema: u32,
    pub layout: LayoutSpec,
    pub state: StateSpec,
    pub beable: BeableSpec,
    #[serde(default)]
    pub observable: Option<ObservableSpec>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub psi: Ket,
    pub beable: BeableObservable,
    pub observable: Option<Observable>,
}

impl ProblemDoc {
    pub fn build(&self) -> Result<Problem> {
        check_schema(self.schema)?;
        let layout = self.layout.build("layout")?;
        Ok(Problem {
            psi: self.state.build(&layout, "state")?,
            beable: self.beable.build(&layout, "beable")?,
            observable: self.observable.as_ref().map(|o| o.build(&layout, "observable")).transpose()?,
        })
    }
}

pub fn parse_problem(text: &str) -> Result<Problem> {
    from_json::<ProblemDoc>(text)?.build()
}
