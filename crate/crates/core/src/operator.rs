//! Local operators: projectors, Hermitian observables and beables.
//!
//! Every operator carries an ordered `support`, the subsystem labels it acts
//! on; its matrix is indexed in that order with the first label most
//! significant. Validation happens once, at construction.

use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMatrix, CVector, C64};
use crate::{Error, Result, SubsystemLayout, TAU_ALG};

pub trait LocalOperator {
    fn support(&self) -> &[String];
    fn matrix(&self) -> &CMatrix;

    fn dim(&self) -> usize {
        self.matrix().nrows()
    }

    /// Checks that the support exists in `layout` with a matching dimension.
    fn check_in(&self, layout: &SubsystemLayout) -> Result<()> {
        let d = layout.dim_of_set(self.support())?;
        layout.check_labels(self.support())?;
        if d != self.dim() {
            return Err(Error::DimensionMismatch { expected: d, actual: self.dim() });
        }
        Ok(())
    }
}

fn check_support(support: &[String], m: &CMatrix) -> Result<()> {
    if support.is_empty() {
        return Err(Error::InvalidArgument("operator support is empty".into()));
    }
    for (i, l) in support.iter().enumerate() {
        if support[..i].contains(l) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), actual: m.ncols() });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorDoc", into = "OperatorDoc")]
pub struct Projector {
    support: Vec<String>,
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct OperatorDoc {
    support: Vec<String>,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<OperatorDoc> for Projector {
    type Error = Error;
    fn try_from(doc: OperatorDoc) -> Result<Self> {
        Projector::new(doc.support, linalg::matrix_from_pairs(&doc.matrix)?)
    }
}

impl From<Projector> for OperatorDoc {
    fn from(p: Projector) -> Self {
        OperatorDoc { matrix: linalg::matrix_to_pairs(&p.matrix), support: p.support }
    }
}

impl Projector {
    /// Validates `P² = P` and `P = P†` within [`TAU_ALG`].
    pub fn new(support: Vec<String>, matrix: CMatrix) -> Result<Self> {
        check_support(&support, &matrix)?;
        let h = linalg::hermiticity_defect(&matrix);
        if h > TAU_ALG {
            return Err(Error::InvalidProjector(format!("not Hermitian (defect {h:e})")));
        }
        let idem = linalg::max_abs_diff(&(&matrix * &matrix), &matrix);
        if idem > TAU_ALG {
            return Err(Error::InvalidProjector(format!("not idempotent (defect {idem:e})")));
        }
        Ok(Projector { support, matrix })
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn rank_one(support: Vec<String>, v: &CVector) -> Result<Self> {
        let n = linalg::norm_sqr(v);
        if !(n > 0.0) {
            return Err(Error::InvalidProjector("zero vector".into()));
        }
        Projector::new(support, linalg::outer(v, v).unscale(n))
    }

    /// Sum of `|k⟩⟨k|` over the listed joint basis indices of the support.
    pub fn basis(support: Vec<String>, dim: usize, indices: &[usize]) -> Result<Self> {
        let mut m = CMatrix::zeros(dim, dim);
        for &k in indices {
            if k >= dim {
                return Err(Error::InvalidProjector(format!("basis index {k} out of range for dimension {dim}")));
            }
            m[(k, k)] = linalg::ONE;
        }
        Projector::new(support, m)
    }

    /// Projector onto the span of orthonormal `vectors`.
    pub fn span(support: Vec<String>, vectors: &[CVector]) -> Result<Self> {
        let dim = vectors.first().map(|v| v.len()).ok_or_else(|| Error::InvalidProjector("no vectors".into()))?;
        let mut m = CMatrix::zeros(dim, dim);
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: v.len() });
            }
            m += linalg::outer(v, v);
        }
        Projector::new(support, m)
    }

    pub fn identity(support: Vec<String>, dim: usize) -> Result<Self> {
        Projector::new(support, CMatrix::identity(dim, dim))
    }

    /// `1 − P` on the same support.
    pub fn complement(&self) -> Projector {
        let d = self.dim();
        Projector { support: self.support.clone(), matrix: CMatrix::identity(d, d) - &self.matrix }
    }

    pub fn rank(&self) -> usize {
        linalg::trace(&self.matrix).re.round() as usize
    }

    /// Whether `self` and `other` commute as operators on `layout`.
    pub fn commutes_with(&self, other: &Projector, layout: &SubsystemLayout) -> Result<bool> {
        self.check_in(layout)?;
        other.check_in(layout)?;
        if self.support.iter().all(|l| !other.support.contains(l)) {
            return Ok(true);
        }
        let d = layout.total_dim();
        let id = CMatrix::identity(d, d);
        let a = linalg::apply_local_left(layout, &self.support, &self.matrix, &id)?;
        let b = linalg::apply_local_left(layout, &other.support, &other.matrix, &id)?;
        let c = &a * &b - &b * &a;
        Ok(c.iter().all(|z| z.norm() <= TAU_ALG))
    }

    pub(crate) fn from_parts(support: Vec<String>, matrix: CMatrix) -> Self {
        Projector { support, matrix }
    }
}

impl LocalOperator for Projector {
    fn support(&self) -> &[String] {
        &self.support
    }
    fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Hermitian observable with a purely discrete (finite) spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorDoc", into = "OperatorDoc")]
pub struct Observable {
    support: Vec<String>,
    matrix: CMatrix,
}

impl TryFrom<OperatorDoc> for Observable {
    type Error = Error;
    fn try_from(doc: OperatorDoc) -> Result<Self> {
        Observable::new(doc.support, linalg::matrix_from_pairs(&doc.matrix)?)
    }
}

impl From<Observable> for OperatorDoc {
    fn from(o: Observable) -> Self {
        OperatorDoc { matrix: linalg::matrix_to_pairs(&o.matrix), support: o.support }
    }
}

/// Eigenvalues closer than this are treated as one degenerate level.
const DEGENERACY_TOL: f64 = 1e-9;

impl Observable {
    pub fn new(support: Vec<String>, matrix: CMatrix) -> Result<Self> {
        check_support(&support, &matrix).map_err(|e| Error::InvalidObservable(e.to_string()))?;
        let h = linalg::hermiticity_defect(&matrix);
        if h > TAU_ALG {
            return Err(Error::InvalidObservable(format!("not Hermitian (defect {h:e})")));
        }
        Ok(Observable { support, matrix })
    }

    pub fn diagonal(label: &str, values: &[f64]) -> Result<Self> {
        let d = CVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)));
        Observable::new(vec![label.to_string()], CMatrix::from_diagonal(&d))
    }

    pub fn pauli_x(label: &str) -> Self {
        let m = CMatrix::from_row_slice(2, 2, &[linalg::ZERO, linalg::ONE, linalg::ONE, linalg::ZERO]);
        Observable { support: vec![label.to_string()], matrix: m }
    }

    pub fn pauli_y(label: &str) -> Self {
        let i = C64::new(0.0, 1.0);
        let m = CMatrix::from_row_slice(2, 2, &[linalg::ZERO, -i, i, linalg::ZERO]);
        Observable { support: vec![label.to_string()], matrix: m }
    }

    pub fn pauli_z(label: &str) -> Self {
        let m = CMatrix::from_row_slice(2, 2, &[linalg::ONE, linalg::ZERO, linalg::ZERO, -linalg::ONE]);
        Observable { support: vec![label.to_string()], matrix: m }
    }

    pub fn identity(support: Vec<String>, dim: usize) -> Result<Self> {
        Observable::new(support, CMatrix::identity(dim, dim))
    }

    /// Distinct eigenvalues (ascending) with their eigenprojectors, i.e. the
    /// outcomes of a minimal measurement.
    pub fn spectrum(&self) -> Vec<(f64, Projector)> {
        linalg::spectral_projectors(&self.matrix, DEGENERACY_TOL)
            .into_iter()
            .map(|(lambda, p)| (lambda, Projector::from_parts(self.support.clone(), p)))
            .collect()
    }
}

impl LocalOperator for Observable {
    fn support(&self) -> &[String] {
        &self.support
    }
    fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Complete family of mutually orthogonal projectors on one support: the
/// characteristic projectors of a discrete beable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BeableDoc", into = "BeableDoc")]
pub struct BeableObservable {
    support: Vec<String>,
    projectors: Vec<Projector>,
    value_names: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct BeableDoc {
    support: Vec<String>,
    projectors: Vec<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value_names: Option<Vec<String>>,
}

impl TryFrom<BeableDoc> for BeableObservable {
    type Error = Error;
    fn try_from(doc: BeableDoc) -> Result<Self> {
        let projectors = doc
            .projectors
            .iter()
            .map(|m| Projector::new(doc.support.clone(), linalg::matrix_from_pairs(m)?))
            .collect::<Result<Vec<_>>>()?;
        BeableObservable::new(projectors, doc.value_names)
    }
}

impl From<BeableObservable> for BeableDoc {
    fn from(b: BeableObservable) -> Self {
        BeableDoc {
            projectors: b.projectors.iter().map(|p| linalg::matrix_to_pairs(&p.matrix)).collect(),
            support: b.support,
            value_names: b.value_names,
        }
    }
}

impl BeableObservable {
    pub fn new(projectors: Vec<Projector>, value_names: Option<Vec<String>>) -> Result<Self> {
        if projectors.len() < 2 {
            return Err(Error::InvalidBeable(format!("needs at least 2 projectors, got {}", projectors.len())));
        }
        let support = projectors[0].support.clone();
        let dim = projectors[0].dim();
        if let Some(p) = projectors.iter().find(|p| p.support != support || p.dim() != dim) {
            return Err(Error::InvalidBeable(format!(
                "projectors act on different supports ({:?} vs {:?})",
                support, p.support
            )));
        }
        for i in 0..projectors.len() {
            for j in i + 1..projectors.len() {
                let prod = &projectors[i].matrix * &projectors[j].matrix;
                let defect = prod.iter().map(|z| z.norm()).fold(0.0, f64::max);
                if defect > TAU_ALG {
                    return Err(Error::InvalidBeable(format!("projectors {i} and {j} are not orthogonal")));
                }
            }
        }
        let sum = projectors.iter().fold(CMatrix::zeros(dim, dim), |acc, p| acc + &p.matrix);
        let defect = linalg::max_abs_diff(&sum, &CMatrix::identity(dim, dim));
        if defect > TAU_ALG {
            return Err(Error::InvalidBeable(format!("projectors do not sum to the identity (defect {defect:e})")));
        }
        if let Some(names) = &value_names {
            if names.len() != projectors.len() {
                return Err(Error::InvalidBeable(format!(
                    "{} value names for {} projectors",
                    names.len(),
                    projectors.len()
                )));
            }
        }
        Ok(BeableObservable { support, projectors, value_names })
    }

    /// One value per basis state of a single subsystem.
    pub fn computational(label: &str, dim: usize) -> Result<Self> {
        let projectors = (0..dim)
            .map(|k| Projector::basis(vec![label.to_string()], dim, &[k]))
            .collect::<Result<Vec<_>>>()?;
        BeableObservable::new(projectors, None)
    }

    /// `{P, 1 − P}`.
    pub fn dichotomic(p: Projector, names: Option<[&str; 2]>) -> Result<Self> {
        let q = p.complement();
        BeableObservable::new(vec![p, q], names.map(|n| n.iter().map(|s| s.to_string()).collect()))
    }

    pub fn with_value_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.projectors.len() {
            return Err(Error::InvalidBeable("value name count mismatch".into()));
        }
        self.value_names = Some(names);
        Ok(self)
    }

    pub fn support(&self) -> &[String] {
        &self.support
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn projector(&self, i: usize) -> &Projector {
        &self.projectors[i]
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn value_names(&self) -> Option<&[String]> {
        self.value_names.as_deref()
    }

    /// Display name of value `i`: its configured name or its index.
    pub fn value_name(&self, i: usize) -> String {
        match &self.value_names {
            Some(n) => n[i].clone(),
            None => i.to_string(),
        }
    }

    /// Same family with values reordered: new value `k` is old `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if order.len() != self.len() || order.iter().any(|&k| k >= self.len() || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::InvalidArgument("not a permutation of the beable values".into()));
        }
        let projectors = order.iter().map(|&k| self.projectors[k].clone()).collect();
        let names = self.value_names.as_ref().map(|n| order.iter().map(|&k| n[k].clone()).collect());
        BeableObservable::new(projectors, names)
    }

    pub fn check_in(&self, layout: &SubsystemLayout) -> Result<()> {
        self.projectors[0].check_in(layout)
    }
}
