//! Pure (`Ket`) and mixed (`DensityOperator`) states over a layout.

use serde::{Deserialize, Serialize};

use crate::linalg::{self, CMatrix, CVector, C64};
use crate::{Error, Result, SubsystemLayout, TAU_ALG};

/// Normalized amplitude vector over a tensor-factored space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KetDoc", into = "KetDoc")]
pub struct Ket {
    layout: SubsystemLayout,
    amplitudes: CVector,
}

#[derive(Serialize, Deserialize)]
struct KetDoc {
    layout: SubsystemLayout,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<KetDoc> for Ket {
    type Error = Error;
    fn try_from(doc: KetDoc) -> Result<Self> {
        Ket::new(doc.layout, linalg::vector_from_pairs(&doc.amplitudes))
    }
}

impl From<Ket> for KetDoc {
    fn from(k: Ket) -> Self {
        KetDoc { amplitudes: linalg::vector_to_pairs(&k.amplitudes), layout: k.layout }
    }
}

impl Ket {
    /// Wraps `amplitudes`, requiring unit norm within [`TAU_ALG`]. No silent
    /// renormalization happens here.
    pub fn new(layout: SubsystemLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch { expected: layout.total_dim(), actual: amplitudes.len() });
        }
        let n = linalg::norm_sqr(&amplitudes);
        if !n.is_finite() || (n - 1.0).abs() > TAU_ALG {
            return Err(Error::NotNormalized(n));
        }
        Ok(Ket { layout, amplitudes })
    }

    /// Divides by the norm. Fails for the zero vector.
    pub fn normalized(layout: SubsystemLayout, amplitudes: CVector) -> Result<Self> {
        let n = linalg::norm_sqr(&amplitudes).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Ket::new(layout, amplitudes.unscale(n))
    }

    pub fn basis(layout: SubsystemLayout, digits: &[usize]) -> Result<Self> {
        let idx = layout.index_of_digits(digits)?;
        let mut amps = CVector::zeros(layout.total_dim());
        amps[idx] = linalg::ONE;
        Ket::new(layout, amps)
    }

    /// Single-subsystem ket from raw amplitudes.
    pub fn single(label: &str, amplitudes: &[C64]) -> Result<Self> {
        let layout = SubsystemLayout::new([label], vec![amplitudes.len()])?;
        Ket::new(layout, CVector::from_column_slice(amplitudes))
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        linalg::norm_sqr(&self.amplitudes)
    }

    pub fn inner(&self, other: &Ket) -> C64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn with_global_phase(&self, phase: f64) -> Ket {
        Ket { layout: self.layout.clone(), amplitudes: self.amplitudes.map(|z| z * C64::from_polar(1.0, phase)) }
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityOperator {
        DensityOperator::from_parts(self.layout.clone(), linalg::outer(&self.amplitudes, &self.amplitudes))
    }

    pub(crate) fn from_parts(layout: SubsystemLayout, amplitudes: CVector) -> Ket {
        Ket { layout, amplitudes }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix over a layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityDoc", into = "DensityDoc")]
pub struct DensityOperator {
    layout: SubsystemLayout,
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct DensityDoc {
    layout: SubsystemLayout,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<DensityDoc> for DensityOperator {
    type Error = Error;
    fn try_from(doc: DensityDoc) -> Result<Self> {
        DensityOperator::new(doc.layout, linalg::matrix_from_pairs(&doc.matrix)?)
    }
}

impl From<DensityOperator> for DensityDoc {
    fn from(d: DensityOperator) -> Self {
        DensityDoc { matrix: linalg::matrix_to_pairs(&d.matrix), layout: d.layout }
    }
}

impl DensityOperator {
    pub fn new(layout: SubsystemLayout, matrix: CMatrix) -> Result<Self> {
        let rho = DensityOperator { layout, matrix };
        rho.validate()?;
        Ok(rho)
    }

    /// Operations in this crate produce valid operators by construction;
    /// this skips the eigen-decomposition.
    pub(crate) fn from_parts(layout: SubsystemLayout, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        DensityOperator { layout, matrix }
    }

    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let d = layout.total_dim();
        DensityOperator::from_parts(layout, CMatrix::identity(d, d).unscale(d as f64))
    }

    /// Re-checks Hermiticity, unit trace and the eigenvalue floor.
    pub fn validate(&self) -> Result<()> {
        let d = self.layout.total_dim();
        if self.matrix.nrows() != d || self.matrix.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: self.matrix.nrows() });
        }
        let h = linalg::hermiticity_defect(&self.matrix);
        if h > TAU_ALG {
            return Err(Error::InvalidDensity(format!("not Hermitian (defect {h:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TAU_ALG {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -TAU_ALG {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        linalg::max_abs_diff(&self.matrix, &other.matrix)
    }
}

/// Operations common to pure and mixed states.
pub trait QuantumState {
    fn layout(&self) -> &SubsystemLayout;

    /// Reduced matrix on `keep`, indexed in the order given.
    fn reduced_matrix(&self, keep: &[String]) -> Result<CMatrix>;

    fn to_density(&self) -> DensityOperator;

    /// `Tr(ρ (op ⊗ 1))` with `op` acting on the ordered `support`.
    fn expectation(&self, support: &[String], op: &CMatrix) -> Result<C64> {
        let reduced = self.reduced_matrix(support)?;
        if reduced.shape() != op.shape() {
            return Err(Error::DimensionMismatch { expected: reduced.nrows(), actual: op.nrows() });
        }
        Ok(reduced.component_mul(&op.transpose()).sum())
    }
}

impl QuantumState for Ket {
    fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    fn reduced_matrix(&self, keep: &[String]) -> Result<CMatrix> {
        linalg::reduce_pure(&self.layout, keep, &self.amplitudes)
    }

    fn to_density(&self) -> DensityOperator {
        self.density()
    }
}

impl QuantumState for DensityOperator {
    fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    fn reduced_matrix(&self, keep: &[String]) -> Result<CMatrix> {
        linalg::reduce_mixed(&self.layout, keep, &self.matrix)
    }

    fn to_density(&self) -> DensityOperator {
        self.clone()
    }
}
