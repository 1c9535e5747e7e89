//! Tensor-factor layout of a composite Hilbert space.
//!
//! Amplitude index convention: the first label is the most significant
//! digit, i.e. `index = Σ_k digit_k · stride_k` with `stride_k` the product
//! of all dims after position `k`. This matches the Kronecker product order.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, MAX_DIM};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayoutDoc", into = "LayoutDoc")]
pub struct SubsystemLayout {
    labels: Vec<String>,
    dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct LayoutDoc {
    labels: Vec<String>,
    dims: Vec<usize>,
}

impl TryFrom<LayoutDoc> for SubsystemLayout {
    type Error = Error;
    fn try_from(doc: LayoutDoc) -> Result<Self> {
        SubsystemLayout::new(doc.labels, doc.dims)
    }
}

impl From<SubsystemLayout> for LayoutDoc {
    fn from(l: SubsystemLayout) -> Self {
        LayoutDoc { labels: l.labels, dims: l.dims }
    }
}

impl SubsystemLayout {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>, dims: Vec<usize>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::Layout("layout has no subsystems".into()));
        }
        if labels.len() != dims.len() {
            return Err(Error::Layout(format!(
                "{} labels but {} dims",
                labels.len(),
                dims.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Layout(format!("factor dimension {d} is below 2")));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total.checked_mul(d).filter(|&t| t <= MAX_DIM).ok_or(Error::TooLarge(
                dims.iter().fold(1usize, |a, &b| a.saturating_mul(b)),
            ))?;
        }
        Ok(SubsystemLayout { labels, dims })
    }

    /// Layout of qubits with the given labels.
    pub fn qubits<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let dims = vec![2; labels.len()];
        Self::new(labels, dims)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.position(label)?])
    }

    /// Joint dimension of a set of labels.
    pub fn dim_of_set(&self, labels: &[String]) -> Result<usize> {
        labels.iter().map(|l| self.dim_of(l)).product()
    }

    fn stride(&self, pos: usize) -> usize {
        self.dims[pos + 1..].iter().product()
    }

    /// Checks that `labels` is a non-repeating list of labels of this layout.
    pub fn check_labels(&self, labels: &[String]) -> Result<()> {
        for (i, l) in labels.iter().enumerate() {
            self.position(l)?;
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(())
    }

    /// Offsets into the full amplitude vector for every joint basis index of
    /// `labels`, enumerated with the first label most significant. Adding an
    /// offset from [`Self::offsets`] for the complementary labels yields a
    /// full index.
    pub fn offsets(&self, labels: &[String]) -> Result<Vec<usize>> {
        self.check_labels(labels)?;
        let mut offsets = vec![0usize];
        for l in labels {
            let pos = self.position(l)?;
            let (d, s) = (self.dims[pos], self.stride(pos));
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..d).map(move |k| o + k * s))
                .collect();
        }
        Ok(offsets)
    }

    /// Labels not in `labels`, in layout order.
    pub fn complement(&self, labels: &[String]) -> Vec<String> {
        self.labels.iter().filter(|l| !labels.contains(l)).cloned().collect()
    }

    /// Restriction of the layout to `labels`, kept in layout order.
    pub fn restrict(&self, labels: &[String]) -> Result<SubsystemLayout> {
        self.check_labels(labels)?;
        let (l, d): (Vec<String>, Vec<usize>) = self
            .labels
            .iter()
            .zip(&self.dims)
            .filter(|(l, _)| labels.contains(l))
            .map(|(l, &d)| (l.clone(), d))
            .unzip();
        SubsystemLayout::new(l, d)
    }

    /// Restriction of the layout to `labels`, in the order given.
    pub fn restrict_ordered(&self, labels: &[String]) -> Result<SubsystemLayout> {
        self.check_labels(labels)?;
        let dims = labels.iter().map(|l| self.dim_of(l)).collect::<Result<Vec<_>>>()?;
        SubsystemLayout::new(labels.to_vec(), dims)
    }

    pub fn concat(&self, other: &SubsystemLayout) -> Result<SubsystemLayout> {
        let labels = self.labels.iter().chain(&other.labels).cloned();
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        SubsystemLayout::new(labels, dims)
    }

    /// Digits of a full index, one per subsystem.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.dims.len()];
        for (k, &d) in self.dims.iter().enumerate().rev() {
            digits[k] = index % d;
            index /= d;
        }
        digits
    }

    pub fn index_of_digits(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.dims.len() {
            return Err(Error::DimensionMismatch { expected: self.dims.len(), actual: digits.len() });
        }
        let mut index = 0;
        for (&x, &d) in digits.iter().zip(&self.dims) {
            if x >= d {
                return Err(Error::InvalidArgument(format!("basis digit {x} out of range for dimension {d}")));
            }
            index = index * d + x;
        }
        Ok(index)
    }
}

/// Convenience for building label lists from string slices.
pub fn labels<S: AsRef<str>>(ls: &[S]) -> Vec<String> {
    ls.iter().map(|s| s.as_ref().to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_layouts() {
        assert!(SubsystemLayout::new(Vec::<String>::new(), vec![]).is_err());
        assert!(SubsystemLayout::new(["a"], vec![1]).is_err());
        assert!(matches!(
            SubsystemLayout::new(["a", "a"], vec![2, 2]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            SubsystemLayout::new(["a", "b", "c"], vec![16, 16, 32]),
            Err(Error::TooLarge(8192))
        ));
        assert!(SubsystemLayout::new(["a", "b", "c"], vec![16, 16, 16]).is_ok());
    }

    #[test]
    fn offsets_follow_kronecker_order() {
        let l = SubsystemLayout::new(["a", "b", "c"], vec![2, 3, 2]).unwrap();
        assert_eq!(l.offsets(&labels(&["b"])).unwrap(), vec![0, 2, 4]);
        assert_eq!(l.offsets(&labels(&["c", "a"])).unwrap(), vec![0, 6, 1, 7]);
        let all = l.offsets(l.labels()).unwrap();
        assert_eq!(all, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn digits_round_trip() {
        let l = SubsystemLayout::new(["a", "b", "c"], vec![2, 3, 4]).unwrap();
        for i in 0..24 {
            assert_eq!(l.index_of_digits(&l.digits(i)).unwrap(), i);
        }
    }

    #[test]
    fn restrict_keeps_layout_order() {
        let l = SubsystemLayout::new(["a", "b", "c"], vec![2, 3, 4]).unwrap();
        let r = l.restrict(&labels(&["c", "a"])).unwrap();
        assert_eq!(r.labels(), &labels(&["a", "c"])[..]);
        assert_eq!(r.dims(), &[2, 4]);
        assert_eq!(l.complement(&labels(&["b"])), labels(&["a", "c"]));
    }
}
