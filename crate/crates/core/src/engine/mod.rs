//! Monte-Carlo realization of a discrete beable: every individual system in
//! an ensemble carries a definite beable value, drawn with the Born weights
//! of the ensemble's state. Subensembles sharing a value are measured with
//! simulated ideal measurements and compared with the conditional states.

mod ensemble;
mod frequency;
mod theorem;

pub use ensemble::{
    beable_weights, build_ensemble, sample_beable_value, subensemble_average, Ensemble, IndividualSystem, Record,
    SubensembleAverage,
};
pub use frequency::{frequency_report, frequency_report_from_counts, ConvergenceReport, FrequencyEntry};
pub use theorem::{verify_conditional_state_theorem, verify_on_ensemble, TheoremEntry, TheoremReport, LOCALITY_NOTE};

/// Default critical |z| for a single comparison.
pub const DEFAULT_Z_CRIT: f64 = 3.0;
