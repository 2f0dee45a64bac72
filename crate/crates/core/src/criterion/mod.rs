//! The removability criterion: the divergent-integral condition on the
//! spherical means of the majorant, the growth condition on the Orlicz gauge,
//! the extremal weight of the weighted ring energy, and composite verdicts.

mod extremal;
mod integral;
mod phi;
mod verdict;

pub use extremal::{
    extremal_eta, normalization_factor, verify_extremality, weighted_ring_integral, CandidateRow, CandidateShape,
    ExtremalEta, ExtremalityReport, ExtremalityTolerances, SphericalMeanFn, NORMALIZATION_SLACK,
};
pub use integral::{
    classify_by_decades, classify_by_depth_tail, classify_divergence, criterion_integral, criterion_trace,
    symbolic_divergence, ClassifyOptions, CriterionTracePoint, Divergence, DivergenceReport, DivergenceRule,
};
pub use phi::{calderon_check, CalderonReport, CalderonVerdict, PhiSpec};
pub use verdict::{
    removability_verdict, Conclusion, CriterionReport, Hypotheses, HypothesisCheck, HypothesisSource, Route, Subject,
    VerdictOptions,
};
