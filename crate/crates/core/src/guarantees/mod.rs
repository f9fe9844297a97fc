//! Probabilistic guarantees: special functions, the three spectral-radius
//! bounds, sample-size planning and the stability verdict.

pub mod bounds;
pub mod complexity;
pub mod report;
pub mod special;

pub use bounds::{
    bound_apriori, bound_explicit, bound_posteriori, posteriori_from_chi, psi_surrogate, scenario_dimension, Bound,
    ConfidenceParams, ExplicitBound, PsiSurrogate,
};
pub use complexity::{instability_risk, min_samples, sample_complexity, ComplexityParams, InstabilityRisk, SampleComplexity};
pub use report::{certification_report, verdict, BoundInputs, Bounds, CertificationReport, Confidence, Provenance, Route, Verdict, VacuityGuidance};
pub use special::{delta, delta_inv, ln_delta, phi, phi_binomial, phi_inv, reg_inc_beta, reg_inc_beta_inv};
