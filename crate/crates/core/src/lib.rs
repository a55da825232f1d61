//! Contextual frequency probability for dichotomous composite systems.
//!
//! The crate has two layers. The closed-form layer ([`model`], [`algebra`])
//! turns setting distributions, transition matrices and phases into joint
//! probabilities, and recovers disturbance terms and entanglement
//! coefficients from them. The sampling layer ([`ensemble`],
//! [`fluctuation`], [`stabilization`]) realizes the same quantities as
//! relative frequencies in seeded finite ensembles.

pub mod algebra;
pub mod ensemble;
pub mod error;
pub mod export;
pub mod fluctuation;
pub mod index;
pub mod model;
pub mod rng;
pub mod stabilization;
pub mod table;
pub mod tol;

pub use algebra::{
    apply_phases, chsh, classical_total_probability, correlation, disturbance_term, epr_probabilities,
    general_stochastic_probability, model_probabilities, phase_constraint_residual, product_context_table,
    reconstruct_phases, renormalize_disturbance,
};
pub use ensemble::{empirical_disturbance, frequency_table, sample_source, select_context, SampledEnsemble};
pub use error::{Error, Result};
pub use fluctuation::{fluctuating_quadruple_source, fluctuation_demo, QuadruplePair};
pub use index::{Grid, Outcome, OutcomePair, SettingPair};
pub use model::{
    build_transition_from_angles, epr_model, validate_model, ContextualModel, EprScenario, Phase, PhaseMatrix,
    Regime, SettingDistribution, TransitionMatrix, ValidationReport,
};
pub use stabilization::{stabilization_test, FrequencyTrace, StabilizationCriterion, Verdict};
pub use table::{ContextTables, ProbabilityTable};
