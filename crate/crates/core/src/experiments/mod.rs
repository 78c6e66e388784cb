//! Checks that turn norm equivalences, embeddings and identities into ratio
//! reports and pass/fail verdicts.

mod decay;
mod equivalence;
mod family;
mod identities;
mod inequalities;
mod periodic;
mod report;
mod zak_checks;

pub use decay::{check_factorial_bound, factorial_ratio_at_zero, fit_gs_decay, DecayMode, DecayModel, FactorialBound, FLOOR, SUPER_RATIO};
pub use equivalence::{
    check_embedding, check_window_independence, family_rows, run_equivalence, wiener_r_independence, EmbeddingReport, Level,
    Measured, Representation, Sampling, COEFFICIENT_SPREAD_BOUND, TRANSFORM_SPREAD_BOUND,
};
pub use family::{FamilyKind, Packet, Signal, SignalFamily, SignalShape};
pub use identities::{check_echo_periodicity, check_finite_parseval, check_quasiperiodicity, check_zak_parseval};
pub use inequalities::{
    check_wiener_holder, check_wiener_jensen, check_young_semidiscrete, young_hypothesis, YoungOptions, YoungReport,
    ROUNDING_SLACK,
};
pub use periodic::{
    check_periodic_modulation, PeriodicOptions, PeriodicReport, EXACT_SCALARS, GENERIC_SCALAR, HOMOGENEITY_TOLERANCE,
};
pub use report::{fmt_f64, CheckSummary, EquivalenceReport, RatioRow, Table, DRIFT_BOUND};
pub use zak_checks::{
    check_zak_lebesgue, check_zak_modulation, zak_lebesgue_side, ZakGrid, ZakModulationReport, PERIODICITY_TOLERANCE,
};
