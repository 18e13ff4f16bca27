//! Decides the global dynamics of a planar hybrid system built from two
//! Hurwitz linear fields separated by a broken switching line, with a
//! power-law jump applied at every crossing.
//!
//! The analytic pipeline (exact verdicts: asymptotic stability, instability,
//! a continuum of closed orbits, or a unique hyperbolic limit cycle) lives in
//! [`analysis`]; an event-detecting numerical integrator in [`simulate`]
//! provides an independent cross-check of every analytic claim.

pub mod analysis;
pub mod flow;
pub mod model;
pub mod normal_form;
pub mod simulate;
pub mod spectral;

pub use analysis::{
    amplitude_ratio, classify_system, displacement, displacement_derivative, rho_infinity_ratio,
    AbsorbedArc, CycleInfo, CycleStability, DisplacementParams, LoopData, Orientation,
    StabilityVerdict, SystemAnalysis, VerdictCase,
};
pub use flow::{
    branch_amplitude, crossing_time, crossing_time_limit, focus_flow, half_return_backward,
    half_return_forward, improper_flow, node_flow, return_coefficients, ArcDirection, ArcHit,
    FocusFlowParams, ReturnCoefficients,
};
pub use model::{
    Branch, HurwitzMatrix, HybridSystemSpec, JumpMap, LinePoint, Matrix2, Point2, Side, SpecError,
    SwitchingLine,
};
pub use normal_form::{
    conjugation_matrix, crossing_check, eta, fixes_right_branch, normalize, BranchFailure,
    CrossingReport, NormalFormError, NormalFormSystem,
};
pub use simulate::{
    empirical_displacement, empirical_return_map, run, step_to_sigma, Integrator, SimConfig,
    SimError, SimEvent, StepOutcome, Termination, Trajectory, TrajectorySample,
};
pub use spectral::{classify, predicted_fate, region_of, Fate, Region, SpectralData, SpectralKind};
