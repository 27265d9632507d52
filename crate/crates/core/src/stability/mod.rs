//! Criticality, uniqueness and error-bound analysis of multipliers.

pub mod criticality;
pub mod probes;

pub use criticality::{classify_multiplier, dqc_holds, uniqueness_report, CriticalityVerdict, Linearization, UniquenessReport};
pub use probes::{
    critical_ray_probe, dyadic_grid, error_bound_residuals, perturbation_grid, semi_isolated_probe, solve_perturbed,
    NewtonOptions, ProbeRecord, ProbeTrace, ResidualContext, Residuals,
};
