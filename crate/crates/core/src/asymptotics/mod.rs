//! Sampling estimates of directional subdifferentials at infinity and the
//! checks built on them.

mod estimator;
mod params;
mod rules;
mod sampler;

pub use estimator::{
    domain_of, estimate_dir_subdiff, estimate_on, estimate_with, trace_csv, Cluster, Diagnostics, EstimateOptions,
    EstimateStatus, SubdiffApprox, TraceRow,
};
pub use params::{EstimatorParams, BOUNDED_NORM};
pub use rules::{
    distance_subdiff_at_infinity, empirical_lipschitz, lipschitz_at_infinity_test, max_rule_check, min_rule_check,
    partial_subdiff_check, sum_rule_check, sweep_subdiff_at_infinity, sweep_subdiff_with, union_over_directions, DistanceReport,
    PartialReport, RuleReport, LAMBDA_GRID,
};
pub use sampler::{Sample, SampleFace, Sampler};
