//! End-to-end experiments and their reports.

mod bounds;
mod embed;
mod families;
mod fingerprint;
mod jl;
mod report;
mod two_norm;

pub use bounds::{
    family_pair, lower_bound_table, recompute_row, standard_pairs, trace_norm_lower_bound,
    BoundPair, RATIO_TOL,
};
pub use embed::*;
pub use families::{orthogonal_projector_pair, parse_explicit_states, StateFamily};
pub use fingerprint::{fingerprint_demo, fingerprints, swap_test_acceptance, FingerprintParams};
pub use jl::{jl_baseline, monotone_within, JlParams, MONOTONE_SIGMAS};
pub use report::{write_rows_csv, ExperimentReport, NamedVerdict, SCHEMA};
pub use two_norm::{two_norm_experiment, two_norm_lower_bound, TwoNormParams, GRID};
