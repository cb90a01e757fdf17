//! ECH capacity sequences of model four-dimensional symplectic domains.
//!
//! The crate computes the capacity sequence `c_0 ≤ c_1 ≤ c_2 ≤ …` of balls,
//! ellipsoids, scalings, and disjoint unions with exact rational
//! arithmetic, and builds the standard consequences on top: volume
//! asymptotics `c_k²/k → 4·vol`, lower bounds for ball packings,
//! obstructions to symplectic embeddings, and a numeric evaluation of a
//! Seiberg–Witten-style upper-bound inequality chain for the capacity
//! growth of a contact form.
//!
//! Heavy loops (sequence convolution, batch tables, window scans) run
//! data-parallel under the default `parallel` feature and fall back to
//! sequential code without it; both paths produce identical results.

pub mod asymptotics;
pub mod domains;
pub mod obstruction;
pub mod packing;
pub mod rational;
pub mod sequences;
pub mod swbound;

pub use asymptotics::{
    convergence_report, convergence_report_seq, inverse_sqrt_fit, liouville_to_contact_volume,
    volume_estimate, volume_estimate_exact, AsymptoticsError, Convention, InverseSqrtFit,
    VolumeReport,
};
pub use domains::{
    ball_capacity, ball_index_range, ball_step, domain_volume, ellipsoid_capacity,
    lattice_count, parse_domain_spec, DomainError, DomainSpec, SpecParseError,
};
pub use obstruction::{
    check_embedding, check_embedding_seq, ObstructionReport, Verdict, VolumePrecheck,
    DEFAULT_K_MAX,
};
pub use packing::{
    packing_asymptotic_check, packing_lower_bound, packing_volume_floor, parse_radii,
    union_sequence, PackingError, PackingFloorReport, PackingProblem, PackingWindowReport,
    MAX_CONVOLUTION_CELLS,
};
pub use rational::{
    parse_rational, rational, rational_to_f64, render_rational, Rational, RationalParseError,
};
pub use sequences::{
    maxplus_convolve, maxplus_convolve_seq, sequence_of, sequence_of_seq, verify_monotone,
    CapacitySequence, MonotoneCheck, SequenceError, SequenceRecord,
};
pub use swbound::{
    energy_cap, g_factor, g_factor_from_ln, heuristic_ratio, nu_exponent, parse_j_grid,
    rbar_estimate, rj_defining_value, solve_rj, solve_rj_detailed, upper_bound_curve,
    upper_bound_points, upper_bound_points_seq, RjSolution, SwCurvePoint, SwError, SwParams,
};
