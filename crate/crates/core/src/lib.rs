//! Analysis toolkit for the stocked Ricker recurrence
//! `y_{n+1} = y_n exp(r - y_{n-1}) + h_{n mod p}`.
//!
//! The model, the monotone embedding and orbit simulation are generic over [`Scalar`]
//! (`f32` or `f64`); the root-finding based analyses work in `f64`.

// `!(a > b)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod constant;
pub mod embedding;
pub mod error;
pub mod model;
pub mod orbit;
pub mod periodic;
pub mod roots;
pub mod scalar;
pub mod sweep;
pub mod verdict;

pub use constant::{
    certify_constant, certify_constant_with, feasible_ab, find_intersections, g1,
    solve_equilibrium, thresholds, EquilibriumReport, ThresholdSet,
};
pub use embedding::{
    build_g, build_g10, check_box_compatible, classify_g10_fixed_point, corner_iterate,
    fold_cyclic, fold_period2, sandwich_iterate, se_leq, CornerOptions, EmbeddedFixedPoint,
    EmbeddedKind, Enclosure, G10Kind, PlanarMap, QuadMap, Region, SeOrder,
};
pub use error::{Error, Result};
pub use model::{density_f, step, vector_step, Params, Planar, Quad};
pub use orbit::{
    classify_attractor, neimark_sacker_scan, simulate, Attractor, ClassifyOptions, NsCrossing,
    OrbitResult,
};
pub use periodic::{
    certify_periodic, corollary_shortcuts, find_artificial_cycles, g_maps, solve_two_cycle,
    ArtificialCycleSet, CorollaryClause, TwoCycleReport,
};
pub use scalar::Scalar;
pub use sweep::{run_sweep, Axis, SweepCell, SweepSpec};
pub use verdict::{AbsorbingBounds, Classification, LocalStability, Verdict};

pub type PlanarPoint = Planar<f64>;
pub type QuadPoint = Quad<f64>;
pub type ModelParams = Params<f64>;
pub type BoxRegion = Region<f64>;

pub type PlanarPoint32 = Planar<f32>;
pub type QuadPoint32 = Quad<f32>;
pub type ModelParams32 = Params<f32>;
pub type BoxRegion32 = Region<f32>;
