//! Geodesic distance matrices on matrix manifolds and weighted-stress
//! multidimensional scaling.
//!
//! The crate has three layers:
//!
//! * [`manifold`] — validated points on SO(q), the unit sphere, the symmetric
//!   positive-definite cone and SU(q), with geodesic distances, exp/log maps,
//!   random sampling and pairwise distance matrices;
//! * [`stress`] — weight schemes (Kruskal, Sammon, Dwyer-Koren-Marriott),
//!   the weighted stress function and its quadratic majorization surrogate;
//! * [`solver`] — the majorize-minimize embedding loop with a line-searched
//!   gradient inner solver, plus Procrustes alignment for comparing
//!   embeddings up to rigid motion.
//!
//! [`linalg`] holds the small dense kernels (Jacobi eigensolvers, SVD) that
//! everything else is built on.

pub mod error;
pub mod linalg;
pub mod manifold;
pub mod solver;
pub mod stress;

pub use error::{Error, Result};
pub use manifold::{
    distance, geodesic_walk, inner_product, pairwise_distances, random_point, so_distance, so_exp,
    so_log, spd_distance, sphere_distance, su_distance, ManifoldKind, ManifoldPoint, PointData,
    TangentVector,
};
pub use solver::{
    embed, majorization_step, procrustes_align, quadratic_descent, Alignment, EmbeddingResult,
    Init, SolverConfig, Termination,
};
pub use stress::{
    build_a, build_c, majorization_value, make_weights, stress, stress_trace_db,
    stress_unnormalized, Configuration, DistanceMatrix, StressTrace, WeightScheme, WeightVariant,
};
