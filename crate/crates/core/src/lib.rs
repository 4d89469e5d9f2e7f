//! # divmetric-core
//!
//! Symmetric divergences between discrete distributions, the square-root
//! distances they induce, and tools that check and exploit the metric axioms.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`distribution`] | strictly positive probability vectors, validation and smoothing |
//! | [`divergence`] | AG and J families, named measures (`Δ, I, T, h, d, J, Ψ, χ²`) |
//! | [`csiszar`] | f-divergence engine, generators `ψ_s`, `φ_s`, χ² approximation |
//! | [`metric`] | square-root distances and a metric-axiom checker |
//! | [`verify`] | seeded triangle searches, inequality chain, proof probes, asymptotics |
//! | [`index`] | vantage-point tree with exact k-NN and range queries |
//!
//! ```
//! use divmetric_core::{ag_divergence, Distribution, SParam};
//!
//! let p = Distribution::new(&[0.5, 0.5]).unwrap();
//! let q = Distribution::new(&[0.2, 0.8]).unwrap();
//! // s = 1 is the Jensen-Shannon divergence
//! let js = ag_divergence(SParam::new(1.0).unwrap(), &p, &q).unwrap();
//! assert!((js - 0.0506718).abs() < 1e-6);
//! ```

pub mod csiszar;
pub mod distribution;
pub mod divergence;
pub mod error;
pub mod index;
pub mod metric;
pub mod param;
pub mod sum;
pub mod verify;

pub use csiszar::{
    chi2_prediction, csiszar_divergence, phi_s, phi_s_d1, phi_s_d2, psi_s, psi_s_d1, psi_s_d2,
    ConvexGenerator,
};
pub use distribution::{validate_distribution, Distribution, ValidateOptions};
pub use divergence::{
    ag_divergence, ag_point, chi_squared, family_divergence, family_point, j_divergence, j_point,
    named_divergence, NamedMeasure,
};
pub use error::{DivergenceError, Result};
pub use index::{brute_force_knn, brute_force_range, IndexedPoint, Neighbor, QueryResult, VpTree};
pub use metric::{
    check_metric_axioms, sqrt_distance, sqrt_point_distance, Axiom, AxiomReport,
    DistributionDistance, MetricSpec, QuarterTriangular,
};
pub use param::{Family, Regime, SParam, TAU_LIMIT};
