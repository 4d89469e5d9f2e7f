//! Numerical checks of the claims made about the two families.
//!
//! | Submodule | Checks |
//! |-----------|--------|
//! | [`sampler`] | seeded log-uniform scalars and Dirichlet(1) simplex points |
//! | [`triangle`] | randomized triangle-inequality search, 256-bit witness confirmation |
//! | [`chain`] | the seven-term inequality chain on single pairs and random sweeps |
//! | [`probe`] | sign and monotonicity of the auxiliary `n` and `h` functions |
//! | [`asymptotic`] | divergence / `χ²` ratio along a line towards `Q` |
//! | [`extended`] | 256-bit evaluator used as an independent oracle |
//!
//! All randomized routines derive each trial's generator from `(seed, trial)`,
//! so reports are bit-identical across runs and thread counts.

pub mod asymptotic;
pub mod chain;
pub mod extended;
pub mod probe;
pub mod sampler;
pub mod triangle;

pub use asymptotic::{asymptotic_probe, ratio_limit, RatioRow, RatioTable};
pub use chain::{chain_check, chain_sweep, ChainReport, ChainSweep};
pub use probe::{dominance_probe, log_grid, monotonicity_probe, DominanceReport, ProbeReport};
pub use sampler::{SampleSpace, SamplerConfig};
pub use triangle::{
    confirm_violation, triangle_search, triangle_search_unrooted, Confirmation, TriangleReport,
    Triple, Violation,
};
