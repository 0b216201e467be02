//! Green functions, the Green metric, Ancona and rough-similarity audits,
//! Naim kernels, cross-ratios and stable translation lengths.
//!
//! Two evaluation strategies sit behind one interface. For free products
//! with adapted measures (and for free groups, which are free products of
//! copies of ℤ) the engine factorizes first passage over syllables: the
//! syllable prefixes of a normal form are cut points of the Cayley graph, so
//! P(e→g) = ∏ P(e→σⱼ), and each factor value comes from the induced
//! first-return kernel on that factor, whose excursion weights solve a
//! monotone fixed point. Everything else falls back to truncated sparse
//! convolution over a radius-capped ball.

mod boundary;
mod engine;
mod lattice;
mod ops;

pub use boundary::{
    boundary_identity_audit, cross_ratio, naim_kernel, BoundaryIdentityReport, BoundaryRay,
    CrossRatioValue, NaimValue, QuadrupleSpec, DEFAULT_DEPTHS,
};
pub use engine::{EngineKind, GreenEngine, GreenParams};
pub use lattice::LocalGreen;
pub use ops::{
    ancona_ratio, rough_similarity_audit, translation_length, MetricAudit, TranslationLength,
    TranslationMetric,
};

/// A Green-function value with truncation bookkeeping.
#[derive(Debug, Clone)]
pub struct GreenEstimate {
    pub value: f64,
    /// Certified partial sum Σ_{n≤N} μ*ⁿ (or its factorized analogue).
    pub truncation_lower_bound: f64,
    /// Heuristic geometric tail; `value ∈ [lower, lower + tail]`.
    pub tail_estimate: f64,
    /// Truncation order used.
    pub truncation: u32,
    /// Spectral radius estimate μ*²ⁿ(e)^(1/2n) at the largest affordable n.
    pub rho_hat: f64,
    /// False when ρ̂ ≥ 1 − 10⁻³ (amenable-looking model).
    pub tail_reliable: bool,
}

#[cfg(test)]
mod tests;
