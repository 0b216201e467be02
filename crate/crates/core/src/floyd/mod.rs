//! Floyd metrics, transition points, partial shadows and the shadow-lemma
//! audits (Patterson–Sullivan weights and harmonic Monte Carlo estimates).

mod busemann;
mod metric;
mod shadow;
mod transition;

pub use busemann::{busemann, word_gromov_product, StabilizedValue};
pub use metric::{FloydConfig, FloydContext, FloydInterval};
pub use shadow::{
    harmonic_shadow_estimate, poincare_series, ps_shadow_weight, shadow, HarmonicShadowEstimate,
    PoincareValue, PsWeighting, Shadow, ShadowContext, ShadowParams,
};
pub use transition::{classify_transition_points, PeripheralStructure, VertexLabel};

#[cfg(test)]
mod tests;
