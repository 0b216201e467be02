//! Random-walk engine: finitely supported measures, exact convolution
//! powers, deterministic Monte Carlo sampling, and the entropy / drift /
//! growth estimators behind the Guivarc'h gap reports.

pub mod measure;
pub mod paths;
pub mod report;
pub mod rng;

pub use measure::{Measure, RationalMeasure, SparseMeasure};
pub use paths::{sample_paths, support_elements, PathSample};
pub use report::{
    asymptotic_report, deviation_stats, guivarch_report, AsymRow, AsymptoticsReport,
    DeviationStats, GuivarchReport, McParams, McReport, PsiReport,
};
pub use rng::CounterRng;

#[cfg(test)]
mod tests;
