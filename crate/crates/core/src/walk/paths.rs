//! Deterministic path sampling by inverse CDF over the ordered support.

use super::measure::SparseMeasure;
use super::rng::CounterRng;
use crate::error::Result;
use crate::group::GroupElement;
use rayon::prelude::*;

/// One sampled trajectory; regenerable bit-identically from (seed, index).
#[derive(Debug, Clone)]
pub struct PathSample {
    pub seed: u64,
    pub index: u64,
    /// Indices into the measure's ordered support, one per step.
    pub increments: Vec<u32>,
}

impl PathSample {
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// Increment elements g_1..g_T.
    pub fn increment_elements<'a>(
        &'a self,
        support: &'a [GroupElement],
    ) -> impl Iterator<Item = &'a GroupElement> + 'a {
        self.increments.iter().map(move |&i| &support[i as usize])
    }

    /// Positions ω_0..ω_T (ω_k = ω_{k-1}·g_k).
    pub fn positions(&self, measure: &SparseMeasure) -> Result<Vec<GroupElement>> {
        let support = support_elements(measure);
        let model = measure.model();
        let mut out = Vec::with_capacity(self.increments.len() + 1);
        out.push(model.identity());
        for &i in &self.increments {
            let next = model.compose(out.last().unwrap(), &support[i as usize])?;
            out.push(next);
        }
        Ok(out)
    }

    /// Final position ω_T.
    pub fn endpoint(&self, measure: &SparseMeasure) -> Result<GroupElement> {
        let support = support_elements(measure);
        let model = measure.model();
        let mut acc = model.identity();
        for &i in &self.increments {
            acc = model.compose(&acc, &support[i as usize])?;
        }
        Ok(acc)
    }
}

/// Ordered support elements of a measure (canonical key order).
pub fn support_elements(measure: &SparseMeasure) -> Vec<GroupElement> {
    measure.iter().map(|(g, _)| g).collect()
}

/// Cumulative distribution over the ordered support.
fn cdf(measure: &SparseMeasure) -> Vec<f64> {
    let mut acc = 0.0;
    measure
        .iter()
        .map(|(_, p)| {
            acc += p;
            acc
        })
        .collect()
}

/// Draw `count` i.i.d. paths of length `t`. Path `i` uses RNG stream
/// `(seed, i)`, so the set is embarrassingly parallel and order-independent.
pub fn sample_paths(measure: &SparseMeasure, t: usize, count: usize, seed: u64) -> Vec<PathSample> {
    let cum = cdf(measure);
    let total = *cum.last().unwrap_or(&1.0);
    (0..count as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = CounterRng::stream(seed, index);
            let mut increments = Vec::with_capacity(t);
            for _ in 0..t {
                let u = rng.next_f64() * total;
                let k = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
                increments.push(k as u32);
            }
            PathSample { seed, index, increments }
        })
        .collect()
}
