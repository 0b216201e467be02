//! Monte Carlo estimate of the first-return kernel to a neighborhood of an
//! abelian free factor.

use super::kernel::ZdKernel;
use crate::error::{Error, Result};
use crate::group::{coset_distance, GroupElement, GroupModel, ModelKind};
use crate::walk::measure::SparseMeasure;
use crate::walk::paths::support_elements;
use crate::walk::rng::CounterRng;
use rayon::prelude::*;
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct FirstReturnEstimate {
    /// Estimated kernel (entries with at least one observed return).
    pub kernel: ZdKernel,
    /// Per-entry standard errors aligned with `kernel.entries()`.
    pub std_errors: Vec<f64>,
    /// Sheet representatives (states of N_r(P) modulo ℤᵈ).
    pub sheet_reps: Vec<GroupElement>,
    pub total_mass: f64,
    /// Fraction of excursions stopped by the step cutoff (ambiguous escapes).
    pub truncation_rate: f64,
    /// Set when the truncation rate exceeds one half.
    pub low_reliability: bool,
    pub samples: usize,
}

/// State of N_r(P) split as (lattice part, sheet representative).
fn split_state(
    model: &GroupModel,
    g: &GroupElement,
    factor: usize,
    r: u64,
) -> Result<Option<(Vec<i64>, GroupElement)>> {
    if coset_distance(model, g, &model.identity(), factor)? > r {
        return Ok(None);
    }
    let GroupElement::Product(syls) = g else {
        return Err(Error::ModelMismatch("free product expected".into()));
    };
    let (z, rest) = match syls.split_first() {
        Some(((idx, inner), rest)) if *idx as usize == factor => {
            let GroupElement::Vector(v) = inner else {
                return Err(Error::Invalid("abelian factor expected".into()));
            };
            (v.clone(), rest.to_vec())
        }
        _ => {
            let dim = match model.factors()[factor].kind() {
                ModelKind::FreeAbelian { rank } => *rank,
                _ => return Err(Error::Invalid("abelian factor expected".into())),
            };
            (vec![0; dim], syls.clone())
        }
    };
    Ok(Some((z, GroupElement::Product(rest))))
}

/// Estimate the first-return kernel of the walk to N_r(P) for an abelian
/// free factor P, by simulating excursions from each sheet representative.
pub fn first_return_kernel_mc(
    measure: &SparseMeasure,
    factor: usize,
    r: u64,
    samples: usize,
    seed: u64,
) -> Result<FirstReturnEstimate> {
    let model = measure.model().clone();
    let ModelKind::FreeProduct { factors } = model.kind() else {
        return Err(Error::NoPeripherals("first return needs a free product".into()));
    };
    let ModelKind::FreeAbelian { rank: dim } = factors[factor].kind() else {
        return Err(Error::Invalid("designated factor must be free abelian".into()));
    };
    let dim = *dim;

    // sheet representatives: elements w with no leading factor-syllable and
    // ‖w‖ ≤ r, enumerated from the ball
    let ball = model.cayley_ball(r as u32)?;
    let mut sheet_reps: Vec<GroupElement> = Vec::new();
    for g in ball.elements() {
        if let GroupElement::Product(syls) = g {
            let leading_ok = syls
                .first()
                .map(|(idx, _)| *idx as usize != factor)
                .unwrap_or(true);
            if leading_ok {
                sheet_reps.push(g.clone());
            }
        }
    }
    sheet_reps.sort_by(|a, b| a.encode().cmp(&b.encode()));
    let sheet_index: HashMap<GroupElement, usize> = sheet_reps
        .iter()
        .enumerate()
        .map(|(i, g)| (g.clone(), i))
        .collect();

    let support = support_elements(measure);
    let probs: Vec<f64> = measure.iter().map(|(_, p)| *p).collect();
    let cum: Vec<f64> = probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let distance_cutoff = 30 + 2 * r;
    let step_cutoff = 4000usize;

    // excursions from every sheet representative
    let per_sheet: Vec<(HashMap<(usize, Vec<i64>), u64>, u64)> = (0..sheet_reps.len())
        .into_par_iter()
        .map(|si| {
            let start = &sheet_reps[si];
            let mut counts: HashMap<(usize, Vec<i64>), u64> = HashMap::new();
            let mut truncated = 0u64;
            for sample in 0..samples as u64 {
                let mut rng = CounterRng::stream(seed ^ (si as u64) << 32, sample);
                let mut pos = start.clone();
                let mut returned = false;
                for _ in 0..step_cutoff {
                    let u = rng.next_f64();
                    let k = cum.partition_point(|&c| c <= u).min(support.len() - 1);
                    pos = model.compose(&pos, &support[k]).expect("same model");
                    match split_state(&model, &pos, factor, r).expect("state split") {
                        Some((z, rep)) => {
                            let sheet_to = sheet_index[&rep];
                            *counts.entry((sheet_to, z)).or_insert(0) += 1;
                            returned = true;
                            break;
                        }
                        None => {
                            let d = coset_distance(&model, &pos, &model.identity(), factor)
                                .expect("coset distance");
                            if d > distance_cutoff {
                                break; // escaped
                            }
                        }
                    }
                }
                if !returned {
                    // distinguish clean escapes from step-cutoff stops is not
                    // possible here; both count toward truncation when the
                    // walk was still near the neighborhood
                    let d = coset_distance(&model, &pos, &model.identity(), factor)
                        .expect("coset distance");
                    if d <= distance_cutoff {
                        truncated += 1;
                    }
                }
            }
            (counts, truncated)
        })
        .collect();

    let n = samples as f64;
    let mut entries = Vec::new();
    let mut std_errors = Vec::new();
    let mut truncated_total = 0u64;
    for (si, (counts, truncated)) in per_sheet.iter().enumerate() {
        truncated_total += truncated;
        let mut sorted: Vec<(&(usize, Vec<i64>), &u64)> = counts.iter().collect();
        sorted.sort();
        for ((sheet_to, z), &c) in sorted {
            let p = c as f64 / n;
            entries.push((si, *sheet_to, z.clone(), p));
            std_errors.push((p * (1.0 - p) / n).sqrt());
        }
    }
    let total_mass: f64 =
        entries.iter().map(|(.., p)| p).sum::<f64>() / sheet_reps.len().max(1) as f64;
    let truncation_rate = truncated_total as f64 / (n * sheet_reps.len().max(1) as f64);
    let kernel = ZdKernel::new_unvalidated(dim, sheet_reps.len(), entries)?;
    Ok(FirstReturnEstimate {
        kernel,
        std_errors,
        sheet_reps,
        total_mass,
        truncation_rate,
        low_reliability: truncation_rate > 0.5,
        samples,
    })
}
