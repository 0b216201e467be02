//! Green tables for sub-Markov walks on a single factor group.
//!
//! States are factor elements; the kernel is a finite step distribution plus
//! a self-loop (the excursion weight into the other free factors). Values
//! are accumulated by iterated kernel application restricted to a word-ball,
//! which is exact up to the reported truncation tail.

use crate::error::Result;
use crate::group::{GroupElement, GroupModel};
use std::collections::HashMap;

#[derive(Debug, Clone)]
pub struct LocalGreen {
    model: GroupModel,
    steps: Vec<(GroupElement, f64)>,
    alpha: f64,
    radius: u32,
    truncation: u32,
    table: HashMap<GroupElement, f64>,
    /// Mass still in flight when iteration stopped.
    residual_mass: f64,
    /// Per-step total mass of the kernel (≤ 1; < 1 when killed).
    step_mass: f64,
    terms_used: u32,
}

impl LocalGreen {
    /// Accumulate G(0, ·) out to `radius` with at most `truncation` terms.
    pub fn compute(
        model: &GroupModel,
        steps: &[(GroupElement, f64)],
        alpha: f64,
        radius: u32,
        truncation: u32,
    ) -> Result<LocalGreen> {
        let step_mass: f64 = alpha + steps.iter().map(|(_, p)| p).sum::<f64>();
        let e = model.identity();
        let mut cur: HashMap<GroupElement, f64> = HashMap::new();
        cur.insert(e.clone(), 1.0);
        let mut table: HashMap<GroupElement, f64> = HashMap::new();
        table.insert(e, 1.0);
        let mut residual = 0.0;
        let mut terms = 0u32;
        for _ in 1..=truncation {
            let mut next: HashMap<GroupElement, f64> =
                HashMap::with_capacity(cur.len() + cur.len() / 2);
            for (x, p) in &cur {
                if alpha > 0.0 {
                    *next.entry(x.clone()).or_insert(0.0) += alpha * p;
                }
                for (s, q) in steps {
                    let y = model.compose(x, s)?;
                    if model.word_length(&y)? <= radius as u64 {
                        *next.entry(y).or_insert(0.0) += p * q;
                    }
                }
            }
            let total: f64 = next.values().sum();
            for (g, p) in &next {
                *table.entry(g.clone()).or_insert(0.0) += p;
            }
            cur = next;
            terms += 1;
            residual = total;
            if total < 1e-18 {
                residual = total;
                break;
            }
        }
        Ok(LocalGreen {
            model: model.clone(),
            steps: steps.to_vec(),
            alpha,
            radius,
            truncation,
            table,
            residual_mass: residual,
            step_mass,
            terms_used: terms,
        })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn terms_used(&self) -> u32 {
        self.terms_used
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Truncated G(0, g); zero for unvisited states.
    pub fn value(&self, g: &GroupElement) -> f64 {
        self.table.get(g).copied().unwrap_or(0.0)
    }

    pub fn value_at_origin(&self) -> f64 {
        self.value(&self.model.identity())
    }

    /// Crude upper bound on the mass missing from every table entry.
    pub fn tail_bound(&self) -> f64 {
        if self.step_mass < 1.0 {
            self.residual_mass / (1.0 - self.step_mass)
        } else {
            f64::INFINITY
        }
    }

    /// First-passage value F(0 → g) = G(0,g)/G(0,0).
    pub fn first_passage(&self, g: &GroupElement) -> f64 {
        self.value(g) / self.value_at_origin()
    }

    /// Rebuild with a new self-loop weight, keeping geometry parameters.
    pub fn with_alpha(&self, alpha: f64) -> Result<LocalGreen> {
        LocalGreen::compute(&self.model, &self.steps, alpha, self.radius, self.truncation)
    }

    /// Rebuild with at least the given radius (and a matching truncation).
    pub fn with_radius(&self, radius: u32) -> Result<LocalGreen> {
        let truncation = self.truncation.max(radius * 6).max(200);
        LocalGreen::compute(&self.model, &self.steps, self.alpha, radius, truncation)
    }
}
