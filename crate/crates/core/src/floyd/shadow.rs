//! Partial shadows at a finite horizon, Poincaré series, Patterson–Sullivan
//! shadow weights, and the harmonic-measure Monte Carlo estimate.
//!
//! The shadow condition for a point x asks for a geodesic [e,x] that meets
//! B(apex, r) and carries an (ε,η)-transition point within 2η of the apex.
//! Membership is tested through on-geodesic candidates in a small ball
//! around the apex (d(e,m) + d(m,x) = d(e,x)); deepness of a candidate is
//! judged on the on-geodesic window around it, which is exact for
//! unique-geodesic models and a union-window approximation otherwise.

use super::transition::PeripheralStructure;
use crate::error::{Error, Result};
use crate::group::{coset_distance, GroupElement, GroupModel, ModelKind};
use crate::walk::measure::SparseMeasure;
use crate::walk::paths::{sample_paths, support_elements};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct ShadowParams {
    pub r: u64,
    pub epsilon: u64,
    pub eta: u64,
}

impl ShadowParams {
    /// The paper's Ω_{ε,η} convention: r = 2η.
    pub fn standard(epsilon: u64, eta: u64) -> ShadowParams {
        ShadowParams { r: 2 * eta, epsilon, eta }
    }
}

/// Membership tester for the partial shadow at one apex.
pub struct ShadowContext {
    model: GroupModel,
    peripherals: PeripheralStructure,
    apex: GroupElement,
    params: ShadowParams,
    /// Candidate points near the apex: (point, d(apex,·), ‖·‖).
    candidates: Vec<(GroupElement, u64, u64)>,
}

impl ShadowContext {
    pub fn new(
        model: &GroupModel,
        peripherals: &PeripheralStructure,
        apex: &GroupElement,
        params: ShadowParams,
    ) -> Result<ShadowContext> {
        let window = params.r.max(2 * params.eta) + params.eta;
        let ball = model.clone().cayley_ball(window as u32)?;
        let mut candidates = Vec::new();
        for b in ball.elements() {
            let m = model.compose(apex, b)?;
            let d_apex = model.distance(apex, &m)?;
            let norm = model.word_length(&m)?;
            candidates.push((m, d_apex, norm));
        }
        Ok(ShadowContext {
            model: model.clone(),
            peripherals: peripherals.clone(),
            apex: apex.clone(),
            params,
            candidates,
        })
    }

    pub fn apex(&self) -> &GroupElement {
        &self.apex
    }

    pub fn params(&self) -> ShadowParams {
        self.params
    }

    /// Part 1 of the shadow condition only: some geodesic [e,x] meets
    /// B(apex, r) (the r-cylinder at the apex).
    pub fn meets_ball(&self, x: &GroupElement) -> Result<bool> {
        let total = self.model.word_length(x)?;
        for (m, d_apex, norm) in &self.candidates {
            if *d_apex <= self.params.r && norm + self.model.distance(m, x)? == total {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Does some geodesic [e,x] meet B(apex,r) with a transition point in
    /// B(apex,2η)?
    pub fn contains(&self, x: &GroupElement) -> Result<bool> {
        let total = self.model.word_length(x)?;
        // on-geodesic candidates with their distances from e
        let mut on_geo: Vec<(usize, u64)> = Vec::new();
        for (i, (m, _, norm)) in self.candidates.iter().enumerate() {
            if norm + self.model.distance(m, x)? == total {
                on_geo.push((i, *norm));
            }
        }
        // part 1: a candidate within r of the apex
        let hits: Vec<(usize, u64)> = on_geo
            .iter()
            .copied()
            .filter(|(i, _)| self.candidates[*i].1 <= self.params.r)
            .collect();
        if hits.is_empty() {
            return Ok(false);
        }
        // part 2: a transition candidate within 2η of the apex lying on a
        // common geodesic with some hit
        for &(pi, p_from_e) in &on_geo {
            let (p, p_apex, _) = &self.candidates[pi];
            if *p_apex > 2 * self.params.eta {
                continue;
            }
            if !self.is_transition_candidate(pi, &on_geo, x)? {
                continue;
            }
            for &(mi, m_from_e) in &hits {
                let m = &self.candidates[mi].0;
                let (first, second, d1, d2) = if m_from_e <= p_from_e {
                    (m, p, m_from_e, p_from_e)
                } else {
                    (p, m, p_from_e, m_from_e)
                };
                let _ = d2;
                let through = d1
                    + self.model.distance(first, second)?
                    + self.model.distance(second, x)?;
                if through == total && self.model.word_length(first)?
                    + self.model.distance(first, second)?
                    == self.model.word_length(second)?
                {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Transition test for a candidate: not (ε,η)-deep along the on-geodesic
    /// window around it.
    fn is_transition_candidate(
        &self,
        pi: usize,
        on_geo: &[(usize, u64)],
        _x: &GroupElement,
    ) -> Result<bool> {
        if self.peripherals.is_empty() {
            return Ok(true);
        }
        let ModelKind::FreeProduct { .. } = self.model.kind() else {
            return Ok(true);
        };
        let (p, _, p_norm) = &self.candidates[pi];
        let p_from_e = *p_norm;
        let eps = self.peripherals.epsilon;
        let eta = self.peripherals.eta;
        for &f in &self.peripherals.factors {
            // candidate coset through p
            let coset = match p {
                GroupElement::Product(syls) => {
                    let mut t = syls.clone();
                    if let Some((idx, _)) = t.last() {
                        if *idx as usize == f {
                            t.pop();
                        }
                    }
                    GroupElement::Product(t)
                }
                _ => continue,
            };
            if coset_distance(&self.model, p, &coset, f)? > eps {
                continue;
            }
            // window: on-geodesic candidates within η of p along the geodesic
            let mut all_near = true;
            let mut window_nonempty = false;
            for &(qi, q_from_e) in on_geo {
                let q = &self.candidates[qi].0;
                if q_from_e.abs_diff(p_from_e) <= eta && self.model.distance(p, q)? <= eta {
                    window_nonempty = true;
                    if coset_distance(&self.model, q, &coset, f)? > eps {
                        all_near = false;
                        break;
                    }
                }
            }
            if window_nonempty && all_near {
                // the whole visible window is ε-near the coset: deep
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A partial shadow realized on the sphere of a finite horizon.
#[derive(Debug, Clone)]
pub struct Shadow {
    pub apex: GroupElement,
    pub params: ShadowParams,
    pub horizon: u32,
    /// Sphere-horizon members in deterministic order.
    pub members: Vec<GroupElement>,
    pub sphere_size: u64,
}

/// Enumerate the partial shadow Ω_{r,ε,η}(apex) on the horizon sphere.
pub fn shadow(
    model: &GroupModel,
    peripherals: &PeripheralStructure,
    apex: &GroupElement,
    params: ShadowParams,
    horizon: u32,
) -> Result<Shadow> {
    let apex_norm = model.word_length(apex)?;
    if apex_norm + 2 * params.eta > horizon as u64 {
        return Err(Error::HorizonTooSmall {
            needed: (apex_norm + 2 * params.eta) as u32,
            got: horizon,
        });
    }
    let ctx = ShadowContext::new(model, peripherals, apex, params)?;
    let ball = model.cayley_ball(horizon)?;
    let mut members = Vec::new();
    for x in ball.sphere(horizon) {
        if ctx.contains(x)? {
            members.push(x.clone());
        }
    }
    Ok(Shadow {
        apex: apex.clone(),
        params,
        horizon,
        sphere_size: ball.sphere_sizes()[horizon as usize],
        members,
    })
}

/// Partial Poincaré series 𝒫(s,R) = Σ_{‖g‖≤R} e^{−s‖g‖}.
#[derive(Debug, Clone, Copy)]
pub struct PoincareValue {
    pub value: f64,
    pub s: f64,
    pub radius: u32,
    /// Set when the sphere terms stopped decaying (s ≤ v diagnostics).
    pub divergence_flag: bool,
}

pub fn poincare_series(model: &GroupModel, s: f64, radius: u32) -> Result<PoincareValue> {
    if s <= 0.0 {
        return Err(Error::Invalid("Poincaré exponent must be positive".into()));
    }
    let spheres = model.sphere_series(radius);
    let mut value = 0.0;
    let mut last_terms = Vec::new();
    for (n, &sn) in spheres.iter().enumerate() {
        let term = sn * (-s * n as f64).exp();
        value += term;
        last_terms.push(term);
    }
    let k = last_terms.len();
    let divergence_flag = k >= 3 && last_terms[k - 1] >= last_terms[k - 3].max(1e-12);
    Ok(PoincareValue { value, s, radius, divergence_flag })
}

/// Finite-s, finite-R Patterson–Sullivan weighting e^{−s‖g‖}/𝒫(s,R).
#[derive(Debug, Clone, Copy)]
pub struct PsWeighting {
    pub s: f64,
    pub radius: u32,
    pub normalization: f64,
}

impl PsWeighting {
    pub fn new(model: &GroupModel, s: f64, radius: u32) -> Result<PsWeighting> {
        let p = poincare_series(model, s, radius)?;
        Ok(PsWeighting { s, radius, normalization: p.value })
    }

    pub fn weight(&self, norm: u64) -> f64 {
        (-self.s * norm as f64).exp() / self.normalization
    }
}

/// Normalized Patterson–Sullivan weight of the shadow cone: all ball-R
/// elements whose geodesics pass the shadow condition.
pub fn ps_shadow_weight(
    model: &GroupModel,
    peripherals: &PeripheralStructure,
    apex: &GroupElement,
    params: ShadowParams,
    s: f64,
    radius: u32,
) -> Result<f64> {
    let ctx = ShadowContext::new(model, peripherals, apex, params)?;
    let ball = model.cayley_ball(radius)?;
    let weighting = PsWeighting::new(model, s, radius)?;
    let mut acc = 0.0;
    for x in ball.elements() {
        if ctx.contains(x)? {
            acc += weighting.weight(ball.distance(x).unwrap() as u64);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy)]
pub struct HarmonicShadowEstimate {
    pub fraction: f64,
    pub std_error: f64,
    pub hits: u64,
    pub count: usize,
    /// Set when too few paths hit the shadow for a stable estimate.
    pub low_statistics: bool,
}

/// Monte Carlo estimate of the harmonic measure of the shadow: the fraction
/// of length-T paths whose endpoint satisfies the shadow condition.
pub fn harmonic_shadow_estimate(
    measure: &SparseMeasure,
    peripherals: &PeripheralStructure,
    apex: &GroupElement,
    params: ShadowParams,
    t: usize,
    count: usize,
    seed: u64,
) -> Result<HarmonicShadowEstimate> {
    let model = measure.model().clone();
    let ctx = ShadowContext::new(&model, peripherals, apex, params)?;
    let support = support_elements(measure);
    let paths = sample_paths(measure, t, count, seed);
    let hits: u64 = paths
        .par_iter()
        .map(|p| {
            let mut acc = model.identity();
            for g in p.increment_elements(&support) {
                acc = model.compose(&acc, g).expect("same model");
            }
            ctx.contains(&acc).expect("shadow test") as u64
        })
        .sum();
    let fraction = hits as f64 / count as f64;
    let std_error = (fraction * (1.0 - fraction) / count as f64).sqrt();
    Ok(HarmonicShadowEstimate {
        fraction,
        std_error,
        hits,
        count,
        low_statistics: hits < 10,
    })
}
