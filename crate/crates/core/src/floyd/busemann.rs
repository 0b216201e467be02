//! Busemann functions and word-metric Gromov products along boundary rays,
//! evaluated at finite depths with a stabilization diagnostic.

use crate::error::Result;
use crate::green::BoundaryRay;
use crate::group::{GroupElement, GroupModel};

#[derive(Debug, Clone)]
pub struct StabilizedValue {
    pub value: f64,
    pub per_depth: Vec<(u32, f64)>,
    pub diagnostic: f64,
    pub stabilized: bool,
}

fn stabilize(per_depth: Vec<(u32, f64)>, tolerance: f64) -> StabilizedValue {
    let value = per_depth.last().map(|(_, v)| *v).unwrap_or(f64::NAN);
    let diagnostic = if per_depth.len() >= 2 {
        (value - per_depth[per_depth.len() - 2].1).abs()
    } else {
        f64::INFINITY
    };
    StabilizedValue { value, per_depth, diagnostic, stabilized: diagnostic <= tolerance }
}

/// Busemann value β_ξ(g, g') ≈ d(g, α(t)) − d(g', α(t)) at ray depths.
pub fn busemann(
    model: &GroupModel,
    xi: &BoundaryRay,
    g: &GroupElement,
    g_prime: &GroupElement,
    depths: &[u32],
    tolerance: f64,
) -> Result<StabilizedValue> {
    let mut per_depth = Vec::with_capacity(depths.len());
    for &d in depths {
        let h = xi.point(model, d)?;
        let v = model.distance(g, &h)? as f64 - model.distance(g_prime, &h)? as f64;
        per_depth.push((d, v));
    }
    Ok(stabilize(per_depth, tolerance))
}

/// Word-metric Gromov product of two rays at the identity:
/// (ξ|ζ)_e ≈ (‖x_t‖ + ‖z_t‖ − d(x_t, z_t)) / 2.
pub fn word_gromov_product(
    model: &GroupModel,
    xi: &BoundaryRay,
    zeta: &BoundaryRay,
    depths: &[u32],
    tolerance: f64,
) -> Result<StabilizedValue> {
    let mut per_depth = Vec::with_capacity(depths.len());
    for &d in depths {
        let x = xi.point(model, d)?;
        let z = zeta.point(model, d)?;
        let v = (model.word_length(&x)? as f64 + model.word_length(&z)? as f64
            - model.distance(&x, &z)? as f64)
            / 2.0;
        per_depth.push((d, v));
    }
    Ok(stabilize(per_depth, tolerance))
}
