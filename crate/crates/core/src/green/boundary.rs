//! Boundary rays, Naim kernels, cross-ratios and the translation-length
//! identities they satisfy.

use super::engine::GreenEngine;
use super::ops::{translation_length, TranslationMetric};
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupModel, ModelKind};

/// An eventually periodic geodesic ray: points are `prefix · period^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryRay {
    prefix: GroupElement,
    period: GroupElement,
}

impl BoundaryRay {
    /// Build and validate a ray. Ray points must have strictly increasing
    /// word length along the default depth schedule.
    pub fn new(model: &GroupModel, prefix: GroupElement, period: GroupElement) -> Result<BoundaryRay> {
        if period.is_identity() {
            return Err(Error::Invalid("ray period is the identity".into()));
        }
        match model.kind() {
            ModelKind::FreeGroup { .. } | ModelKind::FreeProduct { .. } => {}
            other => {
                return Err(Error::Invalid(format!(
                    "boundary rays need a hyperbolic-like model, got {other:?}"
                )))
            }
        }
        let ray = BoundaryRay { prefix, period };
        let mut last = 0u64;
        for depth in 1..=4u32 {
            let p = ray.point(model, depth)?;
            let len = model.word_length(&p)?;
            if depth > 1 && len <= last {
                return Err(Error::Invalid(
                    "ray points do not have strictly increasing word length".into(),
                ));
            }
            last = len;
        }
        Ok(ray)
    }

    /// Ray toward the attracting fixed point g⁺ of a loxodromic g.
    pub fn from_loxodromic(model: &GroupModel, g: &GroupElement) -> Result<BoundaryRay> {
        BoundaryRay::new(model, model.identity(), g.clone())
    }

    /// Left-translate the ray by g (the ray toward g·ξ).
    pub fn translated(&self, model: &GroupModel, g: &GroupElement) -> Result<BoundaryRay> {
        Ok(BoundaryRay {
            prefix: model.compose(g, &self.prefix)?,
            period: self.period.clone(),
        })
    }

    pub fn point(&self, model: &GroupModel, depth: u32) -> Result<GroupElement> {
        let mut acc = self.prefix.clone();
        for _ in 0..depth {
            acc = model.compose(&acc, &self.period)?;
        }
        Ok(acc)
    }

    /// Stable key identifying the boundary point: the prefix with trailing
    /// whole periods absorbed, plus the primitive root of the period.
    fn normalized(&self, model: &GroupModel) -> Result<(GroupElement, GroupElement)> {
        let period = primitive_period(model, &self.period)?;
        let mut prefix = self.prefix.clone();
        let pinv = model.invert(&period)?;
        loop {
            let cand = model.compose(&prefix, &pinv)?;
            if model.word_length(&cand)? + model.word_length(&period)? == model.word_length(&prefix)? {
                prefix = cand;
            } else {
                break;
            }
        }
        Ok((prefix, period))
    }

    pub fn same_point(&self, model: &GroupModel, other: &BoundaryRay) -> Result<bool> {
        Ok(self.normalized(model)? == other.normalized(model)?)
    }
}

/// Smallest r with period = r^k (letter/syllable string primitivity).
fn primitive_period(model: &GroupModel, period: &GroupElement) -> Result<GroupElement> {
    for k in (2..=16u32).rev() {
        // try to find r with r^k = period by word-length division
        let total = model.word_length(period)?;
        if total % k as u64 != 0 {
            continue;
        }
        if let Some(r) = nth_root(model, period, k)? {
            return primitive_period(model, &r);
        }
    }
    Ok(period.clone())
}

fn nth_root(model: &GroupModel, g: &GroupElement, k: u32) -> Result<Option<GroupElement>> {
    // candidate root: leading sub-word of length |g|/k
    let target_len = model.word_length(g)? / k as u64;
    if target_len == 0 {
        return Ok(None);
    }
    let root = match g {
        GroupElement::Word(w) => GroupElement::Word(w[..target_len as usize].to_vec()),
        GroupElement::Product(_) => {
            // build from a geodesic word prefix
            let geo = crate::group::geodesics(model, &model.identity(), g, 1)?;
            match geo.words.first() {
                Some(word) => model.element_from_letters(&word[..target_len as usize])?,
                None => return Ok(None),
            }
        }
        _ => return Ok(None),
    };
    Ok((model.power(&root, k as i64)? == *g).then_some(root))
}

/// Naim kernel Θ(ξ,ζ) evaluated at ray points of increasing depth.
#[derive(Debug, Clone)]
pub struct NaimValue {
    pub value: f64,
    /// (depth, value) trace along the schedule.
    pub per_depth: Vec<(u32, f64)>,
    /// Relative change between the last two depths.
    pub diagnostic: f64,
    pub stabilized: bool,
}

pub const DEFAULT_DEPTHS: [u32; 4] = [4, 8, 12, 16];

/// Θ(ξ,ζ) = lim G(g,h)/(G(g,e)G(e,h)) along g→ξ, h→ζ.
pub fn naim_kernel(
    engine: &GreenEngine,
    xi: &BoundaryRay,
    zeta: &BoundaryRay,
    depths: &[u32],
    tolerance: f64,
) -> Result<NaimValue> {
    let model = engine.model().clone();
    if xi.same_point(&model, zeta)? {
        return Err(Error::DegenerateRays("Naim kernel needs distinct limits".into()));
    }
    let e = model.identity();
    let mut per_depth = Vec::with_capacity(depths.len());
    for &d in depths {
        let g = xi.point(&model, d)?;
        let h = zeta.point(&model, d)?;
        let log_theta =
            engine.log_green(&g, &h)? - engine.log_green(&g, &e)? - engine.log_green(&e, &h)?;
        per_depth.push((d, log_theta.exp()));
    }
    let value = per_depth.last().map(|(_, v)| *v).unwrap_or(f64::NAN);
    let diagnostic = if per_depth.len() >= 2 {
        let prev = per_depth[per_depth.len() - 2].1;
        ((value - prev) / value.abs().max(f64::MIN_POSITIVE)).abs()
    } else {
        f64::INFINITY
    };
    Ok(NaimValue { value, per_depth, diagnostic, stabilized: diagnostic <= tolerance })
}

#[derive(Debug, Clone)]
pub struct CrossRatioValue {
    pub value: f64,
    pub per_depth: Vec<(u32, f64)>,
    pub diagnostic: f64,
    pub stabilized: bool,
}

/// Cross-ratio [ξ₁,ξ₂,ξ₃,ξ₄] = Θ(ξ₁,ξ₃)Θ(ξ₂,ξ₄)/(Θ(ξ₁,ξ₄)Θ(ξ₂,ξ₃)),
/// evaluated as a ratio of Naim kernels at matched depths. Returns exactly 1
/// when ξ₁=ξ₂ or ξ₃=ξ₄; errors on the degenerate pairs (ξ₁,ξ₃), (ξ₁,ξ₄),
/// (ξ₂,ξ₃), (ξ₂,ξ₄).
pub fn cross_ratio(
    engine: &GreenEngine,
    rays: [&BoundaryRay; 4],
    depths: &[u32],
    tolerance: f64,
) -> Result<CrossRatioValue> {
    let model = engine.model().clone();
    let [x1, x2, x3, x4] = rays;
    for (a, b) in [(x1, x3), (x1, x4), (x2, x3), (x2, x4)] {
        if a.same_point(&model, b)? {
            return Err(Error::DegenerateRays(
                "cross-ratio pairs (1,3),(1,4),(2,3),(2,4) must have distinct limits".into(),
            ));
        }
    }
    if x1.same_point(&model, x2)? || x3.same_point(&model, x4)? {
        return Ok(CrossRatioValue {
            value: 1.0,
            per_depth: depths.iter().map(|&d| (d, 1.0)).collect(),
            diagnostic: 0.0,
            stabilized: true,
        });
    }
    let e = model.identity();
    let mut per_depth = Vec::with_capacity(depths.len());
    for &d in depths {
        let mut log_cr = 0.0;
        for (a, b, sign) in [
            (x1, x3, 1.0),
            (x2, x4, 1.0),
            (x1, x4, -1.0),
            (x2, x3, -1.0),
        ] {
            let g = a.point(&model, d)?;
            let h = b.point(&model, d)?;
            let log_theta =
                engine.log_green(&g, &h)? - engine.log_green(&g, &e)? - engine.log_green(&e, &h)?;
            log_cr += sign * log_theta;
        }
        per_depth.push((d, log_cr.exp()));
    }
    let value = per_depth.last().map(|(_, v)| *v).unwrap_or(f64::NAN);
    let diagnostic = if per_depth.len() >= 2 {
        let prev = per_depth[per_depth.len() - 2].1;
        ((value - prev) / value.abs().max(f64::MIN_POSITIVE)).abs()
    } else {
        f64::INFINITY
    };
    Ok(CrossRatioValue { value, per_depth, diagnostic, stabilized: diagnostic <= tolerance })
}

/// Caller-specified quadruple sequences for the four-point ratio audit:
/// x_n, y_n, x'_n, y'_n given as rays evaluated at depth n.
#[derive(Debug, Clone)]
pub struct QuadrupleSpec {
    pub x: BoundaryRay,
    pub y: BoundaryRay,
    pub x_prime: BoundaryRay,
    pub y_prime: BoundaryRay,
}

#[derive(Debug, Clone)]
pub struct BoundaryIdentityReport {
    /// e^{−2·l_G(g)} vs the cross-ratio [g⁻, g⁺, g·ξ₀, ξ₀], per depth.
    pub translation_identity: Vec<(u32, f64, f64)>,
    pub translation_identity_rel_err: f64,
    /// (n, l_G(gⁿhⁿ) − l_G(gⁿ) − l_G(hⁿ), cross-ratio [g⁻,h⁻,g⁺,h⁺]).
    pub pair_identity: Vec<(u32, f64, f64)>,
    /// (n, G(x,y)G(x',y') / (G(x',y)G(x,y'))).
    pub quadruple_ratios: Vec<(u32, f64)>,
    pub max_rel_discrepancy: f64,
}

/// Audits the translation-length and cross-ratio identities for a pair of
/// independent loxodromic-like elements.
pub fn boundary_identity_audit(
    engine: &GreenEngine,
    g: &GroupElement,
    h: &GroupElement,
    xi0: &BoundaryRay,
    n_max: u32,
    quad: Option<&QuadrupleSpec>,
) -> Result<BoundaryIdentityReport> {
    let model = engine.model().clone();
    let ginv = model.invert(g)?;
    let g_plus = BoundaryRay::from_loxodromic(&model, g)?;
    let g_minus = BoundaryRay::from_loxodromic(&model, &ginv)?;
    let g_xi0 = xi0.translated(&model, g)?;

    // identity e^{-2 l_G(g)} = [g⁻, g⁺, g·ξ₀, ξ₀]
    let lg = translation_length(engine, g, TranslationMetric::Green, n_max)?;
    let lhs = (-2.0 * lg.value).exp();
    let mut translation_identity = Vec::new();
    let mut max_rel: f64 = 0.0;
    for d in [4u32, 8, 12, 16] {
        let cr = cross_ratio(engine, [&g_minus, &g_plus, &g_xi0, xi0], &[d], 1e-3)?;
        translation_identity.push((d, lhs, cr.value));
    }
    let translation_identity_rel_err = translation_identity
        .last()
        .map(|(_, l, r)| ((r - l) / l.abs().max(f64::MIN_POSITIVE)).abs())
        .unwrap_or(f64::NAN);
    max_rel = max_rel.max(translation_identity_rel_err);

    // identity [g⁻,h⁻,g⁺,h⁺] = lim exp(l_G(gⁿhⁿ) − l_G(gⁿ) − l_G(hⁿ))
    let hinv = model.invert(h)?;
    let h_plus = BoundaryRay::from_loxodromic(&model, h)?;
    let h_minus = BoundaryRay::from_loxodromic(&model, &hinv)?;
    let mut pair_identity = Vec::new();
    for n in 1..=n_max.min(6) {
        let gn = model.power(g, n as i64)?;
        let hn = model.power(h, n as i64)?;
        let gnhn = model.compose(&gn, &hn)?;
        let l_gn = translation_length(engine, &gn, TranslationMetric::Green, n_max)?;
        let l_hn = translation_length(engine, &hn, TranslationMetric::Green, n_max)?;
        let l_gh = translation_length(engine, &gnhn, TranslationMetric::Green, n_max)?;
        let exponent = l_gh.value - l_gn.value - l_hn.value;
        let cr = cross_ratio(engine, [&g_minus, &h_minus, &g_plus, &h_plus], &[12], 1e-3)?;
        pair_identity.push((n, exponent, cr.value));
        max_rel = max_rel.max(((cr.value - exponent.exp()) / cr.value.abs()).abs());
    }

    // caller-specified quadruple ratio → 1
    let mut quadruple_ratios = Vec::new();
    if let Some(q) = quad {
        for d in [4u32, 8, 12, 16] {
            let x = q.x.point(&model, d)?;
            let y = q.y.point(&model, d)?;
            let xp = q.x_prime.point(&model, d)?;
            let yp = q.y_prime.point(&model, d)?;
            let log_ratio = engine.log_green(&x, &y)? + engine.log_green(&xp, &yp)?
                - engine.log_green(&xp, &y)?
                - engine.log_green(&x, &yp)?;
            quadruple_ratios.push((d, log_ratio.exp()));
        }
        if let Some((_, r)) = quadruple_ratios.last() {
            max_rel = max_rel.max((r - 1.0).abs());
        }
    }
    Ok(BoundaryIdentityReport {
        translation_identity,
        translation_identity_rel_err,
        pair_identity,
        quadruple_ratios,
        max_rel_discrepancy: max_rel,
    })
}
