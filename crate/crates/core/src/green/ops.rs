//! Metric-level audits on top of the Green engine.

use super::engine::GreenEngine;
use crate::error::{Error, Result};
use crate::group::{geodesics, GroupElement, GroupModel, ModelKind};

/// Normalized Ancona ratio G(x,y)G(y,z)/(G(x,z)G(y,y)); exactly 1 on trees
/// when y lies on a geodesic from x to z.
pub fn ancona_ratio(
    engine: &GreenEngine,
    x: &GroupElement,
    y: &GroupElement,
    z: &GroupElement,
) -> Result<f64> {
    let lg_xy = engine.log_green(x, y)?;
    let lg_yz = engine.log_green(y, z)?;
    let lg_xz = engine.log_green(x, z)?;
    let lg_ee = engine.green_ee().ln();
    Ok((lg_xy + lg_yz - lg_xz - lg_ee).exp())
}

/// Rough-similarity audit over the ball of radius R.
#[derive(Debug, Clone)]
pub struct MetricAudit {
    pub radius: u32,
    /// (element, ‖g‖, d_G(e,g), |d_G − v·d_w|) rows in BFS order.
    pub rows: Vec<(GroupElement, u64, f64, f64)>,
    pub v: f64,
    pub max_deviation: f64,
    /// Max deviation restricted to each radius (growth diagnostic).
    pub max_deviation_by_radius: Vec<(u32, f64)>,
    /// Ancona ratios over sampled geodesic triples (x=e, y on [e,z], z).
    pub ancona_ratios: Vec<f64>,
    pub ancona_min: f64,
    pub ancona_max: f64,
}

pub fn rough_similarity_audit(engine: &GreenEngine, radius: u32) -> Result<MetricAudit> {
    let model = engine.model().clone();
    let ball = model.cayley_ball(radius)?;
    let v = model.volume_growth();
    let mut rows = Vec::with_capacity(ball.elements().len());
    let mut max_dev = 0.0f64;
    let mut by_radius = vec![0.0f64; radius as usize + 1];
    for g in ball.elements() {
        let dw = ball.distance(g).unwrap() as u64;
        let dg = engine.distance_from_e(g)?;
        let dev = (dg - v * dw as f64).abs();
        max_dev = max_dev.max(dev);
        let r = dw as usize;
        by_radius[r] = by_radius[r].max(dev);
        rows.push((g.clone(), dw, dg, dev));
    }
    // triples (e, y, z) with y on a canonically enumerated geodesic [e, z]
    let mut ancona = Vec::new();
    let sample_stride = (ball.elements().len() / 300).max(1);
    let e = model.identity();
    for (i, z) in ball.elements().iter().enumerate() {
        if i % sample_stride != 0 || z.is_identity() {
            continue;
        }
        let geo = geodesics(&model, &e, z, 1)?;
        if let Some(word) = geo.words.first() {
            let half = word.len() / 2;
            let y = model.element_from_letters(&word[..half])?;
            ancona.push(ancona_ratio(engine, &e, &y, z)?);
        }
    }
    let ancona_min = ancona.iter().copied().fold(f64::INFINITY, f64::min);
    let ancona_max = ancona.iter().copied().fold(0.0f64, f64::max);
    let max_deviation_by_radius = by_radius
        .into_iter()
        .enumerate()
        .map(|(r, d)| (r as u32, d))
        .collect();
    Ok(MetricAudit {
        radius,
        rows,
        v,
        max_deviation: max_dev,
        max_deviation_by_radius,
        ancona_ratios: ancona,
        ancona_min,
        ancona_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranslationMetric {
    Word,
    Green,
}

#[derive(Debug, Clone)]
pub struct TranslationLength {
    pub metric: TranslationMetric,
    /// inf over n ≤ n_max of d(e, gⁿ)/n.
    pub value: f64,
    /// Per-n values d(e,gⁿ)/n.
    pub per_n: Vec<f64>,
    /// Exact stable value from cyclic reduction (word metric only).
    pub exact_word: Option<u64>,
    /// Nearest small-denominator rational p/q with q ≤ n_max.
    pub rational: (i64, u32),
}

/// Stable translation length l(g) = lim d(e, gⁿ)/n for a loxodromic-like g.
pub fn translation_length(
    engine: &GreenEngine,
    g: &GroupElement,
    metric: TranslationMetric,
    n_max: u32,
) -> Result<TranslationLength> {
    let model = engine.model().clone();
    check_loxodromic(&model, g)?;
    let mut per_n = Vec::with_capacity(n_max as usize);
    let mut inf = f64::INFINITY;
    let mut p = model.identity();
    for n in 1..=n_max {
        p = model.compose(&p, g)?;
        let d = match metric {
            TranslationMetric::Word => model.word_length(&p)? as f64,
            TranslationMetric::Green => engine.distance_from_e(&p)?,
        };
        let rate = d / n as f64;
        inf = inf.min(rate);
        per_n.push(rate);
    }
    let exact_word = match metric {
        TranslationMetric::Word => Some(model.word_length(&cyclic_reduction(&model, g)?.0)?),
        TranslationMetric::Green => None,
    };
    Ok(TranslationLength {
        metric,
        value: inf,
        per_n,
        exact_word,
        rational: best_rational(inf, n_max.max(2)),
    })
}

/// (cyclically reduced core, conjugator u) with g = u · core · u⁻¹.
pub fn cyclic_reduction(model: &GroupModel, g: &GroupElement) -> Result<(GroupElement, GroupElement)> {
    let mut core = g.clone();
    let mut conj = model.identity();
    loop {
        let (head, tail_inv) = match &core {
            GroupElement::Word(w) if w.len() >= 2 => {
                (w.first().copied(), w.last().map(|l| -l))
            }
            GroupElement::Product(s) if s.len() >= 2 => {
                let first = &s[0];
                let last = s.last().unwrap();
                if first.0 == last.0 {
                    // same factor at both ends: conjugate by the last syllable
                    let u = GroupElement::Product(vec![last.clone()]);
                    let ui = model.invert(&u)?;
                    conj = model.compose(&conj, &ui)?;
                    core = model.compose(&model.compose(&u, &core)?, &ui)?;
                    continue;
                }
                (None, None)
            }
            _ => (None, None),
        };
        match (head, tail_inv) {
            (Some(h), Some(t)) if h == t => {
                // word starts with s and ends with s⁻¹
                if let GroupElement::Word(w) = &core {
                    let letter = w[0];
                    let u = GroupElement::Word(vec![letter]);
                    let ui = model.invert(&u)?;
                    conj = model.compose(&conj, &u)?;
                    core = model.compose(&model.compose(&ui, &core)?, &u)?;
                    continue;
                }
                break;
            }
            _ => break,
        }
    }
    Ok((core, conj))
}

fn check_loxodromic(model: &GroupModel, g: &GroupElement) -> Result<()> {
    if g.is_identity() {
        return Err(Error::Torsion("identity element".into()));
    }
    match model.kind() {
        ModelKind::FreeGroup { .. } => Ok(()),
        ModelKind::FreeProduct { .. } => {
            let (core, _) = cyclic_reduction(model, g)?;
            match &core {
                GroupElement::Product(s) if s.len() >= 2 => Ok(()),
                GroupElement::Product(s) if s.len() == 1 => {
                    // conjugate into a factor: check torsion for the message
                    if is_torsion(model, g)? {
                        Err(Error::Torsion(format!("{g:?} has finite order")))
                    } else {
                        Err(Error::NotLoxodromic(format!(
                            "{g:?} is conjugate into free factor {}",
                            s[0].0
                        )))
                    }
                }
                _ => Err(Error::NotLoxodromic(format!("{g:?}"))),
            }
        }
        ModelKind::FiniteCyclic { .. } => Err(Error::Torsion(format!("{g:?} has finite order"))),
        _ => Err(Error::NotLoxodromic(format!(
            "model {:?} has no loxodromic elements",
            model.kind()
        ))),
    }
}

fn is_torsion(model: &GroupModel, g: &GroupElement) -> Result<bool> {
    let mut p = g.clone();
    for _ in 0..256 {
        if p.is_identity() {
            return Ok(true);
        }
        p = model.compose(&p, g)?;
    }
    Ok(false)
}

/// Best rational approximation p/q with q ≤ max_den (continued fractions).
fn best_rational(x: f64, max_den: u32) -> (i64, u32) {
    let mut best = (x.round() as i64, 1u32);
    let mut best_err = (x - best.0 as f64).abs();
    for q in 1..=max_den {
        let p = (x * q as f64).round() as i64;
        let err = (x - p as f64 / q as f64).abs();
        if err + 1e-15 < best_err {
            best = (p, q);
            best_err = err;
        }
    }
    best
}
