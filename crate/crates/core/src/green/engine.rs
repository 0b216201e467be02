//! Green-function evaluation engines.

use super::lattice::LocalGreen;
use super::GreenEstimate;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupModel, ModelKind};
use crate::walk::measure::SparseMeasure;
use std::collections::HashMap;
use std::sync::Mutex;

#[derive(Debug, Clone)]
pub struct GreenParams {
    /// Truncation order for series and factor tables.
    pub truncation: u32,
    /// Ball radius cap for the direct (convolution) engine and ρ̂.
    pub radius_cap: u32,
    /// Fixed-point tolerance for excursion weights.
    pub fixed_point_tol: f64,
    /// Working radius used while solving the fixed point.
    pub fixed_point_radius: u32,
    /// Initial radius of the per-factor query tables.
    pub query_radius: u32,
    /// Apply the laziness transform μ → ½δ_e + ½μ before evaluation.
    pub lazy: bool,
}

impl Default for GreenParams {
    fn default() -> Self {
        GreenParams {
            truncation: 200,
            radius_cap: 8,
            fixed_point_tol: 1e-14,
            fixed_point_radius: 24,
            query_radius: 32,
            lazy: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    /// Syllable-factorized first passage (free products, adapted measures).
    Factorized,
    /// Truncated sparse convolution over a radius-capped ball.
    Direct,
}

/// Shared Green-function evaluator for one (model, measure) pair.
pub struct GreenEngine {
    measure: SparseMeasure,
    model: GroupModel,
    params: GreenParams,
    kind: EngineKind,
    fact: Option<FactEngine>,
    direct: Mutex<Option<DirectTable>>,
    rho: std::sync::OnceLock<(f64, u32)>,
}

struct FactEngine {
    /// Factor models in decomposition order.
    factors: Vec<GroupModel>,
    /// Converged excursion self-loop weights per factor.
    alphas: Vec<f64>,
    tables: Vec<Mutex<LocalGreen>>,
    /// Total first-return weight U = μ(e) + Σ μ(s)·F(s⁻¹); G(e,e) = 1/(1−U).
    u_return: f64,
    u_return_lower: f64,
    /// Single-factor model: G(e,·) is the factor table itself.
    single: bool,
}

impl GreenEngine {
    pub fn new(measure: SparseMeasure, params: GreenParams) -> Result<GreenEngine> {
        let measure = if params.lazy { measure.lazy()? } else { measure };
        let model = measure.model().clone();
        let fact = FactEngine::build(&measure, &params)?;
        let kind = if fact.is_some() { EngineKind::Factorized } else { EngineKind::Direct };
        Ok(GreenEngine {
            measure,
            model,
            params,
            kind,
            fact,
            direct: Mutex::new(None),
            rho: std::sync::OnceLock::new(),
        })
    }

    pub fn kind(&self) -> EngineKind {
        self.kind
    }

    pub fn model(&self) -> &GroupModel {
        &self.model
    }

    pub fn measure(&self) -> &SparseMeasure {
        &self.measure
    }

    pub fn params(&self) -> &GreenParams {
        &self.params
    }

    /// Spectral radius estimate μ*²ⁿ(e)^(1/2n) (largest affordable n);
    /// computed lazily from radius-capped convolution powers.
    pub fn rho_hat(&self) -> f64 {
        self.rho
            .get_or_init(|| {
                rho_hat(&self.measure, self.params.radius_cap, 12).unwrap_or((1.0, 0))
            })
            .0
    }

    /// False for amenable-looking models (ρ̂ near 1 or zero volume growth),
    /// where the geometric tail heuristic has no justification.
    pub fn tail_reliable(&self) -> bool {
        self.rho_hat() < 1.0 - 1e-3 && self.model.volume_growth() > 1e-9
    }

    /// Point value of G(e,e).
    pub fn green_ee(&self) -> f64 {
        match &self.fact {
            Some(f) => f.green_ee(),
            None => self.with_direct(|t| t.cumulative(&self.model.identity())).unwrap_or(1.0),
        }
    }

    /// log G(e,g).
    pub fn log_green_e(&self, g: &GroupElement) -> Result<f64> {
        match &self.fact {
            Some(f) => f.log_green_e(g),
            None => {
                let v = self.with_direct(|t| t.cumulative(g))?;
                if v <= 0.0 {
                    return Err(Error::OutsideBall(format!(
                        "Green value vanished at {g:?} (radius cap {})",
                        self.params.radius_cap
                    )));
                }
                Ok(v.ln())
            }
        }
    }

    /// log G(x,y) via left invariance.
    pub fn log_green(&self, x: &GroupElement, y: &GroupElement) -> Result<f64> {
        let u = self.model.compose(&self.model.invert(x)?, y)?;
        self.log_green_e(&u)
    }

    /// Green distance d_G(x,y) = −log G(x,y) + log G(e,e).
    pub fn green_distance(&self, x: &GroupElement, y: &GroupElement) -> Result<f64> {
        Ok(self.green_ee().ln() - self.log_green(x, y)?)
    }

    /// d_G(e,g).
    pub fn distance_from_e(&self, g: &GroupElement) -> Result<f64> {
        Ok(self.green_ee().ln() - self.log_green_e(g)?)
    }

    /// First passage P(x→y) = G(x,y)/G(e,e).
    pub fn first_passage(&self, x: &GroupElement, y: &GroupElement) -> Result<f64> {
        Ok((self.log_green(x, y)? - self.green_ee().ln()).exp())
    }

    /// Full Green estimate with truncation bookkeeping at order `n`.
    pub fn green_value(&self, x: &GroupElement, y: &GroupElement, n: u32) -> Result<GreenEstimate> {
        let u = self.model.compose(&self.model.invert(x)?, y)?;
        if n == 0 {
            // only the empty path contributes
            let lower = if u.is_identity() { 1.0 } else { 0.0 };
            return Ok(GreenEstimate {
                value: lower,
                truncation_lower_bound: lower,
                tail_estimate: self.tail_from(1.0),
                truncation: 0,
                rho_hat: self.rho_hat(),
                tail_reliable: self.tail_reliable(),
            });
        }
        match &self.fact {
            Some(f) => {
                let (value, lower) = f.value_and_lower(&u, n.max(self.params.truncation))?;
                Ok(GreenEstimate {
                    value,
                    truncation_lower_bound: lower,
                    tail_estimate: (value - lower).max(0.0) + value * 1e-12,
                    truncation: n.max(self.params.truncation),
                    rho_hat: self.rho_hat(),
                    tail_reliable: self.tail_reliable(),
                })
            }
            None => {
                let (lower, last, dropped) =
                    self.with_direct_at(n, |t| (t.cumulative(&u), t.last_term(&u), t.dropped_mass))?;
                Ok(GreenEstimate {
                    value: lower,
                    truncation_lower_bound: lower,
                    // geometric continuation of the last term plus a share of
                    // the mass dropped at the radius cap
                    tail_estimate: self.tail_from(last) + self.tail_from(dropped) * 1e-3,
                    truncation: n,
                    rho_hat: self.rho_hat(),
                    tail_reliable: self.tail_reliable(),
                })
            }
        }
    }

    fn tail_from(&self, scale: f64) -> f64 {
        let rho = self.rho_hat();
        if rho < 1.0 - 1e-3 {
            scale * rho / (1.0 - rho)
        } else {
            f64::INFINITY
        }
    }

    fn with_direct<T>(&self, f: impl FnOnce(&DirectTable) -> T) -> Result<T> {
        let mut guard = self.direct.lock().unwrap();
        if guard.is_none() {
            *guard = Some(DirectTable::build(
                &self.measure,
                self.params.truncation,
                self.params.radius_cap,
            )?);
        }
        Ok(f(guard.as_ref().unwrap()))
    }

    fn with_direct_at<T>(&self, n: u32, f: impl FnOnce(&DirectTable) -> T) -> Result<T> {
        let mut guard = self.direct.lock().unwrap();
        let rebuild = match guard.as_ref() {
            Some(t) => t.truncation < n,
            None => true,
        };
        if rebuild {
            *guard = Some(DirectTable::build(
                &self.measure,
                n.max(self.params.truncation),
                self.params.radius_cap,
            )?);
        }
        Ok(f(guard.as_ref().unwrap()))
    }

    /// Direct truncated-convolution value (for cross-validation).
    pub fn direct_green_e(&self, g: &GroupElement) -> Result<f64> {
        self.with_direct(|t| t.cumulative(g))
    }

    /// Syllable decomposition used by the factorized engine.
    pub fn syllables(&self, g: &GroupElement) -> Result<Vec<(usize, GroupElement)>> {
        syllables_of(&self.model, g)
    }

    /// Converged excursion weights (factorized engine only): the self-loop
    /// mass the induced first-return kernel places at every state of each
    /// free factor.
    pub fn excursion_weights(&self) -> Option<&[f64]> {
        self.fact.as_ref().map(|f| f.alphas.as_slice())
    }

    /// Total first-return weight U with G(e,e) = 1/(1−U) (factorized only).
    pub fn return_weight(&self) -> Option<f64> {
        self.fact.as_ref().and_then(|f| (!f.single).then_some(f.u_return))
    }
}

impl FactEngine {
    fn build(measure: &SparseMeasure, params: &GreenParams) -> Result<Option<FactEngine>> {
        let model = measure.model().clone();
        let Some(factors) = factor_models(&model) else {
            return Ok(None);
        };
        // split the support into per-factor steps; bail out when not adapted
        let mut steps: Vec<Vec<(GroupElement, f64)>> = vec![Vec::new(); factors.len()];
        let mut mu_e = 0.0;
        for (g, p) in measure.iter() {
            if g.is_identity() {
                mu_e += p;
                continue;
            }
            match single_syllable(&model, &g) {
                Some((i, local)) => steps[i].push((local, *p)),
                None => return Ok(None),
            }
        }
        let single = factors.len() == 1;

        // excursion-weight fixed point (monotone from zero)
        let nf = factors.len();
        let mut alphas = vec![mu_e; nf];
        let mut fps: Vec<HashMap<GroupElement, f64>> = vec![HashMap::new(); nf];
        if !single {
            let r = params.fixed_point_radius;
            let trunc = params.truncation.max(6 * r);
            let mut iter = 0usize;
            loop {
                let mut max_delta: f64 = 0.0;
                // first-passage values at support inverses under current alphas
                for i in 0..nf {
                    let lg = LocalGreen::compute(&factors[i], &steps[i], alphas[i], r, trunc)?;
                    let mut m = HashMap::new();
                    for (s, _) in &steps[i] {
                        let sinv = factors[i].invert(s)?;
                        m.insert(s.clone(), lg.first_passage(&sinv));
                    }
                    fps[i] = m;
                }
                for i in 0..nf {
                    let mut a = mu_e;
                    for (j, fp) in fps.iter().enumerate() {
                        if j == i {
                            continue;
                        }
                        for (s, p) in &steps[j] {
                            a += p * fp[s];
                        }
                    }
                    max_delta = max_delta.max((a - alphas[i]).abs());
                    alphas[i] = a;
                }
                iter += 1;
                if max_delta < params.fixed_point_tol {
                    break;
                }
                if iter > 500 {
                    return Err(Error::NoConvergence { residual: max_delta, iterations: iter });
                }
            }
        }

        // query-grade tables at the converged weights
        let mut tables = Vec::with_capacity(nf);
        let mut u_return = mu_e;
        let mut u_lower = mu_e;
        for i in 0..nf {
            let radius = initial_radius(&factors[i], params);
            let trunc = params.truncation.max(6 * radius);
            let lg = LocalGreen::compute(&factors[i], &steps[i], alphas[i], radius, trunc)?;
            for (s, p) in &steps[i] {
                let sinv = factors[i].invert(s)?;
                u_return += p * lg.first_passage(&sinv);
                u_lower += p * lg.value(&sinv) / (lg.value_at_origin() + lg.tail_bound());
            }
            tables.push(Mutex::new(lg));
        }

        Ok(Some(FactEngine {
            factors,
            alphas,
            tables,
            u_return,
            u_return_lower: u_lower,
            single,
        }))
    }

    fn green_ee(&self) -> f64 {
        if self.single {
            self.tables[0].lock().unwrap().value_at_origin()
        } else {
            1.0 / (1.0 - self.u_return)
        }
    }

    fn green_ee_lower(&self) -> f64 {
        if self.single {
            self.tables[0].lock().unwrap().value_at_origin()
        } else {
            1.0 / (1.0 - self.u_return_lower)
        }
    }

    /// log F(σ) in factor i, growing the table when needed.
    fn log_fp(&self, i: usize, sigma: &GroupElement) -> Result<f64> {
        let (v, o) = self.values(i, sigma)?;
        if v <= 0.0 {
            return Err(Error::Invalid(format!(
                "vanishing first passage at factor {i} syllable {sigma:?}"
            )));
        }
        Ok(v.ln() - o.ln())
    }

    /// (G_i(0,σ), G_i(0,0)) with on-demand radius growth.
    fn values(&self, i: usize, sigma: &GroupElement) -> Result<(f64, f64)> {
        let need = self.factors[i].word_length(sigma)? as u32;
        let mut guard = self.tables[i].lock().unwrap();
        if need > guard.radius() {
            *guard = guard.with_radius(need + 16)?;
        }
        Ok((guard.value(sigma), guard.value_at_origin()))
    }

    fn lower_fp(&self, i: usize, sigma: &GroupElement) -> Result<f64> {
        let need = self.factors[i].word_length(sigma)? as u32;
        let mut guard = self.tables[i].lock().unwrap();
        if need > guard.radius() {
            *guard = guard.with_radius(need + 16)?;
        }
        Ok(guard.value(sigma) / (guard.value_at_origin() + guard.tail_bound()))
    }

    fn log_green_e(&self, g: &GroupElement) -> Result<f64> {
        if self.single {
            let (v, _) = self.values(0, g)?;
            if v <= 0.0 {
                return Err(Error::OutsideBall(format!("no truncated mass at {g:?}")));
            }
            return Ok(v.ln());
        }
        let model_syls = syllables_of_models(&self.factors, g)?;
        let mut acc = self.green_ee().ln();
        for (i, sigma) in &model_syls {
            acc += self.log_fp(*i, sigma)?;
        }
        Ok(acc)
    }

    fn value_and_lower(&self, g: &GroupElement, _n: u32) -> Result<(f64, f64)> {
        if self.single {
            let (v, _) = self.values(0, g)?;
            return Ok((v, v));
        }
        let syls = syllables_of_models(&self.factors, g)?;
        let mut value = self.green_ee();
        let mut lower = self.green_ee_lower();
        for (i, sigma) in &syls {
            value *= self.log_fp(*i, sigma)?.exp();
            lower *= self.lower_fp(*i, sigma)?;
        }
        Ok((value, lower.min(value)))
    }
}

/// Initial query-table radius per factor; tables grow on demand, so this
/// only bounds the up-front work (Heisenberg balls grow like r⁴).
fn initial_radius(factor: &GroupModel, params: &GreenParams) -> u32 {
    match factor.kind() {
        ModelKind::Heisenberg => params.query_radius.min(8),
        ModelKind::FreeAbelian { rank } if *rank >= 2 => params.query_radius.min(32),
        _ => params.query_radius.max(48),
    }
}

/// Factor decomposition of a model, when the factorized engine applies.
fn factor_models(model: &GroupModel) -> Option<Vec<GroupModel>> {
    match model.kind() {
        ModelKind::FreeGroup { rank } => {
            let f = GroupModel::free_abelian(1).ok()?;
            Some(vec![f; *rank])
        }
        ModelKind::FreeProduct { factors } => Some(factors.clone()),
        ModelKind::FreeAbelian { .. } | ModelKind::Heisenberg | ModelKind::FiniteCyclic { .. } => {
            Some(vec![model.clone()])
        }
    }
}

/// (factor index, local element) when g is a single syllable.
fn single_syllable(model: &GroupModel, g: &GroupElement) -> Option<(usize, GroupElement)> {
    match (model.kind(), g) {
        (ModelKind::FreeGroup { .. }, GroupElement::Word(w)) => {
            let base = w.first()?.unsigned_abs();
            if w.iter().all(|l| l.unsigned_abs() == base) {
                let exp: i64 = w.iter().map(|l| if *l > 0 { 1 } else { -1 }).sum();
                Some((base as usize - 1, GroupElement::Vector(vec![exp])))
            } else {
                None
            }
        }
        (ModelKind::FreeProduct { .. }, GroupElement::Product(s)) => {
            if s.len() == 1 {
                Some((s[0].0 as usize, s[0].1.clone()))
            } else {
                None
            }
        }
        (ModelKind::FreeAbelian { .. }, _)
        | (ModelKind::Heisenberg, _)
        | (ModelKind::FiniteCyclic { .. }, _) => Some((0, g.clone())),
        _ => None,
    }
}

/// Factor-indexed syllable decomposition of an arbitrary element.
pub(super) fn syllables_of(model: &GroupModel, g: &GroupElement) -> Result<Vec<(usize, GroupElement)>> {
    let factors = factor_models(model)
        .ok_or_else(|| Error::Invalid("model has no factor decomposition".into()))?;
    syllables_of_models(&factors, g)
}

fn syllables_of_models(
    factors: &[GroupModel],
    g: &GroupElement,
) -> Result<Vec<(usize, GroupElement)>> {
    match g {
        GroupElement::Word(w) => {
            // maximal runs of one generator are the ℤ-factor syllables
            let mut out = Vec::new();
            let mut i = 0usize;
            while i < w.len() {
                let base = w[i].unsigned_abs();
                let mut exp = 0i64;
                while i < w.len() && w[i].unsigned_abs() == base {
                    exp += if w[i] > 0 { 1 } else { -1 };
                    i += 1;
                }
                out.push((base as usize - 1, GroupElement::Vector(vec![exp])));
            }
            Ok(out)
        }
        GroupElement::Product(s) => Ok(s.iter().map(|(i, e)| (*i as usize, e.clone())).collect()),
        other => {
            if factors.len() == 1 {
                if other.is_identity() {
                    Ok(Vec::new())
                } else {
                    Ok(vec![(0, other.clone())])
                }
            } else {
                Err(Error::ModelMismatch("expected a free-product normal form".into()))
            }
        }
    }
}

/// Spectral radius heuristic from radius-capped convolution powers.
fn rho_hat(measure: &SparseMeasure, radius_cap: u32, max_n: u32) -> Result<(f64, u32)> {
    let model = measure.model().clone();
    let e = model.identity();
    let mut cur: HashMap<GroupElement, f64> = HashMap::new();
    cur.insert(e.clone(), 1.0);
    let support: Vec<(GroupElement, f64)> = measure.iter().map(|(g, p)| (g, *p)).collect();
    let cap = 400_000usize;
    let mut best = (0.5f64, 0u32);
    for n in 1..=max_n {
        let mut next: HashMap<GroupElement, f64> = HashMap::with_capacity(cur.len() * 2);
        for (x, p) in &cur {
            for (s, q) in &support {
                let y = model.compose(x, s)?;
                if model.word_length(&y)? <= radius_cap as u64 {
                    *next.entry(y).or_insert(0.0) += p * q;
                }
            }
        }
        if next.len() > cap {
            break;
        }
        cur = next;
        let pe = cur.get(&e).copied().unwrap_or(0.0);
        if n % 2 == 0 && pe > 0.0 {
            best = (pe.powf(1.0 / n as f64), n);
        }
    }
    Ok(best)
}

/// Cumulative truncated Green table over a radius-capped ball.
struct DirectTable {
    truncation: u32,
    cumulative: HashMap<GroupElement, f64>,
    last: HashMap<GroupElement, f64>,
    dropped_mass: f64,
}

impl DirectTable {
    fn build(measure: &SparseMeasure, truncation: u32, radius_cap: u32) -> Result<DirectTable> {
        let model = measure.model().clone();
        let support: Vec<(GroupElement, f64)> = measure.iter().map(|(g, p)| (g, *p)).collect();
        let cap = model.element_cap();
        let mut cur: HashMap<GroupElement, f64> = HashMap::new();
        cur.insert(model.identity(), 1.0);
        let mut cumulative = cur.clone();
        let mut dropped = 0.0;
        for n in 1..=truncation {
            let mut next: HashMap<GroupElement, f64> = HashMap::with_capacity(cur.len() * 2);
            for (x, p) in &cur {
                for (s, q) in &support {
                    let y = model.compose(x, s)?;
                    if model.word_length(&y)? <= radius_cap as u64 {
                        *next.entry(y).or_insert(0.0) += p * q;
                    } else {
                        dropped += p * q;
                    }
                }
            }
            if next.len() > cap {
                return Err(Error::SupportBlowup { order: n, size: next.len(), cap });
            }
            for (g, p) in &next {
                *cumulative.entry(g.clone()).or_insert(0.0) += p;
            }
            let total: f64 = next.values().sum();
            cur = next;
            if total < 1e-17 {
                break;
            }
        }
        Ok(DirectTable { truncation, cumulative, last: cur, dropped_mass: dropped })
    }

    fn cumulative(&self, g: &GroupElement) -> f64 {
        self.cumulative.get(g).copied().unwrap_or(0.0)
    }

    fn last_term(&self, g: &GroupElement) -> f64 {
        self.last.get(g).copied().unwrap_or(0.0)
    }
}
