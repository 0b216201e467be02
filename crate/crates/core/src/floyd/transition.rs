//! (ε,η)-deep and transition points of word geodesics relative to the
//! parabolic cosets of a free product.

use crate::error::{Error, Result};
use crate::group::{coset_distance, GroupElement, GroupModel, ModelKind};

/// Parabolic data: which free factors count as peripheral subgroups.
#[derive(Debug, Clone)]
pub struct PeripheralStructure {
    /// Indices of parabolic factors; empty for models treated as hyperbolic.
    pub factors: Vec<usize>,
    pub epsilon: u64,
    pub eta: u64,
}

impl PeripheralStructure {
    /// Default structure: non-elementary polynomial-growth factors
    /// (abelian of rank ≥ 2, Heisenberg) are parabolic; free models have no
    /// peripherals.
    pub fn for_model(model: &GroupModel, epsilon: u64, eta: u64) -> Result<PeripheralStructure> {
        if epsilon == 0 || eta == 0 {
            return Err(Error::Invalid("need ε, η > 0".into()));
        }
        let factors = match model.kind() {
            ModelKind::FreeProduct { factors } => factors
                .iter()
                .enumerate()
                .filter(|(_, f)| match f.kind() {
                    ModelKind::FreeAbelian { rank } => *rank >= 2,
                    ModelKind::Heisenberg => true,
                    _ => false,
                })
                .map(|(i, _)| i)
                .collect(),
            _ => Vec::new(),
        };
        Ok(PeripheralStructure { factors, epsilon, eta })
    }

    pub fn with_factors(mut self, factors: Vec<usize>) -> Self {
        self.factors = factors;
        self
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexLabel {
    /// The η-window around the vertex stays in N_ε of this coset.
    Deep { factor: usize, coset: GroupElement },
    Transition,
}

/// Representative of the coset vΓ_f: v with its trailing f-syllable dropped.
fn coset_rep(model: &GroupModel, v: &GroupElement, factor: usize) -> Result<GroupElement> {
    if let GroupElement::Product(syls) = v {
        if let Some((idx, _)) = syls.last() {
            if *idx as usize == factor {
                let mut trimmed = syls.clone();
                trimmed.pop();
                return Ok(GroupElement::Product(trimmed));
            }
        }
        return Ok(v.clone());
    }
    Err(Error::NoPeripherals(format!("{:?} has no coset structure", model.kind())))
}

/// Label every vertex of a word geodesic as (ε,η)-deep in some parabolic
/// coset or as a transition point. Entry and exit vertices of each coset
/// neighborhood are always transition points. With empty peripherals every
/// vertex is a transition point.
pub fn classify_transition_points(
    model: &GroupModel,
    peripherals: &PeripheralStructure,
    vertices: &[GroupElement],
) -> Result<Vec<VertexLabel>> {
    let n = vertices.len();
    if peripherals.is_empty() {
        return Ok(vec![VertexLabel::Transition; n]);
    }
    if !matches!(model.kind(), ModelKind::FreeProduct { .. }) {
        return Err(Error::NoPeripherals(
            "transition classification needs a free-product model or empty peripherals".into(),
        ));
    }
    let eps = peripherals.epsilon;
    let eta = peripherals.eta as usize;

    // per-coset membership profiles along α: first mark deep windows, then
    // force entry/exit vertices of every coset neighborhood to transition
    let mut labels = vec![VertexLabel::Transition; n];
    let mut forced_transition = vec![false; n];
    for &f in &peripherals.factors {
        let mut cosets: Vec<GroupElement> = Vec::new();
        for v in vertices {
            let c = coset_rep(model, v, f)?;
            if !cosets.contains(&c) {
                cosets.push(c);
            }
        }
        for coset in cosets {
            let near: Vec<bool> = vertices
                .iter()
                .map(|v| Ok(coset_distance(model, v, &coset, f)? <= eps))
                .collect::<Result<Vec<bool>>>()?;
            // deep: the whole η-window (clipped to the segment) stays near
            for i in 0..n {
                let lo = i.saturating_sub(eta);
                let hi = (i + eta).min(n - 1);
                if (lo..=hi).all(|j| near[j]) {
                    labels[i] = VertexLabel::Deep { factor: f, coset: coset.clone() };
                }
            }
            // entry and exit vertices of each maximal run
            let mut run_start: Option<usize> = None;
            for i in 0..=n {
                let inside = i < n && near[i];
                match (inside, run_start) {
                    (true, None) => run_start = Some(i),
                    (false, Some(s)) => {
                        forced_transition[s] = true;
                        forced_transition[i - 1] = true;
                        run_start = None;
                    }
                    _ => {}
                }
            }
        }
    }
    for (i, forced) in forced_transition.iter().enumerate() {
        if *forced {
            labels[i] = VertexLabel::Transition;
        }
    }
    Ok(labels)
}
