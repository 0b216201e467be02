//! Group models, canonical normal forms and word metrics.
//!
//! Supported families: free groups, free abelian groups, the discrete
//! Heisenberg group, finite cyclic groups, and free products of these.
//! Elements are kept in a unique normal form per model; all operations are
//! pure and models share internal distance caches through an `Arc`.

mod ball;
mod coset;
mod element;
mod geodesic;
mod heis;

pub use ball::CayleyBall;
pub use coset::coset_distance;
pub use element::GroupElement;
pub use geodesic::{geodesics, midpoint_count, midpoints, GeodesicSet};

use crate::error::{Error, Result};
use std::sync::{Arc, Mutex};

/// Default cap on elements held by ball-like enumerations.
pub const DEFAULT_ELEMENT_CAP: usize = 10_000_000;

/// Which group a model describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelKind {
    FreeGroup { rank: usize },
    FreeAbelian { rank: usize },
    Heisenberg,
    FiniteCyclic { order: u64 },
    FreeProduct { factors: Vec<GroupModel> },
}

/// A symbolic generator. `letter` is the signed 1-based generator index;
/// negative letters are formal inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub letter: i16,
}

/// A group together with an ordered generating set closed under inversion.
#[derive(Debug, Clone)]
pub struct GroupModel {
    kind: ModelKind,
    generators: Vec<Generator>,
    adapted: bool,
    element_cap: usize,
    caches: Arc<ModelCaches>,
}

#[derive(Debug, Default)]
struct ModelCaches {
    heis_dist: Mutex<heis::HeisDist>,
}

impl PartialEq for GroupModel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.generators == other.generators
    }
}
impl Eq for GroupModel {}

impl GroupModel {
    pub fn free_group(rank: usize) -> Result<Self> {
        if rank < 1 {
            return Err(Error::Invalid("free group rank must be >= 1".into()));
        }
        Self::with_kind(ModelKind::FreeGroup { rank })
    }

    pub fn free_abelian(rank: usize) -> Result<Self> {
        if rank < 1 {
            return Err(Error::Invalid("free abelian rank must be >= 1".into()));
        }
        Self::with_kind(ModelKind::FreeAbelian { rank })
    }

    pub fn heisenberg() -> Self {
        Self::with_kind(ModelKind::Heisenberg).expect("heisenberg model")
    }

    pub fn finite_cyclic(order: u64) -> Result<Self> {
        if order < 2 {
            return Err(Error::Invalid("cyclic order must be >= 2".into()));
        }
        Self::with_kind(ModelKind::FiniteCyclic { order })
    }

    /// Free product of the given factors with the adapted generating set
    /// (the union of the factor generating sets). Nested free products are
    /// rejected; flatten them at construction instead.
    pub fn free_product(factors: Vec<GroupModel>) -> Result<Self> {
        if factors.len() < 2 {
            return Err(Error::Invalid("free product needs >= 2 factors".into()));
        }
        for f in &factors {
            if matches!(f.kind, ModelKind::FreeProduct { .. }) {
                return Err(Error::Invalid("nested free products are not supported".into()));
            }
        }
        Self::with_kind(ModelKind::FreeProduct { factors })
    }

    fn with_kind(kind: ModelKind) -> Result<Self> {
        let generators = build_generators(&kind);
        let adapted = matches!(kind, ModelKind::FreeProduct { .. });
        Ok(GroupModel {
            kind,
            generators,
            adapted,
            element_cap: DEFAULT_ELEMENT_CAP,
            caches: Arc::new(ModelCaches::default()),
        })
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Ordered generating set, closed under formal inversion.
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// True when the generating set is a union of factor generating sets.
    pub fn adapted(&self) -> bool {
        self.adapted
    }

    pub fn element_cap(&self) -> usize {
        self.element_cap
    }

    pub fn with_element_cap(mut self, cap: usize) -> Self {
        self.element_cap = cap;
        self
    }

    pub fn identity(&self) -> GroupElement {
        element::identity(&self.kind)
    }

    /// The group element of a single signed generator letter.
    pub fn generator_element(&self, letter: i16) -> Result<GroupElement> {
        element::from_letter(&self.kind, letter)
    }

    /// Evaluate a word given as signed generator letters.
    pub fn element_from_letters(&self, letters: &[i16]) -> Result<GroupElement> {
        let mut acc = self.identity();
        for &l in letters {
            acc = self.compose(&acc, &self.generator_element(l)?)?;
        }
        Ok(acc)
    }

    /// Parse a word like `"abA"` or `"a^3 B"`: lowercase letters are
    /// generators in order, uppercase letters their inverses. The bare word
    /// `"e"` denotes the identity for models with fewer than five base
    /// generators.
    pub fn parse_word(&self, word: &str) -> Result<GroupElement> {
        let max_base = self
            .generators
            .iter()
            .map(|g| g.letter.unsigned_abs() as usize)
            .max()
            .unwrap_or(1);
        if word.trim().is_empty() || (word.trim() == "e" && max_base < 5) {
            return Ok(self.identity());
        }
        let letters = parse_letters(word, max_base)?;
        self.element_from_letters(&letters)
    }

    /// Canonical product of two elements of this model.
    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        element::check_model(&self.kind, a)?;
        element::check_model(&self.kind, b)?;
        Ok(element::compose(&self.kind, a, b))
    }

    pub fn invert(&self, a: &GroupElement) -> Result<GroupElement> {
        element::check_model(&self.kind, a)?;
        Ok(element::invert(&self.kind, a))
    }

    pub fn power(&self, a: &GroupElement, n: i64) -> Result<GroupElement> {
        let base = if n < 0 { self.invert(a)? } else { a.clone() };
        let mut acc = self.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.compose(&acc, &base)?;
        }
        Ok(acc)
    }

    /// Word length `‖g‖` for the model generating set. Closed forms are used
    /// for free, abelian, cyclic and adapted free-product normal forms; the
    /// Heisenberg length comes from a cached breadth-first search.
    pub fn word_length(&self, g: &GroupElement) -> Result<u64> {
        element::check_model(&self.kind, g)?;
        self.word_length_inner(&self.kind, g)
    }

    fn word_length_inner(&self, kind: &ModelKind, g: &GroupElement) -> Result<u64> {
        match (kind, g) {
            (ModelKind::FreeGroup { .. }, GroupElement::Word(w)) => Ok(w.len() as u64),
            (ModelKind::FreeAbelian { .. }, GroupElement::Vector(v)) => {
                Ok(v.iter().map(|x| x.unsigned_abs()).sum())
            }
            (ModelKind::FiniteCyclic { order }, GroupElement::Cyclic(r)) => {
                Ok((*r).min(order - r))
            }
            (ModelKind::Heisenberg, GroupElement::Heis(p, q, r)) => {
                let mut cache = self.caches.heis_dist.lock().unwrap();
                cache.distance(*p, *q, *r, self.element_cap)
            }
            (ModelKind::FreeProduct { factors }, GroupElement::Product(syls)) => {
                let mut total = 0u64;
                for (idx, s) in syls {
                    let f = &factors[*idx as usize];
                    total += f.word_length_inner(&f.kind, s)?;
                }
                Ok(total)
            }
            _ => Err(Error::ModelMismatch(format!("{g:?} does not belong to {:?}", kind))),
        }
    }

    /// Word distance `d_w(x, y) = ‖x⁻¹y‖`.
    pub fn distance(&self, x: &GroupElement, y: &GroupElement) -> Result<u64> {
        let d = self.compose(&self.invert(x)?, y)?;
        self.word_length(&d)
    }

    /// Exact Cayley ball of the given radius (BFS in generator order).
    pub fn cayley_ball(&self, radius: u32) -> Result<CayleyBall> {
        ball::cayley_ball(self, radius, self.element_cap)
    }

    /// Like [`cayley_ball`] but returns the partial ball on budget overrun.
    pub fn cayley_ball_partial(&self, radius: u32) -> CayleyBall {
        ball::cayley_ball_partial(self, radius, self.element_cap)
    }

    /// Volume growth `v = lim log(b_n)/n`, in closed form where possible,
    /// otherwise via the free-product growth-series functional equation.
    pub fn volume_growth(&self) -> f64 {
        growth::volume_growth(self)
    }

    /// Sphere sizes s_0..s_radius without enumerating elements (closed forms
    /// and the growth-series identity; float-valued).
    pub fn sphere_series(&self, radius: u32) -> Vec<f64> {
        growth::sphere_series(self, radius as usize)
    }

    /// Factors of a free product; empty for other models.
    pub fn factors(&self) -> &[GroupModel] {
        match &self.kind {
            ModelKind::FreeProduct { factors } => factors,
            _ => &[],
        }
    }

    /// Map a global generator letter to `(factor index, local letter)` for
    /// free products.
    pub fn letter_to_factor(&self, letter: i16) -> Option<(usize, i16)> {
        element::letter_to_factor(&self.kind, letter)
    }

    /// Heisenberg sphere sizes for n <= radius (used by the growth series).
    pub(crate) fn heis_sphere_sizes(&self, radius: u32) -> Result<Vec<u64>> {
        let mut cache = self.caches.heis_dist.lock().unwrap();
        cache.sphere_sizes(radius, self.element_cap)
    }
}

fn build_generators(kind: &ModelKind) -> Vec<Generator> {
    fn letter_name(i: usize, inverse: bool) -> String {
        let c = (b'a' + (i % 26) as u8) as char;
        let mut s: String = if inverse {
            c.to_ascii_uppercase().to_string()
        } else {
            c.to_string()
        };
        if i >= 26 {
            s.push_str(&format!("{}", i / 26));
        }
        s
    }
    let pair = |i: usize| {
        vec![
            Generator { name: letter_name(i, false), letter: (i as i16) + 1 },
            Generator { name: letter_name(i, true), letter: -((i as i16) + 1) },
        ]
    };
    match kind {
        ModelKind::FreeGroup { rank } | ModelKind::FreeAbelian { rank } => {
            (0..*rank).flat_map(pair).collect()
        }
        ModelKind::Heisenberg => (0..2).flat_map(pair).collect(),
        ModelKind::FiniteCyclic { order } => {
            if *order == 2 {
                vec![Generator { name: "a".into(), letter: 1 }]
            } else {
                pair(0)
            }
        }
        ModelKind::FreeProduct { factors } => {
            let mut out = Vec::new();
            let mut next = 0usize;
            for f in factors {
                for g in &f.generators {
                    let local = g.letter.unsigned_abs() as usize - 1;
                    let global = next + local;
                    out.push(Generator {
                        name: letter_name(global, g.letter < 0),
                        letter: if g.letter < 0 { -((global as i16) + 1) } else { (global as i16) + 1 },
                    });
                }
                next += f.generators.iter().map(|g| g.letter.unsigned_abs() as usize).max().unwrap_or(0);
            }
            out
        }
    }
}

fn parse_letters(word: &str, max_base: usize) -> Result<Vec<i16>> {
    let mut out = Vec::new();
    let chars: Vec<char> = word.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        i += 1;
        if c.is_whitespace() || c == '*' || c == '.' {
            continue;
        }
        let (base, inv) = if c.is_ascii_lowercase() {
            ((c as u8 - b'a') as usize, false)
        } else if c.is_ascii_uppercase() {
            ((c as u8 - b'A') as usize, true)
        } else {
            return Err(Error::Invalid(format!("bad character {c:?} in word {word:?}")));
        };
        if base >= max_base {
            return Err(Error::Invalid(format!("letter {c:?} outside the generating set")));
        }
        let mut pow: i64 = 1;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let start = i;
            if i < chars.len() && chars[i] == '-' {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            pow = word[start..i.min(word.len())]
                .parse::<i64>()
                .map_err(|_| Error::Invalid(format!("bad exponent in {word:?}")))?;
        }
        let letter = if inv { -((base as i16) + 1) } else { (base as i16) + 1 };
        let (letter, pow) = if pow < 0 { (-letter, -pow) } else { (letter, pow) };
        for _ in 0..pow {
            out.push(letter);
        }
    }
    Ok(out)
}

mod growth;

#[cfg(test)]
mod tests;
