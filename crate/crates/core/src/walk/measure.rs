//! Finitely supported probability measures and exact sparse convolution.
//!
//! Atoms are keyed by canonical element bytes and kept sorted, so float-mode
//! convolution is bit-reproducible run to run; the rational mode uses exact
//! arithmetic and conserves mass identically.

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupModel};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;

pub trait WeightScalar: Clone + PartialEq {
    fn zero() -> Self;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
}

impl WeightScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl WeightScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn to_f64(&self) -> f64 {
        let num = self.numer();
        let den = self.denom();
        rational_to_f64(num, den)
    }
}

fn rational_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    num.to_f64().unwrap_or(f64::NAN) / den.to_f64().unwrap_or(f64::NAN)
}

/// Mass tolerance for float-mode probability measures.
pub const MASS_TOL: f64 = 1e-12;

/// A finitely supported measure with sorted canonical-byte keys.
#[derive(Debug, Clone)]
pub struct Measure<T: WeightScalar> {
    model: GroupModel,
    atoms: Vec<(Box<[u8]>, T)>,
    generation: u32,
}

pub type SparseMeasure = Measure<f64>;
pub type RationalMeasure = Measure<BigRational>;

impl<T: WeightScalar> Measure<T> {
    pub fn model(&self) -> &GroupModel {
        &self.model
    }

    /// Convolution-power index n for μ*ⁿ (1 for a base measure).
    pub fn generation(&self) -> u32 {
        self.generation
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|(_, p)| p.to_f64()).sum()
    }

    pub fn value(&self, g: &GroupElement) -> Option<&T> {
        let key = g.encode();
        self.atoms
            .binary_search_by(|(k, _)| k.as_ref().cmp(key.as_slice()))
            .ok()
            .map(|i| &self.atoms[i].1)
    }

    pub fn prob(&self, g: &GroupElement) -> f64 {
        self.value(g).map(|p| p.to_f64()).unwrap_or(0.0)
    }

    /// Atoms in canonical key order.
    pub fn iter(&self) -> impl Iterator<Item = (GroupElement, &T)> + '_ {
        self.atoms
            .iter()
            .map(|(k, p)| (GroupElement::decode(k).expect("stored key decodes"), p))
    }

    fn from_sorted(model: GroupModel, atoms: Vec<(Box<[u8]>, T)>, generation: u32) -> Self {
        Measure { model, atoms, generation }
    }

    /// Exact sparse convolution (self * other).
    pub fn convolve(&self, other: &Measure<T>) -> Result<Measure<T>> {
        if self.model != other.model {
            return Err(Error::ModelMismatch("convolving measures over different models".into()));
        }
        let cap = self.model.element_cap();
        let inner: Vec<(GroupElement, T)> = other
            .atoms
            .iter()
            .map(|(k, p)| (GroupElement::decode(k).expect("key"), p.clone()))
            .collect();
        let mut acc: HashMap<Box<[u8]>, T> = HashMap::with_capacity(self.atoms.len() * 2);
        let mut buf = Vec::with_capacity(24);
        for (key, p) in &self.atoms {
            let g = GroupElement::decode(key).expect("key");
            for (s, q) in &inner {
                let prod = self.model.compose(&g, s)?;
                buf.clear();
                prod.encode_into(&mut buf);
                let w = p.mul(q);
                match acc.get_mut(buf.as_slice()) {
                    Some(slot) => slot.add_assign(&w),
                    None => {
                        acc.insert(buf.clone().into_boxed_slice(), w);
                    }
                }
            }
        }
        if acc.len() > cap {
            return Err(Error::SupportBlowup {
                order: self.generation + other.generation,
                size: acc.len(),
                cap,
            });
        }
        let mut atoms: Vec<(Box<[u8]>, T)> = acc.into_iter().collect();
        atoms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Ok(Measure::from_sorted(
            self.model.clone(),
            atoms,
            self.generation + other.generation,
        ))
    }

    /// n-th convolution power μ*ⁿ.
    pub fn convolve_power(&self, n: u32) -> Result<Measure<T>> {
        if n == 0 {
            return Err(Error::Invalid("convolution power must be >= 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.convolve(self)?;
        }
        Ok(acc)
    }

    /// All powers μ*¹..μ*ⁿ (cheaper than separate calls).
    pub fn powers_upto(&self, n: u32) -> Result<Vec<Measure<T>>> {
        let mut out = Vec::with_capacity(n as usize);
        out.push(self.clone());
        for _ in 1..n {
            let next = out.last().unwrap().convolve(self)?;
            out.push(next);
        }
        Ok(out)
    }
}

impl SparseMeasure {
    /// Build from (element, probability) pairs; probabilities must be
    /// positive and sum to 1 within [`MASS_TOL`].
    pub fn from_atoms(model: GroupModel, atoms: Vec<(GroupElement, f64)>) -> Result<Self> {
        build_measure(model, atoms, |mass| (mass - 1.0).abs() <= MASS_TOL)
    }

    /// Point mass at g.
    pub fn dirac(model: GroupModel, g: GroupElement) -> Result<Self> {
        Self::from_atoms(model, vec![(g, 1.0)])
    }

    /// Uniform measure on the model's generating set (the simple random walk).
    pub fn uniform_generators(model: GroupModel) -> Result<Self> {
        let gens = model.generators().to_vec();
        let p = 1.0 / gens.len() as f64;
        let atoms = gens
            .iter()
            .map(|g| Ok((model.generator_element(g.letter)?, p)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_atoms(model, atoms)
    }

    /// Laziness transform μ → ½δ_e + ½μ (guarantees aperiodicity).
    pub fn lazy(&self) -> Result<Self> {
        let mut atoms: Vec<(GroupElement, f64)> =
            self.iter().map(|(g, p)| (g, 0.5 * p)).collect();
        atoms.push((self.model.identity(), 0.5));
        Self::from_atoms(self.model.clone(), atoms)
    }

    /// Shannon entropy H(μ) in nats.
    pub fn entropy(&self) -> f64 {
        self.atoms
            .iter()
            .map(|(_, p)| if *p > 0.0 { -p * p.ln() } else { 0.0 })
            .sum()
    }

    /// Expected word length L(μ).
    pub fn drift(&self) -> Result<f64> {
        let mut acc = 0.0;
        for (g, p) in self.iter() {
            acc += p * self.model.word_length(&g)? as f64;
        }
        Ok(acc)
    }

    /// Expectation of an element functional.
    pub fn expect(&self, mut f: impl FnMut(&GroupElement) -> Result<f64>) -> Result<f64> {
        let mut acc = 0.0;
        for (g, p) in self.iter() {
            acc += p * f(&g)?;
        }
        Ok(acc)
    }

    /// Checks that the support generates the model as a semigroup, by
    /// closing under right multiplication within the ball of `horizon`.
    /// Errors with an unreachable element otherwise.
    pub fn check_admissible(&self, horizon: u32) -> Result<()> {
        let ball = self.model.cayley_ball(horizon)?;
        let support: Vec<GroupElement> = self.iter().map(|(g, _)| g).collect();
        let mut reached: std::collections::HashSet<GroupElement> =
            std::collections::HashSet::new();
        reached.insert(self.model.identity());
        let mut frontier = vec![self.model.identity()];
        while let Some(x) = frontier.pop() {
            for s in &support {
                let y = self.model.compose(&x, s)?;
                if ball.contains(&y) && reached.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        for g in ball.elements() {
            if !reached.contains(g) {
                return Err(Error::NotAdmissible {
                    horizon,
                    unreachable: format!("{g:?}"),
                });
            }
        }
        Ok(())
    }

    /// Exact-rational copy of this measure (probabilities converted through
    /// their binary float representation).
    pub fn to_rational(&self) -> RationalMeasure {
        let atoms = self
            .atoms
            .iter()
            .map(|(k, p)| {
                (
                    k.clone(),
                    BigRational::from_float(*p).unwrap_or_else(BigRational::one),
                )
            })
            .collect();
        Measure::from_sorted(self.model.clone(), atoms, self.generation)
    }
}

impl RationalMeasure {
    pub fn from_rational_atoms(
        model: GroupModel,
        atoms: Vec<(GroupElement, BigRational)>,
    ) -> Result<Self> {
        let mass: BigRational = atoms.iter().map(|(_, p)| p.clone()).fold(Zero::zero(), |a, b| a + b);
        if !mass.is_one() {
            return Err(Error::Invalid(format!("rational measure mass {mass} != 1")));
        }
        let mut keyed: Vec<(Box<[u8]>, BigRational)> = atoms
            .into_iter()
            .map(|(g, p)| (g.encode().into_boxed_slice(), p))
            .collect();
        keyed.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| {
            if a.0 == b.0 {
                let v = a.1.clone();
                b.1 += v;
                true
            } else {
                false
            }
        });
        Ok(Measure::from_sorted(model, keyed, 1))
    }

    /// Uniform rational measure on the generating set.
    pub fn uniform_generators(model: GroupModel) -> Result<Self> {
        let gens = model.generators().to_vec();
        let p = BigRational::new(BigInt::from(1), BigInt::from(gens.len() as i64));
        let atoms = gens
            .iter()
            .map(|g| Ok((model.generator_element(g.letter)?, p.clone())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rational_atoms(model, atoms)
    }

    /// Exact total mass (should be exactly 1 for any convolution power).
    pub fn rational_mass(&self) -> BigRational {
        self.atoms
            .iter()
            .map(|(_, p)| p.clone())
            .fold(Zero::zero(), |a, b| a + b)
    }
}

fn build_measure(
    model: GroupModel,
    atoms: Vec<(GroupElement, f64)>,
    mass_ok: impl Fn(f64) -> bool,
) -> Result<SparseMeasure> {
    let mut keyed: Vec<(Box<[u8]>, f64)> = Vec::with_capacity(atoms.len());
    let mut mass = 0.0;
    for (g, p) in atoms {
        if !(p > 0.0) {
            return Err(Error::Invalid(format!("non-positive probability {p} at {g:?}")));
        }
        mass += p;
        keyed.push((g.encode().into_boxed_slice(), p));
    }
    if !mass_ok(mass) {
        return Err(Error::Invalid(format!("measure mass {mass} is not 1")));
    }
    keyed.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| {
        if a.0 == b.0 {
            b.1 += a.1;
            true
        } else {
            false
        }
    });
    Ok(Measure::from_sorted(model, keyed, 1))
}
