//! Word distance to parabolic cosets hΓᵢ in free products.

use super::{GroupElement, GroupModel, ModelKind};
use crate::error::{Error, Result};

/// `d_w(g, hΓᵢ)` for an adapted free-product metric. With u = h⁻¹g in normal
/// form this is ‖u‖ minus the length of its leading Γᵢ-syllable (zero when g
/// lies in the coset).
pub fn coset_distance(
    model: &GroupModel,
    g: &GroupElement,
    coset_rep: &GroupElement,
    factor: usize,
) -> Result<u64> {
    let ModelKind::FreeProduct { factors } = model.kind() else {
        return Err(Error::NoPeripherals(format!(
            "{:?} is not a free product",
            model.kind()
        )));
    };
    if factor >= factors.len() {
        return Err(Error::Invalid(format!(
            "factor index {factor} out of range ({} factors)",
            factors.len()
        )));
    }
    let u = model.compose(&model.invert(coset_rep)?, g)?;
    let GroupElement::Product(syls) = &u else {
        return Err(Error::ModelMismatch("free product element expected".into()));
    };
    let mut total = model.word_length(&u)?;
    if let Some((idx, first)) = syls.first() {
        if *idx as usize == factor {
            total -= factors[factor].word_length(first)?;
        }
    }
    Ok(total)
}
