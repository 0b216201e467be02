//! Abelianization polytopes, facet generating subsets, commuting pairs
//! positive in a facet, and the midpoint-growth experiment they drive.

mod hull;
mod walsh;

pub use hull::{generator_polytope, Facet, FacetData};
pub use walsh::{midpoint_growth, verify_facet_geodesic, walsh_pair, MidpointGrowth, WalshPair};

/// Homogeneous dimension Σ n·rank(Γⁿ/Γⁿ⁺¹) of a nilpotent group from its
/// lower-central-series ranks.
pub fn homogeneous_dimension(ranks: &[u64]) -> u64 {
    ranks
        .iter()
        .enumerate()
        .map(|(i, r)| (i as u64 + 1) * r)
        .sum()
}

#[cfg(test)]
mod tests;
