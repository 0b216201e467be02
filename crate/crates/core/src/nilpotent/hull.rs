//! Convex hulls of generator images under the abelianization map, with
//! facet extraction in dimensions 2 and 3.

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupModel, ModelKind};

/// A facet of the generator polytope: the supporting functional f with
/// f ≡ 1 on the facet, and the generator letters mapped onto it.
#[derive(Debug, Clone)]
pub struct Facet {
    /// Rational supporting functional as (numerators, common denominator):
    /// f(u) = ⟨num, u⟩ / den.
    pub normal_num: Vec<i64>,
    pub den: i64,
    /// Positive generator letters whose images lie on the facet.
    pub generators: Vec<i16>,
    /// Images of those generators.
    pub points: Vec<Vec<i64>>,
}

impl Facet {
    /// f(u) as a rational evaluated in exact integer arithmetic times den.
    pub fn eval_num(&self, u: &[i64]) -> i64 {
        self.normal_num.iter().zip(u).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone)]
pub struct FacetData {
    pub rank: usize,
    /// (generator letter, abelianized image) for every generator.
    pub images: Vec<(i16, Vec<i64>)>,
    /// Hull vertices in deterministic order.
    pub vertices: Vec<Vec<i64>>,
    pub facets: Vec<Facet>,
}

/// Abelianized image of a generator letter of the designated nilpotent
/// model (Heisenberg → ℤ² by (p,q,r) ↦ (p,q); free abelian → itself).
fn abelianize(model: &GroupModel, letter: i16) -> Result<Vec<i64>> {
    let g = model.generator_element(letter)?;
    match (model.kind(), &g) {
        (ModelKind::Heisenberg, GroupElement::Heis(p, q, _)) => Ok(vec![*p, *q]),
        (ModelKind::FreeAbelian { .. }, GroupElement::Vector(v)) => Ok(v.clone()),
        _ => Err(Error::Invalid(format!(
            "no abelianization map for {:?}",
            model.kind()
        ))),
    }
}

/// The polytope Conv(φ(S₁)) of the abelianized generating set, with facets.
/// Supports rank 2 and 3; rank < 2 is rejected (no facet pair construction
/// is possible there).
pub fn generator_polytope(model: &GroupModel) -> Result<FacetData> {
    let rank = match model.kind() {
        ModelKind::Heisenberg => 2,
        ModelKind::FreeAbelian { rank } => *rank,
        other => {
            return Err(Error::Invalid(format!(
                "no designated nilpotent structure on {other:?}"
            )))
        }
    };
    if rank < 2 {
        return Err(Error::Invalid(
            "abelianization rank 1 < 2: the facet construction needs rank at least 2".into(),
        ));
    }
    if rank > 3 {
        return Err(Error::Invalid(format!("rank {rank} > 3 is unsupported")));
    }
    let images: Vec<(i16, Vec<i64>)> = model
        .generators()
        .iter()
        .map(|g| Ok((g.letter, abelianize(model, g.letter)?)))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<Vec<i64>> = {
        let mut pts: Vec<Vec<i64>> = images.iter().map(|(_, v)| v.clone()).collect();
        pts.sort();
        pts.dedup();
        pts
    };
    let (vertices, facets) = if rank == 2 {
        hull_2d(&points, &images)
    } else {
        hull_3d(&points, &images)?
    };
    Ok(FacetData { rank, images, vertices, facets })
}

/// Monotone-chain hull with edge facets (dimension 2).
fn hull_2d(points: &[Vec<i64>], images: &[(i16, Vec<i64>)]) -> (Vec<Vec<i64>>, Vec<Facet>) {
    let mut pts: Vec<(i64, i64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort();
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| -> i64 {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let hull: Vec<(i64, i64)> = lower.into_iter().chain(upper).collect();
    let vertices: Vec<Vec<i64>> = hull.iter().map(|&(x, y)| vec![x, y]).collect();
    let mut facets = Vec::new();
    let n = hull.len();
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        // supporting line ⟨normal, u⟩ = den with outward normal
        let normal = (a.1 - b.1, b.0 - a.0);
        let den = normal.0 * a.0 + normal.1 * a.1;
        let (normal, den) = if den < 0 {
            ((-normal.0, -normal.1), -den)
        } else {
            (normal, den)
        };
        if den == 0 {
            continue; // facet through the origin cannot support f ≡ 1
        }
        let on_facet: Vec<(i16, Vec<i64>)> = images
            .iter()
            .filter(|(_, v)| normal.0 * v[0] + normal.1 * v[1] == den)
            .cloned()
            .collect();
        facets.push(Facet {
            normal_num: vec![normal.0, normal.1],
            den,
            generators: on_facet.iter().map(|(l, _)| *l).collect(),
            points: on_facet.into_iter().map(|(_, v)| v).collect(),
        });
    }
    (vertices, facets)
}

/// Brute-force facet enumeration in dimension 3: every plane through three
/// points that supports the whole set.
fn hull_3d(points: &[Vec<i64>], images: &[(i16, Vec<i64>)]) -> Result<(Vec<Vec<i64>>, Vec<Facet>)> {
    let n = points.len();
    if n < 4 {
        return Err(Error::Invalid("need at least 4 points for a 3-D hull".into()));
    }
    let mut facets: Vec<Facet> = Vec::new();
    let mut seen: Vec<(Vec<i64>, i64)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let a = &points[i];
                let b = &points[j];
                let c = &points[k];
                let ab: Vec<i64> = (0..3).map(|t| b[t] - a[t]).collect();
                let ac: Vec<i64> = (0..3).map(|t| c[t] - a[t]).collect();
                let mut normal = vec![
                    ab[1] * ac[2] - ab[2] * ac[1],
                    ab[2] * ac[0] - ab[0] * ac[2],
                    ab[0] * ac[1] - ab[1] * ac[0],
                ];
                if normal.iter().all(|&x| x == 0) {
                    continue;
                }
                let mut den: i64 = normal.iter().zip(a).map(|(x, y)| x * y).sum();
                // orient outward (all points on the ⟨n,u⟩ ≤ den side)
                let side = |nrm: &[i64], d: i64| points.iter().all(|p| {
                    nrm.iter().zip(p).map(|(x, y)| x * y).sum::<i64>() <= d
                });
                if !side(&normal, den) {
                    normal = normal.iter().map(|x| -x).collect();
                    den = -den;
                    if !side(&normal, den) {
                        continue;
                    }
                }
                if den <= 0 {
                    continue; // cannot normalize f ≡ 1 on the facet
                }
                let g = gcd3(normal[0].abs(), normal[1].abs(), normal[2].abs().max(den.abs()));
                let _ = g;
                if seen.iter().any(|(nn, dd)| same_plane(nn, *dd, &normal, den)) {
                    continue;
                }
                seen.push((normal.clone(), den));
                let on_facet: Vec<(i16, Vec<i64>)> = images
                    .iter()
                    .filter(|(_, v)| normal.iter().zip(v.iter()).map(|(x, y)| x * y).sum::<i64>() == den)
                    .cloned()
                    .collect();
                if on_facet.len() >= 3 {
                    facets.push(Facet {
                        normal_num: normal,
                        den,
                        generators: on_facet.iter().map(|(l, _)| *l).collect(),
                        points: on_facet.into_iter().map(|(_, v)| v).collect(),
                    });
                }
            }
        }
    }
    // vertices: points lying on at least 3 facet planes
    let vertices: Vec<Vec<i64>> = points
        .iter()
        .filter(|p| {
            facets
                .iter()
                .filter(|f| f.eval_num(p) == f.den)
                .count()
                >= 3
        })
        .cloned()
        .collect();
    Ok((vertices, facets))
}

fn same_plane(n1: &[i64], d1: i64, n2: &[i64], d2: i64) -> bool {
    // proportional with positive ratio: n1·d2 == n2·d1 componentwise
    n1.iter().zip(n2).all(|(a, b)| a * d2 == b * d1)
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn gcd(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a.max(1)
    }
    gcd(gcd(a, b), c)
}
