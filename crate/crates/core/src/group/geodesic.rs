//! Geodesic enumeration and midpoint sets via meet-in-the-middle search.

use super::{GroupElement, GroupModel};
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Geodesics between two points: the exact midpoint set plus a capped,
/// deterministically ordered list of geodesic words.
#[derive(Debug, Clone)]
pub struct GeodesicSet {
    pub x: GroupElement,
    pub y: GroupElement,
    pub distance: u64,
    /// Geodesic words from x to y as generator letters, lexicographic in
    /// generator order, at most `cap` of them.
    pub words: Vec<Vec<i16>>,
    /// True when `words` holds every geodesic.
    pub words_complete: bool,
    /// All midpoints: m with d(x,m) = floor(d/2) and d(m,y) = ceil(d/2).
    pub midpoints: Vec<GroupElement>,
}

impl GeodesicSet {
    pub fn count(&self) -> usize {
        self.words.len()
    }
}

/// Distance table from `root` out to `radius`, used as a distance oracle.
fn bfs_table(model: &GroupModel, root: &GroupElement, radius: u32) -> Result<HashMap<GroupElement, u32>> {
    let gens: Vec<GroupElement> = model
        .generators()
        .iter()
        .map(|g| model.generator_element(g.letter).expect("gen"))
        .collect();
    let cap = model.element_cap();
    let mut dist = HashMap::new();
    dist.insert(root.clone(), 0u32);
    let mut frontier = vec![root.clone()];
    for d in 1..=radius {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = model.compose(x, g)?;
                if !dist.contains_key(&y) {
                    if dist.len() >= cap {
                        return Err(Error::BallBudget { radius: d, elements: dist.len(), cap });
                    }
                    dist.insert(y.clone(), d);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok(dist)
}

/// Enumerate geodesics from x to y. The midpoint set is exact even when the
/// word list hits `cap`.
pub fn geodesics(model: &GroupModel, x: &GroupElement, y: &GroupElement, cap: usize) -> Result<GeodesicSet> {
    let d = model.distance(x, y)?;
    let half = (d / 2) as u32;
    let rest = d as u32 - half;

    // Meet in the middle: spheres around x and y.
    let from_x = bfs_table(model, x, half)?;
    let from_y = bfs_table(model, y, rest)?;

    let mut midpoints: Vec<GroupElement> = from_x
        .iter()
        .filter(|(_, &dx)| dx == half)
        .filter(|(m, _)| from_y.get(*m).copied() == Some(rest))
        .map(|(m, _)| m.clone())
        .collect();
    midpoints.sort_by(|a, b| a.encode().cmp(&b.encode()));

    // Depth-first enumeration of geodesic words in generator order, guided
    // by the two distance tables.
    let gens: Vec<(i16, GroupElement)> = model
        .generators()
        .iter()
        .map(|g| (g.letter, model.generator_element(g.letter).expect("gen")))
        .collect();
    let oracle = |p: &GroupElement| -> Result<u32> {
        if let Some(&dy) = from_y.get(p) {
            return Ok(dy);
        }
        // outside the y-side table: fall back to the model metric
        Ok(model.distance(p, y)? as u32)
    };
    let mut words = Vec::new();
    let mut complete = true;
    let mut stack_word: Vec<i16> = Vec::new();
    dfs(
        model,
        &gens,
        x.clone(),
        d as u32,
        &oracle,
        &mut stack_word,
        &mut words,
        cap,
        &mut complete,
    )?;

    Ok(GeodesicSet {
        x: x.clone(),
        y: y.clone(),
        distance: d,
        words,
        words_complete: complete,
        midpoints,
    })
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    model: &GroupModel,
    gens: &[(i16, GroupElement)],
    pos: GroupElement,
    remaining: u32,
    oracle: &dyn Fn(&GroupElement) -> Result<u32>,
    word: &mut Vec<i16>,
    out: &mut Vec<Vec<i16>>,
    cap: usize,
    complete: &mut bool,
) -> Result<()> {
    if remaining == 0 {
        if out.len() < cap {
            out.push(word.clone());
        } else {
            *complete = false;
        }
        return Ok(());
    }
    if !*complete && out.len() >= cap {
        return Ok(());
    }
    for (letter, g) in gens {
        let next = model.compose(&pos, g)?;
        if oracle(&next)? == remaining - 1 {
            word.push(*letter);
            dfs(model, gens, next, remaining - 1, oracle, word, out, cap, complete)?;
            word.pop();
        }
    }
    Ok(())
}

/// Number of midpoints between x and y (distance-floor(d/2) convention).
pub fn midpoint_count(model: &GroupModel, x: &GroupElement, y: &GroupElement) -> Result<usize> {
    Ok(midpoints(model, x, y)?.len())
}

/// The exact midpoint set, without enumerating geodesic words.
pub fn midpoints(model: &GroupModel, x: &GroupElement, y: &GroupElement) -> Result<Vec<GroupElement>> {
    let d = model.distance(x, y)?;
    let half = (d / 2) as u32;
    let rest = d as u32 - half;
    let from_x = bfs_table(model, x, half)?;
    let from_y = bfs_table(model, y, rest)?;
    let mut mids: Vec<GroupElement> = from_x
        .iter()
        .filter(|(_, &dx)| dx == half)
        .filter(|(m, _)| from_y.get(*m).copied() == Some(rest))
        .map(|(m, _)| m.clone())
        .collect();
    mids.sort_by(|a, b| a.encode().cmp(&b.encode()));
    Ok(mids)
}
