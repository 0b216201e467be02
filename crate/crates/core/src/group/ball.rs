//! Exact Cayley balls by breadth-first search in generator order.

use super::{GroupElement, GroupModel};
use crate::error::{Error, Result};
use std::collections::HashMap;

/// A ball of known radius with its distance table and volume statistics.
#[derive(Debug, Clone)]
pub struct CayleyBall {
    radius: u32,
    distances: HashMap<GroupElement, u32>,
    /// Elements in BFS order, spheres concatenated.
    elements: Vec<GroupElement>,
    sphere_sizes: Vec<u64>,
    ball_sizes: Vec<u64>,
    complete: bool,
}

impl CayleyBall {
    /// Achieved radius (requested radius unless the budget truncated it).
    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// False when the enumeration stopped early on the element cap.
    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn distance(&self, g: &GroupElement) -> Option<u32> {
        self.distances.get(g).copied()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.distances.contains_key(g)
    }

    /// All elements in deterministic BFS order.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn sphere(&self, n: u32) -> impl Iterator<Item = &GroupElement> + '_ {
        let n = n.min(self.radius);
        self.elements.iter().filter(move |g| self.distances[*g] == n)
    }

    /// `s_n` for n <= radius.
    pub fn sphere_sizes(&self) -> &[u64] {
        &self.sphere_sizes
    }

    /// Cumulative `b_n`.
    pub fn ball_sizes(&self) -> &[u64] {
        &self.ball_sizes
    }

    /// Growth estimates log(b_n)/n and log(s_n)/n for 1 <= n <= radius.
    pub fn growth_estimates(&self) -> Vec<(u32, f64, f64)> {
        (1..=self.radius as usize)
            .map(|n| {
                let bn = (self.ball_sizes[n] as f64).ln() / n as f64;
                let sn = if self.sphere_sizes[n] > 0 {
                    (self.sphere_sizes[n] as f64).ln() / n as f64
                } else {
                    f64::NEG_INFINITY
                };
                (n as u32, bn, sn)
            })
            .collect()
    }
}

pub fn cayley_ball(model: &GroupModel, radius: u32, cap: usize) -> Result<CayleyBall> {
    let ball = bfs(model, radius, cap)?;
    if ball.complete {
        Ok(ball)
    } else {
        Err(Error::BallBudget {
            radius: ball.radius,
            elements: ball.elements.len(),
            cap,
        })
    }
}

pub fn cayley_ball_partial(model: &GroupModel, radius: u32, cap: usize) -> CayleyBall {
    bfs(model, radius, cap).expect("partial ball construction cannot fail")
}

fn bfs(model: &GroupModel, radius: u32, cap: usize) -> Result<CayleyBall> {
    let gens: Vec<GroupElement> = model
        .generators()
        .iter()
        .map(|g| model.generator_element(g.letter).expect("model generator"))
        .collect();
    let e = model.identity();
    let mut distances = HashMap::new();
    distances.insert(e.clone(), 0);
    let mut elements = vec![e.clone()];
    let mut frontier = vec![e];
    let mut sphere_sizes = vec![1u64];
    let mut ball_sizes = vec![1u64];
    let mut achieved = 0u32;
    let mut complete = true;
    'grow: for d in 1..=radius {
        let mut next = Vec::new();
        for x in &frontier {
            for g in &gens {
                let y = model.compose(x, g)?;
                if !distances.contains_key(&y) {
                    if elements.len() >= cap {
                        complete = false;
                        break 'grow;
                    }
                    distances.insert(y.clone(), d);
                    elements.push(y.clone());
                    next.push(y);
                }
            }
        }
        achieved = d;
        sphere_sizes.push(next.len() as u64);
        ball_sizes.push(ball_sizes[d as usize - 1] + next.len() as u64);
        frontier = next;
    }
    if !complete {
        // drop the partially built sphere
        let keep = achieved;
        elements.retain(|g| distances[g] <= keep);
        distances.retain(|_, d| *d <= keep);
    }
    Ok(CayleyBall {
        radius: achieved,
        distances,
        elements,
        sphere_sizes,
        ball_sizes,
        complete,
    })
}
