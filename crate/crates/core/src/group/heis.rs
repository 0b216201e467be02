//! Cached breadth-first word lengths for the discrete Heisenberg group.

use crate::error::{Error, Result};
use std::collections::HashMap;

const GENS: [(i64, i64, i64); 4] = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)];

fn mul(a: (i64, i64, i64), b: (i64, i64, i64)) -> (i64, i64, i64) {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2 + a.0 * b.1)
}

/// Incrementally grown BFS distance table rooted at the identity.
#[derive(Debug, Default)]
pub struct HeisDist {
    dist: HashMap<(i64, i64, i64), u32>,
    frontier: Vec<(i64, i64, i64)>,
    radius: u32,
    spheres: Vec<u64>,
}

impl HeisDist {
    fn ensure_radius(&mut self, radius: u32, cap: usize) -> Result<()> {
        if self.dist.is_empty() {
            self.dist.insert((0, 0, 0), 0);
            self.frontier = vec![(0, 0, 0)];
            self.spheres = vec![1];
            self.radius = 0;
        }
        while self.radius < radius {
            if self.dist.len() > cap {
                return Err(Error::BallBudget {
                    radius: self.radius,
                    elements: self.dist.len(),
                    cap,
                });
            }
            let mut next = Vec::new();
            for &x in &self.frontier {
                for g in GENS {
                    let y = mul(x, g);
                    if !self.dist.contains_key(&y) {
                        self.dist.insert(y, self.radius + 1);
                        next.push(y);
                    }
                }
            }
            self.radius += 1;
            self.spheres.push(next.len() as u64);
            self.frontier = next;
        }
        Ok(())
    }

    /// Word length of (p, q, r); errors with a lower bound when the budget
    /// is exhausted before the element is reached.
    pub fn distance(&mut self, p: i64, q: i64, r: i64, cap: usize) -> Result<u64> {
        // |p| + |q| is a lower bound (abelianization); use it to fail fast.
        let lower = p.unsigned_abs() + q.unsigned_abs();
        loop {
            if let Some(&d) = self.dist.get(&(p, q, r)) {
                return Ok(d as u64);
            }
            let next = self.radius + 1;
            if let Err(e) = self.ensure_radius(next, cap) {
                return match e {
                    Error::BallBudget { radius, .. } => Err(Error::RadiusExhausted {
                        achieved: radius,
                        lower_bound: (radius + 1).max(lower as u32),
                    }),
                    other => Err(other),
                };
            }
        }
    }

    pub fn sphere_sizes(&mut self, radius: u32, cap: usize) -> Result<Vec<u64>> {
        self.ensure_radius(radius, cap)?;
        Ok(self.spheres[..=(radius as usize)].to_vec())
    }
}
