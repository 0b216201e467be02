//! The Floyd metric on a finite ball: Dijkstra over edges rescaled by
//! f(n) = λⁿ of the distance to a basepoint, with an escape-cost lower
//! bound for paths that might leave the ball.

use crate::error::{Error, Result};
use crate::group::{CayleyBall, GroupElement, GroupModel};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

#[derive(Debug, Clone)]
pub struct FloydConfig {
    /// Rescaling base λ ∈ (0,1); f(n) = λⁿ is summable with ratio λ.
    pub lambda: f64,
    pub basepoint: GroupElement,
    /// Working ball radius.
    pub radius: u32,
}

impl FloydConfig {
    pub fn new(lambda: f64, basepoint: GroupElement, radius: u32) -> Result<FloydConfig> {
        if !(0.0 < lambda && lambda < 1.0) {
            return Err(Error::Invalid(format!("rescaling base {lambda} outside (0,1)")));
        }
        Ok(FloydConfig { lambda, basepoint, radius })
    }
}

/// Floyd distance bracket: `lower <= δ <= upper`, where `upper` is the exact
/// shortest rescaled path within the ball.
#[derive(Debug, Clone, Copy)]
pub struct FloydInterval {
    pub lower: f64,
    pub upper: f64,
}

impl FloydInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Prebuilt ball with adjacency and basepoint distances.
pub struct FloydContext {
    model: GroupModel,
    cfg: FloydConfig,
    ball: CayleyBall,
    index: HashMap<GroupElement, usize>,
    adjacency: Vec<Vec<usize>>,
    base_dist: Vec<u64>,
}

impl FloydContext {
    pub fn new(model: GroupModel, cfg: FloydConfig) -> Result<FloydContext> {
        let ball = model.cayley_ball(cfg.radius)?;
        let elements = ball.elements();
        let index: HashMap<GroupElement, usize> = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        let gens: Vec<GroupElement> = model
            .generators()
            .iter()
            .map(|g| model.generator_element(g.letter).expect("gen"))
            .collect();
        let mut adjacency = vec![Vec::new(); elements.len()];
        for (i, x) in elements.iter().enumerate() {
            for g in &gens {
                let y = model.compose(x, g)?;
                if let Some(&j) = index.get(&y) {
                    adjacency[i].push(j);
                }
            }
        }
        let mut base_dist = Vec::with_capacity(elements.len());
        for x in elements {
            base_dist.push(model.distance(&cfg.basepoint, x)?);
        }
        Ok(FloydContext { model, cfg, ball, index, adjacency, base_dist })
    }

    pub fn ball(&self) -> &CayleyBall {
        &self.ball
    }

    pub fn config(&self) -> &FloydConfig {
        &self.cfg
    }

    fn edge_weight(&self, i: usize, j: usize) -> f64 {
        // an edge sits at the distance of its closer endpoint
        let n = self.base_dist[i].min(self.base_dist[j]);
        self.cfg.lambda.powi(n as i32)
    }

    /// Dijkstra distances from a source to every ball element.
    fn dijkstra(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.adjacency.len()];
        dist[source] = 0.0;
        // positive finite f64 keys order correctly through their bit patterns
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> = BinaryHeap::new();
        heap.push(Reverse((0u64, source)));
        while let Some(Reverse((dbits, i))) = heap.pop() {
            let d = f64::from_bits(dbits);
            if d > dist[i] {
                continue;
            }
            for &j in &self.adjacency[i] {
                let nd = d + self.edge_weight(i, j);
                if nd < dist[j] {
                    dist[j] = nd;
                    heap.push(Reverse((nd.to_bits(), j)));
                }
            }
        }
        dist
    }

    /// Cheapest cost to reach the boundary sphere from a vertex.
    fn escape_cost(&self, dist: &[f64]) -> f64 {
        let r = self.ball.radius();
        self.ball
            .elements()
            .iter()
            .enumerate()
            .filter(|(_, g)| self.ball.distance(g) == Some(r))
            .map(|(i, _)| dist[i])
            .fold(f64::INFINITY, f64::min)
    }

    /// Floyd distance interval between two ball elements.
    pub fn distance(&self, x: &GroupElement, y: &GroupElement) -> Result<FloydInterval> {
        let (&i, &j) = match (self.index.get(x), self.index.get(y)) {
            (Some(i), Some(j)) => (i, j),
            _ => {
                return Err(Error::OutsideBall(format!(
                    "floyd_distance needs both points inside the radius-{} ball",
                    self.cfg.radius
                )))
            }
        };
        if i == j {
            return Ok(FloydInterval { lower: 0.0, upper: 0.0 });
        }
        let from_x = self.dijkstra(i);
        let upper = from_x[j];
        let from_y = self.dijkstra(j);
        let escape = self.escape_cost(&from_x) + self.escape_cost(&from_y);
        Ok(FloydInterval { lower: upper.min(escape), upper })
    }

    pub fn model(&self) -> &GroupModel {
        &self.model
    }
}
