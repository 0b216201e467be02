//! Finite-range ℤᵈ-invariant sub-Markov kernels on ℤᵈ × {1..N'} sheets.

use crate::error::{Error, Result};
use std::collections::{HashMap, HashSet};

/// Transition kernel entries p_{k,j}(0, z): from sheet k to sheet j with
/// lattice displacement z. Only displacements are stored (ℤᵈ-invariance is
/// structural).
#[derive(Debug, Clone)]
pub struct ZdKernel {
    dim: usize,
    sheets: usize,
    /// (from sheet k, to sheet j, displacement z, probability).
    entries: Vec<(usize, usize, Vec<i64>, f64)>,
}

impl ZdKernel {
    pub fn new(dim: usize, sheets: usize, entries: Vec<(usize, usize, Vec<i64>, f64)>) -> Result<ZdKernel> {
        if dim == 0 || sheets == 0 {
            return Err(Error::Invalid("kernel needs dim ≥ 1 and ≥ 1 sheet".into()));
        }
        for (k, j, z, p) in &entries {
            if *k >= sheets || *j >= sheets {
                return Err(Error::Invalid(format!("sheet index ({k},{j}) out of range")));
            }
            if z.len() != dim {
                return Err(Error::Invalid(format!("displacement {z:?} has wrong dimension")));
            }
            if !(*p > 0.0) {
                return Err(Error::Invalid(format!("non-positive entry {p}")));
            }
        }
        // per-sheet outgoing mass must be sub-Markov
        let mut mass = vec![0.0f64; sheets];
        for (k, _, _, p) in &entries {
            mass[*k] += p;
        }
        for (k, m) in mass.iter().enumerate() {
            if *m > 1.0 + 1e-12 {
                return Err(Error::Invalid(format!("sheet {k} has outgoing mass {m} > 1")));
            }
        }
        let kernel = ZdKernel { dim, sheets, entries };
        kernel.check_reachability()?;
        Ok(kernel)
    }

    /// Shape-validated kernel without the reachability check, for empirical
    /// estimates whose support may be incomplete.
    pub fn new_unvalidated(
        dim: usize,
        sheets: usize,
        entries: Vec<(usize, usize, Vec<i64>, f64)>,
    ) -> Result<ZdKernel> {
        if dim == 0 || sheets == 0 {
            return Err(Error::Invalid("kernel needs dim ≥ 1 and ≥ 1 sheet".into()));
        }
        for (k, j, z, p) in &entries {
            if *k >= sheets || *j >= sheets || z.len() != dim || !(*p > 0.0) {
                return Err(Error::Invalid("bad kernel entry".into()));
            }
        }
        Ok(ZdKernel { dim, sheets, entries })
    }

    /// The killed 1-D walk p(0, ±1) = 1/4 (total mass 1/2).
    pub fn killed_walk_1d() -> ZdKernel {
        ZdKernel::new(1, 1, vec![
            (0, 0, vec![1], 0.25),
            (0, 0, vec![-1], 0.25),
        ])
        .expect("valid kernel")
    }

    /// The killed 2-D walk p(0, ±e_i) = 1/8 (total mass 1/2).
    pub fn killed_walk_2d() -> ZdKernel {
        ZdKernel::new(2, 1, vec![
            (0, 0, vec![1, 0], 0.125),
            (0, 0, vec![-1, 0], 0.125),
            (0, 0, vec![0, 1], 0.125),
            (0, 0, vec![0, -1], 0.125),
        ])
        .expect("valid kernel")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sheets(&self) -> usize {
        self.sheets
    }

    pub fn entries(&self) -> &[(usize, usize, Vec<i64>, f64)] {
        &self.entries
    }

    /// Total outgoing mass from a sheet.
    pub fn sheet_mass(&self, k: usize) -> f64 {
        self.entries.iter().filter(|(k0, ..)| *k0 == k).map(|(.., p)| p).sum()
    }

    pub fn max_sheet_mass(&self) -> f64 {
        (0..self.sheets).map(|k| self.sheet_mass(k)).fold(0.0, f64::max)
    }

    /// Reachability: sheets strongly connected through the support and
    /// displacements of full lattice rank (checked on a finite window).
    fn check_reachability(&self) -> Result<()> {
        // sheet graph strong connectivity (both directions reachable)
        for start in 0..self.sheets {
            let mut seen = HashSet::from([start]);
            let mut stack = vec![start];
            while let Some(k) = stack.pop() {
                for (k0, j, _, _) in &self.entries {
                    if *k0 == k && seen.insert(*j) {
                        stack.push(*j);
                    }
                }
            }
            if seen.len() != self.sheets {
                return Err(Error::Invalid(format!(
                    "sheets are not irreducible: {} unreachable from {start}",
                    self.sheets - seen.len()
                )));
            }
        }
        // lattice rank: displacements reachable from sheet 0 back to sheet 0
        // within a short window must span ℤᵈ over the rationals
        let window = 2 * self.sheets + 2;
        let mut states: HashMap<usize, Vec<Vec<i64>>> = HashMap::new();
        states.insert(0, vec![vec![0; self.dim]]);
        let mut loops: Vec<Vec<i64>> = Vec::new();
        for _ in 0..window {
            let mut next: HashMap<usize, Vec<Vec<i64>>> = HashMap::new();
            for (k, zs) in &states {
                for (k0, j, dz, _) in &self.entries {
                    if k0 != k {
                        continue;
                    }
                    for z in zs {
                        let nz: Vec<i64> = z.iter().zip(dz).map(|(a, b)| a + b).collect();
                        if *j == 0 {
                            loops.push(nz.clone());
                        }
                        let slot = next.entry(*j).or_default();
                        if slot.len() < 64 && !slot.contains(&nz) {
                            slot.push(nz);
                        }
                    }
                }
            }
            states = next;
        }
        if rank(&loops) < self.dim {
            return Err(Error::Invalid(
                "kernel displacements do not have full lattice rank".into(),
            ));
        }
        Ok(())
    }
}

/// Rank of an integer vector family over the rationals (float Gauss).
fn rank(vs: &[Vec<i64>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    let d = vs[0].len();
    let mut rows: Vec<Vec<f64>> = vs.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
    let mut r = 0usize;
    for c in 0..d {
        let pivot = (r..rows.len()).find(|&i| rows[i][c].abs() > 1e-9);
        let Some(p) = pivot else { continue };
        rows.swap(r, p);
        let pv = rows[r][c];
        for i in 0..rows.len() {
            if i != r && rows[i][c].abs() > 1e-12 {
                let f = rows[i][c] / pv;
                for cc in 0..d {
                    rows[i][cc] -= f * rows[r][cc];
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}
