//! Lattice Green functions, the directional local-limit audit, and the
//! Ancona-violation ratio table.

use super::kernel::ZdKernel;
use super::perron::{h_surface_point, PerronData};
use crate::error::{Error, Result};
use crate::green::GreenEstimate;
use std::collections::HashMap;

type State = (Vec<i64>, usize);

/// Truncated Green function of the kernel on ℤᵈ × sheets, as a table from
/// the origin of each sheet.
pub struct ZdGreenTable {
    values: Vec<HashMap<State, f64>>,
    truncation: u32,
    residual: f64,
    max_mass: f64,
}

impl ZdGreenTable {
    pub fn build(kernel: &ZdKernel, radius: u64, truncation: u32) -> ZdGreenTable {
        let sheets = kernel.sheets();
        let mut values = Vec::with_capacity(sheets);
        let mut residual = 0.0f64;
        for start in 0..sheets {
            let mut cur: HashMap<State, f64> = HashMap::new();
            cur.insert((vec![0; kernel.dim()], start), 1.0);
            let mut table = cur.clone();
            for _ in 1..=truncation {
                let mut next: HashMap<State, f64> = HashMap::with_capacity(cur.len() * 2);
                for ((z, k), p) in &cur {
                    for (k0, j, dz, q) in kernel.entries() {
                        if k0 != k {
                            continue;
                        }
                        let nz: Vec<i64> = z.iter().zip(dz).map(|(a, b)| a + b).collect();
                        if nz.iter().map(|x| x.unsigned_abs()).sum::<u64>() <= radius {
                            *next.entry((nz, *j)).or_insert(0.0) += p * q;
                        }
                    }
                }
                for (s, p) in &next {
                    *table.entry(s.clone()).or_insert(0.0) += p;
                }
                let total: f64 = next.values().sum();
                cur = next;
                if total < 1e-19 {
                    break;
                }
            }
            residual = residual.max(cur.values().sum());
            values.push(table);
        }
        ZdGreenTable {
            values,
            truncation,
            residual,
            max_mass: kernel.max_sheet_mass(),
        }
    }

    /// G_{j,k}(0, z): from (0, k) to (z, j).
    pub fn value(&self, k: usize, j: usize, z: &[i64]) -> f64 {
        self.values[k]
            .get(&(z.to_vec(), j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn tail_bound(&self) -> f64 {
        if self.max_mass < 1.0 {
            self.residual / (1.0 - self.max_mass)
        } else {
            f64::INFINITY
        }
    }
}

/// Green estimate G((0,k) → (z,j)) with truncation bookkeeping.
pub fn zd_green(kernel: &ZdKernel, k: usize, j: usize, z: &[i64], truncation: u32) -> Result<GreenEstimate> {
    if z.len() != kernel.dim() {
        return Err(Error::Invalid("target has wrong dimension".into()));
    }
    let mass = kernel.max_sheet_mass();
    let transient_warning = mass >= 1.0 - 1e-12 && kernel.dim() <= 2;
    let radius = z.iter().map(|x| x.unsigned_abs()).sum::<u64>() + 40;
    let table = ZdGreenTable::build(kernel, radius, truncation);
    let lower = table.value(k, j, z);
    Ok(GreenEstimate {
        value: lower,
        truncation_lower_bound: lower,
        tail_estimate: table.tail_bound(),
        truncation,
        rho_hat: mass,
        tail_reliable: !transient_warning && mass < 1.0 - 1e-3,
    })
}

/// Nearest lattice point, ties broken toward the lexicographically smaller
/// vector (i.e. half-integers round down).
pub fn nearest_lattice(v: &[f64]) -> Vec<i64> {
    v.iter()
        .map(|&x| {
            let f = x.fract().abs();
            if (f - 0.5).abs() < 1e-12 {
                x.floor() as i64
            } else {
                x.round() as i64
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct LocalLimitReport {
    pub direction: Vec<f64>,
    pub u: Vec<f64>,
    pub grad: Vec<f64>,
    /// (t, ⟨t∇λ(u)⟩, scaled value).
    pub rows: Vec<(f64, Vec<i64>, f64)>,
    /// Relative change between the last two grid points.
    pub stabilization: f64,
}

/// Scaled Green values (2πt)^((d−1)/2) · G(z → ⟨t∇λ(u)⟩) · e^{u·(⟨t∇λ(u)⟩−z)}
/// along the t grid, with u the λ=1 point in direction θ. (The exponent sign
/// makes the killed 1-D walk exactly constant: e^{u·n}(2−√3)ⁿ = 1.)
pub fn local_limit_audit(
    kernel: &ZdKernel,
    theta: &[f64],
    z: &[i64],
    sheet_from: usize,
    sheet_to: usize,
    t_grid: &[f64],
    truncation: u32,
) -> Result<LocalLimitReport> {
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("t grid must be strictly increasing".into()));
    }
    let pd = h_surface_point(kernel, theta)?;
    let d = kernel.dim();
    let max_t = t_grid.last().copied().unwrap_or(1.0);
    let gnorm: f64 = pd.grad.iter().map(|x| x * x).sum::<f64>().sqrt();
    let radius = (max_t * gnorm).ceil() as u64 + z.iter().map(|x| x.unsigned_abs()).sum::<u64>() + 40;
    let table = ZdGreenTable::build(kernel, radius, truncation);
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let target_f: Vec<f64> = pd.grad.iter().map(|g| g * t).collect();
        let target = nearest_lattice(&target_f);
        let disp: Vec<i64> = target.iter().zip(z).map(|(a, b)| a - b).collect();
        let g = table.value(sheet_from, sheet_to, &disp);
        let dot: f64 = pd
            .u
            .iter()
            .zip(target.iter().zip(z))
            .map(|(&ui, (&ti, &zi))| ui * (ti - zi) as f64)
            .sum();
        let scaled = (2.0 * std::f64::consts::PI * t).powf((d as f64 - 1.0) / 2.0) * g * dot.exp();
        rows.push((t, target, scaled));
    }
    let stabilization = if rows.len() >= 2 {
        let a = rows[rows.len() - 2].2;
        let b = rows[rows.len() - 1].2;
        ((b - a) / a.abs().max(f64::MIN_POSITIVE)).abs()
    } else {
        f64::INFINITY
    };
    Ok(LocalLimitReport {
        direction: theta.to_vec(),
        u: pd.u,
        grad: pd.grad,
        rows,
        stabilization,
    })
}

#[derive(Debug, Clone)]
pub struct AnconaViolationTable {
    /// (m, z_m, R_m).
    pub rows: Vec<(u64, Vec<i64>, f64)>,
    /// Least-squares slope of log R_m against log ‖z_m‖.
    pub fitted_exponent: f64,
    pub perron: PerronData,
}

/// R_m = G(g, g_m) G(g_m, g_{4m}) / G(g, g_{4m}) along g_m = ⟨m·∇λ(u)⟩ for
/// the λ=1 direction θ; the decay exponent should approach −(d−1)/2.
pub fn ancona_violation_demo(
    kernel: &ZdKernel,
    theta: &[f64],
    base: &[i64],
    m_grid: &[u64],
    truncation: u32,
) -> Result<AnconaViolationTable> {
    let pd = h_surface_point(kernel, theta)?;
    let gnorm: f64 = pd.grad.iter().map(|x| x * x).sum::<f64>().sqrt();
    let max_m = m_grid.iter().copied().max().unwrap_or(1);
    let radius = (4.0 * max_m as f64 * gnorm).ceil() as u64
        + base.iter().map(|x| x.unsigned_abs()).sum::<u64>()
        + 40;
    let table = ZdGreenTable::build(kernel, radius, truncation);
    let value = |from: &[i64], to: &[i64]| -> f64 {
        let disp: Vec<i64> = to.iter().zip(from).map(|(a, b)| a - b).collect();
        table.value(0, 0, &disp)
    };
    let mut rows = Vec::new();
    for &m in m_grid {
        let zm = nearest_lattice(&pd.grad.iter().map(|g| g * m as f64).collect::<Vec<_>>());
        let z4m = nearest_lattice(&pd.grad.iter().map(|g| g * (4 * m) as f64).collect::<Vec<_>>());
        let r = if m == 0 {
            value(base, base)
        } else {
            value(base, &zm) * value(&zm, &z4m) / value(base, &z4m)
        };
        rows.push((m, zm, r));
    }
    // least-squares fit of log R against log ‖z_m‖ over m > 0
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|(m, _, r)| *m > 0 && *r > 0.0)
        .map(|(_, z, r)| {
            let n = z.iter().map(|x| x.unsigned_abs()).sum::<u64>() as f64;
            (n.ln(), r.ln())
        })
        .collect();
    let fitted_exponent = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|(x, _)| x).sum();
        let sy: f64 = pts.iter().map(|(_, y)| y).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    } else {
        f64::NAN
    };
    Ok(AnconaViolationTable { rows, fitted_exponent, perron: pd })
}
