//! Tilted matrices F(u), Perron data λ(u), ∇λ(u), and the λ = 1 surface.

use super::kernel::ZdKernel;
use crate::error::{Error, Result};

/// F_{j,k}(u) = Σ_z p_{k,j}(0,z) e^{u·z} as a dense row-major matrix.
pub fn f_matrix(kernel: &ZdKernel, u: &[f64]) -> Vec<Vec<f64>> {
    let n = kernel.sheets();
    let mut m = vec![vec![0.0; n]; n];
    for (k, j, z, p) in kernel.entries() {
        let dot: f64 = z.iter().zip(u).map(|(&zi, &ui)| zi as f64 * ui).sum();
        m[*j][*k] += p * dot.exp();
    }
    m
}

/// Entrywise z_i-weighted tilted sums ∂F/∂u_i.
fn f_matrix_grad(kernel: &ZdKernel, u: &[f64], i: usize) -> Vec<Vec<f64>> {
    let n = kernel.sheets();
    let mut m = vec![vec![0.0; n]; n];
    for (k, j, z, p) in kernel.entries() {
        let dot: f64 = z.iter().zip(u).map(|(&zi, &ui)| zi as f64 * ui).sum();
        m[*j][*k] += p * dot.exp() * z[i] as f64;
    }
    m
}

#[derive(Debug, Clone)]
pub struct PerronData {
    pub u: Vec<f64>,
    pub lambda: f64,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub grad: Vec<f64>,
    pub residual: f64,
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn vec_mat(v: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    (0..n).map(|j| (0..n).map(|i| v[i] * m[i][j]).sum()).collect()
}

fn normalize(v: &mut [f64]) -> f64 {
    let s: f64 = v.iter().map(|x| x.abs()).sum();
    for x in v.iter_mut() {
        *x /= s;
    }
    s
}

/// Dominant eigenvalue and strictly positive Perron vectors by shifted power
/// iteration (the shift handles period-2 sheet structures); ∇λ from the
/// eigen-derivative formula ∂ᵢλ = (lᵀ ∂ᵢF r)/(lᵀ r).
pub fn perron(kernel: &ZdKernel, u: &[f64]) -> Result<PerronData> {
    if u.len() != kernel.dim() {
        return Err(Error::Invalid("direction has wrong dimension".into()));
    }
    let f = f_matrix(kernel, u);
    let n = kernel.sheets();
    if n == 1 {
        let lambda = f[0][0];
        let grad = (0..kernel.dim())
            .map(|i| f_matrix_grad(kernel, u, i)[0][0])
            .collect();
        return Ok(PerronData {
            u: u.to_vec(),
            lambda,
            left: vec![1.0],
            right: vec![1.0],
            grad,
            residual: 0.0,
        });
    }
    // shift by the largest diagonal scale to kill periodicity
    let shift: f64 = (0..n).map(|i| f[i][i]).fold(0.0, f64::max) + f.iter().flatten().sum::<f64>() / (n * n) as f64;
    let shifted: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f[i][j] + if i == j { shift } else { 0.0 }).collect())
        .collect();
    let mut right = vec![1.0 / n as f64; n];
    let mut left = vec![1.0 / n as f64; n];
    let mut lambda_shifted = 0.0;
    let mut residual = f64::INFINITY;
    for _ in 0..20_000 {
        let mut next = mat_vec(&shifted, &right);
        lambda_shifted = normalize(&mut next);
        residual = next
            .iter()
            .zip(&right)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        right = next;
        if residual < 1e-14 {
            break;
        }
    }
    if residual > 1e-12 {
        return Err(Error::NoConvergence { residual, iterations: 20_000 });
    }
    for _ in 0..20_000 {
        let mut next = vec_mat(&left, &shifted);
        normalize(&mut next);
        let res = next
            .iter()
            .zip(&left)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        left = next;
        if res < 1e-14 {
            break;
        }
    }
    let lambda = lambda_shifted - shift;
    if right.iter().any(|&x| x <= 0.0) || left.iter().any(|&x| x <= 0.0) {
        return Err(Error::Invalid("Perron vectors are not strictly positive".into()));
    }
    let lr: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    let grad = (0..kernel.dim())
        .map(|i| {
            let df = f_matrix_grad(kernel, u, i);
            let dfr = mat_vec(&df, &right);
            left.iter().zip(&dfr).map(|(a, b)| a * b).sum::<f64>() / lr
        })
        .collect();
    Ok(PerronData { u: u.to_vec(), lambda, left, right, grad, residual })
}

/// Grid / ray diagnostics for the two standing assumptions: the sublevel set
/// {λ ≤ 1} looks compact (λ exceeds 1 along every sampled ray) and
/// min λ < 1.
#[derive(Debug, Clone)]
pub struct AssumptionsReport {
    pub min_lambda: f64,
    pub min_at: Vec<f64>,
    pub compact_ok: bool,
    pub min_below_one: bool,
}

pub fn assumptions_report(kernel: &ZdKernel) -> Result<AssumptionsReport> {
    let d = kernel.dim();
    // coarse grid in [-2, 2]^d
    let steps = 9usize;
    let mut min_lambda = f64::INFINITY;
    let mut min_at = vec![0.0; d];
    let mut grid = vec![0usize; d];
    loop {
        let u: Vec<f64> = grid.iter().map(|&i| -2.0 + 4.0 * i as f64 / (steps - 1) as f64).collect();
        let lam = perron(kernel, &u)?.lambda;
        if lam < min_lambda {
            min_lambda = lam;
            min_at = u;
        }
        // odometer
        let mut c = 0;
        loop {
            if c == d {
                break;
            }
            grid[c] += 1;
            if grid[c] < steps {
                break;
            }
            grid[c] = 0;
            c += 1;
        }
        if c == d {
            break;
        }
    }
    // rays: λ should exceed 1 within a bounded radius along all sign patterns
    let mut compact_ok = true;
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    let mut pattern = vec![-1i64; d];
    loop {
        if pattern.iter().any(|&x| x != 0) {
            let norm = (pattern.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt();
            dirs.push(pattern.iter().map(|&x| x as f64 / norm).collect());
        }
        let mut c = 0;
        loop {
            if c == d {
                break;
            }
            pattern[c] += 1;
            if pattern[c] <= 1 {
                break;
            }
            pattern[c] = -1;
            c += 1;
        }
        if c == d {
            break;
        }
    }
    for dir in dirs {
        let mut exceeded = false;
        for r in 1..=40 {
            let u: Vec<f64> = dir.iter().map(|&x| x * r as f64 * 0.25).collect();
            if perron(kernel, &u)?.lambda > 1.0 {
                exceeded = true;
                break;
            }
        }
        if !exceeded {
            compact_ok = false;
        }
    }
    Ok(AssumptionsReport {
        min_below_one: min_lambda < 1.0,
        min_lambda,
        min_at,
        compact_ok,
    })
}

/// Solve λ(u) = 1 with ∇λ(u)/‖∇λ(u)‖ = θ by damped Newton on
/// (λ − 1, projection of ∇λ off θ), started from a 1-D search along θ.
pub fn h_surface_point(kernel: &ZdKernel, theta: &[f64]) -> Result<PerronData> {
    let d = kernel.dim();
    if theta.len() != d {
        return Err(Error::Invalid("direction has wrong dimension".into()));
    }
    let tnorm: f64 = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
    if tnorm < 1e-12 {
        return Err(Error::Invalid("zero direction".into()));
    }
    let theta: Vec<f64> = theta.iter().map(|x| x / tnorm).collect();

    // start: scale t·θ until λ crosses 1, then bisect along the ray
    let mut lo = 0.0f64;
    let mut hi = 0.25f64;
    let lam_at = |t: f64| -> Result<f64> {
        let u: Vec<f64> = theta.iter().map(|x| x * t).collect();
        Ok(perron(kernel, &u)?.lambda)
    };
    let mut found = false;
    for _ in 0..60 {
        if lam_at(hi)? >= 1.0 {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if !found {
        return Err(Error::NoConvergence { residual: lam_at(hi)? - 1.0, iterations: 60 });
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if lam_at(mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u: Vec<f64> = theta.iter().map(|x| x * 0.5 * (lo + hi)).collect();

    // Newton on the residual system
    let residual_vec = |p: &PerronData| -> Vec<f64> {
        let gnorm: f64 = p.grad.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut r = vec![p.lambda - 1.0];
        // components of ∇λ − ‖∇λ‖θ orthogonal to θ (d−1 independent ones)
        for i in 0..d.saturating_sub(1) {
            r.push(p.grad[i] - gnorm * theta[i]);
        }
        r
    };
    let mut best = perron(kernel, &u)?;
    for _ in 0..100 {
        let r = residual_vec(&best);
        let rnorm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if rnorm < 1e-12 {
            break;
        }
        // numerical Jacobian
        let h = 1e-7;
        let mut jac = vec![vec![0.0; d]; d];
        for c in 0..d {
            let mut up = u.clone();
            up[c] += h;
            let rp = residual_vec(&perron(kernel, &up)?);
            for row in 0..d {
                jac[row][c] = (rp[row] - r[row]) / h;
            }
        }
        // solve J δ = −r (small dense system)
        let delta = solve_dense(&mut jac, &r.iter().map(|x| -x).collect::<Vec<_>>())?;
        // damping
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand: Vec<f64> = u.iter().zip(&delta).map(|(a, b)| a + step * b).collect();
            let p = perron(kernel, &cand)?;
            let rn = residual_vec(&p).iter().map(|x| x * x).sum::<f64>().sqrt();
            if rn < rnorm {
                u = cand;
                best = p;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let final_res = residual_vec(&best).iter().map(|x| x * x).sum::<f64>().sqrt();
    if final_res > 1e-10 {
        return Err(Error::NoConvergence { residual: final_res, iterations: 100 });
    }
    Ok(best)
}

fn solve_dense(a: &mut [Vec<f64>], b: &[f64]) -> Result<Vec<f64>> {
    let n = b.len();
    let mut x: Vec<f64> = b.to_vec();
    for c in 0..n {
        let pivot = (c..n)
            .max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap())
            .unwrap();
        if a[pivot][c].abs() < 1e-14 {
            return Err(Error::Invalid("singular Newton system".into()));
        }
        a.swap(c, pivot);
        x.swap(c, pivot);
        let pv = a[c][c];
        for i in 0..n {
            if i != c && a[i][c].abs() > 0.0 {
                let f = a[i][c] / pv;
                for cc in c..n {
                    a[i][cc] -= f * a[c][cc];
                }
                x[i] -= f * x[c];
            }
        }
    }
    Ok((0..n).map(|i| x[i] / a[i][i]).collect())
}
