//! Volume growth v = lim log(b_n)/n.
//!
//! Closed forms: free group of rank k has v = log(2k-1); polynomial-growth
//! models have v = 0. For free products the spherical growth series satisfies
//! 1/B(z) = Σᵢ 1/Bᵢ(z) − (N−1); v = −log z* at the smallest positive root of
//! 1/B(z) = 0.

use super::{GroupModel, ModelKind};

/// Sphere sizes s_0..s_terms as floats, in closed form where available and
/// through the free-product growth-series identity otherwise. Heisenberg
/// factors use BFS out to a budget and an r³ trend beyond it.
pub fn sphere_series(model: &GroupModel, terms: usize) -> Vec<f64> {
    match model.kind() {
        ModelKind::FreeProduct { factors } => {
            // 1/B = Σ 1/Bᵢ − (N−1): two series reciprocals
            let n = terms + 1;
            let mut inv_sum = vec![0.0f64; n];
            inv_sum[0] = -((factors.len() as f64) - 1.0);
            for f in factors {
                let b = factor_sphere_series(f, n);
                let r = series_reciprocal(&b, n);
                for i in 0..n {
                    inv_sum[i] += r[i];
                }
            }
            series_reciprocal(&inv_sum, n)
        }
        _ => factor_sphere_series(model, terms + 1),
    }
}

/// Coefficients of 1/A(z) up to n terms (A(0) must be nonzero).
fn series_reciprocal(a: &[f64], n: usize) -> Vec<f64> {
    let mut r = vec![0.0f64; n];
    r[0] = 1.0 / a[0];
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += a.get(j).copied().unwrap_or(0.0) * r[k - j];
        }
        r[k] = -acc / a[0];
    }
    r
}

pub fn volume_growth(model: &GroupModel) -> f64 {
    match model.kind() {
        ModelKind::FreeGroup { rank } => {
            if *rank == 1 {
                0.0
            } else {
                ((2 * rank - 1) as f64).ln()
            }
        }
        ModelKind::FreeAbelian { .. } | ModelKind::Heisenberg | ModelKind::FiniteCyclic { .. } => 0.0,
        ModelKind::FreeProduct { factors } => free_product_growth(factors),
    }
}

/// Spherical growth series of a factor, truncated to `terms` coefficients.
fn factor_sphere_series(model: &GroupModel, terms: usize) -> Vec<f64> {
    match model.kind() {
        ModelKind::FreeGroup { rank } => {
            // s_0 = 1, s_n = 2k (2k-1)^(n-1)
            let k = *rank as f64;
            let mut s = vec![1.0];
            let mut cur = 2.0 * k;
            for _ in 1..terms {
                s.push(cur);
                cur *= 2.0 * k - 1.0;
            }
            s
        }
        ModelKind::FreeAbelian { rank } => {
            // L1 sphere sizes via the dimension recursion
            let d = *rank;
            let mut s = vec![0f64; terms];
            // sphere sizes of Z^d: s(d, n); s(1, n) = 2 for n >= 1
            let mut prev = vec![0f64; terms];
            prev[0] = 1.0;
            for n in 1..terms {
                prev[n] = 2.0;
            }
            for _ in 2..=d {
                let mut cur = vec![0f64; terms];
                for n in 0..terms {
                    // s(k, n) = s(k-1, n) + sum_{m=1}^{n} 2 * s(k-1, n-m)
                    let mut acc = prev[n];
                    for m in 1..=n {
                        acc += 2.0 * prev[n - m];
                    }
                    cur[n] = acc;
                }
                prev = cur;
            }
            s.copy_from_slice(&prev[..terms]);
            s
        }
        ModelKind::Heisenberg => {
            let radius = (terms as u32).saturating_sub(1).min(28);
            let sizes = model
                .heis_sphere_sizes(radius)
                .unwrap_or_else(|_| vec![1]);
            let mut s: Vec<f64> = sizes.iter().map(|&x| x as f64).collect();
            // beyond the BFS horizon extend with the r^3 sphere trend
            while s.len() < terms {
                let n = s.len() as f64;
                let last = *s.last().unwrap();
                s.push(last * ((n + 1.0) / n).powi(3));
            }
            s
        }
        ModelKind::FiniteCyclic { order } => {
            let mut s = vec![0f64; terms];
            for n in 0..terms {
                let n64 = n as u64;
                s[n] = if n == 0 {
                    1.0
                } else if 2 * n64 < *order {
                    2.0
                } else if 2 * n64 == *order {
                    1.0
                } else {
                    0.0
                };
            }
            s
        }
        ModelKind::FreeProduct { .. } => unreachable!("nested free products are rejected"),
    }
}

fn free_product_growth(factors: &[GroupModel]) -> f64 {
    let terms = 400usize;
    let series: Vec<Vec<f64>> = factors.iter().map(|f| factor_sphere_series(f, terms)).collect();
    let eval = |z: f64| -> f64 {
        // h(z) = sum_i 1/B_i(z) - (N - 1); root of h = 0 is the singularity
        let mut acc = -((factors.len() - 1) as f64);
        for s in &series {
            let mut b = 0.0;
            let mut zn = 1.0;
            for &c in s {
                b += c * zn;
                zn *= z;
                if zn < 1e-300 {
                    break;
                }
            }
            acc += 1.0 / b;
        }
        acc
    };
    // bisect on (0, z_hi): h(0+) = N - (N-1) = 1 > 0 and h decreases to the root
    let mut lo = 1e-9;
    let mut hi = 0.999;
    // ensure sign change; all factor series converge on [0, 1) fast enough here
    if eval(hi) > 0.0 {
        return 0.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    -(0.5 * (lo + hi)).ln()
}
