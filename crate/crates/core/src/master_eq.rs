//! Stationary distributions on a truncated state space.
//!
//! The balance system `Q^T pi = 0` on `0..=N` is banded with bandwidth
//! `max |eta|`. One balance row is replaced by a pinning row `pi_r = 1`, the
//! band system is solved by Gaussian elimination with partial pivoting, and
//! the result is normalized. Jumps that would leave the window are disabled
//! at their source state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CtmcModel;

pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
pub const BOUNDARY_WARNING: f64 = 1e-3;

/// Probability mass function on `0..mass.len()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub mass: Vec<f64>,
}

impl Distribution {
    /// Clamp tiny negative entries to zero and normalize.
    pub fn from_weights(mut w: Vec<f64>) -> Result<Self> {
        let total: f64 = w.iter().filter(|x| **x > 0.0).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::DegenerateSupport { found: 0, needed: 1 });
        }
        for x in w.iter_mut() {
            *x = if *x > 0.0 { *x / total } else { 0.0 };
        }
        Ok(Self { mass: w })
    }

    pub fn point(x: usize) -> Self {
        let mut mass = vec![0.0; x + 1];
        mass[x] = 1.0;
        Self { mass }
    }

    pub fn get(&self, x: usize) -> f64 {
        self.mass.get(x).copied().unwrap_or(0.0)
    }

    /// Number of states in the support window, including zero-mass states.
    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.mass.iter().enumerate().map(|(x, p)| x as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.mass
            .iter()
            .enumerate()
            .map(|(x, p)| (x as f64 - mu).powi(2) * p)
            .sum()
    }

    /// Number of states carrying positive mass.
    pub fn support_size(&self) -> usize {
        self.mass.iter().filter(|p| **p > 0.0).count()
    }
}

/// `1/2 sum_x |p(x) - q(x)|` over the union of supports.
pub fn tv_distance(p: &Distribution, q: &Distribution) -> f64 {
    let n = p.len().max(q.len());
    let s: f64 = (0..n).map(|x| (p.get(x) - q.get(x)).abs()).sum();
    (0.5 * s).min(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryResult {
    pub distribution: Distribution,
    pub truncation: u64,
    /// Mass on the last `max |eta| + 1` states of the window.
    pub boundary_mass: f64,
    /// Largest absolute entry of `Q^T pi` after normalization.
    pub residual: f64,
    pub warnings: Vec<String>,
}

/// Band matrix holding row `i` on columns `i - kl ..= i + ku + kl`; the
/// extra `kl` columns absorb fill-in from row interchanges.
struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl || j >= self.n {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    fn set_row_unit(&mut self, r: usize) {
        let lo = r.saturating_sub(self.kl);
        let hi = (r + self.ku + self.kl).min(self.n - 1);
        for j in lo..=hi {
            let k = self.idx(r, j);
            self.data[k] = 0.0;
        }
        let k = self.idx(r, r);
        self.data[k] = 1.0;
    }

    fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + self.kl).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solve in place; consumes the matrix.
    fn solve(mut self, mut b: Vec<f64>) -> Result<Vec<f64>> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let (mut p, mut best) = (k, self.get(k, k).abs());
            for i in k + 1..=last {
                let v = self.get(i, k).abs();
                if v > best {
                    p = i;
                    best = v;
                }
            }
            if best <= 1e-14 * scale {
                return Err(Error::SingularSystem { row: k, pivot: best });
            }
            let right = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=right {
                    let (a, c) = (self.idx(k, j), self.idx(p, j));
                    self.data.swap(a, c);
                }
                b.swap(k, p);
            }
            let pivot = self.get(k, k);
            for i in k + 1..=last {
                let f = self.get(i, k) / pivot;
                if f == 0.0 {
                    continue;
                }
                for j in k..=right {
                    let v = self.get(k, j);
                    if v != 0.0 {
                        self.add(i, j, -f * v);
                    }
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for k in (0..n).rev() {
            let right = (k + kl + ku).min(n - 1);
            let s: f64 = (k + 1..=right).map(|j| self.get(k, j) * x[j]).sum();
            x[k] = (b[k] - s) / self.get(k, k);
        }
        Ok(x)
    }
}

/// `Q^T` on `0..=n` with truncated outward jumps.
fn transposed_generator(m: &CtmcModel, n: usize) -> BandMatrix {
    let w = m.max_jump() as usize;
    let mut a = BandMatrix::new(n + 1, w, w);
    for x in 0..=n {
        for (j, r) in m.jumps().iter().zip(m.rates_at_f64(x as u64)) {
            let y = x as i64 + j.eta;
            if r == 0.0 || y < 0 || y > n as i64 {
                continue;
            }
            // Flow out of x into y: Q[x][y] = r, Q[x][x] -= r.
            a.add(y as usize, x, r);
            a.add(x, x, -r);
        }
    }
    a
}

fn pinned_solve(m: &CtmcModel, n: usize, r: usize) -> Result<Vec<f64>> {
    let mut a = transposed_generator(m, n);
    a.set_row_unit(r);
    let mut b = vec![0.0; n + 1];
    b[r] = 1.0;
    a.solve(b)
}

fn normalize(v: &[f64]) -> Option<Vec<f64>> {
    if v.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let total: f64 = v.iter().map(|x| x.max(0.0)).sum();
    (total > 0.0).then(|| v.iter().map(|x| x.max(0.0) / total).collect())
}

pub fn stationary_truncated(m: &CtmcModel, n: u64) -> Result<StationaryResult> {
    let w = m.max_jump();
    if n <= w {
        return Err(Error::TruncationTooSmall(n));
    }
    let n_us = n as usize;
    let first = pinned_solve(m, n_us, 0)?;
    // Re-pin at the mode: pinning a state with tiny mass loses precision.
    let pin = first
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(n_us / 2);
    let second = if pin == 0 { first } else { pinned_solve(m, n_us, pin)? };
    let pi = normalize(&second).ok_or(Error::SingularSystem { row: pin, pivot: 0.0 })?;

    let qt = transposed_generator(m, n_us);
    let residual = qt.mul_vec(&pi).iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::ResidualTooLarge { residual, tolerance: RESIDUAL_TOLERANCE });
    }
    let boundary_mass: f64 = pi[n_us - w as usize..].iter().sum();
    let mut warnings = Vec::new();
    if boundary_mass > BOUNDARY_WARNING {
        warnings.push(format!(
            "boundary mass {boundary_mass:.3e} exceeds {BOUNDARY_WARNING:e}; increase the truncation"
        ));
    }
    Ok(StationaryResult {
        distribution: Distribution { mass: pi },
        truncation: n,
        boundary_mass,
        residual,
        warnings,
    })
}

/// Least-squares slopes of `log pi(x)` against `x` and against `log x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailIndex {
    pub slope_vs_x: f64,
    pub slope_vs_log_x: f64,
    pub points: usize,
}

pub const TAIL_MIN_POINTS: usize = 20;
pub const TAIL_MASS_FLOOR: f64 = 1e-14;

pub fn tail_index(dist: &Distribution) -> Result<TailIndex> {
    let pts: Vec<(f64, f64)> = dist
        .mass
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, p)| **p > TAIL_MASS_FLOOR)
        .map(|(x, p)| (x as f64, p.ln()))
        .collect();
    if pts.len() < TAIL_MIN_POINTS {
        return Err(Error::DegenerateSupport { found: pts.len(), needed: TAIL_MIN_POINTS });
    }
    let lin: Vec<(f64, f64)> = pts.clone();
    let log: Vec<(f64, f64)> = pts.iter().map(|(x, y)| (x.ln(), *y)).collect();
    Ok(TailIndex {
        slope_vs_x: ls_slope(&lin),
        slope_vs_log_x: ls_slope(&log),
        points: pts.len(),
    })
}

/// Ordinary least-squares slope.
pub fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}
