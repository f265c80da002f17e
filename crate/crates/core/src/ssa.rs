//! Exact stochastic simulation (Gillespie) of one-dimensional models and
//! ensemble statistics.
//!
//! Rates are evaluated exactly once per visited state and cached as `f64`
//! in a table shared by all trajectories. Each trajectory draws from its own
//! ChaCha stream selected by its index, so ensembles are reproducible and
//! independent of scheduling.

use std::sync::Arc;

use parking_lot::RwLock;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::master_eq::{ls_slope, tv_distance, Distribution};
use crate::model::CtmcModel;

pub const DEFAULT_JUMP_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Horizon,
    Absorbed,
    JumpCap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<u64>,
    pub terminated_by: Termination,
}

impl Trajectory {
    /// State at time `t`, carrying the last state forward.
    pub fn state_at(&self, t: f64) -> u64 {
        let k = self.times.partition_point(|&s| s <= t);
        self.states[k.saturating_sub(1)]
    }
}

/// Per-state rates of a model, filled lazily and shared between threads.
///
/// Row `x` holds the clamped rate of every jump followed by their total.
pub struct RateTable {
    model: CtmcModel,
    etas: Vec<i64>,
    stride: usize,
    cache: RwLock<Arc<Vec<f64>>>,
}

impl RateTable {
    pub fn new(model: &CtmcModel) -> Self {
        let etas: Vec<i64> = model.jumps().iter().map(|j| j.eta).collect();
        let stride = etas.len() + 1;
        let table = Self {
            model: model.clone(),
            etas,
            stride,
            cache: RwLock::new(Arc::new(Vec::new())),
        };
        table.grow_to(64);
        table
    }

    pub fn etas(&self) -> &[i64] {
        &self.etas
    }

    pub fn snapshot(&self) -> Arc<Vec<f64>> {
        self.cache.read().clone()
    }

    fn states(&self, data: &[f64]) -> usize {
        data.len() / self.stride
    }

    /// Extend the table to cover at least `0..n` and return the new snapshot.
    pub fn grow_to(&self, n: usize) -> Arc<Vec<f64>> {
        let mut guard = self.cache.write();
        let have = self.states(&guard);
        if have >= n {
            return guard.clone();
        }
        let target = n.max(2 * have);
        let mut data = Vec::with_capacity(target * self.stride);
        data.extend_from_slice(&guard);
        for x in have..target {
            let rates = self.model.rates_at_f64(x as u64);
            let total: f64 = rates.iter().sum();
            data.extend(rates);
            data.push(total);
        }
        *guard = Arc::new(data);
        guard.clone()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Core event loop; `on_jump(t, x)` sees the state after each jump.
fn run_events(
    table: &RateTable,
    x0: u64,
    t_end: f64,
    rng: &mut ChaCha8Rng,
    jump_cap: u64,
    mut on_jump: impl FnMut(f64, u64),
) -> Termination {
    let stride = table.stride;
    let etas = table.etas();
    let mut data = table.snapshot();
    let mut t = 0.0;
    let mut x = x0;
    let mut jumps = 0u64;
    loop {
        let xi = x as usize;
        if (xi + 1) * stride > data.len() {
            data = table.grow_to(xi + 1);
        }
        let row = &data[xi * stride..(xi + 1) * stride];
        let q = row[stride - 1];
        if q <= 0.0 {
            return Termination::Absorbed;
        }
        let u: f64 = rng.random();
        let tn = t - (-u).ln_1p() / q;
        if tn > t_end {
            return Termination::Horizon;
        }
        if jumps >= jump_cap {
            return Termination::JumpCap;
        }
        let mut target = rng.random::<f64>() * q;
        let mut k = 0;
        while k + 1 < etas.len() {
            if target < row[k] {
                break;
            }
            target -= row[k];
            k += 1;
        }
        // Guard against rounding landing on a zero-rate jump at the end.
        while row[k] == 0.0 {
            k -= 1;
        }
        x = (x as i64 + etas[k]) as u64;
        t = tn;
        jumps += 1;
        on_jump(t, x);
    }
}

/// One trajectory on `[0, t_end]`, recording every jump.
pub fn simulate(model: &CtmcModel, x0: u64, t_end: f64, seed: u64, jump_cap: u64) -> Trajectory {
    let table = RateTable::new(model);
    simulate_with(&table, x0, t_end, seed, 0, jump_cap)
}

pub fn simulate_with(table: &RateTable, x0: u64, t_end: f64, seed: u64, stream: u64, jump_cap: u64) -> Trajectory {
    let mut rng = stream_rng(seed, stream);
    let mut times = vec![0.0];
    let mut states = vec![x0];
    let terminated_by = run_events(table, x0, t_end, &mut rng, jump_cap, |t, x| {
        times.push(t);
        states.push(x);
    });
    Trajectory { times, states, terminated_by }
}

/// Only the termination reason of each run; no path is stored.
pub fn terminations(model: &CtmcModel, x0: u64, t_end: f64, n_traj: usize, seed: u64, jump_cap: u64) -> Vec<Termination> {
    let table = RateTable::new(model);
    (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            run_events(&table, x0, t_end, &mut rng, jump_cap, |_, _| {})
        })
        .collect()
}

/// Histogram of the states at `t`; jump-capped runs are excluded.
pub fn empirical_dist(runs: &[Trajectory], t: f64) -> Result<(Distribution, usize)> {
    let mut counts: Vec<f64> = Vec::new();
    let mut excluded = 0;
    for r in runs {
        if r.terminated_by == Termination::JumpCap {
            excluded += 1;
            continue;
        }
        let x = r.state_at(t) as usize;
        if counts.len() <= x {
            counts.resize(x + 1, 0.0);
        }
        counts[x] += 1.0;
    }
    if excluded == runs.len() {
        return Err(Error::NoUsableRuns(t));
    }
    Ok((Distribution::from_weights(counts)?, excluded))
}

pub const EXCLUDED: u32 = u32::MAX;

/// States of each run at each grid time; `EXCLUDED` marks jump-capped runs.
pub fn sample_grid(
    table: &RateTable,
    x0: u64,
    times: &[f64],
    n_traj: usize,
    seed: u64,
    jump_cap: u64,
) -> Vec<Vec<u32>> {
    let t_end = times.last().copied().unwrap_or(0.0);
    (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut out = Vec::with_capacity(times.len());
            let mut current = x0;
            let term = run_events(table, x0, t_end, &mut rng, jump_cap, |t, x| {
                while out.len() < times.len() && times[out.len()] < t {
                    out.push(current as u32);
                }
                current = x;
            });
            if term == Termination::JumpCap {
                return vec![EXCLUDED; times.len()];
            }
            out.resize(times.len(), current as u32);
            out
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    pub distributions: Vec<Distribution>,
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    pub n_traj: usize,
    pub excluded: usize,
    pub seed: u64,
}

pub fn ensemble_stats_from_samples(samples: &[Vec<u32>], times: &[f64], seed: u64) -> Result<EnsembleStats> {
    let mut distributions = Vec::with_capacity(times.len());
    let excluded = samples.iter().filter(|s| s.first() == Some(&EXCLUDED)).count();
    for (k, &t) in times.iter().enumerate() {
        let mut counts: Vec<f64> = Vec::new();
        for s in samples {
            let x = s[k];
            if x == EXCLUDED {
                continue;
            }
            let x = x as usize;
            if counts.len() <= x {
                counts.resize(x + 1, 0.0);
            }
            counts[x] += 1.0;
        }
        if counts.is_empty() {
            return Err(Error::NoUsableRuns(t));
        }
        distributions.push(Distribution::from_weights(counts)?);
    }
    Ok(EnsembleStats {
        times: times.to_vec(),
        mean: distributions.iter().map(Distribution::mean).collect(),
        variance: distributions.iter().map(Distribution::variance).collect(),
        distributions,
        n_traj: samples.len(),
        excluded,
        seed,
    })
}

pub fn ensemble(model: &CtmcModel, x0: u64, times: &[f64], n_traj: usize, seed: u64, jump_cap: u64) -> Result<EnsembleStats> {
    let table = RateTable::new(model);
    let samples = sample_grid(&table, x0, times, n_traj, seed, jump_cap);
    ensemble_stats_from_samples(&samples, times, seed)
}

/// Uniform grid `0, dt, 2 dt, ..., t_end`.
pub fn uniform_grid(t_end: f64, dt: f64) -> Vec<f64> {
    let n = (t_end / dt).round() as usize;
    (0..=n).map(|k| k as f64 * dt).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvRow {
    pub x0: u64,
    pub t: f64,
    pub tv: f64,
    pub log_tv: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub x0: u64,
    pub slope: Option<f64>,
    pub window: Option<(f64, f64)>,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvDecay {
    pub rows: Vec<TvRow>,
    pub fits: Vec<SlopeFit>,
    pub noise_floor: f64,
    /// `(max - min) / |mean|` of the fitted slopes, when all fits exist.
    pub relative_spread: Option<f64>,
}

/// Start of the slope window: the first time TV has dropped to this level.
pub const FIT_START_TV: f64 = 0.5;

/// Monte Carlo floor `2 sqrt(n_support / (2 n_traj))`, where the support
/// counts reference states an ensemble of this size can resolve.
pub fn noise_floor(reference: &Distribution, n_traj: usize) -> f64 {
    let resolvable = 1.0 / n_traj as f64;
    let support = reference.mass.iter().filter(|p| **p >= resolvable).count().max(1);
    2.0 * (support as f64 / (2.0 * n_traj as f64)).sqrt()
}

/// Fit `log TV` against `t` from the first time TV <= `FIT_START_TV` up to
/// (excluding) the first time TV falls below the floor.
pub fn fit_slope(x0: u64, rows: &[TvRow], floor: f64) -> SlopeFit {
    let start = rows.iter().position(|r| r.tv <= FIT_START_TV);
    let pts: Vec<(f64, f64)> = match start {
        None => Vec::new(),
        Some(s) => rows[s..]
            .iter()
            .take_while(|r| r.tv >= floor)
            .map(|r| (r.t, r.log_tv))
            .collect(),
    };
    if pts.len() < 3 {
        return SlopeFit { x0, slope: None, window: None, points: pts.len() };
    }
    SlopeFit {
        x0,
        slope: Some(ls_slope(&pts)),
        window: Some((pts[0].0, pts[pts.len() - 1].0)),
        points: pts.len(),
    }
}

pub fn relative_spread(slopes: &[f64]) -> f64 {
    let max = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = slopes.iter().sum::<f64>() / slopes.len() as f64;
    (max - min) / mean.abs()
}

pub fn tv_decay(
    model: &CtmcModel,
    x0s: &[u64],
    times: &[f64],
    n_traj: usize,
    reference: &Distribution,
    seed: u64,
) -> Result<TvDecay> {
    let table = RateTable::new(model);
    let floor = noise_floor(reference, n_traj);
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for (i, &x0) in x0s.iter().enumerate() {
        // Distinct seeds per initial state keep the ensembles independent.
        let samples = sample_grid(&table, x0, times, n_traj, seed.wrapping_add(i as u64), DEFAULT_JUMP_CAP);
        let stats = ensemble_stats_from_samples(&samples, times, seed)?;
        let these: Vec<TvRow> = times
            .iter()
            .zip(&stats.distributions)
            .map(|(&t, d)| {
                let tv = tv_distance(d, reference);
                TvRow { x0, t, tv, log_tv: tv.ln() }
            })
            .collect();
        fits.push(fit_slope(x0, &these, floor));
        rows.extend(these);
    }
    let slopes: Option<Vec<f64>> = fits.iter().map(|f| f.slope).collect();
    Ok(TvDecay {
        rows,
        fits,
        noise_floor: floor,
        relative_spread: slopes.map(|s| relative_spread(&s)),
    })
}
