//! Fast/slow two-species networks and their one-dimensional reduction.
//!
//! Species 0 is the slow species `X`, species 1 the fast species `Y`. Fast
//! reactions are catalyzed by `X` and drive `Y/V` to the quasi-steady value
//! `g(x) = f1(x)/f2(x)`; slow reactions change only `X` and are catalyzed by
//! at most one copy of `Y`. Substituting `Y = V g(x)` into the slow
//! propensities yields a chain on `X` with rational rates.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CtmcModel, JumpRate};
use crate::rates::{
    from_u64, parse_rational, to_f64, FallingFactorialPoly, Rational, RationalRate,
};
use crate::ssa::{ensemble, ensemble_stats_from_samples, EnsembleStats, Termination, DEFAULT_JUMP_CAP, EXCLUDED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Fast,
    Slow,
}

/// Mass-action reaction on `(X, Y)` with constant `rate * U^u_power * V^v_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub reactants: [u32; 2],
    pub products: [u32; 2],
    pub rate: Rational,
    pub u_power: i32,
    pub v_power: i32,
    pub tier: Tier,
}

fn ipow(base: &Rational, e: i32) -> Rational {
    if e >= 0 {
        num_traits::pow(base.clone(), e as usize)
    } else {
        Rational::one() / num_traits::pow(base.clone(), (-e) as usize)
    }
}

impl Reaction {
    pub fn delta(&self) -> (i64, i64) {
        (
            self.products[0] as i64 - self.reactants[0] as i64,
            self.products[1] as i64 - self.reactants[1] as i64,
        )
    }

    pub fn constant(&self, u: &Rational, v: &Rational) -> Rational {
        &self.rate * ipow(u, self.u_power) * ipow(v, self.v_power)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSpeciesNetwork {
    pub reactions: Vec<Reaction>,
    pub u: Rational,
    pub v: Rational,
}

impl TwoSpeciesNetwork {
    pub fn new(reactions: Vec<Reaction>, u: Rational, v: Rational) -> Result<Self> {
        if !u.is_positive() || !v.is_positive() {
            return Err(Error::InvalidNetwork("U and V must be positive".into()));
        }
        for (i, r) in reactions.iter().enumerate() {
            if r.rate.is_negative() {
                return Err(Error::InvalidNetwork(format!("reaction {i} has a negative rate")));
            }
            if r.reactants == r.products {
                return Err(Error::InvalidNetwork(format!("reaction {i} changes nothing")));
            }
            match r.tier {
                Tier::Fast if r.reactants[0] != r.products[0] => {
                    return Err(Error::InvalidNetwork(format!(
                        "fast reaction {i} changes X; fast reactions must be catalyzed by X"
                    )))
                }
                Tier::Slow if r.reactants[1] != r.products[1] => {
                    return Err(Error::InvalidNetwork(format!("slow reaction {i} changes Y")))
                }
                _ => {}
            }
        }
        Ok(Self { reactions, u, v })
    }

    pub fn tier(&self, tier: Tier) -> impl Iterator<Item = &Reaction> {
        self.reactions.iter().filter(move |r| r.tier == tier)
    }

    /// Exact drift of `Y` at fixed `x` as a polynomial in `y` (falling basis).
    pub fn fast_drift(&self, x: u64) -> FallingFactorialPoly {
        self.tier(Tier::Fast).fold(FallingFactorialPoly::zero(), |acc, r| {
            let k = r.constant(&self.u, &self.v)
                * Rational::from_integer(crate::rates::falling_factorial(x, r.reactants[0] as u64))
                * from_u64(r.delta().1.unsigned_abs())
                * if r.delta().1 < 0 { -Rational::one() } else { Rational::one() };
            acc.add(&FallingFactorialPoly::term(k, r.reactants[1] as usize))
        })
    }
}

/// Quasi-steady map `g = f1 / f2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QssMap {
    pub f1: FallingFactorialPoly,
    pub f2: FallingFactorialPoly,
    pub g: RationalRate,
}

impl QssMap {
    pub fn new(f1: FallingFactorialPoly, f2: FallingFactorialPoly) -> Result<Self> {
        let g = RationalRate::new(f1.clone(), f2.clone())?;
        let window = crate::rates::default_positivity_window(f1.degree().unwrap_or(0).max(f2.degree().unwrap_or(0)));
        if let Some(x) = (0..window).find(|&x| f1.eval(x).is_negative()) {
            return Err(Error::InvalidNetwork(format!("f1 is negative at x = {x}")));
        }
        if f1.coeffs().last().is_some_and(Signed::is_negative) {
            return Err(Error::InvalidNetwork("f1 is eventually negative".into()));
        }
        Ok(Self { f1, f2, g })
    }
}

/// Fast tier whose scaled `Y` drift is `U y (f1(x) - f2(x) y)`.
///
/// Each coefficient `s_i` of `f1` yields `iX + Y -> iX + 2Y` (or `iX` when
/// negative) at rate `|s_i| U`; each `r_j` of `f2` yields
/// `jX + 2Y -> jX + Y` (or `jX + 3Y` when negative) at rate `|r_j| U / V`.
pub fn build_fast_network(q: &QssMap, u: Rational, v: Rational) -> Result<TwoSpeciesNetwork> {
    let mut reactions = Vec::new();
    for (i, s) in q.f1.coeffs().iter().enumerate() {
        if s.is_zero() {
            continue;
        }
        let i = i as u32;
        let y_out = if s.is_positive() { 2 } else { 0 };
        reactions.push(Reaction {
            reactants: [i, 1],
            products: [i, y_out],
            rate: s.abs(),
            u_power: 1,
            v_power: 0,
            tier: Tier::Fast,
        });
    }
    for (j, r) in q.f2.coeffs().iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        let j = j as u32;
        let y_out = if r.is_positive() { 1 } else { 3 };
        reactions.push(Reaction {
            reactants: [j, 2],
            products: [j, y_out],
            rate: r.abs(),
            u_power: 1,
            v_power: -1,
            tier: Tier::Fast,
        });
    }
    TwoSpeciesNetwork::new(reactions, u, v)
}

/// Reduced chain on `X`: every slow propensity `k x^(a) y^(b)` with `b <= 1`
/// becomes `k x^(a) (V g(x))^b`.
pub fn reduce(n: &TwoSpeciesNetwork, q: &QssMap) -> Result<CtmcModel> {
    let mut jumps = Vec::new();
    for r in n.tier(Tier::Slow) {
        let (dx, _) = r.delta();
        let k = r.constant(&n.u, &n.v);
        let x_part = FallingFactorialPoly::term(Rational::one(), r.reactants[0] as usize);
        let rate = match r.reactants[1] {
            0 => RationalRate::polynomial(x_part.scale(&k)),
            1 => RationalRate::new(q.f1.mul(&x_part).scale(&(k * &n.v)), q.f2.clone())?,
            b => {
                return Err(Error::UnsupportedReduction(format!(
                    "slow reaction uses {b} copies of Y; only linear catalysis is supported"
                )))
            }
        };
        jumps.push(JumpRate::new(dx, rate)?);
    }
    if jumps.is_empty() {
        return Err(Error::InvalidNetwork("no slow reactions".into()));
    }
    CtmcModel::merged(jumps)
}

// ---------------------------------------------------------------------------
// Full two-species simulation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory2 {
    pub times: Vec<f64>,
    pub states: Vec<(u64, u64)>,
    pub terminated_by: Termination,
}

struct Compiled {
    k: Vec<f64>,
    react: Vec<[u32; 2]>,
    delta: Vec<(i64, i64)>,
    fast: Vec<bool>,
}

impl Compiled {
    fn new(n: &TwoSpeciesNetwork) -> Self {
        Self {
            k: n.reactions.iter().map(|r| to_f64(&r.constant(&n.u, &n.v))).collect(),
            react: n.reactions.iter().map(|r| r.reactants).collect(),
            delta: n.reactions.iter().map(Reaction::delta).collect(),
            fast: n.reactions.iter().map(|r| r.tier == Tier::Fast).collect(),
        }
    }
}

fn ff(x: u64, n: u32) -> f64 {
    (0..n as u64).map(|i| x.saturating_sub(i) as f64).product()
}

fn run2(
    c: &Compiled,
    x0: (u64, u64),
    t_end: f64,
    rng: &mut ChaCha8Rng,
    jump_cap: u64,
    mut on_jump: impl FnMut(f64, (u64, u64)),
) -> Termination {
    let mut props = vec![0.0; c.k.len()];
    let (mut x, mut y) = x0;
    let mut t = 0.0;
    let mut jumps = 0u64;
    loop {
        let mut q = 0.0;
        for (i, p) in props.iter_mut().enumerate() {
            let [a, b] = c.react[i];
            *p = c.k[i] * ff(x, a) * ff(y, b);
            q += *p;
        }
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
        let mut i = 0;
        while i + 1 < props.len() && target >= props[i] {
            target -= props[i];
            i += 1;
        }
        while props[i] == 0.0 {
            i -= 1;
        }
        let (dx, dy) = c.delta[i];
        assert!(!c.fast[i] || dx == 0, "fast reaction changed X");
        x = (x as i64 + dx) as u64;
        y = (y as i64 + dy) as u64;
        t = tn;
        jumps += 1;
        on_jump(t, (x, y));
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn simulate_full(n: &TwoSpeciesNetwork, x0: (u64, u64), t_end: f64, seed: u64) -> Trajectory2 {
    let c = Compiled::new(n);
    let mut rng = stream_rng(seed, 0);
    let mut times = vec![0.0];
    let mut states = vec![x0];
    let terminated_by = run2(&c, x0, t_end, &mut rng, u64::MAX, |t, s| {
        times.push(t);
        states.push(s);
    });
    Trajectory2 { times, states, terminated_by }
}

/// Time average of `Y/V` over `[delta, t_end]` along one trajectory.
pub fn time_averaged_y(n: &TwoSpeciesNetwork, x0: (u64, u64), delta: f64, t_end: f64, seed: u64) -> f64 {
    let c = Compiled::new(n);
    let mut rng = stream_rng(seed, 0);
    let v = to_f64(&n.v);
    let (mut last_t, mut last_y, mut acc) = (0.0f64, x0.1 as f64, 0.0);
    let add = |from: f64, to: f64, y: f64, acc: &mut f64| {
        let (a, b) = (from.max(delta), to.min(t_end));
        if b > a {
            *acc += (b - a) * y;
        }
    };
    run2(&c, x0, t_end, &mut rng, u64::MAX, |t, (_, y)| {
        add(last_t, t, last_y, &mut acc);
        last_t = t;
        last_y = y as f64;
    });
    add(last_t, t_end, last_y, &mut acc);
    acc / ((t_end - delta) * v)
}

/// X-component of each full-system run at each grid time.
pub fn sample_full_grid(n: &TwoSpeciesNetwork, x0: (u64, u64), times: &[f64], n_traj: usize, seed: u64) -> Vec<Vec<u32>> {
    let c = Compiled::new(n);
    let t_end = times.last().copied().unwrap_or(0.0);
    (0..n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut out = Vec::with_capacity(times.len());
            let mut current = x0.0;
            let term = run2(&c, x0, t_end, &mut rng, u64::MAX, |t, (x, _)| {
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
pub struct MomentRow {
    pub t: f64,
    pub mean_full: f64,
    pub mean_reduced: f64,
    pub var_full: f64,
    pub var_reduced: f64,
    pub rel_mean: f64,
    pub rel_var: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub rows: Vec<MomentRow>,
    pub max_rel_mean: f64,
    pub max_rel_var: f64,
}

/// `|a - b| / |b|`, zero when both vanish.
pub fn relative_difference(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

pub fn compare_stats(full: &EnsembleStats, reduced: &EnsembleStats) -> MomentComparison {
    let rows: Vec<MomentRow> = full
        .times
        .iter()
        .enumerate()
        .map(|(k, &t)| MomentRow {
            t,
            mean_full: full.mean[k],
            mean_reduced: reduced.mean[k],
            var_full: full.variance[k],
            var_reduced: reduced.variance[k],
            rel_mean: relative_difference(full.mean[k], reduced.mean[k]),
            rel_var: relative_difference(full.variance[k], reduced.variance[k]),
        })
        .collect();
    MomentComparison {
        max_rel_mean: rows.iter().map(|r| r.rel_mean).fold(0.0, f64::max),
        max_rel_var: rows.iter().map(|r| r.rel_var).fold(0.0, f64::max),
        rows,
    }
}

/// Mean and variance of `X` in the full network and in the reduced chain.
///
/// The two ensembles use different seeds so their errors are independent.
pub fn compare_moments(
    n: &TwoSpeciesNetwork,
    reduced: &CtmcModel,
    x0: (u64, u64),
    times: &[f64],
    n_traj: usize,
    seed: u64,
) -> Result<MomentComparison> {
    let full_samples = sample_full_grid(n, x0, times, n_traj, seed);
    let full = ensemble_stats_from_samples(&full_samples, times, seed)?;
    let red = ensemble(reduced, x0.0, times, n_traj, seed.wrapping_add(1), DEFAULT_JUMP_CAP)?;
    Ok(compare_stats(&full, &red))
}

// ---------------------------------------------------------------------------
// Network files
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingEntry {
    #[serde(rename = "U")]
    pub u: String,
    #[serde(rename = "V")]
    pub v: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QssEntry {
    pub f1: Vec<String>,
    pub f2: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReactionEntry {
    pub reactants: [u32; 2],
    pub products: [u32; 2],
    pub rate: String,
    #[serde(default)]
    pub u_power: i32,
    #[serde(default)]
    pub v_power: i32,
    pub tier: Tier,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub scaling: ScalingEntry,
    pub qss: QssEntry,
    pub reactions: Vec<ReactionEntry>,
}

fn parse_poly(v: &[String]) -> Result<FallingFactorialPoly> {
    Ok(FallingFactorialPoly::new(v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?))
}

impl NetworkFile {
    pub fn parse(text: &str) -> Result<(TwoSpeciesNetwork, QssMap)> {
        let f: NetworkFile = serde_json::from_str(text)?;
        let reactions = f
            .reactions
            .iter()
            .map(|r| {
                Ok(Reaction {
                    reactants: r.reactants,
                    products: r.products,
                    rate: parse_rational(&r.rate)?,
                    u_power: r.u_power,
                    v_power: r.v_power,
                    tier: r.tier,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let net = TwoSpeciesNetwork::new(reactions, parse_rational(&f.scaling.u)?, parse_rational(&f.scaling.v)?)?;
        let q = QssMap::new(parse_poly(&f.qss.f1)?, parse_poly(&f.qss.f2)?)?;
        Ok((net, q))
    }
}

/// The three-plus-three reaction example with `U = 100`, `V = 1000`.
pub fn example_network(u: Rational, v: Rational) -> Result<(TwoSpeciesNetwork, QssMap)> {
    let r = |reactants: [u32; 2], products: [u32; 2], rate: i64, u_power, v_power, tier| Reaction {
        reactants,
        products,
        rate: crate::rates::int(rate),
        u_power,
        v_power,
        tier,
    };
    let reactions = vec![
        r([0, 0], [2, 0], 1, 0, 0, Tier::Slow),
        r([2, 1], [1, 1], 2, 0, -1, Tier::Slow),
        r([1, 1], [0, 1], 6, 0, -1, Tier::Slow),
        r([0, 0], [0, 1], 1, 1, 1, Tier::Fast),
        r([2, 1], [2, 0], 1, 1, 0, Tier::Fast),
        r([0, 1], [0, 0], 1, 1, 0, Tier::Fast),
    ];
    let q = QssMap::new(FallingFactorialPoly::from_ints(&[1]), FallingFactorialPoly::from_ints(&[1, 0, 1]))?;
    Ok((TwoSpeciesNetwork::new(reactions, u, v)?, q))
}
