//! Drift, variance, the indices `(alpha, gamma, theta, R)` and generator
//! probes.
//!
//! All rate algebra is exact. Floating point enters only when a logarithm
//! or exponential is needed, and only at the last step.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CtmcModel;
use crate::rates::{from_u64, int, serde_rational, to_f64, Rational, RationalFn};

/// Exact drift `m(x)` and variance `v(x)` of a model.
///
/// Per-state values honour the boundary clamp. The symbolic forms describe
/// the unclamped rational functions, which coincide with the clamped ones
/// for `x >= max |eta|`.
#[derive(Clone, Debug)]
pub struct MomentFns {
    model: CtmcModel,
    drift: RationalFn,
    variance: RationalFn,
}

impl MomentFns {
    pub fn m_at(&self, x: u64) -> Rational {
        self.model
            .jumps()
            .iter()
            .map(|j| int(j.eta) * j.effective(x))
            .fold(Rational::zero(), |a, b| a + b)
    }

    pub fn v_at(&self, x: u64) -> Rational {
        let half = Rational::new(1.into(), 2.into());
        self.model
            .jumps()
            .iter()
            .map(|j| int(j.eta * j.eta) * j.effective(x))
            .fold(Rational::zero(), |a, b| a + b)
            * half
    }

    /// `m` as a rational function, valid beyond the clamped region.
    pub fn drift_fn(&self) -> &RationalFn {
        &self.drift
    }

    pub fn variance_fn(&self) -> &RationalFn {
        &self.variance
    }
}

pub fn moments(model: &CtmcModel) -> MomentFns {
    let mut drift = RationalFn::zero();
    let mut variance = RationalFn::zero();
    for j in model.jumps() {
        let f = j.rate.to_fn();
        drift = drift.add(&f.scale(&int(j.eta)));
        variance = variance.add(&f.scale(&Rational::new((j.eta * j.eta).into(), 2.into())));
    }
    MomentFns {
        model: model.clone(),
        drift,
        variance,
    }
}

/// The four numbers that decide the classification for Laurent-type rates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentIndices {
    #[serde(with = "serde_rational")]
    pub alpha: Rational,
    #[serde(with = "serde_rational")]
    pub gamma: Rational,
    #[serde(with = "serde_rational")]
    pub theta: Rational,
    #[serde(rename = "R")]
    pub r: i64,
}

impl LaurentIndices {
    pub fn new(alpha: Rational, gamma: Rational, theta: Rational, r: i64) -> Result<Self> {
        if !theta.is_positive() {
            return Err(Error::NonPositiveTheta(theta.to_string()));
        }
        Ok(Self { alpha, gamma, theta, r })
    }
}

pub fn indices(model: &CtmcModel) -> Result<LaurentIndices> {
    let series: Vec<_> = model
        .jumps()
        .iter()
        .map(|j| (j.eta, j.rate.to_fn().laurent_series(2)))
        .collect();
    let r = series
        .iter()
        .filter_map(|(_, s)| s.as_ref().map(|s| s.degree))
        .max()
        .ok_or(Error::AllRatesZero)?;

    let mut alpha = Rational::zero();
    let mut gamma = Rational::zero();
    let mut theta = Rational::zero();
    for (eta, s) in &series {
        let Some(s) = s else { continue };
        // A jump of lower degree has a_eta = 0 at the common degree R.
        let a = s.coeff_at(r);
        let b = s.coeff_at(r - 1);
        alpha += int(*eta) * &a;
        gamma += int(*eta) * &b;
        theta += int(eta * eta) * &a;
    }
    theta /= int(2);
    LaurentIndices::new(alpha, gamma, theta, r)
}

// ---------------------------------------------------------------------------
// H_p and J
// ---------------------------------------------------------------------------

fn exact_f64(p: f64) -> Rational {
    Rational::from_float(p).expect("finite probe parameter")
}

/// `H_p(x) = log(x) (m(x) x - p v(x)) / v(x)`.
pub fn hp(model: &CtmcModel, p: f64, x: u64) -> Result<f64> {
    let mf = moments(model);
    let v = mf.v_at(x);
    if v.is_zero() {
        return Err(Error::ZeroVariance { state: x });
    }
    let ratio = (mf.m_at(x) * from_u64(x) - exact_f64(p) * &v) / v;
    Ok((x as f64).ln() * to_f64(&ratio))
}

/// `J(x) = m(x) x / v(x)`.
pub fn j(model: &CtmcModel, x: u64) -> Result<f64> {
    let mf = moments(model);
    let v = mf.v_at(x);
    if v.is_zero() {
        return Err(Error::ZeroVariance { state: x });
    }
    Ok(to_f64(&(mf.m_at(x) * from_u64(x) / v)))
}

/// Limit of a function along `x -> infinity`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Limit {
    NegInf,
    Finite(#[serde(with = "serde_rational")] Rational),
    PosInf,
}

impl Limit {
    fn from_sign(r: &Rational) -> Self {
        if r.is_positive() {
            Self::PosInf
        } else if r.is_negative() {
            Self::NegInf
        } else {
            Self::Finite(Rational::zero())
        }
    }

    pub fn lt(&self, c: &Rational) -> bool {
        match self {
            Self::NegInf => true,
            Self::Finite(l) => l < c,
            Self::PosInf => false,
        }
    }

    pub fn gt(&self, c: &Rational) -> bool {
        match self {
            Self::NegInf => false,
            Self::Finite(l) => l > c,
            Self::PosInf => true,
        }
    }
}

/// Limit of `H_p` under Laurent asymptotics: `(log x)(alpha x + gamma - p theta)/theta`.
pub fn hp_limit(ix: &LaurentIndices, p: &Rational) -> Limit {
    if !ix.alpha.is_zero() {
        return Limit::from_sign(&ix.alpha);
    }
    // The O(1/x) remainder times log x vanishes when gamma = p theta.
    Limit::from_sign(&(&ix.gamma - p * &ix.theta))
}

/// Limit of `J = m x / v`.
pub fn j_limit(ix: &LaurentIndices) -> Limit {
    if !ix.alpha.is_zero() {
        return Limit::from_sign(&ix.alpha);
    }
    Limit::Finite(&ix.gamma / &ix.theta)
}

/// Limit of `J(x)/x = m/v`.
pub fn j_over_x_limit(ix: &LaurentIndices) -> Rational {
    &ix.alpha / &ix.theta
}

// ---------------------------------------------------------------------------
// Generator probes
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorProbe {
    /// `x^p (log x)^q` for `x > 1`, and `1` for `x <= 1`.
    PowerLog { p: f64, q: f64 },
    /// `e^(p x)`.
    Exponential { p: f64 },
}

impl GeneratorProbe {
    pub fn value(&self, x: i64) -> f64 {
        match *self {
            Self::PowerLog { p, q } => {
                if x <= 1 {
                    1.0
                } else {
                    let xf = x as f64;
                    xf.powf(p) * xf.ln().powf(q)
                }
            }
            Self::Exponential { p } => (p * x as f64).exp(),
        }
    }

    /// `(f(x + eta) - f(x)) / f(x)`, computed without cancellation.
    fn relative_increment(&self, x: i64, eta: i64) -> f64 {
        let y = x + eta;
        match *self {
            Self::PowerLog { p, q } => {
                if x <= 1 || y <= 1 {
                    return self.value(y) / self.value(x) - 1.0;
                }
                let t = eta as f64 / x as f64;
                let mut log_ratio = p * t.ln_1p();
                if q != 0.0 {
                    let lx = (x as f64).ln();
                    log_ratio += q * (t.ln_1p() / lx).ln_1p();
                }
                log_ratio.exp_m1()
            }
            Self::Exponential { p } => (p * eta as f64).exp_m1(),
        }
    }
}

/// `A f(x) / f(x)`; avoids overflow for exponential probes.
pub fn apply_generator_relative(model: &CtmcModel, probe: &GeneratorProbe, x: u64) -> f64 {
    model
        .jumps()
        .iter()
        .zip(model.rates_at_f64(x))
        .filter(|(_, r)| *r != 0.0)
        .map(|(j, r)| r * probe.relative_increment(x as i64, j.eta))
        .sum()
}

/// `A f(x) = sum_eta lambda_eta(x) (f(x + eta) - f(x))`.
pub fn apply_generator(model: &CtmcModel, probe: &GeneratorProbe, x: u64) -> f64 {
    apply_generator_relative(model, probe, x) * probe.value(x as i64)
}

/// Two-term prediction of `A f(x)`, divided by `e^(p x)` for exponential
/// probes.
pub fn predicted_generator(mf: &MomentFns, probe: &GeneratorProbe, x: u64) -> f64 {
    let m = to_f64(&mf.m_at(x));
    let v = to_f64(&mf.v_at(x));
    let xf = x as f64;
    match *probe {
        GeneratorProbe::PowerLog { p, q } => {
            let l = xf.ln();
            let base = xf.powf(p - 2.0);
            let first = p * l.powf(q) * (m * xf + (p - 1.0) * v);
            let second = q * l.powf(q - 1.0) * (m * xf + (2.0 * p - 1.0) * v + (q - 1.0) * v / l);
            base * (first + second)
        }
        GeneratorProbe::Exponential { p } => p * m + p * p * v,
    }
}

/// Whether the prediction has a nonzero leading term, decided from the
/// exact indices rather than from floating values.
pub fn leading_term_nonzero(ix: &LaurentIndices, probe: &GeneratorProbe) -> bool {
    match *probe {
        GeneratorProbe::PowerLog { p, q } => {
            let (p, q) = (exact_f64(p), exact_f64(q));
            if !ix.alpha.is_zero() {
                return !p.is_zero() || !q.is_zero();
            }
            let one = Rational::one();
            let two = int(2);
            let c_l = &p * (&ix.gamma + (&p - &one) * &ix.theta);
            let c_0 = &q * (&ix.gamma + (&two * &p - &one) * &ix.theta);
            let c_inv = &q * (&q - &one) * &ix.theta;
            !(c_l.is_zero() && c_0.is_zero() && c_inv.is_zero())
        }
        GeneratorProbe::Exponential { p } => {
            let p = exact_f64(p);
            !(p.is_zero() || (&ix.alpha + &p * &ix.theta).is_zero())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub x: u64,
    pub direct: f64,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub probe: GeneratorProbe,
    pub leading_nonzero: bool,
    pub rows: Vec<ResidualRow>,
}

/// Direct generator values against the two-term prediction on a grid.
///
/// For exponential probes both columns are divided by `e^(p x)`.
pub fn expansion_residual(model: &CtmcModel, probe: &GeneratorProbe, grid: &[u64]) -> Result<ResidualReport> {
    let mf = moments(model);
    let ix = indices(model)?;
    let rows = grid
        .iter()
        .map(|&x| {
            let direct = match probe {
                GeneratorProbe::Exponential { .. } => apply_generator_relative(model, probe, x),
                GeneratorProbe::PowerLog { .. } => apply_generator(model, probe, x),
            };
            let predicted = predicted_generator(&mf, probe, x);
            ResidualRow {
                x,
                direct,
                predicted,
                ratio: predicted / direct,
            }
        })
        .collect();
    Ok(ResidualReport {
        probe: *probe,
        leading_nonzero: leading_term_nonzero(&ix, probe),
        rows,
    })
}
