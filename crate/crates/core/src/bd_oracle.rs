//! Classical criteria for unit birth-death chains, used as an independent
//! check on the drift classifier.
//!
//! Recurrence is decided by the divergence of `sum_x prod_{y<=x} d(y)/b(y)`
//! and positive recurrence by the convergence of the product-form measure
//! `sum_x prod_{y<=x} b(y-1)/d(y)`. Both series have term ratios that are
//! rational in `x`, so two Laurent coefficients of the ratio settle the
//! question: a ratio `A x^k (1 + c/x + O(x^-2))` gives a convergent series
//! when `k < 0`, when `k = 0, A < 1`, or when `k = 0, A = 1, c < -1`
//! (Gauss's test, which also covers `c = -1`).

use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::master_eq::Distribution;
use crate::model::{CtmcModel, DEFAULT_PROBE_WINDOW};
use crate::rates::{int, to_f64, Rational, RationalFn, RationalRate};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirthDeathModel {
    pub b: RationalRate,
    pub d: RationalRate,
}

impl BirthDeathModel {
    pub fn new(b: RationalRate, d: RationalRate) -> Result<Self> {
        for x in 0..=DEFAULT_PROBE_WINDOW {
            if !b.eval(x).is_positive() {
                return Err(Error::NotBirthDeath(format!("birth rate vanishes at x = {x}")));
            }
            if x >= 1 && !d.eval(x).is_positive() {
                return Err(Error::NotBirthDeath(format!("death rate vanishes at x = {x}")));
            }
        }
        Ok(Self { b, d })
    }

    /// Extract `b` and `d` from a model whose jump set is `{-1, +1}`.
    pub fn from_model(m: &CtmcModel) -> Result<Self> {
        let etas: Vec<i64> = m.jumps().iter().map(|j| j.eta).collect();
        if etas != [-1, 1] {
            return Err(Error::NotBirthDeath(format!("jump set {etas:?} is not {{-1, +1}}")));
        }
        Self::new(m.jumps()[1].rate.clone(), m.jumps()[0].rate.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RecurrenceOracle {
    Recurrent,
    Transient,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PositivityOracle {
    Positive,
    Null,
    Indeterminate,
}

/// Series verdict from the term ratio `f(x) = a_x / a_(x-1)`.
fn series_converges(ratio: &RationalFn) -> Result<Option<bool>> {
    let s = ratio
        .laurent_series(2)
        .ok_or_else(|| Error::NotBirthDeath("term ratio vanishes identically".into()))?;
    let lead = &s.coeffs[0];
    Ok(match s.degree {
        k if k < 0 => Some(true),
        k if k > 0 => Some(false),
        _ if *lead < Rational::one() => Some(true),
        _ if *lead > Rational::one() => Some(false),
        _ => Some(s.coeffs[1] < int(-1)),
    })
}

pub fn karlin_recurrence(m: &BirthDeathModel) -> Result<RecurrenceOracle> {
    let b = m.b.to_fn();
    let d = m.d.to_fn();
    let ratio = RationalFn::new(
        d.numerator() * b.denominator(),
        d.denominator() * b.numerator(),
    )?;
    Ok(match series_converges(&ratio)? {
        Some(true) => RecurrenceOracle::Transient,
        Some(false) => RecurrenceOracle::Recurrent,
        None => RecurrenceOracle::Indeterminate,
    })
}

pub fn bd_positive_recurrence(m: &BirthDeathModel) -> Result<PositivityOracle> {
    let b_prev = m.b.to_fn().shift(&int(-1));
    let d = m.d.to_fn();
    let ratio = RationalFn::new(
        b_prev.numerator() * d.denominator(),
        b_prev.denominator() * d.numerator(),
    )?;
    Ok(match series_converges(&ratio)? {
        Some(true) => PositivityOracle::Positive,
        Some(false) => PositivityOracle::Null,
        None => PositivityOracle::Indeterminate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BdVerdict {
    Transient,
    NullRecurrent,
    PositiveRecurrent,
    Indeterminate,
}

pub fn bd_classify(m: &BirthDeathModel) -> Result<BdVerdict> {
    Ok(match karlin_recurrence(m)? {
        RecurrenceOracle::Transient => BdVerdict::Transient,
        RecurrenceOracle::Indeterminate => BdVerdict::Indeterminate,
        RecurrenceOracle::Recurrent => match bd_positive_recurrence(m)? {
            PositivityOracle::Positive => BdVerdict::PositiveRecurrent,
            PositivityOracle::Null => BdVerdict::NullRecurrent,
            PositivityOracle::Indeterminate => BdVerdict::Indeterminate,
        },
    })
}

/// Product-form stationary law on `0..=n`, computed exactly.
pub fn bd_stationary(m: &BirthDeathModel, n: u64) -> Result<Distribution> {
    if n < 1 {
        return Err(Error::TruncationTooSmall(n));
    }
    let mut w = Vec::with_capacity(n as usize + 1);
    let mut acc = Rational::one();
    let mut total = Rational::one();
    w.push(acc.clone());
    for y in 1..=n {
        acc = acc * m.b.eval(y - 1) / m.d.eval(y);
        total += &acc;
        w.push(acc.clone());
    }
    Ok(Distribution {
        mass: w.iter().map(|v| to_f64(&(v / &total))).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Series {
    Recurrence,
    Positivity,
}

/// Natural logarithms of partial sums at `x = 10, 100, ...` up to `terms`.
///
/// A diagnostic only: numerical partial sums cannot decide convergence.
pub fn partial_sum_diagnostic(m: &BirthDeathModel, series: Series, terms: u64) -> Vec<(u64, f64)> {
    let mut log_term = 0.0f64;
    let mut log_sum = 0.0f64; // the x = 0 term is 1
    let mut out = Vec::new();
    let mut next = 10u64;
    for x in 1..=terms {
        let r = match series {
            Series::Recurrence => m.d.eval_f64(x) / m.b.eval_f64(x),
            Series::Positivity => m.b.eval_f64(x - 1) / m.d.eval_f64(x),
        };
        log_term += r.ln();
        let (hi, lo) = if log_sum > log_term { (log_sum, log_term) } else { (log_term, log_sum) };
        log_sum = hi + (lo - hi).exp().ln_1p();
        if x == next || x == terms {
            out.push((x, log_sum));
            next = next.saturating_mul(10);
        }
    }
    out
}
