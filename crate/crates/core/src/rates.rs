//! Exact arithmetic for transition rates.
//!
//! Rates are ratios of polynomials written in the falling-factorial basis
//! `x^(i) = x!/(x-i)!` (zero when `x < i`), the natural basis for
//! mass-action kinetics. Asymptotic work happens in the ordinary monomial
//! basis, so both representations are provided together with exact basis
//! changes. Nothing in this module touches floating point except the
//! explicit `*_f64` conversions.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used throughout the crate.
pub type Rational = BigRational;

/// Default size of the denominator positivity window: `10 * degree + 100`.
pub fn default_positivity_window(degree: usize) -> u64 {
    10 * degree as u64 + 100
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse `"3/2"`, `"-4"` or `"0"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    t.parse::<Rational>()
        .map_err(|_| Error::Parse(format!("not an exact rational: {s:?}")))
}

/// Serde adapter writing rationals as strings such as `"3/2"`.
pub mod serde_rational {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `x!/(x-n)!` for `x >= n`, otherwise zero.
pub fn falling_factorial(x: u64, n: u64) -> BigInt {
    if n > x {
        return BigInt::zero();
    }
    (0..n).fold(BigInt::one(), |acc, k| acc * BigInt::from(x - k))
}

fn trim(coeffs: &mut Vec<Rational>) {
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
}

// ---------------------------------------------------------------------------
// Monomial basis
// ---------------------------------------------------------------------------

/// Polynomial `sum_j q_j x^j` with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        trim(&mut coeffs);
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_u64(&self, x: u64) -> Rational {
        self.eval(&from_u64(x))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|q| q * c).collect())
    }

    /// The polynomial `x -> p(x + c)`.
    pub fn shift(&self, c: &Rational) -> Self {
        // Horner in the ring of polynomials: p(x+c) = (..(q_n (x+c) + q_{n-1})(x+c) ..)
        let step = Poly::new(vec![c.clone(), Rational::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, q| &(&acc * &step) + &Poly::constant(q.clone()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Interpolate values at the nodes `0, 1, ..., n` by a monomial polynomial.
///
/// Newton divided differences on unit-spaced nodes reduce to forward
/// differences divided by `k!`; the Newton form is then expanded in place.
pub fn interpolate_monomial(values: &[Rational]) -> Poly {
    let newton = newton_coefficients(values);
    let mut acc = Poly::zero();
    for (k, c) in newton.iter().enumerate().rev() {
        // acc <- acc * (x - k) + c
        let factor = Poly::new(vec![-from_u64(k as u64), Rational::one()]);
        acc = &(&acc * &factor) + &Poly::constant(c.clone());
    }
    acc
}

/// Forward differences at 0 divided by `k!`, i.e. the coefficients of the
/// interpolant in the falling-factorial basis.
fn newton_coefficients(values: &[Rational]) -> Vec<Rational> {
    let mut diffs: Vec<Rational> = values.to_vec();
    let mut out = Vec::with_capacity(values.len());
    let mut factorial = BigInt::one();
    for k in 0..values.len() {
        if k > 0 {
            factorial *= BigInt::from(k as u64);
        }
        out.push(&diffs[0] / Rational::from_integer(factorial.clone()));
        for i in 0..diffs.len().saturating_sub(1) {
            diffs[i] = &diffs[i + 1] - &diffs[i];
        }
        diffs.pop();
    }
    out
}

// ---------------------------------------------------------------------------
// Falling-factorial basis
// ---------------------------------------------------------------------------

/// Polynomial `sum_i s_i x^(i)` in the falling-factorial basis.
///
/// Trailing zero coefficients are dropped, so equal polynomials compare
/// equal coefficient by coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FallingFactorialPoly {
    coeffs: Vec<Rational>,
}

impl FallingFactorialPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        trim(&mut coeffs);
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^(n)`.
    pub fn term(c: Rational, n: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: u64) -> Rational {
        let mut acc = Rational::zero();
        let mut ff = BigInt::one();
        for (i, s) in self.coeffs.iter().enumerate() {
            if i > 0 {
                if (i as u64) > x {
                    break;
                }
                ff *= BigInt::from(x - (i as u64 - 1));
            }
            if !s.is_zero() {
                acc += s * Rational::from_integer(ff.clone());
            }
        }
        acc
    }

    /// Monomial coefficients `q_j` with `sum_j q_j x^j = sum_i s_i x^(i)`.
    pub fn to_monomial(&self) -> Poly {
        let Some(deg) = self.degree() else {
            return Poly::zero();
        };
        let values: Vec<Rational> = (0..=deg as u64).map(|x| self.eval(x)).collect();
        interpolate_monomial(&values)
    }

    pub fn from_monomial(p: &Poly) -> Self {
        let Some(deg) = p.degree() else {
            return Self::zero();
        };
        let values: Vec<Rational> = (0..=deg as u64).map(|x| p.eval_u64(x)).collect();
        Self::new(newton_coefficients(&values))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|s| s * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |v: &[Rational], k: usize| v.get(k).cloned().unwrap_or_else(Rational::zero);
        Self::new((0..n).map(|k| get(&self.coeffs, k) + get(&other.coeffs, k)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_monomial(&(&self.to_monomial() * &other.to_monomial()))
    }
}

impl fmt::Display for FallingFactorialPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, s) in self.coeffs.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{s}")?,
                _ => write!(f, "{s}*x^({i})")?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Laurent-type expansions
// ---------------------------------------------------------------------------

/// Leading asymptotics `a x^R + b x^(R-1) + O(x^(R-2))` of a rate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LaurentExpansion {
    /// The rate is identically zero; its degree is minus infinity.
    Zero,
    Terms {
        degree: i64,
        a: Rational,
        b: Rational,
        /// The remainder is certified to be `O(x^(R-2))`.
        exact_tail: bool,
    },
}

impl LaurentExpansion {
    pub fn degree(&self) -> Option<i64> {
        match self {
            Self::Zero => None,
            Self::Terms { degree, .. } => Some(*degree),
        }
    }
}

/// Coefficients of `x^R, x^(R-1), ..., x^(R-k+1)` of a rational function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    pub degree: i64,
    pub coeffs: Vec<Rational>,
}

impl LaurentSeries {
    /// Coefficient of `x^power`, zero when the power is above the degree or
    /// beyond the computed terms.
    pub fn coeff_at(&self, power: i64) -> Rational {
        let k = self.degree - power;
        if k < 0 {
            return Rational::zero();
        }
        self.coeffs.get(k as usize).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Signed rational function `num(x) / den(x)` in the monomial basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    pub fn zero() -> Self {
        Self {
            num: Poly::zero(),
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn polynomial(p: Poly) -> Self {
        Self {
            num: p,
            den: Poly::constant(Rational::one()),
        }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        (!d.is_zero()).then(|| self.num.eval(x) / d)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            return Self {
                num: &self.num + &other.num,
                den: self.den.clone(),
            };
        }
        Self {
            num: &(&self.num * &other.den) + &(&other.num * &self.den),
            den: &self.den * &other.den,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
        }
    }

    /// `x -> f(x + c)`.
    pub fn shift(&self, c: &Rational) -> Self {
        Self {
            num: self.num.shift(c),
            den: self.den.shift(c),
        }
    }

    /// Same function, checked by cross multiplication.
    pub fn same_function(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    /// First `terms` coefficients of the expansion at infinity; `None` for
    /// the zero function.
    pub fn laurent_series(&self, terms: usize) -> Option<LaurentSeries> {
        let n = self.num.degree()?;
        let d = self.den.degree().expect("denominator is nonzero");
        // Reverse both polynomials (y = 1/x) and divide the power series.
        let num_rev = |k: usize| {
            if k <= n {
                self.num.coeff(n - k)
            } else {
                Rational::zero()
            }
        };
        let den_rev = |k: usize| self.den.coeff(d - k);
        let lead = den_rev(0);
        let mut coeffs: Vec<Rational> = Vec::with_capacity(terms);
        for k in 0..terms {
            let mut acc = num_rev(k);
            for j in 1..=k.min(d) {
                acc -= den_rev(j) * &coeffs[k - j];
            }
            coeffs.push(acc / &lead);
        }
        Some(LaurentSeries {
            degree: n as i64 - d as i64,
            coeffs,
        })
    }

    pub fn laurent(&self) -> LaurentExpansion {
        match self.laurent_series(2) {
            None => LaurentExpansion::Zero,
            Some(s) => LaurentExpansion::Terms {
                degree: s.degree,
                a: s.coeffs[0].clone(),
                b: s.coeffs[1].clone(),
                exact_tail: true,
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Transition rates
// ---------------------------------------------------------------------------

/// A transition rate `numerator(x) / denominator(x)`, both in the
/// falling-factorial basis, with a denominator that is strictly positive on
/// the non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalRate {
    numerator: FallingFactorialPoly,
    denominator: FallingFactorialPoly,
}

impl RationalRate {
    /// Checks denominator positivity on the default window.
    pub fn new(numerator: FallingFactorialPoly, denominator: FallingFactorialPoly) -> Result<Self> {
        let window = default_positivity_window(denominator.degree().unwrap_or(0));
        Self::with_window(numerator, denominator, window)
    }

    /// Positivity is checked exhaustively on `0..window`, and the leading
    /// coefficient must be positive so the sign is settled at infinity.
    pub fn with_window(
        numerator: FallingFactorialPoly,
        denominator: FallingFactorialPoly,
        window: u64,
    ) -> Result<Self> {
        let Some(lead) = denominator.coeffs().last() else {
            return Err(Error::ZeroDenominator);
        };
        // The leading falling-factorial and monomial coefficients coincide.
        if !lead.is_positive() {
            return Err(Error::DenominatorLeadingSign);
        }
        for x in 0..window {
            if !denominator.eval(x).is_positive() {
                return Err(Error::NonPositiveDenominator { state: x });
            }
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    /// Monomial-basis constructor.
    pub fn from_monomial(numerator: &Poly, denominator: &Poly) -> Result<Self> {
        Self::new(
            FallingFactorialPoly::from_monomial(numerator),
            FallingFactorialPoly::from_monomial(denominator),
        )
    }

    pub fn polynomial(numerator: FallingFactorialPoly) -> Self {
        Self {
            numerator,
            denominator: FallingFactorialPoly::constant(Rational::one()),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::polynomial(FallingFactorialPoly::constant(c))
    }

    pub fn numerator(&self) -> &FallingFactorialPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &FallingFactorialPoly {
        &self.denominator
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn eval(&self, x: u64) -> Rational {
        self.numerator.eval(x) / self.denominator.eval(x)
    }

    pub fn eval_f64(&self, x: u64) -> f64 {
        to_f64(&self.eval(x))
    }

    pub fn to_fn(&self) -> RationalFn {
        RationalFn {
            num: self.numerator.to_monomial(),
            den: self.denominator.to_monomial(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            numerator: self.numerator.scale(c),
            denominator: self.denominator.clone(),
        }
    }

    /// Sum of two rates; denominators are kept as-is when they agree.
    pub fn add(&self, other: &Self) -> Self {
        if self.denominator == other.denominator {
            return Self {
                numerator: self.numerator.add(&other.numerator),
                denominator: self.denominator.clone(),
            };
        }
        Self {
            numerator: self
                .numerator
                .mul(&other.denominator)
                .add(&other.numerator.mul(&self.denominator)),
            denominator: self.denominator.mul(&other.denominator),
        }
    }

    /// Multiply the numerator by a polynomial that is non-negative on the
    /// state space.
    pub fn mul_poly(&self, p: &FallingFactorialPoly) -> Self {
        Self {
            numerator: self.numerator.mul(p),
            denominator: self.denominator.clone(),
        }
    }

    pub fn same_function(&self, other: &Self) -> bool {
        self.to_fn().same_function(&other.to_fn())
    }

    pub fn laurent(&self) -> LaurentExpansion {
        laurent_expand(self)
    }
}

impl fmt::Display for RationalRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}

/// Two-term expansion at infinity via long division of the monomial forms.
pub fn laurent_expand(r: &RationalRate) -> LaurentExpansion {
    r.to_fn().laurent()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ff(c: &[i64]) -> FallingFactorialPoly {
        FallingFactorialPoly::from_ints(c)
    }

    #[test]
    fn falling_factorial_values() {
        assert_eq!(falling_factorial(5, 2), BigInt::from(20));
        assert_eq!(falling_factorial(1, 3), BigInt::from(0));
        assert_eq!(falling_factorial(7, 0), BigInt::from(1));
        assert_eq!(falling_factorial(3, 3), BigInt::from(6));
    }

    #[test]
    fn to_monomial_small_cases() {
        assert_eq!(ff(&[0, 0, 1]).to_monomial(), Poly::from_ints(&[0, -1, 1]));
        assert_eq!(ff(&[1]).to_monomial(), Poly::from_ints(&[1]));
        assert_eq!(ff(&[]).to_monomial(), Poly::zero());
    }

    #[test]
    fn to_monomial_cubic_matches_pointwise_values() {
        // Expected value derived by solving the evaluation system at 0..3.
        let expected = Poly::from_ints(&[0, 2, -3, 1]);
        let p = ff(&[0, 0, 0, 1]);
        assert_eq!(p.to_monomial(), expected);
        for x in 0..=10u64 {
            assert_eq!(expected.eval_u64(x), p.eval(x));
        }
    }

    #[test]
    fn trailing_zeros_are_canonicalized() {
        let p = FallingFactorialPoly::new(vec![int(1), int(2), int(0), int(0)]);
        assert_eq!(p, ff(&[1, 2]));
        assert_eq!(p.degree(), Some(1));
    }

    #[test]
    fn shift_moves_argument() {
        let p = Poly::from_ints(&[1, 0, 1]); // x^2 + 1
        let q = p.shift(&int(-1)); // (x-1)^2 + 1
        assert_eq!(q, Poly::from_ints(&[2, -2, 1]));
    }

    #[test]
    fn denominator_positivity_is_enforced() {
        let num = ff(&[1]);
        assert!(matches!(
            RationalRate::new(num.clone(), ff(&[-1, 1])),
            Err(Error::NonPositiveDenominator { state: 0 })
        ));
        assert!(matches!(
            RationalRate::new(num.clone(), ff(&[1, -1])),
            Err(Error::DenominatorLeadingSign)
        ));
        assert!(matches!(
            RationalRate::new(num.clone(), ff(&[])),
            Err(Error::ZeroDenominator)
        ));
        // x^(2) - x + 1 = (x-1)^2 is zero at x = 1.
        assert!(matches!(
            RationalRate::new(num, ff(&[1, -2, 1])),
            Err(Error::NonPositiveDenominator { state: 1 })
        ));
    }

    #[test]
    fn laurent_of_michaelis_menten() {
        // V x^n / sum_j (x/K)^j with n = 2, V = 3, K = 2, cleared: V K^n x^n / sum_j K^(n-j) x^j
        let (n, v, k) = (2usize, int(3), int(2));
        let kn = int(4);
        let num = Poly::monomial(&v * &kn, n);
        let den = Poly::new((0..=n).map(|j| num_traits::pow(k.clone(), n - j)).collect());
        let r = RationalRate::from_monomial(&num, &den).unwrap();
        let LaurentExpansion::Terms { degree, a, b, exact_tail } = r.laurent() else {
            panic!("nonzero rate")
        };
        assert_eq!(degree, 0);
        assert_eq!(a, &v * &kn);
        assert_eq!(b, -(&v * &kn * &k));
        assert!(exact_tail);
    }

    #[test]
    fn laurent_of_reduced_fast_slow_rate() {
        let r = RationalRate::new(ff(&[0, 6, 2]), ff(&[1, 0, 1])).unwrap();
        assert_eq!(
            r.laurent(),
            LaurentExpansion::Terms { degree: 0, a: int(2), b: int(6), exact_tail: true }
        );
    }

    #[test]
    fn laurent_of_zero_rate_is_sentinel() {
        let r = RationalRate::polynomial(FallingFactorialPoly::zero());
        assert_eq!(r.laurent(), LaurentExpansion::Zero);
        assert_eq!(r.laurent().degree(), None);
    }

    #[test]
    fn laurent_negative_degree() {
        // x / (1 + x + x^2): Haldane with n = 1, V = K = 1.
        let r = RationalRate::from_monomial(&Poly::from_ints(&[0, 1]), &Poly::from_ints(&[1, 1, 1]))
            .unwrap();
        assert_eq!(
            r.laurent(),
            LaurentExpansion::Terms { degree: -1, a: int(1), b: int(-1), exact_tail: true }
        );
    }

    #[test]
    fn add_with_distinct_denominators() {
        let a = RationalRate::from_monomial(&Poly::from_ints(&[1]), &Poly::from_ints(&[1, 1])).unwrap();
        let b = RationalRate::from_monomial(&Poly::from_ints(&[0, 1]), &Poly::from_ints(&[2, 1])).unwrap();
        let s = a.add(&b);
        for x in 0..20 {
            assert_eq!(s.eval(x), a.eval(x) + b.eval(x));
        }
    }

    #[test]
    fn parse_and_display_rationals() {
        assert_eq!(parse_rational("3/2").unwrap(), rational(3, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), int(-4));
        assert!(parse_rational("1.5").is_err());
        assert_eq!(rational(6, 4).to_string(), "3/2");
    }
}
