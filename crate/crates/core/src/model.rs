//! Chain specification, validation and the standard kinetic rate laws.

use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::{
    from_u64, parse_rational, FallingFactorialPoly, Poly, Rational, RationalRate,
};

/// Default number of states scanned for negativity and connectivity.
pub const DEFAULT_PROBE_WINDOW: u64 = 200;

/// One jump size together with its rate function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpRate {
    pub eta: i64,
    pub rate: RationalRate,
}

impl JumpRate {
    pub fn new(eta: i64, rate: RationalRate) -> Result<Self> {
        if eta == 0 {
            return Err(Error::InvalidModel("jump size must be nonzero".into()));
        }
        Ok(Self { eta, rate })
    }

    /// Rate with the boundary clamp applied: zero whenever the jump would
    /// leave the non-negative integers.
    pub fn effective(&self, x: u64) -> Rational {
        if self.eta < 0 && x < self.eta.unsigned_abs() {
            Rational::zero()
        } else {
            self.rate.eval(x)
        }
    }
}

/// A chain on the non-negative integers with a finite jump set.
///
/// Jumps are kept sorted by size and sizes are unique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtmcModel {
    jumps: Vec<JumpRate>,
}

impl CtmcModel {
    pub fn new(mut jumps: Vec<JumpRate>) -> Result<Self> {
        if jumps.is_empty() {
            return Err(Error::InvalidModel("jump set is empty".into()));
        }
        jumps.sort_by_key(|j| j.eta);
        for w in jumps.windows(2) {
            if w[0].eta == w[1].eta {
                return Err(Error::InvalidModel(format!("duplicate jump {}", w[0].eta)));
            }
        }
        if let Some(j) = jumps.iter().find(|j| j.eta == 0) {
            return Err(Error::InvalidModel(format!("jump size {} is not allowed", j.eta)));
        }
        Ok(Self { jumps })
    }

    /// Build a model from jumps that may repeat, adding rates of equal size.
    pub fn merged(jumps: Vec<JumpRate>) -> Result<Self> {
        let mut out: Vec<JumpRate> = Vec::new();
        for j in jumps {
            match out.iter_mut().find(|o| o.eta == j.eta) {
                Some(o) => o.rate = o.rate.add(&j.rate),
                None => out.push(j),
            }
        }
        Self::new(out)
    }

    pub fn jumps(&self) -> &[JumpRate] {
        &self.jumps
    }

    pub fn jump(&self, eta: i64) -> Option<&JumpRate> {
        self.jumps.iter().find(|j| j.eta == eta)
    }

    /// Largest absolute jump size.
    pub fn max_jump(&self) -> u64 {
        self.jumps.iter().map(|j| j.eta.unsigned_abs()).max().unwrap_or(0)
    }

    /// Clamped rates at `x`, in jump order.
    pub fn rates_at(&self, x: u64) -> Vec<Rational> {
        self.jumps.iter().map(|j| j.effective(x)).collect()
    }

    pub fn rates_at_f64(&self, x: u64) -> Vec<f64> {
        self.rates_at(x).iter().map(crate::rates::to_f64).collect()
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        self.validate_with_window(DEFAULT_PROBE_WINDOW)
    }

    pub fn validate_with_window(&self, window: u64) -> Result<ValidationReport> {
        let mut warnings = Vec::new();

        for j in &self.jumps {
            for x in 0..=window {
                if j.effective(x).is_negative() {
                    return Err(Error::NegativeRate { eta: j.eta, state: x });
                }
            }
            // A negative leading coefficient makes the rate negative for all
            // large x even if the window looked fine.
            if let Some(lead) = j.rate.numerator().coeffs().last() {
                if lead.is_negative() {
                    let mut x = window.max(1);
                    while !j.rate.eval(x).is_negative() {
                        x *= 2;
                    }
                    return Err(Error::NegativeRate { eta: j.eta, state: x });
                }
            }
        }

        let mut clamp_confirmed = true;
        for j in self.jumps.iter().filter(|j| j.eta < 0) {
            for x in 0..j.eta.unsigned_abs().min(window + 1) {
                clamp_confirmed &= j.effective(x).is_zero();
            }
        }

        if self.jumps.iter().all(|j| j.rate.is_zero()) {
            return Err(Error::AllRatesZero);
        }

        let irreducible = self.strongly_connected(window);
        if !irreducible {
            if let Some(j) = self.jumps.iter().find(|j| j.rate.is_zero()) {
                return Err(Error::VanishingRate { eta: j.eta });
            }
            warnings.push(format!(
                "transition graph on 0..={window} is not strongly connected; \
                 the chain may not be irreducible"
            ));
        }
        for j in self.jumps.iter().filter(|j| j.rate.is_zero()) {
            warnings.push(format!("jump {} has an identically zero rate", j.eta));
        }

        Ok(ValidationReport {
            window,
            nonnegative: true,
            clamp_confirmed,
            irreducible,
            warnings,
        })
    }

    /// Forward and backward search from state 0 over positive-rate edges
    /// inside the window.
    fn strongly_connected(&self, window: u64) -> bool {
        let n = window as usize + 1;
        let mut fwd: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            for j in &self.jumps {
                let y = x as i64 + j.eta;
                if y < 0 || y >= n as i64 {
                    continue;
                }
                if j.effective(x as u64).is_positive() {
                    fwd[x].push(y as usize);
                    rev[y as usize].push(x);
                }
            }
        }
        reaches_all(&fwd) && reaches_all(&rev)
    }
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub window: u64,
    pub nonnegative: bool,
    pub clamp_confirmed: bool,
    pub irreducible: bool,
    pub warnings: Vec<String>,
}

/// A one-species reaction `nu A -> nu' A` with rate constant `kappa`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionSpec {
    pub reactant: u32,
    pub product: u32,
    pub kappa: Rational,
}

/// Mass-action jump `eta = nu' - nu` with rate `kappa * x^(nu)`.
pub fn mass_action_rate(spec: &ReactionSpec) -> Result<JumpRate> {
    if spec.reactant == spec.product {
        return Err(Error::InvalidModel("reaction does not change the state".into()));
    }
    if !spec.kappa.is_positive() {
        return Err(Error::InvalidModel("rate constant must be positive".into()));
    }
    let rate = RationalRate::polynomial(FallingFactorialPoly::term(
        spec.kappa.clone(),
        spec.reactant as usize,
    ));
    JumpRate::new(spec.product as i64 - spec.reactant as i64, rate)
}

fn enzyme_rate(n: u32, v: &Rational, k: &Rational, c: i64, top: u32) -> Result<JumpRate> {
    if !v.is_positive() || !k.is_positive() {
        return Err(Error::InvalidModel("V and K must be positive".into()));
    }
    let n = n as usize;
    let kn = num_traits::pow(k.clone(), n);
    let num = Poly::monomial(v * kn, n);
    let den = Poly::new(
        (0..=top as usize)
            .map(|j| {
                if j <= n {
                    num_traits::pow(k.clone(), n - j)
                } else {
                    Rational::one() / num_traits::pow(k.clone(), j - n)
                }
            })
            .collect(),
    );
    JumpRate::new(c, RationalRate::from_monomial(&num, &den)?)
}

/// Michaelis-Menten (Hill) rate `V x^n / sum_{j=0..n} (x/K)^j` on jump `c`.
pub fn mm_rate(n: u32, v: &Rational, k: &Rational, c: i64) -> Result<JumpRate> {
    enzyme_rate(n, v, k, c, n)
}

/// Haldane rate: as [`mm_rate`] with one more denominator term.
pub fn haldane_rate(n: u32, v: &Rational, k: &Rational, c: i64) -> Result<JumpRate> {
    enzyme_rate(n, v, k, c, n + 1)
}

/// Two-jump birth-death network `{-c1, +c2}`.
pub fn bd_network(death: JumpRate, birth: JumpRate) -> Result<CtmcModel> {
    if death.eta >= 0 || birth.eta <= 0 {
        return Err(Error::InvalidModel(
            "birth-death network needs one negative and one positive jump".into(),
        ));
    }
    CtmcModel::new(vec![death, birth])
}

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    #[default]
    Falling,
    Monomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpEntry {
    pub eta: i64,
    pub numerator: Vec<String>,
    pub denominator: Vec<String>,
    #[serde(default)]
    pub basis: Basis,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub jumps: Vec<JumpEntry>,
}

fn coeff_strings(p: &FallingFactorialPoly) -> Vec<String> {
    if p.is_zero() {
        return vec!["0".into()];
    }
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

fn parse_coeffs(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

impl ModelFile {
    pub fn from_model(m: &CtmcModel) -> Self {
        Self {
            jumps: m
                .jumps()
                .iter()
                .map(|j| JumpEntry {
                    eta: j.eta,
                    numerator: coeff_strings(j.rate.numerator()),
                    denominator: coeff_strings(j.rate.denominator()),
                    basis: Basis::Falling,
                })
                .collect(),
        }
    }

    pub fn to_model(&self) -> Result<CtmcModel> {
        let jumps = self
            .jumps
            .iter()
            .map(|e| {
                let num = parse_coeffs(&e.numerator)?;
                let den = parse_coeffs(&e.denominator)?;
                let rate = match e.basis {
                    Basis::Falling => RationalRate::new(
                        FallingFactorialPoly::new(num),
                        FallingFactorialPoly::new(den),
                    )?,
                    Basis::Monomial => {
                        RationalRate::from_monomial(&Poly::new(num), &Poly::new(den))?
                    }
                };
                JumpRate::new(e.eta, rate)
            })
            .collect::<Result<Vec<_>>>()?;
        CtmcModel::new(jumps)
    }
}

pub fn model_from_json(text: &str) -> Result<CtmcModel> {
    serde_json::from_str::<ModelFile>(text)?.to_model()
}

pub fn model_to_json(m: &CtmcModel) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(m)).expect("model files always serialize")
}

/// Unit birth-death model `{+1: b, -1: d}` from plain polynomial rates; a
/// convenience for tests and oracles.
pub fn unit_bd(birth: RationalRate, death: RationalRate) -> Result<CtmcModel> {
    CtmcModel::new(vec![JumpRate::new(1, birth)?, JumpRate::new(-1, death)?])
}

/// Constant rate helper.
pub fn constant_rate(c: u64) -> RationalRate {
    RationalRate::constant(from_u64(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{falling_factorial, int, LaurentExpansion};

    fn ff(c: &[i64]) -> FallingFactorialPoly {
        FallingFactorialPoly::from_ints(c)
    }

    #[test]
    fn validate_accepts_irreducible_example() {
        let m = CtmcModel::new(vec![
            JumpRate::new(2, constant_rate(1)).unwrap(),
            JumpRate::new(
                -1,
                RationalRate::from_monomial(&Poly::from_ints(&[0, 2]), &Poly::from_ints(&[1, 1]))
                    .unwrap(),
            )
            .unwrap(),
        ])
        .unwrap();
        let r = m.validate().unwrap();
        assert!(r.irreducible && r.clamp_confirmed && r.warnings.is_empty());
    }

    #[test]
    fn constant_death_is_clamped() {
        let m = CtmcModel::new(vec![JumpRate::new(-1, constant_rate(1)).unwrap()]).unwrap();
        assert!(m.rates_at(0)[0].is_zero());
        assert_eq!(m.rates_at(1)[0], int(1));
        let r = m.validate().unwrap();
        assert!(r.clamp_confirmed);
        assert!(!r.irreducible);
    }

    #[test]
    fn negative_numerator_is_rejected() {
        let m = CtmcModel::new(vec![JumpRate::new(
            1,
            RationalRate::polynomial(ff(&[0, -1])),
        )
        .unwrap()])
        .unwrap();
        assert!(matches!(m.validate(), Err(Error::NegativeRate { eta: 1, state: 1 })));
    }

    #[test]
    fn vanishing_rate_that_disconnects_is_rejected() {
        let m = CtmcModel::new(vec![
            JumpRate::new(1, constant_rate(1)).unwrap(),
            JumpRate::new(-1, RationalRate::polynomial(ff(&[]))).unwrap(),
        ])
        .unwrap();
        assert!(matches!(m.validate(), Err(Error::VanishingRate { eta: -1 })));
    }

    #[test]
    fn duplicate_and_zero_jumps_are_rejected() {
        assert!(CtmcModel::new(vec![]).is_err());
        assert!(JumpRate::new(0, constant_rate(1)).is_err());
        let j = JumpRate::new(1, constant_rate(1)).unwrap();
        assert!(CtmcModel::new(vec![j.clone(), j.clone()]).is_err());
        let merged = CtmcModel::merged(vec![j.clone(), j]).unwrap();
        assert_eq!(merged.jumps()[0].rate.eval(7), int(2));
    }

    #[test]
    fn mass_action_examples() {
        let j = mass_action_rate(&ReactionSpec { reactant: 2, product: 1, kappa: int(2) }).unwrap();
        assert_eq!(j.eta, -1);
        assert_eq!(j.rate.numerator(), &ff(&[0, 0, 2]));
        let j = mass_action_rate(&ReactionSpec { reactant: 0, product: 2, kappa: int(1) }).unwrap();
        assert_eq!((j.eta, j.rate.eval(9)), (2, int(1)));
        let j = mass_action_rate(&ReactionSpec { reactant: 1, product: 0, kappa: int(6) }).unwrap();
        assert_eq!(j.effective(3), int(18));
    }

    #[test]
    fn mass_action_matches_factorial_formula_exhaustively() {
        for nu in 0..=4u32 {
            let spec = ReactionSpec { reactant: nu, product: nu + 1, kappa: int(3) };
            let j = mass_action_rate(&spec).unwrap();
            for x in 0..=30u64 {
                let expected = int(3) * Rational::from_integer(falling_factorial(x, nu as u64));
                assert_eq!(j.effective(x), expected);
            }
        }
    }

    #[test]
    fn enzyme_rates() {
        let one = int(1);
        let j = mm_rate(1, &one, &one, -1).unwrap();
        assert_eq!(j.rate.eval(1), crate::rates::rational(1, 2));
        let j = mm_rate(2, &one, &one, 1).unwrap();
        assert_eq!(
            j.rate.laurent(),
            LaurentExpansion::Terms { degree: 0, a: int(1), b: int(-1), exact_tail: true }
        );
        let j = haldane_rate(1, &one, &one, 1).unwrap();
        assert_eq!(j.rate.eval(2), crate::rates::rational(2, 7));
        assert!(j.rate.eval(0).is_zero());
        assert_eq!(
            j.rate.laurent(),
            LaurentExpansion::Terms { degree: -1, a: int(1), b: int(-1), exact_tail: true }
        );
    }

    #[test]
    fn haldane_with_general_constants() {
        // V x / (1 + x/K + x^2/K^2) = V K^2 x / (K^2 + K x + x^2)
        let j = haldane_rate(1, &int(16), &int(4), 1).unwrap();
        assert_eq!(j.rate.eval(4), int(16) * int(4) / int(3));
        assert_eq!(
            j.rate.laurent(),
            LaurentExpansion::Terms { degree: -1, a: int(16 * 16), b: int(-16 * 64), exact_tail: true }
        );
    }

    #[test]
    fn bd_network_requires_opposite_signs() {
        let one = int(1);
        let d = mm_rate(3, &one, &one, -2).unwrap();
        let b = mm_rate(2, &one, &one, 1).unwrap();
        assert!(bd_network(d.clone(), b.clone()).is_ok());
        assert!(bd_network(b.clone(), b).is_err());
        let h = haldane_rate(1, &int(16), &one, -1).unwrap();
        let hb = haldane_rate(1, &one, &int(4), 1).unwrap();
        assert!(bd_network(h, hb).is_ok());
    }

    #[test]
    fn model_file_round_trip() {
        let one = int(1);
        let m = bd_network(
            mm_rate(3, &one, &int(2), -2).unwrap(),
            mm_rate(2, &crate::rates::rational(3, 2), &one, 1).unwrap(),
        )
        .unwrap();
        let text = model_to_json(&m);
        let back = model_from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(model_to_json(&back), text);
    }

    #[test]
    fn monomial_basis_is_accepted() {
        let text = r#"{"jumps":[{"eta":-1,"numerator":["0","0","1"],"denominator":["1"],"basis":"monomial"}]}"#;
        let m = model_from_json(text).unwrap();
        assert_eq!(m.jumps()[0].rate.numerator(), &ff(&[0, 1, 1]));
    }
}
