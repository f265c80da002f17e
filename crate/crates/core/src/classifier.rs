//! Verdicts from the indices `(alpha, gamma, theta, R)`.
//!
//! For `R <= 0` the four-way Laurent classification is complete. For larger
//! `R` the general drift criteria are instantiated with the Laurent
//! asymptotics of `m` and `v` and each field is decided by whichever
//! criterion fires. Every comparison is exact.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{hp_limit, indices, j_limit, j_over_x_limit, LaurentIndices, Limit};
use crate::error::{Error, Result};
use crate::model::CtmcModel;
use crate::rates::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Explosivity {
    Explosive,
    NonExplosive,
    Unresolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recurrence {
    Transient,
    NullRecurrent,
    PositiveRecurrent,
    Unresolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErgodicitySpeed {
    Exponential,
    NonExponential,
    NotApplicable,
    Unresolved,
}

/// Criterion identifiers used in provenance lists.
pub mod criteria {
    pub const EXPLOSIVE_DRIFT: &str = "explosive.superquadratic_drift";
    pub const NONEXPLOSIVE_GROWTH: &str = "nonexplosive.growth_bound";
    pub const NONEXPLOSIVE_H1: &str = "nonexplosive.h1_below_one";
    pub const TRANSIENT_H1: &str = "transient.h1_above_one";
    pub const RECURRENT_H1: &str = "recurrent.h1_below_one";
    pub const POSITIVE_J: &str = "positive.j_bound";
    pub const POSITIVE_H1: &str = "positive.h1_superquadratic_variance";
    pub const NULL_J: &str = "null.j_window";
    pub const NULL_H: &str = "null.h_boundary";
    pub const EXPONENTIAL_H1: &str = "exponential.h1_superquadratic_variance";
    pub const EXPONENTIAL_J: &str = "exponential.j_quadratic_variance";
    pub const EXPONENTIAL_DRIFT: &str = "exponential.negative_drift_ratio";
    pub const NONEXPONENTIAL_J: &str = "nonexponential.bounded_j";
    pub const NONEXPONENTIAL_DECAY: &str = "nonexponential.decaying_variance";
    pub const EXPONENTIAL_QUADRATIC: &str = "exponential.quadratic_balanced";

    pub const LAURENT_NONEXPLOSIVE: &str = "laurent.nonexplosive";
    pub const LAURENT_TRANSIENT: &str = "laurent.transient";
    pub const LAURENT_NULL: &str = "laurent.null_recurrent";
    pub const LAURENT_NONEXPONENTIAL: &str = "laurent.positive_nonexponential";
    pub const LAURENT_EXPONENTIAL: &str = "laurent.positive_exponential";

    pub const MASS_ACTION: &str = "mass_action.ergodic_implies_exponential";

    pub const GENERAL: [&str; 15] = [
        EXPLOSIVE_DRIFT,
        NONEXPLOSIVE_GROWTH,
        NONEXPLOSIVE_H1,
        TRANSIENT_H1,
        RECURRENT_H1,
        POSITIVE_J,
        POSITIVE_H1,
        NULL_J,
        NULL_H,
        EXPONENTIAL_H1,
        EXPONENTIAL_J,
        EXPONENTIAL_DRIFT,
        NONEXPONENTIAL_J,
        NONEXPONENTIAL_DECAY,
        EXPONENTIAL_QUADRATIC,
    ];

    pub const LAURENT_CASES: [&str; 4] = [
        LAURENT_TRANSIENT,
        LAURENT_NULL,
        LAURENT_NONEXPONENTIAL,
        LAURENT_EXPONENTIAL,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub criterion: String,
    pub fired: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub explosivity: Explosivity,
    pub recurrence: Recurrence,
    pub ergodicity_speed: ErgodicitySpeed,
    pub provenance: Vec<CriterionResult>,
}

impl Verdict {
    pub fn fired(&self, id: &str) -> bool {
        self.provenance.iter().any(|c| c.fired && c.criterion == id)
    }

    pub fn fired_ids(&self) -> Vec<&str> {
        self.provenance
            .iter()
            .filter(|c| c.fired)
            .map(|c| c.criterion.as_str())
            .collect()
    }

    pub fn is_unresolved(&self) -> bool {
        self.explosivity == Explosivity::Unresolved
            || self.recurrence == Recurrence::Unresolved
            || self.ergodicity_speed == ErgodicitySpeed::Unresolved
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "explosivity       {:?}", self.explosivity)?;
        writeln!(f, "recurrence        {:?}", self.recurrence)?;
        writeln!(f, "ergodicity speed  {:?}", self.ergodicity_speed)?;
        write!(f, "fired             {}", self.fired_ids().join(", "))
    }
}

/// Input of the general criteria: the asymptotic data of `m` and `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AsymptoticSummary {
    pub indices: LaurentIndices,
}

/// Leading behaviour of `m(x) x - v(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum GrowthTerm {
    /// `coeff * x^degree` with a nonzero coefficient.
    Exact { degree: i64, coeff: Rational },
    /// Both known coefficients cancel: only a degree bound is known.
    AtMost(i64),
}

impl AsymptoticSummary {
    pub fn new(indices: LaurentIndices) -> Result<Self> {
        if !indices.theta.is_positive() {
            return Err(Error::NonPositiveTheta(indices.theta.to_string()));
        }
        Ok(Self { indices })
    }

    fn drift_minus_variance(&self) -> GrowthTerm {
        let ix = &self.indices;
        if !ix.alpha.is_zero() {
            return GrowthTerm::Exact { degree: ix.r + 1, coeff: ix.alpha.clone() };
        }
        let c = &ix.gamma - &ix.theta;
        if !c.is_zero() {
            return GrowthTerm::Exact { degree: ix.r, coeff: c };
        }
        GrowthTerm::AtMost(ix.r - 1)
    }
}

fn push(out: &mut Vec<CriterionResult>, id: &str, fired: bool) {
    out.push(CriterionResult { criterion: id.to_string(), fired });
}

/// Evaluate every general criterion under Laurent asymptotics.
///
/// Degree statements about `v` use `v(x) ~ theta x^R`, so `v >~ x^c` holds
/// exactly for `c <= R` and `v <~ x^c` exactly for `c >= R`. Criteria whose
/// hypotheses require recurrence or positive recurrence are reported as
/// fired only when those hypotheses are themselves established by another
/// fired criterion.
pub fn check_general(s: &AsymptoticSummary) -> Vec<CriterionResult> {
    use criteria::*;
    let ix = &s.indices;
    let r = ix.r;
    let one = Rational::one();
    let zero = Rational::zero();
    let h1 = hp_limit(ix, &one);
    let jl = j_limit(ix);
    let mut out = Vec::new();

    // Explosion: m x - v grows faster than x^2 with H_1 -> +infinity. The
    // regularity hypothesis on v holds for rational rates since v/x^2(log x)^q
    // always has a limit.
    let growth = s.drift_minus_variance();
    let superquadratic = matches!(&growth, GrowthTerm::Exact { degree, coeff } if *degree > 2 && coeff.is_positive());
    push(&mut out, EXPLOSIVE_DRIFT, superquadratic && h1.gt(&one));

    // Non-explosion, growth route: m x - v <~ x^2 log x and v <~ x^2 (log x)^2.
    let growth_ok = match &growth {
        GrowthTerm::Exact { degree, coeff } => coeff.is_negative() || *degree <= 2,
        GrowthTerm::AtMost(d) => *d <= 2,
    };
    push(&mut out, NONEXPLOSIVE_GROWTH, growth_ok && r <= 2);
    push(&mut out, NONEXPLOSIVE_H1, h1.lt(&one));

    let transient = h1.gt(&one);
    let recurrent = h1.lt(&one);
    push(&mut out, TRANSIENT_H1, transient);
    push(&mut out, RECURRENT_H1, recurrent);

    // Positive recurrence. With v ~ x^R the best admissible exponent in the
    // J route is c = min(R, 2).
    let c = int(r.min(2));
    let positive_j = jl.lt(&(&c - &one));
    let positive_h1 = r > 2 && h1.lt(&one);
    push(&mut out, POSITIVE_J, positive_j);
    push(&mut out, POSITIVE_H1, positive_h1);
    let positive = positive_j || positive_h1;

    // Null recurrence needs v <~ x^c with c <= 2, i.e. R <= c <= 2. The J
    // route is easiest at c = R; the H route needs H_{c-1} to stay bounded,
    // which under Laurent asymptotics means gamma = (c - 1) theta exactly.
    let null_j = recurrent
        && r <= 2
        && ix.alpha.is_zero()
        && matches!(&jl, Limit::Finite(l) if *l > int(r) - &one);
    let null_h = recurrent && r <= 2 && ix.alpha.is_zero() && {
        let c_star = &one + &ix.gamma / &ix.theta;
        c_star >= int(r) && c_star <= int(2)
    };
    push(&mut out, NULL_J, null_j);
    push(&mut out, NULL_H, null_h);

    // Exponential ergodicity, given positive recurrence.
    push(&mut out, EXPONENTIAL_H1, positive && r > 2 && h1.lt(&one));
    push(&mut out, EXPONENTIAL_J, positive && r == 2 && jl.lt(&one));
    push(&mut out, EXPONENTIAL_DRIFT, positive && r >= 0 && j_over_x_limit(ix) < zero);

    // Non-exponential ergodicity, given positive recurrence.
    push(&mut out, NONEXPONENTIAL_J, positive && r < 2 && matches!(jl, Limit::Finite(_)));
    push(&mut out, NONEXPONENTIAL_DECAY, positive && r < 0);

    push(
        &mut out,
        EXPONENTIAL_QUADRATIC,
        r == 2 && ix.alpha.is_zero() && ix.gamma < ix.theta,
    );
    out
}

/// Fold a provenance list into the three verdict fields.
fn decide(prov: &[CriterionResult]) -> (Explosivity, Recurrence, ErgodicitySpeed) {
    use criteria::*;
    let fired = |id: &str| prov.iter().any(|c| c.fired && c.criterion == id);

    let explosivity = if fired(EXPLOSIVE_DRIFT) {
        Explosivity::Explosive
    } else if fired(NONEXPLOSIVE_GROWTH) || fired(NONEXPLOSIVE_H1) || fired(LAURENT_NONEXPLOSIVE) {
        Explosivity::NonExplosive
    } else {
        Explosivity::Unresolved
    };

    let recurrence = if fired(TRANSIENT_H1) || fired(LAURENT_TRANSIENT) {
        Recurrence::Transient
    } else if fired(POSITIVE_J) || fired(POSITIVE_H1) || fired(LAURENT_EXPONENTIAL) || fired(LAURENT_NONEXPONENTIAL) {
        Recurrence::PositiveRecurrent
    } else if fired(NULL_J) || fired(NULL_H) || fired(LAURENT_NULL) {
        Recurrence::NullRecurrent
    } else {
        Recurrence::Unresolved
    };

    let speed = match recurrence {
        Recurrence::PositiveRecurrent => {
            if fired(EXPONENTIAL_H1)
                || fired(EXPONENTIAL_J)
                || fired(EXPONENTIAL_DRIFT)
                || fired(EXPONENTIAL_QUADRATIC)
                || fired(LAURENT_EXPONENTIAL)
                || fired(MASS_ACTION)
            {
                ErgodicitySpeed::Exponential
            } else if fired(NONEXPONENTIAL_J) || fired(NONEXPONENTIAL_DECAY) || fired(LAURENT_NONEXPONENTIAL) {
                ErgodicitySpeed::NonExponential
            } else {
                ErgodicitySpeed::Unresolved
            }
        }
        Recurrence::Unresolved => ErgodicitySpeed::Unresolved,
        _ => ErgodicitySpeed::NotApplicable,
    };
    (explosivity, recurrence, speed)
}

/// The complete four-way classification for `R <= 0`.
pub fn laurent_cases(ix: &LaurentIndices) -> Vec<CriterionResult> {
    use criteria::*;
    let r_minus_1 = int(ix.r - 1);
    let bound = &r_minus_1 * &ix.theta;
    let zero = Rational::zero();
    let a0 = ix.alpha.is_zero();
    let mut out = Vec::new();
    push(&mut out, LAURENT_NONEXPLOSIVE, true);
    push(&mut out, LAURENT_TRANSIENT, ix.alpha > zero || (a0 && ix.gamma > ix.theta));
    push(&mut out, LAURENT_NULL, a0 && bound <= ix.gamma && ix.gamma <= ix.theta);
    push(
        &mut out,
        LAURENT_NONEXPONENTIAL,
        (a0 && ix.gamma < bound) || (ix.alpha < zero && ix.r < 0),
    );
    push(&mut out, LAURENT_EXPONENTIAL, ix.alpha < zero && ix.r == 0);
    out
}

pub fn classify_laurent(ix: &LaurentIndices) -> Result<Verdict> {
    let summary = AsymptoticSummary::new(ix.clone())?;
    let mut provenance = if ix.r <= 0 { laurent_cases(ix) } else { Vec::new() };
    let general = check_general(&summary);
    let (explosivity, recurrence, ergodicity_speed) = if ix.r <= 0 {
        let v = decide(&provenance);
        provenance.extend(general);
        v
    } else {
        provenance.extend(general);
        decide(&provenance)
    };
    Ok(Verdict {
        explosivity,
        recurrence,
        ergodicity_speed,
        provenance,
    })
}

/// Single-species mass-action test: every rate is a non-negative combination
/// of falling factorials, and a jump of size `-k` only uses terms `x^(i)` with
/// `i >= k`.
pub fn is_mass_action(m: &CtmcModel) -> bool {
    m.jumps().iter().all(|j| {
        let den = j.rate.denominator();
        let num = j.rate.numerator();
        den.degree() == Some(0)
            && num.coeffs().iter().all(|c| !c.is_negative())
            && (j.eta > 0
                || num
                    .coeffs()
                    .iter()
                    .take(j.eta.unsigned_abs() as usize)
                    .all(Zero::is_zero))
    })
}

pub fn classify_model(m: &CtmcModel) -> Result<Verdict> {
    let ix = indices(m)?;
    let mut v = classify_laurent(&ix)?;
    if is_mass_action(m) {
        let positive = v.recurrence == Recurrence::PositiveRecurrent;
        push(&mut v.provenance, criteria::MASS_ACTION, positive);
        if positive {
            v.ergodicity_speed = ErgodicitySpeed::Exponential;
        }
    }
    Ok(v)
}

/// Parameters of a two-reaction enzyme network `{-c1, +c2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnzymePair {
    pub v1: Rational,
    pub k1: Rational,
    pub v2: Rational,
    pub k2: Rational,
    pub n1: u32,
    pub c1: u32,
    pub n2: u32,
    pub c2: u32,
}

/// Outcome of the closed-form tables, which only distinguish these four.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableVerdict {
    Transient,
    NullRecurrent,
    NonExponential,
    Exponential,
}

impl TableVerdict {
    pub fn of(v: &Verdict) -> Option<Self> {
        match (v.recurrence, v.ergodicity_speed) {
            (Recurrence::Transient, _) => Some(Self::Transient),
            (Recurrence::NullRecurrent, _) => Some(Self::NullRecurrent),
            (Recurrence::PositiveRecurrent, ErgodicitySpeed::Exponential) => Some(Self::Exponential),
            (Recurrence::PositiveRecurrent, ErgodicitySpeed::NonExponential) => {
                Some(Self::NonExponential)
            }
            _ => None,
        }
    }
}

fn enzyme_table(p: &EnzymePair, shift: usize, null_lower: Rational) -> TableVerdict {
    let lhs = int(p.c1 as i64) * &p.v1 * num_traits::pow(p.k1.clone(), p.n1 as usize + shift);
    let rhs = int(p.c2 as i64) * &p.v2 * num_traits::pow(p.k2.clone(), p.n2 as usize + shift);
    let dk = &p.k1 - &p.k2;
    let half_sum = int((p.c1 + p.c2) as i64) / int(2);
    if lhs < rhs {
        return TableVerdict::Transient;
    }
    if lhs > rhs {
        return if shift == 0 {
            TableVerdict::Exponential
        } else {
            TableVerdict::NonExponential
        };
    }
    if dk > half_sum {
        TableVerdict::Transient
    } else if dk < null_lower {
        TableVerdict::NonExponential
    } else {
        TableVerdict::NullRecurrent
    }
}

/// Closed-form classification of the Michaelis-Menten birth-death network.
pub fn mm_table(p: &EnzymePair) -> TableVerdict {
    let lower = -int((p.c1 + p.c2) as i64) / int(2);
    enzyme_table(p, 0, lower)
}

/// Closed-form classification of the Haldane birth-death network.
pub fn haldane_table(p: &EnzymePair) -> TableVerdict {
    let lower = -int((p.c1 + p.c2) as i64);
    enzyme_table(p, 1, lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::rational;

    fn ix(a: i64, g: i64, t: Rational, r: i64) -> LaurentIndices {
        LaurentIndices::new(int(a), int(g), t, r).unwrap()
    }

    #[test]
    fn exponential_example() {
        let v = classify_laurent(&ix(-1, 5, rational(3, 2), 0)).unwrap();
        assert_eq!(v.recurrence, Recurrence::PositiveRecurrent);
        assert_eq!(v.ergodicity_speed, ErgodicitySpeed::Exponential);
        assert!(v.fired(criteria::LAURENT_EXPONENTIAL));
    }

    #[test]
    fn non_exponential_example() {
        let v = classify_laurent(&ix(0, -12, int(9), 0)).unwrap();
        assert_eq!(v.ergodicity_speed, ErgodicitySpeed::NonExponential);
    }

    #[test]
    fn null_boundaries_are_inclusive() {
        let v = classify_laurent(&ix(0, 4, int(4), -1)).unwrap();
        assert_eq!(v.recurrence, Recurrence::NullRecurrent);
        let v = classify_laurent(&ix(0, -8, int(4), -1)).unwrap();
        assert_eq!(v.recurrence, Recurrence::NullRecurrent);
        let v = classify_laurent(&ix(0, 3, int(3), 0)).unwrap();
        assert_eq!(v.recurrence, Recurrence::NullRecurrent);
        assert_eq!(v.ergodicity_speed, ErgodicitySpeed::NotApplicable);
    }

    #[test]
    fn gamma_equal_theta_uses_h_boundary_route() {
        for r in [-2, -1, 0] {
            let v = classify_laurent(&ix(0, 2, int(2), r)).unwrap();
            assert!(v.fired(criteria::NULL_H));
            assert!(!v.fired(criteria::TRANSIENT_H1));
        }
    }

    #[test]
    fn superlinear_birth_explodes() {
        let v = classify_laurent(&ix(1, 0, rational(1, 2), 2)).unwrap();
        assert_eq!(v.explosivity, Explosivity::Explosive);
        assert!(v.fired(criteria::EXPLOSIVE_DRIFT));
        assert_eq!(v.recurrence, Recurrence::Transient);
    }

    #[test]
    fn linear_with_negative_drift_is_exponential() {
        let v = classify_laurent(&ix(-1, 0, int(1), 1)).unwrap();
        assert!(v.fired(criteria::POSITIVE_J));
        assert!(v.fired(criteria::EXPONENTIAL_DRIFT));
        assert_eq!(v.ergodicity_speed, ErgodicitySpeed::Exponential);
        assert_eq!(v.explosivity, Explosivity::NonExplosive);
    }

    #[test]
    fn quadratic_balanced_is_exponential() {
        let v = classify_laurent(&ix(0, 1, int(2), 2)).unwrap();
        assert!(v.fired(criteria::EXPONENTIAL_QUADRATIC));
        assert_eq!(v.recurrence, Recurrence::PositiveRecurrent);
        assert_eq!(v.ergodicity_speed, ErgodicitySpeed::Exponential);
    }

    #[test]
    fn nonpositive_theta_is_rejected() {
        assert!(LaurentIndices::new(int(0), int(0), int(0), 0).is_err());
        let bad = LaurentIndices { alpha: int(0), gamma: int(0), theta: int(-1), r: 0 };
        assert!(classify_laurent(&bad).is_err());
    }

    #[test]
    fn general_engine_resolves_every_sign_pattern() {
        for r in -3..=5 {
            for a in -1..=1 {
                for g in -12..=12 {
                    let v = classify_laurent(&ix(a, g, int(3), r)).unwrap();
                    assert!(!v.is_unresolved(), "unresolved at R={r} a={a} g={g}");
                }
            }
        }
    }

    #[test]
    fn enzyme_tables() {
        let p = EnzymePair {
            v1: int(1), k1: int(1), v2: int(1), k2: int(1),
            n1: 3, c1: 2, n2: 2, c2: 1,
        };
        assert_eq!(mm_table(&p), TableVerdict::Exponential);
        let p = EnzymePair {
            v1: int(3), k1: int(1), v2: int(2), k2: int(3),
            n1: 4, c1: 2, n2: 1, c2: 1,
        };
        assert_eq!(mm_table(&p), TableVerdict::NonExponential);
        let p = EnzymePair {
            v1: int(16), k1: int(1), v2: int(1), k2: int(4),
            n1: 1, c1: 1, n2: 1, c2: 1,
        };
        assert_eq!(haldane_table(&p), TableVerdict::NonExponential);
        let p = EnzymePair {
            v1: int(1), k1: int(2), v2: int(4), k2: int(1),
            n1: 1, c1: 1, n2: 1, c2: 1,
        };
        assert_eq!(haldane_table(&p), TableVerdict::NullRecurrent);
    }
}
