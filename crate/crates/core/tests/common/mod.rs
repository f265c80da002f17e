#![allow(dead_code)]

use ctmc_core::analysis::indices;
use ctmc_core::model::{mass_action_rate, CtmcModel, JumpRate, ReactionSpec};
use ctmc_core::rates::{int, rational, FallingFactorialPoly, Rational, RationalRate};
use rand::Rng;

pub fn positive_poly<R: Rng>(rng: &mut R, degree: usize) -> FallingFactorialPoly {
    let mut c: Vec<Rational> = (0..=degree).map(|_| int(rng.random_range(0..=4))).collect();
    c[0] = int(rng.random_range(1..=4));
    c[degree] = rational(rng.random_range(1..=6), rng.random_range(1..=3));
    FallingFactorialPoly::new(c)
}

/// A strictly positive rational rate with the given numerator/denominator degrees.
pub fn positive_rate<R: Rng>(rng: &mut R, num_deg: usize, den_deg: usize) -> RationalRate {
    RationalRate::new(positive_poly(rng, num_deg), positive_poly(rng, den_deg)).unwrap()
}

/// Model on a random jump set drawn from `-3..=3`, with at least one jump of
/// each sign so that the variance never vanishes and the chain can return.
pub fn random_model<R: Rng>(rng: &mut R) -> CtmcModel {
    let neg = -rng.random_range(1..=3i64);
    let pos = rng.random_range(1..=3i64);
    let mut etas = vec![neg, pos];
    let extra = rng.random_range(-3..=3i64);
    if extra != 0 && !etas.contains(&extra) {
        etas.push(extra);
    }
    let jumps = etas
        .into_iter()
        .map(|eta| {
            let nd = rng.random_range(0..=3);
            let dd = rng.random_range(0..=2);
            JumpRate::new(eta, positive_rate(rng, nd, dd)).unwrap()
        })
        .collect();
    CtmcModel::new(jumps).unwrap()
}

/// Unit birth-death rates `(b, d)` over a shared denominator.
///
/// Half of the draws balance the leading coefficients so that the drift's
/// leading order cancels and the subleading term decides the class.
pub fn random_bd<R: Rng>(rng: &mut R) -> (RationalRate, RationalRate) {
    let k = rng.random_range(0..=3);
    let qd = rng.random_range(0..=2);
    let q = positive_poly(rng, qd);
    let pb = positive_poly(rng, k);
    let mut pd: Vec<Rational> = (0..=k).map(|_| int(rng.random_range(0..=4))).collect();
    pd[0] = int(0);
    if k == 0 {
        pd = vec![int(0), int(rng.random_range(1..=4))];
    } else if rng.random_bool(0.5) {
        pd[k] = pb.coeffs()[k].clone();
    } else {
        pd[k] = rational(rng.random_range(1..=6), rng.random_range(1..=3));
    }
    // d(x) = x * (stuff) keeps d positive for x >= 1 and zero at 0.
    if pd[1] == int(0) {
        pd[1] = int(1);
    }
    let b = RationalRate::new(pb, q.clone()).unwrap();
    let d = RationalRate::new(FallingFactorialPoly::new(pd), q).unwrap();
    (b, d)
}

/// True when the Laurent indices sit on a classification boundary.
pub fn on_boundary(m: &CtmcModel) -> bool {
    let ix = indices(m).unwrap();
    if ix.alpha != int(0) {
        return false;
    }
    let r1 = int(ix.r - 1);
    ix.gamma == ix.theta || ix.gamma == r1 * &ix.theta
}

/// Random one-species mass-action network with up to four reactions.
pub fn random_mass_action<R: Rng>(rng: &mut R) -> Option<CtmcModel> {
    let n = rng.random_range(2..=4);
    let mut jumps = Vec::new();
    for _ in 0..n {
        let reactant = rng.random_range(0..=3u32);
        let product = rng.random_range(0..=3u32);
        if reactant == product {
            continue;
        }
        let kappa = rational(rng.random_range(1..=5), rng.random_range(1..=3));
        jumps.push(mass_action_rate(&ReactionSpec { reactant, product, kappa }).ok()?);
    }
    if jumps.is_empty() {
        return None;
    }
    CtmcModel::merged(jumps).ok()
}
