//! Approximate degree and coefficient-norm LPs with exact certification.

mod amplify;
mod cheby;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::boolfn::TruthTable;
use crate::error::{Error, Result};
use crate::lp::{Cmp, LpProblem};
use crate::polynomial::{mobius, Basis, MultilinearPoly};
use crate::rational::{dyadic_f64, int, lcm_of_denominators, rationalize, to_f64, Rational};

pub use amplify::{amplify, amplify_values, Amplified};
pub use cheby::{cheby_and, cheby_degree_bound};

/// LP optima above `eps + INFEASIBLE_MARGIN` certify that `eps` is out of reach.
pub const INFEASIBLE_MARGIN: f64 = 1e-6;
/// Largest arity accepted by the LPs.
pub const MAX_LP_ARITY: usize = 16;

fn check_lp_arity(f: &TruthTable) -> Result<()> {
    if f.arity() > MAX_LP_ARITY {
        return Err(Error::TooLarge(format!("arity {} exceeds the LP cap of {MAX_LP_ARITY}", f.arity())));
    }
    Ok(())
}

/// Exact `max_x |p(x) - f(x)|`.
pub fn exact_error(p: &MultilinearPoly, f: &TruthTable) -> Result<Rational> {
    if p.nvars() != f.arity() {
        return Err(Error::LengthMismatch {
            expected: f.arity(),
            got: p.nvars(),
        });
    }
    let vals = p.values()?;
    Ok(vals
        .iter()
        .enumerate()
        .map(|(x, v)| (v - int(f.get(x as u64) as i64)).abs())
        .max()
        .unwrap_or_else(Rational::zero))
}

fn low_degree_masks(n: usize, d: usize) -> Vec<u64> {
    (0..1u64 << n).filter(|m| m.count_ones() as usize <= d).collect()
}

/// Best uniform error at degree `d`, and the rationalized witness.
#[derive(Clone, Debug)]
pub struct DegreeFit {
    pub degree: usize,
    /// The LP optimum (floating point).
    pub lp_error: f64,
    /// Exact error of `witness`; an upper bound on the true optimum.
    pub achieved_error: Rational,
    pub witness: MultilinearPoly,
}

/// Solves `min eps` subject to `|f(x) - sum_S a_S x^S| <= eps` over all
/// inputs, with `|S| <= d`.
pub fn min_error_for_degree(f: &TruthTable, d: usize) -> Result<DegreeFit> {
    check_lp_arity(f)?;
    let n = f.arity();
    let d = d.min(n);
    let masks = low_degree_masks(n, d);
    let mut lp = LpProblem::new();
    let alpha: Vec<usize> = masks
        .iter()
        .map(|_| lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY))
        .collect();
    let eps = lp.add_var(1.0, 0.0, f64::INFINITY);
    for x in 0..1u64 << n {
        let mut row: Vec<(usize, f64)> =
            masks.iter().zip(&alpha).filter(|(&m, _)| m & !x == 0).map(|(_, &a)| (a, 1.0)).collect();
        let fx = f.get(x) as u8 as f64;
        row.push((eps, -1.0));
        lp.add_row(row.clone(), Cmp::Le, fx);
        row.last_mut().expect("eps term").1 = 1.0;
        lp.add_row(row, Cmp::Ge, fx);
    }
    let sol = lp.solve()?;
    let witness = MultilinearPoly::from_terms(
        n,
        Basis::ZO,
        masks.iter().zip(&alpha).map(|(&m, &a)| (m, rationalize(sol.values[a], 1e-9))),
    )?;
    let achieved_error = exact_error(&witness, f)?;
    Ok(DegreeFit {
        degree: d,
        lp_error: sol.values[eps],
        achieved_error,
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Certification {
    /// Feasible at `degree` (exactly) and infeasible at `degree - 1` by the margin.
    Certified,
    /// Some LP optimum fell inside the ambiguity band.
    Indeterminate,
}

#[derive(Clone, Debug)]
pub struct ApproxDegreeResult {
    pub function: String,
    pub epsilon: Rational,
    pub degree: usize,
    pub witness: MultilinearPoly,
    pub achieved_error: Rational,
    pub status: Certification,
    /// `lp_error(degree - 1) - epsilon`, absent at degree 0.
    pub cert_margin: Option<f64>,
    /// LP optimum at each probed degree `0..=degree`.
    pub sweep: Vec<f64>,
}

/// Smallest `d` whose witness reaches `eps` exactly, with the lower side
/// certified by the LP optimum at `d - 1`.
pub fn approx_degree(f: &TruthTable, eps: &Rational, function: &str) -> Result<ApproxDegreeResult> {
    if eps.is_negative() || eps >= &Rational::new(1.into(), 2.into()) {
        return Err(Error::OutOfRange("approximate degree needs 0 <= eps < 1/2".into()));
    }
    check_lp_arity(f)?;
    let eps_f = to_f64(eps);
    let mut sweep = Vec::new();
    let mut ambiguous = false;
    for d in 0..=f.arity() {
        let fit = min_error_for_degree(f, d)?;
        sweep.push(fit.lp_error);
        if fit.achieved_error <= *eps {
            let cert_margin = d.checked_sub(1).map(|prev| sweep[prev] - eps_f);
            if cert_margin.is_some_and(|m| m <= INFEASIBLE_MARGIN) {
                ambiguous = true;
            }
            return Ok(ApproxDegreeResult {
                function: function.to_string(),
                epsilon: eps.clone(),
                degree: d,
                witness: fit.witness,
                achieved_error: fit.achieved_error,
                status: if ambiguous {
                    Certification::Indeterminate
                } else {
                    Certification::Certified
                },
                cert_margin,
                sweep,
            });
        }
        if fit.lp_error <= eps_f + INFEASIBLE_MARGIN {
            // the LP says reachable (or nearly) but the rational witness misses
            ambiguous = true;
        }
    }
    // the exact interpolant at degree n always has error 0
    Err(Error::Verification("no degree reached the target error".into()))
}

#[derive(Clone, Debug)]
pub struct MuResult {
    pub epsilon: Rational,
    pub mu: Rational,
    pub lp_objective: f64,
    pub witness: MultilinearPoly,
    pub achieved_error: Rational,
    pub degree_cap: Option<usize>,
}

/// Minimizes the coefficient norm over polynomials within `eps` of `f`.
pub fn min_mu_for_error(f: &TruthTable, eps: &Rational, degree_cap: Option<usize>) -> Result<MuResult> {
    if eps.is_negative() || eps >= &Rational::new(1.into(), 2.into()) {
        return Err(Error::OutOfRange("coefficient-norm LP needs 0 <= eps < 1/2".into()));
    }
    check_lp_arity(f)?;
    let n = f.arity();
    match degree_cap {
        Some(d) if d < n => mu_capped(f, eps, d),
        _ => mu_full(f, eps),
    }
}

/// Value-space form: the free variables are the values `v_x`, boxed within
/// `eps` of `f`, and the coefficients are their Mobius transform.
fn mu_full(f: &TruthTable, eps: &Rational) -> Result<MuResult> {
    let n = f.arity();
    let size = 1usize << n;
    let eps_f = to_f64(eps);
    let mut lp = LpProblem::new();
    let vals: Vec<usize> = (0..size)
        .map(|x| {
            let fx = f.get(x as u64) as u8 as f64;
            lp.add_var(0.0, fx - eps_f, fx + eps_f)
        })
        .collect();
    for s in 0..size {
        let plus = lp.add_var(1.0, 0.0, f64::INFINITY);
        let minus = lp.add_var(1.0, 0.0, f64::INFINITY);
        let mut row = vec![(plus, 1.0), (minus, -1.0)];
        for x in crate::polynomial::subsets(s as u64) {
            let sign = if (s as u64 ^ x).count_ones().is_multiple_of(2) { -1.0 } else { 1.0 };
            row.push((vals[x as usize], sign));
        }
        lp.add_row(row, Cmp::Eq, 0.0);
    }
    let sol = lp.solve()?;
    let snapped: Vec<Rational> = (0..size).map(|x| rationalize(sol.values[vals[x]], 1e-9)).collect();
    // keep a common denominator small enough for fast integer arithmetic downstream
    let coarse = lcm_of_denominators(&snapped).bits() > 64;
    let values: Vec<Rational> = (0..size)
        .map(|x| {
            let fx = int(f.get(x as u64) as i64);
            let v = if coarse {
                dyadic_f64(sol.values[vals[x]], 40)
            } else {
                snapped[x].clone()
            };
            let lo = &fx - eps;
            let hi = &fx + eps;
            if v < lo {
                lo
            } else if v > hi {
                hi
            } else {
                v
            }
        })
        .collect();
    let witness = MultilinearPoly::interpolate(n, &values)?;
    let achieved_error = exact_error(&witness, f)?;
    debug_assert!(achieved_error <= *eps);
    Ok(MuResult {
        epsilon: eps.clone(),
        mu: witness.mu_norm(),
        lp_objective: sol.objective,
        witness,
        achieved_error,
        degree_cap: None,
    })
}

fn mu_capped(f: &TruthTable, eps: &Rational, d: usize) -> Result<MuResult> {
    let n = f.arity();
    let masks = low_degree_masks(n, d);
    let solve = |tighten: f64| -> Result<(Vec<f64>, f64)> {
        let eps_f = to_f64(eps) - tighten;
        if eps_f < 0.0 {
            return Err(Error::Lp("tightened error is negative".into()));
        }
        let mut lp = LpProblem::new();
        let pairs: Vec<(usize, usize)> = masks
            .iter()
            .map(|_| (lp.add_var(1.0, 0.0, f64::INFINITY), lp.add_var(1.0, 0.0, f64::INFINITY)))
            .collect();
        for x in 0..1u64 << n {
            let mut row = Vec::new();
            for (&m, &(p, q)) in masks.iter().zip(&pairs) {
                if m & !x == 0 {
                    row.push((p, 1.0));
                    row.push((q, -1.0));
                }
            }
            let fx = f.get(x) as u8 as f64;
            lp.add_row(row.clone(), Cmp::Le, fx + eps_f);
            lp.add_row(row, Cmp::Ge, fx - eps_f);
        }
        let sol = lp.solve()?;
        let coeffs = pairs.iter().map(|&(p, q)| sol.values[p] - sol.values[q]).collect();
        Ok((coeffs, sol.objective))
    };
    let (coeffs, objective) = solve(0.0)?;
    let build = |round: &dyn Fn(f64) -> Rational, coeffs: &[f64]| {
        MultilinearPoly::from_terms(n, Basis::ZO, masks.iter().zip(coeffs).map(|(&m, &c)| (m, round(c))))
    };
    let mut witness = build(&|c| rationalize(c, 1e-9), &coeffs)?;
    let mut achieved_error = exact_error(&witness, f)?;
    let mut lp_objective = objective;
    if achieved_error > *eps {
        // leave room for dyadic rounding of every coefficient
        let slack = masks.len() as f64 * 2f64.powi(-47) + 1e-10;
        let (coeffs, objective) = solve(slack)?;
        witness = build(&|c| dyadic_f64(c, 48), &coeffs)?;
        achieved_error = exact_error(&witness, f)?;
        lp_objective = objective;
        if achieved_error > *eps {
            return Err(Error::Verification(format!(
                "capped witness misses eps by {}",
                to_f64(&(&achieved_error - eps))
            )));
        }
    }
    Ok(MuResult {
        epsilon: eps.clone(),
        mu: witness.mu_norm(),
        lp_objective,
        witness,
        achieved_error,
        degree_cap: Some(d),
    })
}

/// Exact polynomial of a truth table: the Mobius transform of its values.
pub fn exact_poly(f: &TruthTable) -> Result<MultilinearPoly> {
    let n = f.arity();
    let mut acc: Vec<BigInt> = f.bits().map(|b| BigInt::from(b as u8)).collect();
    mobius(&mut acc, n);
    MultilinearPoly::from_integer_coeffs(n, acc, &BigInt::from(1))
}
