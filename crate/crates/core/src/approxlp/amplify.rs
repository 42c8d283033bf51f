use num_traits::{Signed, Zero};

use super::exact_error;
use crate::boolfn::TruthTable;
use crate::error::{Error, Result};
use crate::polynomial::MultilinearPoly;
use crate::rational::{int, ratio, Rational};

#[derive(Clone, Debug)]
pub struct Amplified {
    pub poly: MultilinearPoly,
    pub iterations: usize,
    pub initial_error: Rational,
    /// Exact error after the last iteration.
    pub error: Rational,
}

/// `A(t) = 3t^2 - 2t^3`.
fn amplifier(t: &Rational) -> Rational {
    let t2 = t * t;
    int(3) * &t2 - int(2) * &t2 * t
}

/// Applies the amplifier pointwise to a value table.
pub fn amplify_values(values: &[Rational]) -> Vec<Rational> {
    values.iter().map(amplifier).collect()
}

/// Composes `p` with `A(t) = 3t^2 - 2t^3` until its exact error against `f`
/// is at most `target`. Each pass triples the degree bound.
///
/// Fails when the error does not contract: `A` fixes `1/2`, and an error `e`
/// on both sides of the Boolean values grows to `3e^2 + 2e^3` in the worst
/// case.
pub fn amplify(p: &MultilinearPoly, f: &TruthTable, target: &Rational, max_iterations: usize) -> Result<Amplified> {
    let initial_error = exact_error(p, f)?;
    if initial_error > ratio(49, 100) {
        return Err(Error::NotAmplifiable(format!(
            "error {initial_error} is too close to 1/2"
        )));
    }
    let mut values = p.values()?;
    let mut error = initial_error.clone();
    let mut iterations = 0;
    while error > *target {
        if iterations == max_iterations {
            return Err(Error::NotAmplifiable(format!(
                "error {error} still above {target} after {iterations} passes"
            )));
        }
        let next = amplify_values(&values);
        let next_error = next
            .iter()
            .enumerate()
            .map(|(x, v)| (v - int(f.get(x as u64) as i64)).abs())
            .max()
            .unwrap_or_else(Rational::zero);
        if next_error >= error {
            return Err(Error::NotAmplifiable(format!(
                "error does not contract ({error} -> {next_error})"
            )));
        }
        values = next;
        error = next_error;
        iterations += 1;
    }
    let poly = if iterations == 0 {
        p.clone()
    } else {
        MultilinearPoly::interpolate(p.nvars(), &values)?
    };
    Ok(Amplified {
        poly,
        iterations,
        initial_error,
        error,
    })
}
