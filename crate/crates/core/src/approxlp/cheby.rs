use num_traits::{One, Zero};

use crate::polynomial::SymmetricPoly;
use crate::rational::{int, to_f64, Rational};

/// `⌈√(2n ln(2/δ))⌉ + 1`.
pub fn cheby_degree_bound(n: usize, delta: &Rational) -> usize {
    let v = (2.0 * n as f64 * (2.0 / to_f64(delta)).ln()).sqrt();
    (v - 1e-12).ceil() as usize + 1
}

fn chebyshev(d: usize, z: &Rational) -> Rational {
    let (mut prev, mut cur) = (Rational::one(), z.clone());
    if d == 0 {
        return prev;
    }
    for _ in 1..d {
        let next = int(2) * z * &cur - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Symmetric approximant of `AND_n` to error `delta`: `|q(w)| <= delta` for
/// `w < n` and `|q(n) - 1| <= delta`.
///
/// Small `n` (where the degree bound reaches `n`) gets the exact `C(w, n)`.
/// Otherwise the weights `0..n-1` are mapped onto `[-1, 1]`, and `q` is the
/// Chebyshev polynomial of the least degree whose value at `w = n` reaches
/// `1/delta`, normalized so that `q(n) = 1`.
pub fn cheby_and(n: usize, delta: &Rational) -> SymmetricPoly {
    assert!(n >= 1, "AND needs at least one input");
    assert!(delta > &Rational::zero(), "delta must be positive");
    let bound = cheby_degree_bound(n, delta);
    let exact = || {
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        SymmetricPoly::new(n, c).expect("degree n fits")
    };
    if n <= 2 || bound >= n {
        return exact();
    }
    let span = int(n as i64 - 1);
    let z_of = |w: usize| (int(2 * w as i64) - &span) / &span;
    let top = z_of(n);
    let target = Rational::one() / delta;
    let mut d = 1;
    let mut peak = chebyshev(d, &top);
    while peak < target {
        d += 1;
        if d >= n {
            return exact();
        }
        peak = chebyshev(d, &top);
    }
    let values: Vec<Rational> = (0..=d).map(|w| chebyshev(d, &z_of(w)) / &peak).collect();
    SymmetricPoly::from_values(n, &values).expect("degree below n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use num_traits::Signed;

    fn check(n: usize, delta: &Rational) -> usize {
        let q = cheby_and(n, delta);
        let vals = q.weight_values();
        for (w, v) in vals.iter().enumerate() {
            if w < n {
                assert!(v.abs() <= *delta, "n={n} w={w}");
            } else {
                assert!((v - Rational::one()).abs() <= *delta);
            }
        }
        assert!(q.degree() <= n.min(cheby_degree_bound(n, delta)));
        q.degree()
    }

    #[test]
    fn small_cases_are_exact() {
        let q = cheby_and(1, &ratio(1, 3));
        assert_eq!(q.binom_coeffs(), &[int(0), int(1)]);
        let q = cheby_and(4, &ratio(1, 10));
        assert_eq!(q.degree(), 4);
        assert_eq!(q.eval(3), int(0));
        assert_eq!(q.eval(4), int(1));
    }

    #[test]
    fn weight_grid_bounds() {
        let d = check(64, &ratio(1, 100));
        assert!(d <= 27, "degree {d}");
        for n in [10, 16, 40, 100] {
            for delta in [ratio(1, 10), ratio(1, 1000)] {
                check(n, &delta);
            }
        }
    }
}
