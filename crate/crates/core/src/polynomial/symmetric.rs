use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{bits, Basis, MultilinearPoly};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `q(w) = sum_k c_k * C(w, k)` in the binomial basis of the Hamming weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricPoly {
    nvars: usize,
    binom_coeffs: Vec<Rational>,
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl SymmetricPoly {
    pub fn new(nvars: usize, mut binom_coeffs: Vec<Rational>) -> Result<Self> {
        while binom_coeffs.last().is_some_and(|c| c.is_zero()) {
            binom_coeffs.pop();
        }
        if binom_coeffs.len() > nvars + 1 {
            return Err(Error::DegreeExceedsSupport {
                degree: binom_coeffs.len() - 1,
                support: nvars,
            });
        }
        Ok(SymmetricPoly { nvars, binom_coeffs })
    }

    /// Interpolates from `values[w] = q(w)` for `w = 0..=D` by finite differences.
    pub fn from_values(nvars: usize, values: &[Rational]) -> Result<Self> {
        let mut diffs = values.to_vec();
        let mut coeffs = Vec::with_capacity(values.len());
        for _ in 0..values.len() {
            coeffs.push(diffs[0].clone());
            diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
        }
        Self::new(nvars, coeffs)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn binom_coeffs(&self) -> &[Rational] {
        &self.binom_coeffs
    }

    pub fn degree(&self) -> usize {
        self.binom_coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, w: usize) -> Rational {
        self.binom_coeffs
            .iter()
            .enumerate()
            .take(w + 1)
            .map(|(k, c)| c * Rational::from_integer(binomial(w, k)))
            .sum()
    }

    /// Values at every weight `0..=nvars`.
    pub fn weight_values(&self) -> Vec<Rational> {
        (0..=self.nvars).map(|w| self.eval(w)).collect()
    }
}

/// Multilinearizes `q` on the variables of `support`: every `S ⊆ support`
/// with `|S| = k` gets coefficient `c_k`.
pub fn expand_symmetric(q: &SymmetricPoly, nvars: usize, support: u64) -> Result<MultilinearPoly> {
    let vars: Vec<usize> = bits(support).collect();
    if q.degree() > vars.len() {
        return Err(Error::DegreeExceedsSupport {
            degree: q.degree(),
            support: vars.len(),
        });
    }
    if vars.iter().any(|&v| v >= nvars) {
        return Err(Error::OutOfRange("support exceeds the variable count".into()));
    }
    let mut out = MultilinearPoly::zero(nvars, Basis::ZO);
    let coeffs = q.binom_coeffs();
    let mut stack: Vec<(usize, u64, usize)> = vec![(0, 0, 0)];
    while let Some((start, mask, size)) = stack.pop() {
        if let Some(c) = coeffs.get(size) {
            out.add_term(mask, c.clone());
        }
        if size + 1 < coeffs.len() {
            for (j, &v) in vars.iter().enumerate().skip(start) {
                stack.push((j + 1, mask | 1 << v, size + 1));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn linear_and_pair_examples() {
        let w = SymmetricPoly::new(3, vec![int(0), int(1)]).unwrap();
        let p = expand_symmetric(&w, 3, 0b111).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert!(p.terms().iter().all(|(m, c)| m.count_ones() == 1 && *c == int(1)));
        let pair = SymmetricPoly::new(2, vec![int(0), int(0), int(1)]).unwrap();
        let p = expand_symmetric(&pair, 2, 0b11).unwrap();
        assert_eq!(p, MultilinearPoly::monomial(2, Basis::ZO, 0b11, int(1)));
    }

    #[test]
    fn finite_differences_recover_binomial_coefficients() {
        let vals: Vec<Rational> = (0..6).map(|w| int(w * w * w - 2 * w + 5)).collect();
        let q = SymmetricPoly::from_values(8, &vals).unwrap();
        assert_eq!(q.degree(), 3);
        for w in 0..=8 {
            let w_i = w as i64;
            assert_eq!(q.eval(w), int(w_i * w_i * w_i - 2 * w_i + 5));
        }
    }

    #[test]
    fn expansion_matches_weights() {
        let q = SymmetricPoly::from_values(5, &[int(3), int(-1), int(4), int(1)]).unwrap();
        let p = expand_symmetric(&q, 6, 0b011111).unwrap();
        assert_eq!(p.degree(), q.degree());
        for x in 0..64u64 {
            let w = (x & 0b11111).count_ones() as usize;
            assert_eq!(p.eval_mask(x), q.eval(w));
        }
        let too_big = SymmetricPoly::new(5, vec![int(0); 5].into_iter().chain([int(1)]).collect()).unwrap();
        assert!(expand_symmetric(&too_big, 6, 0b11).is_err());
    }
}
