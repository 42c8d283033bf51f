//! Exact sparse multilinear polynomials over the Boolean cube.

mod fourier;
mod symmetric;
mod text;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, Rational};

pub use fourier::fourier;
pub use symmetric::{binomial, expand_symmetric, SymmetricPoly};

/// Largest variable count accepted by the exhaustive routines.
pub const MAX_EXHAUSTIVE_VARS: usize = 20;

/// `ZO` polynomials read inputs as 0/1; `PM` polynomials read `y = (-1)^x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    ZO,
    PM,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::ZO => "ZO",
            Basis::PM => "PM",
        })
    }
}

/// Terms are keyed by variable bitmask (variable `i` is bit `i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPoly {
    nvars: usize,
    basis: Basis,
    terms: BTreeMap<u64, Rational>,
}

fn check_nvars(nvars: usize) -> Result<()> {
    if nvars > 64 {
        return Err(Error::ArityOverflow { arity: nvars, cap: 64 });
    }
    Ok(())
}

fn mask_of(x: &[bool]) -> u64 {
    crate::boolfn::encode(x)
}

impl MultilinearPoly {
    pub fn zero(nvars: usize, basis: Basis) -> Self {
        MultilinearPoly {
            nvars,
            basis,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, basis: Basis, c: Rational) -> Self {
        Self::monomial(nvars, basis, 0, c)
    }

    pub fn monomial(nvars: usize, basis: Basis, mask: u64, c: Rational) -> Self {
        let mut p = Self::zero(nvars, basis);
        p.add_term(mask, c);
        p
    }

    /// The single variable `x_i` (0-based).
    pub fn var(nvars: usize, basis: Basis, i: usize) -> Self {
        Self::monomial(nvars, basis, 1 << i, Rational::one())
    }

    pub fn from_terms(
        nvars: usize,
        basis: Basis,
        terms: impl IntoIterator<Item = (u64, Rational)>,
    ) -> Result<Self> {
        check_nvars(nvars)?;
        let mut p = Self::zero(nvars, basis);
        for (mask, c) in terms {
            if nvars < 64 && mask >> nvars != 0 {
                return Err(Error::OutOfRange(format!("term {mask:#x} uses a variable beyond {nvars}")));
            }
            p.add_term(mask, c);
        }
        Ok(p)
    }

    /// Adds `c` to the coefficient of `mask`, dropping it if it cancels.
    pub fn add_term(&mut self, mask: u64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn terms(&self) -> &BTreeMap<u64, Rational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mask: u64) -> Rational {
        self.terms.get(&mask).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    /// Sum of absolute coefficient values.
    pub fn mu_norm(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }

    /// Evaluates at the Boolean point `x`. A PM polynomial sees `y_i = (-1)^{x_i}`.
    pub fn eval(&self, x: &[bool]) -> Result<Rational> {
        if x.len() != self.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        Ok(self.eval_mask(mask_of(x)))
    }

    /// Evaluates at the point whose 1-coordinates are the bits of `x`.
    pub fn eval_mask(&self, x: u64) -> Rational {
        let mut acc = Rational::zero();
        match self.basis {
            Basis::ZO => {
                for (&m, c) in &self.terms {
                    if m & !x == 0 {
                        acc += c;
                    }
                }
            }
            Basis::PM => {
                for (&m, c) in &self.terms {
                    if (m & x).count_ones().is_multiple_of(2) {
                        acc += c;
                    } else {
                        acc -= c;
                    }
                }
            }
        }
        acc
    }

    /// Rewrites a ZO polynomial in the PM basis via `x = (1 - y)/2`.
    pub fn to_pm(&self) -> Result<Self> {
        if self.basis != Basis::ZO {
            return Err(Error::BasisMismatch("to_pm expects a ZO polynomial"));
        }
        let mut out = Self::zero(self.nvars, Basis::PM);
        for (&s, c) in &self.terms {
            let scale = c / Rational::from_integer(BigInt::one() << s.count_ones() as usize);
            for t in subsets(s) {
                let term = if t.count_ones() % 2 == 0 { scale.clone() } else { -scale.clone() };
                out.add_term(t, term);
            }
        }
        Ok(out)
    }

    /// Rewrites a PM polynomial in the ZO basis via `y = 1 - 2x`.
    pub fn from_pm(&self) -> Result<Self> {
        if self.basis != Basis::PM {
            return Err(Error::BasisMismatch("from_pm expects a PM polynomial"));
        }
        let mut out = Self::zero(self.nvars, Basis::ZO);
        for (&s, c) in &self.terms {
            for t in subsets(s) {
                let k = t.count_ones() as usize;
                let mut term = c * Rational::from_integer(BigInt::one() << k);
                if k % 2 == 1 {
                    term = -term;
                }
                out.add_term(t, term);
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch("operands use different bases"));
        }
        if self.nvars != other.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars, self.basis);
        }
        MultilinearPoly {
            nvars: self.nvars,
            basis: self.basis,
            terms: self.terms.iter().map(|(&m, v)| (m, v * c)).collect(),
        }
    }

    /// Product reduced to multilinear form (`x^2 = x` in ZO, `y^2 = 1` in PM).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.nvars, self.basis);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                let m = match self.basis {
                    Basis::ZO => a | b,
                    Basis::PM => a ^ b,
                };
                out.add_term(m, ca * cb);
            }
        }
        Ok(out)
    }

    /// Renames variable `i` to `map[i]` in a polynomial on `nvars` variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Result<Self> {
        check_nvars(nvars)?;
        if map.len() != self.nvars || map.iter().any(|&j| j >= nvars) {
            return Err(Error::OutOfRange("variable map does not fit".into()));
        }
        let mut out = Self::zero(nvars, self.basis);
        for (&m, c) in &self.terms {
            let mut image = 0u64;
            let mut collided = false;
            for i in bits(m) {
                let bit = 1u64 << map[i];
                collided |= image & bit != 0;
                image |= bit;
            }
            if collided && self.basis == Basis::PM {
                return Err(Error::OutOfRange("non-injective map on a PM polynomial".into()));
            }
            out.add_term(image, c.clone());
        }
        Ok(out)
    }

    /// For a ZO polynomial on `2n` variables where variable `n + i` stands for
    /// `1 - x_i`, returns the equivalent polynomial on the first `n`.
    pub fn fold_complements(&self, n: usize) -> Result<Self> {
        if self.basis != Basis::ZO || self.nvars != 2 * n {
            return Err(Error::BasisMismatch("fold_complements needs a ZO polynomial on 2n variables"));
        }
        let low = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut out = Self::zero(n, Basis::ZO);
        for (&m, c) in &self.terms {
            let pos = m & low;
            let neg = m >> n;
            if pos & neg != 0 {
                continue;
            }
            for t in subsets(neg) {
                let term = if t.count_ones() % 2 == 0 { c.clone() } else { -c.clone() };
                out.add_term(pos | t, term);
            }
        }
        Ok(out)
    }

    /// All `2^nvars` values, indexed by input mask.
    pub fn values(&self) -> Result<Vec<Rational>> {
        if self.nvars > MAX_EXHAUSTIVE_VARS {
            return Err(Error::TooLarge(format!("{} variables for exhaustive evaluation", self.nvars)));
        }
        let zo;
        let p = match self.basis {
            Basis::ZO => self,
            Basis::PM => {
                zo = self.from_pm()?;
                &zo
            }
        };
        let den = lcm_of_denominators(p.terms.values());
        let mut acc = vec![BigInt::zero(); 1 << self.nvars];
        for (&m, c) in &p.terms {
            acc[m as usize] = c.numer() * (&den / c.denom());
        }
        zeta(&mut acc, self.nvars);
        Ok(acc.into_iter().map(|v| Rational::new(v, den.clone())).collect())
    }

    /// The unique ZO polynomial with the given values (indexed by input mask).
    pub fn interpolate(nvars: usize, values: &[Rational]) -> Result<Self> {
        if nvars > MAX_EXHAUSTIVE_VARS {
            return Err(Error::TooLarge(format!("{nvars} variables for interpolation")));
        }
        if values.len() != 1 << nvars {
            return Err(Error::LengthMismatch {
                expected: 1 << nvars,
                got: values.len(),
            });
        }
        let den = lcm_of_denominators(values);
        let mut acc: Vec<BigInt> = values.iter().map(|v| v.numer() * (&den / v.denom())).collect();
        mobius(&mut acc, nvars);
        Self::from_integer_coeffs(nvars, acc, &den)
    }

    /// Builds a ZO polynomial from dense integer coefficients over a common denominator.
    pub fn from_integer_coeffs(nvars: usize, numerators: Vec<BigInt>, den: &BigInt) -> Result<Self> {
        Self::from_terms(
            nvars,
            Basis::ZO,
            numerators
                .into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(m, v)| (m as u64, Rational::new(v, den.clone()))),
        )
    }

    /// Maximum of `|p(x)|` over the whole cube.
    pub fn pointwise_bound(&self) -> Result<Rational> {
        Ok(self
            .values()?
            .into_iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero))
    }

    /// Maximum of `|p(x)|` over the given inputs, e.g. one representative per
    /// Hamming weight for a symmetric polynomial.
    pub fn max_abs_on<'a>(&self, inputs: impl IntoIterator<Item = &'a [bool]>) -> Result<Rational> {
        let mut best = Rational::zero();
        for x in inputs {
            let v = self.eval(x)?.abs();
            if v > best {
                best = v;
            }
        }
        Ok(best)
    }
}

/// Iterates the set bits of `m`, lowest first.
pub fn bits(m: u64) -> impl Iterator<Item = usize> {
    let mut rest = m;
    std::iter::from_fn(move || {
        if rest == 0 {
            return None;
        }
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        Some(i)
    })
}

/// Iterates every submask of `m`, including `0` and `m`.
pub fn subsets(m: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(m);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

/// In place: `a[x] = sum over s ⊆ x of a[s]`.
pub fn zeta<T: for<'a> std::ops::AddAssign<&'a T> + Clone>(a: &mut [T], n: usize) {
    for i in 0..n {
        let bit = 1 << i;
        for x in 0..a.len() {
            if x & bit != 0 {
                let lower = a[x ^ bit].clone();
                a[x] += &lower;
            }
        }
    }
}

/// Inverse of [`zeta`].
pub fn mobius<T: for<'a> std::ops::SubAssign<&'a T> + Clone>(a: &mut [T], n: usize) {
    for i in 0..n {
        let bit = 1 << i;
        for x in 0..a.len() {
            if x & bit != 0 {
                let lower = a[x ^ bit].clone();
                a[x] -= &lower;
            }
        }
    }
}
