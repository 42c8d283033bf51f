use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::boolfn::TruthTable;
use crate::rational::Rational;

/// Fourier coefficients of `(-1)^{f(x)}`: the PM-basis expansion in
/// `y_i = (-1)^{x_i}`. Zero coefficients are omitted.
pub fn fourier(f: &TruthTable) -> BTreeMap<u64, Rational> {
    let n = f.arity();
    let mut a: Vec<i64> = f.bits().map(|b| if b { -1 } else { 1 }).collect();
    // Walsh-Hadamard butterfly
    for i in 0..n {
        let bit = 1 << i;
        for x in 0..a.len() {
            if x & bit == 0 {
                let (u, v) = (a[x], a[x | bit]);
                a[x] = u + v;
                a[x | bit] = u - v;
            }
        }
    }
    let den = BigInt::from(1u64) << n;
    a.into_iter()
        .enumerate()
        .filter(|&(_, v)| v != 0)
        .map(|(s, v)| (s as u64, Rational::new(BigInt::from(v), den.clone())))
        .collect()
}
