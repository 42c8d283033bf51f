use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::circuit::Evaluator;
use crate::error::{Error, Result};
use crate::rational::{ceil_to_u64, Rational};

/// Enumerating more inputs than this in exhaustive mode is refused.
pub const MAX_EXHAUSTIVE_INPUTS: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PromiseMode {
    Exhaustive,
    /// `count` uniform draws from each promise side.
    Sampled { count: usize, seed: u64 },
}

/// Weights forced to 0 are `0..=low_max`; weights forced to 1 are
/// `high_min..=n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PromiseBounds {
    pub n: usize,
    pub low_max: usize,
    pub high_min: usize,
}

impl PromiseBounds {
    pub fn new(n: usize, p: &Rational, q: &Rational) -> Result<Self> {
        if p >= q {
            return Err(Error::OutOfRange("promise needs p < q".into()));
        }
        let zero = Rational::from_integer(0.into());
        let one = Rational::from_integer(1.into());
        if p <= &zero || q >= &one {
            return Err(Error::OutOfRange("promise needs 0 < p < q < 1".into()));
        }
        let nn = Rational::from_integer((n as i64).into());
        let low_max = (p * &nn).floor().to_integer().try_into().unwrap_or(0usize);
        let high_min = ceil_to_u64(&(q * &nn)) as usize;
        Ok(PromiseBounds { n, low_max, high_min })
    }

    pub fn is_low(&self, weight: usize) -> bool {
        weight <= self.low_max
    }

    pub fn is_high(&self, weight: usize) -> bool {
        weight >= self.high_min
    }
}

/// A promise violation: an input on one side with the wrong output.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub input: Vec<bool>,
    pub output: bool,
}

/// Checks `f(x) = 0` for `|x| ≤ pn` and `f(x) = 1` for `|x| ≥ qn`.
pub fn check_promise<E: Evaluator + ?Sized>(
    f: &E,
    p: &Rational,
    q: &Rational,
    mode: PromiseMode,
) -> Result<Vec<Violation>> {
    let n = f.num_inputs();
    let bounds = PromiseBounds::new(n, p, q)?;
    let mut violations = match mode {
        PromiseMode::Exhaustive => exhaustive(f, &bounds)?,
        PromiseMode::Sampled { count, seed } => sampled(f, &bounds, count, seed),
    };
    violations.sort();
    violations.dedup();
    Ok(violations)
}

fn binom_u128(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn exhaustive<E: Evaluator + ?Sized>(f: &E, b: &PromiseBounds) -> Result<Vec<Violation>> {
    let n = b.n;
    let weights: Vec<usize> = (0..=n).filter(|&w| b.is_low(w) || b.is_high(w)).collect();
    let total: u128 = weights.iter().map(|&w| binom_u128(n, w)).sum();
    if total > MAX_EXHAUSTIVE_INPUTS {
        return Err(Error::TooLarge(format!("{total} promise inputs on {n} bits")));
    }
    let mut out = Vec::new();
    let mut batch = Vec::with_capacity(256);
    let flush = |batch: &mut Vec<Vec<bool>>, out: &mut Vec<Violation>| {
        let values = f.eval_many(batch);
        for (x, v) in batch.drain(..).zip(values) {
            let w = x.iter().filter(|&&b| b).count();
            if v != b.is_high(w) {
                out.push(Violation { input: x, output: v });
            }
        }
    };
    for &w in &weights {
        for_each_weight(n, w, |x| {
            batch.push(x);
            if batch.len() == 256 {
                flush(&mut batch, &mut out);
            }
        });
    }
    flush(&mut batch, &mut out);
    Ok(out)
}

/// Visits every `n`-bit vector of weight `w` (positions in lexicographic order).
fn for_each_weight(n: usize, w: usize, mut visit: impl FnMut(Vec<bool>)) {
    let mut idx: Vec<usize> = (0..w).collect();
    loop {
        let mut x = vec![false; n];
        for &i in &idx {
            x[i] = true;
        }
        visit(x);
        // advance to the next combination
        let mut k = w;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if idx[k] < n - w + k {
                idx[k] += 1;
                for j in k + 1..w {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn ln_binom(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Draws a weight with probability proportional to the number of inputs of
/// that weight, then a uniform subset of that size.
fn draw_side<R: Rng>(rng: &mut R, n: usize, weights: &[usize]) -> Vec<bool> {
    let logs: Vec<f64> = weights.iter().map(|&w| ln_binom(n, w)).collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let probs: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut w = *weights.last().unwrap();
    for (&cand, &pr) in weights.iter().zip(&probs) {
        if u < pr {
            w = cand;
            break;
        }
        u -= pr;
    }
    let mut x = vec![false; n];
    for i in rand::seq::index::sample(rng, n, w) {
        x[i] = true;
    }
    x
}

fn sampled<E: Evaluator + ?Sized>(f: &E, b: &PromiseBounds, count: usize, seed: u64) -> Vec<Violation> {
    let n = b.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let low: Vec<usize> = (0..=n).filter(|&w| b.is_low(w)).collect();
    let high: Vec<usize> = (0..=n).filter(|&w| b.is_high(w)).collect();
    let mut out = Vec::new();
    for (side, expected) in [(&low, false), (&high, true)] {
        if side.is_empty() {
            continue;
        }
        let mut remaining = count;
        while remaining > 0 {
            let take = remaining.min(1024);
            let xs: Vec<Vec<bool>> = (0..take).map(|_| draw_side(&mut rng, n, side)).collect();
            let values = f.eval_many(&xs);
            for (x, v) in xs.into_iter().zip(values) {
                if v != expected {
                    out.push(Violation { input: x, output: v });
                }
            }
            remaining -= take;
        }
    }
    out
}
