//! Agnostic learning by empirical `l1` regression over low-degree parity
//! features, rounded at a threshold.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boolfn::{encode, Evaluator};
use crate::error::{Error, Result};
use crate::lp::{Cmp, LpProblem};
use crate::polynomial::{Basis, MultilinearPoly};
use crate::rational::{dyadic_f64, int, to_f64, Rational};

/// Feature count above which a fit is refused.
pub const MAX_FEATURES: usize = 5000;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    Uniform,
    /// Independent bits, bit `i` set with probability `p[i]`.
    Product { p: Vec<f64> },
}

#[derive(Clone, Debug, Serialize)]
pub struct DatasetMeta {
    pub target: String,
    pub dist: Distribution,
    pub noise: f64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub n: usize,
    pub samples: Vec<(Vec<bool>, bool)>,
    pub meta: DatasetMeta,
}

impl Dataset {
    pub fn new(n: usize, samples: Vec<(Vec<bool>, bool)>, meta: DatasetMeta) -> Result<Self> {
        if let Some((x, _)) = samples.iter().find(|(x, _)| x.len() != n) {
            return Err(Error::LengthMismatch {
                expected: n,
                got: x.len(),
            });
        }
        Ok(Dataset { n, samples, meta })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Draws `count` labelled examples from `target`, flipping each label with
/// probability `noise`.
pub fn gen_dataset(
    target: &impl Evaluator,
    name: &str,
    dist: &Distribution,
    noise: f64,
    count: usize,
    seed: u64,
) -> Result<Dataset> {
    if !(0.0..0.5).contains(&noise) {
        return Err(Error::OutOfRange(format!("noise must lie in [0, 1/2), got {noise}")));
    }
    let n = target.num_inputs();
    if let Distribution::Product { p } = dist {
        if p.len() != n || p.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::OutOfRange("product distribution needs n probabilities in [0, 1]".into()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let x: Vec<bool> = match dist {
            Distribution::Uniform => (0..n).map(|_| rng.gen()).collect(),
            Distribution::Product { p } => p.iter().map(|&pi| rng.gen_bool(pi)).collect(),
        };
        let flip = noise > 0.0 && rng.gen_bool(noise);
        let b = target.eval_bits(&x) != flip;
        samples.push((x, b));
    }
    Dataset::new(
        n,
        samples,
        DatasetMeta {
            target: name.to_string(),
            dist: dist.clone(),
            noise,
            seed,
        },
    )
}

/// All masks of popcount at most `d` over `n` bits, by degree then value.
pub fn feature_masks(n: usize, d: usize) -> Result<Vec<u64>> {
    if n > 63 {
        return Err(Error::TooLarge(format!("{n} variables")));
    }
    let count: u128 = (0..=d.min(n)).map(|k| crate::polynomial::binomial(n, k).try_into().unwrap_or(u128::MAX)).sum();
    if count > MAX_FEATURES as u128 {
        return Err(Error::TooLarge(format!("{count} features (cap {MAX_FEATURES})")));
    }
    let mut out = Vec::with_capacity(count as usize);
    for k in 0..=d.min(n) {
        let mut mask: u64 = (1u64 << k) - 1;
        while mask < 1u64 << n {
            out.push(mask);
            if mask == 0 {
                break;
            }
            // next mask with the same popcount
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Rounding {
    /// Predict 1 when `h(x) >= 1/2`.
    Half,
    /// One threshold drawn uniformly from `[0, 1]`.
    Random { seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Hypothesis {
    pub degree: usize,
    /// Coefficients over the characters `(-1)^{x_S}`, `|S| <= degree`.
    #[serde(skip)]
    pub poly: MultilinearPoly,
    pub threshold: f64,
    pub features: usize,
    /// Exact empirical `l1` loss of `poly` on the fitting data, divided by
    /// the sample count.
    pub l1_loss: f64,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub l1_loss_exact: Rational,
}

impl Hypothesis {
    pub fn value(&self, x: &[bool]) -> f64 {
        to_f64(&self.poly.eval_mask(encode(x)))
    }

    pub fn predict(&self, x: &[bool]) -> bool {
        self.value(x) >= self.threshold
    }

    /// Fraction of misclassified examples.
    pub fn error_on(&self, samples: &[(Vec<bool>, bool)]) -> f64 {
        if samples.is_empty() {
            return 0.0;
        }
        let wrong = samples.iter().filter(|(x, b)| self.predict(x) != *b).count();
        wrong as f64 / samples.len() as f64
    }
}

/// Label counts per distinct input: `(count of b = 0, count of b = 1)`.
fn aggregate(samples: &[(Vec<bool>, bool)]) -> BTreeMap<u64, (u64, u64)> {
    let mut groups: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    for (x, b) in samples {
        let e = groups.entry(encode(x)).or_default();
        if *b {
            e.1 += 1;
        } else {
            e.0 += 1;
        }
    }
    groups
}

/// Exact `sum |h(x) - b|` over the samples.
pub fn l1_loss(poly: &MultilinearPoly, samples: &[(Vec<bool>, bool)]) -> Rational {
    let mut total = Rational::zero();
    for (x, (zeros, ones)) in aggregate(samples) {
        let v = poly.eval_mask(x);
        total += v.abs() * int(zeros as i64) + (&v - int(1)).abs() * int(ones as i64);
    }
    total
}

/// Minimizes the empirical `l1` loss over polynomials of degree at most `d`.
///
/// Inputs seen more than once are merged: each distinct `x` gets one value
/// `h(x)` and slacks `s0 >= |h(x)|`, `s1 >= |h(x) - 1|` weighted by its label
/// counts.
pub fn l1_fit(data: &Dataset, d: usize) -> Result<Hypothesis> {
    if data.is_empty() {
        return Err(Error::OutOfRange("empty dataset".into()));
    }
    let masks = feature_masks(data.n, d)?;
    let groups = aggregate(&data.samples);
    let mut lp = LpProblem::new();
    let coeffs: Vec<usize> = masks.iter().map(|_| lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY)).collect();
    for (&x, &(zeros, ones)) in &groups {
        let row: Vec<(usize, f64)> = masks
            .iter()
            .zip(&coeffs)
            .map(|(&m, &v)| (v, if (m & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        for (weight, label) in [(zeros, 0.0), (ones, 1.0)] {
            if weight == 0 {
                continue;
            }
            let s = lp.add_var(weight as f64, 0.0, f64::INFINITY);
            // s >= h(x) - label and s >= label - h(x)
            let mut up = row.clone();
            up.push((s, -1.0));
            lp.add_row(up, Cmp::Le, label);
            let mut down = row.clone();
            down.push((s, 1.0));
            lp.add_row(down, Cmp::Ge, label);
        }
    }
    let sol = lp.solve()?;
    let terms = masks
        .iter()
        .zip(&coeffs)
        .map(|(&m, &v)| (m, dyadic_f64(sol.values[v], 40)))
        .filter(|(_, c)| !c.is_zero());
    let poly = MultilinearPoly::from_terms(data.n, Basis::PM, terms)?;
    let exact = l1_loss(&poly, &data.samples);
    let per_sample = to_f64(&exact) / data.len() as f64;
    Ok(Hypothesis {
        degree: d,
        poly,
        threshold: 0.5,
        features: masks.len(),
        l1_loss: per_sample,
        l1_loss_exact: exact,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LearnReport {
    pub n: usize,
    pub degree: usize,
    pub features: usize,
    pub train_size: usize,
    pub holdout_size: usize,
    pub l1_loss: f64,
    pub train_err: f64,
    pub holdout_err: f64,
    pub threshold: f64,
}

/// Shuffles, splits off a holdout, fits on the rest and rounds.
pub fn agnostic_learn(
    data: &Dataset,
    d: usize,
    holdout: f64,
    seed: u64,
    rounding: Rounding,
) -> Result<(Hypothesis, LearnReport)> {
    let k = (data.len() as f64 * holdout).round() as usize;
    if !(0.0..1.0).contains(&holdout) || k == 0 || k >= data.len() {
        return Err(Error::OutOfRange(format!(
            "holdout fraction {holdout} leaves an empty split of {} samples",
            data.len()
        )));
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
    let pick = |idx: &[usize]| idx.iter().map(|&i| data.samples[i].clone()).collect::<Vec<_>>();
    let test = pick(&order[..k]);
    let train = Dataset {
        n: data.n,
        samples: pick(&order[k..]),
        meta: data.meta.clone(),
    };
    let mut h = l1_fit(&train, d)?;
    if let Rounding::Random { seed } = rounding {
        h.threshold = ChaCha8Rng::seed_from_u64(seed).gen::<f64>();
    }
    let report = LearnReport {
        n: data.n,
        degree: d,
        features: h.features,
        train_size: train.len(),
        holdout_size: test.len(),
        l1_loss: h.l1_loss,
        train_err: h.error_on(&train.samples),
        holdout_err: h.error_on(&test),
        threshold: h.threshold,
    };
    Ok((h, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{NamedFunction, TruthTable};
    use crate::rational::ratio;

    fn named(kind: NamedFunction, n: usize) -> TruthTable {
        TruthTable::named(kind, n).unwrap()
    }

    #[test]
    fn feature_enumeration() {
        let m = feature_masks(5, 2).unwrap();
        assert_eq!(m.len(), 1 + 5 + 10);
        assert_eq!(m[0], 0);
        assert!(m.iter().all(|x| x.count_ones() <= 2));
        let mut sorted = m.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), m.len());
        assert!(feature_masks(30, 5).is_err());
    }

    #[test]
    fn noise_rate_and_consistency() {
        let f = named(NamedFunction::Majority, 7);
        let clean = gen_dataset(&f, "maj", &Distribution::Uniform, 0.0, 500, 1).unwrap();
        assert!(clean.samples.iter().all(|(x, b)| f.eval_bits(x) == *b));
        let noisy = gen_dataset(&f, "maj", &Distribution::Uniform, 0.1, 5000, 2).unwrap();
        let flips = noisy.samples.iter().filter(|(x, b)| f.eval_bits(x) != *b).count() as f64 / 5000.0;
        assert!((0.08..=0.12).contains(&flips), "flip rate {flips}");
        let constant = TruthTable::constant(4, false).unwrap();
        let half = gen_dataset(&constant, "zero", &Distribution::Uniform, 0.499, 5000, 3).unwrap();
        let ones = half.samples.iter().filter(|s| s.1).count() as f64 / 5000.0;
        assert!((ones - 0.5).abs() < 0.03);
        assert!(gen_dataset(&f, "maj", &Distribution::Uniform, 0.5, 10, 0).is_err());
    }

    #[test]
    fn realizable_fit_has_zero_loss() {
        let f = named(NamedFunction::And, 3);
        let data = gen_dataset(&f, "and", &Distribution::Uniform, 0.0, 200, 4).unwrap();
        let h = l1_fit(&data, 3).unwrap();
        assert!(h.l1_loss_exact.is_zero());
        let one = Dataset::new(2, vec![(vec![true, false], true)], data.meta.clone()).unwrap();
        let h = l1_fit(&one, 0).unwrap();
        assert_eq!(h.poly.coeff(0), int(1));
        assert!(h.l1_loss_exact.is_zero());
    }

    #[test]
    fn fit_is_locally_optimal() {
        let f = named(NamedFunction::Majority, 5);
        let data = gen_dataset(&f, "maj", &Distribution::Uniform, 0.2, 400, 5).unwrap();
        let h = l1_fit(&data, 2).unwrap();
        let base = h.l1_loss_exact.clone();
        let tol = ratio(1, 1_000_000);
        for &m in &feature_masks(5, 2).unwrap() {
            for step in [ratio(1, 1000), ratio(-1, 1000)] {
                let mut p = h.poly.clone();
                p.add_term(m, step);
                assert!(l1_loss(&p, &data.samples) >= &base - &tol);
            }
        }
    }

    #[test]
    fn parity_is_uncorrelated_on_the_full_cube() {
        // each input once: no polynomial of degree < 8 beats loss 1/2
        let f = named(NamedFunction::Parity, 8);
        let samples = (0..256u64).map(|x| (crate::boolfn::decode(x, 8), f.get(x))).collect();
        let meta = DatasetMeta {
            target: "parity".into(),
            dist: Distribution::Uniform,
            noise: 0.0,
            seed: 0,
        };
        let data = Dataset::new(8, samples, meta).unwrap();
        let h = l1_fit(&data, 4).unwrap();
        assert!((h.l1_loss - 0.5).abs() < 1e-6, "loss {}", h.l1_loss);
    }

    #[test]
    fn split_checks() {
        let f = named(NamedFunction::Or, 3);
        let data = gen_dataset(&f, "or", &Distribution::Uniform, 0.0, 10, 0).unwrap();
        assert!(agnostic_learn(&data, 1, 0.0, 0, Rounding::Half).is_err());
        assert!(agnostic_learn(&data, 1, 0.99, 0, Rounding::Half).is_err());
        let (_, r) = agnostic_learn(&data, 3, 0.3, 0, Rounding::Random { seed: 1 }).unwrap();
        assert_eq!(r.train_size + r.holdout_size, 10);
    }
}
