//! Polynomials for AND-gate compositions: the shared-input construction and
//! the recursive builder for layered circuits.

mod lc0;
mod verify;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::approxlp::{amplify, approx_degree, cheby_and, exact_error, exact_poly, min_mu_for_error};
use crate::boolfn::{decode, AndGate, Evaluator, SharedInputCircuit, TruthTable};
use crate::error::{Error, Result};
use crate::polynomial::{bits, expand_symmetric, mobius, Basis, MultilinearPoly, SymmetricPoly};
use crate::rational::{int, lcm_of_denominators, ratio, to_f64, Rational};

pub use lc0::{lc0_budget, lc0_compose, EpsSchedule, Lc0Options, Lc0Report, LevelRecord};
pub use verify::{verify_error, ErrorReport, VerifyMode};

/// Largest input count handled by the value-table route.
pub const MAX_VALUE_ROUTE_INPUTS: usize = 20;
/// Top functions up to this arity get their exact approximate degree for
/// the budget check; larger ones use the lower bound 1.
pub const MAX_TOP_DEGREE_ARITY: usize = 8;

/// For each monomial `s` of the top polynomial, the union `T_s` of the input
/// sets of the gates in `s` (over the all-positive inputs).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSupportMap {
    pub n: usize,
    pub supports: BTreeMap<u64, u64>,
}

/// `T_s` for every monomial of `p_top`; the gates must be all-positive.
pub fn support_map(c: &SharedInputCircuit, p_top: &MultilinearPoly) -> Result<MonomialSupportMap> {
    if c.has_negations() {
        return Err(Error::InvalidCircuit("support maps need an all-positive circuit; desugar first".into()));
    }
    check_top(c.gates(), p_top)?;
    if c.n() > 64 {
        return Err(Error::TooLarge(format!("{} inputs for a 64-bit support mask", c.n())));
    }
    let gate_masks: Vec<u64> = c.gates().iter().map(|g| g.pos().iter().fold(0, |m, &i| m | 1 << i)).collect();
    let supports = p_top
        .terms()
        .keys()
        .map(|&s| (s, bits(s).fold(0u64, |t, j| t | gate_masks[j])))
        .collect();
    Ok(MonomialSupportMap { n: c.n(), supports })
}

fn check_top(gates: &[AndGate], p_top: &MultilinearPoly) -> Result<()> {
    if p_top.basis() != Basis::ZO {
        return Err(Error::BasisMismatch("the top polynomial must be in the ZO basis"));
    }
    if p_top.nvars() != gates.len() {
        return Err(Error::LengthMismatch {
            expected: gates.len(),
            got: p_top.nvars(),
        });
    }
    Ok(())
}

/// Exact polynomial summing one conjunction per yes-input, fully expanded.
pub fn yes_input_poly(f: &TruthTable) -> Result<MultilinearPoly> {
    if f.arity() > 16 {
        return Err(Error::ArityOverflow {
            arity: f.arity(),
            cap: 16,
        });
    }
    exact_poly(f)
}

/// `10 (sqrt(deg_f n log2(m+2)) + sqrt(n log2(2/eps)))`.
pub fn composition_budget(deg_f: usize, n: usize, m: usize, eps: &Rational) -> f64 {
    if eps.is_zero() {
        return f64::INFINITY;
    }
    let n = n as f64;
    10.0 * ((deg_f as f64 * n * (m as f64 + 2.0).log2()).sqrt() + (n * (2.0 / to_f64(eps)).log2()).sqrt())
}

/// Result of replacing every AND in the top polynomial by a symmetric approximant.
#[derive(Clone, Debug)]
pub(crate) struct Substituted {
    pub poly: MultilinearPoly,
    pub max_support: usize,
    pub and_degree: usize,
    pub dropped: usize,
}

fn and_approximant(t: usize, delta: &Rational) -> SymmetricPoly {
    if delta.is_zero() {
        let mut c = vec![Rational::zero(); t + 1];
        c[t] = Rational::one();
        SymmetricPoly::new(t, c).expect("degree t")
    } else {
        cheby_and(t, delta)
    }
}

/// One conjunction of the top polynomial after desugaring: `coeff` times
/// the AND of the positive literals `pos` and the negated literals `neg`.
struct Conjunction {
    coeff: Rational,
    pos: u64,
    neg: u64,
}

fn conjunctions(n: usize, gates: &[AndGate], p_top: &MultilinearPoly) -> Result<(Rational, Vec<Conjunction>, usize)> {
    if n > 64 {
        return Err(Error::TooLarge(format!("{n} inputs for a 64-bit support mask")));
    }
    let mask = |idx: &[usize]| -> Result<u64> {
        idx.iter().try_fold(0u64, |m, &i| {
            if i >= n {
                Err(Error::InvalidCircuit(format!("gate references input {} but n = {n}", i + 1)))
            } else {
                Ok(m | 1 << i)
            }
        })
    };
    let lits = gates
        .iter()
        .map(|g| Ok((mask(g.pos())?, mask(g.neg())?)))
        .collect::<Result<Vec<_>>>()?;
    let mut constant = Rational::zero();
    let mut out = Vec::new();
    let mut dropped = 0;
    for (s, c) in p_top.terms() {
        let (pos, neg) = bits(*s).fold((0, 0), |(p, q), j| (p | lits[j].0, q | lits[j].1));
        if pos & neg != 0 {
            // contains x_i and its negation: identically zero on the cube
            dropped += 1;
        } else if pos | neg == 0 {
            constant += c;
        } else {
            out.push(Conjunction {
                coeff: c.clone(),
                pos,
                neg,
            });
        }
    }
    Ok((constant, out, dropped))
}

/// `sum_s alpha_s q_{|T_s|}(w_s(x))` over the original `n` inputs, where
/// `q_t` approximates `AND_t` to error `delta`.
pub(crate) fn substitute(n: usize, gates: &[AndGate], p_top: &MultilinearPoly, delta: &Rational) -> Result<Substituted> {
    check_top(gates, p_top)?;
    let (constant, conj, dropped) = conjunctions(n, gates, p_top)?;
    let mut approximants: BTreeMap<usize, SymmetricPoly> = BTreeMap::new();
    for c in &conj {
        let t = (c.pos.count_ones() + c.neg.count_ones()) as usize;
        approximants.entry(t).or_insert_with(|| and_approximant(t, delta));
    }
    let max_support = approximants.keys().copied().max().unwrap_or(0);
    let and_degree = approximants.values().map(|q| q.degree()).max().unwrap_or(0);
    if n <= MAX_VALUE_ROUTE_INPUTS {
        if let Some(poly) = value_route(n, &constant, &conj, &approximants)? {
            return Ok(Substituted {
                poly,
                max_support,
                and_degree,
                dropped,
            });
        }
    }
    let poly = symbolic_route(n, &constant, &conj, &approximants)?;
    Ok(Substituted {
        poly,
        max_support,
        and_degree,
        dropped,
    })
}

/// Tabulates every input with integer buckets indexed by (support size,
/// weight), then interpolates. Returns `None` if the coefficients do not fit
/// the fast integer path.
fn value_route(
    n: usize,
    constant: &Rational,
    conj: &[Conjunction],
    approximants: &BTreeMap<usize, SymmetricPoly>,
) -> Result<Option<MultilinearPoly>> {
    let coeff_den = lcm_of_denominators(conj.iter().map(|c| &c.coeff).chain([constant]));
    let mut nums = Vec::with_capacity(conj.len());
    for c in conj {
        match (c.coeff.numer() * (&coeff_den / c.coeff.denom())).to_i64() {
            Some(v) => nums.push(v as i128),
            None => return Ok(None),
        }
    }
    let weight_values: BTreeMap<usize, Vec<Rational>> =
        approximants.iter().map(|(&t, q)| (t, (0..=t).map(|w| q.eval(w)).collect())).collect();
    let q_den = lcm_of_denominators(weight_values.values().flatten());
    let mut offsets = BTreeMap::new();
    let mut table: Vec<BigInt> = Vec::new();
    for (&t, vals) in &weight_values {
        offsets.insert(t, table.len());
        table.extend(vals.iter().map(|v| v.numer() * (&q_den / v.denom())));
    }
    let slots: Vec<usize> = conj
        .iter()
        .map(|c| offsets[&((c.pos.count_ones() + c.neg.count_ones()) as usize)])
        .collect();
    let den = &coeff_den * &q_den;
    let const_num = constant.numer() * (&coeff_den / constant.denom()) * &q_den;
    let size = 1usize << n;
    let mut values = Vec::with_capacity(size);
    let mut buckets = vec![0i128; table.len()];
    let mut touched: Vec<usize> = Vec::new();
    for x in 0..size as u64 {
        for (c, (&slot, &a)) in conj.iter().zip(slots.iter().zip(&nums)) {
            let w = ((c.pos & x).count_ones() + (c.neg & !x).count_ones()) as usize;
            let k = slot + w;
            if buckets[k] == 0 {
                touched.push(k);
            }
            buckets[k] += a;
        }
        let mut acc = const_num.clone();
        for &k in &touched {
            if buckets[k] != 0 {
                acc += &table[k] * BigInt::from(buckets[k]);
            }
            buckets[k] = 0;
        }
        touched.clear();
        values.push(acc);
    }
    mobius(&mut values, n);
    Ok(Some(MultilinearPoly::from_integer_coeffs(n, values, &den)?))
}

/// Expands each approximant over its support on the desugared inputs and
/// folds `x̄ = 1 - x` back in.
fn symbolic_route(
    n: usize,
    constant: &Rational,
    conj: &[Conjunction],
    approximants: &BTreeMap<usize, SymmetricPoly>,
) -> Result<MultilinearPoly> {
    if 2 * n > 64 {
        return Err(Error::TooLarge(format!("{n} inputs for symbolic expansion")));
    }
    let mut acc = MultilinearPoly::constant(2 * n, Basis::ZO, constant.clone());
    for c in conj {
        let t = (c.pos.count_ones() + c.neg.count_ones()) as usize;
        let expanded = expand_symmetric(&approximants[&t], 2 * n, c.pos | c.neg << n)?;
        for (m, v) in expanded.terms() {
            acc.add_term(*m, v * &c.coeff);
        }
    }
    acc.fold_complements(n)
}

#[derive(Clone, Debug)]
pub struct ComposeOptions {
    /// Amplify the composed polynomial back to error `eps` (exhaustive only).
    pub amplify: bool,
    pub verify: VerifyMode,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        ComposeOptions {
            amplify: false,
            verify: VerifyMode::Exhaustive,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositionReport {
    #[serde(serialize_with = "crate::rational::serialize")]
    pub epsilon: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub delta: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub mu_top: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub top_error: Rational,
    pub top_degree: usize,
    /// `deg_eps` of the top function when computed, else the lower bound 1.
    pub deg_eps_top: usize,
    pub deg_eps_top_exact: bool,
    pub n: usize,
    pub m: usize,
    pub terms: usize,
    pub dropped_terms: usize,
    pub max_support: usize,
    pub and_degree: usize,
    pub output_degree: usize,
    pub budget: f64,
    pub within_budget: bool,
    /// Guaranteed error of the construction before amplification.
    #[serde(serialize_with = "crate::rational::serialize")]
    pub error_bound: Rational,
    pub error: Option<ErrorReport>,
    pub amplify_iterations: Option<usize>,
}

/// Composes the top polynomial with low-error AND approximants.
///
/// Without `top_witness` the top polynomial is the coefficient-norm
/// minimizer within `eps` of the top function. Each conjunction is replaced
/// by an approximant of error `delta = eps / mu`, for total error at most
/// `2 eps`.
pub fn shared_compose(
    c: &SharedInputCircuit,
    eps: &Rational,
    top_witness: Option<&MultilinearPoly>,
    opts: &ComposeOptions,
) -> Result<(MultilinearPoly, CompositionReport)> {
    if eps.is_negative() || eps > &ratio(1, 3) {
        return Err(Error::OutOfRange(format!("eps must lie in [0, 1/3], got {eps}")));
    }
    let f = c.top().to_table()?;
    let (p_top, top_error) = match top_witness {
        Some(p) => {
            let err = exact_error(p, &f)?;
            if err > *eps {
                return Err(Error::Verification(format!("top witness has error {err} > {eps}")));
            }
            (p.clone(), err)
        }
        None => {
            let r = min_mu_for_error(&f, eps, None)?;
            (r.witness, r.achieved_error)
        }
    };
    let mu = p_top.mu_norm();
    let delta = if mu.is_zero() { eps.clone() } else { eps / &mu };
    let sub = substitute(c.n(), c.gates(), &p_top, &delta)?;
    let (deg_eps_top, deg_eps_top_exact) = if f.arity() <= MAX_TOP_DEGREE_ARITY && eps < &ratio(1, 2) {
        (approx_degree(&f, eps, "top")?.degree, true)
    } else {
        (1, false)
    };
    let budget = composition_budget(deg_eps_top, c.n(), c.m(), eps);
    let mut poly = sub.poly;
    let mut amplify_iterations = None;
    if opts.amplify {
        let h = TruthTable::from_fn(c.n(), |x| c.eval_bits(&decode(x, c.n())))?;
        let a = amplify(&poly, &h, eps, 6)?;
        amplify_iterations = Some(a.iterations);
        poly = a.poly;
    }
    let error = match &opts.verify {
        VerifyMode::None => None,
        mode => Some(verify_error(&poly, c, mode)?),
    };
    let output_degree = poly.degree();
    let report = CompositionReport {
        epsilon: eps.clone(),
        delta,
        mu_top: mu,
        top_error,
        top_degree: p_top.degree(),
        deg_eps_top,
        deg_eps_top_exact,
        n: c.n(),
        m: c.m(),
        terms: poly.num_terms(),
        dropped_terms: sub.dropped,
        max_support: sub.max_support,
        and_degree: sub.and_degree,
        output_degree,
        within_budget: (output_degree as f64) <= budget,
        budget,
        error_bound: int(2) * eps,
        error,
        amplify_iterations,
    };
    Ok((poly, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{NamedFunction, TopFunction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parity_top(m: usize) -> TopFunction {
        TopFunction::named(NamedFunction::Parity, m).unwrap()
    }

    #[test]
    fn support_map_examples() {
        let c = SharedInputCircuit::new(
            3,
            vec![AndGate::positive(vec![0, 1]).unwrap(), AndGate::positive(vec![1, 2]).unwrap()],
            parity_top(2),
        )
        .unwrap();
        let p = MultilinearPoly::from_terms(2, Basis::ZO, [(0b11, int(1)), (0, int(1))]).unwrap();
        let map = support_map(&c, &p).unwrap();
        assert_eq!(map.supports[&0b11], 0b111);
        assert_eq!(map.supports[&0], 0);
        let block = SharedInputCircuit::block_compose(parity_top(3), 2).unwrap();
        let p = MultilinearPoly::monomial(3, Basis::ZO, 0b111, int(1));
        assert_eq!(support_map(&block, &p).unwrap().supports[&0b111].count_ones(), 6);
        let neg = SharedInputCircuit::new(2, vec![AndGate::new(vec![0], vec![1]).unwrap()], parity_top(1)).unwrap();
        assert!(support_map(&neg, &MultilinearPoly::var(1, Basis::ZO, 0)).is_err());
    }

    #[test]
    fn exact_path_for_a_single_gate() {
        let c = SharedInputCircuit::new(
            3,
            vec![AndGate::positive(vec![0, 1, 2]).unwrap()],
            TopFunction::Table(TruthTable::identity()),
        )
        .unwrap();
        let (p, report) = shared_compose(&c, &int(0), None, &ComposeOptions::default()).unwrap();
        assert_eq!(p, MultilinearPoly::monomial(3, Basis::ZO, 0b111, int(1)));
        assert!(report.error.unwrap().max_deviation.is_zero());
    }

    #[test]
    fn value_and_symbolic_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let c = SharedInputCircuit::random(&mut rng, 6, parity_top(3), 1..=4, 0.3).unwrap();
            let f = c.top().to_table().unwrap();
            let p_top = min_mu_for_error(&f, &ratio(1, 6), None).unwrap().witness;
            let delta = ratio(1, 6) / p_top.mu_norm();
            let (constant, conj, _) = conjunctions(6, c.gates(), &p_top).unwrap();
            let mut approx = BTreeMap::new();
            for cj in &conj {
                let t = (cj.pos.count_ones() + cj.neg.count_ones()) as usize;
                approx.entry(t).or_insert_with(|| and_approximant(t, &delta));
            }
            let fast = value_route(6, &constant, &conj, &approx).unwrap().unwrap();
            let slow = symbolic_route(6, &constant, &conj, &approx).unwrap();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn shared_parity_within_twice_eps() {
        // three overlapping gates on six inputs, one of them with a negation
        let gates = vec![
            AndGate::positive(vec![0, 1, 2]).unwrap(),
            AndGate::new(vec![2, 3], vec![0]).unwrap(),
            AndGate::positive(vec![3, 4, 5, 1]).unwrap(),
        ];
        let c = SharedInputCircuit::new(6, gates, parity_top(3)).unwrap();
        let eps = ratio(1, 9);
        let (p, report) = shared_compose(&c, &eps, None, &ComposeOptions::default()).unwrap();
        let err = report.error.clone().unwrap();
        assert!(err.max_deviation <= ratio(2, 9));
        let check = verify_error(&p, &c, &VerifyMode::Exhaustive).unwrap();
        assert_eq!(check.max_deviation, err.max_deviation);
        assert!(report.within_budget);
    }

    #[test]
    fn block_parity_against_budget() {
        let c = SharedInputCircuit::block_compose(parity_top(2), 4).unwrap();
        let eps = ratio(1, 6);
        let (_, report) = shared_compose(&c, &eps, None, &ComposeOptions::default()).unwrap();
        assert!(report.error.unwrap().max_deviation <= ratio(1, 3));
        assert_eq!(report.deg_eps_top, 2);
        assert!(report.within_budget, "{} > {}", report.output_degree, report.budget);
    }

    #[test]
    fn yes_input_examples() {
        let and2 = TruthTable::named(NamedFunction::And, 2).unwrap();
        assert_eq!(yes_input_poly(&and2).unwrap(), MultilinearPoly::monomial(2, Basis::ZO, 0b11, int(1)));
        let or2 = TruthTable::named(NamedFunction::Or, 2).unwrap();
        let p = yes_input_poly(&or2).unwrap();
        let expect = MultilinearPoly::from_terms(2, Basis::ZO, [(0b01, int(1)), (0b10, int(1)), (0b11, int(-1))]).unwrap();
        assert_eq!(p, expect);
        // literal sum of conjunctions over yes-inputs
        let parity = TruthTable::named(NamedFunction::Parity, 3).unwrap();
        let mut direct = MultilinearPoly::zero(3, Basis::ZO);
        let one = MultilinearPoly::constant(3, Basis::ZO, int(1));
        for y in 0..8u64 {
            if parity.get(y) {
                let mut term = one.clone();
                for i in 0..3 {
                    let xi = MultilinearPoly::var(3, Basis::ZO, i);
                    let factor = if (y >> i) & 1 == 1 { xi } else { one.sub(&xi).unwrap() };
                    term = term.mul(&factor).unwrap();
                }
                direct = direct.add(&term).unwrap();
            }
        }
        let p = yes_input_poly(&parity).unwrap();
        assert_eq!(p, direct);
        assert!(to_f64(&p.mu_norm()).log2() <= 6.0);
        for x in 0..8 {
            assert_eq!(p.eval(&decode(x, 3)).unwrap(), int(parity.eval_bits(&decode(x, 3)) as i64));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = SharedInputCircuit::block_compose(parity_top(2), 2).unwrap();
        assert!(shared_compose(&c, &ratio(1, 2), None, &ComposeOptions::default()).is_err());
        let bad = MultilinearPoly::constant(2, Basis::ZO, ratio(1, 2));
        assert!(matches!(
            shared_compose(&c, &ratio(1, 6), Some(&bad), &ComposeOptions::default()),
            Err(Error::Verification(_))
        ));
    }
}
