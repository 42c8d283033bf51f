//! Randomized small-depth circuits for approximate majority: the depth-3
//! AND-OR-AND sampler and the size-reducing recursive composition.

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boolfn::{check_promise, GateKind, LayeredCircuit, Literal, PromiseMode, Violation};
use crate::error::{Error, Result};
use crate::rational::{ceil_to_u64, int, to_f64, Rational};

/// Parameters of the depth-3 sampler on `m` inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AmajSpec {
    pub m: usize,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub delta: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub p: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub q: Rational,
    pub seed: u64,
}

/// Gate and wire counts of a sampled circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeLedger {
    pub t1: usize,
    pub t2: usize,
    pub t3: usize,
    /// Gates per layer, bottom first.
    pub layer_sizes: Vec<usize>,
    pub size: usize,
    pub wires: usize,
    pub max_bottom_fan_in: usize,
    /// `1 + t1 + t1 t2`.
    pub size_formula: usize,
}

impl AmajSpec {
    /// Defaults at `delta = 1`: `p = 1/5`, `q = 1/2`.
    pub fn new(m: usize, delta: Rational, p: Rational, q: Rational, seed: u64) -> Result<Self> {
        let spec = AmajSpec { m, delta, p, q, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_defaults(m: usize, seed: u64) -> Self {
        AmajSpec {
            m,
            delta: int(1),
            p: Rational::new(1.into(), 5.into()),
            q: Rational::new(1.into(), 2.into()),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m < 4 {
            return Err(Error::OutOfRange(format!("the sampler needs m >= 4, got {}", self.m)));
        }
        if self.delta <= Rational::zero() {
            return Err(Error::OutOfRange("delta must be positive".into()));
        }
        if self.p <= Rational::zero() || self.p >= self.q || self.q >= Rational::one() {
            return Err(Error::OutOfRange(format!("need 0 < p < q < 1, got p = {}, q = {}", self.p, self.q)));
        }
        let d = to_f64(&self.delta);
        if to_f64(&self.p) >= 2f64.powf(-(1.0 + d)) {
            return Err(Error::OutOfRange(format!("p = {} is not below 2^-(1+delta)", self.p)));
        }
        // q = 2^-delta; a rational q can only match it from above
        if to_f64(&self.q) < 2f64.powf(-d) - 1e-12 {
            return Err(Error::OutOfRange(format!("q = {} is below 2^-delta", self.q)));
        }
        Ok(())
    }

    pub fn t1(&self) -> usize {
        self.m
    }

    /// `⌈m^(1+delta)⌉`.
    pub fn t2(&self) -> usize {
        let v = (self.m as f64).powf(1.0 + to_f64(&self.delta));
        (v - 1e-9).ceil() as usize
    }

    /// `⌈log2 m⌉`.
    pub fn t3(&self) -> usize {
        (self.m as f64).log2().ceil() as usize
    }
}

/// AND of `t1` ORs, each over `t2` ANDs of `t3` random inputs (drawn with
/// replacement, duplicates merged).
pub fn sample_depth3(spec: &AmajSpec) -> Result<LayeredCircuit> {
    spec.validate()?;
    let (t1, t2, t3) = (spec.t1(), spec.t2(), spec.t3());
    if t1.checked_mul(t2).is_none_or(|g| g > 1 << 26) {
        return Err(Error::TooLarge(format!("{t1} x {t2} bottom gates")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bottom: Vec<Vec<Literal>> = (0..t1 * t2)
        .map(|_| (0..t3).map(|_| Literal::pos(rng.gen_range(0..spec.m))).collect())
        .collect();
    let ors = (0..t1).map(|i| (i * t2..(i + 1) * t2).collect()).collect();
    LayeredCircuit::new(spec.m, GateKind::And, bottom, vec![ors, vec![(0..t1).collect()]])
}

/// Counts gates and wires of a circuit produced by [`sample_depth3`].
pub fn size_ledger(spec: &AmajSpec, c: &LayeredCircuit) -> SizeLedger {
    let wires = c.bottom().iter().map(|g| g.len()).sum::<usize>()
        + c.upper().iter().flatten().map(|g| g.len()).sum::<usize>();
    SizeLedger {
        t1: spec.t1(),
        t2: spec.t2(),
        t3: spec.t3(),
        layer_sizes: c.layer_sizes(),
        size: c.size(),
        wires,
        max_bottom_fan_in: c.bottom().iter().map(|g| g.len()).max().unwrap_or(0),
        size_formula: 1 + spec.t1() + spec.t1() * spec.t2(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PromiseReport {
    #[serde(serialize_with = "crate::rational::serialize")]
    pub p: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub q: Rational,
    pub samples_per_side: usize,
    pub violations: usize,
    /// First few violating inputs as bit strings.
    pub examples: Vec<String>,
}

pub fn promise_report(c: &LayeredCircuit, p: &Rational, q: &Rational, samples: usize, seed: u64) -> Result<PromiseReport> {
    let v: Vec<Violation> = check_promise(c, p, q, PromiseMode::Sampled { count: samples, seed })?;
    Ok(PromiseReport {
        p: p.clone(),
        q: q.clone(),
        samples_per_side: samples,
        violations: v.len(),
        examples: v
            .iter()
            .take(4)
            .map(|x| x.input.iter().map(|&b| if b { '1' } else { '0' }).collect())
            .collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleOutcome {
    pub spec: AmajSpec,
    /// Sampler seeds tried, the last one accepted when `verified`.
    pub attempts: Vec<u64>,
    pub verified: bool,
    pub ledger: SizeLedger,
    pub promise: PromiseReport,
}

/// Resamples until the circuit passes a sampled promise check, trying
/// seeds `spec.seed, spec.seed + 1, ...`.
pub fn sample_verified(spec: &AmajSpec, samples: usize, max_attempts: usize) -> Result<(LayeredCircuit, SampleOutcome)> {
    let mut attempts = Vec::new();
    let mut last = None;
    for k in 0..max_attempts.max(1) as u64 {
        let seed = spec.seed.wrapping_add(k);
        let s = AmajSpec { seed, ..spec.clone() };
        let c = sample_depth3(&s)?;
        let promise = promise_report(&c, &spec.p, &spec.q, samples, seed ^ 0x5eed)?;
        attempts.push(seed);
        let ok = promise.violations == 0;
        last = Some((c, promise));
        if ok {
            break;
        }
    }
    let (c, promise) = last.expect("at least one attempt");
    let outcome = SampleOutcome {
        spec: spec.clone(),
        attempts,
        verified: promise.violations == 0,
        ledger: size_ledger(spec, &c),
        promise,
    };
    Ok((c, outcome))
}

/// Level-`i` parameters of the recursion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecursiveAmajParams {
    pub level: usize,
    pub d: usize,
    /// Inputs of the level-`i` circuit.
    pub m: usize,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub p: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub q: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub k: Rational,
}

impl RecursiveAmajParams {
    pub fn new(d: usize, m: usize, p: Rational, q: Rational) -> Result<Self> {
        if d == 0 {
            return Err(Error::OutOfRange("d must be positive".into()));
        }
        if p <= Rational::zero() || p >= q || q >= Rational::one() {
            return Err(Error::OutOfRange(format!("need 0 < p < q < 1, got p = {p}, q = {q}")));
        }
        Ok(RecursiveAmajParams {
            level: 0,
            d,
            m,
            p,
            q,
            k: int(2),
        })
    }

    fn shrink(&self) -> Rational {
        Rational::one() - Rational::new(1.into(), (10 * self.d as i64).into())
    }

    /// Parameters one level up, on `m^2` inputs (saturating).
    pub fn next(&self) -> Self {
        let s = self.shrink();
        RecursiveAmajParams {
            level: self.level + 1,
            d: self.d,
            m: self.m.saturating_mul(self.m),
            p: &s * &self.p,
            q: Rational::one() - (Rational::one() - &self.q) * &s,
            k: (Rational::one() + &self.k) / int(2),
        }
    }

    /// `⌈700 d^2 (1/p^2 + 1/q^2) m⌉` inner copies.
    pub fn copies(&self) -> u64 {
        let d2 = int((self.d * self.d) as i64);
        let inv = |r: &Rational| Rational::one() / (r * r);
        ceil_to_u64(&(int(700) * d2 * (inv(&self.p) + inv(&self.q)) * int(self.m as i64)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RecursiveReport {
    pub params: RecursiveAmajParams,
    pub next: RecursiveAmajParams,
    /// Copies the union bound asks for.
    pub copies_formula: u64,
    /// Copies actually used: the outer sampler's input count.
    pub copies: usize,
    pub n: usize,
    pub depth: usize,
    pub depth_bound: usize,
    pub inner_size: usize,
    pub outer_size: usize,
    pub size: usize,
    /// `copies (inner_size - 1) + outer_size`.
    pub size_formula: usize,
    pub promise: Option<PromiseReport>,
}

/// One recursion step: `copies` inner circuits on random `m`-subsets of
/// `m^2` inputs feed a freshly sampled outer circuit, whose bottom ANDs
/// absorb the inner top ANDs.
pub fn recursive_step(
    inner: &LayeredCircuit,
    outer_spec: &AmajSpec,
    params: &RecursiveAmajParams,
    seed: u64,
    verify_samples: Option<usize>,
) -> Result<(LayeredCircuit, RecursiveReport)> {
    let m = inner.n();
    if m != params.m {
        return Err(Error::OutOfRange(format!("inner circuit has {m} inputs, params say {}", params.m)));
    }
    if !inner.is_monotone() || inner.layer_kind(inner.depth() - 1) != GateKind::And {
        return Err(Error::InvalidCircuit("inner circuit must be monotone with an AND on top".into()));
    }
    if params.p > outer_spec.p || params.q < outer_spec.q {
        return Err(Error::OutOfRange(format!(
            "outer promise ({}, {}) does not cover ({}, {})",
            outer_spec.p, outer_spec.q, params.p, params.q
        )));
    }
    let outer = sample_depth3(outer_spec)?;
    let copies = outer.n();
    let n = m * m;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets: Vec<Vec<usize>> = (0..copies)
        .map(|_| rand::seq::index::sample(&mut rng, n, m).into_vec())
        .collect();
    let remap = |lits: &[Literal], j: usize| -> Vec<Literal> { lits.iter().map(|l| Literal::pos(subsets[j][l.var])).collect() };

    let d_in = inner.depth();
    let merged_children = |j: usize| -> Vec<usize> {
        // children of copy j's top gate, offset into the replicated layer
        let below = if d_in >= 2 { inner.layer_sizes()[d_in - 2] } else { 0 };
        inner.upper()[d_in - 2][0].iter().map(|&c| j * below + c).collect()
    };
    let outer_bottom = outer.bottom();
    let (bottom_kind, bottom, mut upper) = if d_in == 1 {
        let merged = outer_bottom
            .iter()
            .map(|g| g.iter().flat_map(|y| remap(&inner.bottom()[0], y.var)).collect())
            .collect();
        (GateKind::And, merged, Vec::new())
    } else {
        let bottom: Vec<Vec<Literal>> = (0..copies).flat_map(|j| inner.bottom().iter().map(move |g| (j, g))).map(|(j, g)| remap(g, j)).collect();
        let mut upper: Vec<Vec<Vec<usize>>> = Vec::new();
        let sizes = inner.layer_sizes();
        for (l, layer) in inner.upper()[..d_in - 2].iter().enumerate() {
            let below = sizes[l];
            upper.push(
                (0..copies)
                    .flat_map(|j| layer.iter().map(move |g| g.iter().map(|&c| j * below + c).collect()))
                    .collect(),
            );
        }
        let merged = outer_bottom
            .iter()
            .map(|g| g.iter().flat_map(|y| merged_children(y.var)).collect())
            .collect();
        upper.push(merged);
        (inner.bottom_kind(), bottom, upper)
    };
    upper.extend(outer.upper().iter().cloned());
    let c = LayeredCircuit::new(n, bottom_kind, bottom, upper)?;
    let next = params.next();
    let promise = match verify_samples {
        Some(s) => Some(promise_report(&c, &next.p, &next.q, s, seed ^ 0x5eed)?),
        None => None,
    };
    let report = RecursiveReport {
        params: params.clone(),
        copies_formula: params.copies(),
        copies,
        n,
        depth: c.depth(),
        depth_bound: outer.depth() + d_in - 1,
        inner_size: inner.size(),
        outer_size: outer.size(),
        size: c.size(),
        size_formula: copies * (inner.size() - 1) + outer.size(),
        promise,
        next,
    };
    Ok((c, report))
}

#[derive(Clone, Debug, Serialize)]
pub struct ChernoffReport {
    pub m: usize,
    pub d: usize,
    pub copies: u64,
    /// `exp(-p m / (600 d^2))`, the per-copy error bound.
    pub per_copy_bound: f64,
    /// Natural logs of both sides of the union bound.
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub holds: bool,
    /// Least `m` at which the inequality holds for these `p, q, d`.
    pub min_m: u64,
}

/// Evaluates `2^M exp(-p m/(600 d^2))^((700 d^2/p) m) < exp(-m^2)` in log
/// space.
pub fn chernoff_budget(params: &RecursiveAmajParams) -> ChernoffReport {
    let (m, d) = (params.m as f64, params.d as f64);
    let p = to_f64(&params.p);
    let copies = params.copies();
    let log_lhs = copies as f64 * std::f64::consts::LN_2 - (p * m / (600.0 * d * d)) * (700.0 * d * d / p) * m;
    let log_rhs = -m * m;
    // M ln 2 < m^2 / 6 with M linear in m
    let per_m = (copies as f64 / m.max(1.0)) * std::f64::consts::LN_2;
    let min_m = (6.0 * per_m).floor().to_u64().unwrap_or(u64::MAX) + 1;
    ChernoffReport {
        m: params.m,
        d: params.d,
        copies,
        per_copy_bound: (-p * m / (600.0 * d * d)).exp(),
        log_lhs,
        log_rhs,
        holds: log_lhs < log_rhs,
        min_m,
    }
}

/// Checks that raising any input never lowers the output, exhaustively up
/// to 12 inputs and on `samples` random inputs beyond.
pub fn check_monotone(c: &LayeredCircuit, samples: usize, seed: u64) -> bool {
    let n = c.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Vec<bool>> = if n <= 12 {
        (0..1u64 << n).map(|x| crate::boolfn::decode(x, n)).collect()
    } else {
        (0..samples).map(|_| (0..n).map(|_| rng.gen()).collect()).collect()
    };
    xs.iter().all(|x| {
        let base = c.eval(x).expect("length matches");
        (0..n).filter(|&i| !x[i]).all(|i| {
            let mut y = x.clone();
            y[i] = true;
            !base || c.eval(&y).expect("length matches")
        })
    })
}
