use rand::Rng;

use super::truth_table::{NamedFunction, TruthTable};
use crate::error::{Error, Result};

/// Anything that maps a fixed-length bit vector to one bit.
pub trait Evaluator {
    fn num_inputs(&self) -> usize;

    fn eval_bits(&self, x: &[bool]) -> bool;

    fn eval_many(&self, xs: &[Vec<bool>]) -> Vec<bool> {
        xs.iter().map(|x| self.eval_bits(x)).collect()
    }
}

impl Evaluator for TruthTable {
    fn num_inputs(&self) -> usize {
        self.arity()
    }

    fn eval_bits(&self, x: &[bool]) -> bool {
        self.get(super::truth_table::encode(x))
    }
}

impl<T: Evaluator + ?Sized> Evaluator for &T {
    fn num_inputs(&self) -> usize {
        (**self).num_inputs()
    }

    fn eval_bits(&self, x: &[bool]) -> bool {
        (**self).eval_bits(x)
    }

    fn eval_many(&self, xs: &[Vec<bool>]) -> Vec<bool> {
        (**self).eval_many(xs)
    }
}

/// Bottom-level AND over positive and negated inputs (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AndGate {
    pos: Vec<usize>,
    neg: Vec<usize>,
}

impl AndGate {
    pub fn new(mut pos: Vec<usize>, mut neg: Vec<usize>) -> Result<Self> {
        pos.sort_unstable();
        pos.dedup();
        neg.sort_unstable();
        neg.dedup();
        if pos.is_empty() && neg.is_empty() {
            return Err(Error::InvalidGate("fan-in 0".into()));
        }
        if let Some(i) = pos.iter().find(|i| neg.binary_search(i).is_ok()) {
            return Err(Error::InvalidGate(format!(
                "input {} appears both positive and negated",
                i + 1
            )));
        }
        Ok(AndGate { pos, neg })
    }

    pub fn positive(pos: Vec<usize>) -> Result<Self> {
        Self::new(pos, Vec::new())
    }

    pub fn pos(&self) -> &[usize] {
        &self.pos
    }

    pub fn neg(&self) -> &[usize] {
        &self.neg
    }

    pub fn fan_in(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.pos.iter().chain(&self.neg).copied().max()
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.pos.iter().all(|&i| x[i]) && self.neg.iter().all(|&i| !x[i])
    }
}

/// The function on top of the AND gates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopFunction {
    Named { kind: NamedFunction, arity: usize },
    Table(TruthTable),
    /// `base` with some wires fixed; the free wires keep their order.
    Restricted {
        base: Box<TopFunction>,
        fixed: Vec<Option<bool>>,
    },
}

impl TopFunction {
    pub fn named(kind: NamedFunction, arity: usize) -> Result<Self> {
        kind.check_arity(arity)?;
        Ok(TopFunction::Named { kind, arity })
    }

    pub fn arity(&self) -> usize {
        match self {
            TopFunction::Named { arity, .. } => *arity,
            TopFunction::Table(t) => t.arity(),
            TopFunction::Restricted { fixed, .. } => fixed.iter().filter(|v| v.is_none()).count(),
        }
    }

    pub fn eval(&self, y: &[bool]) -> bool {
        match self {
            TopFunction::Named { kind, .. } => kind.eval(y),
            TopFunction::Table(t) => t.eval_bits(y),
            TopFunction::Restricted { base, fixed } => {
                let mut free = y.iter();
                let full: Vec<bool> = fixed
                    .iter()
                    .map(|v| v.unwrap_or_else(|| *free.next().expect("arity checked")))
                    .collect();
                base.eval(&full)
            }
        }
    }

    /// Fixes wires; tables shrink in place, other tops are wrapped.
    pub fn restrict(&self, fixed: &[Option<bool>]) -> Result<Self> {
        if fixed.len() != self.arity() {
            return Err(Error::LengthMismatch {
                expected: self.arity(),
                got: fixed.len(),
            });
        }
        if fixed.iter().all(|v| v.is_none()) {
            return Ok(self.clone());
        }
        match self {
            TopFunction::Table(t) => Ok(TopFunction::Table(t.restrict(fixed)?)),
            TopFunction::Restricted { base, fixed: outer } => {
                let mut inner = fixed.iter();
                let merged = outer
                    .iter()
                    .map(|v| match v {
                        Some(b) => Some(*b),
                        None => *inner.next().expect("arity checked"),
                    })
                    .collect::<Vec<_>>();
                base.restrict_raw(merged)
            }
            TopFunction::Named { .. } => self.restrict_raw(fixed.to_vec()),
        }
    }

    fn restrict_raw(&self, fixed: Vec<Option<bool>>) -> Result<Self> {
        match self {
            TopFunction::Table(t) => Ok(TopFunction::Table(t.restrict(&fixed)?)),
            _ => Ok(TopFunction::Restricted {
                base: Box::new(self.clone()),
                fixed,
            }),
        }
    }

    /// Materializes the top as a table when its arity allows.
    pub fn to_table(&self) -> Result<TruthTable> {
        match self {
            TopFunction::Table(t) => Ok(t.clone()),
            _ => {
                let m = self.arity();
                if m > super::truth_table::MAX_ARITY {
                    return Err(Error::ArityOverflow {
                        arity: m,
                        cap: super::truth_table::MAX_ARITY,
                    });
                }
                TruthTable::from_fn(m, |i| self.eval(&super::truth_table::decode(i, m)))
            }
        }
    }
}

/// Depth-2 circuit: a top function over `m` AND gates on `n` shared inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharedInputCircuit {
    n: usize,
    gates: Vec<AndGate>,
    top: TopFunction,
}

impl SharedInputCircuit {
    pub fn new(n: usize, gates: Vec<AndGate>, top: TopFunction) -> Result<Self> {
        if top.arity() != gates.len() {
            return Err(Error::InvalidCircuit(format!(
                "top has arity {} but there are {} gates",
                top.arity(),
                gates.len()
            )));
        }
        for (g, gate) in gates.iter().enumerate() {
            if let Some(max) = gate.max_index() {
                if max >= n {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {} references input {} but n = {n}",
                        g + 1,
                        max + 1
                    )));
                }
            }
        }
        Ok(SharedInputCircuit { n, gates, top })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[AndGate] {
        &self.gates
    }

    pub fn top(&self) -> &TopFunction {
        &self.top
    }

    pub fn has_negations(&self) -> bool {
        self.gates.iter().any(|g| !g.neg.is_empty())
    }

    pub fn gate_values(&self, x: &[bool]) -> Vec<bool> {
        self.gates.iter().map(|g| g.eval(x)).collect()
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.top.eval(&self.gate_values(x)))
    }

    /// Rewrites every negated literal `x̄_i` as the positive input `n + i`,
    /// giving an all-positive circuit on `2n` inputs fed with `(x, x̄)`.
    pub fn desugar(&self) -> SharedInputCircuit {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let mut pos = g.pos.clone();
                pos.extend(g.neg.iter().map(|&i| self.n + i));
                AndGate::positive(pos).expect("nonempty gate")
            })
            .collect();
        SharedInputCircuit {
            n: 2 * self.n,
            gates,
            top: self.top.clone(),
        }
    }

    /// Block composition `top ∘ AND_k` on disjoint consecutive blocks.
    pub fn block_compose(top: TopFunction, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidGate("block size 0".into()));
        }
        let m = top.arity();
        let n = m
            .checked_mul(k)
            .filter(|&n| n <= 1 << 26)
            .ok_or_else(|| Error::TooLarge(format!("{m} blocks of size {k}")))?;
        let gates = (0..m)
            .map(|i| AndGate::positive((i * k..(i + 1) * k).collect()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, gates, top)
    }

    /// Random shared-input circuit: each gate draws its fan-in uniformly from
    /// `fan_in` and its inputs without replacement; each literal is negated
    /// with probability `neg_prob`.
    pub fn random<R: Rng>(
        rng: &mut R,
        n: usize,
        top: TopFunction,
        fan_in: std::ops::RangeInclusive<usize>,
        neg_prob: f64,
    ) -> Result<Self> {
        let m = top.arity();
        let lo = (*fan_in.start()).max(1);
        let hi = (*fan_in.end()).min(n);
        if lo > hi {
            return Err(Error::OutOfRange(format!("fan-in range {fan_in:?} for n = {n}")));
        }
        let mut gates = Vec::with_capacity(m);
        for _ in 0..m {
            let k = rng.gen_range(lo..=hi);
            let inputs = rand::seq::index::sample(rng, n, k).into_vec();
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for i in inputs {
                if rng.gen_bool(neg_prob) {
                    neg.push(i);
                } else {
                    pos.push(i);
                }
            }
            gates.push(AndGate::new(pos, neg)?);
        }
        Self::new(n, gates, top)
    }
}

impl Evaluator for SharedInputCircuit {
    fn num_inputs(&self) -> usize {
        self.n
    }

    fn eval_bits(&self, x: &[bool]) -> bool {
        self.top.eval(&self.gate_values(x))
    }
}

/// `(x, x̄)` as fed to a desugared circuit.
pub fn with_complements(x: &[bool]) -> Vec<bool> {
    x.iter().copied().chain(x.iter().map(|b| !b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::truth_table::decode;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn or2() -> TopFunction {
        TopFunction::Table(TruthTable::named(NamedFunction::Or, 2).unwrap())
    }

    #[test]
    fn evaluates_gate_values_then_top() {
        let c = SharedInputCircuit::new(
            3,
            vec![
                AndGate::positive(vec![0, 1]).unwrap(),
                AndGate::new(vec![2], vec![0]).unwrap(),
            ],
            or2(),
        )
        .unwrap();
        let x = [true, true, false];
        assert_eq!(c.gate_values(&x), vec![true, false]);
        assert!(c.eval(&x).unwrap());
        assert!(matches!(c.eval(&[true]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn block_composition_examples() {
        let c = SharedInputCircuit::block_compose(
            TopFunction::Table(TruthTable::named(NamedFunction::Parity, 2).unwrap()),
            2,
        )
        .unwrap();
        assert!(c.eval(&[true, true, true, false]).unwrap());
        let c = SharedInputCircuit::block_compose(TopFunction::named(NamedFunction::Parity, 3).unwrap(), 2).unwrap();
        assert!(c.eval(&[true; 6]).unwrap());
        let c = SharedInputCircuit::block_compose(TopFunction::named(NamedFunction::Parity, 4).unwrap(), 4).unwrap();
        assert!(!c.eval(&[true; 16]).unwrap());
        let single = SharedInputCircuit::block_compose(
            TopFunction::Table(TruthTable::named(NamedFunction::Or, 1).unwrap()),
            3,
        )
        .unwrap();
        for i in 0..8 {
            let x = decode(i, 3);
            assert_eq!(single.eval(&x).unwrap(), i == 7);
        }
    }

    #[test]
    fn rejects_malformed_gates() {
        assert!(AndGate::new(vec![], vec![]).is_err());
        assert!(AndGate::new(vec![1], vec![1]).is_err());
        let gate = AndGate::positive(vec![5]).unwrap();
        assert!(SharedInputCircuit::new(3, vec![gate], TopFunction::Table(TruthTable::identity())).is_err());
    }

    #[test]
    fn desugar_index_mapping() {
        let c = SharedInputCircuit::new(
            2,
            vec![AndGate::new(vec![0], vec![1]).unwrap()],
            TopFunction::Table(TruthTable::identity()),
        )
        .unwrap();
        let d = c.desugar();
        assert_eq!(d.n(), 4);
        assert_eq!(d.gates()[0].pos(), &[0, 3]);
        assert!(d.gates()[0].neg().is_empty());
    }

    #[test]
    fn desugar_agrees_exhaustively_on_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(2..=10);
            let m = rng.gen_range(1..=5);
            let top = TopFunction::Table(TruthTable::from_fn(m, |_| rng.gen_bool(0.5)).unwrap());
            let c = SharedInputCircuit::random(&mut rng, n, top, 1..=n, 0.4).unwrap();
            let d = c.desugar();
            for i in 0..1u64 << n {
                let x = decode(i, n);
                assert_eq!(c.eval(&x).unwrap(), d.eval(&with_complements(&x)).unwrap());
            }
        }
    }

    #[test]
    fn restricted_top_evaluates_through_fixed_wires() {
        let parity = TopFunction::named(NamedFunction::Parity, 4).unwrap();
        let r = parity.restrict(&[Some(true), None, Some(false), None]).unwrap();
        assert_eq!(r.arity(), 2);
        assert!(r.eval(&[false, false]));
        assert!(!r.eval(&[true, false]));
        let rr = r.restrict(&[None, Some(true)]).unwrap();
        assert_eq!(rr.arity(), 1);
        assert!(!rr.eval(&[false]));
        let table = TopFunction::Table(TruthTable::named(NamedFunction::Parity, 4).unwrap());
        let rt = table.restrict(&[Some(true), None, Some(false), None]).unwrap();
        assert!(matches!(rt, TopFunction::Table(_)));
        assert_eq!(rt.to_table().unwrap(), r.to_table().unwrap());
    }
}
