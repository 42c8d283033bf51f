use rand::Rng;

use super::circuit::{AndGate, Evaluator};
use super::truth_table::{decode, TruthTable, MAX_ARITY};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
}

impl GateKind {
    pub fn flip(self) -> Self {
        match self {
            GateKind::And => GateKind::Or,
            GateKind::Or => GateKind::And,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    pub fn eval(self, x: &[bool]) -> bool {
        x[self.var] != self.negated
    }
}

/// Alternating AND/OR circuit with negations only on input literals.
///
/// Layer 0 is the bottom layer and reads literals; every higher layer reads
/// gate indices of the layer directly below. The top layer holds exactly one
/// gate, the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredCircuit {
    n: usize,
    bottom_kind: GateKind,
    bottom: Vec<Vec<Literal>>,
    upper: Vec<Vec<Vec<usize>>>,
}

impl LayeredCircuit {
    pub fn new(
        n: usize,
        bottom_kind: GateKind,
        bottom: Vec<Vec<Literal>>,
        upper: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidCircuit(msg));
        let mut bottom = bottom;
        for (g, lits) in bottom.iter_mut().enumerate() {
            lits.sort_unstable();
            lits.dedup();
            if lits.is_empty() {
                return bad(format!("bottom gate {} has fan-in 0", g + 1));
            }
            if let Some(l) = lits.iter().find(|l| l.var >= n) {
                return bad(format!("bottom gate {} reads input {} but n = {n}", g + 1, l.var + 1));
            }
            if lits.windows(2).any(|w| w[0].var == w[1].var) {
                return bad(format!("bottom gate {} reads a variable and its negation", g + 1));
            }
        }
        let mut upper = upper;
        let mut below = bottom.len();
        for (l, layer) in upper.iter_mut().enumerate() {
            for (g, children) in layer.iter_mut().enumerate() {
                children.sort_unstable();
                children.dedup();
                if children.is_empty() {
                    return bad(format!("gate {} of layer {} has fan-in 0", g + 1, l + 2));
                }
                if let Some(&c) = children.iter().find(|&&c| c >= below) {
                    return bad(format!(
                        "gate {} of layer {} reads gate {} but the layer below has {below}",
                        g + 1,
                        l + 2,
                        c + 1
                    ));
                }
            }
            below = layer.len();
        }
        if below != 1 {
            return bad(format!("top layer must hold exactly one gate, found {below}"));
        }
        Ok(LayeredCircuit {
            n,
            bottom_kind,
            bottom,
            upper,
        })
    }

    /// A single AND or OR gate over literals.
    pub fn single_gate(n: usize, kind: GateKind, lits: Vec<Literal>) -> Result<Self> {
        Self::new(n, kind, vec![lits], Vec::new())
    }

    /// Monotone CNF for "at least `k` of `n` inputs are 1": the AND over all
    /// `(n-k+1)`-subsets of the OR of that subset.
    pub fn threshold_cnf(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::OutOfRange(format!("threshold {k} for {n} inputs")));
        }
        let width = n - k + 1;
        let mut clauses = Vec::new();
        for mask in 0u64..1 << n {
            if mask.count_ones() as usize == width {
                clauses.push((0..n).filter(|&i| (mask >> i) & 1 == 1).map(Literal::pos).collect());
            }
        }
        let top = vec![(0..clauses.len()).collect()];
        Self::new(n, GateKind::Or, clauses, vec![top])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        1 + self.upper.len()
    }

    pub fn size(&self) -> usize {
        self.bottom.len() + self.upper.iter().map(Vec::len).sum::<usize>()
    }

    pub fn bottom_kind(&self) -> GateKind {
        self.bottom_kind
    }

    /// Kind of layer `l` (0 = bottom).
    pub fn layer_kind(&self, l: usize) -> GateKind {
        if l.is_multiple_of(2) {
            self.bottom_kind
        } else {
            self.bottom_kind.flip()
        }
    }

    pub fn bottom(&self) -> &[Vec<Literal>] {
        &self.bottom
    }

    pub fn upper(&self) -> &[Vec<Vec<usize>>] {
        &self.upper
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.bottom.len())
            .chain(self.upper.iter().map(Vec::len))
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.bottom.iter().flatten().all(|l| !l.negated)
    }

    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[bool]) -> bool {
        let combine = |kind: GateKind, mut vals: Box<dyn Iterator<Item = bool> + '_>| match kind {
            GateKind::And => vals.all(|v| v),
            GateKind::Or => vals.any(|v| v),
        };
        let mut values: Vec<bool> = self
            .bottom
            .iter()
            .map(|lits| combine(self.bottom_kind, Box::new(lits.iter().map(|l| l.eval(x)))))
            .collect();
        for (l, layer) in self.upper.iter().enumerate() {
            let kind = self.layer_kind(l + 1);
            values = layer
                .iter()
                .map(|children| combine(kind, Box::new(children.iter().map(|&c| values[c]))))
                .collect();
        }
        values[0]
    }

    /// Evaluates 64 inputs at once; `lanes[i]` holds input variable `i` for
    /// all 64 lanes.
    pub fn eval_lanes(&self, lanes: &[u64]) -> u64 {
        let combine = |kind: GateKind, vals: &mut dyn Iterator<Item = u64>| match kind {
            GateKind::And => vals.fold(!0u64, |a, v| a & v),
            GateKind::Or => vals.fold(0u64, |a, v| a | v),
        };
        let lit = |l: &Literal| if l.negated { !lanes[l.var] } else { lanes[l.var] };
        let mut values: Vec<u64> = self
            .bottom
            .iter()
            .map(|lits| combine(self.bottom_kind, &mut lits.iter().map(lit)))
            .collect();
        for (l, layer) in self.upper.iter().enumerate() {
            let kind = self.layer_kind(l + 1);
            values = layer
                .iter()
                .map(|children| combine(kind, &mut children.iter().map(|&c| values[c])))
                .collect();
        }
        values[0]
    }

    /// De Morgan dual computing the negated function: every layer swaps
    /// kind and every literal flips.
    pub fn complement(&self) -> LayeredCircuit {
        LayeredCircuit {
            n: self.n,
            bottom_kind: self.bottom_kind.flip(),
            bottom: self
                .bottom
                .iter()
                .map(|lits| {
                    lits.iter()
                        .map(|l| Literal {
                            var: l.var,
                            negated: !l.negated,
                        })
                        .collect()
                })
                .collect(),
            upper: self.upper.clone(),
        }
    }

    pub fn to_table(&self) -> Result<TruthTable> {
        if self.n > MAX_ARITY {
            return Err(Error::ArityOverflow {
                arity: self.n,
                cap: MAX_ARITY,
            });
        }
        TruthTable::from_fn(self.n, |i| self.eval_unchecked(&decode(i, self.n)))
    }

    /// Random alternating circuit with the given layer sizes (bottom first,
    /// last entry must be 1). Bottom gates read `bottom_fan_in` distinct
    /// inputs, negated with probability `neg_prob`; upper gates read a random
    /// nonempty subset of the layer below, and every gate below is read by
    /// at least one gate above.
    pub fn random<R: Rng>(
        rng: &mut R,
        n: usize,
        bottom_kind: GateKind,
        layer_sizes: &[usize],
        bottom_fan_in: std::ops::RangeInclusive<usize>,
        neg_prob: f64,
    ) -> Result<Self> {
        if layer_sizes.is_empty() || *layer_sizes.last().unwrap() != 1 {
            return Err(Error::InvalidCircuit("layer sizes must end with 1".into()));
        }
        let lo = (*bottom_fan_in.start()).max(1);
        let hi = (*bottom_fan_in.end()).min(n);
        if lo > hi {
            return Err(Error::OutOfRange(format!("fan-in range for n = {n}")));
        }
        let bottom = (0..layer_sizes[0])
            .map(|_| {
                let k = rng.gen_range(lo..=hi);
                rand::seq::index::sample(rng, n, k)
                    .into_iter()
                    .map(|var| Literal {
                        var,
                        negated: rng.gen_bool(neg_prob),
                    })
                    .collect()
            })
            .collect();
        let mut upper = Vec::new();
        for w in layer_sizes.windows(2) {
            let (below, here) = (w[0], w[1]);
            let mut layer: Vec<Vec<usize>> = vec![Vec::new(); here];
            // every lower gate feeds some gate of this layer
            for c in 0..below {
                layer[rng.gen_range(0..here)].push(c);
            }
            for children in layer.iter_mut() {
                for c in 0..below {
                    if rng.gen_bool(0.3) {
                        children.push(c);
                    }
                }
                if children.is_empty() {
                    children.push(rng.gen_range(0..below));
                }
            }
            upper.push(layer);
        }
        Self::new(n, bottom_kind, bottom, upper)
    }
}

impl Evaluator for LayeredCircuit {
    fn num_inputs(&self) -> usize {
        self.n
    }

    fn eval_bits(&self, x: &[bool]) -> bool {
        self.eval_unchecked(x)
    }

    fn eval_many(&self, xs: &[Vec<bool>]) -> Vec<bool> {
        let mut out = Vec::with_capacity(xs.len());
        for chunk in xs.chunks(64) {
            let mut lanes = vec![0u64; self.n];
            for (lane, x) in chunk.iter().enumerate() {
                for (i, &b) in x.iter().enumerate() {
                    lanes[i] |= (b as u64) << lane;
                }
            }
            let v = self.eval_lanes(&lanes);
            out.extend((0..chunk.len()).map(|lane| (v >> lane) & 1 == 1));
        }
        out
    }
}

/// What remains above the bottom layer after peeling it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Residual {
    Circuit(LayeredCircuit),
    Table(TruthTable),
}

impl Residual {
    pub fn num_inputs(&self) -> usize {
        match self {
            Residual::Circuit(c) => c.n(),
            Residual::Table(t) => t.arity(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Residual::Circuit(c) => c.depth(),
            Residual::Table(_) => 0,
        }
    }

    pub fn eval(&self, y: &[bool]) -> bool {
        match self {
            Residual::Circuit(c) => c.eval_bits(y),
            Residual::Table(t) => t.eval_bits(y),
        }
    }

    pub fn to_table(&self) -> Result<TruthTable> {
        match self {
            Residual::Circuit(c) => c.to_table(),
            Residual::Table(t) => Ok(t.clone()),
        }
    }
}

/// Bottom layer split off as AND gates.
#[derive(Clone, Debug)]
pub struct Peeled {
    pub residual: Residual,
    pub gates: Vec<AndGate>,
    /// The circuit computes `¬residual(gates(x))` when set.
    pub negated: bool,
}

impl Peeled {
    pub fn eval(&self, x: &[bool]) -> bool {
        let y: Vec<bool> = self.gates.iter().map(|g| g.eval(x)).collect();
        self.residual.eval(&y) != self.negated
    }
}

/// Splits a layered circuit into its bottom AND gates and the residual
/// circuit over the gate wires. An OR bottom layer is handled by
/// complementing the whole circuit first. A depth-1 circuit leaves the
/// identity table; `materialize` turns a residual on at most 20 wires into a
/// table.
pub fn peel_bottom(c: &LayeredCircuit, materialize: bool) -> Peeled {
    let (circuit, negated) = match c.bottom_kind {
        GateKind::And => (c.clone(), false),
        GateKind::Or => (c.complement(), true),
    };
    let gates: Vec<AndGate> = circuit
        .bottom
        .iter()
        .map(|lits| {
            let pos = lits.iter().filter(|l| !l.negated).map(|l| l.var).collect();
            let neg = lits.iter().filter(|l| l.negated).map(|l| l.var).collect();
            AndGate::new(pos, neg).expect("validated bottom gate")
        })
        .collect();
    let residual = if circuit.upper.is_empty() {
        Residual::Table(TruthTable::identity())
    } else {
        let m = gates.len();
        let bottom = circuit.upper[0]
            .iter()
            .map(|children| children.iter().map(|&c| Literal::pos(c)).collect())
            .collect();
        let upper = circuit.upper[1..].to_vec();
        let r = LayeredCircuit::new(m, GateKind::Or, bottom, upper).expect("valid residual");
        if materialize && m <= MAX_ARITY {
            Residual::Table(r.to_table().expect("arity checked"))
        } else {
            Residual::Circuit(r)
        }
    };
    Peeled {
        residual,
        gates,
        negated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn depth_one_and_peels_to_identity() {
        let c = LayeredCircuit::single_gate(3, GateKind::And, vec![Literal::pos(0), Literal::neg(2)]).unwrap();
        let p = peel_bottom(&c, false);
        assert_eq!(p.residual, Residual::Table(TruthTable::identity()));
        assert_eq!(p.gates.len(), 1);
        assert!(!p.negated);
        for i in 0..8 {
            let x = decode(i, 3);
            assert_eq!(p.eval(&x), c.eval(&x).unwrap());
        }
    }

    #[test]
    fn or_of_ands_residual_is_or_table() {
        let c = LayeredCircuit::new(
            4,
            GateKind::And,
            vec![vec![Literal::pos(0), Literal::pos(1)], vec![Literal::pos(2), Literal::pos(3)]],
            vec![vec![vec![0, 1]]],
        )
        .unwrap();
        let p = peel_bottom(&c, true);
        assert_eq!(
            p.residual,
            Residual::Table(TruthTable::named(super::super::NamedFunction::Or, 2).unwrap())
        );
    }

    #[test]
    fn peel_then_recompose_agrees_exhaustively() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let n = rng.gen_range(2..=10);
            let kind = if trial % 2 == 0 { GateKind::And } else { GateKind::Or };
            let depth = rng.gen_range(1..=4);
            let mut sizes: Vec<usize> = (0..depth - 1).map(|_| rng.gen_range(1..=4)).collect();
            sizes.push(1);
            let c = LayeredCircuit::random(&mut rng, n, kind, &sizes, 1..=n, 0.3).unwrap();
            let p = peel_bottom(&c, trial % 3 == 0);
            assert_eq!(p.negated, kind == GateKind::Or);
            for i in 0..1u64 << n {
                let x = decode(i, n);
                assert_eq!(p.eval(&x), c.eval(&x).unwrap(), "trial {trial}");
            }
        }
    }

    #[test]
    fn lane_evaluation_matches_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = LayeredCircuit::random(&mut rng, 9, GateKind::And, &[6, 3, 1], 1..=4, 0.2).unwrap();
        let xs: Vec<Vec<bool>> = (0..200).map(|i| decode(i * 7 % 512, 9)).collect();
        let batch = c.eval_many(&xs);
        for (x, b) in xs.iter().zip(batch) {
            assert_eq!(c.eval(x).unwrap(), b);
        }
    }

    #[test]
    fn threshold_cnf_computes_threshold() {
        let c = LayeredCircuit::threshold_cnf(6, 3).unwrap();
        assert!(c.is_monotone());
        for i in 0..64u64 {
            assert_eq!(c.eval(&decode(i, 6)).unwrap(), i.count_ones() >= 3);
        }
    }

    #[test]
    fn rejects_invalid_structure() {
        assert!(LayeredCircuit::new(2, GateKind::And, vec![vec![]], vec![]).is_err());
        assert!(LayeredCircuit::new(2, GateKind::And, vec![vec![Literal::pos(0), Literal::neg(0)]], vec![]).is_err());
        assert!(LayeredCircuit::new(2, GateKind::And, vec![vec![Literal::pos(0)], vec![Literal::pos(1)]], vec![]).is_err());
        assert!(LayeredCircuit::new(2, GateKind::And, vec![vec![Literal::pos(0)]], vec![vec![vec![3]]]).is_err());
    }
}
