//! Classical simulation of the query algorithm for shared-input
//! compositions, with every Grover search charged by a cost model.

mod scaling;

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boolfn::{with_complements, AndGate, SharedInputCircuit, TopFunction};
use crate::error::{Error, Result};
use crate::rational::{int, to_f64, Rational};

pub use scaling::{experiment_scaling, fit_slope, Family, ScalingRow, ScalingTable};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroverCostModel {
    #[serde(serialize_with = "crate::rational::serialize")]
    pub c_search: Rational,
    /// Chance that a search with marked items reports none.
    #[serde(serialize_with = "crate::rational::serialize")]
    pub failure_prob: Rational,
    /// Multiply the final-stage charge by `log2(n' + 2)`.
    pub final_log_factor: bool,
}

impl Default for GroverCostModel {
    fn default() -> Self {
        GroverCostModel {
            c_search: int(1),
            failure_prob: int(0),
            final_log_factor: false,
        }
    }
}

impl GroverCostModel {
    /// `⌈c · sqrt(N/(k+1)) · log2(N+2)⌉`, at least 1.
    pub fn charge(&self, n: usize, k: usize) -> u64 {
        let v = to_f64(&self.c_search) * (n as f64 / (k as f64 + 1.0)).sqrt() * (n as f64 + 2.0).log2();
        ((v - 1e-9).ceil() as u64).max(1)
    }

    /// Charge for evaluating the reduced circuit as a block composition.
    pub fn final_charge(&self, n: usize, qf: usize) -> u64 {
        let mut v = to_f64(&self.c_search) * qf as f64 * (n as f64 / qf as f64).sqrt();
        if self.final_log_factor {
            v *= (n as f64 + 2.0).log2();
        }
        ((v - 1e-9).ceil() as u64).max(1)
    }

    /// Simulated search over `live` candidates of which `marked` are marked:
    /// a uniform marked index, or `None` when there is none or the search
    /// misses.
    pub fn grover_sim<R: Rng>(&self, live: usize, marked: &[usize], rng: &mut R) -> (Option<usize>, u64) {
        let charge = self.charge(live, marked.len());
        if marked.is_empty() {
            return (None, charge);
        }
        let miss = self.failure_prob > int(0) && rng.gen_bool(to_f64(&self.failure_prob).min(1.0));
        if miss {
            return (None, charge);
        }
        (Some(marked[rng.gen_range(0..marked.len())]), charge)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundRecord {
    pub w_before: u64,
    pub w_after: u64,
    pub s_before: usize,
    pub s_after: usize,
    /// Successful searches; the failing search that ends the loop is in
    /// `charges` too.
    pub hits: usize,
    pub charges: Vec<u64>,
    pub deleted_gates: usize,
    /// Inputs removed as 1-wires in the final sweep.
    pub swept_inputs: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EliminationTrace {
    pub n: usize,
    pub n_desugared: usize,
    pub m: usize,
    pub qf: usize,
    pub tau: usize,
    pub round_limit: usize,
    pub rounds: Vec<RoundRecord>,
    /// Inputs (desugared indices) revealed by searches.
    pub queried: Vec<usize>,
    pub elimination_charge: u64,
    pub final_charge: u64,
    pub total_charge: u64,
    pub completed: bool,
    pub agrees: bool,
    pub remaining_gates: usize,
    pub max_remaining_fan_in: usize,
}

/// Working state of the elimination: gates over the desugared inputs, the
/// hidden input and the wire restrictions accumulated so far.
#[derive(Clone, Debug)]
pub struct EliminationState {
    n: usize,
    qf: usize,
    tau: usize,
    x: Vec<bool>,
    gates: Vec<Vec<usize>>,
    alive: Vec<bool>,
    fixed: Vec<Option<bool>>,
    top: TopFunction,
    live_inputs: Vec<bool>,
    queried: BTreeSet<usize>,
    charged: u64,
    rng: ChaCha8Rng,
}

impl EliminationState {
    /// `x` is the hidden input of the original circuit; circuits with
    /// negations are desugared first.
    pub fn new(c: &SharedInputCircuit, x: &[bool], qf: usize, seed: u64) -> Result<Self> {
        if x.len() != c.n() {
            return Err(Error::LengthMismatch {
                expected: c.n(),
                got: x.len(),
            });
        }
        let (d, x) = if c.has_negations() {
            (c.desugar(), with_complements(x))
        } else {
            (c.clone(), x.to_vec())
        };
        let n = d.n();
        if qf == 0 || qf > n {
            return Err(Error::OutOfRange(format!("Qf must lie in [1, {n}], got {qf}")));
        }
        Ok(EliminationState {
            n,
            qf,
            tau: n.div_ceil(qf),
            x,
            gates: d.gates().iter().map(|g| g.pos().to_vec()).collect(),
            alive: vec![true; d.m()],
            fixed: vec![None; d.m()],
            top: d.top().clone(),
            live_inputs: vec![true; n],
            queried: BTreeSet::new(),
            charged: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn charged(&self) -> u64 {
        self.charged
    }

    /// Indices of live high fan-in gates.
    pub fn high_fanin(&self) -> Vec<usize> {
        (0..self.gates.len())
            .filter(|&g| self.alive[g] && self.gates[g].len() >= self.tau)
            .collect()
    }

    /// Total fan-in of the high fan-in gates.
    pub fn weight(&self) -> u64 {
        self.high_fanin().iter().map(|&g| self.gates[g].len() as u64).sum()
    }

    /// Wires from each input into the high fan-in gates.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for g in self.high_fanin() {
            for &i in &self.gates[g] {
                deg[i] += 1;
            }
        }
        deg
    }

    fn live_count(&self) -> usize {
        self.live_inputs.iter().filter(|&&b| b).count()
    }

    /// Restricted circuit over the desugared inputs.
    pub fn reduced(&self) -> Result<SharedInputCircuit> {
        let gates = (0..self.gates.len())
            .filter(|&g| self.alive[g])
            .map(|g| AndGate::positive(self.gates[g].clone()))
            .collect::<Result<Vec<_>>>()?;
        SharedInputCircuit::new(self.n, gates, self.top.restrict(&self.fixed)?)
    }

    /// Desugared hidden input.
    pub fn hidden(&self) -> &[bool] {
        &self.x
    }

    fn fix_gate(&mut self, g: usize, value: bool) {
        self.alive[g] = false;
        self.fixed[g] = Some(value);
    }
}

/// One run of the halving procedure: find high-degree zeros by search,
/// delete the gates they kill, then strip the remaining high-degree inputs.
pub fn halving_round(state: &mut EliminationState, model: &GroverCostModel) -> RoundRecord {
    let s0 = state.high_fanin();
    let w_before = state.weight();
    let threshold = s0.len();
    let is_high = |deg: usize, qf: usize| 2 * qf * deg >= threshold && deg > 0;
    let mut charges = Vec::new();
    let mut hits = 0;
    let mut deleted_gates = 0;
    loop {
        let deg = state.degrees();
        let marked: Vec<usize> = (0..state.n)
            .filter(|&i| state.live_inputs[i] && !state.x[i] && is_high(deg[i], state.qf))
            .collect();
        let live = state.live_count();
        let (found, charge) = model.grover_sim(live, &marked, &mut state.rng);
        charges.push(charge);
        state.charged += charge;
        let Some(i) = found else { break };
        hits += 1;
        state.queried.insert(i);
        state.live_inputs[i] = false;
        for g in 0..state.gates.len() {
            if state.alive[g] && state.gates[g].contains(&i) {
                state.fix_gate(g, false);
                deleted_gates += 1;
            }
        }
    }
    let deg = state.degrees();
    let swept: Vec<usize> = (0..state.n)
        .filter(|&i| state.live_inputs[i] && is_high(deg[i], state.qf))
        .collect();
    for &i in &swept {
        state.live_inputs[i] = false;
    }
    for g in 0..state.gates.len() {
        if state.alive[g] {
            state.gates[g].retain(|i| !swept.contains(i));
            if state.gates[g].is_empty() {
                state.fix_gate(g, true);
            }
        }
    }
    RoundRecord {
        w_before,
        w_after: state.weight(),
        s_before: s0.len(),
        s_after: state.high_fanin().len(),
        hits,
        charges,
        deleted_gates,
        swept_inputs: swept,
    }
}

/// `⌈log2(m n')⌉ + 1`.
pub fn round_limit(m: usize, n: usize) -> usize {
    let mn = (m.max(1) * n.max(1)) as f64;
    mn.log2().ceil() as usize + 1
}

/// Runs halving rounds until no high fan-in gate remains, then checks the
/// reduced circuit against the original on the hidden input.
pub fn eliminate_high_fanin(
    c: &SharedInputCircuit,
    x: &[bool],
    qf: usize,
    seed: u64,
    model: &GroverCostModel,
) -> Result<(SharedInputCircuit, EliminationTrace)> {
    let mut state = EliminationState::new(c, x, qf, seed)?;
    let limit = round_limit(c.m(), state.n);
    let mut rounds = Vec::new();
    while !state.high_fanin().is_empty() && rounds.len() < limit {
        rounds.push(halving_round(&mut state, model));
    }
    let completed = state.high_fanin().is_empty();
    let reduced = state.reduced()?;
    let agrees = reduced.eval(state.hidden())? == c.eval(x)?;
    let elimination_charge = state.charged;
    let final_charge = model.final_charge(state.n, qf);
    let trace = EliminationTrace {
        n: c.n(),
        n_desugared: state.n,
        m: c.m(),
        qf,
        tau: state.tau,
        round_limit: limit,
        rounds,
        queried: state.queried.iter().copied().collect(),
        elimination_charge,
        final_charge,
        total_charge: elimination_charge + final_charge,
        completed,
        agrees,
        remaining_gates: reduced.m(),
        max_remaining_fan_in: reduced.gates().iter().map(|g| g.fan_in()).max().unwrap_or(0),
    };
    Ok((reduced, trace))
}

/// Elimination charges plus the final block-composition stage.
pub fn total_cost(trace: &EliminationTrace, model: &GroverCostModel) -> u64 {
    let rounds: u64 = trace.rounds.iter().flat_map(|r| &r.charges).sum();
    rounds + model.final_charge(trace.n_desugared, trace.qf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::NamedFunction;
    use crate::rational::ratio;

    fn parity(m: usize) -> TopFunction {
        TopFunction::named(NamedFunction::Parity, m).unwrap()
    }

    #[test]
    fn charge_examples() {
        let model = GroverCostModel::default();
        assert_eq!(model.charge(16, 0), 17);
        assert_eq!(model.charge(16, 3), 9);
        let logged = GroverCostModel {
            final_log_factor: true,
            ..GroverCostModel::default()
        };
        assert_eq!(logged.final_charge(64, 4), 97);
        assert_eq!(model.final_charge(64, 4), 16);
        for k in 0..20 {
            assert!(model.charge(100, k + 1) <= model.charge(100, k));
        }
    }

    #[test]
    fn search_is_uniform_over_marked() {
        let model = GroverCostModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let marked = [2, 5, 7, 11];
        let mut counts = [0u32; 4];
        let draws = 100_000;
        for _ in 0..draws {
            let (i, _) = model.grover_sim(16, &marked, &mut rng);
            counts[marked.iter().position(|&m| Some(m) == i).unwrap()] += 1;
        }
        let mean = draws as f64 / 4.0;
        let sigma = (draws as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() <= 3.0 * sigma);
        }
        assert_eq!(model.grover_sim(16, &[], &mut rng), (None, 17));
    }

    #[test]
    fn low_fanin_circuit_needs_no_rounds() {
        let c = SharedInputCircuit::block_compose(parity(8), 2).unwrap();
        let (_, trace) = eliminate_high_fanin(&c, &[true; 16], 4, 0, &GroverCostModel::default()).unwrap();
        assert!(trace.rounds.is_empty());
        assert_eq!(trace.elimination_charge, 0);
        assert_eq!(trace.total_charge, trace.final_charge);
    }

    #[test]
    fn giant_gate_goes_in_one_round() {
        let mut gates = vec![AndGate::positive((0..32).collect()).unwrap()];
        gates.extend((0..3).map(|i| AndGate::positive(vec![i]).unwrap()));
        let c = SharedInputCircuit::new(32, gates, parity(4)).unwrap();
        for x in [vec![true; 32], (0..32).map(|i| i != 17).collect()] {
            let (reduced, trace) = eliminate_high_fanin(&c, &x, 4, 3, &GroverCostModel::default()).unwrap();
            assert_eq!(trace.rounds.len(), 1);
            assert!(trace.agrees);
            assert!(reduced.gates().iter().all(|g| g.fan_in() < trace.tau));
        }
    }

    #[test]
    fn all_zero_input_loop_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = SharedInputCircuit::random(&mut rng, 64, parity(40), 16..=48, 0.0).unwrap();
        let qf = 4;
        let mut state = EliminationState::new(&c, &[false; 64], qf, 0).unwrap();
        let w = state.weight();
        let r = halving_round(&mut state, &GroverCostModel::default());
        assert!(r.hits >= 1 && r.hits <= 2 * qf);
        assert!(2 * r.w_after <= w);
    }

    #[test]
    fn halving_on_random_circuits() {
        let model = GroverCostModel::default();
        for seed in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = SharedInputCircuit::random(&mut rng, 128, parity(256), 1..=96, 0.0).unwrap();
            let x: Vec<bool> = (0..128).map(|_| rng.gen_bool(0.97)).collect();
            let (_, trace) = eliminate_high_fanin(&c, &x, 16, seed, &model).unwrap();
            assert!(trace.completed && trace.agrees);
            assert!(trace.rounds.len() <= trace.round_limit);
            for r in &trace.rounds {
                assert!(2 * r.w_after <= r.w_before);
                assert!(r.hits <= 32);
            }
            assert_eq!(total_cost(&trace, &model), trace.total_charge);
        }
    }

    #[test]
    fn negations_are_desugared() {
        let gates = vec![
            AndGate::new(vec![0, 1, 2], vec![3]).unwrap(),
            AndGate::new(vec![], vec![0, 1, 2, 3]).unwrap(),
        ];
        let c = SharedInputCircuit::new(4, gates, parity(2)).unwrap();
        for x in 0..16u64 {
            let x = crate::boolfn::decode(x, 4);
            let (_, trace) = eliminate_high_fanin(&c, &x, 2, x.len() as u64, &GroverCostModel::default()).unwrap();
            assert_eq!(trace.n_desugared, 8);
            assert!(trace.agrees);
        }
    }

    #[test]
    fn misses_can_break_agreement() {
        let model = GroverCostModel {
            failure_prob: ratio(1, 1),
            ..GroverCostModel::default()
        };
        let c = SharedInputCircuit::new(8, vec![AndGate::positive((0..8).collect()).unwrap()], parity(1)).unwrap();
        let mut x = vec![true; 8];
        x[0] = false;
        let (_, trace) = eliminate_high_fanin(&c, &x, 2, 0, &model).unwrap();
        assert!(!trace.agrees);
    }
}
