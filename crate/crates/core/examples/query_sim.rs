//! The gate-elimination query simulation: one traced run, then the cost
//! scaling of PARITY over ANDs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sicomp::boolfn::{NamedFunction, SharedInputCircuit, TopFunction};
use sicomp::querysim::{eliminate_high_fanin, experiment_scaling, Family, GroverCostModel};

fn main() -> sicomp::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 200;
    let c = SharedInputCircuit::random(&mut rng, n, TopFunction::named(NamedFunction::Or, 300)?, 20..=150, 0.1)?;
    let x: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.97)).collect();
    let model = GroverCostModel::default();
    let (reduced, trace) = eliminate_high_fanin(&c, &x, 8, 0, &model)?;
    println!("tau = {}, rounds = {} (limit {})", trace.tau, trace.rounds.len(), trace.round_limit);
    for (i, r) in trace.rounds.iter().enumerate() {
        println!(
            "  round {i}: w {} -> {}, |S| {} -> {}, {} hits, {} gates deleted, {} inputs swept, charge {}",
            r.w_before,
            r.w_after,
            r.s_before,
            r.s_after,
            r.hits,
            r.deleted_gates,
            r.swept_inputs.len(),
            r.charges.iter().sum::<u64>()
        );
    }
    println!(
        "reduced: {} gates, max fan-in {}; agrees {}; charge {} + {} = {}",
        reduced.m(),
        trace.max_remaining_fan_in,
        trace.agrees,
        trace.elimination_charge,
        trace.final_charge,
        trace.total_charge
    );

    let grid: Vec<usize> = (10..=14).map(|k| 1 << k).collect();
    for family in [Family::ParityAnd { t: Some(16) }, Family::ParityAnd { t: None }, Family::RandomShared { t: 16 }] {
        let table = experiment_scaling(family, &grid, 5, &model)?;
        let means: Vec<String> = table.means().iter().map(|(n, c)| format!("{n}:{c:.0}")).collect();
        println!("{family:?}: slope {:.3}  [{}]", table.slope(), means.join(" "));
    }
    Ok(())
}
