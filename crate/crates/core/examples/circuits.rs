//! Truth tables, shared-input circuits and layered circuits: build, evaluate,
//! save as JSON, reload, and check an approximate-majority promise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sicomp::boolfn::{
    check_promise, AndGate, GateKind, LayeredCircuit, NamedFunction, PromiseMode, SharedInputCircuit, TopFunction,
    TruthTable,
};
use sicomp::rational::ratio;

fn main() -> sicomp::Result<()> {
    let maj = TruthTable::named(NamedFunction::Majority, 3)?;
    println!("MAJ_3 table: {} ({} ones)", maj.to_hex(), maj.count_ones());

    // PARITY of three overlapping ANDs, one with a negated literal.
    let gates = vec![
        AndGate::positive(vec![0, 1])?,
        AndGate::new(vec![1, 2], vec![3])?,
        AndGate::positive(vec![3, 4])?,
    ];
    let c = SharedInputCircuit::new(5, gates, TopFunction::named(NamedFunction::Parity, 3)?)?;
    let x = [true, true, true, false, true];
    println!("h({x:?}) = {}", c.eval(&x)?);

    let json = c.to_json();
    println!("{json}");
    let back = SharedInputCircuit::from_json(&json)?;
    assert_eq!(back.eval(&x)?, c.eval(&x)?);

    let desugared = c.desugar();
    println!("desugared: {} inputs, negations: {}", desugared.n(), desugared.has_negations());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let layered = LayeredCircuit::random(&mut rng, 12, GateKind::Or, &[6, 3, 1], 2..=4, 0.25)?;
    println!("layered: depth {} size {} sizes {:?}", layered.depth(), layered.size(), layered.layer_sizes());

    let t = LayeredCircuit::threshold_cnf(10, 5)?;
    let bad = check_promise(&t, &ratio(1, 5), &ratio(1, 2), PromiseMode::Exhaustive)?;
    println!("threshold CNF TH(10,5): {} promise violations", bad.len());
    let sampled = check_promise(&t, &ratio(1, 5), &ratio(1, 2), PromiseMode::Sampled { count: 1000, seed: 7 })?;
    println!("sampled check: {} violations", sampled.len());
    Ok(())
}
