//! Approximate-majority circuits: sample and verify a depth-3 circuit,
//! audit its size, and run one level of the size-reducing recursion.

use sicomp::amaj::{chernoff_budget, check_monotone, recursive_step, sample_verified, AmajSpec, RecursiveAmajParams};
use sicomp::boolfn::LayeredCircuit;
use sicomp::rational::{format_rational, int, ratio};

fn main() -> sicomp::Result<()> {
    for m in [16, 32, 64] {
        let spec = AmajSpec::new(m, int(1), ratio(1, 5), ratio(1, 2), 0)?;
        let (c, out) = sample_verified(&spec, 2000, 5)?;
        let l = &out.ledger;
        println!(
            "m = {m}: t = ({}, {}, {}), size {} (1 + t1 + t1 t2 = {}), wires {}, verified {} after {} attempt(s)",
            l.t1,
            l.t2,
            l.t3,
            l.size,
            l.size_formula,
            l.wires,
            out.verified,
            out.attempts.len()
        );
        assert!(c.is_monotone());
    }

    let inner = LayeredCircuit::threshold_cnf(8, 4)?;
    let params = RecursiveAmajParams::new(1, 8, ratio(1, 5), ratio(1, 2))?;
    let outer = AmajSpec::new(16, int(1), ratio(1, 5), ratio(1, 2), 3)?;
    let (next, r) = recursive_step(&inner, &outer, &params, 3, Some(1000))?;
    println!(
        "recursion: {} copies (formula {}), n {} -> {}, depth {} (bound {}), size {} = {}",
        r.copies,
        r.copies_formula,
        inner.n(),
        next.n(),
        r.depth,
        r.depth_bound,
        r.size,
        r.size_formula
    );
    println!(
        "next promise p = {}, q = {}; violations {}",
        format_rational(&r.next.p),
        format_rational(&r.next.q),
        r.promise.as_ref().map_or(0, |p| p.violations)
    );
    println!("next circuit monotone: {}", check_monotone(&next, 500, 1));

    let ch = chernoff_budget(&params);
    println!(
        "union bound at m = {}: holds {} (ln lhs {:.1} vs {:.1}); needs m >= {}",
        ch.m, ch.holds, ch.log_lhs, ch.log_rhs, ch.min_m
    );
    Ok(())
}
