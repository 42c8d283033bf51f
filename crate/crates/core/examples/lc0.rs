//! Depth reduction for layered AND/OR circuits: one approximating
//! polynomial per level, composed from the bottom up.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sicomp::boolfn::{GateKind, LayeredCircuit};
use sicomp::compose::{lc0_budget, lc0_compose, EpsSchedule, Lc0Options, VerifyMode};
use sicomp::rational::{format_rational, ratio};

fn main() -> sicomp::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/depth3.json");
    let c = LayeredCircuit::from_json(&std::fs::read_to_string(path)?)?;
    let eps = ratio(1, 6);
    for (schedule, shortcut) in [(EpsSchedule::Split, true), (EpsSchedule::Split, false), (EpsSchedule::Amplify, false)] {
        let opts = Lc0Options {
            schedule,
            verify: Some(VerifyMode::Exhaustive),
            small_eps_shortcut: shortcut,
        };
        let (p, r) = lc0_compose(&c, &eps, &opts)?;
        println!(
            "{schedule:?} shortcut={shortcut}: degree {} ({} terms), {} compositions, error {}, budget {:.0}",
            p.degree(),
            r.terms,
            r.compositions,
            format_rational(&r.error.as_ref().unwrap().max_deviation),
            r.budget
        );
        for l in &r.levels {
            println!("  level: n {} gates {} eps {} delta {} degree {}", l.n, l.gates, format_rational(&l.epsilon), format_rational(&l.delta), l.degree);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let big = LayeredCircuit::random(&mut rng, 24, GateKind::And, &[12, 5, 1], 3..=6, 0.2)?;
    let opts = Lc0Options {
        verify: Some(VerifyMode::Sampled { count: 2000, seed: 1 }),
        ..Lc0Options::default()
    };
    let (p, r) = lc0_compose(&big, &ratio(1, 3), &opts)?;
    println!(
        "random depth-3, n = 24, size {}: degree {}, sampled error {}, budget {:.0} (formula at s = n: {:.0})",
        big.size(),
        p.degree(),
        format_rational(&r.error.as_ref().unwrap().max_deviation),
        r.budget,
        lc0_budget(24, 24, 3, &ratio(1, 3))
    );
    Ok(())
}
