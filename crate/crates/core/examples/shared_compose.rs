//! Approximating polynomial for a shared-input circuit, read from a JSON
//! file (default: examples/data/parity_of_ands.json).

use sicomp::boolfn::SharedInputCircuit;
use sicomp::compose::{composition_budget, shared_compose, ComposeOptions, VerifyMode};
use sicomp::rational::{format_rational, ratio};

fn main() -> sicomp::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/parity_of_ands.json").to_string());
    let c = SharedInputCircuit::from_json(&std::fs::read_to_string(path)?)?;
    println!("n = {}, m = {}, negations: {}", c.n(), c.m(), c.has_negations());

    for eps in [ratio(1, 3), ratio(1, 6), ratio(1, 9)] {
        for amplify in [false, true] {
            let opts = ComposeOptions { amplify, verify: VerifyMode::Exhaustive };
            let (p, r) = shared_compose(&c, &eps, None, &opts)?;
            let err = r.error.as_ref().map(|e| format_rational(&e.max_deviation)).unwrap_or_default();
            println!(
                "eps {:<4} amplify {:<5} degree {:>2} terms {:>4} error {:<8} bound {:<5} budget {:.1}",
                format_rational(&eps),
                amplify,
                p.degree(),
                p.num_terms(),
                err,
                format_rational(&r.error_bound),
                r.budget
            );
        }
    }
    println!("budget for deg 4, n 64, m 16, eps 1/3: {:.1}", composition_budget(4, 64, 16, &ratio(1, 3)));
    Ok(())
}
