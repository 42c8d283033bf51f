//! Agnostic learning by l1 polynomial regression on noisy samples.

use sicomp::boolfn::{GateKind, LayeredCircuit, Literal, NamedFunction, TruthTable};
use sicomp::learner::{agnostic_learn, gen_dataset, Distribution, Rounding};

fn main() -> sicomp::Result<()> {
    let terms = [vec![0, 1, 2], vec![3, 4, 5], vec![6, 7]];
    let bottom = terms.iter().map(|t| t.iter().map(|&i| Literal::pos(i)).collect()).collect();
    let dnf = LayeredCircuit::new(8, GateKind::And, bottom, vec![vec![vec![0, 1, 2]]])?;
    let parity = TruthTable::named(NamedFunction::Parity, 8)?;

    for degree in 1..=4 {
        let data = gen_dataset(&dnf, "dnf", &Distribution::Uniform, 0.1, 3000, 1)?;
        let (h, r) = agnostic_learn(&data, degree, 0.2, 1, Rounding::Half)?;
        println!(
            "DNF  D={degree}: {:>3} features, l1 {:.3}, train {:.3}, holdout {:.3}; h(11100000) = {}",
            r.features,
            r.l1_loss,
            r.train_err,
            r.holdout_err,
            h.predict(&[true, true, true, false, false, false, false, false])
        );
    }

    let data = gen_dataset(&parity, "parity8", &Distribution::Uniform, 0.1, 3000, 1)?;
    let (_, r) = agnostic_learn(&data, 4, 0.2, 1, Rounding::Half)?;
    println!("PARITY_8 D=4: holdout {:.3} (degree-4 features carry no correlation)", r.holdout_err);

    let biased = Distribution::Product { p: vec![0.8; 8] };
    let data = gen_dataset(&dnf, "dnf-biased", &biased, 0.05, 3000, 2)?;
    let (_, r) = agnostic_learn(&data, 3, 0.2, 2, Rounding::Random { seed: 9 })?;
    println!("DNF under Bernoulli(0.8)^8, random threshold: holdout {:.3}", r.holdout_err);
    Ok(())
}
