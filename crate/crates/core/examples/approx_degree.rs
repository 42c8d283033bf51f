//! Approximate degree and coefficient norms of small functions, the
//! Chebyshev AND approximant, and error amplification.

use sicomp::approxlp::{amplify, approx_degree, cheby_and, exact_poly, min_error_for_degree, min_mu_for_error};
use sicomp::boolfn::{NamedFunction, TruthTable};
use sicomp::polynomial::{Basis, MultilinearPoly};
use sicomp::rational::{format_rational, ratio};

fn main() -> sicomp::Result<()> {
    let third = ratio(1, 3);
    println!("{:<10} {:>4} {:>8} {:>10}", "function", "deg", "error", "status");
    for kind in [NamedFunction::And, NamedFunction::Or, NamedFunction::Parity, NamedFunction::Majority] {
        for n in [3, 5] {
            let f = TruthTable::named(kind, n)?;
            let r = approx_degree(&f, &third, &format!("{kind}_{n}"))?;
            println!("{:<10} {:>4} {:>8} {:>10?}", r.function, r.degree, format_rational(&r.achieved_error), r.status);
        }
    }

    let and6 = TruthTable::named(NamedFunction::And, 6)?;
    for d in 0..=3 {
        let fit = min_error_for_degree(&and6, d)?;
        println!("AND_6 best error at degree {d}: {:.4}", fit.lp_error);
    }
    let mu = min_mu_for_error(&and6, &third, None)?;
    println!("mu_1/3(AND_6) = {} at degree {}", format_rational(&mu.mu), mu.witness.degree());

    let delta = ratio(1, 100);
    let q = cheby_and(64, &delta);
    let vals = q.weight_values();
    let worst_low = vals[..64].iter().map(sicomp::rational::abs).max().unwrap();
    println!("cheby_and(64, 1/100): degree {}, max |q(w)| below 64 = {:.5}, q(64) = {}", q.degree(), sicomp::rational::to_f64(&worst_low), format_rational(&vals[64]));

    // constant 1/2 plus a fraction of the exact polynomial, pushed to 1/20
    let maj = TruthTable::named(NamedFunction::Majority, 5)?;
    let exact = exact_poly(&maj)?;
    let rough = exact.scale(&ratio(1, 2)).add(&MultilinearPoly::constant(5, Basis::ZO, ratio(1, 4)))?;
    let a = amplify(&rough, &maj, &ratio(1, 20), 8)?;
    println!(
        "amplify: error {} -> {} after {} rounds, degree {}",
        format_rational(&a.initial_error),
        sicomp::rational::to_f64(&a.error),
        a.iterations,
        a.poly.degree()
    );
    Ok(())
}
