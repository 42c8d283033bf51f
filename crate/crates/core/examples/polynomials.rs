//! Exact multilinear polynomials: arithmetic, basis change, the text format,
//! symmetric polynomials and Fourier spectra.

use sicomp::boolfn::{NamedFunction, TruthTable};
use sicomp::polynomial::{expand_symmetric, fourier, Basis, MultilinearPoly, SymmetricPoly};
use sicomp::rational::{abs, format_rational, int, ratio};

fn main() -> sicomp::Result<()> {
    let x1 = MultilinearPoly::var(3, Basis::ZO, 0);
    let x2 = MultilinearPoly::var(3, Basis::ZO, 1);
    // x1 OR x2 = x1 + x2 - x1 x2
    let or = x1.add(&x2)?.sub(&x1.mul(&x2)?)?;
    print!("{}", or.to_text());
    println!("degree {} mu {}", or.degree(), format_rational(&or.mu_norm()));

    let pm = or.to_pm()?;
    print!("in the +-1 basis:\n{}", pm.to_text());
    assert_eq!(pm.from_pm()?, or);

    let p = MultilinearPoly::from_text("basis=ZO nvars=2\n1/2\t\n-1/3\t1,2\n")?;
    println!("p(1,1) = {}", format_rational(&p.eval(&[true, true])?));

    // q(w) = C(w, 2) on four variables
    let q = SymmetricPoly::new(4, vec![int(0), int(0), int(1)])?;
    let e = expand_symmetric(&q, 4, 0b1111)?;
    println!("C(w,2) expanded: {} terms, q(3) = {}", e.num_terms(), format_rational(&q.eval(3)));

    let v = MultilinearPoly::interpolate(2, &[int(0), ratio(1, 2), ratio(1, 2), int(1)])?;
    assert_eq!(v.basis(), Basis::ZO);
    print!("interpolated:\n{}", v.to_text());

    for n in 1..=3 {
        let ip = TruthTable::named(NamedFunction::InnerProduct, 2 * n)?;
        let spec = fourier(&ip);
        let mags: std::collections::BTreeSet<String> = spec.values().map(|c| format_rational(&abs(c))).collect();
        println!("IP_{}: {} nonzero coefficients, magnitudes {:?}", 2 * n, spec.len(), mags);
    }
    Ok(())
}
