use num_traits::{One, Zero};
use serde::Serialize;

use super::{substitute, verify_error, yes_input_poly, ErrorReport, VerifyMode};
use crate::approxlp::amplify;
use crate::boolfn::{peel_bottom, LayeredCircuit, Residual};
use crate::error::{Error, Result};
use crate::polynomial::{Basis, MultilinearPoly};
use crate::rational::{int, pow, ratio, to_f64, Rational};

/// How the error budget is spread over the levels of the recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsSchedule {
    /// The residual gets half of each level's budget, the substitution the
    /// other half. Total error at most `eps`.
    Split,
    /// Every level works at `eps` and amplifies its result back to `eps`.
    Amplify,
}

#[derive(Clone, Debug)]
pub struct Lc0Options {
    pub schedule: EpsSchedule,
    /// `None` checks exhaustively up to 16 inputs and samples 4096 inputs
    /// beyond that.
    pub verify: Option<VerifyMode>,
    /// Use the exact yes-input polynomial for a residual of size `s` once
    /// the level budget drops to `2^-s`.
    pub small_eps_shortcut: bool,
}

impl Default for Lc0Options {
    fn default() -> Self {
        Lc0Options {
            schedule: EpsSchedule::Split,
            verify: None,
            small_eps_shortcut: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelRecord {
    /// Depth of the circuit handled at this level.
    pub depth: usize,
    pub n: usize,
    pub gates: usize,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub epsilon: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub delta: Rational,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub mu_top: Rational,
    pub and_degree: usize,
    pub degree: usize,
    pub shortcut: bool,
    pub amplify_iterations: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lc0Report {
    #[serde(serialize_with = "crate::rational::serialize")]
    pub epsilon: Rational,
    pub schedule: EpsSchedule,
    pub n: usize,
    pub depth: usize,
    pub size: usize,
    /// Number of shared-input compositions performed.
    pub compositions: usize,
    pub degree: usize,
    pub terms: usize,
    pub budget: f64,
    pub within_budget: bool,
    #[serde(serialize_with = "crate::rational::serialize")]
    pub error_bound: Rational,
    pub error: Option<ErrorReport>,
    /// Outermost level first.
    pub levels: Vec<LevelRecord>,
}

/// Degree budget for a depth-`d`, size-`s` circuit on `n` inputs:
/// `10 sqrt(n) s^(1/2 - 2^-d) log2(2/eps)^(2^-d) log2(s+2)^d`, or
/// `10 sqrt(n log2(2/eps)) log2(s+2)^d` once `eps <= 2^-s`.
pub fn lc0_budget(n: usize, s: usize, d: usize, eps: &Rational) -> f64 {
    if eps.is_zero() {
        return f64::INFINITY;
    }
    let (n, sf) = (n as f64, s as f64);
    let log_eps = (2.0 / to_f64(eps)).log2();
    let polylog = (sf + 2.0).log2().powi(d as i32);
    if to_f64(eps).log2() <= -sf {
        return 10.0 * (n * log_eps).sqrt() * polylog;
    }
    let e = 0.5f64.powi(d as i32);
    10.0 * n.sqrt() * sf.powf(0.5 - e) * log_eps.powf(e) * polylog
}

struct Builder<'a> {
    opts: &'a Lc0Options,
    compositions: usize,
    levels: Vec<LevelRecord>,
}

impl Builder<'_> {
    fn build(&mut self, c: &LayeredCircuit, eps: &Rational) -> Result<MultilinearPoly> {
        let peeled = peel_bottom(c, false);
        let mut record = LevelRecord {
            depth: c.depth(),
            n: c.n(),
            gates: peeled.gates.len(),
            epsilon: eps.clone(),
            delta: eps.clone(),
            mu_top: Rational::one(),
            and_degree: 0,
            degree: 0,
            shortcut: false,
            amplify_iterations: None,
        };
        let slot = self.levels.len();
        self.levels.push(record.clone());
        let (top, spent) = match &peeled.residual {
            Residual::Table(_) => (MultilinearPoly::var(1, Basis::ZO, 0), Rational::zero()),
            Residual::Circuit(r) => {
                let s = r.size();
                if self.opts.small_eps_shortcut && s <= 16 && r.n() <= 16 && *eps <= pow(&ratio(1, 2), s as u32) {
                    record.shortcut = true;
                    (yes_input_poly(&r.to_table()?)?, Rational::zero())
                } else {
                    let sub_eps = match self.opts.schedule {
                        EpsSchedule::Split => eps / int(2),
                        EpsSchedule::Amplify => eps.clone(),
                    };
                    let top = self.build(r, &sub_eps)?;
                    let spent = match self.opts.schedule {
                        EpsSchedule::Split => sub_eps,
                        EpsSchedule::Amplify => Rational::zero(),
                    };
                    (top, spent)
                }
            }
        };
        if matches!(peeled.residual, Residual::Circuit(_)) {
            self.compositions += 1;
        }
        record.mu_top = top.mu_norm();
        record.delta = (eps - &spent) / &record.mu_top;
        let sub = substitute(c.n(), &peeled.gates, &top, &record.delta)?;
        record.and_degree = sub.and_degree;
        let mut poly = sub.poly;
        if peeled.negated {
            poly = MultilinearPoly::constant(c.n(), Basis::ZO, Rational::one()).sub(&poly)?;
        }
        if self.opts.schedule == EpsSchedule::Amplify && matches!(peeled.residual, Residual::Circuit(_)) {
            let a = amplify(&poly, &c.to_table()?, eps, 6)?;
            record.amplify_iterations = Some(a.iterations);
            poly = a.poly;
        }
        record.degree = poly.degree();
        self.levels[slot] = record;
        Ok(poly)
    }
}

/// Approximates a layered AND/OR circuit by peeling its bottom layer,
/// approximating the residual recursively and composing.
///
/// A depth-`d` circuit takes `d - 1` compositions unless the shortcut ends
/// the recursion early.
pub fn lc0_compose(c: &LayeredCircuit, eps: &Rational, opts: &Lc0Options) -> Result<(MultilinearPoly, Lc0Report)> {
    if *eps <= Rational::zero() || *eps > ratio(1, 3) {
        return Err(Error::OutOfRange(format!("eps must lie in (0, 1/3], got {eps}")));
    }
    let mut b = Builder {
        opts,
        compositions: 0,
        levels: Vec::new(),
    };
    let poly = b.build(c, eps)?;
    let mode = opts.verify.clone().unwrap_or(if c.n() <= 16 {
        VerifyMode::Exhaustive
    } else {
        VerifyMode::Sampled { count: 4096, seed: 0 }
    });
    let error = match mode {
        VerifyMode::None => None,
        m => Some(verify_error(&poly, c, &m)?),
    };
    let budget = lc0_budget(c.n(), c.size(), c.depth(), eps);
    let degree = poly.degree();
    let report = Lc0Report {
        epsilon: eps.clone(),
        schedule: opts.schedule,
        n: c.n(),
        depth: c.depth(),
        size: c.size(),
        compositions: b.compositions,
        degree,
        terms: poly.num_terms(),
        within_budget: degree as f64 <= budget,
        budget,
        error_bound: eps.clone(),
        error,
        levels: b.levels,
    };
    Ok((poly, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{GateKind, Literal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(c: &LayeredCircuit, eps: Rational) -> Lc0Report {
        let (_, r) = lc0_compose(c, &eps, &Lc0Options::default()).unwrap();
        let err = r.error.as_ref().unwrap();
        assert!(err.exhaustive);
        assert!(err.max_deviation <= eps, "error {} > {eps}", err.max_deviation);
        assert!(r.within_budget);
        r
    }

    #[test]
    fn depth_one_or() {
        let c = LayeredCircuit::single_gate(4, GateKind::Or, (0..4).map(Literal::pos).collect()).unwrap();
        let r = check(&c, ratio(1, 3));
        assert_eq!(r.compositions, 0);
    }

    #[test]
    fn depth_two_or_of_ands() {
        let bottom = vec![vec![Literal::pos(0), Literal::pos(1)], vec![Literal::pos(2), Literal::pos(3)]];
        let c = LayeredCircuit::new(4, GateKind::And, bottom, vec![vec![vec![0, 1]]]).unwrap();
        let r = check(&c, ratio(1, 6));
        assert_eq!(r.compositions, 1);
        // a single OR residual is below the shortcut threshold
        assert!(r.levels[0].shortcut);
        let opts = Lc0Options {
            small_eps_shortcut: false,
            ..Lc0Options::default()
        };
        let (_, r) = lc0_compose(&c, &ratio(1, 6), &opts).unwrap();
        assert!(r.error.unwrap().max_deviation <= ratio(1, 6));
        assert_eq!(r.levels.len(), 2);
    }

    #[test]
    fn depth_three_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let opts = Lc0Options {
            small_eps_shortcut: false,
            ..Lc0Options::default()
        };
        for _ in 0..3 {
            let c = LayeredCircuit::random(&mut rng, 8, GateKind::Or, &[4, 2, 1], 1..=3, 0.3).unwrap();
            let (_, r) = lc0_compose(&c, &ratio(1, 6), &opts).unwrap();
            assert_eq!(r.compositions, c.depth() - 1);
            assert!(r.error.unwrap().max_deviation <= ratio(1, 6));
        }
    }

    #[test]
    fn budget_cases() {
        let wide = lc0_budget(16, 16, 2, &ratio(1, 3));
        let tiny = lc0_budget(16, 4, 2, &ratio(1, 1000));
        assert!(wide > 0.0 && tiny > 0.0);
        let expect = 10.0 * (16.0f64 * 2000f64.log2()).sqrt() * 6f64.log2().powi(2);
        assert!((tiny - expect).abs() < 1e-9);
    }

    #[test]
    fn rejects_zero_eps() {
        let c = LayeredCircuit::single_gate(2, GateKind::And, vec![Literal::pos(0), Literal::pos(1)]).unwrap();
        assert!(lc0_compose(&c, &int(0), &Lc0Options::default()).is_err());
    }
}
