//! The acceptance suite. Each test prints one `PASS`/`FAIL` line to stderr
//! (uncaptured) before asserting.

use std::io::Write as _;
use std::process::Command;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sicomp::amaj::{sample_verified, AmajSpec};
use sicomp::approxlp::{approx_degree, cheby_and, cheby_degree_bound, min_mu_for_error, Certification};
use sicomp::boolfn::{GateKind, LayeredCircuit, Literal, NamedFunction, SharedInputCircuit, TopFunction, TruthTable};
use sicomp::compose::{lc0_compose, shared_compose, ComposeOptions, Lc0Options, VerifyMode};
use sicomp::learner::{agnostic_learn, gen_dataset, Distribution, Rounding};
use sicomp::polynomial::fourier;
use sicomp::querysim::{eliminate_high_fanin, experiment_scaling, Family, GroverCostModel};
use sicomp::rational::{int, ratio, Rational};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "\n[{tag}] criterion {id:>2} {name}: {detail}");
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

/// Best uniform error of a degree-`d` univariate polynomial against `f` on
/// the points `0..=n`. For polynomials the optimum is attained on some set
/// of `d + 2` points, where it equals `|Σ λ_i f_i| / Σ |λ_i|` with
/// `λ_i = 1 / Π_{j≠i} (w_i - w_j)`.
fn discrete_minimax(f: &[Rational], d: usize) -> Rational {
    let n = f.len() - 1;
    if d >= n {
        return Rational::zero();
    }
    let k = d + 2;
    let mut best = Rational::zero();
    let mut pick: Vec<usize> = (0..k).collect();
    loop {
        let lambda: Vec<Rational> = pick
            .iter()
            .map(|&wi| {
                let prod = pick.iter().filter(|&&wj| wj != wi).fold(Rational::one(), |acc, &wj| {
                    acc * int(wi as i64 - wj as i64)
                });
                Rational::one() / prod
            })
            .collect();
        let num: Rational = pick.iter().zip(&lambda).map(|(&w, l)| l * &f[w]).sum();
        let den: Rational = lambda.iter().map(|l| l.abs()).sum();
        let e = num.abs() / den;
        if e > best {
            best = e;
        }
        // next k-subset of 0..=n in lexicographic order
        let mut i = k;
        while i > 0 && pick[i - 1] == n + 1 - k + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        pick[i - 1] += 1;
        for j in i..k {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

#[test]
fn c01_exact_degree_oracle() {
    let third = ratio(1, 3);
    let mut notes = Vec::new();
    let mut ok = true;
    for n in 1..=6 {
        let par = approx_degree(&TruthTable::named(NamedFunction::Parity, n).unwrap(), &third, "parity").unwrap();
        ok &= par.degree == n && par.status == Certification::Certified;

        let and = approx_degree(&TruthTable::named(NamedFunction::And, n).unwrap(), &third, "and").unwrap();
        let values: Vec<Rational> = (0..=n).map(|w| if w == n { Rational::one() } else { Rational::zero() }).collect();
        let oracle = (0..=n).find(|&d| discrete_minimax(&values, d) <= third).unwrap();
        ok &= and.degree == oracle && and.status == Certification::Certified;
        notes.push(format!("n={n}: AND {} (oracle {oracle})", and.degree));
    }
    report(1, "exact degree oracle", ok, &notes.join(", "));
}

#[test]
fn c02_mu_of_and() {
    let mut ok = true;
    for n in 1..=10 {
        let f = TruthTable::named(NamedFunction::And, n).unwrap();
        let r = min_mu_for_error(&f, &Rational::zero(), None).unwrap();
        let full = (1u64 << n) - 1;
        let single = r.witness.num_terms() == 1 && r.witness.coeff(full) == Rational::one();
        ok &= r.mu == Rational::one() && single && r.achieved_error.is_zero();
    }
    report(2, "mu of AND", ok, "mu = 1 with witness x1...xn for n = 1..10");
}

fn random_top<R: Rng>(rng: &mut R, m: usize) -> TopFunction {
    match rng.gen_range(0..5) {
        0 => TopFunction::named(NamedFunction::Parity, m).unwrap(),
        1 => TopFunction::named(NamedFunction::And, m).unwrap(),
        2 => TopFunction::named(NamedFunction::Or, m).unwrap(),
        3 => TopFunction::named(NamedFunction::Majority, m).unwrap(),
        _ => TopFunction::Table(TruthTable::from_fn(m, |_| rng.gen()).unwrap()),
    }
}

#[test]
fn c03_shared_composition_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = 0;
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut failures = Vec::new();
    while cases < 50 {
        let n = rng.gen_range(4..=14);
        let m = rng.gen_range(2..=10);
        let top = random_top(&mut rng, m);
        let neg = [0.0, 0.2, 0.4][cases % 3];
        let c = SharedInputCircuit::random(&mut rng, n, top, 1..=n.min(6), neg).unwrap();
        for eps in [ratio(1, 6), ratio(1, 9)] {
            let opts = ComposeOptions {
                amplify: false,
                verify: VerifyMode::Exhaustive,
            };
            let (p, r) = shared_compose(&c, &eps, None, &opts).unwrap();
            let err = r.error.as_ref().unwrap();
            let bound = int(2) * &eps;
            let good = err.exhaustive && err.max_deviation <= bound && r.within_budget && (p.degree() as f64) <= r.budget;
            let rel = sicomp::rational::to_f64(&err.max_deviation) / sicomp::rational::to_f64(&bound);
            worst = worst.max(rel);
            if !good {
                failures.push(format!("case {cases} eps {eps}"));
            }
            ok &= good;
        }
        cases += 1;
    }
    let detail = format!("{cases} circuits x 2 eps, worst error/2eps = {worst:.3}; failures {failures:?}");
    report(3, "shared composition soundness", ok, &detail);
}

#[test]
fn c04_and_approximant() {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in [16, 64, 256, 1024] {
        for delta in [ratio(1, 10), ratio(1, 1000)] {
            let q = cheby_and(n, &delta);
            let vals = q.weight_values();
            let low = vals[..n].iter().all(|v| v.abs() <= delta);
            let high = (&vals[n] - Rational::one()).abs() <= delta;
            let cap = n.min(cheby_degree_bound(n, &delta));
            let deg_ok = q.degree() <= cap;
            ok &= vals.len() == n + 1 && low && high && deg_ok;
            notes.push(format!("({n},{delta})->{}<={cap}", q.degree()));
        }
    }
    report(4, "AND approximant", ok, &notes.join(" "));
}

#[test]
fn c05_halving_lemma() {
    let model = GroverCostModel::default();
    let mut rounds = 0usize;
    let mut bad_rounds = 0usize;
    let mut disagreements = 0usize;
    let mut loop_violations = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for run in 0..1000u64 {
        let qf = [4, 16, 64][(run % 3) as usize];
        let negated = rng.gen_bool(0.5);
        let n_max = if negated { 128 } else { 256 };
        let n = rng.gen_range(qf.max(16)..=n_max);
        let m = rng.gen_range(1..=512);
        let top = match rng.gen_range(0..3) {
            0 => TopFunction::named(NamedFunction::Parity, m).unwrap(),
            1 => TopFunction::named(NamedFunction::Or, m).unwrap(),
            _ => TopFunction::named(NamedFunction::Majority, m).unwrap(),
        };
        let lo = rng.gen_range(1..=n / 2);
        let neg = if negated { 0.3 } else { 0.0 };
        let c = SharedInputCircuit::random(&mut rng, n, top, lo..=n, neg).unwrap();
        let density = [0.5, 0.9, 0.99][rng.gen_range(0..3)];
        let x: Vec<bool> = (0..n).map(|_| rng.gen_bool(density)).collect();
        let (_, trace) = eliminate_high_fanin(&c, &x, qf, run, &model).unwrap();
        for r in &trace.rounds {
            rounds += 1;
            if 2 * r.w_after > r.w_before {
                bad_rounds += 1;
            }
            if r.hits > 2 * qf {
                loop_violations += 1;
            }
        }
        if !trace.agrees || !trace.completed {
            disagreements += 1;
        }
    }
    let ok = bad_rounds == 0 && disagreements == 0 && loop_violations == 0 && rounds > 0;
    let detail = format!(
        "1000 runs, {rounds} rounds; weight violations {bad_rounds}, disagreements {disagreements}, loop-count violations {loop_violations}"
    );
    report(5, "halving lemma", ok, &detail);
}

#[test]
fn c06_scaling() {
    let model = GroverCostModel::default();
    let grid: Vec<usize> = (10..=16).map(|k| 1usize << k).collect();
    let fixed = experiment_scaling(Family::ParityAnd { t: Some(16) }, &grid, 20, &model).unwrap();
    let full = experiment_scaling(Family::ParityAnd { t: None }, &grid, 20, &model).unwrap();
    let (a, b) = (fixed.slope(), full.slope());
    let ok = (0.45..=0.60).contains(&a) && b >= 0.9;
    report(6, "query-cost scaling", ok, &format!("slope t=16: {a:.4}, slope t=n: {b:.4}"));
}

#[test]
fn c07_lc0_recursion() {
    let eps = ratio(1, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0;
    let mut ok = true;
    let mut max_err = Rational::zero();
    let mut levels = 0;
    while cases < 20 {
        let n = rng.gen_range(8..=14);
        let s1 = rng.gen_range(2..=(n - 3).min(6));
        let s2 = rng.gen_range(2..=(n - 1 - s1).min(3));
        let kind = if rng.gen() { GateKind::And } else { GateKind::Or };
        let c = LayeredCircuit::random(&mut rng, n, kind, &[s1, s2, 1], 2..=n / 2, 0.3).unwrap();
        if c.depth() != 3 || c.size() > n {
            continue;
        }
        for shortcut in [true, false] {
            let opts = Lc0Options {
                verify: Some(VerifyMode::Exhaustive),
                small_eps_shortcut: shortcut,
                ..Lc0Options::default()
            };
            let (_, r) = lc0_compose(&c, &eps, &opts).unwrap();
            let err = r.error.as_ref().unwrap();
            ok &= err.exhaustive && err.max_deviation <= ratio(1, 3) && r.within_budget && (r.degree as f64) <= r.budget;
            if err.max_deviation > max_err {
                max_err = err.max_deviation.clone();
            }
            levels += r.compositions;
        }
        cases += 1;
    }
    report(7, "LC0 recursion", ok, &format!("{cases} depth-3 circuits with and without the small-eps shortcut, {levels} compositions, max error {}", sicomp::rational::to_f64(&max_err)));
}

fn dnf() -> LayeredCircuit {
    let terms = [vec![0, 1, 2], vec![3, 4, 5], vec![6, 7]];
    let bottom = terms.iter().map(|t| t.iter().map(|&i| Literal::pos(i)).collect()).collect();
    LayeredCircuit::new(8, GateKind::And, bottom, vec![vec![vec![0, 1, 2]]]).unwrap()
}

#[test]
fn c08_learner() {
    let target = dnf();
    let parity = TruthTable::named(NamedFunction::Parity, 8).unwrap();
    let mut dnf_errs = Vec::new();
    let mut par_errs = Vec::new();
    for seed in 0..10 {
        let data = gen_dataset(&target, "dnf", &Distribution::Uniform, 0.1, 5000, seed).unwrap();
        let (_, r) = agnostic_learn(&data, 4, 0.2, seed, Rounding::Half).unwrap();
        dnf_errs.push(r.holdout_err);
        let data = gen_dataset(&parity, "parity8", &Distribution::Uniform, 0.1, 5000, seed).unwrap();
        let (_, r) = agnostic_learn(&data, 4, 0.2, seed, Rounding::Half).unwrap();
        par_errs.push(r.holdout_err);
    }
    let good = dnf_errs.iter().filter(|&&e| e <= 0.2).count();
    let mean = par_errs.iter().sum::<f64>() / par_errs.len() as f64;
    let (lo, hi) = par_errs.iter().fold((1.0f64, 0.0f64), |(a, b), &e| (a.min(e), b.max(e)));
    let ok = good >= 9 && (0.4..=0.6).contains(&mean);
    let detail = format!(
        "DNF holdout <= 0.2 in {good}/10 (max {:.3}); PARITY8 mean holdout {mean:.3} (per seed {lo:.3}..{hi:.3})",
        dnf_errs.iter().cloned().fold(0.0, f64::max)
    );
    report(8, "agnostic learner", ok, &detail);
}

#[test]
fn c09_bent_inner_product() {
    let mut ok = true;
    for n in 1..=5 {
        let f = TruthTable::named(NamedFunction::InnerProduct, 2 * n).unwrap();
        let coeffs = fourier(&f);
        let mag = Rational::new(1.into(), num_bigint::BigInt::from(1u64) << n);
        ok &= coeffs.len() == 1 << (2 * n) && coeffs.values().all(|c| c.abs() == mag);
    }
    report(9, "inner product is bent", ok, "all 4^n coefficients have magnitude 2^-n for n = 1..5");
}

#[test]
fn c10_amaj_sampler() {
    let mut verified = 0;
    let mut ledger_ok = true;
    let mut tries = Vec::new();
    for seed in 0..10u64 {
        let spec = AmajSpec::new(64, int(1), ratio(1, 5), ratio(1, 2), seed * 100).unwrap();
        let (c, out) = sample_verified(&spec, 10_000, 5).unwrap();
        if out.verified && out.attempts.len() <= 5 && out.promise.violations == 0 {
            verified += 1;
        }
        tries.push(out.attempts.len());
        let (t1, t2, t3) = (spec.t1(), spec.t2(), spec.t3());
        let l = &out.ledger;
        ledger_ok &= (t1, t2, t3) == (64, 4096, 6)
            && c.layer_sizes() == vec![t1 * t2, t1, 1]
            && l.layer_sizes == c.layer_sizes()
            && l.size == 1 + t1 + t1 * t2
            && l.size == l.size_formula
            && l.size == c.size()
            && l.max_bottom_fan_in <= t3
            && c.bottom().iter().all(|g| !g.is_empty() && g.len() <= t3)
            && c.upper()[0].iter().all(|g| g.len() == t2)
            && c.upper()[1][0].len() == t1;
    }
    let ok = verified >= 9 && ledger_ok;
    report(10, "AMAJ sampler", ok, &format!("verified {verified}/10, attempts {tries:?}, ledger exact {ledger_ok}"));
}

fn sicomp(args: &[&str], dir: &std::path::Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_sicomp")).args(args).current_dir(dir).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let mut bytes = out.stdout;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "txt" || e == "json") {
            bytes.extend(std::fs::read(&path).unwrap());
            std::fs::remove_file(&path).unwrap();
        }
    }
    bytes
}

#[test]
fn c11_determinism() {
    let data = |f: &str| format!("{}/examples/data/{f}", env!("CARGO_MANIFEST_DIR"));
    let (shared, layered, dnf) = (data("parity_of_ands.json"), data("depth3.json"), data("dnf.json"));
    let runs: Vec<Vec<&str>> = vec![
        vec!["adeg", "--fn", "and", "--arity", "5", "--eps", "1/3", "--poly-out", "p.txt"],
        vec!["mu", "--fn", "or", "--arity", "4", "--eps", "1/4", "--poly-out", "p.txt"],
        vec!["compose", "--circuit", &shared, "--eps", "1/6", "--poly-out", "p.txt"],
        vec!["compose", "--circuit", &layered, "--eps", "1/6", "--verify", "sample:500:3"],
        vec!["simulate", "--circuit", &shared, "--input", "01101110", "--qf", "2", "--seed", "11"],
        vec!["scaling", "--t", "8", "--n-grid", "64,128", "--seeds", "4", "--family", "random-shared"],
        vec!["learn", "--circuit", &dnf, "--samples", "800", "--degree", "2", "--noise", "0.1", "--seed", "4", "--rounding", "random"],
        vec!["amaj", "sample", "--m", "16", "--verify", "500", "--seed", "2", "--circuit-out", "c.json"],
        vec!["amaj", "recurse", "--m", "8", "--outer-m", "16", "--verify", "200", "--seed", "5", "--circuit-out", "c.json"],
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut same = 0;
    for args in &runs {
        let a = sicomp(args, dir.path());
        let b = sicomp(args, dir.path());
        if a == b && !a.is_empty() {
            same += 1;
        }
    }
    let ok = same == runs.len();
    report(11, "determinism", ok, &format!("{same}/{} pipelines byte-identical across two runs", runs.len()));
}
