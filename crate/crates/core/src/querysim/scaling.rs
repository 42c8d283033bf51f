use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{eliminate_high_fanin, GroverCostModel};
use crate::boolfn::{AndGate, NamedFunction, SharedInputCircuit, TopFunction};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Family {
    /// `PARITY_t` over disjoint ANDs of size `n/t`; `t = None` means `t = n`.
    ParityAnd { t: Option<usize> },
    /// `PARITY_t` over ANDs on random overlapping subsets of size about `n/t`.
    RandomShared { t: usize },
}

impl Family {
    pub fn top_arity(&self, n: usize) -> usize {
        match *self {
            Family::ParityAnd { t } => t.unwrap_or(n),
            Family::RandomShared { t } => t,
        }
    }

    /// `⌈t/2⌉`, the quantum query complexity of `PARITY_t`.
    pub fn qf(&self, n: usize) -> usize {
        self.top_arity(n).div_ceil(2)
    }

    pub fn instance<R: Rng>(&self, n: usize, rng: &mut R) -> Result<SharedInputCircuit> {
        let t = self.top_arity(n);
        if t == 0 || !n.is_multiple_of(t) {
            return Err(Error::OutOfRange(format!("n = {n} is not a multiple of t = {t}")));
        }
        let top = TopFunction::named(NamedFunction::Parity, t)?;
        match self {
            Family::ParityAnd { .. } => SharedInputCircuit::block_compose(top, n / t),
            Family::RandomShared { .. } => {
                let k = n / t;
                let gates = (0..t)
                    .map(|_| {
                        let size = rng.gen_range(k.div_ceil(2)..=(2 * k).min(n));
                        AndGate::positive(rand::seq::index::sample(rng, n, size).into_vec())
                    })
                    .collect::<Result<Vec<_>>>()?;
                SharedInputCircuit::new(n, gates, top)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub seed: u64,
    pub total_charge: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingTable {
    pub family: Family,
    pub rows: Vec<ScalingRow>,
}

impl ScalingTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,seed,total_charge\n");
        for r in &self.rows {
            writeln!(out, "{},{},{}", r.n, r.seed, r.total_charge).expect("string write");
        }
        out
    }

    /// `(n, mean total charge)` in grid order.
    pub fn means(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64, usize)> = Vec::new();
        for r in &self.rows {
            match out.iter_mut().find(|e| e.0 == r.n) {
                Some(e) => {
                    e.1 += r.total_charge as f64;
                    e.2 += 1;
                }
                None => out.push((r.n, r.total_charge as f64, 1)),
            }
        }
        out.into_iter().map(|(n, s, k)| (n, s / k as f64)).collect()
    }

    /// Least-squares slope of `ln(mean charge)` against `ln n`.
    pub fn slope(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self.means().iter().map(|&(n, c)| ((n as f64).ln(), c.ln())).collect();
        fit_slope(&pts)
    }
}

pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Total charge for each `n` in the grid and seeds `0..seeds`. Hidden
/// inputs are uniform; `Qf = ⌈t/2⌉`.
pub fn experiment_scaling(family: Family, grid: &[usize], seeds: u64, model: &GroverCostModel) -> Result<ScalingTable> {
    let mut rows = Vec::new();
    for &n in grid {
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64) << 32);
            let c = family.instance(n, &mut rng)?;
            let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let (_, trace) = eliminate_high_fanin(&c, &x, family.qf(n), seed, model)?;
            if !trace.agrees {
                return Err(Error::Verification(format!("reduced circuit disagrees at n = {n}, seed {seed}")));
            }
            rows.push(ScalingRow {
                n,
                seed,
                total_charge: trace.total_charge,
            });
        }
    }
    Ok(ScalingTable { family, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| ((i as f64).ln(), 0.5 * (i as f64).ln() + 3.0)).collect();
        assert!((fit_slope(&pts) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let t = experiment_scaling(Family::ParityAnd { t: Some(4) }, &[16, 32], 2, &GroverCostModel::default()).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("n,seed,total_charge\n16,0,"));
        assert_eq!(csv.lines().count(), 5);
        assert_eq!(t.means().len(), 2);
    }

    #[test]
    fn doubling_t_costs_about_root_two() {
        let model = GroverCostModel::default();
        let a = experiment_scaling(Family::ParityAnd { t: Some(8) }, &[1024], 5, &model).unwrap();
        let b = experiment_scaling(Family::ParityAnd { t: Some(16) }, &[1024], 5, &model).unwrap();
        let ratio = b.means()[0].1 / a.means()[0].1;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn random_shared_runs() {
        let t = experiment_scaling(Family::RandomShared { t: 8 }, &[64, 128], 3, &GroverCostModel::default()).unwrap();
        assert_eq!(t.rows.len(), 6);
    }

    #[test]
    fn grid_must_divide() {
        assert!(experiment_scaling(Family::ParityAnd { t: Some(3) }, &[16], 1, &GroverCostModel::default()).is_err());
    }
}
