//! Thin floating-point LP layer. Every caller re-verifies answers exactly.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome, Variable};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

type Row = (Vec<(usize, f64)>, Cmp, f64);

#[derive(Clone, Debug, Default)]
pub struct LpProblem {
    vars: Vec<(f64, f64, f64)>,
    rows: Vec<Row>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

impl LpProblem {
    /// A minimization problem with no variables yet.
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with objective coefficient `obj` and bounds `[lo, hi]`
    /// (either may be infinite). Returns its index.
    pub fn add_var(&mut self, obj: f64, lo: f64, hi: f64) -> usize {
        self.vars.push((obj, lo, hi));
        self.vars.len() - 1
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.rows.push((terms, cmp, rhs));
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let mut p = Problem::new(OptimizationDirection::Minimize);
        let vars: Vec<Variable> = self.vars.iter().map(|&(obj, lo, hi)| p.add_var(obj, (lo, hi))).collect();
        for (terms, cmp, rhs) in &self.rows {
            let op = match cmp {
                Cmp::Le => ComparisonOp::Le,
                Cmp::Ge => ComparisonOp::Ge,
                Cmp::Eq => ComparisonOp::Eq,
            };
            p.add_constraint(terms.iter().map(|&(v, c)| (vars[v], c)), op, *rhs);
        }
        let outcome = p.solve().map_err(|e| Error::Lp(e.to_string()))?;
        let SolveOutcome::Solution(sol) = outcome else {
            return Err(Error::Lp("solve interrupted".into()));
        };
        Ok(LpSolution {
            values: vars.iter().map(|&v| sol.var_value(v)).collect(),
            objective: sol.objective(),
        })
    }
}
