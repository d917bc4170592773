//! Makespan scheduling on identical machines and the LPT heuristic.
//!
//! Jobs have sizes `x_1 >= ... >= x_n >= 0`. An assignment `z` maps every job to
//! one of `m` machines (1-based); its cost is the largest machine load.

mod lpt;
mod oracle;
mod pipeline;
mod spec;

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::rational::Rational;
use crate::symexpr::{Constraint, LinExpr};

pub use lpt::{lpt_simulate, LptProgram};
pub use oracle::{brute_oracle, OracleError, OracleReport, ORACLE_MAX_JOBS};
pub use pipeline::{lpt_ratio, lpt_ratio_bisect, lpt_tree, PipelineError};
pub use spec::LptSpec;

/// `m` identical machines and `n` jobs sorted by nonincreasing size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MakespanInstance {
    pub m: usize,
    pub n: usize,
}

impl MakespanInstance {
    pub fn new(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "need at least one machine and one job");
        Self { m, n }
    }

    /// `x_{j+1} <= x_j` for every `j`, and `x_n >= 0`.
    pub fn base_region(&self) -> Vec<Constraint> {
        let x = LinExpr::vars(self.n);
        let mut out: Vec<Constraint> =
            x.windows(2).map(|w| Constraint::le(&w[1], &w[0]).expect("linear")).collect();
        out.push(Constraint::ge(&x[self.n - 1], &LinExpr::zero()).expect("linear"));
        out
    }
}

/// Machine of every job, plus the machine a traced run found most loaded.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Assignment {
    pub z: Vec<usize>,
    pub max_machine: Option<usize>,
}

impl Assignment {
    pub fn new(z: Vec<usize>) -> Self {
        Self { z, max_machine: None }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_z(&self.z))?;
        if let Some(i) = self.max_machine {
            write!(f, " max={i}")?;
        }
        Ok(())
    }
}

/// `(1,2,2,1,1)`.
pub fn fmt_z(z: &[usize]) -> String {
    let parts: Vec<String> = z.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// `ℓ_i = Σ_{j: z_j = i} x_j` for `i = 1..m`.
pub fn loads(x: &[LinExpr], z: &[usize], m: usize) -> Vec<LinExpr> {
    let mut out = vec![LinExpr::zero(); m];
    for (xj, &i) in x.iter().zip(z) {
        out[i - 1] += xj;
    }
    out
}

pub fn loads_at(x: &[Rational], z: &[usize], m: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); m];
    for (xj, &i) in x.iter().zip(z) {
        out[i - 1] += xj;
    }
    out
}

/// Largest load of `z` at `x`.
pub fn makespan_at(x: &[Rational], z: &[usize], m: usize) -> Rational {
    loads_at(x, z, m).into_iter().max().unwrap_or_else(Rational::zero)
}

/// One piece per machine `i`: where `ℓ_i` is a largest load, the cost is `ℓ_i`.
pub fn cost_pieces(inst: &MakespanInstance, z: &[usize]) -> Vec<(Vec<Constraint>, LinExpr)> {
    let l = loads(&LinExpr::vars(inst.n), z, inst.m);
    let base = inst.base_region();
    (0..inst.m)
        .map(|i| {
            let mut region = base.clone();
            for j in (0..inst.m).filter(|&j| j != i) {
                let c = Constraint::ge(&l[i], &l[j]).expect("linear");
                if !c.is_constant() {
                    region.push(c);
                }
            }
            (region, l[i].clone())
        })
        .collect()
}

/// `ℓ_i(x, z) <= 1` for every machine; together equivalent to makespan `<= 1`.
pub fn opt_constraints(z: &[usize], n: usize, m: usize) -> Vec<Constraint> {
    let one = LinExpr::constant(Rational::from_integer(1.into()));
    loads(&LinExpr::vars(n), z, m)
        .iter()
        .map(|l| Constraint::le(l, &one).expect("linear"))
        .collect()
}

/// Assignments with `z_1 = 1` and `z_j <= 1 + max(z_1..z_{j-1})`, capped at `m`,
/// in lexicographic order. Every assignment is a machine relabeling of exactly one.
pub fn canonical_assignments(n: usize, m: usize) -> CanonicalAssignments {
    CanonicalAssignments { n, m, next: (n > 0 && m > 0).then(|| vec![1; n]), zero: n == 0 }
}

pub struct CanonicalAssignments {
    n: usize,
    m: usize,
    next: Option<Vec<usize>>,
    zero: bool,
}

impl Iterator for CanonicalAssignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.zero {
            self.zero = false;
            return Some(Vec::new());
        }
        let cur = self.next.take()?;
        // Prefix maxima decide how far each position may grow.
        let mut prefix_max = vec![0; self.n];
        let mut mx = 0;
        for (j, &v) in cur.iter().enumerate() {
            prefix_max[j] = mx;
            mx = mx.max(v);
        }
        for j in (1..self.n).rev() {
            if cur[j] <= prefix_max[j] && cur[j] < self.m {
                let mut succ = cur.clone();
                succ[j] += 1;
                for v in &mut succ[j + 1..] {
                    *v = 1;
                }
                self.next = Some(succ);
                break;
            }
        }
        Some(cur)
    }
}
