use std::fmt;

use serde::Serialize;

use crate::rational::{format_rational, ExtRational, Rational};
use crate::symexpr::Constraint;

/// The worst-case ratio: exact, or bracketed by bisection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alpha {
    Exact(ExtRational),
    Interval { lo: Rational, hi: Rational },
}

impl Alpha {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Alpha::Exact(ExtRational::Finite(r)) => Some(r),
            _ => None,
        }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        match self {
            Alpha::Exact(a) => *a == ExtRational::Finite(v.clone()),
            Alpha::Interval { lo, hi } => lo <= v && v <= hi,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Exact(a) => write!(f, "{a}"),
            Alpha::Interval { lo, hi } => {
                write!(f, "[{}, {}]", format_rational(lo), format_rational(hi))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub leaves_total: usize,
    pub leaves_pruned_check1: usize,
    pub leaves_pruned_check2: usize,
    pub lps_solved: u64,
    pub wall_ms: u128,
}

impl SearchStats {
    pub fn leaves_after_check1(&self) -> usize {
        self.leaves_total - self.leaves_pruned_check1
    }

    pub fn leaves_after_check2(&self) -> usize {
        self.leaves_after_check1() - self.leaves_pruned_check2
    }
}

/// Worst-case ratio together with a (near-)worst input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardExampleReport<O> {
    pub alpha: Alpha,
    pub witness: Vec<Rational>,
    /// The witness's exact ratio equals `alpha`.
    pub attained: bool,
    /// Exact ratio at the witness.
    pub witness_ratio: ExtRational,
    pub leaf_id: usize,
    /// Output labeling the leaf whose region produced the witness.
    pub leaf_output: O,
    /// The algorithm's output on the witness itself.
    pub algorithm_output: O,
    /// A cheapest output at the witness.
    pub optimal_output: O,
    pub leaf_constraints: Vec<Constraint>,
    pub stats: SearchStats,
}
