//! Worst-case approximation ratios of linear algorithms, computed exactly.
//!
//! An algorithm written against symbolic scalars ([`symexpr::LinExpr`]) is
//! traced into a linear decision tree ([`trace`]). For a fixed input size the
//! worst ratio between the algorithm's cost and the optimal cost is then the
//! largest of finitely many linear-programming suprema, one per leaf and
//! candidate optimal output ([`search`]). All arithmetic is exact.

pub mod lp;
pub mod makespan;
pub mod rational;
pub mod search;
pub mod symexpr;
pub mod trace;

pub use lp::{feasible_open, solve_closed, sup_open, Feasibility, LpOutcome, Polyhedron, SupOutcome};
pub use rational::{format_rational, parse_rational, ExtRational, Rational};
pub use symexpr::{compare, lin_combine, negate_constraint, CmpOp, Comparison, Constraint, LinExpr, Relation};
pub use trace::{build_tree, DecisionTree, Leaf, Oracle, TraceConfig, TraceError, TracedProgram};
