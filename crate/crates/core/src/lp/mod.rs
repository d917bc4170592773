//! Exact rational linear programming.
//!
//! [`solve_closed`] maximizes a linear objective over a closed polyhedron with a
//! two-phase simplex (Bland's rule). [`feasible_open`] and [`sup_open`] extend
//! this to polyhedra with strict inequalities by solving auxiliary closed
//! programs: a slack variable measures how far every strict constraint can be
//! pushed from its boundary, and the supremum over an open polyhedron equals
//! the optimum over its closure whenever the open set is nonempty.

mod open;
mod polyhedron;
mod simplex;

pub(crate) use open::attaining_point;
pub use open::{feasible_open, sup_open, Feasibility, SupOutcome};
pub use polyhedron::Polyhedron;
pub use simplex::{solve_closed, solve_count, LpOutcome};
