use num_traits::{One, Signed, Zero};

use super::simplex::{self, Problem, Row};
use super::{solve_closed, LpOutcome, Polyhedron};
use crate::rational::{ExtRational, Rational};
use crate::symexpr::{Constraint, LinExpr, Relation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Infeasible,
    Feasible { point: Vec<Rational> },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }

    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            Feasibility::Feasible { point } => Some(point),
            Feasibility::Infeasible => None,
        }
    }
}

/// Supremum of `c·x` over a polyhedron that may contain strict inequalities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupOutcome {
    Infeasible,
    /// `point` lies in the polyhedron and so does `point + t·direction` for all `t >= 0`.
    Unbounded { point: Vec<Rational>, direction: Vec<Rational> },
    Sup {
        value: Rational,
        attained: bool,
        attained_point: Option<Vec<Rational>>,
        /// A point of the polyhedron itself.
        interior_anchor: Vec<Rational>,
        /// An optimum of the closure; equals `attained_point` when attained.
        closure_optimum: Vec<Rational>,
    },
}

impl SupOutcome {
    /// `(1-ε)·closure_optimum + ε·interior_anchor`. For `0 < ε <= 1` this lies in
    /// the polyhedron and its objective is at least `value - ε·(value - c·anchor)`.
    pub fn epsilon_point(&self, eps: &Rational) -> Option<Vec<Rational>> {
        match self {
            SupOutcome::Sup { interior_anchor, closure_optimum, .. } => {
                Some(interpolate(closure_optimum, interior_anchor, eps))
            }
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            SupOutcome::Sup { value, .. } => Some(value),
            _ => None,
        }
    }
}

pub(crate) fn interpolate(from: &[Rational], to: &[Rational], t: &Rational) -> Vec<Rational> {
    let s = Rational::one() - t;
    from.iter().zip(to).map(|(a, b)| a * &s + b * t).collect()
}

/// Decides whether a polyhedron with strict inequalities is nonempty.
///
/// First tries the polyhedron with every strict row tightened by a unit slack,
/// whose points all lie in the original set. Failing that, maximizes a common
/// slack `z ∈ [0, 1]` over all strict rows: the set is empty exactly when the
/// best slack is 0 (an infeasible slack program means the closure is empty).
pub fn feasible_open(p: &Polyhedron) -> Feasibility {
    if p.is_trivially_empty() {
        return Feasibility::Infeasible;
    }
    let n = p.dim();
    let zero = Rational::zero();
    let one = Rational::one();
    let closed_rows = || {
        p.equalities()
            .iter()
            .chain(p.weak())
            .map(|c| Row::from_constraint(c, &zero))
    };

    if p.is_closed() {
        return match solve_closed(p, &vec![zero.clone(); n]) {
            LpOutcome::Infeasible => Feasibility::Infeasible,
            LpOutcome::Optimal { point, .. } | LpOutcome::Unbounded { point, .. } => {
                Feasibility::Feasible { point }
            }
        };
    }

    let mut tight = Problem::new(n);
    tight.rows = closed_rows()
        .chain(p.strict().iter().map(|c| Row::from_constraint(c, &one)))
        .collect();
    if let LpOutcome::Optimal { point, .. } = simplex::solve(tight) {
        return Feasibility::Feasible { point };
    }

    // Variables x_0..x_{n-1}, slack z = x_n.
    let mut slack = Problem::new(n + 1);
    slack.rows = closed_rows().collect();
    for c in p.strict() {
        let mut row = Row::from_constraint(c, &zero);
        row.coeffs.push((n, one.clone()));
        slack.rows.push(row);
    }
    slack.rows.push(Row { coeffs: vec![(n, one.clone())], rhs: one.clone(), eq: false });
    slack.nonneg[n] = true;
    slack.objective[n] = one;
    match simplex::solve(slack) {
        LpOutcome::Optimal { mut point, value } if value.is_positive() => {
            point.truncate(n);
            Feasibility::Feasible { point }
        }
        _ => Feasibility::Infeasible,
    }
}

/// `sup c·x` over `p`. Equals the closure optimum whenever `p` is nonempty.
pub fn sup_open(p: &Polyhedron, c: &[Rational]) -> SupOutcome {
    let Feasibility::Feasible { point: anchor } = feasible_open(p) else {
        return SupOutcome::Infeasible;
    };
    sup_with_anchor(p, c, anchor)
}

/// [`sup_open`] for a polyhedron already known to contain `anchor`.
pub(crate) fn sup_with_anchor(p: &Polyhedron, c: &[Rational], anchor: Vec<Rational>) -> SupOutcome {
    match solve_closed(&p.closure(), c) {
        LpOutcome::Infeasible => unreachable!("closure of a nonempty polyhedron is nonempty"),
        LpOutcome::Unbounded { direction, .. } => {
            SupOutcome::Unbounded { point: anchor, direction }
        }
        LpOutcome::Optimal { point, value } => {
            let attained_point = attaining_point(p, c, &value, &point);
            SupOutcome::Sup {
                value,
                attained: attained_point.is_some(),
                attained_point,
                interior_anchor: anchor,
                closure_optimum: point,
            }
        }
    }
}

/// A point of `p` on the optimal face `c·x = value` of its closure, if any.
pub(crate) fn attaining_point(
    p: &Polyhedron,
    c: &[Rational],
    value: &Rational,
    closure_optimum: &[Rational],
) -> Option<Vec<Rational>> {
    if p.contains(closure_optimum) {
        return Some(closure_optimum.to_vec());
    }
    if p.is_closed() {
        return None;
    }
    let obj = LinExpr::from_parts(
        c.iter().enumerate().map(|(i, a)| (i, a.clone())),
        ExtRational::Finite(-value.clone()),
    );
    let face = Constraint::new(&obj, Relation::Eq).ok()?;
    feasible_open(&p.with([&face])).point().map(<[Rational]>::to_vec)
}
