//! Fixtures shared by the benchmarks under `benches/`.

use worstcase_core::rational::int;
use worstcase_core::{Constraint, LinExpr, Polyhedron, Rational};

/// `max x1 + x3 + x4` over sorted job sizes with both machine loads of a fixed
/// assignment at most 1.
pub fn makespan_lp() -> (Polyhedron, Vec<Rational>) {
    let x = LinExpr::vars(5);
    let one = LinExpr::constant(int(1));
    let mut cs: Vec<Constraint> = x.windows(2).map(|w| Constraint::ge(&w[0], &w[1]).unwrap()).collect();
    cs.push(Constraint::ge(&x[4], &LinExpr::zero()).unwrap());
    cs.push(Constraint::le(&(&x[0] + &x[1]), &one).unwrap());
    cs.push(Constraint::le(&(&(&x[2] + &x[3]) + &x[4]), &one).unwrap());
    cs.push(Constraint::lt(&x[0], &(&x[1] + &x[2])).unwrap());
    let c = vec![int(1), int(0), int(1), int(1), int(0)];
    (Polyhedron::from_constraints(5, &cs), c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use worstcase_core::rational::frac;
    use worstcase_core::{solve_closed, sup_open, LpOutcome, SupOutcome};

    #[test]
    fn fixture_is_bounded() {
        let (p, c) = makespan_lp();
        let LpOutcome::Optimal { value, .. } = solve_closed(&p.closure(), &c) else { panic!() };
        // x = (1/2, 1/2, 1/2, 1/2, 0).
        assert_eq!(value, frac(3, 2));
        assert!(matches!(sup_open(&p, &c), SupOutcome::Sup { .. }));
    }
}
