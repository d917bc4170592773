//! Randomized LP checks against vertex enumeration and grid search.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use worstcase_core::rational::frac;
use worstcase_core::{
    feasible_open, negate_constraint, solve_closed, sup_open, Constraint, Feasibility, LpOutcome,
    Polyhedron, Rational, Relation, SupOutcome,
};

use super::{closed_lp_oracle, dot, halves, rand_linexpr, rand_small, Half, Verdict};

pub const CRAMER_BOX: i64 = 1000;

fn random_constraint(rng: &mut ChaCha8Rng, dim: usize, rels: &[Relation]) -> Constraint {
    loop {
        let e = rand_linexpr(rng, dim);
        let rel = rels[rng.gen_range(0..rels.len())];
        let c = Constraint::new(&e, rel).unwrap();
        if !c.is_constant() {
            return c;
        }
    }
}

fn objective(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| rand_small(rng, -5, 5)).collect()
}

/// Closed LPs against vertex enumeration; returns (optimal, unbounded, infeasible) counts.
pub fn closed_lps_match_vertex_enumeration(seed: u64, cases: usize) -> (usize, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut optimal, mut unbounded, mut infeasible) = (0, 0, 0);
    for case in 0..cases {
        let dim = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=5);
        let cs: Vec<Constraint> = (0..k)
            .map(|_| random_constraint(&mut rng, dim, &[Relation::Le, Relation::Le, Relation::Le, Relation::Eq]))
            .collect();
        let p = Polyhedron::from_constraints(dim, &cs);
        let c = objective(&mut rng, dim);
        let rows: Vec<_> = cs.iter().flat_map(|c| halves(c, dim)).collect();
        let expected = closed_lp_oracle(dim, &rows, &c, CRAMER_BOX);
        match (solve_closed(&p, &c), expected) {
            (LpOutcome::Infeasible, Verdict::Infeasible) => infeasible += 1,
            (LpOutcome::Optimal { point, value }, Verdict::Optimal(v)) => {
                assert_eq!(value, v, "case {case}: {p}");
                assert!(p.contains(&point), "case {case}: optimum outside {p}");
                assert_eq!(dot(&c, &point), value);
                optimal += 1;
            }
            (LpOutcome::Unbounded { point, direction }, Verdict::Unbounded) => {
                assert!(p.contains(&point), "case {case}");
                assert!(dot(&c, &direction).is_positive(), "case {case}");
                for row in &rows {
                    assert!(!dot(&row.a, &direction).is_positive(), "case {case}: not a recession direction");
                }
                unbounded += 1;
            }
            (got, want) => panic!("case {case}: {p} with c={c:?}: solver {got:?}, oracle {want:?}"),
        }
    }
    (optimal, unbounded, infeasible)
}

/// All grid points `k/2` with `|k| <= 2·reach` that satisfy `p`, checked in
/// integer arithmetic (constraints have coprime integer coefficients).
fn grid_witness(p: &Polyhedron, dim: usize, reach: i64) -> Option<Vec<Rational>> {
    let to_i = |r: &Rational| -> i64 {
        assert!(r.is_integer());
        r.to_integer().to_i64().unwrap()
    };
    let rows: Vec<(Vec<i64>, i64, Relation)> = p
        .constraints()
        .map(|c| {
            let mut a = vec![0; dim];
            for (&i, v) in c.coeffs() {
                a[i] = to_i(v);
            }
            (a, to_i(c.constant()), c.relation())
        })
        .collect();
    let span = 4 * reach + 1;
    let total = span.pow(dim as u32);
    for code in 0..total {
        let mut c = code;
        let k: Vec<i64> = (0..dim).map(|_| { let d = c % span - 2 * reach; c /= span; d }).collect();
        let ok = rows.iter().all(|(a, b, rel)| {
            let lhs: i64 = a.iter().zip(&k).map(|(p, q)| p * q).sum::<i64>() + 2 * b;
            match rel {
                Relation::Eq => lhs == 0,
                Relation::Le => lhs <= 0,
                Relation::Lt => lhs < 0,
            }
        });
        if ok {
            return Some(k.iter().map(|&v| Rational::new(BigInt::from(v), BigInt::from(2))).collect());
        }
    }
    None
}

/// Mixed strict/non-strict polyhedra: sup against the closure optimum and
/// feasibility against a grid search. Returns (feasible, empty with nonempty
/// closure, unattained) counts.
pub fn open_polyhedra_match_oracles(seed: u64, cases: usize) -> (usize, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut feasible, mut empty_with_nonempty_closure, mut unattained) = (0, 0, 0);
    for case in 0..cases {
        let dim = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=4);
        let mut cs: Vec<Constraint> = (0..k)
            .map(|_| random_constraint(&mut rng, dim, &[Relation::Lt, Relation::Lt, Relation::Le, Relation::Eq]))
            .collect();
        // Occasionally pair a constraint with its strict complement to force
        // an empty set whose closure is a hyperplane.
        if case % 10 == 0 {
            let weak = Constraint::new(&cs[0].expr(), Relation::Le).unwrap();
            let neg = negate_constraint(&weak).unwrap();
            cs.push(neg);
        }
        let p = Polyhedron::from_constraints(dim, &cs);
        let c = objective(&mut rng, dim);
        let verdict = feasible_open(&p);
        let grid = grid_witness(&p, dim, 6);
        match &verdict {
            Feasibility::Feasible { point } => {
                assert!(p.contains(point), "case {case}: witness outside {p}");
                feasible += 1;
            }
            Feasibility::Infeasible => {
                assert!(grid.is_none(), "case {case}: grid point {grid:?} lies in {p}");
                let closure_rows: Vec<_> = p.closure().constraints().flat_map(|c| halves(c, dim)).collect();
                if closure_lp_feasible(dim, &closure_rows) {
                    empty_with_nonempty_closure += 1;
                }
            }
        }
        if grid.is_some() {
            assert!(verdict.is_feasible(), "case {case}: grid found a point of {p}");
        }

        let closure_rows: Vec<_> = p.closure().constraints().flat_map(|c| halves(c, dim)).collect();
        match (sup_open(&p, &c), verdict.is_feasible()) {
            (SupOutcome::Infeasible, false) => {}
            (SupOutcome::Unbounded { point, direction }, true) => {
                assert_eq!(closed_lp_oracle(dim, &closure_rows, &c, CRAMER_BOX), Verdict::Unbounded, "case {case}");
                assert!(p.contains(&point));
                assert!(dot(&c, &direction).is_positive());
            }
            (out @ SupOutcome::Sup { .. }, true) => {
                let SupOutcome::Sup { value, attained, attained_point, .. } = &out else { unreachable!() };
                assert_eq!(
                    closed_lp_oracle(dim, &closure_rows, &c, CRAMER_BOX),
                    Verdict::Optimal(value.clone()),
                    "case {case}: {p}"
                );
                if *attained {
                    let x = attained_point.as_ref().unwrap();
                    assert!(p.contains(x));
                    assert_eq!(&dot(&c, x), value);
                } else {
                    unattained += 1;
                    let x = out.epsilon_point(&frac(1, 10)).unwrap();
                    assert!(p.contains(&x), "case {case}: epsilon point outside {p}");
                    assert!(&dot(&c, &x) < value);
                }
            }
            (out, f) => panic!("case {case}: sup {out:?} but feasibility {f}"),
        }
    }
    (feasible, empty_with_nonempty_closure, unattained)
}

fn closure_lp_feasible(dim: usize, rows: &[Half]) -> bool {
    let zero = vec![Rational::from_integer(0.into()); dim];
    closed_lp_oracle(dim, rows, &zero, CRAMER_BOX) != Verdict::Infeasible
}
