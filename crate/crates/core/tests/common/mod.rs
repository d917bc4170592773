//! Independent oracles shared by the integration tests. Nothing here calls the
//! crate's LP solver or tracer.

#![allow(dead_code)]

pub mod lp_checks;
pub mod lpt_cells;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use worstcase_core::rational::{frac, int};
use worstcase_core::{Constraint, LinExpr, Rational, Relation};

/// `a·x <= b`.
#[derive(Clone, Debug)]
pub struct Half {
    pub a: Vec<Rational>,
    pub b: Rational,
}

pub fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter().zip(x).fold(Rational::zero(), |acc, (p, q)| acc + p * q)
}

/// Gaussian elimination; `None` when `a` is singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (dst, src) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *dst -= src * &f;
                }
                let v = &b[col] * &f;
                b[r] -= v;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// Maximum of `c·x` over the vertices of `{x : rows}`; `None` without vertices.
pub fn vertex_max(dim: usize, rows: &[Half], c: &[Rational]) -> Option<(Rational, Vec<Rational>)> {
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    combinations(rows.len(), dim, &mut |idx| {
        let a = idx.iter().map(|&i| rows[i].a.clone()).collect();
        let b = idx.iter().map(|&i| rows[i].b.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            if rows.iter().all(|r| dot(&r.a, &x) <= r.b) {
                let v = dot(c, &x);
                if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                    best = Some((v, x));
                }
            }
        }
    });
    best
}

#[derive(Debug, PartialEq, Eq)]
pub enum Verdict {
    Infeasible,
    Unbounded,
    Optimal(Rational),
}

/// Closed LP `max c·x` by vertex enumeration inside two nested boxes. Vertex
/// coordinates of the unboxed problem stay below `bound` (a Cramer bound), so
/// a bounded problem has the same optimum in both boxes, while an unbounded
/// one strictly gains from the larger box.
pub fn closed_lp_oracle(dim: usize, rows: &[Half], c: &[Rational], bound: i64) -> Verdict {
    let boxed = |b: i64| {
        let mut r = rows.to_vec();
        for i in 0..dim {
            let mut e = vec![Rational::zero(); dim];
            e[i] = Rational::one();
            r.push(Half { a: e.clone(), b: int(b) });
            r.push(Half { a: e.iter().map(|v| -v).collect(), b: int(b) });
        }
        r
    };
    let Some((v1, _)) = vertex_max(dim, &boxed(bound), c) else { return Verdict::Infeasible };
    let (v2, _) = vertex_max(dim, &boxed(2 * bound), c).expect("larger box keeps points");
    if v2 > v1 {
        Verdict::Unbounded
    } else {
        Verdict::Optimal(v1)
    }
}

/// Rows `a·x <= b` for a constraint's closure; equalities give two rows.
pub fn halves(c: &Constraint, dim: usize) -> Vec<Half> {
    let mut a = vec![Rational::zero(); dim];
    for (&i, v) in c.coeffs() {
        a[i] = v.clone();
    }
    let b = -c.constant().clone();
    match c.relation() {
        Relation::Eq => vec![
            Half { a: a.clone(), b: b.clone() },
            Half { a: a.iter().map(|v| -v).collect(), b: -b },
        ],
        _ => vec![Half { a, b }],
    }
}

pub fn rand_small(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    int(rng.gen_range(lo..=hi))
}

pub fn rand_linexpr(rng: &mut ChaCha8Rng, dim: usize) -> LinExpr {
    let coeffs: Vec<Rational> = (0..dim).map(|_| rand_small(rng, -5, 5)).collect();
    let mut e = LinExpr::constant(rand_small(rng, -5, 5));
    for (i, a) in coeffs.iter().enumerate() {
        e = &e + &(&LinExpr::var(i) * a);
    }
    e
}

/// Random rational in `[0, 1]` with denominator up to `den`.
pub fn rand_unit(rng: &mut ChaCha8Rng, den: i64) -> Rational {
    let q = rng.gen_range(1..=den);
    frac(rng.gen_range(0..=q), q)
}

/// Sorted nonincreasing nonnegative job sizes.
pub fn rand_jobs(rng: &mut ChaCha8Rng, n: usize, den: i64) -> Vec<Rational> {
    let mut x: Vec<Rational> = (0..n).map(|_| rand_unit(rng, den) * int(rng.gen_range(1..=4))).collect();
    x.sort_by(|a, b| b.cmp(a));
    x
}

pub fn is_nonneg(x: &[Rational]) -> bool {
    x.iter().all(|v| !v.is_negative())
}
