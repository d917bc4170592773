//! Independent oracle for LPT on two machines: symbolic enumeration of LPT's
//! branches with plain coefficient vectors, then one vertex-enumeration LP per
//! (branch, makespan machine, optimal assignment) cell. A grid search over
//! concrete inputs gives a matching lower bound.

use num_traits::{One, Signed, Zero};
use worstcase_core::rational::{frac, int};
use worstcase_core::Rational;

use super::{vertex_max, Half};

/// Homogeneous row `a·x <= 0`, or `< 0` when strict.
#[derive(Clone, Debug)]
pub struct Row {
    pub a: Vec<i64>,
    pub strict: bool,
}

/// Every LPT branch for `n` sorted jobs on 2 machines: branch rows and final loads.
pub fn lpt_branches(n: usize) -> Vec<(Vec<Row>, [Vec<i64>; 2])> {
    fn rec(j: usize, n: usize, rows: Vec<Row>, loads: [Vec<i64>; 2], out: &mut Vec<(Vec<Row>, [Vec<i64>; 2])>) {
        if j == n {
            out.push((rows, loads));
            return;
        }
        let diff: Vec<i64> = (0..n).map(|i| loads[0][i] - loads[1][i]).collect();
        let place = |k: usize, extra: Option<Row>| {
            let mut l = loads.clone();
            l[k][j] += 1;
            let mut r = rows.clone();
            r.extend(extra);
            (r, l)
        };
        if diff.iter().all(|&d| d == 0) {
            let (r, l) = place(0, None);
            rec(j + 1, n, r, l, out);
        } else {
            // Machine 1 when load1 <= load2, else machine 2.
            let (r, l) = place(0, Some(Row { a: diff.clone(), strict: false }));
            rec(j + 1, n, r, l, out);
            let (r, l) = place(1, Some(Row { a: diff.iter().map(|d| -d).collect(), strict: true }));
            rec(j + 1, n, r, l, out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, Vec::new(), [vec![0; n], vec![0; n]], &mut out);
    out
}

fn to_q(a: &[i64]) -> Vec<Rational> {
    a.iter().map(|&v| int(v)).collect()
}

/// Sorted, nonnegative job sizes.
fn sort_rows(n: usize) -> Vec<Row> {
    let mut rows = Vec::new();
    for i in 0..n - 1 {
        let mut a = vec![0; n];
        a[i + 1] = 1;
        a[i] = -1;
        rows.push(Row { a, strict: false });
    }
    let mut a = vec![0; n];
    a[n - 1] = -1;
    rows.push(Row { a, strict: false });
    rows
}

/// Whether the mixed system `rows` (homogeneous) plus closed `bounded` rows has a
/// point, decided by maximizing a slack `t <= 1` on the strict rows.
fn nonempty(n: usize, rows: &[Row], bounded: &[Half]) -> bool {
    let mut halves: Vec<Half> = rows
        .iter()
        .map(|r| {
            let mut a = to_q(&r.a);
            a.push(if r.strict { Rational::one() } else { Rational::zero() });
            Half { a, b: Rational::zero() }
        })
        .collect();
    for h in bounded {
        let mut a = h.a.clone();
        a.push(Rational::zero());
        halves.push(Half { a, b: h.b.clone() });
    }
    let mut t = vec![Rational::zero(); n + 1];
    t[n] = Rational::one();
    halves.push(Half { a: t.clone(), b: Rational::one() });
    halves.push(Half { a: t.iter().map(|v| -v).collect(), b: Rational::one() });
    vertex_max(n + 1, &halves, &t).is_some_and(|(v, _)| v.is_positive())
}

/// Exact worst-case LPT ratio on 2 machines: the largest LPT makespan subject to
/// an optimal makespan of at most 1, over every nonempty cell.
pub fn independent_lpt_ratio(n: usize) -> Rational {
    let mut best = Rational::one();
    for (rows, loads) in lpt_branches(n) {
        for k in 0..2 {
            let mut cell = rows.clone();
            cell.extend(sort_rows(n));
            let other = 1 - k;
            let a: Vec<i64> = (0..n).map(|i| loads[other][i] - loads[k][i]).collect();
            if a.iter().any(|&v| v != 0) {
                cell.push(Row { a, strict: false });
            }
            for mask in 0..(1u32 << n) {
                let bin = |b: u32| -> Vec<Rational> {
                    (0..n).map(|i| if (mask >> i) & 1 == b { Rational::one() } else { Rational::zero() }).collect()
                };
                let bounded = [Half { a: bin(0), b: Rational::one() }, Half { a: bin(1), b: Rational::one() }];
                let mut halves: Vec<Half> =
                    cell.iter().map(|r| Half { a: to_q(&r.a), b: Rational::zero() }).collect();
                halves.extend(bounded.iter().cloned());
                let Some((v, _)) = vertex_max(n, &halves, &to_q(&loads[k])) else { continue };
                if v > best && nonempty(n, &cell, &bounded) {
                    best = v;
                }
            }
        }
    }
    best
}

/// Largest LPT ratio on a grid of sorted inputs with entries `k/den`.
pub fn grid_lpt_ratio(n: usize, den: i64) -> Rational {
    fn lpt(x: &[Rational]) -> Rational {
        let mut l = [Rational::zero(), Rational::zero()];
        for v in x {
            let k = if l[0] <= l[1] { 0 } else { 1 };
            l[k] += v;
        }
        l[0].clone().max(l[1].clone())
    }
    fn opt(x: &[Rational]) -> Rational {
        let total: Rational = x.iter().cloned().sum();
        (0..1u32 << x.len())
            .map(|mask| {
                let s: Rational = x.iter().enumerate().filter(|(i, _)| (mask >> i) & 1 == 1).map(|(_, v)| v.clone()).sum();
                let r = &total - &s;
                s.max(r)
            })
            .min()
            .unwrap()
    }
    let mut best = Rational::one();
    let mut x = vec![0i64; n];
    loop {
        if x.windows(2).all(|w| w[0] >= w[1]) && x[0] > 0 {
            let q: Vec<Rational> = x.iter().map(|&v| frac(v, den)).collect();
            best = best.max(lpt(&q) / opt(&q));
        }
        let mut i = 0;
        while i < n && x[i] == den {
            x[i] = 0;
            i += 1;
        }
        if i == n {
            return best;
        }
        x[i] += 1;
    }
}
