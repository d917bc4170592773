use std::cell::Cell;

use num_traits::{One, Signed, Zero};

use super::Polyhedron;
use crate::rational::Rational;
use crate::symexpr::{Constraint, Relation};

thread_local! {
    static SOLVES: Cell<u64> = const { Cell::new(0) };
}

/// Number of simplex solves performed on the calling thread so far.
pub fn solve_count() -> u64 {
    SOLVES.with(Cell::get)
}

/// Outcome of maximizing `c·x` over a closed polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    /// `point + t·direction` is feasible for all `t >= 0` and `c·direction > 0`.
    Unbounded { point: Vec<Rational>, direction: Vec<Rational> },
    Optimal { point: Vec<Rational>, value: Rational },
}

/// One row `Σ a_k x_k (<= | =) rhs` of a problem in inequality form.
#[derive(Clone, Debug)]
pub(crate) struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub rhs: Rational,
    pub eq: bool,
}

impl Row {
    /// `Σ a x + b (rel) 0` as `Σ a x (rel) -b - shift`, for `rel` in {=, <=}.
    pub fn from_constraint(c: &Constraint, shift: &Rational) -> Self {
        Self {
            coeffs: c.coeffs().iter().map(|(i, a)| (*i, a.clone())).collect(),
            rhs: -(c.constant() + shift),
            eq: c.relation() == Relation::Eq,
        }
    }
}

/// Maximize `objective·x` subject to `rows`, where `nonneg[k]` marks variables
/// known to be nonnegative; all other variables are free.
#[derive(Clone, Debug)]
pub(crate) struct Problem {
    pub nvars: usize,
    pub rows: Vec<Row>,
    pub nonneg: Vec<bool>,
    pub objective: Vec<Rational>,
}

impl Problem {
    pub fn new(nvars: usize) -> Self {
        Self {
            nvars,
            rows: Vec::new(),
            nonneg: vec![false; nvars],
            objective: vec![Rational::zero(); nvars],
        }
    }

    /// Rows of the form `-a·x_k <= 0` with `a > 0` become sign restrictions.
    fn absorb_sign_rows(&mut self) {
        let nonneg = &mut self.nonneg;
        self.rows.retain(|r| {
            if let [(k, a)] = r.coeffs.as_slice() {
                if !r.eq && r.rhs.is_zero() && a.is_negative() {
                    nonneg[*k] = true;
                    return false;
                }
            }
            true
        });
    }
}

pub fn solve_closed(q: &Polyhedron, c: &[Rational]) -> LpOutcome {
    assert!(q.is_closed(), "solve_closed requires a closed polyhedron");
    assert_eq!(c.len(), q.dim(), "objective length must match dimension");
    if q.is_trivially_empty() {
        return LpOutcome::Infeasible;
    }
    let zero = Rational::zero();
    let mut p = Problem::new(q.dim());
    p.rows = q
        .equalities()
        .iter()
        .chain(q.weak())
        .map(|c| Row::from_constraint(c, &zero))
        .collect();
    p.objective = c.to_vec();
    solve(p)
}

pub(crate) fn solve(mut p: Problem) -> LpOutcome {
    SOLVES.with(|s| s.set(s.get() + 1));
    p.absorb_sign_rows();
    Tableau::build(&p).solve(&p)
}

enum Exit {
    Optimal,
    Unbounded(usize),
}

struct Tableau {
    /// Constraint rows; the last entry of each is the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs in `z + Σ d_j y_j = value` form; last entry is the value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
    /// Columns that may not enter the basis (artificials in phase two).
    blocked: Vec<bool>,
    /// `pos[k]` and optional `neg[k]` columns of original variable `k`.
    pos: Vec<usize>,
    neg: Vec<Option<usize>>,
    first_artificial: usize,
}

impl Tableau {
    fn build(p: &Problem) -> Self {
        let mut pos = Vec::with_capacity(p.nvars);
        let mut neg = Vec::with_capacity(p.nvars);
        let mut col = 0;
        for k in 0..p.nvars {
            pos.push(col);
            col += 1;
            if p.nonneg[k] {
                neg.push(None);
            } else {
                neg.push(Some(col));
                col += 1;
            }
        }
        let first_slack = col;
        let nslack = p.rows.iter().filter(|r| !r.eq).count();
        let first_artificial = first_slack + nslack;
        let needs_artificial: Vec<bool> =
            p.rows.iter().map(|r| r.eq || r.rhs.is_negative()).collect();
        let nart = needs_artificial.iter().filter(|b| **b).count();
        let ncols = first_artificial + nart;

        let mut rows = Vec::with_capacity(p.rows.len());
        let mut basis = Vec::with_capacity(p.rows.len());
        let mut slack = first_slack;
        let mut art = first_artificial;
        for (r, &artificial) in p.rows.iter().zip(&needs_artificial) {
            let mut row = vec![Rational::zero(); ncols + 1];
            for (k, a) in &r.coeffs {
                row[pos[*k]] += a;
                if let Some(n) = neg[*k] {
                    row[n] -= a;
                }
            }
            let mut slack_col = None;
            if !r.eq {
                row[slack] = Rational::one();
                slack_col = Some(slack);
                slack += 1;
            }
            row[ncols] = r.rhs.clone();
            if r.rhs.is_negative() {
                for v in row.iter_mut() {
                    if !v.is_zero() {
                        *v = -&*v;
                    }
                }
            }
            if artificial {
                row[art] = Rational::one();
                basis.push(art);
                art += 1;
            } else {
                basis.push(slack_col.expect("non-artificial rows carry a slack"));
            }
            rows.push(row);
        }
        Self {
            rows,
            obj: vec![Rational::zero(); ncols + 1],
            basis,
            ncols,
            blocked: vec![false; ncols],
            pos,
            neg,
            first_artificial,
        }
    }

    fn solve(mut self, p: &Problem) -> LpOutcome {
        if self.first_artificial < self.ncols {
            for j in self.first_artificial..self.ncols {
                self.obj[j] = Rational::one();
            }
            self.price_out_basis();
            // Phase one never reports unbounded: its objective is bounded by 0.
            let _ = self.run();
            if self.obj[self.ncols].is_negative() {
                return LpOutcome::Infeasible;
            }
            self.drive_out_artificials();
            for j in self.first_artificial..self.ncols {
                self.blocked[j] = true;
            }
        }

        if p.objective.iter().all(Zero::is_zero) {
            let point = self.primal_point(p.nvars);
            return LpOutcome::Optimal { point, value: Rational::zero() };
        }

        self.obj.iter_mut().for_each(|v| *v = Rational::zero());
        for (k, ck) in p.objective.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            self.obj[self.pos[k]] = -ck;
            if let Some(n) = self.neg[k] {
                self.obj[n] = ck.clone();
            }
        }
        self.price_out_basis();
        match self.run() {
            Exit::Optimal => {
                let point = self.primal_point(p.nvars);
                let value = dot(&p.objective, &point);
                LpOutcome::Optimal { point, value }
            }
            Exit::Unbounded(j) => {
                let point = self.primal_point(p.nvars);
                let mut ydir = vec![Rational::zero(); self.ncols];
                ydir[j] = Rational::one();
                for (row, &b) in self.rows.iter().zip(&self.basis) {
                    ydir[b] = -&row[j];
                }
                let direction = self.to_original(&ydir, p.nvars);
                LpOutcome::Unbounded { point, direction }
            }
        }
    }

    fn price_out_basis(&mut self) {
        for i in 0..self.rows.len() {
            let b = self.basis[i];
            if self.obj[b].is_zero() {
                continue;
            }
            let f = self.obj[b].clone();
            sub_scaled(&mut self.obj, &self.rows[i], &f);
        }
    }

    /// Bland's rule: lowest-index improving column enters; ratio ties leave by
    /// lowest basic index.
    fn run(&mut self) -> Exit {
        loop {
            let entering = (0..self.ncols).find(|&j| !self.blocked[j] && self.obj[j].is_negative());
            let Some(j) = entering else {
                return Exit::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = &row[j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j),
                None => return Exit::Unbounded(j),
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let mut prow = std::mem::take(&mut self.rows[r]);
        let piv = prow[j].clone();
        if !piv.is_one() {
            for v in prow.iter_mut() {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
        }
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            sub_scaled(row, &prow, &f);
        }
        if !self.obj[j].is_zero() {
            let f = self.obj[j].clone();
            sub_scaled(&mut self.obj, &prow, &f);
        }
        self.rows[r] = prow;
        self.basis[r] = j;
    }

    /// After a feasible phase one, artificials still basic sit at zero. Pivot
    /// each out on any nonzero structural entry, or drop its row as redundant.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    self.rows.remove(i);
                    self.basis.remove(i);
                }
            }
        }
    }

    fn primal_point(&self, nvars: usize) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); self.ncols];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            y[b] = row[self.ncols].clone();
        }
        self.to_original(&y, nvars)
    }

    fn to_original(&self, y: &[Rational], nvars: usize) -> Vec<Rational> {
        (0..nvars)
            .map(|k| match self.neg[k] {
                Some(n) => &y[self.pos[k]] - &y[n],
                None => y[self.pos[k]].clone(),
            })
            .collect()
    }
}

/// `target -= f · source`, touching only entries where `source` is nonzero.
fn sub_scaled(target: &mut [Rational], source: &[Rational], f: &Rational) {
    for (t, s) in target.iter_mut().zip(source) {
        if !s.is_zero() {
            *t -= f * s;
        }
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}
