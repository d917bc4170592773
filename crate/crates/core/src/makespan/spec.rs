use crate::rational::{int, ExtRational, Rational};
use crate::search::{CostMode, CostPiece, ProblemSpec, SearchError};
use crate::symexpr::{Constraint, LinExpr};

use super::{
    canonical_assignments, cost_pieces, lpt_simulate, makespan_at, opt_constraints, Assignment,
    MakespanInstance,
};

/// Makespan minimization as a linear problem over sorted job sizes.
#[derive(Clone, Debug)]
pub struct LptSpec {
    pub inst: MakespanInstance,
    pub mode: CostMode,
}

impl LptSpec {
    pub fn new(m: usize, n: usize) -> Self {
        Self { inst: MakespanInstance::new(m, n), mode: CostMode::ScaleInvariant }
    }
}

impl ProblemSpec for LptSpec {
    type Payload = Assignment;
    type Output = Vec<usize>;

    fn dim(&self) -> usize {
        self.inst.n
    }

    fn base_region(&self) -> Vec<Constraint> {
        self.inst.base_region()
    }

    fn implied_constraints(&self) -> Vec<Constraint> {
        LinExpr::vars(self.inst.n)
            .iter()
            .map(|x| Constraint::ge(x, &LinExpr::zero()).expect("linear"))
            .collect()
    }

    fn mode(&self) -> CostMode {
        self.mode
    }

    fn candidate_outputs(&self) -> Vec<Vec<usize>> {
        canonical_assignments(self.inst.n, self.inst.m).collect()
    }

    fn leaf_output(&self, payload: &Assignment) -> Vec<usize> {
        payload.z.clone()
    }

    fn cost_pieces(&self, z: &Vec<usize>) -> Vec<CostPiece> {
        cost_pieces(&self.inst, z)
            .into_iter()
            .map(|(region, cost)| CostPiece { region, cost })
            .collect()
    }

    fn opt_constraint_decomposition(&self, z: &Vec<usize>) -> Option<Vec<Constraint>> {
        Some(opt_constraints(z, self.inst.n, self.inst.m))
    }

    /// The last job must sit on the most loaded machine: dropping trailing jobs
    /// keeps LPT's makespan and can only lower the optimum.
    fn check1_keep(&self, payload: &Assignment) -> Result<bool, SearchError> {
        let max = payload.max_machine.ok_or(SearchError::MissingAnnotation)?;
        Ok(payload.z.last() == Some(&max))
    }

    fn pinned_piece(&self, payload: &Assignment) -> Option<usize> {
        payload.max_machine.map(|i| i - 1)
    }

    /// Makespan at most 1 forces total size at most `m` and every job at most 1.
    fn relaxation(&self) -> Option<Vec<Constraint>> {
        let x = LinExpr::vars(self.inst.n);
        let total = x.iter().fold(LinExpr::zero(), |acc, v| &acc + v);
        let one = LinExpr::constant(int(1));
        Some(vec![
            Constraint::le(&total, &LinExpr::constant(int(self.inst.m as i64))).expect("linear"),
            Constraint::le(&x[0], &one).expect("linear"),
        ])
    }

    fn cost_at(&self, x: &[Rational], z: &Vec<usize>) -> ExtRational {
        ExtRational::Finite(makespan_at(x, z, self.inst.m))
    }

    fn run_algorithm(&self, x: &[Rational]) -> Option<Vec<usize>> {
        Some(lpt_simulate(x, self.inst.m).z)
    }
}
