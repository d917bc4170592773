use crate::rational::Rational;
use crate::symexpr::{compare, CmpOp, Comparison, Constraint, ExprError, LinExpr};

use super::TraceError;

/// Why a traced run stopped early. Programs only propagate it with `?`.
#[derive(Debug)]
pub struct Halt(pub(crate) HaltKind);

#[derive(Debug)]
pub(crate) enum HaltKind {
    /// The tracer reached a branch it wants to explore on both sides.
    Fork,
    Error(TraceError),
}

impl From<ExprError> for Halt {
    fn from(e: ExprError) -> Self {
        Halt(HaltKind::Error(TraceError::Expr(e)))
    }
}

impl From<TraceError> for Halt {
    fn from(e: TraceError) -> Self {
        Halt(HaltKind::Error(e))
    }
}

/// Answers data-dependent branches during a traced run.
pub trait Oracle {
    /// Whether `c` holds on the current path.
    fn decide(&mut self, c: &Constraint) -> Result<bool, Halt>;
}

impl dyn Oracle + '_ {
    /// Folds constant comparisons; anything else goes to [`Oracle::decide`].
    pub fn cmp(&mut self, lhs: &LinExpr, op: CmpOp, rhs: &LinExpr) -> Result<bool, Halt> {
        match compare(lhs, op, rhs)? {
            Comparison::Decided(b) => Ok(b),
            Comparison::Branch(c) => self.decide(&c),
        }
    }

    pub fn lt(&mut self, lhs: &LinExpr, rhs: &LinExpr) -> Result<bool, Halt> {
        self.cmp(lhs, CmpOp::Lt, rhs)
    }

    pub fn le(&mut self, lhs: &LinExpr, rhs: &LinExpr) -> Result<bool, Halt> {
        self.cmp(lhs, CmpOp::Le, rhs)
    }

    pub fn gt(&mut self, lhs: &LinExpr, rhs: &LinExpr) -> Result<bool, Halt> {
        self.cmp(lhs, CmpOp::Gt, rhs)
    }

    pub fn ge(&mut self, lhs: &LinExpr, rhs: &LinExpr) -> Result<bool, Halt> {
        self.cmp(lhs, CmpOp::Ge, rhs)
    }
}

/// Answers every branch by exact evaluation at a fixed point.
pub struct ConcreteOracle<'a> {
    x: &'a [Rational],
}

impl<'a> ConcreteOracle<'a> {
    pub fn new(x: &'a [Rational]) -> Self {
        Self { x }
    }
}

impl Oracle for ConcreteOracle<'_> {
    fn decide(&mut self, c: &Constraint) -> Result<bool, Halt> {
        Ok(c.holds_at(self.x))
    }
}

/// A deterministic procedure over symbolic inputs whose data-dependent
/// branches all go through the oracle.
pub trait TracedProgram: Sync {
    type Output: Clone + PartialEq + std::fmt::Debug + std::fmt::Display + Send + Sync;

    fn dim(&self) -> usize;

    fn run(&self, x: &[LinExpr], oracle: &mut dyn Oracle) -> Result<Self::Output, Halt>;
}

/// Runs `prog` on a concrete input.
pub fn run_concrete<P: TracedProgram>(prog: &P, x: &[Rational]) -> Result<P::Output, TraceError> {
    if x.len() != prog.dim() {
        return Err(TraceError::DimensionMismatch { expected: prog.dim(), got: x.len() });
    }
    let vars = LinExpr::vars(prog.dim());
    let mut oracle = ConcreteOracle::new(x);
    prog.run(&vars, &mut oracle).map_err(|h| match h.0 {
        HaltKind::Error(e) => e,
        HaltKind::Fork => unreachable!("concrete oracle never forks"),
    })
}
