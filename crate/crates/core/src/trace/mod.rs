//! Decision-tree extraction by systematic re-execution.
//!
//! The program is run on symbolic inputs. Each run replays a forced prefix of
//! branch decisions; at every fresh branch both sides are tested for
//! feasibility against the constraints collected so far. A side that cannot
//! contain any input is skipped, a branch with a single viable side is followed
//! without forking, and a branch with two viable sides ends the run and spawns
//! one child run per side.

mod export;
mod oracle;

use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use crate::lp::{feasible_open, Polyhedron};
use crate::rational::Rational;
use crate::symexpr::{negate_constraint, Constraint, ExprError};

pub use export::{export_dot, export_json, export_text};
pub use oracle::{run_concrete, ConcreteOracle, Halt, Oracle, TracedProgram};
use oracle::HaltKind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("node budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("program is nondeterministic: {0}")]
    Nondeterministic(String),
    #[error("base region is empty")]
    EmptyRegion,
    #[error("expected {expected} inputs, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the base region")]
    OutsideBase,
    #[error("point lies only in pruned regions")]
    PrunedRegion,
    #[error("{0}")]
    Program(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceConfig {
    /// Skip branch sides whose region is empty.
    pub prune_infeasible: bool,
    /// Skip branch sides whose region has empty interior.
    pub prune_empty_interior: bool,
    /// Budget on internal plus leaf nodes.
    pub max_nodes: usize,
    /// Worker threads for replaying independent prefixes; 1 runs sequentially.
    pub workers: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self { prune_infeasible: true, prune_empty_interior: false, max_nodes: 1_000_000, workers: 1 }
    }
}

/// An output-labeled leaf and the branch constraints on its root path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf<O> {
    pub id: usize,
    pub output: O,
    /// Oriented constraints of every decision on the path, forks or not.
    pub path: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeNode<O> {
    Internal { id: usize, constraint: Constraint, on_true: usize, on_false: usize },
    Leaf(Leaf<O>),
}

/// Binary tree of halfspace tests, stored in preorder (`nodes[0]` is the root).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionTree<O> {
    nodes: Vec<TreeNode<O>>,
    dim: usize,
    base_region: Vec<Constraint>,
    interior_pruned: bool,
}

impl<O> DecisionTree<O> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base_region(&self) -> &[Constraint] {
        &self.base_region
    }

    pub fn nodes(&self) -> &[TreeNode<O>] {
        &self.nodes
    }

    pub fn interior_pruned(&self) -> bool {
        self.interior_pruned
    }

    /// Leaves in preorder.
    pub fn leaves(&self) -> impl Iterator<Item = &Leaf<O>> {
        self.nodes.iter().filter_map(|n| match n {
            TreeNode::Leaf(l) => Some(l),
            TreeNode::Internal { .. } => None,
        })
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().count()
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.len() - self.leaf_count()
    }

    /// `base_region ∧ path`.
    pub fn leaf_region(&self, leaf: &Leaf<O>) -> Polyhedron {
        let mut p = Polyhedron::from_constraints(self.dim, &self.base_region);
        p.extend(&leaf.path);
        p
    }

    /// Follows the tests from the root and returns the leaf reached.
    ///
    /// When empty-interior regions were pruned, a point on the boundary of a
    /// retained leaf region is accepted for that leaf.
    pub fn route(&self, x: &[Rational]) -> Result<&Leaf<O>, TraceError> {
        if x.len() != self.dim {
            return Err(TraceError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if !self.base_region.iter().all(|c| c.holds_at(x)) {
            return Err(TraceError::OutsideBase);
        }
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Internal { constraint, on_true, on_false, .. } => {
                    at = if constraint.holds_at(x) { *on_true } else { *on_false };
                }
                TreeNode::Leaf(leaf) => {
                    if leaf.path.iter().all(|c| c.holds_at(x)) {
                        return Ok(leaf);
                    }
                    if self.interior_pruned && leaf.path.iter().all(|c| c.weakened().holds_at(x)) {
                        return Ok(leaf);
                    }
                    return Err(TraceError::PrunedRegion);
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Step {
    /// The constraint as the program posed it (before orientation).
    posed: Constraint,
    taken: bool,
}

impl Step {
    fn oriented(&self) -> Constraint {
        if self.taken {
            self.posed.clone()
        } else {
            negate_constraint(&self.posed).expect("branch constraints are inequalities")
        }
    }
}

enum Run<O> {
    Leaf { steps: Vec<Step>, output: O },
    Fork { steps: Vec<Step>, posed: Constraint },
}

enum Built<O> {
    Leaf { output: O, path: Vec<Constraint> },
    Internal { constraint: Constraint, on_true: Box<Built<O>>, on_false: Box<Built<O>> },
}

struct Replay<'a> {
    prefix: &'a [Step],
    steps: Vec<Step>,
    region: Polyhedron,
    cfg: &'a TraceConfig,
    fork: Option<Constraint>,
}

impl Replay<'_> {
    fn viable(&self, c: &Constraint) -> bool {
        if !self.cfg.prune_infeasible && !self.cfg.prune_empty_interior {
            return true;
        }
        let side = self.region.with([c]);
        if self.cfg.prune_empty_interior {
            feasible_open(&side.strictified()).is_feasible()
        } else {
            feasible_open(&side).is_feasible()
        }
    }
}

impl Oracle for Replay<'_> {
    fn decide(&mut self, c: &Constraint) -> Result<bool, Halt> {
        let at = self.steps.len();
        if let Some(forced) = self.prefix.get(at) {
            if &forced.posed != c {
                return Err(TraceError::Nondeterministic(format!(
                    "decision {at} was `{}` on an earlier run, now `{c}`",
                    forced.posed
                ))
                .into());
            }
            self.steps.push(forced.clone());
            return Ok(forced.taken);
        }
        let negated = negate_constraint(c)?;
        let keep_true = self.viable(c);
        let keep_false = self.viable(&negated);
        let taken = match (keep_true, keep_false) {
            (true, true) => {
                self.fork = Some(c.clone());
                return Err(Halt(HaltKind::Fork));
            }
            (true, false) => true,
            (false, true) => false,
            (false, false) => return Err(TraceError::EmptyRegion.into()),
        };
        self.region.push(if taken { c.clone() } else { negated });
        self.steps.push(Step { posed: c.clone(), taken });
        Ok(taken)
    }
}

struct Builder<'a, P: TracedProgram> {
    prog: &'a P,
    base: &'a [Constraint],
    cfg: &'a TraceConfig,
    nodes: AtomicUsize,
}

impl<P: TracedProgram> Builder<'_, P> {
    fn run_once(&self, prefix: &[Step]) -> Result<Run<P::Output>, TraceError> {
        let mut region = Polyhedron::from_constraints(self.prog.dim(), self.base);
        for s in prefix {
            region.push(s.oriented());
        }
        let mut replay =
            Replay { prefix, steps: Vec::with_capacity(prefix.len() + 4), region, cfg: self.cfg, fork: None };
        let vars = crate::symexpr::LinExpr::vars(self.prog.dim());
        match self.prog.run(&vars, &mut replay) {
            Ok(output) => {
                if replay.steps.len() < prefix.len() {
                    return Err(TraceError::Nondeterministic(format!(
                        "run ended after {} of {} forced decisions",
                        replay.steps.len(),
                        prefix.len()
                    )));
                }
                Ok(Run::Leaf { steps: replay.steps, output })
            }
            Err(Halt(HaltKind::Fork)) => Ok(Run::Fork {
                steps: replay.steps,
                posed: replay.fork.expect("fork records its constraint"),
            }),
            Err(Halt(HaltKind::Error(e))) => Err(e),
        }
    }

    fn claim_node(&self) -> Result<(), TraceError> {
        let used = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if used > self.cfg.max_nodes {
            return Err(TraceError::BudgetExceeded(self.cfg.max_nodes));
        }
        Ok(())
    }

    fn explore(&self, prefix: Vec<Step>) -> Result<Built<P::Output>, TraceError> {
        self.claim_node()?;
        match self.run_once(&prefix)? {
            Run::Leaf { steps, output } => {
                Ok(Built::Leaf { output, path: steps.iter().map(Step::oriented).collect() })
            }
            Run::Fork { steps, posed } => {
                let mut t = steps.clone();
                t.push(Step { posed: posed.clone(), taken: true });
                let mut f = steps;
                f.push(Step { posed: posed.clone(), taken: false });
                let (on_true, on_false) = if self.cfg.workers > 1 {
                    rayon::join(|| self.explore(t), || self.explore(f))
                } else {
                    (self.explore(t), self.explore(f))
                };
                Ok(Built::Internal {
                    constraint: posed,
                    on_true: Box::new(on_true?),
                    on_false: Box::new(on_false?),
                })
            }
        }
    }
}

fn flatten<O>(node: Built<O>, out: &mut Vec<TreeNode<O>>) -> usize {
    let id = out.len();
    match node {
        Built::Leaf { output, path } => out.push(TreeNode::Leaf(Leaf { id, output, path })),
        Built::Internal { constraint, on_true, on_false } => {
            out.push(TreeNode::Internal { id, constraint, on_true: 0, on_false: 0 });
            let t = flatten(*on_true, out);
            let f = flatten(*on_false, out);
            if let TreeNode::Internal { on_true, on_false, .. } = &mut out[id] {
                *on_true = t;
                *on_false = f;
            }
        }
    }
    id
}

/// Extracts the decision tree of `prog` over `base_region`.
pub fn build_tree<P: TracedProgram>(
    prog: &P,
    base_region: &[Constraint],
    cfg: &TraceConfig,
) -> Result<DecisionTree<P::Output>, TraceError> {
    assert!(cfg.max_nodes >= 1, "max_nodes must be positive");
    if let Some(c) = base_region.iter().find(|c| c.support_dim() > prog.dim()) {
        return Err(TraceError::Program(format!(
            "base constraint `{c}` references variables beyond dimension {}",
            prog.dim()
        )));
    }
    let base_poly = Polyhedron::from_constraints(prog.dim(), base_region);
    let base_ok = if cfg.prune_empty_interior {
        feasible_open(&base_poly.strictified()).is_feasible()
    } else if cfg.prune_infeasible {
        feasible_open(&base_poly).is_feasible()
    } else {
        true
    };
    if !base_ok {
        return Err(TraceError::EmptyRegion);
    }
    let builder = Builder { prog, base: base_region, cfg, nodes: AtomicUsize::new(0) };
    let built = if cfg.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| TraceError::Program(e.to_string()))?;
        pool.install(|| builder.explore(Vec::new()))?
    } else {
        builder.explore(Vec::new())?
    };
    let mut nodes = Vec::new();
    flatten(built, &mut nodes);
    Ok(DecisionTree {
        nodes,
        dim: prog.dim(),
        base_region: base_region.to_vec(),
        interior_pruned: cfg.prune_empty_interior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::symexpr::LinExpr;

    struct Fixed;

    impl TracedProgram for Fixed {
        type Output = u8;
        fn dim(&self) -> usize {
            2
        }
        fn run(&self, _x: &[LinExpr], _o: &mut dyn Oracle) -> Result<u8, Halt> {
            Ok(7)
        }
    }

    /// `if x1 >= x2 { 'A' } else { 'B' }`
    struct Max2;

    impl TracedProgram for Max2 {
        type Output = char;
        fn dim(&self) -> usize {
            2
        }
        fn run(&self, x: &[LinExpr], o: &mut dyn Oracle) -> Result<char, Halt> {
            Ok(if o.ge(&x[0], &x[1])? { 'A' } else { 'B' })
        }
    }

    /// Poses a different first comparison on every run.
    struct Flaky(AtomicUsize);

    impl TracedProgram for Flaky {
        type Output = u8;
        fn dim(&self) -> usize {
            1
        }
        fn run(&self, x: &[LinExpr], o: &mut dyn Oracle) -> Result<u8, Halt> {
            let k = self.0.fetch_add(1, Ordering::Relaxed) as i64;
            let a = o.lt(&x[0], &LinExpr::constant(int(k)))?;
            Ok(a as u8)
        }
    }

    #[test]
    fn constant_program_gives_single_leaf() {
        let t = build_tree(&Fixed, &[], &TraceConfig::default()).unwrap();
        assert_eq!(t.leaf_count(), 1);
        assert_eq!(t.internal_count(), 0);
        assert_eq!(t.route(&[int(3), int(-1)]).unwrap().output, 7);
    }

    #[test]
    fn one_comparison_gives_one_internal_node() {
        let t = build_tree(&Max2, &[], &TraceConfig::default()).unwrap();
        assert_eq!(t.internal_count(), 1);
        let TreeNode::Internal { constraint, on_true, on_false, .. } = &t.nodes()[0] else {
            panic!("root must be internal");
        };
        assert_eq!(constraint.to_string(), "-x1 + x2 <= 0");
        assert_eq!(t.nodes()[*on_true], TreeNode::Leaf(Leaf {
            id: 1,
            output: 'A',
            path: vec![constraint.clone()],
        }));
        let TreeNode::Leaf(b) = &t.nodes()[*on_false] else { panic!() };
        assert_eq!(b.output, 'B');
        assert_eq!(t.route(&[int(1), int(1)]).unwrap().output, 'A');
        assert_eq!(t.route(&[int(1), int(2)]).unwrap().output, 'B');
    }

    #[test]
    fn infeasible_side_is_not_forked() {
        let x = LinExpr::var(0);
        let y = LinExpr::var(1);
        let base = [Constraint::ge(&x, &y).unwrap()];
        let t = build_tree(&Max2, &base, &TraceConfig::default()).unwrap();
        assert_eq!(t.leaf_count(), 1);
        let leaf = t.leaves().next().unwrap();
        assert_eq!(leaf.output, 'A');
        assert_eq!(leaf.path.len(), 1);

        let cfg = TraceConfig { prune_infeasible: false, ..TraceConfig::default() };
        assert_eq!(build_tree(&Max2, &base, &cfg).unwrap().leaf_count(), 2);
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = TraceConfig { max_nodes: 2, ..TraceConfig::default() };
        assert_eq!(build_tree(&Max2, &[], &cfg), Err(TraceError::BudgetExceeded(2)));
    }

    #[test]
    fn nondeterminism_is_reported() {
        let err = build_tree(&Flaky(AtomicUsize::new(0)), &[], &TraceConfig::default()).unwrap_err();
        assert!(matches!(err, TraceError::Nondeterministic(_)), "{err:?}");
    }

    #[test]
    fn branching_on_infinity_is_an_error() {
        struct Inf;
        impl TracedProgram for Inf {
            type Output = bool;
            fn dim(&self) -> usize {
                1
            }
            fn run(&self, x: &[LinExpr], o: &mut dyn Oracle) -> Result<bool, Halt> {
                let inf = LinExpr::ext_constant(crate::rational::ExtRational::PosInf);
                o.lt(&x[0], &inf)
            }
        }
        let err = build_tree(&Inf, &[], &TraceConfig::default()).unwrap_err();
        assert_eq!(err, TraceError::Expr(ExprError::InfiniteComparison));
    }

    #[test]
    fn route_rejects_points_outside_base() {
        let x = LinExpr::var(0);
        let base = [Constraint::ge(&x, &LinExpr::zero()).unwrap()];
        let t = build_tree(&Max2, &base, &TraceConfig::default()).unwrap();
        assert_eq!(t.route(&[int(-1), int(0)]), Err(TraceError::OutsideBase));
        assert!(t.route(&[int(1)]).is_err());
    }
}
