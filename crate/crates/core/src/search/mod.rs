//! Worst-case ratio search over the leaves of a decision tree.
//!
//! For a minimization problem whose costs are piecewise affine, the worst ratio
//! for a fixed input size is the maximum, over leaves `ℓ`, candidate optimal
//! outputs `z*` and cost pieces, of the supremum of `c(x, z_ℓ) / c(x, z*)` over
//! the corresponding polyhedron. Three problem classes are handled:
//!
//! * constant costs: each nonempty (leaf, `z*`) region has a fixed ratio;
//! * scale-invariant costs: the ratio supremum equals `sup c(x, z_ℓ)` subject
//!   to `c(x, z*) <= 1`, one linear program per region;
//! * general piecewise-affine costs: bisection on the ratio, where each probe
//!   is an open-polyhedron feasibility question.

mod bisect;
mod modes;
mod prune;
mod report;

use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::lp::Polyhedron;
use crate::rational::{ExtRational, Rational};
use crate::symexpr::{Constraint, LinExpr};
use crate::trace::{DecisionTree, Leaf};

pub use bisect::binary_search_ratio;
pub use prune::{leaf_bounds, prune_check1, prune_check2, LeafBound, RunningBest};
pub use report::{Alpha, HardExampleReport, SearchStats};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("candidate output set is empty")]
    EmptyCandidates,
    #[error("tree has dimension {tree}, problem has dimension {spec}")]
    DimensionMismatch { tree: usize, spec: usize },
    #[error("scale-invariant mode requires linear costs, found `{0}`")]
    AffineCost(String),
    #[error("leaf payload lacks the max-machine annotation needed by check1")]
    MissingAnnotation,
    #[error("ratio exceeds the initial upper bound {0}; raise it")]
    UpperBoundTooLow(String),
    #[error("invalid bracket: {0}")]
    InvalidBracket(String),
    #[error("ratio is unbounded")]
    Unbounded,
    #[error("no leaf region is feasible")]
    NoFeasibleLeaf,
    #[error("{0}")]
    Worker(String),
}

/// How the search turns regions into ratio values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CostMode {
    ConstantCost,
    ScaleInvariant,
    General,
}

/// One affine piece of a cost function: on `region`, the cost equals `cost`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostPiece {
    pub region: Vec<Constraint>,
    pub cost: LinExpr,
}

/// A linear minimization problem for a fixed input size.
pub trait ProblemSpec: Sync {
    /// Leaf payload of the traced algorithm.
    type Payload: Sync;
    /// An element of the output space.
    type Output: Clone + PartialEq + std::fmt::Debug + Send + Sync;

    fn dim(&self) -> usize;

    /// The input space.
    fn base_region(&self) -> Vec<Constraint>;

    /// Constraints implied by the base region that the solver may exploit
    /// (sign restrictions in particular). Adding them never changes a region.
    fn implied_constraints(&self) -> Vec<Constraint> {
        Vec::new()
    }

    fn mode(&self) -> CostMode;

    /// The finite output space, possibly reduced by symmetry.
    fn candidate_outputs(&self) -> Vec<Self::Output>;

    fn leaf_output(&self, payload: &Self::Payload) -> Self::Output;

    /// Pieces covering the input space on each of which the cost of `z` is affine.
    fn cost_pieces(&self, z: &Self::Output) -> Vec<CostPiece>;

    /// Constraints equivalent to `c(x, z) <= 1` without splitting into pieces.
    fn opt_constraint_decomposition(&self, _z: &Self::Output) -> Option<Vec<Constraint>> {
        None
    }

    /// Whether a leaf survives check1; errors when the payload lacks the
    /// annotation the rule needs.
    fn check1_keep(&self, _payload: &Self::Payload) -> Result<bool, SearchError> {
        Err(SearchError::MissingAnnotation)
    }

    /// Index into `cost_pieces(leaf_output)` known to hold on the whole leaf.
    fn pinned_piece(&self, _payload: &Self::Payload) -> Option<usize> {
        None
    }

    /// Relaxation of `c(x, z*) <= 1` valid for every `z*`, used for leaf bounds.
    fn relaxation(&self) -> Option<Vec<Constraint>> {
        None
    }

    /// Exact cost of `z` at a concrete input.
    fn cost_at(&self, x: &[Rational], z: &Self::Output) -> ExtRational {
        self.cost_pieces(z)
            .iter()
            .find(|p| p.region.iter().all(|c| c.holds_at(x)))
            .map(|p| p.cost.eval(x))
            .unwrap_or(ExtRational::PosInf)
    }

    /// Concrete run of the algorithm, when available.
    fn run_algorithm(&self, _x: &[Rational]) -> Option<Self::Output> {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub check1: bool,
    pub check2: bool,
    /// Interpolation weight for witnesses of unattained suprema.
    pub epsilon: Rational,
    /// Bracket width for bisection.
    pub tol: Rational,
    /// Use [`ProblemSpec::opt_constraint_decomposition`] when offered.
    pub use_opt_decomposition: bool,
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            check1: true,
            check2: true,
            epsilon: Rational::new(1.into(), 1_000_000.into()),
            tol: Rational::new(1.into(), 1000.into()),
            use_opt_decomposition: true,
            workers: 1,
        }
    }
}

/// Exact ratio `c(x, A(x)) / min_z c(x, z)` at a concrete input; `0/0` is 1.
pub fn ratio_at<S: ProblemSpec>(spec: &S, x: &[Rational], alg: &S::Output) -> (ExtRational, S::Output) {
    let (opt_z, opt_cost) = optimum_at(spec, x);
    let num = spec.cost_at(x, alg);
    let r = num
        .checked_div(&opt_cost)
        .unwrap_or(ExtRational::Finite(Rational::one()));
    (r, opt_z)
}

/// First output in enumeration order with least cost at `x`.
pub fn optimum_at<S: ProblemSpec>(spec: &S, x: &[Rational]) -> (S::Output, ExtRational) {
    let mut best: Option<(S::Output, ExtRational)> = None;
    for z in spec.candidate_outputs() {
        let c = spec.cost_at(x, &z);
        if best.as_ref().is_none_or(|(_, b)| c < *b) {
            best = Some((z, c));
        }
    }
    best.expect("candidate output set is nonempty")
}

/// The algorithm's output at `x`: a concrete run when available, else the
/// output of the leaf `x` routes to.
pub(crate) fn algorithm_at<S: ProblemSpec>(
    tree: &DecisionTree<S::Payload>,
    spec: &S,
    x: &[Rational],
) -> Option<S::Output> {
    spec.run_algorithm(x)
        .or_else(|| tree.route(x).ok().map(|l| spec.leaf_output(&l.output)))
}

/// Assembles a report around `witness`. The reported leaf is the one the
/// witness routes to, falling back to `leaf` when routing fails.
pub fn build_report<S: ProblemSpec>(
    tree: &DecisionTree<S::Payload>,
    spec: &S,
    alpha: Alpha,
    witness: Vec<Rational>,
    leaf: &Leaf<S::Payload>,
    stats: SearchStats,
) -> HardExampleReport<S::Output> {
    let leaf = tree.route(&witness).unwrap_or(leaf);
    let leaf_output = spec.leaf_output(&leaf.output);
    let algorithm_output = algorithm_at(tree, spec, &witness).unwrap_or_else(|| leaf_output.clone());
    let (witness_ratio, optimal_output) = ratio_at(spec, &witness, &algorithm_output);
    let attained = matches!(&alpha, Alpha::Exact(a) if *a == witness_ratio);
    HardExampleReport {
        alpha,
        witness,
        attained,
        witness_ratio,
        leaf_id: leaf.id,
        leaf_output,
        algorithm_output,
        optimal_output,
        leaf_constraints: leaf.path.clone(),
        stats,
    }
}

pub(crate) fn piece_polyhedron(dim: usize, parts: &[&[Constraint]]) -> Polyhedron {
    let mut p = Polyhedron::new(dim);
    for part in parts {
        p.extend(part.iter());
    }
    p
}

/// Leaves remaining after check1 together with the piece indices to search.
pub(crate) struct Prepared<'t, P> {
    pub leaves: Vec<&'t Leaf<P>>,
    pub pruned_check1: usize,
}

pub(crate) fn prepare<'t, S: ProblemSpec>(
    tree: &'t DecisionTree<S::Payload>,
    spec: &S,
    cfg: &SearchConfig,
) -> Result<Prepared<'t, S::Payload>, SearchError> {
    if tree.dim() != spec.dim() {
        return Err(SearchError::DimensionMismatch { tree: tree.dim(), spec: spec.dim() });
    }
    if spec.candidate_outputs().is_empty() {
        return Err(SearchError::EmptyCandidates);
    }
    let all: Vec<_> = tree.leaves().collect();
    let total = all.len();
    let leaves = if cfg.check1 { prune_check1(all, spec)? } else { all };
    Ok(Prepared { pruned_check1: total - leaves.len(), leaves })
}

/// Indices of the cost pieces of a leaf's output that the search visits.
pub(crate) fn leaf_piece_indices<S: ProblemSpec>(
    spec: &S,
    payload: &S::Payload,
    npieces: usize,
    cfg: &SearchConfig,
) -> Vec<usize> {
    match (cfg.check1, spec.pinned_piece(payload)) {
        (true, Some(i)) => vec![i],
        _ => (0..npieces).collect(),
    }
}

pub(crate) fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, SearchError> {
    if workers <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SearchError::Worker(e.to_string()))?;
    Ok(pool.install(f))
}

/// Computes the worst-case ratio of the algorithm represented by `tree`.
pub fn compute_ratio<S: ProblemSpec>(
    tree: &DecisionTree<S::Payload>,
    spec: &S,
    cfg: &SearchConfig,
) -> Result<HardExampleReport<S::Output>, SearchError> {
    match spec.mode() {
        CostMode::ConstantCost => modes::constant_cost(tree, spec, cfg),
        CostMode::ScaleInvariant => modes::scale_invariant(tree, spec, cfg),
        CostMode::General => {
            let started = std::time::Instant::now();
            let hi = bisect::doubling_upper_bound(tree, spec, cfg)?;
            let mut report = binary_search_ratio(tree, spec, Rational::one(), hi, cfg.tol.clone(), cfg)?;
            report.stats.wall_ms = started.elapsed().as_millis();
            Ok(report)
        }
    }
}
