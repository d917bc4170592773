use std::time::Instant;

use num_traits::One;
use rayon::prelude::*;

use super::prune::{leaf_bounds, LeafBound, RunningBest};
use super::report::{Alpha, HardExampleReport, SearchStats};
use super::{
    build_report, leaf_piece_indices, piece_polyhedron, prepare, with_pool, CostPiece, ProblemSpec,
    SearchConfig, SearchError,
};
use crate::lp::{attaining_point, feasible_open, solve_closed, solve_count, Feasibility, LpOutcome, Polyhedron, SupOutcome};
use crate::rational::{ExtRational, Rational};
use crate::symexpr::{Constraint, LinExpr};
use crate::trace::{DecisionTree, Leaf};

/// A value with the input attaining it.
type Valued = (ExtRational, Vec<Rational>);

struct Candidate<'t, P> {
    value: ExtRational,
    leaf: &'t Leaf<P>,
    outcome: SupOutcome,
}

struct LeafResult<'t, P> {
    skipped: bool,
    lps: u64,
    found: Option<Candidate<'t, P>>,
}

fn require_linear(e: &LinExpr) -> Result<(), SearchError> {
    if e.constant_term().is_zero() {
        Ok(())
    } else {
        Err(SearchError::AffineCost(e.to_string()))
    }
}

/// For each candidate output, constraint sets whose union is `c(x, z*) <= 1`.
fn opt_sets<S: ProblemSpec>(
    spec: &S,
    zs: &[S::Output],
    cfg: &SearchConfig,
) -> Result<Vec<Vec<Vec<Constraint>>>, SearchError> {
    let one = LinExpr::constant(Rational::one());
    zs.iter()
        .map(|z| {
            if cfg.use_opt_decomposition {
                if let Some(d) = spec.opt_constraint_decomposition(z) {
                    return Ok(vec![d]);
                }
            }
            spec.cost_pieces(z)
                .into_iter()
                .map(|CostPiece { mut region, cost }| {
                    require_linear(&cost)?;
                    region.push(Constraint::le(&cost, &one).map_err(|e| SearchError::Worker(e.to_string()))?);
                    Ok(region)
                })
                .collect()
        })
        .collect()
}

/// Worst ratio for scale-invariant costs: per region, maximize the leaf cost
/// subject to the optimal cost being at most one.
pub(crate) fn scale_invariant<'t, S: ProblemSpec>(
    tree: &'t DecisionTree<S::Payload>,
    spec: &S,
    cfg: &SearchConfig,
) -> Result<HardExampleReport<S::Output>, SearchError> {
    let started = Instant::now();
    let prepared = prepare(tree, spec, cfg)?;
    let zs = spec.candidate_outputs();
    let opts = opt_sets(spec, &zs, cfg)?;
    let implied = spec.implied_constraints();
    let n = spec.dim();
    let best = RunningBest::new();

    let (order, bound_lps) = with_pool(cfg.workers, || {
        let before = solve_count();
        let bounds = if cfg.check2 { leaf_bounds(tree, spec, &prepared.leaves, cfg) } else { None };
        let order = bounds.unwrap_or_else(|| {
            prepared
                .leaves
                .iter()
                .map(|l| LeafBound { leaf: *l, gamma: ExtRational::PosInf })
                .collect()
        });
        (order, solve_count() - before)
    })?;
    let use_check2 = cfg.check2 && order.iter().any(|b| b.gamma != ExtRational::PosInf);

    let solve_leaf = |lb: &LeafBound<'t, S::Payload>| -> Result<LeafResult<'t, S::Payload>, SearchError> {
        if use_check2 && best.dominates(&lb.gamma) {
            return Ok(LeafResult { skipped: true, lps: 0, found: None });
        }
        let before = solve_count();
        let leaf = lb.leaf;
        let region = tree.leaf_region(leaf);
        let pieces = spec.cost_pieces(&spec.leaf_output(&leaf.output));
        let mut found: Option<Candidate<'t, S::Payload>> = None;
        for i in leaf_piece_indices(spec, &leaf.output, pieces.len(), cfg) {
            let piece = &pieces[i];
            require_linear(&piece.cost)?;
            let mut base = piece_polyhedron(n, &[&implied, &piece.region]);
            base.extend(region.constraints());
            if base.is_trivially_empty() {
                continue;
            }
            let c = piece.cost.dense(n);
            for sets in &opts {
                for set in sets {
                    let p = base.with(set);
                    if let Some(cand) = improve(&p, &c, leaf, found.as_ref(), &best) {
                        let done = cand.value == ExtRational::PosInf;
                        found = Some(cand);
                        if done {
                            return Ok(LeafResult { skipped: false, lps: solve_count() - before, found });
                        }
                    }
                }
            }
        }
        Ok(LeafResult { skipped: false, lps: solve_count() - before, found })
    };

    let results: Vec<_> = with_pool(cfg.workers, || {
        if cfg.workers <= 1 {
            order.iter().map(solve_leaf).collect::<Result<Vec<_>, _>>()
        } else {
            order.par_iter().map(solve_leaf).collect::<Result<Vec<_>, _>>()
        }
    })??;

    let mut stats = SearchStats {
        leaves_total: tree.leaf_count(),
        leaves_pruned_check1: prepared.pruned_check1,
        leaves_pruned_check2: 0,
        lps_solved: bound_lps,
        wall_ms: 0,
    };
    let mut winner: Option<Candidate<'_, S::Payload>> = None;
    for r in results {
        stats.leaves_pruned_check2 += usize::from(r.skipped);
        stats.lps_solved += r.lps;
        if let Some(c) = r.found {
            if winner.as_ref().is_none_or(|w| c.value > w.value) {
                winner = Some(c);
            }
        }
    }
    let winner = winner.ok_or(SearchError::NoFeasibleLeaf)?;
    let witness = scale_invariant_witness(tree, spec, &winner, cfg);
    stats.wall_ms = started.elapsed().as_millis();
    Ok(build_report(tree, spec, Alpha::Exact(winner.value.clone()), witness, winner.leaf, stats))
}

/// Solves the closure first and checks the open region only when the value
/// would raise both the leaf's and the global best.
fn improve<'t, P>(
    p: &Polyhedron,
    c: &[Rational],
    leaf: &'t Leaf<P>,
    local: Option<&Candidate<'t, P>>,
    best: &RunningBest,
) -> Option<Candidate<'t, P>> {
    if p.is_trivially_empty() {
        return None;
    }
    match solve_closed(&p.closure(), c) {
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded { direction, .. } => {
            let Feasibility::Feasible { point } = feasible_open(p) else { return None };
            Some(Candidate {
                value: ExtRational::PosInf,
                leaf,
                outcome: SupOutcome::Unbounded { point, direction },
            })
        }
        LpOutcome::Optimal { point, value } => {
            let v = ExtRational::Finite(value.clone());
            if local.is_some_and(|l| v <= l.value) || best.dominates(&v) {
                return None;
            }
            let Feasibility::Feasible { point: anchor } = feasible_open(p) else { return None };
            best.offer(&value);
            let attained_point = attaining_point(p, c, &value, &point);
            Some(Candidate {
                value: v,
                leaf,
                outcome: SupOutcome::Sup {
                    value,
                    attained: attained_point.is_some(),
                    attained_point,
                    interior_anchor: anchor,
                    closure_optimum: point,
                },
            })
        }
    }
}

/// An attaining point when one is known, otherwise a point of the region whose
/// ratio is within `epsilon` of the supremum.
fn scale_invariant_witness<S: ProblemSpec>(
    tree: &DecisionTree<S::Payload>,
    spec: &S,
    cand: &Candidate<'_, S::Payload>,
    cfg: &SearchConfig,
) -> Vec<Rational> {
    match &cand.outcome {
        SupOutcome::Unbounded { point, .. } => point.clone(),
        SupOutcome::Infeasible => unreachable!("candidates come from nonempty regions"),
        SupOutcome::Sup { attained_point: Some(x), .. } => x.clone(),
        SupOutcome::Sup { value, interior_anchor, closure_optimum, .. } => {
            // The closure optimum lies outside this leaf, but may still realize
            // the supremum through the leaf the algorithm actually takes there.
            if tree.base_region().iter().all(|c| c.holds_at(closure_optimum)) {
                if let Some(alg) = super::algorithm_at(tree, spec, closure_optimum) {
                    let (r, _) = super::ratio_at(spec, closure_optimum, &alg);
                    if r == ExtRational::Finite(value.clone()) {
                        return closure_optimum.clone();
                    }
                }
            }
            // The leaf cost at the anchor bounds how far the interpolant can fall.
            let z = spec.leaf_output(&cand.leaf.output);
            let anchor_cost = spec.cost_at(interior_anchor, &z);
            let gap = match anchor_cost {
                ExtRational::Finite(a) if &a < value => value - a,
                _ => Rational::one(),
            };
            let eps = if gap > Rational::one() { &cfg.epsilon / gap } else { cfg.epsilon.clone() };
            cand.outcome.epsilon_point(&eps).expect("finite supremum")
        }
    }
}

/// Worst ratio for costs constant on each piece: every nonempty combination of
/// leaf, leaf-cost piece and optimal-cost piece has a fixed ratio.
pub(crate) fn constant_cost<S: ProblemSpec>(
    tree: &DecisionTree<S::Payload>,
    spec: &S,
    cfg: &SearchConfig,
) -> Result<HardExampleReport<S::Output>, SearchError> {
    let started = Instant::now();
    let prepared = prepare(tree, spec, cfg)?;
    let zs = spec.candidate_outputs();
    let star_pieces: Vec<Vec<CostPiece>> = zs.iter().map(|z| spec.cost_pieces(z)).collect();
    let implied = spec.implied_constraints();
    let n = spec.dim();
    let best = RunningBest::new();
    let one = ExtRational::Finite(Rational::one());

    let constant = |e: &LinExpr| -> Result<ExtRational, SearchError> {
        if e.is_constant() {
            Ok(e.constant_term().clone())
        } else {
            Err(SearchError::AffineCost(e.to_string()))
        }
    };

    let solve_leaf = |leaf: &&Leaf<S::Payload>| -> Result<(u64, Option<Valued>), SearchError> {
        let before = solve_count();
        let region = tree.leaf_region(leaf);
        let pieces = spec.cost_pieces(&spec.leaf_output(&leaf.output));
        let mut found: Option<Valued> = None;
        for i in leaf_piece_indices(spec, &leaf.output, pieces.len(), cfg) {
            let piece = &pieces[i];
            let cl = constant(&piece.cost)?;
            let mut base = piece_polyhedron(n, &[&implied, &piece.region]);
            base.extend(region.constraints());
            for star in star_pieces.iter().flatten() {
                let cs = constant(&star.cost)?;
                let Some(r) = cl.checked_div(&cs) else { continue };
                let r = if cl.is_zero() && cs.is_zero() { one.clone() } else { r };
                if found.as_ref().is_some_and(|(v, _)| r <= *v) || best.dominates(&r) {
                    continue;
                }
                if let Feasibility::Feasible { point } = feasible_open(&base.with(&star.region)) {
                    if let Some(v) = r.finite() {
                        best.offer(v);
                    }
                    found = Some((r, point));
                }
            }
        }
        Ok((solve_count() - before, found))
    };

    let results = with_pool(cfg.workers, || {
        if cfg.workers <= 1 {
            prepared.leaves.iter().map(solve_leaf).collect::<Result<Vec<_>, _>>()
        } else {
            prepared.leaves.par_iter().map(solve_leaf).collect::<Result<Vec<_>, _>>()
        }
    })??;

    let mut stats = SearchStats {
        leaves_total: tree.leaf_count(),
        leaves_pruned_check1: prepared.pruned_check1,
        ..SearchStats::default()
    };
    let mut winner: Option<(Valued, &Leaf<S::Payload>)> = None;
    for ((lps, found), leaf) in results.into_iter().zip(&prepared.leaves) {
        stats.lps_solved += lps;
        if let Some(found) = found {
            if winner.as_ref().is_none_or(|((w, _), _)| found.0 > *w) {
                winner = Some((found, leaf));
            }
        }
    }
    let ((value, witness), leaf) = winner.ok_or(SearchError::NoFeasibleLeaf)?;
    stats.wall_ms = started.elapsed().as_millis();
    Ok(build_report(tree, spec, Alpha::Exact(value), witness, leaf, stats))
}
