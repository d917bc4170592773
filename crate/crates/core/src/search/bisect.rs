use std::time::Instant;

use num_traits::{One, Signed};
use rayon::prelude::*;

use super::report::{Alpha, HardExampleReport, SearchStats};
use super::{
    build_report, leaf_piece_indices, piece_polyhedron, prepare, with_pool, CostPiece, ProblemSpec,
    SearchConfig, SearchError,
};
use crate::lp::{feasible_open, solve_count, Feasibility};
use crate::rational::{format_rational, ExtRational, Rational};
use crate::symexpr::{Constraint, LinExpr};
use crate::trace::{DecisionTree, Leaf};

const MAX_DOUBLINGS: usize = 64;

/// First hit, if any, and the number of LPs solved.
type ProbeResult<'t, P> = (Option<Hit<'t, P>>, u64);

struct Hit<'t, P> {
    leaf: &'t Leaf<P>,
    point: Vec<Rational>,
}

/// Finds an input in some leaf whose ratio strictly exceeds `alpha`.
fn probe<'t, S: ProblemSpec>(
    tree: &DecisionTree<S::Payload>,
    spec: &S,
    leaves: &[&'t Leaf<S::Payload>],
    star_pieces: &[Vec<CostPiece>],
    alpha: &Rational,
    cfg: &SearchConfig,
) -> Result<ProbeResult<'t, S::Payload>, SearchError> {
    let implied = spec.implied_constraints();
    let n = spec.dim();
    let search_leaf = |leaf: &&'t Leaf<S::Payload>| -> (Option<Hit<'t, S::Payload>>, u64) {
        let before = solve_count();
        let region = tree.leaf_region(leaf);
        let pieces = spec.cost_pieces(&spec.leaf_output(&leaf.output));
        for i in leaf_piece_indices(spec, &leaf.output, pieces.len(), cfg) {
            let piece = &pieces[i];
            let mut base = piece_polyhedron(n, &[&implied, &piece.region]);
            base.extend(region.constraints());
            if base.is_trivially_empty() {
                continue;
            }
            for star in star_pieces.iter().flatten() {
                let Some(exceeds) = exceeds(&piece.cost, &star.cost, alpha) else { continue };
                let mut p = base.with(&star.region);
                p.extend(exceeds.iter());
                if let Feasibility::Feasible { point } = feasible_open(&p) {
                    return (Some(Hit { leaf, point }), solve_count() - before);
                }
            }
        }
        (None, solve_count() - before)
    };
    let results: Vec<_> = with_pool(cfg.workers, || {
        if cfg.workers <= 1 {
            let mut out = Vec::new();
            for leaf in leaves {
                let r = search_leaf(leaf);
                let stop = r.0.is_some();
                out.push(r);
                if stop {
                    break;
                }
            }
            out
        } else {
            leaves.par_iter().map(search_leaf).collect()
        }
    })?;
    let lps = results.iter().map(|r| r.1).sum();
    Ok((results.into_iter().find_map(|r| r.0), lps))
}

/// Constraints meaning `leaf_cost > alpha · opt_cost`, or `None` when that
/// cannot hold (both infinite, or the optimal cost infinite).
fn exceeds(leaf_cost: &LinExpr, opt_cost: &LinExpr, alpha: &Rational) -> Option<Vec<Constraint>> {
    match (leaf_cost.constant_term(), opt_cost.constant_term()) {
        (_, ExtRational::PosInf) => None,
        (ExtRational::PosInf, _) => Some(Vec::new()),
        _ => Constraint::gt(leaf_cost, &opt_cost.scale(alpha)).ok().map(|c| vec![c]),
    }
}

fn star_pieces<S: ProblemSpec>(spec: &S) -> Vec<Vec<CostPiece>> {
    spec.candidate_outputs().iter().map(|z| spec.cost_pieces(z)).collect()
}

/// Smallest `2^k` (k >= 1) that no input's ratio exceeds.
pub(crate) fn doubling_upper_bound<S: ProblemSpec>(
    tree: &DecisionTree<S::Payload>,
    spec: &S,
    cfg: &SearchConfig,
) -> Result<Rational, SearchError> {
    let prepared = prepare(tree, spec, cfg)?;
    let stars = star_pieces(spec);
    let mut hi = Rational::from_integer(2.into());
    for _ in 0..MAX_DOUBLINGS {
        if probe(tree, spec, &prepared.leaves, &stars, &hi, cfg)?.0.is_none() {
            return Ok(hi);
        }
        hi *= Rational::from_integer(2.into());
    }
    Err(SearchError::Unbounded)
}

/// Brackets the worst ratio within `tol` by bisection on `[lo, hi]`.
///
/// Requires `1 <= lo < hi` and that no input's ratio exceeds `hi`. The witness
/// is an input whose ratio exceeds the returned lower end.
pub fn binary_search_ratio<S: ProblemSpec>(
    tree: &DecisionTree<S::Payload>,
    spec: &S,
    lo: Rational,
    hi: Rational,
    tol: Rational,
    cfg: &SearchConfig,
) -> Result<HardExampleReport<S::Output>, SearchError> {
    let started = Instant::now();
    if lo < Rational::one() || lo >= hi || !tol.is_positive() {
        return Err(SearchError::InvalidBracket(format!(
            "lo={}, hi={}, tol={}",
            format_rational(&lo),
            format_rational(&hi),
            format_rational(&tol)
        )));
    }
    let prepared = prepare(tree, spec, cfg)?;
    let stars = star_pieces(spec);
    let mut stats = SearchStats {
        leaves_total: tree.leaf_count(),
        leaves_pruned_check1: prepared.pruned_check1,
        ..SearchStats::default()
    };
    let run = |alpha: &Rational, stats: &mut SearchStats| {
        let (hit, lps) = probe(tree, spec, &prepared.leaves, &stars, alpha, cfg)?;
        stats.lps_solved += lps;
        Ok::<_, SearchError>(hit)
    };

    if run(&hi, &mut stats)?.is_some() {
        return Err(SearchError::UpperBoundTooLow(format_rational(&hi)));
    }
    let (mut lo, mut hi) = (lo, hi);
    let Some(mut best) = run(&lo, &mut stats)? else {
        if lo == Rational::one() {
            // Every ratio is at least 1 and none exceeds 1.
            let leaf = prepared.leaves.first().ok_or(SearchError::NoFeasibleLeaf)?;
            let point = match feasible_open(&tree.leaf_region(leaf)) {
                Feasibility::Feasible { point } => point,
                Feasibility::Infeasible => return Err(SearchError::NoFeasibleLeaf),
            };
            stats.wall_ms = started.elapsed().as_millis();
            return Ok(build_report(tree, spec, Alpha::Exact(lo.into()), point, leaf, stats));
        }
        return Err(SearchError::InvalidBracket(format!(
            "no input has ratio above lo={}",
            format_rational(&lo)
        )));
    };
    let two = Rational::from_integer(2.into());
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / &two;
        match run(&mid, &mut stats)? {
            Some(hit) => {
                best = hit;
                lo = mid;
            }
            None => hi = mid,
        }
    }
    stats.wall_ms = started.elapsed().as_millis();
    Ok(build_report(tree, spec, Alpha::Interval { lo, hi }, best.point, best.leaf, stats))
}
