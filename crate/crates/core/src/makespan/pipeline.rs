use num_traits::Zero;
use thiserror::Error;

use super::{Assignment, LptProgram, LptSpec};
use crate::rational::{ExtRational, Rational};
use crate::search::{
    binary_search_ratio, build_report, compute_ratio, Alpha, HardExampleReport, ProblemSpec,
    SearchConfig, SearchError, SearchStats,
};
use crate::trace::{build_tree, DecisionTree, TraceConfig, TraceError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// LPT decision tree over sorted job sizes. With `annotate_max` each leaf also
/// records the most loaded machine, which splits some leaves further.
pub fn lpt_tree(
    m: usize,
    n: usize,
    annotate_max: bool,
    cfg: &TraceConfig,
) -> Result<DecisionTree<Assignment>, TraceError> {
    let spec = LptSpec::new(m, n);
    build_tree(&LptProgram { m, n, annotate_max }, &spec.base_region(), cfg)
}

/// Exact worst-case ratio of LPT for `n` jobs on `m` machines.
///
/// check1 keeps only inputs whose last job lands on the most loaded machine.
/// Any other input can lose its trailing jobs without changing LPT's makespan
/// while the optimum can only drop, so its ratio is matched by some shorter
/// input that check1 keeps. With check1 on, sizes `1..=n` are therefore all
/// searched and the best witness is padded with zero-size jobs, which change
/// neither makespan.
pub fn lpt_ratio(
    m: usize,
    n: usize,
    trace: &TraceConfig,
    search: &SearchConfig,
) -> Result<HardExampleReport<Vec<usize>>, PipelineError> {
    let started = std::time::Instant::now();
    let spec = LptSpec::new(m, n);
    let tree = lpt_tree(m, n, search.check1, trace)?;
    if !search.check1 {
        return Ok(compute_ratio(&tree, &spec, search)?);
    }
    let mut stats = SearchStats::default();
    let mut best: Option<HardExampleReport<Vec<usize>>> = None;
    for k in 1..=n {
        let sub_spec = LptSpec::new(m, k);
        let sub_tree = if k == n { tree.clone() } else { lpt_tree(m, k, true, trace)? };
        let report = match compute_ratio(&sub_tree, &sub_spec, search) {
            Ok(r) => r,
            Err(SearchError::NoFeasibleLeaf) => continue,
            Err(e) => return Err(e.into()),
        };
        stats.leaves_total += report.stats.leaves_total;
        stats.leaves_pruned_check1 += report.stats.leaves_pruned_check1;
        stats.leaves_pruned_check2 += report.stats.leaves_pruned_check2;
        stats.lps_solved += report.stats.lps_solved;
        if best.as_ref().is_none_or(|b| alpha_key(&report) > alpha_key(b)) {
            best = Some(report);
        }
    }
    let best = best.ok_or(SearchError::NoFeasibleLeaf)?;
    let mut witness = best.witness.clone();
    witness.resize(n, Rational::zero());
    let leaf = tree.leaves().next().expect("trees have at least one leaf");
    stats.wall_ms = started.elapsed().as_millis();
    Ok(build_report(&tree, &spec, best.alpha, witness, leaf, stats))
}

fn alpha_key(r: &HardExampleReport<Vec<usize>>) -> ExtRational {
    match &r.alpha {
        Alpha::Exact(a) => a.clone(),
        Alpha::Interval { lo, .. } => lo.clone().into(),
    }
}

/// Bisection on the unannotated tree (check1 is not applied).
pub fn lpt_ratio_bisect(
    m: usize,
    n: usize,
    lo: Rational,
    hi: Rational,
    tol: Rational,
    trace: &TraceConfig,
    search: &SearchConfig,
) -> Result<HardExampleReport<Vec<usize>>, PipelineError> {
    let spec = LptSpec::new(m, n);
    let tree = lpt_tree(m, n, false, trace)?;
    let cfg = SearchConfig { check1: false, ..search.clone() };
    Ok(binary_search_ratio(&tree, &spec, lo, hi, tol, &cfg)?)
}
