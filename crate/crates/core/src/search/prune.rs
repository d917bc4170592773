use std::sync::Mutex;

use rayon::prelude::*;

use super::{leaf_piece_indices, piece_polyhedron, ProblemSpec, SearchConfig, SearchError};
use crate::lp::{sup_open, SupOutcome};
use crate::rational::{ExtRational, Rational};
use crate::trace::{DecisionTree, Leaf};

/// Drops leaves that check1 rules out; fails if any payload lacks its annotation.
pub fn prune_check1<'t, S: ProblemSpec>(
    leaves: Vec<&'t Leaf<S::Payload>>,
    spec: &S,
) -> Result<Vec<&'t Leaf<S::Payload>>, SearchError> {
    let mut kept = Vec::with_capacity(leaves.len());
    for leaf in leaves {
        if spec.check1_keep(&leaf.output)? {
            kept.push(leaf);
        }
    }
    Ok(kept)
}

/// Largest ratio value found so far. Only ever increases.
#[derive(Debug, Default)]
pub struct RunningBest(Mutex<Option<Rational>>);

impl RunningBest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self) -> Option<Rational> {
        self.0.lock().expect("running best poisoned").clone()
    }

    /// Raises the value to `v` if larger; returns whether it changed.
    pub fn offer(&self, v: &Rational) -> bool {
        let mut g = self.0.lock().expect("running best poisoned");
        if g.as_ref().is_none_or(|b| v > b) {
            *g = Some(v.clone());
            true
        } else {
            false
        }
    }

    /// `v` cannot beat the current value.
    pub fn dominates(&self, v: &ExtRational) -> bool {
        match (self.get(), v) {
            (_, ExtRational::NegInf) => true,
            (Some(b), ExtRational::Finite(g)) => *g <= b,
            _ => false,
        }
    }
}

/// A leaf with an upper bound on every ratio reachable inside it.
#[derive(Debug)]
pub struct LeafBound<'t, P> {
    pub leaf: &'t Leaf<P>,
    /// `-inf` when the relaxed leaf region is empty.
    pub gamma: ExtRational,
}

impl<P> Clone for LeafBound<'_, P> {
    fn clone(&self) -> Self {
        Self { leaf: self.leaf, gamma: self.gamma.clone() }
    }
}

/// Bounds each leaf by `sup c(x, z_ℓ)` over the leaf region intersected with
/// the problem's relaxation of `c(x, z*) <= 1`, sorted by decreasing bound
/// (ties keep tree order). `None` when the problem offers no relaxation.
pub fn leaf_bounds<'t, S: ProblemSpec>(
    tree: &DecisionTree<S::Payload>,
    spec: &S,
    leaves: &[&'t Leaf<S::Payload>],
    cfg: &SearchConfig,
) -> Option<Vec<LeafBound<'t, S::Payload>>> {
    let relax = spec.relaxation()?;
    let implied = spec.implied_constraints();
    let n = spec.dim();
    let mut bounds: Vec<LeafBound<'t, S::Payload>> = leaves
        .par_iter()
        .map(|leaf| {
            let region = tree.leaf_region(leaf);
            let z = spec.leaf_output(&leaf.output);
            let pieces = spec.cost_pieces(&z);
            let mut gamma = ExtRational::NegInf;
            for i in leaf_piece_indices(spec, &leaf.output, pieces.len(), cfg) {
                let piece = &pieces[i];
                let mut p = piece_polyhedron(n, &[&implied, &piece.region, &relax]);
                p.extend(region.constraints());
                let c = piece.cost.dense(n);
                let offset = piece.cost.constant_term().clone();
                let v = match sup_open(&p, &c) {
                    SupOutcome::Infeasible => ExtRational::NegInf,
                    SupOutcome::Unbounded { .. } => ExtRational::PosInf,
                    SupOutcome::Sup { value, .. } => ExtRational::Finite(value)
                        .checked_add(&offset)
                        .unwrap_or(ExtRational::PosInf),
                };
                gamma = gamma.max(v);
            }
            LeafBound { leaf: *leaf, gamma }
        })
        .collect();
    bounds.sort_by(|a, b| b.gamma.cmp(&a.gamma));
    Some(bounds)
}

/// Keeps the leaves whose bound exceeds the running best.
pub fn prune_check2<'t, P>(
    bounds: Vec<LeafBound<'t, P>>,
    best: &RunningBest,
) -> Vec<LeafBound<'t, P>> {
    bounds.into_iter().filter(|b| !best.dominates(&b.gamma)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn running_best_is_monotone() {
        let b = RunningBest::new();
        assert!(b.offer(&int(2)));
        assert!(!b.offer(&int(1)));
        assert!(!b.offer(&int(2)));
        assert_eq!(b.get(), Some(int(2)));
        assert!(b.dominates(&ExtRational::NegInf));
        assert!(b.dominates(&int(2).into()));
        assert!(!b.dominates(&ExtRational::PosInf));
    }

    #[test]
    fn check2_drops_empty_and_dominated_leaves() {
        let leaf = Leaf { id: 0, output: (), path: vec![] };
        let mk = |g: ExtRational| LeafBound { leaf: &leaf, gamma: g };
        let best = RunningBest::new();
        best.offer(&int(3));
        let kept = prune_check2(
            vec![mk(int(5).into()), mk(int(3).into()), mk(ExtRational::NegInf), mk(int(4).into())],
            &best,
        );
        let gammas: Vec<_> = kept.iter().map(|b| b.gamma.clone()).collect();
        assert_eq!(gammas, vec![int(5).into(), int(4).into()]);
        let empty = RunningBest::new();
        assert_eq!(prune_check2(vec![mk(ExtRational::NegInf)], &empty).len(), 0);
    }
}
