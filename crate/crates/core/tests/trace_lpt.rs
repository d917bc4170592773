mod common;

use common::{rand_jobs, rand_small};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use worstcase_core::makespan::{
    brute_oracle, cost_pieces, loads_at, lpt_simulate, lpt_tree, makespan_at, MakespanInstance,
};
use worstcase_core::rational::{frac, int};
use worstcase_core::trace::{run_concrete, Halt};
use worstcase_core::{
    build_tree, DecisionTree, ExtRational, LinExpr, Oracle, Rational, TraceConfig, TracedProgram,
};

fn pruned() -> TraceConfig {
    TraceConfig { prune_empty_interior: true, ..TraceConfig::default() }
}

/// Number of leaves whose region contains `x`.
fn containing_leaves<O>(tree: &DecisionTree<O>, x: &[Rational]) -> usize {
    tree.leaves().filter(|l| tree.leaf_region(l).contains(x)).count()
}

#[test]
fn routed_lpt_leaves_match_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ace_0001);
    let mut trees = std::collections::HashMap::new();
    for _ in 0..1000 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=7);
        let (full, thin) = trees.entry((m, n)).or_insert_with(|| {
            (
                lpt_tree(m, n, false, &TraceConfig::default()).unwrap(),
                lpt_tree(m, n, false, &pruned()).unwrap(),
            )
        });
        // Small denominators make ties between loads common.
        let x = rand_jobs(&mut rng, n, 3);
        let sim = lpt_simulate(&x, m);
        assert_eq!(full.route(&x).unwrap().output.z, sim.z, "x={x:?}");
        assert_eq!(containing_leaves(full, &x), 1, "x={x:?}");
        let leaf = thin.route(&x).unwrap();
        assert_eq!(makespan_at(&x, &leaf.output.z, m), makespan_at(&x, &sim.z, m), "x={x:?}");
        assert_eq!(brute_oracle(&x, m).unwrap().lpt_makespan, makespan_at(&x, &leaf.output.z, m));
    }
}

#[test]
fn annotated_max_machine_carries_the_largest_load() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ace_0002);
    for (m, n) in [(2, 5), (3, 6)] {
        let tree = lpt_tree(m, n, true, &TraceConfig::default()).unwrap();
        for _ in 0..200 {
            let x = rand_jobs(&mut rng, n, 4);
            let a = &tree.route(&x).unwrap().output;
            let loads = loads_at(&x, &a.z, m);
            let max = loads.iter().max().unwrap();
            assert_eq!(&loads[a.max_machine.unwrap() - 1], max);
            assert_eq!(a, &lpt_simulate(&x, m));
        }
    }
}

#[test]
fn cost_pieces_cover_the_input_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ace_0003);
    for _ in 0..300 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=6);
        let inst = MakespanInstance::new(m, n);
        let x = rand_jobs(&mut rng, n, 5);
        let z: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=m)).collect();
        let pieces = cost_pieces(&inst, &z);
        let hit: Vec<_> = pieces.iter().filter(|(r, _)| r.iter().all(|c| c.holds_at(&x))).collect();
        assert!(!hit.is_empty());
        for (_, cost) in hit {
            assert_eq!(cost.eval(&x), ExtRational::Finite(makespan_at(&x, &z, m)));
        }
    }
}

#[test]
fn sampled_ratios_respect_grahams_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ace_0004);
    for _ in 0..1000 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=7);
        let x = rand_jobs(&mut rng, n, 6);
        let r = brute_oracle(&x, m).unwrap();
        let bound = frac(4 * m as i64 - 1, 3 * m as i64);
        assert!(r.ratio <= ExtRational::Finite(bound), "x={x:?} m={m}");
    }
}

#[test]
fn four_leaves_for_two_machines_five_jobs() {
    let tree = lpt_tree(2, 5, false, &pruned()).unwrap();
    assert_eq!(tree.nodes().len(), 7);
    let mut zs: Vec<_> = tree.leaves().map(|l| l.output.z.clone()).collect();
    zs.sort();
    assert_eq!(zs, [[1, 2, 2, 1, 1], [1, 2, 2, 1, 2], [1, 2, 2, 2, 1], [1, 2, 2, 2, 2]]);
    let root = match &tree.nodes()[0] {
        worstcase_core::trace::TreeNode::Internal { constraint, .. } => constraint.to_string(),
        _ => panic!("root is a leaf"),
    };
    // Job 4 compares x1 against x2 + x3; either branch may be stored.
    let forms = ["x1 - x2 - x3 < 0", "-x1 + x2 + x3 <= 0", "-x1 + x2 + x3 < 0", "x1 - x2 - x3 <= 0"];
    assert!(forms.contains(&root.as_str()), "{root}");
}

/// Bubble sort of three unconstrained scalars, returning the permutation.
struct Sort3;

impl TracedProgram for Sort3 {
    type Output = String;

    fn dim(&self) -> usize {
        3
    }

    fn run(&self, x: &[LinExpr], o: &mut dyn Oracle) -> Result<String, Halt> {
        let mut idx = [0usize, 1, 2];
        for pass in 0..2 {
            for i in 0..2 - pass {
                if o.gt(&x[idx[i]], &x[idx[i + 1]])? {
                    idx.swap(i, i + 1);
                }
            }
        }
        Ok(format!("{:?}", idx))
    }
}

#[test]
fn generic_program_trace_matches_concrete_runs() {
    let tree = build_tree(&Sort3, &[], &TraceConfig::default()).unwrap();
    // Each of the 6 orderings needs its own leaf.
    assert!(tree.leaf_count() >= 6);
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ace_0005);
    for _ in 0..1000 {
        let x: Vec<Rational> = (0..3).map(|_| rand_small(&mut rng, -2, 2)).collect();
        assert_eq!(tree.route(&x).unwrap().output, run_concrete(&Sort3, &x).unwrap(), "x={x:?}");
        assert_eq!(containing_leaves(&tree, &x), 1);
    }
    assert_eq!(run_concrete(&Sort3, &[int(3), int(1), int(2)]).unwrap(), "[1, 2, 0]");
}
