use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graph::{Edge, Instance};
use crate::levels::{preprocess, Preprocessed};

fn ready(instance: Instance) -> LevelDecomposition {
    match preprocess(&instance).unwrap() {
        Preprocessed::Ready(d) => d,
        other => panic!("expected a ready decomposition, got {other:?}"),
    }
}

/// Path 0-1-2-3 of fixed weight-2 edges; a = 0-1 and b = 2-3 at weight 1
/// and cost 2; z = 1-2 at weight 0 and cost 3.
fn worked() -> LevelDecomposition {
    ready(
        Instance::new(
            4,
            vec![
                Edge::fixed(0, 1, 2),
                Edge::fixed(1, 2, 2),
                Edge::fixed(2, 3, 2),
                Edge::new(0, 1, 1, 2),
                Edge::new(2, 3, 1, 2),
                Edge::new(1, 2, 0, 3),
            ],
            4,
        )
        .unwrap(),
    )
}

fn set(d: &LevelDecomposition, ids: &[EdgeId]) -> EdgeSet {
    EdgeSet::from_ids(d.instance().edge_count(), ids.iter().copied())
}

fn singleton(tower: &PartitionTower<'_>, level: i32, v: Vertex) -> Block {
    let b = tower.block_of(level, v);
    assert_eq!(tower.members(b), &[v]);
    b
}

#[test]
fn worked_tower_values() {
    let d = worked();
    let u = set(&d, &[3, 4, 5]);
    let tower = PartitionTower::build(&d, &u).unwrap();
    assert_eq!(tower.block_count(-1), 4);
    assert_eq!(tower.block_count(0), 4);
    assert_eq!(tower.block_count(1), 1);
    let v1 = singleton(&tower, 0, 1);
    let v0 = singleton(&tower, 0, 0);
    assert_eq!(tower.kappa(v1), 5);
    assert_eq!(tower.g(v0), 2);
    assert_eq!(tower.rho(v0).as_rational(), Some(Rational::from(1)));
    assert_eq!(tower.rho(v1).as_rational(), Some(Rational::new(2, 5)));
    assert!(tower.recursions_hold());
}

#[test]
fn worked_greedy_trace() {
    let d = worked();
    let u = set(&d, &[3, 4, 5]);
    let tower = PartitionTower::build(&d, &u).unwrap();
    let run = algorithm2(&tower, 4).unwrap();
    let expected = vec![singleton(&tower, 0, 0), singleton(&tower, 0, 3)];
    assert_eq!(run.pattern.tuples, expected);
    assert_eq!(run.removal, set(&d, &[3, 4]));
    assert_eq!(run.cost, 4);
    assert_eq!(d.val(&run.removal).unwrap(), 4);
    assert!(tower.is_efficient(&run.pattern));

    let functions = pattern_functions(&tower, &run.pattern);
    assert_eq!(functions.g_root, 4);
    assert_eq!(functions.kappa_root, 4);

    let (boosted, boosted_removal) = overbudget_pattern(&tower, &run);
    let mut expected = expected;
    expected.push(singleton(&tower, -1, 1));
    assert_eq!(boosted.tuples, expected);
    assert_eq!(d.instance().cost(&boosted_removal), 7);
    assert_eq!(pattern_functions(&tower, &boosted).g_root, 5);
    assert!(tower.is_efficient(&boosted));
}

#[test]
fn affordable_removal_is_refused() {
    let d = worked();
    let tower = PartitionTower::build(&d, &set(&d, &[3])).unwrap();
    assert_eq!(algorithm2(&tower, 4), Err(PatternError::Affordable));
}

#[test]
fn empty_pattern_is_efficient() {
    let d = worked();
    let tower = PartitionTower::build(&d, &set(&d, &[3, 4, 5])).unwrap();
    let empty = RemovalPattern::default();
    assert!(tower.is_efficient(&empty));
    let f = pattern_functions(&tower, &empty);
    assert_eq!((f.kappa_root, f.g_root), (0, 0));
}

#[test]
fn skipping_a_better_sibling_is_not_efficient() {
    let d = worked();
    let tower = PartitionTower::build(&d, &set(&d, &[3, 4, 5])).unwrap();
    // {1} is taken while the strictly more efficient {0} and {3} are not.
    let pattern = RemovalPattern::new(vec![singleton(&tower, 0, 1)]);
    assert!(!tower.is_efficient(&pattern));
    // Two incomparable deeper blocks cannot both sit under one child.
    let pattern = RemovalPattern::new(vec![singleton(&tower, -1, 1), singleton(&tower, -1, 2)]);
    assert!(!tower.is_efficient(&pattern));
}

#[test]
fn overlapping_tuples_are_rejected() {
    let d = worked();
    let tower = PartitionTower::build(&d, &set(&d, &[3, 4, 5])).unwrap();
    let a = singleton(&tower, 0, 1);
    let b = singleton(&tower, -1, 1);
    assert_eq!(
        tower.check_pattern(&RemovalPattern::new(vec![a, b])),
        Err(PatternError::Overlap(a, b))
    );
    let root = tower.root();
    assert_eq!(
        tower.check_pattern(&RemovalPattern::new(vec![root])),
        Err(PatternError::InvalidBlock(root))
    );
}

#[test]
fn single_cheap_block_when_one_child_is_too_expensive() {
    // Two U-edges of cost B each: 0-1 and 1-2 at level 0 under a fixed path.
    let d = ready(
        Instance::new(
            3,
            vec![
                Edge::fixed(0, 1, 2),
                Edge::fixed(1, 2, 2),
                Edge::new(0, 1, 1, 3),
                Edge::new(1, 2, 1, 3),
            ],
            3,
        )
        .unwrap(),
    );
    let u = set(&d, &[2, 3]);
    let tower = PartitionTower::build(&d, &u).unwrap();
    let run = algorithm2(&tower, 3).unwrap();
    // {2} does not fit on level 0; its level -1 copy touches no removal edge and is free.
    assert_eq!(run.pattern.tuples, vec![singleton(&tower, 0, 0), singleton(&tower, -1, 2)]);
    assert_eq!(run.removal, set(&d, &[2]));
}

/// Ready decompositions over a fixed top-level path with random lower edges.
fn random_decomposition(rng: &mut ChaCha8Rng) -> Option<LevelDecomposition> {
    let n = rng.gen_range(2..=7);
    let top = rng.gen_range(1..=3);
    let mut edges: Vec<Edge> = (1..n).map(|v| Edge::fixed(v - 1, v, 1 << top)).collect();
    for _ in 0..rng.gen_range(1..=12) {
        let u = rng.gen_range(0..n);
        let mut v = rng.gen_range(0..n - 1);
        if v >= u {
            v += 1;
        }
        let level = rng.gen_range(-1..top);
        let weight = if level < 0 { 0 } else { 1 << level };
        edges.push(Edge::new(u, v, weight, rng.gen_range(1..=5)));
    }
    let budget = rng.gen_range(1..=10);
    match preprocess(&Instance::new(n, edges, budget).unwrap()).unwrap() {
        Preprocessed::Ready(d) => Some(d),
        _ => None,
    }
}

fn random_subset(rng: &mut ChaCha8Rng, d: &LevelDecomposition) -> EdgeSet {
    let ids: Vec<EdgeId> = d.removable().iter().filter(|_| rng.gen_bool(0.6)).collect();
    set(d, &ids)
}

#[test]
fn fuzzed_towers_satisfy_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 300 {
        let Some(d) = random_decomposition(&mut rng) else {
            continue;
        };
        let u = random_subset(&mut rng, &d);
        let tower = PartitionTower::build(&d, &u).unwrap();
        let p = tower.top();
        let root = tower.root();
        assert!(tower.recursions_hold());
        assert_eq!(tower.g(root) - pow2(p as u32 + 1), d.val(&u).unwrap());
        assert_eq!(tower.kappa(root), 2 * d.instance().cost(&u));
        assert_eq!(tower.g_from_counts(root), tower.g(root));
        checked += 1;
    }
}

#[test]
fn fuzzed_greedy_patterns_satisfy_analysis_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut checked = 0;
    while checked < 300 {
        let Some(d) = random_decomposition(&mut rng) else {
            continue;
        };
        let u = random_subset(&mut rng, &d);
        let budget = d.instance().budget();
        let cost_u = d.instance().cost(&u);
        if cost_u <= budget {
            continue;
        }
        let tower = PartitionTower::build(&d, &u).unwrap();
        let p = tower.top();
        let run = algorithm2(&tower, budget).unwrap();
        assert!(run.cost <= budget);
        assert_eq!(d.instance().cost(&run.removal), run.cost);
        assert!(tower.is_efficient(&run.pattern));
        assert!(tower.pattern_recursions_hold(&run.pattern));
        assert!(tower.block_bound_holds(&run.pattern));

        let root = tower.root();
        let f = pattern_functions(&tower, &run.pattern);
        assert!(f.kappa_root >= run.cost);
        assert_eq!(tower.pattern_g_from_covered(&run.pattern, root), f.g_root);
        let val_r = d.val(&run.removal).unwrap() as i128;
        let val_u = d.val(&u).unwrap() as i128;
        assert!(val_r >= f.g_root as i128 - (1 << (p - 1)));

        let share = |x: u64| Rational::new(x as i128 * val_u, 2 * cost_u as i128);
        assert!(Rational::from(f.g_root as i128) >= share(run.cost) - Rational::from(1i128 << p));
        assert!(Rational::from(val_r) >= share(run.cost) - Rational::from(3i128 << (p - 1)));
        assert!(Rational::from(val_r) >= share(budget) - Rational::from(1i128 << (p + 1)));

        let (boosted, boosted_removal) = overbudget_pattern(&tower, &run);
        assert!(d.instance().cost(&boosted_removal) > budget);
        assert!(tower.is_efficient(&boosted));
        assert!(tower.block_bound_holds(&boosted));
        let g_boosted = pattern_functions(&tower, &boosted).g_root;
        let step = run.steps.iter().rev().find(|s| s.taken < s.order.len()).unwrap();
        let bump = if step.level < 0 { 1 } else { pow2(step.level as u32) };
        assert_eq!(g_boosted, f.g_root + bump);
        assert!(f.g_root + pow2(p as u32 - 1) >= g_boosted);
        checked += 1;
    }
}

#[test]
fn audit_of_worked_instance() {
    let d = worked();
    let tower = PartitionTower::build(&d, &set(&d, &[3, 4, 5])).unwrap();
    let report = audit(&tower, 4);
    assert!(report.all_hold());
    let greedy = report.greedy.unwrap();
    assert_eq!((greedy.cost, greedy.value), (4, 4));
    let affordable = PartitionTower::build(&d, &set(&d, &[3])).unwrap();
    let report = audit(&affordable, 4);
    assert!(report.value_identity && report.cost_identity && report.greedy.is_none());
}
