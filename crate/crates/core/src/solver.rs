//! The approximation pipeline and an exhaustive reference solver.

use std::fmt;

use thiserror::Error;

use crate::graph::{self, Disconnected, EdgeId, EdgeSet, Instance};
use crate::levels::{prepare, round_weights, LevelDecomposition, PreprocessError, Stage};
use crate::pareto::{extreme_supported_tuples, locate_budget, nu_star, BudgetCase, FrontPoint, Rational};
use crate::patterns::{algorithm2, PartitionTower};
use crate::sfm::{Backend, SfmError};

/// Factor guaranteed against the optimum of the rounded instance.
pub const ROUNDED_GUARANTEE: u64 = 7;
/// Factor guaranteed against the optimum of the input instance.
pub const ORIGINAL_GUARANTEE: u64 = 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Minimization(#[from] SfmError),
}

/// Which way the budget met the trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// No interdiction set changes the MST weight.
    Constant,
    /// The budget equals the cost of an extreme point.
    Exact,
    /// The budget covers every extreme point.
    Beyond,
    /// The budget falls strictly between two extreme points.
    Bracketed(Branch),
}

impl Case {
    pub fn number(&self) -> u8 {
        match self {
            Case::Constant => 0,
            Case::Exact => 1,
            Case::Beyond => 2,
            Case::Bracketed(_) => 3,
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Constant => write!(f, "constant"),
            Case::Bracketed(branch) => write!(f, "3/{branch}"),
            other => write!(f, "{}", other.number()),
        }
    }
}

/// The set returned when the budget is bracketed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// The cheaper bracketing extreme point was good enough.
    Cheaper,
    /// The greedy pattern built from the dearer extreme point.
    Greedy,
    /// The cheapest cut splitting a component below the top level.
    Split,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Cheaper => "cheaper",
            Branch::Greedy => "greedy",
            Branch::Split => "split",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    pub backend: Backend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Interdiction set, as ids of the input instance.
    pub removal: EdgeSet,
    pub cost: u64,
    /// MST weight of the rounded instance after the removal.
    pub rounded_value: u64,
    /// MST weight of the input instance after the removal.
    pub original_value: u64,
    /// Upper bound on the rounded optimum, when the budget is bracketed.
    pub nu_star: Option<Rational>,
    pub case: Case,
    /// Bracketing extreme points, as ids of the input instance.
    pub witnesses: Option<(EdgeSet, EdgeSet)>,
    pub rounded_guarantee: u64,
    pub original_guarantee: u64,
}

/// Rounds, preprocesses, computes the trade-off curve and picks an interdiction set.
pub fn solve(instance: &Instance, options: SolveOptions) -> Result<SolveReport, SolveError> {
    let (rounded, certificate) = round_weights(instance);
    let prepared = prepare(&rounded)?;
    let universe = instance.edge_count();

    let (removal, case, nu, witnesses) = match &prepared.stage {
        Stage::Constant => (EdgeSet::new(universe), Case::Constant, None, None),
        Stage::Ready(d) => {
            let front = extreme_supported_tuples(d, options.backend)?;
            let budget = instance.budget();
            let lift = |set: &EdgeSet| prepared.lift(set, universe);
            match locate_budget(&front, budget) {
                BudgetCase::Exact(i) => (lift(&front.points[i].witness), Case::Exact, None, None),
                BudgetCase::Beyond => (
                    lift(&front.points.last().expect("nonempty front").witness),
                    Case::Beyond,
                    None,
                    None,
                ),
                BudgetCase::Between(i, j) => {
                    let (low, high) = (&front.points[i], &front.points[j]);
                    let working_nu = nu_star((low.cost, low.value), (high.cost, high.value), budget);
                    let (set, branch) = algorithm1(d, low, high, working_nu, budget);
                    let scale = Rational::from(1i128 << d.shift());
                    let nu = working_nu / scale + Rational::from(prepared.offset as i128);
                    (
                        lift(&set),
                        Case::Bracketed(branch),
                        Some(nu),
                        Some((lift(&low.witness), lift(&high.witness))),
                    )
                }
            }
        }
    };

    let kept = instance.all_edges().difference(&removal);
    let rounded_value = graph::mst_weight(&rounded, &kept).expect("interdiction sets never disconnect");
    let original = certificate.restore(&rounded);
    let original_value = graph::mst_weight(&original, &kept).expect("interdiction sets never disconnect");
    Ok(SolveReport {
        cost: instance.cost(&removal),
        removal,
        rounded_value,
        original_value,
        nu_star: nu,
        case,
        witnesses,
        rounded_guarantee: ROUNDED_GUARANTEE,
        original_guarantee: ORIGINAL_GUARANTEE,
    })
}

/// Returns the cheaper bracketing point if its value reaches `ν*/7`, and the
/// better of the greedy and cheapest-split sets for the dearer point otherwise.
pub fn algorithm1(
    decomposition: &LevelDecomposition,
    low: &FrontPoint,
    high: &FrontPoint,
    nu: Rational,
    budget: u64,
) -> (EdgeSet, Branch) {
    if Rational::from(ROUNDED_GUARANTEE as i128 * low.value as i128) >= nu {
        return (low.witness.clone(), Branch::Cheaper);
    }
    best_of_two(decomposition, &high.witness, budget)
}

/// The better of the greedy pattern set for `removal` and the cheapest split
/// below the top level. `removal` must exceed the budget.
pub fn best_of_two(decomposition: &LevelDecomposition, removal: &EdgeSet, budget: u64) -> (EdgeSet, Branch) {
    let tower = PartitionTower::build(decomposition, removal).expect("front witnesses are removable");
    let greedy = algorithm2(&tower, budget).expect("removal set exceeds the budget").removal;
    let split = decomposition
        .cheapest_split()
        .expect("a ready decomposition has an affordable split")
        .edges;
    let value = |set: &EdgeSet| decomposition.val(set).expect("removable");
    if value(&split) > value(&greedy) {
        (split, Branch::Split)
    } else {
        (greedy, Branch::Greedy)
    }
}

/// Largest number of interdictable edges [`exact_opt`] accepts by default.
pub const EXACT_LIMIT: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("{count} interdictable edges exceed the enumeration limit of {limit}")]
    TooLarge { count: usize, limit: usize },
    #[error("the affordable set {removal:?} disconnects the graph")]
    Disconnects { removal: EdgeSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOptimum {
    pub removal: EdgeSet,
    pub value: u64,
}

/// Maximum MST weight after removing an affordable set, by enumeration.
/// Ties go to the lexicographically smallest sorted id sequence.
pub fn exact_opt(instance: &Instance, limit: usize) -> Result<ExactOptimum, ExactError> {
    let candidates: Vec<EdgeId> = instance.interdictable_edges().iter().collect();
    exact_opt_over(instance, &candidates, limit)
}

/// [`exact_opt`] restricted to removals drawn from `candidates`.
pub fn exact_opt_over(
    instance: &Instance,
    candidates: &[EdgeId],
    limit: usize,
) -> Result<ExactOptimum, ExactError> {
    if candidates.len() > limit {
        return Err(ExactError::TooLarge {
            count: candidates.len(),
            limit,
        });
    }
    let mut order: Vec<EdgeId> = (0..instance.edge_count()).collect();
    order.sort_by_key(|&id| (instance.edge(id).weight, id));
    let mut search = Search {
        instance,
        order,
        candidates: candidates.to_vec(),
        chosen: Vec::new(),
        removed: vec![false; instance.edge_count()],
        best: None,
    };
    search.visit(0, 0)?;
    let (value, ids) = search.best.expect("the empty set is always feasible");
    Ok(ExactOptimum {
        removal: EdgeSet::from_ids(instance.edge_count(), ids),
        value,
    })
}

struct Search<'a> {
    instance: &'a Instance,
    order: Vec<EdgeId>,
    candidates: Vec<EdgeId>,
    chosen: Vec<EdgeId>,
    removed: Vec<bool>,
    best: Option<(u64, Vec<EdgeId>)>,
}

impl Search<'_> {
    fn visit(&mut self, next: usize, cost: u64) -> Result<(), ExactError> {
        if next == self.candidates.len() {
            return self.record();
        }
        let id = self.candidates[next];
        let c = self.instance.edge(id).cost.expect("candidates are interdictable");
        if cost + c <= self.instance.budget() {
            self.chosen.push(id);
            self.removed[id] = true;
            self.visit(next + 1, cost + c)?;
            self.removed[id] = false;
            self.chosen.pop();
        }
        self.visit(next + 1, cost)
    }

    fn record(&mut self) -> Result<(), ExactError> {
        let value = self.mst().map_err(|_| ExactError::Disconnects {
            removal: EdgeSet::from_ids(self.instance.edge_count(), self.chosen.iter().copied()),
        })?;
        let mut ids = self.chosen.clone();
        ids.sort_unstable();
        let better = match &self.best {
            None => true,
            Some((v, b)) => value > *v || (value == *v && ids < *b),
        };
        if better {
            self.best = Some((value, ids));
        }
        Ok(())
    }

    fn mst(&self) -> Result<u64, Disconnected> {
        let mut sets = graph::DisjointSets::new(self.instance.vertex_count());
        let mut total = 0u64;
        for &id in &self.order {
            if self.removed[id] {
                continue;
            }
            let e = self.instance.edge(id);
            if sets.union(e.u, e.v) {
                total += e.weight;
                if sets.count() == 1 {
                    return Ok(total);
                }
            }
        }
        if sets.count() == 1 {
            Ok(total)
        } else {
            Err(Disconnected)
        }
    }
}
