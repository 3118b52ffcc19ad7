//! Extreme supported points of the (cost, value) trade-off.
//!
//! For `λ ≥ 0` the function `U ↦ λ·c(U) − val(U)` is submodular on the
//! removable edges. Its minimizers, as `λ` sweeps from large to zero, trace the
//! vertices of the upper concave envelope of all `(c(U), val(U))` pairs. The
//! driver finds them by recursive slope bisection between known vertices.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::graph::{EdgeId, EdgeSet};
use crate::levels::LevelDecomposition;
use crate::sfm::{self, Backend, SetFunction, SfmError};

pub type Rational = Ratio<i128>;

/// `U ↦ λ·c(U) − val(U)` over the removable edges of a decomposition.
pub struct ParametricObjective<'a> {
    decomposition: &'a LevelDecomposition,
    ground: Vec<EdgeId>,
    costs: Vec<i128>,
}

impl<'a> ParametricObjective<'a> {
    pub fn new(decomposition: &'a LevelDecomposition) -> Self {
        let ground = decomposition.removable().to_vec();
        let instance = decomposition.instance();
        let costs = ground
            .iter()
            .map(|&id| instance.edge(id).cost.expect("removable edges are interdictable") as i128)
            .collect();
        Self {
            decomposition,
            ground,
            costs,
        }
    }

    /// Removable edge ids; ground element `i` is `ground()[i]`.
    pub fn ground(&self) -> &[EdgeId] {
        &self.ground
    }

    pub fn decomposition(&self) -> &LevelDecomposition {
        self.decomposition
    }

    /// The objective at `λ`, scaled by the denominator of `λ` to stay integral.
    pub fn at(&self, lambda: Rational) -> ScaledObjective<'_, 'a> {
        assert!(!lambda.is_negative(), "λ must be nonnegative");
        ScaledObjective {
            parent: self,
            num: *lambda.numer(),
            den: *lambda.denom(),
        }
    }

    pub fn to_members(&self, set: &EdgeSet) -> Vec<bool> {
        self.ground.iter().map(|&id| set.contains(id)).collect()
    }

    pub fn to_edge_set(&self, members: &[bool]) -> EdgeSet {
        EdgeSet::from_ids(
            self.decomposition.instance().edge_count(),
            self.ground
                .iter()
                .zip(members)
                .filter(|(_, &m)| m)
                .map(|(&id, _)| id),
        )
    }
}

/// `num·c(U) − den·val(U)` for `λ = num/den`.
pub struct ScaledObjective<'p, 'a> {
    parent: &'p ParametricObjective<'a>,
    num: i128,
    den: i128,
}

impl ScaledObjective<'_, '_> {
    pub fn lambda(&self) -> Rational {
        Rational::new(self.num, self.den)
    }

    /// The unscaled value `λ·c(U) − val(U)` for a scaled value.
    pub fn unscale(&self, scaled: i128) -> Rational {
        Rational::new(scaled, self.den)
    }
}

impl SetFunction for ScaledObjective<'_, '_> {
    fn ground_size(&self) -> usize {
        self.parent.ground.len()
    }

    fn eval(&self, members: &[bool]) -> i128 {
        let set = self.parent.to_edge_set(members);
        let value = self
            .parent
            .decomposition
            .val(&set)
            .expect("ground elements are removable") as i128;
        let cost: i128 = self
            .parent
            .costs
            .iter()
            .zip(members)
            .filter(|(_, &m)| m)
            .map(|(c, _)| c)
            .sum();
        self.num * cost - self.den * value
    }

    fn chain(&self, order: &[usize]) -> Vec<i128> {
        let ids: Vec<EdgeId> = order.iter().map(|&i| self.parent.ground[i]).collect();
        let values = self.parent.decomposition.chain_values(&ids);
        let mut cost = 0i128;
        let mut out = Vec::with_capacity(values.len());
        out.push(-self.den * values[0] as i128);
        for (j, &i) in order.iter().enumerate() {
            cost += self.parent.costs[i];
            out.push(self.num * cost - self.den * values[j + 1] as i128);
        }
        out
    }
}

/// A minimizer of the parametric objective at `λ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParametricMinimum {
    pub set: EdgeSet,
    /// `λ·c(set) − val(set)`.
    pub value: Rational,
}

/// The minimal minimizer of `λ·c(U) − val(U)`.
pub fn sfm_min(
    objective: &ParametricObjective<'_>,
    lambda: Rational,
    backend: Backend,
) -> Result<ParametricMinimum, SfmError> {
    let f = objective.at(lambda);
    let m = sfm::minimal_minimizer(&f, backend)?;
    Ok(ParametricMinimum {
        set: objective.to_edge_set(&m.members),
        value: f.unscale(m.value),
    })
}

/// One extreme supported point with a witness removal set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontPoint {
    pub cost: u64,
    pub value: u64,
    pub witness: EdgeSet,
}

/// Extreme supported points sorted by strictly increasing cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoFront {
    pub points: Vec<FrontPoint>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tuples(&self) -> Vec<(u64, u64)> {
        self.points.iter().map(|p| (p.cost, p.value)).collect()
    }

    pub fn is_nested(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[0].witness.is_subset(&w[1].witness))
    }
}

fn point(decomposition: &LevelDecomposition, set: EdgeSet) -> FrontPoint {
    FrontPoint {
        cost: decomposition.instance().cost(&set),
        value: decomposition.val(&set).expect("witness is removable"),
        witness: set,
    }
}

/// All extreme supported points of the decomposition's removal problem.
pub fn extreme_supported_tuples(
    decomposition: &LevelDecomposition,
    backend: Backend,
) -> Result<ParetoFront, SfmError> {
    let objective = ParametricObjective::new(decomposition);
    let full = decomposition.removable().clone();
    let lambda_max = Rational::from(decomposition.val(&full).expect("removable") as i128 + 1);
    let first = sfm_min(&objective, lambda_max, backend)?;
    let last = sfm_min(&objective, Rational::zero(), backend)?;
    let first = point(decomposition, first.set);
    let last = point(decomposition, last.set);
    if first.value == last.value {
        return Ok(ParetoFront {
            points: vec![first],
        });
    }

    let mut done = vec![first];
    let mut pending = vec![last];
    // `done` ends with the left end of the current segment, `pending` holds
    // the remaining vertices to its right, nearest last.
    while let Some(right) = pending.pop() {
        let left = done.last().expect("nonempty");
        let lambda = Rational::new(
            right.value as i128 - left.value as i128,
            right.cost as i128 - left.cost as i128,
        );
        let line = lambda * Rational::from(left.cost as i128) - Rational::from(left.value as i128);
        let found = sfm_min(&objective, lambda, backend)?;
        if found.value < line {
            pending.push(right);
            pending.push(point(decomposition, found.set));
        } else {
            done.push(right);
        }
    }
    Ok(ParetoFront { points: done })
}

/// Where the budget falls relative to the front.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetCase {
    /// Some point has cost exactly `B`.
    Exact(usize),
    /// `B` exceeds every cost on the front.
    Beyond,
    /// Consecutive points with `c(U_1) < B < c(U_2)`.
    Between(usize, usize),
}

pub fn locate_budget(front: &ParetoFront, budget: u64) -> BudgetCase {
    assert!(!front.is_empty(), "front is never empty");
    if let Some(i) = front.points.iter().position(|p| p.cost == budget) {
        return BudgetCase::Exact(i);
    }
    match front.points.iter().position(|p| p.cost > budget) {
        None => BudgetCase::Beyond,
        Some(0) => unreachable!("the first point has cost 0"),
        Some(j) => BudgetCase::Between(j - 1, j),
    }
}

/// Interpolated value on the segment between two points at cost `budget`.
pub fn nu_star(low: (u64, u64), high: (u64, u64), budget: u64) -> Rational {
    let (c1, v1) = (low.0 as i128, low.1 as i128);
    let (c2, v2) = (high.0 as i128, high.1 as i128);
    let b = budget as i128;
    assert!(c1 < b && b < c2, "budget must lie strictly between the costs");
    Rational::from(v1) + Rational::new((b - c1) * (v2 - v1), c2 - c1)
}
