use crate::graph::EdgeSet;
use crate::pareto::Rational;

use super::{algorithm2, overbudget_pattern, pattern_functions, PartitionTower};

/// Identities and bounds checked for one removal set `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Audit {
    /// `g_p(V) - 2^{p+1} = val(U)`.
    pub value_identity: bool,
    /// `κ_p(V) = 2 c(U)`.
    pub cost_identity: bool,
    /// Present when `c(U)` exceeds the budget.
    pub greedy: Option<GreedyAudit>,
}

/// Bounds on the greedy pattern built from an over-budget `U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyAudit {
    pub removal: EdgeSet,
    pub cost: u64,
    pub value: u64,
    pub efficient: bool,
    /// `κ^W_p(V) ≥ c(R)`.
    pub cost_cover: bool,
    /// `val(R) ≥ g^W_p(V) - 2^{p-1}`.
    pub pattern_value: bool,
    /// The per-block ratio bound at every block with positive `κ`.
    pub block_bound: bool,
    /// `g^W_p(V) ≥ c(R) val(U) / (2 c(U)) - 2^p`.
    pub impact_bound: bool,
    /// `val(R) ≥ c(R) val(U) / (2 c(U)) - 3 · 2^{p-1}`.
    pub removal_bound: bool,
    /// `val(R) ≥ B val(U) / (2 c(U)) - 2^{p+1}`.
    pub budget_bound: bool,
    /// The pattern extended by one block costs more than `B`.
    pub booster_over_budget: bool,
    /// `g^W_p(V) ≥ g^{W'}_p(V) - 2^{p-1}`.
    pub booster_gap: bool,
    /// The per-block ratio bound for the extended pattern.
    pub booster_block_bound: bool,
}

impl GreedyAudit {
    pub fn all_hold(&self) -> bool {
        self.efficient
            && self.cost_cover
            && self.pattern_value
            && self.block_bound
            && self.impact_bound
            && self.removal_bound
            && self.budget_bound
            && self.booster_over_budget
            && self.booster_gap
            && self.booster_block_bound
    }
}

impl Audit {
    pub fn all_hold(&self) -> bool {
        self.value_identity && self.cost_identity && self.greedy.as_ref().is_none_or(GreedyAudit::all_hold)
    }
}

/// Checks the tower of `U` and, if `c(U) > budget`, the greedy pattern built from it.
pub fn audit(tower: &PartitionTower<'_>, budget: u64) -> Audit {
    let d = tower.decomposition();
    let u = tower.removal();
    let p = tower.top();
    let root = tower.root();
    let val_u = d.val(u).expect("tower removal is removable");
    let cost_u = d.instance().cost(u);
    let pow = |i: i32| Rational::new(1i128 << (i + 1), 2);

    let greedy = (cost_u > budget).then(|| {
        let run = algorithm2(tower, budget).expect("removal exceeds the budget");
        let f = pattern_functions(tower, &run.pattern);
        let value = d.val(&run.removal).expect("pattern removal is removable");
        let g_w = Rational::from(f.g_root as i128);
        let val_r = Rational::from(value as i128);
        let share = |x: u64| Rational::new(x as i128 * val_u as i128, 2 * cost_u as i128);
        let (booster, booster_removal) = overbudget_pattern(tower, &run);
        let g_booster = Rational::from(pattern_functions(tower, &booster).g_root as i128);
        GreedyAudit {
            efficient: tower.is_efficient(&run.pattern),
            cost_cover: f.kappa_root >= run.cost,
            pattern_value: val_r >= g_w - pow(p - 1),
            block_bound: tower.block_bound_holds(&run.pattern),
            impact_bound: g_w >= share(run.cost) - pow(p),
            removal_bound: val_r >= share(run.cost) - Rational::from(3) * pow(p - 1),
            budget_bound: val_r >= share(budget) - pow(p + 1),
            booster_over_budget: d.instance().cost(&booster_removal) > budget,
            booster_gap: g_w >= g_booster - pow(p - 1),
            booster_block_bound: tower.block_bound_holds(&booster),
            cost: run.cost,
            value,
            removal: run.removal,
        }
    });
    Audit {
        value_identity: tower.g(root) as i128 - (1i128 << (p + 1)) == val_u as i128,
        cost_identity: tower.kappa(root) == 2 * cost_u,
        greedy,
    }
}
