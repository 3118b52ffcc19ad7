//! Partition towers, removal patterns, and the greedy level-by-level
//! construction of an interdiction set from an over-budget removal set.
//!
//! For a removal set `U`, level `i` of the tower is the partition of `V` into
//! the components of `(V, E_{<=i} \ U)`. A removal pattern picks disjoint
//! blocks `(W, i)` and removes the `U`-edges of level at most `i` touching
//! each block, which reproduces inside `W` the effect `U` has on levels up to `i`.

mod audit;
mod dominance;

use std::cmp::Ordering;

use thiserror::Error;

use crate::graph::{self, EdgeId, EdgeSet, Vertex};
use crate::levels::{pow2, LevelDecomposition, LevelError};
use crate::pareto::Rational;

pub use audit::{audit, Audit, GreedyAudit};
pub use dominance::{prefix_dominance, DominanceError};

/// A block of the tower: the `index`-th component on `level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub level: i32,
    pub index: usize,
}

impl Block {
    pub fn new(level: i32, index: usize) -> Self {
        Self { level, index }
    }
}

/// `g / κ`, infinite when `κ = 0`, ordered by exact cross-multiplication.
#[derive(Debug, Clone, Copy)]
pub struct Efficiency {
    pub g: u64,
    pub kappa: u64,
}

impl Efficiency {
    pub fn is_infinite(&self) -> bool {
        self.kappa == 0
    }

    pub fn as_rational(&self) -> Option<Rational> {
        (!self.is_infinite()).then(|| Rational::new(self.g as i128, self.kappa as i128))
    }
}

impl Ord for Efficiency {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => {
                (self.g as u128 * other.kappa as u128).cmp(&(other.g as u128 * self.kappa as u128))
            }
        }
    }
}

impl PartialOrd for Efficiency {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Efficiency {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Efficiency {}

#[derive(Debug, Clone)]
struct Level {
    block_of: Vec<usize>,
    members: Vec<Vec<Vertex>>,
    /// Indices of child blocks on the level below.
    children: Vec<Vec<usize>>,
    kappa: Vec<u64>,
    g: Vec<u64>,
    /// `U_{<=i}` edges with an endpoint in the block.
    touching: Vec<Vec<EdgeId>>,
}

/// The partitions `A_{-1}, ..., A_p` induced by a removal set.
#[derive(Debug, Clone)]
pub struct PartitionTower<'a> {
    decomposition: &'a LevelDecomposition,
    removal: EdgeSet,
    levels: Vec<Level>,
}

impl<'a> PartitionTower<'a> {
    pub fn build(decomposition: &'a LevelDecomposition, removal: &EdgeSet) -> Result<Self, LevelError> {
        decomposition.check_removal(removal)?;
        let instance = decomposition.instance();
        let top = decomposition.top() as i32;
        let mut levels: Vec<Level> = Vec::with_capacity(top as usize + 2);
        for level in -1..=top {
            let kept = decomposition.prefix_set(level).difference(removal);
            let partition = graph::components(instance, &kept);
            let members = partition.blocks();
            let block_of: Vec<usize> = (0..instance.vertex_count())
                .map(|v| partition.block_of(v))
                .collect();
            let count = members.len();

            let mut kappa = vec![0u64; count];
            let mut touching = vec![Vec::new(); count];
            for id in removal.iter().filter(|&id| decomposition.level(id) <= level) {
                let e = instance.edge(id);
                let c = e.cost.expect("removal edges are interdictable");
                let (a, b) = (block_of[e.u], block_of[e.v]);
                kappa[a] += c;
                kappa[b] += c;
                touching[a].push(id);
                if a != b {
                    touching[b].push(id);
                }
            }

            let (children, g) = match levels.last() {
                None => (vec![Vec::new(); count], vec![1u64; count]),
                Some(below) => {
                    let mut children = vec![Vec::new(); count];
                    for (child, verts) in below.members.iter().enumerate() {
                        children[block_of[verts[0]]].push(child);
                    }
                    let g = children
                        .iter()
                        .map(|cs| {
                            cs.iter()
                                .fold(pow2(level as u32), |acc, &c| acc.checked_add(below.g[c]).expect("g overflow"))
                        })
                        .collect();
                    (children, g)
                }
            };
            levels.push(Level {
                block_of,
                members,
                children,
                kappa,
                g,
                touching,
            });
        }
        Ok(Self {
            decomposition,
            removal: removal.clone(),
            levels,
        })
    }

    fn at(&self, level: i32) -> &Level {
        &self.levels[(level + 1) as usize]
    }

    pub fn decomposition(&self) -> &'a LevelDecomposition {
        self.decomposition
    }

    pub fn removal(&self) -> &EdgeSet {
        &self.removal
    }

    pub fn top(&self) -> i32 {
        self.decomposition.top() as i32
    }

    /// The block `V` on the top level.
    pub fn root(&self) -> Block {
        debug_assert_eq!(self.block_count(self.top()), 1);
        Block::new(self.top(), 0)
    }

    pub fn block_count(&self, level: i32) -> usize {
        self.at(level).members.len()
    }

    pub fn blocks(&self, level: i32) -> impl Iterator<Item = Block> {
        (0..self.block_count(level)).map(move |i| Block::new(level, i))
    }

    /// Vertices of a block, sorted.
    pub fn members(&self, block: Block) -> &[Vertex] {
        &self.at(block.level).members[block.index]
    }

    /// The block on `level` containing `v`.
    pub fn block_of(&self, level: i32, v: Vertex) -> Block {
        Block::new(level, self.at(level).block_of[v])
    }

    /// Children of a block on the level below; empty on level `-1`.
    pub fn children(&self, block: Block) -> impl Iterator<Item = Block> + '_ {
        self.at(block.level).children[block.index]
            .iter()
            .map(move |&i| Block::new(block.level - 1, i))
    }

    /// True iff `inner` is a subset of `outer` and lies on a level not above it.
    pub fn is_within(&self, inner: Block, outer: Block) -> bool {
        inner.level <= outer.level
            && self.block_of(outer.level, self.members(inner)[0]) == outer
    }

    pub fn kappa(&self, block: Block) -> u64 {
        self.at(block.level).kappa[block.index]
    }

    pub fn g(&self, block: Block) -> u64 {
        self.at(block.level).g[block.index]
    }

    pub fn rho(&self, block: Block) -> Efficiency {
        Efficiency {
            g: self.g(block),
            kappa: self.kappa(block),
        }
    }

    /// Removal edges of level at most `block.level` with an endpoint in the block.
    pub fn touching(&self, block: Block) -> &[EdgeId] {
        &self.at(block.level).touching[block.index]
    }

    /// Greedy order: nonincreasing efficiency, then larger `g`, then smaller least vertex.
    pub fn greedy_cmp(&self, a: Block, b: Block) -> Ordering {
        self.rho(b)
            .cmp(&self.rho(a))
            .then(self.g(b).cmp(&self.g(a)))
            .then(self.members(a)[0].cmp(&self.members(b)[0]))
    }

    /// Checks the recursions `κ_i(A) >= Σ κ_{i-1}(C)` and
    /// `g_i(A) = 2^i + Σ g_{i-1}(C)` over children `C`, at every block with `i >= 0`.
    pub fn recursions_hold(&self) -> bool {
        (0..=self.top()).all(|level| {
            self.blocks(level).all(|a| {
                let kappa: u64 = self.children(a).map(|c| self.kappa(c)).sum();
                let g: u64 = self.children(a).map(|c| self.g(c)).sum();
                self.kappa(a) >= kappa && self.g(a) == pow2(level as u32) + g
            })
        })
    }

    /// `g_p(V)` computed from block counts on every level.
    pub fn g_from_counts(&self, block: Block) -> u64 {
        let mut total = 0u64;
        for level in -1..=block.level {
            let inside = self
                .blocks(level)
                .filter(|&d| self.is_within(d, block))
                .count() as u64;
            let weight = if level < 0 { 1 } else { pow2(level as u32) };
            total += weight * inside;
        }
        total
    }
}

/// Disjoint tower blocks on levels `-1..=p-1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RemovalPattern {
    pub tuples: Vec<Block>,
}

impl RemovalPattern {
    pub fn new(tuples: Vec<Block>) -> Self {
        Self { tuples }
    }

    pub fn contains(&self, block: Block) -> bool {
        self.tuples.contains(&block)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("the removal set is affordable; use it directly")]
    Affordable,
    #[error("block {0:?} is not a block of the tower below the top level")]
    InvalidBlock(Block),
    #[error("blocks {0:?} and {1:?} overlap")]
    Overlap(Block, Block),
}

impl PartitionTower<'_> {
    /// Checks that tuples are tower blocks below the top level and pairwise disjoint.
    pub fn check_pattern(&self, pattern: &RemovalPattern) -> Result<(), PatternError> {
        for &b in &pattern.tuples {
            if b.level < -1 || b.level >= self.top() || b.index >= self.block_count(b.level) {
                return Err(PatternError::InvalidBlock(b));
            }
        }
        for (i, &a) in pattern.tuples.iter().enumerate() {
            for &b in &pattern.tuples[i + 1..] {
                if self.is_within(a, b) || self.is_within(b, a) {
                    return Err(PatternError::Overlap(a, b));
                }
            }
        }
        Ok(())
    }

    /// `R(W)`: every removal edge of level at most `i` touching a pattern block `(W, i)`.
    pub fn induced_removal(&self, pattern: &RemovalPattern) -> EdgeSet {
        let mut set = self.decomposition.instance().empty_set();
        for &b in &pattern.tuples {
            for &id in self.touching(b) {
                set.insert(id);
            }
        }
        set
    }

    /// `κ^W_i(A)`: sum of `κ` over pattern blocks inside `A`.
    pub fn pattern_kappa(&self, pattern: &RemovalPattern, block: Block) -> u64 {
        pattern
            .tuples
            .iter()
            .filter(|&&w| self.is_within(w, block))
            .map(|&w| self.kappa(w))
            .sum()
    }

    /// `g^W_i(A)`: sum of `g` over pattern blocks inside `A`.
    pub fn pattern_g(&self, pattern: &RemovalPattern, block: Block) -> u64 {
        pattern
            .tuples
            .iter()
            .filter(|&&w| self.is_within(w, block))
            .map(|&w| self.g(w))
            .sum()
    }

    /// `S_ℓ`: blocks on `level` inside some pattern block of level at least `level`.
    pub fn covered(&self, pattern: &RemovalPattern, level: i32) -> Vec<Block> {
        self.blocks(level)
            .filter(|&d| {
                pattern
                    .tuples
                    .iter()
                    .any(|&w| w.level >= level && self.is_within(d, w))
            })
            .collect()
    }

    /// `g^W_i(A)` from the covered families.
    pub fn pattern_g_from_covered(&self, pattern: &RemovalPattern, block: Block) -> u64 {
        let mut total = 0u64;
        for level in -1..=block.level {
            let inside = self
                .covered(pattern, level)
                .into_iter()
                .filter(|&d| self.is_within(d, block))
                .count() as u64;
            let weight = if level < 0 { 1 } else { pow2(level as u32) };
            total += weight * inside;
        }
        total
    }

    /// Checks `κ^W_i(A) = Σ κ^W_{i-1}(C)` and `g^W_i(A) = Σ g^W_{i-1}(C)` at
    /// every block on levels `0..p` outside the pattern.
    pub fn pattern_recursions_hold(&self, pattern: &RemovalPattern) -> bool {
        (0..=self.top()).all(|level| {
            self.blocks(level)
                .filter(|&a| !pattern.contains(a))
                .all(|a| {
                    let kappa: u64 = self.children(a).map(|c| self.pattern_kappa(pattern, c)).sum();
                    let g: u64 = self.children(a).map(|c| self.pattern_g(pattern, c)).sum();
                    self.pattern_kappa(pattern, a) == kappa && self.pattern_g(pattern, a) == g
                })
        })
    }

    /// Whether the pattern has the greedy structure: at every block, either no
    /// pattern block lies strictly below it, or all lower pattern blocks lie
    /// inside it, its pattern children form a most-efficient prefix of its
    /// children under some efficiency-sorted order, and everything deeper lies
    /// inside the first child after that prefix.
    pub fn is_efficient(&self, pattern: &RemovalPattern) -> bool {
        if self.check_pattern(pattern).is_err() {
            return false;
        }
        (0..=self.top()).all(|level| {
            self.blocks(level)
                .all(|a| self.efficient_at(pattern, a))
        })
    }

    fn efficient_at(&self, pattern: &RemovalPattern, a: Block) -> bool {
        let lower: Vec<Block> = pattern
            .tuples
            .iter()
            .copied()
            .filter(|w| w.level < a.level)
            .collect();
        let inside = |w: &Block| self.is_within(*w, a);
        if !lower.iter().any(inside) {
            return true;
        }
        if !lower.iter().all(inside) {
            return false;
        }
        let (chosen, rest): (Vec<Block>, Vec<Block>) =
            self.children(a).partition(|c| pattern.contains(*c));
        let deeper: Vec<Block> = lower
            .iter()
            .copied()
            .filter(|w| w.level < a.level - 1)
            .collect();
        let worst_chosen = chosen.iter().map(|&c| self.rho(c)).min();
        let best_rest = rest.iter().map(|&c| self.rho(c)).max();
        if let (Some(w), Some(b)) = (worst_chosen, best_rest) {
            if w < b {
                return false;
            }
        }
        if deeper.is_empty() {
            return true;
        }
        // Some most-efficient remaining child must hold every deeper block.
        let Some(best) = best_rest else {
            return false;
        };
        rest.iter()
            .filter(|&&c| self.rho(c) == best)
            .any(|&c| deeper.iter().all(|&w| self.is_within(w, c)))
    }

    /// Checks `(κ^W_i(A) / κ_i(A)) (g_i(A) - 2^i) <= g^W_i(A) + 2^i` at every
    /// block with `κ_i(A) > 0`, in exact rational arithmetic.
    pub fn block_bound_holds(&self, pattern: &RemovalPattern) -> bool {
        (-1..=self.top()).all(|level| {
            let unit = if level < 0 {
                Rational::new(1, 2)
            } else {
                Rational::from(pow2(level as u32) as i128)
            };
            self.blocks(level).filter(|&a| self.kappa(a) > 0).all(|a| {
                let share = Rational::new(self.pattern_kappa(pattern, a) as i128, self.kappa(a) as i128);
                let lhs = share * (Rational::from(self.g(a) as i128) - unit);
                lhs <= Rational::from(self.pattern_g(pattern, a) as i128) + unit
            })
        })
    }
}

/// One pass of the greedy loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyStep {
    pub level: i32,
    /// The block whose children were considered.
    pub parent: Block,
    /// Children sorted by the greedy order.
    pub order: Vec<Block>,
    /// Number of children added.
    pub taken: usize,
    /// Number of pattern tuples before this pass.
    pub pattern_before: usize,
}

/// The outcome of the greedy construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyRun {
    pub pattern: RemovalPattern,
    pub removal: EdgeSet,
    pub cost: u64,
    pub steps: Vec<GreedyStep>,
}

/// Builds an affordable removal pattern level by level, adding the most
/// efficient children of the current block while the budget allows and
/// descending into the first child that did not fit.
pub fn algorithm2(tower: &PartitionTower<'_>, budget: u64) -> Result<GreedyRun, PatternError> {
    let instance = tower.decomposition().instance();
    if instance.cost(tower.removal()) <= budget {
        return Err(PatternError::Affordable);
    }
    let mut pattern = RemovalPattern::default();
    let mut removal = instance.empty_set();
    let mut cost = 0u64;
    let mut steps = Vec::new();
    let mut parent = tower.root();
    let mut level = tower.top() - 1;

    while level >= -1 {
        let mut order: Vec<Block> = tower.children(parent).collect();
        order.sort_by(|&a, &b| tower.greedy_cmp(a, b));
        let pattern_before = pattern.len();
        let mut taken = 0;
        for &q in &order {
            let added: Vec<EdgeId> = tower
                .touching(q)
                .iter()
                .copied()
                .filter(|&id| !removal.contains(id))
                .collect();
            let extra: u64 = added
                .iter()
                .map(|&id| instance.edge(id).cost.expect("interdictable"))
                .sum();
            if cost + extra > budget {
                break;
            }
            cost += extra;
            for id in added {
                removal.insert(id);
            }
            pattern.tuples.push(q);
            taken += 1;
        }
        let h = order.len();
        steps.push(GreedyStep {
            level,
            parent,
            order: order.clone(),
            taken,
            pattern_before,
        });
        if taken < h {
            parent = order[taken];
            level -= 1;
        } else {
            break;
        }
    }
    Ok(GreedyRun {
        pattern,
        removal,
        cost,
        steps,
    })
}

/// The over-budget companion pattern: the greedy pattern as it stood at the
/// last pass that could not take every child, plus the prefix of that pass
/// extended by the first child that did not fit.
pub fn overbudget_pattern(tower: &PartitionTower<'_>, run: &GreedyRun) -> (RemovalPattern, EdgeSet) {
    let step = run
        .steps
        .iter()
        .rev()
        .find(|s| s.taken < s.order.len())
        .expect("an over-budget removal set leaves some child out");
    let mut tuples = run.pattern.tuples[..step.pattern_before].to_vec();
    tuples.extend_from_slice(&step.order[..=step.taken]);
    let pattern = RemovalPattern::new(tuples);
    let removal = tower.induced_removal(&pattern);
    (pattern, removal)
}

/// `g^W_p(V)` and `κ^W_p(V)` with per-block tables indexed by level `+ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternFunctions {
    pub kappa_root: u64,
    pub g_root: u64,
    pub kappa: Vec<Vec<u64>>,
    pub g: Vec<Vec<u64>>,
}

pub fn pattern_functions(tower: &PartitionTower<'_>, pattern: &RemovalPattern) -> PatternFunctions {
    let mut kappa = Vec::new();
    let mut g = Vec::new();
    for level in -1..=tower.top() {
        kappa.push(tower.blocks(level).map(|a| tower.pattern_kappa(pattern, a)).collect());
        g.push(tower.blocks(level).map(|a| tower.pattern_g(pattern, a)).collect());
    }
    let root = tower.root();
    PatternFunctions {
        kappa_root: tower.pattern_kappa(pattern, root),
        g_root: tower.pattern_g(pattern, root),
        kappa,
        g,
    }
}

#[cfg(test)]
mod tests;
