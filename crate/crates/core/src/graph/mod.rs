//! Multigraph instances, edge sets, connectivity and spanning trees.

mod cut;
mod union_find;

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use cut::{global_min_cut, min_cut_within, Cut};
pub use union_find::DisjointSets;

pub type EdgeId = usize;
pub type Vertex = usize;

/// An undirected edge. `cost == None` marks an edge the interdictor may not remove.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub weight: u64,
    pub cost: Option<u64>,
}

impl Edge {
    pub fn new(u: Vertex, v: Vertex, weight: u64, cost: u64) -> Self {
        Self {
            u,
            v,
            weight,
            cost: Some(cost),
        }
    }

    /// An edge that can never be interdicted.
    pub fn fixed(u: Vertex, v: Vertex, weight: u64) -> Self {
        Self {
            u,
            v,
            weight,
            cost: None,
        }
    }

    pub fn interdictable(&self) -> bool {
        self.cost.is_some()
    }

    /// Number of endpoints of this edge inside the vertex set described by `inside`.
    pub fn endpoints_in(&self, inside: impl Fn(Vertex) -> bool) -> usize {
        usize::from(inside(self.u)) + usize::from(inside(self.v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance must have at least one vertex")]
    NoVertices,
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("edge {edge} is a loop at vertex {vertex}")]
    Loop { edge: EdgeId, vertex: Vertex },
    #[error("edge {edge} has endpoint {vertex} outside 0..{n}")]
    VertexOutOfRange { edge: EdgeId, vertex: Vertex, n: usize },
    #[error("edge {edge} has zero interdiction cost")]
    ZeroCost { edge: EdgeId },
}

/// A loopless multigraph with integer weights, interdiction costs and a budget.
///
/// Edge ids are dense indices into [`Instance::edges`]; parallel edges are distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    n: usize,
    edges: Vec<Edge>,
    budget: u64,
}

impl Instance {
    pub fn new(n: usize, edges: Vec<Edge>, budget: u64) -> Result<Self, InstanceError> {
        if n == 0 {
            return Err(InstanceError::NoVertices);
        }
        if budget == 0 {
            return Err(InstanceError::ZeroBudget);
        }
        for (id, e) in edges.iter().enumerate() {
            for vertex in [e.u, e.v] {
                if vertex >= n {
                    return Err(InstanceError::VertexOutOfRange { edge: id, vertex, n });
                }
            }
            if e.u == e.v {
                return Err(InstanceError::Loop {
                    edge: id,
                    vertex: e.u,
                });
            }
            if e.cost == Some(0) {
                return Err(InstanceError::ZeroCost { edge: id });
            }
        }
        Ok(Self { n, edges, budget })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn with_budget(&self, budget: u64) -> Result<Self, InstanceError> {
        Self::new(self.n, self.edges.clone(), budget)
    }

    pub fn empty_set(&self) -> EdgeSet {
        EdgeSet::new(self.edges.len())
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::full(self.edges.len())
    }

    /// All edges the interdictor is allowed to remove.
    pub fn interdictable_edges(&self) -> EdgeSet {
        EdgeSet::from_ids(
            self.edges.len(),
            self.edges
                .iter()
                .enumerate()
                .filter(|(_, e)| e.interdictable())
                .map(|(id, _)| id),
        )
    }

    /// Total interdiction cost of `set`.
    ///
    /// Panics if `set` contains a non-interdictable edge: such sets are never
    /// valid removal sets.
    pub fn cost(&self, set: &EdgeSet) -> u64 {
        set.iter()
            .map(|id| {
                self.edges[id]
                    .cost
                    .unwrap_or_else(|| panic!("edge {id} is not interdictable"))
            })
            .sum()
    }

    pub fn weight_sum(&self, set: &EdgeSet) -> u64 {
        set.iter().map(|id| self.edges[id].weight).sum()
    }

    /// True when `set` only holds interdictable edges and fits the budget.
    pub fn is_interdiction_set(&self, set: &EdgeSet) -> bool {
        set.iter().all(|id| self.edges[id].interdictable()) && self.cost(set) <= self.budget
    }
}

/// A subset of an instance's edge ids.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet {
    bits: FixedBitSet,
}

impl EdgeSet {
    pub fn new(universe: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        Self { bits }
    }

    pub fn from_ids(universe: usize, ids: impl IntoIterator<Item = EdgeId>) -> Self {
        let mut set = Self::new(universe);
        for id in ids {
            set.insert(id);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, id: EdgeId) -> bool {
        !self.bits.put(id)
    }

    pub fn remove(&mut self, id: EdgeId) {
        self.bits.set(id, false);
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.bits.contains(id)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Edge ids in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<EdgeId> {
        self.iter().collect()
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Self { bits }
    }

    pub fn intersection(&self, other: &EdgeSet) -> EdgeSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Self { bits }
    }

    pub fn difference(&self, other: &EdgeSet) -> EdgeSet {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Self { bits }
    }

    pub fn union_with(&mut self, other: &EdgeSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Assignment of every vertex to a block; blocks are numbered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    block_of: Vec<usize>,
    count: usize,
}

impl Partition {
    pub fn from_sets(sets: &mut DisjointSets) -> Self {
        let n = sets.len();
        let mut label = vec![usize::MAX; n];
        let mut block_of = vec![0; n];
        let mut count = 0;
        for (v, block) in block_of.iter_mut().enumerate() {
            let root = sets.find(v);
            if label[root] == usize::MAX {
                label[root] = count;
                count += 1;
            }
            *block = label[root];
        }
        Self { block_of, count }
    }

    pub fn block_of(&self, v: Vertex) -> usize {
        self.block_of[v]
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn vertex_count(&self) -> usize {
        self.block_of.len()
    }

    /// Members of every block, each list sorted.
    pub fn blocks(&self) -> Vec<Vec<Vertex>> {
        let mut blocks = vec![Vec::new(); self.count];
        for (v, &b) in self.block_of.iter().enumerate() {
            blocks[b].push(v);
        }
        blocks
    }
}

/// Connected components of `(V, active)`.
pub fn components(instance: &Instance, active: &EdgeSet) -> Partition {
    let mut sets = DisjointSets::new(instance.vertex_count());
    for id in active.iter() {
        let e = instance.edge(id);
        sets.union(e.u, e.v);
    }
    Partition::from_sets(&mut sets)
}

/// Number of connected components of `(V, active)`.
pub fn component_count(instance: &Instance, active: &EdgeSet) -> usize {
    let mut sets = DisjointSets::new(instance.vertex_count());
    for id in active.iter() {
        let e = instance.edge(id);
        sets.union(e.u, e.v);
    }
    sets.count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("graph is disconnected")]
pub struct Disconnected;

/// Weight of a minimum spanning tree of `(V, active)`, by Kruskal with ties broken by edge id.
pub fn mst_weight(instance: &Instance, active: &EdgeSet) -> Result<u64, Disconnected> {
    spanning_tree(instance, active).map(|tree| instance.weight_sum(&tree))
}

/// Edges of a minimum spanning tree of `(V, active)`.
pub fn spanning_tree(instance: &Instance, active: &EdgeSet) -> Result<EdgeSet, Disconnected> {
    let mut order: Vec<EdgeId> = active.iter().collect();
    order.sort_by_key(|&id| (instance.edge(id).weight, id));
    let mut sets = DisjointSets::new(instance.vertex_count());
    let mut tree = instance.empty_set();
    for id in order {
        let e = instance.edge(id);
        if sets.union(e.u, e.v) {
            tree.insert(id);
            if sets.count() == 1 {
                break;
            }
        }
    }
    if sets.count() == 1 {
        Ok(tree)
    } else {
        Err(Disconnected)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Instance {
        Instance::new(
            3,
            vec![Edge::new(0, 1, 0, 1), Edge::new(1, 2, 1, 1), Edge::new(2, 0, 2, 1)],
            1,
        )
        .unwrap()
    }

    #[test]
    fn rejects_malformed_instances() {
        assert_eq!(Instance::new(0, vec![], 1), Err(InstanceError::NoVertices));
        assert_eq!(Instance::new(2, vec![], 0), Err(InstanceError::ZeroBudget));
        assert_eq!(
            Instance::new(2, vec![Edge::new(1, 1, 0, 1)], 1),
            Err(InstanceError::Loop { edge: 0, vertex: 1 })
        );
        assert_eq!(
            Instance::new(2, vec![Edge::new(0, 2, 0, 1)], 1),
            Err(InstanceError::VertexOutOfRange {
                edge: 0,
                vertex: 2,
                n: 2
            })
        );
        assert_eq!(
            Instance::new(2, vec![Edge::new(0, 1, 0, 0)], 1),
            Err(InstanceError::ZeroCost { edge: 0 })
        );
    }

    #[test]
    fn components_of_empty_and_single_edge() {
        let inst = Instance::new(4, vec![Edge::new(0, 1, 0, 1)], 1).unwrap();
        assert_eq!(components(&inst, &inst.empty_set()).count(), 4);

        let tri = triangle();
        let part = components(&tri, &EdgeSet::from_ids(3, [0]));
        assert_eq!(part.count(), 2);
        assert_eq!(part.blocks(), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn kruskal_on_triangle() {
        let tri = triangle();
        assert_eq!(mst_weight(&tri, &tri.all_edges()), Ok(1));
        assert_eq!(mst_weight(&tri, &EdgeSet::from_ids(3, [0, 2])), Ok(2));
        assert_eq!(mst_weight(&tri, &tri.empty_set()), Err(Disconnected));
    }

    #[test]
    fn single_vertex_is_connected() {
        let inst = Instance::new(1, vec![], 1).unwrap();
        assert_eq!(mst_weight(&inst, &inst.empty_set()), Ok(0));
    }

    #[test]
    fn edge_set_algebra() {
        let a = EdgeSet::from_ids(10, [1, 3, 5]);
        let b = EdgeSet::from_ids(10, [3, 4]);
        assert_eq!(a.union(&b).to_vec(), vec![1, 3, 4, 5]);
        assert_eq!(a.intersection(&b).to_vec(), vec![3]);
        assert_eq!(a.difference(&b).to_vec(), vec![1, 5]);
        assert!(EdgeSet::from_ids(10, [3]).is_subset(&a));
        assert_eq!(EdgeSet::full(4).len(), 4);
    }

    #[test]
    fn cost_counts_interdictable_members() {
        let inst = Instance::new(
            2,
            vec![Edge::new(0, 1, 0, 2), Edge::new(0, 1, 0, 3), Edge::fixed(0, 1, 1)],
            4,
        )
        .unwrap();
        assert_eq!(inst.cost(&EdgeSet::from_ids(3, [0, 1])), 5);
        assert_eq!(inst.interdictable_edges().to_vec(), vec![0, 1]);
        assert!(!inst.is_interdiction_set(&EdgeSet::from_ids(3, [0, 1])));
        assert!(!inst.is_interdiction_set(&EdgeSet::from_ids(3, [2])));
        assert!(inst.is_interdiction_set(&EdgeSet::from_ids(3, [1])));
    }
}
