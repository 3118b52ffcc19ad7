//! Problems that reduce to MST interdiction: metric TSP interdiction and
//! maximum-components edge removal, plus a small counterexample fixture.

use thiserror::Error;

use crate::graph::{self, global_min_cut, Cut, DisjointSets, Edge, EdgeSet, Instance, InstanceError, Vertex};
use crate::solver::{solve, SolveError, SolveOptions, SolveReport};

/// Largest vertex count the exact tour oracle accepts.
pub const TSP_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TspError {
    #[error("edge {0} has zero length")]
    ZeroLength(usize),
    #[error("an affordable cut of cost {} disconnects the graph", .0.cost)]
    Disconnectable(Cut),
    #[error("the remaining graph is disconnected")]
    Disconnected,
    #[error("{0} vertices exceed the exact tour limit of {TSP_LIMIT}")]
    TooLarge(usize),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// A connected graph with positive lengths that no affordable set disconnects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TspInstance {
    instance: Instance,
}

impl TspInstance {
    /// Edge weights are read as lengths.
    pub fn new(instance: Instance) -> Result<Self, TspError> {
        if let Some(id) = instance.edges().iter().position(|e| e.weight == 0) {
            return Err(TspError::ZeroLength(id));
        }
        if let Some(cut) = global_min_cut(&instance, &instance.all_edges(), |e| e.cost) {
            if cut.cost <= instance.budget() {
                return Err(TspError::Disconnectable(cut));
            }
        }
        Ok(Self { instance })
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }
}

/// Length of a shortest closed walk visiting every vertex of `(V, E \ removal)`.
///
/// Closed walks in the graph correspond to Hamiltonian cycles in its metric
/// closure, so this is Held–Karp over all-pairs shortest path distances.
pub fn tsp_walk_length(tsp: &TspInstance, removal: &EdgeSet) -> Result<u64, TspError> {
    let inst = tsp.instance();
    let n = inst.vertex_count();
    if n > TSP_LIMIT {
        return Err(TspError::TooLarge(n));
    }
    const INF: u64 = u64::MAX / 4;
    let mut dist = vec![vec![INF; n]; n];
    for (v, row) in dist.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (id, e) in inst.edges().iter().enumerate() {
        if !removal.contains(id) {
            let d = dist[e.u][e.v].min(e.weight);
            dist[e.u][e.v] = d;
            dist[e.v][e.u] = d;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = dist[i][k] + dist[k][j];
                if through < dist[i][j] {
                    dist[i][j] = through;
                }
            }
        }
    }
    if dist[0].iter().any(|&d| d >= INF) {
        return Err(TspError::Disconnected);
    }
    if n == 1 {
        return Ok(0);
    }

    // best[mask][j]: shortest path from 0 through the vertices of `mask`
    // (over 1..n), ending at j.
    let others = n - 1;
    let full = (1usize << others) - 1;
    let mut best = vec![vec![INF; others]; 1 << others];
    for j in 0..others {
        best[1 << j][j] = dist[0][j + 1];
    }
    for mask in 1..=full {
        for j in 0..others {
            let here = best[mask][j];
            if mask >> j & 1 == 0 || here >= INF {
                continue;
            }
            for k in 0..others {
                if mask >> k & 1 == 0 {
                    let next = mask | 1 << k;
                    let cand = here + dist[j + 1][k + 1];
                    if cand < best[next][k] {
                        best[next][k] = cand;
                    }
                }
            }
        }
    }
    Ok((0..others)
        .map(|j| best[full][j] + dist[j + 1][0])
        .min()
        .expect("at least one other vertex"))
}

/// An interdiction set for the tour problem with the bounds the MST gives.
#[derive(Debug, Clone, PartialEq)]
pub struct TspOutcome {
    pub report: SolveReport,
    /// MST length after removal; no closed walk is shorter.
    pub lower: u64,
    /// Twice the MST length; a doubled tree is a closed walk.
    pub upper: u64,
}

/// Solves MST interdiction with lengths as weights and returns the same set.
pub fn tsp_interdict(tsp: &TspInstance, options: SolveOptions) -> Result<TspOutcome, TspError> {
    let report = solve(tsp.instance(), options)?;
    let mst = report.original_value;
    Ok(TspOutcome {
        lower: mst,
        upper: 2 * mst,
        report,
    })
}

/// Remove edges to maximize the number of connected components.
///
/// With unit costs the budget is the number `q` of removable edges; the
/// budgeted variant carries arbitrary positive costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McpInstance {
    pub vertex_count: usize,
    pub edges: Vec<(Vertex, Vertex)>,
    pub costs: Vec<u64>,
    pub budget: u64,
}

impl McpInstance {
    pub fn unit(vertex_count: usize, edges: Vec<(Vertex, Vertex)>, q: u64) -> Self {
        let costs = vec![1; edges.len()];
        Self {
            vertex_count,
            edges,
            costs,
            budget: q,
        }
    }

    pub fn budgeted(vertex_count: usize, edges: Vec<(Vertex, Vertex)>, costs: Vec<u64>, budget: u64) -> Self {
        assert_eq!(costs.len(), edges.len(), "one cost per edge");
        Self {
            vertex_count,
            edges,
            costs,
            budget,
        }
    }

    /// Components of the graph after removing the listed edge indices.
    pub fn components_after(&self, removal: &EdgeSet) -> usize {
        let mut sets = DisjointSets::new(self.vertex_count);
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if !removal.contains(i) {
                sets.union(u, v);
            }
        }
        sets.count()
    }
}

/// Original edges become interdictable weight-0 edges, fixed weight-0 edges
/// join the original components, and a fixed path of weight-1 edges spans
/// the vertices. The MST weight after removing `R` is then the number of
/// components `R` adds to the original graph.
///
/// Edge ids of the original graph are preserved; the added edges follow them.
/// Added edges are marked non-interdictable rather than given a cost above
/// the budget; both encodings forbid removing them.
pub fn mcp_to_interdiction(mcp: &McpInstance) -> Result<Instance, InstanceError> {
    let mut edges: Vec<Edge> = mcp
        .edges
        .iter()
        .zip(&mcp.costs)
        .map(|(&(u, v), &c)| Edge::new(u, v, 0, c))
        .collect();
    let mut sets = DisjointSets::new(mcp.vertex_count);
    for &(u, v) in &mcp.edges {
        sets.union(u, v);
    }
    for v in 1..mcp.vertex_count {
        if sets.union(0, v) {
            edges.push(Edge::fixed(0, v, 0));
        }
    }
    edges.extend((1..mcp.vertex_count).map(|v| Edge::fixed(v - 1, v, 1)));
    Instance::new(mcp.vertex_count, edges, mcp.budget)
}

/// Components `removal` adds to the original graph.
pub fn component_gain(mcp: &McpInstance, removal: &EdgeSet) -> usize {
    let untouched = EdgeSet::new(mcp.edges.len());
    mcp.components_after(removal) - mcp.components_after(&untouched)
}

/// A three-vertex multigraph on which the best removal of three MST and
/// replacement edges is far from optimal.
///
/// Vertices `u = 0`, `v = 1`, `w = 2`; `u–v` edges of weight 3, 4, 5, `v–w`
/// edges of weight 2 and 101, `u–w` edges of weight 1, 6 and 100; unit costs
/// and budget 3.
pub fn shen_fixture() -> Instance {
    let edges = vec![
        Edge::new(0, 1, 3, 1),
        Edge::new(0, 1, 4, 1),
        Edge::new(0, 1, 5, 1),
        Edge::new(1, 2, 2, 1),
        Edge::new(1, 2, 101, 1),
        Edge::new(0, 2, 1, 1),
        Edge::new(0, 2, 6, 1),
        Edge::new(0, 2, 100, 1),
    ];
    Instance::new(3, edges, 3).expect("fixture is valid")
}

/// Edges of the fixture with weight at most 5: its MST and the replacement
/// edges a tree-and-replacement argument would consider.
pub fn shen_restricted_edges(instance: &Instance) -> Vec<usize> {
    (0..instance.edge_count())
        .filter(|&id| instance.edge(id).weight <= 5)
        .collect()
}

/// MST weight of the untouched graph, for callers without a solver at hand.
pub fn mst_of(instance: &Instance) -> Option<u64> {
    graph::mst_weight(instance, &instance.all_edges()).ok()
}
