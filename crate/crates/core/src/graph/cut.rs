use super::{DisjointSets, Edge, EdgeSet, Instance, Vertex};

/// An edge cut `δ(S)` together with one of its shores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub edges: EdgeSet,
    pub cost: u64,
    /// The shore `S`, sorted.
    pub side: Vec<Vertex>,
}

/// Minimum-cost cut of `(V, active)` over all `∅ ≠ S ⊊ V`.
///
/// `cost` returns `None` for edges that may not be cut; those are contracted
/// before the search. Returns `None` when no cut avoids such edges (this
/// includes graphs with fewer than two vertices). A disconnected graph yields
/// an empty cut of cost 0.
pub fn global_min_cut(
    instance: &Instance,
    active: &EdgeSet,
    cost: impl Fn(&Edge) -> Option<u64>,
) -> Option<Cut> {
    let vertices: Vec<Vertex> = (0..instance.vertex_count()).collect();
    min_cut_within(instance, active, &vertices, cost)
}

/// Minimum-cost cut of the subgraph induced by `vertices` on the `active` edges.
pub fn min_cut_within(
    instance: &Instance,
    active: &EdgeSet,
    vertices: &[Vertex],
    cost: impl Fn(&Edge) -> Option<u64>,
) -> Option<Cut> {
    let mut local = vec![usize::MAX; instance.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        local[v] = i;
    }
    let inside: Vec<_> = active
        .iter()
        .filter(|&id| {
            let e = instance.edge(id);
            local[e.u] != usize::MAX && local[e.v] != usize::MAX
        })
        .collect();

    let mut merged = DisjointSets::new(vertices.len());
    for &id in &inside {
        let e = instance.edge(id);
        if cost(e).is_none() {
            merged.union(local[e.u], local[e.v]);
        }
    }
    let supers = super::Partition::from_sets(&mut merged);
    let s = supers.count();
    if s < 2 {
        return None;
    }

    let mut adj = vec![vec![0u64; s]; s];
    for &id in &inside {
        let e = instance.edge(id);
        if let Some(c) = cost(e) {
            let a = supers.block_of(local[e.u]);
            let b = supers.block_of(local[e.v]);
            if a != b {
                adj[a][b] = adj[a][b].checked_add(c).expect("cut cost overflow");
                adj[b][a] = adj[a][b];
            }
        }
    }

    let shore = stoer_wagner(adj);
    let mut in_side = vec![false; instance.vertex_count()];
    let mut side = Vec::new();
    for (i, &v) in vertices.iter().enumerate() {
        if shore.contains(&supers.block_of(i)) {
            in_side[v] = true;
            side.push(v);
        }
    }
    side.sort_unstable();

    let mut edges = instance.empty_set();
    let mut total = 0u64;
    for &id in &inside {
        let e = instance.edge(id);
        if in_side[e.u] != in_side[e.v] {
            let c = cost(e).expect("uncuttable edge crosses a contracted cut");
            edges.insert(id);
            total += c;
        }
    }
    Some(Cut {
        edges,
        cost: total,
        side,
    })
}

/// Stoer–Wagner on a dense symmetric weight matrix; returns the node set of a minimum cut shore.
fn stoer_wagner(mut adj: Vec<Vec<u64>>) -> Vec<usize> {
    let n = adj.len();
    let mut groups: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best: Option<(u64, Vec<usize>)> = None;

    while alive.len() > 1 {
        let mut weight = vec![0u64; n];
        let mut added = vec![false; n];
        let mut prev = alive[0];
        let mut last = alive[0];
        for step in 0..alive.len() {
            let next = alive
                .iter()
                .copied()
                .filter(|&v| !added[v])
                .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
                .expect("phase ran out of vertices");
            added[next] = true;
            if step + 1 == alive.len() {
                prev = last;
                last = next;
                break;
            }
            last = next;
            for &v in &alive {
                if !added[v] {
                    weight[v] += adj[next][v];
                }
            }
        }
        let phase_cut = weight[last];
        if best.as_ref().is_none_or(|(c, _)| phase_cut < *c) {
            best = Some((phase_cut, groups[last].clone()));
        }

        // Merge `last` into `prev`.
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        for &v in &alive {
            let w = adj[last][v];
            adj[prev][v] += w;
            adj[v][prev] = adj[prev][v];
        }
        adj[prev][prev] = 0;
        alive.retain(|&v| v != last);
    }
    best.expect("at least two nodes").1
}
