//! Independent oracles and the seeded instance corpus shared by integration tests.
#![allow(dead_code)]

use mstint::io::{generate, BudgetPolicy, GeneratorParams, TreePolicy};
use mstint::levels::{prepare, round_weights};
use mstint::{EdgeSet, Instance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Prim's algorithm on the edges not in `removed`; `None` if disconnected.
pub fn prim(instance: &Instance, removed: &EdgeSet) -> Option<u64> {
    let n = instance.vertex_count();
    let mut best = vec![vec![u64::MAX; n]; n];
    for (id, e) in instance.edges().iter().enumerate() {
        if !removed.contains(id) && e.weight < best[e.u][e.v] {
            best[e.u][e.v] = e.weight;
            best[e.v][e.u] = e.weight;
        }
    }
    let mut in_tree = vec![false; n];
    let mut dist = vec![u64::MAX; n];
    dist[0] = 0;
    let mut total = 0;
    for _ in 0..n {
        let v = (0..n).filter(|&v| !in_tree[v]).min_by_key(|&v| dist[v])?;
        if dist[v] == u64::MAX {
            return None;
        }
        in_tree[v] = true;
        total += dist[v];
        for w in 0..n {
            if !in_tree[w] && best[v][w] < dist[w] {
                dist[w] = best[v][w];
            }
        }
    }
    Some(total)
}

/// Connected components of `(0..n, edges)` by depth-first search.
pub fn component_count(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let mut adj = vec![Vec::new(); n];
    for (u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    count
}

/// Cheapest cost of interdictable edges crossing a bipartition that no
/// fixed edge crosses; `None` if every bipartition is crossed by a fixed edge.
pub fn brute_min_cut(instance: &Instance) -> Option<u64> {
    let n = instance.vertex_count();
    (1..1u32 << (n - 1))
        .filter_map(|mask| {
            let side = |v: usize| mask >> v & 1 == 1;
            let mut cost = 0u64;
            for e in instance.edges() {
                if side(e.u) != side(e.v) {
                    cost += e.cost?;
                }
            }
            Some(cost)
        })
        .min()
}

/// Every subset of `ids`, as edge sets over `universe`.
pub fn subsets(ids: &[usize], universe: usize) -> impl Iterator<Item = EdgeSet> + '_ {
    (0..1u64 << ids.len()).map(move |mask| {
        EdgeSet::from_ids(universe, ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &id)| id))
    })
}

/// Vertices of the upper concave envelope of `points` between cost 0 and the
/// cheapest point of maximum value, left to right.
pub fn upper_hull(points: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut best: Vec<(u64, u64)> = Vec::new();
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    for p in sorted {
        if best.last().is_none_or(|q| p.1 > q.1) {
            best.push(p);
        }
    }
    let mut hull: Vec<(u64, u64)> = Vec::new();
    for p in best {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop b unless it lies strictly above the segment a-p.
            let cross = (b.0 as i128 - a.0 as i128) * (p.1 as i128 - a.1 as i128)
                - (b.1 as i128 - a.1 as i128) * (p.0 as i128 - a.0 as i128);
            if cross >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Shortest closed walk visiting every vertex, by shortest paths and all
/// vertex orders; `None` if disconnected.
pub fn brute_tour(instance: &Instance, removed: &EdgeSet) -> Option<u64> {
    let n = instance.vertex_count();
    let inf = u64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (id, e) in instance.edges().iter().enumerate() {
        if !removed.contains(id) {
            d[e.u][e.v] = d[e.u][e.v].min(e.weight);
            d[e.v][e.u] = d[e.v][e.u].min(e.weight);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    if d[0].iter().any(|&x| x >= inf) {
        return None;
    }
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best = u64::MAX;
    permute(&mut rest, 0, &mut |order| {
        let mut len = 0;
        let mut at = 0;
        for &v in order {
            len += d[at][v];
            at = v;
        }
        best = best.min(len + d[at][0]);
    });
    Some(if n == 1 { 0 } else { best })
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Generator parameters for corpus entry `seed`: up to 8 vertices, at most 16
/// interdictable edges, weights up to 8, costs up to 5 and a budget of at most
/// half the total interdictable cost.
pub fn corpus_params(seed: u64) -> GeneratorParams {
    let mut r = rng(seed ^ 0x5eed);
    let n = r.gen_range(3..=8);
    let tree = match r.gen_range(0..3) {
        0 => TreePolicy::None,
        1 => TreePolicy::Spanning,
        _ => TreePolicy::FixedSpanning,
    };
    let m = match tree {
        TreePolicy::FixedSpanning => n - 1 + r.gen_range(1..=16),
        _ => r.gen_range(n - 1..=16),
    };
    GeneratorParams {
        n,
        m,
        max_weight: 8,
        max_cost: 5,
        budget: BudgetPolicy::Fraction {
            num: r.gen_range(1..=5),
            den: 10,
        },
        tree,
    }
}

/// The first `count` corpus instances that no affordable cut disconnects.
pub fn corpus(count: usize) -> Vec<Instance> {
    (0u64..)
        .map(|seed| generate(seed, &corpus_params(seed)))
        .filter(|inst| prepare(&round_weights(inst).0).is_ok())
        .take(count)
        .collect()
}
