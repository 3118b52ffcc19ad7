//! Weight rounding, level decomposition, and the preprocessing that puts an
//! instance into the shape the approximation works on.
//!
//! After rounding, every weight is zero or a power of two. Level `-1` holds
//! the zero-weight edges and level `i >= 0` the edges of weight `2^i`. The
//! preprocessed instance always has a connected top level `p >= 1`, and the
//! removal sets considered by the solver live strictly below it.

use thiserror::Error;

use crate::graph::{
    self, global_min_cut, min_cut_within, Cut, DisjointSets, Edge, EdgeId, EdgeSet, Instance,
};

/// `2^i`, aborting on overflow.
pub fn pow2(i: u32) -> u64 {
    1u64.checked_shl(i).expect("power of two exceeds 64 bits")
}

/// Level of a rounded weight: `-1` for zero, `log2(w)` for a power of two.
pub fn level_of_weight(weight: u64) -> Option<i32> {
    match weight {
        0 => Some(-1),
        w if w.is_power_of_two() => Some(w.trailing_zeros() as i32),
        _ => None,
    }
}

/// Original weights kept alongside a rounded instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingCertificate {
    pub original_weights: Vec<u64>,
}

impl RoundingCertificate {
    /// Checks `mst(rounded) <= mst(original) <= 2 * mst(rounded)` after removing `removal`.
    pub fn holds_for(&self, rounded: &Instance, removal: &EdgeSet) -> bool {
        let original = self.restore(rounded);
        let kept = rounded.all_edges().difference(removal);
        match (
            graph::mst_weight(rounded, &kept),
            graph::mst_weight(&original, &kept),
        ) {
            (Ok(r), Ok(o)) => r <= o && o <= 2 * r,
            (Err(_), Err(_)) => true,
            _ => false,
        }
    }

    /// Rebuilds the unrounded instance.
    pub fn restore(&self, rounded: &Instance) -> Instance {
        let edges = rounded
            .edges()
            .iter()
            .zip(&self.original_weights)
            .map(|(e, &w)| Edge { weight: w, ..*e })
            .collect();
        Instance::new(rounded.vertex_count(), edges, rounded.budget())
            .expect("restoring weights keeps the instance valid")
    }
}

/// Rounds every positive weight down to a power of two.
pub fn round_weights(instance: &Instance) -> (Instance, RoundingCertificate) {
    let original_weights = instance.edges().iter().map(|e| e.weight).collect();
    let edges = instance
        .edges()
        .iter()
        .map(|e| Edge {
            weight: round_down(e.weight),
            ..*e
        })
        .collect();
    let rounded = Instance::new(instance.vertex_count(), edges, instance.budget())
        .expect("rounding keeps the instance valid");
    (rounded, RoundingCertificate { original_weights })
}

fn round_down(w: u64) -> u64 {
    if w == 0 {
        0
    } else {
        1 << (63 - w.leading_zeros())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreprocessError {
    /// Some interdiction set disconnects the graph.
    #[error("a cut of cost {} fits the budget and disconnects the graph", cut.cost)]
    Reject { cut: Cut },
    #[error("edge {edge} has weight {weight}, which is neither zero nor a power of two")]
    NotRounded { edge: EdgeId, weight: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LevelError {
    #[error("edge {edge} is not a removable edge below the top level")]
    NotRemovable { edge: EdgeId },
}

/// The outcome of one preprocessing round.
#[derive(Debug, Clone)]
pub enum Preprocessed {
    Ready(LevelDecomposition),
    /// No interdiction set can split a component of the graph below the top
    /// level, so the top level contributes a constant and is contracted away.
    Reduced(Reduction),
    /// Every interdiction set leaves the MST weight unchanged.
    Constant,
}

/// A smaller instance whose optimal value plus `offset` is the optimum of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub instance: Instance,
    /// Maps each reduced edge id to the id of the same edge in the input.
    pub edge_origin: Vec<EdgeId>,
    /// MST weight contributed by the contracted top-level edges.
    pub offset: u64,
    /// Input edge ids that were contracted.
    pub contracted: Vec<EdgeId>,
}

/// A rounded instance split into weight levels `E_{-1}, E_0, ..., E_p`.
#[derive(Debug, Clone)]
pub struct LevelDecomposition {
    instance: Instance,
    base_edges: usize,
    shift: u32,
    top: u32,
    level_of: Vec<i32>,
    level_sets: Vec<EdgeSet>,
    prefix_sets: Vec<EdgeSet>,
    removable: EdgeSet,
    by_level: Vec<EdgeId>,
}

impl LevelDecomposition {
    fn build(instance: Instance, base_edges: usize, shift: u32, top: u32) -> Self {
        let m = instance.edge_count();
        let level_of: Vec<i32> = instance
            .edges()
            .iter()
            .map(|e| level_of_weight(e.weight).expect("weights are rounded"))
            .collect();
        let mut level_sets = vec![EdgeSet::new(m); top as usize + 2];
        for (id, &lvl) in level_of.iter().enumerate() {
            level_sets[(lvl + 1) as usize].insert(id);
        }
        let mut prefix_sets = Vec::with_capacity(level_sets.len());
        let mut acc = EdgeSet::new(m);
        for set in &level_sets {
            acc.union_with(set);
            prefix_sets.push(acc.clone());
        }
        let removable = prefix_sets[top as usize].intersection(&instance.interdictable_edges());
        let mut by_level: Vec<EdgeId> = (0..m).collect();
        by_level.sort_by_key(|&id| (level_of[id], id));
        Self {
            instance,
            base_edges,
            shift,
            top,
            level_of,
            level_sets,
            prefix_sets,
            removable,
            by_level,
        }
    }

    /// The working instance: input weights scaled by `2^shift`, plus connector edges.
    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    /// Top level `p`.
    pub fn top(&self) -> u32 {
        self.top
    }

    /// Input weights were multiplied by `2^shift` so that the top level is at least 1.
    pub fn shift(&self) -> u32 {
        self.shift
    }

    /// Edges with ids below this bound come from the input; the rest are connectors.
    pub fn base_edge_count(&self) -> usize {
        self.base_edges
    }

    pub fn is_connector(&self, id: EdgeId) -> bool {
        id >= self.base_edges
    }

    pub fn level(&self, id: EdgeId) -> i32 {
        self.level_of[id]
    }

    /// `E_i`.
    pub fn level_set(&self, level: i32) -> &EdgeSet {
        &self.level_sets[(level + 1) as usize]
    }

    /// `E_{<=i}`.
    pub fn prefix_set(&self, level: i32) -> &EdgeSet {
        &self.prefix_sets[(level + 1) as usize]
    }

    /// Interdictable edges of `E_{<=p-1}`: the ground set of every removal set.
    pub fn removable(&self) -> &EdgeSet {
        &self.removable
    }

    pub fn check_removal(&self, removal: &EdgeSet) -> Result<(), LevelError> {
        match removal.iter().find(|&id| !self.removable.contains(id)) {
            Some(edge) => Err(LevelError::NotRemovable { edge }),
            None => Ok(()),
        }
    }

    /// `σ(E_{<=i} \ removal)` for `i = -1, ..., p-1`.
    pub fn level_component_counts(&self, removal: &EdgeSet) -> Vec<usize> {
        let mut sets = DisjointSets::new(self.instance.vertex_count());
        let mut counts = Vec::with_capacity(self.top as usize + 1);
        let mut ids = self.by_level.iter().peekable();
        for level in -1..self.top as i32 {
            while let Some(&&id) = ids.peek() {
                if self.level_of[id] > level {
                    break;
                }
                if !removal.contains(id) {
                    let e = self.instance.edge(id);
                    sets.union(e.u, e.v);
                }
                ids.next();
            }
            counts.push(sets.count());
        }
        counts
    }

    fn value_from_counts(&self, counts: &[usize]) -> u64 {
        let below = (counts[0] - 1) as u64;
        counts[1..]
            .iter()
            .enumerate()
            .fold(below, |acc, (i, &sigma)| {
                let term = pow2(i as u32)
                    .checked_mul((sigma - 1) as u64)
                    .expect("MST value overflow");
                acc.checked_add(term).expect("MST value overflow")
            })
    }

    /// MST weight of `(V, E \ removal)` from the per-level component counts.
    pub fn val(&self, removal: &EdgeSet) -> Result<u64, LevelError> {
        self.check_removal(removal)?;
        Ok(self.value_from_counts(&self.level_component_counts(removal)))
    }

    /// Values of every prefix of `order` (including the empty prefix), each
    /// viewed as a removal set. `order` must list distinct removable edges.
    pub fn chain_values(&self, order: &[EdgeId]) -> Vec<u64> {
        let n = self.instance.vertex_count();
        let depth = self.top as usize + 1;
        let removed = EdgeSet::from_ids(self.instance.edge_count(), order.iter().copied());
        debug_assert_eq!(removed.len(), order.len());
        debug_assert!(removed.is_subset(&self.removable));

        let mut forests: Vec<DisjointSets> = (0..depth).map(|_| DisjointSets::new(n)).collect();
        let add = |forests: &mut [DisjointSets], id: EdgeId| {
            let e = self.instance.edge(id);
            let from = (self.level_of[id] + 1) as usize;
            for forest in &mut forests[from..] {
                forest.union(e.u, e.v);
            }
        };
        for &id in &self.by_level {
            if self.level_of[id] < self.top as i32 && !removed.contains(id) {
                add(&mut forests, id);
            }
        }

        let mut values = vec![0; order.len() + 1];
        let counts = |forests: &[DisjointSets]| forests.iter().map(|f| f.count()).collect::<Vec<_>>();
        values[order.len()] = self.value_from_counts(&counts(&forests));
        for j in (0..order.len()).rev() {
            add(&mut forests, order[j]);
            values[j] = self.value_from_counts(&counts(&forests));
        }
        values
    }

    /// Direct MST weight of `(V, E \ removal)` on the working instance.
    pub fn mst_value(&self, removal: &EdgeSet) -> Result<u64, graph::Disconnected> {
        graph::mst_weight(&self.instance, &self.instance.all_edges().difference(removal))
    }

    /// True iff `val(a) + val(b) <= val(a ∪ b) + val(a ∩ b)`.
    pub fn supermodularity_check(&self, a: &EdgeSet, b: &EdgeSet) -> Result<bool, LevelError> {
        let lhs = self.val(a)? + self.val(b)?;
        let rhs = self.val(&a.union(b))? + self.val(&a.intersection(b))?;
        Ok(lhs <= rhs)
    }

    /// The cheapest interdiction-cost cut inside one component of
    /// `(V, E_{<=p-1})`, i.e. the cheapest way to raise that graph's component count.
    pub fn cheapest_split(&self) -> Option<Cut> {
        cheapest_split(&self.instance, self.prefix_set(self.top as i32 - 1))
    }
}

fn cheapest_split(instance: &Instance, below_top: &EdgeSet) -> Option<Cut> {
    graph::components(instance, below_top)
        .blocks()
        .into_iter()
        .filter(|block| block.len() >= 2)
        .filter_map(|block| min_cut_within(instance, below_top, &block, |e| e.cost))
        .min_by_key(|cut| cut.cost)
}

/// One preprocessing round on a rounded instance.
pub fn preprocess(rounded: &Instance) -> Result<Preprocessed, PreprocessError> {
    let mut natural_top = -1;
    for (edge, e) in rounded.edges().iter().enumerate() {
        let level = level_of_weight(e.weight).ok_or(PreprocessError::NotRounded {
            edge,
            weight: e.weight,
        })?;
        natural_top = natural_top.max(level);
    }
    if rounded.vertex_count() == 1 {
        return Ok(Preprocessed::Constant);
    }
    if let Some(cut) = global_min_cut(rounded, &rounded.all_edges(), |e| e.cost) {
        if cut.cost <= rounded.budget() {
            return Err(PreprocessError::Reject { cut });
        }
    }
    if natural_top < 0 {
        // All weights are zero and the graph stays connected.
        return Ok(Preprocessed::Constant);
    }

    // A top level of 0 is lifted by doubling every weight, which keeps the
    // zero-weight level separate from the top.
    let shift = u32::from(natural_top == 0);
    let top = natural_top as u32 + shift;
    let heavy = pow2(top);
    let mut edges: Vec<Edge> = rounded
        .edges()
        .iter()
        .map(|e| Edge {
            weight: e.weight << shift,
            ..*e
        })
        .collect();
    let base_edges = edges.len();

    let mut top_forest = DisjointSets::new(rounded.vertex_count());
    for e in edges.iter().filter(|e| e.weight == heavy) {
        top_forest.union(e.u, e.v);
    }
    let blocks = graph::Partition::from_sets(&mut top_forest).blocks();
    for block in &blocks[1..] {
        edges.push(Edge::fixed(blocks[0][0], block[0], heavy));
    }
    let working = Instance::new(rounded.vertex_count(), edges, rounded.budget())
        .expect("connector edges are valid");
    let decomposition = LevelDecomposition::build(working, base_edges, shift, top);

    match decomposition.cheapest_split() {
        Some(cut) if cut.cost <= rounded.budget() => Ok(Preprocessed::Ready(decomposition)),
        _ => Ok(Preprocessed::Reduced(reduce(rounded, natural_top as u32))),
    }
}

/// Contracts a minimal set of top-level edges joining the components below the
/// top level and drops the remaining top-level edges.
fn reduce(rounded: &Instance, natural_top: u32) -> Reduction {
    let heavy = pow2(natural_top);
    let n = rounded.vertex_count();
    let mut below = DisjointSets::new(n);
    for e in rounded.edges().iter().filter(|e| e.weight < heavy) {
        below.union(e.u, e.v);
    }
    let mut contract = DisjointSets::new(n);
    let mut contracted = Vec::new();
    for (id, e) in rounded.edges().iter().enumerate() {
        if e.weight == heavy && below.union(e.u, e.v) {
            contract.union(e.u, e.v);
            contracted.push(id);
        }
    }
    debug_assert_eq!(below.count(), 1, "input graph is connected");
    let merged = graph::Partition::from_sets(&mut contract);

    let mut edges = Vec::new();
    let mut edge_origin = Vec::new();
    for (id, e) in rounded.edges().iter().enumerate() {
        if e.weight >= heavy {
            continue;
        }
        let (u, v) = (merged.block_of(e.u), merged.block_of(e.v));
        if u != v {
            edges.push(Edge { u, v, ..*e });
            edge_origin.push(id);
        }
    }
    let offset = heavy
        .checked_mul(contracted.len() as u64)
        .expect("offset overflow");
    Reduction {
        instance: Instance::new(merged.count(), edges, rounded.budget())
            .expect("contraction keeps the instance valid"),
        edge_origin,
        offset,
        contracted,
    }
}

/// Terminal state of [`prepare`].
#[derive(Debug, Clone)]
pub enum Stage {
    Ready(LevelDecomposition),
    Constant,
}

/// Preprocessing iterated through every reduction.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub stage: Stage,
    /// Maps each edge of the final stage's input instance to the rounded input's id.
    pub edge_origin: Vec<EdgeId>,
    /// Sum of the reductions' offsets, in rounded-input weight units.
    pub offset: u64,
    pub reductions: usize,
}

impl Prepared {
    pub fn decomposition(&self) -> Option<&LevelDecomposition> {
        match &self.stage {
            Stage::Ready(d) => Some(d),
            Stage::Constant => None,
        }
    }

    /// Translates a removal set of the final stage back to rounded-input ids.
    pub fn lift(&self, removal: &EdgeSet, universe: usize) -> EdgeSet {
        EdgeSet::from_ids(universe, removal.iter().map(|id| self.edge_origin[id]))
    }

    /// Translates a rounded-input removal set to the final stage, if every edge survived.
    pub fn lower(&self, removal: &EdgeSet) -> Option<EdgeSet> {
        let d = self.decomposition()?;
        let mut out = d.instance().empty_set();
        for id in removal.iter() {
            let local = self.edge_origin.iter().position(|&o| o == id)?;
            out.insert(local);
        }
        Some(out)
    }
}

/// Runs [`preprocess`] until it yields a decomposition or proves the value constant.
pub fn prepare(rounded: &Instance) -> Result<Prepared, PreprocessError> {
    let mut current = rounded.clone();
    let mut edge_origin: Vec<EdgeId> = (0..rounded.edge_count()).collect();
    let mut offset = 0u64;
    let mut reductions = 0;
    loop {
        match preprocess(&current)? {
            Preprocessed::Ready(d) => {
                return Ok(Prepared {
                    stage: Stage::Ready(d),
                    edge_origin,
                    offset,
                    reductions,
                })
            }
            Preprocessed::Constant => {
                return Ok(Prepared {
                    stage: Stage::Constant,
                    edge_origin,
                    offset,
                    reductions,
                })
            }
            Preprocessed::Reduced(r) => {
                edge_origin = r.edge_origin.iter().map(|&id| edge_origin[id]).collect();
                offset = offset.checked_add(r.offset).expect("offset overflow");
                reductions += 1;
                current = r.instance;
            }
        }
    }
}
