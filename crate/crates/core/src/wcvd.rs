//! Valid domains under a single additive cost bound.
//!
//! Edge costs are attached implicitly from unary tables: an edge setting
//! layer `i` to `a` costs `c_i(a)`, and a long edge also pays the cheapest
//! current value of every layer it skips. Upstream labels `U` and
//! downstream labels `D` are shortest-path distances from the root and to
//! the terminal; value `a` of layer `i` is valid under bound `K` when some
//! edge carrying it has `U[u] + c(e) + D[v] <= K`.
//!
//! The module also covers semiring labeling (counting, sum-product,
//! min-plus), the unfolding of non-unary costs into edge costs, and the
//! explicit encoding of the cost as an extra variable.

use std::collections::{BTreeSet, HashMap};

use crate::bdd::{Bdd, BddError, BddRef, Encoding};
use crate::mdd::{Edge, LayerDomains, Mdd, MddError};
use crate::model::{CostSpec, ValidDomains};

/// Cost of every edge of one particular [`Mdd`], indexed by edge id.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCosts(pub Vec<f64>);

impl EdgeCosts {
    /// Costs from unary tables indexed by layer. Long edges add the cheapest
    /// current value of each skipped layer.
    pub fn from_unary(m: &Mdd, table: &[Vec<f64>]) -> EdgeCosts {
        let cheapest = cheapest_values(m.domains(), table);
        let costs = (0..m.num_edges())
            .map(|e| {
                let edge = m.edge(e);
                let base = table[m.edge_layer(e)][edge.value as usize];
                m.skipped(e).fold(base, |acc, j| acc + cheapest[j])
            })
            .collect();
        EdgeCosts(costs)
    }

    /// Costs carried over through an edge-origin map from a restriction.
    pub fn select(&self, origins: &[usize]) -> EdgeCosts {
        EdgeCosts(origins.iter().map(|&e| self.0[e]).collect())
    }

    pub fn get(&self, e: usize) -> f64 {
        self.0[e]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Cheapest value of each layer's current domain.
fn cheapest_values(domains: &LayerDomains, table: &[Vec<f64>]) -> Vec<f64> {
    (0..domains.num_vars())
        .map(|j| domains.values(j).map(|b| table[j][b]).fold(f64::INFINITY, f64::min))
        .collect()
}

/// Shortest-path labels; `f64::INFINITY` marks nodes with no path.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarLabels {
    pub up: Vec<f64>,
    pub down: Vec<f64>,
}

impl ScalarLabels {
    /// Cost of the cheapest solution, `U` of the terminal.
    pub fn min_cost(&self) -> f64 {
        self.up[self.up.len() - 1]
    }
}

/// Compute `U` and `D`. The two passes are independent and run in parallel.
pub fn label_scalar(m: &Mdd, costs: &EdgeCosts) -> Result<ScalarLabels, MddError> {
    if m.is_empty() {
        return Err(MddError::Empty);
    }
    let (up, down) = rayon::join(|| upstream(m, costs), || downstream(m, costs));
    Ok(ScalarLabels { up, down })
}

fn upstream(m: &Mdd, costs: &EdgeCosts) -> Vec<f64> {
    let mut up = vec![f64::INFINITY; m.num_nodes()];
    up[m.root()] = 0.0;
    for (e, edge) in m.edges().iter().enumerate() {
        let via = up[edge.src as usize] + costs.0[e];
        let slot = &mut up[edge.dst as usize];
        if via < *slot {
            *slot = via;
        }
    }
    up
}

fn downstream(m: &Mdd, costs: &EdgeCosts) -> Vec<f64> {
    let mut down = vec![f64::INFINITY; m.num_nodes()];
    down[m.terminal()] = 0.0;
    for (e, edge) in m.edges().iter().enumerate().rev() {
        let via = costs.0[e] + down[edge.dst as usize];
        let slot = &mut down[edge.src as usize];
        if via < *slot {
            *slot = via;
        }
    }
    down
}

fn within(total: f64, bound: f64, tolerance: f64) -> bool {
    total <= bound + tolerance
}

/// Valid domains of a diagram without long edges under bound `bound`.
/// `tolerance` is an absolute slack added to the bound (0 for exact costs).
pub fn valid_domains_scalar(m: &Mdd, costs: &EdgeCosts, labels: &ScalarLabels, bound: f64, tolerance: f64) -> ValidDomains {
    debug_assert!(!m.has_long_edges());
    let mut masks: Vec<Vec<bool>> = m.domains().sizes().iter().map(|&d| vec![false; d]).collect();
    for (e, edge) in m.edges().iter().enumerate() {
        let total = labels.up[edge.src as usize] + costs.0[e] + labels.down[edge.dst as usize];
        if within(total, bound, tolerance) {
            masks[m.edge_layer(e)][edge.value as usize] = true;
        }
    }
    ValidDomains::from_masks(&masks)
}

/// Per-layer data for values reached only through long edges: `skip[i]` is
/// the cheapest solution using an edge that skips layer `i`, `cheapest[i]`
/// the cheapest current value of layer `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipLabels {
    pub skip: Vec<f64>,
    pub cheapest: Vec<f64>,
}

/// Edge costs, shortest-path labels and skip labels for a diagram that may
/// contain long edges. Assigned layers are read from the diagram's domains.
pub fn label_long(m: &Mdd, table: &[Vec<f64>]) -> Result<(EdgeCosts, ScalarLabels, SkipLabels), MddError> {
    let costs = EdgeCosts::from_unary(m, table);
    let labels = label_scalar(m, &costs)?;
    let skip = skip_labels(m, &costs, &labels, table);
    Ok((costs, labels, skip))
}

/// Skip labels from existing edge costs and labels.
pub fn skip_labels(m: &Mdd, costs: &EdgeCosts, labels: &ScalarLabels, table: &[Vec<f64>]) -> SkipLabels {
    let n = m.num_vars();
    let mut ranges = RangeMin::new(n);
    for (e, edge) in m.edges().iter().enumerate() {
        let span = m.skipped(e);
        if !span.is_empty() {
            let total = labels.up[edge.src as usize] + costs.0[e] + labels.down[edge.dst as usize];
            ranges.update(span.start, span.end, total);
        }
    }
    SkipLabels {
        skip: ranges.finish(),
        cheapest: cheapest_values(m.domains(), table),
    }
}

/// Valid domains of a diagram with long edges. An assigned layer answers
/// its assigned value when any solution is within the bound.
pub fn valid_domains_long(
    m: &Mdd,
    table: &[Vec<f64>],
    costs: &EdgeCosts,
    labels: &ScalarLabels,
    skip: &SkipLabels,
    bound: f64,
    tolerance: f64,
) -> ValidDomains {
    let domains = m.domains();
    let n = m.num_vars();
    let feasible = within(labels.min_cost(), bound, tolerance);
    let mut masks: Vec<Vec<bool>> = domains.sizes().iter().map(|&d| vec![false; d]).collect();
    for e in 0..m.num_edges() {
        let i = m.edge_layer(e);
        if domains.fixed(i).is_some() {
            continue;
        }
        let edge = m.edge(e);
        let total = labels.up[edge.src as usize] + costs.0[e] + labels.down[edge.dst as usize];
        if within(total, bound, tolerance) {
            masks[i][edge.value as usize] = true;
        }
    }
    for i in 0..n {
        if let Some(a) = domains.fixed(i) {
            masks[i][a] = feasible;
            continue;
        }
        if skip.skip[i].is_finite() {
            for b in domains.values(i) {
                if within(skip.skip[i] + table[i][b] - skip.cheapest[i], bound, tolerance) {
                    masks[i][b] = true;
                }
            }
        }
    }
    ValidDomains::from_masks(&masks)
}

/// Offline range-min updates with point queries, O(1) per update.
struct RangeMin {
    n: usize,
    levels: Vec<Vec<f64>>,
}

impl RangeMin {
    fn new(n: usize) -> Self {
        let mut levels = vec![vec![f64::INFINITY; n]];
        let mut len = 2;
        while len <= n {
            levels.push(vec![f64::INFINITY; n]);
            len *= 2;
        }
        RangeMin { n, levels }
    }

    fn update(&mut self, start: usize, end: usize, value: f64) {
        let len = end - start;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let width = 1 << k;
        for at in [start, end - width] {
            let slot = &mut self.levels[k][at];
            if value < *slot {
                *slot = value;
            }
        }
    }

    fn finish(mut self) -> Vec<f64> {
        for k in (1..self.levels.len()).rev() {
            let half = 1 << (k - 1);
            for j in 0..=(self.n - (1 << k)) {
                let v = self.levels[k][j];
                for at in [j, j + half] {
                    let slot = &mut self.levels[k - 1][at];
                    if v < *slot {
                        *slot = v;
                    }
                }
            }
        }
        self.levels.swap_remove(0)
    }
}

/// A commutative semiring: `plus` aggregates across paths, `times`
/// combines along a path and distributes over `plus`.
pub trait Semiring {
    type Elem: Copy + std::fmt::Debug + PartialEq + Send + Sync;
    fn zero() -> Self::Elem;
    fn one() -> Self::Elem;
    fn plus(a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn times(a: Self::Elem, b: Self::Elem) -> Self::Elem;
}

/// `(min, +)` over reals: shortest paths.
#[derive(Debug, Clone, Copy)]
pub struct MinPlus;

impl Semiring for MinPlus {
    type Elem = f64;
    fn zero() -> f64 {
        f64::INFINITY
    }
    fn one() -> f64 {
        0.0
    }
    fn plus(a: f64, b: f64) -> f64 {
        a.min(b)
    }
    fn times(a: f64, b: f64) -> f64 {
        a + b
    }
}

/// `(+, *)` over non-negative reals: weighted model counting, probabilities.
#[derive(Debug, Clone, Copy)]
pub struct SumProduct;

impl Semiring for SumProduct {
    type Elem = f64;
    fn zero() -> f64 {
        0.0
    }
    fn one() -> f64 {
        1.0
    }
    fn plus(a: f64, b: f64) -> f64 {
        a + b
    }
    fn times(a: f64, b: f64) -> f64 {
        a * b
    }
}

/// `(+, *)` over integers: solution counting.
#[derive(Debug, Clone, Copy)]
pub struct Counting;

impl Semiring for Counting {
    type Elem = u128;
    fn zero() -> u128 {
        0
    }
    fn one() -> u128 {
        1
    }
    fn plus(a: u128, b: u128) -> u128 {
        a.saturating_add(b)
    }
    fn times(a: u128, b: u128) -> u128 {
        a.saturating_mul(b)
    }
}

/// Result of a semiring labeling.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiringLabels<E> {
    pub up: Vec<E>,
    pub down: Vec<E>,
    /// Aggregate over all root-terminal paths.
    pub total: E,
    /// `marginals[i][a]`: aggregate over the paths that set layer `i` to `a`.
    pub marginals: Vec<Vec<E>>,
}

/// Per-edge weights from per-value tables, for diagrams without long edges.
pub fn edge_weights<E: Copy>(m: &Mdd, table: &[Vec<E>]) -> Vec<E> {
    (0..m.num_edges())
        .map(|e| table[m.edge_layer(e)][m.edge(e).value as usize])
        .collect()
}

/// Label a diagram without long edges in semiring `S`.
pub fn semiring_label<S: Semiring>(m: &Mdd, weights: &[S::Elem]) -> Result<SemiringLabels<S::Elem>, MddError> {
    if m.is_empty() {
        return Err(MddError::Empty);
    }
    if m.has_long_edges() {
        return Err(MddError::Malformed("semiring labeling needs a diagram without long edges".into()));
    }
    let (up, down) = rayon::join(
        || {
            let mut up = vec![S::zero(); m.num_nodes()];
            up[m.root()] = S::one();
            for (e, edge) in m.edges().iter().enumerate() {
                let via = S::times(up[edge.src as usize], weights[e]);
                up[edge.dst as usize] = S::plus(up[edge.dst as usize], via);
            }
            up
        },
        || {
            let mut down = vec![S::zero(); m.num_nodes()];
            down[m.terminal()] = S::one();
            for (e, edge) in m.edges().iter().enumerate().rev() {
                let via = S::times(weights[e], down[edge.dst as usize]);
                down[edge.src as usize] = S::plus(down[edge.src as usize], via);
            }
            down
        },
    );
    let mut marginals: Vec<Vec<S::Elem>> = m.domains().sizes().iter().map(|&d| vec![S::zero(); d]).collect();
    for (e, edge) in m.edges().iter().enumerate() {
        let through = S::times(S::times(up[edge.src as usize], weights[e]), down[edge.dst as usize]);
        let slot = &mut marginals[m.edge_layer(e)][edge.value as usize];
        *slot = S::plus(*slot, through);
    }
    let total = up[m.terminal()];
    Ok(SemiringLabels {
        up,
        down,
        total,
        marginals,
    })
}

/// Unfold a diagram so that a cost with non-unary components becomes a
/// plain edge cost: every edge pays its unary cost plus every component
/// whose scope is completed at its layer. Nodes are split by the values of
/// earlier variables that still feed an unfinished component, then merged
/// again where their costed edges coincide. Variables are layers.
pub fn expand_nonunary(m: &Mdd, cost: &CostSpec, node_limit: usize) -> Result<(Mdd, EdgeCosts), MddError> {
    if cost.is_unary() {
        let costs = EdgeCosts::from_unary(m, cost.unary_table());
        return Ok((m.clone(), costs));
    }
    if m.is_empty() {
        return Ok((m.clone(), EdgeCosts(Vec::new())));
    }
    let m = m.expand();
    let n = m.num_vars();
    // pending[i]: variables before layer i whose values an unfinished component still needs
    let mut pending: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut finishing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, comp) in cost.components().iter().enumerate() {
        let Some(&last) = comp.scope.iter().max() else {
            continue;
        };
        finishing[last].push(k);
        for &v in &comp.scope {
            for slot in pending.iter_mut().take(last + 1).skip(v + 1) {
                slot.push(v);
            }
        }
    }
    for p in &mut pending {
        p.sort_unstable();
        p.dedup();
    }
    // constant components (empty scope) are charged on the first layer
    let constant: f64 = cost
        .components()
        .iter()
        .filter(|c| c.scope.is_empty())
        .map(|c| c.cost(|_| 0))
        .sum();

    let unary = cost.unary_table();
    let mut layers: Vec<u32> = vec![0];
    let mut states: Vec<(usize, Vec<usize>)> = vec![(m.root(), Vec::new())];
    let mut ids: HashMap<(usize, Vec<usize>), u32> = HashMap::new();
    ids.insert((m.root(), Vec::new()), 0);
    let mut edges: Vec<(Edge, f64)> = Vec::new();
    let terminal_id = u32::MAX;
    let mut cursor = 0;
    let mut values = vec![0usize; n];
    while cursor < states.len() {
        let (u, ref state) = states[cursor];
        let state = state.clone();
        let i = m.layer(u);
        for (&v, &a) in pending[i].iter().zip(&state) {
            values[v] = a;
        }
        for edge in m.out_edges(u) {
            let a = edge.value as usize;
            values[i] = a;
            let mut c = unary[i][a];
            if i == 0 {
                c += constant;
            }
            for &k in &finishing[i] {
                c += cost.components()[k].cost(|v| values[v]);
            }
            let dst = edge.dst as usize;
            let dst_id = if dst == m.terminal() {
                terminal_id
            } else {
                let next: Vec<usize> = pending[i + 1].iter().map(|&v| values[v]).collect();
                match ids.get(&(dst, next.clone())) {
                    Some(&id) => id,
                    None => {
                        if states.len() >= node_limit {
                            return Err(MddError::ExpansionLimit(node_limit));
                        }
                        let id = states.len() as u32;
                        ids.insert((dst, next.clone()), id);
                        states.push((dst, next));
                        layers.push(m.layer(dst) as u32);
                        id
                    }
                }
            };
            edges.push((
                Edge {
                    src: cursor as u32,
                    dst: dst_id,
                    value: edge.value,
                },
                c,
            ));
        }
        cursor += 1;
    }
    let terminal = layers.len() as u32;
    layers.push(n as u32);
    for (edge, _) in &mut edges {
        if edge.dst == terminal_id {
            edge.dst = terminal;
        }
    }
    merge_costed(m.domains().clone(), layers, edges)
}

/// Bottom-up merge of nodes whose (value, child, cost) edge sets coincide.
fn merge_costed(domains: LayerDomains, layers: Vec<u32>, edges: Vec<(Edge, f64)>) -> Result<(Mdd, EdgeCosts), MddError> {
    let count = layers.len();
    let n = domains.num_vars();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (k, (e, _)) in edges.iter().enumerate() {
        out[e.src as usize].push(k);
    }
    let mut by_layer: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (u, &l) in layers.iter().enumerate() {
        by_layer[l as usize].push(u);
    }
    let mut rep: Vec<u32> = (0..count as u32).collect();
    let mut keep = vec![false; count];
    keep[count - 1] = true;
    for j in (0..n).rev() {
        let mut seen: HashMap<Vec<(u32, u32, u64)>, u32> = HashMap::new();
        for &u in &by_layer[j] {
            let mut sig: Vec<(u32, u32, u64)> = out[u]
                .iter()
                .map(|&k| {
                    let (e, c) = edges[k];
                    (e.value, rep[e.dst as usize], c.to_bits())
                })
                .collect();
            sig.sort_unstable();
            match seen.get(&sig) {
                Some(&r) => rep[u] = r,
                None => {
                    seen.insert(sig, u as u32);
                    keep[u] = true;
                }
            }
        }
    }
    let mut kept_edges = Vec::new();
    let mut kept_costs = Vec::new();
    for (e, c) in edges {
        if keep[e.src as usize] {
            kept_edges.push(Edge {
                src: e.src,
                dst: rep[e.dst as usize],
                value: e.value,
            });
            kept_costs.push(c);
        }
    }
    let (mdd, origin) = Mdd::trimmed_tracked(domains, layers, kept_edges);
    let costs = EdgeCosts(origin.iter().map(|&k| kept_costs[k]).collect());
    Ok((mdd, costs))
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error("the cost takes {0} distinct values, above the cap")]
    CapExceeded(usize),
    #[error("position {0} is beyond the last layer")]
    Position(usize),
    #[error("the diagram has no solutions")]
    Empty,
    #[error(transparent)]
    Bdd(#[from] BddError),
}

/// A diagram with the cost as an extra variable.
#[derive(Debug, Clone)]
pub struct CostEncoded {
    /// Merged diagram over the original layers with the cost layer inserted.
    pub mdd: Mdd,
    /// Layer holding the cost variable.
    pub position: usize,
    /// Cost value of each value index of the cost variable, ascending.
    pub values: Vec<i64>,
}

/// Distinct costs of the solutions of `m` under an integer unary table.
pub fn solution_costs(m: &Mdd, table: &[Vec<i64>], cap: usize) -> Result<BTreeSet<i64>, EncodeError> {
    if m.is_empty() {
        return Ok(BTreeSet::new());
    }
    let m = m.expand();
    let mut sets: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); m.num_nodes()];
    sets[m.root()].insert(0);
    for u in 0..m.terminal() {
        let here = std::mem::take(&mut sets[u]);
        for edge in m.out_edges(u) {
            let c = table[m.layer(u)][edge.value as usize];
            let slot = &mut sets[edge.dst as usize];
            slot.extend(here.iter().map(|&s| s + c));
            if slot.len() > cap {
                return Err(EncodeError::CapExceeded(slot.len()));
            }
        }
    }
    Ok(std::mem::take(&mut sets[m.terminal()]))
}

/// Add a variable `y` at layer `position` constrained to equal the solution
/// cost, compiled through the BDD kernel: the diagram and the equation are
/// each turned into a BDD over the widened encoding, conjoined, and the
/// result is extracted and merged.
pub fn encode_cost_variable(
    m: &Mdd,
    table: &[Vec<i64>],
    position: usize,
    cap: usize,
    node_limit: usize,
) -> Result<CostEncoded, EncodeError> {
    let n = m.num_vars();
    if position > n {
        return Err(EncodeError::Position(position));
    }
    if m.is_empty() {
        return Err(EncodeError::Empty);
    }
    let values: Vec<i64> = solution_costs(m, table, cap)?.into_iter().collect();
    let merged = m.expand();
    let mut sizes = merged.domains().sizes().to_vec();
    sizes.insert(position, values.len());
    let enc = Encoding::new(&sizes);
    let shift = |layer: usize| if layer >= position { layer + 1 } else { layer };
    let mut bdd = Bdd::new(node_limit);

    // the diagram itself, node by node from the bottom
    let mut node_bdd = vec![BddRef::FALSE; merged.num_nodes()];
    node_bdd[merged.terminal()] = BddRef::TRUE;
    for u in (0..merged.terminal()).rev() {
        let layer = merged.layer(u);
        let mut children = vec![BddRef::FALSE; merged.domains().size(layer)];
        for edge in merged.out_edges(u) {
            children[edge.value as usize] = node_bdd[edge.dst as usize];
        }
        node_bdd[u] = bdd.value_switch(&enc, shift(layer), &children)?;
    }
    let shape = node_bdd[merged.root()];

    // y = sum of unary costs, by dynamic programming over partial sums
    let mut memo: HashMap<(usize, i64), BddRef> = HashMap::new();
    let equation = cost_equation(&mut bdd, &enc, table, &values, position, 0, 0, &mut memo)?;

    let dom = bdd.value_switch(&enc, position, &vec![BddRef::TRUE; values.len()])?;
    let both = bdd.and(shape, equation)?;
    let root = bdd.and(both, dom)?;
    let mdd = Mdd::from_bdd(&bdd, root, &enc).expand().merge();
    Ok(CostEncoded { mdd, position, values })
}

/// BDD of `y = sum c` from layer `layer` on. Before the `y` layer `state`
/// is the partial sum; after it, the remaining amount still to be paid.
#[allow(clippy::too_many_arguments)]
fn cost_equation(
    bdd: &mut Bdd,
    enc: &Encoding,
    table: &[Vec<i64>],
    values: &[i64],
    position: usize,
    layer: usize,
    state: i64,
    memo: &mut HashMap<(usize, i64), BddRef>,
) -> Result<BddRef, BddError> {
    if layer == enc.num_vars() {
        return Ok(if state == 0 { BddRef::TRUE } else { BddRef::FALSE });
    }
    if let Some(&r) = memo.get(&(layer, state)) {
        return Ok(r);
    }
    let mut children = Vec::with_capacity(enc.domain_size(layer));
    if layer == position {
        for &y in values {
            children.push(cost_equation(bdd, enc, table, values, position, layer + 1, y - state, memo)?);
        }
    } else {
        let var = if layer > position { layer - 1 } else { layer };
        for &c in &table[var] {
            let next = if layer < position { state + c } else { state - c };
            let child = if layer > position && next < 0 {
                BddRef::FALSE
            } else {
                cost_equation(bdd, enc, table, values, position, layer + 1, next, memo)?
            };
            children.push(child);
        }
    }
    let r = bdd.value_switch(enc, layer, &children)?;
    memo.insert((layer, state), r);
    Ok(r)
}
