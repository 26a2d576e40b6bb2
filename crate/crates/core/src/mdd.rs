//! Layered multi-valued decision diagrams.
//!
//! An [`Mdd`] is always kept in indexed form: node ids are sorted by layer,
//! the root is node 0 and the terminal is the last node. Out-edges are
//! stored contiguously per source and sorted by value, so iterating edges
//! in id order visits them in topological order of their sources.
//!
//! Edges may be long, skipping layers; a long edge stands for every value
//! of the current domain of each skipped layer. Current domains live in
//! [`LayerDomains`] so that restricted diagrams stay exact.

use std::collections::HashMap;
use std::ops::Range;

use thiserror::Error;

use crate::bdd::{Bdd, BddRef, Encoding};
use crate::model::{Assignment, ValidDomains};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MddError {
    #[error("malformed MDD: {0}")]
    Malformed(String),
    #[error("{0} solutions exceed the enumeration cap")]
    CapExceeded(u128),
    #[error("expansion exceeded {0} nodes")]
    ExpansionLimit(usize),
    #[error("the MDD has no solutions")]
    Empty,
}

/// Domain sizes per layer plus the values fixed by the current assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LayerDomains {
    sizes: Vec<usize>,
    fixed: Vec<Option<usize>>,
}

impl LayerDomains {
    pub fn full(sizes: &[usize]) -> Self {
        LayerDomains {
            sizes: sizes.to_vec(),
            fixed: vec![None; sizes.len()],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, j: usize) -> usize {
        self.sizes[j]
    }

    pub fn fixed(&self, j: usize) -> Option<usize> {
        self.fixed[j]
    }

    /// Values of the current domain of layer `j`.
    pub fn values(&self, j: usize) -> Range<usize> {
        match self.fixed[j] {
            Some(a) => a..a + 1,
            None => 0..self.sizes[j],
        }
    }

    pub fn count(&self, j: usize) -> usize {
        if self.fixed[j].is_some() {
            1
        } else {
            self.sizes[j]
        }
    }

    pub fn allows(&self, j: usize, a: usize) -> bool {
        a < self.sizes[j] && self.fixed[j].is_none_or(|f| f == a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: u32,
    pub dst: u32,
    pub value: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdd {
    domains: LayerDomains,
    layer: Vec<u32>,
    layer_start: Vec<usize>,
    edges: Vec<Edge>,
    out_start: Vec<usize>,
    in_edges: Vec<u32>,
    in_start: Vec<usize>,
}

impl Mdd {
    /// The diagram with no solutions: a root and a terminal, no edges.
    pub fn empty(domains: LayerDomains) -> Mdd {
        let n = domains.num_vars();
        Mdd::assemble(domains, vec![0, n as u32], Vec::new())
    }

    /// Build from a node layer table and an edge list. Node 0 is the root
    /// and must sit in layer 0; exactly one node sits in layer `n`, the
    /// terminal. Nodes that are unreachable from the root or cannot reach
    /// the terminal are dropped along with their edges.
    pub fn from_parts(domains: LayerDomains, layers: &[usize], edges: &[(usize, usize, usize)]) -> Result<Mdd, MddError> {
        let n = domains.num_vars();
        let bad = |m: String| Err(MddError::Malformed(m));
        if layers.first() != Some(&0) {
            return bad("node 0 must be the root in layer 0".into());
        }
        if layers.iter().any(|&l| l > n) {
            return bad(format!("layer beyond terminal layer {n}"));
        }
        if layers.iter().filter(|&&l| l == n).count() != 1 {
            return bad("exactly one terminal node is required".into());
        }
        if layers.iter().filter(|&&l| l == 0).count() != 1 {
            return bad("exactly one root node is required".into());
        }
        let mut seen = std::collections::HashSet::new();
        for &(s, d, a) in edges {
            if s >= layers.len() || d >= layers.len() {
                return bad(format!("edge ({s},{d}) references an unknown node"));
            }
            if layers[s] >= layers[d] {
                return bad(format!("edge ({s},{d}) does not go down the layers"));
            }
            if a >= domains.size(layers[s]) {
                return bad(format!("edge ({s},{d}) value {a} outside its layer domain"));
            }
            if !seen.insert((s, a)) {
                return bad(format!("node {s} has two edges with value {a}"));
            }
        }
        let mut live: Vec<Edge> = edges
            .iter()
            .filter(|&&(s, _, a)| domains.allows(layers[s], a))
            .map(|&(s, d, a)| Edge {
                src: s as u32,
                dst: d as u32,
                value: a as u32,
            })
            .collect();
        live.sort_by_key(|e| (e.src, e.value));
        let layers32: Vec<u32> = layers.iter().map(|&l| l as u32).collect();
        Ok(Mdd::trimmed(domains, layers32, live))
    }

    /// Keep only nodes on some root-terminal path, renumber by layer and index.
    fn trimmed(domains: LayerDomains, layers: Vec<u32>, edges: Vec<Edge>) -> Mdd {
        Mdd::trimmed_tracked(domains, layers, edges).0
    }

    /// As `trimmed`, also returning the input index of every output edge.
    pub(crate) fn trimmed_tracked(domains: LayerDomains, layers: Vec<u32>, edges: Vec<Edge>) -> (Mdd, Vec<usize>) {
        let count = layers.len();
        let n = domains.num_vars() as u32;
        let root = 0usize;
        let terminal = layers.iter().position(|&l| l == n).expect("terminal");
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); count];
        let mut inc: Vec<Vec<usize>> = vec![Vec::new(); count];
        for (k, e) in edges.iter().enumerate() {
            out[e.src as usize].push(k);
            inc[e.dst as usize].push(k);
        }
        let mut fwd = vec![false; count];
        let mut stack = vec![root];
        fwd[root] = true;
        while let Some(u) = stack.pop() {
            for &k in &out[u] {
                let v = edges[k].dst as usize;
                if !fwd[v] {
                    fwd[v] = true;
                    stack.push(v);
                }
            }
        }
        let mut bwd = vec![false; count];
        stack.push(terminal);
        bwd[terminal] = true;
        while let Some(v) = stack.pop() {
            for &k in &inc[v] {
                let u = edges[k].src as usize;
                if !bwd[u] {
                    bwd[u] = true;
                    stack.push(u);
                }
            }
        }
        if !fwd[terminal] {
            return (Mdd::empty(domains), Vec::new());
        }
        let keep: Vec<usize> = (0..count).filter(|&u| fwd[u] && bwd[u]).collect();
        let mut order = keep;
        order.sort_by_key(|&u| layers[u]);
        let mut new_id = vec![u32::MAX; count];
        for (i, &u) in order.iter().enumerate() {
            new_id[u] = i as u32;
        }
        let new_layers = order.iter().map(|&u| layers[u]).collect();
        let mut kept: Vec<(Edge, usize)> = edges
            .into_iter()
            .enumerate()
            .filter(|(_, e)| new_id[e.src as usize] != u32::MAX && new_id[e.dst as usize] != u32::MAX)
            .map(|(k, e)| {
                let edge = Edge {
                    src: new_id[e.src as usize],
                    dst: new_id[e.dst as usize],
                    value: e.value,
                };
                (edge, k)
            })
            .collect();
        kept.sort_by_key(|(e, _)| (e.src, e.value));
        let origin = kept.iter().map(|&(_, k)| k).collect();
        let new_edges = kept.into_iter().map(|(e, _)| e).collect();
        (Mdd::assemble(domains, new_layers, new_edges), origin)
    }

    /// Index an already trimmed, layer-sorted node table.
    fn assemble(domains: LayerDomains, layer: Vec<u32>, mut edges: Vec<Edge>) -> Mdd {
        let n = domains.num_vars();
        let count = layer.len();
        edges.sort_by_key(|e| (e.src, e.value));
        let mut layer_start = vec![0usize; n + 2];
        for &l in &layer {
            layer_start[l as usize + 1] += 1;
        }
        for j in 0..=n {
            layer_start[j + 1] += layer_start[j];
        }
        let mut out_start = vec![0usize; count + 1];
        let mut in_start = vec![0usize; count + 1];
        for e in &edges {
            out_start[e.src as usize + 1] += 1;
            in_start[e.dst as usize + 1] += 1;
        }
        for u in 0..count {
            out_start[u + 1] += out_start[u];
            in_start[u + 1] += in_start[u];
        }
        let mut fill = in_start.clone();
        let mut in_edges = vec![0u32; edges.len()];
        for (k, e) in edges.iter().enumerate() {
            in_edges[fill[e.dst as usize]] = k as u32;
            fill[e.dst as usize] += 1;
        }
        Mdd {
            domains,
            layer,
            layer_start,
            edges,
            out_start,
            in_edges,
            in_start,
        }
    }

    pub fn domains(&self) -> &LayerDomains {
        &self.domains
    }

    pub fn num_vars(&self) -> usize {
        self.domains.num_vars()
    }

    /// Node count, terminal included.
    pub fn num_nodes(&self) -> usize {
        self.layer.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn terminal(&self) -> usize {
        self.layer.len() - 1
    }

    /// True when the diagram encodes no solution.
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn layer(&self, u: usize) -> usize {
        self.layer[u] as usize
    }

    pub fn nodes_in_layer(&self, j: usize) -> Range<usize> {
        self.layer_start[j]..self.layer_start[j + 1]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    /// Ids of the out-edges of `u`, sorted by value.
    pub fn out_range(&self, u: usize) -> Range<usize> {
        self.out_start[u]..self.out_start[u + 1]
    }

    pub fn out_edges(&self, u: usize) -> &[Edge] {
        &self.edges[self.out_range(u)]
    }

    /// Ids of the in-edges of `v`.
    pub fn in_edge_ids(&self, v: usize) -> &[u32] {
        &self.in_edges[self.in_start[v]..self.in_start[v + 1]]
    }

    /// Layer whose value the edge sets.
    pub fn edge_layer(&self, e: usize) -> usize {
        self.layer[self.edges[e].src as usize] as usize
    }

    /// Layers skipped by edge `e`, empty for ordinary edges.
    pub fn skipped(&self, e: usize) -> Range<usize> {
        let edge = self.edges[e];
        self.layer[edge.src as usize] as usize + 1..self.layer[edge.dst as usize] as usize
    }

    pub fn has_long_edges(&self) -> bool {
        (0..self.edges.len()).any(|e| !self.skipped(e).is_empty())
    }

    /// Node layer table and edge triples, the inverse of [`Mdd::from_parts`].
    pub fn to_parts(&self) -> (Vec<usize>, Vec<(usize, usize, usize)>) {
        let layers = self.layer.iter().map(|&l| l as usize).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| (e.src as usize, e.dst as usize, e.value as usize))
            .collect();
        (layers, edges)
    }

    /// Number of solutions, saturating at `u128::MAX`.
    pub fn count(&self) -> u128 {
        if self.is_empty() {
            return 0;
        }
        let mut cnt = vec![0u128; self.num_nodes()];
        cnt[self.terminal()] = 1;
        for e in (0..self.edges.len()).rev() {
            let edge = self.edges[e];
            let mut c = cnt[edge.dst as usize];
            for j in self.skipped(e) {
                c = c.saturating_mul(self.domains.count(j) as u128);
            }
            cnt[edge.src as usize] = cnt[edge.src as usize].saturating_add(c);
        }
        cnt[0]
    }

    /// All solutions as value tuples by layer, in lexicographic order.
    pub fn solutions(&self, cap: u128) -> Result<Vec<Vec<usize>>, MddError> {
        let total = self.count();
        if total > cap {
            return Err(MddError::CapExceeded(total));
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut tuple = vec![0usize; self.num_vars()];
        self.enumerate_from(0, &mut tuple, &mut out);
        out.sort();
        Ok(out)
    }

    fn enumerate_from(&self, u: usize, tuple: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if u == self.terminal() {
            out.push(tuple.clone());
            return;
        }
        for e in self.out_range(u) {
            let edge = self.edges[e];
            tuple[self.layer(u)] = edge.value as usize;
            self.enumerate_skipped(e, self.skipped(e), tuple, out);
        }
    }

    fn enumerate_skipped(&self, e: usize, mut rest: Range<usize>, tuple: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match rest.next() {
            None => self.enumerate_from(self.edges[e].dst as usize, tuple, out),
            Some(j) => {
                for b in self.domains.values(j) {
                    tuple[j] = b;
                    self.enumerate_skipped(e, rest.clone(), tuple, out);
                }
            }
        }
    }

    /// Valid domains without costs: every value on some root-terminal path.
    pub fn valid_domains(&self) -> ValidDomains {
        let n = self.num_vars();
        let mut masks: Vec<Vec<bool>> = (0..n).map(|j| vec![false; self.domains.size(j)]).collect();
        let mut skipped = vec![false; n];
        for e in 0..self.edges.len() {
            masks[self.edge_layer(e)][self.edges[e].value as usize] = true;
            for j in self.skipped(e) {
                skipped[j] = true;
            }
        }
        for j in 0..n {
            if skipped[j] {
                for b in self.domains.values(j) {
                    masks[j][b] = true;
                }
            }
        }
        ValidDomains::from_masks(&masks)
    }

    /// Restrict to the solutions extending `rho` (variables are layers).
    pub fn restrict(&self, rho: &Assignment) -> Mdd {
        self.restrict_tracked(rho).0
    }

    /// As [`Mdd::restrict`], also returning for every surviving edge the id
    /// of the edge it came from.
    pub fn restrict_tracked(&self, rho: &Assignment) -> (Mdd, Vec<usize>) {
        let mut domains = self.domains.clone();
        for (var, a) in rho.iter() {
            if var >= self.num_vars() || !domains.allows(var, a) {
                return (Mdd::empty(domains), Vec::new());
            }
            domains.fixed[var] = Some(a);
        }
        if self.is_empty() {
            return (Mdd::empty(domains), Vec::new());
        }
        let count = self.num_nodes();
        let alive = |e: usize| domains.allows(self.edge_layer(e), self.edges[e].value as usize);
        let mut fwd = vec![false; count];
        fwd[0] = true;
        for e in 0..self.edges.len() {
            let edge = self.edges[e];
            if fwd[edge.src as usize] && alive(e) {
                fwd[edge.dst as usize] = true;
            }
        }
        let mut bwd = vec![false; count];
        bwd[self.terminal()] = true;
        for e in (0..self.edges.len()).rev() {
            let edge = self.edges[e];
            if bwd[edge.dst as usize] && alive(e) {
                bwd[edge.src as usize] = true;
            }
        }
        if !fwd[self.terminal()] {
            return (Mdd::empty(domains), Vec::new());
        }
        let mut new_id = vec![u32::MAX; count];
        let mut layers = Vec::new();
        for u in 0..count {
            if fwd[u] && bwd[u] {
                new_id[u] = layers.len() as u32;
                layers.push(self.layer[u]);
            }
        }
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            let (s, d) = (new_id[edge.src as usize], new_id[edge.dst as usize]);
            if s != u32::MAX && d != u32::MAX && alive(e) {
                edges.push(Edge {
                    src: s,
                    dst: d,
                    value: edge.value,
                });
                origin.push(e);
            }
        }
        // edges stay sorted by (src, value) since the renumbering is monotone
        (Mdd::assemble(domains, layers, edges), origin)
    }

    /// Replace every long edge by a chain of nodes that take all current
    /// values of the skipped layers. Chains towards the same node are shared.
    pub fn expand(&self) -> Mdd {
        if !self.has_long_edges() {
            return self.clone();
        }
        let mut layers = self.layer.clone();
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut chain: HashMap<(u32, usize), u32> = HashMap::new();
        for e in 0..self.edges.len() {
            let edge = self.edges[e];
            let span = self.skipped(e);
            if span.is_empty() {
                edges.push(edge);
                continue;
            }
            // build the chain from the bottom up: chain(v, j) -> chain(v, j + 1)
            let mut next = edge.dst;
            for j in span.clone().rev() {
                next = match chain.get(&(edge.dst, j)) {
                    Some(&c) => c,
                    None => {
                        let c = layers.len() as u32;
                        layers.push(j as u32);
                        for b in self.domains.values(j) {
                            edges.push(Edge {
                                src: c,
                                dst: next,
                                value: b as u32,
                            });
                        }
                        chain.insert((edge.dst, j), c);
                        c
                    }
                };
            }
            edges.push(Edge {
                src: edge.src,
                dst: next,
                value: edge.value,
            });
        }
        Mdd::trimmed(self.domains.clone(), layers, edges)
    }

    /// Merge isomorphic nodes, bottom-up by layer.
    pub fn merge(&self) -> Mdd {
        self.rebuild(false)
    }

    /// Merge isomorphic nodes and remove redundant ones (nodes whose edges
    /// take every current value of their layer to one child). The root is
    /// always kept, so the result may contain long edges.
    pub fn reduce(&self) -> Mdd {
        self.rebuild(true)
    }

    fn rebuild(&self, eliminate: bool) -> Mdd {
        if self.is_empty() {
            return self.clone();
        }
        let count = self.num_nodes();
        let n = self.num_vars();
        // rep[u]: node of the input that u is replaced by
        let mut rep: Vec<u32> = (0..count as u32).collect();
        let mut keep = vec![false; count];
        keep[self.terminal()] = true;
        for j in (0..n).rev() {
            let mut signatures: HashMap<Vec<(u32, u32)>, u32> = HashMap::new();
            for u in self.nodes_in_layer(j) {
                let sig: Vec<(u32, u32)> = self.out_edges(u).iter().map(|e| (e.value, rep[e.dst as usize])).collect();
                if eliminate && j > 0 && sig.len() == self.domains.count(j) && sig.iter().all(|s| s.1 == sig[0].1) {
                    rep[u] = sig[0].1;
                    continue;
                }
                match signatures.get(&sig) {
                    Some(&r) => rep[u] = r,
                    None => {
                        signatures.insert(sig, u as u32);
                        keep[u] = true;
                    }
                }
            }
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| keep[e.src as usize])
            .map(|e| Edge {
                src: e.src,
                dst: rep[e.dst as usize],
                value: e.value,
            })
            .collect();
        Mdd::trimmed(self.domains.clone(), self.layer.clone(), edges)
    }

    /// True if both diagrams have the same domains and the same shape up to
    /// node renaming. Both should be merged (or both reduced).
    pub fn same_structure(&self, other: &Mdd) -> bool {
        if self.domains != other.domains
            || self.num_nodes() != other.num_nodes()
            || self.num_edges() != other.num_edges()
        {
            return false;
        }
        if self.is_empty() || other.is_empty() {
            return self.is_empty() == other.is_empty();
        }
        let mut ids: HashMap<(u32, Vec<(u32, u32)>), u32> = HashMap::new();
        let a = canonical_ids(self, &mut ids);
        let b = canonical_ids(other, &mut ids);
        a[0] == b[0]
    }

    /// Extract an MDD from a BDD built with the clustered log encoding.
    /// Every BDD node entered from a previous block becomes an MDD node; a
    /// root at layer 0 is added when the BDD root skips the first variable.
    pub fn from_bdd(bdd: &Bdd, root: BddRef, enc: &Encoding) -> Mdd {
        let n = enc.num_vars();
        let domains = LayerDomains::full(enc.domain_sizes());
        if root == BddRef::FALSE {
            return Mdd::empty(domains);
        }
        let layer_of = |f: BddRef| bdd.var(f).map_or(n, |bit| enc.cvar(bit));
        let mut ids: HashMap<BddRef, u32> = HashMap::new();
        let mut layers: Vec<u32> = Vec::new();
        let mut edges = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        let id_of = |f: BddRef,
                         ids: &mut HashMap<BddRef, u32>,
                         layers: &mut Vec<u32>,
                         queue: &mut std::collections::VecDeque<BddRef>|
         -> u32 {
            *ids.entry(f).or_insert_with(|| {
                layers.push(layer_of(f) as u32);
                queue.push_back(f);
                (layers.len() - 1) as u32
            })
        };
        if layer_of(root) > 0 {
            layers.push(0);
            let child = id_of(root, &mut ids, &mut layers, &mut queue);
            for a in 0..enc.domain_size(0) {
                edges.push(Edge {
                    src: 0,
                    dst: child,
                    value: a as u32,
                });
            }
        } else {
            id_of(root, &mut ids, &mut layers, &mut queue);
        }
        while let Some(f) = queue.pop_front() {
            if f.is_terminal() {
                continue;
            }
            let u = ids[&f];
            let i = layer_of(f);
            for a in 0..enc.domain_size(i) {
                let g = bdd.traverse(enc, f, i, a);
                if g != BddRef::FALSE {
                    let v = id_of(g, &mut ids, &mut layers, &mut queue);
                    edges.push(Edge {
                        src: u,
                        dst: v,
                        value: a as u32,
                    });
                }
            }
        }
        Mdd::trimmed(domains, layers, edges)
    }

    /// Merged MDD whose solutions are the distinct `rows`.
    pub fn from_rows(sizes: &[usize], rows: &[Vec<usize>]) -> Result<Mdd, MddError> {
        let n = sizes.len();
        let domains = LayerDomains::full(sizes);
        let mut layers = vec![0u32];
        let mut children: Vec<HashMap<u32, u32>> = vec![HashMap::new()];
        let mut edges = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n || row.iter().zip(sizes).any(|(&a, &d)| a >= d) {
                return Err(MddError::Malformed(format!("row {} does not fit the domains", r + 1)));
            }
        }
        // terminal is node 1
        layers.push(n as u32);
        children.push(HashMap::new());
        for row in rows {
            let mut u = 0u32;
            for (j, &a) in row.iter().enumerate() {
                let next = match children[u as usize].get(&(a as u32)) {
                    Some(&v) => v,
                    None => {
                        let v = if j + 1 == n {
                            1
                        } else {
                            layers.push(j as u32 + 1);
                            children.push(HashMap::new());
                            (layers.len() - 1) as u32
                        };
                        children[u as usize].insert(a as u32, v);
                        edges.push(Edge {
                            src: u,
                            dst: v,
                            value: a as u32,
                        });
                        v
                    }
                };
                u = next;
            }
        }
        Ok(Mdd::trimmed(domains, layers, edges).merge())
    }
}

fn canonical_ids(m: &Mdd, ids: &mut HashMap<(u32, Vec<(u32, u32)>), u32>) -> Vec<u32> {
    let mut canon = vec![0u32; m.num_nodes()];
    for u in (0..m.num_nodes()).rev() {
        let sig: Vec<(u32, u32)> = m.out_edges(u).iter().map(|e| (e.value, canon[e.dst as usize])).collect();
        let next = ids.len() as u32;
        canon[u] = *ids.entry((m.layer[u], sig)).or_insert(next);
    }
    canon
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdd::{build_bdd, DEFAULT_NODE_LIMIT};
    use crate::model::{brute_force_solutions, tshirt, CspModel, Variable, DEFAULT_ENUMERATION_CAP};

    fn tshirt_mdd() -> Mdd {
        let (b, root, enc) = build_bdd(&tshirt(), DEFAULT_NODE_LIMIT).unwrap();
        Mdd::from_bdd(&b, root, &enc)
    }

    fn check_indexed(m: &Mdd) {
        assert_eq!(m.layer(0), 0);
        assert_eq!(m.layer(m.terminal()), m.num_vars());
        for u in 1..m.num_nodes() {
            assert!(m.layer(u - 1) <= m.layer(u));
        }
        for e in m.edges() {
            assert!(e.src < e.dst);
            assert!(m.layer(e.src as usize) < m.layer(e.dst as usize));
        }
        for u in 1..m.num_nodes() {
            assert!(!m.in_edge_ids(u).is_empty());
        }
        for u in 0..m.terminal() {
            assert!(!m.out_edges(u).is_empty() || m.is_empty());
        }
    }

    #[test]
    fn tshirt_pipeline_keeps_solutions() {
        let expected = brute_force_solutions(&tshirt(), DEFAULT_ENUMERATION_CAP).unwrap();
        let extracted = tshirt_mdd();
        let merged = extracted.expand().merge();
        let reduced = merged.reduce();
        for m in [&extracted, &merged, &reduced] {
            check_indexed(m);
            assert_eq!(m.count(), 11);
            assert_eq!(m.solutions(100).unwrap(), expected);
        }
        assert!(!merged.has_long_edges());
        assert!(merged.merge().same_structure(&merged));
        assert!(reduced.num_nodes() <= merged.num_nodes());
    }

    #[test]
    fn unconstrained_booleans_merge_to_a_chain() {
        let m = CspModel::new((0..10).map(|i| Variable::with_size(format!("b{i}"), 2)).collect()).unwrap();
        let (b, root, enc) = build_bdd(&m, DEFAULT_NODE_LIMIT).unwrap();
        let merged = Mdd::from_bdd(&b, root, &enc).expand().merge();
        assert_eq!((merged.num_nodes(), merged.num_edges()), (11, 20));
        assert_eq!(merged.count(), 1024);
        let reduced = merged.reduce();
        assert_eq!(reduced.num_nodes(), 2);
        assert_eq!(reduced.count(), 1024);
    }

    #[test]
    fn single_variable_true_bdd() {
        let m = CspModel::new(vec![Variable::with_size("a", 3)]).unwrap();
        let (b, root, enc) = build_bdd(&m, DEFAULT_NODE_LIMIT).unwrap();
        let mdd = Mdd::from_bdd(&b, root, &enc);
        assert_eq!((mdd.num_nodes(), mdd.num_edges()), (2, 3));
        assert_eq!((mdd.root(), mdd.terminal()), (0, 1));
    }

    #[test]
    fn restrict_examples() {
        let m = tshirt_mdd().expand().merge();
        let r = m.restrict(&Assignment::from_pairs([(1, 0)]));
        assert_eq!(r.solutions(10).unwrap(), vec![vec![0, 0, 0]]);
        assert_eq!(r.valid_domains(), ValidDomains::from_slices(&[&[0], &[0], &[0]]));
        let r = m.restrict(&Assignment::from_pairs([(1, 0), (2, 1)]));
        assert!(r.is_empty());
        assert_eq!(r.count(), 0);
        assert!(r.valid_domains().has_empty());
        assert!(m.restrict(&Assignment::new()).same_structure(&m));
    }

    #[test]
    fn restrict_respects_long_edges() {
        let full = Mdd::from_rows(&[2, 3, 2], &all_rows(&[2, 3, 2])).unwrap().reduce();
        assert!(full.has_long_edges());
        let r = full.restrict(&Assignment::from_pairs([(1, 2)]));
        assert_eq!(r.count(), 4);
        assert!(r.solutions(10).unwrap().iter().all(|s| s[1] == 2));
        assert_eq!(r.valid_domains(), ValidDomains::from_slices(&[&[0, 1], &[2], &[0, 1]]));
        assert!(r.expand().merge().same_structure(&full.expand().merge().restrict(&Assignment::from_pairs([(1, 2)])).merge()));
    }

    #[test]
    fn expand_long_edge_over_three_values() {
        let domains = LayerDomains::full(&[2, 3, 2]);
        let m = Mdd::from_parts(domains, &[0, 2, 3], &[(0, 1, 0), (1, 2, 0), (1, 2, 1)]).unwrap();
        assert_eq!(m.count(), 6);
        let x = m.expand();
        assert!(!x.has_long_edges());
        assert_eq!(x.num_nodes(), 4);
        assert_eq!(x.count(), 6);
    }

    #[test]
    fn rows_union() {
        let rows = brute_force_solutions(&tshirt(), DEFAULT_ENUMERATION_CAP).unwrap();
        let mut doubled = rows.clone();
        doubled.extend(rows.iter().cloned());
        let a = Mdd::from_rows(&[4, 3, 2], &rows).unwrap();
        let b = Mdd::from_rows(&[4, 3, 2], &doubled).unwrap();
        assert!(a.same_structure(&b));
        assert!(a.same_structure(&tshirt_mdd().expand().merge()));
        let single = Mdd::from_rows(&[4, 3, 2], &[vec![1, 2, 1]]).unwrap();
        assert_eq!((single.num_nodes(), single.num_edges()), (4, 3));
    }

    #[test]
    fn parts_round_trip() {
        let m = tshirt_mdd().expand().merge();
        let (layers, edges) = m.to_parts();
        let back = Mdd::from_parts(m.domains().clone(), &layers, &edges).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn malformed_parts_are_rejected() {
        let d = LayerDomains::full(&[2]);
        assert!(Mdd::from_parts(d.clone(), &[0, 1], &[(0, 1, 2)]).is_err());
        assert!(Mdd::from_parts(d.clone(), &[0, 1], &[(0, 1, 0), (0, 1, 0)]).is_err());
        assert!(Mdd::from_parts(d.clone(), &[1, 0], &[]).is_err());
        assert!(Mdd::from_parts(d, &[0, 1], &[(1, 0, 0)]).is_err());
    }

    fn all_rows(sizes: &[usize]) -> Vec<Vec<usize>> {
        let mut rows = vec![vec![]];
        for &d in sizes {
            rows = rows
                .into_iter()
                .flat_map(|r: Vec<usize>| {
                    (0..d).map(move |a| {
                        let mut r = r.clone();
                        r.push(a);
                        r
                    })
                })
                .collect();
        }
        rows
    }
}
