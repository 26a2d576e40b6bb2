//! A small reduced ordered BDD package and the log encoding of
//! finite-domain variables.
//!
//! Each CSP variable `i` with `d_i` values owns `k_i = ceil(log2 d_i)` bits
//! (one bit when `d_i = 1`). Bits of one variable are contiguous and ordered
//! least significant first, and variables follow declaration order, so a
//! model should be put in layer order (`CspModel::in_layer_order`) before
//! it is compiled.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{CspModel, ModelError};

/// Default cap on the node store.
pub const DEFAULT_NODE_LIMIT: usize = 10_000_000;

/// Cap on the scope product of a single expression constraint.
pub const SCOPE_TUPLE_CAP: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BddError {
    #[error("BDD node store exceeded {0} nodes")]
    NodeLimit(usize),
    #[error("value {value} is outside the domain of variable {var}")]
    OutOfDomain { var: usize, value: usize },
    #[error("{0} satisfying assignments exceed the cap")]
    CapExceeded(u128),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Reference to a node in a [`Bdd`] store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BddRef(pub u32);

impl BddRef {
    pub const FALSE: BddRef = BddRef(0);
    pub const TRUE: BddRef = BddRef(1);

    pub fn is_terminal(self) -> bool {
        self.0 < 2
    }
}

const TERMINAL_VAR: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    low: BddRef,
    high: BddRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
    Not,
}

/// Bit layout of the log encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    widths: Vec<usize>,
}

impl Encoding {
    pub fn new(domain_sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(domain_sizes.len());
        let mut widths = Vec::with_capacity(domain_sizes.len());
        let mut next = 0;
        for &d in domain_sizes {
            let k = bits_for(d);
            offsets.push(next);
            widths.push(k);
            next += k;
        }
        Encoding {
            sizes: domain_sizes.to_vec(),
            offsets,
            widths,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.sizes.len()
    }

    pub fn domain_size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    pub fn domain_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn total_bits(&self) -> usize {
        self.offsets.last().map_or(0, |o| o + self.widths[self.widths.len() - 1])
    }

    /// Index of the first bit of variable `i`.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn width(&self, i: usize) -> usize {
        self.widths[i]
    }

    /// The CSP variable a bit belongs to.
    pub fn cvar(&self, bit: usize) -> usize {
        self.offsets.partition_point(|&o| o <= bit) - 1
    }

    /// Position of a bit within its variable's block, from 0.
    pub fn pos(&self, bit: usize) -> usize {
        bit - self.offsets[self.cvar(bit)]
    }

    /// Bits of value `a` of variable `i`, least significant first.
    pub fn encode_value(&self, i: usize, a: usize) -> Result<Vec<bool>, BddError> {
        if a >= self.sizes[i] {
            return Err(BddError::OutOfDomain { var: i, value: a });
        }
        Ok((0..self.widths[i]).map(|j| (a >> j) & 1 == 1).collect())
    }
}

fn bits_for(d: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < d {
        k += 1;
    }
    k.max(1)
}

/// Hash-consed node store. Nodes are never freed; a store lives for one
/// compilation.
#[derive(Debug, Clone)]
pub struct Bdd {
    nodes: Vec<Node>,
    unique: HashMap<Node, BddRef>,
    cache: HashMap<(Op, BddRef, BddRef), BddRef>,
    limit: usize,
}

impl Default for Bdd {
    fn default() -> Self {
        Bdd::new(DEFAULT_NODE_LIMIT)
    }
}

impl Bdd {
    pub fn new(limit: usize) -> Self {
        let terminal = |v| Node {
            var: TERMINAL_VAR,
            low: BddRef(v),
            high: BddRef(v),
        };
        Bdd {
            nodes: vec![terminal(0), terminal(1)],
            unique: HashMap::new(),
            cache: HashMap::new(),
            limit,
        }
    }

    /// Nodes in the store, terminals included.
    pub fn store_size(&self) -> usize {
        self.nodes.len()
    }

    /// Boolean variable tested at `f`, `None` for terminals.
    pub fn var(&self, f: BddRef) -> Option<usize> {
        let v = self.nodes[f.0 as usize].var;
        (v != TERMINAL_VAR).then_some(v as usize)
    }

    pub fn low(&self, f: BddRef) -> BddRef {
        self.nodes[f.0 as usize].low
    }

    pub fn high(&self, f: BddRef) -> BddRef {
        self.nodes[f.0 as usize].high
    }

    fn level(&self, f: BddRef) -> u32 {
        self.nodes[f.0 as usize].var
    }

    /// The node `var ? high : low`, reduced and shared.
    pub fn mk(&mut self, var: usize, low: BddRef, high: BddRef) -> Result<BddRef, BddError> {
        if low == high {
            return Ok(low);
        }
        debug_assert!(self.level(low) > var as u32 && self.level(high) > var as u32);
        let node = Node {
            var: var as u32,
            low,
            high,
        };
        if let Some(&r) = self.unique.get(&node) {
            return Ok(r);
        }
        if self.nodes.len() >= self.limit {
            return Err(BddError::NodeLimit(self.limit));
        }
        let r = BddRef(self.nodes.len() as u32);
        self.nodes.push(node);
        self.unique.insert(node, r);
        Ok(r)
    }

    /// The literal `bit` (or its negation).
    pub fn literal(&mut self, bit: usize, positive: bool) -> Result<BddRef, BddError> {
        if positive {
            self.mk(bit, BddRef::FALSE, BddRef::TRUE)
        } else {
            self.mk(bit, BddRef::TRUE, BddRef::FALSE)
        }
    }

    pub fn and(&mut self, f: BddRef, g: BddRef) -> Result<BddRef, BddError> {
        self.apply(Op::And, f, g)
    }

    pub fn or(&mut self, f: BddRef, g: BddRef) -> Result<BddRef, BddError> {
        self.apply(Op::Or, f, g)
    }

    pub fn negate(&mut self, f: BddRef) -> Result<BddRef, BddError> {
        self.apply(Op::Not, f, BddRef::FALSE)
    }

    /// Drop memoized apply results.
    pub fn clear_cache(&mut self) {
        self.cache.clear();
    }

    fn apply(&mut self, op: Op, f: BddRef, g: BddRef) -> Result<BddRef, BddError> {
        match op {
            Op::And => {
                if f == BddRef::FALSE || g == BddRef::FALSE {
                    return Ok(BddRef::FALSE);
                }
                if f == BddRef::TRUE || f == g {
                    return Ok(g);
                }
                if g == BddRef::TRUE {
                    return Ok(f);
                }
            }
            Op::Or => {
                if f == BddRef::TRUE || g == BddRef::TRUE {
                    return Ok(BddRef::TRUE);
                }
                if f == BddRef::FALSE || f == g {
                    return Ok(g);
                }
                if g == BddRef::FALSE {
                    return Ok(f);
                }
            }
            Op::Not => {
                if f.is_terminal() {
                    return Ok(BddRef(1 - f.0));
                }
            }
        }
        let (f, g) = if op != Op::Not && f > g { (g, f) } else { (f, g) };
        if let Some(&r) = self.cache.get(&(op, f, g)) {
            return Ok(r);
        }
        let top = self.level(f).min(if op == Op::Not { TERMINAL_VAR } else { self.level(g) });
        let cof = |bdd: &Bdd, h: BddRef| {
            if bdd.level(h) == top {
                (bdd.low(h), bdd.high(h))
            } else {
                (h, h)
            }
        };
        let (f0, f1) = cof(self, f);
        let (g0, g1) = if op == Op::Not { (g, g) } else { cof(self, g) };
        let low = self.apply(op, f0, g0)?;
        let high = self.apply(op, f1, g1)?;
        let r = self.mk(top as usize, low, high)?;
        self.cache.insert((op, f, g), r);
        Ok(r)
    }

    /// Decision over the bits of variable `i`: value `a` leads to
    /// `children[a]`, unused codes lead to FALSE. Every child must test only
    /// bits after variable `i`.
    pub fn value_switch(&mut self, enc: &Encoding, i: usize, children: &[BddRef]) -> Result<BddRef, BddError> {
        debug_assert_eq!(children.len(), enc.domain_size(i));
        self.switch_bits(enc.offset(i), enc.width(i), 0, 0, children)
    }

    fn switch_bits(
        &mut self,
        offset: usize,
        width: usize,
        j: usize,
        prefix: usize,
        children: &[BddRef],
    ) -> Result<BddRef, BddError> {
        if j == width {
            return Ok(children.get(prefix).copied().unwrap_or(BddRef::FALSE));
        }
        if prefix >= children.len() {
            return Ok(BddRef::FALSE);
        }
        let low = self.switch_bits(offset, width, j + 1, prefix, children)?;
        let high = self.switch_bits(offset, width, j + 1, prefix | (1 << j), children)?;
        self.mk(offset + j, low, high)
    }

    /// Node reached from `f` by reading the bits of value `a` of variable
    /// `i`: low on a 0 bit, high on a 1 bit, skipping bits that `f` does
    /// not test. Stops at the first node outside variable `i`'s block.
    pub fn traverse(&self, enc: &Encoding, f: BddRef, i: usize, a: usize) -> BddRef {
        let (start, end) = (enc.offset(i), enc.offset(i) + enc.width(i));
        let mut u = f;
        while let Some(bit) = self.var(u) {
            if bit >= end {
                break;
            }
            debug_assert!(bit >= start);
            u = if (a >> (bit - start)) & 1 == 1 { self.high(u) } else { self.low(u) };
        }
        u
    }

    /// Non-terminal nodes reachable from `root`, in discovery order with `root` first.
    pub fn reachable(&self, root: BddRef) -> Vec<BddRef> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(f) = stack.pop() {
            if f.is_terminal() || seen[f.0 as usize] {
                continue;
            }
            seen[f.0 as usize] = true;
            order.push(f);
            stack.push(self.high(f));
            stack.push(self.low(f));
        }
        order
    }

    /// One line per reachable node, `id var low high`, root first.
    pub fn dump(&self, root: BddRef) -> String {
        if root.is_terminal() {
            return format!("{}\n", root.0);
        }
        let mut out = String::new();
        for f in self.reachable(root) {
            let n = self.nodes[f.0 as usize];
            out.push_str(&format!("{} {} {} {}\n", f.0, n.var, n.low.0, n.high.0));
        }
        out
    }

    /// Satisfying assignments of `root` decoded through `enc`, in
    /// lexicographic order. Bit patterns outside the domains are skipped.
    pub fn decoded_solutions(&self, enc: &Encoding, root: BddRef, cap: u128) -> Result<Vec<Vec<usize>>, BddError> {
        let mut out = Vec::new();
        let mut values = vec![0usize; enc.num_vars()];
        self.decode_from(enc, root, 0, &mut values, &mut out, cap)?;
        out.sort();
        Ok(out)
    }

    fn decode_from(
        &self,
        enc: &Encoding,
        f: BddRef,
        i: usize,
        values: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: u128,
    ) -> Result<(), BddError> {
        if f == BddRef::FALSE {
            return Ok(());
        }
        if i == enc.num_vars() {
            debug_assert_eq!(f, BddRef::TRUE);
            if out.len() as u128 >= cap {
                return Err(BddError::CapExceeded(cap + 1));
            }
            out.push(values.clone());
            return Ok(());
        }
        for a in 0..enc.domain_size(i) {
            let g = self.traverse(enc, f, i, a);
            values[i] = a;
            self.decode_from(enc, g, i + 1, values, out, cap)?;
        }
        Ok(())
    }
}

/// BDD of the set of allowed scope tuples, over variables in declaration order.
fn tuples_bdd(
    bdd: &mut Bdd,
    enc: &Encoding,
    scope: &[usize],
    tuples: &[Vec<usize>],
) -> Result<BddRef, BddError> {
    // sort the scope into encoding order and permute the tuples to match
    let mut perm: Vec<usize> = (0..scope.len()).collect();
    perm.sort_by_key(|&p| scope[p]);
    let sorted_scope: Vec<usize> = perm.iter().map(|&p| scope[p]).collect();
    let mut rows: Vec<Vec<usize>> = tuples.iter().map(|t| perm.iter().map(|&p| t[p]).collect()).collect();
    rows.sort();
    rows.dedup();
    build_rows(bdd, enc, &sorted_scope, &rows, 0)
}

fn build_rows(
    bdd: &mut Bdd,
    enc: &Encoding,
    scope: &[usize],
    rows: &[Vec<usize>],
    depth: usize,
) -> Result<BddRef, BddError> {
    if rows.is_empty() {
        return Ok(BddRef::FALSE);
    }
    if depth == scope.len() {
        return Ok(BddRef::TRUE);
    }
    let var = scope[depth];
    let mut children = vec![BddRef::FALSE; enc.domain_size(var)];
    let mut start = 0;
    while start < rows.len() {
        let a = rows[start][depth];
        let end = start + rows[start..].partition_point(|r| r[depth] == a);
        children[a] = build_rows(bdd, enc, scope, &rows[start..end], depth + 1)?;
        start = end;
    }
    bdd.value_switch(enc, var, &children)
}

/// Compile a model into a BDD: domain constraints first, then every
/// constraint in declaration order, conjoined.
pub fn build_bdd(model: &CspModel, limit: usize) -> Result<(Bdd, BddRef, Encoding), BddError> {
    let enc = Encoding::new(&model.domain_sizes());
    let mut bdd = Bdd::new(limit);
    let mut root = BddRef::TRUE;
    for i in (0..enc.num_vars()).rev() {
        let d = enc.domain_size(i);
        if d < (1 << enc.width(i)) {
            let dom = bdd.value_switch(&enc, i, &vec![BddRef::TRUE; d])?;
            root = bdd.and(dom, root)?;
        }
    }
    for c in model.constraints() {
        let tuples = c.allowed_tuples(&model.domain_sizes(), SCOPE_TUPLE_CAP)?;
        let f = if c.scope().is_empty() {
            if tuples.is_empty() {
                BddRef::FALSE
            } else {
                BddRef::TRUE
            }
        } else {
            tuples_bdd(&mut bdd, &enc, c.scope(), &tuples)?
        };
        root = bdd.and(root, f)?;
        if root == BddRef::FALSE {
            break;
        }
    }
    bdd.clear_cache();
    Ok((bdd, root, enc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{brute_force_solutions, tshirt, CspModel, Variable, DEFAULT_ENUMERATION_CAP};

    #[test]
    fn encoding_is_lsb_first() {
        let enc = Encoding::new(&[4, 3, 2]);
        assert_eq!(enc.encode_value(0, 2).unwrap(), vec![false, true]);
        assert_eq!(enc.encode_value(1, 0).unwrap(), vec![false, false]);
        assert!(enc.encode_value(1, 3).is_err());
        assert_eq!(enc.total_bits(), 5);
        assert_eq!((enc.cvar(3), enc.pos(3)), (1, 1));
        assert_eq!((enc.cvar(4), enc.pos(4)), (2, 0));
        assert_eq!(Encoding::new(&[1]).width(0), 1);
    }

    #[test]
    fn apply_identities() {
        let mut b = Bdd::default();
        let x = b.literal(0, true).unwrap();
        let y = b.literal(1, true).unwrap();
        let f = b.or(x, y).unwrap();
        assert_eq!(b.and(BddRef::TRUE, f).unwrap(), f);
        let nf = b.negate(f).unwrap();
        assert_eq!(b.or(f, nf).unwrap(), BddRef::TRUE);
        assert_eq!(b.and(f, nf).unwrap(), BddRef::FALSE);
        // canonicity: x or y built the other way round is the same node
        let g0 = b.negate(x).unwrap();
        let g1 = b.negate(y).unwrap();
        let g = b.and(g0, g1).unwrap();
        assert_eq!(b.negate(g).unwrap(), f);
    }

    #[test]
    fn tshirt_compiles_to_eleven_solutions() {
        let m = tshirt();
        let (b, root, enc) = build_bdd(&m, DEFAULT_NODE_LIMIT).unwrap();
        let decoded = b.decoded_solutions(&enc, root, 1000).unwrap();
        assert_eq!(decoded, brute_force_solutions(&m, DEFAULT_ENUMERATION_CAP).unwrap());
        for f in b.reachable(root) {
            let v = b.var(f).unwrap();
            for child in [b.low(f), b.high(f)] {
                if let Some(cv) = b.var(child) {
                    assert!(cv > v);
                    assert!(enc.cvar(cv) >= enc.cvar(v));
                }
            }
            assert_ne!(b.low(f), b.high(f));
        }
    }

    #[test]
    fn degenerate_models() {
        let m = CspModel::new(vec![Variable::with_size("b", 2)]).unwrap();
        let (b, root, enc) = build_bdd(&m, DEFAULT_NODE_LIMIT).unwrap();
        assert_eq!(root, BddRef::TRUE);
        assert_eq!(b.decoded_solutions(&enc, root, 10).unwrap(), vec![vec![0], vec![1]]);

        let mut m = CspModel::new(vec![Variable::with_size("a", 3)]).unwrap();
        m.add_expr("a != a").unwrap();
        let (b, root, enc) = build_bdd(&m, DEFAULT_NODE_LIMIT).unwrap();
        assert_eq!(root, BddRef::FALSE);
        assert!(b.decoded_solutions(&enc, root, 10).unwrap().is_empty());
    }

    #[test]
    fn node_limit_is_reported() {
        let m = tshirt();
        assert_eq!(build_bdd(&m, 4).unwrap_err(), BddError::NodeLimit(4));
    }

    #[test]
    fn traverse_single_bit() {
        let mut b = Bdd::default();
        let enc = Encoding::new(&[2, 2]);
        let y = b.literal(1, true).unwrap();
        let f = b.mk(0, BddRef::FALSE, y).unwrap();
        assert_eq!(b.traverse(&enc, f, 0, 1), y);
        assert_eq!(b.traverse(&enc, f, 0, 0), BddRef::FALSE);
    }

    #[test]
    fn dump_lists_root_first() {
        let (b, root, _) = build_bdd(&tshirt(), DEFAULT_NODE_LIMIT).unwrap();
        let dump = b.dump(root);
        let first: u32 = dump.split_whitespace().next().unwrap().parse().unwrap();
        assert_eq!(first, root.0);
        assert_eq!(dump.lines().count(), b.reachable(root).len());
    }
}
