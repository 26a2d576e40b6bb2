//! Valid domains under two or more additive cost bounds.
//!
//! Node labels are lists of non-dominated cost vectors. `U[u]` holds the
//! Pareto-optimal costs of root-to-`u` paths and `D[u]` those of
//! `u`-to-terminal paths, both truncated to vectors within the bounds they
//! were built for (the watermark). Tightening bounds only needs a new
//! domain extraction; relaxing past the watermark needs new labels.
//!
//! Costs are non-negative integers. The diagram must not contain long edges.

use std::cmp::Ordering;

use thiserror::Error;

use crate::mdd::Mdd;
use crate::model::{Assignment, CostSpec, CspModel, ModelError, ValidDomains, Variable};

/// Bound value meaning "no bound".
pub const UNBOUNDED: i64 = i64::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MultiCostError {
    #[error("the MDD has no solutions")]
    Empty,
    #[error("multi-cost labeling needs a diagram without long edges")]
    LongEdges,
    #[error("expected {expected} cost tables or bounds, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("negative bound {0}")]
    NegativeBound(i64),
    #[error("path costs could overflow 64-bit integers")]
    Overflow,
    #[error("bounds {bounds:?} exceed the label watermark {watermark:?}")]
    AboveWatermark { bounds: Vec<i64>, watermark: Vec<i64> },
    #[error("epsilon must be positive, got {0}")]
    Epsilon(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Non-dominated cost vectors of length `k`, sorted lexicographically.
/// For `k = 2` the first coordinates strictly increase and the second
/// strictly decrease.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParetoList {
    k: usize,
    data: Vec<i64>,
}

fn dominates(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl ParetoList {
    pub fn empty(k: usize) -> Self {
        ParetoList { k, data: Vec::new() }
    }

    /// The list holding only the zero vector.
    pub fn origin(k: usize) -> Self {
        ParetoList { k, data: vec![0; k] }
    }

    /// The non-dominated subset of arbitrary vectors.
    pub fn from_tuples(k: usize, tuples: impl IntoIterator<Item = Vec<i64>>) -> Self {
        let mut all: Vec<Vec<i64>> = tuples.into_iter().collect();
        all.sort();
        all.dedup();
        let mut out = ParetoList::empty(k);
        for t in all {
            assert_eq!(t.len(), k, "tuple length");
            out.push_if_undominated(&t);
        }
        out
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.k.max(1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> &[i64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[i64]> {
        self.data.chunks_exact(self.k)
    }

    pub fn to_vec(&self) -> Vec<Vec<i64>> {
        self.iter().map(<[i64]>::to_vec).collect()
    }

    /// Append `t`, which must not precede the last element lexicographically,
    /// unless some kept vector dominates it.
    fn push_if_undominated(&mut self, t: &[i64]) {
        if self.k == 2 {
            if let Some(last) = self.data.last() {
                if *last <= t[1] {
                    return;
                }
            }
            self.data.extend_from_slice(t);
            return;
        }
        if self.iter().any(|p| dominates(p, t)) {
            return;
        }
        self.data.extend_from_slice(t);
    }

    /// Non-dominated subset of the union, in linear time for `k = 2`.
    pub fn merge(&self, other: &ParetoList) -> ParetoList {
        debug_assert_eq!(self.k, other.k);
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut out = ParetoList {
            k: self.k,
            data: Vec::with_capacity(self.data.len() + other.data.len()),
        };
        let (mut i, mut j) = (0, 0);
        let (la, lb) = (self.len(), other.len());
        while i < la || j < lb {
            let take_a = if i == la {
                false
            } else if j == lb {
                true
            } else {
                self.get(i).cmp(other.get(j)) != Ordering::Greater
            };
            if take_a {
                out.push_if_undominated(self.get(i));
                i += 1;
            } else {
                out.push_if_undominated(other.get(j));
                j += 1;
            }
        }
        out
    }

    /// Every vector shifted by `c`, dropping those beyond `bounds`.
    pub fn shifted(&self, c: &[i64], bounds: &[i64]) -> ParetoList {
        let mut data = Vec::with_capacity(self.data.len());
        for t in self.iter() {
            if t.iter().zip(c).zip(bounds).all(|((&x, &y), &b)| x + y <= b) {
                data.extend(t.iter().zip(c).map(|(x, y)| x + y));
            }
        }
        ParetoList { k: self.k, data }
    }

    /// Sorted and free of dominated elements.
    pub fn is_valid(&self) -> bool {
        let items: Vec<&[i64]> = self.iter().collect();
        for w in items.windows(2) {
            if w[0] >= w[1] {
                return false;
            }
        }
        for (x, a) in items.iter().enumerate() {
            for (y, b) in items.iter().enumerate() {
                if x != y && dominates(a, b) {
                    return false;
                }
            }
        }
        true
    }
}

/// Integer costs of every edge for `k` cost functions, edge-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    k: usize,
    data: Vec<i64>,
}

impl CostMatrix {
    /// Costs from per-layer tables, `tables[j][layer][value]`.
    pub fn from_tables(m: &Mdd, tables: &[Vec<Vec<i64>>]) -> Result<CostMatrix, MultiCostError> {
        if m.has_long_edges() {
            return Err(MultiCostError::LongEdges);
        }
        let k = tables.len();
        let n = m.num_vars() as i64;
        for t in tables {
            if t.len() != m.num_vars() {
                return Err(MultiCostError::Arity {
                    expected: m.num_vars(),
                    got: t.len(),
                });
            }
            let max = t.iter().flatten().copied().max().unwrap_or(0);
            if t.iter().flatten().any(|&c| c < 0) {
                return Err(ModelError::Invalid("multi-cost tables must be non-negative".into()).into());
            }
            // two labels plus an edge must stay representable
            if max.checked_mul(n).and_then(|x| x.checked_mul(2)).is_none() {
                return Err(MultiCostError::Overflow);
            }
        }
        let mut data = Vec::with_capacity(m.num_edges() * k);
        for e in 0..m.num_edges() {
            let layer = m.edge_layer(e);
            let a = m.edge(e).value as usize;
            data.extend(tables.iter().map(|t| t[layer][a]));
        }
        Ok(CostMatrix { k, data })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge(&self, e: usize) -> &[i64] {
        &self.data[e * self.k..(e + 1) * self.k]
    }
}

/// Pareto labels built for the bounds in `watermark`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoLabels {
    pub up: Vec<ParetoList>,
    pub down: Vec<ParetoList>,
    pub watermark: Vec<i64>,
}

impl ParetoLabels {
    /// Efficient frontier of the solutions within the watermark bounds.
    pub fn frontier(&self) -> &ParetoList {
        &self.up[self.up.len() - 1]
    }

    pub fn covers(&self, bounds: &[i64]) -> bool {
        bounds.iter().zip(&self.watermark).all(|(b, w)| b <= w)
    }
}

fn check_bounds(k: usize, bounds: &[i64]) -> Result<(), MultiCostError> {
    if bounds.len() != k {
        return Err(MultiCostError::Arity {
            expected: k,
            got: bounds.len(),
        });
    }
    if let Some(&b) = bounds.iter().find(|&&b| b < 0) {
        return Err(MultiCostError::NegativeBound(b));
    }
    Ok(())
}

/// Compute `U` and `D` lists, dropping vectors beyond `bounds`.
pub fn label_pareto(m: &Mdd, costs: &CostMatrix, bounds: &[i64]) -> Result<ParetoLabels, MultiCostError> {
    if m.is_empty() {
        return Err(MultiCostError::Empty);
    }
    let k = costs.k();
    check_bounds(k, bounds)?;
    let (up, down) = rayon::join(
        || {
            let mut up = vec![ParetoList::empty(k); m.num_nodes()];
            up[m.root()] = ParetoList::origin(k);
            for (e, edge) in m.edges().iter().enumerate() {
                let shifted = up[edge.src as usize].shifted(costs.edge(e), bounds);
                let dst = edge.dst as usize;
                up[dst] = up[dst].merge(&shifted);
            }
            up
        },
        || {
            let mut down = vec![ParetoList::empty(k); m.num_nodes()];
            down[m.terminal()] = ParetoList::origin(k);
            for (e, edge) in m.edges().iter().enumerate().rev() {
                let shifted = down[edge.dst as usize].shifted(costs.edge(e), bounds);
                let src = edge.src as usize;
                down[src] = down[src].merge(&shifted);
            }
            down
        },
    );
    Ok(ParetoLabels {
        up,
        down,
        watermark: bounds.to_vec(),
    })
}

/// True if some `a` in `up` and `b` in `down` satisfy `a + c + b <= bounds`.
/// For two costs this is a single two-pointer sweep.
pub fn edge_valid(up: &ParetoList, down: &ParetoList, c: &[i64], bounds: &[i64]) -> bool {
    if up.is_empty() || down.is_empty() {
        return false;
    }
    if up.k() == 2 {
        let r1 = bounds[0].saturating_sub(c[0]);
        let r2 = bounds[1].saturating_sub(c[1]);
        // up ascends in the first cost; the feasible part of down shrinks
        let mut j = down.len() as isize - 1;
        for a in up.iter() {
            while j >= 0 && a[0].saturating_add(down.get(j as usize)[0]) > r1 {
                j -= 1;
            }
            if j < 0 {
                return false;
            }
            if a[1].saturating_add(down.get(j as usize)[1]) <= r2 {
                return true;
            }
        }
        return false;
    }
    up.iter().any(|a| {
        down.iter().any(|b| {
            a.iter()
                .zip(b)
                .zip(c)
                .zip(bounds)
                .all(|(((x, y), z), &k)| x.saturating_add(*y).saturating_add(*z) <= k)
        })
    })
}

/// Valid domains under `bounds`, which must not exceed the label watermark.
pub fn valid_domains_pareto(
    m: &Mdd,
    costs: &CostMatrix,
    labels: &ParetoLabels,
    bounds: &[i64],
) -> Result<ValidDomains, MultiCostError> {
    check_bounds(costs.k(), bounds)?;
    if !labels.covers(bounds) {
        return Err(MultiCostError::AboveWatermark {
            bounds: bounds.to_vec(),
            watermark: labels.watermark.clone(),
        });
    }
    let mut masks: Vec<Vec<bool>> = m.domains().sizes().iter().map(|&d| vec![false; d]).collect();
    for (e, edge) in m.edges().iter().enumerate() {
        let slot = &mut masks[m.edge_layer(e)][edge.value as usize];
        if !*slot && edge_valid(&labels.up[edge.src as usize], &labels.down[edge.dst as usize], costs.edge(e), bounds) {
            *slot = true;
        }
    }
    Ok(ValidDomains::from_masks(&masks))
}

/// Integer tables of several cost specs, checked for multi-cost use.
pub fn integer_tables(costs: &[&CostSpec]) -> Result<Vec<Vec<Vec<i64>>>, MultiCostError> {
    costs.iter().map(|c| c.integer_table().map_err(Into::into)).collect()
}

/// One-shot k-cost valid domains.
pub fn kcost_valid_domains(m: &Mdd, tables: &[Vec<Vec<i64>>], bounds: &[i64]) -> Result<ValidDomains, MultiCostError> {
    let costs = CostMatrix::from_tables(m, tables)?;
    if m.is_empty() {
        return Ok(ValidDomains::empty(m.num_vars()));
    }
    let labels = label_pareto(m, &costs, bounds)?;
    valid_domains_pareto(m, &costs, &labels, bounds)
}

/// First-cost tables scaled for the approximation scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaled {
    pub table: Vec<Vec<i64>>,
    pub bound: i64,
    /// Scaling factor `T`; 1 when the input was kept unchanged.
    pub factor: f64,
    /// True when `T <= 1` and the tables were left exact.
    pub exact: bool,
}

/// Scale the first cost by `T = epsilon * K1 / (n + 1)`: each entry becomes
/// `floor(c / T)` and the bound `ceil(K1 / T)`.
pub fn scale_costs(table: &[Vec<i64>], bound: i64, epsilon: f64, n: usize) -> Result<Scaled, MultiCostError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(MultiCostError::Epsilon(epsilon));
    }
    let t = epsilon * bound as f64 / (n as f64 + 1.0);
    if bound == UNBOUNDED || t <= 1.0 {
        return Ok(Scaled {
            table: table.to_vec(),
            bound,
            factor: 1.0,
            exact: true,
        });
    }
    let scaled = table
        .iter()
        .map(|row| row.iter().map(|&c| (c as f64 / t).floor() as i64).collect())
        .collect();
    Ok(Scaled {
        table: scaled,
        bound: (bound as f64 / t).ceil() as i64,
        factor: t,
        exact: false,
    })
}

/// Approximate two-cost valid domains: every exactly valid value is kept,
/// and every returned value has a solution with `c1 <= (1 + epsilon) K1`
/// and `c2 <= K2`.
pub fn approx_bicost_valid_domains(
    m: &Mdd,
    c1: &[Vec<i64>],
    c2: &[Vec<i64>],
    bounds: [i64; 2],
    epsilon: f64,
) -> Result<ValidDomains, MultiCostError> {
    let scaled = scale_costs(c1, bounds[0], epsilon, m.num_vars())?;
    kcost_valid_domains(m, &[scaled.table, c2.to_vec()], &[scaled.bound, bounds[1]])
}

/// A hard instance: model, one cost per bound.
#[derive(Debug, Clone)]
pub struct HardInstance {
    pub model: CspModel,
    pub bounds: Vec<i64>,
}

impl HardInstance {
    pub fn costs(&self) -> Vec<&CostSpec> {
        self.model.costs().iter().collect()
    }
}

/// Two-cost instance whose valid domains are nonempty exactly when `items`
/// splits into two halves of equal sum. Item `i` owns variables `2i` (it
/// goes to the first part) and `2i + 1` (the second part), exactly one of
/// which is set; both bounds are half the total, rounded down.
pub fn tpp_instance(items: &[u64]) -> HardInstance {
    let n = items.len();
    let vars = (0..n)
        .flat_map(|i| [Variable::with_size(format!("a{i}"), 2), Variable::with_size(format!("b{i}"), 2)])
        .collect();
    let mut model = CspModel::new(vars).expect("at least one item");
    let mut first = vec![vec![0i64; 2]; 2 * n];
    let mut second = vec![vec![0i64; 2]; 2 * n];
    for (i, &s) in items.iter().enumerate() {
        model.add_expr(&format!("a{i} != b{i}")).expect("pairing constraint");
        first[2 * i][1] = s as i64;
        second[2 * i + 1][1] = s as i64;
    }
    model.add_cost(CostSpec::unary_int("first", &first)).expect("cost");
    model.add_cost(CostSpec::unary_int("second", &second)).expect("cost");
    let half = (items.iter().sum::<u64>() / 2) as i64;
    HardInstance {
        model,
        bounds: vec![half, half],
    }
}

/// `k`-cost instance whose valid domains are nonempty exactly when `items`
/// fit into `bins` bins of the given capacity. Variable `i` picks the bin
/// of item `i`; cost `j` is the load of bin `j`.
pub fn bpp_instance(items: &[u64], bins: usize, capacity: u64) -> HardInstance {
    let n = items.len();
    let vars = (0..n)
        .map(|i| Variable::new(format!("item{i}"), (1..=bins).map(|b| b.to_string())))
        .collect();
    let mut model = CspModel::new(vars).expect("at least one item");
    for j in 0..bins {
        let table: Vec<Vec<i64>> = items
            .iter()
            .map(|&s| (0..bins).map(|b| if b == j { s as i64 } else { 0 }).collect())
            .collect();
        model.add_cost(CostSpec::unary_int(format!("bin{}", j + 1), &table)).expect("cost");
    }
    HardInstance {
        model,
        bounds: vec![capacity as i64; bins],
    }
}

/// Depth-first search for a root-to-`target` path with exactly the cost
/// vector `goal`; used to check that labels are witnessed by real paths.
pub fn find_path_with_cost(m: &Mdd, costs: &CostMatrix, target: usize, goal: &[i64]) -> Option<Assignment> {
    fn walk(m: &Mdd, costs: &CostMatrix, u: usize, target: usize, left: &mut Vec<i64>, path: &mut Vec<(usize, usize)>) -> bool {
        if u == target {
            return left.iter().all(|&x| x == 0);
        }
        if m.layer(u) >= m.layer(target) {
            return false;
        }
        for e in m.out_range(u) {
            let c = costs.edge(e);
            if c.iter().zip(left.iter()).any(|(a, b)| a > b) {
                continue;
            }
            for (l, a) in left.iter_mut().zip(c) {
                *l -= a;
            }
            path.push((m.layer(u), m.edge(e).value as usize));
            if walk(m, costs, m.edge(e).dst as usize, target, left, path) {
                return true;
            }
            path.pop();
            for (l, a) in left.iter_mut().zip(c) {
                *l += a;
            }
        }
        false
    }
    let mut left = goal.to_vec();
    let mut path = Vec::new();
    walk(m, costs, m.root(), target, &mut left, &mut path).then(|| Assignment::from_pairs(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdd::{build_bdd, DEFAULT_NODE_LIMIT};
    use crate::model::{tshirt, tshirt_costs};

    fn list(t: &[(i64, i64)]) -> ParetoList {
        ParetoList::from_tuples(2, t.iter().map(|&(a, b)| vec![a, b]))
    }

    fn tshirt_setup() -> (Mdd, CostMatrix) {
        let (b, root, enc) = build_bdd(&tshirt(), DEFAULT_NODE_LIMIT).unwrap();
        let m = Mdd::from_bdd(&b, root, &enc).expand().merge();
        let (p, q) = tshirt_costs();
        let tables = integer_tables(&[&p, &q]).unwrap();
        let costs = CostMatrix::from_tables(&m, &tables).unwrap();
        (m, costs)
    }

    #[test]
    fn merge_examples() {
        assert_eq!(
            list(&[(1, 5), (3, 2)]).merge(&list(&[(2, 3), (4, 1)])),
            list(&[(1, 5), (2, 3), (3, 2), (4, 1)])
        );
        assert_eq!(list(&[(1, 5), (2, 4)]).merge(&list(&[(2, 3)])), list(&[(1, 5), (2, 3)]));
        assert_eq!(list(&[(1, 5)]).merge(&ParetoList::empty(2)), list(&[(1, 5)]));
        assert_eq!(list(&[(2, 4), (2, 3)]).to_vec(), vec![vec![2, 3]]);
        assert!(list(&[(1, 5), (2, 3), (3, 2)]).is_valid());
    }

    #[test]
    fn edge_valid_examples() {
        let up = list(&[(0, 10), (5, 2)]);
        let down = list(&[(1, 1)]);
        assert!(edge_valid(&up, &down, &[1, 1], &[3, 13]));
        assert!(!edge_valid(&up, &down, &[1, 1], &[3, 11]));
        assert!(edge_valid(&ParetoList::origin(2), &ParetoList::origin(2), &[0, 0], &[0, 0]));
    }

    #[test]
    fn tshirt_frontier_and_domains() {
        let (m, costs) = tshirt_setup();
        let labels = label_pareto(&m, &costs, &[UNBOUNDED, UNBOUNDED]).unwrap();
        assert_eq!(
            labels.frontier().to_vec(),
            vec![vec![0, 5], vec![1, 4], vec![2, 3], vec![3, 2], vec![4, 1], vec![6, 0]]
        );
        let vd = valid_domains_pareto(&m, &costs, &labels, &[2, 3]).unwrap();
        assert_eq!(vd, ValidDomains::from_slices(&[&[0], &[1, 2], &[0, 1]]));
        let tight = label_pareto(&m, &costs, &[2, 3]).unwrap();
        assert_eq!(valid_domains_pareto(&m, &costs, &tight, &[2, 3]).unwrap(), vd);
        assert!(matches!(
            valid_domains_pareto(&m, &costs, &tight, &[6, 5]),
            Err(MultiCostError::AboveWatermark { .. })
        ));
        for t in labels.frontier().iter() {
            assert!(find_path_with_cost(&m, &costs, m.terminal(), t).is_some());
        }
    }

    #[test]
    fn scaling_arithmetic() {
        let s = scale_costs(&[vec![29, 0, 100]], 100, 0.3, 3).unwrap();
        assert_eq!(s.factor, 7.5);
        assert_eq!(s.table, vec![vec![3, 0, 13]]);
        assert_eq!(s.bound, 14);
        assert!(!s.exact);
        let s = scale_costs(&[vec![5]], 4, 1.0, 3).unwrap();
        assert!(s.exact);
        assert_eq!(s.table, vec![vec![5]]);
        assert!(scale_costs(&[vec![5]], 4, 0.0, 3).is_err());
    }

    #[test]
    fn hardness_examples() {
        let run = |inst: &HardInstance| {
            let (b, root, enc) = build_bdd(&inst.model, DEFAULT_NODE_LIMIT).unwrap();
            let m = Mdd::from_bdd(&b, root, &enc).expand().merge();
            let tables = integer_tables(&inst.costs()).unwrap();
            kcost_valid_domains(&m, &tables, &inst.bounds).unwrap()
        };
        assert!(!run(&tpp_instance(&[3, 5, 8])).has_empty());
        assert!(run(&tpp_instance(&[1, 1, 3])).has_empty());
        assert!(run(&bpp_instance(&[2, 2, 2], 2, 3)).has_empty());
        assert!(!run(&bpp_instance(&[2, 2], 2, 3)).has_empty());
        assert!(!run(&bpp_instance(&[2, 2, 2], 3, 2)).has_empty());
    }
}
