//! Constraint models: variables over finite domains, constraints, additive
//! cost specifications, the model file format and the brute-force oracle.
//!
//! Values are dense 0-based integers. Each variable keeps a symbol table
//! mapping value indices to the labels used in model files and on the wire.

mod catalogue;
mod document;
mod expr;
mod oracle;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use catalogue::Catalogue;
pub use document::{parse_model, serialize_model};
pub use expr::Expr;
pub use oracle::{brute_force_solutions, brute_force_vd, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("syntax error at {location}: {message}")]
    Syntax { location: String, message: String },
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("value `{value}` is not in the domain of `{variable}`")]
    ValueOutOfDomain { variable: String, value: String },
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("model declares no variables")]
    NoVariables,
    #[error("type error in expression: {0}")]
    Type(String),
    #[error("variable `{0}` is not assigned")]
    Unassigned(String),
    #[error("missing cost entry for `{variable}` = `{value}` in cost `{cost}`")]
    MissingCost { cost: String, variable: String, value: String },
    #[error("invalid ordering: {0}")]
    Ordering(String),
    #[error("scope product of {0} tuples exceeds the cap")]
    ScopeTooLarge(u128),
    #[error("enumeration of {0} assignments exceeds the cap")]
    CapExceeded(u128),
    #[error("malformed catalogue row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

/// A finite-domain variable with value labels `0..labels.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub labels: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, labels: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Variable {
            name: name.into(),
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    /// A variable whose labels are the decimal value indices.
    pub fn with_size(name: impl Into<String>, size: usize) -> Self {
        Variable::new(name, (0..size).map(|v| v.to_string()))
    }

    pub fn domain_size(&self) -> usize {
        self.labels.len()
    }

    pub fn value_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A partial assignment: at most one value per variable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(BTreeMap<usize, usize>);

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Assignment(pairs.into_iter().collect())
    }

    /// Total assignment from a tuple indexed by variable.
    pub fn total(values: &[usize]) -> Self {
        Assignment(values.iter().copied().enumerate().collect())
    }

    pub fn get(&self, var: usize) -> Option<usize> {
        self.0.get(&var).copied()
    }

    pub fn insert(&mut self, var: usize, value: usize) -> Option<usize> {
        self.0.insert(var, value)
    }

    pub fn remove(&mut self, var: usize) -> Option<usize> {
        self.0.remove(&var)
    }

    pub fn contains(&self, var: usize) -> bool {
        self.0.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }

    /// Dense per-variable view, `None` for unassigned variables.
    pub fn to_dense(&self, n: usize) -> Vec<Option<usize>> {
        let mut dense = vec![None; n];
        for (var, value) in self.iter() {
            if var < n {
                dense[var] = Some(value);
            }
        }
        dense
    }

    /// True if `solution` agrees with every assigned value.
    pub fn is_extended_by(&self, solution: &[usize]) -> bool {
        self.iter().all(|(var, value)| solution.get(var) == Some(&value))
    }
}

impl FromIterator<(usize, usize)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (usize, usize)>>(iter: T) -> Self {
        Assignment::from_pairs(iter)
    }
}

/// Per-variable sets of values, the answer to every valid-domains query.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ValidDomains(Vec<BTreeSet<usize>>);

impl ValidDomains {
    pub fn empty(n: usize) -> Self {
        ValidDomains(vec![BTreeSet::new(); n])
    }

    pub fn from_sets(sets: Vec<BTreeSet<usize>>) -> Self {
        ValidDomains(sets)
    }

    /// Convenience for tests and examples: `ValidDomains::from_slices(&[&[0, 1], &[2]])`.
    pub fn from_slices(sets: &[&[usize]]) -> Self {
        ValidDomains(sets.iter().map(|s| s.iter().copied().collect()).collect())
    }

    /// Build from dense membership masks.
    pub fn from_masks(masks: &[Vec<bool>]) -> Self {
        ValidDomains(
            masks
                .iter()
                .map(|mask| mask.iter().enumerate().filter(|(_, &m)| m).map(|(a, _)| a).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn var(&self, i: usize) -> &BTreeSet<usize> {
        &self.0[i]
    }

    pub fn contains(&self, var: usize, value: usize) -> bool {
        self.0.get(var).is_some_and(|s| s.contains(&value))
    }

    pub fn insert(&mut self, var: usize, value: usize) {
        self.0[var].insert(value);
    }

    pub fn iter(&self) -> impl Iterator<Item = &BTreeSet<usize>> {
        self.0.iter()
    }

    /// True when some variable has no valid value left, which happens
    /// exactly when no solution is consistent with the query.
    pub fn has_empty(&self) -> bool {
        self.0.iter().any(BTreeSet::is_empty)
    }

    /// True if every set of `self` is a subset of the matching set of `other`.
    pub fn is_subset(&self, other: &ValidDomains) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset(b))
    }

    pub fn into_inner(self) -> Vec<BTreeSet<usize>> {
        self.0
    }
}

impl fmt::Display for ValidDomains {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, set) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let values: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            write!(f, "x{}:{{{}}}", i, values.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintBody {
    /// Allowed scope tuples, in scope order.
    Table(Vec<Vec<usize>>),
    /// A boolean expression; the source text is kept for serialization.
    Expr { text: String, expr: Expr },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    scope: Vec<usize>,
    body: ConstraintBody,
}

impl Constraint {
    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn body(&self) -> &ConstraintBody {
        &self.body
    }

    /// Evaluate against an assignment covering the whole scope.
    pub fn eval(&self, rho: &Assignment, variables: &[Variable]) -> Result<bool> {
        let mut values = HashMap::with_capacity(self.scope.len());
        for &var in &self.scope {
            match rho.get(var) {
                Some(v) => {
                    values.insert(var, v);
                }
                None => return Err(ModelError::Unassigned(variables[var].name.clone())),
            }
        }
        Ok(self.eval_with(|var| values[&var]))
    }

    /// Evaluate with a lookup that must be total on the scope.
    pub fn eval_with(&self, value_of: impl Fn(usize) -> usize) -> bool {
        match &self.body {
            ConstraintBody::Table(tuples) => {
                let tuple: Vec<usize> = self.scope.iter().map(|&v| value_of(v)).collect();
                tuples.iter().any(|t| *t == tuple)
            }
            ConstraintBody::Expr { expr, .. } => expr.holds(&value_of),
        }
    }

    /// All allowed scope tuples, in lexicographic order over `scope`.
    pub fn allowed_tuples(&self, domain_sizes: &[usize], cap: u128) -> Result<Vec<Vec<usize>>> {
        match &self.body {
            ConstraintBody::Table(tuples) => {
                let mut sorted = tuples.clone();
                sorted.sort();
                sorted.dedup();
                Ok(sorted)
            }
            ConstraintBody::Expr { expr, .. } => {
                let sizes: Vec<usize> = self.scope.iter().map(|&v| domain_sizes[v]).collect();
                let product: u128 = sizes.iter().map(|&d| d as u128).product();
                if product > cap {
                    return Err(ModelError::ScopeTooLarge(product));
                }
                let mut allowed = Vec::new();
                let mut tuple = vec![0usize; sizes.len()];
                if sizes.iter().any(|&d| d == 0) {
                    return Ok(allowed);
                }
                loop {
                    let holds = expr.holds(&|var| {
                        let pos = self.scope.iter().position(|&s| s == var).expect("scope variable");
                        tuple[pos]
                    });
                    if holds {
                        allowed.push(tuple.clone());
                    }
                    // odometer, last position fastest
                    let mut pos = sizes.len();
                    loop {
                        if pos == 0 {
                            return Ok(allowed);
                        }
                        pos -= 1;
                        tuple[pos] += 1;
                        if tuple[pos] < sizes[pos] {
                            break;
                        }
                        tuple[pos] = 0;
                    }
                }
            }
        }
    }

    fn remap(&self, new_index: &[usize]) -> Constraint {
        let body = match &self.body {
            ConstraintBody::Table(t) => ConstraintBody::Table(t.clone()),
            ConstraintBody::Expr { text, expr } => ConstraintBody::Expr {
                text: text.clone(),
                expr: expr.remap(new_index),
            },
        };
        let scope = self.scope.iter().map(|&v| new_index[v]).collect();
        Constraint { scope, body }
    }
}

/// A non-unary cost term over `scope`; tuples absent from the table cost `default`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostComponent {
    pub scope: Vec<usize>,
    pub table: HashMap<Vec<usize>, f64>,
    pub default: f64,
}

impl CostComponent {
    pub fn cost(&self, value_of: impl Fn(usize) -> usize) -> f64 {
        let key: Vec<usize> = self.scope.iter().map(|&v| value_of(v)).collect();
        self.table.get(&key).copied().unwrap_or(self.default)
    }
}

/// An additive cost function: one table per variable plus optional
/// non-unary components.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    name: String,
    unary: Vec<Vec<f64>>,
    components: Vec<CostComponent>,
}

impl CostSpec {
    /// Purely unary cost; `unary[i][a]` is the cost of `x_i = a`.
    pub fn unary(name: impl Into<String>, unary: Vec<Vec<f64>>) -> Self {
        CostSpec {
            name: name.into(),
            unary,
            components: Vec::new(),
        }
    }

    /// Integer-valued unary cost.
    pub fn unary_int(name: impl Into<String>, unary: &[Vec<i64>]) -> Self {
        CostSpec::unary(name, unary.iter().map(|row| row.iter().map(|&c| c as f64).collect()).collect())
    }

    /// Zero unary tables for the given domain sizes.
    pub fn zero(name: impl Into<String>, domain_sizes: &[usize]) -> Self {
        CostSpec::unary(name, domain_sizes.iter().map(|&d| vec![0.0; d]).collect())
    }

    pub fn with_component(mut self, component: CostComponent) -> Self {
        self.components.push(component);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unary_table(&self) -> &[Vec<f64>] {
        &self.unary
    }

    pub fn components(&self) -> &[CostComponent] {
        &self.components
    }

    pub fn is_unary(&self) -> bool {
        self.components.is_empty()
    }

    /// Cost of a total assignment.
    pub fn evaluate(&self, solution: &[usize]) -> f64 {
        let unary: f64 = solution.iter().enumerate().map(|(i, &a)| self.unary[i][a]).sum();
        let rest: f64 = self.components.iter().map(|c| c.cost(|v| solution[v])).sum();
        unary + rest
    }

    /// True if every entry is a finite integer.
    pub fn is_integral(&self) -> bool {
        let int = |c: f64| c.is_finite() && c.fract() == 0.0;
        self.unary.iter().flatten().all(|&c| int(c))
            && self
                .components
                .iter()
                .all(|comp| int(comp.default) && comp.table.values().all(|&c| int(c)))
    }

    /// The unary tables as non-negative integers, as multi-cost labeling requires.
    pub fn integer_table(&self) -> Result<Vec<Vec<i64>>> {
        if !self.is_unary() {
            return Err(ModelError::Invalid(format!(
                "cost `{}` has non-unary components; multi-cost queries need unary costs",
                self.name
            )));
        }
        if !self.is_integral() {
            return Err(ModelError::Invalid(format!("cost `{}` is not integral", self.name)));
        }
        if self.unary.iter().flatten().any(|&c| c < 0.0) {
            return Err(ModelError::Invalid(format!("cost `{}` has negative entries", self.name)));
        }
        Ok(self.unary.iter().map(|row| row.iter().map(|&c| c as i64).collect()).collect())
    }

    fn remap(&self, order: &[usize], new_index: &[usize]) -> CostSpec {
        let unary = order.iter().map(|&old| self.unary[old].clone()).collect();
        let components = self
            .components
            .iter()
            .map(|c| CostComponent {
                scope: c.scope.iter().map(|&v| new_index[v]).collect(),
                table: c.table.clone(),
                default: c.default,
            })
            .collect();
        CostSpec {
            name: self.name.clone(),
            unary,
            components,
        }
    }
}

/// A constraint satisfaction problem with optional cost functions.
#[derive(Debug, Clone, PartialEq)]
pub struct CspModel {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    costs: Vec<CostSpec>,
    ordering: Vec<usize>,
}

impl CspModel {
    pub fn new(variables: Vec<Variable>) -> Result<Self> {
        if variables.is_empty() {
            return Err(ModelError::NoVariables);
        }
        let mut seen = BTreeSet::new();
        for v in &variables {
            if !seen.insert(v.name.as_str()) {
                return Err(ModelError::DuplicateVariable(v.name.clone()));
            }
            if v.labels.is_empty() {
                return Err(ModelError::EmptyDomain(v.name.clone()));
            }
        }
        let ordering = (0..variables.len()).collect();
        Ok(CspModel {
            variables,
            constraints: Vec::new(),
            costs: Vec::new(),
            ordering,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn costs(&self) -> &[CostSpec] {
        &self.costs
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn domain_sizes(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::domain_size).collect()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn cost(&self, name: &str) -> Option<&CostSpec> {
        self.costs.iter().find(|c| c.name == name)
    }

    /// Parse and add an expression constraint.
    pub fn add_expr(&mut self, text: &str) -> Result<()> {
        let expr = Expr::parse(text, &self.variables)?;
        let scope = expr.variables();
        self.constraints.push(Constraint {
            scope,
            body: ConstraintBody::Expr {
                text: text.to_string(),
                expr,
            },
        });
        Ok(())
    }

    /// Add an extensional constraint listing the allowed scope tuples.
    pub fn add_table(&mut self, scope: Vec<usize>, tuples: Vec<Vec<usize>>) -> Result<()> {
        let mut distinct = BTreeSet::new();
        for &v in &scope {
            if v >= self.variables.len() {
                return Err(ModelError::UndeclaredVariable(format!("#{v}")));
            }
            if !distinct.insert(v) {
                return Err(ModelError::Invalid(format!(
                    "variable `{}` repeated in table scope",
                    self.variables[v].name
                )));
            }
        }
        for tuple in &tuples {
            if tuple.len() != scope.len() {
                return Err(ModelError::Invalid("table tuple length differs from scope".into()));
            }
            for (&v, &a) in scope.iter().zip(tuple) {
                if a >= self.variables[v].domain_size() {
                    return Err(ModelError::ValueOutOfDomain {
                        variable: self.variables[v].name.clone(),
                        value: a.to_string(),
                    });
                }
            }
        }
        self.constraints.push(Constraint {
            scope,
            body: ConstraintBody::Table(tuples),
        });
        Ok(())
    }

    pub fn add_cost(&mut self, cost: CostSpec) -> Result<()> {
        if self.cost(&cost.name).is_some() {
            return Err(ModelError::Invalid(format!("duplicate cost `{}`", cost.name)));
        }
        if cost.unary.len() != self.variables.len() {
            return Err(ModelError::Invalid(format!(
                "cost `{}` has {} unary tables for {} variables",
                cost.name,
                cost.unary.len(),
                self.variables.len()
            )));
        }
        for (var, row) in self.variables.iter().zip(&cost.unary) {
            if row.len() != var.domain_size() {
                return Err(ModelError::MissingCost {
                    cost: cost.name.clone(),
                    variable: var.name.clone(),
                    value: format!("{} entries for {} values", row.len(), var.domain_size()),
                });
            }
        }
        for comp in &cost.components {
            for &v in &comp.scope {
                if v >= self.variables.len() {
                    return Err(ModelError::UndeclaredVariable(format!("#{v}")));
                }
            }
            for key in comp.table.keys() {
                if key.len() != comp.scope.len()
                    || key.iter().zip(&comp.scope).any(|(&a, &v)| a >= self.variables[v].domain_size())
                {
                    return Err(ModelError::Invalid(format!(
                        "cost `{}` has a component tuple outside its scope domains",
                        cost.name
                    )));
                }
            }
        }
        self.costs.push(cost);
        Ok(())
    }

    /// Set the layer ordering: `ordering[k]` is the variable placed k-th.
    pub fn set_ordering(&mut self, ordering: Vec<usize>) -> Result<()> {
        let n = self.variables.len();
        let distinct: BTreeSet<usize> = ordering.iter().copied().collect();
        if ordering.len() != n || distinct.len() != n || distinct.iter().any(|&v| v >= n) {
            return Err(ModelError::Ordering(format!("{ordering:?} is not a permutation of 0..{n}")));
        }
        self.ordering = ordering;
        Ok(())
    }

    /// An equivalent model whose declaration order is the layer ordering.
    pub fn in_layer_order(&self) -> CspModel {
        let n = self.variables.len();
        let mut new_index = vec![0; n];
        for (pos, &old) in self.ordering.iter().enumerate() {
            new_index[old] = pos;
        }
        CspModel {
            variables: self.ordering.iter().map(|&old| self.variables[old].clone()).collect(),
            constraints: self.constraints.iter().map(|c| c.remap(&new_index)).collect(),
            costs: self.costs.iter().map(|c| c.remap(&self.ordering, &new_index)).collect(),
            ordering: (0..n).collect(),
        }
    }

    /// True if `solution` satisfies every constraint.
    pub fn satisfies(&self, solution: &[usize]) -> bool {
        self.constraints.iter().all(|c| c.eval_with(|v| solution[v]))
    }

    /// Label of value `a` of variable `var`.
    pub fn label(&self, var: usize, a: usize) -> &str {
        &self.variables[var].labels[a]
    }
}

/// The T-shirt configuration model: color, size and print with the rules
/// "MIB print requires black" and "small size excludes STW".
pub fn tshirt() -> CspModel {
    let mut m = CspModel::new(vec![
        Variable::new("x1", ["black", "white", "red", "blue"]),
        Variable::new("x2", ["small", "medium", "large"]),
        Variable::new("x3", ["MIB", "STW"]),
    ])
    .expect("valid variables");
    m.add_expr("x3 = MIB -> x1 = black").expect("rule 1");
    m.add_expr("x2 = small -> x3 != STW").expect("rule 2");
    m
}

/// Price and quality-penalty tables used with the T-shirt model.
pub fn tshirt_costs() -> (CostSpec, CostSpec) {
    let price = CostSpec::unary_int("price", &[vec![0, 1, 2, 3], vec![0, 1, 2], vec![0, 1]]);
    let quality = CostSpec::unary_int("quality", &[vec![2, 1, 1, 0], vec![2, 1, 0], vec![1, 0]]);
    (price, quality)
}

/// The T-shirt model with both cost functions attached.
pub fn tshirt_with_costs() -> CspModel {
    let mut m = tshirt();
    let (price, quality) = tshirt_costs();
    m.add_cost(price).expect("price");
    m.add_cost(quality).expect("quality");
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tshirt_rules_evaluate() {
        let m = tshirt();
        let f1 = &m.constraints()[0];
        let f2 = &m.constraints()[1];
        // x1=0, x3=0 satisfies MIB => black
        assert!(f1.eval(&Assignment::from_pairs([(0, 0), (2, 0)]), m.variables()).unwrap());
        // x2=0, x3=1 violates small => not STW
        assert!(!f2.eval(&Assignment::from_pairs([(1, 0), (2, 1)]), m.variables()).unwrap());
    }

    #[test]
    fn tautology_holds_everywhere() {
        let mut m = tshirt();
        m.add_expr("x1 = x1").unwrap();
        let c = &m.constraints()[2];
        for a in 0..4 {
            assert!(c.eval(&Assignment::from_pairs([(0, a)]), m.variables()).unwrap());
        }
    }

    #[test]
    fn eval_requires_scope_assigned() {
        let m = tshirt();
        let err = m.constraints()[0].eval(&Assignment::from_pairs([(0, 0)]), m.variables());
        assert_eq!(err, Err(ModelError::Unassigned("x3".into())));
    }

    #[test]
    fn ordering_must_be_permutation() {
        let mut m = tshirt();
        assert!(m.set_ordering(vec![0, 0, 1]).is_err());
        assert!(m.set_ordering(vec![2, 0, 1]).is_ok());
        let r = m.in_layer_order();
        assert_eq!(r.variables()[0].name, "x3");
        assert_eq!(r.ordering(), &[0, 1, 2]);
    }

    #[test]
    fn reordering_preserves_solutions() {
        let mut m = tshirt_with_costs();
        m.set_ordering(vec![2, 0, 1]).unwrap();
        let r = m.in_layer_order();
        let original = brute_force_solutions(&m, DEFAULT_ENUMERATION_CAP).unwrap();
        let mut permuted: Vec<Vec<usize>> = brute_force_solutions(&r, DEFAULT_ENUMERATION_CAP)
            .unwrap()
            .into_iter()
            .map(|s| vec![s[1], s[2], s[0]])
            .collect();
        permuted.sort();
        assert_eq!(original, permuted);
        let price = m.cost("price").unwrap();
        let rprice = r.cost("price").unwrap();
        assert_eq!(price.evaluate(&[1, 2, 1]), rprice.evaluate(&[1, 1, 2]));
    }

    #[test]
    fn table_rejects_out_of_domain() {
        let mut m = tshirt();
        let err = m.add_table(vec![1], vec![vec![3]]).unwrap_err();
        assert!(matches!(err, ModelError::ValueOutOfDomain { .. }));
    }

    #[test]
    fn integer_table_requires_non_negative() {
        let c = CostSpec::unary("c", vec![vec![-1.0, 0.0]]);
        assert!(c.integer_table().is_err());
        let c = CostSpec::unary("c", vec![vec![0.5, 0.0]]);
        assert!(c.integer_table().is_err());
        let c = CostSpec::unary("c", vec![vec![2.0, 0.0]]);
        assert_eq!(c.integer_table().unwrap(), vec![vec![2, 0]]);
    }
}
