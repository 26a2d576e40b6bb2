//! Interactive configuration sessions.
//!
//! A session keeps the pristine diagram of its engine, the current partial
//! assignment and the diagram restricted to it, labels for the active cost
//! bounds, and the latest snapshot. Every assign and unassign restricts the
//! pristine diagram again and relabels, so the state depends only on the
//! set of assignments. Bound changes reuse labels unless a multi-cost bound
//! is relaxed past the bounds the labels were built for.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::artifact::Artifact;
use crate::mdd::Mdd;
use crate::model::{Assignment, ValidDomains};
use crate::multicost::{
    label_pareto, scale_costs, valid_domains_pareto, CostMatrix, ParetoLabels, UNBOUNDED,
};
use crate::wcvd::{
    expand_nonunary, label_scalar, skip_labels, valid_domains_long, valid_domains_scalar, EdgeCosts, ScalarLabels,
    SkipLabels,
};

/// Cap on nodes created when unfolding non-unary costs.
pub const EXPANSION_NODE_LIMIT: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error("the artifact has no solutions")]
    EmptyArtifact,
    #[error("unknown variable {0}")]
    UnknownVariable(usize),
    #[error("value {value} is outside the domain of variable {var}")]
    OutOfDomain { var: usize, value: usize },
    #[error("variable {0} is already assigned")]
    AlreadyAssigned(usize),
    #[error("variable {0} is not assigned")]
    NotAssigned(usize),
    #[error("unknown cost `{0}`")]
    UnknownCost(String),
    #[error("mode {mode} needs {expected} costs, got {got}")]
    CostCount { mode: &'static str, expected: String, got: usize },
    #[error("expected {expected} bounds, got {got}")]
    BoundCount { expected: usize, got: usize },
    #[error("invalid bound {0}")]
    BadBound(f64),
    #[error("this mode has no cost bounds")]
    NoCosts,
    #[error("incompatible cost: {0}")]
    IncompatibleCost(String),
}

/// Query mode of a session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Mode {
    /// Valid domains without costs.
    Plain,
    /// One cost bound, labeling the merged diagram.
    Single,
    /// One cost bound, labeling the reduced diagram with long edges.
    SingleReduced,
    /// Two integer cost bounds.
    Bicost,
    /// Two or more integer cost bounds.
    Kcost,
    /// Two bounds with the first cost scaled; the first bound may be
    /// exceeded by a factor of at most `1 + epsilon`.
    BicostApprox { epsilon: f64 },
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Plain => "plain",
            Mode::Single => "single",
            Mode::SingleReduced => "single_reduced",
            Mode::Bicost => "bicost",
            Mode::Kcost => "kcost",
            Mode::BicostApprox { .. } => "bicost_approx",
        }
    }

    fn is_approx(&self) -> bool {
        matches!(self, Mode::BicostApprox { .. })
    }

    fn is_multi(&self) -> bool {
        matches!(self, Mode::Bicost | Mode::Kcost | Mode::BicostApprox { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub mode: Mode,
    /// Names of the artifact costs the bounds apply to, in bound order.
    pub costs: Vec<String>,
    /// Initial bounds; `f64::INFINITY` means unbounded.
    pub bounds: Vec<f64>,
    /// Absolute slack on single-cost bound comparisons.
    pub tolerance: f64,
}

impl SessionConfig {
    pub fn plain() -> Self {
        SessionConfig {
            mode: Mode::Plain,
            costs: Vec::new(),
            bounds: Vec::new(),
            tolerance: 0.0,
        }
    }

    pub fn with_costs(mode: Mode, costs: &[&str], bounds: &[f64]) -> Self {
        SessionConfig {
            mode,
            costs: costs.iter().map(|s| s.to_string()).collect(),
            bounds: bounds.to_vec(),
            tolerance: 0.0,
        }
    }
}

/// What a client sees after every operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub domains: ValidDomains,
    pub assignment: Assignment,
    pub bounds: Vec<f64>,
    /// Cheapest remaining solution per bounded cost; absent in plain and
    /// approximate modes.
    pub min_costs: Option<Vec<f64>>,
    /// Efficient frontier of the remaining solutions within the bounds, in
    /// multi-cost exact modes.
    pub frontier: Option<Vec<Vec<i64>>>,
    /// Some unassigned variable has no valid value left.
    pub dead_end: bool,
}

enum Engine {
    Plain,
    Scalar {
        table: Vec<Vec<f64>>,
        /// Edge costs of the pristine diagram when the cost is not unary.
        pristine_costs: Option<EdgeCosts>,
        long: bool,
    },
    Pareto {
        tables: Vec<Vec<Vec<i64>>>,
        epsilon: Option<f64>,
    },
}

enum Labels {
    None,
    Scalar {
        costs: EdgeCosts,
        labels: ScalarLabels,
        skip: Option<SkipLabels>,
    },
    Pareto {
        costs: CostMatrix,
        labels: ParetoLabels,
        /// Bounds in label units (the first one scaled in approximate mode).
        scaled_first: i64,
    },
}

pub struct Session {
    artifact: Arc<Artifact>,
    mode: Mode,
    engine: Engine,
    pristine: Mdd,
    current: Mdd,
    origins: Vec<usize>,
    rho: Assignment,
    bounds: Vec<f64>,
    tolerance: f64,
    labels: Labels,
    relabels: u64,
    snapshot: Snapshot,
}

impl std::fmt::Debug for Session {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Session")
            .field("mode", &self.mode)
            .field("assignment", &self.rho)
            .field("bounds", &self.bounds)
            .field("relabels", &self.relabels)
            .finish()
    }
}

impl Session {
    pub fn new(artifact: Arc<Artifact>, config: SessionConfig) -> Result<Session, SessionError> {
        let merged = artifact.mdd();
        if merged.is_empty() {
            return Err(SessionError::EmptyArtifact);
        }
        let mode = config.mode;
        let specs = config
            .costs
            .iter()
            .map(|name| {
                artifact
                    .cost_index(name)
                    .map(|i| &artifact.costs()[i])
                    .ok_or_else(|| SessionError::UnknownCost(name.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let count_error = |expected: &str| SessionError::CostCount {
            mode: mode.name(),
            expected: expected.to_string(),
            got: specs.len(),
        };
        let (engine, pristine) = match mode {
            Mode::Plain => {
                if !specs.is_empty() {
                    return Err(count_error("0"));
                }
                (Engine::Plain, merged.clone())
            }
            Mode::Single | Mode::SingleReduced => {
                if specs.len() != 1 {
                    return Err(count_error("1"));
                }
                let spec = specs[0];
                let long = mode == Mode::SingleReduced;
                if spec.is_unary() {
                    let pristine = if long { merged.reduce() } else { merged.clone() };
                    let engine = Engine::Scalar {
                        table: spec.unary_table().to_vec(),
                        pristine_costs: None,
                        long,
                    };
                    (engine, pristine)
                } else {
                    if long {
                        return Err(SessionError::IncompatibleCost(format!(
                            "cost `{}` has non-unary components; use the merged single-cost mode",
                            spec.name()
                        )));
                    }
                    let (expanded, costs) = expand_nonunary(merged, spec, EXPANSION_NODE_LIMIT)
                        .map_err(|e| SessionError::IncompatibleCost(e.to_string()))?;
                    let engine = Engine::Scalar {
                        table: spec.unary_table().to_vec(),
                        pristine_costs: Some(costs),
                        long: false,
                    };
                    (engine, expanded)
                }
            }
            Mode::Bicost | Mode::BicostApprox { .. } | Mode::Kcost => {
                let ok = match mode {
                    Mode::Kcost => specs.len() >= 2,
                    _ => specs.len() == 2,
                };
                if !ok {
                    return Err(count_error(if mode == Mode::Kcost { "at least 2" } else { "2" }));
                }
                let tables = specs
                    .iter()
                    .map(|s| s.integer_table().map_err(|e| SessionError::IncompatibleCost(e.to_string())))
                    .collect::<Result<Vec<_>, _>>()?;
                let epsilon = match mode {
                    Mode::BicostApprox { epsilon } => {
                        if !(epsilon > 0.0) || !epsilon.is_finite() {
                            return Err(SessionError::IncompatibleCost(format!("epsilon {epsilon}")));
                        }
                        Some(epsilon)
                    }
                    _ => None,
                };
                CostMatrix::from_tables(merged, &tables).map_err(|e| SessionError::IncompatibleCost(e.to_string()))?;
                (Engine::Pareto { tables, epsilon }, merged.clone())
            }
        };
        let bounds = validate_bounds(mode, specs.len(), &config.bounds)?;
        let mut session = Session {
            artifact,
            mode,
            engine,
            current: pristine.clone(),
            origins: (0..pristine.num_edges()).collect(),
            pristine,
            rho: Assignment::new(),
            bounds,
            tolerance: config.tolerance,
            labels: Labels::None,
            relabels: 0,
            snapshot: Snapshot {
                domains: ValidDomains::empty(0),
                assignment: Assignment::new(),
                bounds: Vec::new(),
                min_costs: None,
                frontier: None,
                dead_end: false,
            },
        };
        session.relabel();
        session.refresh();
        Ok(session)
    }

    pub fn artifact(&self) -> &Arc<Artifact> {
        &self.artifact
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn assignment(&self) -> &Assignment {
        &self.rho
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    /// Number of label computations since the session was created,
    /// the initial one included.
    pub fn relabel_count(&self) -> u64 {
        self.relabels
    }

    /// The diagram restricted to the current assignment.
    pub fn current(&self) -> &Mdd {
        &self.current
    }

    pub fn snapshot(&self) -> &Snapshot {
        &self.snapshot
    }

    pub fn assign(&mut self, var: usize, value: usize) -> Result<&Snapshot, SessionError> {
        let vars = self.artifact.variables();
        if var >= vars.len() {
            return Err(SessionError::UnknownVariable(var));
        }
        if value >= vars[var].domain_size() {
            return Err(SessionError::OutOfDomain { var, value });
        }
        if self.rho.contains(var) {
            return Err(SessionError::AlreadyAssigned(var));
        }
        self.rho.insert(var, value);
        self.restrict();
        Ok(&self.snapshot)
    }

    pub fn unassign(&mut self, var: usize) -> Result<&Snapshot, SessionError> {
        if var >= self.artifact.variables().len() {
            return Err(SessionError::UnknownVariable(var));
        }
        if self.rho.remove(var).is_none() {
            return Err(SessionError::NotAssigned(var));
        }
        self.restrict();
        Ok(&self.snapshot)
    }

    /// Change the bounds. Returns whether labels had to be recomputed.
    pub fn set_bounds(&mut self, bounds: &[f64]) -> Result<bool, SessionError> {
        if self.mode == Mode::Plain {
            return Err(SessionError::NoCosts);
        }
        let bounds = validate_bounds(self.mode, self.bounds.len(), bounds)?;
        if bounds == self.bounds {
            return Ok(false);
        }
        let relabel = match &self.labels {
            Labels::Pareto { labels, scaled_first, .. } => {
                if self.mode.is_approx() {
                    // the scaling factor depends on the first bound
                    to_int(bounds[0]) != to_int(self.bounds[0]) || !labels.covers(&with_first(&bounds, *scaled_first))
                } else {
                    !labels.covers(&to_ints(&bounds))
                }
            }
            _ => false,
        };
        self.bounds = bounds;
        if relabel {
            self.relabel();
        }
        self.refresh();
        Ok(relabel)
    }

    fn restrict(&mut self) {
        let (mdd, origins) = self.pristine.restrict_tracked(&self.rho);
        self.current = mdd;
        self.origins = origins;
        self.relabel();
        self.refresh();
    }

    fn relabel(&mut self) {
        self.relabels += 1;
        if self.current.is_empty() {
            self.labels = Labels::None;
            return;
        }
        self.labels = match &self.engine {
            Engine::Plain => Labels::None,
            Engine::Scalar {
                table,
                pristine_costs,
                long,
            } => {
                let costs = match pristine_costs {
                    Some(c) => c.select(&self.origins),
                    None => EdgeCosts::from_unary(&self.current, table),
                };
                let labels = label_scalar(&self.current, &costs).expect("nonempty");
                let skip = long.then(|| skip_labels(&self.current, &costs, &labels, table));
                Labels::Scalar { costs, labels, skip }
            }
            Engine::Pareto { tables, epsilon } => {
                let mut bounds = to_ints(&self.bounds);
                let mut tables = tables.clone();
                if let Some(eps) = epsilon {
                    let scaled = scale_costs(&tables[0], bounds[0], *eps, self.current.num_vars())
                        .expect("epsilon checked at creation");
                    tables[0] = scaled.table;
                    bounds[0] = scaled.bound;
                }
                let costs = CostMatrix::from_tables(&self.current, &tables).expect("checked at creation");
                let labels = label_pareto(&self.current, &costs, &bounds).expect("nonempty");
                Labels::Pareto {
                    costs,
                    labels,
                    scaled_first: bounds[0],
                }
            }
        };
    }

    fn refresh(&mut self) {
        let n = self.current.num_vars();
        let mut min_costs = None;
        let mut frontier = None;
        let domains = match (&self.labels, &self.engine) {
            _ if self.current.is_empty() => ValidDomains::empty(n),
            (Labels::None, _) => self.current.valid_domains(),
            (Labels::Scalar { costs, labels, skip }, Engine::Scalar { table, .. }) => {
                min_costs = Some(vec![labels.min_cost()]);
                let bound = self.bounds[0];
                match skip {
                    Some(skip) => valid_domains_long(&self.current, table, costs, labels, skip, bound, self.tolerance),
                    None => valid_domains_scalar(&self.current, costs, labels, bound, self.tolerance),
                }
            }
            (
                Labels::Pareto {
                    costs,
                    labels,
                    scaled_first,
                },
                _,
            ) => {
                let bounds = if self.mode.is_approx() {
                    with_first(&self.bounds, *scaled_first)
                } else {
                    let bounds = to_ints(&self.bounds);
                    let within: Vec<Vec<i64>> = labels
                        .frontier()
                        .iter()
                        .filter(|t| t.iter().zip(&bounds).all(|(c, b)| c <= b))
                        .map(<[i64]>::to_vec)
                        .collect();
                    if !within.is_empty() {
                        min_costs =
                            Some((0..bounds.len()).map(|j| within.iter().map(|t| t[j]).min().unwrap() as f64).collect());
                    }
                    frontier = Some(within);
                    bounds
                };
                valid_domains_pareto(&self.current, costs, labels, &bounds).expect("labels cover the bounds")
            }
            _ => unreachable!("labels match the engine"),
        };
        let dead_end = domains.has_empty();
        self.snapshot = Snapshot {
            domains,
            assignment: self.rho.clone(),
            bounds: self.bounds.clone(),
            min_costs,
            frontier,
            dead_end,
        };
    }
}

fn with_first(bounds: &[f64], first: i64) -> Vec<i64> {
    let mut ints = to_ints(bounds);
    ints[0] = first;
    ints
}

fn to_int(b: f64) -> i64 {
    if b.is_infinite() || b >= UNBOUNDED as f64 {
        UNBOUNDED
    } else {
        b.floor() as i64
    }
}

fn to_ints(bounds: &[f64]) -> Vec<i64> {
    bounds.iter().map(|&b| to_int(b)).collect()
}

fn validate_bounds(mode: Mode, expected: usize, bounds: &[f64]) -> Result<Vec<f64>, SessionError> {
    if mode == Mode::Plain {
        return Ok(Vec::new());
    }
    if bounds.len() != expected {
        return Err(SessionError::BoundCount {
            expected,
            got: bounds.len(),
        });
    }
    for &b in bounds {
        if b.is_nan() || b == f64::NEG_INFINITY || (mode.is_multi() && b < 0.0) {
            return Err(SessionError::BadBound(b));
        }
    }
    Ok(bounds.to_vec())
}
