//! Compiled artifacts: the merged MDD of a model together with its variable
//! symbol tables and cost tables, and the JSON file format they are stored in.
//!
//! Variables of an artifact are in layer order, so variable `i` is layer `i`.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bdd::{build_bdd, BddError, DEFAULT_NODE_LIMIT};
use crate::mdd::{LayerDomains, Mdd, MddError};
use crate::model::{Catalogue, ConstraintBody, CostComponent, CostSpec, CspModel, ModelError, Variable};
use crate::wcvd::encode_cost_variable;

/// Cap on distinct cost values when measuring the explicit cost encoding.
pub const ENCODING_STATS_CAP: usize = 100_000;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Bdd(#[from] BddError),
    #[error(transparent)]
    Mdd(#[from] MddError),
    #[error("bad artifact file: {0}")]
    Format(String),
}

impl CompileError {
    /// True for resource limits as opposed to malformed input.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            CompileError::Bdd(BddError::NodeLimit(_))
                | CompileError::Bdd(BddError::CapExceeded(_))
                | CompileError::Bdd(BddError::Model(ModelError::ScopeTooLarge(_)))
                | CompileError::Model(ModelError::ScopeTooLarge(_))
                | CompileError::Model(ModelError::CapExceeded(_))
                | CompileError::Mdd(MddError::ExpansionLimit(_))
                | CompileError::Mdd(MddError::CapExceeded(_))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompileOptions {
    pub node_limit: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

/// Sizes of the compiled structures. `bdd_*` are zero for catalogues;
/// `encoded_*` describe the diagram with the first cost encoded as a
/// variable and are absent when that cost is not a small integer cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileStats {
    pub bdd_nodes: usize,
    pub bdd_edges: usize,
    pub mdd_nodes: usize,
    pub mdd_edges: usize,
    pub reduced_nodes: usize,
    pub reduced_edges: usize,
    pub encoded_nodes: Option<usize>,
    pub encoded_edges: Option<usize>,
    pub solutions: u128,
    pub compile_ms: f64,
}

#[derive(Debug, Clone)]
pub struct Artifact {
    variables: Vec<Variable>,
    costs: Vec<CostSpec>,
    mdd: Mdd,
    stats: CompileStats,
}

impl Artifact {
    /// Compile a model: reorder to layer order, build the BDD, extract,
    /// expand long edges and merge.
    pub fn compile(model: &CspModel, options: CompileOptions) -> Result<Artifact, CompileError> {
        let start = Instant::now();
        let model = model.in_layer_order();
        let (bdd, root, enc) = build_bdd(&model, options.node_limit)?;
        let bdd_nodes = bdd.reachable(root).len();
        let mdd = Mdd::from_bdd(&bdd, root, &enc).expand().merge();
        drop(bdd);
        Ok(Artifact::assemble(model.variables().to_vec(), model.costs().to_vec(), mdd, bdd_nodes, start))
    }

    /// Compile a product catalogue directly from its rows.
    pub fn from_catalogue(catalogue: &Catalogue) -> Result<Artifact, CompileError> {
        let start = Instant::now();
        let model = catalogue.to_model()?;
        let rows = match model.constraints().first().map(|c| c.body()) {
            Some(ConstraintBody::Table(rows)) => rows.clone(),
            _ => Vec::new(),
        };
        let mdd = Mdd::from_rows(&model.domain_sizes(), &rows)?;
        Ok(Artifact::assemble(model.variables().to_vec(), model.costs().to_vec(), mdd, 0, start))
    }

    fn assemble(variables: Vec<Variable>, costs: Vec<CostSpec>, mdd: Mdd, bdd_nodes: usize, start: Instant) -> Artifact {
        let reduced = mdd.reduce();
        let encoded = costs
            .first()
            .and_then(|c| c.integer_table().ok())
            .and_then(|t| encode_cost_variable(&mdd, &t, mdd.num_vars(), ENCODING_STATS_CAP, DEFAULT_NODE_LIMIT).ok());
        let stats = CompileStats {
            bdd_nodes,
            bdd_edges: 2 * bdd_nodes,
            mdd_nodes: mdd.num_nodes(),
            mdd_edges: mdd.num_edges(),
            reduced_nodes: reduced.num_nodes(),
            reduced_edges: reduced.num_edges(),
            encoded_nodes: encoded.as_ref().map(|e| e.mdd.num_nodes()),
            encoded_edges: encoded.as_ref().map(|e| e.mdd.num_edges()),
            solutions: mdd.count(),
            compile_ms: start.elapsed().as_secs_f64() * 1000.0,
        };
        Artifact {
            variables,
            costs,
            mdd,
            stats,
        }
    }

    /// Wrap an existing merged diagram, e.g. a synthetic benchmark instance.
    pub fn from_mdd(variables: Vec<Variable>, costs: Vec<CostSpec>, mdd: Mdd) -> Result<Artifact, CompileError> {
        if variables.len() != mdd.num_vars()
            || variables.iter().zip(mdd.domains().sizes()).any(|(v, &d)| v.domain_size() != d)
        {
            return Err(CompileError::Format("variables do not match the diagram domains".into()));
        }
        let mut check = CspModel::new(variables.clone())?;
        for c in &costs {
            check.add_cost(c.clone())?;
        }
        Ok(Artifact::assemble(variables, costs, mdd, 0, Instant::now()))
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn costs(&self) -> &[CostSpec] {
        &self.costs
    }

    pub fn cost_index(&self, name: &str) -> Option<usize> {
        self.costs.iter().position(|c| c.name() == name)
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// The merged diagram.
    pub fn mdd(&self) -> &Mdd {
        &self.mdd
    }

    pub fn stats(&self) -> &CompileStats {
        &self.stats
    }

    pub fn to_json(&self) -> String {
        let (layers, edges) = self.mdd.to_parts();
        let file = ArtifactFile {
            v: 1,
            n: self.mdd.num_vars(),
            domains: self.mdd.domains().sizes().to_vec(),
            variables: self.variables.clone(),
            costs: self.costs.iter().map(CostFile::from_spec).collect(),
            stats: self.stats.clone(),
            num_nodes: self.mdd.num_nodes(),
            num_edges: self.mdd.num_edges(),
            nodes: layers.iter().enumerate().map(|(id, &l)| [id, l]).collect(),
            edges: edges.iter().map(|&(s, d, a)| [s, d, a]).collect(),
        };
        serde_json::to_string(&file).expect("artifacts serialize")
    }

    pub fn from_json(text: &str) -> Result<Artifact, CompileError> {
        let file: ArtifactFile = serde_json::from_str(text).map_err(|e| CompileError::Format(e.to_string()))?;
        if file.v != 1 {
            return Err(CompileError::Format(format!("unsupported version {}", file.v)));
        }
        if file.n != file.domains.len() || file.nodes.len() != file.num_nodes || file.edges.len() != file.num_edges {
            return Err(CompileError::Format("header does not match the tables".into()));
        }
        let mut layers = vec![usize::MAX; file.num_nodes];
        for &[id, layer] in &file.nodes {
            if id >= layers.len() {
                return Err(CompileError::Format(format!("node id {id} out of range")));
            }
            layers[id] = layer;
        }
        if layers.contains(&usize::MAX) {
            return Err(CompileError::Format("node table has gaps".into()));
        }
        let edges: Vec<(usize, usize, usize)> = file.edges.iter().map(|&[s, d, a]| (s, d, a)).collect();
        let mdd = Mdd::from_parts(LayerDomains::full(&file.domains), &layers, &edges)?;
        let costs = file.costs.into_iter().map(CostFile::into_spec).collect();
        let mut artifact = Artifact::from_mdd(file.variables, costs, mdd)?;
        artifact.stats = file.stats;
        Ok(artifact)
    }
}

#[derive(Serialize, Deserialize)]
struct ArtifactFile {
    v: u32,
    n: usize,
    domains: Vec<usize>,
    variables: Vec<Variable>,
    costs: Vec<CostFile>,
    stats: CompileStats,
    num_nodes: usize,
    num_edges: usize,
    nodes: Vec<[usize; 2]>,
    edges: Vec<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
struct CostFile {
    name: String,
    unary: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    components: Vec<ComponentFile>,
}

#[derive(Serialize, Deserialize)]
struct ComponentFile {
    scope: Vec<usize>,
    entries: Vec<(Vec<usize>, f64)>,
    default: f64,
}

impl CostFile {
    fn from_spec(c: &CostSpec) -> CostFile {
        CostFile {
            name: c.name().to_string(),
            unary: c.unary_table().to_vec(),
            components: c
                .components()
                .iter()
                .map(|comp| {
                    let mut entries: Vec<(Vec<usize>, f64)> = comp.table.iter().map(|(k, &v)| (k.clone(), v)).collect();
                    entries.sort_by(|a, b| a.0.cmp(&b.0));
                    ComponentFile {
                        scope: comp.scope.clone(),
                        entries,
                        default: comp.default,
                    }
                })
                .collect(),
        }
    }

    fn into_spec(self) -> CostSpec {
        let mut spec = CostSpec::unary(self.name, self.unary);
        for comp in self.components {
            let table: HashMap<Vec<usize>, f64> = comp.entries.into_iter().collect();
            spec = spec.with_component(CostComponent {
                scope: comp.scope,
                table,
                default: comp.default,
            });
        }
        spec
    }
}
