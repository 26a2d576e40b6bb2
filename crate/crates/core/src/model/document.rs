//! JSON model documents.
//!
//! ```json
//! {
//!   "variables": [{"name": "x1", "domain": ["black", "white"]}],
//!   "constraints": [
//!     {"type": "expr", "text": "x1 = black -> x2 != 0"},
//!     {"type": "table", "scope": ["x1", "x2"], "tuples": [["black", "small"]]}
//!   ],
//!   "costs": [{"name": "price", "unary": {"x1": {"black": 0, "white": 1}},
//!              "components": [{"scope": ["x1", "x2"],
//!                              "tuples": [{"values": ["white", "small"], "cost": 2}],
//!                              "default": 0}]}],
//!   "ordering": ["x2", "x1"]
//! }
//! ```
//!
//! Tuple entries that are JSON strings are value labels; JSON integers are
//! value indices. Variables omitted from a unary cost table cost nothing;
//! a variable that is present must price every one of its values.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{ConstraintBody, CostComponent, CostSpec, CspModel, ModelError, Result, Variable};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    variables: Vec<VariableDoc>,
    #[serde(default)]
    constraints: Vec<ConstraintDoc>,
    #[serde(default)]
    costs: Vec<CostDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ordering: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    domain: Vec<Value>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ConstraintDoc {
    Expr { text: String },
    Table { scope: Vec<String>, tuples: Vec<Vec<Value>> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostDoc {
    name: String,
    #[serde(default)]
    unary: BTreeMap<String, BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    components: Vec<ComponentDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    scope: Vec<String>,
    tuples: Vec<CostTupleDoc>,
    #[serde(default)]
    default: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostTupleDoc {
    values: Vec<Value>,
    cost: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Value {
    Index(u64),
    Label(String),
}

impl Value {
    fn as_label(&self) -> String {
        match self {
            Value::Index(i) => i.to_string(),
            Value::Label(s) => s.clone(),
        }
    }

    fn resolve(&self, var: &Variable) -> Result<usize> {
        let found = match self {
            Value::Index(i) => Some(*i as usize).filter(|&i| i < var.domain_size()),
            Value::Label(s) => var.value_of(s),
        };
        found.ok_or_else(|| ModelError::ValueOutOfDomain {
            variable: var.name.clone(),
            value: self.as_label(),
        })
    }
}

fn scope_indices(model: &CspModel, names: &[String]) -> Result<Vec<usize>> {
    names
        .iter()
        .map(|n| model.var_index(n).ok_or_else(|| ModelError::UndeclaredVariable(n.clone())))
        .collect()
}

/// Parse and validate a model document.
pub fn parse_model(document: &str) -> Result<CspModel> {
    let doc: ModelDoc = serde_json::from_str(document).map_err(|e| ModelError::Syntax {
        location: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let variables = doc
        .variables
        .iter()
        .map(|v| Variable::new(v.name.clone(), v.domain.iter().map(Value::as_label)))
        .collect();
    let mut model = CspModel::new(variables)?;
    for var in model.variables() {
        let mut labels = var.labels.clone();
        labels.sort();
        labels.dedup();
        if labels.len() != var.labels.len() {
            return Err(ModelError::Invalid(format!("duplicate label in domain of `{}`", var.name)));
        }
    }

    for c in &doc.constraints {
        match c {
            ConstraintDoc::Expr { text } => model.add_expr(text)?,
            ConstraintDoc::Table { scope, tuples } => {
                let scope = scope_indices(&model, scope)?;
                let mut resolved = Vec::with_capacity(tuples.len());
                for tuple in tuples {
                    if tuple.len() != scope.len() {
                        return Err(ModelError::Invalid(format!(
                            "table tuple has {} entries for a scope of {}",
                            tuple.len(),
                            scope.len()
                        )));
                    }
                    let row = tuple
                        .iter()
                        .zip(&scope)
                        .map(|(value, &v)| value.resolve(&model.variables()[v]))
                        .collect::<Result<Vec<_>>>()?;
                    resolved.push(row);
                }
                model.add_table(scope, resolved)?;
            }
        }
    }

    for c in &doc.costs {
        let cost = cost_from_doc(&model, c)?;
        model.add_cost(cost)?;
    }

    if let Some(order) = &doc.ordering {
        let ordering = scope_indices(&model, order)?;
        model.set_ordering(ordering)?;
    }
    Ok(model)
}

fn cost_from_doc(model: &CspModel, doc: &CostDoc) -> Result<CostSpec> {
    let mut unary: Vec<Vec<f64>> = model.domain_sizes().iter().map(|&d| vec![0.0; d]).collect();
    for (name, entries) in &doc.unary {
        let v = model.var_index(name).ok_or_else(|| ModelError::UndeclaredVariable(name.clone()))?;
        let var = &model.variables()[v];
        for label in entries.keys() {
            if var.value_of(label).is_none() {
                return Err(ModelError::ValueOutOfDomain {
                    variable: var.name.clone(),
                    value: label.clone(),
                });
            }
        }
        for (a, label) in var.labels.iter().enumerate() {
            unary[v][a] = *entries.get(label).ok_or_else(|| ModelError::MissingCost {
                cost: doc.name.clone(),
                variable: var.name.clone(),
                value: label.clone(),
            })?;
        }
    }
    let mut spec = CostSpec::unary(doc.name.clone(), unary);
    for comp in &doc.components {
        let scope = scope_indices(model, &comp.scope)?;
        let mut table = HashMap::new();
        for t in &comp.tuples {
            if t.values.len() != scope.len() {
                return Err(ModelError::Invalid(format!(
                    "cost `{}` component tuple has {} entries for a scope of {}",
                    doc.name,
                    t.values.len(),
                    scope.len()
                )));
            }
            let key = t
                .values
                .iter()
                .zip(&scope)
                .map(|(value, &v)| value.resolve(&model.variables()[v]))
                .collect::<Result<Vec<_>>>()?;
            table.insert(key, t.cost);
        }
        spec = spec.with_component(CostComponent {
            scope,
            table,
            default: comp.default,
        });
    }
    Ok(spec)
}

/// Serialize a model to a document that [`parse_model`] accepts.
pub fn serialize_model(model: &CspModel) -> String {
    let vars = model.variables();
    let label = |v: usize, a: usize| Value::Label(vars[v].labels[a].clone());
    let doc = ModelDoc {
        variables: vars
            .iter()
            .map(|v| VariableDoc {
                name: v.name.clone(),
                domain: v.labels.iter().cloned().map(Value::Label).collect(),
            })
            .collect(),
        constraints: model
            .constraints()
            .iter()
            .map(|c| match c.body() {
                ConstraintBody::Expr { text, .. } => ConstraintDoc::Expr { text: text.clone() },
                ConstraintBody::Table(tuples) => ConstraintDoc::Table {
                    scope: c.scope().iter().map(|&v| vars[v].name.clone()).collect(),
                    tuples: tuples
                        .iter()
                        .map(|t| t.iter().zip(c.scope()).map(|(&a, &v)| label(v, a)).collect())
                        .collect(),
                },
            })
            .collect(),
        costs: model
            .costs()
            .iter()
            .map(|c| CostDoc {
                name: c.name().to_string(),
                unary: c
                    .unary_table()
                    .iter()
                    .enumerate()
                    .map(|(v, row)| {
                        let entries = row.iter().enumerate().map(|(a, &cost)| (vars[v].labels[a].clone(), cost));
                        (vars[v].name.clone(), entries.collect())
                    })
                    .collect(),
                components: c
                    .components()
                    .iter()
                    .map(|comp| {
                        let mut tuples: Vec<CostTupleDoc> = comp
                            .table
                            .iter()
                            .map(|(key, &cost)| CostTupleDoc {
                                values: key.iter().zip(&comp.scope).map(|(&a, &v)| label(v, a)).collect(),
                                cost,
                            })
                            .collect();
                        tuples.sort_by(|a, b| format!("{:?}", a.values).cmp(&format!("{:?}", b.values)));
                        ComponentDoc {
                            scope: comp.scope.iter().map(|&v| vars[v].name.clone()).collect(),
                            tuples,
                            default: comp.default,
                        }
                    })
                    .collect(),
            })
            .collect(),
        ordering: if model.ordering().iter().enumerate().all(|(i, &v)| i == v) {
            None
        } else {
            Some(model.ordering().iter().map(|&v| vars[v].name.clone()).collect())
        },
    };
    serde_json::to_string_pretty(&doc).expect("model documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{brute_force_solutions, tshirt_with_costs, DEFAULT_ENUMERATION_CAP};

    pub(crate) const TSHIRT: &str = r#"{
      "variables": [
        {"name": "x1", "domain": ["black", "white", "red", "blue"]},
        {"name": "x2", "domain": ["small", "medium", "large"]},
        {"name": "x3", "domain": ["MIB", "STW"]}
      ],
      "constraints": [
        {"type": "expr", "text": "x3 = MIB -> x1 = black"},
        {"type": "expr", "text": "x2 = small -> x3 != STW"}
      ]
    }"#;

    #[test]
    fn parses_tshirt() {
        let m = parse_model(TSHIRT).unwrap();
        assert_eq!(m.num_vars(), 3);
        assert_eq!(m.domain_sizes(), vec![4, 3, 2]);
        assert_eq!(brute_force_solutions(&m, DEFAULT_ENUMERATION_CAP).unwrap().len(), 11);
    }

    #[test]
    fn single_unconstrained_unit_variable() {
        let m = parse_model(r#"{"variables": [{"name": "a", "domain": ["only"]}]}"#).unwrap();
        assert_eq!(brute_force_solutions(&m, DEFAULT_ENUMERATION_CAP).unwrap(), vec![vec![0]]);
    }

    #[test]
    fn undeclared_variable_is_rejected() {
        let doc = r#"{"variables": [{"name": "x1", "domain": ["a", "b"]}],
                      "constraints": [{"type": "expr", "text": "x9 = 1"}]}"#;
        assert_eq!(parse_model(doc), Err(ModelError::UndeclaredVariable("x9".into())));
        let doc = r#"{"variables": [{"name": "x1", "domain": ["a", "b"]}],
                      "constraints": [{"type": "table", "scope": ["x9"], "tuples": [[0]]}]}"#;
        assert_eq!(parse_model(doc), Err(ModelError::UndeclaredVariable("x9".into())));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_model("{\"variables\": [\n  {\"name\": }").unwrap_err();
        match err {
            ModelError::Syntax { location, .. } => assert!(location.starts_with("line 2"), "{location}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_domain_values_are_rejected() {
        let doc = r#"{"variables": [{"name": "x1", "domain": ["a", "b"]}],
                      "constraints": [{"type": "table", "scope": ["x1"], "tuples": [[2]]}]}"#;
        assert!(matches!(parse_model(doc), Err(ModelError::ValueOutOfDomain { .. })));
        let doc = r#"{"variables": [{"name": "x1", "domain": ["a", "b"]}],
                      "costs": [{"name": "c", "unary": {"x1": {"a": 1, "b": 2, "z": 3}}}]}"#;
        assert!(matches!(parse_model(doc), Err(ModelError::ValueOutOfDomain { .. })));
    }

    #[test]
    fn partial_unary_entry_is_rejected() {
        let doc = r#"{"variables": [{"name": "x1", "domain": ["a", "b"]}],
                      "costs": [{"name": "c", "unary": {"x1": {"a": 1}}}]}"#;
        assert!(matches!(parse_model(doc), Err(ModelError::MissingCost { .. })));
    }

    #[test]
    fn round_trip_preserves_solutions_and_costs() {
        let mut m = tshirt_with_costs();
        m.add_table(vec![0, 1], vec![vec![0, 0], vec![0, 1], vec![1, 2], vec![2, 1], vec![3, 2]]).unwrap();
        let comp = CostComponent {
            scope: vec![0, 2],
            table: [(vec![1, 1], 5.0), (vec![0, 0], -1.5)].into_iter().collect(),
            default: 0.25,
        };
        m.add_cost(CostSpec::zero("combo", &m.domain_sizes()).with_component(comp)).unwrap();
        m.set_ordering(vec![1, 2, 0]).unwrap();
        let back = parse_model(&serialize_model(&m)).unwrap();
        assert_eq!(
            brute_force_solutions(&m, DEFAULT_ENUMERATION_CAP).unwrap(),
            brute_force_solutions(&back, DEFAULT_ENUMERATION_CAP).unwrap()
        );
        assert_eq!(back.ordering(), m.ordering());
        for sol in brute_force_solutions(&m, DEFAULT_ENUMERATION_CAP).unwrap() {
            for (a, b) in m.costs().iter().zip(back.costs()) {
                assert_eq!(a.evaluate(&sol), b.evaluate(&sol));
            }
        }
    }
}
