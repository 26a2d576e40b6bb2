//! Product catalogues: a CSV file with one row per product.
//!
//! Every column names a variable, except columns whose header starts with
//! `cost:`, which hold a numeric cost for the row. The solutions of the
//! derived model are exactly the catalogue rows.

use std::collections::HashMap;

use super::{CostComponent, CostSpec, CspModel, ModelError, Result, Variable};

#[derive(Debug, Clone, PartialEq)]
pub struct Catalogue {
    variables: Vec<String>,
    cost_names: Vec<String>,
    rows: Vec<(Vec<String>, Vec<f64>)>,
}

impl Catalogue {
    pub fn parse(text: &str) -> Result<Catalogue> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| ModelError::Syntax {
            location: "header".into(),
            message: e.to_string(),
        })?;
        let mut var_cols = Vec::new();
        let mut cost_cols = Vec::new();
        let mut variables = Vec::new();
        let mut cost_names = Vec::new();
        for (col, h) in headers.iter().enumerate() {
            match h.strip_prefix("cost:") {
                Some(name) => {
                    cost_cols.push(col);
                    cost_names.push(name.trim().to_string());
                }
                None => {
                    var_cols.push(col);
                    variables.push(h.to_string());
                }
            }
        }
        if variables.is_empty() {
            return Err(ModelError::NoVariables);
        }

        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| ModelError::MalformedRow {
                row,
                message: e.to_string(),
            })?;
            let values = var_cols.iter().map(|&c| record[c].to_string()).collect();
            let costs = cost_cols
                .iter()
                .map(|&c| {
                    record[c].parse::<f64>().map_err(|_| ModelError::MalformedRow {
                        row,
                        message: format!("`{}` is not a number", &record[c]),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((values, costs));
        }
        Ok(Catalogue {
            variables,
            cost_names,
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The model whose solutions are the catalogue rows. Domains list the
    /// labels in order of first appearance; each cost column becomes a cost
    /// whose single component spans every variable.
    pub fn to_model(&self) -> Result<CspModel> {
        let mut labels: Vec<Vec<String>> = vec![Vec::new(); self.variables.len()];
        let mut tuples = Vec::with_capacity(self.rows.len());
        for (values, _) in &self.rows {
            let tuple = values
                .iter()
                .enumerate()
                .map(|(v, label)| match labels[v].iter().position(|l| l == label) {
                    Some(a) => a,
                    None => {
                        labels[v].push(label.clone());
                        labels[v].len() - 1
                    }
                })
                .collect::<Vec<_>>();
            tuples.push(tuple);
        }
        let variables = self
            .variables
            .iter()
            .zip(labels)
            .map(|(name, labels)| Variable::new(name.clone(), labels))
            .collect();
        let mut model = CspModel::new(variables)?;
        let scope: Vec<usize> = (0..self.variables.len()).collect();

        for (k, name) in self.cost_names.iter().enumerate() {
            let mut table = HashMap::new();
            for (row, (tuple, (_, costs))) in tuples.iter().zip(&self.rows).enumerate() {
                if let Some(prev) = table.insert(tuple.clone(), costs[k]) {
                    if prev != costs[k] {
                        return Err(ModelError::MalformedRow {
                            row: row + 1,
                            message: format!("duplicate product with a different `{name}`"),
                        });
                    }
                }
            }
            let spec = CostSpec::zero(name.clone(), &model.domain_sizes()).with_component(CostComponent {
                scope: scope.clone(),
                table,
                default: 0.0,
            });
            model.add_cost(spec)?;
        }
        model.add_table(scope, tuples)?;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{brute_force_solutions, DEFAULT_ENUMERATION_CAP};

    const CSV: &str = "color,size,cost:price\nblack,small,10\nwhite,large,12\nblack,large,11\n";

    #[test]
    fn rows_become_solutions() {
        let cat = Catalogue::parse(CSV).unwrap();
        assert_eq!(cat.len(), 3);
        let m = cat.to_model().unwrap();
        assert_eq!(m.variables()[0].labels, vec!["black", "white"]);
        assert_eq!(m.variables()[1].labels, vec!["small", "large"]);
        let sols = brute_force_solutions(&m, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(sols, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        let price = m.cost("price").unwrap();
        assert_eq!(price.evaluate(&[1, 1]), 12.0);
        assert_eq!(price.evaluate(&[0, 1]), 11.0);
    }

    #[test]
    fn bad_cost_cell_names_the_row() {
        let err = Catalogue::parse("a,cost:c\nx,1\ny,cheap\n").unwrap_err();
        assert!(matches!(err, ModelError::MalformedRow { row: 2, .. }));
    }

    #[test]
    fn ragged_row_is_rejected() {
        assert!(matches!(
            Catalogue::parse("a,b\nx,y\nz\n"),
            Err(ModelError::MalformedRow { row: 2, .. })
        ));
    }
}
