//! Differential check of compiled sessions against brute-force enumeration.
//!
//! Each seed draws a random partial assignment and random bounds taken from
//! the costs of actual solutions, so bounds sit exactly on the boundary
//! where off-by-one errors show up.

use std::fmt;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use thiserror::Error;

use crate::artifact::{Artifact, CompileError, CompileOptions};
use crate::generate::rng;
use crate::model::{brute_force_solutions, brute_force_vd, Assignment, CspModel, ModelError, ValidDomains, DEFAULT_ENUMERATION_CAP};
use crate::session::{Mode, Session, SessionConfig, SessionError};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Oracle(#[from] ModelError),
    #[error(transparent)]
    Session(#[from] SessionError),
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seeds: u64,
    /// Slack the engine adds to single-cost bounds. A negative value makes
    /// the engine wrong on purpose.
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seeds: 100,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub seed: u64,
    pub check: String,
    pub assignment: Assignment,
    pub expected: ValidDomains,
    pub got: ValidDomains,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed {} {} at {:?}: expected {} got {}",
            self.seed,
            self.check,
            self.assignment.iter().collect::<Vec<_>>(),
            self.expected,
            self.got
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub checks: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compile `model` and compare every session mode that applies to its
/// costs with the enumeration oracle.
pub fn verify_model(model: &CspModel, options: &VerifyOptions) -> Result<VerifyReport, VerifyError> {
    let model = model.in_layer_order();
    let artifact = Arc::new(Artifact::compile(&model, CompileOptions::default())?);
    let solutions = brute_force_solutions(&model, DEFAULT_ENUMERATION_CAP)?;
    let mut report = VerifyReport::default();
    let sizes = model.domain_sizes();
    let integral: Vec<usize> = (0..model.costs().len()).filter(|&i| model.costs()[i].integer_table().is_ok()).collect();

    for seed in 0..options.seeds {
        let mut rng = rng(seed);
        let mut rho = Assignment::new();
        for (v, &d) in sizes.iter().enumerate() {
            if rng.random_bool(0.3) {
                rho.insert(v, rng.random_range(0..d));
            }
        }
        let sample = solutions.choose(&mut rng);
        let mut check = |name: String, config: SessionConfig, bounds: Vec<(usize, f64)>| -> Result<(), VerifyError> {
            let specs: Vec<_> = bounds.iter().map(|&(c, k)| (&model.costs()[c], k)).collect();
            let expected = brute_force_vd(&model, &rho, &specs)?;
            let mut session = Session::new(artifact.clone(), config)?;
            for (v, a) in rho.iter() {
                session.assign(v, a)?;
            }
            let got = session.snapshot().domains.clone();
            report.checks += 1;
            if got != expected {
                report.mismatches.push(Mismatch {
                    seed,
                    check: name,
                    assignment: rho.clone(),
                    expected,
                    got,
                });
            }
            Ok(())
        };
        if artifact.mdd().is_empty() {
            continue;
        }
        check("plain".into(), SessionConfig::plain(), Vec::new())?;
        let Some(sample) = sample else { continue };
        for (c, spec) in model.costs().iter().enumerate() {
            let k = spec.evaluate(sample);
            let modes: &[Mode] = if spec.is_unary() {
                &[Mode::Single, Mode::SingleReduced]
            } else {
                &[Mode::Single]
            };
            for &mode in modes {
                let mut config = SessionConfig::with_costs(mode, &[spec.name()], &[k]);
                config.tolerance = options.tolerance;
                check(format!("{} {}<={k}", mode.name(), spec.name()), config, vec![(c, k)])?;
            }
        }
        if integral.len() >= 2 {
            let pick: Vec<usize> = integral.choose_multiple(&mut rng, 2).copied().collect();
            let ks: Vec<f64> = pick.iter().map(|&c| model.costs()[c].evaluate(sample)).collect();
            let names: Vec<&str> = pick.iter().map(|&c| model.costs()[c].name()).collect();
            check(
                format!("bicost {}<={} {}<={}", names[0], ks[0], names[1], ks[1]),
                SessionConfig::with_costs(Mode::Bicost, &names, &ks),
                pick.iter().copied().zip(ks.iter().copied()).collect(),
            )?;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tshirt_with_costs;

    #[test]
    fn tshirt_verifies() {
        let report = verify_model(&tshirt_with_costs(), &VerifyOptions::default()).unwrap();
        assert!(report.passed(), "{:?}", report.mismatches.first().map(|m| m.to_string()));
        assert!(report.checks > 300);
    }

    #[test]
    fn off_by_one_is_caught() {
        let options = VerifyOptions {
            seeds: 20,
            tolerance: -1.0,
        };
        let report = verify_model(&tshirt_with_costs(), &options).unwrap();
        assert!(!report.passed());
    }
}
