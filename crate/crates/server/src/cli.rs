//! The `mddconf` command line.
//!
//! Exit codes: 0 ok, 1 parse error, 2 resource limit, 3 query error or
//! verification mismatch.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use mddconf::artifact::{Artifact, CompileOptions};
use mddconf::bench::{self, BenchOptions};
use mddconf::bdd::DEFAULT_NODE_LIMIT;
use mddconf::model::{parse_model, Assignment};
use mddconf::session::{Mode, Session, SessionConfig};
use mddconf::verify::{verify_model, VerifyOptions};
use mddconf::wcvd::{edge_weights, semiring_label, Counting, MinPlus, SumProduct};

use crate::api::{self, ApiConfig};
use crate::wire::{frontier_lines, stats_lines, WireSnapshot};
use crate::{compile_document, DocumentKind, LoadError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_QUERY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mddconf", version, about = "Compile configuration models and query valid domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a model (.json) or catalogue (.csv) into a diagram file.
    Compile {
        model: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Print structure sizes and the solution count.
        #[arg(long)]
        stats: bool,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: usize,
    },
    /// Print valid domains of a compiled diagram.
    Query {
        mdd: PathBuf,
        /// `var=label`, repeatable.
        #[arg(long = "assign", value_name = "VAR=VALUE")]
        assign: Vec<String>,
        /// Cost name, repeatable; pairs with `--max` in order.
        #[arg(long = "cost")]
        cost: Vec<String>,
        /// Bound for the matching `--cost`; `inf` for none.
        #[arg(long = "max")]
        max: Vec<String>,
        /// Approximate two-cost query with this epsilon.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Single cost on the reduced diagram with long edges.
        #[arg(long)]
        reduced: bool,
        /// Print the efficient frontier of a two- or k-cost query.
        #[arg(long)]
        frontier: bool,
        #[arg(long)]
        marginals: Option<SemiringArg>,
        /// Print the full snapshot as JSON instead.
        #[arg(long)]
        json: bool,
    },
    /// Cross-check a model against brute-force enumeration.
    Verify {
        model: PathBuf,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        /// Make single-cost bound checks off by one; verification must fail.
        #[arg(long)]
        mutate: bool,
    },
    /// Time label, domain and restrict phases on synthetic diagrams.
    Bench {
        /// Approximate edge counts, e.g. `1e4,1e5`.
        #[arg(long, value_delimiter = ',', default_values_t = vec!["1e4".to_string(), "1e5".to_string()])]
        sizes: Vec<String>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        costs: u8,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "MDDCONF_BIND", default_value = "127.0.0.1:8080")]
        bind: String,
        #[arg(long, default_value_t = 60)]
        compile_timeout_secs: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SemiringArg {
    /// Number of solutions.
    Count,
    /// Sum over solutions of the product of the first cost's values.
    SumProduct,
    /// Cheapest solution under the first cost.
    MinCost,
}

struct Failure(i32, String);

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Parse(m) => Failure(EXIT_PARSE, m),
            LoadError::Limit(m) => Failure(EXIT_LIMIT, m),
        }
    }
}

fn query_error(m: impl ToString) -> Failure {
    Failure(EXIT_QUERY, m.to_string())
}

/// Parse `args` (program name first) and run. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{e}");
            } else {
                let _ = write!(err, "{e}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure(EXIT_PARSE, e.to_string());
    match command {
        Command::Compile {
            model,
            output,
            stats,
            node_limit,
        } => {
            let text = std::fs::read_to_string(&model).map_err(io)?;
            let artifact = compile_document(&text, DocumentKind::from_path(&model), CompileOptions { node_limit })?;
            std::fs::write(&output, artifact.to_json()).map_err(io)?;
            if stats {
                write!(out, "{}", stats_lines(artifact.stats())).map_err(io)?;
            }
        }
        Command::Query {
            mdd,
            assign,
            cost,
            max,
            epsilon,
            reduced,
            frontier,
            marginals,
            json,
        } => {
            let text = std::fs::read_to_string(&mdd).map_err(io)?;
            let artifact = Arc::new(Artifact::from_json(&text).map_err(|e| Failure(EXIT_PARSE, e.to_string()))?);
            let rho = parse_assignments(&artifact, &assign)?;
            if cost.len() != max.len() {
                return Err(query_error("every --cost needs a --max"));
            }
            let bounds = max
                .iter()
                .map(|m| parse_bound(m).ok_or_else(|| query_error(format!("bad bound `{m}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let mode = match (cost.len(), epsilon) {
                (0, _) => Mode::Plain,
                (1, _) if reduced => Mode::SingleReduced,
                (1, _) => Mode::Single,
                (2, Some(epsilon)) => Mode::BicostApprox { epsilon },
                (2, None) => Mode::Bicost,
                (_, _) => Mode::Kcost,
            };
            let names: Vec<&str> = cost.iter().map(String::as_str).collect();
            let config = SessionConfig::with_costs(mode, &names, &bounds);
            let mut session = Session::new(artifact.clone(), config).map_err(query_error)?;
            for (var, value) in rho.iter() {
                session.assign(var, value).map_err(query_error)?;
            }
            let snap = WireSnapshot::new(&artifact, session.snapshot(), 0.0);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&snap).expect("serializable")).map_err(io)?;
            } else {
                writeln!(out, "{}", snap.domains_line()).map_err(io)?;
            }
            if frontier {
                let tuples = snap
                    .frontier
                    .as_ref()
                    .ok_or_else(|| query_error(format!("mode {} has no exact frontier", mode.name())))?;
                write!(out, "{}", frontier_lines(tuples)).map_err(io)?;
            }
            if let Some(semiring) = marginals {
                write!(out, "{}", marginal_lines(&artifact, &rho, semiring, cost.first())?).map_err(io)?;
            }
        }
        Command::Verify { model, seeds, mutate } => {
            let text = std::fs::read_to_string(&model).map_err(io)?;
            let parsed = parse_model(&text).map_err(|e| Failure(EXIT_PARSE, e.to_string()))?;
            let options = VerifyOptions {
                seeds,
                tolerance: if mutate { -1.0 } else { VerifyOptions::default().tolerance },
            };
            let report = verify_model(&parsed, &options).map_err(|e| Failure(EXIT_LIMIT, e.to_string()))?;
            writeln!(out, "checks {} mismatches {}", report.checks, report.mismatches.len()).map_err(io)?;
            for m in report.mismatches.iter().take(5) {
                writeln!(out, "{m}").map_err(io)?;
            }
            if !report.passed() {
                return Err(query_error("verification failed"));
            }
        }
        Command::Bench {
            sizes,
            costs,
            repeats,
            csv,
        } => {
            let sizes = sizes
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|v| *v >= 1.0)
                        .map(|v| v as usize)
                        .ok_or_else(|| Failure(EXIT_PARSE, format!("bad size `{s}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let rows = bench::run(&BenchOptions {
                sizes,
                costs: costs as usize,
                repeats,
                seed: 1,
            });
            let csv_err = |e: csv::Error| Failure(EXIT_PARSE, e.to_string());
            match csv {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(io)?;
                    bench::write_csv(&rows, file).map_err(csv_err)?;
                }
                None => bench::write_csv(&rows, &mut *out).map_err(csv_err)?,
            }
        }
        Command::Serve {
            bind,
            compile_timeout_secs,
        } => {
            let config = ApiConfig {
                compile_timeout: Duration::from_secs(compile_timeout_secs),
                ..ApiConfig::default()
            };
            let runtime = tokio::runtime::Runtime::new().map_err(io)?;
            writeln!(out, "listening on {bind}").map_err(io)?;
            runtime.block_on(api::serve(&bind, config)).map_err(io)?;
        }
    }
    Ok(())
}

fn parse_bound(text: &str) -> Option<f64> {
    match text.trim() {
        "inf" | "none" => Some(f64::INFINITY),
        t => t.parse().ok().filter(|v: &f64| v.is_finite()),
    }
}

fn parse_assignments(artifact: &Artifact, pairs: &[String]) -> Result<Assignment, Failure> {
    let mut rho = Assignment::new();
    for pair in pairs {
        let (name, label) = pair
            .split_once('=')
            .ok_or_else(|| query_error(format!("expected VAR=VALUE, got `{pair}`")))?;
        let var = artifact
            .var_index(name.trim())
            .ok_or_else(|| query_error(format!("unknown variable `{name}`")))?;
        let value = artifact.variables()[var]
            .value_of(label.trim())
            .ok_or_else(|| query_error(format!("`{label}` is not a value of `{name}`")))?;
        if rho.contains(var) {
            return Err(query_error(format!("`{name}` assigned twice")));
        }
        rho.insert(var, value);
    }
    Ok(rho)
}

fn marginal_lines(
    artifact: &Artifact,
    rho: &Assignment,
    semiring: SemiringArg,
    cost: Option<&String>,
) -> Result<String, Failure> {
    let m = artifact.mdd().restrict(rho);
    let mut text = String::new();
    if m.is_empty() {
        text.push_str("total 0\n");
        return Ok(text);
    }
    let table = || -> Result<Vec<Vec<f64>>, Failure> {
        let name = cost.ok_or_else(|| query_error("this semiring needs a --cost"))?;
        let i = artifact
            .cost_index(name)
            .ok_or_else(|| query_error(format!("unknown cost `{name}`")))?;
        let spec = &artifact.costs()[i];
        if !spec.is_unary() {
            return Err(query_error(format!("cost `{name}` is not unary")));
        }
        Ok(spec.unary_table().to_vec())
    };
    let (marginals, total): (Vec<Vec<String>>, String) = match semiring {
        SemiringArg::Count => {
            let ones: Vec<Vec<u128>> = m.domains().sizes().iter().map(|&d| vec![1; d]).collect();
            let l = semiring_label::<Counting>(&m, &edge_weights(&m, &ones)).map_err(query_error)?;
            (strings(&l.marginals), l.total.to_string())
        }
        SemiringArg::SumProduct => {
            let l = semiring_label::<SumProduct>(&m, &edge_weights(&m, &table()?)).map_err(query_error)?;
            (strings(&l.marginals), l.total.to_string())
        }
        SemiringArg::MinCost => {
            let l = semiring_label::<MinPlus>(&m, &edge_weights(&m, &table()?)).map_err(query_error)?;
            (strings(&l.marginals), l.total.to_string())
        }
    };
    for (var, row) in artifact.variables().iter().zip(&marginals) {
        for (label, value) in var.labels.iter().zip(row) {
            text.push_str(&format!("{}={}:{}\n", var.name, label, value));
        }
    }
    text.push_str(&format!("total {total}\n"));
    Ok(text)
}

fn strings<E: ToString>(rows: &[Vec<E>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r.iter().map(E::to_string).collect()).collect()
}
