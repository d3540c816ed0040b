//! The `fdl` command line.
//!
//! Exit codes: 0 success or consistent, 1 inconsistent, 2 usage or input
//! error, 3 operation unsupported under the chosen t-norm.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::answering::{check_consistency, Mode, QueryRequest};
use crate::canonical::{build_canonical, existential_cycle_check, Budget};
use crate::degree::Degree;
use crate::error::Error;
use crate::evaluator::AnswerSet;
use crate::hardness::{gen_ontology, parse_dimacs};
use crate::ontology::Ontology;
use crate::parser::{parse_ontology, parse_query, serialize_query};
use crate::query::Query;
use crate::rewriter::perfect_ref;
use crate::tnorm::TNorm;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "fdl", version, about = "Query answering over fuzzy DL-Lite_R ontologies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether an ontology is consistent.
    Check {
        ontology: PathBuf,
        #[arg(long, default_value = "godel")]
        tnorm: TNorm,
    },
    /// Answer a query over an ontology.
    Query(QueryArgs),
    /// Print the threshold-query rewriting of a query, one query per line.
    Rewrite {
        ontology: PathBuf,
        #[arg(short, long)]
        query: PathBuf,
        #[arg(long, default_value = "godel")]
        tnorm: TNorm,
    },
    /// Dump the (budgeted) canonical interpretation as TSV.
    Materialize {
        ontology: PathBuf,
        /// Maximum number of fresh elements.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value = "godel")]
        tnorm: TNorm,
    },
    /// Turn a DIMACS 3-CNF file into a Łukasiewicz DL-Lite_Horn ontology.
    GenHardness { cnf: PathBuf },
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    pub ontology: PathBuf,
    #[arg(short, long)]
    pub query: PathBuf,
    #[arg(long, default_value = "godel")]
    pub tnorm: TNorm,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    /// Required for threshold answering under Łukasiewicz.
    #[arg(long)]
    pub assume_consistent: bool,
    /// Use binary search instead of linear descent for --degree-of.
    #[arg(long, requires = "degree_of")]
    pub binary_search: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ModeArgs {
    #[arg(long, value_name = "D")]
    pub at_least: Option<Degree>,
    #[arg(long, value_name = "A,B,...", value_delimiter = ',')]
    pub degree_of: Option<Vec<String>>,
    #[arg(long, value_name = "K")]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub threshold: bool,
    #[arg(long)]
    pub positive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

impl QueryArgs {
    fn mode(&self) -> Mode {
        let m = &self.mode;
        if let Some(d) = &m.at_least {
            Mode::AtLeast(d.clone())
        } else if let Some(t) = &m.degree_of {
            Mode::DegreeOf { tuple: t.clone(), bisect: self.binary_search }
        } else if let Some(k) = m.top_k {
            Mode::TopK(k)
        } else if m.threshold {
            Mode::Threshold { assume_consistent: self.assume_consistent }
        } else {
            Mode::Positive
        }
    }
}

/// Renders answers as `{"answers":[{"tuple":[..],"degree":".."}],"complete":true}`.
pub fn answers_to_json(answers: &AnswerSet) -> String {
    let rows: Vec<serde_json::Value> = answers
        .rows()
        .iter()
        .map(|r| {
            let mut obj = serde_json::Map::new();
            obj.insert("tuple".into(), serde_json::json!(r.tuple));
            if let Some(d) = &r.degree {
                obj.insert("degree".into(), serde_json::Value::String(d.to_string()));
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    serde_json::json!({ "answers": rows, "complete": true }).to_string()
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidOntology(format!("{}: {e}", path.display())))
}

fn load_ontology(path: &Path) -> Result<Ontology, Error> {
    parse_ontology(&read(path)?)
}

fn load_query(path: &Path) -> Result<Query, Error> {
    parse_query(&read(path)?)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inconsistent(_) => EXIT_INCONSISTENT,
        Error::Unsupported { .. } | Error::ConsistencyNotAssumed(_) => EXIT_UNSUPPORTED,
        _ => EXIT_USAGE,
    }
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    match cli.command {
        Command::Check { ontology, tnorm } => {
            let o = load_ontology(&ontology)?;
            if check_consistency(&o, tnorm)? {
                writeln!(out, "consistent")?;
                Ok(EXIT_OK)
            } else {
                writeln!(out, "inconsistent")?;
                Ok(EXIT_INCONSISTENT)
            }
        }
        Command::Query(args) => {
            let o = load_ontology(&args.ontology)?;
            let request = QueryRequest { query: load_query(&args.query)?, mode: args.mode(), tnorm: args.tnorm };
            let answers = request.execute(&o)?;
            match args.format {
                Format::Tsv => write!(out, "{answers}")?,
                Format::Json => writeln!(out, "{}", answers_to_json(&answers))?,
            }
            Ok(EXIT_OK)
        }
        Command::Rewrite { ontology, query, tnorm } => {
            let o = load_ontology(&ontology)?;
            let q = load_query(&query)?.into_threshold()?;
            let positive: Vec<_> = o.positive_axioms().cloned().collect();
            for r in perfect_ref(&q, &positive, tnorm).queries() {
                writeln!(out, "{}", serialize_query(&Query::Threshold(r.clone())))?;
            }
            Ok(EXIT_OK)
        }
        Command::Materialize { ontology, budget, tnorm } => {
            let o = load_ontology(&ontology)?;
            let budget = budget.map_or_else(|| Budget::default_for(&o), Budget::new);
            if !existential_cycle_check(&o) {
                writeln!(err, "warning: the TBox has existential cycles; the dump may be truncated")?;
            }
            let c = build_canonical(&o, tnorm, budget);
            write!(out, "{}", c.interpretation.to_tsv())?;
            if !c.complete {
                writeln!(err, "warning: budget exhausted before reaching a fixpoint")?;
            }
            Ok(EXIT_OK)
        }
        Command::GenHardness { cnf } => {
            let phi = parse_dimacs(&read(&cnf)?)?;
            write!(out, "{}", gen_ontology(&phi))?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
