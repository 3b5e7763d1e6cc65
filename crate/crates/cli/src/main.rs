mod commands;
mod doc;

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use parchain::decomp::{Strategy, DEFAULT_BUDGET};
use parchain::linalg::check_modulus;
use parchain::Error;
use serde_json::{json, Value};

use crate::commands::Output;
use crate::doc::Document;

/// Parametrized chain complexes over finite posets with coefficients in F_p.
#[derive(Parser)]
#[command(name = "parchain", version)]
struct Cli {
    /// Prime field modulus; must match the field of any input document.
    #[arg(long, global = true, env = "PARCHAIN_FIELD")]
    field: Option<u64>,
    /// Emit one JSON document per run instead of a text report.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Interchange file; standard input when absent or `-`.
    file: Option<PathBuf>,
    /// Functor or chain functor to act on, when the document holds several.
    #[arg(long)]
    name: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Fitting,
}

#[derive(Subcommand)]
enum Command {
    /// Check every object in the document.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Dimensions, poset dimension and homology table.
    Info {
        #[command(flatten)]
        input: Input,
    },
    /// Minimal projective cover.
    Cover {
        #[command(flatten)]
        input: Input,
    },
    /// Minimal projective resolution.
    Resolve {
        #[command(flatten)]
        input: Input,
        /// Give up after this many stages.
        #[arg(long, default_value_t = 32)]
        max_len: usize,
    },
    /// Minimal cofibrant replacement; writes the replacement as a document.
    Replace {
        #[command(flatten)]
        input: Input,
    },
    /// Sphere and disk summands of a cofibrant chain functor.
    Decompose {
        #[command(flatten)]
        input: Input,
    },
    /// Endomorphism algebra: dimension and structure constants.
    Endring {
        #[command(flatten)]
        input: Input,
    },
    /// Indecomposability test.
    Indec {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "exhaustive")]
        strategy: StrategyArg,
        /// Exhaustive: largest `p^dim` to enumerate. Fitting: number of random trials.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Gluing criteria for a cover `A ∪ B` of the poset.
    Glue {
        #[command(flatten)]
        input: Input,
        /// Comma-separated elements of A; defaults to the document's gluing block.
        #[arg(long = "A", value_delimiter = ',')]
        a: Vec<String>,
        /// Comma-separated elements of B.
        #[arg(long = "B", value_delimiter = ',')]
        b: Vec<String>,
    },
    /// Finite realization of a poset of dimension at most one.
    Realize {
        /// Interchange file; standard input when absent or `-`.
        file: Option<PathBuf>,
        #[arg(long)]
        poset: Option<String>,
        /// Comma-separated edge coordinates in (-1, 0), as `num/den`.
        #[arg(long = "V", allow_hyphen_values = true)]
        v: String,
        /// Comma-separated closed support; all elements by default.
        #[arg(long = "D", value_delimiter = ',')]
        d: Option<Vec<String>>,
    },
    /// Transfer of a point `x` or `(x,y,t)` into a realization.
    Transfer {
        file: Option<PathBuf>,
        #[arg(long)]
        poset: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long = "V", allow_hyphen_values = true)]
        v: Option<String>,
        #[arg(long = "D", value_delimiter = ',')]
        d: Option<Vec<String>>,
    },
    /// Write a built-in example as a document.
    Example {
        /// One of fig1_a, fig1_b, fig1_c, fig2, fig3_a, fig3_b, fig3_c, triple_chain_pair,
        /// triple_chain_pair.left, triple_chain_pair.right, sphere(n), disk(n).
        name: String,
    },
}

impl Command {
    fn label(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Info { .. } => "info",
            Command::Cover { .. } => "cover",
            Command::Resolve { .. } => "resolve",
            Command::Replace { .. } => "replace",
            Command::Decompose { .. } => "decompose",
            Command::Endring { .. } => "endring",
            Command::Indec { .. } => "indec",
            Command::Glue { .. } => "glue",
            Command::Realize { .. } => "realize",
            Command::Transfer { .. } => "transfer",
            Command::Example { .. } => "example",
        }
    }
}

enum Failure {
    Input(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Math(e)
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::BadModulus(_) => "BadModulus",
        Error::FieldMismatch(..) => "FieldMismatch",
        Error::Shape(_) => "Shape",
        Error::NoSolution => "NoSolution",
        Error::CycleDetected(_) => "CycleDetected",
        Error::DuplicateName(_) => "DuplicateName",
        Error::UnknownElement(_) => "UnknownElement",
        Error::DimensionTooHigh => "DimensionTooHigh",
        Error::NotClosed(_) => "NotClosed",
        Error::BadCoordinate(_) => "BadCoordinate",
        Error::BadPoint(_) => "BadPoint",
        Error::TransferUndefined(_) => "TransferUndefined",
        Error::NotFunctorial(_) => "NotFunctorial",
        Error::NotChainComplex { .. } => "NotChainComplex",
        Error::NotChainMap { .. } => "NotChainMap",
        Error::KernelNotProjective => "KernelNotProjective",
        Error::HomologyNotResolvable(_) => "HomologyNotResolvable",
        Error::NotCofibrant(_) => "NotCofibrant",
        Error::ZeroObject => "ZeroObject",
        Error::NotIdempotent => "NotIdempotent",
        Error::BadCover(_) => "BadCover",
        Error::UnknownExample(_) => "UnknownExample",
        Error::NoTermination(_) => "NoTermination",
        Error::BudgetExceeded { .. } => "BudgetExceeded",
        Error::Invalid(_) => "Invalid",
    }
}

/// Malformed or inconsistent input, as opposed to a mathematical obstruction.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::BadModulus(_)
            | Error::FieldMismatch(..)
            | Error::Shape(_)
            | Error::CycleDetected(_)
            | Error::DuplicateName(_)
            | Error::UnknownElement(_)
            | Error::NotClosed(_)
            | Error::BadCoordinate(_)
            | Error::BadPoint(_)
            | Error::NotFunctorial(_)
            | Error::NotChainComplex { .. }
            | Error::NotChainMap { .. }
            | Error::BadCover(_)
            | Error::UnknownExample(_)
            | Error::Invalid(_)
    )
}

fn read_document(file: Option<&PathBuf>) -> Result<Document, Failure> {
    let mut text = String::new();
    match file {
        Some(path) if path.as_os_str() != "-" => {
            text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        }
        _ => {
            std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        }
    }
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("parse error: {e}")))
}

/// Session modulus: the document's field, which an explicit `--field` must agree with.
fn session_field(flag: Option<u64>, doc: Option<&Document>) -> Result<u32, Failure> {
    let flag = flag.map(check_modulus).transpose()?;
    match (flag, doc) {
        (Some(f), Some(d)) if f != d.field => Err(Error::FieldMismatch(f, d.field).into()),
        (_, Some(d)) => Ok(check_modulus(u64::from(d.field))?),
        (Some(f), None) => Ok(f),
        (None, None) => Ok(2),
    }
}

fn run(cli: &Cli) -> Result<(Output, u32), Failure> {
    let with_doc = |file: Option<&PathBuf>| -> Result<(Document, doc::Loaded), Failure> {
        let d = read_document(file)?;
        let p = session_field(cli.field, Some(&d))?;
        let l = doc::load(&d, p)?;
        Ok((d, l))
    };
    let target = |input: &Input| -> Result<(commands::Target, u32), Failure> {
        let (_, l) = with_doc(input.file.as_ref())?;
        Ok((commands::select(&l, input.name.as_deref())?, l.p))
    };
    let out = match &cli.command {
        Command::Validate { input } => {
            let (_, l) = with_doc(input.file.as_ref())?;
            (commands::validate(&l)?, l.p)
        }
        Command::Info { input } => {
            let (t, p) = target(input)?;
            (commands::info(&t)?, p)
        }
        Command::Cover { input } => {
            let (t, p) = target(input)?;
            (commands::cover(&t)?, p)
        }
        Command::Resolve { input, max_len } => {
            let (t, p) = target(input)?;
            (commands::resolve(&t, *max_len)?, p)
        }
        Command::Replace { input } => {
            let (t, p) = target(input)?;
            (commands::replace(&t, p)?, p)
        }
        Command::Decompose { input } => {
            let (t, p) = target(input)?;
            (commands::decompose(&t)?, p)
        }
        Command::Endring { input } => {
            let (t, p) = target(input)?;
            (commands::endring(&t)?, p)
        }
        Command::Indec { input, strategy, budget, seed } => {
            let (t, p) = target(input)?;
            let s = match strategy {
                StrategyArg::Exhaustive => Strategy::Exhaustive { budget: budget.unwrap_or(DEFAULT_BUDGET) },
                StrategyArg::Fitting => Strategy::Fitting { budget: budget.unwrap_or(64) as usize, seed: *seed },
            };
            (commands::indec(&t, s)?, p)
        }
        Command::Glue { input, a, b } => {
            let (d, l) = with_doc(input.file.as_ref())?;
            let t = commands::select(&l, input.name.as_deref())?;
            let (a, b) = if a.is_empty() && b.is_empty() {
                let g = d.gluing.ok_or_else(|| Failure::Input("pass --A and --B or include a gluing block".into()))?;
                (g.a, g.b)
            } else {
                (a.clone(), b.clone())
            };
            (commands::glue(&t, &a, &b)?, l.p)
        }
        Command::Realize { file, poset, v, d } => {
            let (doc, l) = with_doc(file.as_ref())?;
            let q = commands::default_poset(&l, poset.as_deref())?;
            (commands::realize(&l, &q, d.as_deref(), v, &doc)?, l.p)
        }
        Command::Transfer { file, poset, point, v, d } => {
            let (doc, l) = with_doc(file.as_ref())?;
            let q = match poset {
                Some(q) => q.clone(),
                None => {
                    let realized: Vec<&String> =
                        doc.posets.iter().filter(|(_, pd)| pd.realization.is_some()).map(|(n, _)| n).collect();
                    match realized.as_slice() {
                        [only] => (*only).clone(),
                        _ => commands::default_poset(&l, None)?,
                    }
                }
            };
            (commands::transfer(&l, &q, d.as_deref(), v.as_deref(), point, &doc)?, l.p)
        }
        Command::Example { name } => {
            let p = session_field(cli.field, None)?;
            (commands::example(name, p)?, p)
        }
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = cli.command.label();
    match run(&cli) {
        Ok((out, p)) => {
            if cli.machine {
                let mut v = match &out.doc {
                    Some(d) => serde_json::to_value(d).expect("document serializes"),
                    None => json!({"field": p}),
                };
                v["command"] = Value::from(command);
                v["report"] = out.report;
                println!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
            } else if let Some(d) = &out.doc {
                println!("{}", serde_json::to_string_pretty(d).expect("document serializes"));
                if !out.text.is_empty() {
                    eprintln!("{}", out.text);
                }
            } else {
                println!("{}", out.text);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            let (kind, msg, code) = match &f {
                Failure::Input(m) => ("ParseError", m.clone(), 2),
                Failure::Math(e) => (error_kind(e), e.to_string(), if is_input_error(e) { 2 } else { 1 }),
            };
            if cli.machine {
                let v = json!({"command": command, "error": {"kind": kind, "message": msg}});
                println!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
            }
            eprintln!("error[{kind}]: {msg}");
            ExitCode::from(code)
        }
    }
}
