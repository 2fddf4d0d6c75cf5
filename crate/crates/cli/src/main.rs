//! `ellbundle`: existence, spectral covers and recipes for rank-2 bundles on
//! non-Kähler elliptic surfaces.
//!
//! Exit codes: `exists` returns 0/1/2 for exists/not exists/unknown, 64 flags
//! malformed input and other failures return 3.

mod checks;
mod query;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use query::{Options, Outcome, Query, EXIT_ERROR, EXIT_SCHEMA};

#[derive(Parser, Debug)]
#[command(name = "ellbundle", version, about = "Rank-2 bundles on non-Kähler elliptic surfaces")]
struct Cli {
    /// Comparison tolerance for Tate-curve numerics.
    #[arg(long, global = true, default_value_t = query::DEFAULT_TOL)]
    tol: f64,
    /// Seed for fibre sampling.
    #[arg(long, global = true, default_value_t = query::DEFAULT_SEED)]
    seed: u64,
    /// Number of fibres sampled when verifying a spectral cover.
    #[arg(long, global = true, default_value_t = query::DEFAULT_VERIFY)]
    verify: usize,
    /// Cube radius for the brute-force m(2, c1) cross-check (default: from the Gram matrix).
    #[arg(long, global = true)]
    enum_radius: Option<i64>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// JSON array of queries, processed in parallel; results keep the input order.
    #[arg(long)]
    batch: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug)]
struct ChernArgs {
    /// Surface description (path or inline JSON).
    surface: String,
    /// First Chern class: `{"torsion": [..], "hom": [..]}`, `[h1, h2]` or `h1,h2`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    c1: String,
    #[arg(long, allow_negative_numbers = true)]
    c2: i64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a bundle with the given Chern classes exists.
    Exists {
        #[command(flatten)]
        chern: ChernArgs,
        /// Certified subbundle degree d of V_delta.
        #[arg(long, allow_negative_numbers = true)]
        d: Option<i64>,
        /// Irreducible base bisection for non-filtrable constructions.
        #[arg(long)]
        base: Option<String>,
    },
    /// Spectral cover of a presented bundle, with a fibrewise verification report.
    SpectralCover { surface: String, bundle: String },
    /// Construction recipe with its Chern-data transcript.
    Recipe {
        #[command(flatten)]
        chern: ChernArgs,
        #[arg(long, allow_negative_numbers = true)]
        d: Option<i64>,
        #[arg(long)]
        base: Option<String>,
    },
    /// Run the invariant suite on a surface.
    Check { surface: String },
    /// Intersection number of two sections of J(X).
    Intersect { surface: String, a: String, b: String },
    /// Genus and branching of a smooth spectral curve with these invariants.
    Genus {
        #[command(flatten)]
        chern: ChernArgs,
    },
}

fn text(s: String) -> Value {
    Value::String(s)
}

fn to_query(cmd: Command) -> Query {
    let chern_query = |name: &str, c: ChernArgs| Query {
        command: name.into(),
        surface: text(c.surface),
        c1: Some(text(c.c1)),
        c2: Some(c.c2),
        ..Query::default()
    };
    match cmd {
        Command::Exists { chern, d, base } => Query {
            d,
            base: base.map(text),
            ..chern_query("exists", chern)
        },
        Command::Recipe { chern, d, base } => Query {
            d,
            base: base.map(text),
            ..chern_query("recipe", chern)
        },
        Command::Genus { chern } => chern_query("genus", chern),
        Command::SpectralCover { surface, bundle } => Query {
            command: "spectral-cover".into(),
            surface: text(surface),
            bundle: Some(text(bundle)),
            ..Query::default()
        },
        Command::Check { surface } => Query {
            command: "check".into(),
            surface: text(surface),
            ..Query::default()
        },
        Command::Intersect { surface, a, b } => Query {
            command: "intersect".into(),
            surface: text(surface),
            a: Some(text(a)),
            b: Some(text(b)),
            ..Query::default()
        },
    }
}

fn run_batch(path: &PathBuf, opts: &Options) -> Outcome {
    let queries: Vec<Value> = match fs::read_to_string(path)
        .map_err(|e| e.to_string())
        .and_then(|s| serde_json::from_str(&s).map_err(|e| e.to_string()))
    {
        Ok(q) => q,
        Err(e) => return Outcome::error(EXIT_SCHEMA, "parse", format!("{}: {e}", path.display())),
    };
    let results: Vec<Outcome> = queries
        .par_iter()
        .map(|v| match serde_json::from_value::<Query>(v.clone()) {
            Ok(q) => query::run(&q, opts),
            Err(e) => Outcome::error(EXIT_SCHEMA, "parse", e.to_string()),
        })
        .collect();
    let code = results.iter().map(|r| r.code).max().unwrap_or(0);
    let body = results
        .into_iter()
        .enumerate()
        .map(|(i, r)| json!({"index": i, "exit_code": r.code, "result": r.body}))
        .collect();
    Outcome {
        code,
        body: Value::Array(body),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let opts = Options {
        tol: cli.tol,
        seed: cli.seed,
        verify: cli.verify,
        enum_radius: cli.enum_radius,
    };
    let outcome = match (cli.batch, cli.command) {
        (Some(path), None) => run_batch(&path, &opts),
        (Some(_), Some(_)) => Outcome::error(EXIT_SCHEMA, "usage", "--batch cannot be combined with a command"),
        (None, Some(cmd)) => query::run(&to_query(cmd), &opts),
        (None, None) => Outcome::error(EXIT_SCHEMA, "usage", "no command given (see --help)"),
    };
    let mut rendered = serde_json::to_string_pretty(&outcome.body).expect("serialisable");
    rendered.push('\n');
    let written = match &cli.output {
        Some(path) => fs::write(path, &rendered).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{rendered}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("ellbundle: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    ExitCode::from(outcome.code as u8)
}
