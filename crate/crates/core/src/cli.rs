//! Command line front end. [`run`] does all the work and returns what the
//! binary prints, which keeps the whole interface testable in process.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ff::Field;
use crate::oracle::{orbit_partition, validate_classification};
use crate::pseries::parse_series;
use crate::reduce::ReduceOptions;
use crate::report::{
    determinacy_report, invariants_report, lambda_bound_survey, match_report, milnor_report,
    modality_report, normal_form_report, parse_with_default_trunc, resolve_field,
};

#[derive(Debug, Parser)]
#[command(
    name = "charp",
    version,
    about = "Right classification of power series over fields of characteristic p"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Characteristic of the coefficient field.
    #[arg(long, global = true)]
    pub p: Option<u32>,
    /// Degree of the coefficient field over F_p.
    #[arg(long, global = true)]
    pub deg: Option<usize>,
    /// Defining polynomial in the generator g, e.g. "g^2+g+1".
    #[arg(long, global = true)]
    pub modulus: Option<String>,
    /// Precision of the input; defaults to max(largest exponent, dbar + 1).
    #[arg(long, global = true)]
    pub trunc: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized suites; classification never depends on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Work limit for exhaustive enumerations.
    #[arg(long, global = true, env = "CHARP_BUDGET", default_value_t = crate::oracle::DEFAULT_BUDGET)]
    pub budget: u128,
    /// Largest extension degree over F_p the reduction may use.
    #[arg(long, global = true, default_value_t = crate::ff::DEFAULT_MAX_DEGREE)]
    pub max_field_degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Support invariants m, e, q, k, dbar, d, the case and the Lambda sets.
    Invariants { series: String },
    /// Normal form with the coordinate change that produces it.
    NormalForm { series: String },
    /// Milnor number ord(f').
    Milnor { series: String },
    /// Right modality floor(mu/p), unfolding basis and stratum dimension.
    Modality { series: String },
    /// Determinacy bound d(f).
    Determinacy { series: String },
    /// Coordinate change carrying f to g when their d(f)-jets agree.
    MatchJets { f: String, g: String },
    /// Checks #Lambda <= floor(q/p) over supports in [1, nmax].
    VerifyLambdaBound {
        #[arg(long, default_value_t = 18)]
        nmax: u64,
        /// Check this many random supports (drawn with --seed) instead of
        /// all of them.
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Orbits of jets of order --jet under truncated coordinate changes.
    Orbits {
        #[arg(long)]
        jet: usize,
        /// Cross-check the normal form engine against the orbits.
        #[arg(long)]
        validate: bool,
        /// Restrict validation to jets of this order.
        #[arg(long)]
        m: Option<u64>,
    },
}

/// What the binary writes and returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli) {
        Ok((value, ok)) => Output {
            code: if ok { 0 } else { 1 },
            stdout: render(&value, cli.global.format, &cli.command),
            stderr: String::new(),
        },
        Err(e) => Output {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("charp: error: {e}\n"),
        },
    }
}

fn to_value<T: Serialize>(report: &T) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}

fn field(g: &GlobalArgs) -> Result<Field> {
    let p = g.p.ok_or_else(|| Error::Parse {
        pos: 0,
        msg: "--p is required".into(),
    })?;
    resolve_field(p, g.deg, g.modulus.as_deref())
}

/// The report and whether the outcome counts as success.
fn execute(cli: &Cli) -> Result<(Value, bool)> {
    let g = &cli.global;
    let opts = ReduceOptions {
        max_field_degree: g.max_field_degree,
    };
    let series = |text: &str| -> Result<_> { parse_with_default_trunc(text, &field(g)?, g.trunc) };
    Ok(match &cli.command {
        Command::Invariants { series: s } => (to_value(&invariants_report(&series(s)?)?), true),
        Command::NormalForm { series: s } => {
            (to_value(&normal_form_report(&series(s)?, &opts)?), true)
        }
        Command::Milnor { series: s } => (to_value(&milnor_report(&series(s)?)?), true),
        Command::Modality { series: s } => (to_value(&modality_report(&series(s)?)?), true),
        Command::Determinacy { series: s } => (to_value(&determinacy_report(&series(s)?)?), true),
        Command::MatchJets { f, g: gs } => {
            let ctx = field(g)?;
            let (f, gg) = match g.trunc {
                Some(t) => (
                    parse_series(f, &ctx, Some(t))?,
                    parse_series(gs, &ctx, Some(t))?,
                ),
                None => {
                    let f = parse_with_default_trunc(f, &ctx, None)?;
                    let gg = parse_with_default_trunc(gs, &ctx, None)?;
                    let t = f.trunc().max(gg.trunc());
                    (f.with_trunc(t), gg.with_trunc(t))
                }
            };
            let r = match_report(&f, &gg, &opts)?;
            let ok = r.matched;
            (to_value(&r), ok)
        }
        Command::VerifyLambdaBound { nmax, samples } => {
            let p = g.p.ok_or_else(|| Error::Parse {
                pos: 0,
                msg: "--p is required".into(),
            })?;
            let r = lambda_bound_survey(p, *nmax, *samples, g.seed, g.budget)?;
            let ok = r.violations == 0;
            (to_value(&r), ok)
        }
        Command::Orbits { jet, validate, m } => {
            let ctx = field(g)?;
            if *validate {
                let r = validate_classification(&ctx, *jet, *m, g.budget, &opts)?;
                let ok = r.passed();
                (to_value(&r), ok)
            } else {
                (
                    to_value(&orbit_partition(&ctx, *jet, g.budget)?.summary()),
                    true,
                )
            }
        }
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn render(value: &Value, format: Format, command: &Command) -> String {
    match format {
        Format::Json => format!("{value}\n"),
        Format::Text => {
            let mut out = String::new();
            if let Value::Object(map) = value {
                for (k, v) in map {
                    out.push_str(&format!("{k}: {}\n", scalar(v)));
                }
            }
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let rows: Vec<&Value> = match (command, value.get("classes")) {
                (
                    Command::Orbits {
                        validate: false, ..
                    },
                    Some(Value::Array(classes)),
                ) => classes.iter().collect(),
                _ => vec![value],
            };
            for (i, row) in rows.iter().enumerate() {
                let flat = flatten(row);
                if i == 0 {
                    w.write_record(flat.iter().map(|(k, _)| k))
                        .expect("in-memory write");
                }
                w.write_record(flat.iter().map(|(_, v)| v))
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
        }
    }
}

/// One level of nested objects is spread into `outer.inner` columns.
fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    if let Value::Object(map) = v {
        for (k, v) in map {
            match v {
                Value::Object(inner) => {
                    for (ik, iv) in inner {
                        out.push((format!("{k}.{ik}"), scalar(iv)));
                    }
                }
                _ => out.push((k.clone(), scalar(v))),
            }
        }
    }
    out
}
