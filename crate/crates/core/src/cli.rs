//! The `halin` command line tool.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::generators::{GenError, GenSpec};
use crate::graph::HalinGraph;
use crate::halin_ola::{
    certify, certify_with_oracle, direct_rbt_halin_ola, halin_lower_bound,
    rearrange_to_halin_ola, tree_optimum, HalinOlaError,
};
use crate::io::{self, IoError, Metadata, Strictness};
use crate::layout::{halin_la_cost, Layout};
use crate::property_suite::{parse_corpus, run_suite};
use crate::tree_ola::{self, brute_force_cost, brute_force_ola, DEFAULT_ORACLE_LIMIT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "halin", version, about = "Optimal linear arrangements of Halin graphs")]
struct Cli {
    /// Report diagnostics on stderr as JSON objects.
    #[arg(long, global = true)]
    json: bool,
    /// Drop unknown fields in instance files with a warning instead of failing.
    #[arg(long, global = true)]
    lax: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Compute a layout.
    Solve(SolveArgs),
    /// Print the total, tree and cycle cost of a layout.
    Cost(CostArgs),
    /// Print the lower bound 2(n-1) plus the tree optimum.
    Bound(BoundArgs),
    /// Certify a layout against the lower bound or the oracle.
    Verify(VerifyArgs),
    /// Check the structural properties of optima over a corpus.
    Proptest(ProptestArgs),
    /// Write a Graphviz rendering.
    ExportDot(DotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Wheel,
    Kary,
    Caterpillar,
    Random,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long)]
    spokes: Option<usize>,
    #[arg(long)]
    spine: Option<usize>,
    /// Leaf counts per spine vertex, comma separated.
    #[arg(long, value_delimiter = ',')]
    leaves: Option<Vec<usize>>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    name: Option<String>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Oracle,
    Rbt,
    Rearrange,
    Direct,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[arg(short, long)]
    input: PathBuf,
    /// Optimal tree layout to start the rearrangement from.
    #[arg(short = 't', long)]
    tree_layout: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
    /// Write the swap trace of the rearrangement here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    oracle_limit: usize,
}

#[derive(Debug, Args)]
struct CostArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    layout: PathBuf,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, conflicts_with = "oracle")]
    tree_opt: Option<u64>,
    /// Compute the tree optimum by exhaustive search.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    oracle_limit: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    layout: PathBuf,
    /// Also compare against the exhaustive optimum.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    tree_opt: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    oracle_limit: usize,
}

#[derive(Debug, Args)]
struct ProptestArgs {
    /// `standard`, or `;`-separated items like `wheel:3-8;kary:3,2,2;caterpillar:9;random:50:9`.
    #[arg(long, default_value = "standard")]
    corpus: String,
    #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
    oracle_limit: usize,
    /// Write the full report, counterexamples included, as JSON.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DotArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    layout: Option<PathBuf>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug)]
struct CliError {
    code: i32,
    kind: &'static str,
    message: String,
}

impl CliError {
    fn usage(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            kind,
            message: message.into(),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        let kind = match e {
            IoError::ParseError { .. } => "parseError",
            IoError::SchemaVersionUnsupported { .. } => "schemaVersionUnsupported",
            IoError::InvalidSubstrate(_) => "invalidSubstrate",
            IoError::Graph(_) => "invalidTree",
            IoError::Layout(_) | IoError::LayoutSizeMismatch { .. } => "invalidLayout",
        };
        CliError {
            code: EXIT_IO,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<HalinOlaError> for CliError {
    fn from(e: HalinOlaError) -> Self {
        let kind = match e {
            HalinOlaError::NotRbt(_) => "notRbt",
            HalinOlaError::NotTreeOptimalInput { .. } => "notTreeOptimal",
            HalinOlaError::NotBlockStructured(_) => "notBlockStructured",
            HalinOlaError::SizeMismatch { .. } => "sizeMismatch",
            HalinOlaError::TreeOptimumUnavailable(_) => "treeOptimumUnavailable",
        };
        CliError::usage(kind, e.to_string())
    }
}

impl From<tree_ola::OracleError> for CliError {
    fn from(e: tree_ola::OracleError) -> Self {
        CliError::usage("oracleTooLarge", e.to_string())
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::usage("badParam", e.to_string())
    }
}

struct Ctx<'a> {
    json: bool,
    lax: bool,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn warn(&mut self, msg: &str) {
        if self.json {
            let _ = writeln!(self.err, "{}", json!({ "warning": msg }));
        } else {
            let _ = writeln!(self.err, "warning: {msg}");
        }
    }

    fn read(&self, path: &Path) -> Result<Vec<u8>, CliError> {
        std::fs::read(path).map_err(|e| CliError {
            code: EXIT_IO,
            kind: "io",
            message: format!("{}: {e}", path.display()),
        })
    }

    fn write(&self, path: &Path, text: &str) -> Result<(), CliError> {
        std::fs::write(path, text).map_err(|e| CliError {
            code: EXIT_IO,
            kind: "io",
            message: format!("{}: {e}", path.display()),
        })
    }

    fn instance(&mut self, path: &Path) -> Result<io::Instance, CliError> {
        let bytes = self.read(path)?;
        let mode = if self.lax { Strictness::Lax } else { Strictness::Strict };
        let parsed = io::parse_instance_with(&bytes, mode)?;
        for w in &parsed.warnings {
            self.warn(w);
        }
        Ok(parsed.value)
    }

    fn layout(&self, path: &Path, h: &HalinGraph) -> Result<Layout, CliError> {
        Ok(io::parse_layout_for(&self.read(path)?, h)?)
    }

    fn print(&mut self, text: &str) -> Result<(), CliError> {
        writeln!(self.out, "{text}").map_err(|e| CliError {
            code: EXIT_IO,
            kind: "io",
            message: e.to_string(),
        })
    }
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let json = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            if json {
                let msg = e.to_string();
                let _ = writeln!(
                    err,
                    "{}",
                    json!({ "error": "usage", "message": msg.trim(), "exitCode": EXIT_USAGE })
                );
            } else {
                let _ = write!(err, "{e}");
            }
            return EXIT_USAGE;
        }
    };
    let mut ctx = Ctx {
        json: cli.json,
        lax: cli.lax,
        out,
        err,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(e) => {
            if ctx.json {
                let _ = writeln!(
                    ctx.err,
                    "{}",
                    json!({ "error": e.kind, "message": e.message, "exitCode": e.code })
                );
            } else {
                let _ = writeln!(ctx.err, "error: {}", e.message);
            }
            e.code
        }
    }
}

fn dispatch(cmd: Command, ctx: &mut Ctx) -> Result<i32, CliError> {
    match cmd {
        Command::Gen(a) => gen(a, ctx),
        Command::Solve(a) => solve(a, ctx),
        Command::Cost(a) => cost(a, ctx),
        Command::Bound(a) => bound(a, ctx),
        Command::Verify(a) => verify(a, ctx),
        Command::Proptest(a) => proptest(a, ctx),
        Command::ExportDot(a) => export_dot(a, ctx),
    }
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::usage("usage", format!("--{flag} is required for --family {family}")))
}

fn gen(a: GenArgs, ctx: &mut Ctx) -> Result<i32, CliError> {
    let spec = match a.family {
        Family::Wheel => GenSpec::Wheel {
            spokes: need(a.spokes, "spokes", "wheel")?,
        },
        Family::Kary => GenSpec::Kary {
            k: need(a.k, "k", "kary")?,
            c: need(a.c, "c", "kary")?,
            h: need(a.h, "h", "kary")?,
        },
        Family::Caterpillar => {
            let leaves = need(a.leaves, "leaves", "caterpillar")?;
            GenSpec::Caterpillar {
                spine: a.spine.unwrap_or(leaves.len()),
                leaves,
            }
        }
        Family::Random => GenSpec::Random {
            n: need(a.n, "n", "random")?,
            seed: a.seed.unwrap_or(0),
        },
    };
    let h = spec.generate()?;
    let meta = Metadata {
        name: Some(a.name.unwrap_or_else(|| spec.label())),
        gen_spec: Some(spec),
    };
    ctx.write(&a.output, &io::serialize_instance(&h, Some(&meta)))?;
    ctx.print(&format!("wrote {} (n={}, m={})", a.output.display(), h.n(), h.m()))?;
    Ok(EXIT_OK)
}

fn solve(a: SolveArgs, ctx: &mut Ctx) -> Result<i32, CliError> {
    let h = ctx.instance(&a.input)?.graph;
    let layout = match a.method {
        Method::Oracle => {
            let r = brute_force_ola(&h.to_graph(), a.oracle_limit)?;
            r.optimal_layouts.into_iter().next().expect("oracle returns an optimum")
        }
        Method::Rbt => tree_ola::rbt_ola(h.tree())
            .map_err(|e| CliError::usage("notRbt", e.to_string()))?,
        Method::Rearrange => {
            let start = match &a.tree_layout {
                Some(p) => ctx.layout(p, &h)?,
                None => tree_ola::rbt_ola(h.tree())
                    .map_err(|e| CliError::usage("notRbt", e.to_string()))?,
            };
            let (l, trace) = rearrange_to_halin_ola(&h, &start)?;
            if let Some(p) = &a.trace {
                let text = serde_json::to_string_pretty(&trace).expect("trace serializes");
                ctx.write(p, &(text + "\n"))?;
            }
            l
        }
        Method::Direct => direct_rbt_halin_ola(&h)?,
    };
    if a.tree_layout.is_some() && a.method != Method::Rearrange {
        ctx.warn("--tree-layout is only used by --method rearrange");
    }
    ctx.write(&a.output, &io::serialize_layout(&layout))?;
    let r = halin_la_cost(&h, &layout);
    ctx.print(&format!(
        "cost {} (tree {}, cycle {})",
        r.total_cost, r.tree_cost, r.cycle_cost
    ))?;
    Ok(EXIT_OK)
}

fn cost(a: CostArgs, ctx: &mut Ctx) -> Result<i32, CliError> {
    let h = ctx.instance(&a.input)?.graph;
    let l = ctx.layout(&a.layout, &h)?;
    let r = halin_la_cost(&h, &l);
    ctx.print(&format!("total {}\ntree {}\ncycle {}", r.total_cost, r.tree_cost, r.cycle_cost))?;
    Ok(EXIT_OK)
}

fn bound(a: BoundArgs, ctx: &mut Ctx) -> Result<i32, CliError> {
    let h = ctx.instance(&a.input)?.graph;
    let t = match (a.tree_opt, a.oracle) {
        (Some(t), _) => t,
        (None, true) => brute_force_cost(&h.tree().to_graph(), a.oracle_limit)?,
        (None, false) => tree_optimum(h.tree(), a.oracle_limit)?.0,
    };
    ctx.print(&halin_lower_bound(&h, t).to_string())?;
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs, ctx: &mut Ctx) -> Result<i32, CliError> {
    let h = ctx.instance(&a.input)?.graph;
    let l = ctx.layout(&a.layout, &h)?;
    let t = match a.tree_opt {
        Some(t) => t,
        None => tree_optimum(h.tree(), a.oracle_limit)?.0,
    };
    let cert = if a.oracle {
        let best = brute_force_cost(&h.to_graph(), a.oracle_limit)?;
        certify_with_oracle(&h, &l, t, best)
    } else {
        certify(&h, &l, t)
    };
    ctx.print(&serde_json::to_string_pretty(&cert).expect("certificate serializes"))?;
    Ok(if cert.optimal { EXIT_OK } else { EXIT_VERIFY })
}

fn proptest(a: ProptestArgs, ctx: &mut Ctx) -> Result<i32, CliError> {
    let corpus = parse_corpus(&a.corpus).map_err(|m| CliError::usage("badCorpus", m))?;
    let report = run_suite(&corpus, a.oracle_limit);
    ctx.print(report.to_table().trim_end())?;
    if let Some(p) = &a.output {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        ctx.write(p, &(text + "\n"))?;
    }
    for c in report.counterexamples() {
        let text = serde_json::to_string(c).expect("counterexample serializes");
        ctx.warn(&format!("counterexample {text}"));
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY })
}

fn export_dot(a: DotArgs, ctx: &mut Ctx) -> Result<i32, CliError> {
    let h = ctx.instance(&a.input)?.graph;
    let l = match &a.layout {
        Some(p) => Some(ctx.layout(p, &h)?),
        None => None,
    };
    ctx.write(&a.output, &io::export_dot(&h, l.as_ref()))?;
    Ok(EXIT_OK)
}
