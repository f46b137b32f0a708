//! The `toposforge` command line: argument parsing, loading and reporting.
//! Exit codes: 0 success, 1 verification failure, 2 parse or sort error,
//! 3 unresolved reference or bad configuration.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use toposforge_core::finring::FinRing;
use toposforge_core::forcing::{EnvError, Environment, Evaluator, ForceError};
use toposforge_core::formula::{box_translate, negneg_translate, parse, Formula};
use toposforge_core::frame::{Elem, FiniteSpace, Nucleus};
use toposforge_core::sheaf::{sheafify, transport_to_parent};
use toposforge_core::spectrum::{ideal_label, spec_space, SpecEnvironment, SpectrumError};

use crate::corpus;
use crate::io::{self, FormatError};
use crate::suites::{self, Suite, SuiteConfig, SuiteError};

#[derive(Debug, Parser)]
#[command(name = "toposforge", version, about = "Forcing over finite spaces and finite-ring spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a formula is forced on an open, and print its truth value.
    Eval(EvalArgs),
    /// Print the truth value of a formula.
    Truth(EvalArgs),
    /// Print the modal translation of a formula.
    Translate(TranslateArgs),
    /// Sheafify a sheaf file for a nucleus and print the result.
    Sheafify(SheafifyArgs),
    /// Print the spectrum of a ring: frame, points and structure sheaf.
    Spec(SpecArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
}

/// Where formulas are evaluated: a space (with optional sheaves) or the
/// spectrum of a ring (with optional modules).
#[derive(Debug, Args)]
pub struct Context {
    /// A space file or a built-in space (`sierpinski`, `discreteN`, `chainN`).
    #[arg(long, conflicts_with = "ring")]
    pub space: Option<String>,
    /// A ring file, a built-in ring (`zmodN`, `f4`) or a ring expression.
    #[arg(long)]
    pub ring: Option<String>,
    /// Sheaf files over the space.
    #[arg(long, requires = "space")]
    pub sheaf: Vec<String>,
    /// Module files over the ring.
    #[arg(long, requires = "ring")]
    pub module: Vec<String>,
    /// Default bound for unbounded `bigvee[n=..]` schemas over a space.
    #[arg(long)]
    pub schema_bound: Option<u32>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub context: Context,
    #[arg(long)]
    pub formula: String,
    /// The open to evaluate on (default: the whole space).
    #[arg(long)]
    pub open: Option<String>,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    /// Nucleus name; `negneg` expands to double negation.
    #[arg(long)]
    pub nucleus: String,
    /// Drop the boxes that the translation does not need.
    #[arg(long)]
    pub elide_gray: bool,
    pub formula: String,
}

#[derive(Debug, Args)]
pub struct SheafifyArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub sheaf: String,
    /// `id`, `negneg`, `open_U`, `closed_U` (closed complement of `U`) or `point_x`.
    #[arg(long)]
    pub nucleus: String,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub ring: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Run over this space only instead of the random corpus.
    #[arg(long)]
    pub space: Option<String>,
    /// Run over this ring only instead of the ring corpus.
    #[arg(long)]
    pub ring: Option<String>,
    /// Corpus seed; falls back to `TOPOSFORGE_SEED`, then a fixed default.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_points: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Number of corpus spaces.
    #[arg(long)]
    pub spaces: Option<usize>,
    /// Random draws per space (triples for `box-theorem`).
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Resolve(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Resolve(_) => 3,
        }
    }
}

impl From<ForceError> for CliError {
    fn from(e: ForceError) -> Self {
        if e.is_resolution() {
            CliError::Resolve(e.to_string())
        } else {
            CliError::Parse(e.to_string())
        }
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::Force(f) => f.into(),
            other => CliError::Resolve(other.to_string()),
        }
    }
}

impl From<EnvError> for CliError {
    fn from(e: EnvError) -> Self {
        CliError::Resolve(e.to_string())
    }
}

impl From<SuiteError> for CliError {
    fn from(e: SuiteError) -> Self {
        match e {
            SuiteError::Force(f) => f.into(),
            SuiteError::Spectrum(s) => s.into(),
            SuiteError::Config(c) => CliError::Resolve(c),
        }
    }
}

/// What a command printed, and whether a verification failed.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub failed: bool,
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Eval(a) => eval(&a, true),
        Command::Truth(a) => eval(&a, false),
        Command::Translate(a) => translate(&a),
        Command::Sheafify(a) => sheafify_cmd(&a),
        Command::Spec(a) => spec(&a),
        Command::Verify(a) => verify(&a),
    }
}

fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Resolve(format!("{path}: {e}")))
}

fn format_error(path: &str, e: FormatError) -> CliError {
    CliError::Parse(format!("{path}:{e}"))
}

/// A space from a file, else a built-in name.
pub fn load_space(name: &str) -> Result<FiniteSpace, CliError> {
    if Path::new(name).is_file() {
        return io::parse_space(&read_file(name)?).map_err(|e| format_error(name, e));
    }
    io::builtin_space(name).ok_or_else(|| CliError::Resolve(format!("unknown space `{name}`")))
}

/// A ring from a file, a built-in name or a ring expression, with the name
/// reports use for it.
pub fn load_ring(name: &str) -> Result<(String, FinRing), CliError> {
    if Path::new(name).is_file() {
        let ring = io::parse_ring(&read_file(name)?).map_err(|e| format_error(name, e))?;
        return Ok((name.to_string(), ring));
    }
    if let Some(ring) = io::builtin_ring(name) {
        let display = match name.strip_prefix("zmod") {
            Some(n) => format!("zmod {n}"),
            None => "polyquot (zmod 2) x^2+x+1".to_string(),
        };
        return Ok((display, ring));
    }
    io::parse_ring(name).map(|r| (name.to_string(), r)).map_err(|_| CliError::Resolve(format!("unknown ring `{name}`")))
}

fn parse_formula(text: &str) -> Result<Formula, CliError> {
    parse(text).map_err(|e| CliError::Parse(format!("formula: {e}")))
}

/// Nuclei on a space by name: `id`, `negneg`, `open_U`, `closed_U` and
/// `point_x`, where `U` is any open as accepted by `resolve_open`.
pub fn space_nucleus(space: &FiniteSpace, name: &str) -> Result<Nucleus, CliError> {
    let open = |u: &str| space.resolve_open(u).map_err(|e| CliError::Resolve(e.to_string()));
    if let Some(u) = name.strip_prefix("open_") {
        return Ok(space.nucleus_open(open(u)?));
    }
    if let Some(u) = name.strip_prefix("closed_") {
        return Ok(space.nucleus_closed(open(u)?));
    }
    if let Some(x) = name.strip_prefix("point_") {
        let k = space.points().iter().position(|p| p == x).ok_or_else(|| CliError::Resolve(format!("unknown point `{x}`")))?;
        return Ok(space.nucleus_point(k));
    }
    match name {
        "id" => Ok(Nucleus::identity(space.frame())),
        "negneg" => Ok(space.nucleus_negneg()),
        _ => Err(CliError::Resolve(format!("unknown nucleus `{name}`"))),
    }
}

/// The space environment: named opens as propositions, `open_U` and
/// `closed_U` nuclei for each named open, and the given sheaves.
fn space_environment(space: &FiniteSpace, ctx: &Context) -> Result<Environment, CliError> {
    let mut env = Environment::new(Arc::new(space.frame().clone()));
    for (name, &u) in space.named_opens() {
        env.add_prop(name, u)?;
        env.add_nucleus(&format!("open_{name}"), space.nucleus_open(u))?;
        env.add_nucleus(&format!("closed_{name}"), space.nucleus_closed(u))?;
    }
    for path in &ctx.sheaf {
        io::parse_sheaf(&read_file(path)?, space).map_err(|e| format_error(path, e))?.register(&mut env)?;
    }
    if let Some(b) = ctx.schema_bound {
        env.set_schema_bound(b);
    }
    Ok(env)
}

fn eval(args: &EvalArgs, with_verdict: bool) -> Result<Outcome, CliError> {
    let phi = parse_formula(&args.formula)?;
    let ctx = &args.context;
    let (forced, u, truth, describe): (bool, Elem, Elem, Box<dyn Fn(Elem) -> String>) = match (&ctx.space, &ctx.ring) {
        (Some(s), _) => {
            let space = load_space(s)?;
            let env = space_environment(&space, ctx)?;
            let top = space.frame().top();
            let u = match &args.open {
                Some(o) => space.resolve_open(o).map_err(|e| CliError::Resolve(e.to_string()))?,
                None => top,
            };
            let mut ev = Evaluator::new(&env);
            let forced = ev.force(&phi, u)?;
            let truth = ev.truth_value(&phi)?;
            (forced, u, truth, Box::new(move |e| if e == top { "X".to_string() } else { space.describe(e) }))
        }
        (None, Some(r)) => {
            let (_, ring) = load_ring(r)?;
            let mut sp = SpecEnvironment::new(&ring)?;
            for path in &ctx.module {
                let m = io::parse_module(&read_file(path)?).map_err(|e| format_error(path, e))?;
                sp.add_module(&m.name, &m.module)?;
            }
            let frame = sp.spec.frame().clone();
            let top = frame.top();
            let u = match args.open.as_deref() {
                None | Some("X") => top,
                Some(o) => frame
                    .elements()
                    .find(|&e| frame.label(e) == o)
                    .ok_or_else(|| CliError::Resolve(format!("unknown open `{o}`")))?,
            };
            let mut ev = Evaluator::new(sp.environment());
            let forced = ev.force(&phi, u)?;
            let truth = ev.truth_value(&phi)?;
            (forced, u, truth, Box::new(move |e| if e == top { "X".to_string() } else { frame.label(e).to_string() }))
        }
        (None, None) => return Err(CliError::Resolve("either --space or --ring is required".to_string())),
    };
    let output = if with_verdict {
        let verdict = if forced { "FORCED" } else { "NOT-FORCED" };
        format!("{verdict} on {}; truth-value = {}\n", describe(u), describe(truth))
    } else {
        format!("truth-value = {}\n", describe(truth))
    };
    Ok(Outcome { output, failed: false })
}

fn translate(args: &TranslateArgs) -> Result<Outcome, CliError> {
    let phi = parse_formula(&args.formula)?;
    let r = if args.nucleus == "negneg" {
        negneg_translate(&phi, args.elide_gray)
    } else {
        box_translate(&phi, &args.nucleus, args.elide_gray)
    };
    Ok(Outcome { output: format!("{}\n", r.formula), failed: false })
}

fn sheafify_cmd(args: &SheafifyArgs) -> Result<Outcome, CliError> {
    let space = load_space(&args.space)?;
    let file = io::parse_sheaf(&read_file(&args.sheaf)?, &space).map_err(|e| format_error(&args.sheaf, e))?;
    let j = space_nucleus(&space, &args.nucleus)?;
    let err = |e: toposforge_core::sheaf::SheafError| CliError::Resolve(e.to_string());
    let (g, sub) = sheafify(&file.sheaf, &j).map_err(err)?;
    let parent = Arc::new(space.frame().clone());
    let back = transport_to_parent(&g, &sub, &j, parent).map_err(err)?;
    let name = format!("{}_{}", file.name, args.nucleus);
    Ok(Outcome { output: io::write_sheaf(&name, &args.space, &back, |u| space.describe(u)), failed: false })
}

fn spec(args: &SpecArgs) -> Result<Outcome, CliError> {
    let (name, ring) = load_ring(&args.ring)?;
    let sp = SpecEnvironment::new(&ring)?;
    let frame = sp.spec.frame();
    let space = spec_space(&sp.spec)?;
    let o = &sp.structure.sheaf;
    let mut out = String::new();
    let _ = writeln!(out, "ring {name}");
    let _ = writeln!(out, "frame: {} elements", frame.len());
    for e in frame.elements() {
        let sections: Vec<String> = o.sections(e).map(|s| o.section_label(e, s)).collect();
        let _ = writeln!(out, "  {}: {} sections: {}", frame.label(e), sections.len(), sections.join(" "));
    }
    let primes: Vec<String> = space.filters.iter().map(|&f| ideal_label(&ring, ring.full() & !f)).collect();
    let _ = writeln!(out, "points: {} {}", primes.len(), primes.join(" "));
    Ok(Outcome { output: out, failed: false })
}

fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let box_suite = args.suite == Suite::BoxTheorem;
    let mut cfg = SuiteConfig { seed: corpus::seed(args.seed), ..SuiteConfig::default() };
    if box_suite {
        cfg.max_points = 5;
        cfg.samples = 100;
    }
    cfg.max_points = args.max_points.unwrap_or(cfg.max_points);
    cfg.max_depth = args.max_depth.unwrap_or(cfg.max_depth);
    cfg.space_count = args.spaces.unwrap_or(cfg.space_count);
    cfg.samples = args.samples.unwrap_or(cfg.samples);
    if let Some(s) = &args.space {
        cfg.spaces = Some(vec![load_space(s)?]);
    }
    if let Some(r) = &args.ring {
        cfg.rings = Some(vec![load_ring(r)?]);
    }
    let report = suites::run(args.suite, &cfg)?;
    let mut output = report.to_string();
    let total = report.lines.iter().filter(|l| !l.probe).count();
    let failed = report.failures().count();
    let probes = report.lines.len() - total;
    let _ = writeln!(output, "{}: {} checks, {failed} failed, {probes} probes, seed {}", suite_name(args.suite), total, cfg.seed);
    Ok(Outcome { output, failed: !report.passed() })
}

pub fn suite_name(s: Suite) -> String {
    use clap::ValueEnum;
    s.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}
