//! Command-line front end.
//!
//! Every subcommand produces a [`Report`]; `main` prints it and exits with
//! its code.

use std::fmt;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use boundq::algo::{self, AlgoOptions, AlgoOutcome, MinOutcome};
use boundq::check::{check_derivation, check_subtype_derivation};
use boundq::encode::{self, Evidence, LemmaId, LemmaInstance, LemmaOutcome, LemmaReport};
use boundq::fragments::{self, ElabError, Fragment};
use boundq::json::{context_to_json, derivation_to_json, judgment_to_json, term_to_json, type_to_json};
use boundq::oracle::{self, SearchResult};
use boundq::surface::{self, Payload, SourceUnit};
use boundq::wf;
use boundq::{Context, Derivation, Judgment, SystemId, Term, Type};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Accept,
    Reject,
    Found,
    NotFound,
    Error,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Accept => "Accept",
            Verdict::Reject => "Reject",
            Verdict::Found => "Found",
            Verdict::NotFound => "NotFound",
            Verdict::Error => "Error",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Verdict, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "accept" | "accepted" => Ok(Verdict::Accept),
            "reject" | "rejected" => Ok(Verdict::Reject),
            "found" => Ok(Verdict::Found),
            "notfound" | "not-found" => Ok(Verdict::NotFound),
            "error" => Ok(Verdict::Error),
            other => Err(format!("unknown verdict `{other}`")),
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub details: Value,
    pub exit_code: i32,
}

impl Report {
    fn new(command: &str, verdict: Verdict, details: Value) -> Report {
        let exit_code = match verdict {
            Verdict::Accept | Verdict::Found => EXIT_OK,
            Verdict::Reject | Verdict::NotFound => EXIT_NEGATIVE,
            Verdict::Error => EXIT_USAGE,
        };
        Report {
            command: command.to_string(),
            verdict,
            details,
            exit_code,
        }
    }

    fn error(command: &str, message: impl Into<String>, exit_code: i32) -> Report {
        Report {
            command: command.to_string(),
            verdict: Verdict::Error,
            details: json!({ "error": message.into() }),
            exit_code,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Scalars and string lists from `details`, one per line. Nested objects
    /// are only shown with `--json`, except derivation trees.
    pub fn to_human(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, self.verdict);
        if let Value::Object(map) = &self.details {
            for (k, v) in map {
                match v {
                    Value::String(s) if s.contains('\n') => {
                        out.push_str(&format!("{k}:\n"));
                        for line in s.lines() {
                            out.push_str(&format!("  {line}\n"));
                        }
                    }
                    Value::String(s) => out.push_str(&format!("{k}: {s}\n")),
                    Value::Number(n) => out.push_str(&format!("{k}: {n}\n")),
                    Value::Bool(b) => out.push_str(&format!("{k}: {b}\n")),
                    Value::Array(items) if items.iter().all(Value::is_string) => {
                        out.push_str(&format!("{k}:\n"));
                        for item in items {
                            out.push_str(&format!("  {}\n", item.as_str().unwrap()));
                        }
                    }
                    _ => {}
                }
            }
        }
        out
    }
}

// ------------------------------------------------------------ arguments

#[derive(Parser, Debug)]
#[command(name = "boundq", version, about = "Decorated bounded quantification toolkit")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SysArg {
    /// Rule system; defaults to the one the file declares.
    #[arg(long)]
    system: Option<SystemId>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Algorithmic subtyping on a `sub` file; checks and re-decides a derivation file.
    Sub {
        #[command(flatten)]
        sys: SysArg,
        #[arg(long, default_value_t = algo::DEFAULT_FUEL)]
        fuel: u64,
        file: PathBuf,
    },
    /// Bounded proof search in the declarative rules.
    #[command(name = "sub-decl", alias = "oracle")]
    SubDecl {
        #[command(flatten)]
        sys: SysArg,
        #[arg(long, default_value_t = oracle::DEFAULT_DEPTH)]
        depth: u32,
        file: PathBuf,
    },
    /// Minimal type of a term.
    Min {
        #[command(flatten)]
        sys: SysArg,
        #[arg(long, default_value_t = algo::DEFAULT_FUEL)]
        fuel: u64,
        file: PathBuf,
    },
    /// Typecheck a term against a type, or check a derivation file.
    Check {
        #[command(flatten)]
        sys: SysArg,
        /// Type to check against, overriding the file's ascription.
        #[arg(long = "type")]
        ty: Option<String>,
        #[arg(long, default_value_t = algo::DEFAULT_FUEL)]
        fuel: u64,
        file: PathBuf,
    },
    /// Translate the file's judgment into meet types.
    Encode {
        /// Also search for the encoded subtyping judgment.
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = oracle::DEFAULT_DEPTH)]
        depth: u32,
        file: PathBuf,
    },
    /// Verify a lemma instance given as JSON.
    Lemma {
        #[arg(long)]
        id: Option<LemmaId>,
        #[arg(long)]
        depth: Option<u32>,
        file: PathBuf,
    },
    /// Fragment membership of the file's context, types and term.
    Classify { file: PathBuf },
    /// Build a fragment typing derivation for a term.
    Elaborate {
        #[arg(long)]
        target: Target,
        #[arg(long = "type")]
        ty: Option<String>,
        file: PathBuf,
    },
    /// List all types up to a size.
    Enum {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        fragment: Option<Fragment>,
        /// Context, e.g. "X <: Top, W <: X".
        #[arg(long, default_value = "")]
        ctx: String,
        #[arg(long)]
        system: Option<SystemId>,
    },
    /// Beta-normal form of a term.
    Normalize {
        #[arg(long, default_value_t = 100_000)]
        fuel: u64,
        file: PathBuf,
    },
    /// Run every file in a directory against its expected verdict.
    Corpus { dir: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
enum Target {
    Ftop,
    Kernel,
}

// ------------------------------------------------------------ dispatch

enum Fail {
    Usage(String),
    Internal(String),
}

type Outcome = Result<Report, Fail>;

fn usage(msg: impl fmt::Display) -> Fail {
    Fail::Usage(msg.to_string())
}

/// Parses `argv` (without the program name) and runs the subcommand.
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> Report {
    run_inner(argv).0
}

/// Like [`run_command`], also returning whether `--json` was requested.
pub fn run_command_with_format<S: AsRef<str>>(argv: &[S]) -> (Report, bool) {
    run_inner(argv)
}

fn run_inner<S: AsRef<str>>(argv: &[S]) -> (Report, bool) {
    let args = std::iter::once("boundq").chain(argv.iter().map(|s| s.as_ref()));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let json = argv.iter().any(|a| a.as_ref() == "--json");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => (
                    Report::new("help", Verdict::Accept, json!({ "text": e.to_string() })),
                    json,
                ),
                _ => (Report::error("usage", e.to_string(), EXIT_USAGE), json),
            };
        }
    };
    let name = command_name(&cli.command);
    let result = panic::catch_unwind(AssertUnwindSafe(|| dispatch(&cli.command)));
    let report = match result {
        Ok(Ok(r)) => r,
        Ok(Err(Fail::Usage(m))) => Report::error(name, m, EXIT_USAGE),
        Ok(Err(Fail::Internal(m))) => Report::error(name, m, EXIT_INTERNAL),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".to_string());
            Report::error(name, format!("internal error: {msg}"), EXIT_INTERNAL)
        }
    };
    (report, cli.json)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Sub { .. } => "sub",
        Command::SubDecl { .. } => "sub-decl",
        Command::Min { .. } => "min",
        Command::Check { .. } => "check",
        Command::Encode { .. } => "encode",
        Command::Lemma { .. } => "lemma",
        Command::Classify { .. } => "classify",
        Command::Elaborate { .. } => "elaborate",
        Command::Enum { .. } => "enum",
        Command::Normalize { .. } => "normalize",
        Command::Corpus { .. } => "corpus",
    }
}

fn dispatch(c: &Command) -> Outcome {
    match c {
        Command::Sub { sys, fuel, file } => cmd_sub(sys, *fuel, file),
        Command::SubDecl { sys, depth, file } => cmd_sub_decl(sys, *depth, file),
        Command::Min { sys, fuel, file } => cmd_min(sys, *fuel, file),
        Command::Check { sys, ty, fuel, file } => cmd_check(sys, ty.as_deref(), *fuel, file),
        Command::Encode { search, depth, file } => cmd_encode(*search, *depth, file),
        Command::Lemma { id, depth, file } => cmd_lemma(*id, *depth, file),
        Command::Classify { file } => cmd_classify(file),
        Command::Elaborate { target, ty, file } => cmd_elaborate(*target, ty.as_deref(), file),
        Command::Enum {
            size,
            fragment,
            ctx,
            system,
        } => cmd_enum(*size, *fragment, ctx, *system),
        Command::Normalize { fuel, file } => cmd_normalize(*fuel, file),
        Command::Corpus { dir } => cmd_corpus(dir),
    }
}

// ------------------------------------------------------------ helpers

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<SourceUnit, Fail> {
    let text = read(path)?;
    surface::parse_source(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn system_of(arg: &SysArg, unit: &SourceUnit) -> SystemId {
    arg.system.unwrap_or(unit.system)
}

fn ty_str(ctx: &Context, t: &Type) -> String {
    surface::print_type_in(ctx, t)
}

fn term_str(ctx: &Context, t: &Term) -> String {
    surface::print_term_in(ctx, t)
}

/// One line per node, premises indented under their conclusion.
pub fn derivation_tree(d: &Derivation) -> String {
    fn go(d: &Derivation, depth: usize, out: &mut String) {
        out.push_str(&format!(
            "{}{}  {}\n",
            "  ".repeat(depth),
            d.rule,
            surface::print_judgment(&d.conclusion)
        ));
        for p in &d.premises {
            go(p, depth + 1, out);
        }
    }
    let mut out = String::new();
    go(d, 0, &mut out);
    out
}

fn insert_derivation(m: &mut Map<String, Value>, d: &Derivation) {
    m.insert("height".into(), json!(d.height()));
    m.insert("derivation".into(), derivation_to_json(d));
    m.insert("tree".into(), json!(derivation_tree(d)));
}

fn parse_type_arg(text: &str) -> Result<Type, Fail> {
    surface::parse_type(text).map_err(|e| usage(format!("--type: {e}")))
}

fn sub_judgment(unit: &SourceUnit) -> Result<(Type, Type), Fail> {
    match &unit.payload {
        Payload::Sub { lhs, rhs } => Ok((lhs.clone(), rhs.clone())),
        _ => Err(usage("expected a `sub` file")),
    }
}

fn term_payload(unit: &SourceUnit) -> Result<(Term, Option<Type>), Fail> {
    match &unit.payload {
        Payload::Term { term, ascription } => Ok((term.clone(), ascription.clone())),
        _ => Err(usage("expected a `term` file")),
    }
}

/// Algorithmic subtyping is defined on kt and its two uniform fragments.
fn algo_system(system: SystemId) -> Result<(), Fail> {
    match system {
        SystemId::Kt | SystemId::Kernel | SystemId::Ftop => Ok(()),
        other => Err(usage(format!(
            "the subtyping algorithm covers kt, kernel and ftop, not {other}; use sub-decl"
        ))),
    }
}

fn algo_details(ctx: &Context, lhs: &Type, rhs: &Type, fuel: u64) -> (Verdict, Map<String, Value>) {
    let r = algo::algo_subtype_with(ctx, lhs, rhs, &AlgoOptions { fuel, record: true });
    let mut m = Map::new();
    m.insert(
        "judgment".into(),
        json!(surface::print_judgment(&Judgment::subtype(
            ctx,
            lhs.clone(),
            rhs.clone()
        ))),
    );
    m.insert("steps".into(), json!(r.trace.step_count));
    m.insert("fuel".into(), json!(r.trace.fuel_cap));
    m.insert(
        "trace".into(),
        json!(r
            .trace
            .steps
            .iter()
            .map(|s| format!("{}  {}", s.rule, surface::print_judgment(&s.judgment)))
            .collect::<Vec<_>>()),
    );
    let verdict = match &r.outcome {
        AlgoOutcome::Accepted => {
            insert_derivation(&mut m, &r.derivation().unwrap());
            Verdict::Accept
        }
        AlgoOutcome::Rejected { path, goal } => {
            m.insert("failed_goal".into(), json!(surface::print_judgment(goal)));
            m.insert("failed_path".into(), json!(path));
            Verdict::Reject
        }
        AlgoOutcome::FuelExhausted => {
            m.insert("fuel_exhausted".into(), json!(true));
            Verdict::NotFound
        }
    };
    (verdict, m)
}

fn check_in(system: SystemId, ctx: &Context, tys: &[&Type]) -> Result<(), Fail> {
    let sys = system.rules();
    wf::wf_context(ctx, sys).map_err(usage)?;
    for t in tys {
        wf::wf_type_in(ctx, t, sys).map_err(usage)?;
    }
    Ok(())
}

// ------------------------------------------------------------ commands

fn cmd_sub(sys: &SysArg, fuel: u64, file: &Path) -> Outcome {
    let unit = load(file)?;
    let system = system_of(sys, &unit);
    match &unit.payload {
        Payload::Sub { lhs, rhs } => {
            algo_system(system)?;
            check_in(system, &unit.ctx, &[lhs, rhs])?;
            let (v, mut m) = algo_details(&unit.ctx, lhs, rhs, fuel);
            m.insert("system".into(), json!(system.as_str()));
            Ok(Report::new("sub", v, Value::Object(m)))
        }
        Payload::Derivation(d) => {
            let (ctx, lhs, rhs) = d
                .conclusion
                .as_subtype()
                .ok_or_else(|| usage("expected a subtyping derivation"))?;
            let mut m = Map::new();
            m.insert("system".into(), json!(system.as_str()));
            m.insert("conclusion".into(), json!(surface::print_judgment(&d.conclusion)));
            let verdict = match check_subtype_derivation(system, d) {
                Ok(()) => Verdict::Accept,
                Err(e) => {
                    m.insert("check_error".into(), json!(e.to_string()));
                    Verdict::Reject
                }
            };
            m.insert("checker".into(), json!(verdict));
            if algo_system(system).is_ok() && check_in(system, ctx, &[lhs, rhs]).is_ok() {
                let (av, am) = algo_details(ctx, lhs, rhs, fuel);
                m.insert("algo".into(), json!(av));
                m.insert("algo_steps".into(), am["steps"].clone());
            }
            Ok(Report::new("sub", verdict, Value::Object(m)))
        }
        Payload::Term { .. } => Err(usage("expected a `sub` or `derivation` file")),
    }
}

fn search_details(r: &SearchResult, m: &mut Map<String, Value>) -> Verdict {
    m.insert("depth_used".into(), json!(r.depth_used));
    m.insert("nodes_expanded".into(), json!(r.nodes_expanded));
    match r.derivation() {
        Some(d) => {
            insert_derivation(m, d);
            Verdict::Found
        }
        None => Verdict::NotFound,
    }
}

fn cmd_sub_decl(sys: &SysArg, depth: u32, file: &Path) -> Outcome {
    let unit = load(file)?;
    let system = system_of(sys, &unit);
    let (lhs, rhs) = sub_judgment(&unit)?;
    let r = oracle::search_subtype(system, &unit.ctx, &lhs, &rhs, depth).map_err(usage)?;
    let mut m = Map::new();
    m.insert("system".into(), json!(system.as_str()));
    m.insert("depth".into(), json!(depth));
    m.insert(
        "judgment".into(),
        json!(surface::print_judgment(&Judgment::subtype(&unit.ctx, lhs, rhs))),
    );
    let v = search_details(&r, &mut m);
    Ok(Report::new("sub-decl", v, Value::Object(m)))
}

fn cmd_min(sys: &SysArg, fuel: u64, file: &Path) -> Outcome {
    let unit = load(file)?;
    let system = system_of(sys, &unit);
    algo_system(system)?;
    let (term, _) = term_payload(&unit)?;
    let r = algo::minimal_type_in(system, &unit.ctx, &term, &AlgoOptions { fuel, record: false });
    let mut m = Map::new();
    m.insert("system".into(), json!(system.as_str()));
    m.insert("term".into(), json!(term_str(&unit.ctx, &term)));
    m.insert("algo_steps".into(), json!(r.trace.algo_steps));
    m.insert(
        "trace".into(),
        json!(r
            .trace
            .steps
            .iter()
            .map(|s| format!("{}  {}", s.rule, surface::print_judgment(&s.judgment)))
            .collect::<Vec<_>>()),
    );
    let v = match &r.outcome {
        MinOutcome::Typed(t) => {
            m.insert("type".into(), json!(ty_str(&unit.ctx, t)));
            m.insert("type_json".into(), type_to_json(t));
            if let Some(d) = &r.derivation {
                insert_derivation(&mut m, d);
            }
            Verdict::Accept
        }
        MinOutcome::Untypable(u) => {
            m.insert("untypable".into(), json!(u.code()));
            m.insert("reason".into(), json!(u.to_string()));
            Verdict::Reject
        }
    };
    Ok(Report::new("min", v, Value::Object(m)))
}

fn cmd_check(sys: &SysArg, ty: Option<&str>, fuel: u64, file: &Path) -> Outcome {
    let unit = load(file)?;
    let system = system_of(sys, &unit);
    let mut m = Map::new();
    m.insert("system".into(), json!(system.as_str()));
    match &unit.payload {
        Payload::Term { term, ascription } => {
            algo_system(system)?;
            let target = match (ty, ascription) {
                (Some(text), _) => parse_type_arg(text)?,
                (None, Some(a)) => a.clone(),
                (None, None) => return Err(usage("no type to check against: add `: T` or pass --type")),
            };
            m.insert(
                "judgment".into(),
                json!(surface::print_judgment(&Judgment::typing(
                    &unit.ctx,
                    term.clone(),
                    target.clone()
                ))),
            );
            let r = algo::typecheck_in(system, &unit.ctx, term, &target, &AlgoOptions { fuel, record: false });
            let v = match r {
                Ok(tc) => {
                    m.insert("minimal".into(), json!(ty_str(&unit.ctx, &tc.minimal)));
                    m.insert("algo_steps".into(), json!(tc.algo_steps));
                    insert_derivation(&mut m, &tc.derivation);
                    Verdict::Accept
                }
                Err(e) => {
                    m.insert("reason".into(), json!(e.to_string()));
                    Verdict::Reject
                }
            };
            Ok(Report::new("check", v, Value::Object(m)))
        }
        Payload::Derivation(d) => {
            m.insert("conclusion".into(), json!(surface::print_judgment(&d.conclusion)));
            m.insert("kind".into(), json!(d.conclusion.kind()));
            m.insert("nodes".into(), json!(d.node_count()));
            let v = match check_derivation(system, d) {
                Ok(()) => Verdict::Accept,
                Err(e) => {
                    m.insert("reason".into(), json!(e.to_string()));
                    Verdict::Reject
                }
            };
            Ok(Report::new("check", v, Value::Object(m)))
        }
        Payload::Sub { .. } => Err(usage(
            "`check` takes a term or derivation file; use `sub` for subtyping",
        )),
    }
}

fn cmd_encode(search: bool, depth: u32, file: &Path) -> Outcome {
    let unit = load(file)?;
    let j = match &unit.payload {
        Payload::Sub { lhs, rhs } => Judgment::subtype(&unit.ctx, lhs.clone(), rhs.clone()),
        Payload::Term {
            term,
            ascription: Some(a),
        } => Judgment::typing(&unit.ctx, term.clone(), a.clone()),
        Payload::Term { term, ascription: None } => {
            let (enc_ctx, _) = encode::encode_context(&unit.ctx);
            let t = encode::encode_term(term);
            let mut m = Map::new();
            m.insert("context".into(), json!(surface::print_context(&enc_ctx)));
            m.insert("term".into(), json!(term_str(&enc_ctx, &t)));
            m.insert("term_json".into(), term_to_json(&t));
            return Ok(Report::new("encode", Verdict::Accept, Value::Object(m)));
        }
        Payload::Derivation(d) => d.conclusion.clone(),
    };
    let enc = encode::encode_judgment(&j);
    let mut m = Map::new();
    m.insert("source".into(), json!(surface::print_judgment(&j)));
    m.insert("encoded".into(), json!(surface::print_judgment(&enc)));
    m.insert("encoded_json".into(), judgment_to_json(&enc));
    let mut verdict = Verdict::Accept;
    if search {
        let (ctx, l, r) = enc
            .as_subtype()
            .ok_or_else(|| usage("--search needs a subtyping judgment"))?;
        let res = oracle::search_subtype(SystemId::Fwedge, ctx, l, r, depth).map_err(usage)?;
        verdict = search_details(&res, &mut m);
    }
    Ok(Report::new("encode", verdict, Value::Object(m)))
}

/// A lemma instance file: surface-syntax context and bindings, plus the
/// corpus fields `expect` and `depth`.
#[derive(serde::Deserialize, Debug)]
struct InstanceFile {
    lemma: Option<String>,
    #[serde(default)]
    ctx: String,
    #[serde(default)]
    var: Option<String>,
    bindings: std::collections::BTreeMap<String, String>,
    #[serde(default)]
    depth: Option<u32>,
    #[serde(default)]
    #[allow(dead_code)]
    expect: Option<String>,
}

fn lemma_json(rep: &LemmaReport) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("lemma".into(), json!(rep.lemma.as_str()));
    m.insert(
        "premises".into(),
        json!(rep
            .premises
            .iter()
            .map(|p| {
                let (how, ok) = match &p.evidence {
                    Evidence::Algo { accepted, .. } => ("algo", *accepted),
                    Evidence::Search(r) => ("search", r.found()),
                };
                format!(
                    "{} [{}, {}]: {}",
                    p.system,
                    how,
                    if ok { "established" } else { "not established" },
                    surface::print_judgment(&p.judgment)
                )
            })
            .collect::<Vec<_>>()),
    );
    m.insert("conclusion".into(), json!(surface::print_judgment(&rep.conclusion)));
    m.insert("conclusion_json".into(), judgment_to_json(&rep.conclusion));
    m
}

fn cmd_lemma(id: Option<LemmaId>, depth: Option<u32>, file: &Path) -> Outcome {
    let text = read(file)?;
    let inst: InstanceFile = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let lemma = match (id, &inst.lemma) {
        (Some(l), _) => l,
        (None, Some(name)) => name.parse().map_err(usage)?,
        (None, None) => return Err(usage("no lemma: pass --id or set \"lemma\"")),
    };
    let ctx = surface::parse_context(&inst.ctx).map_err(|e| usage(format!("ctx: {e}")))?;
    let mut bindings = Vec::new();
    for (k, v) in &inst.bindings {
        let t = surface::parse_type(v).map_err(|e| usage(format!("binding {k}: {e}")))?;
        bindings.push((k.clone(), t));
    }
    let mut li = LemmaInstance::new(lemma, ctx, []);
    li.bindings = bindings.into_iter().collect();
    if let Some(v) = &inst.var {
        li.var = v.as_str().into();
    }
    let depth = depth.or(inst.depth).unwrap_or(oracle::DEFAULT_DEPTH);
    let rep = encode::verify_lemma_instance(&li, depth).map_err(usage)?;
    let mut m = lemma_json(&rep);
    m.insert("depth".into(), json!(depth));
    let v = match &rep.outcome {
        LemmaOutcome::Discharged(r) => search_details(r, &mut m),
        LemmaOutcome::ConclusionNotFound(r) => search_details(r, &mut m),
        LemmaOutcome::PremiseNotEstablished { index } => {
            m.insert("failed_premise".into(), json!(index));
            Verdict::Reject
        }
    };
    Ok(Report::new("lemma", v, Value::Object(m)))
}

fn flags_json(f: fragments::FragmentFlags) -> Value {
    serde_json::to_value(f).expect("flags serialize")
}

fn cmd_classify(file: &Path) -> Outcome {
    let unit = load(file)?;
    let mut m = Map::new();
    m.insert("context".into(), flags_json(fragments::classify_context(&unit.ctx)));
    match &unit.payload {
        Payload::Sub { lhs, rhs } => {
            m.insert("lhs".into(), flags_json(fragments::classify_type(lhs)));
            m.insert("rhs".into(), flags_json(fragments::classify_type(rhs)));
        }
        Payload::Term { term, ascription } => {
            m.insert("term".into(), flags_json(fragments::classify_term(term)));
            if let Some(a) = ascription {
                m.insert("type".into(), flags_json(fragments::classify_type(a)));
            }
        }
        Payload::Derivation(d) => match &d.conclusion {
            Judgment::Subtype { lhs, rhs, .. } => {
                m.insert("lhs".into(), flags_json(fragments::classify_type(lhs)));
                m.insert("rhs".into(), flags_json(fragments::classify_type(rhs)));
            }
            Judgment::Typing { term, ty, .. } => {
                m.insert("term".into(), flags_json(fragments::classify_term(term)));
                m.insert("type".into(), flags_json(fragments::classify_type(ty)));
            }
            _ => {}
        },
    }
    let mut names = Vec::new();
    for (k, v) in &m {
        for frag in [Fragment::Kernel, Fragment::Ftop, Fragment::MinimalForFtop] {
            let key = match frag {
                Fragment::Kernel => "is_kernel",
                Fragment::Ftop => "is_ftop",
                Fragment::MinimalForFtop => "is_minimal_for_ftop",
            };
            if v[key] == json!(true) {
                names.push(format!("{k}: {}", frag.as_str()));
            }
        }
    }
    m.insert("summary".into(), json!(names));
    Ok(Report::new("classify", Verdict::Accept, Value::Object(m)))
}

fn cmd_elaborate(target: Target, ty: Option<&str>, file: &Path) -> Outcome {
    let unit = load(file)?;
    let (term, ascription) = term_payload(&unit)?;
    let ty = match (ty, ascription) {
        (Some(text), _) => parse_type_arg(text)?,
        (None, Some(a)) => a,
        (None, None) => return Err(usage("no target type: add `: T` or pass --type")),
    };
    let (system, r) = match target {
        Target::Ftop => (SystemId::Ftop, fragments::elaborate_ftop_typing(&unit.ctx, &term, &ty)),
        Target::Kernel => (SystemId::Kernel, fragments::elaborate_kernel(&unit.ctx, &term, &ty)),
    };
    let mut m = Map::new();
    m.insert("target".into(), json!(system.as_str()));
    m.insert(
        "judgment".into(),
        json!(surface::print_judgment(&Judgment::typing(&unit.ctx, term, ty))),
    );
    let v = match r {
        Ok(d) => {
            if let Err(e) = check_derivation(system, &d) {
                return Err(Fail::Internal(format!(
                    "elaborated derivation fails the {system} checker: {e}"
                )));
            }
            m.insert("checked".into(), json!(true));
            insert_derivation(&mut m, &d);
            Verdict::Accept
        }
        Err(e) => {
            let kind = match e {
                ElabError::PreconditionViolated(_) => "PreconditionViolated",
                ElabError::NotTypable { .. } => "NotTypable",
            };
            m.insert("error_kind".into(), json!(kind));
            m.insert("reason".into(), json!(e.to_string()));
            Verdict::Reject
        }
    };
    Ok(Report::new("elaborate", v, Value::Object(m)))
}

fn cmd_enum(size: usize, fragment: Option<Fragment>, ctx: &str, system: Option<SystemId>) -> Outcome {
    let ctx = surface::parse_context(ctx).map_err(|e| usage(format!("--ctx: {e}")))?;
    let types = match system {
        Some(s) => {
            wf::wf_context(&ctx, s.rules()).map_err(usage)?;
            let all = fragments::enumerate_types_in(s, &ctx, size);
            match fragment {
                Some(f) => all
                    .into_iter()
                    .filter(|t| f.holds(fragments::classify_type(t)))
                    .collect(),
                None => all,
            }
        }
        None => fragments::enumerate_types(&ctx, size, fragment),
    };
    let mut m = Map::new();
    m.insert("context".into(), context_to_json(&ctx));
    m.insert("max_size".into(), json!(size));
    m.insert("count".into(), json!(types.len()));
    m.insert(
        "types".into(),
        json!(types.iter().map(|t| ty_str(&ctx, t)).collect::<Vec<_>>()),
    );
    Ok(Report::new("enum", Verdict::Accept, Value::Object(m)))
}

fn cmd_normalize(fuel: u64, file: &Path) -> Outcome {
    let unit = load(file)?;
    let (term, _) = term_payload(&unit)?;
    let mut m = Map::new();
    m.insert("term".into(), json!(term_str(&unit.ctx, &term)));
    let v = match term.beta_normalize(fuel) {
        Ok(nf) => {
            m.insert("normal_form".into(), json!(term_str(&unit.ctx, &nf)));
            m.insert("normal_form_json".into(), term_to_json(&nf));
            Verdict::Accept
        }
        Err(e) => {
            m.insert("reason".into(), json!(e.to_string()));
            Verdict::NotFound
        }
    };
    Ok(Report::new("normalize", v, Value::Object(m)))
}

// ------------------------------------------------------------ corpus

#[derive(Clone, Debug, PartialEq, Serialize)]
struct CorpusEntry {
    file: String,
    command: Vec<String>,
    expected: Option<Verdict>,
    got: Verdict,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// `-- expect:` and `-- run:` header lines.
fn headers(text: &str) -> (Option<String>, Option<String>) {
    let mut expect = None;
    let mut run = None;
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix("--") else {
            continue;
        };
        let rest = rest.trim();
        if let Some(v) = rest.strip_prefix("expect:") {
            expect = Some(v.trim().to_string());
        } else if let Some(v) = rest.strip_prefix("run:") {
            run = Some(v.trim().to_string());
        }
    }
    (expect, run)
}

fn default_command(text: &str) -> &'static str {
    match surface::parse_source(text).map(|u| u.payload) {
        Ok(Payload::Sub { .. }) => "sub",
        Ok(Payload::Term { ascription: None, .. }) => "min",
        _ => "check",
    }
}

fn run_corpus_file(dir: &Path, path: &Path) -> CorpusEntry {
    let file = path
        .strip_prefix(dir)
        .unwrap_or(path)
        .to_string_lossy()
        .replace('\\', "/");
    let text = fs::read_to_string(path).unwrap_or_default();
    let is_json = path.extension().is_some_and(|e| e == "json");
    let (expect, run) = if is_json {
        let v: Value = serde_json::from_str(&text).unwrap_or(Value::Null);
        (v["expect"].as_str().map(String::from), Some("lemma".to_string()))
    } else {
        let (e, r) = headers(&text);
        (e, Some(r.unwrap_or_else(|| default_command(&text).to_string())))
    };
    let mut command: Vec<String> = run.unwrap().split_whitespace().map(String::from).collect();
    command.push(path.to_string_lossy().into_owned());
    let report = run_command(&command);
    command.pop();
    command.push(file.clone());
    let expected = expect.as_deref().map(str::parse::<Verdict>);
    let (expected, parse_err) = match expected {
        Some(Ok(v)) => (Some(v), None),
        Some(Err(e)) => (None, Some(e)),
        None => (None, Some("missing `-- expect:` header".to_string())),
    };
    let error = parse_err.or_else(|| report.details.get("error").and_then(|e| e.as_str()).map(String::from));
    CorpusEntry {
        pass: expected == Some(report.verdict),
        file,
        command,
        expected,
        got: report.verdict,
        error,
    }
}

fn collect_files(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let p = entry?.path();
        if p.is_dir() {
            collect_files(&p, out)?;
        } else if p.extension().is_some_and(|e| e == "bq" || e == "json") {
            out.push(p);
        }
    }
    Ok(())
}

fn cmd_corpus(dir: &Path) -> Outcome {
    let mut files = Vec::new();
    collect_files(dir, &mut files).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    files.sort();
    let entries: Vec<CorpusEntry> = files.iter().map(|p| run_corpus_file(dir, p)).collect();
    let passed = entries.iter().filter(|e| e.pass).count();
    let failed = entries.len() - passed;
    let summary: Vec<String> = entries
        .iter()
        .map(|e| {
            let exp = e.expected.map(|v| v.to_string()).unwrap_or_else(|| "?".into());
            let mark = if e.pass { "ok  " } else { "FAIL" };
            format!(
                "{mark} {} ({}): expected {exp}, got {}",
                e.file,
                e.command.join(" "),
                e.got
            )
        })
        .collect();
    let details = json!({
        "files": entries,
        "passed": passed,
        "failed": failed,
        "summary": summary,
    });
    let v = if failed == 0 { Verdict::Accept } else { Verdict::Reject };
    Ok(Report::new("corpus", v, details))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(file: &str) -> String {
        format!("{}/../../corpus/{file}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run(args: &[&str]) -> Report {
        run_command(args)
    }

    #[test]
    fn loc_derivation_is_accepted() {
        let r = run(&["sub", "--system", "kt", &corpus("ghelli_loc2.bq")]);
        assert_eq!(r.verdict, Verdict::Accept, "{}", r.to_human());
        assert_eq!(r.exit_code, EXIT_OK);
    }

    #[test]
    fn minimal_type_of_u() {
        let r = run(&["min", &corpus("u.bq")]);
        assert_eq!(r.verdict, Verdict::Accept);
        assert_eq!(r.details["type"], "forall_k Z <: X . X -> X");
    }

    #[test]
    fn check_against_top() {
        let r = run(&["check", "--type", "Top", &corpus("u.bq")]);
        assert_eq!(r.verdict, Verdict::Accept, "{}", r.to_human());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&["sub", "no/such/file.bq"]).exit_code, EXIT_USAGE);
        assert_eq!(run(&["frobnicate"]).exit_code, EXIT_USAGE);
        assert_eq!(run(&["sub", "--fuel", "lots", &corpus("u.bq")]).exit_code, EXIT_USAGE);
    }

    #[test]
    fn exit_code_follows_verdict() {
        for (args, ok) in [
            (vec!["sub", corpus("ghelli_ftop_incomparable1.bq").as_str()], false),
            (vec!["sub-decl", corpus("exists_orig.bq").as_str()], true),
            (vec!["sub-decl", corpus("exists_kernel.bq").as_str()], false),
            (vec!["min", corpus("u.bq").as_str()], true),
        ]
        .iter()
        .map(|(a, ok)| (a.iter().map(|s| s.to_string()).collect::<Vec<_>>(), *ok))
        {
            let r = run_command(&args);
            assert!(
                r.exit_code == EXIT_OK || r.exit_code == EXIT_NEGATIVE,
                "{args:?}: {}",
                r.to_human()
            );
            assert_eq!(r.exit_code == EXIT_OK, ok, "{args:?}");
            assert_eq!(matches!(r.verdict, Verdict::Accept | Verdict::Found), ok);
        }
    }

    #[test]
    fn verdict_names() {
        assert_eq!("not-found".parse::<Verdict>().unwrap(), Verdict::NotFound);
        assert_eq!("accept".parse::<Verdict>().unwrap(), Verdict::Accept);
        assert!("maybe".parse::<Verdict>().is_err());
    }

    #[test]
    fn corpus_runs_clean_and_deterministically() {
        let dir = format!("{}/../../corpus", env!("CARGO_MANIFEST_DIR"));
        let a = run(&["corpus", &dir]);
        let b = run(&["corpus", &dir]);
        assert_eq!(a.details["failed"], 0, "{}", a.to_human());
        assert_eq!(a.verdict, Verdict::Accept);
        assert_eq!(a.to_json(), b.to_json());
    }
}
