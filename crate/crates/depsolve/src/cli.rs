//! The `depsolve` command line.

use std::path::{Path, PathBuf};
use std::io::Write as _;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::armstrong::{armstrong_ind_ia, armstrong_star_finite, armstrong_ufd_ia, ArmstrongReport, DEFAULT_ROW_CAP};
use crate::chase::uind_ca_closure;
use crate::engine::{deduce, imply, Engine, Options};
use crate::error::Error;
use crate::model::{AttrSet, DatabaseSchema, Dependency, DependencySet, Mode, RelId};
use crate::noninteract::{noninteract_fd_ia, noninteract_ind_ia};
use crate::parser::{load_csv, parse_dependency, parse_spec_named, CsvOptions, NullPolicy, ParseError};
use crate::polyengine::{algorithm1, build_star_closure, fd_closure};
use crate::profiler::{mine_ias, MiningConfig};
use crate::semantics::{violation, Database};
use crate::verdict::{Evidence, Refutation, Verdict};

pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "depsolve", version, about = "Implication, Armstrong relations and IA mining for FDs, INDs and IAs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Finite,
    Unrestricted,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Finite => Mode::Finite,
            ModeArg::Unrestricted => Mode::Unrestricted,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum EngineArg {
    Auto,
    Chase,
    Hgraph,
    Star,
    Graphchase,
    Derive,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Chase => Engine::Chase,
            EngineArg::Hgraph => Engine::HGraph,
            EngineArg::Star => Engine::Star,
            EngineArg::Graphchase => Engine::GraphChase,
            EngineArg::Derive => Engine::Derive,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ClosureKind {
    Fd,
    Ca,
    Uind,
    Alg1,
    Star,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ClassArg {
    UfdIa,
    Star,
    IndIa,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether the spec implies a dependency.
    Imply {
        spec: PathBuf,
        #[arg(short, long)]
        query: String,
        #[arg(long, value_enum, default_value = "finite")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "auto")]
        engine: EngineArg,
        /// Overrides DEPSOLVE_BUDGET.
        #[arg(long)]
        budget: Option<usize>,
        /// Include the deduction, chase trace or argument.
        #[arg(long)]
        explain: bool,
        /// Add wall-clock time to the stats; the JSON is then no longer reproducible.
        #[arg(long)]
        timing: bool,
        /// Write a counterexample database as CSV files here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closures and derived structures of the spec.
    Closure {
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: ClosureKind,
        /// Attributes to close (fd), space separated.
        #[arg(long, default_value = "")]
        attrs: String,
        /// Relation for `--kind fd` with no attributes.
        #[arg(long)]
        relation: Option<String>,
        #[arg(long, value_enum, default_value = "finite")]
        mode: ModeArg,
    },
    /// Build and verify an Armstrong relation or database.
    Armstrong {
        spec: PathBuf,
        #[arg(long, value_enum)]
        class: ClassArg,
        /// Arity bound for IND+IA candidates.
        #[arg(long, default_value_t = 2)]
        bound: usize,
        #[arg(long, default_value_t = DEFAULT_ROW_CAP)]
        row_cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check CSV relations against a spec; files are matched to relations by name.
    Check {
        spec: PathBuf,
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        #[arg(long)]
        null: Option<String>,
    },
    /// Test the syntactic non-interaction criteria.
    Noninteract {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "finite")]
        mode: ModeArg,
    },
    /// Mine maximal independence atoms from a CSV relation.
    Profile {
        csv: PathBuf,
        #[arg(long)]
        max_arity: Option<usize>,
        /// Also report constant columns.
        #[arg(long)]
        overlapping: bool,
        /// Report pairwise independence ratios.
        #[arg(long)]
        ratios: bool,
        /// Print `ia` lines instead of JSON.
        #[arg(long)]
        dsl: bool,
        #[arg(long)]
        null: Option<String>,
        /// Null tokens never compare equal.
        #[arg(long)]
        distinct_nulls: bool,
    },
}

/// What a command prints and its exit status.
pub struct Outcome {
    pub json: Value,
    pub text: Option<String>,
    pub code: i32,
}

impl Outcome {
    fn json(json: Value, code: i32) -> Self {
        Self { json, text: None, code }
    }
}

pub enum Failure {
    Parse(Vec<ParseError>),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Parse(_) => EXIT_USAGE,
            Failure::Engine(Error::BudgetExceeded(_)) => 2,
            Failure::Engine(
                Error::Malformed(_)
                | Error::DuplicateAttribute(_)
                | Error::DuplicateRelation(_)
                | Error::Io(_)
                | Error::RaggedRow { .. }
                | Error::EmptyRelation(_),
            ) => EXIT_USAGE,
            Failure::Engine(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Parse(errs) => errs.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"),
            Failure::Engine(e) => e.to_string(),
        }
    }
}

/// Runs a parsed command line; `budget_env` is the value of DEPSOLVE_BUDGET.
pub fn run(cli: Cli, budget_env: Option<&str>) -> Result<Outcome, Failure> {
    match cli.command {
        Command::Imply { spec, query, mode, engine, budget, explain, timing, out } => {
            let set = load_spec(&spec)?;
            let sigma = parse_dependency(&query, &set.schema).map_err(Failure::Parse)?;
            let budget = budget.or_else(|| budget_env.and_then(|b| b.trim().parse().ok()));
            cmd_imply(&set, &sigma, mode.into(), &Options { engine: engine.into(), budget }, explain, timing, out.as_deref())
        }
        Command::Closure { spec, kind, attrs, relation, mode } => {
            let set = load_spec(&spec)?;
            cmd_closure(&set, kind, &attrs, relation.as_deref(), mode.into())
        }
        Command::Armstrong { spec, class, bound, row_cap, out } => {
            let set = load_spec(&spec)?;
            let report = match class {
                ClassArg::UfdIa => armstrong_ufd_ia(&set)?,
                ClassArg::Star => armstrong_star_finite(&set)?,
                ClassArg::IndIa => armstrong_ind_ia(&set, bound, row_cap)?,
            };
            cmd_armstrong(&report, out.as_deref())
        }
        Command::Check { spec, csv, null } => {
            let set = load_spec(&spec)?;
            let opts = CsvOptions { null_token: null, ..Default::default() };
            let tables = csv.iter().map(|p| load_csv(p, &opts)).collect::<Result<Vec<_>, _>>()?;
            let db = Database::from_tables(set.schema.clone(), &tables)?;
            Ok(cmd_check(&set, &db))
        }
        Command::Noninteract { spec, mode } => {
            let set = load_spec(&spec)?;
            let report = if set.fds().next().is_some() { noninteract_fd_ia(&set, mode.into())? } else { noninteract_ind_ia(&set)? };
            let code = if report.guaranteed { 0 } else { 1 };
            Ok(Outcome::json(report.to_json(&set.schema), code))
        }
        Command::Profile { csv, max_arity, overlapping, ratios, dsl, null, distinct_nulls } => {
            let policy = if distinct_nulls { NullPolicy::DistinctPerRow } else { NullPolicy::LiteralEquality };
            let table = load_csv(&csv, &CsvOptions { null_token: null, null_policy: policy, ..Default::default() })?;
            let db = Database::from_table(&table)?;
            let cfg = MiningConfig { max_arity: max_arity.unwrap_or(usize::MAX), include_overlapping: overlapping, ratios };
            let r = mine_ias(&db, 0, &cfg);
            Ok(Outcome { json: r.to_json(&db), text: dsl.then(|| r.to_dsl(&db)), code: 0 })
        }
    }
}

fn load_spec(path: &Path) -> Result<DependencySet, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_spec_named(&text, &path.display().to_string()).map_err(Failure::Parse)
}

pub fn cmd_imply(
    set: &DependencySet,
    sigma: &Dependency,
    mode: Mode,
    opts: &Options,
    explain: bool,
    timing: bool,
    out: Option<&Path>,
) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let mut answer = imply(set, sigma, mode, opts)?;
    if explain && matches!(answer.verdict, Verdict::Implied(Evidence::Chase(_))) {
        if let Some(d) = deduce(set, sigma) {
            answer.verdict = Verdict::Implied(Evidence::Deduction(d));
        }
    }
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    let schema = &set.schema;
    let mut obj = json!({
        "query": sigma.show(schema).to_string(),
        "verdict": answer.verdict.label(),
        "mode": mode.to_string(),
        "engine": answer.engine.to_string(),
    });
    let (witness, detail, steps): (Value, Option<String>, Option<usize>) = match &answer.verdict {
        Verdict::Implied(Evidence::Deduction(d)) => (json!("deduction"), Some(d.render(schema)), Some(d.steps.len())),
        Verdict::Implied(Evidence::Chase(t)) => (json!("chase_trace"), Some(t.render()), Some(t.steps.len())),
        Verdict::Implied(Evidence::Reason(r)) => (json!("none"), Some(r.clone()), None),
        Verdict::NotImplied(Refutation::Database(db)) => {
            let w = match out {
                Some(dir) => json!(write_db(db, dir)?),
                None => json!(csv_map(db)),
            };
            (json!({ "counterexample": w }), None, None)
        }
        Verdict::NotImplied(Refutation::Certificate(c)) => (json!("none"), Some(c.clone()), None),
        Verdict::Unknown(r) | Verdict::Unsupported(r) => (json!("none"), Some(r.clone()), None),
    };
    obj["witness"] = witness;
    if matches!(answer.verdict, Verdict::Unknown(_) | Verdict::Unsupported(_)) {
        obj["reason"] = json!(detail.clone());
    }
    if explain {
        obj["explanation"] = json!(detail);
    }
    obj["stats"] = json!({ "steps": steps });
    if timing {
        obj["stats"]["elapsedMs"] = json!((elapsed * 1000.0).round() / 1000.0);
    }
    Ok(Outcome::json(obj, answer.verdict.exit_code()))
}

fn csv_map(db: &Database) -> Value {
    let mut m = serde_json::Map::new();
    for r in 0..db.relations.len() {
        m.insert(db.schema.rel_name(r).to_string(), json!(db.to_csv(r)));
    }
    Value::Object(m)
}

fn write_db(db: &Database, dir: &Path) -> Result<Vec<String>, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for r in 0..db.relations.len() {
        let p = dir.join(format!("{}.csv", db.schema.rel_name(r)));
        std::fs::write(&p, db.to_csv(r)).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        paths.push(p.display().to_string());
    }
    Ok(paths)
}

fn names(schema: &DatabaseSchema, s: &AttrSet) -> Value {
    json!(schema.names(s))
}

pub fn cmd_closure(set: &DependencySet, kind: ClosureKind, attrs: &str, relation: Option<&str>, mode: Mode) -> Result<Outcome, Failure> {
    let schema = &set.schema;
    let json = match kind {
        ClosureKind::Fd => {
            let mut x = AttrSet::new();
            for name in attrs.split_whitespace() {
                let a = schema.attr_by_name(name).ok_or_else(|| Error::Malformed(format!("unknown attribute `{name}`")))?;
                x.insert(a);
            }
            let rel = match (x.first(), relation) {
                (Some(a), _) => schema.relation_of(a),
                (None, Some(r)) => schema.relation_by_name(r).ok_or_else(|| Error::Malformed(format!("unknown relation `{r}`")))?,
                (None, None) if schema.relations().len() == 1 => 0,
                (None, None) => return Err(Error::Malformed("name a relation with --relation".into()).into()),
            };
            // IA overlaps are constant, so they join the closure of every set.
            let pairs: Vec<(AttrSet, AttrSet)> = set
                .iter()
                .filter_map(|d| match d {
                    Dependency::Fd { rel: r, lhs, rhs } if *r == rel => Some((lhs.clone(), rhs.clone())),
                    Dependency::Ia { rel: r, left, right } if *r == rel => Some((AttrSet::new(), left.intersection(right))),
                    _ => None,
                })
                .collect();
            json!({ "relation": schema.rel_name(rel), "attrs": names(schema, &x), "closure": names(schema, &fd_closure(&pairs, &x)) })
        }
        ClosureKind::Ca | ClosureKind::Uind => {
            let c = uind_ca_closure(set)?;
            match kind {
                ClosureKind::Ca => json!({
                    "constants": names(schema, &c.constants),
                    "classes": c.classes().iter().map(|s| names(schema, s)).collect::<Vec<_>>(),
                }),
                _ => json!({
                    "uinds": c.uinds().iter().map(|&(a, b)| {
                        Dependency::ind(schema.relation_of(a), vec![a], schema.relation_of(b), vec![b]).show(schema).to_string()
                    }).collect::<Vec<_>>(),
                }),
            }
        }
        ClosureKind::Alg1 => algorithm1(set)?.to_json(schema),
        ClosureKind::Star => build_star_closure(set, mode)?.to_json(),
    };
    Ok(Outcome::json(json, 0))
}

pub fn cmd_armstrong(report: &ArmstrongReport, out: Option<&Path>) -> Result<Outcome, Failure> {
    let mut json = report.to_json();
    if let Some(dir) = out {
        json["files"] = json!(write_db(&report.database, dir)?);
    } else {
        json["csv"] = csv_map(&report.database);
    }
    Ok(Outcome::json(json, if report.is_armstrong() { 0 } else { 1 }))
}

pub fn cmd_check(set: &DependencySet, db: &Database) -> Outcome {
    let schema = &set.schema;
    let mut violated = Vec::new();
    for d in &set.deps {
        if let Some(v) = violation(db, d) {
            let tuples: Vec<Value> = v
                .tuples
                .iter()
                .map(|(r, t)| {
                    let r: RelId = *r;
                    json!({ "relation": schema.rel_name(r), "tuple": t.iter().map(|&x| db.value_name(x)).collect::<Vec<_>>() })
                })
                .collect();
            violated.push(json!({ "dependency": d.show(schema).to_string(), "witness": tuples }));
        }
    }
    let code = i32::from(!violated.is_empty());
    Outcome::json(json!({ "satisfied": violated.is_empty(), "checked": set.deps.len(), "violations": violated }), code)
}

/// Parses `args`, runs the command and prints its output; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let env = std::env::var("DEPSOLVE_BUDGET").ok();
    match run(cli, env.as_deref()) {
        Ok(o) => {
            let body = match o.text {
                Some(t) => t,
                None => format!("{}\n", serde_json::to_string_pretty(&o.json).expect("serializable")),
            };
            // A closed pipe downstream is not our failure.
            let _ = std::io::stdout().write_all(body.as_bytes());
            o.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}
