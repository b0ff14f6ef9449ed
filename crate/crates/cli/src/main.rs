//! `gatkit`: check, inspect and run theories, maps and models from the
//! command line.
//!
//! Exit codes: 0 success, 1 a check failed on well-formed input, 2 usage or
//! parse error. Every command takes `--json`.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use indexmap::IndexMap;
use serde_json::{json, Value as Json};

use gatkit::colimits::{inclusion_map, pushout_simple};
use gatkit::gat::{infer_sort, Gat, TermInCtx};
use gatkit::models::{
    builtin_model, check_axioms, fixed_values, int_range, Enumerators, Model, Value,
    BUILTIN_MODELS, DEFAULT_BOUND,
};
use gatkit::morphisms::{
    check_axiom_preservation, check_simple_validity, migrate_model, AxiomVerdict,
    TheoryMap, TheoryMapKind,
};
use gatkit::stdlib::{load_stdlib, EXPECTED_INVALID};
use gatkit::surface::{
    map_to_json, parse_term, pretty_gat, pretty_term_in_ctx, theory_to_json, Entry,
    Registry, SurfaceError, SurfaceErrorKind,
};

#[derive(Parser)]
#[command(name = "gatkit", version, about = "Generalized algebraic theories from the command line")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Extra `.gat` files to load after the library (repeatable).
    #[arg(long = "load", global = true, value_name = "FILE")]
    load: Vec<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check `.gat` files, or the bundled library with `stdlib`.
    Check { files: Vec<PathBuf> },
    /// Print the sort of a term, e.g. `"compose(f,g) ⊣ [...]"`.
    Sort {
        #[arg(long)]
        theory: String,
        term: String,
    },
    /// Push a term forward along a map.
    Apply {
        #[arg(long)]
        map: String,
        /// Optional sanity check: the theory the term is written in.
        #[arg(long)]
        theory: Option<String>,
        term: String,
    },
    /// Evaluate a term in a model.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Migrate a model along a map, then evaluate in or check the result.
    Migrate {
        #[arg(long)]
        map: String,
        #[command(flatten)]
        model: ModelArgs,
        #[command(subcommand)]
        then: Option<Then>,
    },
    /// Pushout of two renaming maps out of a common theory. A side may be a
    /// map name or `Sub->Super` for the inclusion between two theories.
    Pushout {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Name of the resulting theory.
        #[arg(long, default_value = "Pushout")]
        name: String,
        /// Write the theory here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a model for counterexamples to its theory's axioms.
    Axioms {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// List library and loaded entries.
    List,
    /// Export a theory or map as JSON.
    ExportJson {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Then {
    Eval(EvalArgs),
    Axioms(SearchArgs),
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    model: String,
    /// Model parameter, `k=v` (repeatable).
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
}

#[derive(Args)]
struct EvalArgs {
    /// `term ⊣ [ctx]`
    term: String,
    /// Values for context variables, `x=v`.
    #[arg(long = "bind", value_name = "X=V", num_args = 1..)]
    binds: Vec<String>,
}

#[derive(Args)]
struct SearchArgs {
    /// Values for a type, `T=lo..hi` (inclusive) or `T=v1,v2,...`.
    #[arg(long = "enum", value_name = "T=VALUES", num_args = 1..)]
    enums: Vec<String>,
    /// Assignments tried per axiom.
    #[arg(long, conflicts_with = "exhaustive")]
    bound: Option<usize>,
    /// Try every assignment the enumerators produce.
    #[arg(long)]
    exhaustive: bool,
}

/// A failed command: `Check` for negative verdicts, `Usage` for bad input.
enum Failure {
    Check(String, Json),
    Usage(String),
}

type Res<T> = Result<T, Failure>;

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn check_fail(e: impl Display) -> Failure {
    let msg = e.to_string();
    Failure::Check(msg.clone(), json!({ "error": msg }))
}

/// Syntax errors are usage errors; anything found while elaborating well-
/// formed text is a check failure.
fn surface(e: SurfaceError) -> Failure {
    match e.kind {
        SurfaceErrorKind::Syntax(_) => usage(e),
        _ => check_fail(e),
    }
}

/// What a successful command prints.
struct Output {
    text: String,
    json: Json,
}

fn split_kv(s: &str) -> Res<(&str, &str)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| usage(format!("expected k=v, found {s:?}")))
}

fn library_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "gat"))
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn load_file(reg: &mut Registry, path: &Path) -> Res<Vec<String>> {
    let src = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    reg.load_source(&src).map_err(|e| {
        let located = SurfaceError { kind: e.kind.clone(), span: e.span };
        match surface(located) {
            Failure::Usage(m) => Failure::Usage(format!("{}:{m}", path.display())),
            Failure::Check(m, _) => {
                let m = format!("{}:{m}", path.display());
                Failure::Check(m.clone(), json!({ "file": path.display().to_string(), "error": m }))
            }
        }
    })
}

/// The library, then `GATKIT_PATH` directories, then `--load` files; later
/// definitions shadow earlier ones.
fn registry(extra: &[PathBuf]) -> Res<Registry> {
    let (mut reg, _) = load_stdlib().map_err(|e| check_fail(format!("library: {e}")))?;
    reg.set_shadowing(true);
    if let Some(paths) = std::env::var_os("GATKIT_PATH") {
        for dir in std::env::split_paths(&paths) {
            for f in library_files(&dir) {
                load_file(&mut reg, &f)?;
            }
        }
    }
    for f in extra {
        load_file(&mut reg, f)?;
    }
    Ok(reg)
}

fn theory<'r>(reg: &'r Registry, name: &str) -> Res<&'r Gat> {
    reg.theory(name).ok_or_else(|| usage(format!("unknown theory {name}")))
}

fn map<'r>(reg: &'r Registry, name: &str) -> Res<&'r TheoryMap> {
    reg.map(name).ok_or_else(|| usage(format!("unknown map {name}")))
}

fn model(reg: &Registry, args: &ModelArgs) -> Res<Model> {
    let mut params = IndexMap::new();
    for p in &args.params {
        let (k, v) = split_kv(p)?;
        params.insert(k.to_string(), v.to_string());
    }
    if !BUILTIN_MODELS.iter().any(|(n, _, _)| *n == args.model) {
        let names: Vec<&str> = BUILTIN_MODELS.iter().map(|(n, _, _)| *n).collect();
        return Err(usage(format!("unknown model {} (known: {})", args.model, names.join(", "))));
    }
    builtin_model(&args.model, &params, reg).map_err(usage)
}

fn cmd_sort(reg: &Registry, th: &str, src: &str) -> Res<Output> {
    let g = theory(reg, th)?;
    let t = parse_term(g, src).map_err(surface)?;
    let s = infer_sort(g, &t.ctx, &t.term).map_err(check_fail)?;
    let name = g.canonical(&s.0).name.to_string();
    Ok(Output { text: name.clone(), json: json!({ "sort": name }) })
}

fn cmd_apply(reg: &Registry, m: &str, th: Option<&str>, src: &str) -> Res<Output> {
    let m = map(reg, m)?;
    if let Some(th) = th {
        if !theory(reg, th)?.same_theory(m.dom()) {
            return Err(usage(format!("{} maps out of {}, not {th}", m.name(), m.dom().name())));
        }
    }
    // a term that is not in the domain is a mismatch between map and input
    let t = parse_term(m.dom(), src)
        .map_err(|e| usage(format!("term is not in {}, the domain of {}: {e}", m.dom().name(), m.name())))?;
    let out = m.pushforward_term(&t).map_err(check_fail)?;
    let text = pretty_term_in_ctx(m.codom(), &out);
    Ok(Output { json: json!({ "map": m.name(), "result": text }), text })
}

fn bind_values(md: &Model, t: &TermInCtx, binds: &[String]) -> Res<HashMap<gatkit::scopes::Ident, Value>> {
    let mut given = HashMap::new();
    for b in binds {
        let (k, v) = split_kv(b)?;
        given.insert(k.to_string(), v.to_string());
    }
    let mut env = HashMap::new();
    for (v, ty) in t.ctx.entries() {
        let text = given
            .remove(&*v.name)
            .ok_or_else(|| usage(format!("no value for {} (use --bind {}=...)", v.name, v.name)))?;
        let raw = md.parse_value(&ty.head, &text).map_err(usage)?;
        let args = ty
            .args
            .iter()
            .map(|a| md.eval_term(&env, a))
            .collect::<Result<Vec<_>, _>>()
            .map_err(check_fail)?;
        let val = md.coerce(&ty.head, &raw, &args).map_err(|e| {
            Failure::Check(format!("{}: {e}", v.name), json!({ "variable": &*v.name, "error": e.to_json() }))
        })?;
        env.insert(v, val);
    }
    if let Some(k) = given.keys().next() {
        return Err(usage(format!("{k} is not a variable of the term")));
    }
    Ok(env)
}

fn cmd_eval(md: &Model, args: &EvalArgs) -> Res<Output> {
    let t = parse_term(md.theory(), &args.term).map_err(surface)?;
    let env = bind_values(md, &t, &args.binds)?;
    let v = md.eval_term(&env, &t.term).map_err(|e| match e {
        gatkit::models::ModelError::Check(c) => Failure::Check(c.to_string(), json!({ "error": c.to_json() })),
        other => check_fail(other),
    })?;
    Ok(Output { text: v.to_string(), json: json!({ "model": md.name(), "value": v.to_json() }) })
}

fn enumerators(md: &Model, specs: &[String]) -> Res<Enumerators> {
    let mut out = Enumerators::new();
    for s in specs {
        let (ty, vals) = split_kv(s)?;
        let head = md
            .theory()
            .resolve_symbol(ty, None)
            .map_err(|_| usage(format!("{ty} is not a type of {}", md.theory().name())))?;
        if md.theory().typecon(&head).is_none() {
            return Err(usage(format!("{ty} is not a type constructor")));
        }
        let en = match vals.split_once("..") {
            Some((lo, hi)) => {
                let lo = lo.trim().parse::<i64>().map_err(|_| usage(format!("bad range {vals}")))?;
                let hi = hi.trim().parse::<i64>().map_err(|_| usage(format!("bad range {vals}")))?;
                int_range(lo, hi)
            }
            None => fixed_values(
                vals.split(',')
                    .map(|v| md.parse_value(&head, v.trim()).map_err(usage))
                    .collect::<Res<Vec<_>>>()?,
            ),
        };
        out.insert(md.theory().canonical(&head), en);
    }
    Ok(out)
}

fn cmd_axioms(md: &Model, args: &SearchArgs) -> Res<Output> {
    let enums = enumerators(md, &args.enums)?;
    let bound = if args.exhaustive { None } else { Some(args.bound.unwrap_or(DEFAULT_BOUND)) };
    let report = check_axioms(md, &enums, bound);
    let text = report.to_string();
    let json = report.to_json();
    if report.ok() {
        Ok(Output { text, json })
    } else {
        Err(Failure::Check(text, json))
    }
}

fn leg(reg: &Registry, arg: &str) -> Res<TheoryMap> {
    if let Some((sub, sup)) = arg.split_once("->") {
        let (sub, sup) = (theory(reg, sub.trim())?, theory(reg, sup.trim())?);
        return inclusion_map(sub, sup).map_err(check_fail);
    }
    map(reg, arg).cloned()
}

fn cmd_pushout(reg: &Registry, left: &str, right: &str, name: &str, out: Option<&Path>) -> Res<Output> {
    let (l, r) = (leg(reg, left)?, leg(reg, right)?);
    let p = pushout_simple(&l, &r).map_err(check_fail)?;
    let g = p.theory.clone().with_name(name);
    let text = pretty_gat(&g);
    let mut json = json!({ "theory": theory_to_json(&g), "notes": p.notes });
    if let Some(path) = out {
        std::fs::write(path, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        json["written"] = json!(path.display().to_string());
        let mut msg = format!("wrote {} to {}", name, path.display());
        for n in &p.notes {
            msg.push_str(&format!("\nnote: {n}"));
        }
        return Ok(Output { text: msg, json });
    }
    let mut text = text;
    for n in &p.notes {
        text.push_str(&format!("# note: {n}\n"));
    }
    Ok(Output { text: text.trim_end().to_string(), json })
}

/// The first built-in model of `g`, used as a witness when a map's axioms
/// cannot be proved symbolically.
fn witness_for(reg: &Registry, g: &Gat) -> Option<Model> {
    BUILTIN_MODELS
        .iter()
        .filter(|(_, th, _)| *th == g.name())
        .find_map(|(name, _, _)| builtin_model(name, &IndexMap::new(), reg).ok())
        .filter(|md| md.theory().same_theory(g))
}

/// Checks one map, appending one line per finding. `Ok` when the map is
/// well-typed, valid as a renaming if it is one, and no counterexample was
/// found; otherwise `Err` with the first problem.
fn check_map(reg: &Registry, m: &TheoryMap, lines: &mut Vec<String>, items: &mut Vec<Json>) -> Result<(), String> {
    let witness = witness_for(reg, m.codom());
    let report = check_axiom_preservation(m, witness.as_ref(), &Enumerators::new(), Some(DEFAULT_BOUND));
    let mut problem = report.errors.first().map(|d| d.to_string());
    let mut simple_errors = Vec::new();
    if problem.is_none() && matches!(m.kind(), TheoryMapKind::Simple { .. }) {
        if let Err(errs) = check_simple_validity(m) {
            problem = errs.first().map(|d| d.to_string());
            simple_errors = errs;
        }
    }
    if problem.is_none() {
        problem = report.counterexamples().next().map(|(name, _)| format!("{name} fails"));
    }
    let verdict = if problem.is_none() { "ok" } else { "FAILED" };
    lines.push(format!("map {} ({}): {verdict}", m.name(), m.kind().label()));
    for e in report.errors.iter().chain(&simple_errors) {
        lines.push(format!("  {e}"));
    }
    for (name, v) in report.axioms.iter().filter(|_| report.welltyped()) {
        match v {
            AxiomVerdict::ProvedByNormalization => lines.push(format!("  {name}: proved by normalization")),
            AxiomVerdict::Unverified { note, .. } => lines.push(format!("  {name}: unproved; {note}")),
            AxiomVerdict::Counterexample { env, lhs, rhs, model } => {
                let at: Vec<String> = env.iter().map(|(x, v)| format!("{x}={v}")).collect();
                lines.push(format!("  {name}: COUNTEREXAMPLE in {model} at {}: {lhs} ≠ {rhs}", at.join(", ")));
            }
        }
    }
    let mut j = report.to_json();
    j["ok"] = json!(problem.is_none());
    j["kind"] = json!(m.kind().label());
    j["simple_errors"] = json!(simple_errors.iter().map(|e| e.to_json()).collect::<Vec<_>>());
    items.push(j);
    problem.map_or(Ok(()), Err)
}

fn cmd_check(files: &[PathBuf], extra: &[PathBuf]) -> Res<Output> {
    let mut lines = Vec::new();
    let mut items = Vec::new();
    let mut ok = true;
    let check_stdlib = files.is_empty() || files.iter().any(|f| f.as_os_str() == "stdlib");
    let base = registry(extra)?;

    if check_stdlib {
        let (lib, index) = load_stdlib().map_err(|e| check_fail(format!("library: {e}")))?;
        for e in &index.entries {
            match lib.get(&e.name) {
                Some(Entry::Theory(g)) => {
                    let r = g.self_check();
                    ok &= r.is_ok();
                    lines.push(format!("theory {}: {}", e.name, r.as_ref().map(|_| "ok".to_string()).unwrap_or_else(|err| err.to_string())));
                    items.push(json!({ "theory": e.name, "ok": r.is_ok() }));
                }
                Some(Entry::Map(m)) if e.expected_invalid => {
                    // these must fail, and are reported without failing the run
                    let mut sub_lines = Vec::new();
                    let mut sub_items = Vec::new();
                    match check_map(&lib, m, &mut sub_lines, &mut sub_items) {
                        Err(why) => lines.push(format!("map {}: fails as expected ({why})", e.name)),
                        Ok(()) => {
                            ok = false;
                            lines.push(format!("map {}: expected to fail, but passed", e.name));
                        }
                    }
                    items.push(json!({ "map": e.name, "expected_invalid": true, "report": sub_items.pop() }));
                }
                Some(Entry::Map(m)) => ok &= check_map(&lib, m, &mut lines, &mut items).is_ok(),
                None => {
                    let md = builtin_model(&e.name, &IndexMap::new(), &lib).map_err(check_fail)?;
                    let report = check_axioms(&md, &Enumerators::new(), Some(DEFAULT_BOUND));
                    ok &= report.ok();
                    let n = report.counterexamples().count();
                    lines.push(format!(
                        "model {}: {}",
                        e.name,
                        if n == 0 { "ok".to_string() } else { format!("{n} counterexample(s)") }
                    ));
                    if n > 0 {
                        lines.push(report.to_string());
                    }
                    items.push(json!({ "model": e.name, "ok": report.ok(), "report": report.to_json() }));
                }
            }
        }
    }

    for f in files.iter().filter(|f| f.as_os_str() != "stdlib") {
        let mut reg = base.clone();
        let added = match load_file(&mut reg, f) {
            Ok(a) => a,
            Err(Failure::Check(msg, j)) => {
                ok = false;
                lines.push(msg);
                items.push(j);
                continue;
            }
            Err(u) => return Err(u),
        };
        for name in added {
            match reg.get(&name) {
                Some(Entry::Theory(g)) => {
                    let r = g.self_check();
                    ok &= r.is_ok();
                    lines.push(format!("theory {name}: {}", r.as_ref().map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string())));
                    items.push(json!({ "theory": name, "ok": r.is_ok() }));
                }
                Some(Entry::Map(m)) => ok &= check_map(&reg, m, &mut lines, &mut items).is_ok(),
                None => {}
            }
        }
    }
    let text = lines.join("\n");
    let json = json!({ "ok": ok, "entries": items });
    if ok {
        Ok(Output { text, json })
    } else {
        Err(Failure::Check(text, json))
    }
}

fn cmd_list(reg: &Registry) -> Output {
    let index = load_stdlib().map(|(_, i)| i).unwrap_or_default();
    let mut lines = Vec::new();
    let mut items = Vec::new();
    for (name, e) in reg.entries() {
        let source = index.get(name).map(|x| x.source.as_str()).unwrap_or("loaded");
        let flag = if EXPECTED_INVALID.contains(&name) { " (expected invalid)" } else { "" };
        lines.push(format!("{:<8} {name:<24} {source}{flag}", e.kind()));
        items.push(json!({ "name": name, "kind": e.kind(), "source": source, "expected_invalid": !flag.is_empty() }));
    }
    for (name, th, params) in BUILTIN_MODELS {
        let p = if params.is_empty() { String::new() } else { format!(" [{params}]") };
        lines.push(format!("{:<8} {name:<24} builtin, of {th}{p}", "model"));
        items.push(json!({ "name": name, "kind": "model", "source": "builtin", "theory": th, "params": params }));
    }
    Output { text: lines.join("\n"), json: json!(items) }
}

fn cmd_export(reg: &Registry, name: &str, out: Option<&Path>) -> Res<Output> {
    let doc = match reg.get(name) {
        Some(Entry::Theory(g)) => theory_to_json(g),
        Some(Entry::Map(m)) => map_to_json(m),
        None => return Err(usage(format!("no theory or map called {name}"))),
    };
    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok(Output {
                text: format!("wrote {}", path.display()),
                json: json!({ "written": path.display().to_string() }),
            })
        }
        None => Ok(Output { text, json: doc }),
    }
}

fn run(cli: &Cli) -> Res<Output> {
    match &cli.command {
        Command::Check { files } => cmd_check(files, &cli.load),
        Command::Sort { theory, term } => cmd_sort(&registry(&cli.load)?, theory, term),
        Command::Apply { map, theory, term } => cmd_apply(&registry(&cli.load)?, map, theory.as_deref(), term),
        Command::Eval { model: m, eval } => {
            let reg = registry(&cli.load)?;
            cmd_eval(&model(&reg, m)?, eval)
        }
        Command::Migrate { map: name, model: m, then } => {
            let reg = registry(&cli.load)?;
            let base = model(&reg, m)?;
            let tm = map(&reg, name)?;
            let migrated = migrate_model(tm, &base).map_err(|e| {
                if base.theory().same_theory(tm.codom()) {
                    check_fail(e)
                } else {
                    usage(e)
                }
            })?;
            match then {
                Some(Then::Eval(args)) => cmd_eval(&migrated, args),
                Some(Then::Axioms(args)) => cmd_axioms(&migrated, args),
                None => Ok(Output {
                    text: format!("{}: a model of {}", migrated.name(), migrated.theory().name()),
                    json: json!({ "model": migrated.name(), "theory": migrated.theory().name() }),
                }),
            }
        }
        Command::Pushout { left, right, name, out } => {
            cmd_pushout(&registry(&cli.load)?, left, right, name, out.as_deref())
        }
        Command::Axioms { model: m, search } => {
            let reg = registry(&cli.load)?;
            cmd_axioms(&model(&reg, m)?, search)
        }
        Command::List => Ok(cmd_list(&registry(&cli.load)?)),
        Command::ExportJson { name, out } => cmd_export(&registry(&cli.load)?, name, out.as_deref()),
    }
}

/// Like `println!`, but a closed pipe (`gatkit list | head`) is not an error.
fn emit(s: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{s}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let print_json = |v: &Json| emit(&serde_json::to_string_pretty(v).expect("JSON values serialize"));
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                print_json(&out.json);
            } else if !out.text.is_empty() {
                emit(&out.text);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Check(text, j)) => {
            if cli.json {
                print_json(&json!({ "ok": false, "exit": 1, "result": j }));
            } else {
                emit(&text);
            }
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            if cli.json {
                print_json(&json!({ "ok": false, "exit": 2, "error": msg }));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(2)
        }
    }
}

