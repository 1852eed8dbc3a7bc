//! The `dlogic` command line: check theory files, expand definitions and
//! print axiom instances.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::defops::eliminate_composite;
use crate::error::Error;
use crate::kernel::{
    expand_script, generate, instantiate, instantiate_schema, Options, Skeleton, Status, Theory,
    Verdict,
};
use crate::parser::{
    parse_construct, render, render_declaration, Alphabet, AxiomKind, Bindings, DeclKind,
    Declaration,
};
use crate::stdlib::{self, Manifest};
use crate::syntax::{Construct, Mode};

/// Exit status of a successful run.
pub const OK: i32 = 0;
/// A proof, arity or tautology check failed.
pub const LOGICAL: i32 = 1;
/// Bad usage, unreadable input or a parse error.
pub const OPERATIONAL: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "dlogic",
    version,
    about = "Check theories in predicate logic with definitions"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Print the replay trace of every proof.
    #[arg(long, global = true)]
    trace: bool,
    /// Print with ASCII aliases (the default).
    #[arg(long, global = true, conflicts_with = "unicode")]
    ascii: bool,
    /// Print with Unicode symbols.
    #[arg(long, global = true)]
    unicode: bool,
    /// Atom bound of a tautology check.
    #[arg(long, global = true, default_value_t = 16, value_parser = clap::value_parser!(u16).range(1..=63))]
    max_atoms: u16,
    /// Accept theorems without proofs, and let proofs cite them.
    #[arg(long, global = true)]
    allow_asserted: bool,
    /// Directory with a manifest to load first; "" loads nothing. Defaults
    /// to $DLOGIC_STDLIB, then to the bundled library.
    #[arg(long, global = true, value_parser = clap::builder::OsStringValueParser::new())]
    stdlib: Option<OsString>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load files in order, replaying every proof. "-" reads standard input.
    Check { files: Vec<PathBuf> },
    /// Print the expansion of an abbreviation, the defining axiom of a
    /// symbol, or the primitive proof of a theorem.
    Expand {
        #[arg(long)]
        name: String,
        /// Print the result as an abbreviation declaration with this name.
        #[arg(long = "as")]
        as_name: Option<String>,
        files: Vec<PathBuf>,
    },
    /// Print an instance of a logical axiom schema, a loaded axiom schema or
    /// theorem, or the skeleton of a formula (`taut-check`).
    Axioms {
        #[arg(long)]
        schema: String,
        /// A binding name=construct; later values may mention earlier names.
        #[arg(long = "bind", value_name = "NAME=VALUE")]
        binds: Vec<String>,
        files: Vec<PathBuf>,
    },
}

struct Env<'a> {
    g: &'a Global,
    alphabet: Alphabet,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { OPERATIONAL } else { OK };
            let text = e.render().to_string();
            let _ = if code == OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let alphabet = if cli.global.unicode {
        Alphabet::Unicode
    } else {
        Alphabet::Ascii
    };
    let mut env = Env {
        g: &cli.global,
        alphabet,
        out,
        err,
    };
    let r = match &cli.command {
        Command::Check { files } => check(&mut env, files),
        Command::Expand {
            name,
            as_name,
            files,
        } => expand(&mut env, name, as_name.as_deref(), files),
        Command::Axioms {
            schema,
            binds,
            files,
        } => axioms(&mut env, schema, binds, files),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(env.err, "error: {e}");
            if e.is_logical() {
                LOGICAL
            } else {
                OPERATIONAL
            }
        }
    }
}

fn read_input(path: &Path) -> Result<(String, String), Error> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Io {
                path: "<stdin>".into(),
                msg: e.to_string(),
            })?;
        return Ok(("<stdin>".into(), s));
    }
    Ok((path.display().to_string(), stdlib::read(path)?))
}

/// The theory the input files extend: the library files before the first
/// one that is itself among the inputs.
fn base_theory(g: &Global, files: &[PathBuf]) -> Result<Theory, Error> {
    let th = Theory::new(Options {
        max_atoms: g.max_atoms as usize,
        allow_asserted: g.allow_asserted,
    });
    let dir = g
        .stdlib
        .clone()
        .or_else(|| std::env::var_os("DLOGIC_STDLIB"))
        .map(PathBuf::from);
    let names: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    match dir {
        Some(d) if d.as_os_str().is_empty() => Ok(th),
        Some(d) => {
            let (m, _) = stdlib::read_dir_manifest(&d)?;
            let m = m.prefix_before(&names);
            stdlib::load_stdlib(&th, &m, |p| stdlib::read(&d.join(p))).map(|r| r.0)
        }
        None => {
            let m = Manifest::builtin().prefix_before(&names);
            stdlib::load_stdlib(&th, &m, |p| {
                stdlib::builtin_source(p)
                    .map(str::to_string)
                    .ok_or_else(|| Error::Manifest(format!("no bundled file {p}")))
            })
            .map(|r| r.0)
        }
    }
}

#[derive(Default)]
struct Tally {
    axioms: usize,
    definitions: usize,
    proved: usize,
    rules: usize,
    asserted: usize,
}

fn check(env: &mut Env, files: &[PathBuf]) -> Result<i32, Error> {
    let mut th = base_theory(env.g, files)?;
    let mut t = Tally::default();
    for f in files {
        let (origin, text) = read_input(f)?;
        let (reports, r) = th.load_source(&text, &origin);
        for rep in &reports {
            writeln!(
                env.out,
                "{origin}:{}: {} {}: {}",
                rep.pos,
                rep.kind,
                rep.name,
                rep.verdict.word()
            )
            .ok();
            if env.g.trace || rep.verdict == Verdict::Failed {
                for line in &rep.trace {
                    writeln!(env.out, "    {line}").ok();
                }
            }
            match (rep.kind, &rep.verdict) {
                (_, Verdict::Axiom) => t.axioms += 1,
                ("primary" | "abbreviation", Verdict::Declared) => t.definitions += 1,
                (_, Verdict::Proved) => t.proved += 1,
                (_, Verdict::Rule) => t.rules += 1,
                (_, Verdict::Asserted) => t.asserted += 1,
                _ => {}
            }
        }
        th = r?;
    }
    writeln!(
        env.out,
        "{} axioms, {} definitions, {} theorems ({} proved, {} derived rules, {} asserted)",
        t.axioms,
        t.definitions,
        t.proved + t.rules + t.asserted,
        t.proved,
        t.rules,
        t.asserted
    )
    .ok();
    if t.asserted > 0 && !env.g.allow_asserted {
        writeln!(
            env.err,
            "error: {} theorems are asserted without proof; pass --allow-asserted to accept them",
            t.asserted
        )
        .ok();
        return Ok(LOGICAL);
    }
    Ok(OK)
}

fn load_all(env: &Env, files: &[PathBuf]) -> Result<Theory, Error> {
    let mut th = base_theory(env.g, files)?;
    for f in files {
        let (origin, text) = read_input(f)?;
        th = th.load_source(&text, &origin).1?;
    }
    Ok(th)
}

fn expand(
    env: &mut Env,
    name: &str,
    as_name: Option<&str>,
    files: &[PathBuf],
) -> Result<i32, Error> {
    let th = load_all(env, files)?;
    let a = env.alphabet;
    if let Some(rec) = th.theorems().get(name) {
        let Some(script) = &rec.script else {
            return Err(usage(format!("{name} has no proof to expand")));
        };
        let expanded = expand_script(&th, script)?;
        let decl = Declaration {
            kind: DeclKind::Theorem {
                name: as_name.unwrap_or(name).into(),
                premises: match &rec.status {
                    Status::Rule { premises } => premises.clone(),
                    _ => vec![],
                },
                body: rec.statement.clone(),
                proof: Some(expanded),
            },
            pos: rec.pos,
        };
        writeln!(env.out, "{}", render_declaration(&decl, a)).ok();
        return Ok(OK);
    }
    let c = if let Some(body) = th.context().abbrevs.get(name) {
        if body.mode() == Mode::D {
            eliminate_composite(body)?
        } else {
            body.clone()
        }
    } else {
        match th.defining_axiom(name, None) {
            Ok(ax) => ax.clone(),
            Err(_) => {
                return Err(usage(format!(
                    "{name} is not a loaded abbreviation, definition or theorem"
                )))
            }
        }
    };
    match as_name {
        Some(n) => writeln!(env.out, "{n} := {};", render(&c, a)).ok(),
        None => writeln!(env.out, "{}", render(&c, a)).ok(),
    };
    Ok(OK)
}

fn usage(msg: String) -> Error {
    Error::Usage(msg)
}

/// Parses `k=v` bindings in order; each value sees the earlier ones.
fn parse_bindings(
    th: &Theory,
    binds: &[String],
    mode_of: &dyn Fn(&str) -> Option<Mode>,
) -> Result<Bindings, Error> {
    let mut out: Bindings = Vec::new();
    for b in binds {
        let (k, v) = b
            .split_once('=')
            .ok_or_else(|| usage(format!("binding {b:?} is not of the form name=value")))?;
        let k = k.trim();
        let mode =
            mode_of(k).ok_or_else(|| usage(format!("{k} is not a parameter of this schema")))?;
        let c = parse_construct(v, th.context(), Some(mode))?;
        let c = if out.is_empty() {
            c
        } else {
            instantiate(&c, &out, th.vocabulary()).map_err(|e| usage(e.to_string()))?
        };
        out.push((k.into(), c));
    }
    Ok(out)
}

/// Parameter names and modes of a logical axiom schema, in argument order.
fn params(kind: AxiomKind) -> &'static [(&'static str, Mode)] {
    match kind {
        AxiomKind::Eps => &[("d", Mode::D), ("z", Mode::T)],
        AxiomKind::EDef | AxiomKind::ADef => &[("d", Mode::D)],
        AxiomKind::BEDef | AxiomKind::BADef => &[("d", Mode::D), ("P", Mode::F)],
        AxiomKind::EqRefl => &[("x", Mode::T)],
        AxiomKind::Leibniz => &[("s", Mode::T), ("t", Mode::T), ("d", Mode::D)],
        AxiomKind::IfAx => &[("P", Mode::F), ("x", Mode::T), ("y", Mode::T)],
    }
}

fn axioms(env: &mut Env, schema: &str, binds: &[String], files: &[PathBuf]) -> Result<i32, Error> {
    let th = load_all(env, files)?;
    let a = env.alphabet;
    if schema == "taut-check" {
        let b = parse_bindings(&th, binds, &|k| (k == "P").then_some(Mode::F))?;
        let [(_, p)] = b.as_slice() else {
            return Err(usage("taut-check takes one binding P=formula".into()));
        };
        let s = Skeleton::of(p);
        writeln!(env.out, "skeleton: {}", s.prop).ok();
        for (i, atom) in s.atoms.iter().enumerate() {
            writeln!(env.out, "  p{i} := {}", render(atom, a)).ok();
        }
        let v = crate::kernel::is_tautology(p, th.options().max_atoms)?;
        writeln!(
            env.out,
            "{}",
            if v { "tautology" } else { "not a tautology" }
        )
        .ok();
        return Ok(if v { OK } else { LOGICAL });
    }
    if let Some(kind) = AxiomKind::from_keyword(schema) {
        let ps = params(kind);
        let b = parse_bindings(&th, binds, &|k| {
            ps.iter().find(|(n, _)| *n == k).map(|(_, m)| *m)
        })?;
        let mut args = Vec::new();
        for (n, _) in ps {
            let c = b
                .iter()
                .find(|(k, _)| &**k == *n)
                .ok_or_else(|| usage(format!("{schema} needs a binding for {n}")))?;
            args.push(c.1.clone());
        }
        for f in generate(kind, &args).map_err(|e| usage(e.to_string()))? {
            writeln!(env.out, "{}", render(&f, a)).ok();
        }
        return Ok(OK);
    }
    let statement: Construct = if let Some(ax) = th.nonlogical_axioms().get(schema) {
        ax.clone()
    } else if let Some(t) = th.theorems().get(schema) {
        t.statement.clone()
    } else {
        return Err(usage(format!(
            "no axiom schema, axiom or theorem named {schema}"
        )));
    };
    let vocab = th.vocabulary();
    let b = parse_bindings(&th, binds, &|k| vocab.synvar(k))?;
    let inst = instantiate_schema(&statement, &b, vocab).map_err(|e| usage(e.to_string()))?;
    writeln!(env.out, "{}", render(&inst, a)).ok();
    Ok(OK)
}
