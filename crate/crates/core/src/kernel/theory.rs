//! Theories: the vocabulary and abbreviations of a language together with
//! its nonlogical axioms, defining axioms and theorems.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::proof::{replay_rule, TraceLine};
use crate::defops::{eliminate_composite, normalize_types, subst_constants};
use crate::error::{Error, Pos};
use crate::parser::{parse_declarations, Context, DeclKind, Declaration, ProofScript};
use crate::syntax::{logical, Construct, DefKind, GArity, Mode, Vocabulary};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Proved,
    /// Proved from local hypotheses: a derived rule, not a theorem.
    Rule {
        premises: Vec<Construct>,
    },
    Asserted,
}

#[derive(Clone, Debug)]
pub struct TheoremRecord {
    pub name: Arc<str>,
    pub statement: Construct,
    pub status: Status,
    pub script: Option<ProofScript>,
    pub origin: Arc<str>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct Options {
    /// Bound on the atoms of a tautology check.
    pub max_atoms: usize,
    /// Whether proofs may cite theorems that were asserted without proof.
    pub allow_asserted: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            max_atoms: 16,
            allow_asserted: false,
        }
    }
}

/// What loading one declaration did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Declared,
    Axiom,
    Proved,
    Rule,
    Asserted,
    Failed,
}

impl Verdict {
    pub fn word(&self) -> &'static str {
        match self {
            Verdict::Declared => "declared",
            Verdict::Axiom => "axiom",
            Verdict::Proved => "proved",
            Verdict::Rule => "derived rule",
            Verdict::Asserted => "asserted",
            Verdict::Failed => "FAILED",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub kind: &'static str,
    pub name: String,
    pub verdict: Verdict,
    pub pos: Pos,
    pub trace: Vec<TraceLine>,
}

/// An immutable theory snapshot. Loading a declaration returns a new one.
#[derive(Clone, Debug, Default)]
pub struct Theory {
    ctx: Context,
    nonlogical_axioms: BTreeMap<Arc<str>, Construct>,
    defining_axioms: BTreeMap<Arc<str>, Construct>,
    theorems: BTreeMap<Arc<str>, TheoremRecord>,
    theory_constants: BTreeMap<Arc<str>, Vec<Arc<str>>>,
    order: Vec<(&'static str, Arc<str>)>,
    options: Options,
}

fn kind_word(d: &DeclKind) -> &'static str {
    match d {
        DeclKind::Abbreviation { .. } => "abbreviation",
        DeclKind::Primary { .. } => "primary",
        DeclKind::SynVars { .. } => "variables",
        DeclKind::Axiom { .. } => "axiom",
        DeclKind::Theorem { .. } => "theorem",
    }
}

impl Theory {
    /// The theory of the logical symbols alone.
    pub fn new(options: Options) -> Theory {
        Theory {
            options,
            ..Theory::default()
        }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.ctx.vocab
    }

    pub fn options(&self) -> &Options {
        &self.options
    }

    pub fn with_options(&self, options: Options) -> Theory {
        Theory {
            options,
            ..self.clone()
        }
    }

    pub fn nonlogical_axioms(&self) -> &BTreeMap<Arc<str>, Construct> {
        &self.nonlogical_axioms
    }

    /// Defining axioms by internal name of the defined symbol.
    pub fn defining_axioms(&self) -> &BTreeMap<Arc<str>, Construct> {
        &self.defining_axioms
    }

    pub fn theorems(&self) -> &BTreeMap<Arc<str>, TheoremRecord> {
        &self.theorems
    }

    pub fn theory_constants(&self) -> &BTreeMap<Arc<str>, Vec<Arc<str>>> {
        &self.theory_constants
    }

    /// Declarations in load order, as (kind, name).
    pub fn order(&self) -> &[(&'static str, Arc<str>)] {
        &self.order
    }

    /// The statement of a nonlogical axiom or a theorem that proofs may cite.
    pub fn citable(&self, name: &str) -> Result<&Construct, Error> {
        if let Some(a) = self.nonlogical_axioms.get(name) {
            return Ok(a);
        }
        match self.theorems.get(name) {
            Some(t) => match &t.status {
                Status::Proved => Ok(&t.statement),
                Status::Asserted if self.options.allow_asserted => Ok(&t.statement),
                Status::Asserted => Err(Error::Proof(format!("{name} is asserted without proof"))),
                Status::Rule { .. } => Err(Error::Proof(format!(
                    "{name} is a derived rule, not a theorem"
                ))),
            },
            None => Err(Error::Proof(format!("no axiom or theorem named {name}"))),
        }
    }

    /// The defining axiom of a symbol, by internal name or by an external
    /// name that (with the arity, if given) picks one defined symbol.
    pub fn defining_axiom(&self, name: &str, arity: Option<&GArity>) -> Result<&Construct, Error> {
        if arity.is_none() {
            if let Some(a) = self.defining_axioms.get(name) {
                return Ok(a);
            }
        }
        let found: Vec<_> = self
            .ctx
            .vocab
            .candidates(name)
            .into_iter()
            .filter(|s| arity.is_none_or(|a| *a == s.arity))
            .filter_map(|s| self.defining_axioms.get(&s.internal))
            .collect();
        match found.as_slice() {
            [a] => Ok(a),
            [] => Err(Error::Proof(format!("{name} has no defining axiom"))),
            _ => Err(Error::Proof(format!(
                "{name} names several defined symbols; give the arity"
            ))),
        }
    }

    /// Loads one declaration; see [`Theory::load_reported`].
    pub fn load_declaration(&self, decl: &Declaration) -> Result<Theory, Error> {
        self.load_reported(decl, "").1
    }

    /// Loads one declaration, replaying the proof of a theorem.
    pub fn load_reported(
        &self,
        decl: &Declaration,
        origin: &str,
    ) -> (Report, Result<Theory, Error>) {
        let mut report = Report {
            kind: kind_word(&decl.kind),
            name: decl.name(),
            verdict: Verdict::Declared,
            pos: decl.pos,
            trace: vec![],
        };
        let located = |e: Error| {
            let inner = match e {
                Error::Proof(m) => Error::Proof(format!(
                    "{}: {} {}: {m}",
                    decl.pos,
                    kind_word(&decl.kind),
                    decl.name()
                )),
                e => e,
            };
            if origin.is_empty() {
                inner
            } else {
                Error::Located {
                    origin: origin.to_string(),
                    inner: Box::new(inner),
                }
            }
        };
        let mut th = self.clone();
        if let Err(e) = th.ctx.apply(decl) {
            report.verdict = Verdict::Failed;
            return (report, Err(located(e)));
        }
        th.order
            .push((report.kind, Arc::from(decl.name().as_str())));
        match &decl.kind {
            DeclKind::Abbreviation { name, body } => {
                if body.mode() == Mode::D {
                    if let Ok(e) = eliminate_composite(body) {
                        if let Some(sd) = e.as_def().filter(|sd| sd.kind == DefKind::Constants) {
                            th.theory_constants.insert(name.clone(), sd.names());
                        }
                    }
                }
            }
            DeclKind::Primary { symbol, defining } => {
                if let Some(def) = defining {
                    th.defining_axioms
                        .insert(symbol.internal.clone(), def.axiom());
                }
            }
            DeclKind::SynVars { .. } => {}
            DeclKind::Axiom { name, body } => {
                th.nonlogical_axioms.insert(name.clone(), body.clone());
                report.verdict = Verdict::Axiom;
            }
            DeclKind::Theorem {
                name,
                premises,
                body,
                proof,
            } => {
                let status = match proof {
                    None if premises.is_empty() => Status::Asserted,
                    None => {
                        report.verdict = Verdict::Failed;
                        return (
                            report,
                            Err(located(Error::Proof("a derived rule needs a proof".into()))),
                        );
                    }
                    Some(script) => {
                        // the proof sees the theory before the theorem
                        let r = replay_rule(self, premises, body, script);
                        report.trace = r.trace;
                        match r.outcome {
                            Ok(()) if premises.is_empty() => Status::Proved,
                            Ok(()) => Status::Rule {
                                premises: premises.clone(),
                            },
                            Err(e) => {
                                report.verdict = Verdict::Failed;
                                return (report, Err(located(e)));
                            }
                        }
                    }
                };
                report.verdict = match status {
                    Status::Proved => Verdict::Proved,
                    Status::Rule { .. } => Verdict::Rule,
                    Status::Asserted => Verdict::Asserted,
                };
                th.theorems.insert(
                    name.clone(),
                    TheoremRecord {
                        name: name.clone(),
                        statement: body.clone(),
                        status,
                        script: proof.clone(),
                        origin: Arc::from(origin),
                        pos: decl.pos,
                    },
                );
            }
        }
        (report, Ok(th))
    }

    /// Parses and loads a source text, stopping at the first failure.
    pub fn load_source(&self, text: &str, origin: &str) -> (Vec<Report>, Result<Theory, Error>) {
        let decls = match parse_declarations(text, &self.ctx) {
            Ok(d) => d,
            Err(e) => {
                let e = if origin.is_empty() {
                    e
                } else {
                    Error::Located {
                        origin: origin.to_string(),
                        inner: Box::new(e),
                    }
                };
                return (vec![], Err(e));
            }
        };
        let mut th = self.clone();
        let mut reports = Vec::new();
        for d in &decls {
            let (rep, r) = th.load_reported(d, origin);
            reports.push(rep);
            match r {
                Ok(t) => th = t,
                Err(e) => return (reports, Err(e)),
            }
        }
        (reports, Ok(th))
    }

    /// The formulas that `zs` must satisfy to be a model of the theory
    /// defined by the abbreviation `name`: its axioms with the constants
    /// replaced by `zs`.
    pub fn model_obligations(&self, name: &str, zs: &[Construct]) -> Result<Vec<Construct>, Error> {
        let cs = self
            .theory_constants
            .get(name)
            .ok_or_else(|| Error::Proof(format!("{name} does not define a theory")))?;
        if cs.len() != zs.len() {
            return Err(Error::Definition(format!(
                "{name} has {} constants, got {} components",
                cs.len(),
                zs.len()
            )));
        }
        let body = &self.ctx.abbrevs[name];
        let d = normalize_types(&eliminate_composite(body)?)?;
        let sd = d.as_def().expect("eliminated theory definition");
        let mut parts = Vec::new();
        conjuncts(&sd.body, &mut parts);
        parts.iter().map(|a| subst_constants(a, cs, zs)).collect()
    }
}

fn conjuncts(p: &Construct, out: &mut Vec<Construct>) {
    if p.is_app_of(logical::AND) {
        let (_, a) = p.as_app().expect("application");
        conjuncts(&a[0], out);
        conjuncts(&a[1], out);
    } else if !p.is_app_of(logical::TRUE) {
        out.push(p.clone());
    }
}
