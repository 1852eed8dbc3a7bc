//! Recursive-descent parser with precedence climbing.
//!
//! Levels, weakest first: `≡` 1, `→` 2 (right associative), `∨` 3, `&` 4,
//! prefix `~` 5, relations 6, term and definition operators 7, other prefix
//! operators 8, atoms and postfix forms 9. The level of an infix symbol is
//! taken from the candidates that accept the left operand's mode.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::decl::{AxiomKind, Bindings, DeclKind, Declaration, Defining, Just, ProofScript, Step};
use super::lexer::{tokenize, TokKind, Token};
use super::render::{infix_level, right_assoc, PREFIX_LEVEL, PREFIX_NOT_LEVEL};
use super::Context;
use crate::error::{Error, Pos};
use crate::syntax::scope::{d_name_arities, free_names, free_vars};
use crate::syntax::{
    logical, Binder, Construct, DefKind, GArity, Mode, Node, Ref, SimpleDef, Symbol,
};

/// Parses a single construct. With `expected`, the result must have that mode.
pub fn parse_construct(
    text: &str,
    ctx: &Context,
    expected: Option<Mode>,
) -> Result<Construct, Error> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(&toks, ctx);
    let c = p.expr(1)?;
    if let Some(t) = p.peek() {
        return Err(Error::parse(
            t.pos,
            format!("unexpected {:?} after construct", t.text),
        ));
    }
    check_mode(&c, expected, p.end_pos())?;
    Ok(c)
}

/// Parses a construct with some names already bound, as inside a definition.
pub fn parse_construct_in(
    text: &str,
    ctx: &Context,
    bound: &[(Arc<str>, GArity)],
    expected: Option<Mode>,
) -> Result<Construct, Error> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(&toks, ctx);
    p.scope.extend(bound.iter().cloned());
    let c = p.expr(1)?;
    if let Some(t) = p.peek() {
        return Err(Error::parse(
            t.pos,
            format!("unexpected {:?} after construct", t.text),
        ));
    }
    check_mode(&c, expected, p.end_pos())?;
    Ok(c)
}

fn check_mode(c: &Construct, expected: Option<Mode>, pos: Pos) -> Result<(), Error> {
    match expected {
        Some(m) if c.mode() != m => Err(Error::parse(
            pos,
            format!("expected a construct of mode {m}, found mode {}", c.mode()),
        )),
        _ => Ok(()),
    }
}

/// Parses a sequence of declarations. Names introduced by earlier
/// declarations are visible to later ones; `ctx` is not modified.
pub fn parse_declarations(text: &str, ctx: &Context) -> Result<Vec<Declaration>, Error> {
    let toks = tokenize(text)?;
    let mut ctx = ctx.clone();
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let (d, next) = {
            let mut p = Parser::new(&toks, &ctx);
            p.pos = i;
            let d = p.declaration()?;
            (d, p.pos)
        };
        ctx.apply(&d).map_err(|e| at(d.pos, e))?;
        out.push(d);
        i = next;
    }
    Ok(out)
}

fn at(pos: Pos, e: Error) -> Error {
    match e {
        Error::Lex { .. }
        | Error::Parse { .. }
        | Error::Unresolved { .. }
        | Error::Ambiguous { .. }
        | Error::Arity { .. } => e,
        Error::ModeMismatch { .. }
        | Error::ArityMismatch { .. }
        | Error::DuplicateBinder(_)
        | Error::Definition(_) => Error::Arity {
            pos,
            msg: e.to_string(),
        },
        other => Error::Parse {
            pos,
            msg: other.to_string(),
        },
    }
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    ctx: &'a Context,
    /// Bound names, innermost last.
    scope: Vec<(Arc<str>, GArity)>,
    /// The abbreviation being defined.
    forbidden: Option<Arc<str>>,
    /// Preferred candidate while parsing a defining axiom.
    prefer: Option<Arc<str>>,
}

type R<T> = Result<T, Error>;

impl<'a> Parser<'a> {
    fn new(toks: &'a [Token], ctx: &'a Context) -> Parser<'a> {
        Parser {
            toks,
            pos: 0,
            ctx,
            scope: Vec::new(),
            forbidden: None,
            prefer: None,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + k)
    }

    fn here(&self) -> Pos {
        self.peek().map(|t| t.pos).unwrap_or_else(|| self.end_pos())
    }

    fn end_pos(&self) -> Pos {
        self.toks.last().map(|t| t.pos).unwrap_or_default()
    }

    fn bump(&mut self) -> R<&'a Token> {
        let t = self
            .toks
            .get(self.pos)
            .ok_or_else(|| Error::parse(self.end_pos(), "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> R<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            let found = self
                .peek()
                .map(|t| format!("{:?}", t.text))
                .unwrap_or_else(|| "end of input".into());
            Err(Error::parse(
                self.here(),
                format!("expected {p:?}, found {found}"),
            ))
        }
    }

    fn at_op(&self, op: &str) -> bool {
        self.peek().is_some_and(|t| t.is(TokKind::Op, op))
    }

    fn at_ident(&self, word: &str) -> bool {
        self.peek().is_some_and(|t| t.is(TokKind::Ident, word))
    }

    fn fail<T>(&self, msg: impl Into<String>) -> R<T> {
        Err(Error::parse(self.here(), msg))
    }

    fn starts_expr(t: Option<&Token>) -> bool {
        match t {
            None => false,
            Some(t) => match t.kind {
                TokKind::Ident | TokKind::Bracketed | TokKind::Op => true,
                TokKind::Punct => matches!(t.text.as_str(), "(" | "[" | "{"),
                _ => false,
            },
        }
    }

    // ---- name resolution ----

    fn bound(&self, name: &str) -> Option<&GArity> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| &**n == name)
            .map(|(_, a)| a)
    }

    fn pick<'s>(&self, name: &str, pos: Pos, cands: Vec<&'s Symbol>) -> R<Option<&'s Symbol>> {
        match cands.len() {
            0 => Ok(None),
            1 => Ok(Some(cands[0])),
            _ => {
                if let Some(p) = &self.prefer {
                    if let Some(s) = cands.iter().find(|s| s.internal == *p) {
                        return Ok(Some(s));
                    }
                }
                Err(Error::Ambiguous {
                    pos,
                    name: name.to_string(),
                    candidates: cands
                        .iter()
                        .map(|s| format!("{} : {}", s.internal, s.arity))
                        .collect::<Vec<_>>()
                        .join(", "),
                })
            }
        }
    }

    /// A name in value position (no arguments).
    fn value(&self, name: &str, pos: Pos, ident: bool) -> R<Construct> {
        if let Some(ar) = self.bound(name) {
            return Ok(Construct::reference(Ref::var(name, ar.clone())));
        }
        if self.forbidden.as_deref() == Some(name) {
            return Err(Error::parse(
                pos,
                format!("abbreviation {name} refers to itself"),
            ));
        }
        if let Some(b) = self.ctx.abbrevs.get(name) {
            return Ok(b.clone());
        }
        if let Some(m) = self.ctx.vocab.synvar(name) {
            return Ok(Construct::var(name, m));
        }
        let cands = self.ctx.vocab.candidates(name);
        let nullary: Vec<&Symbol> = cands
            .iter()
            .copied()
            .filter(|s| s.arity.is_nullary())
            .collect();
        if let Some(s) = self.pick(name, pos, nullary)? {
            return Ok(Construct::reference(s.to_ref()));
        }
        if let Some(s) = self.pick(name, pos, cands)? {
            return Ok(Construct::reference(s.to_ref()));
        }
        if ident {
            Ok(Construct::var(name, Mode::T))
        } else {
            Err(Error::Unresolved {
                pos,
                name: name.to_string(),
            })
        }
    }

    /// Heads able to take arguments of the given modes; a bound operation
    /// shadows primary symbols.
    fn heads(&self, name: &str, modes: &[Mode]) -> Vec<Ref> {
        if let Some(ar) = self.bound(name) {
            if ar.args() == modes {
                return vec![Ref::var(name, ar.clone())];
            }
        }
        self.ctx
            .vocab
            .candidates(name)
            .into_iter()
            .filter(|s| s.arity.args() == modes)
            .map(Symbol::to_ref)
            .collect()
    }

    /// Candidate arities taking `n` arguments, the first of mode `first`.
    fn arities(&self, name: &str, n: usize, first: Option<Mode>) -> Vec<GArity> {
        let ok =
            |a: &GArity| a.arg_count() == n && first.is_none_or(|m| a.args().first() == Some(&m));
        let mut out = Vec::new();
        if let Some(ar) = self.bound(name) {
            if ok(ar) {
                out.push(ar.clone());
            }
        }
        for s in self.ctx.vocab.candidates(name) {
            if ok(&s.arity) {
                out.push(s.arity.clone());
            }
        }
        out
    }

    fn has_heads_with_args(&self, name: &str) -> bool {
        self.bound(name).is_some_and(|a| !a.is_nullary())
            || self
                .ctx
                .vocab
                .candidates(name)
                .iter()
                .any(|s| !s.arity.is_nullary())
    }

    fn apply(&self, name: &str, pos: Pos, args: Vec<Construct>) -> R<Construct> {
        let modes: Vec<Mode> = args.iter().map(|a| a.mode()).collect();
        let heads = self.heads(name, &modes);
        let head = if heads.len() > 1 && heads[0].is_var() {
            heads[0].clone()
        } else {
            let syms: Vec<Symbol> = heads
                .iter()
                .map(|r| Symbol {
                    internal: r.internal.clone(),
                    external: r.external.clone(),
                    arity: r.arity.clone(),
                })
                .collect();
            match self.pick(name, pos, syms.iter().collect())? {
                Some(s) => s.to_ref(),
                None => {
                    return Err(Error::parse(
                        pos,
                        format!(
                            "no reading of {name} takes arguments of modes {}",
                            modes.iter().map(|m| m.letter()).collect::<String>()
                        ),
                    ))
                }
            }
        };
        Construct::app(head, args).map_err(|e| at(pos, e))
    }

    fn with_names<T>(
        &mut self,
        names: Vec<(Arc<str>, GArity)>,
        f: impl FnOnce(&mut Self) -> R<T>,
    ) -> R<T> {
        let n = self.scope.len();
        self.scope.extend(names);
        let r = f(self);
        self.scope.truncate(n);
        r
    }

    // ---- expressions ----

    fn expr(&mut self, min: u8) -> R<Construct> {
        let mut left = self.prefix()?;
        while let Some(t) = self.peek() {
            if t.kind != TokKind::Op || t.text == "{}" {
                break;
            }
            let name = t.text.clone();
            let ars = self.arities(&name, 2, Some(left.mode()));
            if ars.is_empty() {
                break;
            }
            let levels: BTreeSet<u8> = ars.iter().map(|a| infix_level(&name, a.result())).collect();
            if levels.len() > 1 {
                return self.fail(format!(
                    "operator {name} has readings at different precedence levels"
                ));
            }
            let level = *levels.iter().next().expect("non-empty");
            if level < min {
                break;
            }
            let pos = t.pos;
            self.pos += 1;
            let rmin = if right_assoc(&name) { level } else { level + 1 };
            let names = if left.mode() == Mode::D {
                d_name_arities(&left)
            } else {
                vec![]
            };
            let right = self.with_names(names, |p| p.expr(rmin))?;
            left = self.apply(&name, pos, vec![left, right])?;
        }
        Ok(left)
    }

    fn prefix(&mut self) -> R<Construct> {
        let t = self
            .peek()
            .ok_or_else(|| Error::parse(self.end_pos(), "unexpected end of input"))?;
        if t.kind == TokKind::Op && t.text != "{}" {
            let name = t.text.clone();
            let pos = t.pos;
            let unary = !self.arities(&name, 1, None).is_empty();
            if unary && Self::starts_expr(self.peek_at(1)) {
                self.pos += 1;
                let lvl = if name == "~" {
                    PREFIX_NOT_LEVEL
                } else {
                    PREFIX_LEVEL
                };
                let arg = self.expr(lvl)?;
                return self.apply(&name, pos, vec![arg]);
            }
            self.pos += 1;
            let v = self.value(&name, pos, false)?;
            return self.postfix(v);
        }
        let atom = self.atom()?;
        self.postfix(atom)
    }

    fn atom(&mut self) -> R<Construct> {
        let t = self.bump()?;
        let pos = t.pos;
        match t.kind {
            TokKind::Ident => {
                let name = t.text.clone();
                if self.at_punct(":") {
                    self.pos += 1;
                    let b = self.binder_tail(&name)?;
                    return Construct::simple_def(SimpleDef {
                        kind: DefKind::Variables,
                        binders: vec![b],
                        body: truth(),
                    })
                    .map_err(|e| at(pos, e));
                }
                if self.at_punct("(") && self.has_heads_with_args(&name) {
                    self.pos += 1;
                    let first = self.try_bare_def("|")?;
                    let args = self.args(")", first.into_iter().collect())?;
                    let modes: Vec<Mode> = args.iter().map(|a| a.mode()).collect();
                    if !self.heads(&name, &modes).is_empty() {
                        return self.apply(&name, pos, args);
                    }
                    let v = self.value(&name, pos, true)?;
                    if v.mode() == Mode::D {
                        return self.def_call(v, args, pos);
                    }
                    return self.apply(&name, pos, args);
                }
                self.value(&name, pos, true)
            }
            TokKind::Op => {
                // only `{}` reaches here
                if self.ctx.vocab.has_external("{}") || self.ctx.abbrevs.contains_key("{}") {
                    self.value("{}", pos, false)
                } else {
                    Ok(Construct::set_term(vec![])?)
                }
            }
            TokKind::Bracketed => {
                let name = t.text.clone();
                match name.as_str() {
                    "def[" => self.def_form(DefKind::Constants, pos),
                    "dev[" => self.def_form(DefKind::Variables, pos),
                    _ => {
                        let first = self.try_bare_def("|")?;
                        let args = self.args("]", first.into_iter().collect())?;
                        self.apply(&name, pos, args)
                    }
                }
            }
            TokKind::Punct => match t.text.as_str() {
                "(" => {
                    if let Some(d) = self.try_bare_def("|")? {
                        self.expect_punct(")")?;
                        return Ok(d);
                    }
                    let args = self.args(")", vec![])?;
                    match args.len() {
                        1 => Ok(args.into_iter().next().expect("one")),
                        2 if args.iter().all(|a| a.mode() == Mode::T)
                            && self.ctx.vocab.has_external("OP") =>
                        {
                            self.apply("OP", pos, args)
                        }
                        _ => Err(Error::parse(
                            pos,
                            "a parenthesized list needs the pair symbol OP",
                        )),
                    }
                }
                "[" => {
                    let args = self.args("]", vec![])?;
                    if args.len() == 1 && args[0].mode() == Mode::D {
                        return Construct::bracket_def(args.into_iter().next().expect("one"));
                    }
                    Construct::tuple(args).map_err(|e| at(pos, e))
                }
                "{" => {
                    let first = self.try_bare_def("|")?;
                    let args = self.args("}", first.into_iter().collect())?;
                    let modes: Vec<Mode> = args.iter().map(|a| a.mode()).collect();
                    if !self.heads("{", &modes).is_empty() {
                        return self.apply("{", pos, args);
                    }
                    Construct::set_term(args).map_err(|e| at(pos, e))
                }
                other => Err(Error::parse(pos, format!("unexpected {other:?}"))),
            },
            TokKind::Num | TokKind::Str => {
                Err(Error::parse(pos, format!("unexpected {:?}", t.text)))
            }
        }
    }

    /// Comma-separated constructs up to `close`. When the first is a
    /// definition, its names are in scope for the rest.
    fn args(&mut self, close: &str, mut out: Vec<Construct>) -> R<Vec<Construct>> {
        if out.is_empty() {
            if self.eat_punct(close) {
                return Ok(out);
            }
            out.push(self.expr(1)?);
        }
        let names = if out[0].mode() == Mode::D {
            d_name_arities(&out[0])
        } else {
            vec![]
        };
        self.with_names(names, |p| {
            while p.eat_punct(",") {
                out.push(p.expr(1)?);
            }
            p.expect_punct(close)?;
            Ok(out)
        })
    }

    fn postfix(&mut self, mut c: Construct) -> R<Construct> {
        loop {
            if c.mode() == Mode::D && self.at_punct("(") {
                let pos = self.here();
                self.pos += 1;
                let names = d_name_arities(&c);
                let args = self.with_names(names, |p| p.args(")", vec![]))?;
                c = self.def_call(c, args, pos)?;
                continue;
            }
            if c.mode() == Mode::T
                && self.at_punct(".")
                && self.peek_at(1).is_some_and(|t| t.kind == TokKind::Ident)
            {
                self.pos += 1;
                let field = self.bump()?.text.clone();
                let mode = match self.ctx.abbrevs.get(field.as_str()) {
                    Some(b) if b.mode() != Mode::D => b.mode(),
                    _ => self
                        .ctx
                        .vocab
                        .synvar(&field)
                        .filter(|m| *m != Mode::D)
                        .unwrap_or(Mode::T),
                };
                c = Construct::dot(c, &field, mode)?;
                continue;
            }
            return Ok(c);
        }
    }

    /// `d(z)`, `d(z, x)`, `d(p, z)` and `d(z, d1)`.
    fn def_call(&self, d: Construct, args: Vec<Construct>, pos: Pos) -> R<Construct> {
        let modes: Vec<Mode> = args.iter().map(|a| a.mode()).collect();
        let mut it = args.into_iter();
        let r = match modes.as_slice() {
            [Mode::T] => Construct::model_assert(d, it.next().expect("arg")),
            [Mode::T, Mode::T] | [Mode::T, Mode::F] => {
                let z = it.next().expect("arg");
                Construct::def_apply(d, z, it.next().expect("arg"))
            }
            [Mode::F, Mode::T] => {
                let p = it.next().expect("arg");
                Construct::def_apply(d, it.next().expect("arg"), p)
            }
            [Mode::T, Mode::D] => {
                let z = it.next().expect("arg");
                let rep = self
                    .ctx
                    .vocab
                    .get(logical::REP)
                    .expect("Rep is logical")
                    .to_ref();
                Construct::app(rep, vec![d, z, it.next().expect("arg")])
            }
            _ => {
                return Err(Error::parse(
                    pos,
                    format!(
                        "a definition cannot be applied to arguments of modes {}",
                        modes.iter().map(|m| m.letter()).collect::<String>()
                    ),
                ))
            }
        };
        r.map_err(|e| at(pos, e))
    }

    /// After `name :`: an arity annotation or a type.
    fn binder_tail(&mut self, name: &str) -> R<Binder> {
        if let Some(t) = self.peek() {
            if t.kind == TokKind::Str {
                let ar: GArity = t.text.parse().map_err(|e| at(t.pos, e))?;
                self.pos += 1;
                return Ok(Binder {
                    name: Arc::from(name),
                    arity: ar,
                    ty: None,
                });
            }
        }
        let ty = self.expr(7)?;
        Ok(Binder::typed(name, ty))
    }

    /// Binders up to (and excluding) one of `ends`; the binders are left in
    /// scope.
    fn binder_list(&mut self, ends: &[&str]) -> R<Vec<Binder>> {
        let mut binders = Vec::new();
        loop {
            let t = self.bump()?;
            let name = match t.kind {
                TokKind::Ident | TokKind::Op => t.text.clone(),
                TokKind::Punct if t.text == "{" && self.at_punct("}") => {
                    return Err(Error::parse(t.pos, "expected a name"));
                }
                _ => {
                    return Err(Error::parse(
                        t.pos,
                        format!("expected a name, found {:?}", t.text),
                    ))
                }
            };
            let b = if self.eat_punct(":") {
                self.binder_tail(&name)?
            } else {
                Binder::plain(&name)
            };
            self.scope.push((b.name.clone(), b.arity.clone()));
            binders.push(b);
            if self.eat_punct(",") {
                continue;
            }
            if ends.iter().any(|e| self.at_punct(e)) {
                return Ok(binders);
            }
            return self.fail("expected \",\" or the end of the name list");
        }
    }

    /// Tries `x1, …, xk | P`; restores the position when the tokens do not
    /// have that shape.
    fn try_bare_def(&mut self, bar: &str) -> R<Option<Construct>> {
        let save = self.pos;
        let depth = self.scope.len();
        let shape = match self.peek() {
            Some(t) => matches!(t.kind, TokKind::Ident | TokKind::Op) && t.text != "{}",
            None => false,
        };
        if !shape {
            return Ok(None);
        }
        let binders = match self.binder_list(&[bar]) {
            Ok(b) => b,
            Err(_) => {
                self.pos = save;
                self.scope.truncate(depth);
                return Ok(None);
            }
        };
        let pos = self.here();
        self.expect_punct(bar)?;
        let body = self.expr(1);
        self.scope.truncate(depth);
        let body = body?;
        Construct::simple_def(SimpleDef {
            kind: DefKind::Variables,
            binders,
            body,
        })
        .map(Some)
        .map_err(|e| at(pos, e))
    }

    /// After `def[` or `dev[`.
    fn def_form(&mut self, kind: DefKind, pos: Pos) -> R<Construct> {
        let depth = self.scope.len();
        let r = (|| {
            let binders = self.binder_list(&[";", "]"])?;
            let body = if self.eat_punct(";") {
                self.expr(1)?
            } else {
                truth()
            };
            self.expect_punct("]")?;
            Ok((binders, body))
        })();
        self.scope.truncate(depth);
        let (binders, body) = r?;
        Construct::simple_def(SimpleDef {
            kind,
            binders,
            body,
        })
        .map_err(|e| at(pos, e))
    }

    // ---- declarations ----

    fn declaration(&mut self) -> R<Declaration> {
        let t = self.peek().expect("caller checks for input");
        let pos = t.pos;
        let kind = if t.is(TokKind::Bracketed, "def[") {
            self.pos += 1;
            self.primary_decl()?
        } else if t.is(TokKind::Ident, "Axiom") || t.is(TokKind::Ident, "Theorem") {
            let is_axiom = t.text == "Axiom";
            self.pos += 1;
            let name = self.ident()?;
            self.expect_punct(":=")?;
            let mut body = self.expr(1)?;
            let mut premises = Vec::new();
            if !is_axiom && (self.at_punct(",") || self.at_op("⊢")) {
                premises.push(body);
                while self.eat_punct(",") {
                    premises.push(self.expr(1)?);
                }
                if !self.at_op("⊢") {
                    return self.fail("expected \"|-\" after the premises");
                }
                self.pos += 1;
                body = self.expr(1)?;
            }
            for f in premises.iter().chain([&body]) {
                check_mode(f, Some(Mode::F), pos)?;
                self.check_closed(f, pos)?;
            }
            if is_axiom {
                DeclKind::Axiom { name, body }
            } else {
                let proof = if self.at_ident("proof") {
                    self.pos += 1;
                    Some(self.proof()?)
                } else {
                    None
                };
                DeclKind::Theorem {
                    name,
                    premises,
                    body,
                    proof,
                }
            }
        } else if t.kind == TokKind::Ident && self.peek_at(1).is_some_and(|t| t.is_punct(":=")) {
            let name: Arc<str> = Arc::from(t.text.as_str());
            self.pos += 2;
            self.forbidden = Some(name.clone());
            let body = self.expr(1);
            self.forbidden = None;
            DeclKind::Abbreviation { name, body: body? }
        } else if t.kind == TokKind::Ident {
            let mut names = vec![self.ident()?];
            while self.eat_punct(",") {
                names.push(self.ident()?);
            }
            self.expect_punct(":")?;
            let ar = self.arity()?;
            if !ar.is_nullary() {
                return Err(Error::parse(
                    pos,
                    "syntactic variables take a one-letter arity",
                ));
            }
            DeclKind::SynVars {
                names,
                mode: ar.result(),
            }
        } else {
            return self.fail(format!("expected a declaration, found {:?}", t.text));
        };
        self.expect_punct(";")?;
        Ok(Declaration { kind, pos })
    }

    fn ident(&mut self) -> R<Arc<str>> {
        let t = self.bump()?;
        if t.kind != TokKind::Ident {
            return Err(Error::parse(
                t.pos,
                format!("expected an identifier, found {:?}", t.text),
            ));
        }
        Ok(Arc::from(t.text.as_str()))
    }

    fn arity(&mut self) -> R<GArity> {
        let t = self.bump()?;
        match t.kind {
            TokKind::Str | TokKind::Ident => t.text.parse().map_err(|e| at(t.pos, e)),
            _ => Err(Error::parse(
                t.pos,
                format!("expected an arity, found {:?}", t.text),
            )),
        }
    }

    fn check_closed(&self, c: &Construct, pos: Pos) -> R<()> {
        let open: Vec<String> = free_vars(c)
            .into_iter()
            .filter(|v| self.ctx.vocab.synvar(v).is_none())
            .map(|v| v.to_string())
            .collect();
        if open.is_empty() {
            Ok(())
        } else {
            Err(Error::parse(
                pos,
                format!(
                    "free names that are not declared variables: {}",
                    open.join(", ")
                ),
            ))
        }
    }

    /// After `def[`: `N : A ]` or `N : A ; lhs = rhs ]`.
    fn primary_decl(&mut self) -> R<DeclKind> {
        let t = self.bump()?;
        let external = match t.kind {
            TokKind::Ident | TokKind::Op | TokKind::Bracketed => t.text.clone(),
            TokKind::Punct if t.text == "{" => "{".to_string(),
            _ => {
                return Err(Error::parse(
                    t.pos,
                    format!("expected a name, found {:?}", t.text),
                ))
            }
        };
        self.expect_punct(":")?;
        let arity = self.arity()?;
        let mut vocab = self.ctx.vocab.clone();
        let symbol = vocab
            .declare(&external, arity.clone())
            .map_err(|e| at(t.pos, e))?;
        if self.eat_punct("]") {
            return Ok(DeclKind::Primary {
                symbol,
                defining: None,
            });
        }
        self.expect_punct(";")?;
        let pos = self.here();
        let ctx = Context {
            vocab,
            abbrevs: self.ctx.abbrevs.clone(),
        };
        let mut sub = Parser::new(self.toks, &ctx);
        sub.pos = self.pos;
        sub.prefer = Some(symbol.internal.clone());
        let (lhs, rhs) = match arity.result() {
            Mode::T => {
                let l = sub.expr(7)?;
                if !sub.peek().is_some_and(|t| t.is(TokKind::Op, "=")) {
                    return sub.fail("expected \"=\" in the defining axiom");
                }
                sub.pos += 1;
                (l, sub.expr(1)?)
            }
            Mode::F => {
                let l = sub.expr(2)?;
                if !sub.peek().is_some_and(|t| t.is(TokKind::Op, "≡")) {
                    return sub.fail("expected \"≡\" in the defining axiom");
                }
                sub.pos += 1;
                (l, sub.expr(1)?)
            }
            Mode::D => return sub.fail("definition symbols cannot have a defining axiom"),
        };
        sub.expect_punct("]")?;
        self.pos = sub.pos;
        let params = defining_params(&lhs, &symbol).map_err(|m| Error::parse(pos, m))?;
        let rhs_free = free_names(&rhs);
        if rhs_free.contains(&symbol.internal) {
            return Err(Error::parse(
                pos,
                format!("{external} occurs in its own defining axiom"),
            ));
        }
        let stray: Vec<String> = free_vars(&rhs)
            .into_iter()
            .filter(|v| !params.contains(v))
            .map(|v| v.to_string())
            .collect();
        if !stray.is_empty() {
            return Err(Error::parse(
                pos,
                format!(
                    "free names of the defining axiom must be among the arguments: {}",
                    stray.join(", ")
                ),
            ));
        }
        if rhs.mode() != lhs.mode() {
            return Err(Error::parse(
                pos,
                "the two sides of a defining axiom differ in mode",
            ));
        }
        Ok(DeclKind::Primary {
            symbol,
            defining: Some(Defining { lhs, rhs, params }),
        })
    }

    // ---- proofs ----

    fn proof(&mut self) -> R<ProofScript> {
        let mut steps = Vec::new();
        while !self.at_ident("qed") {
            let t = self.bump()?;
            if t.kind != TokKind::Num {
                return Err(Error::parse(
                    t.pos,
                    format!("expected a step number, found {:?}", t.text),
                ));
            }
            let index: usize = t
                .text
                .parse()
                .map_err(|_| Error::parse(t.pos, "step number too large"))?;
            let pos = t.pos;
            self.expect_punct(".")?;
            let formula = self.expr(1)?;
            check_mode(&formula, Some(Mode::F), pos)?;
            if !self.at_ident("by") {
                return self.fail("expected \"by\"");
            }
            self.pos += 1;
            let just = self.justification()?;
            self.expect_punct(";")?;
            steps.push(Step {
                index,
                formula,
                just,
                pos,
            });
        }
        self.pos += 1;
        Ok(ProofScript { steps })
    }

    fn number(&mut self) -> R<usize> {
        let t = self.bump()?;
        if t.kind != TokKind::Num {
            return Err(Error::parse(
                t.pos,
                format!("expected a step number, found {:?}", t.text),
            ));
        }
        t.text
            .parse()
            .map_err(|_| Error::parse(t.pos, "step number too large"))
    }

    fn bindings(&mut self) -> R<Bindings> {
        let mut out = Vec::new();
        loop {
            let t = self.bump()?;
            if !matches!(t.kind, TokKind::Ident | TokKind::Op) {
                return Err(Error::parse(t.pos, "expected a variable name"));
            }
            let name: Arc<str> = Arc::from(t.text.as_str());
            self.expect_punct(":=")?;
            out.push((name, self.expr(1)?));
            if !self.eat_punct(",") {
                return Ok(out);
            }
        }
    }

    fn justification(&mut self) -> R<Just> {
        let t = self.bump()?;
        if t.kind != TokKind::Ident {
            return Err(Error::parse(
                t.pos,
                format!("expected a justification, found {:?}", t.text),
            ));
        }
        let word = t.text.as_str();
        let pos = t.pos;
        let open = self.eat_punct("(");
        let just = match word {
            "given" => Just::Given,
            "taut" => {
                let mut refs = Vec::new();
                let mut extra = Vec::new();
                if open && !self.at_punct(")") && !self.at_punct(";") {
                    refs.push(self.number()?);
                    while self.eat_punct(",") {
                        refs.push(self.number()?);
                    }
                }
                if open && self.eat_punct(";") {
                    loop {
                        let p = self.here();
                        let j = self.justification()?;
                        if !matches!(
                            j,
                            Just::Axiom(..) | Just::Thm(_) | Just::Defax(..) | Just::Schema(..)
                        ) {
                            return Err(Error::parse(
                                p,
                                "only axiom, theorem and schema instances may be cited here",
                            ));
                        }
                        extra.push(j);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                }
                Just::Taut(refs, extra)
            }
            "mp" | "subst" => {
                let i = self.number()?;
                self.expect_punct(",")?;
                let j = self.number()?;
                if word == "mp" {
                    Just::Mp(i, j)
                } else {
                    Just::Subst(i, j)
                }
            }
            "alpha" => Just::Alpha(self.number()?),
            "beta" => Just::Beta(self.number()?),
            "gammap" => Just::GammaP(self.number()?),
            "unfold" => Just::Unfold(self.number()?),
            "gamma" => {
                let i = self.number()?;
                let d = if self.eat_punct(",") {
                    Some(self.expr(1)?)
                } else {
                    None
                };
                Just::Gamma(i, d)
            }
            "thm" => {
                let t = self.bump()?;
                Just::Thm(Arc::from(t.text.as_str()))
            }
            "defax" => {
                let t = self.bump()?;
                let n: Arc<str> = Arc::from(t.text.as_str());
                let mut ar = None;
                if self.eat_punct(":") {
                    let s = self.bump()?;
                    if s.kind != TokKind::Str {
                        return Err(Error::parse(s.pos, "expected an arity string"));
                    }
                    ar = Some(
                        s.text
                            .parse::<GArity>()
                            .map_err(|e| Error::parse(s.pos, e.to_string()))?,
                    );
                }
                let b = if self.eat_punct(";") {
                    self.bindings()?
                } else {
                    Vec::new()
                };
                Just::Defax(n, ar, b)
            }
            "schema" => {
                let t = self.bump()?;
                let n: Arc<str> = Arc::from(t.text.as_str());
                self.expect_punct(";")?;
                Just::Schema(n, self.bindings()?)
            }
            "inst" => {
                let i = self.number()?;
                self.expect_punct(";")?;
                Just::Inst(i, self.bindings()?)
            }
            other => match AxiomKind::from_keyword(other) {
                Some(k) => {
                    let mut args = Vec::new();
                    if open && !self.at_punct(")") {
                        args.push(self.expr(1)?);
                        while self.eat_punct(",") {
                            args.push(self.expr(1)?);
                        }
                    }
                    Just::Axiom(k, args)
                }
                None => return Err(Error::parse(pos, format!("unknown justification {other}"))),
            },
        };
        if open {
            self.expect_punct(")")?;
        } else if !matches!(just, Just::Given | Just::Taut(..) | Just::Axiom(..)) {
            return Err(Error::parse(pos, format!("{word} needs arguments")));
        }
        Ok(just)
    }
}

fn truth() -> Construct {
    Construct::reference(Ref::primary(
        logical::TRUE,
        logical::TRUE,
        GArity::single(Mode::F),
    ))
}

/// Checks that a defining-axiom left side is `N` or `N(v1, …, vk)` with
/// distinct variables, and returns the variables.
fn defining_params(lhs: &Construct, sym: &Symbol) -> Result<Vec<Arc<str>>, String> {
    let shape = || {
        format!(
            "the left side must be {} applied to distinct variables",
            sym.external
        )
    };
    match lhs.node() {
        Node::Ref(r) if r.internal == sym.internal => Ok(vec![]),
        Node::App { head, args } if head.internal == sym.internal && !head.is_var() => {
            let mut out: Vec<Arc<str>> = Vec::new();
            for a in args {
                match a.as_ref() {
                    Some(r) if r.is_var() && !out.contains(&r.internal) => {
                        out.push(r.internal.clone())
                    }
                    _ => return Err(shape()),
                }
            }
            Ok(out)
        }
        _ => Err(shape()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::render::{render_ascii, render_unicode};
    use crate::syntax::alpha_eq;

    fn zfc_ctx() -> Context {
        let src = r#"
            a, b, x, y, z, A, B : T; d : D; P, Q : F;
            def[∈ : "TTF"];
            def[⊆ : "TTF"; a ⊆ b ≡ A[x:a, x ∈ b]];
            def[{ : "TTT"; {x, y} = H[z | A[u | u ∈ z ≡ u = x ∨ u = y]]];
            def[{ : "DT"; {d} = H[z | A[x | x ∈ z ≡ d(x)]]];
            def[∩ : "TTT"; A ∩ B = {x:A & x ∈ B}];
        "#;
        let mut ctx = Context::logical();
        for d in parse_declarations(src, &ctx).unwrap() {
            ctx.apply(&d).unwrap();
        }
        ctx
    }

    #[test]
    fn two_binder_definition() {
        let c = parse_construct("(x, y | x = y)", &Context::logical(), Some(Mode::D)).unwrap();
        let d = c.as_def().unwrap();
        assert_eq!(d.names(), vec![Arc::from("x"), Arc::from("y")]);
    }

    #[test]
    fn union_term() {
        let ctx = zfc_ctx();
        let c = parse_construct("H[y| A[x| x in y == E[z| x in z & z in a]]]", &ctx, None).unwrap();
        assert_eq!(c.mode(), Mode::T);
        assert!(c.is_app_of(logical::EPS));
    }

    #[test]
    fn typed_then_constrained_set_term() {
        let ctx = zfc_ctx();
        let c = parse_construct("{x: A & x in B}", &ctx, Some(Mode::T)).unwrap();
        let (head, args) = c.as_app().unwrap();
        assert_eq!(head.arity.to_string(), "DT");
        assert!(args[0].is_app_of(logical::DAND));
    }

    #[test]
    fn bounded_quantifier_over_short_definition() {
        let ctx = zfc_ctx();
        let c = parse_construct("A[x:a, x in b]", &ctx, Some(Mode::F)).unwrap();
        assert!(c.is_app_of(logical::ALL_BOUNDED));
        assert!(free_vars(&c).iter().all(|v| &**v != "x"));
    }

    #[test]
    fn round_trips() {
        let ctx = zfc_ctx();
        for s in [
            "(x | ~(x in A))",
            "A[x, y | E[z | A[u | u in z == u = x or u = y]]]",
            "a sub b & b sub a -> a = b",
            "{x: A & x in B}",
            "A[x:a, x in b]",
            "(d -> P)(z) == d(z) -> d(P, z)",
            "(~d)(z) == ~d(z)",
            "A[d, P] & E[d] -> P",
            "[A, B, x]",
            "{x, y} = {y, x}",
            "A \\cap B = B",
        ] {
            let c = parse_construct(s, &ctx, None).unwrap();
            let a = render_ascii(&c);
            let u = render_unicode(&c);
            let c2 = parse_construct(&a, &ctx, None).unwrap();
            let c3 = parse_construct(&u, &ctx, None).unwrap();
            assert!(alpha_eq(&c, &c2), "{s} -> {a}");
            assert!(alpha_eq(&c, &c3), "{s} -> {u}");
        }
        let c = parse_construct("(x | ~(x in A))", &ctx, None).unwrap();
        assert_eq!(render_ascii(&c), "(x | ~(x in A))");
    }

    #[test]
    fn self_reference_is_rejected() {
        let e = parse_declarations("N := N;", &Context::logical()).unwrap_err();
        assert!(e.to_string().contains("refers to itself"), "{e}");
    }

    #[test]
    fn declarations() {
        let ctx = zfc_ctx();
        let ds = parse_declarations(
            "Axiom Extensionality := a sub b & b sub a -> a = b; set := def[anyset; true];",
            &ctx,
        )
        .unwrap();
        assert!(matches!(&ds[0].kind, DeclKind::Axiom { name, .. } if &**name == "Extensionality"));
        match &ds[1].kind {
            DeclKind::Abbreviation { name, body } => {
                assert_eq!(&**name, "set");
                assert_eq!(body.as_def().unwrap().kind, DefKind::Constants);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn defining_axiom_free_names_checked() {
        let ctx = zfc_ctx();
        assert!(parse_declarations("def[f : \"TT\"; f(x) = y];", &ctx).is_err());
        assert!(parse_declarations("def[f : \"TT\"; f(x) = {x, x}];", &ctx).is_ok());
    }

    #[test]
    fn ambiguity_is_an_error() {
        let mut ctx = Context::logical();
        for d in parse_declarations("def[g : \"TT\"]; def[g : \"TT\"];", &ctx).unwrap() {
            ctx.apply(&d).unwrap();
        }
        assert!(matches!(
            parse_construct("g(a)", &ctx, None),
            Err(Error::Ambiguous { .. })
        ));
    }

    #[test]
    fn operator_binders() {
        let c = parse_construct(
            "def[G, *: \"TTT\"; A[x, y | x * y = y * x]]",
            &Context::logical(),
            Some(Mode::D),
        )
        .unwrap();
        let a = render_ascii(&c);
        assert_eq!(a, "def[G, *: \"TTT\"; A[x, y | x * y = y * x]]");
    }
}
