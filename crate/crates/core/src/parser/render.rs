//! Pretty-printing of constructs and declarations.

use super::decl::{DeclKind, Declaration, Defining};
use crate::syntax::{
    logical, Binder, Construct, DefKind, GArity, Mode, NameStyle, Node, Ref, SimpleDef,
};

/// Which spelling to use for symbols that have an ASCII alias.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Alphabet {
    #[default]
    Ascii,
    Unicode,
}

/// (symbol, ASCII alias)
pub const ASCII_ALIASES: &[(&str, &str)] = &[
    ("∈", "in"),
    ("∉", "notin"),
    ("⊆", "sub"),
    ("≡", "=="),
    ("→", "->"),
    ("∨", "or"),
    ("∪", "\\cup"),
    ("∩", "\\cap"),
    ("×", "\\times"),
    ("≠", "!="),
];

pub fn ascii_alias(sym: &str) -> Option<&'static str> {
    ASCII_ALIASES
        .iter()
        .find(|(s, _)| *s == sym)
        .map(|(_, a)| *a)
}

pub fn render_ascii(c: &Construct) -> String {
    render(c, Alphabet::Ascii)
}

pub fn render_unicode(c: &Construct) -> String {
    render(c, Alphabet::Unicode)
}

pub fn render(c: &Construct, a: Alphabet) -> String {
    let mut out = String::new();
    Printer { a, out: &mut out }.expr(c, 0);
    out
}

/// Binding level of an infix operator with the given external name and
/// result mode. Shared with the parser.
pub fn infix_level(external: &str, result: Mode) -> u8 {
    if result != Mode::T {
        match external {
            "≡" => return 1,
            "→" => return 2,
            "∨" => return 3,
            "&" => return 4,
            _ => {}
        }
    }
    if result == Mode::F {
        6
    } else {
        7
    }
}

pub const PREFIX_NOT_LEVEL: u8 = 5;
pub const PREFIX_LEVEL: u8 = 8;
pub const ATOM_LEVEL: u8 = 9;

pub fn right_assoc(external: &str) -> bool {
    external == "→"
}

fn is_infix(head: &Ref, n: usize) -> bool {
    n == 2 && head.style() == NameStyle::Operator && &*head.external != "{"
}

fn is_prefix(head: &Ref, n: usize) -> bool {
    n == 1 && head.style() == NameStyle::Operator && &*head.external != "{"
}

fn is_true(c: &Construct) -> bool {
    c.is_app_of(logical::TRUE)
}

/// `x:t` short form: one typed term binder and a trivial body.
fn short_form(d: &SimpleDef) -> Option<&Construct> {
    if d.kind != DefKind::Variables || d.binders.len() != 1 || !is_true(&d.body) {
        return None;
    }
    let b = &d.binders[0];
    let ty = b.ty.as_ref()?;
    if b.arity != GArity::term() || level(ty) < PREFIX_LEVEL {
        return None;
    }
    if ty.mode() == Mode::D && ty.as_ref().is_none() && !paren_form(ty) {
        return None;
    }
    Some(ty)
}

/// True when the rendering is already enclosed in its own delimiters.
fn paren_form(c: &Construct) -> bool {
    match c.node() {
        Node::Def(d) => short_form(d).is_none(),
        _ => false,
    }
}

pub fn level(c: &Construct) -> u8 {
    match c.node() {
        Node::App { head, args } if is_infix(head, args.len()) => {
            infix_level(&head.external, c.mode())
        }
        Node::App { head, args } if is_prefix(head, args.len()) => {
            if &*head.external == "~" {
                PREFIX_NOT_LEVEL
            } else {
                PREFIX_LEVEL
            }
        }
        _ => ATOM_LEVEL,
    }
}

struct Printer<'a> {
    a: Alphabet,
    out: &'a mut String,
}

impl Printer<'_> {
    fn name(&mut self, ext: &str) {
        match self.a {
            Alphabet::Ascii => self.out.push_str(ascii_alias(ext).unwrap_or(ext)),
            Alphabet::Unicode => self.out.push_str(ext),
        }
    }

    fn expr(&mut self, c: &Construct, min: u8) {
        if level(c) < min {
            self.out.push('(');
            self.expr(c, 0);
            self.out.push(')');
        } else {
            self.node(c);
        }
    }

    fn list(&mut self, items: &[Construct]) {
        for (i, x) in items.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.expr(x, 0);
        }
    }

    /// A definition in head position, `d` in `d(z)`.
    fn head_def(&mut self, d: &Construct) {
        if d.as_ref().is_some() || paren_form(d) {
            self.expr(d, 0);
        } else {
            self.out.push('(');
            self.expr(d, 0);
            self.out.push(')');
        }
    }

    fn postfix_operand(&mut self, c: &Construct) {
        let atomic =
            level(c) == ATOM_LEVEL && !matches!(c.node(), Node::Def(d) if short_form(d).is_some());
        if atomic {
            self.node(c);
        } else {
            self.out.push('(');
            self.expr(c, 0);
            self.out.push(')');
        }
    }

    fn binder(&mut self, b: &Binder) {
        self.name(&b.name);
        if let Some(t) = &b.ty {
            self.out.push(':');
            self.expr(t, 7);
        } else if b.arity != GArity::term() {
            self.out.push_str(&format!(": \"{}\"", b.arity));
        }
    }

    fn binders(&mut self, d: &SimpleDef) {
        for (i, b) in d.binders.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.binder(b);
        }
    }

    /// `x, y | P` without the enclosing parentheses.
    fn bare_def(&mut self, d: &SimpleDef) {
        self.binders(d);
        self.out.push_str(" | ");
        self.expr(&d.body, 0);
    }

    /// Arguments of a bracketed head; a leading definition of variables
    /// drops its parentheses.
    fn bracket_args(&mut self, args: &[Construct]) {
        for (i, x) in args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            match x.node() {
                Node::Def(d)
                    if i == 0 && d.kind == DefKind::Variables && short_form(d).is_none() =>
                {
                    self.bare_def(d)
                }
                _ => self.expr(x, 0),
            }
        }
    }

    fn node(&mut self, c: &Construct) {
        match c.node() {
            Node::Ref(r) => self.name(&r.external),
            Node::App { head, args } => self.app(c, head, args),
            Node::Def(d) => match d.kind {
                DefKind::Variables => match short_form(d) {
                    Some(ty) => {
                        self.name(&d.binders[0].name);
                        self.out.push(':');
                        self.expr(ty, PREFIX_LEVEL);
                    }
                    None => {
                        self.out.push('(');
                        self.bare_def(d);
                        self.out.push(')');
                    }
                },
                DefKind::Constants => {
                    self.out.push_str("def[");
                    self.binders(d);
                    if !is_true(&d.body) {
                        self.out.push_str("; ");
                        self.expr(&d.body, 0);
                    }
                    self.out.push(']');
                }
            },
            Node::DefApply { def, model, target } => {
                self.head_def(def);
                self.out.push('(');
                if target.mode() == Mode::F {
                    self.expr(target, 0);
                    self.out.push_str(", ");
                    self.expr(model, 0);
                } else {
                    self.expr(model, 0);
                    self.out.push_str(", ");
                    self.expr(target, 0);
                }
                self.out.push(')');
            }
            Node::ModelAssert { def, model } => {
                self.head_def(def);
                self.out.push('(');
                self.expr(model, 0);
                self.out.push(')');
            }
            Node::Dot { model, field, .. } => {
                self.postfix_operand(model);
                self.out.push('.');
                self.out.push_str(field);
            }
            Node::SetTerm(e) => {
                if e.is_empty() {
                    self.out.push_str("{}");
                } else {
                    self.out.push('{');
                    self.list(e);
                    self.out.push('}');
                }
            }
            Node::Tuple(e) => {
                self.out.push('[');
                self.list(e);
                self.out.push(']');
            }
            Node::BracketDef(d) => {
                self.out.push('[');
                self.expr(d, 0);
                self.out.push(']');
            }
        }
    }

    fn app(&mut self, c: &Construct, head: &Ref, args: &[Construct]) {
        let n = args.len();
        if is_infix(head, n) {
            let l = level(c);
            let (lmin, rmin) = if right_assoc(&head.external) {
                (l + 1, l)
            } else {
                (l, l + 1)
            };
            self.expr(&args[0], lmin);
            self.out.push(' ');
            self.name(&head.external);
            self.out.push(' ');
            self.expr(&args[1], rmin);
        } else if is_prefix(head, n) {
            self.name(&head.external);
            if &*head.external == "~" {
                if matches!(args[0].node(), Node::App { head: h, args: a } if is_infix(h, a.len()))
                {
                    self.out.push('(');
                    self.expr(&args[0], 0);
                    self.out.push(')');
                } else {
                    self.expr(&args[0], PREFIX_NOT_LEVEL);
                }
            } else {
                self.out.push(' ');
                self.expr(&args[0], PREFIX_LEVEL);
            }
        } else if &*head.external == "{" {
            self.out.push('{');
            self.bracket_args(args);
            self.out.push('}');
        } else if head.style() == NameStyle::Bracketed {
            self.out.push_str(&head.external);
            self.bracket_args(args);
            self.out.push(']');
        } else {
            self.name(&head.external);
            self.out.push('(');
            self.list(args);
            self.out.push(')');
        }
    }
}

/// Renders a declaration, terminated by `;`.
pub fn render_declaration(d: &Declaration, a: Alphabet) -> String {
    let r = |c: &Construct| render(c, a);
    let mut s = match &d.kind {
        DeclKind::Abbreviation { name, body } => format!("{name} := {}", r(body)),
        DeclKind::Primary { symbol, defining } => {
            let ext = match a {
                Alphabet::Ascii => ascii_alias(&symbol.external)
                    .unwrap_or(&symbol.external)
                    .to_string(),
                Alphabet::Unicode => symbol.external.to_string(),
            };
            let ext = if NameStyle::of(&symbol.external) == NameStyle::Bracketed {
                symbol.external.to_string()
            } else {
                ext
            };
            match defining {
                None => format!("def[{ext} : \"{}\"]", symbol.arity),
                Some(Defining { lhs, rhs, .. }) => {
                    let op = if lhs.mode() == Mode::F {
                        if a == Alphabet::Ascii {
                            "=="
                        } else {
                            "≡"
                        }
                    } else {
                        "="
                    };
                    format!(
                        "def[{ext} : \"{}\"; {} {op} {}]",
                        symbol.arity,
                        r(lhs),
                        r(rhs)
                    )
                }
            }
        }
        DeclKind::SynVars { names, mode } => format!("{} : {mode}", names.join(", ")),
        DeclKind::Axiom { name, body } => format!("Axiom {name} := {}", r(body)),
        DeclKind::Theorem {
            name,
            premises,
            body,
            proof,
        } => {
            let mut s = format!("Theorem {name} := ");
            if !premises.is_empty() {
                let ps: Vec<String> = premises.iter().map(r).collect();
                let turnstile = if a == Alphabet::Ascii { "|-" } else { "⊢" };
                s.push_str(&format!("{} {turnstile} ", ps.join(", ")));
            }
            s.push_str(&r(body));
            if let Some(p) = proof {
                s.push_str("\nproof\n");
                for step in &p.steps {
                    s.push_str(&format!(
                        "  {}. {} by {};\n",
                        step.index,
                        r(&step.formula),
                        step.just.render(a)
                    ));
                }
                s.push_str("qed");
            }
            s
        }
    };
    s.push(';');
    s
}
