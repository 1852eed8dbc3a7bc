//! Declarations and proof scripts as parsed from `.dlog` text.

use std::sync::Arc;

use super::render::{render, Alphabet};
use crate::error::Pos;
use crate::syntax::{Construct, GArity, Mode, Symbol};

#[derive(Clone, Debug)]
pub struct Declaration {
    pub kind: DeclKind,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum DeclKind {
    /// `N := B`
    Abbreviation { name: Arc<str>, body: Construct },
    /// `def[N : A]`, `def[N : A; u1 = u2]`, `def[N : A; p1 ≡ p2]`
    Primary {
        symbol: Symbol,
        defining: Option<Defining>,
    },
    /// `V1, …, Vk : A`
    SynVars { names: Vec<Arc<str>>, mode: Mode },
    /// `Axiom N := Q`
    Axiom { name: Arc<str>, body: Construct },
    /// `Theorem N := Q` or, for a derived rule, `Theorem N := P1, …, Pk ⊢ Q`;
    /// optionally followed by a proof block.
    Theorem {
        name: Arc<str>,
        premises: Vec<Construct>,
        body: Construct,
        proof: Option<ProofScript>,
    },
}

impl Declaration {
    pub fn name(&self) -> String {
        match &self.kind {
            DeclKind::Abbreviation { name, .. }
            | DeclKind::Axiom { name, .. }
            | DeclKind::Theorem { name, .. } => name.to_string(),
            DeclKind::Primary { symbol, .. } => symbol.external.to_string(),
            DeclKind::SynVars { names, .. } => names.join(", "),
        }
    }
}

/// The defining part of a primary declaration.
#[derive(Clone, Debug)]
pub struct Defining {
    /// `N` or `N(v1, …, vk)`.
    pub lhs: Construct,
    pub rhs: Construct,
    /// The variables `v1, …, vk`.
    pub params: Vec<Arc<str>>,
}

impl Defining {
    /// The defining axiom `lhs = rhs` or `lhs ≡ rhs`.
    pub fn axiom(&self) -> Construct {
        use crate::syntax::{logical, GArity, Ref};
        let (name, ar) = if self.lhs.mode() == Mode::F {
            (logical::IFF, "FFF")
        } else {
            (logical::EQ, "TTF")
        };
        let ar: GArity = ar.parse().expect("builtin arity");
        Construct::app(
            Ref::primary(name, name, ar),
            vec![self.lhs.clone(), self.rhs.clone()],
        )
        .expect("defining axiom sides were mode-checked")
    }
}

#[derive(Clone, Debug, Default)]
pub struct ProofScript {
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug)]
pub struct Step {
    pub index: usize,
    pub formula: Construct,
    pub just: Just,
    pub pos: Pos,
}

/// Logical axiom schemas that have a generator.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum AxiomKind {
    /// `d(z) → d(H[d])`
    Eps,
    /// `E[d] ≡ d(H[d])`
    EDef,
    /// `A[d] ≡ d(H[~d])`
    ADef,
    /// `E[d, p] ≡ E[d & p]`
    BEDef,
    /// `A[d, p] ≡ A[d → p]`
    BADef,
    /// `x = x`
    EqRefl,
    /// `x = y → (P ≡ P[x := y])`
    Leibniz,
    /// `P → if(P, x, y) = x` and `~P → if(P, x, y) = y`
    IfAx,
}

impl AxiomKind {
    pub const ALL: [AxiomKind; 8] = [
        AxiomKind::Eps,
        AxiomKind::EDef,
        AxiomKind::ADef,
        AxiomKind::BEDef,
        AxiomKind::BADef,
        AxiomKind::EqRefl,
        AxiomKind::Leibniz,
        AxiomKind::IfAx,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            AxiomKind::Eps => "eps",
            AxiomKind::EDef => "edef",
            AxiomKind::ADef => "adef",
            AxiomKind::BEDef => "bedef",
            AxiomKind::BADef => "badef",
            AxiomKind::EqRefl => "eqrefl",
            AxiomKind::Leibniz => "leibniz",
            AxiomKind::IfAx => "ifax",
        }
    }

    pub fn from_keyword(s: &str) -> Option<AxiomKind> {
        AxiomKind::ALL.iter().copied().find(|k| k.keyword() == s)
    }

    /// Trace flag for axioms outside the core list.
    pub fn flag(self) -> Option<&'static str> {
        match self {
            AxiomKind::EqRefl | AxiomKind::Leibniz => Some("ext-eq"),
            AxiomKind::IfAx => Some("ext-if"),
            _ => None,
        }
    }
}

pub type Bindings = Vec<(Arc<str>, Construct)>;

#[derive(Clone, Debug)]
pub enum Just {
    /// A hypothesis of a derived rule.
    Given,
    /// A tautology, or a tautological consequence of the listed steps and
    /// of the listed axiom instances.
    Taut(Vec<usize>, Vec<Just>),
    /// An instance of a logical axiom schema; arguments may be omitted.
    Axiom(AxiomKind, Vec<Construct>),
    Mp(usize, usize),
    /// From P (first) and d(z) (second) infer d(P, z).
    Subst(usize, usize),
    Alpha(usize),
    Beta(usize),
    GammaP(usize),
    /// Rule 4: from P infer A[d, P].
    Gamma(usize, Option<Construct>),
    /// A nonlogical axiom or a theorem, verbatim.
    Thm(Arc<str>),
    /// The defining axiom of a primary name, optionally with its arity (to
    /// pick among overloads) and an instantiation of its variables.
    Defax(Arc<str>, Option<GArity>, Bindings),
    /// An instance of a named axiom, theorem or defining axiom.
    Schema(Arc<str>, Bindings),
    /// An instance of an earlier step.
    Inst(usize, Bindings),
    /// Equal to an earlier step after unfolding definitions.
    Unfold(usize),
}

fn bindings(b: &Bindings, a: Alphabet) -> String {
    b.iter()
        .map(|(k, v)| format!("{k} := {}", render(v, a)))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Just {
    pub fn render(&self, a: Alphabet) -> String {
        let list = |v: &[usize]| {
            v.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            Just::Given => "given".into(),
            Just::Taut(v, x) if v.is_empty() && x.is_empty() => "taut".into(),
            Just::Taut(v, x) if x.is_empty() => format!("taut({})", list(v)),
            Just::Taut(v, x) => format!(
                "taut({}; {})",
                list(v),
                x.iter().map(|j| j.render(a)).collect::<Vec<_>>().join(", ")
            ),
            Just::Axiom(k, args) if args.is_empty() => k.keyword().into(),
            Just::Axiom(k, args) => format!(
                "{}({})",
                k.keyword(),
                args.iter()
                    .map(|c| render(c, a))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            Just::Mp(i, j) => format!("mp({i}, {j})"),
            Just::Subst(i, j) => format!("subst({i}, {j})"),
            Just::Alpha(i) => format!("alpha({i})"),
            Just::Beta(i) => format!("beta({i})"),
            Just::GammaP(i) => format!("gammap({i})"),
            Just::Gamma(i, None) => format!("gamma({i})"),
            Just::Gamma(i, Some(d)) => format!("gamma({i}, {})", render(d, a)),
            Just::Thm(n) => format!("thm({n})"),
            Just::Defax(n, ar, b) => {
                let n = match a {
                    Alphabet::Ascii => super::render::ascii_alias(n).unwrap_or(n),
                    Alphabet::Unicode => n,
                };
                let mut s = format!("defax({n}");
                if let Some(ar) = ar {
                    s.push_str(&format!(" : \"{ar}\""));
                }
                if !b.is_empty() {
                    s.push_str(&format!("; {}", bindings(b, a)));
                }
                s.push(')');
                s
            }
            Just::Schema(n, b) => format!("schema({n}; {})", bindings(b, a)),
            Just::Inst(i, b) => format!("inst({i}; {})", bindings(b, a)),
            Just::Unfold(i) => format!("unfold({i})"),
        }
    }

    /// Earlier steps this justification refers to.
    pub fn refs(&self) -> Vec<usize> {
        match self {
            Just::Taut(v, _) => v.clone(),
            Just::Mp(i, j) | Just::Subst(i, j) => vec![*i, *j],
            Just::Alpha(i)
            | Just::Beta(i)
            | Just::GammaP(i)
            | Just::Gamma(i, _)
            | Just::Inst(i, _)
            | Just::Unfold(i) => {
                vec![*i]
            }
            _ => vec![],
        }
    }
}
