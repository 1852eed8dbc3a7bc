//! Propositional skeletons and the truth-table tautology check.

use crate::error::Error;
use crate::syntax::subst::canonical;
use crate::syntax::{logical, Construct, Node, RefKind};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Imp,
    Iff,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prop {
    Const(bool),
    Atom(usize),
    Not(Box<Prop>),
    Bin(BinOp, Box<Prop>, Box<Prop>),
}

impl Prop {
    pub fn eval(&self, v: &dyn Fn(usize) -> bool) -> bool {
        match self {
            Prop::Const(b) => *b,
            Prop::Atom(i) => v(*i),
            Prop::Not(p) => !p.eval(v),
            Prop::Bin(op, a, b) => {
                let a = a.eval(v);
                match op {
                    BinOp::And => a && b.eval(v),
                    BinOp::Or => a || b.eval(v),
                    BinOp::Imp => !a || b.eval(v),
                    BinOp::Iff => a == b.eval(v),
                }
            }
        }
    }
}

/// Atoms print as `p0`, `p1`, ...
impl std::fmt::Display for Prop {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Prop::Const(b) => write!(f, "{b}"),
            Prop::Atom(i) => write!(f, "p{i}"),
            Prop::Not(p) => match **p {
                Prop::Bin(..) => write!(f, "~({p})"),
                _ => write!(f, "~{p}"),
            },
            Prop::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::And => "&",
                    BinOp::Or => "or",
                    BinOp::Imp => "->",
                    BinOp::Iff => "==",
                };
                let side = |p: &Prop| match p {
                    Prop::Bin(..) => format!("({p})"),
                    _ => p.to_string(),
                };
                write!(f, "{} {sym} {}", side(a), side(b))
            }
        }
    }
}

/// A formula split into its propositional structure and its atoms, the
/// maximal subformulas not headed by a connective. Alpha-equal atoms share
/// an index.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub prop: Prop,
    pub atoms: Vec<Construct>,
    keys: Vec<Construct>,
}

impl Skeleton {
    pub fn of(p: &Construct) -> Skeleton {
        let mut s = Skeleton {
            prop: Prop::Const(true),
            atoms: Vec::new(),
            keys: Vec::new(),
        };
        s.prop = s.walk(p);
        s
    }

    /// Skeleton of several formulas over a shared atom table.
    pub fn of_all(ps: &[Construct]) -> (Vec<Prop>, Vec<Construct>) {
        let mut s = Skeleton {
            prop: Prop::Const(true),
            atoms: Vec::new(),
            keys: Vec::new(),
        };
        let props = ps.iter().map(|p| s.walk(p)).collect();
        (props, s.atoms)
    }

    fn atom(&mut self, p: &Construct) -> Prop {
        let key = canonical(p);
        match self.keys.iter().position(|k| *k == key) {
            Some(i) => Prop::Atom(i),
            None => {
                self.keys.push(key);
                self.atoms.push(p.clone());
                Prop::Atom(self.atoms.len() - 1)
            }
        }
    }

    fn walk(&mut self, p: &Construct) -> Prop {
        let (head, args) = match p.node() {
            Node::App { head, args } if head.kind == RefKind::Primary => {
                (&*head.internal, args.as_slice())
            }
            Node::Ref(r) if r.kind == RefKind::Primary => (&*r.internal, &[][..]),
            _ => return self.atom(p),
        };
        let bin = |op| Some(op);
        let op = match head {
            logical::TRUE => return Prop::Const(true),
            logical::FALSE => return Prop::Const(false),
            logical::NOT => return Prop::Not(Box::new(self.walk(&args[0]))),
            logical::AND => bin(BinOp::And),
            logical::OR => bin(BinOp::Or),
            logical::IMP => bin(BinOp::Imp),
            logical::IFF => bin(BinOp::Iff),
            _ => None,
        };
        match op {
            Some(op) => {
                let a = self.walk(&args[0]);
                let b = self.walk(&args[1]);
                Prop::Bin(op, Box::new(a), Box::new(b))
            }
            None => self.atom(p),
        }
    }
}

/// True when `p` holds under every valuation of `n` atoms.
pub fn valid(p: &Prop, n: usize) -> bool {
    (0u64..1 << n).all(|bits| p.eval(&|i| bits >> i & 1 == 1))
}

/// Whether the skeleton of `p` is a tautology. Fails when it has more than
/// `max_atoms` atoms.
pub fn is_tautology(p: &Construct, max_atoms: usize) -> Result<bool, Error> {
    let s = Skeleton::of(p);
    if s.atoms.len() > max_atoms || s.atoms.len() > 63 {
        return Err(Error::TooManyAtoms {
            found: s.atoms.len(),
            limit: max_atoms,
        });
    }
    Ok(valid(&s.prop, s.atoms.len()))
}
