use std::fmt;

use crate::value::{write_name, EqMode, Label};

/// A nonempty dotted label sequence, e.g. `1.C.q`.
pub type Path = Vec<Label>;

pub fn path(s: &str) -> Path {
    s.split('.').map(Label::from).collect()
}

/// Monad algebra expressions. `Compose(f, g)` applies `f` first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Id,
    Const(Label),
    Empty,
    Unit,
    Sng,
    Map(Box<Expr>),
    Flatten,
    PairWith(Label),
    Tuple(Vec<(Label, Expr)>),
    Proj(Path),
    Compose(Box<Expr>, Box<Expr>),
    Union(Box<Expr>, Box<Expr>),
    EqAtomic(Path, Path),
    Not,
    True,
    Monus,
    Unique,
    // Operators below are eliminated by `desugar`.
    EqMon(Path, Path),
    EqDeep(Path, Path),
    Select(Cond),
    Diff,
    Intersect,
    SubsetEq(Path, Path),
    MemberOf(Path, Path),
    Nest { label: Label, grouped: Vec<Label> },
    Cart(Box<Expr>, Box<Expr>),
    FlatMap(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Path(Path),
    Const(Label),
}

/// Selection conditions, evaluated against one collection member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cond {
    Cmp(Path, Operand, EqMode),
    In(Path, Vec<Label>),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
    Iff(Box<Cond>, Box<Cond>),
}

impl Expr {
    pub fn c(a: &str) -> Expr {
        Expr::Const(a.into())
    }

    pub fn map(f: Expr) -> Expr {
        Expr::Map(Box::new(f))
    }

    pub fn flatmap(f: Expr) -> Expr {
        Expr::FlatMap(Box::new(f))
    }

    pub fn pairwith(l: &str) -> Expr {
        Expr::PairWith(l.into())
    }

    pub fn pi(p: &str) -> Expr {
        Expr::Proj(path(p))
    }

    pub fn tuple<L: Into<Label>>(fields: Vec<(L, Expr)>) -> Expr {
        Expr::Tuple(fields.into_iter().map(|(l, e)| (l.into(), e)).collect())
    }

    pub fn union(f: Expr, g: Expr) -> Expr {
        Expr::Union(Box::new(f), Box::new(g))
    }

    pub fn cart(f: Expr, g: Expr) -> Expr {
        Expr::Cart(Box::new(f), Box::new(g))
    }

    pub fn eqatom(p: &str, q: &str) -> Expr {
        Expr::EqAtomic(path(p), path(q))
    }

    pub fn eqmon(p: &str, q: &str) -> Expr {
        Expr::EqMon(path(p), path(q))
    }

    pub fn select(c: Cond) -> Expr {
        Expr::Select(c)
    }

    /// `self ; g`.
    pub fn then(self, g: Expr) -> Expr {
        Expr::Compose(Box::new(self), Box::new(g))
    }

    /// Left-to-right composition of a sequence; the empty sequence is `id`.
    pub fn seq(parts: impl IntoIterator<Item = Expr>) -> Expr {
        parts.into_iter().reduce(Expr::then).unwrap_or(Expr::Id)
    }

    /// Number of AST nodes, counting each path label and condition node.
    pub fn size(&self) -> usize {
        use Expr::*;
        1 + match self {
            Id | Const(_) | Empty | Unit | Sng | Flatten | PairWith(_) | Not | True | Monus
            | Unique | Diff | Intersect => 0,
            Proj(p) => p.len(),
            EqAtomic(p, q) | EqMon(p, q) | EqDeep(p, q) | SubsetEq(p, q) | MemberOf(p, q) => {
                p.len() + q.len()
            }
            Nest { grouped, .. } => grouped.len(),
            Map(f) | FlatMap(f) => f.size(),
            Tuple(fs) => fs.iter().map(|(_, f)| f.size()).sum(),
            Compose(f, g) | Union(f, g) | Cart(f, g) => f.size() + g.size(),
            Select(c) => c.size(),
        }
    }

    /// True if only core operators occur.
    pub fn is_core(&self) -> bool {
        use Expr::*;
        match self {
            Id | Const(_) | Empty | Unit | Sng | Flatten | PairWith(_) | Proj(_) | EqAtomic(..)
            | Not | True | Monus | Unique => true,
            Map(f) => f.is_core(),
            Tuple(fs) => fs.iter().all(|(_, f)| f.is_core()),
            Compose(f, g) | Union(f, g) => f.is_core() && g.is_core(),
            _ => false,
        }
    }

    /// Visits every subexpression in preorder.
    pub fn walk(&self, visit: &mut impl FnMut(&Expr)) {
        visit(self);
        match self {
            Expr::Map(f) | Expr::FlatMap(f) => f.walk(visit),
            Expr::Tuple(fs) => fs.iter().for_each(|(_, f)| f.walk(visit)),
            Expr::Compose(f, g) | Expr::Union(f, g) | Expr::Cart(f, g) => {
                f.walk(visit);
                g.walk(visit);
            }
            _ => {}
        }
    }
}

impl Cond {
    pub fn eq(p: &str, q: &str, mode: EqMode) -> Cond {
        Cond::Cmp(path(p), Operand::Path(path(q)), mode)
    }

    pub fn eq_const(p: &str, c: &str) -> Cond {
        Cond::Cmp(path(p), Operand::Const(c.into()), EqMode::Atomic)
    }

    pub fn and(a: Cond, b: Cond) -> Cond {
        Cond::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Cond, b: Cond) -> Cond {
        Cond::Or(Box::new(a), Box::new(b))
    }

    pub fn not(a: Cond) -> Cond {
        Cond::Not(Box::new(a))
    }

    pub fn iff(a: Cond, b: Cond) -> Cond {
        Cond::Iff(Box::new(a), Box::new(b))
    }

    pub fn size(&self) -> usize {
        1 + match self {
            Cond::Cmp(p, Operand::Path(q), _) => p.len() + q.len(),
            Cond::Cmp(p, Operand::Const(_), _) => p.len() + 1,
            Cond::In(p, cs) => p.len() + cs.len(),
            Cond::And(a, b) | Cond::Or(a, b) | Cond::Iff(a, b) => a.size() + b.size(),
            Cond::Not(a) => a.size(),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Cond::Iff(..) => 0,
            Cond::Or(..) => 1,
            Cond::And(..) => 2,
            _ => 3,
        }
    }
}

pub(crate) struct PathFmt<'a>(pub &'a [Label]);

impl fmt::Display for PathFmt<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write_name(f, l)?;
        }
        Ok(())
    }
}

pub(crate) fn write_const(f: &mut impl fmt::Write, a: &str) -> fmt::Result {
    f.write_char('\'')?;
    for c in a.chars() {
        if c == '\'' || c == '\\' {
            f.write_char('\\')?;
        }
        f.write_char(c)?;
    }
    f.write_char('\'')
}

fn is_proj(e: &Expr, l: &str) -> bool {
    matches!(e, Expr::Proj(p) if p.len() == 1 && &*p[0] == l)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expr::*;
        match self {
            Id => f.write_str("id"),
            Const(a) => write_const(f, a),
            Empty => f.write_str("empty"),
            Unit => f.write_str("unit"),
            Sng => f.write_str("sng"),
            Map(g) => write!(f, "map({g})"),
            FlatMap(g) => write!(f, "flatmap({g})"),
            Flatten => f.write_str("flatten"),
            PairWith(l) => {
                f.write_str("pairwith[")?;
                write_name(f, l)?;
                f.write_str("]")
            }
            Tuple(fs) => {
                f.write_str("tup[")?;
                for (i, (l, g)) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_name(f, l)?;
                    write!(f, " = {g}")?;
                }
                f.write_str("]")
            }
            Proj(p) => write!(f, "pi[{}]", PathFmt(p)),
            Compose(a, b) => write!(f, "{a} ; {b}"),
            Union(a, b) if is_proj(a, "1") && is_proj(b, "2") => f.write_str("union"),
            Union(a, b) => write!(f, "union({a}, {b})"),
            Cart(a, b) => write!(f, "cart({a}, {b})"),
            EqAtomic(p, q) => write!(f, "eqatom[{}, {}]", PathFmt(p), PathFmt(q)),
            EqMon(p, q) => write!(f, "eqmon[{}, {}]", PathFmt(p), PathFmt(q)),
            EqDeep(p, q) => write!(f, "eq[{}, {}]", PathFmt(p), PathFmt(q)),
            SubsetEq(p, q) => write!(f, "subseteq[{}, {}]", PathFmt(p), PathFmt(q)),
            MemberOf(p, q) => write!(f, "in[{}, {}]", PathFmt(p), PathFmt(q)),
            Select(c) => write!(f, "select[{c}]"),
            Not => f.write_str("not"),
            True => f.write_str("true"),
            Monus => f.write_str("monus"),
            Unique => f.write_str("unique"),
            Diff => f.write_str("diff"),
            Intersect => f.write_str("cap"),
            Nest { label, grouped } => {
                f.write_str("nest[")?;
                write_name(f, label)?;
                f.write_str(" = (")?;
                for (i, l) in grouped.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_name(f, l)?;
                }
                f.write_str(")]")
            }
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |f: &mut fmt::Formatter<'_>, c: &Cond, min: u8| {
            if c.prec() < min {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        };
        match self {
            Cond::Cmp(p, rhs, mode) => {
                let op = match mode {
                    EqMode::Deep => "=",
                    EqMode::Mon => "=mon",
                    EqMode::Atomic => "=atomic",
                };
                write!(f, "{} {op} ", PathFmt(p))?;
                match rhs {
                    Operand::Path(q) => write!(f, "{}", PathFmt(q)),
                    Operand::Const(c) => write_const(f, c),
                }
            }
            Cond::In(p, cs) => {
                write!(f, "{} in {{", PathFmt(p))?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_name(f, c)?;
                }
                f.write_str("}")
            }
            Cond::Not(a) => {
                f.write_str("!")?;
                sub(f, a, 3)
            }
            Cond::And(a, b) => {
                sub(f, a, 2)?;
                f.write_str(" && ")?;
                sub(f, b, 3)
            }
            Cond::Or(a, b) => {
                sub(f, a, 1)?;
                f.write_str(" || ")?;
                sub(f, b, 2)
            }
            Cond::Iff(a, b) => {
                sub(f, a, 1)?;
                f.write_str(" <=> ")?;
                sub(f, b, 1)
            }
        }
    }
}

pub fn print_ma(e: &Expr) -> String {
    e.to_string()
}
