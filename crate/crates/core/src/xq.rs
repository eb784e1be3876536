//! Core XQuery: syntax, desugaring and evaluation.
//!
//! Variables are de Bruijn levels: `Var(i)` names the variable bound at
//! nesting depth `i`, with free variables occupying the first levels.
//! Conditions are ordinary queries; a condition holds iff its result is
//! nonempty.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};
use crate::ma::eval::max_value_nodes;
use crate::value::{Cursor, EqMode, Label};
use crate::xml::{valid_tag, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Child,
    Descendant,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Test {
    Name(Label),
    Star,
}

impl Test {
    fn matches(&self, t: &Tree) -> bool {
        match self {
            Test::Star => true,
            Test::Name(n) => *n == t.label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Xq {
    /// `<a/>` when the body is `None`.
    Elem(Label, Option<Box<Xq>>),
    Seq(Box<Xq>, Box<Xq>),
    Var(usize),
    Step(usize, Axis, Test),
    /// Binder name, source, body.
    For(String, Box<Xq>, Box<Xq>),
    Let(String, Box<Xq>, Box<Xq>),
    If(Box<Xq>, Box<Xq>),
    VarEq(usize, usize, EqMode),
    /// Deep equality of two result sequences.
    QueryEq(Box<Xq>, Box<Xq>),
    And(Box<Xq>, Box<Xq>),
    Or(Box<Xq>, Box<Xq>),
    Not(Box<Xq>),
    SomeIn(String, Box<Xq>, Box<Xq>),
    EveryIn(String, Box<Xq>, Box<Xq>),
    Path(usize, Vec<(Axis, Test)>),
}

impl Xq {
    pub fn leaf(a: &str) -> Xq {
        Xq::Elem(a.into(), None)
    }

    pub fn elem(a: &str, body: Xq) -> Xq {
        Xq::Elem(a.into(), Some(Box::new(body)))
    }

    pub fn seq(a: Xq, b: Xq) -> Xq {
        Xq::Seq(Box::new(a), Box::new(b))
    }

    pub fn child(var: usize, test: &str) -> Xq {
        let t = if test == "*" { Test::Star } else { Test::Name(test.into()) };
        Xq::Step(var, Axis::Child, t)
    }

    pub fn for_(name: &str, src: Xq, body: Xq) -> Xq {
        Xq::For(name.into(), Box::new(src), Box::new(body))
    }

    pub fn let_(name: &str, bound: Xq, body: Xq) -> Xq {
        Xq::Let(name.into(), Box::new(bound), Box::new(body))
    }

    pub fn if_(c: Xq, then: Xq) -> Xq {
        Xq::If(Box::new(c), Box::new(then))
    }

    /// Node count of the syntax tree.
    pub fn size(&self) -> usize {
        use Xq::*;
        1 + match self {
            Elem(_, None) | Var(_) | Step(..) | VarEq(..) => 0,
            Path(_, s) => s.len(),
            Elem(_, Some(b)) | Not(b) => b.size(),
            Seq(a, b) | For(_, a, b) | Let(_, a, b) | If(a, b) | QueryEq(a, b) | And(a, b) | Or(a, b)
            | SomeIn(_, a, b) | EveryIn(_, a, b) => a.size() + b.size(),
        }
    }

    /// True if only core constructs (plus deep sequence equality) occur.
    pub fn is_core(&self) -> bool {
        use Xq::*;
        match self {
            Elem(_, None) | Var(_) | Step(..) | VarEq(..) => true,
            Elem(_, Some(b)) => b.is_core(),
            Seq(a, b) | For(_, a, b) | Let(_, a, b) | If(a, b) | QueryEq(a, b) => a.is_core() && b.is_core(),
            And(..) | Or(..) | Not(_) | SomeIn(..) | EveryIn(..) | Path(..) => false,
        }
    }

    pub fn uses_descendant(&self) -> bool {
        use Xq::*;
        match self {
            Step(_, ax, _) => *ax == Axis::Descendant,
            Path(_, s) => s.iter().any(|(ax, _)| *ax == Axis::Descendant),
            Elem(_, None) | Var(_) | VarEq(..) => false,
            Elem(_, Some(b)) | Not(b) => b.uses_descendant(),
            Seq(a, b) | For(_, a, b) | Let(_, a, b) | If(a, b) | QueryEq(a, b) | And(a, b) | Or(a, b)
            | SomeIn(_, a, b) | EveryIn(_, a, b) => a.uses_descendant() || b.uses_descendant(),
        }
    }
}

/// Forms that always evaluate to exactly one node.
pub fn is_singleton_form(q: &Xq) -> bool {
    match q {
        Xq::Elem(..) | Xq::Var(_) => true,
        Xq::Let(_, _, body) => is_singleton_form(body),
        _ => false,
    }
}

/// Checks variable scoping against `free` outer variables and the let restriction.
pub fn check_xq(q: &Xq, free: usize) -> Result<()> {
    use Xq::*;
    let var = |i: usize, depth: usize| {
        if i == 0 || i > depth {
            Err(Error::Structure(format!("variable level {i} is not in scope at depth {depth}")))
        } else {
            Ok(())
        }
    };
    fn go(q: &Xq, d: usize, var: &dyn Fn(usize, usize) -> Result<()>) -> Result<()> {
        match q {
            Elem(a, b) => {
                if !valid_tag(a) {
                    return Err(Error::Structure(format!("`{a}` is not a tag name")));
                }
                b.as_deref().map_or(Ok(()), |b| go(b, d, var))
            }
            Var(i) | Step(i, ..) | Path(i, _) => var(*i, d),
            VarEq(i, j, m) => {
                if *m == EqMode::Mon {
                    return Err(Error::Mode("variable equality is deep or atomic".into()));
                }
                var(*i, d).and(var(*j, d))
            }
            Let(_, a, b) => {
                if !is_singleton_form(a) {
                    return Err(Error::Structure(format!(
                        "let must bind a constructor or a variable, found `{a}`"
                    )));
                }
                go(a, d, var)?;
                go(b, d + 1, var)
            }
            For(_, a, b) | SomeIn(_, a, b) | EveryIn(_, a, b) => {
                go(a, d, var)?;
                go(b, d + 1, var)
            }
            Not(a) => go(a, d, var),
            Seq(a, b) | If(a, b) | QueryEq(a, b) | And(a, b) | Or(a, b) => {
                go(a, d, var)?;
                go(b, d, var)
            }
        }
    }
    go(q, free, &var)
}

// ---------------------------------------------------------------- printing

struct Printer {
    names: Vec<String>,
}

impl Printer {
    fn shown(&self, name: &str) -> String {
        if self.names.iter().any(|n| n == name) {
            format!("{name}_{}", self.names.len() + 1)
        } else {
            name.to_string()
        }
    }

    fn var(&self, i: usize) -> String {
        match self.names.get(i.wrapping_sub(1)) {
            Some(n) => format!("${n}"),
            None => format!("$x{i}"),
        }
    }

    fn steps(&self, f: &mut String, steps: &[(Axis, Test)]) -> fmt::Result {
        for (ax, t) in steps {
            f.push('/');
            if *ax == Axis::Descendant {
                f.push_str("descendant::");
            }
            match t {
                Test::Star => f.push('*'),
                Test::Name(n) => f.push_str(n),
            }
        }
        Ok(())
    }

    fn binder(&mut self, f: &mut String, kw: &str, name: &str, a: &Xq, mid: &str, b: &Xq) -> fmt::Result {
        let shown = self.shown(name);
        write!(f, "{kw} ${shown} {} ", if kw == "let" { ":=" } else { "in" })?;
        self.single(f, a)?;
        write!(f, " {mid} ")?;
        self.names.push(shown);
        let r = self.single(f, b);
        self.names.pop();
        r
    }

    fn query(&mut self, f: &mut String, q: &Xq) -> fmt::Result {
        if let Xq::Seq(a, b) = q {
            self.query(f, a)?;
            f.push_str(", ");
            return self.query(f, b);
        }
        self.single(f, q)
    }

    fn single(&mut self, f: &mut String, q: &Xq) -> fmt::Result {
        use Xq::*;
        match q {
            Elem(a, None) => write!(f, "<{a}/>"),
            Elem(a, Some(b)) => {
                write!(f, "<{a}>{{")?;
                self.query(f, b)?;
                write!(f, "}}</{a}>")
            }
            Seq(..) => {
                f.push('(');
                self.query(f, q)?;
                f.push(')');
                Ok(())
            }
            Var(i) => write!(f, "{}", self.var(*i)),
            Step(i, ax, t) => {
                f.push_str(&self.var(*i));
                self.steps(f, &[(*ax, t.clone())])
            }
            Path(i, s) => {
                f.push_str(&self.var(*i));
                self.steps(f, s)
            }
            For(n, a, b) => self.binder(f, "for", n, a, "return", b),
            Let(n, a, b) => self.binder(f, "let", n, a, "return", b),
            SomeIn(n, a, b) => self.binder(f, "some", n, a, "satisfies", b),
            EveryIn(n, a, b) => self.binder(f, "every", n, a, "satisfies", b),
            If(c, a) => {
                f.push_str("if (");
                self.query(f, c)?;
                f.push_str(") then ");
                self.single(f, a)
            }
            VarEq(i, j, m) => {
                let op = if *m == EqMode::Atomic { "eq" } else { "=" };
                write!(f, "{} {op} {}", self.var(*i), self.var(*j))
            }
            QueryEq(a, b) | And(a, b) | Or(a, b) => {
                let op = match q {
                    QueryEq(..) => "=",
                    And(..) => "and",
                    _ => "or",
                };
                f.push('(');
                self.single(f, a)?;
                write!(f, " {op} ")?;
                self.single(f, b)?;
                f.push(')');
                Ok(())
            }
            Not(a) => {
                f.push_str("not(");
                self.query(f, a)?;
                f.push(')');
                Ok(())
            }
        }
    }
}

/// Prints `q` with the given names for the free variables.
pub fn print_xq_with(q: &Xq, free: &[String]) -> String {
    let mut p = Printer { names: free.to_vec() };
    let mut s = String::new();
    p.query(&mut s, q).expect("writing to a String");
    s
}

/// Prints `q` with `$root` as the single free variable.
pub fn print_xq(q: &Xq) -> String {
    print_xq_with(q, &["root".to_string()])
}

impl fmt::Display for Xq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_xq(self))
    }
}

// ----------------------------------------------------------------- parsing

const KEYWORDS: &[&str] =
    &["for", "in", "return", "let", "if", "then", "some", "every", "satisfies", "and", "or", "not", "eq"];

struct Parser<'a> {
    c: Cursor<'a>,
    scope: Vec<String>,
}

impl Parser<'_> {
    fn kw(&mut self, w: &str) -> bool {
        self.c.skip_ws();
        let r = self.c.rest();
        if r.starts_with(w) && !r[w.len()..].starts_with(|c: char| c.is_alphanumeric() || c == '_') {
            self.c.eat(w)
        } else {
            false
        }
    }

    fn expect_kw(&mut self, w: &str) -> Result<()> {
        if self.kw(w) {
            Ok(())
        } else {
            Err(self.c.err(format!("expected `{w}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        let r = self.c.rest();
        let len: usize = r.chars().take_while(|c| c.is_alphanumeric() || *c == '_').map(char::len_utf8).sum();
        if len == 0 {
            return Err(self.c.err("expected a variable name"));
        }
        let s = r[..len].to_string();
        self.c.eat(&s);
        Ok(s)
    }

    fn binder_name(&mut self) -> Result<String> {
        self.c.expect("$")?;
        self.ident()
    }

    fn var(&mut self) -> Result<usize> {
        self.c.skip_ws();
        let pos = self.c.pos;
        self.c.expect("$")?;
        let name = self.ident()?;
        self.scope
            .iter()
            .rposition(|n| *n == name)
            .map(|i| i + 1)
            .ok_or_else(|| Error::syntax(pos, format!("unbound variable `${name}`")))
    }

    fn query(&mut self) -> Result<Xq> {
        let first = self.single()?;
        if self.c.eat(",") {
            return Ok(Xq::seq(first, self.query()?));
        }
        Ok(first)
    }

    fn bind<T>(&mut self, name: String, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.scope.push(name);
        let r = f(self);
        self.scope.pop();
        r
    }

    fn single(&mut self) -> Result<Xq> {
        self.c.skip_ws();
        let pos = self.c.pos;
        for (kw, mid) in [("for", "in"), ("some", "in"), ("every", "in")] {
            if self.kw(kw) {
                let name = self.binder_name()?;
                self.expect_kw(mid)?;
                let src = self.single()?;
                self.expect_kw(if kw == "for" { "return" } else { "satisfies" })?;
                let body = self.bind(name.clone(), |p| p.single())?;
                let (a, b) = (Box::new(src), Box::new(body));
                return Ok(match kw {
                    "for" => Xq::For(name, a, b),
                    "some" => Xq::SomeIn(name, a, b),
                    _ => Xq::EveryIn(name, a, b),
                });
            }
        }
        if self.kw("let") {
            let name = self.binder_name()?;
            self.c.expect(":=")?;
            let bound = self.single()?;
            if !is_singleton_form(&bound) {
                return Err(Error::syntax(pos, "let must bind an element constructor or a variable"));
            }
            self.expect_kw("return")?;
            let body = self.bind(name.clone(), |p| p.single())?;
            return Ok(Xq::let_(&name, bound, body));
        }
        if self.kw("if") {
            self.c.expect("(")?;
            let c = self.query()?;
            self.c.expect(")")?;
            self.expect_kw("then")?;
            let a = self.single()?;
            return Ok(Xq::if_(c, a));
        }
        self.or()
    }

    fn or(&mut self) -> Result<Xq> {
        let mut a = self.and()?;
        while self.kw("or") {
            a = Xq::Or(Box::new(a), Box::new(self.and()?));
        }
        Ok(a)
    }

    fn and(&mut self) -> Result<Xq> {
        let mut a = self.cmp()?;
        while self.kw("and") {
            a = Xq::And(Box::new(a), Box::new(self.cmp()?));
        }
        Ok(a)
    }

    fn cmp(&mut self) -> Result<Xq> {
        self.c.skip_ws();
        let pos = self.c.pos;
        let a = self.primary()?;
        let mode = if self.c.eat("=") {
            EqMode::Deep
        } else if self.kw("eq") {
            EqMode::Atomic
        } else {
            return Ok(a);
        };
        let b = self.primary()?;
        match (a, b) {
            (Xq::Var(i), Xq::Var(j)) => Ok(Xq::VarEq(i, j, mode)),
            (a, b) if mode == EqMode::Deep => Ok(Xq::QueryEq(Box::new(a), Box::new(b))),
            _ => Err(Error::syntax(pos, "`eq` compares two variables")),
        }
    }

    fn primary(&mut self) -> Result<Xq> {
        self.c.skip_ws();
        if self.kw("not") {
            self.c.expect("(")?;
            let a = self.query()?;
            self.c.expect(")")?;
            return Ok(Xq::Not(Box::new(a)));
        }
        if self.c.eat("(") {
            let q = self.query()?;
            self.c.expect(")")?;
            return Ok(q);
        }
        if self.c.rest().starts_with('<') {
            return self.element();
        }
        if self.c.rest().starts_with('$') {
            let v = self.var()?;
            let mut steps = Vec::new();
            while self.c.rest().starts_with('/') {
                steps.push(self.step()?);
            }
            return Ok(match steps.len() {
                0 => Xq::Var(v),
                1 => {
                    let (ax, t) = steps.pop().expect("one step");
                    Xq::Step(v, ax, t)
                }
                _ => Xq::Path(v, steps),
            });
        }
        let r = self.c.rest();
        if let Some(k) = KEYWORDS.iter().find(|k| r.starts_with(*k)) {
            return Err(self.c.err(format!("unexpected `{k}`")));
        }
        Err(self.c.err("expected a query"))
    }

    fn step(&mut self) -> Result<(Axis, Test)> {
        let mut axis = Axis::Child;
        if self.c.eat("//") {
            axis = Axis::Descendant;
        } else {
            self.c.expect("/")?;
        }
        let r = self.c.rest();
        if let Some(i) = r.find("::") {
            let name = &r[..i];
            if name.chars().all(|c| c.is_alphanumeric() || c == '-') && !name.is_empty() {
                axis = match name {
                    "child" if axis == Axis::Child => Axis::Child,
                    "descendant" if axis == Axis::Child => Axis::Descendant,
                    other => {
                        return Err(self.c.err(format!(
                            "axis `{other}` is not supported; use child or descendant"
                        )))
                    }
                };
                self.c.eat(&format!("{name}::"));
            }
        }
        if self.c.eat("*") {
            return Ok((axis, Test::Star));
        }
        Ok((axis, Test::Name(self.tag()?.into())))
    }

    fn tag(&mut self) -> Result<String> {
        let r = self.c.rest();
        let len: usize = r
            .chars()
            .take_while(|&c| valid_tag(c.encode_utf8(&mut [0; 4])) && !matches!(c, ',' | '(' | ')' | '=' | '$'))
            .map(char::len_utf8)
            .sum();
        if len == 0 {
            return Err(self.c.err("expected a tag name"));
        }
        let s = r[..len].to_string();
        self.c.eat(&s);
        Ok(s)
    }

    fn element(&mut self) -> Result<Xq> {
        self.c.expect("<")?;
        let a = self.tag()?;
        if self.c.eat("/>") {
            return Ok(Xq::leaf(&a));
        }
        self.c.expect(">")?;
        let mut parts = Vec::new();
        loop {
            self.c.skip_ws();
            if self.c.rest().starts_with("</") {
                break;
            }
            if self.c.eat("{") {
                parts.push(self.query()?);
                self.c.expect("}")?;
            } else if self.c.rest().starts_with('<') {
                parts.push(self.element()?);
            } else {
                return Err(self.c.err("expected `{`, an element, or a closing tag"));
            }
        }
        self.c.expect("</")?;
        let close = self.tag()?;
        if close != a {
            return Err(self.c.err(format!("`</{close}>` closes `<{a}>`")));
        }
        self.c.expect(">")?;
        let body = parts.into_iter().rev().reduce(|acc, p| Xq::seq(p, acc));
        Ok(Xq::Elem(a.into(), body.map(Box::new)))
    }
}

/// Parses a query whose free variables are `free`, bound at levels `1..`.
pub fn parse_xq_with(text: &str, free: &[&str]) -> Result<Xq> {
    let mut p = Parser { c: Cursor::new(text), scope: free.iter().map(|s| s.to_string()).collect() };
    let q = p.query()?;
    p.c.finish()?;
    Ok(q)
}

/// Parses a query over the single free variable `$root`.
pub fn parse_xq(text: &str) -> Result<Xq> {
    parse_xq_with(text, &["root"])
}

// --------------------------------------------------------------- desugaring

fn not_pattern(a: Xq, depth: usize) -> Xq {
    let probe = Xq::elem("a", Xq::if_(a, Xq::leaf("b")));
    Xq::let_("u", probe, Xq::let_("w", Xq::leaf("a"), Xq::VarEq(depth + 1, depth + 2, EqMode::Deep)))
}

fn path_loops(v: usize, steps: &[(Axis, Test)], depth: usize) -> Xq {
    let (ax, t) = steps[0].clone();
    let first = Xq::Step(v, ax, t);
    if steps.len() == 1 {
        return first;
    }
    Xq::for_("y", first, path_loops(depth + 1, &steps[1..], depth + 1))
}

fn desugar_at(q: &Xq, d: usize, keep_not: bool) -> Xq {
    use Xq::*;
    let bx = |x: Xq| Box::new(x);
    match q {
        Elem(a, b) => Elem(a.clone(), b.as_ref().map(|b| bx(desugar_at(b, d, keep_not)))),
        Var(_) | Step(..) | VarEq(..) => q.clone(),
        Seq(a, b) | Or(a, b) => Seq(bx(desugar_at(a, d, keep_not)), bx(desugar_at(b, d, keep_not))),
        If(a, b) | And(a, b) => If(bx(desugar_at(a, d, keep_not)), bx(desugar_at(b, d, keep_not))),
        QueryEq(a, b) => QueryEq(bx(desugar_at(a, d, keep_not)), bx(desugar_at(b, d, keep_not))),
        For(n, a, b) | SomeIn(n, a, b) => For(n.clone(), bx(desugar_at(a, d, keep_not)), bx(desugar_at(b, d + 1, keep_not))),
        Let(n, a, b) => Let(n.clone(), bx(desugar_at(a, d, keep_not)), bx(desugar_at(b, d + 1, keep_not))),
        Not(a) => {
            let a = desugar_at(a, d, keep_not);
            if keep_not {
                Not(bx(a))
            } else {
                not_pattern(a, d)
            }
        }
        EveryIn(n, a, b) => {
            let inner = For(n.clone(), bx(desugar_at(a, d, keep_not)), bx(desugar_at(&Not(b.clone()), d + 1, keep_not)));
            if keep_not {
                Not(bx(inner))
            } else {
                not_pattern(inner, d)
            }
        }
        Path(v, steps) => path_loops(*v, steps, d),
    }
}

/// Rewrites derived forms into the core grammar. `free` is the number of
/// free variables.
pub fn xq_desugar(q: &Xq, free: usize) -> Xq {
    desugar_at(q, free, false)
}

/// Like [`xq_desugar`] but keeps `not`.
pub fn xq_desugar_keep_not(q: &Xq, free: usize) -> Xq {
    desugar_at(q, free, true)
}

// --------------------------------------------------------------- evaluation

struct Eval {
    env: Vec<Tree>,
    made: u64,
    limit: u64,
}

fn yes() -> Vec<Tree> {
    vec![Tree::leaf("yes")]
}

impl Eval {
    fn charge(&mut self, ts: &[Tree]) -> Result<()> {
        self.made += ts.iter().map(|t| t.node_count() as u64).sum::<u64>();
        if self.made > self.limit {
            return Err(Error::Budget(self.limit));
        }
        Ok(())
    }

    fn var(&self, i: usize) -> Result<&Tree> {
        self.env
            .get(i.wrapping_sub(1))
            .ok_or_else(|| Error::Runtime(format!("variable level {i} is unbound")))
    }

    fn step(&self, i: usize, ax: Axis, t: &Test) -> Result<Vec<Tree>> {
        let root = self.var(i)?;
        Ok(match ax {
            Axis::Child => root.children.iter().filter(|c| t.matches(c)).cloned().collect(),
            Axis::Descendant => root.descendants().into_iter().filter(|c| t.matches(c)).cloned().collect(),
        })
    }

    fn with<T>(&mut self, t: Tree, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.env.push(t);
        let r = f(self);
        self.env.pop();
        r
    }

    fn eval(&mut self, q: &Xq) -> Result<Vec<Tree>> {
        use Xq::*;
        let out = match q {
            Elem(a, body) => {
                let children = match body {
                    Option::Some(b) => self.eval(b)?,
                    None => Vec::new(),
                };
                vec![Tree { label: a.clone(), children }]
            }
            Seq(a, b) | Or(a, b) => {
                let mut l = self.eval(a)?;
                l.extend(self.eval(b)?);
                l
            }
            Var(i) => vec![self.var(*i)?.clone()],
            Step(i, ax, t) => self.step(*i, *ax, t)?,
            For(_, src, body) | SomeIn(_, src, body) => {
                let mut out = Vec::new();
                for t in self.eval(src)? {
                    out.extend(self.with(t, |e| e.eval(body))?);
                }
                out
            }
            Let(_, bound, body) => {
                let mut l = self.eval(bound)?;
                if l.len() != 1 {
                    return Err(Error::Runtime(format!("let bound {} nodes", l.len())));
                }
                let t = l.pop().expect("one node");
                self.with(t, |e| e.eval(body))?
            }
            If(c, a) | And(c, a) => {
                if self.eval(c)?.is_empty() {
                    Vec::new()
                } else {
                    self.eval(a)?
                }
            }
            VarEq(i, j, mode) => {
                let (a, b) = (self.var(*i)?, self.var(*j)?);
                let eq = match mode {
                    EqMode::Atomic => {
                        if !a.is_leaf() || !b.is_leaf() {
                            return Err(Error::Runtime("atomic equality on a node with children".into()));
                        }
                        a.label == b.label
                    }
                    _ => a == b,
                };
                if eq {
                    yes()
                } else {
                    Vec::new()
                }
            }
            QueryEq(a, b) => {
                if self.eval(a)? == self.eval(b)? {
                    yes()
                } else {
                    Vec::new()
                }
            }
            Not(a) => {
                if self.eval(a)?.is_empty() {
                    yes()
                } else {
                    Vec::new()
                }
            }
            EveryIn(_, src, body) => {
                let mut all = true;
                for t in self.eval(src)? {
                    if self.with(t, |e| e.eval(body))?.is_empty() {
                        all = false;
                        break;
                    }
                }
                if all {
                    yes()
                } else {
                    Vec::new()
                }
            }
            Path(v, steps) => {
                let (ax, t) = &steps[0];
                let first = self.step(*v, *ax, t)?;
                if steps.len() == 1 {
                    first
                } else {
                    let rest = Path(self.env.len() + 1, steps[1..].to_vec());
                    let mut out = Vec::new();
                    for n in first {
                        out.extend(self.with(n, |e| e.eval(&rest))?);
                    }
                    out
                }
            }
        };
        self.charge(&out)?;
        Ok(out)
    }
}

/// Evaluates `q` with `env[i - 1]` bound to level `i`.
pub fn eval_xq(q: &Xq, env: &[Tree]) -> Result<Vec<Tree>> {
    Eval { env: env.to_vec(), made: 0, limit: max_value_nodes() }.eval(q)
}

/// Runs `q` on `doc` and reports whether the single result node has children.
pub fn decide_xq(q: &Xq, doc: &Tree) -> Result<bool> {
    let out = eval_xq(q, std::slice::from_ref(doc))?;
    match out.as_slice() {
        [t] => Ok(t.tag_length() > 2),
        _ => Err(Error::Runtime(format!("decision needs exactly one result node, got {}", out.len()))),
    }
}

/// Writes a result sequence as concatenated XML.
pub fn print_seq(ts: &[Tree]) -> String {
    let mut s = String::new();
    for t in ts {
        let _ = write!(s, "{t}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xml::parse_xml;

    fn run(q: &str, doc: &str) -> String {
        let q = parse_xq(q).unwrap();
        print_seq(&eval_xq(&q, &[parse_xml(doc).unwrap()]).unwrap())
    }

    #[test]
    fn empty_element() {
        assert_eq!(run("<a/>", "<z/>"), "<a/>");
    }

    #[test]
    fn element_wraps_body() {
        assert_eq!(run("<a>{$root/b, <c/>}</a>", "<r><b/><x/><b><y/></b></r>"), "<a><b/><b><y/></b><c/></a>");
    }

    #[test]
    fn sequence_concatenates() {
        assert_eq!(run("(<a/>, <b/>), <c/>", "<z/>"), "<a/><b/><c/>");
    }

    #[test]
    fn for_concatenates_per_binding() {
        assert_eq!(run("for $x in $root/child::b return <c/>", "<a><b/><b/></a>"), "<c/><c/>");
        assert_eq!(run("for $x in $root/* return <w>{$x}</w>", "<a><b/><c/></a>"), "<w><b/></w><w><c/></w>");
    }

    #[test]
    fn let_binds_a_constructed_node() {
        assert_eq!(run("let $y := <a>{$root}</a> return $y/*", "<r><s/></r>"), "<r><s/></r>");
        assert!(parse_xq("let $y := $root/child::b return $y").is_err());
    }

    #[test]
    fn variable_returns_bound_tree() {
        assert_eq!(run("$root", "<a><b/></a>"), "<a><b/></a>");
    }

    #[test]
    fn child_step_in_document_order() {
        assert_eq!(run("$root/child::b", "<a><b><c/></b><d/><b/></a>"), "<b><c/></b><b/>");
    }

    #[test]
    fn descendant_step_in_preorder() {
        assert_eq!(run("$root/descendant::*", "<a><b><c/></b></a>"), "<b><c/></b><c/>");
        assert_eq!(run("$root//c", "<a><c><c/></c></a>"), "<c><c/></c><c/>");
    }

    #[test]
    fn if_yields_empty_on_failed_condition() {
        assert_eq!(run("if ($root/b) then <yes/>", "<a><b/></a>"), "<yes/>");
        assert_eq!(run("if ($root/x) then <yes/>", "<a><b/></a>"), "");
    }

    #[test]
    fn variable_equality_yields_yes() {
        let q = "let $x := <a><b/></a> return let $y := <a><b/></a> return $x = $y";
        assert_eq!(run(q, "<z/>"), "<yes/>");
        let q = "let $x := <a><b/></a> return let $y := <a><c/></a> return $x = $y";
        assert_eq!(run(q, "<z/>"), "");
        assert!(eval_xq(&parse_xq("let $x := <a><b/></a> return $x eq $x").unwrap(), &[Tree::leaf("z")]).is_err());
        assert_eq!(run("for $x in $root/* return for $y in $root/* return $x eq $y", "<r><a/><b/></r>"), "<yes/><yes/>");
    }

    #[test]
    fn derived_forms_match_their_desugaring() {
        let doc = parse_xml("<r><a><b/></a><a><c/></a><d/></r>").unwrap();
        for q in [
            "$root/a/b",
            "not($root/d)",
            "not($root/e)",
            "some $x in $root/a satisfies $x/c",
            "every $x in $root/a satisfies $x/*",
            "every $x in $root/* satisfies $x/*",
            "$root/a and $root/d",
            "$root/e or $root/d",
            "<w>{$root/a/*}</w> = <w><b/><c/></w>",
        ] {
            let p = parse_xq(q).unwrap();
            let d = xq_desugar(&p, 1);
            assert!(d.is_core(), "{d}");
            check_xq(&d, 1).unwrap();
            assert_eq!(eval_xq(&p, &[doc.clone()]).unwrap(), eval_xq(&d, &[doc.clone()]).unwrap(), "{q} vs {d}");
        }
    }

    #[test]
    fn printing_roundtrips_and_disambiguates_shadowing() {
        for q in [
            "for $x in $root/child::b return <c/>",
            "let $y := <a>{$root}</a> return $y",
            "if ($root/a) then <a>{$root/a/*, <b/>}</a>",
            "every $x in $root/* satisfies not($x/b)",
        ] {
            let p = parse_xq(q).unwrap();
            assert_eq!(parse_xq(&print_xq(&p)).unwrap(), p);
        }
        let q = Xq::for_("y", Xq::child(1, "*"), Xq::for_("y", Xq::child(2, "*"), Xq::Var(2)));
        let text = print_xq(&q);
        assert_eq!(text, "for $y in $root/* return for $y_3 in $y/* return $y");
        assert_eq!(print_xq(&parse_xq(&text).unwrap()), text);
    }

    #[test]
    fn rejects_other_axes_and_unbound_variables() {
        assert!(parse_xq("$root/parent::a").is_err());
        assert!(parse_xq("$nope").is_err());
    }

    #[test]
    fn decision_convention() {
        let doc = Tree::leaf("z");
        assert!(decide_xq(&parse_xq("<a><b/></a>").unwrap(), &doc).unwrap());
        assert!(!decide_xq(&parse_xq("<a/>").unwrap(), &doc).unwrap());
        assert!(decide_xq(&parse_xq("<a/>, <b/>").unwrap(), &doc).is_err());
    }
}
