//! Nonrecursive logic programs over path terms, and the compilation of
//! positive core queries (plus `not` under the marked encoding) into them.
//!
//! Variables are classified by name: `X`, `Y`, `Z` (optionally followed by
//! digits) match any sequence of steps, including none; `u`, `v`, `w`
//! match a nonempty sequence; `i`, `j`, `k` match exactly one step.
//! Anything else is a constant, and constants spelled like variables are
//! written quoted.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::detree::{encode_det, Encoding, Path, PathSet, PathTerm};
use crate::error::{Error, Result};
use crate::ma::typing::infer;
use crate::ma::Expr;
use crate::value::{is_bare_char, type_of, Cursor, Kind, Type, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarClass {
    Prefix,
    Suffix,
    Step,
}

fn var_class(name: &str) -> Option<VarClass> {
    let mut cs = name.chars();
    let first = cs.next()?;
    if !cs.all(|c| c.is_ascii_digit()) {
        return None;
    }
    match first {
        'X' | 'Y' | 'Z' => Some(VarClass::Prefix),
        'u' | 'v' | 'w' => Some(VarClass::Suffix),
        'i' | 'j' | 'k' => Some(VarClass::Step),
        _ => None,
    }
}

/// A single-step pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PTerm {
    Const(PathTerm),
    Var(String),
    Pair(Box<PTerm>, Box<PTerm>),
}

/// One position of an argument pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PItem {
    Term(PTerm),
    Seq(String),
}

pub type Pattern = Vec<PItem>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Pattern>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

/// A rule; facts are rules with an empty ground body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<Literal>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicProgram {
    pub goal: String,
    pub rules: Vec<Rule>,
}

fn write_const(f: &mut impl fmt::Write, t: &PathTerm) -> fmt::Result {
    match t {
        PathTerm::Lab(l) if var_class(l).is_some() || l.is_empty() || !l.chars().all(is_bare_char) => {
            f.write_char('"')?;
            for c in l.chars() {
                if c == '"' || c == '\\' {
                    f.write_char('\\')?;
                }
                f.write_char(c)?;
            }
            f.write_char('"')
        }
        PathTerm::Pair(a, b) => {
            f.write_char('(')?;
            write_const_chain(f, a, b)?;
            f.write_char(')')
        }
        other => write!(f, "{other}"),
    }
}

fn write_const_chain(f: &mut impl fmt::Write, a: &PathTerm, b: &PathTerm) -> fmt::Result {
    write_const(f, a)?;
    f.write_char('.')?;
    match b {
        PathTerm::Pair(c, d) => write_const_chain(f, c, d),
        _ => write_const(f, b),
    }
}

fn write_pterm(f: &mut impl fmt::Write, t: &PTerm, in_chain: bool) -> fmt::Result {
    match t {
        PTerm::Const(c) => write_const(f, c),
        PTerm::Var(v) => f.write_str(v),
        PTerm::Pair(a, b) => {
            if !in_chain {
                f.write_char('(')?;
            }
            write_pterm(f, a, false)?;
            f.write_char('.')?;
            write_pterm(f, b, true)?;
            if !in_chain {
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.pred)?;
        for (k, arg) in self.args.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            if arg.is_empty() {
                f.write_str("ε")?;
            }
            for (n, it) in arg.iter().enumerate() {
                if n > 0 {
                    f.write_char('.')?;
                }
                match it {
                    PItem::Term(t) => write_pterm(f, t, false)?,
                    PItem::Seq(v) => f.write_str(v)?,
                }
            }
        }
        f.write_char(')')
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        for (k, l) in self.body.iter().enumerate() {
            f.write_str(if k == 0 { " :- " } else { ", " })?;
            if l.negated {
                f.write_str("not ")?;
            }
            write!(f, "{}", l.atom)?;
        }
        f.write_char('.')
    }
}

impl fmt::Display for LogicProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "% goal: {}", self.goal)?;
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

pub fn print_lp(p: &LogicProgram) -> String {
    p.to_string()
}

/// Parses the text form. A `% goal: NAME` comment names the goal; without
/// one, the head of the last rule is the goal.
pub fn parse_lp(text: &str) -> Result<LogicProgram> {
    let mut goal = None;
    let mut cleaned = String::with_capacity(text.len());
    for line in text.split_inclusive('\n') {
        let t = line.trim_start();
        if let Some(c) = t.strip_prefix('%') {
            if let Some(g) = c.trim().strip_prefix("goal:") {
                goal = Some(g.trim().to_string());
            }
            cleaned.extend(line.chars().map(|c| if c == '\n' { '\n' } else { ' ' }));
        } else {
            cleaned.push_str(line);
        }
    }
    let mut c = Cursor::new(&cleaned);
    let mut rules = Vec::new();
    while !c.at_end() {
        let head = atom(&mut c)?;
        let mut body = Vec::new();
        if c.eat(":-") {
            loop {
                c.skip_ws();
                let negated = c.rest().starts_with("not") && c.rest()[3..].starts_with(char::is_whitespace);
                if negated {
                    c.eat("not");
                }
                body.push(Literal { atom: atom(&mut c)?, negated });
                if !c.eat(",") {
                    break;
                }
            }
        }
        c.expect(".")?;
        rules.push(Rule { head, body });
    }
    let goal = match goal {
        Some(g) => g,
        None => rules.last().map(|r| r.head.pred.clone()).ok_or_else(|| c.err("empty program without a goal"))?,
    };
    Ok(LogicProgram { goal, rules })
}

fn atom(c: &mut Cursor) -> Result<Atom> {
    c.skip_ws();
    let pred = c.name()?;
    c.expect("(")?;
    let mut args = vec![pattern(c)?];
    while c.eat(",") {
        args.push(pattern(c)?);
    }
    c.expect(")")?;
    if args.len() > 2 {
        return Err(c.err("predicates take one or two arguments"));
    }
    Ok(Atom { pred, args })
}

fn pattern(c: &mut Cursor) -> Result<Pattern> {
    c.skip_ws();
    if c.eat("ε") {
        return Ok(Vec::new());
    }
    let mut out = vec![item(c)?];
    while c.eat(".") {
        out.push(item(c)?);
    }
    Ok(out)
}

fn item(c: &mut Cursor) -> Result<PItem> {
    c.skip_ws();
    if c.eat("(") {
        let inner = pattern(c)?;
        if inner.len() < 2 {
            return Err(c.err("a parenthesized step needs at least two components"));
        }
        c.expect(")")?;
        let mut terms = inner
            .into_iter()
            .map(|it| match it {
                PItem::Term(t) => Ok(t),
                PItem::Seq(v) => Err(c.err(format!("sequence variable `{v}` inside a composite step"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut acc = terms.pop().expect("two components");
        while let Some(t) = terms.pop() {
            acc = PTerm::Pair(Box::new(t), Box::new(acc));
        }
        return Ok(PItem::Term(acc));
    }
    if c.eat("⟨⟩") || c.eat("<>") {
        return Ok(PItem::Term(PTerm::Const(PathTerm::Unit)));
    }
    if c.eat("[]") {
        return Ok(PItem::Term(PTerm::Const(PathTerm::Empty)));
    }
    let quoted = c.rest().starts_with('"');
    let name = c.name()?;
    Ok(match (quoted, var_class(&name)) {
        (false, Some(VarClass::Step)) => PItem::Term(PTerm::Var(name)),
        (false, Some(_)) => PItem::Seq(name),
        _ => PItem::Term(PTerm::Const(PathTerm::Lab(name.into()))),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Bound {
    Term(PathTerm),
    Seq(Vec<PathTerm>),
}

type Bindings = HashMap<String, Bound>;

fn match_term(p: &PTerm, t: &PathTerm, b: &mut Bindings) -> bool {
    match p {
        PTerm::Const(c) => c == t,
        PTerm::Var(v) => match b.get(v) {
            Some(Bound::Term(x)) => x == t,
            Some(Bound::Seq(_)) => false,
            None => {
                b.insert(v.clone(), Bound::Term(t.clone()));
                true
            }
        },
        PTerm::Pair(l, r) => match t {
            PathTerm::Pair(a, c) => match_term(l, a, b) && match_term(r, c, b),
            _ => false,
        },
    }
}

/// All ways of matching `pat` against the whole of `path`.
fn match_pattern(pat: &[PItem], path: &[PathTerm], b: &Bindings, out: &mut Vec<Bindings>) {
    let Some((first, rest)) = pat.split_first() else {
        if path.is_empty() {
            out.push(b.clone());
        }
        return;
    };
    match first {
        PItem::Term(t) => {
            let Some((h, tail)) = path.split_first() else { return };
            let mut b2 = b.clone();
            if match_term(t, h, &mut b2) {
                match_pattern(rest, tail, &b2, out);
            }
        }
        PItem::Seq(v) => match b.get(v) {
            Some(Bound::Seq(s)) => {
                if path.starts_with(s) {
                    match_pattern(rest, &path[s.len()..], b, out);
                }
            }
            Some(Bound::Term(_)) => {}
            None => {
                let min = usize::from(var_class(v) != Some(VarClass::Prefix));
                let fixed = rest.iter().filter(|it| matches!(it, PItem::Term(_))).count();
                for n in min..=path.len().saturating_sub(fixed) {
                    let mut b2 = b.clone();
                    b2.insert(v.clone(), Bound::Seq(path[..n].to_vec()));
                    match_pattern(rest, &path[n..], &b2, out);
                }
            }
        },
    }
}

fn inst_term(t: &PTerm, b: &Bindings) -> Option<PathTerm> {
    match t {
        PTerm::Const(c) => Some(c.clone()),
        PTerm::Var(v) => match b.get(v)? {
            Bound::Term(x) => Some(x.clone()),
            Bound::Seq(_) => None,
        },
        PTerm::Pair(l, r) => Some(PathTerm::pair(inst_term(l, b)?, inst_term(r, b)?)),
    }
}

fn instantiate(pat: &[PItem], b: &Bindings) -> Option<Path> {
    let mut out = Vec::new();
    for it in pat {
        match it {
            PItem::Term(t) => out.push(inst_term(t, b)?),
            PItem::Seq(v) => match b.get(v)? {
                Bound::Seq(s) => out.extend(s.iter().cloned()),
                Bound::Term(_) => return None,
            },
        }
    }
    Some(out)
}

fn vars_of(a: &Atom, out: &mut BTreeSet<String>) {
    fn term(t: &PTerm, out: &mut BTreeSet<String>) {
        match t {
            PTerm::Var(v) => {
                out.insert(v.clone());
            }
            PTerm::Pair(l, r) => {
                term(l, out);
                term(r, out);
            }
            PTerm::Const(_) => {}
        }
    }
    for arg in &a.args {
        for it in arg {
            match it {
                PItem::Term(t) => term(t, out),
                PItem::Seq(v) => {
                    out.insert(v.clone());
                }
            }
        }
    }
}

type Tuple = Vec<Path>;

/// Derived facts, indexed by predicate and first argument.
#[derive(Debug, Default, Clone)]
pub struct Model {
    facts: HashMap<String, BTreeMap<Path, BTreeSet<Tuple>>>,
}

impl Model {
    fn insert(&mut self, pred: &str, t: Tuple) {
        let key = t[0].clone();
        self.facts.entry(pred.to_string()).or_default().entry(key).or_default().insert(t);
    }

    fn contains(&self, pred: &str, t: &Tuple) -> bool {
        self.facts.get(pred).and_then(|m| m.get(&t[0])).is_some_and(|s| s.contains(t))
    }

    fn candidates<'a>(&'a self, pred: &str, key: Option<&Path>) -> Box<dyn Iterator<Item = &'a Tuple> + 'a> {
        let Some(m) = self.facts.get(pred) else { return Box::new(std::iter::empty()) };
        match key {
            Some(k) => Box::new(m.get(k).into_iter().flatten()),
            None => Box::new(m.values().flatten()),
        }
    }

    /// Second arguments of `pred` facts at the empty prefix.
    pub fn paths(&self, pred: &str) -> PathSet {
        self.candidates(pred, Some(&Vec::new())).filter_map(|t| t.get(1).cloned()).collect()
    }

    pub fn fact_count(&self) -> usize {
        self.facts.values().flat_map(|m| m.values()).map(BTreeSet::len).sum()
    }
}

impl LogicProgram {
    /// Checks safety and returns predicates in dependency order.
    pub fn stratify(&self) -> Result<Vec<String>> {
        let mut deps: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for r in &self.rules {
            let mut pos = BTreeSet::new();
            let mut need = BTreeSet::new();
            vars_of(&r.head, &mut need);
            for l in &r.body {
                if l.negated {
                    vars_of(&l.atom, &mut need);
                } else {
                    vars_of(&l.atom, &mut pos);
                }
            }
            if let Some(v) = need.difference(&pos).next() {
                return Err(Error::Structure(format!("unsafe variable `{v}` in `{r}`")));
            }
            if r.body.is_empty() && r.head.args.iter().any(|a| instantiate(a, &Bindings::new()).is_none()) {
                return Err(Error::Structure(format!("fact `{r}` is not ground")));
            }
            let e = deps.entry(&r.head.pred).or_default();
            for l in &r.body {
                e.insert(&l.atom.pred);
            }
        }
        let mut order = Vec::new();
        let mut state: HashMap<&str, u8> = HashMap::new();
        fn visit<'a>(
            p: &'a str,
            deps: &BTreeMap<&'a str, BTreeSet<&'a str>>,
            state: &mut HashMap<&'a str, u8>,
            order: &mut Vec<String>,
        ) -> Result<()> {
            match state.get(p) {
                Some(2) => return Ok(()),
                Some(1) => return Err(Error::Structure(format!("recursion through `{p}`"))),
                _ => {}
            }
            state.insert(p, 1);
            for d in deps.get(p).into_iter().flatten() {
                visit(d, deps, state, order)?;
            }
            state.insert(p, 2);
            order.push(p.to_string());
            Ok(())
        }
        for p in deps.keys() {
            visit(p, &deps, &mut state, &mut order)?;
        }
        Ok(order)
    }

    /// Bottom-up evaluation, one predicate at a time.
    pub fn evaluate(&self) -> Result<Model> {
        let order = self.stratify()?;
        let mut by_head: HashMap<&str, Vec<&Rule>> = HashMap::new();
        for r in &self.rules {
            by_head.entry(&r.head.pred).or_default().push(r);
        }
        let mut m = Model::default();
        for p in &order {
            for r in by_head.get(p.as_str()).into_iter().flatten() {
                let mut sols = vec![Bindings::new()];
                for l in r.body.iter().filter(|l| !l.negated) {
                    let mut next = Vec::new();
                    for b in &sols {
                        let key = instantiate(&l.atom.args[0], b);
                        for t in m.candidates(&l.atom.pred, key.as_ref()) {
                            if t.len() != l.atom.args.len() {
                                continue;
                            }
                            let mut cur = vec![b.clone()];
                            for (pat, path) in l.atom.args.iter().zip(t) {
                                let mut nx = Vec::new();
                                for c in &cur {
                                    match_pattern(pat, path, c, &mut nx);
                                }
                                cur = nx;
                            }
                            next.extend(cur);
                        }
                    }
                    sols = next;
                }
                for b in sols {
                    let blocked = r.body.iter().filter(|l| l.negated).any(|l| {
                        let t: Option<Tuple> = l.atom.args.iter().map(|a| instantiate(a, &b)).collect();
                        t.is_some_and(|t| m.contains(&l.atom.pred, &t))
                    });
                    if blocked {
                        continue;
                    }
                    let t: Tuple = r
                        .head
                        .args
                        .iter()
                        .map(|a| instantiate(a, &b))
                        .collect::<Option<_>>()
                        .ok_or_else(|| Error::Structure(format!("head of `{r}` not fully bound")))?;
                    m.insert(p, t);
                }
            }
        }
        Ok(m)
    }
}

/// Paths of the goal predicate at the empty prefix.
pub fn eval_lp(p: &LogicProgram) -> Result<PathSet> {
    Ok(p.evaluate()?.paths(&p.goal))
}

/// True iff the goal holds a member whose value is the unit tuple.
pub fn goal_true(p: &LogicProgram) -> Result<bool> {
    Ok(eval_lp(p)?.iter().any(|path| path.len() == 2 && path[1] == PathTerm::Unit))
}

struct Compiler {
    enc: Encoding,
    sem: Kind,
    next: usize,
    rules: Vec<Rule>,
}

/// Renders a constant for splicing into rule text.
fn lit(l: &str) -> String {
    let mut s = String::new();
    write_const(&mut s, &PathTerm::Lab(l.into())).expect("writing to a String");
    s
}

fn lits(p: &[crate::value::Label]) -> String {
    p.iter().map(|l| lit(l)).collect::<Vec<_>>().join(".")
}

impl Compiler {
    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("p{}", self.next)
    }

    fn rule(&mut self, text: &str) -> Result<()> {
        let p = parse_lp(text)?;
        self.rules.extend(p.rules);
        Ok(())
    }

    fn marked(&self) -> bool {
        self.enc == Encoding::Marked
    }

    fn comp(&mut self, q: &Expr, inp: &str, t: &Type) -> Result<String> {
        use Expr::*;
        let out = match q {
            Compose(f, g) => {
                let mid = self.comp(f, inp, t)?;
                let tf = infer(f, t, self.sem)?;
                return self.comp(g, &mid, &tf);
            }
            Tuple(fs) if !fs.is_empty() => {
                let mut parts = Vec::new();
                for (l, f) in fs {
                    parts.push((l.clone(), self.comp(f, inp, t)?));
                }
                let p = self.fresh();
                for (l, pf) in parts {
                    self.rule(&format!("{p}(X, {}.v) :- {pf}(X, v).", lit(&l)))?;
                }
                p
            }
            Union(f, g) => {
                if let (Proj(a), Proj(b)) = (&**f, &**g) {
                    let p = self.fresh();
                    self.rule(&format!("{p}(X, (1.i).v) :- {inp}(X, {}.i.v).", lits(a)))?;
                    self.rule(&format!("{p}(X, (2.i).v) :- {inp}(X, {}.i.v).", lits(b)))?;
                    if self.marked() {
                        self.rule(&format!("{p}(X, []) :- {inp}(X, {}.[]).", lits(a)))?;
                    }
                    p
                } else {
                    let pf = self.comp(f, inp, t)?;
                    let pg = self.comp(g, inp, t)?;
                    let p = self.fresh();
                    self.rule(&format!("{p}(X, (1.i).v) :- {pf}(X, i.v)."))?;
                    self.rule(&format!("{p}(X, (2.i).v) :- {pg}(X, i.v)."))?;
                    if self.marked() {
                        self.rule(&format!("{p}(X, []) :- {pf}(X, [])."))?;
                    }
                    p
                }
            }
            Map(f) => {
                let start = self.fresh();
                self.rule(&format!("{start}(X.i, v) :- {inp}(X, i.v)."))?;
                let elem = match t {
                    Type::Coll(_, e) => (**e).clone(),
                    Type::Unknown => Type::Unknown,
                    other => return Err(Error::ty(q.to_string(), format!("map over `{other}`"))),
                };
                let pf = self.comp(f, &start, &elem)?;
                let p = self.fresh();
                self.rule(&format!("{p}(X, i.v) :- {pf}(X.i, v)."))?;
                if self.marked() {
                    self.rule(&format!("{p}(X, []) :- {inp}(X, [])."))?;
                }
                p
            }
            _ => {
                let p = self.fresh();
                self.leaf(q, inp, &p, t)?;
                p
            }
        };
        Ok(out)
    }

    fn leaf(&mut self, q: &Expr, inp: &str, p: &str, t: &Type) -> Result<()> {
        use Expr::*;
        let m = self.marked();
        match q {
            Id => self.rule(&format!("{p}(X, v) :- {inp}(X, v).")),
            Const(c) => self.rule(&format!("{p}(X, {}) :- {inp}(X, v).", lit(c))),
            Empty if m => self.rule(&format!("{p}(X, []) :- {inp}(X, v).")),
            Empty => Ok(()),
            Unit | Tuple(_) => self.rule(&format!("{p}(X, ⟨⟩) :- {inp}(X, v).")),
            Sng => {
                self.rule(&format!("{p}(X, s.v) :- {inp}(X, v)."))?;
                if m {
                    self.rule(&format!("{p}(X, []) :- {inp}(X, v)."))?;
                }
                Ok(())
            }
            Proj(a) => self.rule(&format!("{p}(X, v) :- {inp}(X, {}.v).", lits(a))),
            Flatten => {
                self.rule(&format!("{p}(X, (i.j).v) :- {inp}(X, i.j.v)."))?;
                if m {
                    self.rule(&format!("{p}(X, []) :- {inp}(X, [])."))?;
                }
                Ok(())
            }
            EqAtomic(a, b) => {
                self.rule(&format!("{p}(X, s.⟨⟩) :- {inp}(X, {}.v), {inp}(X, {}.v).", lits(a), lits(b)))?;
                if m {
                    self.rule(&format!("{p}(X, []) :- {inp}(X, v)."))?;
                }
                Ok(())
            }
            PairWith(a) => {
                let Type::Tuple(fs) = t else {
                    return Err(Error::ty(q.to_string(), format!("pairwith over `{t}`")));
                };
                let la = lit(a);
                self.rule(&format!("{p}(X, i.{la}.v) :- {inp}(X, {la}.i.v)."))?;
                for (l, _) in fs.iter().filter(|(l, _)| l != a) {
                    self.rule(&format!("{p}(X, i.{}.w) :- {inp}(X, {la}.i.v), {inp}(X, {}.w).", lit(l), lit(l)))?;
                }
                if m {
                    self.rule(&format!("{p}(X, []) :- {inp}(X, {la}.[])."))?;
                }
                Ok(())
            }
            True => {
                self.rule(&format!("{p}(X, s.⟨⟩) :- {inp}(X, i.v)."))?;
                if m {
                    self.rule(&format!("{p}(X, []) :- {inp}(X, [])."))?;
                }
                Ok(())
            }
            Not if m => {
                self.rule(&format!("set_{inp}(X) :- {inp}(X, [])."))?;
                self.rule(&format!("ne_{inp}(X) :- {inp}(X, i.v)."))?;
                self.rule(&format!("{p}(X, s.⟨⟩) :- set_{inp}(X), not ne_{inp}(X)."))?;
                self.rule(&format!("{p}(X, []) :- {inp}(X, [])."))
            }
            Not => Err(Error::Unsupported("negation needs the marked encoding".into())),
            other => Err(Error::Unsupported(format!(
                "`{other}` has no logic-program rule; desugar to positive core first"
            ))),
        }
    }
}

/// Compiles `q` applied to `input`. The input's encoding becomes the
/// facts of the base predicate `p0`; the result is the goal.
pub fn compile_lp(q: &Expr, input: &Value, enc: Encoding) -> Result<LogicProgram> {
    let t = type_of(input)?;
    let mut kinds = Vec::new();
    t.kinds(&mut kinds);
    let sem = kinds.first().copied().unwrap_or(Kind::List);
    infer(q, &t, sem)?;
    let mut c = Compiler { enc, sem, next: 0, rules: Vec::new() };
    for path in encode_det(input, enc) {
        c.rules.push(Rule {
            head: Atom {
                pred: "p0".into(),
                args: vec![Vec::new(), path.into_iter().map(|s| PItem::Term(PTerm::Const(s))).collect()],
            },
            body: Vec::new(),
        });
    }
    let goal = c.comp(q, "p0", &t)?;
    Ok(LogicProgram { goal, rules: c.rules })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detree::{decode_det, eval_det, parse_path};
    use crate::ma::parse_ma;
    use crate::value::parse_value;

    fn dummy() -> Value {
        Value::atom("dummy")
    }

    #[test]
    fn union_of_singletons_compiles_to_nine_rules() {
        let q = parse_ma("tup[1 = '0' ; sng, 2 = '1' ; sng] ; union").unwrap();
        let p = compile_lp(&q, &dummy(), Encoding::Plain).unwrap();
        let text = p.to_string();
        assert_eq!(p.rules.len(), 9, "{text}");
        assert!(text.contains("p6(X, (1.i).v) :- p5(X, 1.i.v)."), "{text}");
        assert!(text.contains("p2(X, s.v) :- p1(X, v)."), "{text}");
        let out = eval_lp(&p).unwrap();
        let want: PathSet = ["(1.s).0", "(2.s).1"].iter().map(|s| parse_path(s).unwrap()).collect();
        assert_eq!(out, want);
    }

    #[test]
    fn map_over_tuples_compiles_to_seven_rules() {
        let q = parse_ma("map(tup[C = pi[A], D = pi[B] ; sng])").unwrap();
        let input = parse_value("[<A: a, B: b>]").unwrap();
        let p = compile_lp(&q, &input, Encoding::Plain).unwrap();
        let rules: Vec<String> = p.rules.iter().filter(|r| !r.body.is_empty()).map(Rule::to_string).collect();
        assert_eq!(rules.len(), 7, "{rules:?}");
        assert_eq!(rules[0], "p1(X.i, v) :- p0(X, i.v).");
        assert_eq!(rules[6], "p6(X, i.v) :- p5(X.i, v).");
        let out = eval_lp(&p).unwrap();
        assert_eq!(decode_det(&out, None).unwrap().to_string(), "[<C: a, D: [b]>]");
    }

    #[test]
    fn text_roundtrips() {
        for r in [
            "p6(X, (1.i).v) :- p5(X, 1.i.v).",
            "p0(ε, dummy).",
            "p2(X, s.⟨⟩) :- set_p1(X), not ne_p1(X).",
            "p3(X, \"v\") :- p2(X, \"X\".\"i\").",
        ] {
            let p = parse_lp(r).unwrap();
            assert_eq!(p.rules[0].to_string(), r);
        }
        assert!(parse_lp("p(X, v) :- q(X).").is_ok());
        assert!(parse_lp("p(X, v) :- q(X, w).").unwrap().evaluate().is_err());
        assert!(parse_lp("p(X, v) :- p(X, v).").unwrap().evaluate().is_err());
    }

    #[test]
    fn negation_through_markers() {
        let q = parse_ma("not").unwrap();
        assert!(compile_lp(&q, &parse_value("[]").unwrap(), Encoding::Plain).is_err());
        let p = compile_lp(&q, &parse_value("[]").unwrap(), Encoding::Marked).unwrap();
        assert!(goal_true(&p).unwrap());
        let p = compile_lp(&q, &parse_value("[a]").unwrap(), Encoding::Marked).unwrap();
        assert!(!goal_true(&p).unwrap());
    }

    #[test]
    fn agrees_with_detree() {
        let input = parse_value("[<A: a, B: [x, y]>, <A: b, B: []>]").unwrap();
        for q in [
            "map(pairwith[B]) ; flatten",
            "map(tup[K = pi[A], E = pi[B] ; not])",
            "map(tup[1 = pi[A], 2 = 'a'] ; eqatom[1, 2]) ; flatten",
            "tup[L = id, R = id] ; pairwith[L] ; map(pairwith[R])",
            "map(pi[B] ; true) ; union(id, id)",
        ] {
            let q = parse_ma(q).unwrap();
            let enc = encode_det(&input, Encoding::Marked);
            let a = eval_det(&q, &enc, Encoding::Marked).unwrap();
            let b = eval_lp(&compile_lp(&q, &input, Encoding::Marked).unwrap()).unwrap();
            assert_eq!(a, b, "{q}");
        }
    }
}
