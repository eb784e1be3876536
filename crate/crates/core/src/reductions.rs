//! Generators for the hardness constructions: the doubly-exponential
//! query, the NTM-to-query compiler with a direct NTM simulator, and the
//! flat relational encoding of complex values with its decoding query.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::ma::ast::{path, Cond, Expr, Path};
use crate::ma::desugar::{conj_all, select_with};
use crate::value::{write_name, EqMode, Kind, Type, Value};

/// `{0, 1} ; (id × id)` iterated `m` times.
pub fn gen_doubly_exp(m: usize) -> Expr {
    let bits = Expr::union(Expr::c("0").then(Expr::Sng), Expr::c("1").then(Expr::Sng));
    Expr::seq(std::iter::once(bits).chain((0..m).map(|_| square())))
}

fn square() -> Expr {
    Expr::cart(Expr::Id, Expr::Id)
}

fn union_all(parts: impl IntoIterator<Item = Expr>) -> Expr {
    parts.into_iter().reduce(Expr::union).unwrap_or(Expr::Empty)
}

fn or_all(parts: impl IntoIterator<Item = Cond>) -> Option<Cond> {
    parts.into_iter().reduce(Cond::or)
}

fn ceil_log2(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

// ---------------------------------------------------------------------------
// Turing machines

/// Reserved left-end marker placed before every input.
pub const BOUNDARY: &str = "^";
pub const BLANK: &str = "#";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: String,
    pub read: String,
    pub to: String,
    pub write: String,
    /// -1, 0 or +1.
    pub step: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TMSpec {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub start: String,
    pub finals: Vec<String>,
    pub delta: Vec<Transition>,
}

/// Tape symbol carrying the head marker.
pub fn marked(s: &str) -> String {
    format!("▷{s}◁")
}

impl TMSpec {
    /// Checks the invariants the query construction relies on.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Structure(m));
        let states: HashSet<&str> = self.states.iter().map(String::as_str).collect();
        let syms: HashSet<&str> = self.alphabet.iter().map(String::as_str).collect();
        if states.len() != self.states.len() || syms.len() != self.alphabet.len() {
            return bad("duplicate state or symbol".into());
        }
        for s in [BLANK, BOUNDARY] {
            if !syms.contains(s) {
                return bad(format!("alphabet must contain `{s}`"));
            }
        }
        if let Some(s) = self.alphabet.iter().find(|s| s.is_empty() || s.starts_with('▷')) {
            return bad(format!("reserved symbol name `{s}`"));
        }
        if !states.contains(self.start.as_str()) {
            return bad(format!("unknown start state `{}`", self.start));
        }
        for t in &self.delta {
            if !states.contains(t.from.as_str()) || !states.contains(t.to.as_str()) {
                return bad(format!("unknown state in `{}`", fmt_transition(t)));
            }
            if !syms.contains(t.read.as_str()) || !syms.contains(t.write.as_str()) {
                return bad(format!("unknown symbol in `{}`", fmt_transition(t)));
            }
            if !(-1..=1).contains(&t.step) {
                return bad(format!("move must be -1, 0 or +1 in `{}`", fmt_transition(t)));
            }
            if (t.read == BOUNDARY) != (t.write == BOUNDARY) || (t.read == BOUNDARY && t.step < 0) {
                return bad(format!("`{}` disturbs the left boundary", fmt_transition(t)));
            }
        }
        for f in &self.finals {
            if !states.contains(f.as_str()) {
                return bad(format!("unknown final state `{f}`"));
            }
            for s in &self.alphabet {
                let idle = Transition { from: f.clone(), read: s.clone(), to: f.clone(), write: s.clone(), step: 0 };
                if !self.delta.contains(&idle) {
                    return bad(format!("final state `{f}` lacks the idle transition on `{s}`"));
                }
            }
        }
        Ok(())
    }

    /// Adds the idle transitions of final states that are missing.
    pub fn with_final_loops(mut self) -> TMSpec {
        for f in &self.finals {
            for s in &self.alphabet {
                let idle = Transition { from: f.clone(), read: s.clone(), to: f.clone(), write: s.clone(), step: 0 };
                if !self.delta.contains(&idle) {
                    self.delta.push(idle);
                }
            }
        }
        self
    }

    fn check_input(&self, input: &[String]) -> Result<()> {
        match input.iter().find(|s| *s == BOUNDARY || !self.alphabet.contains(s)) {
            Some(s) => Err(Error::Structure(format!("input symbol `{s}` is not allowed"))),
            None => Ok(()),
        }
    }
}

fn fmt_transition(t: &Transition) -> String {
    let step = match t.step {
        1 => "+1".to_string(),
        s => s.to_string(),
    };
    format!("{} {} -> {} {} {}", t.from, t.read, t.to, t.write, step)
}

impl fmt::Display for TMSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "states: {}", self.states.join(" "))?;
        writeln!(f, "alphabet: {}", self.alphabet.join(" "))?;
        writeln!(f, "start: {}", self.start)?;
        writeln!(f, "final: {}", self.finals.join(" "))?;
        for t in &self.delta {
            writeln!(f, "delta: {}", fmt_transition(t))?;
        }
        Ok(())
    }
}

/// Reads the line format; `%` starts a comment. The boundary symbol is added
/// to the alphabet when absent.
pub fn parse_tm(text: &str) -> Result<TMSpec> {
    let mut tm = TMSpec { states: vec![], alphabet: vec![], start: String::new(), finals: vec![], delta: vec![] };
    let mut offset = 0;
    for line in text.lines() {
        let pos = offset;
        offset += line.len() + 1;
        let line = line.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) =
            line.split_once(':').ok_or_else(|| Error::syntax(pos, format!("expected `key: ...`, found `{line}`")))?;
        let words = || rest.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty()).map(String::from);
        match key.trim() {
            "states" => tm.states.extend(words()),
            "alphabet" => tm.alphabet.extend(words()),
            "start" => {
                let w: Vec<String> = words().collect();
                if w.len() != 1 {
                    return Err(Error::syntax(pos, "`start:` takes one state"));
                }
                tm.start = w[0].clone();
            }
            "final" | "finals" => tm.finals.extend(words()),
            "delta" => {
                let w: Vec<String> = rest.split_whitespace().map(String::from).collect();
                let step = match w.get(5).map(String::as_str) {
                    Some("-1") => -1,
                    Some("0") => 0,
                    Some("+1") | Some("1") => 1,
                    _ => return Err(Error::syntax(pos, "move must be -1, 0 or +1")),
                };
                if w.len() != 6 || w[2] != "->" {
                    return Err(Error::syntax(pos, "expected `delta: q s -> q' s' move`"));
                }
                tm.delta.push(Transition {
                    from: w[0].clone(),
                    read: w[1].clone(),
                    to: w[3].clone(),
                    write: w[4].clone(),
                    step,
                });
            }
            other => return Err(Error::syntax(pos, format!("unknown key `{other}`"))),
        }
    }
    if !tm.alphabet.iter().any(|s| s == BOUNDARY) {
        tm.alphabet.push(BOUNDARY.into());
    }
    tm.validate()?;
    Ok(tm)
}

const FIRST_ONE: &str = "\
% accepts iff the first input symbol is 1
states: q0 q1 qa
alphabet: # 0 1 ^
start: q0
final: qa
delta: q0 ^ -> q1 ^ +1
delta: q1 1 -> qa 1 0
delta: qa # -> qa # 0
delta: qa 0 -> qa 0 0
delta: qa 1 -> qa 1 0
delta: qa ^ -> qa ^ 0
";

const WALK_OFF: &str = "\
% walks right until it falls off the tape; never accepts
states: q0 qa
alphabet: # ^
start: q0
final: qa
delta: q0 ^ -> q0 ^ +1
delta: q0 # -> q0 # +1
delta: qa # -> qa # 0
delta: qa ^ -> qa ^ 0
";

const GUESS: &str = "\
% guesses between accepting at once and wandering off
states: q0 qa qr
alphabet: # ^
start: q0
final: qa
delta: q0 ^ -> qa ^ 0
delta: q0 ^ -> qr ^ +1
delta: qr # -> qr # 0
delta: qa # -> qa # 0
delta: qa ^ -> qa ^ 0
";

const PARITY: &str = "\
% accepts iff the input has an even number of 1s, on reaching the first blank
states: e o acc rej
alphabet: # 1 ^
start: e
final: acc
delta: e ^ -> e ^ +1
delta: e 1 -> o 1 +1
delta: o 1 -> e 1 +1
delta: e # -> acc # 0
delta: o # -> rej # 0
delta: rej # -> rej # 0
delta: acc # -> acc # 0
delta: acc 1 -> acc 1 0
delta: acc ^ -> acc ^ 0
";

/// Machines shipped with the library, by name.
pub fn bundled_machines() -> Vec<(&'static str, TMSpec)> {
    [("first-one", FIRST_ONE), ("walk-off", WALK_OFF), ("guess", GUESS), ("parity", PARITY)]
        .into_iter()
        .map(|(n, t)| (n, parse_tm(t).expect("bundled machine")))
        .collect()
}

pub fn bundled_machine(name: &str) -> Option<TMSpec> {
    bundled_machines().into_iter().find(|(n, _)| *n == name).map(|(_, m)| m)
}

/// Splits an input word: whitespace-separated symbols, or one symbol per
/// character when there is no whitespace.
pub fn split_input(text: &str) -> Vec<String> {
    if text.split_whitespace().count() > 1 {
        text.split_whitespace().map(String::from).collect()
    } else {
        text.trim().chars().map(String::from).collect()
    }
}

/// Breadth-first search over exactly `steps` transitions on a tape of
/// length `steps` rounded up to a power of two (at least the boundary plus
/// the input). True iff a final state is reachable at time `steps`.
pub fn simulate_ntm(tm: &TMSpec, input: &[String], steps: usize) -> Result<bool> {
    tm.validate()?;
    tm.check_input(input)?;
    let len = steps.max(input.len() + 1).next_power_of_two();
    let mut tape: Vec<&str> = vec![BOUNDARY];
    tape.extend(input.iter().map(String::as_str));
    tape.resize(len, BLANK);
    let mut frontier: HashSet<(Vec<&str>, usize, &str)> = HashSet::from([(tape, 0, tm.start.as_str())]);
    for _ in 0..steps {
        let mut next = HashSet::new();
        for (tape, head, q) in &frontier {
            for t in tm.delta.iter().filter(|t| t.from == *q && t.read == tape[*head]) {
                let Some(h) = head.checked_add_signed(t.step as isize).filter(|&h| h < len) else {
                    continue;
                };
                let mut tape = tape.clone();
                tape[*head] = &t.write;
                next.insert((tape, h, t.to.as_str()));
            }
        }
        frontier = next;
    }
    Ok(frontier.iter().any(|(_, _, q)| tm.finals.iter().any(|f| f == q)))
}

/// How `=mon` on tapes and configurations is written in generated queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonStyle {
    /// The extended `=mon` condition.
    Builtin,
    /// The recursive halving definition over `=atomic`, linear in the depth.
    Expanded,
}

/// Boolean query: the tape segments at `a` and `b`, nested pairs of the
/// given depth, are equal. Uses only atomic equality.
pub fn mon_eq_tape(a: &Path, b: &Path, depth: usize) -> Expr {
    if depth == 0 {
        return Expr::EqAtomic(a.clone(), b.clone());
    }
    let halves = Expr::union(
        Expr::tuple(vec![("T", Expr::c("1")), ("V", Expr::pi("1"))]).then(Expr::Sng),
        Expr::tuple(vec![("T", Expr::c("2")), ("V", Expr::pi("2"))]).then(Expr::Sng),
    );
    Expr::seq([
        Expr::cart(Expr::Proj(a.clone()).then(halves.clone()), Expr::Proj(b.clone()).then(halves)),
        Expr::select(Cond::eq("1.T", "2.T", EqMode::Atomic)),
        select_with(mon_eq_tape(&path("1.V"), &path("2.V"), depth - 1)),
        square(),
        Expr::select(Cond::eq_const("1.1.T", "1")),
        Expr::select(Cond::eq_const("2.1.T", "2")),
        Expr::map(Expr::Unit),
    ])
}

struct TmGen<'a> {
    tm: &'a TMSpec,
    k: usize,
    style: MonStyle,
}

fn cat(p: &str, q: &str) -> Path {
    path(&format!("{p}.{q}"))
}

impl TmGen<'_> {
    /// Keeps members whose tape segments at `a` and `b` (of `depth`) agree.
    fn tape_sel(&self, a: &str, b: &str, depth: usize) -> Expr {
        match self.style {
            MonStyle::Builtin => Expr::select(Cond::eq(a, b, EqMode::Mon)),
            MonStyle::Expanded => select_with(mon_eq_tape(&path(a), &path(b), depth)),
        }
    }

    fn config_eq(&self, a: &str, b: &str) -> Expr {
        match self.style {
            MonStyle::Builtin => Expr::eqmon(a, b),
            MonStyle::Expanded => conj_all(vec![
                mon_eq_tape(&cat(a, "t"), &cat(b, "t"), self.k),
                Expr::EqAtomic(cat(a, "q"), cat(b, "q")),
            ]),
        }
    }

    fn config_sel(&self, a: &str, b: &str) -> Expr {
        match self.style {
            MonStyle::Builtin => Expr::select(Cond::eq(a, b, EqMode::Mon)),
            MonStyle::Expanded => select_with(self.config_eq(a, b)),
        }
    }

    fn configs(&self) -> Expr {
        let syms = self.tm.alphabet.iter().cloned().chain(self.tm.alphabet.iter().map(|s| marked(s)));
        let phi_sigma = union_all(syms.map(|s| Expr::c(&s).then(Expr::Sng)));
        let tapes = Expr::seq(std::iter::once(phi_sigma).chain((0..self.k).map(|_| square())));
        let phi_q = union_all(self.tm.states.iter().map(|q| Expr::c(q).then(Expr::Sng)));
        Expr::cart(tapes, phi_q).then(Expr::map(Expr::tuple(vec![("t", Expr::pi("1")), ("q", Expr::pi("2"))])))
    }

    fn start(&self, input: &[String]) -> Expr {
        let mut x = vec![marked(BOUNDARY)];
        x.extend(input.iter().cloned());
        let l = ceil_log2(x.len());
        x.resize(1 << l, BLANK.into());
        let phi_x = pair_tree(&x);
        let tape = if l == self.k {
            phi_x
        } else {
            let dup = Expr::tuple(vec![("1", Expr::Id), ("2", Expr::Id)]);
            let phi_empty = Expr::seq(std::iter::once(Expr::c(BLANK)).chain((0..l).map(|_| dup.clone())));
            let pad = Expr::tuple(vec![
                ("1", Expr::Id),
                ("2", Expr::tuple(vec![("1", Expr::pi("2")), ("2", Expr::pi("2"))])),
            ]);
            Expr::seq(
                std::iter::once(Expr::tuple(vec![("1", phi_x), ("2", phi_empty)]))
                    .chain((0..self.k - l - 1).map(|_| pad.clone())),
            )
        };
        Expr::tuple(vec![("t", tape), ("q", Expr::c(&self.tm.start))])
    }

    fn zoom(&self, depth: usize) -> Expr {
        let keep = |w: Expr, w2: Expr| Expr::map(Expr::tuple(vec![("s", Expr::pi("s")), ("w", w), ("w'", w2)]));
        let middle = |w: &str| {
            Expr::pi(w).then(Expr::tuple(vec![("1", Expr::pi("1.2")), ("2", Expr::pi("2.1"))]))
        };
        union_all([
            self.tape_sel("w.1", "w'.1", depth - 1).then(keep(Expr::pi("w.2"), Expr::pi("w'.2"))),
            self.tape_sel("w.2", "w'.2", depth - 1).then(keep(Expr::pi("w.1"), Expr::pi("w'.1"))),
            Expr::seq([
                self.tape_sel("w.1.1", "w'.1.1", depth - 2),
                self.tape_sel("w.2.2", "w'.2.2", depth - 2),
                keep(middle("w"), middle("w'")),
            ]),
        ])
    }

    fn marker(&self) -> Expr {
        let sel = |p: &'static str| self.tm.alphabet.iter().map(move |s| Expr::select(Cond::eq_const(p, &marked(s))));
        union_all(sel("w.1").chain(sel("w.2")))
    }

    /// The window condition for one transition. `w` and `w'` are the length-2
    /// windows of the two tapes; `x` ranges over the unmarked neighbour.
    fn gamma(&self, t: &Transition) -> Expr {
        let (a, b) = (marked(&t.read), marked(&t.write));
        let window = |w1: &str, w2: &str, v1: &str, v2: &str| {
            Cond::and(
                Cond::and(Cond::eq_const("w.1", w1), Cond::eq_const("w.2", w2)),
                Cond::and(Cond::eq_const("w'.1", v1), Cond::eq_const("w'.2", v2)),
            )
        };
        let cases = self.tm.alphabet.iter().flat_map(|x| {
            let mx = marked(x);
            match t.step {
                1 => vec![window(&a, x, &t.write, &mx)],
                -1 => vec![window(x, &a, &mx, &t.write)],
                _ => vec![window(&a, x, &b, x), window(x, &a, x, &b)],
            }
        });
        let states = Cond::and(Cond::eq_const("s.C.q", &t.from), Cond::eq_const("s.C'.q", &t.to));
        Expr::select(Cond::and(states, or_all(cases).expect("nonempty alphabet")))
    }

    fn query(&self, input: &[String]) -> Expr {
        let k = self.k;
        let configs = self.configs();
        let accepting = configs
            .clone()
            .then(union_all(self.tm.finals.iter().map(|f| Expr::select(Cond::eq_const("q", f)))));
        let prepare = Expr::seq([
            configs,
            square(),
            Expr::map(Expr::tuple(vec![
                ("s", Expr::tuple(vec![("C", Expr::pi("1")), ("C'", Expr::pi("2"))])),
                ("w", Expr::pi("1.t")),
                ("w'", Expr::pi("2.t")),
            ])),
        ]);
        let witness = Expr::seq(
            std::iter::once(prepare).chain((2..=k).rev().map(|d| self.zoom(d))).chain([self.marker()]),
        );
        let succ = Expr::seq([witness, union_all(self.tm.delta.iter().map(|t| self.gamma(t))), Expr::map(Expr::pi("s"))]);
        let mut psi = succ;
        for _ in 0..k {
            psi = Expr::seq([
                psi,
                square(),
                self.config_sel("1.C'", "2.C"),
                Expr::map(Expr::tuple(vec![("C", Expr::pi("1.C")), ("C'", Expr::pi("2.C'"))])),
            ]);
        }
        let reached = Expr::seq([
            Expr::tuple(vec![("1", self.start(input)), ("2", psi)]),
            Expr::pairwith("2"),
            self.config_sel("1", "2.C"),
            Expr::map(Expr::pi("2.C'")),
        ]);
        Expr::seq([Expr::cart(reached, accepting), Expr::map(self.config_eq("1", "2")), Expr::Flatten])
    }
}

/// Nested pairs over the given atoms; `xs.len()` must be a power of two.
fn pair_tree(xs: &[String]) -> Expr {
    if xs.len() == 1 {
        return Expr::c(&xs[0]);
    }
    let (l, r) = xs.split_at(xs.len() / 2);
    Expr::tuple(vec![("1", pair_tree(l)), ("2", pair_tree(r))])
}

/// Closed query, for set semantics on input `⟨⟩`, that is true iff `tm`
/// has a computation on `input` ending in a final state after exactly
/// `2^k` steps.
pub fn gen_tm_query(tm: &TMSpec, input: &[String], k: usize) -> Result<Expr> {
    gen_tm_query_with(tm, input, k, MonStyle::Builtin)
}

pub fn gen_tm_query_with(tm: &TMSpec, input: &[String], k: usize, style: MonStyle) -> Result<Expr> {
    tm.validate()?;
    tm.check_input(input)?;
    if k == 0 || input.len() + 1 > 1 << k.min(62) {
        return Err(Error::Structure(format!(
            "tape of length 2^{k} cannot hold the boundary and {} input symbols",
            input.len()
        )));
    }
    Ok(TmGen { tm, k, style }.query(input))
}

/// The start configuration alone, for inspecting the padded start tape.
pub fn gen_start_config(tm: &TMSpec, input: &[String], k: usize) -> Result<Expr> {
    gen_tm_query(tm, input, k)?;
    Ok(TmGen { tm, k, style: MonStyle::Builtin }.start(input))
}

// ---------------------------------------------------------------------------
// Flat encoding

/// The relations `Set`, `Pair` and `Atomic` over 1-based positions of the
/// serialization `text`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlatDB {
    pub text: String,
    pub set: BTreeSet<(usize, usize)>,
    pub pair: BTreeSet<(usize, usize, usize)>,
    pub atomic: BTreeSet<(usize, String)>,
}

/// Encodes a value built from sets, pairs and atoms. Positions index the
/// characters of the delimiter-only serialization, e.g. `{⟨a,b⟩,⟨c,d⟩}`.
pub fn flat_encode(v: &Value) -> Result<FlatDB> {
    fn go(v: &Value, db: &mut FlatDB, len: &mut usize) -> Result<usize> {
        fn push(db: &mut FlatDB, len: &mut usize, s: &str) {
            db.text.push_str(s);
            *len += s.chars().count();
        }
        let id = *len + 1;
        match v {
            Value::Atom(a) if a.is_empty() => return Err(Error::Unsupported("empty atom".into())),
            Value::Atom(a) => {
                push(db, len, a);
                db.atomic.insert((id, a.to_string()));
            }
            Value::Coll(Kind::Set, xs) => {
                push(db, len, "{");
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        push(db, len, ",");
                    }
                    let c = go(x, db, len)?;
                    db.set.insert((id, c));
                }
                push(db, len, "}");
            }
            Value::Tuple(f) if f.len() == 2 => {
                push(db, len, "⟨");
                let a = go(&f[0].1, db, len)?;
                push(db, len, ",");
                let b = go(&f[1].1, db, len)?;
                push(db, len, "⟩");
                db.pair.insert((id, a, b));
            }
            Value::Tuple(_) => return Err(Error::Unsupported(format!("non-pair tuple `{v}`"))),
            Value::Coll(k, _) => return Err(Error::Unsupported(format!("{} in `{v}`", k.name()))),
        }
        Ok(id)
    }
    let mut db = FlatDB::default();
    go(v, &mut db, &mut 0)?;
    Ok(db)
}

impl FlatDB {
    /// `⟨Set: {⟨1, 2⟩}, Pair: {⟨1, 2, 3⟩}, Atomic: {⟨1, 2⟩}⟩` with positions
    /// as numeral atoms.
    pub fn to_value(&self) -> Value {
        let n = |i: &usize| Value::atom(&i.to_string());
        let rel = |rows: Vec<Vec<Value>>| {
            Value::coll(
                Kind::Set,
                rows.into_iter()
                    .map(|r| Value::tuple(r.into_iter().enumerate().map(|(i, x)| ((i + 1).to_string(), x)).collect()))
                    .collect(),
            )
        };
        Value::tuple(vec![
            ("Set", rel(self.set.iter().map(|(x, y)| vec![n(x), n(y)]).collect())),
            ("Pair", rel(self.pair.iter().map(|(x, y, z)| vec![n(x), n(y), n(z)]).collect())),
            ("Atomic", rel(self.atomic.iter().map(|(x, a)| vec![n(x), Value::atom(a)]).collect())),
        ])
    }

    /// Fact lines `atomic(3, a).`, `set(1, 2).`, `pair(2, 3, 5).`.
    pub fn facts(&self) -> String {
        let mut out = String::new();
        for (i, a) in &self.atomic {
            let mut name = String::new();
            write_name(&mut name, a).expect("write to string");
            out.push_str(&format!("atomic({i}, {name}).\n"));
        }
        for (x, y) in &self.set {
            out.push_str(&format!("set({x}, {y}).\n"));
        }
        for (x, y, z) in &self.pair {
            out.push_str(&format!("pair({x}, {y}, {z}).\n"));
        }
        out
    }
}

/// `⟨1: v, 2: S⟩ ; pairwith[2] ; select[1 = 2.1] ; map(pi[2.2])`.
fn restrict(s: Expr, v: Expr) -> Expr {
    Expr::seq([
        Expr::tuple(vec![("1", v), ("2", s)]),
        Expr::pairwith("2"),
        Expr::select(Cond::eq("1", "2.1", EqMode::Atomic)),
        Expr::map(Expr::pi("2.2")),
    ])
}

/// Query over `FlatDB::to_value` returning `{⟨1: i, 2: {v_i}⟩}` for every
/// term `i` of type `t`.
pub fn gen_vtau(t: &Type) -> Result<Expr> {
    Ok(match t {
        Type::Dom => Expr::pi("Atomic").then(Expr::map(Expr::tuple(vec![
            ("1", Expr::pi("1")),
            ("2", Expr::pi("2").then(Expr::Sng)),
        ]))),
        Type::Tuple(f) if f.len() == 2 => {
            let side = |t: &Type, at: &str| -> Result<Expr> {
                Ok(restrict(Expr::pi("2").then(gen_vtau(t)?), Expr::pi(at)).then(Expr::Flatten))
            };
            let mut pairs = Expr::cart(side(&f[0].1, "1.2")?, side(&f[1].1, "1.3")?);
            if (&*f[0].0, &*f[1].0) != ("1", "2") {
                pairs = pairs.then(Expr::map(Expr::tuple(vec![
                    (f[0].0.clone(), Expr::pi("1")),
                    (f[1].0.clone(), Expr::pi("2")),
                ])));
            }
            Expr::seq([
                Expr::tuple(vec![("1", Expr::pi("Pair")), ("2", Expr::Id)]),
                Expr::pairwith("1"),
                Expr::map(Expr::tuple(vec![("1", Expr::pi("1.1")), ("2", pairs)])),
            ])
        }
        Type::Coll(Kind::Set, e) => {
            let members = Expr::seq([
                Expr::cart(restrict(Expr::pi("2.Set"), Expr::pi("1")), Expr::pi("2").then(gen_vtau(e)?)),
                Expr::select(Cond::eq("1", "2.1", EqMode::Atomic)),
                Expr::map(Expr::pi("2.2")),
                Expr::Flatten,
                Expr::Sng,
            ]);
            Expr::seq([
                Expr::tuple(vec![("1", Expr::pi("Set").then(Expr::map(Expr::pi("1")))), ("2", Expr::Id)]),
                Expr::pairwith("1"),
                Expr::map(Expr::tuple(vec![("1", Expr::pi("1")), ("2", members)])),
            ])
        }
        _ => return Err(Error::Unsupported(format!("type `{t}` is not built from Dom, pairs and sets"))),
    })
}

/// `V_τ ; select[1 = '1'] ; map(pi[2]) ; flatten`, which maps `flat(v)` to
/// `{v}`. `V_τ` also describes inner terms of the same shape as the root,
/// so the root position is picked out explicitly.
pub fn gen_vprime(t: &Type) -> Result<Expr> {
    Ok(Expr::seq([
        gen_vtau(t)?,
        Expr::select(Cond::eq_const("1", "1")),
        Expr::map(Expr::pi("2")),
        Expr::Flatten,
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::{desugar, eval_ma};
    use crate::value::{parse_type, parse_value};

    fn word(s: &str) -> Vec<String> {
        split_input(s)
    }

    fn run_tm(name: &str, input: &str, k: usize, style: MonStyle) -> bool {
        let tm = bundled_machine(name).unwrap();
        let q = gen_tm_query_with(&tm, &word(input), k, style).unwrap();
        eval_ma(&q, &Value::unit(), Kind::Set).unwrap().truthy().unwrap()
    }

    #[test]
    fn doubly_exponential_cardinalities() {
        for m in 0..=3 {
            let v = eval_ma(&gen_doubly_exp(m), &Value::unit(), Kind::Set).unwrap();
            assert_eq!(v.elems().unwrap().len(), 1 << (1 << m));
        }
        assert_eq!(gen_doubly_exp(1).to_string(), "union('0' ; sng, '1' ; sng) ; cart(id, id)");
    }

    #[test]
    fn machine_text_roundtrips() {
        for (_, m) in bundled_machines() {
            assert_eq!(parse_tm(&m.to_string()).unwrap(), m);
        }
        assert!(parse_tm("states: q\nalphabet: #\nstart: q\nfinal: q\n").is_err());
        assert!(parse_tm("states: q\nalphabet: #\nstart: q\ndelta: q ^ -> q ^ -1\n").is_err());
        assert!(parse_tm("states: q\nalphabet: #\nstart: q\ndelta: q # -> q ^ 0\n").is_err());
        assert!(parse_tm("states: q\nalphabet: #\nstart: q\ndelta: q # -> q #\n").is_err());
    }

    #[test]
    fn simulator_traces() {
        let all = TMSpec {
            states: vec!["q".into()],
            alphabet: word("#1^"),
            start: "q".into(),
            finals: vec!["q".into()],
            delta: vec![],
        }
        .with_final_loops();
        assert!(simulate_ntm(&all, &word("1"), 2).unwrap());
        let stuck = parse_tm("states: q f\nalphabet: #\nstart: q\nfinal: f\ndelta: f # -> f # 0\ndelta: f ^ -> f ^ 0\n").unwrap();
        assert!(!simulate_ntm(&stuck, &[], 1).unwrap());
        let parity = bundled_machine("parity").unwrap();
        // ^ 1 1 #: e@1, o@2, e@3, then e reads # and accepts at time 4
        assert!(simulate_ntm(&parity, &word("11"), 4).unwrap());
        assert!(!simulate_ntm(&parity, &word("11"), 3).unwrap());
        assert!(!simulate_ntm(&parity, &word("1"), 4).unwrap());
        let first = bundled_machine("first-one").unwrap();
        assert!(simulate_ntm(&first, &word("1"), 2).unwrap());
        assert!(!simulate_ntm(&first, &word("0"), 2).unwrap());
        assert!(simulate_ntm(&bundled_machine("guess").unwrap(), &[], 2).unwrap());
        assert!(!simulate_ntm(&bundled_machine("walk-off").unwrap(), &[], 4).unwrap());
        assert!(simulate_ntm(&first, &word("2"), 2).is_err());
    }

    #[test]
    fn start_tape_is_padded_and_marked_once() {
        let tm = bundled_machine("first-one").unwrap();
        let cases = [
            ("", 1, "<t: <1: \"▷^◁\", 2: #>, q: q0>"),
            ("1", 1, "<t: <1: \"▷^◁\", 2: 1>, q: q0>"),
            ("1", 2, "<t: <1: <1: \"▷^◁\", 2: 1>, 2: <1: #, 2: #>>, q: q0>"),
            ("10", 2, "<t: <1: <1: \"▷^◁\", 2: 1>, 2: <1: 0, 2: #>>, q: q0>"),
            ("", 2, "<t: <1: <1: \"▷^◁\", 2: #>, 2: <1: #, 2: #>>, q: q0>"),
        ];
        for (input, k, want) in cases {
            let q = gen_start_config(&tm, &word(input), k).unwrap();
            let v = eval_ma(&q, &Value::unit(), Kind::Set).unwrap();
            assert_eq!(v.to_string(), want, "input {input:?}, K={k}");
        }
        let q = gen_start_config(&tm, &word("1"), 3).unwrap();
        let v = eval_ma(&q, &Value::unit(), Kind::Set).unwrap();
        assert_eq!(v.to_string().matches('▷').count(), 1);
        assert_eq!(v.to_string().matches('#').count(), 6);
        assert!(gen_tm_query(&tm, &word("100"), 1).is_err());
    }

    #[test]
    fn tape_mon_equality_matches_structural_equality() {
        let q = mon_eq_tape(&path("A"), &path("B"), 2);
        assert!(!q.to_string().contains("mon"));
        for (a, b) in [("<1: x, 2: y>", "<1: x, 2: y>"), ("<1: x, 2: y>", "<1: y, 2: x>"), ("<1: x, 2: y>", "<1: x, 2: x>")] {
            for (c, d) in [(a, a), (a, b)] {
                let v = parse_value(&format!("<A: <1: {c}, 2: {a}>, B: <1: {d}, 2: {a}>>")).unwrap();
                let r = eval_ma(&q, &v, Kind::Set).unwrap().truthy().unwrap();
                assert_eq!(r, c == d || parse_value(c).unwrap() == parse_value(d).unwrap());
            }
        }
    }

    #[test]
    fn tm_queries_agree_with_the_simulator_at_k1() {
        assert!(run_tm("first-one", "1", 1, MonStyle::Builtin));
        assert!(!run_tm("first-one", "0", 1, MonStyle::Builtin));
        assert!(run_tm("guess", "", 1, MonStyle::Builtin));
        assert!(!run_tm("walk-off", "", 1, MonStyle::Builtin));
        assert!(run_tm("guess", "", 1, MonStyle::Expanded));
        assert!(!run_tm("parity", "1", 1, MonStyle::Builtin));
    }

    #[test]
    fn generated_queries_print_and_parse_back() {
        let tm = bundled_machine("guess").unwrap();
        let q = gen_tm_query(&tm, &[], 2).unwrap();
        assert_eq!(crate::ma::parse_ma(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn query_sizes_grow_linearly_and_quadratically() {
        let tm = bundled_machine("first-one").unwrap();
        let sizes = |style: MonStyle| -> Vec<i64> {
            (1..=7)
                .map(|k| {
                    let q = gen_tm_query_with(&tm, &word("1"), k, style).unwrap();
                    let q = match style {
                        MonStyle::Builtin => q,
                        MonStyle::Expanded => desugar(&q, &Type::unit(), Kind::Set).unwrap(),
                    };
                    q.size() as i64
                })
                .collect()
        };
        let diffs = |xs: &[i64]| xs.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>();
        let b = diffs(&sizes(MonStyle::Builtin));
        assert!(b[1..].windows(2).all(|w| w[0] == w[1]), "{b:?}");
        let e = diffs(&diffs(&sizes(MonStyle::Expanded)));
        assert!(e[1..].windows(2).all(|w| w[0] == w[1]), "{e:?}");
    }

    #[test]
    fn flat_encoding_of_the_running_example() {
        let v = parse_value("{<A: a, B: b>, <A: c, B: d>}").unwrap();
        let db = flat_encode(&v).unwrap();
        assert_eq!(db.text, "{⟨a,b⟩,⟨c,d⟩}");
        let atomic: Vec<(usize, &str)> = db.atomic.iter().map(|(i, a)| (*i, a.as_str())).collect();
        assert_eq!(atomic, [(3, "a"), (5, "b"), (9, "c"), (11, "d")]);
        assert_eq!(db.set.iter().copied().collect::<Vec<_>>(), [(1, 2), (1, 8)]);
        assert_eq!(db.pair.iter().copied().collect::<Vec<_>>(), [(2, 3, 5), (8, 9, 11)]);
        assert!(db.facts().starts_with("atomic(3, a).\n"));
        assert!(db.facts().contains("set(1, 2).\npair") || db.facts().contains("set(1, 8).\npair(2, 3, 5)."));

        let t = parse_type("{<A: Dom, B: Dom>}").unwrap();
        let r = eval_ma(&gen_vtau(&t).unwrap(), &db.to_value(), Kind::Set).unwrap();
        assert_eq!(r.to_string(), "{<1: 1, 2: {{<A: a, B: b>, <A: c, B: d>}}>}");
        let r = eval_ma(&gen_vprime(&t).unwrap(), &db.to_value(), Kind::Set).unwrap();
        assert_eq!(r, Value::coll(Kind::Set, vec![v]));
    }

    #[test]
    fn flat_encoding_edge_cases() {
        let db = flat_encode(&Value::atom("a")).unwrap();
        assert_eq!(db.atomic.len(), 1);
        assert!(db.set.is_empty() && db.pair.is_empty());
        let r = eval_ma(&gen_vtau(&Type::Dom).unwrap(), &db.to_value(), Kind::Set).unwrap();
        assert_eq!(r.to_string(), "{<1: 1, 2: {a}>}");
        let db = flat_encode(&parse_value("{}").unwrap()).unwrap();
        assert_eq!(db.text, "{}");
        assert!(db.set.is_empty());
        assert!(flat_encode(&parse_value("<A: a>").unwrap()).is_err());
        assert!(flat_encode(&parse_value("[a]").unwrap()).is_err());
        assert!(gen_vtau(&parse_type("[Dom]").unwrap()).is_err());
    }

    #[test]
    fn nested_sets_decode() {
        for s in ["{{a, b}, {c}}", "<1: {a}, 2: <1: b, 2: {c, d}>>", "{<1: {a}, 2: b>}"] {
            let v = parse_value(s).unwrap();
            let t = crate::value::type_of(&v).unwrap();
            let db = flat_encode(&v).unwrap();
            let r = eval_ma(&gen_vprime(&t).unwrap(), &db.to_value(), Kind::Set).unwrap();
            assert_eq!(r, Value::coll(Kind::Set, vec![v]), "{s}");
        }
    }
}
