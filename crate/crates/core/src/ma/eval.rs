//! Direct evaluator for monad algebra under set, list or bag semantics.
//!
//! Extended operators have native implementations whose multiplicities
//! mirror their desugared forms, so the two always agree.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet};

use super::ast::{Cond, Expr, Operand};
use super::typing::infer_type;
use crate::error::{Error, Result};
use crate::value::{type_of, value_equal, EqMode, Kind, Label, Value};

pub const DEFAULT_MAX_VALUE_NODES: u64 = 10_000_000;

/// Reads `NESTQL_MAX_VALUE_NODES`, falling back to the default.
pub fn max_value_nodes() -> u64 {
    std::env::var("NESTQL_MAX_VALUE_NODES")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_VALUE_NODES)
}

/// Type-checks `q` against the type of `v` and evaluates it.
pub fn eval_ma(q: &Expr, v: &Value, sem: Kind) -> Result<Value> {
    infer_type(q, &type_of(v)?, sem)?;
    Evaluator::new(sem, max_value_nodes()).eval(q, v)
}

/// Evaluation state: the ambient semantics and a budget on the number of
/// value nodes constructed.
pub struct Evaluator {
    sem: Kind,
    remaining: Cell<u64>,
    limit: u64,
}

impl Evaluator {
    pub fn new(sem: Kind, limit: u64) -> Self {
        Evaluator { sem, remaining: Cell::new(limit), limit }
    }

    fn charge(&self, n: usize) -> Result<()> {
        let left = self.remaining.get();
        if (n as u64) > left {
            return Err(Error::Budget(self.limit));
        }
        self.remaining.set(left - n as u64);
        Ok(())
    }

    fn mk(&self, elems: Vec<Value>) -> Result<Value> {
        self.charge(elems.len() + 1)?;
        Ok(Value::coll(self.sem, elems))
    }

    fn boolean(&self, b: bool) -> Result<Value> {
        self.charge(2)?;
        Ok(Value::boolean(self.sem, b))
    }

    fn elems<'v>(&self, q: &Expr, v: &'v Value) -> Result<&'v [Value]> {
        v.elems().ok_or_else(|| Error::Runtime(format!("`{q}` applied to non-collection `{v}`")))
    }

    fn at<'v>(&self, q: &Expr, v: &'v Value, p: &[Label]) -> Result<&'v Value> {
        v.at_path(p).ok_or_else(|| {
            Error::Runtime(format!("`{q}`: no path {} in `{v}`", super::ast::PathFmt(p)))
        })
    }

    pub fn eval(&self, q: &Expr, v: &Value) -> Result<Value> {
        use Expr::*;
        match q {
            Id => Ok(v.clone()),
            Const(a) => Ok(Value::Atom(a.clone())),
            Empty => self.mk(Vec::new()),
            Unit => Ok(Value::unit()),
            Sng => self.mk(vec![v.clone()]),
            Map(f) => {
                let out = self.elems(q, v)?.iter().map(|x| self.eval(f, x)).collect::<Result<_>>()?;
                self.mk(out)
            }
            Flatten => {
                let mut out = Vec::new();
                for x in self.elems(q, v)? {
                    out.extend(self.elems(q, x)?.iter().cloned());
                }
                self.mk(out)
            }
            FlatMap(f) => {
                let mut out = Vec::new();
                for x in self.elems(q, v)? {
                    let y = self.eval(f, x)?;
                    out.extend(self.elems(q, &y)?.iter().cloned());
                }
                self.mk(out)
            }
            PairWith(a) => {
                let fields = v.fields().ok_or_else(|| Error::Runtime(format!("`{q}` on `{v}`")))?;
                let xs = self.elems(q, self.at(q, v, std::slice::from_ref(a))?)?;
                self.charge(xs.len() * (fields.len() + 1))?;
                let out = xs
                    .iter()
                    .map(|x| {
                        Value::Tuple(
                            fields
                                .iter()
                                .map(|(l, fv)| (l.clone(), if l == a { x.clone() } else { fv.clone() }))
                                .collect(),
                        )
                    })
                    .collect();
                self.mk(out)
            }
            Tuple(fs) => {
                self.charge(fs.len() + 1)?;
                Ok(Value::Tuple(
                    fs.iter().map(|(l, f)| Ok((l.clone(), self.eval(f, v)?))).collect::<Result<_>>()?,
                ))
            }
            Proj(p) => Ok(self.at(q, v, p)?.clone()),
            Compose(f, g) => self.eval(g, &self.eval(f, v)?),
            Union(f, g) => {
                let a = self.eval(f, v)?;
                let b = self.eval(g, v)?;
                let mut out = self.elems(q, &a)?.to_vec();
                out.extend(self.elems(q, &b)?.iter().cloned());
                self.mk(out)
            }
            Cart(f, g) => {
                let a = self.eval(f, v)?;
                let b = self.eval(g, v)?;
                let (xs, ys) = (self.elems(q, &a)?, self.elems(q, &b)?);
                self.charge(xs.len() * ys.len() * 3)?;
                let mut out = Vec::with_capacity(xs.len() * ys.len());
                for x in xs {
                    for y in ys {
                        out.push(Value::tuple(vec![("1", x.clone()), ("2", y.clone())]));
                    }
                }
                self.mk(out)
            }
            EqAtomic(a, b) => {
                let r = value_equal(self.at(q, v, a)?, self.at(q, v, b)?, EqMode::Atomic)?;
                self.boolean(r)
            }
            EqMon(a, b) => {
                let r = value_equal(self.at(q, v, a)?, self.at(q, v, b)?, EqMode::Mon)?;
                self.boolean(r)
            }
            EqDeep(a, b) => {
                let r = self.at(q, v, a)? == self.at(q, v, b)?;
                self.boolean(r)
            }
            Not => {
                let r = self.elems(q, v)?.is_empty();
                self.boolean(r)
            }
            True => {
                let r = !self.elems(q, v)?.is_empty();
                self.boolean(r)
            }
            Unique => {
                let mut seen = BTreeSet::new();
                let out =
                    self.elems(q, v)?.iter().filter(|x| seen.insert(*x)).cloned().collect();
                self.mk(out)
            }
            Monus => {
                let (r, s) = self.rs(q, v)?;
                let mut avail: BTreeMap<&Value, usize> = BTreeMap::new();
                for x in s {
                    *avail.entry(x).or_default() += 1;
                }
                let mut out = Vec::new();
                for x in r {
                    match avail.get_mut(x) {
                        Some(n) if *n > 0 => *n -= 1,
                        _ => out.push(x.clone()),
                    }
                }
                self.mk(out)
            }
            Diff => {
                let (r, s) = self.rs(q, v)?;
                let s: BTreeSet<&Value> = s.iter().collect();
                let out = r.iter().filter(|x| !s.contains(x)).cloned().collect();
                self.mk(out)
            }
            Intersect => {
                let (r, s) = self.rs(q, v)?;
                self.mk(intersect(r, s))
            }
            Select(c) => {
                let mut out = Vec::new();
                for x in self.elems(q, v)? {
                    if self.cond(q, c, x)? {
                        out.push(x.clone());
                    }
                }
                self.mk(out)
            }
            SubsetEq(a, b) => {
                let xs = self.at(q, v, a)?;
                let ys = self.elems(q, self.at(q, v, b)?)?;
                let r = self.subset(q, xs, ys)?;
                self.boolean(r)
            }
            MemberOf(a, b) => {
                let x = Value::coll(self.sem, vec![self.at(q, v, a)?.clone()]);
                let ys = self.elems(q, self.at(q, v, b)?)?;
                let r = self.subset(q, &x, ys)?;
                self.boolean(r)
            }
            Nest { label, grouped } => {
                let rs = self.elems(q, v)?;
                let mut out = Vec::with_capacity(rs.len());
                for r in rs {
                    let fields = r.fields().ok_or_else(|| Error::Runtime(format!("nest on `{r}`")))?;
                    let key = |t: &Value| -> Vec<Value> {
                        t.fields()
                            .unwrap_or(&[])
                            .iter()
                            .filter(|(l, _)| !grouped.contains(l))
                            .map(|(_, x)| x.clone())
                            .collect()
                    };
                    let k = key(r);
                    let mut group = Vec::new();
                    for r2 in rs {
                        if key(r2) == k {
                            let g: Vec<(Label, Value)> = grouped
                                .iter()
                                .map(|l| Ok((l.clone(), self.at(q, r2, std::slice::from_ref(l))?.clone())))
                                .collect::<Result<_>>()?;
                            group.push(Value::Tuple(g.into()));
                        }
                    }
                    let mut t: Vec<(Label, Value)> =
                        fields.iter().filter(|(l, _)| !grouped.contains(l)).cloned().collect();
                    t.push((label.clone(), self.mk(group)?));
                    self.charge(t.len() + 1)?;
                    out.push(Value::Tuple(t.into()));
                }
                self.mk(out)
            }
        }
    }

    fn rs<'v>(&self, q: &Expr, v: &'v Value) -> Result<(&'v [Value], &'v [Value])> {
        let r = self.elems(q, self.at(q, v, &["R".into()])?)?;
        let s = self.elems(q, self.at(q, v, &["S".into()])?)?;
        Ok((r, s))
    }

    /// `xs ⊆ ys` read as `xs = xs ∩ ys`, with the intersection's multiplicities.
    fn subset(&self, q: &Expr, xs: &Value, ys: &[Value]) -> Result<bool> {
        let inter = intersect(self.elems(q, xs)?, ys);
        Ok(*xs == Value::coll(self.sem, inter))
    }

    pub fn cond(&self, q: &Expr, c: &Cond, x: &Value) -> Result<bool> {
        Ok(match c {
            Cond::Cmp(p, rhs, mode) => {
                let a = self.at(q, x, p)?;
                match rhs {
                    Operand::Path(r) => value_equal(a, self.at(q, x, r)?, *mode)?,
                    Operand::Const(k) => a.as_atom() == Some(&**k),
                }
            }
            Cond::In(p, set) => {
                let a = self.at(q, x, p)?;
                set.iter().any(|k| a.as_atom() == Some(&**k))
            }
            Cond::And(a, b) => self.cond(q, a, x)? && self.cond(q, b, x)?,
            Cond::Or(a, b) => self.cond(q, a, x)? || self.cond(q, b, x)?,
            Cond::Not(a) => !self.cond(q, a, x)?,
            Cond::Iff(a, b) => self.cond(q, a, x)? == self.cond(q, b, x)?,
        })
    }
}

/// Pairs every `r` with every equal `s`, keeping `r`; outer loop over `rs`.
fn intersect(rs: &[Value], ss: &[Value]) -> Vec<Value> {
    let mut counts: BTreeMap<&Value, usize> = BTreeMap::new();
    for s in ss {
        *counts.entry(s).or_default() += 1;
    }
    let mut out = Vec::new();
    for r in rs {
        for _ in 0..counts.get(r).copied().unwrap_or(0) {
            out.push(r.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::parse::parse_ma;
    use crate::value::parse_value;

    fn run(q: &str, v: &str, sem: Kind) -> String {
        eval_ma(&parse_ma(q).unwrap(), &parse_value(v).unwrap(), sem).unwrap().to_string()
    }

    const PHI01: &str = "union('0' ; sng, '1' ; sng)";

    #[test]
    fn cartesian_square_of_zero_one() {
        let q = format!("{PHI01} ; cart(id, id)");
        assert_eq!(
            run(&q, "<>", Kind::Set),
            "{<1: 0, 2: 0>, <1: 0, 2: 1>, <1: 1, 2: 0>, <1: 1, 2: 1>}"
        );
    }

    #[test]
    fn identity_and_pairwith() {
        assert_eq!(run("id", "{b, a}", Kind::Set), "{a, b}");
        assert_eq!(
            run("pairwith[A]", "<A: [x, y, x], B: b>", Kind::List),
            "[<A: x, B: b>, <A: y, B: b>, <A: x, B: b>]"
        );
    }

    #[test]
    fn difference_program_from_selection() {
        let empty_sr = "flatmap(tup[1 = id, 2 = pi[S_R] ; map(unit) ; not] ; pairwith[2] ; map(pi[1]))";
        let q = format!(
            "pairwith[R] ; map(tup[R = pi[R], S_R = tup[R = pi[R], S = pi[S]] ; pairwith[S] ; select[R = S]]) ; {empty_sr} ; map(pi[R])"
        );
        assert_eq!(run(&q, "<R: {a, b}, S: {b}>", Kind::Set), "{a}");
        assert_eq!(run("diff", "<R: {a, b}, S: {b}>", Kind::Set), "{a}");
    }

    #[test]
    fn list_and_bag_operators() {
        assert_eq!(run("true", "[<>, <>]", Kind::List), "[<>]");
        assert_eq!(run("true", "[]", Kind::List), "[]");
        assert_eq!(run("monus", "<R: {|a, a, b|}, S: {|a, c|}>", Kind::Bag), "{|a, b|}");
        assert_eq!(run("unique", "[b, a, b]", Kind::List), "[b, a]");
        assert_eq!(run("not", "{}", Kind::Set), "{<>}");
        assert_eq!(run("not ; not", "{<>}", Kind::Set), "{<>}");
        assert_eq!(run("union", "<1: [a, b], 2: [a]>", Kind::List), "[a, b, a]");
        assert_eq!(run("union", "<1: {|a, b|}, 2: {|a|}>", Kind::Bag), "{|a, a, b|}");
    }

    #[test]
    fn extended_operators() {
        assert_eq!(
            run("nest[C = (B)]", "{<A: 1, B: x>, <A: 1, B: y>, <A: 2, B: z>}", Kind::Set),
            "{<A: 1, C: {<B: x>, <B: y>}>, <A: 2, C: {<B: z>}>}"
        );
        assert_eq!(run("subseteq[A, B]", "<A: {a}, B: {a, b}>", Kind::Set), "{<>}");
        assert_eq!(run("subseteq[B, A]", "<A: {a}, B: {a, b}>", Kind::Set), "{}");
        assert_eq!(run("in[A, B]", "<A: a, B: {a, b}>", Kind::Set), "{<>}");
        assert_eq!(run("cap", "<R: {a, b}, S: {b, c}>", Kind::Set), "{b}");
        assert_eq!(run("select[A in {x, y}]", "{<A: x>, <A: z>}", Kind::Set), "{<A: x>}");
        assert_eq!(run("eqmon[A, B]", "<A: <C: c>, B: <C: c>>", Kind::Set), "{<>}");
    }

    #[test]
    fn budget_guard_trips() {
        let q = parse_ma(&format!("{PHI01} ; cart(id, id) ; cart(id, id) ; cart(id, id)")).unwrap();
        let e = Evaluator::new(Kind::Set, 100).eval(&q, &Value::unit());
        assert_eq!(e, Err(Error::Budget(100)));
    }

    #[test]
    fn type_errors_are_reported_before_evaluation() {
        let e = eval_ma(&parse_ma("pi[A]").unwrap(), &Value::atom("a"), Kind::Set);
        assert!(matches!(e, Err(Error::Type { .. })));
    }
}
