//! Deterministic-tree semantics: values as sets of root-to-leaf paths over
//! a binary pairing term language, and query evaluation directly on them.
//!
//! Two encodings are supported. `Plain` follows the path rules literally:
//! an empty collection produced by a query has no paths and vanishes from
//! its parent. `Marked` additionally gives every collection node a `[]`
//! path, which keeps empty members visible and lets negation see them.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::ma::{Expr, Path as LabelPath};
use crate::value::{is_bare_char, write_name, Cursor, Kind, Label, Type, Value};

/// One step of a path.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathTerm {
    Lab(Label),
    /// The unit tuple marker `⟨⟩`.
    Unit,
    /// The collection marker `[]`.
    Empty,
    /// A composite index; the right component is itself a right-nested chain.
    Pair(Box<PathTerm>, Box<PathTerm>),
}

pub type Path = Vec<PathTerm>;
pub type PathSet = BTreeSet<Path>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    Plain,
    Marked,
}

impl PathTerm {
    pub fn lab(s: &str) -> PathTerm {
        PathTerm::Lab(s.into())
    }

    pub fn pair(a: PathTerm, b: PathTerm) -> PathTerm {
        PathTerm::Pair(Box::new(a), Box::new(b))
    }

    fn is_marker(&self) -> bool {
        matches!(self, PathTerm::Unit | PathTerm::Empty)
    }

    /// Steps that can only be collection member indexes.
    fn is_index_like(&self) -> bool {
        match self {
            PathTerm::Lab(l) => is_numeral(l) || &**l == "s",
            PathTerm::Pair(..) => true,
            _ => false,
        }
    }
}

fn is_numeral(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn cmp_labels(a: &str, b: &str) -> Ordering {
    match (is_numeral(a), is_numeral(b)) {
        (true, true) => {
            let (a, b) = (a.trim_start_matches('0'), b.trim_start_matches('0'));
            a.len().cmp(&b.len()).then_with(|| a.cmp(b))
        }
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (false, false) => a.as_bytes().cmp(b.as_bytes()),
    }
}

impl Ord for PathTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        use PathTerm::*;
        let rank = |t: &PathTerm| match t {
            Lab(_) => 0,
            Unit => 1,
            Empty => 2,
            Pair(..) => 3,
        };
        match (self, other) {
            (Lab(a), Lab(b)) => cmp_labels(a, b).then_with(|| a.cmp(b)),
            (Pair(a, b), Pair(c, d)) => a.cmp(c).then_with(|| b.cmp(d)),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl PartialOrd for PathTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn write_chain(f: &mut impl fmt::Write, t: &PathTerm) -> fmt::Result {
    match t {
        PathTerm::Pair(a, b) => {
            write_step(f, a)?;
            f.write_str(".")?;
            write_chain(f, b)
        }
        _ => write_step(f, t),
    }
}

fn write_step(f: &mut impl fmt::Write, t: &PathTerm) -> fmt::Result {
    match t {
        PathTerm::Lab(l) => write_name(f, l),
        PathTerm::Unit => f.write_str("⟨⟩"),
        PathTerm::Empty => f.write_str("[]"),
        PathTerm::Pair(..) => {
            f.write_str("(")?;
            write_chain(f, t)?;
            f.write_str(")")
        }
    }
}

impl fmt::Display for PathTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_step(f, self)
    }
}

pub fn print_path(p: &[PathTerm]) -> String {
    let mut s = String::new();
    for (i, t) in p.iter().enumerate() {
        if i > 0 {
            s.push('.');
        }
        write_step(&mut s, t).expect("writing to a String");
    }
    s
}

/// One path per line, in canonical order.
pub fn print_pathset(v: &PathSet) -> String {
    v.iter().map(|p| print_path(p) + "\n").collect()
}

pub fn parse_path(text: &str) -> Result<Path> {
    let mut c = Cursor::new(text);
    let p = chain(&mut c)?;
    c.finish()?;
    Ok(p)
}

pub fn parse_pathset(text: &str) -> Result<PathSet> {
    text.lines().filter(|l| !l.trim().is_empty()).map(parse_path).collect()
}

pub(crate) fn chain(c: &mut Cursor) -> Result<Path> {
    let mut out = vec![step(c)?];
    while c.eat(".") {
        out.push(step(c)?);
    }
    Ok(out)
}

pub(crate) fn nest(mut p: Path) -> PathTerm {
    let mut acc = p.pop().expect("nonempty chain");
    while let Some(t) = p.pop() {
        acc = PathTerm::pair(t, acc);
    }
    acc
}

fn step(c: &mut Cursor) -> Result<PathTerm> {
    c.skip_ws();
    if c.eat("(") {
        let inner = chain(c)?;
        if inner.len() < 2 {
            return Err(c.err("a parenthesized step needs at least two components"));
        }
        c.expect(")")?;
        return Ok(nest(inner));
    }
    if c.eat("⟨⟩") || c.eat("<>") {
        return Ok(PathTerm::Unit);
    }
    if c.eat("[]") {
        return Ok(PathTerm::Empty);
    }
    if c.rest().starts_with('"') || c.rest().starts_with(is_bare_char) {
        return Ok(PathTerm::Lab(c.name()?.into()));
    }
    Err(c.err("expected a path step"))
}

/// Encodes a value. Members are numbered `1..n` in collection order.
pub fn encode_det(v: &Value, enc: Encoding) -> PathSet {
    let mut out = PathSet::new();
    fn go(v: &Value, enc: Encoding, prefix: &mut Path, out: &mut PathSet) {
        match v {
            Value::Atom(a) => {
                prefix.push(PathTerm::Lab(a.clone()));
                out.insert(prefix.clone());
                prefix.pop();
            }
            Value::Tuple(fs) if fs.is_empty() => {
                prefix.push(PathTerm::Unit);
                out.insert(prefix.clone());
                prefix.pop();
            }
            Value::Tuple(fs) => {
                for (l, x) in fs.iter() {
                    prefix.push(PathTerm::Lab(l.clone()));
                    go(x, enc, prefix, out);
                    prefix.pop();
                }
            }
            Value::Coll(_, es) => {
                if es.is_empty() || enc == Encoding::Marked {
                    prefix.push(PathTerm::Empty);
                    out.insert(prefix.clone());
                    prefix.pop();
                }
                for (k, x) in es.iter().enumerate() {
                    prefix.push(PathTerm::Lab((k + 1).to_string().into()));
                    go(x, enc, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    go(v, enc, &mut Vec::new(), &mut out);
    out
}

fn strip<'a>(v: &'a PathSet, prefix: &'a [PathTerm]) -> impl Iterator<Item = &'a [PathTerm]> + 'a {
    v.iter().filter(move |p| p.len() > prefix.len() && p.starts_with(prefix)).map(move |p| &p[prefix.len()..])
}

fn has(v: &PathSet, p: &[PathTerm]) -> bool {
    v.contains(p)
}

fn labels(p: &LabelPath) -> Path {
    p.iter().map(|l| PathTerm::Lab(l.clone())).collect()
}

/// Groups `i.v` paths by their first step, skipping the bare markers.
fn members(v: &PathSet) -> BTreeMap<&PathTerm, PathSet> {
    let mut out: BTreeMap<&PathTerm, PathSet> = BTreeMap::new();
    for p in v {
        if p.len() >= 2 {
            out.entry(&p[0]).or_default().insert(p[1..].to_vec());
        }
    }
    out
}

fn cons(head: PathTerm, rest: &[PathTerm]) -> Path {
    let mut p = Vec::with_capacity(rest.len() + 1);
    p.push(head);
    p.extend_from_slice(rest);
    p
}

fn true_path() -> Path {
    vec![PathTerm::lab("s"), PathTerm::Unit]
}

/// Evaluates a core query on a path set.
pub fn eval_det(q: &Expr, v: &PathSet, enc: Encoding) -> Result<PathSet> {
    use Expr::*;
    let marked = enc == Encoding::Marked;
    let empty_marker = || vec![PathTerm::Empty];
    let mut out = PathSet::new();
    match q {
        Id => return Ok(v.clone()),
        Const(c) => {
            out.insert(vec![PathTerm::Lab(c.clone())]);
        }
        Empty => {
            if marked {
                out.insert(empty_marker());
            }
        }
        Unit => {
            out.insert(vec![PathTerm::Unit]);
        }
        Sng => {
            out.extend(v.iter().map(|p| cons(PathTerm::lab("s"), p)));
            if marked {
                out.insert(empty_marker());
            }
        }
        Proj(p) => {
            let pre = labels(p);
            out.extend(strip(v, &pre).map(<[PathTerm]>::to_vec));
        }
        Compose(f, g) => return eval_det(g, &eval_det(f, v, enc)?, enc),
        Flatten => {
            for p in v {
                if p.len() >= 3 {
                    out.insert(cons(PathTerm::pair(p[0].clone(), p[1].clone()), &p[2..]));
                }
            }
            if marked && has(v, &[PathTerm::Empty]) {
                out.insert(empty_marker());
            }
        }
        EqAtomic(a, b) => {
            let (pa, pb) = (labels(a), labels(b));
            let bs: BTreeSet<&[PathTerm]> = strip(v, &pb).collect();
            if strip(v, &pa).any(|s| bs.contains(s)) {
                out.insert(true_path());
            }
            if marked {
                out.insert(empty_marker());
            }
        }
        Union(f, g) => {
            let parts = [eval_det(f, v, enc)?, eval_det(g, v, enc)?];
            for (tag, w) in ["1", "2"].into_iter().zip(&parts) {
                for p in w {
                    if p.len() >= 2 {
                        out.insert(cons(PathTerm::pair(PathTerm::lab(tag), p[0].clone()), &p[1..]));
                    }
                }
            }
            if marked && has(&parts[0], &[PathTerm::Empty]) {
                out.insert(empty_marker());
            }
        }
        Tuple(fs) if fs.is_empty() => {
            out.insert(vec![PathTerm::Unit]);
        }
        Tuple(fs) => {
            for (l, f) in fs {
                for p in eval_det(f, v, enc)? {
                    out.insert(cons(PathTerm::Lab(l.clone()), &p));
                }
            }
        }
        Map(f) => {
            for (i, sub) in members(v) {
                for w in eval_det(f, &sub, enc)? {
                    out.insert(cons(i.clone(), &w));
                }
            }
            if marked && has(v, &[PathTerm::Empty]) {
                out.insert(empty_marker());
            }
        }
        PairWith(a) => {
            let aj = PathTerm::Lab(a.clone());
            let mine: PathSet = strip(v, std::slice::from_ref(&aj)).map(<[PathTerm]>::to_vec).collect();
            let ms = members(&mine);
            let others: Vec<&Path> = v.iter().filter(|p| p[0] != aj).collect();
            for (i, sub) in &ms {
                for w in sub {
                    out.insert([(*i).clone(), aj.clone()].into_iter().chain(w.iter().cloned()).collect());
                }
                for w in &others {
                    out.insert(cons((*i).clone(), w));
                }
            }
            if marked && has(&mine, &[PathTerm::Empty]) {
                out.insert(empty_marker());
            }
        }
        Not | True => {
            if q == &Not && !marked {
                return Err(Error::Unsupported("negation needs the marked encoding".into()));
            }
            let nonempty = v.iter().any(|p| p.len() >= 2);
            if nonempty == (q == &True) {
                out.insert(true_path());
            }
            if marked && has(v, &[PathTerm::Empty]) {
                out.insert(empty_marker());
            }
        }
        other => {
            return Err(Error::Unsupported(format!(
                "`{other}` has no deterministic-tree rule; desugar to positive core first"
            )))
        }
    }
    Ok(out)
}

/// Decodes a path set. Without a type, numerals, `s` and composite steps
/// are read as member indexes and collections decode as lists.
pub fn decode_det(v: &PathSet, ty: Option<&Type>) -> Result<Value> {
    let paths: Vec<&[PathTerm]> = v.iter().map(|p| p.as_slice()).collect();
    decode(&paths, ty)
}

fn default_of(ty: Option<&Type>) -> Result<Value> {
    match ty {
        Some(Type::Coll(k, _)) => Ok(Value::empty(*k)),
        Some(Type::Tuple(fs)) => Ok(Value::Tuple(
            fs.iter().map(|(l, t)| Ok((l.clone(), default_of(Some(t))?))).collect::<Result<_>>()?,
        )),
        _ => Err(Error::Structure("no paths for a value that is not a collection".into())),
    }
}

fn decode(paths: &[&[PathTerm]], ty: Option<&Type>) -> Result<Value> {
    if paths.is_empty() {
        return default_of(ty);
    }
    let leaves: Vec<&PathTerm> = paths.iter().filter(|p| p.len() == 1).map(|p| &p[0]).collect();
    let inner: Vec<&[PathTerm]> = paths.iter().filter(|p| p.len() > 1).copied().collect();
    let kind = |ty: Option<&Type>| match ty {
        Some(Type::Coll(k, _)) => *k,
        _ => Kind::List,
    };
    if !leaves.is_empty() {
        let marker_only = leaves.len() == 1 && *leaves[0] == PathTerm::Empty;
        if !inner.is_empty() && !marker_only {
            return Err(Error::Structure(format!("`{}` is a proper prefix of another path", leaves[0])));
        }
        if inner.is_empty() {
            if leaves.len() > 1 {
                return Err(Error::Structure("two leaves under one node".into()));
            }
            return match (leaves[0], ty) {
                (PathTerm::Empty, Some(Type::Coll(..)) | Some(Type::Unknown) | None) => {
                    Ok(Value::empty(kind(ty)))
                }
                (PathTerm::Unit, Some(Type::Tuple(f))) if f.is_empty() => Ok(Value::unit()),
                (PathTerm::Unit, Some(Type::Unknown) | None) => Ok(Value::unit()),
                (PathTerm::Lab(a), Some(Type::Dom) | Some(Type::Unknown) | None) => Ok(Value::Atom(a.clone())),
                (t, Some(ty)) => Err(Error::Structure(format!("leaf `{t}` where `{ty}` was expected"))),
                (t, None) => Err(Error::Structure(format!("unexpected leaf `{t}`"))),
            };
        }
    }
    let mut groups: BTreeMap<&PathTerm, Vec<&[PathTerm]>> = BTreeMap::new();
    for p in &inner {
        if p[0].is_marker() {
            return Err(Error::Structure(format!("marker `{}` followed by more steps", p[0])));
        }
        groups.entry(&p[0]).or_default().push(&p[1..]);
    }
    let as_coll = match ty {
        Some(Type::Coll(..)) => true,
        Some(Type::Tuple(_)) | Some(Type::Dom) => false,
        _ => {
            let idx = groups.keys().filter(|t| t.is_index_like()).count();
            if idx != 0 && idx != groups.len() {
                return Err(Error::Structure("mixed index and label children".into()));
            }
            idx != 0
        }
    };
    if as_coll {
        let et = match ty {
            Some(Type::Coll(_, e)) => Some(&**e),
            _ => None,
        };
        let elems = groups.values().map(|g| decode(g, et)).collect::<Result<Vec<_>>>()?;
        return Ok(Value::coll(kind(ty), elems));
    }
    match ty {
        Some(Type::Tuple(fs)) => {
            for k in groups.keys() {
                if !matches!(k, PathTerm::Lab(l) if fs.iter().any(|(m, _)| m == l)) {
                    return Err(Error::Structure(format!("unexpected field `{k}`")));
                }
            }
            let out = fs
                .iter()
                .map(|(l, t)| {
                    let key = PathTerm::Lab(l.clone());
                    let g = groups.get(&key).map(Vec::as_slice).unwrap_or(&[]);
                    Ok((l.clone(), decode(g, Some(t))?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Value::Tuple(out.into()))
        }
        Some(Type::Dom) => Err(Error::Structure("inner node where an atom was expected".into())),
        _ => {
            let out = groups
                .iter()
                .map(|(k, g)| match k {
                    PathTerm::Lab(l) => Ok((l.clone(), decode(g, None)?)),
                    other => Err(Error::Structure(format!("`{other}` is not a field label"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Value::Tuple(out.into()))
        }
    }
}

/// What a plain-encoded evaluation can see of a value: members whose
/// subtree has no leaves are dropped.
pub fn plain_view(v: &Value) -> Value {
    fn invisible(v: &Value) -> bool {
        match v {
            Value::Atom(_) => false,
            Value::Tuple(fs) => !fs.is_empty() && fs.iter().all(|(_, x)| invisible(x)),
            Value::Coll(_, es) => es.iter().all(invisible),
        }
    }
    match v {
        Value::Atom(_) => v.clone(),
        Value::Tuple(fs) => Value::Tuple(fs.iter().map(|(l, x)| (l.clone(), plain_view(x))).collect()),
        Value::Coll(k, es) => Value::coll(*k, es.iter().filter(|x| !invisible(x)).map(plain_view).collect()),
    }
}

/// Checks that no path is a proper prefix of another.
pub fn is_prefix_free(v: &PathSet) -> bool {
    let ps: Vec<&Path> = v.iter().collect();
    ps.iter().all(|p| ps.iter().all(|q| q.len() <= p.len() || !q.starts_with(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::parse_ma;
    use crate::value::{parse_type, parse_value};

    fn set(paths: &[&str]) -> PathSet {
        paths.iter().map(|p| parse_path(p).unwrap()).collect()
    }

    fn pair_product_query() -> Expr {
        parse_ma("tup[1 = '0' ; sng, 2 = '1' ; sng] ; union ; tup[A = id, B = id] ; pairwith[A] ; map(pairwith[B]) ; flatten")
            .unwrap()
    }

    #[test]
    fn path_text_roundtrips() {
        for s in ["((1.s).1.s).A.0", "(1.s).0", "s.⟨⟩", "[]", "a", "\"x y\".b", "((1.2).(3.4).5).z"] {
            assert_eq!(print_path(&parse_path(s).unwrap()), s);
        }
        assert!(parse_path("(a)").is_err());
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_det(&Value::atom("a"), Encoding::Plain), set(&["a"]));
        let q = parse_ma("'a' ; sng").unwrap();
        let out = eval_det(&q, &set(&["dummy"]), Encoding::Plain).unwrap();
        assert_eq!(out, set(&["s.a"]));
        assert_eq!(encode_det(&parse_value("[a, []]").unwrap(), Encoding::Plain), set(&["1.a", "2.[]"]));
        assert_eq!(
            encode_det(&parse_value("[a, []]").unwrap(), Encoding::Marked),
            set(&["[]", "1.a", "2.[]"])
        );
    }

    #[test]
    fn union_of_singletons() {
        let q = parse_ma("tup[1 = '0' ; sng, 2 = '1' ; sng] ; union").unwrap();
        let out = eval_det(&q, &set(&["dummy"]), Encoding::Plain).unwrap();
        assert_eq!(out, set(&["(1.s).0", "(2.s).1"]));
        assert_eq!(decode_det(&out, None).unwrap().to_string(), "[0, 1]");
    }

    #[test]
    fn cartesian_square_has_eight_paths() {
        let out = eval_det(&pair_product_query(), &set(&["dummy"]), Encoding::Plain).unwrap();
        let expected = set(&[
            "((1.s).1.s).A.0",
            "((1.s).1.s).B.0",
            "((1.s).2.s).A.0",
            "((1.s).2.s).B.1",
            "((2.s).1.s).A.1",
            "((2.s).1.s).B.0",
            "((2.s).2.s).A.1",
            "((2.s).2.s).B.1",
        ]);
        assert_eq!(out, expected);
        assert_eq!(
            decode_det(&out, None).unwrap().to_string(),
            "[<A: 0, B: 0>, <A: 0, B: 1>, <A: 1, B: 0>, <A: 1, B: 1>]"
        );
    }

    #[test]
    fn identity_and_equality_rules() {
        let v = set(&["A.c", "B.c"]);
        assert_eq!(eval_det(&Expr::Id, &v, Encoding::Plain).unwrap(), v);
        assert_eq!(eval_det(&Expr::eqatom("A", "B"), &v, Encoding::Plain).unwrap(), set(&["s.⟨⟩"]));
        let w = set(&["A.c", "B.d"]);
        assert!(eval_det(&Expr::eqatom("A", "B"), &w, Encoding::Plain).unwrap().is_empty());
        assert_eq!(eval_det(&Expr::eqatom("A", "B"), &w, Encoding::Marked).unwrap(), set(&["[]"]));
    }

    #[test]
    fn negation_needs_marks() {
        assert!(eval_det(&Expr::Not, &set(&["[]"]), Encoding::Plain).is_err());
        assert_eq!(eval_det(&Expr::Not, &set(&["[]"]), Encoding::Marked).unwrap(), set(&["[]", "s.⟨⟩"]));
        assert_eq!(eval_det(&Expr::Not, &set(&["[]", "1.a"]), Encoding::Marked).unwrap(), set(&["[]"]));
    }

    #[test]
    fn typed_decoding_restores_empties_and_numeric_labels() {
        let t = parse_type("<1: [Dom], 2: [[Dom]]>").unwrap();
        let v = parse_value("<1: [a], 2: [[], [b]]>").unwrap();
        let m = encode_det(&v, Encoding::Marked);
        assert_eq!(decode_det(&m, Some(&t)).unwrap(), v);
        let p = encode_det(&v, Encoding::Plain);
        assert_eq!(decode_det(&p, Some(&t)).unwrap(), v);
    }

    #[test]
    fn decoding_rejects_inconsistent_sets() {
        assert!(decode_det(&set(&["a", "a.b"]), None).is_err());
        assert!(decode_det(&set(&["1.a", "B.b"]), None).is_err());
        assert!(decode_det(&set(&["a", "b"]), None).is_err());
    }

    #[test]
    fn plain_view_drops_leafless_members() {
        let v = parse_value("[[a], [], [[]]]").unwrap();
        assert_eq!(plain_view(&v).to_string(), "[[a]]");
    }
}
