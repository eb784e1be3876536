//! Complex values: atoms, labeled tuples and set/list/bag collections,
//! together with their types, canonical text form and equality.
//!
//! Collections are canonicalized on construction. Sets are sorted and
//! deduplicated, bags are sorted, lists keep their order.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Label = Arc<str>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Set,
    List,
    Bag,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Set => "set",
            Kind::List => "list",
            Kind::Bag => "bag",
        }
    }

    fn delims(self) -> (&'static str, &'static str) {
        match self {
            Kind::Set => ("{", "}"),
            Kind::List => ("[", "]"),
            Kind::Bag => ("{|", "|}"),
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Kind> {
        match s {
            "set" => Ok(Kind::Set),
            "list" => Ok(Kind::List),
            "bag" => Ok(Kind::Bag),
            _ => Err(Error::syntax(0, format!("unknown collection kind `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Atom(Label),
    Tuple(Arc<[(Label, Value)]>),
    Coll(Kind, Arc<[Value]>),
}

impl Value {
    pub fn atom(s: &str) -> Value {
        Value::Atom(Arc::from(s))
    }

    /// Builds a tuple; labels must be pairwise distinct.
    pub fn tuple<L: Into<Label>>(fields: Vec<(L, Value)>) -> Value {
        let fields: Vec<(Label, Value)> = fields.into_iter().map(|(l, v)| (l.into(), v)).collect();
        debug_assert!(distinct_labels(&fields), "duplicate tuple label");
        Value::Tuple(fields.into())
    }

    pub fn unit() -> Value {
        Value::Tuple(Arc::from(Vec::new()))
    }

    /// Builds a collection and puts it in canonical form.
    pub fn coll(kind: Kind, mut elems: Vec<Value>) -> Value {
        match kind {
            Kind::Set => {
                elems.sort();
                elems.dedup();
            }
            Kind::Bag => elems.sort(),
            Kind::List => {}
        }
        Value::Coll(kind, elems.into())
    }

    pub fn empty(kind: Kind) -> Value {
        Value::Coll(kind, Arc::from(Vec::new()))
    }

    pub fn boolean(kind: Kind, b: bool) -> Value {
        if b {
            Value::Coll(kind, Arc::from(vec![Value::unit()]))
        } else {
            Value::empty(kind)
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Value::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn fields(&self) -> Option<&[(Label, Value)]> {
        match self {
            Value::Tuple(f) => Some(f),
            _ => None,
        }
    }

    pub fn elems(&self) -> Option<&[Value]> {
        match self {
            Value::Coll(_, e) => Some(e),
            _ => None,
        }
    }

    pub fn kind(&self) -> Option<Kind> {
        match self {
            Value::Coll(k, _) => Some(*k),
            _ => None,
        }
    }

    pub fn field(&self, label: &str) -> Option<&Value> {
        self.fields()?.iter().find(|(l, _)| &**l == label).map(|(_, v)| v)
    }

    /// Follows a dotted projection path.
    pub fn at_path(&self, path: &[Label]) -> Option<&Value> {
        path.iter().try_fold(self, |v, l| v.field(l))
    }

    /// Reads a collection as a Boolean: nonempty means true.
    pub fn truthy(&self) -> Option<bool> {
        self.elems().map(|e| !e.is_empty())
    }

    /// Number of nodes of the value tree.
    pub fn node_count(&self) -> u64 {
        match self {
            Value::Atom(_) => 1,
            Value::Tuple(f) => 1 + f.iter().map(|(_, v)| v.node_count()).sum::<u64>(),
            Value::Coll(_, e) => 1 + e.iter().map(Value::node_count).sum::<u64>(),
        }
    }

    /// True if the value contains no collection anywhere.
    pub fn is_collection_free(&self) -> bool {
        match self {
            Value::Atom(_) => true,
            Value::Tuple(f) => f.iter().all(|(_, v)| v.is_collection_free()),
            Value::Coll(..) => false,
        }
    }

    /// Rebuilds every collection with the given kind.
    pub fn with_kind(&self, kind: Kind) -> Value {
        match self {
            Value::Atom(_) => self.clone(),
            Value::Tuple(f) => {
                Value::Tuple(f.iter().map(|(l, v)| (l.clone(), v.with_kind(kind))).collect())
            }
            Value::Coll(_, e) => Value::coll(kind, e.iter().map(|v| v.with_kind(kind)).collect()),
        }
    }
}

fn distinct_labels<T>(fields: &[(Label, T)]) -> bool {
    fields.iter().enumerate().all(|(i, (l, _))| fields[..i].iter().all(|(m, _)| m != l))
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        use Value::*;
        match (self, other) {
            (Atom(a), Atom(b)) => a.as_bytes().cmp(b.as_bytes()),
            (Atom(_), _) => Ordering::Less,
            (_, Atom(_)) => Ordering::Greater,
            (Tuple(a), Tuple(b)) => a
                .iter()
                .map(|(l, _)| l.as_bytes())
                .cmp(b.iter().map(|(l, _)| l.as_bytes()))
                .then_with(|| a.iter().map(|(_, v)| v).cmp(b.iter().map(|(_, v)| v))),
            (Tuple(_), Coll(..)) => Ordering::Less,
            (Coll(..), Tuple(_)) => Ordering::Greater,
            (Coll(k, a), Coll(m, b)) => k
                .cmp(m)
                .then(a.len().cmp(&b.len()))
                .then_with(|| a.iter().cmp(b.iter())),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn is_bare(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_bare_char)
}

pub(crate) fn is_bare_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '#' | '+' | '-')
}

pub(crate) fn write_name(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    if is_bare(s) {
        f.write_str(s)
    } else {
        f.write_char('"')?;
        for c in s.chars() {
            if c == '"' || c == '\\' {
                f.write_char('\\')?;
            }
            f.write_char(c)?;
        }
        f.write_char('"')
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom(a) => write_name(f, a),
            Value::Tuple(fields) => {
                f.write_str("<")?;
                for (i, (l, v)) in fields.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_name(f, l)?;
                    write!(f, ": {v}")?;
                }
                f.write_str(">")
            }
            Value::Coll(k, elems) => {
                let (open, close) = k.delims();
                f.write_str(open)?;
                for (i, v) in elems.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str(close)
            }
        }
    }
}

pub fn print_value(v: &Value) -> String {
    v.to_string()
}

/// Small cursor shared by the text parsers of this crate.
pub(crate) struct Cursor<'a> {
    pub src: &'a str,
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// Consumes `tok` (after whitespace) if present.
    pub fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{tok}`")))
        }
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::syntax(self.pos, msg)
    }

    /// Reads a bare or double-quoted name.
    pub fn name(&mut self) -> Result<String> {
        self.skip_ws();
        if self.rest().starts_with('"') {
            return self.quoted('"');
        }
        let len: usize =
            self.rest().chars().take_while(|&c| is_bare_char(c)).map(char::len_utf8).sum();
        if len == 0 {
            return Err(self.err("expected a name"));
        }
        let s = self.rest()[..len].to_string();
        self.pos += len;
        Ok(s)
    }

    /// Reads a string delimited by `q`, with backslash escapes.
    pub fn quoted(&mut self, q: char) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        if !self.rest().starts_with(q) {
            return Err(self.err(format!("expected `{q}`")));
        }
        self.pos += q.len_utf8();
        let mut out = String::new();
        let mut chars = self.rest().char_indices();
        while let Some((i, c)) = chars.next() {
            if c == '\\' {
                match chars.next() {
                    Some((_, e)) => out.push(e),
                    None => break,
                }
            } else if c == q {
                self.pos += i + c.len_utf8();
                return Ok(out);
            } else {
                out.push(c);
            }
        }
        Err(Error::syntax(start, "unterminated quoted name"))
    }

    pub fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

pub fn parse_value(text: &str) -> Result<Value> {
    let mut c = Cursor::new(text);
    let v = value(&mut c)?;
    c.finish()?;
    Ok(v)
}

fn value(c: &mut Cursor) -> Result<Value> {
    match c.peek() {
        Some('<') | Some('⟨') => {
            let start = c.pos;
            if !c.eat("<") {
                c.expect("⟨")?;
            }
            let mut fields: Vec<(Label, Value)> = Vec::new();
            if !(c.eat(">") || c.eat("⟩")) {
                loop {
                    let at = c.pos;
                    let l = c.name()?;
                    if fields.iter().any(|(m, _)| **m == *l) {
                        return Err(Error::syntax(at, format!("duplicate tuple label `{l}`")));
                    }
                    c.expect(":")?;
                    fields.push((l.into(), value(c)?));
                    if c.eat(",") {
                        continue;
                    }
                    if c.eat(">") || c.eat("⟩") {
                        break;
                    }
                    return Err(Error::syntax(start, "unterminated tuple"));
                }
            }
            Ok(Value::Tuple(fields.into()))
        }
        Some('{') => {
            c.expect("{")?;
            if c.rest().starts_with('|') {
                c.pos += 1;
                let e = elems(c, "|}")?;
                Ok(Value::coll(Kind::Bag, e))
            } else {
                let e = elems(c, "}")?;
                Ok(Value::coll(Kind::Set, e))
            }
        }
        Some('[') => {
            c.expect("[")?;
            let e = elems(c, "]")?;
            Ok(Value::coll(Kind::List, e))
        }
        Some(_) => Ok(Value::Atom(c.name()?.into())),
        None => Err(c.err("unexpected end of input")),
    }
}

fn elems(c: &mut Cursor, close: &str) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    if c.eat(close) {
        return Ok(out);
    }
    loop {
        out.push(value(c)?);
        if c.eat(",") {
            continue;
        }
        c.expect(close)?;
        return Ok(out);
    }
}

/// Complex-value types. `Unknown` is the element type of an empty
/// collection literal and is compatible with every type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Dom,
    Coll(Kind, Box<Type>),
    Tuple(Vec<(Label, Type)>),
    Unknown,
}

impl Type {
    pub fn coll(kind: Kind, t: Type) -> Type {
        Type::Coll(kind, Box::new(t))
    }

    pub fn unit() -> Type {
        Type::Tuple(Vec::new())
    }

    pub fn boolean(kind: Kind) -> Type {
        Type::coll(kind, Type::unit())
    }

    pub fn tuple<L: Into<Label>>(fields: Vec<(L, Type)>) -> Type {
        Type::Tuple(fields.into_iter().map(|(l, t)| (l.into(), t)).collect())
    }

    pub fn field(&self, label: &str) -> Option<&Type> {
        match self {
            Type::Tuple(f) => f.iter().find(|(l, _)| &**l == label).map(|(_, t)| t),
            _ => None,
        }
    }

    pub fn at_path(&self, path: &[Label]) -> Option<&Type> {
        path.iter().try_fold(self, |t, l| t.field(l))
    }

    pub fn is_collection_free(&self) -> bool {
        match self {
            Type::Dom | Type::Unknown => true,
            Type::Tuple(f) => f.iter().all(|(_, t)| t.is_collection_free()),
            Type::Coll(..) => false,
        }
    }

    /// Least common refinement of two types, treating `Unknown` as a wildcard.
    pub fn join(&self, other: &Type) -> Option<Type> {
        match (self, other) {
            (Type::Unknown, t) | (t, Type::Unknown) => Some(t.clone()),
            (Type::Dom, Type::Dom) => Some(Type::Dom),
            (Type::Coll(k, a), Type::Coll(m, b)) if k == m => Some(Type::coll(*k, a.join(b)?)),
            (Type::Tuple(a), Type::Tuple(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|((l, s), (m, t))| if l == m { Some((l.clone(), s.join(t)?)) } else { None })
                .collect::<Option<Vec<_>>>()
                .map(Type::Tuple),
            _ => None,
        }
    }

    /// Collection kinds that occur anywhere in the type.
    pub fn kinds(&self, out: &mut Vec<Kind>) {
        match self {
            Type::Coll(k, t) => {
                if !out.contains(k) {
                    out.push(*k);
                }
                t.kinds(out);
            }
            Type::Tuple(f) => f.iter().for_each(|(_, t)| t.kinds(out)),
            Type::Dom | Type::Unknown => {}
        }
    }

    /// Root-to-leaf label paths of a collection-free type.
    pub fn leaf_paths(&self) -> Vec<Vec<Label>> {
        match self {
            Type::Tuple(f) => f
                .iter()
                .flat_map(|(l, t)| {
                    t.leaf_paths().into_iter().map(move |mut p| {
                        p.insert(0, l.clone());
                        p
                    })
                })
                .collect(),
            _ => vec![Vec::new()],
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Dom => f.write_str("Dom"),
            Type::Unknown => f.write_str("?"),
            Type::Coll(k, t) => {
                let (open, close) = k.delims();
                write!(f, "{open}{t}{close}")
            }
            Type::Tuple(fields) => {
                f.write_str("<")?;
                for (i, (l, t)) in fields.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_name(f, l)?;
                    write!(f, ": {t}")?;
                }
                f.write_str(">")
            }
        }
    }
}

/// Parses `Dom`, `{t}`, `[t]`, `{|t|}` and `<A: t, ...>`.
pub fn parse_type(text: &str) -> Result<Type> {
    let mut c = Cursor::new(text);
    let t = ty(&mut c)?;
    c.finish()?;
    Ok(t)
}

fn ty(c: &mut Cursor) -> Result<Type> {
    if c.eat("{|") {
        let t = ty(c)?;
        c.expect("|}")?;
        return Ok(Type::coll(Kind::Bag, t));
    }
    if c.eat("{") {
        let t = ty(c)?;
        c.expect("}")?;
        return Ok(Type::coll(Kind::Set, t));
    }
    if c.eat("[") {
        let t = ty(c)?;
        c.expect("]")?;
        return Ok(Type::coll(Kind::List, t));
    }
    if c.eat("<") || c.eat("⟨") {
        let mut fields: Vec<(Label, Type)> = Vec::new();
        if c.eat(">") || c.eat("⟩") {
            return Ok(Type::Tuple(fields));
        }
        loop {
            let at = c.pos;
            let l = c.name()?;
            if fields.iter().any(|(m, _)| **m == *l) {
                return Err(Error::syntax(at, format!("duplicate tuple label `{l}`")));
            }
            c.expect(":")?;
            fields.push((l.into(), ty(c)?));
            if c.eat(",") {
                continue;
            }
            if c.eat(">") || c.eat("⟩") {
                return Ok(Type::Tuple(fields));
            }
            return Err(c.err("expected `,` or `>`"));
        }
    }
    if c.eat("?") {
        return Ok(Type::Unknown);
    }
    match c.name()?.as_str() {
        "Dom" => Ok(Type::Dom),
        other => Err(c.err(format!("unknown type `{other}`"))),
    }
}

/// Infers the type of a value. Fails on heterogeneous collections.
pub fn type_of(v: &Value) -> Result<Type> {
    match v {
        Value::Atom(_) => Ok(Type::Dom),
        Value::Tuple(f) => {
            Ok(Type::Tuple(f.iter().map(|(l, v)| Ok((l.clone(), type_of(v)?))).collect::<Result<_>>()?))
        }
        Value::Coll(k, elems) => {
            let mut t = Type::Unknown;
            for e in elems.iter() {
                let et = type_of(e)?;
                t = t.join(&et).ok_or_else(|| {
                    Error::ty(v, format!("heterogeneous collection: `{t}` and `{et}`"))
                })?;
            }
            Ok(Type::coll(*k, t))
        }
    }
}

/// Explains why `v` does not inhabit `t`, naming the path to the first mismatch.
pub fn type_mismatch(v: &Value, t: &Type) -> Option<String> {
    fn go(v: &Value, t: &Type, at: &mut Vec<String>) -> Option<String> {
        let here = |at: &Vec<String>, what: String| {
            let p = if at.is_empty() { "root".to_string() } else { at.join(".") };
            Some(format!("at {p}: {what}"))
        };
        match (v, t) {
            (_, Type::Unknown) => None,
            (Value::Atom(_), Type::Dom) => None,
            (Value::Coll(k, elems), Type::Coll(m, et)) => {
                if k != m {
                    return here(at, format!("expected a {}, found a {}", m.name(), k.name()));
                }
                for (i, e) in elems.iter().enumerate() {
                    at.push(format!("#{}", i + 1));
                    let r = go(e, et, at);
                    at.pop();
                    if r.is_some() {
                        return r;
                    }
                }
                None
            }
            (Value::Tuple(fs), Type::Tuple(ts)) => {
                let ls: Vec<&str> = fs.iter().map(|(l, _)| &**l).collect();
                let lt: Vec<&str> = ts.iter().map(|(l, _)| &**l).collect();
                if ls != lt {
                    return here(at, format!("tuple labels {ls:?} differ from {lt:?}"));
                }
                for ((l, fv), (_, ft)) in fs.iter().zip(ts) {
                    at.push(l.to_string());
                    let r = go(fv, ft, at);
                    at.pop();
                    if r.is_some() {
                        return r;
                    }
                }
                None
            }
            _ => here(at, format!("`{v}` does not inhabit `{t}`")),
        }
    }
    go(v, t, &mut Vec::new())
}

pub fn check_type(v: &Value, t: &Type) -> bool {
    type_mismatch(v, t).is_none()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EqMode {
    Atomic,
    Mon,
    Deep,
}

impl EqMode {
    pub fn name(self) -> &'static str {
        match self {
            EqMode::Atomic => "atomic",
            EqMode::Mon => "mon",
            EqMode::Deep => "deep",
        }
    }
}

impl std::str::FromStr for EqMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<EqMode> {
        match s {
            "atomic" => Ok(EqMode::Atomic),
            "mon" => Ok(EqMode::Mon),
            "deep" => Ok(EqMode::Deep),
            _ => Err(Error::syntax(0, format!("unknown equality mode `{s}`"))),
        }
    }
}

/// Compares two values. Atomic mode needs atoms on both sides and mon mode
/// needs collection-free values. Deep mode compares sets extensionally,
/// lists pointwise and bags as multisets, which on canonical values is
/// structural equality.
pub fn value_equal(a: &Value, b: &Value, mode: EqMode) -> Result<bool> {
    match mode {
        EqMode::Atomic => {
            for v in [a, b] {
                if v.as_atom().is_none() {
                    return Err(Error::Mode(format!("atomic equality on non-atom `{v}`")));
                }
            }
        }
        EqMode::Mon => {
            for v in [a, b] {
                if let Some(c) = first_collection(v) {
                    return Err(Error::Mode(format!("mon equality on value containing `{c}`")));
                }
            }
        }
        EqMode::Deep => {}
    }
    Ok(a == b)
}

fn first_collection(v: &Value) -> Option<&Value> {
    match v {
        Value::Atom(_) => None,
        Value::Coll(..) => Some(v),
        Value::Tuple(f) => f.iter().find_map(|(_, v)| first_collection(v)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Value {
        parse_value(s).unwrap()
    }

    #[test]
    fn parses_unit_and_dedups_sets() {
        assert_eq!(v("<>"), Value::unit());
        assert_eq!(v("{a, a}").to_string(), "{a}");
        assert_eq!(v("{b, a}").to_string(), "{a, b}");
        assert_eq!(v("[a, a]").to_string(), "[a, a]");
        assert_eq!(v("{|b, a, b|}").to_string(), "{|a, b, b|}");
        assert_eq!(v("⟨A: a⟩").to_string(), "<A: a>");
    }

    #[test]
    fn parses_tuple_sets() {
        let x = v("{<A: a, B: b>, <A: c, B: d>}");
        assert_eq!(x.elems().unwrap().len(), 2);
        assert_eq!(x.to_string(), "{<A: a, B: b>, <A: c, B: d>}");
    }

    #[test]
    fn rejects_duplicate_labels_and_garbage() {
        assert!(matches!(parse_value("<A: a, A: b>"), Err(Error::Syntax { .. })));
        assert!(parse_value("{a,").is_err());
        assert!(parse_value("a b").is_err());
    }

    #[test]
    fn quoted_atoms_roundtrip() {
        let x = v(r#"{"x y", "q\"t", ">s<"}"#);
        assert_eq!(parse_value(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn canonical_order_puts_atoms_before_tuples_before_collections() {
        let x = v("{{}, <>, b, a, [], {||}}");
        assert_eq!(x.to_string(), "{a, b, <>, {}, [], {||}}");
    }

    #[test]
    fn check_type_examples() {
        assert!(check_type(&v("a"), &Type::Dom));
        let t = parse_type("{<A: Dom, B: Dom>}").unwrap();
        assert!(check_type(&v("{<A: a, B: b>}"), &t));
        assert!(!check_type(&v("[a]"), &parse_type("{Dom}").unwrap()));
        assert!(check_type(&v("{}"), &t));
        let why = type_mismatch(&v("{<A: a, B: <>>}"), &t).unwrap();
        assert!(why.contains("#1.B"), "{why}");
    }

    #[test]
    fn equality_modes() {
        assert!(value_equal(&v("a"), &v("a"), EqMode::Atomic).unwrap());
        assert!(value_equal(&v("{a,b}"), &v("{b,a}"), EqMode::Deep).unwrap());
        assert!(!value_equal(&v("[a,b]"), &v("[b,a]"), EqMode::Deep).unwrap());
        assert!(value_equal(&v("{|a,b|}"), &v("{|b,a|}"), EqMode::Deep).unwrap());
        assert!(matches!(value_equal(&v("<>"), &v("a"), EqMode::Atomic), Err(Error::Mode(_))));
        assert!(matches!(value_equal(&v("<A: {}>"), &v("<A: {}>"), EqMode::Mon), Err(Error::Mode(_))));
        assert!(value_equal(&v("<A: a, B: <C: c>>"), &v("<A: a, B: <C: c>>"), EqMode::Mon).unwrap());
    }

    #[test]
    fn type_parse_print_roundtrip() {
        for s in ["Dom", "{Dom}", "[<A: Dom, B: {|Dom|}>]", "<>", "<C: <D: Dom>, H: Dom>"] {
            assert_eq!(parse_type(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn leaf_paths_of_nested_tuple_type() {
        let t = parse_type("<C: <D: Dom, E: <F: Dom, G: Dom>>, H: Dom>").unwrap();
        let ps: Vec<String> = t
            .leaf_paths()
            .iter()
            .map(|p| p.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("."))
            .collect();
        assert_eq!(ps, ["C.D", "C.E.F", "C.E.G", "H"]);
        assert!(Type::unit().leaf_paths().is_empty());
        assert_eq!(Type::Dom.leaf_paths(), vec![Vec::<Label>::new()]);
    }
}
