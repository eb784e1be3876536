//! Encodings between trees and complex values, and the translations
//! between Core XQuery (child axis) and monad algebra on lists.

use crate::error::{Error, Result};
use crate::ma::typing::infer;
use crate::ma::{desugar, eval_ma, Cond, Expr, Operand, Path};
use crate::value::{type_of, EqMode, Kind, Label, Type, Value};
use crate::xml::{valid_tag, Tree};
use crate::xq::{check_xq, eval_xq, is_singleton_form, xq_desugar, xq_desugar_keep_not, Axis, Test, Xq};

/// `⟨label: a, children: [C(c1), …]⟩`.
pub fn encode_c(t: &Tree) -> Value {
    Value::tuple(vec![
        ("label", Value::Atom(t.label.clone())),
        ("children", Value::coll(Kind::List, t.children.iter().map(encode_c).collect())),
    ])
}

pub fn decode_c(v: &Value) -> Result<Tree> {
    let bad = || Error::Structure(format!("`{v}` is not a tree encoding"));
    let label = v.field("label").and_then(Value::as_atom).ok_or_else(bad)?;
    let children = match v.field("children") {
        Some(Value::Coll(Kind::List, cs)) if v.fields().map(<[_]>::len) == Some(2) => cs,
        _ => return Err(bad()),
    };
    Ok(Tree { label: label.into(), children: children.iter().map(decode_c).collect::<Result<_>>()? })
}

/// Atoms become leaves, tuples `<tup>` with one wrapper per field, lists `<list>`.
pub fn encode_t(v: &Value) -> Result<Tree> {
    match v {
        Value::Atom(a) => Ok(Tree { label: a.clone(), children: Vec::new() }),
        Value::Tuple(fs) => Ok(Tree {
            label: "tup".into(),
            children: fs
                .iter()
                .map(|(l, x)| Ok(Tree { label: l.clone(), children: vec![encode_t(x)?] }))
                .collect::<Result<_>>()?,
        }),
        Value::Coll(Kind::List, es) => {
            Ok(Tree { label: "list".into(), children: es.iter().map(encode_t).collect::<Result<_>>()? })
        }
        Value::Coll(k, _) => Err(Error::Unsupported(format!("{} values have no tree encoding", k.name()))),
    }
}

// ------------------------------------------------------------- XQ to MA

/// Name of the binding for the variable at `level`.
pub fn var_atom(level: usize) -> String {
    format!("x{level}")
}

/// The environment list for a document bound to the first variable.
pub fn root_bindings(doc: &Tree) -> Value {
    Value::coll(
        Kind::List,
        vec![Value::tuple(vec![("N", Value::atom(&var_atom(1))), ("V", encode_c(doc))])],
    )
}

fn yes_node() -> Expr {
    Expr::tuple(vec![("label", Expr::c("yes")), ("children", Expr::Empty)])
}

fn lookup(level: usize) -> Expr {
    Expr::select(Cond::eq_const("N", &var_atom(level))).then(Expr::map(Expr::pi("V")))
}

fn bind_then(name_level: usize, src: Expr, body: Expr) -> Expr {
    let extend = Expr::union(
        Expr::pi("1"),
        Expr::tuple(vec![("N", Expr::c(&var_atom(name_level))), ("V", Expr::pi("2"))]).then(Expr::Sng),
    );
    Expr::seq([
        Expr::tuple(vec![("1", Expr::Id), ("2", src)]),
        Expr::pairwith("2"),
        Expr::flatmap(extend.then(body)),
    ])
}

fn to_ma(q: &Xq, depth: usize) -> Result<Expr> {
    Ok(match q {
        Xq::Seq(a, b) => Expr::union(to_ma(a, depth)?, to_ma(b, depth)?),
        Xq::Elem(a, body) => {
            let children = match body {
                Some(b) => to_ma(b, depth)?,
                None => Expr::Empty,
            };
            Expr::tuple(vec![("label", Expr::c(a)), ("children", children)]).then(Expr::Sng)
        }
        Xq::Var(i) => lookup(*i),
        Xq::Step(i, Axis::Child, t) => {
            let kids = match t {
                Test::Star => Expr::pi("children"),
                Test::Name(n) => Expr::pi("children").then(Expr::select(Cond::eq_const("label", n))),
            };
            lookup(*i).then(Expr::flatmap(kids))
        }
        Xq::Step(_, Axis::Descendant, _) => {
            return Err(Error::Unsupported("the descendant axis has no monad algebra translation".into()))
        }
        Xq::For(_, src, body) | Xq::Let(_, src, body) => {
            bind_then(depth + 1, to_ma(src, depth)?, to_ma(body, depth + 1)?)
        }
        Xq::If(c, a) => Expr::seq([
            Expr::tuple(vec![("1", Expr::Id), ("2", to_ma(c, depth)?.then(Expr::True))]),
            Expr::pairwith("2"),
            Expr::flatmap(Expr::pi("1").then(to_ma(a, depth)?)),
        ]),
        Xq::Not(a) => Expr::seq([to_ma(a, depth)?, Expr::map(Expr::Unit), Expr::Not, Expr::map(yes_node())]),
        Xq::VarEq(i, j, mode) => {
            let cond = match mode {
                EqMode::Atomic => Cond::eq("1.V.label", "2.V.label", EqMode::Atomic),
                _ => Cond::eq("1.V", "2.V", EqMode::Deep),
            };
            Expr::seq([
                Expr::tuple(vec![
                    ("1", Expr::select(Cond::eq_const("N", &var_atom(*i)))),
                    ("2", Expr::select(Cond::eq_const("N", &var_atom(*j)))),
                ]),
                Expr::pairwith("1"),
                Expr::flatmap(Expr::pairwith("2")),
                Expr::select(cond),
                Expr::map(yes_node()),
            ])
        }
        Xq::QueryEq(a, b) => Expr::seq([
            Expr::tuple(vec![("1", to_ma(a, depth)?), ("2", to_ma(b, depth)?)]),
            Expr::Sng,
            Expr::select(Cond::eq("1", "2", EqMode::Deep)),
            Expr::map(yes_node()),
        ]),
        other => return Err(Error::Unsupported(format!("`{other}` is not core; desugar first"))),
    })
}

/// Translates a child-axis query over one free variable into a list
/// query on binding lists `[⟨N: name, V: node⟩]`.
pub fn xq_to_ma(q: &Xq) -> Result<Expr> {
    to_ma(&xq_desugar_keep_not(q, 1), 1)
}

/// Compares `[C(t) | t ∈ Q(doc)]` with the translated query on the root bindings.
pub fn check_xq_roundtrip(q: &Xq, doc: &Tree) -> Result<bool> {
    let lhs = eval_xq(q, std::slice::from_ref(doc))?;
    let lhs = Value::coll(Kind::List, lhs.iter().map(encode_c).collect());
    let rhs = eval_ma(&xq_to_ma(q)?, &root_bindings(doc), Kind::List)?;
    Ok(lhs == rhs)
}

// ------------------------------------------------------------- MA to XQ

fn label_steps(p: &Path) -> Vec<(Axis, Test)> {
    p.iter().flat_map(|l| [(Axis::Child, Test::Name(l.clone())), (Axis::Child, Test::Star)]).collect()
}

fn fields_of(p: &Path, x: usize) -> Xq {
    Xq::Path(x, label_steps(p))
}

fn tag(l: &Label) -> Result<&Label> {
    if valid_tag(l) {
        Ok(l)
    } else {
        Err(Error::Unsupported(format!("`{l}` cannot be used as a tag name")))
    }
}

fn seq_all(parts: Vec<Xq>) -> Option<Xq> {
    parts.into_iter().rev().reduce(|acc, p| Xq::seq(p, acc))
}

fn list_of(body: Xq) -> Xq {
    Xq::elem("list", body)
}

fn if_tup(c: Xq) -> Xq {
    list_of(Xq::if_(c, Xq::leaf("tup")))
}

struct ToXq;

impl ToXq {
    /// `x` is the level holding the input node, `d` the current depth.
    fn go(&self, f: &Expr, t: &Type, x: usize, d: usize) -> Result<Xq> {
        use Expr::*;
        let sem = Kind::List;
        Ok(match f {
            Id => Xq::Var(x),
            Const(c) => Xq::leaf(tag(c)?),
            Empty => Xq::leaf("list"),
            Unit => Xq::leaf("tup"),
            Tuple(fs) if fs.is_empty() => Xq::leaf("tup"),
            Tuple(fs) => {
                let parts = fs
                    .iter()
                    .map(|(l, g)| Ok(Xq::elem(tag(l)?, self.go(g, t, x, d)?)))
                    .collect::<Result<Vec<_>>>()?;
                Xq::Elem("tup".into(), seq_all(parts).map(Box::new))
            }
            Proj(p) => fields_of(p, x),
            Sng => list_of(Xq::Var(x)),
            Compose(g, h) => {
                let first = self.go(g, t, x, d)?;
                let tg = infer(g, t, sem)?;
                let rest = self.go(h, &tg, d + 1, d + 1)?;
                if is_singleton_form(&first) {
                    Xq::let_("y", first, rest)
                } else {
                    Xq::for_("y", first, rest)
                }
            }
            Map(g) => {
                let elem = match t {
                    Type::Coll(_, e) => (**e).clone(),
                    _ => Type::Unknown,
                };
                list_of(Xq::for_("y", Xq::child(x, "*"), self.go(g, &elem, d + 1, d + 1)?))
            }
            Flatten => list_of(Xq::Path(x, vec![(Axis::Child, Test::Name("list".into())), (Axis::Child, Test::Star)])),
            PairWith(a) => {
                let Type::Tuple(fs) = t else {
                    return Err(Error::ty(f, format!("pairwith over `{t}`")));
                };
                let y = d + 1;
                let src = Xq::Path(
                    x,
                    vec![
                        (Axis::Child, Test::Name(a.clone())),
                        (Axis::Child, Test::Name("list".into())),
                        (Axis::Child, Test::Star),
                    ],
                );
                let parts = fs
                    .iter()
                    .map(|(l, _)| {
                        let body = if l == a { Xq::Var(y) } else { fields_of(&vec![l.clone()], x) };
                        Ok(Xq::elem(tag(l)?, body))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let tup = Xq::Elem("tup".into(), seq_all(parts).map(Box::new));
                list_of(Xq::for_("y", src, tup))
            }
            Union(g, h) => {
                let z = d + 1;
                let a = Xq::for_("z", self.go(g, t, x, d)?, Xq::child(z, "*"));
                let b = Xq::for_("z", self.go(h, t, x, d)?, Xq::child(z, "*"));
                list_of(Xq::seq(a, b))
            }
            EqAtomic(p, q) | EqMon(p, q) | EqDeep(p, q) => {
                if_tup(Xq::QueryEq(Box::new(fields_of(p, x)), Box::new(fields_of(q, x))))
            }
            Select(Cond::Cmp(p, rhs, _)) => {
                let y = d + 1;
                let rhs = match rhs {
                    Operand::Path(q) => fields_of(q, y),
                    Operand::Const(c) => Xq::leaf(tag(c)?),
                };
                let test = Xq::QueryEq(Box::new(fields_of(p, y)), Box::new(rhs));
                list_of(Xq::for_("y", Xq::child(x, "*"), Xq::if_(test, Xq::Var(y))))
            }
            True => if_tup(Xq::child(x, "*")),
            Not => if_tup(Xq::Not(Box::new(Xq::child(x, "*")))),
            Monus | Unique => {
                return Err(Error::Unsupported(format!("`{f}` has no list translation")));
            }
            other => {
                let core = desugar(other, t, sem)?;
                if core == *other {
                    return Err(Error::Unsupported(format!("`{other}` cannot be translated")));
                }
                self.go(&core, t, x, d)?
            }
        })
    }
}

/// Translates a list query on inputs of type `input` into a query over
/// the free variable holding `T(v)`.
pub fn ma_to_xq(q: &Expr, input: &Type) -> Result<Xq> {
    infer(q, input, Kind::List)?;
    let raw = ToXq.go(q, input, 1, 1)?;
    let out = xq_desugar(&raw, 1);
    check_xq(&out, 1)?;
    Ok(out)
}

/// Compares `T(Q(v))` with the translated query run on `T(v)`.
pub fn check_ma_roundtrip(q: &Expr, v: &Value) -> Result<bool> {
    check_ma_roundtrip_typed(q, v, &type_of(v)?)
}

/// As [`check_ma_roundtrip`], with the input type given; needed when `v`
/// has empty collections whose member type cannot be read off.
pub fn check_ma_roundtrip_typed(q: &Expr, v: &Value, t: &Type) -> Result<bool> {
    let lhs = encode_t(&eval_ma(q, v, Kind::List)?)?;
    let rhs = eval_xq(&ma_to_xq(q, t)?, &[encode_t(v)?])?;
    Ok(rhs.len() == 1 && rhs[0] == lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::{parse_ma, print_ma};
    use crate::value::parse_value;
    use crate::xml::parse_xml;
    use crate::xq::{parse_xq, print_xq};

    #[test]
    fn c_encoding() {
        let t = parse_xml("<a><b/></a>").unwrap();
        assert_eq!(encode_c(&t), parse_value("<label: a, children: [<label: b, children: []>]>").unwrap());
        assert_eq!(decode_c(&encode_c(&t)).unwrap(), t);
        assert_eq!(encode_c(&Tree::leaf("a")), parse_value("<label: a, children: []>").unwrap());
    }

    #[test]
    fn t_encoding() {
        assert_eq!(encode_t(&parse_value("[a, b]").unwrap()).unwrap().to_string(), "<list><a/><b/></list>");
        assert_eq!(
            encode_t(&parse_value("<A: a, B: b>").unwrap()).unwrap().to_string(),
            "<tup><A><a/></A><B><b/></B></tup>"
        );
        assert_eq!(encode_t(&parse_value("[]").unwrap()).unwrap().to_string(), "<list/>");
        assert!(encode_t(&parse_value("{a}").unwrap()).is_err());
    }

    #[test]
    fn constructor_and_step_translations() {
        assert_eq!(print_ma(&xq_to_ma(&parse_xq("<a/>").unwrap()).unwrap()), "tup[label = 'a', children = empty] ; sng");
        let step = print_ma(&xq_to_ma(&parse_xq("$root/t").unwrap()).unwrap());
        assert_eq!(step, "select[N =atomic 'x1'] ; map(pi[V]) ; flatmap(pi[children] ; select[label =atomic 't'])");
    }

    #[test]
    fn xq_to_ma_preserves_meaning() {
        let doc = parse_xml("<r><a><b/></a><a><c/></a><d/></r>").unwrap();
        for q in [
            "<a/>",
            "$root",
            "$root/a",
            "for $x in $root/a return <w>{$x/*}</w>",
            "let $y := <n>{$root/d}</n> return ($y, $y/*)",
            "if ($root/d) then <yes/>",
            "if ($root/e) then <yes/>",
            "not($root/a)",
            "for $x in $root/* return for $y in $root/* return $x = $y",
            "for $x in $root/a/* return for $y in $root/a/* return $x eq $y",
            "some $x in $root/a satisfies $x/c",
            "every $x in $root/a satisfies $x/*",
        ] {
            let q = parse_xq(q).unwrap();
            assert!(check_xq_roundtrip(&q, &doc).unwrap(), "{q}");
        }
        assert!(xq_to_ma(&parse_xq("$root//a").unwrap()).is_err());
    }

    #[test]
    fn ma_to_xq_rules() {
        let t = Type::Dom;
        assert_eq!(print_xq(&ma_to_xq(&Expr::Sng, &t).unwrap()), "<list>{$root}</list>");
        assert_eq!(print_xq(&ma_to_xq(&Expr::c("c"), &t).unwrap()), "<c/>");
        let lt = Type::coll(Kind::List, Type::coll(Kind::List, Type::Dom));
        assert_eq!(
            print_xq(&ma_to_xq(&Expr::Flatten, &lt).unwrap()),
            "<list>{for $y in $root/list return $y/*}</list>"
        );
    }

    #[test]
    fn ma_to_xq_preserves_meaning() {
        let v = parse_value("<A: [a, b], B: [<A: a, B: c>, <A: b, B: b>]>").unwrap();
        for q in [
            "id",
            "pi[A]",
            "pi[A] ; map(sng)",
            "pi[A] ; map(sng) ; flatten",
            "pairwith[A]",
            "pi[B] ; select[A = B]",
            "pi[B] ; select[A = 'a']",
            "tup[C = pi[A], D = pi[B]] ; union(pi[C], pi[C])",
            "pi[B] ; map(eqatom[A, B])",
            "pi[A] ; true",
            "pi[A] ; not",
            "pi[A] ; map(tup[]) ; not",
            "tup[L = pi[A], R = pi[A]] ; pairwith[L] ; map(pairwith[R]) ; flatten",
            "cart(pi[A], pi[A])",
        ] {
            let q = parse_ma(q).unwrap();
            assert!(check_ma_roundtrip(&q, &v).unwrap(), "{q}");
        }
    }
}
