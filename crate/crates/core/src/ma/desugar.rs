//! Rewrites extended operators into core monad algebra.
//!
//! Deep equality on types that contain collections has no positive core
//! definition and is kept as `EqDeep`; on collection-free types it expands
//! like mon equality.

use super::ast::{Cond, Expr, Operand, Path};
use super::typing::{at_path, infer, infer_type, nest_split};
use crate::error::{Error, Result};
use crate::value::{EqMode, Kind, Label, Type};

pub fn desugar(q: &Expr, input: &Type, sem: Kind) -> Result<Expr> {
    infer_type(q, input, sem)?;
    Ok(ds(q, input, sem)?.0)
}

/// `⟨1: f, 2: g⟩ ; pairwith[1] ; map(pairwith[2]) ; flatten`.
pub fn cart_core(f: Expr, g: Expr) -> Expr {
    Expr::seq([
        Expr::tuple(vec![("1", f), ("2", g)]),
        Expr::pairwith("1"),
        Expr::map(Expr::pairwith("2")),
        Expr::Flatten,
    ])
}

/// Keeps the members on which the Boolean query `gamma` is true.
pub fn select_with(gamma: Expr) -> Expr {
    Expr::map(Expr::seq([
        Expr::tuple(vec![("1", Expr::Id), ("2", gamma)]),
        Expr::pairwith("2"),
        Expr::map(Expr::pi("1")),
    ]))
    .then(Expr::Flatten)
}

pub fn true_pred() -> Expr {
    Expr::Unit.then(Expr::Sng)
}

/// Conjunction of Boolean queries as an iterated product, normalized back
/// to the unit-tuple encoding.
pub fn conj_all(preds: Vec<Expr>) -> Expr {
    let mut it = preds.into_iter();
    match (it.next(), it.len()) {
        (None, _) => true_pred(),
        (Some(p), 0) => p,
        (Some(p), _) => it.fold(p, cart_core).then(Expr::map(Expr::Unit)),
    }
}

fn disj(a: Expr, b: Expr, sem: Kind) -> Expr {
    let u = Expr::union(a, b);
    if sem == Kind::Set {
        u
    } else {
        u.then(Expr::True)
    }
}

fn cat(p: &Path, rest: &[Label]) -> Path {
    p.iter().chain(rest).cloned().collect()
}

/// Mon equality of the values at `p` and `q`, both of type `t`, as a
/// conjunction of atomic equalities over every root-to-leaf path of `t`.
pub fn mon_eq_expr(p: &Path, q: &Path, t: &Type) -> Result<Expr> {
    if !t.is_collection_free() {
        return Err(Error::ty(
            Expr::EqMon(p.clone(), q.clone()),
            format!("mon equality on collection type `{t}`"),
        ));
    }
    Ok(conj_all(
        t.leaf_paths().iter().map(|l| Expr::EqAtomic(cat(p, l), cat(q, l))).collect(),
    ))
}

/// The query `⟨A: t, B: t⟩ → Boolean` deciding mon equality of `A` and `B`.
pub fn expand_mon_eq(t: &Type) -> Result<Expr> {
    mon_eq_expr(&vec!["A".into()], &vec!["B".into()], t)
}

fn eq_pred(q: &Expr, p: &Path, r: &Path, t: &Type, mode: EqMode) -> Result<Expr> {
    let tp = at_path(q, t, p)?;
    let tr = at_path(q, t, r)?;
    let j = tp.join(tr).ok_or_else(|| Error::ty(q, format!("incompatible `{tp}`, `{tr}`")))?;
    match mode {
        EqMode::Atomic => Ok(Expr::EqAtomic(p.clone(), r.clone())),
        EqMode::Mon => mon_eq_expr(p, r, &j),
        EqMode::Deep if j.is_collection_free() => mon_eq_expr(p, r, &j),
        EqMode::Deep => Ok(Expr::EqDeep(p.clone(), r.clone())),
    }
}

fn const_pred(p: &Path, c: &Label) -> Expr {
    Expr::tuple(vec![("1", Expr::Proj(p.clone())), ("2", Expr::Const(c.clone()))])
        .then(Expr::eqatom("1", "2"))
}

fn cond_pred(q: &Expr, c: &Cond, t: &Type, sem: Kind) -> Result<Expr> {
    Ok(match c {
        Cond::Cmp(p, Operand::Path(r), mode) => eq_pred(q, p, r, t, *mode)?,
        Cond::Cmp(p, Operand::Const(k), _) => const_pred(p, k),
        Cond::In(p, set) => {
            let mut it = set.iter().map(|k| const_pred(p, k));
            match it.next() {
                None => Expr::Empty,
                Some(first) => it.fold(first, |a, b| disj(a, b, sem)),
            }
        }
        Cond::And(a, b) => conj_all(vec![cond_pred(q, a, t, sem)?, cond_pred(q, b, t, sem)?]),
        Cond::Or(a, b) => disj(cond_pred(q, a, t, sem)?, cond_pred(q, b, t, sem)?, sem),
        Cond::Not(a) => cond_pred(q, a, t, sem)?.then(Expr::Not),
        Cond::Iff(a, b) => {
            let both = Cond::and((**a).clone(), (**b).clone());
            let neither = Cond::and(Cond::not((**a).clone()), Cond::not((**b).clone()));
            cond_pred(q, &Cond::or(both, neither), t, sem)?
        }
    })
}

fn elem_of(t: &Type) -> Type {
    match t {
        Type::Coll(_, e) => (**e).clone(),
        _ => Type::Unknown,
    }
}

fn ds(q: &Expr, t: &Type, sem: Kind) -> Result<(Expr, Type)> {
    use Expr::*;
    let out = match q {
        Id | Const(_) | Empty | Unit | Sng | Flatten | PairWith(_) | Proj(_) | EqAtomic(..)
        | Not | True | Monus | Unique => (q.clone(), infer(q, t, sem)?),
        Map(f) => {
            let (f2, ft) = ds(f, &elem_of(t), sem)?;
            (Expr::map(f2), Type::coll(sem, ft))
        }
        Tuple(fs) => {
            let mut es = Vec::new();
            let mut ts = Vec::new();
            for (l, f) in fs {
                let (e, ft) = ds(f, t, sem)?;
                es.push((l.clone(), e));
                ts.push((l.clone(), ft));
            }
            (Expr::Tuple(es), Type::Tuple(ts))
        }
        Compose(f, g) => {
            let (f2, t1) = ds(f, t, sem)?;
            let (g2, t2) = ds(g, &t1, sem)?;
            (f2.then(g2), t2)
        }
        Union(f, g) => {
            let (f2, a) = ds(f, t, sem)?;
            let (g2, b) = ds(g, t, sem)?;
            let j = a.join(&b).ok_or_else(|| Error::ty(q, format!("incompatible `{a}`, `{b}`")))?;
            (Expr::union(f2, g2), j)
        }
        FlatMap(f) => {
            let (f2, ft) = ds(f, &elem_of(t), sem)?;
            (Expr::map(f2).then(Flatten), Type::coll(sem, elem_of(&ft)))
        }
        Cart(f, g) => {
            let (f2, a) = ds(f, t, sem)?;
            let (g2, b) = ds(g, t, sem)?;
            let pair = Type::tuple(vec![("1", elem_of(&a)), ("2", elem_of(&b))]);
            (cart_core(f2, g2), Type::coll(sem, pair))
        }
        EqMon(p, r) => (eq_pred(q, p, r, t, EqMode::Mon)?, Type::boolean(sem)),
        EqDeep(p, r) => (eq_pred(q, p, r, t, EqMode::Deep)?, Type::boolean(sem)),
        Select(c) => {
            let et = elem_of(t);
            let g = cond_pred(q, c, &et, sem)?;
            let (g2, _) = ds(&g, &et, sem)?;
            (select_with(g2), t.clone())
        }
        Diff => {
            let empty_sr = select_with(Expr::seq([Expr::pi("S_R"), Expr::map(Unit), Not]));
            let inner = Expr::seq([
                Expr::tuple(vec![("R", Expr::pi("R")), ("S", Expr::pi("S"))]),
                Expr::pairwith("S"),
                Expr::select(Cond::eq("R", "S", EqMode::Deep)),
            ]);
            let e = Expr::seq([
                Expr::pairwith("R"),
                Expr::map(Expr::tuple(vec![("R", Expr::pi("R")), ("S_R", inner)])),
                empty_sr,
                Expr::map(Expr::pi("R")),
            ]);
            ds(&e, t, sem)?
        }
        Intersect => ds(&intersect(Expr::pi("R"), Expr::pi("S")), t, sem)?,
        SubsetEq(p, r) => {
            let e = Expr::tuple(vec![
                ("A", Proj(p.clone())),
                ("A'", intersect(Proj(p.clone()), Proj(r.clone()))),
            ])
            .then(EqDeep(vec!["A".into()], vec!["A'".into()]));
            ds(&e, t, sem)?
        }
        MemberOf(p, r) => {
            let e = Expr::tuple(vec![("A", Proj(p.clone()).then(Sng)), ("B", Proj(r.clone()))])
                .then(Expr::SubsetEq(vec!["A".into()], vec!["B".into()]));
            ds(&e, t, sem)?
        }
        Nest { label, grouped } => {
            let et = elem_of(t);
            let (kept, group) = nest_split(q, &et, label, grouped)?;
            let key = kept
                .iter()
                .map(|(l, _)| {
                    Cond::Cmp(vec!["1".into(), l.clone()], Operand::Path(vec!["2".into(), l.clone()]), EqMode::Deep)
                })
                .reduce(Cond::and);
            let mut members = vec![Expr::pairwith("2")];
            if let Some(k) = key {
                members.push(Expr::select(k));
            }
            members.push(Expr::map(Expr::Tuple(
                group.iter().map(|(l, _)| (l.clone(), Proj(vec!["2".into(), l.clone()]))).collect(),
            )));
            let mut fields: Vec<(Label, Expr)> =
                kept.iter().map(|(l, _)| (l.clone(), Proj(vec!["1".into(), l.clone()]))).collect();
            fields.push((label.clone(), Expr::seq(members)));
            let e = Expr::seq([
                Expr::tuple(vec![("1", Id), ("2", Id)]),
                Expr::pairwith("1"),
                Expr::map(Expr::Tuple(fields)),
            ]);
            ds(&e, t, sem)?
        }
    };
    Ok(out)
}

/// `(f × g) ; σ[1 = 2] ; map(π1)`.
fn intersect(f: Expr, g: Expr) -> Expr {
    Expr::seq([Expr::cart(f, g), Expr::select(Cond::eq("1", "2", EqMode::Deep)), Expr::map(Expr::pi("1"))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::eval::eval_ma;
    use crate::ma::parse::parse_ma;
    use crate::value::{parse_type, parse_value};

    fn agree(q: &str, v: &str, sem: Kind) {
        let q = parse_ma(q).unwrap();
        let v = parse_value(v).unwrap();
        let t = crate::value::type_of(&v).unwrap();
        let d = desugar(&q, &t, sem).unwrap();
        assert!(d.is_core() || format!("{d}").contains("eq["), "{d}");
        assert_eq!(eval_ma(&q, &v, sem).unwrap(), eval_ma(&d, &v, sem).unwrap(), "{q} => {d}");
    }

    #[test]
    fn cart_expands_to_pairwith_chain() {
        let d = desugar(&parse_ma("cart(id, id)").unwrap(), &parse_type("{Dom}").unwrap(), Kind::Set)
            .unwrap();
        assert_eq!(
            d.to_string(),
            "tup[1 = id, 2 = id] ; pairwith[1] ; map(pairwith[2]) ; flatten"
        );
    }

    #[test]
    fn mon_equality_expands_over_leaf_paths() {
        let t = parse_type("<C: <D: Dom, E: <F: Dom, G: Dom>>, H: Dom>").unwrap();
        let e = expand_mon_eq(&t).unwrap();
        let mut eqs = Vec::new();
        e.walk(&mut |x| {
            if let Expr::EqAtomic(p, q) = x {
                eqs.push(format!("{}={}", super::super::ast::PathFmt(p), super::super::ast::PathFmt(q)));
            }
        });
        assert_eq!(eqs, ["A.C.D=B.C.D", "A.C.E.F=B.C.E.F", "A.C.E.G=B.C.E.G", "A.H=B.H"]);
        assert_eq!(expand_mon_eq(&Type::Dom).unwrap(), Expr::eqatom("A", "B"));
        assert_eq!(expand_mon_eq(&Type::unit()).unwrap(), true_pred());
        assert!(expand_mon_eq(&parse_type("{Dom}").unwrap()).is_err());
    }

    #[test]
    fn extended_operators_agree_with_their_expansions() {
        for sem in [Kind::Set, Kind::List, Kind::Bag] {
            let (o, c) = match sem {
                Kind::Set => ("{", "}"),
                Kind::List => ("[", "]"),
                Kind::Bag => ("{|", "|}"),
            };
            let w = |s: &str| s.replace('{', o).replace('}', c);
            agree("diff", &w("<R: {a, b, a}, S: {b}>"), sem);
            agree("cap", &w("<R: {a, b, a}, S: {b, a, a}>"), sem);
            agree("subseteq[A, B]", &w("<A: {a, a}, B: {a, b}>"), sem);
            agree("in[A, B]", &w("<A: a, B: {b, a}>"), sem);
            agree("nest[C = (B)]", &w("{<A: 1, B: x>, <A: 1, B: y>, <A: 2, B: x>}"), sem);
            agree("select[A = B || !(A =atomic 'x') <=> B in {y}]", &w("{<A: x, B: x>, <A: x, B: y>, <A: y, B: y>}"), sem);
            agree("eqmon[A, B]", "<A: <C: c, D: d>, B: <C: c, D: e>>", sem);
            agree("cart(pi[R], pi[S]) ; flatmap(tup[X = pi[1]] ; sng)", &w("<R: {a, b}, S: {c}>"), sem);
        }
    }

    #[test]
    fn example_difference_matches_native_difference() {
        agree("diff", "<R: {a, b}, S: {b}>", Kind::Set);
        let v = parse_value("<R: {a, b}, S: {b}>").unwrap();
        assert_eq!(eval_ma(&Expr::Diff, &v, Kind::Set).unwrap().to_string(), "{a}");
    }
}
