//! Type inference. Collection types follow the ambient semantics: under
//! list semantics every collection type is a list type, and so on.

use super::ast::{Cond, Expr, Operand, Path};
use crate::error::{Error, Result};
use crate::value::{Kind, Label, Type};

/// Infers the output type of `q` on inputs of type `input`.
pub fn infer_type(q: &Expr, input: &Type, sem: Kind) -> Result<Type> {
    let mut kinds = Vec::new();
    input.kinds(&mut kinds);
    if let Some(k) = kinds.iter().find(|&&k| k != sem) {
        return Err(Error::ty(
            q,
            format!("input type `{input}` contains a {} under {} semantics", k.name(), sem.name()),
        ));
    }
    infer(q, input, sem)
}

fn path_str(p: &Path) -> String {
    super::ast::PathFmt(p).to_string()
}

pub(crate) fn at_path<'t>(q: &Expr, t: &'t Type, p: &Path) -> Result<&'t Type> {
    let mut cur = t;
    for l in p {
        if *cur == Type::Unknown {
            return Ok(cur);
        }
        cur = cur
            .field(l)
            .ok_or_else(|| Error::ty(q, format!("no field `{l}` (path {}) in `{t}`", path_str(p))))?;
    }
    Ok(cur)
}

fn elem<'t>(q: &Expr, t: &'t Type, sem: Kind) -> Result<&'t Type> {
    match t {
        Type::Coll(k, e) if *k == sem => Ok(e),
        Type::Unknown => Ok(&Type::Unknown),
        _ => Err(Error::ty(q, format!("expected a {} type, found `{t}`", sem.name()))),
    }
}

fn join(q: &Expr, a: &Type, b: &Type) -> Result<Type> {
    a.join(b).ok_or_else(|| Error::ty(q, format!("incompatible types `{a}` and `{b}`")))
}

fn need_bag_or_list(q: &Expr, sem: Kind) -> Result<()> {
    if sem == Kind::Set {
        Err(Error::ty(q, "only defined under list or bag semantics"))
    } else {
        Ok(())
    }
}

fn is_dom(t: &Type) -> bool {
    matches!(t, Type::Dom | Type::Unknown)
}

/// The shared element type of the `R` and `S` fields.
fn rs_elem(q: &Expr, t: &Type, sem: Kind) -> Result<Type> {
    let r = elem(q, at_path(q, t, &vec!["R".into()])?, sem)?;
    let s = elem(q, at_path(q, t, &vec!["S".into()])?, sem)?;
    join(q, r, s)
}

pub(crate) fn infer(q: &Expr, t: &Type, sem: Kind) -> Result<Type> {
    use Expr::*;
    let boolean = Type::boolean(sem);
    Ok(match q {
        Id => t.clone(),
        Const(_) => Type::Dom,
        Empty => Type::coll(sem, Type::Unknown),
        Unit => Type::unit(),
        Sng => Type::coll(sem, t.clone()),
        Map(f) => Type::coll(sem, infer(f, elem(q, t, sem)?, sem)?),
        Flatten => Type::coll(sem, elem(q, elem(q, t, sem)?, sem)?.clone()),
        FlatMap(f) => {
            let out = infer(f, elem(q, t, sem)?, sem)?;
            Type::coll(sem, elem(q, &out, sem)?.clone())
        }
        PairWith(a) => match t {
            Type::Tuple(fields) => {
                let mut found = false;
                let mut out = Vec::new();
                for (l, ft) in fields {
                    if l == a {
                        found = true;
                        out.push((l.clone(), elem(q, ft, sem)?.clone()));
                    } else {
                        out.push((l.clone(), ft.clone()));
                    }
                }
                if !found {
                    return Err(Error::ty(q, format!("no field `{a}` in `{t}`")));
                }
                Type::coll(sem, Type::Tuple(out))
            }
            Type::Unknown => Type::coll(sem, Type::Unknown),
            _ => return Err(Error::ty(q, format!("expected a tuple, found `{t}`"))),
        },
        Tuple(fs) => Type::Tuple(
            fs.iter().map(|(l, f)| Ok((l.clone(), infer(f, t, sem)?))).collect::<Result<_>>()?,
        ),
        Proj(p) => at_path(q, t, p)?.clone(),
        Compose(f, g) => infer(g, &infer(f, t, sem)?, sem)?,
        Union(f, g) | Cart(f, g) => {
            let a = infer(f, t, sem)?;
            let b = infer(g, t, sem)?;
            let (ea, eb) = (elem(q, &a, sem)?, elem(q, &b, sem)?);
            if matches!(q, Cart(..)) {
                Type::coll(sem, Type::tuple(vec![("1", ea.clone()), ("2", eb.clone())]))
            } else {
                Type::coll(sem, join(q, ea, eb)?)
            }
        }
        EqAtomic(a, b) => {
            for p in [a, b] {
                let pt = at_path(q, t, p)?;
                if !is_dom(pt) {
                    return Err(Error::ty(
                        q,
                        format!("path {} has type `{pt}`, expected `Dom`", path_str(p)),
                    ));
                }
            }
            boolean
        }
        EqMon(a, b) | EqDeep(a, b) => {
            let ta = at_path(q, t, a)?;
            let tb = at_path(q, t, b)?;
            let j = join(q, ta, tb)?;
            if matches!(q, EqMon(..)) && !j.is_collection_free() {
                return Err(Error::ty(q, format!("mon equality on collection type `{j}`")));
            }
            boolean
        }
        Not => {
            elem(q, t, sem)?;
            boolean
        }
        True => {
            need_bag_or_list(q, sem)?;
            elem(q, t, sem)?;
            boolean
        }
        Unique => {
            need_bag_or_list(q, sem)?;
            elem(q, t, sem)?;
            t.clone()
        }
        Monus => {
            need_bag_or_list(q, sem)?;
            Type::coll(sem, rs_elem(q, t, sem)?)
        }
        Diff | Intersect => Type::coll(sem, rs_elem(q, t, sem)?),
        Select(c) => {
            check_cond(q, c, elem(q, t, sem)?)?;
            t.clone()
        }
        SubsetEq(a, b) => {
            let ta = elem(q, at_path(q, t, a)?, sem)?;
            let tb = elem(q, at_path(q, t, b)?, sem)?;
            join(q, ta, tb)?;
            boolean
        }
        MemberOf(a, b) => {
            let ta = at_path(q, t, a)?;
            let tb = elem(q, at_path(q, t, b)?, sem)?;
            join(q, ta, tb)?;
            boolean
        }
        Nest { label, grouped } => {
            let et = elem(q, t, sem)?;
            if *et == Type::Unknown {
                return Ok(Type::coll(sem, Type::Unknown));
            }
            let (kept, group) = nest_split(q, et, label, grouped)?;
            let mut out = kept;
            out.push((label.clone(), Type::coll(sem, Type::Tuple(group))));
            Type::coll(sem, Type::Tuple(out))
        }
    })
}

/// Splits a tuple type into the fields kept by `nest` and the grouped ones.
pub(crate) fn nest_split(
    q: &Expr,
    et: &Type,
    label: &Label,
    grouped: &[Label],
) -> Result<(Vec<(Label, Type)>, Vec<(Label, Type)>)> {
    let Type::Tuple(fields) = et else {
        return Err(Error::ty(q, format!("nest needs tuple members, found `{et}`")));
    };
    for g in grouped {
        if !fields.iter().any(|(l, _)| l == g) {
            return Err(Error::ty(q, format!("no field `{g}` to group in `{et}`")));
        }
    }
    let kept: Vec<(Label, Type)> =
        fields.iter().filter(|(l, _)| !grouped.contains(l)).cloned().collect();
    if kept.iter().any(|(l, _)| l == label) {
        return Err(Error::ty(q, format!("nest label `{label}` clashes with a kept field")));
    }
    let group = grouped
        .iter()
        .map(|g| fields.iter().find(|(l, _)| l == g).cloned().expect("checked above"))
        .collect();
    Ok((kept, group))
}

fn check_cond(q: &Expr, c: &Cond, t: &Type) -> Result<()> {
    match c {
        Cond::Cmp(p, rhs, mode) => {
            let tp = at_path(q, t, p)?;
            match rhs {
                Operand::Const(_) => {
                    if !is_dom(tp) {
                        return Err(Error::ty(
                            q,
                            format!("constant comparison on `{tp}` at {}", path_str(p)),
                        ));
                    }
                }
                Operand::Path(r) => {
                    let tr = at_path(q, t, r)?;
                    let j = join(q, tp, tr)?;
                    let ok = match mode {
                        crate::value::EqMode::Atomic => is_dom(&j),
                        crate::value::EqMode::Mon => j.is_collection_free(),
                        crate::value::EqMode::Deep => true,
                    };
                    if !ok {
                        return Err(Error::ty(
                            q,
                            format!("{} equality not defined on `{j}`", mode.name()),
                        ));
                    }
                }
            }
            Ok(())
        }
        Cond::In(p, _) => {
            let tp = at_path(q, t, p)?;
            if is_dom(tp) {
                Ok(())
            } else {
                Err(Error::ty(q, format!("membership test on `{tp}`")))
            }
        }
        Cond::And(a, b) | Cond::Or(a, b) | Cond::Iff(a, b) => {
            check_cond(q, a, t)?;
            check_cond(q, b, t)
        }
        Cond::Not(a) => check_cond(q, a, t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::parse::parse_ma;
    use crate::value::parse_type;

    fn ty(q: &str, t: &str, sem: Kind) -> Result<Type> {
        infer_type(&parse_ma(q).unwrap(), &parse_type(t).unwrap(), sem)
    }

    #[test]
    fn typing_rule_examples() {
        assert_eq!(ty("sng", "Dom", Kind::Set).unwrap().to_string(), "{Dom}");
        assert_eq!(ty("flatten", "{{Dom}}", Kind::Set).unwrap().to_string(), "{Dom}");
        assert!(matches!(ty("pi[A]", "Dom", Kind::Set), Err(Error::Type { .. })));
        assert_eq!(
            ty("pairwith[A]", "<A: [Dom], B: <>>", Kind::List).unwrap().to_string(),
            "[<A: Dom, B: <>>]"
        );
        assert_eq!(
            ty("map(tup[C = pi[A], D = pi[B] ; sng])", "{<A: Dom, B: Dom>}", Kind::Set)
                .unwrap()
                .to_string(),
            "{<C: Dom, D: {Dom}>}"
        );
    }

    #[test]
    fn rejects_kind_mismatch_and_set_only_violations() {
        assert!(ty("id", "[Dom]", Kind::Set).is_err());
        assert!(ty("true", "{Dom}", Kind::Set).is_err());
        assert!(ty("true", "[Dom]", Kind::List).is_ok());
        assert!(ty("monus", "<R: {|Dom|}, S: {|Dom|}>", Kind::Bag).is_ok());
        assert!(ty("flatten", "{Dom}", Kind::Set).is_err());
        assert!(ty("eqatom[A, B]", "<A: Dom, B: {Dom}>", Kind::Set).is_err());
        assert!(ty("eqmon[A, B]", "<A: <C: Dom>, B: <C: Dom>>", Kind::Set).is_ok());
        assert!(ty("eqmon[A, B]", "<A: {Dom}, B: {Dom}>", Kind::Set).is_err());
    }

    #[test]
    fn empty_joins_with_anything() {
        assert_eq!(ty("union(empty, 'a' ; sng)", "<>", Kind::Set).unwrap().to_string(), "{Dom}");
        assert_eq!(
            ty("nest[C = (B)]", "{<A: Dom, B: Dom>}", Kind::Set).unwrap().to_string(),
            "{<A: Dom, C: {<B: Dom>}>}"
        );
    }
}
