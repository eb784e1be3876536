//! Recursive-descent parser for the textual monad algebra syntax.

use super::ast::{Cond, Expr, Operand, Path};
use crate::error::Result;
use crate::value::{is_bare_char, Cursor, EqMode, Label};

pub fn parse_ma(text: &str) -> Result<Expr> {
    let mut c = Cursor::new(text);
    let e = seq(&mut c)?;
    c.finish()?;
    Ok(e)
}

pub fn parse_cond(text: &str) -> Result<Cond> {
    let mut c = Cursor::new(text);
    let e = iff(&mut c)?;
    c.finish()?;
    Ok(e)
}

fn seq(c: &mut Cursor) -> Result<Expr> {
    let mut e = term(c)?;
    while c.eat(";") {
        e = e.then(term(c)?);
    }
    Ok(e)
}

fn parens(c: &mut Cursor) -> Result<Expr> {
    c.expect("(")?;
    let e = seq(c)?;
    c.expect(")")?;
    Ok(e)
}

fn two(c: &mut Cursor) -> Result<(Expr, Expr)> {
    c.expect("(")?;
    let a = seq(c)?;
    c.expect(",")?;
    let b = seq(c)?;
    c.expect(")")?;
    Ok((a, b))
}

fn two_paths(c: &mut Cursor) -> Result<(Path, Path)> {
    c.expect("[")?;
    let a = path(c)?;
    c.expect(",")?;
    let b = path(c)?;
    c.expect("]")?;
    Ok((a, b))
}

fn path(c: &mut Cursor) -> Result<Path> {
    let mut p: Path = vec![Label::from(c.name()?)];
    while c.rest().starts_with('.') {
        c.pos += 1;
        p.push(c.name()?.into());
    }
    Ok(p)
}

fn term(c: &mut Cursor) -> Result<Expr> {
    match c.peek() {
        Some('(') => return parens(c),
        Some('\'') => return Ok(Expr::Const(c.quoted('\'')?.into())),
        None => return Err(c.err("unexpected end of query")),
        _ => {}
    }
    let at = c.pos;
    let word = c.name()?;
    let e = match word.as_str() {
        "id" => Expr::Id,
        "sng" => Expr::Sng,
        "flatten" => Expr::Flatten,
        "unit" => Expr::Unit,
        "empty" => Expr::Empty,
        "not" => Expr::Not,
        "true" => Expr::True,
        "monus" => Expr::Monus,
        "unique" => Expr::Unique,
        "diff" => Expr::Diff,
        "cap" => Expr::Intersect,
        "map" => Expr::map(parens(c)?),
        "flatmap" => Expr::flatmap(parens(c)?),
        "union" => {
            if c.peek() == Some('(') {
                let (a, b) = two(c)?;
                Expr::union(a, b)
            } else {
                Expr::union(Expr::pi("1"), Expr::pi("2"))
            }
        }
        "cart" => {
            let (a, b) = two(c)?;
            Expr::cart(a, b)
        }
        "pairwith" => {
            c.expect("[")?;
            let l = c.name()?;
            c.expect("]")?;
            Expr::PairWith(l.into())
        }
        "pi" => {
            c.expect("[")?;
            let p = path(c)?;
            c.expect("]")?;
            Expr::Proj(p)
        }
        "tup" => {
            c.expect("[")?;
            let mut fields: Vec<(Label, Expr)> = Vec::new();
            if !c.eat("]") {
                loop {
                    let lat = c.pos;
                    let l = c.name()?;
                    if fields.iter().any(|(m, _)| **m == *l) {
                        return Err(crate::error::Error::syntax(lat, format!("duplicate label `{l}`")));
                    }
                    c.expect("=")?;
                    fields.push((l.into(), seq(c)?));
                    if c.eat(",") {
                        continue;
                    }
                    c.expect("]")?;
                    break;
                }
            }
            Expr::Tuple(fields)
        }
        "eqatom" => {
            let (p, q) = two_paths(c)?;
            Expr::EqAtomic(p, q)
        }
        "eqmon" => {
            let (p, q) = two_paths(c)?;
            Expr::EqMon(p, q)
        }
        "eq" => {
            let (p, q) = two_paths(c)?;
            Expr::EqDeep(p, q)
        }
        "subseteq" => {
            let (p, q) = two_paths(c)?;
            Expr::SubsetEq(p, q)
        }
        "in" => {
            let (p, q) = two_paths(c)?;
            Expr::MemberOf(p, q)
        }
        "select" => {
            c.expect("[")?;
            let k = iff(c)?;
            c.expect("]")?;
            Expr::Select(k)
        }
        "nest" => {
            c.expect("[")?;
            let label = c.name()?.into();
            c.expect("=")?;
            c.expect("(")?;
            let mut grouped: Vec<Label> = vec![c.name()?.into()];
            while c.eat(",") {
                grouped.push(c.name()?.into());
            }
            c.expect(")")?;
            c.expect("]")?;
            Expr::Nest { label, grouped }
        }
        other => {
            return Err(crate::error::Error::syntax(at, format!("unknown operator `{other}`")))
        }
    };
    Ok(e)
}

fn iff(c: &mut Cursor) -> Result<Cond> {
    let mut a = or(c)?;
    while c.eat("<=>") {
        a = Cond::iff(a, or(c)?);
    }
    Ok(a)
}

fn or(c: &mut Cursor) -> Result<Cond> {
    let mut a = and(c)?;
    while c.eat("||") {
        a = Cond::or(a, and(c)?);
    }
    Ok(a)
}

fn and(c: &mut Cursor) -> Result<Cond> {
    let mut a = unary(c)?;
    while c.eat("&&") {
        a = Cond::and(a, unary(c)?);
    }
    Ok(a)
}

fn unary(c: &mut Cursor) -> Result<Cond> {
    if c.eat("!") {
        return Ok(Cond::not(unary(c)?));
    }
    if c.eat("(") {
        let k = iff(c)?;
        c.expect(")")?;
        return Ok(k);
    }
    let p = path(c)?;
    c.skip_ws();
    if c.rest().starts_with("in") && !c.rest()[2..].starts_with(is_bare_char) {
        c.pos += 2;
        c.expect("{")?;
        let mut set = Vec::new();
        if !c.eat("}") {
            loop {
                let a = if c.peek() == Some('\'') { c.quoted('\'')? } else { c.name()? };
                set.push(a.into());
                if c.eat(",") {
                    continue;
                }
                c.expect("}")?;
                break;
            }
        }
        return Ok(Cond::In(p, set));
    }
    c.expect("=")?;
    let mut mode = EqMode::Deep;
    for (word, m) in [("atomic", EqMode::Atomic), ("mon", EqMode::Mon)] {
        let r = c.rest();
        if r.starts_with(word) && !r[word.len()..].starts_with(is_bare_char) {
            c.pos += word.len();
            mode = m;
            break;
        }
    }
    let rhs = if c.peek() == Some('\'') {
        Operand::Const(c.quoted('\'')?.into())
    } else {
        Operand::Path(path(c)?)
    };
    Ok(Cond::Cmp(p, rhs, mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::ast::path;

    #[test]
    fn examples_parse_to_expected_trees() {
        assert_eq!(parse_ma("id ; sng").unwrap(), Expr::Id.then(Expr::Sng));
        assert_eq!(
            parse_ma("tup[1 = 'a', 2 = 'b']").unwrap(),
            Expr::tuple(vec![("1", Expr::c("a")), ("2", Expr::c("b"))])
        );
        assert_eq!(
            parse_ma("map(pi[A]) ; flatten").unwrap(),
            Expr::map(Expr::pi("A")).then(Expr::Flatten)
        );
        assert_eq!(parse_ma("pi[1.C.q]").unwrap(), Expr::Proj(path("1.C.q")));
    }

    #[test]
    fn canonical_text_roundtrips() {
        for s in [
            "id ; sng",
            "tup[1 = 'a', 2 = 'b']",
            "map(pi[A]) ; flatten",
            "tup[1 = '0' ; sng, 2 = '1' ; sng] ; union",
            "union(pi[A], '0' ; sng)",
            "cart(id, id) ; select[1 = 2 && !(1 =mon 2) || 1.q in {f, g}]",
            "select[1.C.q in {a} <=> 2.C.q in {a}]",
            "select[(a = b <=> c = d) <=> e =atomic 'x']",
            "nest[C = (B, D)] ; eqatom[A, B] ; eqmon[A, B] ; eq[A, B]",
            "subseteq[A, B] ; in[A, B] ; diff ; cap ; monus ; unique ; true ; not",
            "flatmap(pairwith[\"S_R\"]) ; unit ; empty",
            "'>s<' ; sng",
        ] {
            let e = parse_ma(s).unwrap();
            let printed = e.to_string();
            assert_eq!(parse_ma(&printed).unwrap(), e, "{s}");
            assert_eq!(parse_ma(&printed).unwrap().to_string(), printed);
        }
    }

    #[test]
    fn mode_words_need_adjacency() {
        let k = parse_cond("a = mon").unwrap();
        assert_eq!(k, Cond::Cmp(path("a"), Operand::Path(path("mon")), EqMode::Deep));
        let k = parse_cond("a =mon b").unwrap();
        assert_eq!(k, Cond::eq("a", "b", EqMode::Mon));
    }

    #[test]
    fn reports_positions() {
        match parse_ma("id ; frob") {
            Err(crate::error::Error::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_ma("map(id").is_err());
        assert!(parse_ma("tup[A = id, A = id]").is_err());
    }
}
