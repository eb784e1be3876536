//! Static upper bound on output size, by structural recursion on the query.
//! Every unspecified constant is fixed to 1.

use num_bigint::BigUint;

use super::ast::Expr;
use crate::error::{Error, Result};

/// Upper bound on the node count of `q`'s output for inputs of `n` nodes.
///
/// Covers core operators, selections and deep equality. `map(f)` is not
/// part of the classical recursion; it is bounded by `1 + n·C_f(n)`.
pub fn size_bound(q: &Expr, n: &BigUint) -> Result<BigUint> {
    use Expr::*;
    let one = BigUint::from(1u8);
    Ok(match q {
        Const(_) | Empty | Unit => one,
        Id | Flatten | Proj(_) | Select(_) | EqAtomic(..) | EqDeep(..) | Monus | Unique => n.clone(),
        Sng | Not | True => n + one,
        Tuple(fs) => {
            let mut s = one;
            for (_, f) in fs {
                s += size_bound(f, n)?;
            }
            s
        }
        Union(f, g) => size_bound(f, n)? + size_bound(g, n)?,
        PairWith(_) => n * n + one,
        Compose(f, g) => size_bound(g, &size_bound(f, n)?)?,
        Map(f) => one + n * size_bound(f, n)?,
        other => {
            return Err(Error::Unsupported(format!("size bound of `{other}`: desugar first")))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::parse::parse_ma;

    fn b(q: &str, n: u32) -> BigUint {
        size_bound(&parse_ma(q).unwrap(), &BigUint::from(n)).unwrap()
    }

    #[test]
    fn recursion_examples() {
        assert_eq!(b("id", 5), BigUint::from(5u8));
        assert_eq!(b("pairwith[A]", 3), BigUint::from(10u8));
        assert_eq!(b("pairwith[A] ; pairwith[B]", 2), BigUint::from(26u8));
        assert_eq!(b("tup[A = id, B = sng]", 4), BigUint::from(1u8 + 4 + 5));
        assert_eq!(b("'a'", 100), BigUint::from(1u8));
    }

    #[test]
    fn nested_pairwith_is_doubly_exponential_in_depth() {
        let q = vec!["pairwith[A]"; 8].join(" ; ");
        assert!(b(&q, 2).bits() > 200);
        assert!(size_bound(&parse_ma("cart(id, id)").unwrap(), &BigUint::from(1u8)).is_err());
    }
}
