//! Seeded random generators for types, values, documents and queries,
//! shared by the property suites and the command line.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ma::ast::{Expr, Path};
use crate::value::{EqMode, Kind, Type, Value};
use crate::xml::Tree;
use crate::xq::{Axis, Test, Xq};

const ATOMS: [&str; 3] = ["a", "b", "c"];
const LABELS: [&str; 3] = ["A", "B", "C"];
const TAGS: [&str; 3] = ["a", "b", "c"];

/// Which operators the query generator may emit.
#[derive(Debug, Clone, Copy)]
pub struct QueryShape {
    pub sem: Kind,
    pub depth: usize,
    pub negation: bool,
    /// Atomic equality over the input's atoms.
    pub equality: bool,
}

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        xs.choose(&mut self.rng).expect("nonempty choice")
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn atom(&mut self) -> &'static str {
        self.pick(&ATOMS)
    }

    /// A random type over the given collection kinds.
    pub fn typ(&mut self, depth: usize, kinds: &[Kind]) -> Type {
        let r = if depth == 0 { 0 } else { self.rng.gen_range(0..4) };
        match r {
            0 => Type::Dom,
            1 if !kinds.is_empty() => Type::coll(*self.pick(kinds), self.typ(depth - 1, kinds)),
            2 | 1 => {
                let n = self.rng.gen_range(1..=2);
                Type::tuple(LABELS[..n].iter().map(|l| (*l, self.typ(depth - 1, kinds))).collect())
            }
            _ if !kinds.is_empty() => Type::coll(*self.pick(kinds), self.typ(depth - 1, kinds)),
            _ => Type::Dom,
        }
    }

    /// A random type built from `Dom` and tuples only.
    pub fn set_free_type(&mut self, depth: usize) -> Type {
        self.typ(depth, &[])
    }

    /// A value of type `t`; collections get up to `width` members.
    pub fn value(&mut self, t: &Type, width: usize, nonempty: bool) -> Value {
        match t {
            Type::Dom | Type::Unknown => Value::atom(self.atom()),
            Type::Tuple(fs) => {
                Value::tuple(fs.iter().map(|(l, ft)| (l.clone(), self.value(ft, width, nonempty))).collect())
            }
            Type::Coll(k, e) => {
                let n = self.rng.gen_range(usize::from(nonempty)..=width.max(usize::from(nonempty)));
                Value::coll(*k, (0..n).map(|_| self.value(e, width, nonempty)).collect())
            }
        }
    }

    /// A value of type `t` with at most `max_nodes` nodes; `None` after
    /// repeated oversize draws.
    pub fn value_within(&mut self, t: &Type, max_nodes: u64, nonempty: bool) -> Option<Value> {
        (0..50).map(|_| self.value(t, 3, nonempty)).find(|v| v.node_count() <= max_nodes)
    }

    /// Values built from sets, pairs labeled `1`/`2`, and atoms, with every
    /// set nonempty.
    pub fn set_pair_value(&mut self, max_nodes: u64) -> Value {
        loop {
            let t = self.set_pair_type(3);
            if let Some(v) = self.value_within(&t, max_nodes, true) {
                return v;
            }
        }
    }

    fn set_pair_type(&mut self, depth: usize) -> Type {
        match if depth == 0 { 0 } else { self.rng.gen_range(0..3) } {
            0 => Type::Dom,
            1 => Type::coll(Kind::Set, self.set_pair_type(depth - 1)),
            _ => Type::tuple(vec![("1", self.set_pair_type(depth - 1)), ("2", self.set_pair_type(depth - 1))]),
        }
    }

    fn dom_paths(t: &Type) -> Vec<Path> {
        match t {
            Type::Dom => vec![vec![]],
            Type::Tuple(fs) => fs
                .iter()
                .flat_map(|(l, ft)| {
                    Self::dom_paths(ft).into_iter().map(move |mut p| {
                        p.insert(0, l.clone());
                        p
                    })
                })
                .collect(),
            _ => vec![],
        }
    }

    fn any_paths(t: &Type) -> Vec<(Path, Type)> {
        let mut out = Vec::new();
        if let Type::Tuple(fs) = t {
            for (l, ft) in fs {
                out.push((vec![l.clone()], ft.clone()));
                for (mut p, pt) in Self::any_paths(ft) {
                    p.insert(0, l.clone());
                    out.push((p, pt));
                }
            }
        }
        out
    }

    /// A well-typed core query on inputs of type `t`, with its output type.
    pub fn query(&mut self, t: &Type, shape: QueryShape) -> (Expr, Type) {
        self.expr(t, shape.depth, shape)
    }

    /// A closed query: its input is `⟨⟩` and its data comes from constants.
    pub fn closed_query(&mut self, shape: QueryShape) -> (Expr, Type) {
        let (seed, st) = self.constant(2, shape.sem);
        let (rest, rt) = self.expr(&st, shape.depth, shape);
        (seed.then(rest), rt)
    }

    /// A constant-building expression, ignoring its input.
    fn constant(&mut self, depth: usize, sem: Kind) -> (Expr, Type) {
        let r = if depth == 0 { 0 } else { self.rng.gen_range(0..4) };
        match r {
            0 => (Expr::c(self.atom()), Type::Dom),
            1 => {
                let n = self.rng.gen_range(1..=2);
                let fs: Vec<(&str, (Expr, Type))> = LABELS[..n].iter().map(|l| (*l, self.constant(depth - 1, sem))).collect();
                let ty = Type::tuple(fs.iter().map(|(l, (_, t))| (*l, t.clone())).collect());
                (Expr::tuple(fs.into_iter().map(|(l, (e, _))| (l, e)).collect()), ty)
            }
            _ => {
                let (e, t) = self.constant(depth - 1, sem);
                let one = e.then(Expr::Sng);
                if self.chance(0.5) {
                    let (e2, t2) = self.constant(depth - 1, sem);
                    if t2 == t {
                        return (Expr::union(one, e2.then(Expr::Sng)), Type::coll(sem, t));
                    }
                }
                (one, Type::coll(sem, t))
            }
        }
    }

    fn leaf(&mut self, t: &Type, shape: QueryShape) -> (Expr, Type) {
        let mut opts: Vec<u8> = vec![0, 1, 2, 3];
        if matches!(t, Type::Tuple(fs) if !fs.is_empty()) {
            opts.extend([4, 4]);
        }
        if shape.equality && !Self::dom_paths(t).is_empty() && !matches!(t, Type::Dom) {
            opts.push(5);
        }
        if matches!(t, Type::Coll(..)) {
            opts.extend([6, 6]);
            if shape.negation {
                opts.push(7);
            }
        }
        match *self.pick(&opts) {
            0 => (Expr::Id, t.clone()),
            1 => (Expr::c(self.atom()), Type::Dom),
            2 => (Expr::Unit, Type::unit()),
            3 => (Expr::Sng, Type::coll(shape.sem, t.clone())),
            4 => {
                let ps = Self::any_paths(t);
                let (p, pt) = self.pick(&ps).clone();
                (Expr::Proj(p), pt)
            }
            5 => {
                let ps = Self::dom_paths(t);
                let a = self.pick(&ps).clone();
                let b = self.pick(&ps).clone();
                (Expr::EqAtomic(a, b), Type::boolean(shape.sem))
            }
            6 => {
                let Type::Coll(k, e) = t else { unreachable!() };
                match &**e {
                    Type::Coll(_, inner) => (Expr::Flatten, Type::coll(*k, (**inner).clone())),
                    _ => (Expr::Id, t.clone()),
                }
            }
            _ => (Expr::Not, Type::boolean(shape.sem)),
        }
    }

    fn expr(&mut self, t: &Type, depth: usize, shape: QueryShape) -> (Expr, Type) {
        if depth == 0 || self.chance(0.25) {
            return self.leaf(t, shape);
        }
        let d = depth - 1;
        let mut opts: Vec<u8> = vec![0, 0, 1, 2];
        if let Type::Coll(_, e) = t {
            opts.extend([3, 3, 3]);
            if matches!(**e, Type::Coll(..)) {
                opts.push(4);
            }
        }
        let coll_fields: Vec<String> = match t {
            Type::Tuple(fs) => fs.iter().filter(|(_, ft)| matches!(ft, Type::Coll(..))).map(|(l, _)| l.to_string()).collect(),
            _ => vec![],
        };
        if !coll_fields.is_empty() {
            opts.extend([5, 5]);
        }
        match *self.pick(&opts) {
            0 => {
                let (f, ft) = self.expr(t, d, shape);
                let (g, gt) = self.expr(&ft, d, shape);
                (f.then(g), gt)
            }
            1 => {
                let n = self.rng.gen_range(1..=2);
                let fs: Vec<(&str, (Expr, Type))> = LABELS[..n].iter().map(|l| (*l, self.expr(t, d, shape))).collect();
                let ty = Type::tuple(fs.iter().map(|(l, (_, t))| (*l, t.clone())).collect());
                (Expr::tuple(fs.into_iter().map(|(l, (e, _))| (l, e)).collect()), ty)
            }
            2 => {
                let (f, ft) = self.expr(t, d, shape);
                let (f, ft) = match ft {
                    Type::Coll(..) => (f, ft),
                    other => (f.then(Expr::Sng), Type::coll(shape.sem, other)),
                };
                for _ in 0..5 {
                    let (g, gt) = self.expr(t, d, shape);
                    if gt == ft {
                        return (Expr::union(f, g), ft);
                    }
                    if let Type::Coll(_, ge) = &gt {
                        let sng = Type::coll(shape.sem, gt.clone());
                        if sng == ft && !matches!(**ge, Type::Unknown) {
                            return (Expr::union(f, g.then(Expr::Sng)), ft);
                        }
                    }
                }
                if self.chance(0.5) {
                    (Expr::union(f.clone(), f), ft)
                } else {
                    (Expr::union(f, Expr::Empty), ft)
                }
            }
            3 => {
                let Type::Coll(k, e) = t else { unreachable!() };
                let (f, ft) = self.expr(e, d, shape);
                (Expr::map(f), Type::coll(*k, ft))
            }
            4 => {
                let Type::Coll(k, e) = t else { unreachable!() };
                let Type::Coll(_, inner) = &**e else { unreachable!() };
                let (g, gt) = self.expr(&Type::coll(*k, (**inner).clone()), d, shape);
                (Expr::Flatten.then(g), gt)
            }
            _ => {
                let a = self.pick(&coll_fields).clone();
                let Type::Tuple(fs) = t else { unreachable!() };
                let Some((_, Type::Coll(k, e))) = fs.iter().find(|(l, _)| **l == *a) else { unreachable!() };
                let row = Type::Tuple(
                    fs.iter().map(|(l, ft)| (l.clone(), if **l == *a { (**e).clone() } else { ft.clone() })).collect(),
                );
                (Expr::pairwith(&a), Type::coll(*k, row))
            }
        }
    }

    /// A random tree with at most `max_nodes` nodes.
    pub fn doc(&mut self, max_nodes: usize) -> Tree {
        let target = self.rng.gen_range(1..=max_nodes.max(1));
        let mut t = Tree::leaf(self.pick(&TAGS));
        for _ in 1..target {
            let mut cur = &mut t;
            while !cur.children.is_empty() && self.chance(0.6) {
                let i = self.rng.gen_range(0..cur.children.len());
                cur = &mut cur.children[i];
            }
            cur.children.push(Tree::leaf(TAGS[self.rng.gen_range(0..TAGS.len())]));
        }
        t
    }

    /// A core XQuery expression with child steps and variable equality in
    /// `mode`, over `scope` variables in scope (the root is level 1).
    pub fn xq(&mut self, scope: usize, depth: usize, mode: EqMode) -> Xq {
        let var = |g: &mut Gen| g.rng.gen_range(1..=scope);
        if depth <= 1 || self.chance(0.2) {
            return match self.rng.gen_range(0..4) {
                0 => Xq::Elem((*self.pick(&TAGS)).into(), None),
                1 => Xq::Var(var(self)),
                2 => Xq::VarEq(var(self), var(self), mode),
                _ => {
                    let test = if self.chance(0.3) { Test::Star } else { Test::Name((*self.pick(&TAGS)).into()) };
                    Xq::Step(var(self), Axis::Child, test)
                }
            };
        }
        let d = depth - 1;
        let name = format!("v{}", scope + 1);
        match self.rng.gen_range(0..6) {
            0 => Xq::Elem((*self.pick(&TAGS)).into(), Some(Box::new(self.xq(scope, d, mode)))),
            1 => Xq::Seq(Box::new(self.xq(scope, d, mode)), Box::new(self.xq(scope, d, mode))),
            2 | 3 => {
                let src = Xq::Step(var(self), Axis::Child, Test::Star);
                let src = if self.chance(0.5) { src } else { self.xq(scope, d, mode) };
                Xq::For(name, Box::new(src), Box::new(self.xq(scope + 1, d, mode)))
            }
            4 => {
                let bound = if self.chance(0.5) {
                    Xq::Var(var(self))
                } else {
                    Xq::Elem((*self.pick(&TAGS)).into(), Some(Box::new(self.xq(scope, d, mode))))
                };
                Xq::Let(name, Box::new(bound), Box::new(self.xq(scope + 1, d, mode)))
            }
            _ => Xq::If(Box::new(self.xq(scope, d, mode)), Box::new(self.xq(scope, d, mode))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ma::{eval_ma, infer_type};
    use crate::value::check_type;
    use crate::xq::check_xq;

    #[test]
    fn generated_queries_are_well_typed() {
        let mut g = Gen::new(7);
        for sem in [Kind::Set, Kind::List, Kind::Bag] {
            let shape = QueryShape { sem, depth: 4, negation: true, equality: true };
            for _ in 0..200 {
                let t = g.typ(3, &[sem]);
                let (q, qt) = g.query(&t, shape);
                let inferred = infer_type(&q, &t, sem).unwrap_or_else(|e| panic!("{q} on {t}: {e}"));
                assert!(inferred.join(&qt).is_some(), "{q}: {inferred} vs {qt}");
                let (c, _) = g.closed_query(shape);
                infer_type(&c, &Type::unit(), sem).unwrap_or_else(|e| panic!("{c}: {e}"));
            }
        }
    }

    #[test]
    fn values_match_their_types_and_seeds_repeat() {
        let mut g = Gen::new(1);
        for _ in 0..100 {
            let t = g.typ(3, &[Kind::Set, Kind::List]);
            let v = g.value(&t, 3, false);
            assert!(check_type(&v, &t), "{v} : {t}");
        }
        let (a, b) = (Gen::new(5).doc(20), Gen::new(5).doc(20));
        assert_eq!(a, b);
        assert!(a.node_count() <= 20);
        let v = Gen::new(3).set_pair_value(12);
        assert!(v.node_count() <= 12);
    }

    #[test]
    fn generated_xq_is_scoped() {
        let mut g = Gen::new(11);
        for _ in 0..200 {
            let q = g.xq(1, 5, EqMode::Deep);
            check_xq(&q, 1).unwrap();
        }
    }

    #[test]
    fn closed_queries_evaluate() {
        let mut g = Gen::new(2);
        let shape = QueryShape { sem: Kind::List, depth: 3, negation: false, equality: true };
        for _ in 0..50 {
            let (q, _) = g.closed_query(shape);
            eval_ma(&q, &Value::unit(), Kind::List).unwrap();
        }
    }
}
