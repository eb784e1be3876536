use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nestql::bridge::{check_ma_roundtrip_typed, check_xq_roundtrip, ma_to_xq, xq_to_ma};
use nestql::detree::{decode_det, encode_det, eval_det, parse_pathset, plain_view, print_pathset, Encoding};
use nestql::gen::{Gen, QueryShape};
use nestql::lp::{compile_lp, eval_lp, goal_true, parse_lp, print_lp};
use nestql::ma::{infer_type, parse_ma, print_ma, Evaluator, Expr};
use nestql::reductions::{
    bundled_machine, bundled_machines, flat_encode, gen_doubly_exp, gen_tm_query_with, gen_vprime, gen_vtau,
    parse_tm, simulate_ntm, split_input, MonStyle,
};
use nestql::xml::parse_xml;
use nestql::xq::{decide_xq, eval_xq, parse_xq, print_seq, print_xq};
use nestql::{parse_type, parse_value, EqMode, Kind, Type, Value};

/// Query languages for nested data: monad algebra, XQuery, detree and
/// logic-program evaluation, and the complexity reductions.
///
/// Text arguments starting with `@` are read from the named file.
#[derive(Parser)]
#[command(name = "nestql", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sem {
    Set,
    Bag,
    List,
}

impl From<Sem> for Kind {
    fn from(s: Sem) -> Kind {
        match s {
            Sem::Set => Kind::Set,
            Sem::Bag => Kind::Bag,
            Sem::List => Kind::List,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Enc {
    Plain,
    Marked,
}

impl From<Enc> for Encoding {
    fn from(e: Enc) -> Encoding {
        match e {
            Enc::Plain => Encoding::Plain,
            Enc::Marked => Encoding::Marked,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Eq {
    Deep,
    Atomic,
}

impl From<Eq> for EqMode {
    fn from(e: Eq) -> EqMode {
        match e {
            Eq::Deep => EqMode::Deep,
            Eq::Atomic => EqMode::Atomic,
        }
    }
}

#[derive(clap::Args)]
struct Random {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    cases: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a monad algebra query on a value.
    EvalMa {
        query: String,
        #[arg(long, default_value = "<>")]
        input: String,
        #[arg(long, value_enum, default_value_t = Sem::List)]
        semantics: Sem,
    },
    /// Evaluate an XQuery on a document bound to `$root`.
    EvalXq { query: String, doc: String },
    /// Boolean XQuery: exit 0 if the single result node has children, 1 otherwise.
    DecideXq { query: String, doc: String },
    /// Translate XQuery to monad algebra.
    Xq2ma { query: String },
    /// Translate a list query to XQuery for inputs of the given type.
    Ma2xq {
        query: String,
        #[arg(long = "type")]
        ty: String,
    },
    /// Compile a query applied to an input value into a logic program.
    Ma2lp {
        query: String,
        #[arg(long, default_value = "dummy")]
        input: String,
        #[arg(long, value_enum, default_value_t = Enc::Marked)]
        encoding: Enc,
    },
    /// Evaluate a logic program and print the goal's path set.
    EvalLp { program: String },
    /// Encode a value as a path set.
    DetreeEncode {
        value: String,
        #[arg(long, value_enum, default_value_t = Enc::Marked)]
        encoding: Enc,
    },
    /// Evaluate a query on a path set.
    DetreeEval {
        query: String,
        paths: String,
        #[arg(long, value_enum, default_value_t = Enc::Marked)]
        encoding: Enc,
    },
    /// Decode a path set into a list value.
    DetreeDecode {
        paths: String,
        #[arg(long = "type")]
        ty: Option<String>,
    },
    /// Build the query that decides NTM acceptance within 2^k steps.
    GenTm {
        /// A bundled machine name or a machine description.
        #[arg(required_unless_present = "list")]
        machine: Option<String>,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Write equality on tapes with `=atomic` only.
        #[arg(long)]
        expanded: bool,
        /// Evaluate the query and compare with the simulator; exit 1 on rejection.
        #[arg(long)]
        run: bool,
        /// List the bundled machines.
        #[arg(long)]
        list: bool,
    },
    /// Build the query whose result has 2^(2^m) elements.
    GenDexp {
        m: usize,
        #[arg(long)]
        eval: bool,
    },
    /// Flat relational encoding of a value built from sets and pairs.
    Flat {
        value: String,
        /// Print Datalog-style facts instead of the database value.
        #[arg(long)]
        facts: bool,
    },
    /// Print the query that decodes flat databases for a type.
    Vtau {
        #[arg(long = "type")]
        ty: String,
        /// Apply the query to the flat encoding of this value.
        #[arg(long)]
        value: Option<String>,
        /// Only the value rooted at position 1.
        #[arg(long)]
        prime: bool,
    },
    /// Check XQuery against its monad algebra translation.
    CheckXq2ma {
        /// A single query to check against `--doc` instead of random cases.
        query: Option<String>,
        #[arg(long, default_value = "<a/>")]
        doc: String,
        #[arg(long = "eq-mode", value_enum, default_value_t = Eq::Deep)]
        eq_mode: Eq,
        #[command(flatten)]
        random: Random,
    },
    /// Check monad algebra list queries against their XQuery translation.
    CheckMa2xq {
        query: Option<String>,
        #[arg(long, default_value = "[a]")]
        input: String,
        #[command(flatten)]
        random: Random,
    },
    /// Check direct, detree and logic program evaluation agree.
    CheckOracles {
        #[command(flatten)]
        random: Random,
    },
}

#[derive(Debug)]
enum Fail {
    /// A decide or check command answered no.
    False(String),
    Error(String),
}

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Fail {
        Fail::Error(e.to_string())
    }
}

type Out = Result<String, Fail>;

fn text(arg: &str) -> Result<String, Fail> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| Fail::Error(format!("{path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn verdict(ok: bool, msg: String) -> Out {
    if ok {
        Ok(msg)
    } else {
        Err(Fail::False(msg))
    }
}

fn run(cmd: Cmd) -> Out {
    match cmd {
        Cmd::EvalMa { query, input, semantics } => {
            let q = parse_ma(&text(&query)?)?;
            let v = parse_value(&text(&input)?)?;
            Ok(Evaluator::new(semantics.into(), nestql::ma::eval::max_value_nodes()).eval(&q, &v)?.to_string())
        }
        Cmd::EvalXq { query, doc } => {
            let q = parse_xq(&text(&query)?)?;
            Ok(print_seq(&eval_xq(&q, &[parse_xml(&text(&doc)?)?])?))
        }
        Cmd::DecideXq { query, doc } => {
            let ok = decide_xq(&parse_xq(&text(&query)?)?, &parse_xml(&text(&doc)?)?)?;
            verdict(ok, ok.to_string())
        }
        Cmd::Xq2ma { query } => Ok(print_ma(&xq_to_ma(&parse_xq(&text(&query)?)?)?)),
        Cmd::Ma2xq { query, ty } => Ok(print_xq(&ma_to_xq(&parse_ma(&text(&query)?)?, &parse_type(&text(&ty)?)?)?)),
        Cmd::Ma2lp { query, input, encoding } => {
            let q = parse_ma(&text(&query)?)?;
            Ok(print_lp(&compile_lp(&q, &parse_value(&text(&input)?)?, encoding.into())?))
        }
        Cmd::EvalLp { program } => Ok(print_pathset(&eval_lp(&parse_lp(&text(&program)?)?)?)),
        Cmd::DetreeEncode { value, encoding } => {
            Ok(print_pathset(&encode_det(&parse_value(&text(&value)?)?, encoding.into())))
        }
        Cmd::DetreeEval { query, paths, encoding } => {
            let q = parse_ma(&text(&query)?)?;
            Ok(print_pathset(&eval_det(&q, &parse_pathset(&text(&paths)?)?, encoding.into())?))
        }
        Cmd::DetreeDecode { paths, ty } => {
            let t = ty.map(|t| text(&t).and_then(|t| Ok(parse_type(&t)?))).transpose()?;
            Ok(decode_det(&parse_pathset(&text(&paths)?)?, t.as_ref())?.to_string())
        }
        Cmd::GenTm { machine, input, k, expanded, run, list } => gen_tm(machine, &input, k, expanded, run, list),
        Cmd::GenDexp { m, eval } => {
            let q = gen_doubly_exp(m);
            if !eval {
                return Ok(print_ma(&q));
            }
            let v = Evaluator::new(Kind::Set, nestql::ma::eval::max_value_nodes()).eval(&q, &Value::unit())?;
            Ok(format!("{} elements", v.elems().map_or(0, <[Value]>::len)))
        }
        Cmd::Flat { value, facts } => {
            let db = flat_encode(&parse_value(&text(&value)?)?)?;
            Ok(if facts { db.facts() } else { format!("{}\n{}", db.text, db.to_value()) })
        }
        Cmd::Vtau { ty, value, prime } => {
            let t = parse_type(&text(&ty)?)?;
            let q = if prime { gen_vprime(&t)? } else { gen_vtau(&t)? };
            match value {
                None => Ok(print_ma(&q)),
                Some(v) => {
                    let db = flat_encode(&parse_value(&text(&v)?)?)?;
                    Ok(Evaluator::new(Kind::Set, nestql::ma::eval::max_value_nodes()).eval(&q, &db.to_value())?.to_string())
                }
            }
        }
        Cmd::CheckXq2ma { query, doc, eq_mode, random } => match query {
            Some(q) => {
                let q = parse_xq(&text(&q)?)?;
                let ok = check_xq_roundtrip(&q, &parse_xml(&text(&doc)?)?)?;
                verdict(ok, if ok { "agree".into() } else { format!("mismatch on {q}") })
            }
            None => {
                let mut g = Gen::new(random.seed);
                let mut skipped = 0;
                for _ in 0..random.cases {
                    let q = g.xq(1, 5, eq_mode.into());
                    let doc = g.doc(20);
                    if eval_xq(&q, std::slice::from_ref(&doc)).is_err() {
                        skipped += 1;
                        continue;
                    }
                    if !check_xq_roundtrip(&q, &doc)? {
                        return Err(Fail::False(format!("mismatch on {q} over {doc}")));
                    }
                }
                Ok(format!("{} cases agree, {skipped} skipped", random.cases - skipped))
            }
        },
        Cmd::CheckMa2xq { query, input, random } => match query {
            Some(q) => {
                let q = parse_ma(&text(&q)?)?;
                let v = parse_value(&text(&input)?)?;
                let ok = check_ma_roundtrip_typed(&q, &v, &nestql::type_of(&v)?)?;
                verdict(ok, if ok { "agree".into() } else { format!("mismatch on {q}") })
            }
            None => {
                let mut g = Gen::new(random.seed);
                let shape = QueryShape { sem: Kind::List, depth: 4, negation: true, equality: true };
                let mut skipped = 0;
                for _ in 0..random.cases {
                    let t = g.typ(3, &[Kind::List]);
                    let v = g.value(&t, 3, false);
                    let (q, _) = g.query(&t, shape);
                    if Evaluator::new(Kind::List, 200_000).eval(&q, &v).is_err() {
                        skipped += 1;
                        continue;
                    }
                    if !check_ma_roundtrip_typed(&q, &v, &t)? {
                        return Err(Fail::False(format!("mismatch on {q} over {v}")));
                    }
                }
                Ok(format!("{} cases agree, {skipped} skipped", random.cases - skipped))
            }
        },
        Cmd::CheckOracles { random } => check_oracles(random),
    }
}

fn gen_tm(machine: Option<String>, input: &str, k: usize, expanded: bool, run: bool, list: bool) -> Out {
    if list {
        return Ok(bundled_machines().iter().map(|(n, m)| format!("% {n}\n{m}")).collect::<Vec<_>>().join("\n"));
    }
    let machine = machine.unwrap_or_default();
    let tm = match bundled_machine(&machine) {
        Some(tm) => tm,
        None => parse_tm(&text(&machine)?)?,
    };
    let word = split_input(input);
    let style = if expanded { MonStyle::Expanded } else { MonStyle::Builtin };
    let q = gen_tm_query_with(&tm, &word, k, style)?;
    if !run {
        return Ok(print_ma(&q));
    }
    infer_type(&q, &Type::unit(), Kind::Set)?;
    let got = Evaluator::new(Kind::Set, nestql::ma::eval::max_value_nodes()).eval(&q, &Value::unit())?;
    let got = got.truthy().ok_or_else(|| Fail::Error("non-Boolean result".into()))?;
    let want = simulate_ntm(&tm, &word, 1 << k)?;
    if got != want {
        return Err(Fail::Error(format!("query says {got}, simulator says {want}")));
    }
    verdict(got, format!("{} (size {})", if got { "accept" } else { "reject" }, q.size()))
}

fn check_oracles(random: Random) -> Out {
    let mut g = Gen::new(random.seed);
    let unit = Value::unit();
    let mut skipped = 0;
    for i in 0..random.cases {
        let shape = QueryShape { sem: Kind::List, depth: 4, negation: i % 2 == 1, equality: true };
        let (q, t) = g.closed_query(shape);
        let Ok(direct) = Evaluator::new(Kind::List, 20_000).eval(&q, &unit) else {
            skipped += 1;
            continue;
        };
        if shape.negation {
            let q = match t {
                Type::Coll(..) => q.then(Expr::Not),
                _ => q.then(Expr::Sng).then(Expr::Not),
            };
            let want = Evaluator::new(Kind::List, 20_000).eval(&q, &unit)?.truthy();
            let got = goal_true(&compile_lp(&q, &unit, Encoding::Marked)?)?;
            if want != Some(got) {
                return Err(Fail::False(format!("goal_true disagrees on {q}")));
            }
            continue;
        }
        let ty = infer_type(&q, &Type::unit(), Kind::List)?;
        for enc in [Encoding::Plain, Encoding::Marked] {
            let want = if enc == Encoding::Plain { plain_view(&direct) } else { direct.clone() };
            let det = decode_det(&eval_det(&q, &encode_det(&unit, enc), enc)?, Some(&ty))?;
            let lp = decode_det(&eval_lp(&compile_lp(&q, &unit, enc)?)?, Some(&ty))?;
            if det != want || lp != want {
                return Err(Fail::False(format!("{enc:?} disagreement on {q}: direct {want}, detree {det}, lp {lp}")));
            }
        }
    }
    Ok(format!("{} cases agree, {skipped} skipped", random.cases - skipped))
}

fn print(out: &str) {
    // a closed pipe (e.g. `| head`) is not an error
    let _ = writeln!(std::io::stdout(), "{}", out.trim_end_matches('\n'));
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(out) => {
            print(&out);
            ExitCode::SUCCESS
        }
        Err(Fail::False(msg)) => {
            print(&msg);
            ExitCode::from(1)
        }
        Err(Fail::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
