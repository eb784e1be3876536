use num_bigint::BigUint;
use proptest::prelude::*;

use nestql::bridge::{decode_c, encode_c};
use nestql::detree::{decode_det, encode_det, eval_det, plain_view, Encoding};
use nestql::gen::{Gen, QueryShape};
use nestql::lp::{compile_lp, eval_lp, parse_lp, print_lp};
use nestql::ma::{eval_ma, infer_type, parse_ma, print_ma, size_bound, Evaluator};
use nestql::reductions::{flat_encode, gen_vprime};
use nestql::xml::{parse_xml, print_xml};
use nestql::xq::{eval_xq, parse_xq, print_xq};
use nestql::{parse_type, parse_value, print_value, type_of, value_equal, EqMode, Kind, Type, Value};

const KINDS: [Kind; 3] = [Kind::Set, Kind::Bag, Kind::List];

fn shape(sem: Kind) -> QueryShape {
    QueryShape { sem, depth: 3, negation: true, equality: true }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn value_text_roundtrip(seed in any::<u64>(), k in 0usize..3) {
        let mut g = Gen::new(seed);
        let t = g.typ(3, &[KINDS[k]]);
        let v = g.value(&t, 3, false);
        prop_assert_eq!(parse_value(&print_value(&v)).unwrap(), v.clone());
        prop_assert_eq!(parse_type(&t.to_string()).unwrap(), t);
        prop_assert!(value_equal(&v, &v, EqMode::Deep).unwrap());
    }

    #[test]
    fn detree_roundtrip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let t = g.typ(3, &[Kind::List]);
        let v = g.value(&t, 3, false);
        let marked = encode_det(&v, Encoding::Marked);
        prop_assert_eq!(decode_det(&marked, Some(&t)).unwrap(), v.clone());
        let plain = encode_det(&v, Encoding::Plain);
        prop_assert_eq!(plain_view(&decode_det(&plain, Some(&t)).unwrap()), plain_view(&v));
    }

    #[test]
    fn detree_and_lp_agree_with_direct(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let unit = Value::unit();
        let (q, _) = g.closed_query(QueryShape { negation: false, ..shape(Kind::List) });
        if let Ok(direct) = Evaluator::new(Kind::List, 20_000).eval(&q, &unit) {
            let ty = infer_type(&q, &Type::unit(), Kind::List).unwrap();
            let enc = Encoding::Marked;
            let det = eval_det(&q, &encode_det(&unit, enc), enc).unwrap();
            prop_assert_eq!(decode_det(&det, Some(&ty)).unwrap(), direct);
            let p = compile_lp(&q, &unit, enc).unwrap();
            prop_assert_eq!(eval_lp(&p).unwrap(), det);
            prop_assert_eq!(parse_lp(&print_lp(&p)).unwrap(), p);
        }
    }

    #[test]
    fn ma_print_parse_roundtrip(seed in any::<u64>(), k in 0usize..3) {
        let mut g = Gen::new(seed);
        let t = g.typ(3, &[KINDS[k]]);
        let (q, _) = g.query(&t, shape(KINDS[k]));
        // composition is printed flat, so compare up to reassociation
        let back = parse_ma(&print_ma(&q)).unwrap();
        prop_assert_eq!(print_ma(&back), print_ma(&q));
        let v = g.value(&t, 2, false);
        prop_assert_eq!(eval_ma(&back, &v, KINDS[k]).ok(), eval_ma(&q, &v, KINDS[k]).ok());
    }

    #[test]
    fn output_fits_type_and_bound(seed in any::<u64>(), k in 0usize..3) {
        let sem = KINDS[k];
        let mut g = Gen::new(seed);
        let t = g.typ(3, &[sem]);
        let v = g.value(&t, 3, false);
        let (q, out_t) = g.query(&t, shape(sem));
        if let Ok(out) = Evaluator::new(sem, 100_000).eval(&q, &v) {
            prop_assert!(nestql::check_type(&out, &out_t), "{} : {}", out, out_t);
            let bound = size_bound(&q, &BigUint::from(v.node_count())).unwrap();
            prop_assert!(BigUint::from(out.node_count()) <= bound);
        }
    }

    #[test]
    fn set_results_are_duplicate_free(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let t = g.typ(3, &[Kind::Set]);
        let v = g.value(&t, 3, false);
        let (q, _) = g.query(&t, shape(Kind::Set));
        if let Ok(Value::Coll(_, es)) = Evaluator::new(Kind::Set, 100_000).eval(&q, &v) {
            prop_assert!(es.windows(2).all(|w| w[0] != w[1]));
        }
    }

    #[test]
    fn xml_and_c_encoding_roundtrip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let doc = g.doc(20);
        prop_assert_eq!(parse_xml(&print_xml(&doc).unwrap()).unwrap(), doc.clone());
        prop_assert_eq!(decode_c(&encode_c(&doc)).unwrap(), doc);
    }

    #[test]
    fn xq_print_parse_preserves_results(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let q = g.xq(1, 4, EqMode::Deep);
        let doc = g.doc(12);
        let back = parse_xq(&print_xq(&q)).unwrap();
        prop_assert_eq!(
            eval_xq(&q, std::slice::from_ref(&doc)).ok(),
            eval_xq(&back, std::slice::from_ref(&doc)).ok()
        );
    }

    #[test]
    fn flat_encoding_is_recoverable(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let v = g.set_pair_value(25);
        let t = type_of(&v).unwrap();
        let db = flat_encode(&v).unwrap();
        let got = eval_ma(&gen_vprime(&t).unwrap(), &db.to_value(), Kind::Set).unwrap();
        prop_assert_eq!(got, Value::coll(Kind::Set, vec![v]));
    }
}
