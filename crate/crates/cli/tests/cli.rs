use std::io::Write;
use std::process::Command;

fn nestql(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nestql")).args(args).output().expect("spawn nestql");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

const UNION_QUERY: &str = "tup[1 = '0' ; sng, 2 = '1' ; sng] ; union";

#[test]
fn eval_ma_under_each_semantics() {
    let q = "tup[1 = '1' ; sng, 2 = '1' ; sng] ; union";
    assert_eq!(nestql(&["eval-ma", q, "--semantics", "set"]).1, "{1}\n");
    assert_eq!(nestql(&["eval-ma", q, "--semantics", "bag"]).1, "{|1, 1|}\n");
    assert_eq!(nestql(&["eval-ma", q]).1, "[1, 1]\n");
}

#[test]
fn compiled_program_evaluates_from_file() {
    let (code, program, _) = nestql(&["ma2lp", UNION_QUERY, "--encoding", "plain"]);
    assert_eq!(code, 0);
    assert!(program.starts_with("% goal: p6\n"), "{program}");
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(program.as_bytes()).unwrap();
    let arg = format!("@{}", f.path().display());
    assert_eq!(nestql(&["eval-lp", &arg]), (0, "(1.s).0\n(2.s).1\n".into(), String::new()));
}

#[test]
fn detree_pipeline() {
    let (_, paths, _) = nestql(&["detree-encode", "dummy", "--encoding", "plain"]);
    let (code, out, _) = nestql(&["detree-eval", UNION_QUERY, &paths, "--encoding", "plain"]);
    assert_eq!(code, 0);
    assert_eq!(out, "(1.s).0\n(2.s).1\n");
    assert_eq!(nestql(&["detree-decode", &out]).1, "[0, 1]\n");
}

#[test]
fn xquery_commands() {
    let doc = "<a><b/><c/></a>";
    assert_eq!(nestql(&["eval-xq", "for $x in $root/* return <w>{$x}</w>", doc]).1, "<w><b/></w><w><c/></w>\n");
    assert_eq!(nestql(&["decide-xq", "<r>{$root/b}</r>", doc]).0, 0);
    assert_eq!(nestql(&["decide-xq", "<r>{$root/z}</r>", doc]).0, 1);
    let (code, _, err) = nestql(&["decide-xq", "$root/*", doc]);
    assert_eq!(code, 2);
    assert!(err.contains("exactly one"), "{err}");
    assert_eq!(nestql(&["xq2ma", "<a/>"]).0, 0);
    assert_eq!(nestql(&["ma2xq", "map(sng)", "--type", "[Dom]"]).0, 0);
}

#[test]
fn turing_machine_queries() {
    assert_eq!(nestql(&["gen-tm", "first-one", "--input", "1", "--run"]).0, 0);
    assert_eq!(nestql(&["gen-tm", "first-one", "--input", "0", "--run"]).0, 1);
    let (code, listing, _) = nestql(&["gen-tm", "--list"]);
    assert_eq!(code, 0);
    assert!(listing.contains("% parity"));
    let (code, q, _) = nestql(&["gen-tm", "guess", "--k", "2", "--expanded"]);
    assert_eq!(code, 0);
    assert!(!q.contains("=mon"));
    assert_eq!(nestql(&["gen-tm", "guess", "--k", "0"]).0, 2);
}

#[test]
fn reductions() {
    assert_eq!(nestql(&["gen-dexp", "3", "--eval"]).1, "256 elements\n");
    let v = "{<A: a, B: b>, <A: c, B: d>}";
    let (_, facts, _) = nestql(&["flat", v, "--facts"]);
    assert!(facts.contains("atomic(11, d)."), "{facts}");
    let out = nestql(&["vtau", "--type", "{<A: Dom, B: Dom>}", "--value", v, "--prime"]).1;
    assert_eq!(out, format!("{{{v}}}\n"));
}

#[test]
fn checks_pass() {
    for cmd in ["check-xq2ma", "check-ma2xq", "check-oracles"] {
        let (code, out, err) = nestql(&[cmd, "--cases", "20", "--seed", "7"]);
        assert_eq!(code, 0, "{cmd}: {out}{err}");
    }
    assert_eq!(nestql(&["check-xq2ma", "--eq-mode", "atomic", "--cases", "20"]).0, 0);
}

#[test]
fn errors_exit_two() {
    assert_eq!(nestql(&["eval-ma", "bogus["]).0, 2);
    assert_eq!(nestql(&["eval-lp", "@/nonexistent/file"]).0, 2);
    assert_eq!(nestql(&["no-such-command"]).0, 2);
}
