use std::io::Write;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv: Vec<String> = std::iter::once("aml").chain(args.iter().copied()).map(String::from).collect();
    let code = aml::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn eval_examples() {
    let z4 = data("z4.struct");
    let (code, out, _) = run(&["eval", &z4, "m[x] <= 1/4 . (x = e)"]);
    assert_eq!(code, 0);
    assert!(out.contains("true (mu = 1/4, <= 1/4, flag ⊙)"), "{out}");
    let (code, out, _) = run(&["eval", &z4, "m[x] < 1/4 . (x = e)"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("false"), "{out}");
}

#[test]
fn eval_with_bindings_and_trace() {
    let s3 = data("s3.struct");
    let (code, out, _) = run(&["eval", &s3, "m[x] < 1/2 . (mul(x,g) = mul(g,x))", "--bind", "g=1", "--trace"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("true (mu = 1/3, < 1/2, flag ⊙)"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("trace ") && l.contains("|set| = 2")), "{out}");
}

#[test]
fn eval_error_codes() {
    let z4 = data("z4.struct");
    let (code, _, err) = run(&["eval", &z4, "x = y"]);
    assert_eq!(code, 3);
    assert!(err.starts_with("error reason="), "{err}");
    assert_eq!(run(&["eval", &z4, "mul(x) = x", "--bind", "x=0"]).0, 3);
    assert_eq!(run(&["eval", &z4, "m[x] < . x = e"]).0, 2);
    assert_eq!(run(&["eval", "/no/such/file", "x = x"]).0, 2);
    assert_eq!(run(&["--budget", "10", "eval", &z4, "forall x . forall y . m[z] <= 1 . (mul(x,y) = z)"]).0, 4);
}

#[test]
fn formula_from_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "exists x . ~(x = e)").unwrap();
    let arg = format!("@{}", f.path().display());
    let (code, out, _) = run(&["eval", &data("z4.struct"), &arg]);
    assert_eq!(code, 0);
    assert!(out.starts_with("true"), "{out}");
}

#[test]
fn check_axioms_examples() {
    let (code, out, _) = run(&["check-axioms", &data("z4.struct"), "--schemes", "AML,I,F,F+", "--count", "200", "--seed", "7"]);
    assert_eq!(code, 0);
    assert!(out.contains("200/200 hold"), "{out}");
    let (code, out, _) = run(&["check-axioms", &data("weighted.struct"), "--schemes", "F", "--count", "50"]);
    assert_eq!(code, 0);
    assert!(out.contains("50/50 hold"), "{out}");
    assert_eq!(run(&["check-axioms", &data("z4.struct"), "--schemes", "AML,Bogus"]).0, 2);
}

#[test]
fn records_are_deterministic_across_threads() {
    let z4 = data("z4.struct");
    let a = run(&["--format", "records", "--threads", "1", "check-axioms", &z4, "--count", "40", "--seed", "3"]);
    let b = run(&["--format", "records", "--threads", "4", "check-axioms", &z4, "--count", "40", "--seed", "3"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
}

#[test]
fn gowers_example() {
    let (code, out, _) = run(&["gowers", "z2-group", "--g", "1,-1", "--k", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("U^2 power = 1"), "{out}");
    let (code, out, _) = run(&["gowers", &data("z2.group"), "--g", "1,-1", "--k", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("U^2 power = 1"), "{out}");
    let (code, _, _) = run(&["gowers", "--table", &data("diag.ft"), "--positivity"]);
    assert_eq!(code, 0);
    assert_eq!(run(&["gowers", "z2-group", "--g", "1,x", "--k", "2"]).0, 2);
}

#[test]
fn regularity_example() {
    let (code, out, _) = run(&["regularity", &data("g16.graph"), "--eps", "1/3"]);
    assert_eq!(code, 0);
    assert!(out.contains("irregular mass 24/256 ≤ 1/3"), "{out}");
}

#[test]
fn hypergraph_and_ap() {
    let (code, out, _) = run(&["hypergraph", &data("triangle.hg"), &data("two-triangles.hg"), "--remove"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["ap-encode", "--A", "1,2,3", "--n", "3", "--k", "2"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(run(&["ap-encode", "--A", "1,9", "--n", "3"]).0, 3);
}

#[test]
fn limit_examples() {
    let fam = data("zn.family");
    let (code, out, _) = run(&["limit", &fam, "m[x] <= 1/3 . (x = e)"]);
    assert_eq!(code, 0);
    assert!(out.contains("EventuallyTrue(3)"), "{out}");
    let (code, out, _) = run(&["limit", &fam, "x = e", "--vars", "x", "--r", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains('⊕'), "{out}");
}

#[test]
fn density_examples() {
    let (code, out, _) = run(&["density", "--E", &data("evens.set"), "--N", "10", "--Lmin", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("density = 2/3"), "{out}");
    let (code, out, _) = run(&["density", "--E", "1", "--N", "10", "--Lmin", "5"]);
    assert_eq!(code, 0);
    assert!(out.contains("density = 1/5"), "{out}");
    let (code, _, _) = run(&["furstenberg", "--E", &data("evens.set"), "--N", "10", "--U", "0,2"]);
    assert_eq!(code, 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
}
