//! Front-end properties on generated C: lifting emitted programs gives
//! equivalent programs, and do-while/for normalization agrees with direct
//! unrolling on bounded traces.

use cfgkat::driver::{equiv, random_program, Limits};
use cfgkat::frontend::{lift_to_exp, parse_function, IndicatorChoice};
use cfgkat::oracle::trace_languages;
use cfgkat::syntax::{collect_alphabets, BExp, Exp, ExpKind};

fn num(name: &str) -> &str {
    name.trim_start_matches(['p', 't'])
}

fn emit_b(b: &BExp) -> String {
    match b {
        BExp::False => "0".into(),
        BExp::True => "1".into(),
        BExp::Prim(t) => format!("pbool({})", num(t.as_str())),
        BExp::IndEq(i) => format!("x == {i}"),
        BExp::Or(a, b) => format!("({} || {})", emit_b(a), emit_b(b)),
        BExp::And(a, b) => format!("({} && {})", emit_b(a), emit_b(b)),
        BExp::Not(a) => format!("!({})", emit_b(a)),
    }
}

/// C text for a generated program, with `x` as the indicator.
fn emit(e: &Exp) -> String {
    match &e.kind {
        ExpKind::Assert(b) => format!("while (!({})) ;", emit_b(b)),
        ExpKind::Act(p) => format!("pact({});", num(p.as_str())),
        ExpKind::Assign(i) => format!("x = {i};"),
        ExpKind::Seq(v) => format!("{{ {} }}", v.iter().map(emit).collect::<Vec<_>>().join(" ")),
        ExpKind::If(b, t, f) => format!("if ({}) {{ {} }} else {{ {} }}", emit_b(b), emit(t), emit(f)),
        ExpKind::While(b, body) => format!("while ({}) {{ {} }}", emit_b(b), emit(body)),
        ExpKind::Break => "break;".into(),
        ExpKind::Return => "return;".into(),
        ExpKind::Goto(l) => format!("goto {l};"),
        ExpKind::Label(l) => format!("{l}: ;"),
    }
}

/// Renames `p3`/`t3` to `3`, matching what the front end produces.
fn renumber(e: &Exp) -> Exp {
    fn b(x: &BExp) -> BExp {
        match x {
            BExp::Prim(t) => BExp::prim(num(t.as_str())),
            BExp::Or(l, r) => BExp::or(b(l), b(r)),
            BExp::And(l, r) => BExp::and(b(l), b(r)),
            BExp::Not(a) => BExp::not(b(a)),
            other => other.clone(),
        }
    }
    match &e.kind {
        ExpKind::Assert(x) => Exp::assert(b(x)),
        ExpKind::Act(p) => Exp::act(num(p.as_str())),
        ExpKind::Seq(v) => Exp::seq(v.iter().map(renumber).collect()),
        ExpKind::If(x, t, f) => Exp::if_(b(x), renumber(t), renumber(f)),
        ExpKind::While(x, body) => Exp::while_(b(x), renumber(body)),
        _ => e.clone(),
    }
}

fn lift_c(body: &str) -> Exp {
    let src = format!("void f(void) {{ int x; {body} }}");
    let f = parse_function(&src, "f").unwrap_or_else(|e| panic!("{e}\n{src}"));
    lift_to_exp(&f, Some("x"), None).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

#[test]
fn emitted_programs_lift_to_equivalent_programs() {
    for seed in 0..200 {
        let e = renumber(&random_program(seed, Limits::default()));
        let lifted = lift_c(&emit(&e));
        let report = equiv(&e, &lifted).unwrap();
        assert!(report.verdict, "seed {seed}: {e}\nvs {lifted}");
    }
}

/// Whether `break` occurs outside every loop of `e`.
fn has_top_level_break(e: &Exp) -> bool {
    match &e.kind {
        ExpKind::Break => true,
        ExpKind::Seq(v) => v.iter().any(has_top_level_break),
        ExpKind::If(_, t, f) => has_top_level_break(t) || has_top_level_break(f),
        _ => false,
    }
}

/// `while c { body }` unrolled `depth` times; the innermost copy rejects
/// whenever another iteration would start. A trace with `k` actions takes
/// at most `k + 1` productive iterations, each preceded by fewer than `|I|`
/// action-free ones, so `(k + 1)(|I| + 1) + 1` copies are exact up to `k`.
fn unroll(c: &BExp, body: &Exp, depth: usize) -> Exp {
    if depth == 0 {
        return Exp::assert(BExp::not(c.clone()));
    }
    Exp::if_(c.clone(), Exp::seq2(body.clone(), unroll(c, body, depth - 1)), Exp::skip())
}

const BOUND: usize = 3;

fn guards() -> Vec<BExp> {
    vec![
        BExp::prim("0"),
        BExp::not(BExp::prim("1")),
        BExp::ind_eq(1),
        BExp::and(BExp::prim("0"), BExp::not(BExp::ind_eq(0))),
        BExp::or(BExp::prim("1"), BExp::ind_eq(2)),
        BExp::True,
    ]
}

fn loop_bodies() -> impl Iterator<Item = (u64, Exp)> {
    let limits = Limits { max_nodes: 8, n_labels: 0, ..Limits::default() };
    (0..400u64)
        .map(move |seed| (seed, renumber(&random_program(seed, limits))))
        .filter(|(_, e)| !has_top_level_break(e))
        .take(60)
}

fn assert_same_traces(lifted: &Exp, reference: &Exp, what: &str) {
    let a = collect_alphabets(lifted, reference);
    let got = trace_languages(lifted, &a, BOUND).unwrap();
    let want = trace_languages(reference, &a, BOUND).unwrap();
    assert_eq!(got, want, "{what}");
}

#[test]
fn do_while_normalization_matches_unrolling() {
    let guards = guards();
    let mut checked = 0;
    for (seed, body) in loop_bodies() {
        let c = &guards[seed as usize % guards.len()];
        let lifted = lift_c(&format!("do {{ {} }} while ({});", emit(&body), emit_b(c)));
        let n_ind = collect_alphabets(&lifted, &lifted).n_indicators();
        let reference = Exp::seq2(body.clone(), unroll(c, &body, (BOUND + 1) * (n_ind + 1) + 1));
        assert_same_traces(&lifted, &reference, &format!("do-while, seed {seed}"));
        checked += 1;
    }
    assert_eq!(checked, 60);
}

#[test]
fn for_normalization_matches_unrolling() {
    let guards = guards();
    let mut checked = 0;
    for (seed, body) in loop_bodies() {
        let c = &guards[(seed as usize + 1) % guards.len()];
        let lifted = lift_c(&format!("for (pact(7); {}; pact(8)) {{ {} }}", emit_b(c), emit(&body)));
        let n_ind = collect_alphabets(&lifted, &lifted).n_indicators();
        let step_body = Exp::seq2(body.clone(), Exp::act("8"));
        let reference = Exp::seq2(Exp::act("7"), unroll(c, &step_body, (BOUND + 1) * (n_ind + 1) + 1));
        assert_same_traces(&lifted, &reference, &format!("for, seed {seed}"));
        checked += 1;
    }
    assert_eq!(checked, 60);
}

#[test]
fn infinite_for_without_condition() {
    let lifted = lift_c("for (;;) { pact(1); if (pbool(2)) break; }");
    let expected = Exp::while_(BExp::True, Exp::seq2(Exp::act("1"), Exp::if_(BExp::prim("2"), Exp::brk(), Exp::skip())));
    assert!(equiv(&lifted, &expected).unwrap().verdict);
}

#[test]
fn indicator_choice_named_and_disabled() {
    let src = "void f() { int a = 0, b = 0; a = 1; b = 2; if (a == 1 && b == 2) pact(1); }";
    let f = parse_function(src, "f").unwrap();
    assert_eq!(IndicatorChoice::Auto.resolve(&f).unwrap().as_deref(), Some("a"));
    assert_eq!(IndicatorChoice::Named("b".into()).resolve(&f).unwrap().as_deref(), Some("b"));
    assert_eq!(IndicatorChoice::Disabled.resolve(&f).unwrap(), None);
    assert!(IndicatorChoice::Named("c".into()).resolve(&f).is_err());
}
