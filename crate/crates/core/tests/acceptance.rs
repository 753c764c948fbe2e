//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the verdict lines always reach the
//! test log. Exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use cfgkat::automata::{iterated_start, Dynamics, Entry, GkatTransition};
use cfgkat::boolean::{denote, Atom};
use cfgkat::driver::{
    equiv, equiv_in, lower_program, random_program, rewrite, single_loop_normal_form, with_extra_indicator,
    EquivOptions, EquivalenceReport, Limits,
};
use cfgkat::frontend::{lift_pair, lift_source, parse_function, IndicatorChoice};
use cfgkat::gkat::enumerate_language;
use cfgkat::oracle::{resolve, seq_families, trace_languages, EntryPoint, IndexedFamily, LabeledFamily, LanguageC};
use cfgkat::syntax::{collect_alphabets, Action, Alphabets, BExp, Exp, Indicator, Label, Test};
use cfgkat::thompson::thompson;
use cfgkat::word::{Continuation, GuardedWord};

// Thresholds, pinned.
const PAIR_LIMIT: Duration = Duration::from_secs(1);
const ORACLE_PROGRAMS: u64 = 500;
const ORACLE_BOUND: usize = 6;
const ORACLE_LIMIT: Duration = Duration::from_secs(60);
const METAMORPHIC_PAIRS: usize = 500;
const FRESH_PROGRAMS: usize = 100;
const CHAIN_SHORT: usize = 10_000;
const CHAIN_LONG: usize = 20_000;
const CHAIN_LIMIT: Duration = Duration::from_secs(5);
const CHAIN_RATIO: f64 = 3.0;
const ROUND_TRIPS: u64 = 100;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Lifts the function `name` of two fixture files, as the CLI does.
fn lift_fixtures(a: &str, b: &str, name: &str, blind: bool) -> (Exp, Exp) {
    let fa = parse_function(&fixture(a), name).unwrap();
    let fb = parse_function(&fixture(b), name).unwrap();
    let (la, lb, _) = lift_pair(&fa, &fb, &IndicatorChoice::Auto, blind).unwrap();
    (la.exp, lb.exp)
}

fn c1_intro_trio() -> Outcome {
    let load = |f: &str| lift_source(&fixture(f), "two_state", &IndicatorChoice::Auto).unwrap().exp;
    let progs = [load("prog1.c"), load("prog2.c"), load("prog3.c")];
    let mut notes = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let (r, t) = timed(|| equiv(&progs[i], &progs[j]).unwrap());
        ensure(r.verdict, || format!("prog{} vs prog{}: inequivalent", i + 1, j + 1))?;
        ensure(t < PAIR_LIMIT, || format!("prog{} vs prog{}: {t:?}", i + 1, j + 1))?;
        notes.push(format!("{}-{} {:.1?}", i + 1, j + 1, t));
    }
    Ok(notes.join(", "))
}

fn c2_factoring() -> Outcome {
    let (e, f) = lift_fixtures("factor_inside.c", "factor_outside.c", "factor", false);
    let (r, t) = timed(|| equiv(&e, &f).unwrap());
    ensure(r.verdict, || "inequivalent".into())?;
    ensure(t < PAIR_LIMIT, || format!("{t:?}"))?;
    Ok(format!("{t:.1?}"))
}

fn c3_separation() -> Outcome {
    let r = equiv(&Exp::assign(1), &Exp::assert(BExp::True)).unwrap();
    ensure(r.verdict, || "x:=1 vs assert true: inequivalent".into())?;
    let e = Exp::seq2(Exp::assign(1), Exp::assert(BExp::ind_eq(1)));
    let f = Exp::seq2(Exp::assign(0), Exp::assert(BExp::ind_eq(1)));
    let r = equiv(&e, &f).unwrap();
    ensure(!r.verdict, || "assert after different assignments: equivalent".into())?;
    let cex = r.per_indicator.values().find_map(|v| v.counterexample.as_ref()).ok_or("no counterexample")?;
    Ok(format!("counterexample: {}", cex.description))
}

// Worked-example goldens. Atoms are numbered by the bit pattern of true
// tests; indicator values and labels by their position.

fn w(first: u32, steps: &[(u32, u32)]) -> GuardedWord {
    GuardedWord::from_steps(Atom(first), steps.iter().map(|&(p, a)| (p, Atom(a))))
}

fn lang(items: Vec<(GuardedWord, Continuation)>) -> LanguageC {
    items.into_iter().collect()
}

fn golden_sequencing() -> Result<(), String> {
    let (alpha, beta, gamma) = (0, 1, 2);
    let (p, q, r) = (0, 1, 2);
    let g = IndexedFamily(vec![
        lang(vec![(w(alpha, &[(p, beta)]), Continuation::Break(0)), (w(beta, &[(p, alpha)]), Continuation::Accept(1))]),
        lang(vec![(w(alpha, &[(q, beta)]), Continuation::Accept(0))]),
    ]);
    let h = IndexedFamily(vec![
        lang(vec![(w(gamma, &[(q, beta)]), Continuation::Return)]),
        lang(vec![(w(alpha, &[(r, beta)]), Continuation::Jump(0, 0))]),
    ]);
    let gh = seq_families(&g, &h, 10);
    let want1 = lang(vec![
        (w(alpha, &[(p, beta)]), Continuation::Break(0)),
        (w(beta, &[(p, alpha), (r, beta)]), Continuation::Jump(0, 0)),
    ]);
    ensure(gh.0[0] == want1, || format!("sequencing, indicator 1: {:?}", gh.0[0]))?;
    ensure(gh.0[1].is_empty(), || format!("sequencing, indicator 2: {:?}", gh.0[1]))
}

fn flattening_family(l2_row2_target: u32) -> LabeledFamily {
    let (alpha, beta) = (0, 1);
    let (p, q, r) = (0, 1, 2);
    let (l, l2) = (0, 1);
    LabeledFamily {
        start: IndexedFamily(vec![lang(vec![(w(alpha, &[]), Continuation::Jump(l, 0))]), LanguageC::new()]),
        labels: vec![
            IndexedFamily(vec![
                lang(vec![(w(alpha, &[(p, alpha)]), Continuation::Jump(l2, 0)), (w(beta, &[]), Continuation::Accept(0))]),
                lang(vec![(w(alpha, &[]), Continuation::Jump(l2, 1))]),
            ]),
            IndexedFamily(vec![
                lang(vec![
                    (w(alpha, &[(q, alpha)]), Continuation::Jump(l, 0)),
                    (w(alpha, &[(r, beta)]), Continuation::Jump(l, 0)),
                ]),
                lang(vec![(w(alpha, &[]), Continuation::Jump(l, l2_row2_target))]),
            ]),
        ],
    }
}

/// Returns a note on the printed family, whose `G_2^{ℓ'}` jumps back to
/// indicator 1 and therefore reaches acceptance.
fn golden_flattening() -> Result<String, String> {
    let (p, q, r) = (0, 1, 2);
    let target = w(0, &[(p, 0), (q, 0), (p, 0), (r, 1)]);
    let printed = resolve(&flattening_family(0), 8);
    ensure(printed.get(EntryPoint::Start, 0).contains(&target), || "αpαqαpαrβ missing from G↓♯₁".into())?;
    let intended = resolve(&flattening_family(1), 8);
    ensure(intended.get(EntryPoint::Start, 0).contains(&target), || "αpαqαpαrβ missing (jmp(ℓ,2) reading)".into())?;
    ensure(intended.get(EntryPoint::Label(0), 1).is_empty(), || "G↓ℓ₂ not empty with jmp(ℓ,2)".into())?;
    let printed_l2 = printed.get(EntryPoint::Label(0), 1);
    Ok(format!(
        "G↓ℓ₂ empty under the jmp(ℓ,2) reading; as printed (jmp(ℓ,1)) it holds {} words",
        printed_l2.len()
    ))
}

/// `if t ∧ x=1 then { x:=2; ℓ:; p } else { x:=1; goto ℓ }` over I = {1, 2}.
fn jump_example() -> (Exp, Alphabets) {
    let e = Exp::if_(
        BExp::and(BExp::prim("t"), BExp::ind_eq(1)),
        Exp::seq(vec![Exp::assign(2), Exp::label("l"), Exp::act("p")]),
        Exp::seq2(Exp::assign(1), Exp::goto("l")),
    );
    let a = Alphabets::new([Action::new("p")], [Test::new("t")], [Label::new("l")], [1, 2].map(Indicator::Value));
    (e, a)
}

fn golden_automaton_semantics() -> Result<(), String> {
    let (e, a) = jump_example();
    let aut = thompson(&e, &a).map_err(|e| e.to_string())?.add_start_state();
    let (none, t) = (0, 1);
    let p = 0;
    let jmp = Continuation::Jump(0, 0);
    let want1 = lang(vec![
        (w(none, &[]), jmp),
        (w(t, &[(p, none)]), Continuation::Accept(1)),
        (w(t, &[(p, t)]), Continuation::Accept(1)),
    ]);
    let want2 = lang(vec![(w(none, &[]), jmp), (w(t, &[]), jmp)]);
    ensure(aut.cont_language(None, 0, 4) == want1, || "⟦A⟧♯₁ differs".into())?;
    ensure(aut.cont_language(None, 1, 4) == want2, || "⟦A⟧♯₂ differs".into())?;
    for i in 0..2 {
        let want: LanguageC = [none, t]
            .into_iter()
            .flat_map(|x| [none, t].map(|y| (w(x, &[(p, y)]), Continuation::Accept(i))))
            .collect();
        ensure(aut.cont_language(Some(0), i, 4) == want, || format!("⟦A⟧ℓ_{} differs", i + 1))?;
    }
    Ok(())
}

fn golden_iterated_start() -> Result<(), String> {
    let iota = Dynamics::from_fn(3, 1, |i, _| {
        Entry::Cont(match i {
            0 => Continuation::Accept(1),
            1 => Continuation::Break(1),
            _ => Continuation::Accept(2),
        })
    });
    let a = Alphabets::new([], [], [], [0, 1, 2].map(Indicator::Value));
    let b = denote(&BExp::True, &a).map_err(|e| e.to_string())?;
    let r = iterated_start(&iota, &b);
    ensure(r.get(0, Atom(0)) == Entry::Cont(Continuation::Break(1)), || format!("ι(0,∅) = {:?}", r.get(0, Atom(0))))?;
    ensure(r.get(2, Atom(0)) == Entry::Reject, || format!("ι(2,∅) = {:?}", r.get(2, Atom(0))))
}

fn golden_lowering() -> Result<(), String> {
    let (e, a) = jump_example();
    let aut = thompson(&e, &a).map_err(|e| e.to_string())?.add_start_state();
    let g = aut.lower(0, 1);
    // state (s, i) is numbered s·|I| + i; s = 0, ŝ = 1
    let (s1, s2, shat1) = (0, 1, 2);
    let (none, t) = (Atom(0), Atom(1));
    ensure(g.start == shat1, || format!("start {}", g.start))?;
    ensure(g.get(shat1, t) == GkatTransition::Step { action: 0, target: s2 }, || "(ŝ,1),{t}".into())?;
    ensure(g.get(shat1, none) == GkatTransition::Step { action: 0, target: s1 }, || "(ŝ,1),∅".into())?;
    for s in [s1, s2] {
        for at in [none, t] {
            ensure(g.get(s, at) == GkatTransition::Accept, || format!("state {s} does not accept"))?;
        }
    }
    Ok(())
}

fn c4_goldens() -> Outcome {
    golden_sequencing().map_err(|e| format!("sequencing: {e}"))?;
    let note = golden_flattening().map_err(|e| format!("flattening: {e}"))?;
    golden_automaton_semantics().map_err(|e| format!("automaton semantics: {e}"))?;
    golden_iterated_start().map_err(|e| format!("iterated start: {e}"))?;
    golden_lowering().map_err(|e| format!("lowering: {e}"))?;
    Ok(format!("5 goldens; {note}"))
}

fn oracle_seeds() -> impl Iterator<Item = u64> {
    10_000..10_000 + ORACLE_PROGRAMS
}

fn c5_oracle() -> Outcome {
    let t = Instant::now();
    let mut checks = 0;
    for seed in oracle_seeds() {
        let e = random_program(seed, Limits::default());
        let a = collect_alphabets(&e, &e);
        let want = trace_languages(&e, &a, ORACLE_BOUND).map_err(|x| format!("seed {seed}: {x}"))?;
        for i in 0..a.n_indicators() as u32 {
            let g = lower_program(&e, &a, i).map_err(|x| format!("seed {seed}: {x}"))?;
            ensure(enumerate_language(&g, ORACLE_BOUND) == want[i as usize], || format!("seed {seed}, i={i}: {e}"))?;
            checks += 1;
        }
    }
    let elapsed = t.elapsed();
    ensure(elapsed < ORACLE_LIMIT, || format!("{elapsed:?}"))?;
    Ok(format!("{ORACLE_PROGRAMS} programs, {checks} indicator checks, {elapsed:.1?}"))
}

fn c6_state_bound() -> Outcome {
    for seed in oracle_seeds() {
        let e = random_program(seed, Limits::default());
        let n = thompson(&e, &collect_alphabets(&e, &e)).map_err(|x| x.to_string())?.n_states();
        ensure(n == e.action_count() && n <= e.size(), || {
            format!("seed {seed}: {n} states, {} actions, size {}", e.action_count(), e.size())
        })?;
    }
    Ok(format!("{ORACLE_PROGRAMS} programs"))
}

/// Pairs for the metamorphic suite: rewritten copies (expected
/// equivalent) and unrelated programs whose bounded languages differ
/// (expected inequivalent).
struct Suite {
    rewrites: Vec<(Exp, Exp)>,
    different: Vec<(Exp, Exp)>,
}

fn metamorphic_suite() -> Suite {
    let mut rewrites = Vec::new();
    let mut seed = 20_000;
    while rewrites.len() < METAMORPHIC_PAIRS {
        let e = random_program(seed, Limits::default());
        let (r, applied) = rewrite(&e, seed, 3);
        if !applied.is_empty() {
            rewrites.push((e, r));
        }
        seed += 1;
    }
    let mut different = Vec::new();
    let mut seed = 30_000;
    while different.len() < METAMORPHIC_PAIRS {
        let (e, f) = (random_program(seed, Limits::default()), random_program(seed + 1, Limits::default()));
        seed += 2;
        let a = collect_alphabets(&e, &f);
        if trace_languages(&e, &a, ORACLE_BOUND).unwrap() != trace_languages(&f, &a, ORACLE_BOUND).unwrap() {
            different.push((e, f));
        }
    }
    Suite { rewrites, different }
}

fn c7_metamorphic(suite: &Suite) -> Outcome {
    for (e, f) in &suite.rewrites {
        ensure(equiv(e, f).unwrap().verdict, || format!("rewrite judged inequivalent: {e} vs {f}"))?;
    }
    for (e, f) in &suite.different {
        ensure(!equiv(e, f).unwrap().verdict, || format!("different pair judged equivalent: {e} vs {f}"))?;
    }
    Ok(format!("{} rewrites equivalent, {} differing pairs inequivalent", suite.rewrites.len(), suite.different.len()))
}

fn unused_value(a: &Alphabets) -> i64 {
    let max = a.indicators.iter().filter_map(|i| if let Indicator::Value(v) = i { Some(*v) } else { None }).max();
    max.unwrap_or(0) + 1
}

fn c8_fresh_indicator(suite: &Suite) -> Outcome {
    let pairs = suite.rewrites.iter().take(FRESH_PROGRAMS / 2).chain(suite.different.iter().take(FRESH_PROGRAMS / 2));
    let mut n = 0;
    for (e, f) in pairs {
        let a = collect_alphabets(e, f);
        let before: EquivalenceReport = equiv_in(e, f, &a, &EquivOptions::default()).unwrap();
        let wider = with_extra_indicator(&a, Indicator::Value(unused_value(&a)));
        let after = equiv_in(e, f, &wider, &EquivOptions::default()).unwrap();
        ensure(before.verdict == after.verdict, || format!("verdict changed: {e} vs {f}"))?;
        for (k, v) in &before.per_indicator {
            ensure(after.per_indicator[k].equivalent == v.equivalent, || format!("indicator {k} changed: {e} vs {f}"))?;
        }
        n += 1;
    }
    ensure(n == FRESH_PROGRAMS, || format!("only {n} pairs"))?;
    Ok(format!("{n} pairs"))
}

struct ChainRun {
    elapsed: Duration,
    unions: usize,
    states: usize,
}

fn chain(n: usize) -> Result<ChainRun, String> {
    let src: String = std::iter::once("void chain(void) {\n".to_string())
        .chain((0..n).map(|k| format!("  pact({k});\n")))
        .chain(std::iter::once("}\n".to_string()))
        .collect();
    let e = lift_source(&src, "chain", &IndicatorChoice::Auto).map_err(|x| x.to_string())?.exp;
    let base = collect_alphabets(&e, &e);
    // one primitive test, unused by the chain
    let a = Alphabets::new(base.actions.iter().cloned(), [Test::new("t")], [], [Indicator::Fresh]);
    let opts = EquivOptions { parallel: false, ..EquivOptions::default() };
    let mut runs = Vec::new();
    for _ in 0..5 {
        let (r, t) = timed(|| equiv_in(&e, &e, &a, &opts).unwrap());
        ensure(r.verdict, || "chain not equivalent to itself".into())?;
        let v = &r.per_indicator["*"];
        let states = r.state_counts.checked["*"].iter().sum();
        runs.push(ChainRun { elapsed: t, unions: v.unions, states });
    }
    runs.sort_by_key(|r| r.elapsed);
    Ok(runs.swap_remove(2))
}

fn c9_c12_scaling() -> (Outcome, Outcome) {
    let (short, long) = match (chain(CHAIN_SHORT), chain(CHAIN_LONG)) {
        (Ok(s), Ok(l)) => (s, l),
        (Err(e), _) | (_, Err(e)) => return (Err(e.clone()), Err(e)),
    };
    let ratio = long.elapsed.as_secs_f64() / short.elapsed.as_secs_f64().max(1e-9);
    let c9 = if short.elapsed < CHAIN_LIMIT && ratio <= CHAIN_RATIO {
        Ok(format!("{CHAIN_SHORT}: {:.1?}, {CHAIN_LONG}: {:.1?}, ratio {ratio:.2}", short.elapsed, long.elapsed))
    } else {
        Err(format!("{CHAIN_SHORT}: {:?}, {CHAIN_LONG}: {:?}, ratio {ratio:.2}", short.elapsed, long.elapsed))
    };
    let c12 = [&short, &long]
        .iter()
        .map(|r| {
            let msg = format!("{} unions, {} states", r.unions, r.states);
            if r.unions <= r.states {
                Ok(msg)
            } else {
                Err(msg)
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(|v| v.join("; "));
    (c9, c12)
}

fn c10_case_studies() -> Outcome {
    let name = "mp_factor_using_pollard_rho";
    let mut notes = Vec::new();
    for (other, mutant) in [("fig3a_ghidra.c", "fig3a_ghidra_mutant.c"), ("fig3b_calipso.c", "fig3b_calipso_mutant.c")] {
        let (e, f) = lift_fixtures("fig2b_blinded.c", other, name, false);
        let (r, t) = timed(|| equiv(&e, &f).unwrap());
        ensure(r.verdict, || format!("{other}: inequivalent"))?;
        ensure(t < PAIR_LIMIT, || format!("{other}: {t:?}"))?;
        let (e, g) = lift_fixtures("fig2b_blinded.c", mutant, name, false);
        ensure(!equiv(&e, &g).unwrap().verdict, || format!("{mutant}: equivalent"))?;
        notes.push(format!("{other} {t:.1?}"));
    }
    Ok(notes.join(", ") + "; mutants inequivalent")
}

fn c11_round_trip() -> Outcome {
    for seed in 40_000..40_000 + ROUND_TRIPS {
        let e = random_program(seed, Limits::default());
        let a = collect_alphabets(&e, &e);
        let fresh = a.fresh_index().ok_or("no fresh indicator")?;
        let g = lower_program(&e, &a, fresh).map_err(|x| x.to_string())?;
        let nf = single_loop_normal_form(&g, &a);
        let r = equiv(&e, &nf).map_err(|x| format!("seed {seed}: {x}"))?;
        ensure(r.per_indicator["*"].equivalent, || format!("seed {seed}: {e}"))?;
    }
    Ok(format!("{ROUND_TRIPS} programs"))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    }
}

fn main() {
    // `cargo test -- --list` and similar probes pass flags; run only once.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "intro trio equivalent", guarded(c1_intro_trio)),
        (2, "assignment factoring", guarded(c2_factoring)),
        (3, "trace vs continuation", guarded(c3_separation)),
        (4, "worked-example goldens", guarded(c4_goldens)),
        (5, "oracle cross-validation", guarded(c5_oracle)),
        (6, "thompson state bound", guarded(c6_state_bound)),
    ];
    let suite = catch_unwind(metamorphic_suite).ok();
    let need_suite = |f: fn(&Suite) -> Outcome| match &suite {
        Some(s) => guarded(|| f(s)),
        None => Err("suite generation panicked".into()),
    };
    results.push((7, "metamorphic suite", need_suite(c7_metamorphic)));
    results.push((8, "fresh-indicator invariance", need_suite(c8_fresh_indicator)));
    let (c9, c12) = catch_unwind(c9_c12_scaling).unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into())));
    results.push((9, "scaling smoke", c9));
    results.push((10, "case-study fixtures", guarded(c10_case_studies)));
    results.push((11, "single-loop round trip", guarded(c11_round_trip)));
    results.push((12, "union-find accounting", c12));

    let mut failed = BTreeSet::new();
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(detail) => {
                println!("criterion {n:>2} FAIL  {name}: {detail}");
                failed.insert(*n);
            }
        }
    }
    println!("{} of {} criteria pass", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
