//! The `cfgkat` command line.
//!
//! Exit codes are the same in every output format: 0 means equivalent
//! (or valid), 1 inequivalent (or a cross-check mismatch), 2 a usage,
//! parse or validity error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::automata::GkatTransition;
use crate::driver::{equiv_with, lower_program, EquivOptions, EquivalenceReport, DEFAULT_MAX_TESTS};
use crate::frontend::{
    analyze_indicator,
    blind::{blind_function, table_for}, lift_to_exp, parse_file, BlindingTable, FrontendError, IndicatorAnalysis,
    IndicatorChoice, SourceFile, SourceFunction,
};
use crate::gkat::enumerate_language;
use crate::oracle::trace_languages;
use crate::syntax::{collect_alphabets, validate, Alphabets, Exp, ValidationReport};
use crate::thompson::thompson;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIFFERENT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cfgkat", version, about = "Trace equivalence for programs with goto, break, return and an indicator variable")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that functions paired by name in two files are trace equivalent.
    Equiv(EquivArgs),
    /// Parse and validate a file; report indicators and alphabets.
    Check(CheckArgs),
    /// Write Graphviz files for the automata of each function.
    Dot(DotArgs),
    /// Compare the automaton pipeline against the brute-force semantics.
    Crosscheck(CrosscheckArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Only consider the function with this name.
    #[arg(long = "fn", value_name = "NAME")]
    pub function: Option<String>,
    /// Use this variable as the indicator instead of detecting one.
    #[arg(long, value_name = "NAME", conflicts_with = "no_indicator")]
    pub indicator: Option<String>,
    /// Do not treat any variable as the indicator.
    #[arg(long)]
    pub no_indicator: bool,
    /// Replace statements and conditions outside the subset by fresh pact/pbool calls.
    #[arg(long)]
    pub auto_blind: bool,
    /// Largest number of primitive tests accepted (there are 2^n atoms).
    #[arg(long, value_name = "N", default_value_t = DEFAULT_MAX_TESTS)]
    pub max_tests: usize,
}

impl Common {
    fn choice(&self) -> IndicatorChoice {
        match (&self.indicator, self.no_indicator) {
            (Some(n), _) => IndicatorChoice::Named(n.clone()),
            (None, true) => IndicatorChoice::Disabled,
            (None, false) => IndicatorChoice::Auto,
        }
    }
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    pub left: PathBuf,
    pub right: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Print the reports as JSON.
    #[arg(long)]
    pub json: bool,
    /// Check the starting indicator values one after another.
    #[arg(long)]
    pub sequential: bool,
    /// Also compare the programs when started from each label.
    #[arg(long, hide = true)]
    pub compare_labels: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DotArgs {
    pub file: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CrosscheckArgs {
    pub file: PathBuf,
    /// Largest number of actions in compared traces.
    #[arg(long, value_name = "N")]
    pub bound: usize,
    #[command(flatten)]
    pub common: Common,
    /// Corrupt the lowered automata first (negative control).
    #[arg(long, hide = true)]
    pub mutate: bool,
}

/// Per-function result of `equiv --json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionResult {
    /// Indicator variable of the left and right function.
    pub indicators: [Option<String>; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blinding: Option<BlindingTable>,
    pub report: EquivalenceReport,
}

/// Output of `equiv --json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivOutput {
    pub verdict: bool,
    pub functions: IndexMap<String, FunctionResult>,
    /// Functions present in only one file.
    pub unpaired: Vec<String>,
}

#[derive(Serialize)]
#[allow(clippy::large_enum_variant)]
#[serde(untagged)]
enum CheckResult {
    Lifted { indicator: IndicatorAnalysis, valid: bool, validation: ValidationReport, alphabets: Alphabets },
    Error { indicator: IndicatorAnalysis, error: String },
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Equiv(a) => cmd_equiv(a, out, err),
        Command::Check(a) => cmd_check(a, out),
        Command::Dot(a) => cmd_dot(a, out),
        Command::Crosscheck(a) => cmd_crosscheck(a, out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}

type CmdResult = Result<i32, String>;

fn io(e: std::io::Error) -> String {
    e.to_string()
}

fn at(path: &Path, e: impl std::fmt::Display) -> String {
    let msg = e.to_string();
    if msg.starts_with(|c: char| c.is_ascii_digit()) {
        format!("{}:{msg}", path.display())
    } else {
        format!("{}: {msg}", path.display())
    }
}

fn frontend_at(path: &Path, e: FrontendError) -> String {
    at(path, e)
}

fn load(path: &Path) -> Result<SourceFile, String> {
    let src = fs::read_to_string(path).map_err(|e| at(path, e))?;
    parse_file(&src).map_err(|e| frontend_at(path, e))
}

fn selected<'a>(file: &'a SourceFile, filter: &Option<String>, path: &Path) -> Result<Vec<&'a SourceFunction>, String> {
    let fns: Vec<_> = file.functions.iter().filter(|f| filter.as_ref().is_none_or(|n| &f.name == n)).collect();
    if fns.is_empty() {
        return Err(match filter {
            Some(n) => at(path, FrontendError::FunctionNotFound { name: n.clone() }),
            None => at(path, "no function definitions"),
        });
    }
    Ok(fns)
}

/// Lifts one function, blinding it against `table` if given.
fn lift_one(
    f: &SourceFunction,
    path: &Path,
    choice: &IndicatorChoice,
    table: Option<&mut BlindingTable>,
) -> Result<(Exp, Option<String>), String> {
    let ind = choice.resolve(f).map_err(|e| at(path, e))?;
    let exp = match table {
        Some(t) => {
            let blinded = blind_function(f, ind.as_deref(), t);
            lift_to_exp(&blinded, ind.as_deref(), None)
        }
        None => lift_to_exp(f, ind.as_deref(), None),
    }
    .map_err(|e| frontend_at(path, e))?;
    Ok((exp, ind))
}

fn validated(e: &Exp, path: &Path) -> Result<(), String> {
    let report = validate(e);
    if report.is_valid() {
        Ok(())
    } else {
        Err(report.violations.iter().map(|v| at(path, v)).collect::<Vec<_>>().join("\n"))
    }
}

fn cmd_equiv(a: &EquivArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let (fa, fb) = (load(&a.left)?, load(&a.right)?);
    let choice = a.common.choice();
    let left = selected(&fa, &a.common.function, &a.left)?;
    let mut unpaired = Vec::new();
    let mut pairs = Vec::new();
    for f in &left {
        match fb.functions.iter().find(|g| g.name == f.name) {
            Some(g) => pairs.push((*f, g)),
            None => unpaired.push(f.name.clone()),
        }
    }
    for g in &fb.functions {
        if a.common.function.as_ref().is_none_or(|n| &g.name == n) && !fa.functions.iter().any(|f| f.name == g.name) {
            unpaired.push(g.name.clone());
        }
    }
    for name in &unpaired {
        writeln!(err, "warning: `{name}` is defined in only one file; skipped").map_err(io)?;
    }
    if pairs.is_empty() {
        return Err("no function is defined in both files".into());
    }
    let options = EquivOptions {
        parallel: !a.sequential,
        max_tests: a.common.max_tests,
        compare_labels: a.compare_labels,
        ..Default::default()
    };
    let mut results = IndexMap::new();
    for (f, g) in pairs {
        let (l, r, table) = if a.common.auto_blind {
            let mut t = table_for(&[f, g]);
            let l = lift_one(f, &a.left, &choice, Some(&mut t))?;
            let r = lift_one(g, &a.right, &choice, Some(&mut t))?;
            (l, r, Some(t))
        } else {
            (lift_one(f, &a.left, &choice, None)?, lift_one(g, &a.right, &choice, None)?, None)
        };
        validated(&l.0, &a.left)?;
        validated(&r.0, &a.right)?;
        let alphabets = collect_alphabets(&l.0, &r.0);
        let n_tests = alphabets.tests.len();
        let note = format!(
            "{}: |T| = {n_tests} ({} atoms), |I| = {}",
            f.name,
            1u128 << n_tests.min(127),
            alphabets.n_indicators()
        );
        if a.json {
            writeln!(err, "{note}").map_err(io)?;
        } else {
            writeln!(out, "{note}").map_err(io)?;
        }
        let report = equiv_with(&l.0, &r.0, &options).map_err(|e| format!("{}: {e}", f.name))?;
        if !a.json {
            print_verdict(out, &f.name, &report).map_err(io)?;
        }
        results.insert(f.name.clone(), FunctionResult { indicators: [l.1, r.1], blinding: table, report });
    }
    let verdict = results.values().all(|r| r.report.verdict);
    if a.json {
        let o = EquivOutput { verdict, functions: results, unpaired };
        writeln!(out, "{}", serde_json::to_string_pretty(&o).map_err(|e| e.to_string())?).map_err(io)?;
    }
    Ok(if verdict { EXIT_OK } else { EXIT_DIFFERENT })
}

fn print_verdict(out: &mut dyn Write, name: &str, r: &EquivalenceReport) -> std::io::Result<()> {
    if r.verdict {
        return writeln!(out, "{name}: equivalent");
    }
    writeln!(out, "{name}: inequivalent")?;
    for (i, v) in &r.per_indicator {
        if let Some(c) = &v.counterexample {
            writeln!(out, "  starting with x = {i}: {}", c.describe(&r.alphabets))?;
        }
    }
    if let Some(labels) = &r.per_label {
        for (l, v) in labels {
            if let Some(c) = &v.counterexample {
                writeln!(out, "  starting at {l}: {}", c.describe(&r.alphabets))?;
            }
        }
    }
    Ok(())
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if v.is_empty() {
        "(none)".into()
    } else {
        v.join(", ")
    }
}

struct FileFunction {
    name: String,
    analysis: IndicatorAnalysis,
    exp: Result<Exp, String>,
}

/// Lifts every selected function of a single file. Lifting errors are
/// kept per function.
fn lift_file(path: &Path, common: &Common) -> Result<Vec<FileFunction>, String> {
    let file = load(path)?;
    let choice = common.choice();
    let fns = selected(&file, &common.function, path)?;
    let mut table = common.auto_blind.then(|| table_for(&fns));
    Ok(fns
        .into_iter()
        .map(|f| {
            let mut analysis = analyze_indicator(f);
            let exp = lift_one(f, path, &choice, table.as_mut()).map(|(e, ind)| {
                analysis.chosen = ind;
                e
            });
            FileFunction { name: f.name.clone(), analysis, exp }
        })
        .collect())
}

/// Like [`lift_file`], failing on the first function that does not lift.
fn lift_file_strict(path: &Path, common: &Common) -> Result<Vec<(String, Exp)>, String> {
    lift_file(path, common)?.into_iter().map(|f| Ok((f.name, f.exp?))).collect()
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> CmdResult {
    let mut all_valid = true;
    let mut results = IndexMap::new();
    for FileFunction { name, analysis, exp } in lift_file(&a.file, &a.common)? {
        if !a.json {
            writeln!(out, "function {name}").map_err(io)?;
            match &analysis.chosen {
                Some(x) => writeln!(out, "  indicator: {x}"),
                None => writeln!(out, "  indicator: (none)"),
            }
            .map_err(io)?;
            for c in analysis.candidates.iter().filter(|c| Some(&c.name) != analysis.chosen.as_ref()) {
                writeln!(out, "  rejected: {} ({})", c.name, c.reason.as_deref().unwrap_or("not chosen")).map_err(io)?;
            }
        }
        let e = match exp {
            Ok(e) => e,
            Err(msg) => {
                all_valid = false;
                if a.json {
                    results.insert(name, CheckResult::Error { indicator: analysis, error: msg });
                } else {
                    writeln!(out, "  error: {msg}").map_err(io)?;
                }
                continue;
            }
        };
        let validation = validate(&e);
        let alphabets = collect_alphabets(&e, &e);
        all_valid &= validation.is_valid();
        if !a.json {
            if validation.is_valid() {
                writeln!(out, "  valid").map_err(io)?;
            } else {
                for v in &validation.violations {
                    writeln!(out, "  invalid: {}", at(&a.file, v)).map_err(io)?;
                }
            }
            writeln!(out, "  actions: {}", join(&alphabets.actions)).map_err(io)?;
            writeln!(out, "  tests: {}", join(&alphabets.tests)).map_err(io)?;
            writeln!(out, "  labels: {}", join(&alphabets.labels)).map_err(io)?;
            writeln!(out, "  indicators: {}", join(&alphabets.indicators)).map_err(io)?;
        }
        results.insert(
            name,
            CheckResult::Lifted { indicator: analysis, valid: validation.is_valid(), validation, alphabets },
        );
    }
    if a.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&results).map_err(|e| e.to_string())?).map_err(io)?;
    }
    Ok(if all_valid { EXIT_OK } else { EXIT_ERROR })
}

fn checked_alphabets(e: &Exp, path: &Path, max_tests: usize) -> Result<Alphabets, String> {
    validated(e, path)?;
    let a = collect_alphabets(e, e);
    if a.tests.len() > max_tests {
        let n = a.tests.len();
        return Err(at(path, Error::TooManyTests { count: n, max: max_tests, atoms: 1u128 << n.min(127) }));
    }
    Ok(a)
}

fn cmd_dot(a: &DotArgs, out: &mut dyn Write) -> CmdResult {
    let fns = lift_file_strict(&a.file, &a.common)?;
    fs::create_dir_all(&a.out).map_err(|e| at(&a.out, e))?;
    for (name, e) in fns {
        let alphabets = checked_alphabets(&e, &a.file, a.common.max_tests)?;
        let cf = thompson(&e, &alphabets).map_err(|e| e.to_string())?.add_start_state();
        let mut written = vec![a.out.join(format!("{name}.dot"))];
        fs::write(&written[0], cf.to_dot(&alphabets, &name)).map_err(|e| at(&written[0], e))?;
        for k in 0..alphabets.n_indicators() as u32 {
            let g = cf.lower(k, alphabets.actions.len()).prune_unreachable();
            let path = a.out.join(format!("{name}.i{k}.dot"));
            fs::write(&path, g.to_dot(&alphabets, &format!("{name} from x = {}", alphabets.indicator(k))))
                .map_err(|e| at(&path, e))?;
            written.push(path);
        }
        for p in written {
            writeln!(out, "wrote {}", p.display()).map_err(io)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_crosscheck(a: &CrosscheckArgs, out: &mut dyn Write) -> CmdResult {
    let fns = lift_file_strict(&a.file, &a.common)?;
    let mut ok = true;
    for (name, e) in fns {
        let alphabets = checked_alphabets(&e, &a.file, a.common.max_tests)?;
        let expected = trace_languages(&e, &alphabets, a.bound).map_err(|e| e.to_string())?;
        for (k, want) in expected.iter().enumerate() {
            let mut g = lower_program(&e, &alphabets, k as u32).map_err(|e| e.to_string())?;
            if a.mutate {
                let atom = crate::boolean::Atom(0);
                let flipped = match g.get(g.start, atom) {
                    GkatTransition::Accept => GkatTransition::Reject,
                    _ => GkatTransition::Accept,
                };
                g.set(g.start, atom, flipped);
            }
            let got = enumerate_language(&g, a.bound);
            let ind = alphabets.indicator(k as u32);
            if &got == want {
                writeln!(out, "{name} from x = {ind}: {} traces agree", got.len()).map_err(io)?;
                continue;
            }
            ok = false;
            let only_got = got.difference(want).next();
            let only_want = want.difference(&got).next();
            let (word, side) = match (only_got, only_want) {
                (Some(w), Some(v)) if v < w => (v, "the semantics"),
                (Some(w), _) => (w, "the automaton"),
                (None, Some(v)) => (v, "the semantics"),
                (None, None) => unreachable!("languages differ"),
            };
            writeln!(out, "{name} from x = {ind}: mismatch; `{}` is produced only by {side}", word.display(&alphabets))
                .map_err(io)?;
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_DIFFERENT })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["cfgkat"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["equiv"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
        let (code, _, err) = run_args(&["check", "/nonexistent/x.c"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.starts_with("error: /nonexistent/x.c"));
    }

    #[test]
    fn indicator_flags_conflict() {
        assert_eq!(run_args(&["check", "x.c", "--indicator", "x", "--no-indicator"]).0, EXIT_ERROR);
    }
}
