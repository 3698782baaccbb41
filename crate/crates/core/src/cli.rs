//! Command line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit code: 0 for satisfiable / holds, 1 for
//! unsatisfiable / violated, 2 for input errors and 3 for resource limits.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::alphabet::{PushdownAlphabet, WordSpec};
use crate::corpus::test_alphabet;
use crate::crosscheck::{cross_check, seeded_corpus, Trees};
use crate::error::{Error, Result};
use crate::formula::{parse_formula_file, FormulaFile};
use crate::pipeline::{self, Answer, Stage, Verdict};
use crate::stacktree::{encode, encode_lasso, render_dot, render_text, stack_tree_recognizer, RegularTree};
use crate::vldl2aja::compile;
use crate::vps::{parse_system, System};

#[derive(Debug, Parser)]
#[command(name = "vldl", version, about = "Satisfiability and model checking for visibly linear dynamic logic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide satisfiability of a formula file.
    Sat(SatArgs),
    /// Check a visibly pushdown system against a formula.
    Mc(McArgs),
    /// Print the stack tree of a word `u (v)^w` or a finite word.
    Encode(EncodeArgs),
    /// Brute-force semantics driver.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Alphabet file, used when the formula file has no `alphabet` block.
    #[arg(short = 'a', long = "alphabet")]
    pub alphabet: Option<PathBuf>,
    /// Print the JSON report instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write intermediate automata to this directory.
    #[arg(long, value_name = "DIR")]
    pub dot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SatArgs {
    pub formula: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Print the model.
    #[arg(long)]
    pub witness: bool,
}

#[derive(Debug, Args)]
pub struct McArgs {
    pub system: PathBuf,
    pub formula: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Print the counterexample.
    #[arg(long)]
    pub cex: bool,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    pub word: String,
    #[arg(short = 'a', long = "alphabet")]
    pub alphabet: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub depth: usize,
    /// Print DOT instead of the indented text form.
    #[arg(long)]
    pub dot: bool,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Compare the brute-force semantics with the compiled automata on the
    /// seeded corpus.
    CrossCheck(CrossCheckArgs),
}

#[derive(Debug, Args)]
pub struct CrossCheckArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Skip the stack-tree path.
    #[arg(long)]
    pub no_trees: bool,
    /// Vertex and summary cap per formula on the stack-tree path.
    #[arg(long, default_value_t = 5_000)]
    pub tree_cap: usize,
    #[arg(long)]
    pub json: bool,
}

/// Machine-readable result of `sat` and `mc`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub verdict: String,
    pub witness: Option<String>,
    pub stages: Vec<Stage>,
    pub millis: f64,
    pub exit_code: i32,
}

impl RunReport {
    fn new(command: &str, alpha: &PushdownAlphabet, v: &Verdict) -> Self {
        RunReport {
            command: command.into(),
            verdict: v.answer.label().into(),
            witness: v.answer.word().map(|w| alpha.fmt_lasso(w)),
            stages: v.stages.clone(),
            millis: v.millis,
            exit_code: if v.answer.is_positive() { 0 } else { 1 },
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Sat(a) => cmd_sat(&a, out),
        Command::Mc(a) => cmd_mc(&a, out),
        Command::Encode(a) => cmd_encode(&a, out),
        Command::Oracle(OracleCommand::CrossCheck(a)) => cmd_cross_check(&a, out),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn load_alphabet(path: Option<&Path>) -> Result<Option<PushdownAlphabet>> {
    path.map(|p| PushdownAlphabet::parse(&read(p)?)).transpose()
}

fn load_formula(path: &Path, alphabet: Option<&Path>) -> Result<(Arc<PushdownAlphabet>, FormulaFile)> {
    let given = load_alphabet(alphabet)?;
    let file = parse_formula_file(&read(path)?, given.as_ref())?;
    let alpha = Arc::new(file.library.alphabet.clone());
    Ok((alpha, file))
}

fn report(out: &mut dyn Write, r: &RunReport, json: bool, show_word: bool) -> Result<()> {
    let text = if json {
        serde_json::to_string_pretty(r).map_err(|e| Error::input(e.to_string()))? + "\n"
    } else {
        let mut s = format!("{}\n", r.verdict);
        if show_word {
            if let Some(w) = &r.witness {
                s += &format!("{w}\n");
            }
        }
        for st in &r.stages {
            s += &format!("  {:<22} {:>8} states {:>10.2} ms\n", st.name, st.size, st.millis);
        }
        s
    };
    out.write_all(text.as_bytes()).map_err(|e| Error::input(e.to_string()))
}

fn dump_witness(dir: &Path, alpha: &PushdownAlphabet, answer: &Answer) -> Result<()> {
    if let Some(w) = answer.word() {
        let t = encode_lasso(alpha, w)?;
        write_file(&dir.join("witness.dot"), &render_dot(alpha, &t, 8)?)?;
    }
    Ok(())
}

fn make_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::input(format!("{}: {e}", dir.display())))
}

pub fn cmd_sat(a: &SatArgs, out: &mut dyn Write) -> Result<i32> {
    let (alpha, file) = load_formula(&a.formula, a.common.alphabet.as_deref())?;
    let v = pipeline::satisfiable(&alpha, &file.formula)?;
    if let Some(dir) = &a.common.dot {
        make_dir(dir)?;
        write_file(&dir.join("aja.txt"), &compile(&alpha, &file.formula)?.dump())?;
        write_file(&dir.join("stacktrees.dot"), &stack_tree_recognizer(&alpha).to_dot(&alpha))?;
        dump_witness(dir, &alpha, &v.answer)?;
    }
    let r = RunReport::new("sat", &alpha, &v);
    report(out, &r, a.common.json, a.witness)?;
    Ok(r.exit_code)
}

pub fn cmd_mc(a: &McArgs, out: &mut dyn Write) -> Result<i32> {
    let (alpha, file) = load_formula(&a.formula, a.common.alphabet.as_deref())?;
    let s = match parse_system(&read(&a.system)?, &alpha, &file.library)? {
        System::Vps(s) => s,
        System::Tvpa(_) => return Err(Error::input("the system has final states or tests; expected a plain pushdown system")),
    };
    let v = pipeline::model_check(&alpha, &s, &file.formula)?;
    if let Some(dir) = &a.common.dot {
        make_dir(dir)?;
        write_file(&dir.join("system.dot"), &pipeline::vps_to_tree(&alpha, &s)?.to_dot(&alpha))?;
        write_file(&dir.join("aja.txt"), &compile(&alpha, &crate::formula::Formula::not(file.formula.clone()))?.dump())?;
        dump_witness(dir, &alpha, &v.answer)?;
    }
    let r = RunReport::new("mc", &alpha, &v);
    report(out, &r, a.common.json, a.cex)?;
    Ok(r.exit_code)
}

pub fn cmd_encode(a: &EncodeArgs, out: &mut dyn Write) -> Result<i32> {
    let alpha = load_alphabet(a.alphabet.as_deref())?.unwrap_or_else(PushdownAlphabet::crl);
    let t = match alpha.parse_word_spec(&a.word)? {
        WordSpec::Lasso(w) => encode_lasso(&alpha, &w)?,
        WordSpec::Finite(w) => RegularTree::from_finite(&encode(&alpha, &w)),
    };
    let text = if a.dot { render_dot(&alpha, &t, a.depth)? } else { render_text(&alpha, &t, a.depth)? };
    out.write_all(text.as_bytes()).map_err(|e| Error::input(e.to_string()))?;
    Ok(0)
}

pub fn cmd_cross_check(a: &CrossCheckArgs, out: &mut dyn Write) -> Result<i32> {
    let alpha = Arc::new(test_alphabet());
    let (formulas, lassos) = seeded_corpus(&alpha, a.seed, a.count);
    let trees = if a.no_trees { Trees::Off } else { Trees::Capped(a.tree_cap) };
    let t0 = Instant::now();
    let r = cross_check(&alpha, &formulas, &lassos, trees)?;
    let text = if a.json {
        serde_json::to_string_pretty(&r).map_err(|e| Error::input(e.to_string()))? + "\n"
    } else {
        let mut s = format!(
            "{} formulas x {} lassos: {} pairs, {} word-only, {} disagreements ({:.2?})\n",
            r.formulas,
            lassos.len(),
            r.pairs,
            r.word_only,
            r.disagreements.len(),
            t0.elapsed()
        );
        for d in &r.disagreements {
            s += &format!("  {} on {}: {:?}\n", d.formula, d.lasso, d.outcome);
        }
        s
    };
    out.write_all(text.as_bytes()).map_err(|e| Error::input(e.to_string()))?;
    Ok(if r.ok() { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("vldl").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn encode_empty_word_is_bottom() {
        let (code, out, _) = run_str(&["encode", ""]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "bot");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["sat", "/nonexistent/file.vldl"]).0, 2);
        assert_eq!(run_str(&["encode", "c (x)^w"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }
}
