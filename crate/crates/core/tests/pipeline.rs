use std::sync::Arc;

use vldl::alphabet::PushdownAlphabet;
use vldl::corpus::{random_restricted_lasso, rng, FormulaGen};
use vldl::error::Error;
use vldl::formula::{Formula, TvpaLibrary};
use vldl::limits::Limits;
use vldl::oracle::eval_lasso;
use vldl::pipeline::{is_trace, model_check_with, satisfiable_with, Answer};
use vldl::vps::{parse_system, System, Vps};

fn alpha() -> Arc<PushdownAlphabet> {
    Arc::new(PushdownAlphabet::new(&["c"], &["r"], &["l"]).unwrap().with_props("l", &["p"]).unwrap().with_props("c", &["q"]).unwrap())
}

fn system(a: &PushdownAlphabet, text: &str) -> Vps {
    match parse_system(text, a, &TvpaLibrary::new(a.clone())).unwrap() {
        System::Vps(v) => v,
        System::Tvpa(_) => panic!("plain system expected"),
    }
}

fn formulas(a: &PushdownAlphabet, seed: u64, n: usize) -> Vec<Formula> {
    let mut r = rng(seed);
    let mut gen = FormulaGen::new(a);
    gen.max_tvpa_states = 2;
    (0..n).map(|_| gen.formula(&mut r, 5)).collect()
}

#[test]
fn satisfiability_is_sound() {
    let a = alpha();
    let limits = Limits::uniform(200_000);
    let mut r = rng(9);
    let lassos: Vec<_> = (0..30).map(|_| random_restricted_lasso(&mut r, &a, 3, 4)).collect();
    let mut decided = 0;
    let mut sat = 0;
    for f in formulas(&a, 5, 25) {
        match satisfiable_with(&a, &f, &limits) {
            Ok(v) => {
                decided += 1;
                match v.answer {
                    Answer::Satisfiable(w) => {
                        assert!(eval_lasso(&a, &f, &w).unwrap(), "{f}: model {}", a.fmt_lasso(&w));
                        sat += 1;
                    }
                    Answer::Unsatisfiable => {
                        for w in &lassos {
                            assert!(!eval_lasso(&a, &f, w).unwrap(), "{f} unsat but holds on {}", a.fmt_lasso(w));
                        }
                    }
                    other => panic!("{other:?}"),
                }
            }
            Err(Error::Resource { .. }) => {}
            Err(e) => panic!("{f}: {e}"),
        }
    }
    assert!(decided >= 20, "only {decided} decided");
    assert!(sat > 0 && sat < decided, "{sat} of {decided} satisfiable");
}

/// The only trace of this system is `(c r)^ω`, so model checking reduces to
/// evaluating the formula on it.
#[test]
fn single_trace_system_matches_semantics() {
    let a = alpha();
    let s = system(&a, "states: s t; initial: s; stack: A; s -c push A-> t; t -r pop A-> s;");
    let trace = a.lasso("", "c r").unwrap();
    let limits = Limits::uniform(200_000);
    let mut seen = [0; 2];
    for f in formulas(&a, 6, 20) {
        let expect = eval_lasso(&a, &f, &trace).unwrap();
        match model_check_with(&a, &s, &f, &limits) {
            Ok(v) => match v.answer {
                Answer::Holds => {
                    assert!(expect, "{f}");
                    seen[0] += 1;
                }
                Answer::Violated(w) => {
                    assert!(!expect, "{f}");
                    seen[1] += 1;
                    assert_eq!(a.fmt_lasso(&w), "(c r)^w");
                }
                other => panic!("{other:?}"),
            },
            Err(Error::Resource { .. }) => {}
            Err(e) => panic!("{f}: {e}"),
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn counterexamples_are_falsifying_traces() {
    let a = alpha();
    let s = system(&a, "states: s t; initial: s; stack: A; s -l-> s; s -c push A-> t; t -r pop A-> s;");
    let limits = Limits::uniform(200_000);
    let samples: Vec<_> = [("", "l"), ("", "c r"), ("l", "c r"), ("c r", "l"), ("", "l c r"), ("l l", "c r l")]
        .iter()
        .map(|(u, v)| a.lasso(u, v).unwrap())
        .collect();
    let mut seen = [0; 2];
    for f in formulas(&a, 7, 20) {
        match model_check_with(&a, &s, &f, &limits) {
            Ok(v) => match v.answer {
                Answer::Holds => {
                    seen[0] += 1;
                    for w in &samples {
                        assert!(eval_lasso(&a, &f, w).unwrap(), "{f} holds but fails on {}", a.fmt_lasso(w));
                    }
                }
                Answer::Violated(w) => {
                    seen[1] += 1;
                    assert!(is_trace(&a, &s, &w));
                    assert!(!eval_lasso(&a, &f, &w).unwrap(), "{f} on {}", a.fmt_lasso(&w));
                }
                other => panic!("{other:?}"),
            },
            Err(Error::Resource { .. }) => {}
            Err(e) => panic!("{f}: {e}"),
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}
