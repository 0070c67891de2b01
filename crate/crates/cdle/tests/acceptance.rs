//! Acceptance criteria for the kernel and the bundled corpus.
//!
//! Runs without the libtest harness so that every criterion prints exactly
//! one PASS or FAIL line; the process fails if any criterion does.

#[path = "../../cdle-core/tests/common/gen.rs"]
mod gen;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use cdle::corpus::{check_beta, load_manifest, verify_corpus, CORPUS_DIR};
use cdle::{with_big_stack, FsLoader};
use cdle_core::bohm::{bohm_separable, Verdict, DEFAULT_NODE_FUEL};
use cdle_core::conversion::Converter;
use cdle_core::env::Env;
use cdle_core::erasure::{app, erase, global, identity, lam, shift, size, subst_atom, var, Atom, P};
use cdle_core::modsys::{def_key, Elaborator, Source};
use cdle_core::reduction::{
    eta_contract, eval_count_steps, FuelExhausted, Machine, NoDefs, Strategy, DEFAULT_FUEL,
};
use cdle_core::syntax::ast::{subst_fvar, Name};
use cdle_core::typecheck::Config;
use gen::*;
use proptest::prelude::Just;
use proptest::prop_assert;
use proptest::test_runner::{Config as RunnerConfig, TestRunner};

type Verdict_ = Result<String, String>;

fn main() {
    let failed = with_big_stack(run);
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn run() -> usize {
    let criteria: Vec<(u8, &str, fn() -> Verdict_)> = vec![
        (1, "corpus checks", corpus),
        (2, "zero-cost roll and unroll", zero_cost_recursion),
        (3, "constant-time Scott predecessor", scott_pred),
        (4, "Parigot predecessor under CBV and CBN", parigot_pred),
        (5, "numeral representation size", numeral_size),
        (6, "Lepigre-Raffalli computation laws", lr_laws),
        (7, "δ and Böhm separation", delta_bohm),
        (8, "mutations are rejected", mutations),
        (9, "property suites", properties),
    ];
    let mut failed = 0;
    for (n, title, f) in criteria {
        match f() {
            Ok(msg) => println!("criterion {n} PASS  {title}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {n} FAIL  {title}: {msg}");
            }
        }
    }
    failed
}

fn roots() -> Vec<PathBuf> {
    vec![PathBuf::from(CORPUS_DIR)]
}

/// Elaborate the whole manifest and hand the environment to `f`.
fn with_corpus<T>(f: impl FnOnce(&Elaborator<'_>) -> Result<T, String>) -> Result<T, String> {
    let entries = load_manifest(&PathBuf::from(CORPUS_DIR)).map_err(|e| e.to_string())?;
    let mut loader = FsLoader::new(roots());
    let mut el = Elaborator::new(&mut loader, Config::default());
    for e in &entries {
        if !el.load(&e.path) {
            return Err(format!("{} does not check", e.path));
        }
    }
    f(&el)
}

fn def(path: &str, name: &str) -> P {
    global(&def_key(path, name))
}

fn erased_body(env: &Env, path: &str, name: &str) -> Result<P, String> {
    env.get(&def_key(path, name))
        .map(|d| erase(&d.body))
        .ok_or_else(|| format!("{path}::{name} is missing"))
}

fn numeral(path: &str, n: usize) -> P {
    (0..n).fold(def(path, "zero"), |t, _| app(def(path, "suc"), t))
}

/// The β-normal erasure of `sucⁿ zero`: a value, so that step counts
/// measure the predecessor alone and not the evaluation of its argument
/// or of the numeral it returns.
fn value_numeral(env: &Env, path: &str, n: usize) -> Result<P, String> {
    Machine::new(env, DEFAULT_FUEL)
        .nf(&numeral(path, n))
        .map_err(|e| e.to_string())
}

fn pred_of(env: &Env, path: &str, n: usize) -> Result<P, String> {
    Ok(app(def(path, "pred"), value_numeral(env, path, n)?))
}

fn steps(env: &Env, t: &P, s: Strategy) -> Result<u64, String> {
    eval_count_steps(t, env, s, DEFAULT_FUEL)
        .map(|tr| tr.steps)
        .map_err(|e| e.to_string())
}

fn corpus() -> Verdict_ {
    let entries = load_manifest(&PathBuf::from(CORPUS_DIR)).map_err(|e| e.to_string())?;
    let report = verify_corpus(&entries, roots(), Config::default());
    let bad: Vec<_> = report.files.iter().filter(|f| !f.ok).map(|f| f.path.as_str()).collect();
    let bad_beta: Vec<_> = report.beta.iter().filter(|b| !b.ok).map(|b| &*b.key).collect();
    if !bad.is_empty() || !bad_beta.is_empty() {
        return Err(format!("rejected: {bad:?} {bad_beta:?}"));
    }
    if report.elapsed >= Duration::from_secs(60) {
        return Err(format!("took {:.1?}", report.elapsed));
    }
    Ok(format!(
        "{} modules, {} β-equations, {:.2?}",
        report.files.len(),
        report.beta.len(),
        report.elapsed
    ))
}

fn zero_cost_recursion() -> Verdict_ {
    with_corpus(|el| {
        let env = &el.menv.env;
        for name in ["recIso1", "recIso2"] {
            let v = check_beta(el, "recType", name, DEFAULT_FUEL);
            if !v.ok {
                return Err(format!("{name}: {:?}", v.detail));
            }
        }
        // The anonymous `{ roll ≃ λ x. x }` proofs are checked as part of
        // recType; confirm directly that they need few steps.
        let mut out = Vec::new();
        for name in ["roll", "unroll"] {
            let mut m = Machine::new(env, 10);
            let t = erased_body(env, "recType", name)?;
            let n = m.nf(&t).map_err(|_| format!("{name}: more than 10 β-steps"))?;
            if eta_contract(&n) != identity() {
                return Err(format!("{name} erases to {n}"));
            }
            out.push(format!("{name} {}", m.steps));
        }
        Ok(format!("β-steps to λ x. x: {}", out.join(", ")))
    })
}

fn scott_pred() -> Verdict_ {
    with_corpus(|el| {
        let env = &el.menv.env;
        let p = "scott/concrete/nat";
        let counts = [1, 5, 20, 100]
            .iter()
            .map(|&n| steps(env, &pred_of(env, p, n)?, Strategy::CbnWhnf))
            .collect::<Result<Vec<_>, _>>()?;
        if counts.windows(2).all(|w| w[0] == w[1]) {
            Ok(format!("{} steps for n = 1, 5, 20, 100", counts[0]))
        } else {
            Err(format!("counts {counts:?}"))
        }
    })
}

fn parigot_pred() -> Verdict_ {
    with_corpus(|el| {
        let env = &el.menv.env;
        let p = "parigot/concrete/nat";
        let ns = [1, 2, 4, 8];
        let mut cbv = Vec::new();
        let mut cbn = Vec::new();
        for n in ns {
            let t = pred_of(env, p, n)?;
            cbv.push(steps(env, &t, Strategy::Cbv)?);
            cbn.push(steps(env, &t, Strategy::CbnWhnf)?);
        }
        let grows = cbv.windows(2).all(|w| w[0] < w[1]);
        let flat = cbn.windows(2).all(|w| w[0] == w[1]);
        let msg = format!("CBV {cbv:?}, CBN {cbn:?} for n = {ns:?}");
        if grows && flat {
            Ok(msg)
        } else {
            Err(msg)
        }
    })
}

fn numeral_size() -> Verdict_ {
    with_corpus(|el| {
        let env = &el.menv.env;
        let sizes = |p: &str| -> Result<Vec<usize>, String> {
            (0..=10)
                .map(|n| {
                    let mut m = Machine::new(env, DEFAULT_FUEL);
                    m.nf(&numeral(p, n)).map(|t| size(&t)).map_err(|e| e.to_string())
                })
                .collect()
        };
        let scott = sizes("scott/concrete/nat")?;
        let parigot = sizes("parigot/concrete/nat")?;
        let step = scott[1] as i64 - scott[0] as i64;
        let affine = scott
            .iter()
            .enumerate()
            .all(|(n, &s)| s as i64 == scott[0] as i64 + step * n as i64);
        let doubling = (3..=10).all(|n| parigot[n] >= 2 * parigot[n - 1]);
        let msg = format!("Scott {scott:?}, Parigot {parigot:?}");
        if affine && doubling {
            Ok(msg)
        } else {
            Err(msg)
        }
    })
}

fn lr_laws() -> Verdict_ {
    with_corpus(|el| {
        let laws = [
            ("lepigre-raffalli/concrete/nat1", "recNatBeta1"),
            ("lepigre-raffalli/concrete/nat1", "recNatBeta2"),
            ("lepigre-raffalli/generic/props", "recDBeta"),
            ("lepigre-raffalli/generic/props", "foldDBeta"),
        ];
        for (p, n) in laws {
            let v = check_beta(el, p, n, 500);
            if !v.ok {
                return Err(format!("{}: {:?}", v.key, v.detail));
            }
        }
        Ok("4 laws hold by βη within 500 steps".into())
    })
}

fn delta_bohm() -> Verdict_ {
    with_corpus(|el| {
        let env = &el.menv.env;
        let p = "signatures/itree";
        if env.get(&def_key(p, "itreeFmapIdAbsurd")).is_none() {
            return Err("itreeFmapIdAbsurd missing".into());
        }
        let t1 = erased_body(env, p, "t1")?;
        let t2 = erased_body(env, p, "t2")?;
        let d = match bohm_separable(&t1, &t2, env, 4, DEFAULT_NODE_FUEL) {
            Verdict::Separable { depth } => depth,
            v => return Err(format!("t1/t2: {v:?}")),
        };
        let k = lam("x", lam("y", var(1)));
        let ki = lam("x", lam("y", var(0)));
        match bohm_separable(&k, &ki, &NoDefs, 8, DEFAULT_NODE_FUEL) {
            Verdict::Separable { depth: 0 } => {
                Ok(format!("t1/t2 separate at depth {d}, K/KI at depth 0"))
            }
            v => Err(format!("K/KI: {v:?}")),
        }
    })
}

/// Elaborate `path` with its source text edited, returning the rules of
/// the errors reported.
fn rules_after(path: &str, edits: &[(&str, &str)], extra: &[(&str, &str)]) -> Result<Vec<String>, String> {
    let mut loader = FsLoader::new(roots());
    let mut text = match std::fs::read_to_string(format!("{CORPUS_DIR}/{path}.ced")) {
        Ok(t) => t,
        Err(_) => String::new(),
    };
    for (from, to) in edits {
        if !text.contains(from) {
            return Err(format!("{path}: `{from}` not found"));
        }
        text = text.replacen(from, to, 1);
    }
    loader.register(path, Source { file: format!("{path}.ced"), text });
    for (p, t) in extra {
        loader.register(p, Source { file: format!("{p}.ced"), text: t.to_string() });
    }
    let mut el = Elaborator::new(&mut loader, Config::default());
    if el.load(path) {
        return Ok(Vec::new());
    }
    Ok(el.take_errors().iter().map(|e| e.rule().to_string()).collect())
}

struct Mutation {
    what: &'static str,
    path: &'static str,
    edits: &'static [(&'static str, &'static str)],
    extra: &'static [(&'static str, &'static str)],
    rule: &'static str,
}

const MUTATIONS: &[Mutation] = &[
    Mutation {
        what: "β on unequal sides (roll)",
        path: "recType",
        edits: &[("{ roll ≃ λ x. x }", "{ roll ≃ λ x. λ y. x }")],
        extra: &[],
        rule: "beta",
    },
    Mutation {
        what: "β on unequal sides (recIso1)",
        path: "recType",
        edits: &[("roll (unroll x) ≃ λ x. x }", "roll (unroll x) ≃ λ x. x x }")],
        extra: &[],
        rule: "beta",
    },
    Mutation {
        what: "recLB binds its cast relevantly",
        path: "recType",
        edits: &[("= Λ X. Λ c. intrCast ·Rec", "= Λ X. λ c. intrCast ·Rec")],
        extra: &[],
        rule: "lam",
    },
    Mutation {
        what: "intrCast takes its proof relevantly",
        path: "cast",
        edits: &[("= Λ S. Λ T. Λ t. Λ t'.", "= Λ S. Λ T. Λ t. λ t'.")],
        extra: &[],
        rule: "lam",
    },
    Mutation {
        what: "erased binder used relevantly",
        path: "mutant/erased",
        edits: &[],
        extra: &[(
            "mutant/erased",
            "module mutant/erased .\n\nbad ◂ ∀ X: ★. X ➾ X ➔ X = Λ X. Λ x. λ y. x .\n",
        )],
        rule: "Lam",
    },
    Mutation {
        what: "erased module parameter used relevantly",
        path: "mutant/param",
        edits: &[],
        extra: &[(
            "mutant/param",
            "import utils/top .\n\nmodule mutant/param {t: Top} .\n\nbad ◂ Top = t .\n",
        )],
        rule: "erased-param",
    },
    Mutation {
        what: "ρ with a guide that misses the expected type",
        path: "parigot/examples/list-data",
        edits: &[(
            "@z.(P (R.inD (in1 ·Unit ·(Pair ·A ·List) z)))",
            "@z.(P (R.inD (in1 ·Unit ·(Pair ·A ·List) unit)))",
        )],
        extra: &[],
        rule: "rho",
    },
    Mutation {
        what: "intersection components with different erasures",
        path: "mutant/pair",
        edits: &[],
        extra: &[(
            "mutant/pair",
            "import utils/top .\n\nmodule mutant/pair .\n\n\
             bad ◂ ι x: Top. Top = [ β{ λ x. x } , β{ λ x. λ y. x } ] .\n",
        )],
        rule: "pair",
    },
    Mutation {
        what: "import with too many arguments",
        path: "mutant/arity",
        edits: &[],
        extra: &[(
            "mutant/arity",
            "import utils .\nimport recType ·(λ X: ★. X) ·(λ X: ★. X) .\n\nmodule mutant/arity .\n",
        )],
        rule: "import-arity",
    },
    Mutation {
        what: "import passes an erased parameter relevantly",
        path: "lepigre-raffalli/generic/props",
        edits: &[(
            "import functorThms ·F fmap -fmapId -fmapCompose .",
            "import functorThms ·F fmap fmapId -fmapCompose .",
        )],
        extra: &[],
        rule: "import-erasure",
    },
    Mutation {
        what: "δ on a consistent equation",
        path: "signatures/itree",
        edits: &[(
            "[ pf ◂ { t2 ≃ t1 } = fid ·Nat ·Nat (caseNat ·Nat zero suc) reflectNat t1 ]",
            "[ pf ◂ { t1 ≃ t1 } = β ]",
        )],
        extra: &[],
        rule: "delta",
    },
    Mutation {
        what: "φ with a payload the equation does not justify",
        path: "view",
        edits: &[("Λ T. λ t. Λ v. φ v.2 - v.1 { t }", "Λ T. λ t. Λ v. φ v.2 - v.1 { λ x. t }")],
        extra: &[],
        rule: "phi",
    },
    Mutation {
        what: "name used without its import",
        path: "recType",
        edits: &[("import cast .\n", "")],
        extra: &[],
        rule: "unbound-name",
    },
    Mutation {
        what: "modules importing each other",
        path: "mutant/a",
        edits: &[],
        extra: &[
            ("mutant/a", "import mutant/b .\n\nmodule mutant/a .\n"),
            ("mutant/b", "import mutant/a .\n\nmodule mutant/b .\n"),
        ],
        rule: "import-cycle",
    },
];

fn mutations() -> Verdict_ {
    let mut wrong = Vec::new();
    for m in MUTATIONS {
        let rules = rules_after(m.path, m.edits, m.extra)?;
        if rules.first().map(String::as_str) != Some(m.rule) {
            wrong.push(format!("{}: expected {}, got {rules:?}", m.what, m.rule));
        }
    }
    if wrong.is_empty() {
        Ok(format!("{} mutations rejected with the expected rule", MUTATIONS.len()))
    } else {
        Err(wrong.join("; "))
    }
}

fn suite<S: proptest::strategy::Strategy>(
    name: &str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), proptest::test_runner::TestCaseError>,
) -> Result<String, String> {
    let mut runner = TestRunner::new(RunnerConfig {
        cases: 1000,
        failure_persistence: None,
        ..RunnerConfig::default()
    });
    let start = Instant::now();
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))?;
    let t = start.elapsed();
    if t > Duration::from_secs(2) {
        return Err(format!("{name} took {t:.2?}"));
    }
    Ok(format!("{name} {t:.2?}"))
}

const FUEL: u64 = 300;

fn tame() -> Machine<'static> {
    let mut m = Machine::new(&NoDefs, FUEL);
    m.size_limit = 2_000;
    m
}

fn nf_eta(t: &P) -> Result<P, FuelExhausted> {
    Ok(eta_contract(&tame().nf(t)?))
}

fn properties() -> Verdict_ {
    let mut done = Vec::new();
    let x = Name::fresh("x");
    done.push(suite(
        "substitution",
        (Just(x.clone()), annotated_with(x, 5), annotated_with(Name::fresh("y"), 3)),
        |(x, t, s)| {
            let lhs = erase(&subst_fvar(&t, &x, &s));
            let rhs = subst_atom(&erase(&t), &Atom::Local(x), &erase(&s));
            prop_assert!(lhs == rhs, "{} vs {}", lhs, rhs);
            Ok(())
        },
    )?);
    done.push(suite("βη-equal terms do not separate", (closed(5), 0usize..8), |(t, pick)| {
        let Ok(_) = nf_eta(&t) else { return Ok(()) };
        let mut n = pick;
        let other = contract_nth(&t, &mut n)
            .unwrap_or_else(|| lam("x", app(shift(&t, 1, 0), var(0))));
        let v = bohm_separable(&t, &other, &NoDefs, 8, DEFAULT_NODE_FUEL);
        prop_assert!(!v.is_separable(), "{} separated from {}", t, other);
        Ok(())
    })?);
    done.push(suite("βη-normal forms", closed(5), |t| {
        if let Ok(n) = nf_eta(&t) {
            prop_assert!(beta_free(&n) && eta_free(&n), "redex in {}", n);
        }
        Ok(())
    })?);
    done.push(with_corpus(|el| {
        let env = &el.menv.env;
        let classes: Vec<_> = env.defs.values().map(|d| d.class.clone()).collect();
        let conv = Converter::new(env);
        suite(
            "conversion reflexivity",
            proptest::sample::select(classes),
            |c| {
                prop_assert!(conv.convert(&c, &c) == Ok(true), "{:?} not reflexive", c);
                if let Ok(w) = conv.type_whnf(&c) {
                    prop_assert!(
                        conv.convert(&c, &w) == Ok(true) && conv.convert(&w, &c) == Ok(true),
                        "{:?} differs from its head normal form", c
                    );
                }
                Ok(())
            },
        )
    })?);
    Ok(done.join(", "))
}
