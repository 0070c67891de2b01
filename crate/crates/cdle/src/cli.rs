//! The `cdle` command line.
//!
//! Exit codes: 0 success, 1 type error, 2 parse or resolution error,
//! 3 fuel exhausted, 4 internal error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use cdle_core::erasure::{erase, size};
use cdle_core::modsys::{def_key, Elaborator, Error, Source};
use cdle_core::reduction::{eval_count_steps, normalize_beta, Strategy};
use cdle_core::syntax::{parse_module, print_expr};
use cdle_core::typecheck::Config;

use crate::corpus::{load_manifest, verify_corpus, CORPUS_DIR};
use crate::loader::{module_path_of, FsLoader};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TYPE: i32 = 1;
pub const EXIT_RESOLVE: i32 = 2;
pub const EXIT_FUEL: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "cdle", version, about = "Type checker and evaluator for CDLE modules")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Module search root; repeatable, searched in order before CDLE_PATH.
    #[arg(long = "path", value_name = "DIR", global = true)]
    pub paths: Vec<PathBuf>,
    /// β-step budget for each conversion or evaluation.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    pub fuel: u64,
    /// Böhm tree depth explored by the δ rule.
    #[arg(long, default_value_t = 8, global = true)]
    pub bohm_depth: u32,
    /// Emit JSON lines instead of human-readable text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Elaborate and check source files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the classifier of `module::name`.
    Type { def: String },
    /// Print the erasure of `module::name`.
    Erase { def: String },
    /// Reduce the erasure of `module::name`.
    Normalize {
        def: String,
        /// Stop at weak head normal form (call-by-name).
        #[arg(long, conflicts_with = "full")]
        whnf: bool,
        /// Reduce to full β-normal form (the default).
        #[arg(long)]
        full: bool,
        /// Weak call-by-value evaluation.
        #[arg(long, conflicts_with_all = ["whnf", "full"])]
        cbv: bool,
    },
    /// Count the β-steps taken to evaluate `module::name`.
    Steps {
        def: String,
        /// Count call-by-value steps instead of call-by-name to WHNF.
        #[arg(long)]
        cbv: bool,
    },
    /// Node count of the β-normal erasure of `module::name`.
    Size { def: String },
    /// Check the bundled corpus.
    Corpus,
}

impl Opts {
    fn config(&self) -> Config {
        Config {
            fuel: self.fuel,
            bohm_depth: self.bohm_depth,
            ..Config::default()
        }
    }
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    file: &'a str,
    line: Option<usize>,
    col: Option<usize>,
    span: [usize; 2],
    rule: &'a str,
    decl: Option<&'a str>,
    expected: Option<&'a str>,
    found: Option<&'a str>,
    message: String,
}

/// Exit code for a set of elaboration errors.
pub fn exit_code(errors: &[Error]) -> i32 {
    let resolve = errors
        .iter()
        .any(|e| matches!(e, Error::Parse { .. } | Error::Resolve { .. }));
    let fuel = errors
        .iter()
        .any(|e| matches!(e, Error::Type(t) if t.fuel_exhausted));
    if resolve {
        EXIT_RESOLVE
    } else if fuel {
        EXIT_FUEL
    } else if errors.is_empty() {
        EXIT_OK
    } else {
        EXIT_TYPE
    }
}

struct Out<'w> {
    out: &'w mut dyn Write,
    err: &'w mut dyn Write,
    json: bool,
}

impl Out<'_> {
    fn errors(&mut self, loader: &FsLoader, errors: &[Error]) {
        for e in errors {
            let span = e.span();
            let lc = loader.line_col(e.file(), span.start);
            let (expected, found, decl, message) = match e {
                Error::Type(t) => (
                    t.expected.as_deref(),
                    t.found.as_deref(),
                    t.decl.as_deref(),
                    t.detail.clone().unwrap_or_default(),
                ),
                Error::Parse { error, .. } => (None, None, None, error.to_string()),
                Error::Resolve { msg, .. } => (None, None, None, msg.clone()),
            };
            if self.json {
                let d = Diagnostic {
                    file: e.file(),
                    line: lc.map(|p| p.0),
                    col: lc.map(|p| p.1),
                    span: [span.start, span.end],
                    rule: e.rule(),
                    decl,
                    expected,
                    found,
                    message,
                };
                let _ = writeln!(self.out, "{}", serde_json::to_string(&d).unwrap());
            } else {
                let at = match lc {
                    Some((l, c)) => format!("{}:{l}:{c}", e.file()),
                    None => e.file().to_string(),
                };
                let _ = writeln!(self.err, "{at}: error[{}]: {}", e.rule(), body(e));
            }
        }
    }

    fn verdict(&mut self, code: i32, what: &str) {
        if self.json {
            let v = serde_json::json!({ "verdict": if code == 0 { "accept" } else { "reject" }, "exit": code, "what": what });
            let _ = writeln!(self.out, "{v}");
        } else if code == 0 {
            let _ = writeln!(self.out, "ok: {what}");
        } else {
            let _ = writeln!(self.err, "rejected: {what}");
        }
    }

    fn value(&mut self, key: &str, v: String) {
        if self.json {
            let _ = writeln!(self.out, "{}", serde_json::json!({ key: v }));
        } else {
            let _ = writeln!(self.out, "{v}");
        }
    }
}

fn body(e: &Error) -> String {
    match e {
        Error::Type(t) => t.to_string(),
        Error::Parse { error, .. } => error.to_string(),
        Error::Resolve { msg, .. } => msg.clone(),
    }
}

/// Parse `argv` and run the command. Output goes to `out`, diagnostics in
/// human mode to `err`.
pub fn run(argv: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_RESOLVE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let mut o = Out {
        out,
        err,
        json: cli.opts.json,
    };
    match &cli.cmd {
        Command::Check { files } => check(&cli.opts, files, &mut o),
        Command::Corpus => corpus(&cli.opts, &mut o),
        Command::Type { def } => with_def(&cli.opts, def, &mut o, |el, key, o| {
            let d = el.menv.env.get(key).unwrap();
            o.value("type", print_expr(&d.class));
            EXIT_OK
        }),
        Command::Erase { def } => with_def(&cli.opts, def, &mut o, |el, key, o| {
            let d = el.menv.env.get(key).unwrap();
            o.value("erasure", erase(&d.body).to_string());
            EXIT_OK
        }),
        Command::Normalize { def, whnf, cbv, .. } => {
            let strategy = if *cbv {
                Strategy::Cbv
            } else if *whnf {
                Strategy::CbnWhnf
            } else {
                Strategy::CbnFull
            };
            evaluate(&cli.opts, def, strategy, &mut o, |t, o| {
                o.value("normal_form", t.result.to_string())
            })
        }
        Command::Steps { def, cbv } => {
            let strategy = if *cbv { Strategy::Cbv } else { Strategy::CbnWhnf };
            evaluate(&cli.opts, def, strategy, &mut o, |t, o| {
                o.value("steps", t.steps.to_string())
            })
        }
        Command::Size { def } => with_def(&cli.opts, def, &mut o, |el, key, o| {
            let env = &el.menv.env;
            let d = env.get(key).unwrap();
            match normalize_beta(&erase(&d.body), env, cli.opts.fuel) {
                Ok(n) => {
                    o.value("size", size(&n).to_string());
                    EXIT_OK
                }
                Err(_) => {
                    o.verdict(EXIT_FUEL, "fuel exhausted during normalization");
                    EXIT_FUEL
                }
            }
        }),
    }
}

fn evaluate(
    opts: &Opts,
    def: &str,
    strategy: Strategy,
    o: &mut Out<'_>,
    show: impl Fn(&cdle_core::reduction::EvalTrace, &mut Out<'_>),
) -> i32 {
    with_def(opts, def, o, |el, key, o| {
        let env = &el.menv.env;
        let d = env.get(key).unwrap();
        if d.is_type {
            o.verdict(EXIT_RESOLVE, &format!("`{def}` is a type definition"));
            return EXIT_RESOLVE;
        }
        match eval_count_steps(&erase(&d.body), env, strategy, opts.fuel) {
            Ok(t) => {
                show(&t, o);
                EXIT_OK
            }
            Err(_) => {
                o.verdict(EXIT_FUEL, "fuel exhausted during evaluation");
                EXIT_FUEL
            }
        }
    })
}

/// Elaborate the module of `module::name` and run `f` on the definition.
fn with_def(
    opts: &Opts,
    def: &str,
    o: &mut Out<'_>,
    f: impl FnOnce(&Elaborator<'_>, &str, &mut Out<'_>) -> i32,
) -> i32 {
    let Some((module, name)) = def.rsplit_once("::") else {
        o.verdict(EXIT_RESOLVE, &format!("`{def}` is not of the form module::name"));
        return EXIT_RESOLVE;
    };
    let mut loader = FsLoader::from_flags(&opts.paths);
    let mut el = Elaborator::new(&mut loader, opts.config());
    let ok = el.load(module);
    let errors = el.take_errors();
    if !ok {
        drop(el);
        o.errors(&loader, &errors);
        let code = exit_code(&errors);
        o.verdict(code, module);
        return code;
    }
    let key = def_key(module, name);
    if el.menv.env.get(&key).is_none() {
        o.verdict(EXIT_RESOLVE, &format!("no definition `{def}`"));
        return EXIT_RESOLVE;
    }
    f(&el, &key, o)
}

fn check(opts: &Opts, files: &[PathBuf], o: &mut Out<'_>) -> i32 {
    let mut loader = FsLoader::from_flags(&opts.paths);
    let mut paths = Vec::new();
    let mut errors = Vec::new();
    for f in files {
        match module_for_file(&mut loader, f) {
            Ok(p) => paths.push(p),
            Err(e) => errors.push(e),
        }
    }
    let mut el = Elaborator::new(&mut loader, opts.config());
    for p in &paths {
        el.load(p);
    }
    errors.extend(el.take_errors());
    drop(el);
    o.errors(&loader, &errors);
    let code = exit_code(&errors);
    o.verdict(code, &format!("{} file(s)", files.len()));
    code
}

/// Work out which module a file on the command line defines and make sure
/// the loader serves that file for it.
fn module_for_file(loader: &mut FsLoader, file: &Path) -> Result<String, Error> {
    let name = file.display().to_string();
    let text = std::fs::read_to_string(file).map_err(|e| Error::Resolve {
        file: name.clone(),
        span: Default::default(),
        kind: cdle_core::modsys::ResolveKind::UnknownModule,
        msg: format!("cannot read file: {e}"),
    })?;
    let path = match module_path_of(&loader.roots, file) {
        Some(p) => p,
        // Outside every root: trust the header, parse errors surface later.
        None => match parse_module(&text, None) {
            Ok(m) => m.path,
            Err(error) => return Err(Error::Parse { file: name, error }),
        },
    };
    loader.register(&path, Source { file: name, text });
    Ok(path)
}

fn corpus(opts: &Opts, o: &mut Out<'_>) -> i32 {
    let dir = PathBuf::from(CORPUS_DIR);
    let entries = match load_manifest(&dir) {
        Ok(e) => e,
        Err(e) => {
            o.verdict(EXIT_INTERNAL, &e.to_string());
            return EXIT_INTERNAL;
        }
    };
    let report = verify_corpus(&entries, vec![dir], opts.config());
    let mut all = Vec::new();
    for f in &report.files {
        if o.json {
            let v = serde_json::json!({ "module": f.path, "ok": f.ok, "ms": f.elapsed.as_millis() as u64 });
            let _ = writeln!(o.out, "{v}");
        } else {
            let mark = if f.ok { "ok  " } else { "FAIL" };
            let _ = writeln!(o.out, "{mark} {:<40} {:>6} ms  {}", f.path, f.elapsed.as_millis(), f.title);
        }
        all.extend(f.errors.iter().cloned());
    }
    o.errors(&report.loader, &all);
    for b in &report.beta {
        if o.json {
            let v = serde_json::json!({ "beta": b.key, "ok": b.ok, "detail": b.detail });
            let _ = writeln!(o.out, "{v}");
        } else if !b.ok {
            let _ = writeln!(o.out, "FAIL β {}: {}", b.key, b.detail.as_deref().unwrap_or(""));
        }
    }
    let mut code = exit_code(&all);
    if code == EXIT_OK && !report.ok() {
        code = EXIT_TYPE;
    }
    o.verdict(
        code,
        &format!(
            "{} module(s), {} β-equation(s), {:.2} s",
            report.files.len(),
            report.beta.len(),
            report.elapsed.as_secs_f64()
        ),
    );
    code
}
