//! Module elaboration.
//!
//! A definition `d` in a module with parameters `p1 .. pn` is stored once,
//! lifted over the parameters: term parameters become `Π`/`λ` (or `∀`/`Λ`
//! when erased), type parameters `∀`/`Λ`; type definitions abstract every
//! parameter with a type-level `λ`. A name in scope stands for an
//! expression: the lifted constant applied to whatever arguments are known.
//! Inside the module these are the parameters themselves; after an import
//! they are the import arguments, possibly only a prefix of them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::env::Env;
use crate::erasure::{erase, free_locals};
use crate::syntax::ast::{apply, close, ex, is_kind, subst_fvar, ArgKind, Binder, Ex, Expr, Name, Span};
use crate::syntax::{parse_module, Decl, Import, Item, ParseError, SurfaceModule};
use crate::typecheck::{Checker, Config, Rule, TypeError};

/// Source of module texts, addressed by module path.
pub trait Loader {
    fn load(&mut self, path: &str) -> Option<Source>;
}

#[derive(Clone, Debug)]
pub struct Source {
    /// Name used in diagnostics, usually the file path.
    pub file: String,
    pub text: String,
}

/// Modules held in memory, keyed by module path.
#[derive(Default)]
pub struct MemoryLoader {
    pub modules: BTreeMap<String, String>,
}

impl MemoryLoader {
    pub fn with(mut self, path: &str, text: &str) -> Self {
        self.modules.insert(path.to_string(), text.to_string());
        self
    }
}

impl Loader for MemoryLoader {
    fn load(&mut self, path: &str) -> Option<Source> {
        self.modules.get(path).map(|t| Source {
            file: format!("{path}.ced"),
            text: t.clone(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolveKind {
    UnknownModule,
    Cycle,
    Unbound,
    ImportArity,
    ImportErasure,
    ImportArgKind,
}

impl ResolveKind {
    pub fn name(self) -> &'static str {
        match self {
            ResolveKind::UnknownModule => "unknown-module",
            ResolveKind::Cycle => "import-cycle",
            ResolveKind::Unbound => "unbound-name",
            ResolveKind::ImportArity => "import-arity",
            ResolveKind::ImportErasure => "import-erasure",
            ResolveKind::ImportArgKind => "import-arg-kind",
        }
    }
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum Error {
    #[error("{file}: {error}")]
    Parse { file: String, error: ParseError },
    #[error("{file}: {}: {msg}", kind.name())]
    Resolve {
        file: String,
        span: Span,
        kind: ResolveKind,
        msg: String,
    },
    #[error("{}: {}", .0.file, .0)]
    Type(TypeError),
}

impl Error {
    /// Rule or error-class name, as used in diagnostics.
    pub fn rule(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Resolve { kind, .. } => kind.name(),
            Error::Type(e) => e.rule.name(),
        }
    }

    pub fn file(&self) -> &str {
        match self {
            Error::Parse { file, .. } | Error::Resolve { file, .. } => file,
            Error::Type(e) => &e.file,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Error::Parse { error, .. } => error.span(),
            Error::Resolve { span, .. } => *span,
            Error::Type(e) => e.span,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ParamInfo {
    pub name: Name,
    pub class: Ex,
    pub erased: bool,
}

impl ParamInfo {
    fn is_type(&self) -> bool {
        is_kind(&self.class)
    }

    /// The kind of argument this parameter takes.
    pub fn arg_kind(&self) -> ArgKind {
        if self.is_type() {
            ArgKind::Type
        } else if self.erased {
            ArgKind::Erased
        } else {
            ArgKind::Term
        }
    }
}

#[derive(Clone, Debug)]
pub struct Export {
    pub name: String,
    pub key: Arc<str>,
    pub is_type: bool,
}

#[derive(Clone, Debug)]
pub struct ModuleInfo {
    pub path: String,
    pub file: String,
    pub params: Vec<ParamInfo>,
    pub exports: Vec<Export>,
    pub imports: Vec<String>,
    /// False when this module or one of its imports had errors.
    pub ok: bool,
}

#[derive(Clone, Debug, Default)]
pub struct ModuleEnv {
    pub env: Env,
    pub modules: BTreeMap<String, ModuleInfo>,
    /// Modules in the order they finished elaborating.
    pub order: Vec<String>,
}

pub fn def_key(path: &str, name: &str) -> Arc<str> {
    Arc::from(format!("{path}::{name}"))
}

/// The expression a module-level name stands for: the lifted constant
/// applied to arguments. Type definitions take all arguments relevantly.
fn reference(key: &Arc<str>, is_type: bool, args: &[(ArgKind, Ex)]) -> Ex {
    args.iter().fold(ex(Expr::Const(key.clone())), |h, (k, a)| {
        let k = match (is_type, k) {
            (true, ArgKind::Erased) => ArgKind::Term,
            (_, k) => *k,
        };
        apply(h, k, a.clone())
    })
}

/// Close a definition over the module parameters.
fn lift(params: &[ParamInfo], class: &Ex, body: &Ex, is_type: bool) -> (Ex, Ex) {
    let mut c = class.clone();
    let mut b = body.clone();
    for p in params.iter().rev() {
        let binder = Binder {
            name: p.name.hint.clone(),
            dom: p.class.clone(),
            body: close(&c, &p.name),
        };
        let bb = close(&b, &p.name);
        let n = p.name.hint.clone();
        if is_type {
            c = ex(Expr::Pi(binder));
            b = ex(Expr::Lam(n, Some(p.class.clone()), bb));
        } else if p.is_type() || p.erased {
            c = ex(Expr::All(binder));
            b = ex(Expr::BigLam(n, None, bb));
        } else {
            c = ex(Expr::Pi(binder));
            b = ex(Expr::Lam(n, None, bb));
        }
    }
    (c, b)
}

/// Names in scope, innermost last; later bindings shadow earlier ones.
#[derive(Default)]
struct Scope {
    names: Vec<(Arc<str>, Ex)>,
}

impl Scope {
    fn bind(&mut self, name: &str, e: Ex) {
        self.names.push((Arc::from(name), e));
    }

    fn get(&self, name: &str) -> Option<&Ex> {
        self.names.iter().rev().find(|(n, _)| &**n == name).map(|(_, e)| e)
    }

    fn resolve(&self, e: &Ex) -> Result<Ex, String> {
        use Expr::*;
        let r = |x: &Ex| self.resolve(x);
        let b = |x: &Binder| -> Result<Binder, String> {
            Ok(Binder {
                name: x.name.clone(),
                dom: r(&x.dom)?,
                body: r(&x.body)?,
            })
        };
        let o = |x: &Option<Ex>| x.as_ref().map(|y| r(y)).transpose();
        Ok(ex(match &**e {
            Ref(s) => return self.get(s).cloned().ok_or_else(|| s.to_string()),
            Star | BVar(_) | FVar(_) | Const(_) => return Ok(e.clone()),
            Pi(x) => Pi(b(x)?),
            All(x) => All(b(x)?),
            Iota(x) => Iota(b(x)?),
            Lam(n, d, body) => Lam(n.clone(), o(d)?, r(body)?),
            BigLam(n, d, body) => BigLam(n.clone(), o(d)?, r(body)?),
            App(f, a) => App(r(f)?, r(a)?),
            AppErased(f, a) => AppErased(r(f)?, r(a)?),
            AppType(f, a) => AppType(r(f)?, r(a)?),
            Eq(f, a) => Eq(r(f)?, r(a)?),
            Pair(f, a) => Pair(r(f)?, r(a)?),
            Chi(f, a) => Chi(r(f)?, r(a)?),
            Beta(a) => Beta(r(a)?),
            Delta(a) => Delta(r(a)?),
            Varsigma(a) => Varsigma(r(a)?),
            Proj(a, i) => Proj(r(a)?, *i),
            Rho {
                eq,
                name,
                guide,
                body,
            } => Rho {
                eq: r(eq)?,
                name: name.clone(),
                guide: r(guide)?,
                body: r(body)?,
            },
            Phi { eq, term, payload } => Phi {
                eq: r(eq)?,
                term: r(term)?,
                payload: r(payload)?,
            },
            Let {
                name,
                ty,
                val,
                body,
            } => Let {
                name: name.clone(),
                ty: r(ty)?,
                val: r(val)?,
                body: r(body)?,
            },
        }))
    }
}

/// Per-module state while its items are processed.
struct ModuleState {
    path: String,
    file: String,
    scope: Scope,
    params: Vec<ParamInfo>,
    exports: Vec<Export>,
    imports: Vec<String>,
    ok: bool,
}

pub struct Elaborator<'l> {
    pub menv: ModuleEnv,
    loader: &'l mut dyn Loader,
    pub cfg: Config,
    stack: Vec<String>,
    failed: BTreeSet<String>,
    errors: Vec<Error>,
}

impl<'l> Elaborator<'l> {
    pub fn new(loader: &'l mut dyn Loader, cfg: Config) -> Self {
        Elaborator {
            menv: ModuleEnv::default(),
            loader,
            cfg,
            stack: Vec::new(),
            failed: BTreeSet::new(),
            errors: Vec::new(),
        }
    }

    pub fn errors(&self) -> &[Error] {
        &self.errors
    }

    pub fn take_errors(&mut self) -> Vec<Error> {
        core::mem::take(&mut self.errors)
    }

    /// Elaborate a module and its imports. Returns whether it and
    /// everything it imports checked without errors.
    pub fn load(&mut self, path: &str) -> bool {
        self.load_from(path, None)
    }

    fn load_from(&mut self, path: &str, site: Option<(&str, Span)>) -> bool {
        if let Some(m) = self.menv.modules.get(path) {
            return m.ok;
        }
        if self.failed.contains(path) {
            return false;
        }
        let (file, span) = site.map(|(f, s)| (f.to_string(), s)).unwrap_or_default();
        if self.stack.iter().any(|p| p == path) {
            let mut cycle = self.stack.clone();
            cycle.push(path.to_string());
            self.errors.push(Error::Resolve {
                file,
                span,
                kind: ResolveKind::Cycle,
                msg: cycle.join(" -> "),
            });
            return false;
        }
        let Some(src) = self.loader.load(path) else {
            self.errors.push(Error::Resolve {
                file,
                span,
                kind: ResolveKind::UnknownModule,
                msg: format!("module `{path}` not found"),
            });
            self.failed.insert(path.to_string());
            return false;
        };
        let m = match parse_module(&src.text, Some(path)) {
            Ok(m) => m,
            Err(error) => {
                self.errors.push(Error::Parse { file: src.file, error });
                self.failed.insert(path.to_string());
                return false;
            }
        };
        self.stack.push(path.to_string());
        let ok = self.elaborate(&m, &src.file);
        self.stack.pop();
        if !ok && !self.menv.modules.contains_key(path) {
            self.failed.insert(path.to_string());
        }
        ok
    }

    /// Elaborate an already parsed module whose imports can be loaded.
    pub fn elaborate(&mut self, m: &SurfaceModule, file: &str) -> bool {
        let mut deps_ok = true;
        for imp in m.imports() {
            deps_ok &= self.load_from(&imp.path, Some((file, imp.span)));
        }
        if !deps_ok {
            // Names from a broken import would only produce follow-on errors.
            return false;
        }
        let mut st = ModuleState {
            path: m.path.clone(),
            file: file.to_string(),
            scope: Scope::default(),
            params: Vec::new(),
            exports: Vec::new(),
            imports: m.imports().map(|i| i.path.clone()).collect(),
            ok: true,
        };
        for imp in &m.header_imports {
            self.import(&mut st, imp);
        }
        for p in &m.params {
            let class = match st.scope.resolve(&p.class) {
                Ok(c) => c,
                Err(name) => {
                    self.unbound(&mut st, p.span, &name);
                    return self.finish(st);
                }
            };
            let mut ck = self.checker(&st.params);
            let r = if is_kind(&class) {
                ck.check_kind_wf(&class)
            } else {
                ck.check_type(&class)
            };
            if let Err(e) = r {
                self.type_error(&mut st, e, p.span, Some(&p.name));
                // Definitions cannot be checked against an ill-formed telescope.
                return self.finish(st);
            }
            let name = Name::fresh(&p.name);
            st.scope.bind(&p.name, ex(Expr::FVar(name.clone())));
            st.params.push(ParamInfo {
                name,
                class,
                erased: p.erased,
            });
        }
        for item in &m.items {
            match item {
                Item::Import(imp) => self.import(&mut st, imp),
                Item::Decl(d) => self.decl(&mut st, d),
            }
        }
        self.finish(st)
    }

    fn finish(&mut self, st: ModuleState) -> bool {
        let ok = st.ok;
        self.menv.order.push(st.path.clone());
        self.menv.modules.insert(
            st.path.clone(),
            ModuleInfo {
                path: st.path,
                file: st.file,
                params: st.params,
                exports: st.exports,
                imports: st.imports,
                ok,
            },
        );
        ok
    }

    fn checker(&self, params: &[ParamInfo]) -> Checker<'_> {
        let mut ck = Checker::new(&self.menv.env, self.cfg);
        for p in params {
            ck.push(p.name.clone(), p.class.clone());
        }
        ck
    }

    fn unbound(&mut self, st: &mut ModuleState, span: Span, name: &str) {
        st.ok = false;
        self.errors.push(Error::Resolve {
            file: st.file.clone(),
            span,
            kind: ResolveKind::Unbound,
            msg: format!("unbound name `{name}`"),
        });
    }

    fn type_error(&mut self, st: &mut ModuleState, e: TypeError, span: Span, decl: Option<&str>) {
        st.ok = false;
        self.errors.push(Error::Type(TypeError {
            file: st.file.clone(),
            span,
            decl: decl.map(|d| d.to_string()),
            ..e
        }));
    }

    fn resolve_error(&mut self, st: &mut ModuleState, span: Span, kind: ResolveKind, msg: String) {
        st.ok = false;
        self.errors.push(Error::Resolve {
            file: st.file.clone(),
            span,
            kind,
            msg,
        });
    }

    fn import(&mut self, st: &mut ModuleState, imp: &Import) {
        let Some(info) = self.menv.modules.get(&imp.path).cloned() else {
            // Already reported when loading failed.
            st.ok = false;
            return;
        };
        if imp.args.len() > info.params.len() {
            let msg = format!(
                "`{}` takes {} argument(s), {} given",
                imp.path,
                info.params.len(),
                imp.args.len()
            );
            return self.resolve_error(st, imp.span, ResolveKind::ImportArity, msg);
        }
        let mut args: Vec<(ArgKind, Ex)> = Vec::new();
        for (i, (arg, p)) in imp.args.iter().zip(&info.params).enumerate() {
            let want = p.arg_kind();
            if arg.kind != want {
                let (kind, msg) = match (want, arg.kind) {
                    (ArgKind::Erased, ArgKind::Term) | (ArgKind::Term, ArgKind::Erased) => (
                        ResolveKind::ImportErasure,
                        format!("argument {} of `{}` must be {}", i + 1, imp.path, describe(want)),
                    ),
                    _ => (
                        ResolveKind::ImportArgKind,
                        format!("argument {} of `{}` must be {}", i + 1, imp.path, describe(want)),
                    ),
                };
                return self.resolve_error(st, imp.span, kind, msg);
            }
            let e = match st.scope.resolve(&arg.expr) {
                Ok(e) => e,
                Err(name) => return self.unbound(st, imp.span, &name),
            };
            // Earlier parameters are replaced by earlier arguments.
            let class = info.params[..i]
                .iter()
                .zip(&args)
                .fold(p.class.clone(), |c, (q, (_, a))| subst_fvar(&c, &q.name, a));
            let mut ck = self.checker(&st.params);
            let r = if want == ArgKind::Type {
                ck.check_kind(&e, &class)
            } else {
                ck.check(&e, &class)
            };
            if let Err(inner) = r {
                let e = TypeError {
                    rule: Rule::ImportArg,
                    detail: Some(format!(
                        "argument {} of `{}`: {}",
                        i + 1,
                        imp.path,
                        inner.detail.clone().unwrap_or_default()
                    )),
                    ..inner
                };
                return self.type_error(st, e, imp.span, None);
            }
            args.push((want, e));
        }
        for x in &info.exports {
            let name = match &imp.alias {
                Some(a) => format!("{a}.{}", x.name),
                None => x.name.clone(),
            };
            st.scope.bind(&name, reference(&x.key, x.is_type, &args));
        }
    }

    fn decl(&mut self, st: &mut ModuleState, d: &Decl) {
        let label = d.name.as_deref().unwrap_or("_");
        let (class, body) = match (st.scope.resolve(&d.class), st.scope.resolve(&d.body)) {
            (Ok(c), Ok(b)) => (c, b),
            (Err(n), _) | (_, Err(n)) => return self.unbound(st, d.span, &n),
        };
        let mut ck = self.checker(&st.params);
        let is_type = is_kind(&class);
        let mut failed = false;
        match ck.check_definition(&class, &body) {
            Ok(_) => {}
            Err(e) => {
                self.type_error(st, e, d.span, Some(label));
                failed = true;
            }
        }
        if !is_type && !failed {
            let fv = free_locals(&erase(&body));
            if let Some(p) = st.params.iter().find(|p| p.erased && fv.contains(&p.name)) {
                let e = TypeError {
                    rule: Rule::ErasedParam,
                    judgment: crate::typecheck::Judgment::Check,
                    expected: None,
                    found: None,
                    detail: Some(format!(
                        "erased parameter `{}` occurs in the erasure of the definition",
                        p.name.hint
                    )),
                    fuel_exhausted: false,
                    file: String::new(),
                    span: Span::default(),
                    decl: None,
                };
                self.type_error(st, e, d.span, Some(label));
            }
        }
        let Some(name) = &d.name else {
            return;
        };
        // Failed definitions are still added so that later ones can be checked.
        let key = def_key(&st.path, name);
        let (lc, lb) = lift(&st.params, &class, &body, is_type);
        self.menv.env.insert(key.clone(), lc, lb, is_type);
        let args: Vec<(ArgKind, Ex)> = st
            .params
            .iter()
            .map(|p| (p.arg_kind(), ex(Expr::FVar(p.name.clone()))))
            .collect();
        st.scope.bind(name, reference(&key, is_type, &args));
        st.exports.push(Export {
            name: name.clone(),
            key,
            is_type,
        });
    }
}

fn describe(k: ArgKind) -> &'static str {
    match k {
        ArgKind::Type => "a type argument (`·T`)",
        ArgKind::Erased => "an erased argument (`-t`)",
        ArgKind::Term => "a relevant term argument",
    }
}

/// Parse a module without elaborating it.
pub fn parse_source(path: &str, src: &Source) -> Result<SurfaceModule, Error> {
    parse_module(&src.text, Some(path)).map_err(|error| Error::Parse {
        file: src.file.clone(),
        error,
    })
}
