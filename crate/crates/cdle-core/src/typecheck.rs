//! Bidirectional checking: kind formation, kinding of types, and synthesis
//! and checking of terms.
//!
//! Terms are locally nameless; every binder is opened with a fresh free name
//! before its body is inspected, so all expressions handled here are locally
//! closed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::bohm::{bohm_separable, DEFAULT_DEPTH, DEFAULT_NODE_FUEL};
use crate::conversion::{absurd_equation, ConvError, Converter};
use crate::env::Env;
use crate::erasure::{erase, free_locals};
use crate::reduction::DEFAULT_FUEL;
use crate::syntax::ast::{
    close, ex, free_locals as expr_free_locals, instantiate, is_kind, open, Binder, Ex, Expr,
    Name, Span,
};
use crate::syntax::print_expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    pub fuel: u64,
    pub bohm_depth: u32,
    pub bohm_fuel: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            fuel: DEFAULT_FUEL,
            bohm_depth: DEFAULT_DEPTH,
            bohm_fuel: DEFAULT_NODE_FUEL,
        }
    }
}

/// The typing rule whose premise failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    KindStar,
    KindPi,
    TypeVar,
    TypePi,
    TypeAll,
    TypeIota,
    TypeLam,
    TypeApp,
    TypeAppType,
    TypeEq,
    Var,
    App,
    AppErased,
    AppType,
    Lam,
    BigLam,
    Pair,
    Proj1,
    Proj2,
    Beta,
    Rho,
    Phi,
    Delta,
    Varsigma,
    Chi,
    Let,
    Conv,
    /// A checking-only construct in synthesis position.
    Annotation,
    /// An erased module parameter occurs in a definition's erasure.
    ErasedParam,
    ImportArg,
}

impl Rule {
    pub fn name(self) -> &'static str {
        use Rule::*;
        match self {
            KindStar => "kind-star",
            KindPi => "kind-pi",
            TypeVar => "type-var",
            TypePi => "type-pi",
            TypeAll => "type-all",
            TypeIota => "type-iota",
            TypeLam => "type-lam",
            TypeApp => "type-app",
            TypeAppType => "type-app-type",
            TypeEq => "type-eq",
            Var => "var",
            App => "app",
            AppErased => "app-erased",
            AppType => "app-type",
            Lam => "lam",
            BigLam => "Lam",
            Pair => "pair",
            Proj1 => "proj1",
            Proj2 => "proj2",
            Beta => "beta",
            Rho => "rho",
            Phi => "phi",
            Delta => "delta",
            Varsigma => "varsigma",
            Chi => "chi",
            Let => "let",
            Conv => "conv",
            Annotation => "annotation",
            ErasedParam => "erased-param",
            ImportArg => "import-arg",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Judgment {
    KindFormation,
    Kinding,
    Synth,
    Check,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeError {
    pub rule: Rule,
    pub judgment: Judgment,
    pub expected: Option<String>,
    pub found: Option<String>,
    pub detail: Option<String>,
    /// The failure came from running out of fuel, not from a mismatch.
    pub fuel_exhausted: bool,
    /// Filled in by module elaboration.
    pub file: String,
    pub span: Span,
    pub decl: Option<String>,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}", self.rule)?;
        if let Some(d) = &self.decl {
            write!(f, " in `{d}`")?;
        }
        if let Some(d) = &self.detail {
            write!(f, ": {d}")?;
        }
        if let Some(e) = &self.expected {
            write!(f, "\n  expected: {e}")?;
        }
        if let Some(x) = &self.found {
            write!(f, "\n  found:    {x}")?;
        }
        Ok(())
    }
}

impl core::error::Error for TypeError {}

pub type TResult<T> = Result<T, TypeError>;

fn err(rule: Rule, judgment: Judgment, detail: impl Into<String>) -> TypeError {
    TypeError {
        rule,
        judgment,
        expected: None,
        found: None,
        detail: Some(detail.into()),
        fuel_exhausted: false,
        file: String::new(),
        span: Span::default(),
        decl: None,
    }
}

fn mismatch(rule: Rule, judgment: Judgment, detail: &str, expected: &Ex, found: &Ex) -> TypeError {
    TypeError {
        expected: Some(print_expr(expected)),
        found: Some(print_expr(found)),
        ..err(rule, judgment, detail)
    }
}

fn fuel_err(rule: Rule, judgment: Judgment) -> TypeError {
    TypeError {
        fuel_exhausted: true,
        ..err(rule, judgment, "conversion fuel exhausted")
    }
}

#[cfg(test)]
fn fvar(n: &Name) -> Ex {
    ex(Expr::FVar(n.clone()))
}

struct Local {
    name: Name,
    class: Ex,
}

pub struct Checker<'a> {
    env: &'a Env,
    ctx: Vec<Local>,
    pub cfg: Config,
}

impl<'a> Checker<'a> {
    pub fn new(env: &'a Env, cfg: Config) -> Self {
        Checker {
            env,
            ctx: Vec::new(),
            cfg,
        }
    }

    /// Extend the context; classes may mention earlier entries.
    pub fn push(&mut self, name: Name, class: Ex) {
        self.ctx.push(Local { name, class });
    }

    pub fn pop(&mut self) {
        self.ctx.pop();
    }

    fn scoped<T>(&mut self, name: &Name, class: Ex, f: impl FnOnce(&mut Self) -> T) -> T {
        self.push(name.clone(), class);
        let r = f(self);
        self.pop();
        r
    }

    fn lookup(&self, n: &Name) -> Option<&Ex> {
        self.ctx.iter().rev().find(|l| l.name == *n).map(|l| &l.class)
    }

    fn converter(&self) -> Converter<'a> {
        Converter {
            env: self.env,
            fuel: self.cfg.fuel,
        }
    }

    pub fn whnf(&self, t: &Ex, rule: Rule, j: Judgment) -> TResult<Ex> {
        self.converter().type_whnf(t).map_err(|_| fuel_err(rule, j))
    }

    pub fn convertible(&self, a: &Ex, b: &Ex, rule: Rule, j: Judgment) -> TResult<bool> {
        self.converter()
            .convert(a, b)
            .map_err(|ConvError::FuelExhausted| fuel_err(rule, j))
    }

    fn terms_equal(&self, a: &Ex, b: &Ex, rule: Rule, j: Judgment) -> TResult<bool> {
        self.converter()
            .terms_equal(a, b)
            .map_err(|ConvError::FuelExhausted| fuel_err(rule, j))
    }

    fn require_conv(&self, expected: &Ex, found: &Ex, rule: Rule, j: Judgment, what: &str) -> TResult<()> {
        if self.convertible(expected, found, rule, j)? {
            Ok(())
        } else {
            Err(mismatch(rule, j, what, expected, found))
        }
    }

    /// `FV(t) ⊆ dom(Γ)`.
    fn scoped_in_context(&self, t: &Ex, rule: Rule, j: Judgment) -> TResult<()> {
        let mut names = Vec::new();
        expr_free_locals(t, &mut names);
        match names.iter().find(|n| self.lookup(n).is_none()) {
            Some(n) => Err(err(rule, j, format!("variable `{}` is not in scope", n.hint))),
            None => Ok(()),
        }
    }

    // Kinds.

    pub fn check_kind_wf(&mut self, k: &Ex) -> TResult<()> {
        match &**k {
            Expr::Star => Ok(()),
            Expr::Pi(b) => {
                if is_kind(&b.dom) {
                    self.check_kind_wf(&b.dom)?;
                } else {
                    self.check_type(&b.dom)
                        .map_err(|e| TypeError { rule: Rule::KindPi, ..e })?;
                }
                let n = Name::fresh(&b.name);
                let body = open(&b.body, &n);
                self.scoped(&n, b.dom.clone(), |c| c.check_kind_wf(&body))
            }
            _ => Err(TypeError {
                found: Some(print_expr(k)),
                ..err(Rule::KindStar, Judgment::KindFormation, "not a kind")
            }),
        }
    }

    /// `Γ ⊢ T ⇒ ★`.
    pub fn check_type(&mut self, t: &Ex) -> TResult<()> {
        self.check_kind(t, &ex(Expr::Star))
    }

    /// Check a type constructor against a kind. Unannotated type-level
    /// abstractions take their domain from the kind.
    pub fn check_kind(&mut self, t: &Ex, k: &Ex) -> TResult<()> {
        if let (Expr::Lam(x, None, body), Expr::Pi(kb)) = (&**t, &**k) {
            let n = Name::fresh(x);
            let body = open(body, &n);
            let kbody = open(&kb.body, &n);
            return self.scoped(&n, kb.dom.clone(), |c| c.check_kind(&body, &kbody));
        }
        let found = self.synth_kind(t)?;
        self.require_conv(k, &found, Rule::Conv, Judgment::Kinding, "kind mismatch")
    }

    pub fn synth_kind(&mut self, t: &Ex) -> TResult<Ex> {
        let j = Judgment::Kinding;
        match &**t {
            Expr::FVar(n) => match self.lookup(n) {
                Some(k) if is_kind(k) => Ok(k.clone()),
                Some(_) => Err(err(Rule::TypeVar, j, format!("`{}` is a term variable, not a type", n.hint))),
                None => Err(err(Rule::TypeVar, j, format!("unbound variable `{}`", n.hint))),
            },
            Expr::Const(key) => match self.env.get(key) {
                Some(d) if d.is_type => Ok(d.class.clone()),
                Some(_) => Err(err(Rule::TypeVar, j, format!("`{key}` is a term, not a type"))),
                None => Err(err(Rule::TypeVar, j, format!("unknown definition `{key}`"))),
            },
            Expr::Pi(b) | Expr::Iota(b) => {
                let rule = if matches!(**t, Expr::Pi(_)) { Rule::TypePi } else { Rule::TypeIota };
                self.check_type(&b.dom).map_err(|e| relabel(e, rule))?;
                let n = Name::fresh(&b.name);
                let body = open(&b.body, &n);
                self.scoped(&n, b.dom.clone(), |c| c.check_type(&body))?;
                Ok(ex(Expr::Star))
            }
            Expr::All(b) => {
                if is_kind(&b.dom) {
                    self.check_kind_wf(&b.dom)?;
                } else {
                    self.check_type(&b.dom).map_err(|e| relabel(e, Rule::TypeAll))?;
                }
                let n = Name::fresh(&b.name);
                let body = open(&b.body, &n);
                self.scoped(&n, b.dom.clone(), |c| c.check_type(&body))?;
                Ok(ex(Expr::Star))
            }
            Expr::Lam(x, Some(d), body) => {
                if is_kind(d) {
                    self.check_kind_wf(d)?;
                } else {
                    self.check_type(d).map_err(|e| relabel(e, Rule::TypeLam))?;
                }
                let n = Name::fresh(x);
                let body = open(body, &n);
                let k = self.scoped(&n, d.clone(), |c| c.synth_kind(&body))?;
                Ok(ex(Expr::Pi(Binder {
                    name: x.clone(),
                    dom: d.clone(),
                    body: close(&k, &n),
                })))
            }
            Expr::Lam(..) => Err(err(
                Rule::TypeLam,
                j,
                "type-level λ needs a domain annotation here",
            )),
            Expr::App(f, a) => {
                let k = self.synth_kind(f)?;
                match &*k {
                    Expr::Pi(b) if !is_kind(&b.dom) => {
                        self.check(a, &b.dom)?;
                        Ok(instantiate(&b.body, a))
                    }
                    _ => Err(TypeError {
                        found: Some(print_expr(&k)),
                        ..err(Rule::TypeApp, j, "type constructor does not take a term argument")
                    }),
                }
            }
            Expr::AppType(f, a) => {
                let k = self.synth_kind(f)?;
                match &*k {
                    Expr::Pi(b) if is_kind(&b.dom) => {
                        self.check_kind(a, &b.dom).map_err(|e| relabel(e, Rule::TypeAppType))?;
                        Ok(instantiate(&b.body, a))
                    }
                    _ => Err(TypeError {
                        found: Some(print_expr(&k)),
                        ..err(Rule::TypeAppType, j, "type constructor does not take a type argument")
                    }),
                }
            }
            Expr::Eq(a, b) => {
                self.scoped_in_context(a, Rule::TypeEq, j)?;
                self.scoped_in_context(b, Rule::TypeEq, j)?;
                Ok(ex(Expr::Star))
            }
            _ => Err(TypeError {
                found: Some(print_expr(t)),
                ..err(Rule::TypeVar, j, "not a type")
            }),
        }
    }

    // Terms.

    pub fn synth(&mut self, t: &Ex) -> TResult<Ex> {
        let j = Judgment::Synth;
        match &**t {
            Expr::FVar(n) => match self.lookup(n) {
                Some(c) if !is_kind(c) => Ok(c.clone()),
                Some(_) => Err(err(Rule::Var, j, format!("`{}` is a type variable, not a term", n.hint))),
                None => Err(err(Rule::Var, j, format!("unbound variable `{}`", n.hint))),
            },
            Expr::Const(key) => match self.env.get(key) {
                Some(d) if !d.is_type => Ok(d.class.clone()),
                Some(_) => Err(err(Rule::Var, j, format!("`{key}` is a type, not a term"))),
                None => Err(err(Rule::Var, j, format!("unknown definition `{key}`"))),
            },
            Expr::App(f, a) => {
                let ft = self.synth(f)?;
                let w = self.whnf(&ft, Rule::App, j)?;
                match &*w {
                    Expr::Pi(b) => {
                        self.check(a, &b.dom)?;
                        Ok(instantiate(&b.body, a))
                    }
                    _ => Err(TypeError {
                        found: Some(print_expr(&ft)),
                        ..err(Rule::App, j, "applied term does not have a Π type")
                    }),
                }
            }
            Expr::AppErased(f, a) => {
                let ft = self.synth(f)?;
                let w = self.whnf(&ft, Rule::AppErased, j)?;
                match &*w {
                    Expr::All(b) if !is_kind(&b.dom) => {
                        self.check(a, &b.dom)?;
                        Ok(instantiate(&b.body, a))
                    }
                    _ => Err(TypeError {
                        found: Some(print_expr(&ft)),
                        ..err(Rule::AppErased, j, "erased argument to a term without an implicit product type")
                    }),
                }
            }
            Expr::AppType(f, a) => {
                let ft = self.synth(f)?;
                let w = self.whnf(&ft, Rule::AppType, j)?;
                match &*w {
                    Expr::All(b) if is_kind(&b.dom) => {
                        self.check_kind(a, &b.dom).map_err(|e| relabel(e, Rule::AppType))?;
                        Ok(instantiate(&b.body, a))
                    }
                    _ => Err(TypeError {
                        found: Some(print_expr(&ft)),
                        ..err(Rule::AppType, j, "type argument to a term without a type quantifier")
                    }),
                }
            }
            Expr::Proj(p, i) => {
                let rule = if *i == 1 { Rule::Proj1 } else { Rule::Proj2 };
                let pt = self.synth(p)?;
                let w = self.whnf(&pt, rule, j)?;
                match &*w {
                    Expr::Iota(b) if *i == 1 => Ok(b.dom.clone()),
                    Expr::Iota(b) => Ok(instantiate(&b.body, &ex(Expr::Proj(p.clone(), 1)))),
                    _ => Err(TypeError {
                        found: Some(print_expr(&pt)),
                        ..err(rule, j, "projection from a term without an intersection type")
                    }),
                }
            }
            Expr::Varsigma(e) => {
                let et = self.synth(e)?;
                match &*self.whnf(&et, Rule::Varsigma, j)? {
                    Expr::Eq(a, b) => Ok(ex(Expr::Eq(b.clone(), a.clone()))),
                    _ => Err(TypeError {
                        found: Some(print_expr(&et)),
                        ..err(Rule::Varsigma, j, "ς needs an equation")
                    }),
                }
            }
            Expr::Phi { eq, term, payload } => {
                let ty = self.synth(term)?;
                self.phi_premises(eq, term, payload, j)?;
                Ok(ty)
            }
            Expr::Chi(ty, e) => {
                self.check_type(ty).map_err(|e| relabel(e, Rule::Chi))?;
                self.check(e, ty)?;
                Ok(ty.clone())
            }
            Expr::Let { ty, val, body, .. } => {
                let body = self.let_body(ty, val, body)?;
                self.synth(&body)
            }
            Expr::Rho { .. }
            | Expr::Beta(_)
            | Expr::Delta(_)
            | Expr::Lam(..)
            | Expr::BigLam(..)
            | Expr::Pair(..) => Err(err(Rule::Annotation, j, "annotation required (use χ)")),
            Expr::Ref(s) => Err(err(Rule::Var, j, format!("unresolved name `{s}`"))),
            Expr::BVar(_) => Err(err(Rule::Var, j, "loose bound variable")),
            Expr::Star | Expr::Pi(_) | Expr::All(_) | Expr::Iota(_) | Expr::Eq(..) => {
                Err(err(Rule::Var, j, "a type cannot be used as a term"))
            }
        }
    }

    fn phi_premises(&mut self, eq: &Ex, term: &Ex, payload: &Ex, j: Judgment) -> TResult<()> {
        self.scoped_in_context(payload, Rule::Phi, j)?;
        let want = ex(Expr::Eq(term.clone(), payload.clone()));
        self.check(eq, &want).map_err(|e| relabel(e, Rule::Phi))
    }

    /// Let-bound variables are transparent: the body sees `χ T - t`.
    fn let_body(&mut self, ty: &Ex, val: &Ex, body: &Ex) -> TResult<Ex> {
        self.check_type(ty).map_err(|e| relabel(e, Rule::Let))?;
        self.check(val, ty)?;
        Ok(instantiate(body, &ex(Expr::Chi(ty.clone(), val.clone()))))
    }

    pub fn check(&mut self, t: &Ex, expected: &Ex) -> TResult<()> {
        let j = Judgment::Check;
        match &**t {
            Expr::Lam(x, ann, body) => {
                let w = self.whnf(expected, Rule::Lam, j)?;
                let Expr::Pi(b) = &*w else {
                    return Err(TypeError {
                        found: Some(print_expr(expected)),
                        ..err(Rule::Lam, j, "λ checked against a type that is not a Π type")
                    });
                };
                if let Some(a) = ann {
                    self.check_type(a).map_err(|e| relabel(e, Rule::Lam))?;
                    self.require_conv(&b.dom, a, Rule::Lam, j, "annotation differs from the domain")?;
                }
                let n = Name::fresh(x);
                let body = open(body, &n);
                let cod = open(&b.body, &n);
                self.scoped(&n, b.dom.clone(), |c| c.check(&body, &cod))
            }
            Expr::BigLam(x, ann, body) => {
                let w = self.whnf(expected, Rule::BigLam, j)?;
                let Expr::All(b) = &*w else {
                    return Err(TypeError {
                        found: Some(print_expr(expected)),
                        ..err(Rule::BigLam, j, "Λ checked against a type that is not an implicit product")
                    });
                };
                if let Some(a) = ann {
                    if is_kind(a) {
                        self.check_kind_wf(a)?;
                    } else {
                        self.check_type(a).map_err(|e| relabel(e, Rule::BigLam))?;
                    }
                    self.require_conv(&b.dom, a, Rule::BigLam, j, "annotation differs from the domain")?;
                }
                let n = Name::fresh(x);
                let body = open(body, &n);
                let cod = open(&b.body, &n);
                self.scoped(&n, b.dom.clone(), |c| c.check(&body, &cod))?;
                if !is_kind(&b.dom) && free_locals(&erase(&body)).contains(&n) {
                    return Err(err(
                        Rule::BigLam,
                        j,
                        format!("erased variable `{x}` occurs in the erasure of the body"),
                    ));
                }
                Ok(())
            }
            Expr::Pair(a, b) => {
                let w = self.whnf(expected, Rule::Pair, j)?;
                let Expr::Iota(ib) = &*w else {
                    return Err(TypeError {
                        found: Some(print_expr(expected)),
                        ..err(Rule::Pair, j, "pair checked against a type that is not an intersection")
                    });
                };
                self.check(a, &ib.dom)?;
                self.check(b, &instantiate(&ib.body, a))?;
                if !self.terms_equal(a, b, Rule::Pair, j)? {
                    return Err(mismatch(
                        Rule::Pair,
                        j,
                        "components have different erasures",
                        a,
                        b,
                    ));
                }
                Ok(())
            }
            Expr::Beta(payload) => {
                let w = self.whnf(expected, Rule::Beta, j)?;
                let Expr::Eq(l, r) = &*w else {
                    return Err(TypeError {
                        found: Some(print_expr(expected)),
                        ..err(Rule::Beta, j, "β checked against a type that is not an equation")
                    });
                };
                if !self.terms_equal(l, r, Rule::Beta, j)? {
                    return Err(mismatch(Rule::Beta, j, "sides are not βη-equal", l, r));
                }
                self.scoped_in_context(payload, Rule::Beta, j)
            }
            Expr::Rho { eq, guide, body, .. } => {
                let et = self.synth(eq).map_err(|e| relabel_if_annotation(e, Rule::Rho))?;
                let w = self.whnf(&et, Rule::Rho, j)?;
                let Expr::Eq(l, r) = &*w else {
                    return Err(TypeError {
                        found: Some(print_expr(&et)),
                        ..err(Rule::Rho, j, "ρ needs a proof of an equation")
                    });
                };
                let g_r = instantiate(guide, r);
                self.check_type(&g_r).map_err(|e| relabel(e, Rule::Rho))?;
                self.check(body, &g_r)?;
                let g_l = instantiate(guide, l);
                self.require_conv(expected, &g_l, Rule::Rho, j, "guide does not match the expected type")
            }
            Expr::Phi { eq, term, payload } => {
                self.check(term, expected)?;
                self.phi_premises(eq, term, payload, j)
            }
            Expr::Delta(e) => {
                let et = self.synth(e)?;
                if self.convertible(&absurd_equation(), &et, Rule::Delta, j)? {
                    return Ok(());
                }
                let w = self.whnf(&et, Rule::Delta, j)?;
                let Expr::Eq(l, r) = &*w else {
                    return Err(TypeError {
                        found: Some(print_expr(&et)),
                        ..err(Rule::Delta, j, "δ needs a proof of an equation")
                    });
                };
                let verdict = bohm_separable(
                    &erase(l),
                    &erase(r),
                    self.env,
                    self.cfg.bohm_depth,
                    self.cfg.bohm_fuel,
                );
                if verdict.is_separable() {
                    Ok(())
                } else {
                    Err(mismatch(
                        Rule::Delta,
                        j,
                        "sides could not be separated",
                        &absurd_equation(),
                        &et,
                    ))
                }
            }
            Expr::Let { ty, val, body, .. } => {
                let body = self.let_body(ty, val, body)?;
                self.check(&body, expected)
            }
            _ => {
                let found = self.synth(t)?;
                self.require_conv(expected, &found, Rule::Conv, j, "type mismatch")
            }
        }
    }

    /// Check a definition: a type against its kind, or a term against its
    /// type. Returns whether the definition is a type.
    pub fn check_definition(&mut self, class: &Ex, body: &Ex) -> TResult<bool> {
        if is_kind(class) {
            self.check_kind_wf(class)?;
            self.check_kind(body, class)?;
            Ok(true)
        } else {
            self.check_type(class)?;
            self.check(body, class)?;
            Ok(false)
        }
    }
}

fn relabel(e: TypeError, rule: Rule) -> TypeError {
    if e.rule == Rule::Conv {
        TypeError { rule, ..e }
    } else {
        e
    }
}

fn relabel_if_annotation(e: TypeError, rule: Rule) -> TypeError {
    if e.rule == Rule::Annotation {
        TypeError { rule, ..e }
    } else {
        e
    }
}
