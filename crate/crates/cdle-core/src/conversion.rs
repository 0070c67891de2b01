//! Convertibility of kinds and type constructors.
//!
//! Kinds are compared structurally. Types are reduced to weak head normal
//! form and then compared head by head; term arguments and the sides of
//! equality types are compared by βη-equality of their erasures.

use crate::env::Env;
use crate::erasure::{erase, P};
use crate::reduction::{beta_eta_equal, DEFAULT_FUEL};
use crate::syntax::ast::{
    alpha_eq, ex, instantiate, is_kind, open, rebuild, spine, ArgKind, Binder, Ex, Expr, Name,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConvError {
    #[error("conversion fuel exhausted")]
    FuelExhausted,
}

pub type ConvResult<T> = Result<T, ConvError>;

pub struct Converter<'a> {
    pub env: &'a Env,
    /// β-steps allowed per βη query and head reductions per type WHNF.
    pub fuel: u64,
}

impl<'a> Converter<'a> {
    pub fn new(env: &'a Env) -> Self {
        Converter {
            env,
            fuel: DEFAULT_FUEL,
        }
    }

    /// Head-reduce a type constructor: β at the type level and unfolding of
    /// type definitions in head position (applied or not).
    pub fn type_whnf(&self, t: &Ex) -> ConvResult<Ex> {
        let mut cur = t.clone();
        let mut fuel = self.fuel;
        loop {
            let (head, args) = spine(&cur);
            let next = match &*head {
                Expr::Lam(_, _, body) if !args.is_empty() => {
                    rebuild(instantiate(body, &args[0].1), &args[1..])
                }
                Expr::Const(k) => match self.env.type_body(k) {
                    Some(b) => rebuild(b, &args),
                    None => return Ok(cur),
                },
                _ => return Ok(cur),
            };
            if fuel == 0 {
                return Err(ConvError::FuelExhausted);
            }
            fuel -= 1;
            cur = next;
        }
    }

    pub fn pure_equal(&self, a: &P, b: &P) -> ConvResult<bool> {
        beta_eta_equal(a, b, &self.env.normal_defs(), self.fuel)
            .map_err(|_| ConvError::FuelExhausted)
    }

    /// `|a| =βη |b|`.
    pub fn terms_equal(&self, a: &Ex, b: &Ex) -> ConvResult<bool> {
        if alpha_eq(a, b) {
            return Ok(true);
        }
        self.pure_equal(&erase(a), &erase(b))
    }

    /// `a ≅ b` for two kinds or two type constructors.
    pub fn convert(&self, a: &Ex, b: &Ex) -> ConvResult<bool> {
        if alpha_eq(a, b) {
            return Ok(true);
        }
        match (is_kind(a), is_kind(b)) {
            (true, true) => self.kinds(a, b),
            (false, false) => self.types(a, b),
            _ => Ok(false),
        }
    }

    fn kinds(&self, a: &Ex, b: &Ex) -> ConvResult<bool> {
        match (&**a, &**b) {
            (Expr::Star, Expr::Star) => Ok(true),
            (Expr::Pi(x), Expr::Pi(y)) => self.binders(x, y),
            _ => Ok(false),
        }
    }

    fn binders(&self, x: &Binder, y: &Binder) -> ConvResult<bool> {
        if !self.convert(&x.dom, &y.dom)? {
            return Ok(false);
        }
        let n = Name::fresh(&x.name);
        self.convert(&open(&x.body, &n), &open(&y.body, &n))
    }

    fn args(&self, xs: &[(ArgKind, Ex)], ys: &[(ArgKind, Ex)]) -> ConvResult<bool> {
        if xs.len() != ys.len() {
            return Ok(false);
        }
        for ((kx, x), (ky, y)) in xs.iter().zip(ys) {
            if kx != ky {
                return Ok(false);
            }
            let ok = match kx {
                ArgKind::Type => self.convert(x, y)?,
                ArgKind::Term | ArgKind::Erased => self.terms_equal(x, y)?,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn types(&self, a: &Ex, b: &Ex) -> ConvResult<bool> {
        // Same definition applied to convertible arguments: no need to unfold.
        let (ha, aa) = spine(a);
        let (hb, ab) = spine(b);
        if let (Expr::Const(x), Expr::Const(y)) = (&*ha, &*hb) {
            if x == y && self.args(&aa, &ab)? {
                return Ok(true);
            }
        }
        let a = self.type_whnf(a)?;
        let b = self.type_whnf(b)?;
        if alpha_eq(&a, &b) {
            return Ok(true);
        }
        use Expr::*;
        match (&*a, &*b) {
            (Pi(x), Pi(y)) | (All(x), All(y)) | (Iota(x), Iota(y)) => self.binders(x, y),
            (Lam(n, dx, bx), Lam(_, dy, by)) => {
                if let (Some(dx), Some(dy)) = (dx, dy) {
                    if !self.convert(dx, dy)? {
                        return Ok(false);
                    }
                }
                let v = Name::fresh(n);
                self.convert(&open(bx, &v), &open(by, &v))
            }
            (Eq(l1, r1), Eq(l2, r2)) => Ok(self.terms_equal(l1, l2)? && self.terms_equal(r1, r2)?),
            _ => {
                let (ha, aa) = spine(&a);
                let (hb, ab) = spine(&b);
                let heads = match (&*ha, &*hb) {
                    (FVar(x), FVar(y)) => x == y,
                    (Const(x), Const(y)) => x == y,
                    _ => false,
                };
                Ok(heads && self.args(&aa, &ab)?)
            }
        }
    }
}

/// The canonical absurd equation `{λx.λy.x ≃ λx.λy.y}`.
pub fn absurd_equation() -> Ex {
    let k = ex(Expr::Lam("x".into(), None, ex(Expr::Lam("y".into(), None, ex(Expr::BVar(1))))));
    let ki = ex(Expr::Lam("x".into(), None, ex(Expr::Lam("y".into(), None, ex(Expr::BVar(0))))));
    ex(Expr::Eq(k, ki))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use alloc::sync::Arc;

    /// Parse and replace every `Ref` by a `Const` of the same name.
    fn t(s: &str) -> Ex {
        fn go(e: &Ex) -> Ex {
            use Expr::*;
            let b = |x: &Binder| Binder {
                name: x.name.clone(),
                dom: go(&x.dom),
                body: go(&x.body),
            };
            ex(match &**e {
                Ref(s) => Const(s.clone()),
                Pi(x) => Pi(b(x)),
                All(x) => All(b(x)),
                Iota(x) => Iota(b(x)),
                Lam(n, d, body) => Lam(n.clone(), d.as_ref().map(go), go(body)),
                BigLam(n, d, body) => BigLam(n.clone(), d.as_ref().map(go), go(body)),
                App(f, a) => App(go(f), go(a)),
                AppType(f, a) => AppType(go(f), go(a)),
                AppErased(f, a) => AppErased(go(f), go(a)),
                Eq(f, a) => Eq(go(f), go(a)),
                other => other.clone(),
            })
        }
        go(&parse_term(s).unwrap())
    }

    fn env() -> Env {
        let mut env = Env::default();
        env.insert(Arc::from("Top"), t("★"), t("{ λ x. x ≃ λ x. x }"), true);
        env.insert(Arc::from("Nat"), t("★"), t("∀ X: ★. X"), true);
        env.insert(
            Arc::from("NatF"),
            t("★ ➔ ★"),
            t("λ N: ★. ∀ X: ★. X ➔ (N ➔ X) ➔ X"),
            true,
        );
        env.insert(Arc::from("pred"), t("Nat ➔ Nat"), t("λ n. n"), false);
        env.insert(Arc::from("suc"), t("Nat ➔ Nat"), t("λ n. n"), false);
        env
    }

    #[test]
    fn whnf_examples() {
        let env = env();
        let c = Converter::new(&env);
        let w = c.type_whnf(&t("NatF ·Nat")).unwrap();
        assert!(alpha_eq(&w, &t("∀ X: ★. X ➔ (Nat ➔ X) ➔ X")));
        let w = c.type_whnf(&t("Top")).unwrap();
        assert!(alpha_eq(&w, &t("{ λ x. x ≃ λ x. x }")));
        let a = t("∀ X: ★. X");
        assert!(alpha_eq(&c.type_whnf(&a).unwrap(), &a));
        let w = c.type_whnf(&t("(λ N: ★. ∀ X: ★. X ➔ (N ➔ X) ➔ X) ·Nat")).unwrap();
        assert!(alpha_eq(&c.type_whnf(&w).unwrap(), &w));
    }

    #[test]
    fn convert_examples() {
        let env = env();
        let c = Converter::new(&env);
        let m = ex(Expr::FVar(Name::fresh("m")));
        let n = ex(Expr::FVar(Name::fresh("n")));
        let pred_suc = |x: &Ex| {
            ex(Expr::App(
                ex(Expr::Const("pred".into())),
                ex(Expr::App(ex(Expr::Const("suc".into())), x.clone())),
            ))
        };
        let lhs = ex(Expr::Eq(m.clone(), n.clone()));
        let rhs = ex(Expr::Eq(pred_suc(&m), pred_suc(&n)));
        assert!(c.convert(&lhs, &rhs).unwrap());
        assert!(c.convert(&t("NatF ·Nat"), &t("∀ X: ★. X ➔ (Nat ➔ X) ➔ X")).unwrap());
        assert!(!c.convert(&t("∀ X: ★. X"), &t("Π x: Top. Top")).unwrap());
        assert!(!c.convert(&t("∀ x: Top. Top"), &t("Π x: Top. Top")).unwrap());
        assert!(c.convert(&t("★ ➔ ★"), &t("Π X: ★. ★")).unwrap());
        assert!(!c.convert(&absurd_equation(), &t("Top")).unwrap());
    }
}
