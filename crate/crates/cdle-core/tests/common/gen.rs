//! Random pure and annotated terms for the property suites.
//!
//! Terms are small enough that most of them normalize within a few hundred
//! β-steps; the properties treat fuel exhaustion as "no verdict".

#![allow(dead_code)]

use std::sync::Arc;

use cdle_core::erasure::{app, lam, var, Pure, P};
use cdle_core::syntax::ast::{ex, Binder, Ex, Expr, Name};
use proptest::prelude::*;

/// Pure terms whose free de Bruijn indices are all below `ctx`.
pub fn pure_in(ctx: u32, depth: u32) -> BoxedStrategy<P> {
    let leaf = if ctx == 0 {
        Just(lam("x", var(0))).boxed()
    } else {
        (0..ctx).prop_map(var).boxed()
    };
    if depth == 0 {
        return leaf;
    }
    prop_oneof![
        1 => leaf,
        2 => pure_in(ctx + 1, depth - 1).prop_map(|b| lam("x", b)),
        2 => (pure_in(ctx, depth - 1), pure_in(ctx, depth - 1)).prop_map(|(f, a)| app(f, a)),
    ]
    .boxed()
}

/// Closed pure terms.
pub fn closed(depth: u32) -> BoxedStrategy<P> {
    pure_in(0, depth)
}

/// β-normal forms `λ x1..xn. xi N1 .. Nk` under `ctx` enclosing binders.
pub fn normal_in(ctx: u32, depth: u32) -> BoxedStrategy<P> {
    (0u32..3)
        .prop_flat_map(move |binders| {
            let inner = ctx + binders;
            let head = if inner == 0 { 0 } else { inner };
            let args = if depth == 0 || inner == 0 {
                Just(Vec::new()).boxed()
            } else {
                prop::collection::vec(normal_in(inner, depth - 1), 0..3).boxed()
            };
            (Just(binders), 0..head.max(1), args)
        })
        .prop_map(move |(binders, h, args)| {
            let inner = ctx + binders;
            let mut t = if inner == 0 { lam("x", var(0)) } else { var(h) };
            for a in args {
                t = app(t, a);
            }
            for _ in 0..binders {
                t = lam("x", t);
            }
            t
        })
        .boxed()
}

/// Closed β-normal forms.
pub fn closed_normal(depth: u32) -> BoxedStrategy<P> {
    normal_in(0, depth)
}

/// A term-level type used as an annotation; its content never matters for
/// erasure.
fn some_type() -> Ex {
    let star = ex(Expr::Star);
    ex(Expr::Pi(Binder {
        name: Arc::from("X"),
        dom: star.clone(),
        body: star,
    }))
}

fn eq_type() -> Ex {
    let id = ex(Expr::Lam(Arc::from("x"), None, ex(Expr::BVar(0))));
    ex(Expr::Eq(id.clone(), id))
}

/// An untyped skeleton; `annotated` reads it as an annotated term.
#[derive(Clone, Debug)]
pub struct Shape {
    tag: u8,
    pick: u32,
    kids: Vec<Shape>,
}

pub fn shape(depth: u32) -> impl Strategy<Value = Shape> {
    let leaf = (any::<u8>(), any::<u32>()).prop_map(|(tag, pick)| Shape {
        tag,
        pick,
        kids: Vec::new(),
    });
    leaf.prop_recursive(depth, 48, 3, |inner| {
        (any::<u8>(), any::<u32>(), prop::collection::vec(inner, 1..=3))
            .prop_map(|(tag, pick, kids)| Shape { tag, pick, kids })
    })
}

/// Annotated terms mentioning the free name `free`.
pub fn annotated_with(free: Name, depth: u32) -> impl Strategy<Value = Ex> {
    shape(depth).prop_map(move |s| annotated(&s, &mut Vec::new(), &free))
}

/// Read a shape under a context of binders, `true` for relevant ones.
/// Erased binders only occur in erased positions, so the erasure never
/// invents fresh names.
pub fn annotated(s: &Shape, ctx: &mut Vec<bool>, free: &Name) -> Ex {
    let n = ctx.len();
    let relevant: Vec<u32> = (0..n as u32).filter(|i| ctx[n - 1 - *i as usize]).collect();
    let under = |ctx: &mut Vec<bool>, r: bool, k: &Shape| {
        ctx.push(r);
        let b = annotated(k, ctx, free);
        ctx.pop();
        b
    };
    let x = || Arc::from("x");
    match s.kids.as_slice() {
        [] => {
            let i = s.pick as usize % (relevant.len() + 1);
            match relevant.get(i) {
                Some(k) => ex(Expr::BVar(*k)),
                None => ex(Expr::FVar(free.clone())),
            }
        }
        [a] => match s.tag % 9 {
            0 => ex(Expr::Lam(x(), None, under(ctx, true, a))),
            1 => ex(Expr::Lam(x(), Some(some_type()), under(ctx, true, a))),
            2 => ex(Expr::BigLam(x(), Some(ex(Expr::Star)), under(ctx, false, a))),
            3 => ex(Expr::AppType(annotated(a, ctx, free), some_type())),
            4 => ex(Expr::Proj(annotated(a, ctx, free), 1 + (s.pick % 2) as u8)),
            5 => ex(Expr::Beta(annotated(a, ctx, free))),
            6 => ex(Expr::Delta(erased(a, ctx, free))),
            7 => ex(Expr::Varsigma(annotated(a, ctx, free))),
            _ => ex(Expr::Chi(some_type(), annotated(a, ctx, free))),
        },
        [a, b] => match s.tag % 5 {
            0 => ex(Expr::AppErased(annotated(a, ctx, free), erased(b, ctx, free))),
            1 => ex(Expr::Pair(annotated(a, ctx, free), erased(b, ctx, free))),
            2 => ex(Expr::Rho {
                eq: erased(a, ctx, free),
                name: Arc::from("z"),
                guide: eq_type(),
                body: annotated(b, ctx, free),
            }),
            3 => ex(Expr::Let {
                name: Arc::from("l"),
                ty: some_type(),
                val: annotated(a, ctx, free),
                body: under(ctx, true, b),
            }),
            _ => ex(Expr::App(annotated(a, ctx, free), annotated(b, ctx, free))),
        },
        [a, b, c, ..] => ex(Expr::Phi {
            eq: erased(a, ctx, free),
            term: erased(b, ctx, free),
            payload: annotated(c, ctx, free),
        }),
    }
}

/// Erased positions may mention every binder.
fn erased(s: &Shape, ctx: &[bool], free: &Name) -> Ex {
    annotated(s, &mut vec![true; ctx.len()], free)
}

/// `true` when `t` contains no β-redex.
pub fn beta_free(t: &Pure) -> bool {
    match t {
        Pure::Var(_) | Pure::Free(_) => true,
        Pure::Lam(_, b) => beta_free(b),
        Pure::App(f, a) => !matches!(**f, Pure::Lam(..)) && beta_free(f) && beta_free(a),
    }
}

fn occurs(t: &Pure, k: u32) -> bool {
    match t {
        Pure::Var(i) => *i == k,
        Pure::Free(_) => false,
        Pure::Lam(_, b) => occurs(b, k + 1),
        Pure::App(f, a) => occurs(f, k) || occurs(a, k),
    }
}

/// `true` when `t` contains no η-redex `λx. f x` with `x` not free in `f`.
pub fn eta_free(t: &Pure) -> bool {
    match t {
        Pure::Var(_) | Pure::Free(_) => true,
        Pure::Lam(_, b) => {
            if let Pure::App(f, x) = &**b {
                if matches!(**x, Pure::Var(0)) && !occurs(f, 0) {
                    return false;
                }
            }
            eta_free(b)
        }
        Pure::App(f, a) => eta_free(f) && eta_free(a),
    }
}

/// Contract the `n`-th β-redex in pre-order, if there is one.
pub fn contract_nth(t: &P, n: &mut usize) -> Option<P> {
    match &**t {
        Pure::Var(_) | Pure::Free(_) => None,
        Pure::Lam(h, b) => contract_nth(b, n).map(|b| Arc::new(Pure::Lam(h.clone(), b))),
        Pure::App(f, a) => {
            if let Pure::Lam(_, body) = &**f {
                if *n == 0 {
                    return Some(cdle_core::erasure::instantiate(body, a));
                }
                *n -= 1;
            }
            if let Some(f) = contract_nth(f, n) {
                return Some(app(f, a.clone()));
            }
            contract_nth(a, n).map(|a| app(f.clone(), a))
        }
    }
}
