//! Annotated terms, types and kinds share one locally nameless tree.
//!
//! Bound variables are de Bruijn indices (`BVar`). Variables introduced while
//! checking under a binder are `FVar`s carrying a globally unique id. The parser
//! leaves every identifier it cannot bind locally as a `Ref`; module
//! elaboration replaces those with `Const` (a transparent global definition),
//! an `FVar` (a module parameter), or an application of a `Const` to
//! parameters.

use alloc::string::String;
use alloc::sync::Arc;
use core::sync::atomic::{AtomicU64, Ordering};

pub type Ex = Arc<Expr>;

/// Byte range in a source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

static NEXT_NAME: AtomicU64 = AtomicU64::new(1);

/// A free local variable. Identity is the id; the hint is for printing.
#[derive(Clone, Debug)]
pub struct Name {
    pub hint: Arc<str>,
    pub id: u64,
}

impl Name {
    pub fn fresh(hint: &str) -> Name {
        let hint = if hint == "_" { "x" } else { hint };
        Name {
            hint: Arc::from(hint),
            id: NEXT_NAME.fetch_add(1, Ordering::Relaxed),
        }
    }
}

impl PartialEq for Name {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl Eq for Name {}
impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Name {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.id.cmp(&other.id)
    }
}

/// `Π`, `∀` and `ι` binders: `dom` is outside the scope, `body` inside.
#[derive(Clone, Debug)]
pub struct Binder {
    pub name: Arc<str>,
    pub dom: Ex,
    pub body: Ex,
}

#[derive(Clone, Debug)]
pub enum Expr {
    Star,
    BVar(u32),
    FVar(Name),
    Ref(Arc<str>),
    Const(Arc<str>),
    Pi(Binder),
    All(Binder),
    Iota(Binder),
    /// Term `λ x. t`, annotated `λ x: T. t`, or type-level `λ X: κ. T`.
    Lam(Arc<str>, Option<Ex>, Ex),
    /// Erased abstraction `Λ x. t` over a type or an erased term.
    BigLam(Arc<str>, Option<Ex>, Ex),
    App(Ex, Ex),
    AppErased(Ex, Ex),
    AppType(Ex, Ex),
    Eq(Ex, Ex),
    /// `β{t}`; the parser fills in `λ x. x` when the payload is omitted.
    Beta(Ex),
    /// `ρ eq @x.guide - body`; `guide` binds `x`.
    Rho {
        eq: Ex,
        name: Arc<str>,
        guide: Ex,
        body: Ex,
    },
    /// `φ eq - term {payload}`.
    Phi { eq: Ex, term: Ex, payload: Ex },
    Delta(Ex),
    Varsigma(Ex),
    Chi(Ex, Ex),
    Pair(Ex, Ex),
    Proj(Ex, u8),
    /// `[x ◂ ty = val] - body`; `body` binds `x`.
    Let {
        name: Arc<str>,
        ty: Ex,
        val: Ex,
        body: Ex,
    },
}

pub fn ex(e: Expr) -> Ex {
    Arc::new(e)
}

pub fn identity_term() -> Ex {
    ex(Expr::Lam(Arc::from("x"), None, ex(Expr::BVar(0))))
}

/// A classifier is a kind when it is `★` or a `Π` ending in `★`.
pub fn is_kind(e: &Expr) -> bool {
    match e {
        Expr::Star => true,
        Expr::Pi(b) => is_kind(&b.body),
        _ => false,
    }
}

/// Generic traversal that rebuilds only the parts that change.
/// `f` sees every leaf variable node with the current binder depth.
fn map_leaves(e: &Ex, depth: u32, f: &mut dyn FnMut(&Expr, u32) -> Option<Ex>) -> Option<Ex> {
    use Expr::*;
    fn pair(
        a: &Ex,
        b: &Ex,
        da: u32,
        db: u32,
        f: &mut dyn FnMut(&Expr, u32) -> Option<Ex>,
    ) -> Option<(Ex, Ex)> {
        let na = map_leaves(a, da, f);
        let nb = map_leaves(b, db, f);
        if na.is_none() && nb.is_none() {
            None
        } else {
            Some((na.unwrap_or_else(|| a.clone()), nb.unwrap_or_else(|| b.clone())))
        }
    }
    match &**e {
        Star | Const(_) | Ref(_) => None,
        BVar(_) | FVar(_) => f(e, depth),
        Pi(b) | All(b) | Iota(b) => {
            let (dom, body) = pair(&b.dom, &b.body, depth, depth + 1, f)?;
            let nb = Binder {
                name: b.name.clone(),
                dom,
                body,
            };
            Some(ex(match &**e {
                Pi(_) => Pi(nb),
                All(_) => All(nb),
                _ => Iota(nb),
            }))
        }
        Lam(n, d, body) | BigLam(n, d, body) => {
            let nd = d.as_ref().map(|d| map_leaves(d, depth, f));
            let nbody = map_leaves(body, depth + 1, f);
            let d_changed = matches!(nd, Some(Some(_)));
            if !d_changed && nbody.is_none() {
                return None;
            }
            let d2 = match (d, nd) {
                (Some(_), Some(Some(x))) => Some(x),
                (Some(old), _) => Some(old.clone()),
                (None, _) => None,
            };
            let b2 = nbody.unwrap_or_else(|| body.clone());
            Some(ex(if matches!(&**e, Lam(..)) {
                Lam(n.clone(), d2, b2)
            } else {
                BigLam(n.clone(), d2, b2)
            }))
        }
        App(a, b) => pair(a, b, depth, depth, f).map(|(a, b)| ex(App(a, b))),
        AppErased(a, b) => pair(a, b, depth, depth, f).map(|(a, b)| ex(AppErased(a, b))),
        AppType(a, b) => pair(a, b, depth, depth, f).map(|(a, b)| ex(AppType(a, b))),
        Eq(a, b) => pair(a, b, depth, depth, f).map(|(a, b)| ex(Eq(a, b))),
        Pair(a, b) => pair(a, b, depth, depth, f).map(|(a, b)| ex(Pair(a, b))),
        Chi(a, b) => pair(a, b, depth, depth, f).map(|(a, b)| ex(Chi(a, b))),
        Beta(a) => map_leaves(a, depth, f).map(|a| ex(Beta(a))),
        Delta(a) => map_leaves(a, depth, f).map(|a| ex(Delta(a))),
        Varsigma(a) => map_leaves(a, depth, f).map(|a| ex(Varsigma(a))),
        Proj(a, i) => map_leaves(a, depth, f).map(|a| ex(Proj(a, *i))),
        Rho {
            eq,
            name,
            guide,
            body,
        } => {
            let ne = map_leaves(eq, depth, f);
            let (g, b) = match pair(guide, body, depth + 1, depth, f) {
                Some(p) => p,
                None if ne.is_none() => return None,
                None => (guide.clone(), body.clone()),
            };
            Some(ex(Rho {
                eq: ne.unwrap_or_else(|| eq.clone()),
                name: name.clone(),
                guide: g,
                body: b,
            }))
        }
        Phi { eq, term, payload } => {
            let ne = map_leaves(eq, depth, f);
            let (t, p) = match pair(term, payload, depth, depth, f) {
                Some(p) => p,
                None if ne.is_none() => return None,
                None => (term.clone(), payload.clone()),
            };
            Some(ex(Phi {
                eq: ne.unwrap_or_else(|| eq.clone()),
                term: t,
                payload: p,
            }))
        }
        Let {
            name,
            ty,
            val,
            body,
        } => {
            let nt = map_leaves(ty, depth, f);
            let (v, b) = match pair(val, body, depth, depth + 1, f) {
                Some(p) => p,
                None if nt.is_none() => return None,
                None => (val.clone(), body.clone()),
            };
            Some(ex(Let {
                name: name.clone(),
                ty: nt.unwrap_or_else(|| ty.clone()),
                val: v,
                body: b,
            }))
        }
    }
}

/// Replace the outermost loose bound variable of `body` with `arg`.
/// `arg` must be locally closed, so no shifting of `arg` is needed.
pub fn instantiate(body: &Ex, arg: &Ex) -> Ex {
    map_leaves(body, 0, &mut |e, d| match e {
        Expr::BVar(k) if *k == d => Some(arg.clone()),
        Expr::BVar(k) if *k > d => Some(ex(Expr::BVar(k - 1))),
        _ => None,
    })
    .unwrap_or_else(|| body.clone())
}

/// Turn occurrences of the free variable `name` into the outermost loose
/// bound variable, ready to be wrapped in a binder.
pub fn close(body: &Ex, name: &Name) -> Ex {
    map_leaves(body, 0, &mut |e, d| match e {
        Expr::FVar(n) if n == name => Some(ex(Expr::BVar(d))),
        Expr::BVar(k) if *k >= d => Some(ex(Expr::BVar(k + 1))),
        _ => None,
    })
    .unwrap_or_else(|| body.clone())
}

/// Open a binder body with a free variable.
pub fn open(body: &Ex, name: &Name) -> Ex {
    instantiate(body, &ex(Expr::FVar(name.clone())))
}

/// Substitute a locally closed expression for a free variable.
pub fn subst_fvar(e: &Ex, name: &Name, with: &Ex) -> Ex {
    map_leaves(e, 0, &mut |x, _| match x {
        Expr::FVar(n) if n == name => Some(with.clone()),
        _ => None,
    })
    .unwrap_or_else(|| e.clone())
}

/// Does the bound variable at index `k` (relative to the top) occur?
pub fn has_loose_bvar(e: &Ex, k: u32) -> bool {
    let mut found = false;
    map_leaves(e, 0, &mut |x, d| {
        if let Expr::BVar(i) = x {
            if *i == k + d {
                found = true;
            }
        }
        None
    });
    found
}

pub fn is_locally_closed(e: &Ex) -> bool {
    let mut ok = true;
    map_leaves(e, 0, &mut |x, d| {
        if let Expr::BVar(i) = x {
            if *i >= d {
                ok = false;
            }
        }
        None
    });
    ok
}

pub fn free_locals(e: &Ex, out: &mut alloc::vec::Vec<Name>) {
    map_leaves(e, 0, &mut |x, _| {
        if let Expr::FVar(n) = x {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
        None
    });
}

pub fn mentions_fvar(e: &Ex, name: &Name) -> bool {
    let mut found = false;
    map_leaves(e, 0, &mut |x, _| {
        if let Expr::FVar(n) = x {
            if n == name {
                found = true;
            }
        }
        None
    });
    found
}

/// Structural equality modulo binder names (alpha-equivalence).
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    use Expr::*;
    match (a, b) {
        (Star, Star) => true,
        (BVar(i), BVar(j)) => i == j,
        (FVar(x), FVar(y)) => x == y,
        (Ref(x), Ref(y)) => x == y,
        (Const(x), Const(y)) => x == y,
        (Pi(x), Pi(y)) | (All(x), All(y)) | (Iota(x), Iota(y)) => {
            alpha_eq(&x.dom, &y.dom) && alpha_eq(&x.body, &y.body)
        }
        (Lam(_, d1, b1), Lam(_, d2, b2)) | (BigLam(_, d1, b1), BigLam(_, d2, b2)) => {
            let doms = match (d1, d2) {
                (None, None) => true,
                (Some(x), Some(y)) => alpha_eq(x, y),
                _ => false,
            };
            doms && alpha_eq(b1, b2)
        }
        (App(f1, a1), App(f2, a2))
        | (AppErased(f1, a1), AppErased(f2, a2))
        | (AppType(f1, a1), AppType(f2, a2))
        | (Eq(f1, a1), Eq(f2, a2))
        | (Pair(f1, a1), Pair(f2, a2))
        | (Chi(f1, a1), Chi(f2, a2)) => alpha_eq(f1, f2) && alpha_eq(a1, a2),
        (Beta(x), Beta(y)) | (Delta(x), Delta(y)) | (Varsigma(x), Varsigma(y)) => alpha_eq(x, y),
        (Proj(x, i), Proj(y, j)) => i == j && alpha_eq(x, y),
        (
            Rho {
                eq: e1,
                guide: g1,
                body: b1,
                ..
            },
            Rho {
                eq: e2,
                guide: g2,
                body: b2,
                ..
            },
        ) => alpha_eq(e1, e2) && alpha_eq(g1, g2) && alpha_eq(b1, b2),
        (
            Phi {
                eq: e1,
                term: t1,
                payload: p1,
            },
            Phi {
                eq: e2,
                term: t2,
                payload: p2,
            },
        ) => alpha_eq(e1, e2) && alpha_eq(t1, t2) && alpha_eq(p1, p2),
        (
            Let {
                ty: t1,
                val: v1,
                body: b1,
                ..
            },
            Let {
                ty: t2,
                val: v2,
                body: b2,
                ..
            },
        ) => alpha_eq(t1, t2) && alpha_eq(v1, v2) && alpha_eq(b1, b2),
        _ => false,
    }
}

/// Unwind an application spine: head and arguments in order.
pub fn spine(e: &Ex) -> (Ex, alloc::vec::Vec<(ArgKind, Ex)>) {
    let mut args = alloc::vec::Vec::new();
    let mut cur = e.clone();
    loop {
        let next = match &*cur {
            Expr::App(f, a) => {
                args.push((ArgKind::Term, a.clone()));
                f.clone()
            }
            Expr::AppErased(f, a) => {
                args.push((ArgKind::Erased, a.clone()));
                f.clone()
            }
            Expr::AppType(f, a) => {
                args.push((ArgKind::Type, a.clone()));
                f.clone()
            }
            _ => break,
        };
        cur = next;
    }
    args.reverse();
    (cur, args)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgKind {
    Term,
    Erased,
    Type,
}

pub fn apply(head: Ex, kind: ArgKind, arg: Ex) -> Ex {
    ex(match kind {
        ArgKind::Term => Expr::App(head, arg),
        ArgKind::Erased => Expr::AppErased(head, arg),
        ArgKind::Type => Expr::AppType(head, arg),
    })
}

pub fn rebuild(head: Ex, args: &[(ArgKind, Ex)]) -> Ex {
    args.iter()
        .fold(head, |h, (k, a)| apply(h, *k, a.clone()))
}

/// Render a name for diagnostics, e.g. `x` or a short global name.
pub fn short_const(key: &str) -> &str {
    match key.rfind("::") {
        Some(i) => &key[i + 2..],
        None => key,
    }
}

pub fn string_of(s: &str) -> String {
    String::from(s)
}
