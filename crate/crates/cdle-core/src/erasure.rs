//! Untyped lambda terms and the erasure of annotated terms into them.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::syntax::ast::{ex, Ex, Expr, Name};

pub type P = Arc<Pure>;

/// A free variable of a pure term: a global definition or a local name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Atom {
    Global(Arc<str>),
    Local(Name),
}

/// Pure lambda term with de Bruijn indices for bound variables.
/// The name on `Lam` is only a printing hint.
#[derive(Clone, Debug)]
pub enum Pure {
    Var(u32),
    Free(Atom),
    Lam(Arc<str>, P),
    App(P, P),
}

/// Placeholder produced when a type is erased. Types never occur in the
/// erasure of a well-typed term; this keeps erasure total.
pub const TYPE_ATOM: &str = "<type>";

pub fn var(i: u32) -> P {
    Arc::new(Pure::Var(i))
}

pub fn lam(hint: &str, body: P) -> P {
    Arc::new(Pure::Lam(Arc::from(hint), body))
}

pub fn app(f: P, a: P) -> P {
    Arc::new(Pure::App(f, a))
}

pub fn global(key: &str) -> P {
    Arc::new(Pure::Free(Atom::Global(Arc::from(key))))
}

pub fn local(n: &Name) -> P {
    Arc::new(Pure::Free(Atom::Local(n.clone())))
}

pub fn identity() -> P {
    lam("x", var(0))
}

impl PartialEq for Pure {
    /// Alpha-equivalence: binder hints are ignored.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Pure::Var(i), Pure::Var(j)) => i == j,
            (Pure::Free(a), Pure::Free(b)) => a == b,
            (Pure::Lam(_, a), Pure::Lam(_, b)) => Arc::ptr_eq(a, b) || a == b,
            (Pure::App(f, a), Pure::App(g, b)) => {
                (Arc::ptr_eq(f, g) || f == g) && (Arc::ptr_eq(a, b) || a == b)
            }
            _ => false,
        }
    }
}
impl Eq for Pure {}

/// Add `d` to every bound index at or above `cutoff`.
/// Returns `None` when nothing changes.
fn shift_opt(t: &P, d: i64, cutoff: u32) -> Option<P> {
    match &**t {
        Pure::Var(i) if *i >= cutoff => Some(var((*i as i64 + d) as u32)),
        Pure::Var(_) | Pure::Free(_) => None,
        Pure::Lam(n, b) => shift_opt(b, d, cutoff + 1).map(|b| Arc::new(Pure::Lam(n.clone(), b))),
        Pure::App(f, a) => {
            let nf = shift_opt(f, d, cutoff);
            let na = shift_opt(a, d, cutoff);
            if nf.is_none() && na.is_none() {
                return None;
            }
            Some(app(nf.unwrap_or_else(|| f.clone()), na.unwrap_or_else(|| a.clone())))
        }
    }
}

pub fn shift(t: &P, d: i64, cutoff: u32) -> P {
    shift_opt(t, d, cutoff).unwrap_or_else(|| t.clone())
}

/// Smallest `k` such that all bound indices of `t` are below `k`.
pub fn loose_bound(t: &Pure) -> u32 {
    match t {
        Pure::Var(i) => i + 1,
        Pure::Free(_) => 0,
        Pure::Lam(_, b) => loose_bound(b).saturating_sub(1),
        Pure::App(f, a) => loose_bound(f).max(loose_bound(a)),
    }
}

pub fn is_closed(t: &Pure) -> bool {
    loose_bound(t) == 0
}

fn subst_opt(t: &P, depth: u32, arg: &P, arg_open: bool) -> Option<P> {
    match &**t {
        Pure::Var(i) if *i == depth => Some(if arg_open && depth > 0 {
            shift(arg, depth as i64, 0)
        } else {
            arg.clone()
        }),
        Pure::Var(i) if *i > depth => Some(var(i - 1)),
        Pure::Var(_) | Pure::Free(_) => None,
        Pure::Lam(n, b) => subst_opt(b, depth + 1, arg, arg_open).map(|b| Arc::new(Pure::Lam(n.clone(), b))),
        Pure::App(f, a) => {
            let nf = subst_opt(f, depth, arg, arg_open);
            let na = subst_opt(a, depth, arg, arg_open);
            if nf.is_none() && na.is_none() {
                return None;
            }
            Some(app(nf.unwrap_or_else(|| f.clone()), na.unwrap_or_else(|| a.clone())))
        }
    }
}

/// Capture-avoiding substitution of `arg` for the outermost bound variable
/// of `body` (the body of a `Lam`), i.e. the contractum of `(λ. body) arg`.
pub fn instantiate(body: &P, arg: &P) -> P {
    let arg_open = !is_closed(arg);
    subst_opt(body, 0, arg, arg_open).unwrap_or_else(|| body.clone())
}

/// Substitute `with` for the free atom `name`.
pub fn subst_atom(t: &P, name: &Atom, with: &P) -> P {
    fn go(t: &P, depth: u32, name: &Atom, with: &P, open: bool) -> Option<P> {
        match &**t {
            Pure::Free(a) if a == name => Some(if open && depth > 0 {
                shift(with, depth as i64, 0)
            } else {
                with.clone()
            }),
            Pure::Free(_) | Pure::Var(_) => None,
            Pure::Lam(n, b) => go(b, depth + 1, name, with, open).map(|b| Arc::new(Pure::Lam(n.clone(), b))),
            Pure::App(f, a) => {
                let nf = go(f, depth, name, with, open);
                let na = go(a, depth, name, with, open);
                if nf.is_none() && na.is_none() {
                    return None;
                }
                Some(app(nf.unwrap_or_else(|| f.clone()), na.unwrap_or_else(|| a.clone())))
            }
        }
    }
    go(t, 0, name, with, !is_closed(with)).unwrap_or_else(|| t.clone())
}

/// Replace the outermost loose bound variable by a free atom.
pub fn open_with(body: &P, atom: &Atom) -> P {
    instantiate(body, &Arc::new(Pure::Free(atom.clone())))
}

/// Abstract a free atom into a loose bound variable at index 0.
pub fn close_atom(t: &P, name: &Atom) -> P {
    fn go(t: &P, depth: u32, name: &Atom) -> Option<P> {
        match &**t {
            Pure::Free(a) if a == name => Some(var(depth)),
            Pure::Var(i) if *i >= depth => Some(var(i + 1)),
            Pure::Free(_) | Pure::Var(_) => None,
            Pure::Lam(n, b) => go(b, depth + 1, name).map(|b| Arc::new(Pure::Lam(n.clone(), b))),
            Pure::App(f, a) => {
                let nf = go(f, depth, name);
                let na = go(a, depth, name);
                if nf.is_none() && na.is_none() {
                    return None;
                }
                Some(app(nf.unwrap_or_else(|| f.clone()), na.unwrap_or_else(|| a.clone())))
            }
        }
    }
    go(t, 0, name).unwrap_or_else(|| t.clone())
}

/// Free variables (globals and locals) of a pure term.
pub fn free_vars(t: &Pure) -> BTreeSet<Atom> {
    fn go(t: &Pure, out: &mut BTreeSet<Atom>) {
        match t {
            Pure::Var(_) => {}
            Pure::Free(a) => {
                out.insert(a.clone());
            }
            Pure::Lam(_, b) => go(b, out),
            Pure::App(f, a) => {
                go(f, out);
                go(a, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut out);
    out
}

/// Free local names of a pure term, ignoring globals.
pub fn free_locals(t: &Pure) -> BTreeSet<Name> {
    free_vars(t)
        .into_iter()
        .filter_map(|a| match a {
            Atom::Local(n) => Some(n),
            Atom::Global(_) => None,
        })
        .collect()
}

/// Node count: variables, abstractions and applications each count 1.
pub fn size(t: &Pure) -> usize {
    match t {
        Pure::Var(_) | Pure::Free(_) => 1,
        Pure::Lam(_, b) => 1 + size(b),
        Pure::App(f, a) => 1 + size(f) + size(a),
    }
}

#[derive(Clone)]
enum Slot {
    Kept,
    /// An erased binder. Relevant uses of it (ill-typed, but erasure is
    /// total) become this free name.
    Dropped(Name),
}

struct Eraser {
    slots: Vec<Slot>,
}

impl Eraser {
    fn with<T>(&mut self, s: Slot, f: impl FnOnce(&mut Self) -> T) -> T {
        self.slots.push(s);
        let r = f(self);
        self.slots.pop();
        r
    }

    fn dropped(&mut self, hint: &str, f: impl FnOnce(&mut Self) -> P) -> P {
        self.with(Slot::Dropped(Name::fresh(hint)), f)
    }

    fn go(&mut self, e: &Ex) -> P {
        use Expr::*;
        match &**e {
            BVar(i) => {
                let pos = self.slots.len() as i64 - 1 - *i as i64;
                if pos < 0 {
                    // Ill-scoped input; keep it visible rather than panic.
                    return global("<unbound>");
                }
                let pos = pos as usize;
                match &self.slots[pos] {
                    Slot::Kept => {
                        let k = self.slots[pos + 1..]
                            .iter()
                            .filter(|s| matches!(s, Slot::Kept))
                            .count();
                        var(k as u32)
                    }
                    Slot::Dropped(n) => local(n),
                }
            }
            FVar(n) => local(n),
            Ref(s) | Const(s) => Arc::new(Pure::Free(Atom::Global(s.clone()))),
            Star | Pi(_) | All(_) | Iota(_) | Eq(..) => global(TYPE_ATOM),
            Lam(n, _, b) => {
                let body = self.with(Slot::Kept, |s| s.go(b));
                Arc::new(Pure::Lam(n.clone(), body))
            }
            BigLam(n, _, b) => self.dropped(n, |s| s.go(b)),
            App(f, a) => {
                let f = self.go(f);
                let a = self.go(a);
                app(f, a)
            }
            AppErased(f, _) | AppType(f, _) => self.go(f),
            Beta(p) => self.go(p),
            Rho { body, .. } => self.go(body),
            Phi { payload, .. } => self.go(payload),
            Delta(_) => identity(),
            Varsigma(t) | Chi(_, t) | Pair(t, _) | Proj(t, _) => self.go(t),
            Let { name, val, body, .. } => {
                let b = self.with(Slot::Kept, |s| s.go(body));
                let v = self.go(val);
                app(Arc::new(Pure::Lam(name.clone(), b)), v)
            }
        }
    }
}

/// The erasure `|t|` of an annotated term.
pub fn erase(t: &Ex) -> P {
    Eraser { slots: Vec::new() }.go(t)
}

/// Embed a pure term as an annotated term (globals become constants).
pub fn embed(t: &Pure) -> Ex {
    match t {
        Pure::Var(i) => ex(Expr::BVar(*i)),
        Pure::Free(Atom::Global(k)) => ex(Expr::Const(k.clone())),
        Pure::Free(Atom::Local(n)) => ex(Expr::FVar(n.clone())),
        Pure::Lam(n, b) => ex(Expr::Lam(n.clone(), None, embed(b))),
        Pure::App(f, a) => ex(Expr::App(embed(f), embed(a))),
    }
}

/// Printing: binders are renamed apart from each other and from free names.
/// Globals print by their short name (after the last `::`).
struct PurePrinter {
    names: Vec<String>,
    taken: BTreeSet<String>,
}

fn atom_text(a: &Atom) -> &str {
    match a {
        Atom::Global(k) => crate::syntax::ast::short_const(k),
        Atom::Local(n) => &n.hint,
    }
}

impl PurePrinter {
    fn pp(&mut self, t: &Pure, out: &mut String, prec: u8) {
        match t {
            Pure::Var(i) => {
                let idx = self.names.len() as i64 - 1 - *i as i64;
                if idx >= 0 {
                    out.push_str(&self.names[idx as usize]);
                } else {
                    out.push('#');
                    out.push_str(&i.to_string());
                }
            }
            Pure::Free(a) => out.push_str(atom_text(a)),
            Pure::Lam(n, b) => {
                if prec > 0 {
                    out.push('(');
                }
                let mut name = if &**n == "_" { "x".to_string() } else { n.to_string() };
                while self.names.contains(&name) || self.taken.contains(&name) {
                    name.push('\'');
                }
                out.push_str("λ ");
                out.push_str(&name);
                out.push_str(". ");
                self.names.push(name);
                self.pp(b, out, 0);
                self.names.pop();
                if prec > 0 {
                    out.push(')');
                }
            }
            Pure::App(f, a) => {
                if prec > 1 {
                    out.push('(');
                }
                self.pp(f, out, 1);
                out.push(' ');
                self.pp(a, out, 2);
                if prec > 1 {
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Pure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let taken = free_vars(self).iter().map(|a| atom_text(a).to_string()).collect();
        let mut p = PurePrinter {
            names: Vec::new(),
            taken,
        };
        let mut out = String::new();
        p.pp(self, &mut out, 0);
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use alloc::format;

    fn er(s: &str) -> P {
        erase(&parse_term(s).unwrap())
    }

    #[test]
    fn scott_zero_erases_to_two_lambdas() {
        let t = er("Λ N. Λ X. λ z. λ s. z");
        assert_eq!(*t, *lam("z", lam("s", var(1))));
        assert_eq!(format!("{t}"), "λ z. λ s. z");
    }

    #[test]
    fn let_erases_to_redex() {
        let t = er("[x ◂ T = a] - b x");
        let want = app(lam("x", app(global("b"), var(0))), global("a"));
        assert_eq!(*t, *want);
    }

    #[test]
    fn delta_erases_to_identity() {
        assert_eq!(*er("δ - p"), *identity());
    }

    #[test]
    fn annotations_vanish() {
        for (src, want) in [
            ("[ a , b ]", "a"),
            ("β{ c }", "c"),
            ("ρ e @x.T - t", "t"),
            ("φ e - t { u }", "u"),
            ("a.1", "a"),
            ("a.2", "a"),
            ("f ·T", "f"),
            ("f -e", "f"),
            ("χ T - t", "t"),
            ("ς t", "t"),
        ] {
            assert_eq!(*er(src), *global(want), "{src}");
        }
    }

    #[test]
    fn erased_binder_is_dropped_from_indices() {
        // λ x. Λ y. λ z. x: the Λ disappears, so x is index 1, not 2.
        let t = er("λ x. Λ y. λ z. x");
        assert_eq!(*t, *lam("x", lam("z", var(1))));
    }

    #[test]
    fn free_vars_examples() {
        assert!(free_vars(&identity()).is_empty());
        let t = er("λ z. λ s. s n");
        let fv: Vec<_> = free_vars(&t).into_iter().collect();
        assert_eq!(fv, [Atom::Global(Arc::from("n"))]);
        let t = er("x y x");
        assert_eq!(free_vars(&t).len(), 2);
    }

    #[test]
    fn substitution_avoids_capture() {
        // (λ y. λ x. y) applied to an open term referring to an outer binder.
        let body = lam("x", var(1));
        let r = instantiate(&body, &var(0));
        assert_eq!(*r, *lam("x", var(1)));
    }
}
