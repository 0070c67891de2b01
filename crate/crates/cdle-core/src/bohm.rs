//! Bounded comparison of Böhm trees, a semi-decision procedure for
//! βη-inequality of pure terms.
//!
//! Both terms are head-normalized node by node. Binder prefixes are opened
//! with shared fresh names, and the shorter prefix is η-expanded so both
//! sides have the same binders. Two nodes separate when their heads are
//! different bound variables, or the same bound variable applied to a
//! different number of arguments. Heads that are free in the input, or
//! nodes whose head normalization runs out of fuel, are never separated.

use alloc::vec::Vec;

use crate::erasure::{app, local, open_with, Atom, Pure, P};
use crate::reduction::{Defs, Machine};
use crate::syntax::ast::Name;

pub const DEFAULT_DEPTH: u32 = 8;
pub const DEFAULT_NODE_FUEL: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Some node at this depth differs: the terms are not βη-equal.
    Separable { depth: u32 },
    /// No difference found within the bounds. This is not a proof of
    /// equality.
    NotSeparableWithin { depth: u32, fuel: u64 },
}

impl Verdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, Verdict::Separable { .. })
    }
}

struct Bohm<'a> {
    defs: &'a dyn Defs,
    max_depth: u32,
    node_fuel: u64,
    bound: Vec<Name>,
}

enum Head {
    Bound(Name),
    Unknown,
}

fn spine(t: &P) -> (P, Vec<P>) {
    let mut head = t.clone();
    let mut args = Vec::new();
    while let Pure::App(f, a) = &*head {
        args.push(a.clone());
        let f = f.clone();
        head = f;
    }
    args.reverse();
    (head, args)
}

impl Bohm<'_> {
    fn whnf(&self, t: &P) -> Option<P> {
        Machine::new(self.defs, self.node_fuel).whnf(t).ok()
    }

    fn head(&self, h: &P) -> Head {
        match &**h {
            Pure::Free(Atom::Local(n)) if self.bound.contains(n) => Head::Bound(n.clone()),
            _ => Head::Unknown,
        }
    }

    /// `Some(d)` when the pair separates at depth `d`.
    fn compare(&mut self, a: &P, b: &P, depth: u32) -> Option<u32> {
        let mut a = a.clone();
        let mut b = b.clone();
        // Open binders pairwise, η-expanding whichever side runs out first.
        let mut opened = 0u64;
        loop {
            a = self.whnf(&a)?;
            b = self.whnf(&b)?;
            let (la, lb) = (matches!(*a, Pure::Lam(..)), matches!(*b, Pure::Lam(..)));
            if !la && !lb {
                break;
            }
            opened += 1;
            if opened > self.node_fuel {
                return None;
            }
            let n = Name::fresh("x");
            let atom = Atom::Local(n.clone());
            self.bound.push(n.clone());
            a = match &*a {
                Pure::Lam(_, body) => open_with(body, &atom),
                _ => app(a.clone(), local(&n)),
            };
            b = match &*b {
                Pure::Lam(_, body) => open_with(body, &atom),
                _ => app(b.clone(), local(&n)),
            };
        }
        let (ha, aa) = spine(&a);
        let (hb, ab) = spine(&b);
        match (self.head(&ha), self.head(&hb)) {
            (Head::Bound(x), Head::Bound(y)) => {
                if x != y || aa.len() != ab.len() {
                    return Some(depth);
                }
            }
            _ => return None,
        }
        if depth >= self.max_depth {
            return None;
        }
        aa.iter()
            .zip(&ab)
            .find_map(|(x, y)| self.compare(x, y, depth + 1))
    }
}

/// Search for a separating node within `depth` levels of the Böhm trees.
/// `node_fuel` bounds the β-steps spent head-normalizing each node.
pub fn bohm_separable(t1: &P, t2: &P, defs: &dyn Defs, depth: u32, node_fuel: u64) -> Verdict {
    let mut b = Bohm {
        defs,
        max_depth: depth,
        node_fuel,
        bound: Vec::new(),
    };
    match b.compare(t1, t2, 0) {
        Some(depth) => Verdict::Separable { depth },
        None => Verdict::NotSeparableWithin {
            depth,
            fuel: node_fuel,
        },
    }
}
