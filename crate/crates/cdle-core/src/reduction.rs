//! Reduction of pure terms: call-by-name weak head reduction, normal-order
//! normalization with η-contraction, βη-equality and step counting.
//!
//! Only β-contractions count as steps and consume fuel. Unfolding a global
//! definition is free.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::erasure::{app, instantiate, shift, size, Atom, Pure, P};

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Source of global definition bodies (already erased and closed).
pub trait Defs {
    fn unfold(&self, key: &str) -> Option<P>;
}

/// An empty definition environment.
pub struct NoDefs;

impl Defs for NoDefs {
    fn unfold(&self, _: &str) -> Option<P> {
        None
    }
}

impl Defs for BTreeMap<Arc<str>, P> {
    fn unfold(&self, key: &str) -> Option<P> {
        self.get(key).cloned()
    }
}

#[derive(Clone, Debug, thiserror::Error)]
#[error("fuel exhausted")]
pub struct FuelExhausted {
    /// The term reached when fuel ran out.
    pub partial: P,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Call-by-name to weak head normal form; bare global names are values.
    CbnWhnf,
    /// Normal-order reduction to full β-normal form, unfolding everything.
    CbnFull,
    /// Weak call-by-value: arguments reach a value before substitution.
    Cbv,
}

#[derive(Clone, Debug)]
pub struct EvalTrace {
    pub steps: u64,
    pub result: P,
    pub strategy: Strategy,
}

/// A reducer with a fuel budget shared by every operation run on it.
pub struct Machine<'a> {
    defs: &'a dyn Defs,
    pub fuel: u64,
    pub steps: u64,
    /// Unfold a global even when it is not applied.
    pub unfold_bare: bool,
    /// Give up, as if out of fuel, once a contractum exceeds this many
    /// nodes. Unbounded by default.
    pub size_limit: usize,
}

fn rebuild(mut head: P, mut args: Vec<P>) -> P {
    while let Some(a) = args.pop() {
        head = app(head, a);
    }
    head
}

/// Split `f a1 .. an` into `f` and the arguments, first argument last.
fn unspine(t: &P) -> (P, Vec<P>) {
    let mut head = t.clone();
    let mut args = Vec::new();
    while let Pure::App(f, a) = &*head {
        args.push(a.clone());
        let f = f.clone();
        head = f;
    }
    (head, args)
}

impl<'a> Machine<'a> {
    pub fn new(defs: &'a dyn Defs, fuel: u64) -> Self {
        Machine {
            defs,
            fuel,
            steps: 0,
            unfold_bare: true,
            size_limit: usize::MAX,
        }
    }

    fn beta(&mut self, partial: impl FnOnce() -> P) -> Result<(), FuelExhausted> {
        if self.fuel == 0 {
            return Err(FuelExhausted { partial: partial() });
        }
        self.fuel -= 1;
        self.steps += 1;
        Ok(())
    }

    /// Check the size of a contractum `t` sitting in front of `args`.
    fn bounded(&self, t: P, args: &[P]) -> Result<P, FuelExhausted> {
        if self.size_limit != usize::MAX
            && size(&t) + args.iter().map(|a| size(a)).sum::<usize>() > self.size_limit
        {
            return Err(FuelExhausted {
                partial: rebuild(t, args.to_vec()),
            });
        }
        Ok(t)
    }

    /// Weak head normal form by call-by-name reduction.
    pub fn whnf(&mut self, t: &P) -> Result<P, FuelExhausted> {
        let (mut head, mut args) = unspine(t);
        loop {
            match &*head {
                Pure::App(f, a) => {
                    args.push(a.clone());
                    let f = f.clone();
                    head = f;
                }
                Pure::Lam(_, b) if !args.is_empty() => {
                    let b = b.clone();
                    self.beta(|| rebuild(head.clone(), args.clone()))?;
                    let a = args.pop().expect("non-empty");
                    head = self.bounded(instantiate(&b, &a), &args)?;
                }
                Pure::Free(Atom::Global(k)) if self.unfold_bare || !args.is_empty() => {
                    match self.defs.unfold(k) {
                        Some(body) => head = body,
                        None => break,
                    }
                }
                _ => break,
            }
        }
        Ok(rebuild(head, args))
    }

    /// β-normal form by normal-order reduction.
    pub fn nf(&mut self, t: &P) -> Result<P, FuelExhausted> {
        let w = self.whnf(t)?;
        match &*w {
            Pure::Lam(n, b) => {
                let b = self.nf(b)?;
                Ok(Arc::new(Pure::Lam(n.clone(), b)))
            }
            _ => {
                let (head, mut args) = unspine(&w);
                for a in args.iter_mut() {
                    *a = self.nf(a)?;
                }
                Ok(rebuild(head, args))
            }
        }
    }

    /// Weak call-by-value evaluation. Values are abstractions, bare names
    /// and stuck applications.
    pub fn cbv(&mut self, t: &P) -> Result<P, FuelExhausted> {
        match &**t {
            Pure::App(f, a) => {
                let f = self.cbv(f)?;
                let a = self.cbv(a)?;
                self.cbv_apply(f, a)
            }
            _ => Ok(t.clone()),
        }
    }

    fn cbv_apply(&mut self, f: P, a: P) -> Result<P, FuelExhausted> {
        match &*f {
            Pure::Lam(_, b) => {
                self.beta(|| app(f.clone(), a.clone()))?;
                let r = self.bounded(instantiate(b, &a), &[])?;
                self.cbv(&r)
            }
            Pure::Free(Atom::Global(k)) => match self.defs.unfold(k) {
                Some(body) => {
                    let v = self.cbv(&body)?;
                    self.cbv_apply(v, a)
                }
                None => Ok(app(f, a)),
            },
            _ => Ok(app(f, a)),
        }
    }
}

/// Does bound index `k` occur in `t`?
fn occurs(t: &Pure, k: u32) -> bool {
    match t {
        Pure::Var(i) => *i == k,
        Pure::Free(_) => false,
        Pure::Lam(_, b) => occurs(b, k + 1),
        Pure::App(f, a) => occurs(f, k) || occurs(a, k),
    }
}

/// Bottom-up η-contraction: `λx. f x` becomes `f` when `x` is not free in `f`.
pub fn eta_contract(t: &P) -> P {
    match &**t {
        Pure::Var(_) | Pure::Free(_) => t.clone(),
        Pure::App(f, a) => app(eta_contract(f), eta_contract(a)),
        Pure::Lam(n, b) => {
            let b = eta_contract(b);
            if let Pure::App(f, x) = &*b {
                if matches!(**x, Pure::Var(0)) && !occurs(f, 0) {
                    return shift(f, -1, 0);
                }
            }
            Arc::new(Pure::Lam(n.clone(), b))
        }
    }
}

pub fn whnf_cbn(t: &P, defs: &dyn Defs, fuel: u64) -> Result<P, FuelExhausted> {
    let mut m = Machine::new(defs, fuel);
    m.unfold_bare = false;
    m.whnf(t)
}

pub fn normalize_beta(t: &P, defs: &dyn Defs, fuel: u64) -> Result<P, FuelExhausted> {
    Machine::new(defs, fuel).nf(t)
}

pub fn normalize_beta_eta(t: &P, defs: &dyn Defs, fuel: u64) -> Result<P, FuelExhausted> {
    Ok(eta_contract(&normalize_beta(t, defs, fuel)?))
}

/// βη-equality by normalize-and-compare, with an alpha fast path.
/// Both normalizations draw on the same fuel.
pub fn beta_eta_equal(a: &P, b: &P, defs: &dyn Defs, fuel: u64) -> Result<bool, FuelExhausted> {
    if a == b {
        return Ok(true);
    }
    let mut m = Machine::new(defs, fuel);
    let na = eta_contract(&m.nf(a)?);
    let nb = eta_contract(&m.nf(b)?);
    Ok(na == nb)
}

pub fn eval_count_steps(
    t: &P,
    defs: &dyn Defs,
    strategy: Strategy,
    fuel: u64,
) -> Result<EvalTrace, FuelExhausted> {
    let mut m = Machine::new(defs, fuel);
    let result = match strategy {
        Strategy::CbnWhnf => {
            m.unfold_bare = false;
            m.whnf(t)?
        }
        Strategy::CbnFull => m.nf(t)?,
        Strategy::Cbv => m.cbv(t)?,
    };
    Ok(EvalTrace {
        steps: m.steps,
        result,
        strategy,
    })
}
