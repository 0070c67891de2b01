//! Global definitions shared by every checked module.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use core::cell::RefCell;

use crate::erasure::{erase, P};
use crate::reduction::{eta_contract, Defs, Machine};
use crate::syntax::ast::Ex;

/// Fuel spent normalizing one definition body for the conversion cache.
const CACHE_FUEL: u64 = 200_000;

/// A transparent global definition, closed over its module's parameters.
#[derive(Clone, Debug)]
pub struct GlobalDef {
    /// Kind of a type definition, type of a term definition.
    pub class: Ex,
    pub body: Ex,
    pub is_type: bool,
    /// `|body|` for term definitions.
    pub erased: Option<P>,
}

#[derive(Clone, Debug, Default)]
pub struct Env {
    pub defs: BTreeMap<Arc<str>, GlobalDef>,
    /// Normal forms of erased bodies; valid because definitions never change.
    nf_cache: RefCell<BTreeMap<Arc<str>, P>>,
}

impl Env {
    pub fn get(&self, key: &str) -> Option<&GlobalDef> {
        self.defs.get(key)
    }

    pub fn insert(&mut self, key: Arc<str>, class: Ex, body: Ex, is_type: bool) {
        let erased = (!is_type).then(|| erase(&body));
        self.defs.insert(
            key,
            GlobalDef {
                class,
                body,
                is_type,
                erased,
            },
        );
    }

    /// A view of the term definitions that unfolds to cached normal forms.
    pub fn normal_defs(&self) -> NormalDefs<'_> {
        NormalDefs { env: self }
    }

    /// The body of a type definition, for head unfolding of classifiers.
    pub fn type_body(&self, key: &str) -> Option<Ex> {
        self.defs.get(key).filter(|d| d.is_type).map(|d| d.body.clone())
    }
}

impl Defs for Env {
    fn unfold(&self, key: &str) -> Option<P> {
        self.defs.get(key).and_then(|d| d.erased.clone())
    }
}

/// Definition bodies in βη-normal form, computed on first use.
///
/// Replacing a body by its normal form preserves βη-equality, so this is
/// only used for conversion, never for step counting.
pub struct NormalDefs<'a> {
    env: &'a Env,
}

impl Defs for NormalDefs<'_> {
    fn unfold(&self, key: &str) -> Option<P> {
        if let Some(p) = self.env.nf_cache.borrow().get(key) {
            return Some(p.clone());
        }
        let raw = self.env.unfold(key)?;
        let nf = Machine::new(self, CACHE_FUEL)
            .nf(&raw)
            .map(|n| eta_contract(&n))
            .unwrap_or(raw);
        self.env.nf_cache.borrow_mut().insert(Arc::from(key), nf.clone());
        Some(nf)
    }
}
