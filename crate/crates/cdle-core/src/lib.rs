//! Core of a checker for the Calculus of Dependent Lambda Eliminations.
//!
//! The crate is `no_std` and only needs `alloc`. File access, the command
//! line and output formats live in the `cdle` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod syntax;
pub mod erasure;
pub mod reduction;
pub mod bohm;
pub mod env;
pub mod conversion;
pub mod typecheck;
pub mod modsys;
