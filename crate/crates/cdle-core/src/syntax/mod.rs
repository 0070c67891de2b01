//! Lexing, parsing and printing of `.ced` sources.
//!
//! Every Unicode symbol of the surface language has one ASCII spelling:
//!
//! | Unicode | ASCII       | Unicode | ASCII       |
//! |---------|-------------|---------|-------------|
//! | `★`     | `*`         | `◂`     | `<|`        |
//! | `Π`     | `Pi`        | `≃`     | `~=`        |
//! | `∀`     | `All`       | `β`     | `beta`      |
//! | `λ`     | `lam`       | `ρ`     | `rho`       |
//! | `Λ`     | `Lam`       | `φ`     | `phi`       |
//! | `ι`     | `iota`      | `δ`     | `delta`     |
//! | `·`     | `^`         | `ς`     | `sigma-sym` |
//! | `➔`     | `->`        | `χ`     | `chi`       |
//! | `➾`     | `=>`        |         |             |
//!
//! `@` is reserved for the guide of `ρ`, which is why the type-argument
//! marker `·` uses `^` as its ASCII form.

pub mod ast;
mod lexer;
mod parser;
mod print;

use alloc::string::String;
use alloc::vec::Vec;

pub use ast::{ArgKind, Ex, Expr, Name, Span};
pub use lexer::{lex, Tok, Token};
pub use parser::{parse_module, parse_term};
pub use print::{print_expr, print_module};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("lexical error: unexpected character {found:?}")]
    Lexical { span: Span, found: char },
    #[error("syntax error: expected {expected}, found {found}")]
    Syntax {
        span: Span,
        expected: String,
        found: String,
    },
    #[error("duplicate definition `{name}`")]
    Duplicate { span: Span, name: String },
    #[error("module header names `{found}` but the file is `{expected}`")]
    ModulePath {
        span: Span,
        expected: String,
        found: String,
    },
}

impl ParseError {
    pub fn span(&self) -> Span {
        match self {
            ParseError::Lexical { span, .. }
            | ParseError::Syntax { span, .. }
            | ParseError::Duplicate { span, .. }
            | ParseError::ModulePath { span, .. } => *span,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Param {
    pub name: String,
    pub class: Ex,
    pub erased: bool,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct ImportArg {
    pub kind: ArgKind,
    pub expr: Ex,
}

#[derive(Clone, Debug)]
pub struct Import {
    pub path: String,
    pub alias: Option<String>,
    pub args: Vec<ImportArg>,
    pub span: Span,
}

/// `name ◂ class = body .`; `name` is `None` for the anonymous `_`.
#[derive(Clone, Debug)]
pub struct Decl {
    pub name: Option<String>,
    pub class: Ex,
    pub body: Ex,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum Item {
    Import(Import),
    Decl(Decl),
}

#[derive(Clone, Debug)]
pub struct SurfaceModule {
    pub path: String,
    pub header_span: Span,
    /// Imports written before the header; they scope over the parameters.
    pub header_imports: Vec<Import>,
    pub params: Vec<Param>,
    pub items: Vec<Item>,
}

impl SurfaceModule {
    pub fn imports(&self) -> impl Iterator<Item = &Import> {
        self.header_imports.iter().chain(self.items.iter().filter_map(|i| match i {
            Item::Import(i) => Some(i),
            Item::Decl(_) => None,
        }))
    }

    pub fn decls(&self) -> impl Iterator<Item = &Decl> {
        self.items.iter().filter_map(|i| match i {
            Item::Decl(d) => Some(d),
            Item::Import(_) => None,
        })
    }
}

fn args_alpha_eq(a: &[ImportArg], b: &[ImportArg]) -> bool {
    a.len() == b.len()
        && a
            .iter()
            .zip(b)
            .all(|(x, y)| x.kind == y.kind && ast::alpha_eq(&x.expr, &y.expr))
}

fn import_alpha_eq(a: &Import, b: &Import) -> bool {
    a.path == b.path && a.alias == b.alias && args_alpha_eq(&a.args, &b.args)
}

/// Alpha-equivalence of whole modules (spans are ignored).
pub fn module_alpha_eq(a: &SurfaceModule, b: &SurfaceModule) -> bool {
    a.path == b.path
        && a.header_imports.len() == b.header_imports.len()
        && a
            .header_imports
            .iter()
            .zip(&b.header_imports)
            .all(|(x, y)| import_alpha_eq(x, y))
        && a.params.len() == b.params.len()
        && a.params.iter().zip(&b.params).all(|(x, y)| {
            x.name == y.name && x.erased == y.erased && ast::alpha_eq(&x.class, &y.class)
        })
        && a.items.len() == b.items.len()
        && a.items.iter().zip(&b.items).all(|(x, y)| match (x, y) {
            (Item::Import(x), Item::Import(y)) => import_alpha_eq(x, y),
            (Item::Decl(x), Item::Decl(y)) => {
                x.name == y.name && ast::alpha_eq(&x.class, &y.class) && ast::alpha_eq(&x.body, &y.body)
            }
            _ => false,
        })
}

#[cfg(test)]
mod tests {
    use super::ast::alpha_eq;
    use super::*;

    #[test]
    fn one_declaration_module() {
        let m = parse_module("module m . idU ◂ Top = β{ λ x. x } .", None).unwrap();
        assert_eq!(m.path, "m");
        let ds: Vec<_> = m.decls().collect();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].name.as_deref(), Some("idU"));
        assert!(matches!(&*ds[0].class, Expr::Ref(s) if &**s == "Top"));
    }

    #[test]
    fn duplicate_names_rejected_but_anonymous_repeat() {
        let e = parse_module("module m . x ◂ T = t . x ◂ T = t .", None).unwrap_err();
        assert!(matches!(e, ParseError::Duplicate { ref name, .. } if name == "x"));
        let m = parse_module("module m . _ ◂ T = t . _ ◂ T = t .", None).unwrap();
        assert_eq!(m.decls().count(), 2);
    }

    #[test]
    fn truncated_lambda_is_syntax_error() {
        assert!(matches!(parse_term("λ x."), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn module_path_must_match() {
        let e = parse_module("module a/c .", Some("a/b")).unwrap_err();
        assert!(matches!(e, ParseError::ModulePath { .. }));
        assert!(parse_module("module a/b .", Some("a/b")).is_ok());
    }

    #[test]
    fn big_lambda_chain_over_small_lambdas() {
        let t = parse_term("Λ N. Λ X. λ z. λ s. z").unwrap();
        let mut cur = t.clone();
        for _ in 0..2 {
            match &*cur {
                Expr::BigLam(_, None, b) => cur = b.clone(),
                other => panic!("expected Λ, got {other:?}"),
            }
        }
        for _ in 0..2 {
            match &*cur {
                Expr::Lam(_, None, b) => cur = b.clone(),
                other => panic!("expected λ, got {other:?}"),
            }
        }
        assert!(matches!(&*cur, Expr::BVar(1)));
    }

    #[test]
    fn intersection_of_type_applications() {
        let t = parse_term("[ zeroF ·Nat , zeroWkIndNatF ·Nat ]").unwrap();
        match &*t {
            Expr::Pair(a, b) => {
                assert!(matches!(&**a, Expr::AppType(..)));
                assert!(matches!(&**b, Expr::AppType(..)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn beta_defaults_to_identity() {
        let a = parse_term("β").unwrap();
        let b = parse_term("β{ λ x. x }").unwrap();
        assert!(alpha_eq(&a, &b));
    }

    #[test]
    fn application_is_left_associative_with_markers() {
        let t = parse_term("f ·T -e x").unwrap();
        match &*t {
            Expr::App(h, _) => match &**h {
                Expr::AppErased(h2, _) => assert!(matches!(&**h2, Expr::AppType(..))),
                o => panic!("{o:?}"),
            },
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn rho_chain_is_right_nested() {
        let t = parse_term("ρ a @x.{ x ≃ y } - ρ b @x.{ y ≃ x } - β").unwrap();
        match &*t {
            Expr::Rho { body, .. } => assert!(matches!(&**body, Expr::Rho { .. })),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn qualified_names_and_projections() {
        let t = parse_term("S.zero (unrollNat n).1").unwrap();
        match &*t {
            Expr::App(h, a) => {
                assert!(matches!(&**h, Expr::Ref(s) if &**s == "S.zero"));
                assert!(matches!(&**a, Expr::Proj(_, 1)));
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn trailing_lambda_argument() {
        let t = parse_term("caseNat zero λ p. p").unwrap();
        assert!(matches!(&*t, Expr::App(_, a) if matches!(&**a, Expr::Lam(..))));
    }

    #[test]
    fn print_then_parse_is_alpha_equal() {
        for src in [
            "Λ S. Λ T. Λ c1. Λ c2. ρ ς (eqCast -c1) @x.{ x ≃ c2 } - eqCast -c2",
            "λ fid. Λ X. [pf ◂ { t2 ≃ t1 } = fid (caseNat zero suc) reflectNat t1] - δ - pf",
            "Λ T. λ t. Λ v. φ v.2 - v.1 { t }",
            "∀ S: ★. ∀ T: ★. Π t: Top. (Π x: S. View ·T β{ t x }) ➾ View ·(S ➔ T) t",
            "χ (Π x: Nat. Nat) - λ x. λ x. x",
            "λ _. λ x. [ x , x ].1",
        ] {
            let a = parse_term(src).unwrap();
            let printed = print_expr(&a);
            let b = parse_term(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
            assert!(alpha_eq(&a, &b), "{src}\n{printed}");
        }
    }
}
