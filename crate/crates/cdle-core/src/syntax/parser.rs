use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{lex, Tok, Token};
use super::{Decl, Import, ImportArg, Item, Param, ParseError, SurfaceModule};

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    /// Locally bound names, innermost last.
    scope: Vec<Arc<str>>,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Eof => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn tok(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            span: self.tok().span,
            expected: expected.to_string(),
            found: describe(self.peek()),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<Span, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().span)
        } else {
            self.err(what)
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("identifier"),
        }
    }

    fn lookup(&self, name: &str) -> Option<u32> {
        if name == "_" {
            return None;
        }
        self.scope
            .iter()
            .rev()
            .position(|n| &**n == name)
            .map(|i| i as u32)
    }

    fn with_bound<T>(
        &mut self,
        name: &Arc<str>,
        f: impl FnOnce(&mut Self) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        self.scope.push(name.clone());
        let r = f(self);
        self.scope.pop();
        r
    }

    pub fn expr(&mut self) -> Result<Ex, ParseError> {
        match self.peek() {
            Tok::Lam | Tok::BigLam => {
                let big = *self.peek() == Tok::BigLam;
                self.bump();
                let name: Arc<str> = self.ident()?.into();
                let dom = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect(Tok::Dot, "`.` after binder")?;
                let body = self.with_bound(&name, |p| p.expr())?;
                Ok(ex(if big {
                    Expr::BigLam(name, dom, body)
                } else {
                    Expr::Lam(name, dom, body)
                }))
            }
            Tok::Pi | Tok::All | Tok::Iota => {
                let which = self.bump().tok;
                let name: Arc<str> = self.ident()?.into();
                self.expect(Tok::Colon, "`:` in binder")?;
                let dom = self.expr()?;
                self.expect(Tok::Dot, "`.` after binder")?;
                let body = self.with_bound(&name, |p| p.expr())?;
                let b = Binder { name, dom, body };
                Ok(ex(match which {
                    Tok::Pi => Expr::Pi(b),
                    Tok::All => Expr::All(b),
                    _ => Expr::Iota(b),
                }))
            }
            Tok::Rho => {
                self.bump();
                let eq = self.app()?;
                self.expect(Tok::At, "`@` guide in ρ")?;
                let name: Arc<str> = self.ident()?.into();
                self.expect(Tok::Dot, "`.` after guide variable")?;
                let guide = self.with_bound(&name, |p| p.app())?;
                self.expect(Tok::MinusSep, "` - ` after ρ guide")?;
                let body = self.expr()?;
                Ok(ex(Expr::Rho {
                    eq,
                    name,
                    guide,
                    body,
                }))
            }
            Tok::Phi => {
                self.bump();
                let eq = self.app()?;
                self.expect(Tok::MinusSep, "` - ` in φ")?;
                let term = self.app()?;
                self.expect(Tok::LBrace, "`{` payload in φ")?;
                let payload = self.expr()?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(ex(Expr::Phi { eq, term, payload }))
            }
            Tok::Delta => {
                self.bump();
                self.expect(Tok::MinusSep, "` - ` after δ")?;
                Ok(ex(Expr::Delta(self.expr()?)))
            }
            Tok::Chi => {
                self.bump();
                let ty = self.app()?;
                self.expect(Tok::MinusSep, "` - ` after χ annotation")?;
                Ok(ex(Expr::Chi(ty, self.expr()?)))
            }
            _ => self.arrow(),
        }
    }

    fn arrow(&mut self) -> Result<Ex, ParseError> {
        let lhs = self.app()?;
        match self.peek() {
            Tok::Arrow | Tok::ErasedArrow => {
                let erased = *self.peek() == Tok::ErasedArrow;
                self.bump();
                let name: Arc<str> = "_".into();
                let body = self.with_bound(&name, |p| p.expr())?;
                let b = Binder {
                    name,
                    dom: lhs,
                    body,
                };
                Ok(ex(if erased { Expr::All(b) } else { Expr::Pi(b) }))
            }
            _ => Ok(lhs),
        }
    }

    fn starts_binder_expr(t: &Tok) -> bool {
        matches!(
            t,
            Tok::Lam | Tok::BigLam | Tok::Pi | Tok::All | Tok::Iota | Tok::Rho | Tok::Phi | Tok::Delta | Tok::Chi
        )
    }

    fn app(&mut self) -> Result<Ex, ParseError> {
        if *self.peek() == Tok::Varsigma {
            self.bump();
            return Ok(ex(Expr::Varsigma(self.app()?)));
        }
        let mut head = self.postfix()?;
        loop {
            match self.peek() {
                Tok::Dot2 => {
                    self.bump();
                    let a = self.postfix()?;
                    head = ex(Expr::AppType(head, a));
                }
                Tok::MinusArg => {
                    self.bump();
                    let a = self.postfix()?;
                    head = ex(Expr::AppErased(head, a));
                }
                Tok::Ident(_) | Tok::LParen | Tok::LBrack | Tok::Beta | Tok::Star => {
                    let a = self.postfix()?;
                    head = ex(Expr::App(head, a));
                }
                t if Self::starts_binder_expr(t) => {
                    let a = self.expr()?;
                    head = ex(Expr::App(head, a));
                    break;
                }
                _ => break,
            }
        }
        Ok(head)
    }

    fn postfix(&mut self) -> Result<Ex, ParseError> {
        let mut e = self.atom()?;
        while let Tok::Proj(i) = *self.peek() {
            if self.tok().spaced {
                break;
            }
            self.bump();
            e = ex(Expr::Proj(e, i));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Ex, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                // `alias.name` with no whitespace is a qualified reference.
                if *self.peek() == Tok::Dot && !self.tok().spaced {
                    if let Tok::Ident(rest) = self.peek_at(1).clone() {
                        if !self.toks[self.pos + 1].spaced {
                            self.bump();
                            self.bump();
                            return Ok(ex(Expr::Ref(format!("{s}.{rest}").into())));
                        }
                    }
                }
                Ok(ex(match self.lookup(&s) {
                    Some(i) => Expr::BVar(i),
                    None => Expr::Ref(s.into()),
                }))
            }
            Tok::Star => {
                self.bump();
                Ok(ex(Expr::Star))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::LBrace => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Simeq, "`≃` in equality type")?;
                let b = self.expr()?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(ex(Expr::Eq(a, b)))
            }
            Tok::Beta => {
                self.bump();
                if *self.peek() == Tok::LBrace {
                    self.bump();
                    let p = self.expr()?;
                    self.expect(Tok::RBrace, "`}` after β payload")?;
                    Ok(ex(Expr::Beta(p)))
                } else {
                    Ok(ex(Expr::Beta(identity_term())))
                }
            }
            Tok::LBrack => {
                self.bump();
                if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::Tri {
                    let name: Arc<str> = self.ident()?.into();
                    self.bump();
                    let ty = self.expr()?;
                    self.expect(Tok::Eq, "`=` in local definition")?;
                    let val = self.expr()?;
                    self.expect(Tok::RBrack, "`]`")?;
                    self.expect(Tok::MinusSep, "` - ` after local definition")?;
                    let body = self.with_bound(&name, |p| p.expr())?;
                    return Ok(ex(Expr::Let {
                        name,
                        ty,
                        val,
                        body,
                    }));
                }
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,` in intersection")?;
                let b = self.expr()?;
                self.expect(Tok::RBrack, "`]`")?;
                Ok(ex(Expr::Pair(a, b)))
            }
            _ => self.err("expression"),
        }
    }

    fn path(&mut self) -> Result<String, ParseError> {
        let mut p = self.ident()?;
        while *self.peek() == Tok::Slash {
            self.bump();
            p.push('/');
            p.push_str(&self.ident()?);
        }
        Ok(p)
    }

    fn import(&mut self) -> Result<Import, ParseError> {
        let start = self.expect(Tok::Import, "`import`")?;
        let path = self.path()?;
        let alias = if *self.peek() == Tok::As {
            self.bump();
            Some(self.ident()?)
        } else {
            None
        };
        let mut args = Vec::new();
        loop {
            match self.peek() {
                Tok::Dot => break,
                Tok::Dot2 => {
                    self.bump();
                    args.push(ImportArg {
                        kind: ArgKind::Type,
                        expr: self.postfix()?,
                    });
                }
                Tok::MinusArg => {
                    self.bump();
                    args.push(ImportArg {
                        kind: ArgKind::Erased,
                        expr: self.postfix()?,
                    });
                }
                _ => args.push(ImportArg {
                    kind: ArgKind::Term,
                    expr: self.postfix()?,
                }),
            }
        }
        let end = self.expect(Tok::Dot, "`.` ending import")?;
        Ok(Import {
            path,
            alias,
            args,
            span: start.join(end),
        })
    }

    fn module(&mut self, expected_path: Option<&str>) -> Result<SurfaceModule, ParseError> {
        let mut header_imports = Vec::new();
        while *self.peek() == Tok::Import {
            header_imports.push(self.import()?);
        }
        let mstart = self.expect(Tok::Module, "`module` header")?;
        let path = self.path()?;
        let header_span = mstart.join(self.toks[self.pos.saturating_sub(1)].span);
        if let Some(exp) = expected_path {
            if exp != path {
                return Err(ParseError::ModulePath {
                    span: header_span,
                    expected: exp.to_string(),
                    found: path,
                });
            }
        }
        let mut params = Vec::new();
        loop {
            let (close, erased) = match self.peek() {
                Tok::LParen => (Tok::RParen, false),
                Tok::LBrace => (Tok::RBrace, true),
                _ => break,
            };
            let start = self.bump().span;
            let name = self.ident()?;
            self.expect(Tok::Colon, "`:` in parameter")?;
            let class = self.expr()?;
            let end = self.expect(close, "closing parameter bracket")?;
            params.push(Param {
                name,
                class,
                erased,
                span: start.join(end),
            });
        }
        self.expect(Tok::Dot, "`.` ending module header")?;
        let mut items = Vec::new();
        let mut seen: Vec<String> = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Import => items.push(Item::Import(self.import()?)),
                Tok::Ident(_) => {
                    let start = self.tok().span;
                    let name = self.ident()?;
                    self.expect(Tok::Tri, "`◂` after definition name")?;
                    let class = self.expr()?;
                    self.expect(Tok::Eq, "`=` in definition")?;
                    let body = self.expr()?;
                    let end = self.expect(Tok::Dot, "`.` ending definition")?;
                    let span = start.join(end);
                    let name = if name == "_" {
                        None
                    } else {
                        if seen.contains(&name) {
                            return Err(ParseError::Duplicate { span, name });
                        }
                        seen.push(name.clone());
                        Some(name)
                    };
                    items.push(Item::Decl(Decl {
                        name,
                        class,
                        body,
                        span,
                    }));
                }
                _ => return self.err("definition or import"),
            }
        }
        Ok(SurfaceModule {
            path,
            header_span,
            header_imports,
            params,
            items,
        })
    }
}

/// Parse a whole module. When `expected_path` is given, the header must
/// name exactly that path.
pub fn parse_module(src: &str, expected_path: Option<&str>) -> Result<SurfaceModule, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        scope: Vec::new(),
    };
    p.module(expected_path)
}

/// Parse a standalone term, type or kind.
pub fn parse_term(src: &str) -> Result<Ex, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        scope: Vec::new(),
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.err("end of input");
    }
    Ok(e)
}
