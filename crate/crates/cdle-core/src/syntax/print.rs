//! Pretty-printing back to parseable Unicode source.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::{ImportArg, Item, SurfaceModule};

const BINDER: u8 = 0;
const APP: u8 = 1;
const ATOM: u8 = 2;

struct Printer {
    names: Vec<String>,
    taken: BTreeSet<String>,
}

fn collect_globals(e: &Expr, out: &mut BTreeSet<String>) {
    use Expr::*;
    match e {
        Ref(s) => {
            out.insert(s.to_string());
        }
        Const(k) => {
            out.insert(short_const(k).to_string());
        }
        FVar(n) => {
            out.insert(n.hint.to_string());
        }
        Star | BVar(_) => {}
        Pi(b) | All(b) | Iota(b) => {
            collect_globals(&b.dom, out);
            collect_globals(&b.body, out);
        }
        Lam(_, d, b) | BigLam(_, d, b) => {
            if let Some(d) = d {
                collect_globals(d, out);
            }
            collect_globals(b, out);
        }
        App(a, b) | AppErased(a, b) | AppType(a, b) | Eq(a, b) | Pair(a, b) | Chi(a, b) => {
            collect_globals(a, out);
            collect_globals(b, out);
        }
        Beta(a) | Delta(a) | Varsigma(a) | Proj(a, _) => collect_globals(a, out),
        Rho { eq, guide, body, .. } => {
            collect_globals(eq, out);
            collect_globals(guide, out);
            collect_globals(body, out);
        }
        Phi { eq, term, payload } => {
            collect_globals(eq, out);
            collect_globals(term, out);
            collect_globals(payload, out);
        }
        Let { ty, val, body, .. } => {
            collect_globals(ty, out);
            collect_globals(val, out);
            collect_globals(body, out);
        }
    }
}

impl Printer {
    fn pick(&self, hint: &str, used: bool) -> String {
        if hint == "_" && !used {
            return "_".to_string();
        }
        let mut base = if hint == "_" { "x".to_string() } else { hint.to_string() };
        while self.names.contains(&base) || self.taken.contains(&base) {
            base.push('\'');
        }
        base
    }

    fn bind(&mut self, hint: &str, body: &Ex, out: &mut String, f: impl FnOnce(&mut Self, &mut String)) {
        let used = has_loose_bvar(body, 0);
        let n = self.pick(hint, used);
        out.push_str(&n);
        self.names.push(n);
        f(self, out);
        self.names.pop();
    }

    fn level(e: &Expr) -> u8 {
        use Expr::*;
        match e {
            Star | BVar(_) | FVar(_) | Ref(_) | Const(_) | Eq(..) | Beta(_) | Pair(..) | Proj(..) => ATOM,
            Let { .. } => ATOM,
            App(..) | AppErased(..) | AppType(..) => APP,
            _ => BINDER,
        }
    }

    fn pp(&mut self, e: &Ex, min: u8, out: &mut String) {
        if Self::level(e) < min {
            out.push('(');
            self.pp(e, BINDER, out);
            out.push(')');
            return;
        }
        use Expr::*;
        match &**e {
            Star => out.push('★'),
            BVar(i) => {
                let idx = self.names.len() as i64 - 1 - *i as i64;
                if idx >= 0 {
                    out.push_str(&self.names[idx as usize]);
                } else {
                    out.push_str(&format!("#{i}"));
                }
            }
            FVar(n) => out.push_str(&n.hint),
            Ref(s) => out.push_str(s),
            Const(k) => out.push_str(short_const(k)),
            Pi(b) | All(b) | Iota(b) => {
                let dependent = has_loose_bvar(&b.body, 0);
                let arrow = match &**e {
                    Pi(_) if !dependent => Some("➔"),
                    All(_) if !dependent && !is_kind(&b.dom) => Some("➾"),
                    _ => None,
                };
                if let Some(a) = arrow {
                    self.pp(&b.dom, APP, out);
                    out.push(' ');
                    out.push_str(a);
                    out.push(' ');
                    self.names.push("_".to_string());
                    self.pp(&b.body, BINDER, out);
                    self.names.pop();
                    return;
                }
                out.push_str(match &**e {
                    Pi(_) => "Π ",
                    All(_) => "∀ ",
                    _ => "ι ",
                });
                let dom = b.dom.clone();
                self.bind(&b.name, &b.body, out, |p, out| {
                    out.push_str(": ");
                    // The domain is outside the binder's scope.
                    let saved = p.names.pop();
                    p.pp(&dom, APP, out);
                    if let Some(s) = saved {
                        p.names.push(s);
                    }
                    out.push_str(". ");
                    p.pp(&b.body, BINDER, out);
                });
            }
            Lam(n, d, body) | BigLam(n, d, body) => {
                out.push_str(if matches!(&**e, Lam(..)) { "λ " } else { "Λ " });
                let d = d.clone();
                self.bind(n, body, out, |p, out| {
                    if let Some(d) = &d {
                        out.push_str(": ");
                        let saved = p.names.pop();
                        p.pp(d, APP, out);
                        if let Some(s) = saved {
                            p.names.push(s);
                        }
                    }
                    out.push_str(". ");
                    p.pp(body, BINDER, out);
                });
            }
            App(f, a) => {
                self.pp(f, APP, out);
                out.push(' ');
                self.pp(a, ATOM, out);
            }
            AppErased(f, a) => {
                self.pp(f, APP, out);
                out.push_str(" -");
                self.pp(a, ATOM, out);
            }
            AppType(f, a) => {
                self.pp(f, APP, out);
                out.push_str(" ·");
                self.pp(a, ATOM, out);
            }
            Eq(a, b) => {
                out.push_str("{ ");
                self.pp(a, BINDER, out);
                out.push_str(" ≃ ");
                self.pp(b, BINDER, out);
                out.push_str(" }");
            }
            Beta(p) => {
                out.push_str("β{ ");
                self.pp(p, BINDER, out);
                out.push_str(" }");
            }
            Rho {
                eq,
                name,
                guide,
                body,
            } => {
                out.push_str("ρ ");
                self.pp(eq, APP, out);
                out.push_str(" @");
                self.bind(name, guide, out, |p, out| {
                    out.push('.');
                    p.pp(guide, ATOM, out);
                });
                out.push_str(" - ");
                self.pp(body, BINDER, out);
            }
            Phi { eq, term, payload } => {
                out.push_str("φ ");
                self.pp(eq, APP, out);
                out.push_str(" - ");
                self.pp(term, APP, out);
                out.push_str(" { ");
                self.pp(payload, BINDER, out);
                out.push_str(" }");
            }
            Delta(t) => {
                out.push_str("δ - ");
                self.pp(t, BINDER, out);
            }
            Varsigma(t) => {
                out.push_str("ς ");
                self.pp(t, ATOM, out);
            }
            Chi(ty, t) => {
                out.push_str("χ ");
                self.pp(ty, APP, out);
                out.push_str(" - ");
                self.pp(t, BINDER, out);
            }
            Pair(a, b) => {
                out.push_str("[ ");
                self.pp(a, BINDER, out);
                out.push_str(" , ");
                self.pp(b, BINDER, out);
                out.push_str(" ]");
            }
            Proj(t, i) => {
                self.pp(t, ATOM, out);
                out.push_str(&format!(".{i}"));
            }
            Let {
                name,
                ty,
                val,
                body,
            } => {
                // A let extends to the right, so wrap it when nested.
                out.push_str("([ ");
                let n = self.pick(name, true);
                out.push_str(&n);
                out.push_str(" ◂ ");
                self.pp(ty, BINDER, out);
                out.push_str(" = ");
                self.pp(val, BINDER, out);
                out.push_str(" ] - ");
                self.names.push(n);
                self.pp(body, BINDER, out);
                self.names.pop();
                out.push(')');
            }
        }
    }
}

/// Print an expression as parseable source text.
pub fn print_expr(e: &Ex) -> String {
    let mut taken = BTreeSet::new();
    collect_globals(e, &mut taken);
    let mut p = Printer {
        names: Vec::new(),
        taken,
    };
    let mut out = String::new();
    p.pp(e, BINDER, &mut out);
    out
}

fn print_arg(a: &ImportArg, out: &mut String) {
    let s = print_expr(&a.expr);
    let wrapped = if matches!(&*a.expr, Expr::Ref(_) | Expr::BVar(_) | Expr::Star) {
        s
    } else {
        format!("({s})")
    };
    out.push(' ');
    match a.kind {
        ArgKind::Type => out.push('·'),
        ArgKind::Erased => out.push('-'),
        ArgKind::Term => {}
    }
    out.push_str(&wrapped);
}

fn print_import(i: &super::Import, out: &mut String) {
    out.push_str("import ");
    out.push_str(&i.path);
    if let Some(a) = &i.alias {
        out.push_str(" as ");
        out.push_str(a);
    }
    for a in &i.args {
        print_arg(a, out);
    }
    out.push_str(" .\n");
}

/// Print a module as parseable source text.
pub fn print_module(m: &SurfaceModule) -> String {
    let mut out = String::new();
    for i in &m.header_imports {
        print_import(i, &mut out);
    }
    out.push_str("module ");
    out.push_str(&m.path);
    for p in &m.params {
        let (o, c) = if p.erased { ('{', '}') } else { ('(', ')') };
        out.push_str(&format!(" {o}{}: {}{c}", p.name, print_expr(&p.class)));
    }
    out.push_str(" .\n");
    for item in &m.items {
        match item {
            Item::Import(i) => print_import(i, &mut out),
            Item::Decl(d) => {
                out.push_str(d.name.as_deref().unwrap_or("_"));
                out.push_str(" ◂ ");
                out.push_str(&print_expr(&d.class));
                out.push_str("\n  = ");
                out.push_str(&print_expr(&d.body));
                out.push_str(" .\n");
            }
        }
    }
    out
}
